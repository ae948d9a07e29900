//! One line per acceptance criterion; exits non-zero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use hog_core::arena::{parse_simple_type, parse_type};
use hog_core::bisim::{bisimilar, check_partition, is_clone};
use hog_core::causal::{caus, expansions_of, Augmentation};
use hog_core::inject::*;
use hog_core::lambda::interpret_text;
use hog_core::play::{deseq_play, Play, Strategy};
use hog_core::position::{
    canonicalize, enumerate_arena_positions, positions_of_causal, positions_of_strategy, rel_interpret, rel_point,
    ArrowArena,
};
use hog_core::samples::*;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn kierstead_separation() -> Result<String, String> {
    let r = decide_equality(&kierstead_x_causal(), &kierstead_y_causal(), 1 << 16).map_err(|e| e.to_string())?;
    ensure(!r.equal, "strategies reported equal")?;
    let sep = r.separating.ok_or("no separating position")?;
    let views = |s: &Strategy| -> Vec<_> {
        s.maximal_pviews().iter().map(|p| canonicalize(&deseq_play(s.arena(), p).unwrap())).collect()
    };
    ensure(views(&kierstead_x()) == views(&kierstead_y()), "maximal P-views have different positions")?;
    Ok(format!("separating position of size {}", sep.size()))
}

fn positionality_failure() -> Result<String, String> {
    let sigma = strategy_of(BRANCHING_TERM);
    let arena = sigma.arena().clone();
    let pos = |s: &Play| canonicalize(&deseq_play(&arena, s).unwrap());
    let w = positionality_witness(&sigma, 8).ok_or("no witness among plays of length ≤ 8")?;
    let sa = w.sab.prefix(w.sab.len() - 1);
    ensure(pos(&sa) == pos(&w.ta), "witness positions differ")?;
    ensure(w.tab.as_ref().map(|t| pos(t)) != Some(pos(&w.sab)), "witness is answered positionally")?;
    // the two maximal branches: f's first argument then the inner f's second, and the reverse
    let sab = Play::from_pairs(&[(0, None), (1, Some(0)), (2, Some(1)), (1, Some(0)), (3, Some(3)), (4, Some(0))]);
    let ta = Play::from_pairs(&[(0, None), (1, Some(0)), (3, Some(1)), (1, Some(0)), (2, Some(3))]);
    ensure(sigma.plays(8).contains(&sab), "named play missing")?;
    ensure(pos(&sab.prefix(5)) == pos(&ta), "named plays reach different positions")?;
    ensure(sigma.innocent_extend(&ta).map_err(|e| e.to_string())?.is_none(), "named play is answered")?;
    Ok(format!("sab = {:?}, ta = {:?}", w.sab.moves, w.ta.moves))
}

fn positions_round_trip() -> Result<String, String> {
    let terms = [r"\f:o -> o. \x:o. f x", r"\f:o -> o. \x:o. f (f x)"];
    let mut strategies = vec![kierstead_x(), kierstead_y()];
    strategies.extend(terms.iter().map(|t| strategy_of(t)));
    let mut sizes = vec![];
    for s in &strategies {
        let a = positions_of_strategy(s, 12);
        let b = positions_of_causal(&caus(s).unwrap(), 12);
        ensure(a == b, "position sets differ")?;
        sizes.push(a.len());
    }
    Ok(format!("position counts {sizes:?}"))
}

fn arrow_bijection() -> Result<String, String> {
    let mut n = 0;
    for t in ["(o -> o) -> o -> o", "((o -> o) -> o) -> o"] {
        let ty = parse_type(t).unwrap();
        let aa = ArrowArena::from_type(&ty).map_err(|e| e.to_string())?;
        for p in enumerate_arena_positions(&aa.arena, 8) {
            let (l, r) = aa.split(&p).map_err(|e| e.to_string())?;
            ensure(aa.join(&l, &r).map_err(|e| e.to_string())? == p, format!("round trip fails on {p}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} positions"))
}

fn relational_collapse() -> Result<String, String> {
    let mut counts = vec![];
    for m in [r"\x:o. x", r"\f:o -> o. \x:o. f x", r"\f:o -> o. \x:o. f (f x)"] {
        let (nf, ty, sigma) = interpret_text(m, None).map_err(|e| e.to_string())?;
        let from_positions: BTreeSet<_> =
            positions_of_strategy(&sigma, 8).iter().map(|p| rel_point(&ty, p).unwrap()).collect();
        let direct = rel_interpret(&nf, &ty, 8);
        ensure(from_positions == direct, format!("mismatch for {m}"))?;
        counts.push(direct.len());
    }
    Ok(format!("points {counts:?}"))
}

fn equivalence_laws() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(7);
    let mut pools: Vec<Vec<Augmentation>> = vec![];
    for (_, s) in corpus() {
        let p = caus(&s).unwrap();
        let qs: Vec<Augmentation> = expansions_of(&p, 12, false).into_iter().map(|(q, _)| q).collect();
        if qs.len() >= 2 {
            pools.push(qs);
        }
    }
    let (mut checked, mut related, mut cloned) = (0, 0, 0);
    while checked < 600 {
        let pool = pools.choose(&mut rng).unwrap();
        let (a, b, c) = (pool.choose(&mut rng).unwrap(), pool.choose(&mut rng).unwrap(), pool.choose(&mut rng).unwrap());
        ensure(bisimilar(a, a), "bisimilarity not reflexive")?;
        ensure(bisimilar(a, b) == bisimilar(b, a), "bisimilarity not symmetric")?;
        related += usize::from(a.len() != b.len() && bisimilar(a, b));
        if bisimilar(a, b) && bisimilar(b, c) {
            ensure(bisimilar(a, c), "bisimilarity not transitive")?;
        }
        let id: Vec<usize> = (0..a.len()).collect();
        let evs: Vec<usize> = (0..a.len()).collect();
        let (x, y, z) = (*evs.choose(&mut rng).unwrap(), *evs.choose(&mut rng).unwrap(), *evs.choose(&mut rng).unwrap());
        ensure(is_clone(a, a, &id, x, x), "clones not reflexive")?;
        ensure(is_clone(a, a, &id, x, y) == is_clone(a, a, &id, y, x), "clones not symmetric")?;
        cloned += usize::from(x != y && is_clone(a, a, &id, x, y));
        if is_clone(a, a, &id, x, y) && is_clone(a, a, &id, y, z) {
            ensure(is_clone(a, a, &id, x, z), "clones not transitive")?;
        }
        checked += 1;
    }
    ensure(related > 0 && cloned > 0, "sample never relates distinct items")?;
    Ok(format!("{checked} sampled triples; {related} bisimilar pairs of different sizes, {cloned} distinct clone pairs"))
}

fn kierstead_corpus() -> Vec<Strategy> {
    corpus().into_iter().filter(|(t, _)| *t == CORPUS_TYPES[0]).map(|(_, s)| s).collect()
}

fn partition_lemma() -> Result<String, String> {
    let all = corpus();
    for (_, s) in &all {
        let q = characteristic_expansion(&caus(s).unwrap()).map_err(|e| e.to_string())?;
        check_partition(&q).map_err(|e| e.to_string())?;
    }
    Ok(format!("{} strategies ({} on the Kierstead arena)", all.len(), kierstead_corpus().len()))
}

fn desk_theorem() -> Result<String, String> {
    let all = corpus();
    ensure(all.len() >= 20, "corpus too small")?;
    let mut pairs = 0;
    for (t1, s1) in &all {
        for (t2, s2) in &all {
            if t1 != t2 {
                continue;
            }
            let r = decide_equality(&caus(s1).unwrap(), &caus(s2).unwrap(), 1 << 16).map_err(|e| e.to_string())?;
            ensure(r.equal == (s1 == s2), format!("disagreement on {t1}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{} strategies, {pairs} pairs", all.len()))
}

fn explanation_counts() -> Result<String, String> {
    let a = causal_explanations(&z_two_explanations()).map_err(|e| e.to_string())?.len();
    let b = causal_explanations(&z_one_explanation()).map_err(|e| e.to_string())?.len();
    ensure(a == 2 && b == 1, format!("counts {a} and {b}"))?;
    Ok("2 and 1".into())
}

fn tree_combinatorics() -> Result<String, String> {
    let mut sizes = vec![];
    for n in 0..=4 {
        let r = max_tree_search(n).map_err(|e| e.to_string())?;
        ensure(r.is_t_n && r.size as u64 == t_size(n), format!("n = {n}"))?;
        sizes.push(r.size);
    }
    ensure(sizes == [1, 2, 5, 16, 65], "sizes")?;
    let arena = Arc::new(parse_simple_type("(o -> o) -> o -> o").unwrap().0);
    for n in 0..=5usize {
        let mut body = "x".to_string();
        for _ in 0..n {
            body = format!("f ({body})");
        }
        let sigma = strategy_of(&format!(r"\f:o -> o. \x:o. {body}"));
        assert_eq!(**sigma.arena(), *arena);
        let s = sigma.maximal_pviews().into_iter().max_by_key(|p| p.len()).unwrap();
        let counts = wide_copy_counts(&wide_expansion(&sigma, &s).map_err(|e| e.to_string())?);
        let fact = |k: usize| (1..=k).product::<usize>();
        let want: Vec<usize> = (0..=s.len() / 2 - 1).map(|k| fact(s.len() / 2 - 1) / fact(s.len() / 2 - 1 - k)).collect();
        ensure(counts == want, format!("copy counts {counts:?} vs {want:?}"))?;
    }
    Ok(format!("tree sizes {sizes:?}"))
}

fn t1_t2() -> Result<String, String> {
    let r = t1_t2_counterexample(12).map_err(|e| e.to_string())?;
    ensure(!r.unfold_isomorphic, "unfoldings are isomorphic")?;
    ensure(r.equal_positions, "balanced position sets differ")?;
    Ok(format!(
        "{} balanced positions each, {} in the arena, {} greedy gaps",
        r.t1_positions,
        r.arena_balanced,
        r.greedy_failures.len()
    ))
}

fn main() {
    let criteria: [(&str, Check, Duration); 11] = [
        ("Kierstead terms separated by positions", kierstead_separation, Duration::from_secs(5)),
        ("branching term is not positional", positionality_failure, Duration::from_secs(60)),
        ("positions of plays and of expansions agree", positions_round_trip, Duration::from_secs(30)),
        ("arrow split and join are inverse", arrow_bijection, Duration::from_secs(60)),
        ("positions collapse onto relational points", relational_collapse, Duration::from_secs(60)),
        ("bisimilarity and clones are equivalences", equivalence_laws, Duration::from_secs(120)),
        ("characteristic forks partition clone classes", partition_lemma, Duration::from_secs(60)),
        ("equality decided from positions on the corpus", desk_theorem, Duration::from_secs(300)),
        ("causal explanation counts", explanation_counts, Duration::from_secs(60)),
        ("maximal trees and wide expansions", tree_combinatorics, Duration::from_secs(60)),
        ("regular strategies share balanced positions", t1_t2, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let out = match out {
            Ok(m) if took > *limit => Err(format!("{m}; too slow ({took:.2?} > {limit:?})")),
            o => o,
        };
        match out {
            Ok(m) => println!("PASS {:>2} {name}: {m} [{took:.2?}]", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {m} [{took:.2?}]", i + 1)
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
