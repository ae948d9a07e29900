//! Worked examples with pinned outputs.

use anyhow::{bail, Result};
use serde_json::{json, Value};

use hog_core::causal::Augmentation;
use hog_core::inject::{causal_explanations, positionality_witness, t1_t2_counterexample};
use hog_core::play::{deseq_play, Play, Strategy};
use hog_core::position::{canonicalize, config_iso, positions_of_strategy, Position};
use hog_core::samples::*;

use crate::Report;

pub const FIGURES: [&str; 6] = ["7", "8", "9", "11", "12", "t1t2"];

fn position(s: &Strategy, p: &Play) -> Position {
    canonicalize(&deseq_play(s.arena(), p).expect("well-opened"))
}

fn aug_json(q: &Augmentation) -> Value {
    json!({ "augmentation": q.to_raw(), "key": q.canonical_key() })
}

pub fn run(figure: &str) -> Result<Report> {
    match figure {
        "7" => {
            let sigma = strategy_of(BRANCHING_TERM);
            let Some(w) = positionality_witness(&sigma, 8) else { bail!("no witness found") };
            let text = format!(
                "term {BRANCHING_TERM}\nsab {:?} / {:?}\nta  {:?} / {:?}\nanswer to ta: {}\nshared position {}\n",
                w.sab.moves,
                w.sab.just,
                w.ta.moves,
                w.ta.just,
                w.tab.as_ref().map_or("none".to_string(), |t| format!("{:?}", t.moves)),
                w.position
            );
            Ok(Report::new(json!({ "figure": "7", "term": BRANCHING_TERM, "witness": w }), text))
        }
        "8" => {
            let (x, y) = (kierstead_x(), kierstead_y());
            let (px, py) = (x.maximal_pviews().remove(0), y.maximal_pviews().remove(0));
            let (cx, cy) = (deseq_play(x.arena(), &px)?, deseq_play(y.arena(), &py)?);
            let iso = config_iso(&cx, &cy);
            let text = format!(
                "K_x view {:?} / {:?}\nK_y view {:?} / {:?}\npositions {} and {}\nisomorphism {:?}\n",
                px.moves,
                px.just,
                py.moves,
                py.just,
                canonicalize(&cx),
                canonicalize(&cy),
                iso
            );
            Ok(Report::new(
                json!({
                    "figure": "8",
                    "kx": { "pview": px, "configuration": cx.to_raw(), "position": canonicalize(&cx) },
                    "ky": { "pview": py, "configuration": cy.to_raw(), "position": canonicalize(&cy) },
                    "isomorphism": iso,
                }),
                text,
            ))
        }
        "9" => {
            let (x, y) = (kierstead_x(), kierstead_y());
            let replay = |s: &Strategy| -> Result<Play> {
                let view = s.maximal_pviews().remove(0);
                let last = view.len() - 1;
                let target = view.just[last].expect("Player moves point");
                let sa = view.pushed(view.moves[target], view.just[target]);
                Ok(s.innocent_extend(&sa)?.expect("total strategy"))
            };
            let (sx, sy) = (replay(&x)?, replay(&y)?);
            let (qx, qy) = (position(&x, &sx), position(&y, &sy));
            let x_in_y = positions_of_strategy(&y, sx.len()).contains(&qx);
            let y_in_x = positions_of_strategy(&x, sy.len()).contains(&qy);
            let text = format!(
                "K_x play {:?} / {:?}\nK_y play {:?} / {:?}\nK_x position {qx}\nK_y position {qy}\nK_x position reachable by K_y: {x_in_y}\nK_y position reachable by K_x: {y_in_x}\n",
                sx.moves, sx.just, sy.moves, sy.just
            );
            Ok(Report::new(
                json!({
                    "figure": "9",
                    "kx": { "play": sx, "position": qx, "reachable_by_other": x_in_y },
                    "ky": { "play": sy, "position": qy, "reachable_by_other": y_in_x },
                }),
                text,
            ))
        }
        "11" | "12" => {
            let x = if figure == "11" { z_two_explanations() } else { z_one_explanation() };
            let ex = causal_explanations(&x)?;
            let kx = kierstead_x_causal();
            let mut text = format!("position {}\n{} explanation(s)\n", canonicalize(&x), ex.len());
            for q in &ex {
                text.push_str(&format!(
                    "  caus parents {:?} (expansion of K_x: {})\n",
                    q.to_raw().caus_parent,
                    hog_core::causal::is_expansion(q, &kx)
                ));
            }
            Ok(Report::new(
                json!({
                    "figure": figure,
                    "position": canonicalize(&x),
                    "configuration": x.to_raw(),
                    "explanations": ex.iter().map(aug_json).collect::<Vec<_>>(),
                }),
                text,
            ))
        }
        "t1t2" => {
            let r = t1_t2_counterexample(12)?;
            let text = format!(
                "bound {} events\nunfoldings agree up to depth {}, isomorphic at depth {}: {}\nbalanced positions: T1 {}, T2 {}, arena {}\nequal: {}, all balanced: {}\ngreedy gaps: {}\n",
                r.bound,
                r.agree_up_to,
                r.unfold_depth,
                r.unfold_isomorphic,
                r.t1_positions,
                r.t2_positions,
                r.arena_balanced,
                r.equal_positions,
                r.all_balanced,
                r.greedy_failures.len()
            );
            Ok(Report::new(json!({ "figure": "t1t2", "report": r }), text))
        }
        _ => bail!("unknown figure {figure}; expected one of {}", FIGURES.join(", ")),
    }
}
