//! JSON input documents.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use hog_core::arena::{parse_simple_type, Arena, RawArena};
use hog_core::causal::{caus, Augmentation, Configuration, RawAugmentation, RawConfiguration};
use hog_core::lambda::interpret_text;
use hog_core::play::{deseq_play, validate_play, Play, Strategy};
use hog_core::position::Position;

/// One object per file. The arena comes from `type`, `arena` or the type of
/// `term`; exactly one payload field is expected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Doc {
    #[serde(rename = "type")]
    pub ty: Option<String>,
    pub arena: Option<RawArena>,
    pub term: Option<String>,
    pub pviews: Option<Vec<Play>>,
    pub play: Option<Play>,
    pub augmentation: Option<RawAugmentation>,
    pub configuration: Option<RawConfiguration>,
    pub position: Option<String>,
}

impl Doc {
    pub fn load(path: &Path) -> Result<Doc> {
        let text = if path.as_os_str() == "-" {
            std::io::read_to_string(std::io::stdin())?
        } else {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        };
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn arena(&self) -> Result<Arc<Arena>> {
        if let Some(t) = &self.ty {
            return Ok(Arc::new(parse_simple_type(t)?.0));
        }
        if let Some(raw) = &self.arena {
            return Ok(Arc::new(Arena::from_raw(raw.clone())?));
        }
        if let Some(term) = &self.term {
            return Ok(interpret_text(term, None)?.2.arena().clone());
        }
        bail!("no arena: give \"type\", \"arena\" or \"term\"")
    }

    pub fn strategy(&self) -> Result<Strategy> {
        if let Some(term) = &self.term {
            return Ok(interpret_text(term, self.ty.as_deref())?.2);
        }
        if let Some(views) = &self.pviews {
            return Ok(Strategy::from_pviews(self.arena()?, views)?);
        }
        bail!("expected a strategy: give \"term\" or \"pviews\"")
    }

    /// A causal strategy: given directly, or the causal form of a strategy.
    pub fn causal(&self) -> Result<Augmentation> {
        match &self.augmentation {
            Some(_) => {
                let q = self.augmentation()?;
                if !q.is_causal_strategy() {
                    bail!("augmentation is not a causal strategy");
                }
                Ok(q)
            }
            None => Ok(caus(&self.strategy()?)?),
        }
    }

    pub fn augmentation(&self) -> Result<Augmentation> {
        match &self.augmentation {
            Some(raw) => Ok(Augmentation::checked(self.arena()?, raw.display.clone(), raw.just_parent.clone(), raw.caus_parent.clone())?),
            None if self.term.is_some() || self.pviews.is_some() => self.causal(),
            None => bail!("expected an augmentation"),
        }
    }

    pub fn play(&self) -> Result<Play> {
        let p = self.play.as_ref().ok_or_else(|| anyhow!("expected a \"play\""))?;
        Ok(validate_play(&*self.arena()?, p)?)
    }

    pub fn configuration(&self) -> Result<Configuration> {
        let arena = self.arena()?;
        if let Some(raw) = &self.configuration {
            return Ok(Configuration::from_raw(arena, raw.clone())?);
        }
        if let Some(p) = &self.position {
            return Ok(Position::parse(p)?.to_configuration(&arena)?);
        }
        if self.play.is_some() {
            return Ok(deseq_play(&arena, &self.play()?)?);
        }
        if self.augmentation.is_some() {
            return Ok(self.augmentation()?.config());
        }
        bail!("expected a configuration, position, play or augmentation")
    }
}
