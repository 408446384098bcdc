//! Activity labels, device placements and labelled recordings.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{StreamKind, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityKind {
    SimplePedestrian,
    ConcurrentNondistracted,
    ConcurrentDistracted,
}

impl ActivityKind {
    /// Kind implied by a label name such as `walking+reading`.
    ///
    /// Concurrent activities are written `pedestrian+secondary`; those whose
    /// pedestrian part is stationary (standing, sitting) are not distracted.
    pub fn infer(name: &str) -> Self {
        match name.split_once('+') {
            None => Self::SimplePedestrian,
            Some((base, _)) => match normalize(base).as_str() {
                "standing" | "sitting" => Self::ConcurrentNondistracted,
                _ => Self::ConcurrentDistracted,
            },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SimplePedestrian => "simple_pedestrian",
            Self::ConcurrentNondistracted => "concurrent_nondistracted",
            Self::ConcurrentDistracted => "concurrent_distracted",
        }
    }
}

impl FromStr for ActivityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Self::SimplePedestrian,
            Self::ConcurrentNondistracted,
            Self::ConcurrentDistracted,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| Error::InvalidLabel(format!("unknown activity kind {s:?}")))
    }
}

/// Pedestrian activities that count as "moving" for the movement gate.
pub const MOVING_ACTIVITIES: [&str; 4] = ["walking", "running", "climbing stairs", "descending stairs"];

fn normalize(part: &str) -> String {
    part.trim().to_lowercase().replace(['_', '-'], " ")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActivityLabel {
    pub name: String,
    pub kind: ActivityKind,
}

impl ActivityLabel {
    pub fn new(name: impl Into<String>, kind: ActivityKind) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::InvalidLabel("empty activity name".to_string()));
        }
        Ok(Self { name, kind })
    }

    /// Label whose kind follows from its name (see [`ActivityKind::infer`]).
    pub fn named(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let kind = ActivityKind::infer(&name);
        Self::new(name, kind)
    }

    /// The part before `+`, normalised to lowercase words.
    pub fn pedestrian_component(&self) -> String {
        let base = self.name.split('+').next().unwrap_or("");
        normalize(base)
    }

    pub fn is_moving(&self) -> bool {
        MOVING_ACTIVITIES.contains(&self.pedestrian_component().as_str())
    }

    pub fn is_distracted(&self) -> bool {
        self.kind == ActivityKind::ConcurrentDistracted
    }
}

impl fmt::Display for ActivityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Which wrist wears the watch and which pocket holds the phone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Placement {
    RR,
    RL,
    LR,
    LL,
}

impl Placement {
    pub const ALL: [Self; 4] = [Self::RR, Self::RL, Self::LR, Self::LL];
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| format!("{p:?}") == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown placement tag {s:?}")))
    }
}

/// One labelled activity recording: up to four simultaneous streams.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub subject: String,
    pub placement: Placement,
    pub label: ActivityLabel,
    pub streams: Vec<TimeSeries>,
}

impl Recording {
    pub fn new(
        subject: impl Into<String>,
        placement: Placement,
        label: ActivityLabel,
        streams: Vec<TimeSeries>,
    ) -> Result<Self> {
        let subject = subject.into();
        if subject.trim().is_empty() {
            return Err(Error::InvalidParameter("empty subject id".to_string()));
        }
        let mut seen = BTreeSet::new();
        for s in &streams {
            if !seen.insert(s.kind()) {
                return Err(Error::InvalidStream(format!(
                    "{} appears twice in recording {}",
                    s.kind(),
                    label
                )));
            }
        }
        Ok(Self {
            subject,
            placement,
            label,
            streams,
        })
    }

    pub fn stream(&self, kind: StreamKind) -> Option<&TimeSeries> {
        self.streams.iter().find(|s| s.kind() == kind)
    }

    /// Same recording under a different label (used to build binary tasks).
    pub fn relabeled(&self, label: ActivityLabel) -> Self {
        Self {
            label,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub recordings: Vec<Recording>,
}

impl Dataset {
    pub fn new(recordings: Vec<Recording>) -> Self {
        Self { recordings }
    }

    pub fn len(&self) -> usize {
        self.recordings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recordings.is_empty()
    }

    /// Distinct subject ids in sorted order.
    pub fn subjects(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.recordings.iter().map(|r| r.subject.as_str()).collect();
        set.into_iter().map(String::from).collect()
    }

    /// Distinct labels sorted by name.
    pub fn labels(&self) -> Vec<ActivityLabel> {
        let set: BTreeSet<&ActivityLabel> = self.recordings.iter().map(|r| &r.label).collect();
        set.into_iter().cloned().collect()
    }

    pub fn filter_placement(&self, placement: Option<Placement>) -> Self {
        match placement {
            None => self.clone(),
            Some(p) => Self::new(
                self.recordings
                    .iter()
                    .filter(|r| r.placement == p)
                    .cloned()
                    .collect(),
            ),
        }
    }

    /// Two-class relabelling: `positive` where `predicate` holds, otherwise `negative`.
    pub fn binary(&self, predicate: impl Fn(&ActivityLabel) -> bool, positive: &ActivityLabel, negative: &ActivityLabel) -> Self {
        Self::new(
            self.recordings
                .iter()
                .map(|r| {
                    let l = if predicate(&r.label) { positive } else { negative };
                    r.relabeled(l.clone())
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_follow_the_activity_table() {
        assert_eq!(ActivityKind::infer("walking"), ActivityKind::SimplePedestrian);
        assert_eq!(ActivityKind::infer("walking+reading"), ActivityKind::ConcurrentDistracted);
        assert_eq!(
            ActivityKind::infer("Standing + Reading"),
            ActivityKind::ConcurrentNondistracted
        );
        assert_eq!(
            ActivityKind::infer("sitting+using_smartphone"),
            ActivityKind::ConcurrentNondistracted
        );
        assert_eq!(
            ActivityKind::infer("running+using smartphone"),
            ActivityKind::ConcurrentDistracted
        );
    }

    #[test]
    fn moving_uses_the_pedestrian_component() {
        let l = |n: &str| ActivityLabel::named(n).unwrap();
        assert!(l("climbing_stairs+eating").is_moving());
        assert!(l("Descending stairs").is_moving());
        assert!(!l("standing+reading").is_moving());
        assert!(!l("sitting").is_moving());
        assert!(l("walking+drinking").is_distracted());
        assert!(!l("walking").is_distracted());
    }

    #[test]
    fn empty_names_are_rejected() {
        assert!(ActivityLabel::named("  ").is_err());
    }

    #[test]
    fn placement_tags() {
        assert_eq!("LR".parse::<Placement>().unwrap(), Placement::LR);
        assert!("XX".parse::<Placement>().is_err());
    }
}
