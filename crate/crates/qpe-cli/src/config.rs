//! Experiment configuration: the single source of truth for every
//! subcommand, whether it arrives via flags or a `--config` JSON file.
//!
//! Resolution replaces every implicit default with its concrete value
//! ("auto" time, derived seeds, default grids) before anything runs, and
//! the resolved form is echoed verbatim into every output file, so
//! persisted data never depends on defaults.

use std::path::PathBuf;

use qpe_core::error::{Error, Result};
use qpe_core::seeds;
use qpe_core::{heuristic_time, SpinGlassHamiltonian};
use serde::{Deserialize, Serialize};

/// Requested evolution time: the heuristic bound or an explicit value.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeSpec {
    Auto,
    Value(f64),
}

impl TimeSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(TimeSpec::Auto);
        }
        s.parse::<f64>()
            .map(TimeSpec::Value)
            .map_err(|_| Error::invalid(format!("time must be `auto` or a number, got {s:?}")))
    }

    pub fn resolve(&self, h: &SpinGlassHamiltonian) -> f64 {
        match self {
            TimeSpec::Auto => heuristic_time(h),
            TimeSpec::Value(v) => *v,
        }
    }
}

impl Serialize for TimeSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TimeSpec::Auto => s.serialize_str("auto"),
            TimeSpec::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for TimeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(TimeSpec::Value(v)),
            Raw::Text(s) if s == "auto" => Ok(TimeSpec::Auto),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "time must be `auto` or a number, got {s:?}"
            ))),
        }
    }
}

/// An inclusive integer range, written `lo..hi` (or a single value) on the
/// command line and `[lo, hi]` in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusiveRange {
    pub min: usize,
    pub max: usize,
}

impl InclusiveRange {
    pub fn parse(s: &str) -> Result<Self> {
        let (min, max) = match s.split_once("..") {
            Some((lo, hi)) => (lo.trim().parse::<usize>(), hi.trim().parse::<usize>()),
            None => {
                let v = s.trim().parse::<usize>();
                (v.clone(), v)
            }
        };
        let (min, max) = (
            min.map_err(|_| Error::invalid(format!("bad range {s:?}")))?,
            max.map_err(|_| Error::invalid(format!("bad range {s:?}")))?,
        );
        if min > max {
            return Err(Error::invalid(format!("empty range {s:?}")));
        }
        Ok(InclusiveRange { min, max })
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.min..=self.max
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianSection {
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QpeSection {
    pub m_prec: usize,
    pub t: TimeSpec,
    /// Numeric time after resolution; absent until resolved.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resolved_t: Option<f64>,
    pub k: u32,
    pub r: u32,
    pub state_kind: String,
    pub shots: u64,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub state_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shot_seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r_list: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_list: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scales: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_range: Option<InclusiveRange>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m_range: Option<InclusiveRange>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub instances: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub states: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact_ref: Option<bool>,
}

/// One experiment, fully described. The `subcommand` selects which sections
/// are consulted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hamiltonian: Option<HamiltonianSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub qpe: Option<QpeSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sweep: Option<SweepSection>,
    pub output_dir: PathBuf,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn hamiltonian(&self) -> Result<&HamiltonianSection> {
        self.hamiltonian.as_ref().ok_or_else(|| {
            Error::invalid(format!("{} needs a hamiltonian section", self.subcommand))
        })
    }

    pub fn qpe(&self) -> Result<&QpeSection> {
        self.qpe
            .as_ref()
            .ok_or_else(|| Error::invalid(format!("{} needs a qpe section", self.subcommand)))
    }

    pub fn sweep(&self) -> Result<&SweepSection> {
        self.sweep
            .as_ref()
            .ok_or_else(|| Error::invalid(format!("{} needs a sweep section", self.subcommand)))
    }

    /// Fill derived seeds and the numeric evolution time in place.
    ///
    /// Seed streams: 10 is the state-preparation seed, 11 the shot seed;
    /// sweep jobs derive further seeds from their job index inside the
    /// analysis layer.
    pub fn resolve(&mut self) -> Result<()> {
        let master = self.master_seed;
        if let (Some(qpe), Some(ham)) = (self.qpe.as_mut(), self.hamiltonian.as_ref()) {
            let h = SpinGlassHamiltonian::generate(ham.n, ham.seed)?;
            qpe.resolved_t = Some(qpe.t.resolve(&h));
            qpe.state_seed = Some(qpe.state_seed.unwrap_or_else(|| seeds::derive(master, 10)));
            qpe.shot_seed = Some(qpe.shot_seed.unwrap_or_else(|| seeds::derive(master, 11)));
        }
        Ok(())
    }
}

/// Default output directory: `$QPE_OUTPUT_DIR`, falling back to `qpe_out`.
pub fn default_output_dir() -> PathBuf {
    std::env::var_os("QPE_OUTPUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("qpe_out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_spec_round_trip() {
        assert_eq!(TimeSpec::parse("auto").unwrap(), TimeSpec::Auto);
        assert_eq!(TimeSpec::parse("0.5").unwrap(), TimeSpec::Value(0.5));
        assert!(TimeSpec::parse("fast").is_err());
        let json = serde_json::to_string(&TimeSpec::Auto).unwrap();
        assert_eq!(json, "\"auto\"");
        let back: TimeSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, TimeSpec::Auto);
    }

    #[test]
    fn range_parsing() {
        assert_eq!(
            InclusiveRange::parse("3..10").unwrap(),
            InclusiveRange { min: 3, max: 10 }
        );
        assert_eq!(
            InclusiveRange::parse("5").unwrap(),
            InclusiveRange { min: 5, max: 5 }
        );
        assert!(InclusiveRange::parse("7..3").is_err());
        assert!(InclusiveRange::parse("a..b").is_err());
    }
}
