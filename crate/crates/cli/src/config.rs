//! Experiment configuration: a TOML file, overridden by command-line flags,
//! and written back out in resolved form next to every run's outputs.

use std::path::{Path, PathBuf};

use fpsums_core::field::is_prime;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{field}: {value} is not an odd prime")]
    NotPrime { field: String, value: u64 },
    #[error("{field}: malformed prime range {value:?} (expected \"a..b\" or \"a..=b\")")]
    MalformedRange { field: String, value: String },
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
}

/// Either an explicit list of primes or a range string such as `"5..=101"`,
/// which selects every prime in the range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrimeList {
    List(Vec<u64>),
    Range(String),
}

impl PrimeList {
    pub fn resolve(&self, field: &str, max_p: Option<u64>) -> Result<Vec<u64>, ConfigError> {
        let mut out = match self {
            PrimeList::List(v) => {
                for &p in v {
                    if p < 3 || !is_prime(p) {
                        return Err(ConfigError::NotPrime {
                            field: field.into(),
                            value: p,
                        });
                    }
                }
                v.clone()
            }
            PrimeList::Range(s) => {
                let bad = || ConfigError::MalformedRange {
                    field: field.into(),
                    value: s.clone(),
                };
                let (lo, hi, inclusive) = if let Some((a, b)) = s.split_once("..=") {
                    (a, b, true)
                } else if let Some((a, b)) = s.split_once("..") {
                    (a, b, false)
                } else {
                    return Err(bad());
                };
                let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
                let hi = if inclusive { hi } else { hi.saturating_sub(1) };
                if lo > hi {
                    return Err(bad());
                }
                (lo.max(3)..=hi).filter(|&p| is_prime(p)).collect()
            }
        };
        if let Some(cap) = max_p {
            out.retain(|&p| p <= cap);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityConfig {
    pub primes: PrimeList,
    /// Random instances per prime.
    pub instances: u32,
    pub max_size: u32,
    /// Primes (2 allowed) for the point-plane Gram check.
    pub gram_primes: Vec<u64>,
    /// Shift tuples drawn per prime for the Weil check.
    pub weil_samples: u32,
    pub max_r: u32,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        Self {
            primes: PrimeList::List(vec![5, 7, 11, 13]),
            instances: 5,
            max_size: 8,
            gram_primes: vec![2, 3, 5],
            weil_samples: 50,
            max_r: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub primes: PrimeList,
    pub instances: u32,
    /// Largest set size requested.
    pub max_size: u32,
    /// Largest set size the brute-force references accept; bigger requests
    /// are skipped.
    pub brute_cap: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            primes: PrimeList::List(vec![7, 11, 13, 17, 19, 23, 29, 31]),
            instances: 10,
            max_size: 8,
            brute_cap: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub primes: PrimeList,
    pub r: u32,
    /// Largest subgroup order tried.
    pub max_order: u32,
    /// Interval lengths for the subgroup and polynomial rows.
    pub lengths: Vec<u32>,
    /// Sizes for the random sets of the collinear-triple rows.
    pub triple_sizes: Vec<u32>,
    /// Largest prime for the `sigma` rows.
    pub sigma_max_p: u64,
    /// Largest prime for the point-plane rows.
    pub incidence_max_p: u64,
    /// Polynomial degrees for the image-energy rows.
    pub degrees: Vec<u32>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            primes: PrimeList::List(vec![61, 127, 251, 509, 1021, 2039, 4093, 8191]),
            r: 3,
            max_order: 64,
            lengths: vec![4, 8, 16, 32, 64, 128, 256],
            triple_sizes: vec![4, 8, 16],
            sigma_max_p: 127,
            incidence_max_p: 13,
            degrees: vec![2, 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    /// Grid points per axis.
    pub grid: u32,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self { grid: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Interval,
    Random,
    Subgroup,
    Primes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharsumConfig {
    pub p: u64,
    /// Character index `m`; `chi(g^k) = e(mk / (p-1))`. Defaults to the
    /// quadratic character.
    pub character: Option<u64>,
    pub set: SetKind,
    /// Size of `S` (or subgroup order, or prime bound).
    pub size: u32,
    /// `I = [1, X]`.
    pub x: u32,
}

impl Default for CharsumConfig {
    fn default() -> Self {
        Self {
            p: 4093,
            character: None,
            set: SetKind::Random,
            size: 200,
            x: 20,
        }
    }
}

pub const SUITES: [&str; 5] = ["identities", "oracles", "sweep", "regions", "charsum"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Worker threads; 0 lets the thread pool decide.
    pub workers: usize,
    pub out: PathBuf,
    pub epsilon: f64,
    pub max_p: Option<u64>,
    /// Record wall time per row. Off by default so that outputs are
    /// byte-identical across runs.
    pub timing: bool,
    /// Suites run by the `all` command.
    pub suites: Vec<String>,
    pub identities: IdentityConfig,
    pub oracles: OracleConfig,
    pub sweep: SweepConfig,
    pub regions: RegionConfig,
    pub charsum: CharsumConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            workers: 0,
            out: PathBuf::from("fpsums-out"),
            epsilon: 0.0,
            max_p: None,
            timing: false,
            suites: SUITES[..4].iter().map(|s| s.to_string()).collect(),
            identities: IdentityConfig::default(),
            oracles: OracleConfig::default(),
            sweep: SweepConfig::default(),
            regions: RegionConfig::default(),
            charsum: CharsumConfig::default(),
        }
    }
}

/// Values given on the command line; `None` keeps the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub epsilon: Option<f64>,
    pub max_p: Option<u64>,
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })?;
        Self::from_toml(&text).map_err(|source| ConfigError::Parse {
            path: path.into(),
            source,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = o.max_p {
            self.max_p = Some(v);
        }
        self.timing |= o.timing;
    }

    /// Check every prime list and numeric field up front.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.identities.primes.resolve("identities.primes", self.max_p)?;
        self.oracles.primes.resolve("oracles.primes", self.max_p)?;
        self.sweep.primes.resolve("sweep.primes", self.max_p)?;
        for &p in &self.identities.gram_primes {
            if !is_prime(p) {
                return Err(ConfigError::NotPrime {
                    field: "identities.gram_primes".into(),
                    value: p,
                });
            }
        }
        if self.charsum.p < 3 || !is_prime(self.charsum.p) {
            return Err(ConfigError::NotPrime {
                field: "charsum.p".into(),
                value: self.charsum.p,
            });
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(ConfigError::Invalid {
                field: "epsilon".into(),
                reason: format!("{} is not a finite nonnegative number", self.epsilon),
            });
        }
        if self.sweep.r == 0 {
            return Err(ConfigError::Invalid {
                field: "sweep.r".into(),
                reason: "must be at least 1".into(),
            });
        }
        if self.regions.grid < 2 {
            return Err(ConfigError::Invalid {
                field: "regions.grid".into(),
                reason: "need at least 2 points per axis".into(),
            });
        }
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(ConfigError::UnknownSuite(s.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        let r = PrimeList::Range("5..=13".into()).resolve("f", None).unwrap();
        assert_eq!(r, vec![5, 7, 11, 13]);
        let r = PrimeList::Range("5..13".into()).resolve("f", None).unwrap();
        assert_eq!(r, vec![5, 7, 11]);
        assert!(matches!(
            PrimeList::Range("5-13".into()).resolve("f", None),
            Err(ConfigError::MalformedRange { .. })
        ));
        assert!(matches!(
            PrimeList::Range("13..=5".into()).resolve("f", None),
            Err(ConfigError::MalformedRange { .. })
        ));
        let err = PrimeList::List(vec![5, 4]).resolve("f", None).unwrap_err();
        assert!(err.to_string().contains('4'));
        let capped = PrimeList::List(vec![61, 8191]).resolve("f", Some(1000)).unwrap();
        assert_eq!(capped, vec![61]);
    }

    #[test]
    fn round_trip_and_overrides() {
        let mut c = ExperimentConfig::from_toml("seed = 9\n[identities]\nprimes = \"5..=7\"\n").unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.oracles, OracleConfig::default());
        c.apply(&Overrides {
            seed: Some(3),
            epsilon: Some(0.1),
            ..Default::default()
        });
        assert_eq!((c.seed, c.epsilon), (3, 0.1));
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn validation_names_offender() {
        let mut c = ExperimentConfig::default();
        c.identities.primes = PrimeList::List(vec![4]);
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("identities.primes") && msg.contains('4'));
    }
}
