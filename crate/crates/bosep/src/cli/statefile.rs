//! The on-disk state format.
//!
//! A state file is a JSON document listing one amplitude per occupation
//! orbit. The `idx` of an entry may use any index order; the value is the
//! full-tensor amplitude carried by every member of that orbit. With
//! `symmetrize = false` the file is read as a literal tensor instead, which
//! is only permutation-complete when every listed index is diagonal.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::symstate::BosonicPureState;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub d: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    #[serde(default = "default_symmetrize")]
    pub symmetrize: bool,
    pub amplitudes: Vec<AmplitudeEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeEntry {
    pub idx: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

fn default_symmetrize() -> bool {
    true
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::BadParams {
            reason: format!("state file: {e}"),
        })
    }

    /// Validates every entry and builds the normalized symmetric state.
    pub fn to_state(&self) -> Result<BosonicPureState> {
        let mut seen: Vec<Vec<usize>> = Vec::with_capacity(self.amplitudes.len());
        let mut entries = Vec::with_capacity(self.amplitudes.len());
        for (pos, entry) in self.amplitudes.iter().enumerate() {
            if entry.idx.len() != self.n {
                return Err(Error::BadParams {
                    reason: format!(
                        "amplitudes[{pos}]: idx {:?} has length {}, expected n = {}",
                        entry.idx,
                        entry.idx.len(),
                        self.n
                    ),
                });
            }
            if let Some(&bad) = entry.idx.iter().find(|&&i| i >= self.d) {
                return Err(Error::BadParams {
                    reason: format!(
                        "amplitudes[{pos}]: index {bad} out of range for d = {}",
                        self.d
                    ),
                });
            }
            let mut key = entry.idx.clone();
            key.sort_unstable();
            if seen.contains(&key) {
                return Err(Error::BadParams {
                    reason: format!("amplitudes[{pos}]: duplicate orbit {key:?}"),
                });
            }
            if !self.symmetrize && key.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::BadParams {
                    reason: format!(
                        "amplitudes[{pos}]: idx {:?} spans a nontrivial orbit; a literal \
                         tensor with symmetrize = false must stay on diagonal indices",
                        entry.idx
                    ),
                });
            }
            seen.push(key);
            entries.push((entry.idx.clone(), Complex64::new(entry.re, entry.im)));
        }
        BosonicPureState::from_orbit_amplitudes(self.d, self.n, &entries)
    }

    /// Canonical file for a state: sorted orbit representatives, zero orbits
    /// dropped, `symmetrize = true`.
    pub fn from_state(
        state: &BosonicPureState,
        name: Option<String>,
        comment: Option<String>,
    ) -> Self {
        let amplitudes = state
            .orbits()
            .filter(|(_, _, amp)| amp.norm() > 0.0)
            .map(|(idx, _, amp)| AmplitudeEntry { idx: idx.to_vec(), re: amp.re, im: amp.im })
            .collect();
        StateFile {
            d: state.dim(),
            n: state.particles(),
            name,
            comment,
            symmetrize: true,
            amplitudes,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("state file serializes");
        text.push('\n');
        text
    }
}

pub fn load(path: &Path) -> Result<(StateFile, BosonicPureState)> {
    let text = fs::read_to_string(path).map_err(|e| Error::BadParams {
        reason: format!("cannot read {}: {e}", path.display()),
    })?;
    let file = StateFile::parse(&text)?;
    let state = file.to_state()?;
    Ok((file, state))
}

pub fn save(path: &Path, file: &StateFile) -> Result<()> {
    fs::write(path, file.to_json()).map_err(|e| Error::BadParams {
        reason: format!("cannot write {}: {e}", path.display()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn w_file() -> StateFile {
        StateFile::parse(
            r#"{"d": 2, "n": 3, "amplitudes": [{"idx": [1, 0, 0], "re": 1.0, "im": 0.0}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn loads_an_orbit_entry_in_any_index_order() {
        let state = w_file().to_state().unwrap();
        let third = 1.0 / 3.0_f64.sqrt();
        assert_relative_eq!(state.amplitude(&[0, 0, 1]).re, third, epsilon = 1e-15);
        assert_relative_eq!(state.norm_sq(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_entries_with_positions() {
        let cases = [
            (
                r#"{"d": 2, "n": 3, "amplitudes": [{"idx": [0, 1], "re": 1.0, "im": 0.0}]}"#,
                "length 2",
            ),
            (
                r#"{"d": 2, "n": 3, "amplitudes": [{"idx": [0, 0, 5], "re": 1.0, "im": 0.0}]}"#,
                "out of range",
            ),
            (
                r#"{"d": 2, "n": 3, "amplitudes": [
                    {"idx": [0, 0, 1], "re": 1.0, "im": 0.0},
                    {"idx": [0, 1, 0], "re": 0.5, "im": 0.0}]}"#,
                "duplicate orbit",
            ),
        ];
        for (text, needle) in cases {
            let err = StateFile::parse(text).unwrap().to_state().unwrap_err();
            let message = err.to_string();
            assert!(message.contains("amplitudes[1]") || message.contains("amplitudes[0]"));
            assert!(message.contains(needle), "{message} should mention {needle}");
        }
    }

    #[test]
    fn literal_tensors_must_be_diagonal() {
        let text = r#"{"d": 2, "n": 3, "symmetrize": false,
            "amplitudes": [{"idx": [0, 0, 1], "re": 1.0, "im": 0.0}]}"#;
        let err = StateFile::parse(text).unwrap().to_state().unwrap_err();
        assert!(err.to_string().contains("symmetrize"));

        let diagonal = r#"{"d": 2, "n": 3, "symmetrize": false, "amplitudes": [
            {"idx": [0, 0, 0], "re": 1.0, "im": 0.0},
            {"idx": [1, 1, 1], "re": 1.0, "im": 0.0}]}"#;
        let state = StateFile::parse(diagonal).unwrap().to_state().unwrap();
        assert_relative_eq!(state.norm_sq(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"d": 2, "n": 3, "amplitudez": []}"#;
        assert!(StateFile::parse(text).is_err());
    }

    #[test]
    fn round_trip_is_bit_stable() {
        let state = w_file().to_state().unwrap();
        let saved = StateFile::from_state(&state, None, None).to_json();
        let reloaded = StateFile::parse(&saved).unwrap().to_state().unwrap();
        let saved_again = StateFile::from_state(&reloaded, None, None).to_json();
        assert_eq!(saved, saved_again);
        assert_eq!(state.max_amplitude_diff(&reloaded).unwrap(), 0.0);
    }
}
