//! Named constructors for the benchmark states used throughout the crate.
//!
//! Every entry builds a normalized [`BosonicPureState`] and records the
//! separability class it is expected to land in, so the classifier can be
//! regression-tested against the whole catalog. Family entries accept
//! explicit coefficients with documented defaults.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::classify::{SeparabilityClass, TwoBosonClass};
use crate::symstate::BosonicPureState;
use crate::{Error, Result};

/// Allowed violation of a family's normalization constraint.
const CONSTRAINT_TOL: f64 = 1e-10;

/// Expected classification outcome for a catalog entry at default parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedClass {
    Three(SeparabilityClass),
    Two(TwoBosonClass),
}

/// A tunable coefficient of a family entry.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
}

/// One catalog entry: a named state with its shape and expected class.
#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub dim: usize,
    pub particles: usize,
    pub params: &'static [ParamSpec],
    pub expected: ExpectedClass,
}

const SQRT_012: f64 = 0.34641016151377546;

static ENTRIES: [CatalogEntry; 9] = [
    CatalogEntry {
        name: "w_qubit",
        summary: "Three-qubit W state: equal amplitudes across the single-excitation orbit.",
        dim: 2,
        particles: 3,
        params: &[],
        expected: ExpectedClass::Three(SeparabilityClass::FullySeparable),
    },
    CatalogEntry {
        name: "c000_c100_family",
        summary: "Qubit family mixing |000> with the single-excitation orbit; \
                  c100 is derived from c000 unless given explicitly.",
        dim: 2,
        particles: 3,
        params: &[
            ParamSpec { name: "c000", default: 0.8 },
            ParamSpec { name: "c100", default: SQRT_012 },
        ],
        expected: ExpectedClass::Three(SeparabilityClass::PartiallyEntangledTwoDefined),
    },
    CatalogEntry {
        name: "ghz_qubit",
        summary: "Three-qubit GHZ state; its three constituents are mutually oblique.",
        dim: 2,
        particles: 3,
        params: &[],
        expected: ExpectedClass::Three(SeparabilityClass::PartiallyEntangledObliqueTriple),
    },
    CatalogEntry {
        name: "hadamard_cube",
        summary: "Uniform superposition of all eight qubit basis states, the cube of (|0>+|1>)/sqrt(2).",
        dim: 2,
        particles: 3,
        params: &[],
        expected: ExpectedClass::Three(SeparabilityClass::FullySeparable),
    },
    CatalogEntry {
        name: "qutrit_biseparable_family",
        summary: "Qutrit family with one constituent orthogonal to an oblique pair; \
                  c012 is derived from c011 unless given explicitly.",
        dim: 3,
        particles: 3,
        params: &[
            ParamSpec { name: "c011", default: 1.0 / 3.0 },
            ParamSpec { name: "c012", default: 1.0 / 3.0 },
        ],
        expected: ExpectedClass::Three(SeparabilityClass::Biseparable),
    },
    CatalogEntry {
        name: "qutrit_ortho_product",
        summary: "Symmetrized product of the three orthogonal qutrit basis vectors.",
        dim: 3,
        particles: 3,
        params: &[],
        expected: ExpectedClass::Three(SeparabilityClass::FullySeparable),
    },
    CatalogEntry {
        name: "ghz_qutrit",
        summary: "Three-qutrit GHZ state; no single-particle property exists at all.",
        dim: 3,
        particles: 3,
        params: &[],
        expected: ExpectedClass::Three(SeparabilityClass::GenuinelyEntangled),
    },
    CatalogEntry {
        name: "w_qutrit",
        summary: "Qutrit relative of the W state: |0> twice with (|1>+|2>)/sqrt(2).",
        dim: 3,
        particles: 3,
        params: &[],
        expected: ExpectedClass::Three(SeparabilityClass::FullySeparable),
    },
    CatalogEntry {
        name: "ghz2_qubit",
        summary: "Two-qubit pair (|00>+|11>)/sqrt(2), a symmetrized product of orthogonal vectors.",
        dim: 2,
        particles: 2,
        params: &[],
        expected: ExpectedClass::Two(TwoBosonClass::Separable),
    },
];

/// All catalog entries in a fixed order.
pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

/// Looks up an entry by name.
pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownName { name: name.to_string() })
}

/// Builds a catalog state. `params` are `(name, value)` overrides; anything
/// the entry does not declare is rejected.
pub fn catalog_state(name: &str, params: &[(String, f64)]) -> Result<BosonicPureState> {
    let entry = entry(name)?;
    let given = collect_params(entry, params)?;
    match entry.name {
        "w_qubit" => orbit_state(2, 3, &[(vec![0, 0, 1], 1.0)]),
        "c000_c100_family" => {
            let (c000, c100) = family_pair(&given, "c000", "c100", 0.8, 1.0, 3.0)?;
            orbit_state(2, 3, &[(vec![0, 0, 0], c000), (vec![0, 0, 1], c100)])
        }
        "ghz_qubit" => orbit_state(2, 3, &[(vec![0, 0, 0], 1.0), (vec![1, 1, 1], 1.0)]),
        "hadamard_cube" => {
            let a = 1.0 / 8.0_f64.sqrt();
            orbit_state(
                2,
                3,
                &[
                    (vec![0, 0, 0], a),
                    (vec![0, 0, 1], a),
                    (vec![0, 1, 1], a),
                    (vec![1, 1, 1], a),
                ],
            )
        }
        "qutrit_biseparable_family" => {
            let (c011, c012) = family_pair(&given, "c011", "c012", 1.0 / 3.0, 3.0, 6.0)?;
            orbit_state(3, 3, &[(vec![0, 1, 1], c011), (vec![0, 1, 2], c012)])
        }
        "qutrit_ortho_product" => orbit_state(3, 3, &[(vec![0, 1, 2], 1.0)]),
        "ghz_qutrit" => orbit_state(
            3,
            3,
            &[(vec![0, 0, 0], 1.0), (vec![1, 1, 1], 1.0), (vec![2, 2, 2], 1.0)],
        ),
        "w_qutrit" => {
            let a = 1.0 / 6.0_f64.sqrt();
            orbit_state(3, 3, &[(vec![0, 0, 1], a), (vec![0, 0, 2], a)])
        }
        "ghz2_qubit" => orbit_state(2, 2, &[(vec![0, 0], 1.0), (vec![1, 1], 1.0)]),
        _ => unreachable!("entry table and builder table are in sync"),
    }
}

fn orbit_state(dim: usize, n: usize, entries: &[(Vec<usize>, f64)]) -> Result<BosonicPureState> {
    let entries: Vec<(Vec<usize>, Complex64)> = entries
        .iter()
        .map(|(k, v)| (k.clone(), Complex64::new(*v, 0.0)))
        .collect();
    BosonicPureState::from_orbit_amplitudes(dim, n, &entries)
}

fn collect_params(
    entry: &CatalogEntry,
    params: &[(String, f64)],
) -> Result<BTreeMap<&'static str, f64>> {
    let mut given = BTreeMap::new();
    for (key, value) in params {
        let spec = entry.params.iter().find(|p| p.name == key.as_str()).ok_or_else(|| {
            Error::BadParams {
                reason: format!("`{}` takes no parameter named `{key}`", entry.name),
            }
        })?;
        if given.insert(spec.name, *value).is_some() {
            return Err(Error::BadParams { reason: format!("parameter `{key}` given twice") });
        }
    }
    Ok(given)
}

/// Resolves a two-coefficient family constrained by
/// `wa·a² + wb·b² = 1`, the weights being the sizes of the two occupation
/// orbits. A missing coefficient is derived from the one given; when both are
/// given the constraint is checked instead.
fn family_pair(
    given: &BTreeMap<&'static str, f64>,
    a_name: &'static str,
    b_name: &'static str,
    a_default: f64,
    wa: f64,
    wb: f64,
) -> Result<(f64, f64)> {
    match (given.get(a_name), given.get(b_name)) {
        (Some(&a), Some(&b)) => {
            let total = wa * a * a + wb * b * b;
            if (total - 1.0).abs() > CONSTRAINT_TOL {
                return Err(Error::BadParams {
                    reason: format!(
                        "{wa}*{a_name}^2 + {wb}*{b_name}^2 = {total} but must equal 1"
                    ),
                });
            }
            Ok((a, b))
        }
        (Some(&a), None) => {
            let rest = 1.0 - wa * a * a;
            if rest < -CONSTRAINT_TOL {
                return Err(Error::BadParams {
                    reason: format!("{a_name} = {a} exceeds the normalization budget"),
                });
            }
            Ok((a, (rest.max(0.0) / wb).sqrt()))
        }
        (None, Some(&b)) => {
            let rest = 1.0 - wb * b * b;
            if rest < -CONSTRAINT_TOL {
                return Err(Error::BadParams {
                    reason: format!("{b_name} = {b} exceeds the normalization budget"),
                });
            }
            Ok(((rest.max(0.0) / wa).sqrt(), b))
        }
        (None, None) => {
            let rest = (1.0 - wa * a_default * a_default) / wb;
            Ok((a_default, rest.sqrt()))
        }
    }
}
