//! The five-way separability taxonomy for three bosons, and the two-way one
//! for boson pairs.
//!
//! Classification runs as a ladder. First the full property set is computed;
//! an empty set means genuine entanglement. Otherwise every property serves
//! as an anchor: the state factors through `ψ = Sym(φ ⊗ χ)`, the cofactor `χ`
//! is split into a constituent pair when its symmetric rank allows it, and the
//! Gram relations of the resulting vector triple determine a class candidate.
//! The final class is the most separable candidate over all anchors.

use crate::decompose::{
    analyze_two_boson, extract_cofactor, triple_from_vectors, ConstituentTriple, GramRelation,
    TwoBosonAnalysis, Verdict,
};
use crate::properties::{expectation_profile, ExpectationProfile, PropertyProjector};
use crate::propsearch::{
    find_properties, find_property_in_subspace, PropertyMember, PropertySet, SearchConfig,
};
use crate::symstate::{BosonicPureState, SingleParticleVector, TwoBosonState};
use crate::{Error, Result};

/// Takagi values above this contribute to the cofactor range.
const RANGE_TOL: f64 = 1e-10;

/// Anchor overlaps with every range vector below this certify orthogonality.
const ORTHO_WITNESS_TOL: f64 = 1e-7;

/// Degrees of separability for three indistinguishable bosons, from every
/// particle owning a definite single-particle state down to none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparabilityClass {
    /// A symmetrized product of three mutually consistent vectors: zero
    /// oblique pairs among the constituents.
    FullySeparable,
    /// One constituent separates cleanly; the remaining pair is oblique or
    /// not decomposable at all.
    Biseparable,
    /// Two properties are defined; the third constituent is oblique to them.
    PartiallyEntangledTwoDefined,
    /// A symmetrized product of three mutually oblique vectors.
    PartiallyEntangledObliqueTriple,
    /// No complete set of properties exists at all.
    GenuinelyEntangled,
}

impl SeparabilityClass {
    /// Higher means more separable; classification keeps the maximum over
    /// anchors.
    pub fn separability_rank(&self) -> u8 {
        match self {
            SeparabilityClass::FullySeparable => 4,
            SeparabilityClass::Biseparable => 3,
            SeparabilityClass::PartiallyEntangledTwoDefined => 2,
            SeparabilityClass::PartiallyEntangledObliqueTriple => 1,
            SeparabilityClass::GenuinelyEntangled => 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SeparabilityClass::FullySeparable => "FullySeparable",
            SeparabilityClass::Biseparable => "Biseparable",
            SeparabilityClass::PartiallyEntangledTwoDefined => "PartiallyEntangledTwoDefined",
            SeparabilityClass::PartiallyEntangledObliqueTriple => {
                "PartiallyEntangledObliqueTriple"
            }
            SeparabilityClass::GenuinelyEntangled => "GenuinelyEntangled",
        }
    }
}

/// Separability of a two-boson pure state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoBosonClass {
    Separable,
    Entangled,
}

impl TwoBosonClass {
    pub fn name(&self) -> &'static str {
        match self {
            TwoBosonClass::Separable => "Separable",
            TwoBosonClass::Entangled => "Entangled",
        }
    }
}

/// Maps the Gram relations of a constituent triple to a separability class.
///
/// The relations are for the pairs (0,1), (0,2), (1,2). An `Equal` edge makes
/// two vectors the same ray, so their relations to the third vector must
/// agree; violations report [`Error::InconsistentGram`]. The class then
/// depends only on the number of oblique edges: 0 → fully separable,
/// 1 → biseparable, 2 → two defined properties, 3 → oblique triple.
pub fn taxonomy_from_gram(relations: [GramRelation; 3]) -> Result<SeparabilityClass> {
    let constraints = [(0usize, 1usize, 2usize), (1, 0, 2), (2, 0, 1)];
    for (edge, other_a, other_b) in constraints {
        if relations[edge] == GramRelation::Equal && relations[other_a] != relations[other_b] {
            return Err(Error::InconsistentGram);
        }
    }
    let oblique = relations.iter().filter(|r| **r == GramRelation::Oblique).count();
    Ok(match oblique {
        0 => SeparabilityClass::FullySeparable,
        1 => SeparabilityClass::Biseparable,
        2 => SeparabilityClass::PartiallyEntangledTwoDefined,
        _ => SeparabilityClass::PartiallyEntangledObliqueTriple,
    })
}

/// Everything learned while working through one anchor property.
#[derive(Debug, Clone)]
pub struct AnchorAnalysis {
    pub anchor: SingleParticleVector,
    pub residual: f64,
    pub multiplicity: Option<usize>,
    /// Properties found inside the orthogonal complement of the anchor
    /// (anchor included when it qualifies).
    pub subspace_members: Vec<PropertyMember>,
    pub cofactor_lsq_residual: f64,
    pub takagi_values: Vec<f64>,
    pub verdict: Verdict,
    /// The constituent triple, absent when the cofactor is not decomposable.
    pub triple: Option<ConstituentTriple>,
    /// True when the anchor is orthogonal to the full range of the cofactor,
    /// which certifies biseparability even without a triple.
    pub anchor_orthogonal_to_range: bool,
    pub class_candidate: Option<SeparabilityClass>,
}

/// Outcome of the full three-boson classification ladder.
#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub class: SeparabilityClass,
    pub properties: PropertySet,
    /// Expectation profile of each accepted property, in member order.
    pub profiles: Vec<ExpectationProfile>,
    pub anchors: Vec<AnchorAnalysis>,
    /// A constituent triple realizing the reported class, when one exists.
    pub witness: Option<ConstituentTriple>,
    pub min_residual: f64,
    pub continuum_suspected: bool,
    /// True when some anchor had a cofactor of symmetric rank three or more.
    pub non_decomposable: bool,
}

/// Classifies a three-boson pure state into the five-way taxonomy.
pub fn classify(psi: &BosonicPureState, cfg: &SearchConfig) -> Result<ClassificationReport> {
    if psi.particles() != 3 {
        return Err(Error::ParticleNumber { expected: 3, got: psi.particles() });
    }
    let properties = find_properties(psi, cfg)?;
    let mut profiles = Vec::with_capacity(properties.members.len());
    for member in &properties.members {
        profiles.push(expectation_profile(psi, &PropertyProjector::new(member.vector.clone()))?);
    }

    if properties.members.is_empty() {
        return Ok(ClassificationReport {
            class: SeparabilityClass::GenuinelyEntangled,
            min_residual: properties.meta.min_residual,
            continuum_suspected: properties.meta.continuum_suspected,
            properties,
            profiles,
            anchors: Vec::new(),
            witness: None,
            non_decomposable: false,
        });
    }

    let mut anchors = Vec::with_capacity(properties.members.len());
    let mut non_decomposable = false;
    for member in &properties.members {
        let analysis = analyze_anchor(psi, member, cfg)?;
        non_decomposable |= analysis.verdict == Verdict::NonDecomposable;
        anchors.push(analysis);
    }

    let mut class = SeparabilityClass::PartiallyEntangledTwoDefined;
    let mut witness = None;
    let mut best_rank = None;
    for anchor in &anchors {
        if let Some(candidate) = anchor.class_candidate {
            if best_rank.is_none_or(|r| candidate.separability_rank() > r) {
                best_rank = Some(candidate.separability_rank());
                class = candidate;
                witness = anchor.triple.clone();
            }
        }
    }

    Ok(ClassificationReport {
        class,
        min_residual: properties.meta.min_residual,
        continuum_suspected: properties.meta.continuum_suspected,
        properties,
        profiles,
        anchors,
        witness,
        non_decomposable,
    })
}

fn analyze_anchor(
    psi: &BosonicPureState,
    member: &PropertyMember,
    cfg: &SearchConfig,
) -> Result<AnchorAnalysis> {
    let anchor = member.vector.clone();
    let subspace = find_property_in_subspace(psi, &anchor, cfg)?;
    let extraction = extract_cofactor(psi, &anchor)?;
    let analysis = analyze_two_boson(&extraction.chi)?;

    let (triple, class_candidate, anchor_orthogonal) = match &analysis.constituents {
        Some((a, b)) => {
            let triple = triple_from_vectors(psi, anchor.clone(), a.clone(), b.clone())?;
            let class = taxonomy_from_gram(triple.relations)?;
            (Some(triple), Some(class), false)
        }
        None => {
            let orthogonal = anchor_outside_range(&anchor, &analysis)?;
            let class = orthogonal.then_some(SeparabilityClass::Biseparable);
            (None, class, orthogonal)
        }
    };

    Ok(AnchorAnalysis {
        anchor,
        residual: member.residual,
        multiplicity: member.multiplicity,
        subspace_members: subspace.members,
        cofactor_lsq_residual: extraction.lsq_residual,
        takagi_values: analysis.values,
        verdict: analysis.verdict,
        triple,
        anchor_orthogonal_to_range: anchor_orthogonal,
        class_candidate,
    })
}

fn anchor_outside_range(
    anchor: &SingleParticleVector,
    analysis: &TwoBosonAnalysis,
) -> Result<bool> {
    for (value, vector) in analysis.values.iter().zip(&analysis.vectors) {
        if *value > RANGE_TOL && anchor.overlap_magnitude(vector)? > ORTHO_WITNESS_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classification outcome for a pair of bosons.
#[derive(Debug, Clone)]
pub struct TwoBosonReport {
    pub class: TwoBosonClass,
    pub analysis: TwoBosonAnalysis,
}

/// Classifies a two-boson pure state: separable exactly when it is a
/// symmetrized product of an identical or orthogonal pair.
pub fn classify_two_boson(psi: &BosonicPureState) -> Result<TwoBosonReport> {
    if psi.particles() != 2 {
        return Err(Error::ParticleNumber { expected: 2, got: psi.particles() });
    }
    let analysis = analyze_two_boson(&TwoBosonState::from_state(psi)?)?;
    let class = match analysis.verdict {
        Verdict::ProductIdentical | Verdict::SymOrthogonal => TwoBosonClass::Separable,
        Verdict::SymOblique | Verdict::NonDecomposable => TwoBosonClass::Entangled,
    };
    Ok(TwoBosonReport { class, analysis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::sym_product_fit;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_vec(amps: &[f64]) -> SingleParticleVector {
        SingleParticleVector::from_real(amps).unwrap()
    }

    fn orbit_state(dim: usize, n: usize, entries: &[(&[usize], f64)]) -> BosonicPureState {
        let entries: Vec<(Vec<usize>, Complex64)> =
            entries.iter().map(|(k, v)| (k.to_vec(), c(*v, 0.0))).collect();
        BosonicPureState::from_orbit_amplitudes(dim, n, &entries).unwrap()
    }

    fn anchored_pair_state(d: usize, chi: &DMatrix<Complex64>) -> BosonicPureState {
        let mut t = vec![c(0.0, 0.0); d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut entry = Complex64::new(0.0, 0.0);
                    for (u, v, w) in [(i, j, k), (j, i, k), (k, i, j)] {
                        if u == 0 {
                            entry += chi[(v, w)];
                        }
                    }
                    t[(i * d + j) * d + k] = entry / 3.0;
                }
            }
        }
        BosonicPureState::symmetrize(d, 3, &t).unwrap()
    }

    fn cfg(n_starts: usize, seed: u64) -> SearchConfig {
        SearchConfig { n_starts, seed, ..SearchConfig::default() }
    }

    #[test]
    fn taxonomy_mapping() {
        use GramRelation::{Equal as E, Oblique as Q, Orthogonal as O};
        assert_eq!(taxonomy_from_gram([O, O, O]).unwrap(), SeparabilityClass::FullySeparable);
        assert_eq!(taxonomy_from_gram([E, O, O]).unwrap(), SeparabilityClass::FullySeparable);
        assert_eq!(taxonomy_from_gram([E, E, E]).unwrap(), SeparabilityClass::FullySeparable);
        assert_eq!(taxonomy_from_gram([Q, O, O]).unwrap(), SeparabilityClass::Biseparable);
        assert_eq!(taxonomy_from_gram([O, O, Q]).unwrap(), SeparabilityClass::Biseparable);
        assert_eq!(
            taxonomy_from_gram([E, Q, Q]).unwrap(),
            SeparabilityClass::PartiallyEntangledTwoDefined
        );
        assert_eq!(
            taxonomy_from_gram([O, Q, Q]).unwrap(),
            SeparabilityClass::PartiallyEntangledTwoDefined
        );
        assert_eq!(
            taxonomy_from_gram([Q, Q, Q]).unwrap(),
            SeparabilityClass::PartiallyEntangledObliqueTriple
        );
    }

    #[test]
    fn taxonomy_rejects_inconsistent_gram() {
        use GramRelation::{Equal as E, Oblique as Q, Orthogonal as O};
        assert!(matches!(taxonomy_from_gram([E, O, Q]), Err(Error::InconsistentGram)));
        assert!(matches!(taxonomy_from_gram([E, E, O]), Err(Error::InconsistentGram)));
        assert!(matches!(taxonomy_from_gram([Q, E, O]), Err(Error::InconsistentGram)));
    }

    #[test]
    fn separability_rank_ordering() {
        let ordered = [
            SeparabilityClass::GenuinelyEntangled,
            SeparabilityClass::PartiallyEntangledObliqueTriple,
            SeparabilityClass::PartiallyEntangledTwoDefined,
            SeparabilityClass::Biseparable,
            SeparabilityClass::FullySeparable,
        ];
        for pair in ordered.windows(2) {
            assert!(pair[0].separability_rank() < pair[1].separability_rank());
        }
    }

    #[test]
    fn w_state_is_fully_separable() {
        let w = orbit_state(2, 3, &[(&[0, 0, 1], 1.0)]);
        let report = classify(&w, &SearchConfig::default()).unwrap();
        assert_eq!(report.class, SeparabilityClass::FullySeparable);
        assert_eq!(report.properties.members.len(), 2);
        assert!(!report.non_decomposable);
        assert!(!report.continuum_suspected);
        let witness = report.witness.unwrap();
        assert!(witness.fidelity > 1.0 - 1e-9);
        // The separable triple is |0⟩, |0⟩, |1⟩ in some order.
        let zero = real_vec(&[1.0, 0.0]);
        let count_zero = witness
            .vectors
            .iter()
            .filter(|v| v.projectively_eq(&zero, 1e-8))
            .count();
        assert_eq!(count_zero, 2);
    }

    #[test]
    fn ghz_qubit_is_oblique_triple() {
        let ghz = orbit_state(2, 3, &[(&[0, 0, 0], 1.0), (&[1, 1, 1], 1.0)]);
        let report = classify(&ghz, &SearchConfig::default()).unwrap();
        assert_eq!(report.class, SeparabilityClass::PartiallyEntangledObliqueTriple);
        assert_eq!(report.properties.members.len(), 3);
        for anchor in &report.anchors {
            assert_eq!(
                anchor.class_candidate,
                Some(SeparabilityClass::PartiallyEntangledObliqueTriple)
            );
        }
        let witness = report.witness.unwrap();
        for overlap in witness.overlaps {
            assert_relative_eq!(overlap, 0.5, epsilon = 1e-7);
        }
    }

    #[test]
    fn partially_entangled_family_has_two_defined() {
        let c000 = 0.8;
        let c100 = ((1.0 - c000 * c000) / 3.0_f64).sqrt();
        let state = orbit_state(2, 3, &[(&[0, 0, 0], c000), (&[0, 0, 1], c100)]);
        let report = classify(&state, &SearchConfig::default()).unwrap();
        assert_eq!(report.class, SeparabilityClass::PartiallyEntangledTwoDefined);
        let anchor0 = report
            .anchors
            .iter()
            .find(|a| a.anchor.projectively_eq(&real_vec(&[1.0, 0.0]), 1e-9))
            .unwrap();
        assert_eq!(anchor0.multiplicity, Some(2));
        assert_eq!(
            anchor0.class_candidate,
            Some(SeparabilityClass::PartiallyEntangledTwoDefined)
        );
    }

    #[test]
    fn biseparable_family_classification() {
        let state = orbit_state(3, 3, &[(&[0, 1, 1], 1.0 / 3.0), (&[0, 1, 2], 1.0 / 3.0)]);
        let report = classify(&state, &cfg(120, 3)).unwrap();
        assert_eq!(report.class, SeparabilityClass::Biseparable);
        assert_eq!(report.properties.members.len(), 3);
        for anchor in &report.anchors {
            assert_eq!(anchor.class_candidate, Some(SeparabilityClass::Biseparable));
        }
        let witness = report.witness.unwrap();
        let obliques =
            witness.relations.iter().filter(|r| **r == GramRelation::Oblique).count();
        assert_eq!(obliques, 1);
    }

    #[test]
    fn ghz_qutrit_is_genuinely_entangled() {
        let ghz3 = orbit_state(
            3,
            3,
            &[(&[0, 0, 0], 1.0), (&[1, 1, 1], 1.0), (&[2, 2, 2], 1.0)],
        );
        let report = classify(&ghz3, &SearchConfig::default()).unwrap();
        assert_eq!(report.class, SeparabilityClass::GenuinelyEntangled);
        assert!(report.properties.is_empty());
        assert!(report.anchors.is_empty());
        assert!(report.witness.is_none());
        assert!(report.profiles.is_empty());
        assert_relative_eq!(report.min_residual, 2.0 / 9.0, epsilon = 1e-6);
    }

    #[test]
    fn w_like_qutrit_is_fully_separable() {
        let s = 1.0 / 6.0_f64.sqrt();
        let state = orbit_state(3, 3, &[(&[0, 0, 1], s), (&[0, 0, 2], s)]);
        let report = classify(&state, &cfg(120, 5)).unwrap();
        assert_eq!(report.class, SeparabilityClass::FullySeparable);
        let witness = report.witness.unwrap();
        let zero = real_vec(&[1.0, 0.0, 0.0]);
        let theta = real_vec(&[0.0, 1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt()]);
        let zeros =
            witness.vectors.iter().filter(|v| v.projectively_eq(&zero, 1e-7)).count();
        let thetas =
            witness.vectors.iter().filter(|v| v.projectively_eq(&theta, 1e-7)).count();
        assert_eq!((zeros, thetas), (2, 1));
    }

    #[test]
    fn rank_three_cofactor_inside_range_is_two_defined() {
        // Sym(|0⟩ ⊗ χ) with χ ∝ |00⟩+|11⟩+|22⟩: the unique property is |0⟩,
        // which lies inside the cofactor range, so nothing separates.
        let chi = DMatrix::<Complex64>::identity(3, 3);
        let psi = anchored_pair_state(3, &chi);
        let report = classify(&psi, &cfg(120, 7)).unwrap();
        assert_eq!(report.class, SeparabilityClass::PartiallyEntangledTwoDefined);
        assert!(report.non_decomposable);
        assert!(report.witness.is_none());
        assert_eq!(report.properties.members.len(), 1);
        let anchor = &report.anchors[0];
        assert_eq!(anchor.verdict, Verdict::NonDecomposable);
        assert!(!anchor.anchor_orthogonal_to_range);
        assert!(anchor.class_candidate.is_none());
    }

    #[test]
    fn orthogonal_rank_three_cofactor_is_biseparable() {
        // Sym(|0⟩ ⊗ χ) with χ ∝ |11⟩+|22⟩+|33⟩ in d = 4: the anchor is
        // orthogonal to the whole cofactor range, the pair itself is
        // genuinely entangled.
        let d = 4;
        let mut chi = DMatrix::<Complex64>::zeros(d, d);
        for i in 1..d {
            chi[(i, i)] = c(1.0, 0.0);
        }
        let psi = anchored_pair_state(d, &chi);
        let report = classify(&psi, &cfg(150, 11)).unwrap();
        assert_eq!(report.class, SeparabilityClass::Biseparable);
        assert!(report.non_decomposable);
        assert!(report.witness.is_none());
        let anchor = &report.anchors[0];
        assert_eq!(anchor.verdict, Verdict::NonDecomposable);
        assert!(anchor.anchor_orthogonal_to_range);
    }

    #[test]
    fn two_boson_classification() {
        let ghz2 = orbit_state(2, 2, &[(&[0, 0], 1.0), (&[1, 1], 1.0)]);
        let report = classify_two_boson(&ghz2).unwrap();
        assert_eq!(report.class, TwoBosonClass::Separable);
        assert_eq!(report.analysis.verdict, Verdict::SymOrthogonal);

        let product = orbit_state(2, 2, &[(&[0, 0], 1.0)]);
        assert_eq!(classify_two_boson(&product).unwrap().class, TwoBosonClass::Separable);

        let a = real_vec(&[1.0, 0.0]);
        let b = real_vec(&[1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt()]);
        let (oblique, _) = BosonicPureState::sym_product2(&a, &b).unwrap();
        assert_eq!(classify_two_boson(&oblique).unwrap().class, TwoBosonClass::Entangled);

        let ghz2_qutrit =
            orbit_state(3, 2, &[(&[0, 0], 1.0), (&[1, 1], 1.0), (&[2, 2], 1.0)]);
        let report = classify_two_boson(&ghz2_qutrit).unwrap();
        assert_eq!(report.class, TwoBosonClass::Entangled);
        assert_eq!(report.analysis.verdict, Verdict::NonDecomposable);
    }

    #[test]
    fn genuine_entanglement_matches_product_fit_oracle() {
        let ghz3 = orbit_state(
            3,
            3,
            &[(&[0, 0, 0], 1.0), (&[1, 1, 1], 1.0), (&[2, 2, 2], 1.0)],
        );
        let report = classify(&ghz3, &cfg(120, 13)).unwrap();
        assert_eq!(report.class, SeparabilityClass::GenuinelyEntangled);
        assert!(matches!(sym_product_fit(&ghz3, 16, 3), Err(Error::NoTriple { .. })));

        let w = orbit_state(2, 3, &[(&[0, 0, 1], 1.0)]);
        let report = classify(&w, &SearchConfig::default()).unwrap();
        assert_ne!(report.class, SeparabilityClass::GenuinelyEntangled);
        assert!(sym_product_fit(&w, 16, 3).is_ok());
    }

    #[test]
    fn subspace_transcripts_are_recorded() {
        let w = orbit_state(2, 3, &[(&[0, 0, 1], 1.0)]);
        let report = classify(&w, &SearchConfig::default()).unwrap();
        for anchor in &report.anchors {
            // Both of W's properties appear in each anchor transcript: the
            // anchor itself plus the complementary property.
            assert_eq!(anchor.subspace_members.len(), 2);
        }
    }
}
