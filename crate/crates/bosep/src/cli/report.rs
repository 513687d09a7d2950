//! Machine-readable report types shared by the CLI commands.
//!
//! Every report embeds the tool version and the effective search
//! configuration, so a run can be reproduced from its output alone. Vectors
//! are stored as `[re, im]` pairs; serialization keeps full double precision,
//! so files round-trip losslessly.

use serde::{Deserialize, Serialize};

use crate::classify::{ClassificationReport, TwoBosonReport};
use crate::decompose::{ConstituentTriple, GramRelation, TripleFit};
use crate::properties::ExpectationProfile;
use crate::propsearch::{PropertyMember, PropertySet, SearchConfig, SearchMeta};
use crate::symstate::SingleParticleVector;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConfigEcho {
    pub seed: u64,
    pub starts: usize,
    pub tol_property: f64,
    pub dedupe_tol: f64,
}

impl ConfigEcho {
    pub fn from_config(cfg: &SearchConfig) -> Self {
        ConfigEcho {
            seed: cfg.seed,
            starts: cfg.n_starts,
            tol_property: cfg.tol_property,
            dedupe_tol: cfg.dedupe_tol,
        }
    }
}

pub fn vector_pairs(v: &SingleParticleVector) -> Vec<[f64; 2]> {
    v.components().iter().map(|c| [c.re, c.im]).collect()
}

fn relation_name(rel: GramRelation) -> String {
    match rel {
        GramRelation::Equal => "equal",
        GramRelation::Orthogonal => "orthogonal",
        GramRelation::Oblique => "oblique",
    }
    .to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertyRecord {
    pub vector: Vec<[f64; 2]>,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<usize>,
}

impl PropertyRecord {
    pub fn from_member(member: &PropertyMember) -> Self {
        PropertyRecord {
            vector: vector_pairs(&member.vector),
            residual: member.residual,
            multiplicity: member.multiplicity,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProfileRecord {
    pub exactly_one: f64,
    pub exactly_two: f64,
    pub exactly_three: f64,
    pub at_least_one: f64,
    pub residual: f64,
}

impl ProfileRecord {
    pub fn from_profile(p: &ExpectationProfile) -> Self {
        ProfileRecord {
            exactly_one: p.exactly_one,
            exactly_two: p.exactly_two,
            exactly_three: p.exactly_three,
            at_least_one: p.at_least_one,
            residual: p.residual,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TripleRecord {
    pub vectors: Vec<Vec<[f64; 2]>>,
    /// Pairwise overlap magnitudes for the pairs (0,1), (0,2), (1,2).
    pub overlaps: Vec<f64>,
    pub relations: Vec<String>,
    pub fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_candidate: Option<String>,
}

impl TripleRecord {
    pub fn from_triple(t: &ConstituentTriple, class_candidate: Option<String>) -> Self {
        TripleRecord {
            vectors: t.vectors.iter().map(vector_pairs).collect(),
            overlaps: t.overlaps.to_vec(),
            relations: t.relations.iter().map(|r| relation_name(*r)).collect(),
            fidelity: t.fidelity,
            class_candidate,
        }
    }

    pub fn from_fit(fit: &TripleFit) -> Self {
        let mut overlaps = Vec::with_capacity(3);
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let overlap = fit.vectors[a]
                .overlap_magnitude(&fit.vectors[b])
                .expect("fit vectors share one dimension");
            overlaps.push(overlap);
        }
        let relations = overlaps
            .iter()
            .map(|&m| relation_name(crate::decompose::classify_overlap(m)))
            .collect();
        TripleRecord {
            vectors: fit.vectors.iter().map(vector_pairs).collect(),
            overlaps,
            relations,
            fidelity: fit.fidelity,
            class_candidate: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlagsRecord {
    pub continuum_suspected: bool,
    pub non_decomposable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetaRecord {
    pub n_starts: usize,
    pub n_converged: usize,
    pub min_residual: f64,
    pub continuum_suspected: bool,
    pub exact_qubit_path: bool,
}

impl MetaRecord {
    pub fn from_meta(meta: &SearchMeta) -> Self {
        MetaRecord {
            n_starts: meta.n_starts,
            n_converged: meta.n_converged,
            min_residual: meta.min_residual,
            continuum_suspected: meta.continuum_suspected,
            exact_qubit_path: meta.exact_qubit_path,
        }
    }
}

/// Full output of `classify` for three bosons.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassifyReportFile {
    pub tool_version: String,
    pub command: String,
    pub n: usize,
    pub d: usize,
    pub class: String,
    pub property_set: Vec<PropertyRecord>,
    pub expectations: Vec<ProfileRecord>,
    pub witnesses: Vec<TripleRecord>,
    pub min_residual: f64,
    pub flags: FlagsRecord,
    pub config: ConfigEcho,
}

pub fn classify_report(
    report: &ClassificationReport,
    d: usize,
    cfg: &SearchConfig,
) -> ClassifyReportFile {
    let witnesses = report
        .anchors
        .iter()
        .filter_map(|a| {
            a.triple
                .as_ref()
                .map(|t| TripleRecord::from_triple(t, a.class_candidate.map(|c| c.name().into())))
        })
        .collect();
    ClassifyReportFile {
        tool_version: crate::VERSION.to_string(),
        command: "classify".to_string(),
        n: 3,
        d,
        class: report.class.name().to_string(),
        property_set: report.properties.members.iter().map(PropertyRecord::from_member).collect(),
        expectations: report.profiles.iter().map(ProfileRecord::from_profile).collect(),
        witnesses,
        min_residual: report.min_residual,
        flags: FlagsRecord {
            continuum_suspected: report.continuum_suspected,
            non_decomposable: report.non_decomposable,
        },
        config: ConfigEcho::from_config(cfg),
    }
}

/// Output of `classify` for a boson pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoBosonReportFile {
    pub tool_version: String,
    pub command: String,
    pub n: usize,
    pub d: usize,
    pub class: String,
    pub verdict: String,
    pub takagi_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constituents: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constituent_overlap: Option<f64>,
}

pub fn two_boson_report(report: &TwoBosonReport, d: usize) -> TwoBosonReportFile {
    TwoBosonReportFile {
        tool_version: crate::VERSION.to_string(),
        command: "classify".to_string(),
        n: 2,
        d,
        class: report.class.name().to_string(),
        verdict: format!("{:?}", report.analysis.verdict),
        takagi_values: report.analysis.values.clone(),
        constituents: report
            .analysis
            .constituents
            .as_ref()
            .map(|(a, b)| vec![vector_pairs(a), vector_pairs(b)]),
        constituent_overlap: report.analysis.constituents.as_ref().map(|(a, b)| {
            a.overlap_magnitude(b).expect("constituents share one dimension")
        }),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertiesReportFile {
    pub tool_version: String,
    pub command: String,
    pub property_set: Vec<PropertyRecord>,
    pub near_members: Vec<PropertyRecord>,
    pub meta: MetaRecord,
    pub config: ConfigEcho,
}

pub fn properties_report(set: &PropertySet, cfg: &SearchConfig) -> PropertiesReportFile {
    PropertiesReportFile {
        tool_version: crate::VERSION.to_string(),
        command: "properties".to_string(),
        property_set: set.members.iter().map(PropertyRecord::from_member).collect(),
        near_members: set.near_members.iter().map(PropertyRecord::from_member).collect(),
        meta: MetaRecord::from_meta(&set.meta),
        config: ConfigEcho::from_config(cfg),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpectationsReportFile {
    pub tool_version: String,
    pub command: String,
    pub property: Vec<[f64; 2]>,
    pub profile: ProfileRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecomposeReportFile {
    pub tool_version: String,
    pub command: String,
    pub n: usize,
    pub anchored: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple: Option<TripleRecord>,
    /// Best fidelity reached when no exact triple exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_boson: Option<TwoBosonReportFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReduceReportFile {
    pub tool_version: String,
    pub command: String,
    pub size: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub eigenvalues: Vec<f64>,
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}
