//! Command-line front end.
//!
//! Exit codes: 0 on success (whatever the verdict), 2 on input or validation
//! problems, 3 when a numerical routine fails internally.

mod report;
mod statefile;

pub use report::{
    classify_report, properties_report, to_json, two_boson_report, vector_pairs,
    ClassifyReportFile, ConfigEcho, DecomposeReportFile, ExpectationsReportFile, FlagsRecord,
    MetaRecord, ProfileRecord, PropertiesReportFile, PropertyRecord, ReduceReportFile,
    TripleRecord, TwoBosonReportFile,
};
pub use statefile::{load, save, AmplitudeEntry, StateFile};

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::catalog;
use crate::classify::classify_two_boson;
use crate::decompose::{constituent_triple, sym_product_fit};
use crate::oracle;
use crate::properties::{expectation_profile, PropertyProjector};
use crate::propsearch::{find_properties, SearchConfig};
use crate::symstate::SingleParticleVector;
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "bosep",
    version = crate::VERSION,
    about = "Separability analysis for pure states of two or three identical bosons"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a state into the separability taxonomy.
    Classify {
        state: PathBuf,
        #[command(flatten)]
        search: SearchFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// List every complete set of properties the state admits.
    Properties {
        state: PathBuf,
        #[command(flatten)]
        search: SearchFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Expectation profile of one candidate property vector.
    Expectations {
        state: PathBuf,
        /// Vector literal such as "[0.7071,0.7071]" or "[[0,1],[0.5,-0.5]]".
        #[arg(long)]
        property: String,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Split a state into constituent single-particle vectors.
    Decompose {
        state: PathBuf,
        /// Anchor property to factor out; a direct fit is used when omitted.
        #[arg(long)]
        anchor: Option<String>,
        #[command(flatten)]
        search: SearchFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Reduced density matrix after tracing out one particle.
    Reduce {
        state: PathBuf,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// List or emit the built-in example states.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Print every entry with its shape, parameters, and expected class.
    List,
    /// Write one entry as a state file.
    Emit {
        name: String,
        /// Coefficient override such as c000=0.6 (repeatable).
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SearchFlags {
    /// Seed for every stochastic step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of optimizer starts.
    #[arg(long, default_value_t = 200)]
    starts: usize,
    /// Residual below which a vector counts as a property.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl SearchFlags {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            seed: self.seed,
            n_starts: self.starts,
            tol_property: self.tol,
            ..SearchConfig::default()
        }
    }
}

#[derive(Args)]
struct OutputFlags {
    /// Write a JSON report to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Suppress the human-readable summary.
    #[arg(long)]
    quiet: bool,
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NumericalFailure { .. }
            | Error::NonRealExpectation { .. }
            | Error::InconsistentGram => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Classify { state, search, output } => cmd_classify(&state, &search, &output),
        Command::Properties { state, search, output } => {
            cmd_properties(&state, &search, &output)
        }
        Command::Expectations { state, property, output } => {
            cmd_expectations(&state, &property, &output)
        }
        Command::Decompose { state, anchor, search, output } => {
            cmd_decompose(&state, anchor.as_deref(), &search, &output)
        }
        Command::Reduce { state, output } => cmd_reduce(&state, &output),
        Command::Catalog { action } => match action {
            CatalogAction::List => cmd_catalog_list(),
            CatalogAction::Emit { name, params, out } => {
                cmd_catalog_emit(&name, &params, out.as_deref())
            }
        },
    }
}

fn cmd_classify(path: &Path, search: &SearchFlags, output: &OutputFlags) -> CliResult {
    let (_, psi) = statefile::load(path)?;
    if psi.particles() == 3 {
        let cfg = search.config();
        let result = crate::classify::classify(&psi, &cfg)?;
        let file = classify_report(&result, psi.dim(), &cfg);
        if !output.quiet {
            print_classification(&file);
        }
        write_json(output.json.as_deref(), &file)
    } else {
        let result = classify_two_boson(&psi)?;
        let file = two_boson_report(&result, psi.dim());
        if !output.quiet {
            print_two_boson(&file);
        }
        write_json(output.json.as_deref(), &file)
    }
}

fn cmd_properties(path: &Path, search: &SearchFlags, output: &OutputFlags) -> CliResult {
    let (_, psi) = statefile::load(path)?;
    let cfg = search.config();
    let set = find_properties(&psi, &cfg)?;
    let file = properties_report(&set, &cfg);
    if !output.quiet {
        print_properties(&file);
    }
    write_json(output.json.as_deref(), &file)
}

fn cmd_expectations(path: &Path, property: &str, output: &OutputFlags) -> CliResult {
    let (_, psi) = statefile::load(path)?;
    if psi.particles() != 3 {
        return Err(Failure::input("expectation profiles are defined for n = 3 states"));
    }
    let vector = parse_vector(property, psi.dim())?;
    let profile = expectation_profile(&psi, &PropertyProjector::new(vector.clone()))?;
    let file = ExpectationsReportFile {
        tool_version: crate::VERSION.to_string(),
        command: "expectations".to_string(),
        property: vector_pairs(&vector),
        profile: ProfileRecord::from_profile(&profile),
    };
    if !output.quiet {
        println!("property:      {}", fmt_vector(&file.property));
        println!("exactly one:   {:.12}", file.profile.exactly_one);
        println!("exactly two:   {:.12}", file.profile.exactly_two);
        println!("exactly three: {:.12}", file.profile.exactly_three);
        println!("at least one:  {:.12}", file.profile.at_least_one);
        println!("residual:      {:.12}", file.profile.residual);
    }
    write_json(output.json.as_deref(), &file)
}

fn cmd_decompose(
    path: &Path,
    anchor: Option<&str>,
    search: &SearchFlags,
    output: &OutputFlags,
) -> CliResult {
    let (_, psi) = statefile::load(path)?;
    let file = if psi.particles() == 2 {
        if anchor.is_some() {
            return Err(Failure::input("--anchor applies to three-boson states"));
        }
        let mut pair = two_boson_report(&classify_two_boson(&psi)?, psi.dim());
        pair.command = "decompose".to_string();
        DecomposeReportFile {
            tool_version: crate::VERSION.to_string(),
            command: "decompose".to_string(),
            n: 2,
            anchored: false,
            triple: None,
            best_fidelity: None,
            two_boson: Some(pair),
        }
    } else {
        let outcome = match anchor {
            Some(literal) => {
                let v = parse_vector(literal, psi.dim())?;
                constituent_triple(&psi, &v).map(|t| TripleRecord::from_triple(&t, None))
            }
            None => {
                sym_product_fit(&psi, search.starts, search.seed)
                    .map(|fit| TripleRecord::from_fit(&fit))
            }
        };
        let (triple, best_fidelity) = match outcome {
            Ok(record) => (Some(record), None),
            Err(Error::NoTriple { best_fidelity }) => (None, Some(best_fidelity)),
            Err(e) => return Err(e.into()),
        };
        DecomposeReportFile {
            tool_version: crate::VERSION.to_string(),
            command: "decompose".to_string(),
            n: 3,
            anchored: anchor.is_some(),
            triple,
            best_fidelity,
            two_boson: None,
        }
    };
    if !output.quiet {
        print_decompose(&file);
    }
    write_json(output.json.as_deref(), &file)
}

fn cmd_reduce(path: &Path, output: &OutputFlags) -> CliResult {
    let (_, psi) = statefile::load(path)?;
    let (matrix, eigenvalues) = if psi.particles() == 3 {
        let rho = psi.partial_trace_one()?;
        rho.validate()?;
        (rho.matrix().clone(), rho.eigenvalues()?)
    } else {
        let rho = oracle::partial_trace(&psi.dense(), psi.dim(), 1);
        (rho.clone(), density_eigenvalues(&rho)?)
    };
    let size = matrix.nrows();
    let rows = (0..size)
        .map(|i| (0..size).map(|j| [matrix[(i, j)].re, matrix[(i, j)].im]).collect())
        .collect();
    let file = ReduceReportFile {
        tool_version: crate::VERSION.to_string(),
        command: "reduce".to_string(),
        size,
        matrix: rows,
        eigenvalues,
    };
    if !output.quiet {
        println!("reduced density ({size} x {size}):");
        for row in &file.matrix {
            let cells: Vec<String> =
                row.iter().map(|[re, im]| format!("{re:+.6}{im:+.6}i")).collect();
            println!("  {}", cells.join("  "));
        }
        let vals: Vec<String> = file.eigenvalues.iter().map(|v| format!("{v:.12}")).collect();
        println!("eigenvalues: {}", vals.join(", "));
    }
    write_json(output.json.as_deref(), &file)
}

fn density_eigenvalues(rho: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let eig = rho
        .clone()
        .try_symmetric_eigen(1e-13, 10_000)
        .ok_or(Error::NumericalFailure { context: "density eigendecomposition" })?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(vals)
}

fn cmd_catalog_list() -> CliResult {
    for entry in catalog::entries() {
        let expected = match entry.expected {
            catalog::ExpectedClass::Three(c) => c.name(),
            catalog::ExpectedClass::Two(c) => c.name(),
        };
        println!("{:<26} d={} n={}  {}", entry.name, entry.dim, entry.particles, expected);
        if !entry.params.is_empty() {
            let params: Vec<String> =
                entry.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
            println!("    params: {}", params.join(", "));
        }
        println!("    {}", entry.summary);
    }
    Ok(())
}

fn cmd_catalog_emit(name: &str, params: &[String], out: Option<&Path>) -> CliResult {
    let mut parsed = Vec::with_capacity(params.len());
    for raw in params {
        let (key, value) = raw
            .split_once('=')
            .ok_or_else(|| Failure::input(format!("--param `{raw}` is not KEY=VALUE")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Failure::input(format!("--param `{raw}` has a non-numeric value")))?;
        parsed.push((key.to_string(), value));
    }
    let state = catalog::catalog_state(name, &parsed)?;
    let entry = catalog::entry(name)?;
    let file = StateFile::from_state(
        &state,
        Some(entry.name.to_string()),
        Some(entry.summary.to_string()),
    );
    match out {
        Some(path) => statefile::save(path, &file)?,
        None => print!("{}", file.to_json()),
    }
    Ok(())
}

fn write_json(path: Option<&Path>, value: &impl serde::Serialize) -> CliResult {
    if let Some(path) = path {
        fs::write(path, to_json(value)).map_err(|e| {
            Failure::input(format!("cannot write {}: {e}", path.display()))
        })?;
    }
    Ok(())
}

/// Parses a JSON vector literal; entries are numbers or `[re, im]` pairs.
fn parse_vector(text: &str, dim: usize) -> Result<SingleParticleVector> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::BadParams {
        reason: format!("vector literal: {e}"),
    })?;
    let arr = value.as_array().ok_or_else(|| Error::BadParams {
        reason: "vector literal must be a JSON array".to_string(),
    })?;
    if arr.len() != dim {
        return Err(Error::BadParams {
            reason: format!("vector literal has {} entries, the state has d = {dim}", arr.len()),
        });
    }
    let mut amps = Vec::with_capacity(dim);
    for (pos, item) in arr.iter().enumerate() {
        let amp = if let Some(x) = item.as_f64() {
            Complex64::new(x, 0.0)
        } else if let Some(pair) = item.as_array() {
            let bad = || Error::BadParams {
                reason: format!("vector entry {pos} must be a number or [re, im]"),
            };
            if pair.len() != 2 {
                return Err(bad());
            }
            let re = pair[0].as_f64().ok_or_else(bad)?;
            let im = pair[1].as_f64().ok_or_else(bad)?;
            Complex64::new(re, im)
        } else {
            return Err(Error::BadParams {
                reason: format!("vector entry {pos} must be a number or [re, im]"),
            });
        };
        amps.push(amp);
    }
    SingleParticleVector::new(amps)
}

fn fmt_vector(pairs: &[[f64; 2]]) -> String {
    let cells: Vec<String> =
        pairs.iter().map(|[re, im]| format!("{re:+.6}{im:+.6}i")).collect();
    format!("[{}]", cells.join(", "))
}

fn print_classification(file: &ClassifyReportFile) {
    println!("class: {}", file.class);
    println!("min residual: {:.3e}", file.min_residual);
    println!(
        "flags: continuum_suspected={} non_decomposable={}",
        file.flags.continuum_suspected, file.flags.non_decomposable
    );
    println!("properties ({}):", file.property_set.len());
    for (i, member) in file.property_set.iter().enumerate() {
        let mult = member
            .multiplicity
            .map(|m| format!("  mult {m}"))
            .unwrap_or_default();
        println!(
            "  [{i}] residual {:.3e}{mult}  {}",
            member.residual,
            fmt_vector(&member.vector)
        );
        if let Some(profile) = file.expectations.get(i) {
            println!(
                "      exactly (1,2,3) = ({:.6}, {:.6}, {:.6})  at least one {:.6}",
                profile.exactly_one,
                profile.exactly_two,
                profile.exactly_three,
                profile.at_least_one
            );
        }
    }
    let witness = file
        .witnesses
        .iter()
        .find(|w| w.class_candidate.as_deref() == Some(file.class.as_str()));
    if let Some(witness) = witness {
        println!("witness triple (fidelity {:.9}):", witness.fidelity);
        for vector in &witness.vectors {
            println!("  {}", fmt_vector(vector));
        }
        println!(
            "  relations (0,1)/(0,2)/(1,2): {}",
            witness.relations.join(", ")
        );
    }
}

fn print_two_boson(file: &TwoBosonReportFile) {
    println!("class: {}", file.class);
    println!("verdict: {}", file.verdict);
    let vals: Vec<String> = file.takagi_values.iter().map(|v| format!("{v:.9}")).collect();
    println!("takagi values: {}", vals.join(", "));
    if let Some(constituents) = &file.constituents {
        println!("constituents:");
        for vector in constituents {
            println!("  {}", fmt_vector(vector));
        }
    }
    if let Some(overlap) = file.constituent_overlap {
        println!("constituent overlap: {overlap:.9}");
    }
}

fn print_properties(file: &PropertiesReportFile) {
    println!("properties ({}):", file.property_set.len());
    for (i, member) in file.property_set.iter().enumerate() {
        let mult = member
            .multiplicity
            .map(|m| format!("  mult {m}"))
            .unwrap_or_default();
        println!(
            "  [{i}] residual {:.3e}{mult}  {}",
            member.residual,
            fmt_vector(&member.vector)
        );
    }
    if !file.near_members.is_empty() {
        println!("near misses ({}):", file.near_members.len());
        for member in &file.near_members {
            println!("  residual {:.3e}  {}", member.residual, fmt_vector(&member.vector));
        }
    }
    println!(
        "starts {} converged {}  min residual {:.3e}  continuum={} exact_qubit_path={}",
        file.meta.n_starts,
        file.meta.n_converged,
        file.meta.min_residual,
        file.meta.continuum_suspected,
        file.meta.exact_qubit_path
    );
}

fn print_decompose(file: &DecomposeReportFile) {
    if let Some(pair) = &file.two_boson {
        print_two_boson(pair);
        return;
    }
    match (&file.triple, file.best_fidelity) {
        (Some(triple), _) => {
            println!("constituent triple (fidelity {:.9}):", triple.fidelity);
            for vector in &triple.vectors {
                println!("  {}", fmt_vector(vector));
            }
            println!(
                "  overlaps (0,1)/(0,2)/(1,2): {:.6}, {:.6}, {:.6}",
                triple.overlaps[0], triple.overlaps[1], triple.overlaps[2]
            );
            println!("  relations: {}", triple.relations.join(", "));
        }
        (None, Some(best)) => {
            println!("no symmetrized product of three vectors (best fidelity {best:.9})");
        }
        (None, None) => println!("no decomposition found"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_literals_parse_real_and_complex_entries() {
        let v = parse_vector("[0.70710678, 0.70710678]", 2).unwrap();
        assert!((v.components()[0].re - 1.0 / 2.0_f64.sqrt()).abs() < 1e-8);

        let v = parse_vector("[[0.0, 1.0], [1.0, 0.0]]", 2).unwrap();
        assert!((v.components()[0].im.abs() - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);

        assert!(parse_vector("[1.0]", 2).is_err());
        assert!(parse_vector("{\"re\": 1}", 2).is_err());
        assert!(parse_vector("[1.0, \"x\"]", 2).is_err());
        assert!(parse_vector("[[1.0], [0.0]]", 2).is_err());
        assert!(parse_vector("[0.0, 0.0]", 2).is_err());
    }

    #[test]
    fn failure_codes_follow_error_kind() {
        let parse = Failure::from(Error::BadParams { reason: "x".into() });
        assert_eq!(parse.code, 2);
        let numeric = Failure::from(Error::NumericalFailure { context: "x" });
        assert_eq!(numeric.code, 3);
        let gram = Failure::from(Error::InconsistentGram);
        assert_eq!(gram.code, 3);
        let name = Failure::from(Error::UnknownName { name: "x".into() });
        assert_eq!(name.code, 2);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
