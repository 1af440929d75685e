//! Argument parsing and command dispatch.

use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use qubitks_core::contextuality::{
    coloring_census, parity_certificate, search_colorings, Admission, Outcome, Scenario, SearchMode,
};
use qubitks_core::dilation::{
    chi_square, neumark_isometry, outcome_distribution, sample, spinor_from_direction, QubitState,
};
use qubitks_core::effects::{check_completeness_with_tolerance, check_psd, CompletenessStatus};
use qubitks_core::geometry::{dodecahedron_vertices, find_inscribed_cubes, Label};
use qubitks_core::scenarios::{builtin, dodecahedron_scenario, BUILTIN_NAMES};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::document::{parse_scenario, scenario_to_document, to_json, DocumentError, ErrorClass};
use crate::report::{
    outcome_name, CensusSection, ContextCheck, CubeEntry, DilationSection, ExpectationSection,
    Format, GeometrySection, ParitySection, PsdCheck, Report, SamplingSection, ScenarioSummary,
    SharedPair, VerdictSection,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_EXPECTATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qubitks",
    version,
    about = "Verify qubit POVM Kochen-Specker sets and simulate their measurements"
)]
pub struct Cli {
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Tolerance for floating checks (numeric-only completeness, isometry).
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tolerance: f64,
    /// Seed for outcome sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of outcome samples.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: u64,
    /// Expected coloring verdict; a mismatch exits with status 1.
    #[arg(long, global = true, value_enum)]
    pub expect: Option<Expect>,
    /// Admit scenario files without completeness or positivity checks.
    #[arg(long, global = true)]
    pub combinatorial_only: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Colorable,
    Uncolorable,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check completeness and positivity of every context, then decide
    /// colorability with parity and exhaustive search.
    Verify {
        /// Builtin name (dodecahedron, hexagon, cube) or scenario file path.
        source: String,
    },
    /// Decide colorability only.
    Color {
        source: String,
        /// Stop at the first valid assignment instead of counting all.
        #[arg(long)]
        first_witness: bool,
    },
    /// Dodecahedron geometry.
    Geometry {
        #[command(subcommand)]
        what: GeometryCommand,
    },
    /// Build the Neumark isometry of each context.
    Dilate {
        source: String,
        /// Only this context (0-based).
        #[arg(long)]
        context: Option<usize>,
    },
    /// Sample measurement outcomes of one context.
    Sample {
        source: String,
        /// Context to measure (0-based).
        #[arg(long, default_value_t = 0)]
        context: usize,
        /// `mixed`, or the +1 eigenstate along an effect direction such as
        /// `+C`, `-C`, `C+`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "bloch")]
        state: Option<String>,
        /// Bloch vector `x,y,z` of length at most 1.
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        bloch: Option<Vec<f64>>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GeometryCommand {
    /// List the cubes inscribed in the dodecahedron and the pairs they share.
    Cubes,
    /// Emit the dodecahedron scenario document with exact and floating
    /// coordinates.
    Export,
}

/// What a command printed and the status it exits with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            kind: "input",
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            kind: "validation",
            message: message.into(),
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        match e.class() {
            ErrorClass::Input => Failure::input(e.to_string()),
            ErrorClass::Validation => Failure::validation(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                Output {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Output {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_INPUT,
                }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Output {
    let result = match &cli.command {
        Command::Verify { source } => cmd_verify(cli, source),
        Command::Color {
            source,
            first_witness,
        } => cmd_color(cli, source, *first_witness),
        Command::Geometry { what } => match what {
            GeometryCommand::Cubes => Ok(cmd_geometry_cubes()),
            GeometryCommand::Export => return cmd_geometry_export(cli.format),
        },
        Command::Dilate { source, context } => cmd_dilate(cli, source, *context),
        Command::Sample {
            source,
            context,
            state,
            bloch,
        } => cmd_sample(cli, source, *context, state.as_deref(), bloch.as_deref()),
    };
    match result {
        Ok(report) => Output {
            stdout: report.render(cli.format),
            stderr: String::new(),
            code: report.exit_code,
        },
        Err(f) => {
            let stdout = match cli.format {
                Format::Machine => {
                    let doc = serde_json::json!({
                        "command": command_name(&cli.command),
                        "error": { "kind": f.kind, "message": f.message },
                        "exit_code": f.code,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
                }
                Format::Text => String::new(),
            };
            Output {
                stdout,
                stderr: format!("error: {}\n", f.message),
                code: f.code,
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Verify { .. } => "verify",
        Command::Color { .. } => "color",
        Command::Geometry {
            what: GeometryCommand::Cubes,
        } => "geometry cubes",
        Command::Geometry {
            what: GeometryCommand::Export,
        } => "geometry export",
        Command::Dilate { .. } => "dilate",
        Command::Sample { .. } => "sample",
    }
}

fn admission(cli: &Cli) -> Admission {
    Admission {
        combinatorial_only: cli.combinatorial_only,
        tolerance: cli.tolerance,
    }
}

/// A builtin by name, otherwise a scenario file.
fn load_scenario(cli: &Cli, source: &str) -> Result<Scenario, Failure> {
    if let Some(s) = builtin(source) {
        return Ok(s);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(Failure::input(format!(
            "{source:?} is neither a builtin ({}) nor an existing file",
            BUILTIN_NAMES.join(", ")
        )));
    }
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&bytes, admission(cli)).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn scenario_warnings(s: &Scenario) -> Vec<String> {
    s.unused_labels()
        .into_iter()
        .map(|l| format!("effect {l} occurs in no context and is pinned to no"))
        .collect()
}

fn coloring_sections(report: &mut Report, cli: &Cli, s: &Scenario, mode: SearchMode) {
    report.census = Some(CensusSection::from(&coloring_census(s)));
    report.parity = Some(ParitySection::from(parity_certificate(s).as_ref()));
    let verdict = search_colorings(s, mode);
    report.verdict = Some(VerdictSection::from(&verdict));
    if let Some(expect) = cli.expect {
        let expected = match expect {
            Expect::Colorable => Outcome::Colorable,
            Expect::Uncolorable => Outcome::Uncolorable,
        };
        let met = expected == verdict.outcome;
        report.expectation = Some(ExpectationSection {
            expected: outcome_name(expected),
            actual: outcome_name(verdict.outcome),
            met,
        });
        if !met && report.exit_code == EXIT_OK {
            report.exit_code = EXIT_EXPECTATION;
        }
    }
}

pub fn cmd_verify_report(cli: &Cli, s: &Scenario) -> Report {
    let mut report = Report::new("verify");
    report.scenario = Some(ScenarioSummary::from(s));
    report.warnings = scenario_warnings(s);
    if let Some(effects) = s.effects() {
        for (c, members) in s.contexts().iter().enumerate() {
            let ctx: Vec<_> = members.iter().map(|&k| effects[k].clone()).collect();
            let labels = members.iter().map(|&k| s.labels()[k].to_string()).collect();
            match check_completeness_with_tolerance(&ctx, cli.tolerance) {
                Ok(r) => {
                    if r.status == CompletenessStatus::Failed {
                        report.exit_code = EXIT_VALIDATION;
                    }
                    report.completeness.push(ContextCheck::new(c, labels, &r));
                }
                Err(e) => {
                    report.exit_code = EXIT_VALIDATION;
                    report.warnings.push(format!("context {c}: {e}"));
                }
            }
        }
        for e in effects {
            let positive = check_psd(e);
            if !positive {
                report.exit_code = EXIT_VALIDATION;
            }
            report.positivity.push(PsdCheck {
                label: e.label().to_string(),
                weight: e.weight().to_string(),
                positive,
            });
        }
    } else {
        report.exit_code = EXIT_VALIDATION;
        report
            .warnings
            .push("no effect coordinates: physical validation impossible".into());
    }
    coloring_sections(&mut report, cli, s, SearchMode::CountAll);
    report
}

fn cmd_verify(cli: &Cli, source: &str) -> Result<Report, Failure> {
    let s = load_scenario(cli, source)?;
    Ok(cmd_verify_report(cli, &s))
}

fn cmd_color(cli: &Cli, source: &str, first_witness: bool) -> Result<Report, Failure> {
    let s = load_scenario(cli, source)?;
    let mut report = Report::new("color");
    report.scenario = Some(ScenarioSummary::from(&s));
    report.warnings = scenario_warnings(&s);
    let mode = if first_witness {
        SearchMode::FirstWitness
    } else {
        SearchMode::CountAll
    };
    coloring_sections(&mut report, cli, &s, mode);
    Ok(report)
}

pub fn cmd_geometry_cubes() -> Report {
    let vs = dodecahedron_vertices();
    let cubes = find_inscribed_cubes(&vs);
    let n = vs.pair_count();
    let candidates = if n >= 4 {
        n * (n - 1) * (n - 2) * (n - 3) / 24
    } else {
        0
    };
    let mut shared_pairs = Vec::new();
    for (i, a) in cubes.iter().enumerate() {
        for (j, b) in cubes.iter().enumerate().skip(i + 1) {
            shared_pairs.push(SharedPair {
                first: i,
                second: j,
                shared: a.shared_pairs(b).into_iter().map(String::from).collect(),
            });
        }
    }
    let mut report = Report::new("geometry cubes");
    report.geometry = Some(GeometrySection {
        vertex_count: vs.vertices().len(),
        norm_sq: vs.norm_sq().into(),
        candidates_examined: candidates,
        cubes: cubes
            .iter()
            .enumerate()
            .map(|(i, c)| CubeEntry {
                index: i,
                pairs: c.pair_names().to_vec(),
                members: c.member_labels().iter().map(ToString::to_string).collect(),
            })
            .collect(),
        shared_pairs,
    });
    report
}

/// The machine rendering is the scenario document itself, so it can be fed
/// back to `verify`.
pub fn cmd_geometry_export(format: Format) -> Output {
    let s = dodecahedron_scenario();
    let doc = scenario_to_document(&s, true).expect("builtin exports");
    let stdout = match format {
        Format::Machine => format!("{}\n", to_json(&doc)),
        Format::Text => {
            let vs = dodecahedron_vertices();
            let mut out = format!(
                "{} vertices over Q(sqrt {}), |v|^2 = {}\n",
                vs.vertices().len(),
                vs.radicand(),
                vs.norm_sq()
            );
            for v in vs.vertices() {
                let [x, y, z] = v.coords.to_f64();
                out.push_str(&format!(
                    "  {:>3} {}  ~ ({:+.9}, {:+.9}, {:+.9})\n",
                    v.label.to_string(),
                    v.coords,
                    x,
                    y,
                    z
                ));
            }
            for (i, c) in doc.contexts.iter().enumerate() {
                out.push_str(&format!("  cube {i}: {}\n", c.members.join(" ")));
            }
            out
        }
    };
    Output {
        stdout,
        stderr: String::new(),
        code: EXIT_OK,
    }
}

fn context_povm(s: &Scenario, c: usize) -> Result<qubitks_core::effects::Povm, Failure> {
    match s.povm(c) {
        None if s.effects().is_none() => Err(Failure::input(
            "scenario has no effect coordinates to dilate",
        )),
        None => Err(Failure::input(format!(
            "context {c} out of range: scenario has {} contexts",
            s.contexts().len()
        ))),
        Some(Err(e)) => Err(Failure::validation(format!("context {c}: {e}"))),
        Some(Ok(p)) => Ok(p),
    }
}

fn cmd_dilate(cli: &Cli, source: &str, only: Option<usize>) -> Result<Report, Failure> {
    let s = load_scenario(cli, source)?;
    let mut report = Report::new("dilate");
    report.scenario = Some(ScenarioSummary::from(&s));
    let indices: Vec<usize> = match only {
        Some(c) => vec![c],
        None => (0..s.contexts().len()).collect(),
    };
    for c in indices {
        let povm = context_povm(&s, c)?;
        let section = DilationSection::new(c, &neumark_isometry(&povm), cli.tolerance);
        if !section.within_tolerance {
            report.exit_code = EXIT_VALIDATION;
        }
        report.dilation.push(section);
    }
    Ok(report)
}

/// `mixed`, or `+X`, `-X`, `X+`, `X-` for an effect direction of `s`.
fn resolve_state(s: &Scenario, name: &str) -> Result<QubitState, Failure> {
    if name == "mixed" {
        return Ok(QubitState::maximally_mixed());
    }
    let signed = match name.chars().next() {
        Some(c @ ('+' | '-')) => format!("{}{}", &name[1..], c),
        _ => name.to_string(),
    };
    let label: Label = signed.parse().map_err(|_| {
        Failure::input(format!(
            "invalid state {name:?}: expected mixed or a signed label"
        ))
    })?;
    let dir = match (s.effect(&label), s.effect(&label.antipode())) {
        (Some(e), _) => e.direction().clone(),
        (None, Some(e)) => -e.direction(),
        (None, None) => {
            return Err(Failure::input(format!(
                "invalid state {name:?}: no effect along direction {}",
                label.name
            )))
        }
    };
    let psi = spinor_from_direction(&dir).map_err(|e| Failure::input(e.to_string()))?;
    Ok(QubitState::Pure(psi))
}

fn cmd_sample(
    cli: &Cli,
    source: &str,
    context: usize,
    state: Option<&str>,
    bloch: Option<&[f64]>,
) -> Result<Report, Failure> {
    let s = load_scenario(cli, source)?;
    let povm = context_povm(&s, context)?;
    let (state, description) = match (state, bloch) {
        (_, Some(r)) => {
            let r: [f64; 3] = r
                .try_into()
                .map_err(|_| Failure::input("--bloch takes exactly three components x,y,z"))?;
            (
                QubitState::Bloch(r),
                format!("bloch({},{},{})", r[0], r[1], r[2]),
            )
        }
        (Some(name), None) => (resolve_state(&s, name)?, name.to_string()),
        (None, None) => (QubitState::maximally_mixed(), "mixed".to_string()),
    };
    let state_bloch = match &state {
        QubitState::Pure(psi) => psi.bloch(),
        QubitState::Bloch(r) => *r,
    };
    let iso = neumark_isometry(&povm);
    let dist = outcome_distribution(&povm, &state).map_err(|e| Failure::input(e.to_string()))?;
    let hist =
        sample(&povm, &state, cli.samples, cli.seed).map_err(|e| Failure::input(e.to_string()))?;
    let chi = chi_square(&hist, &dist);
    let p_value = chi_square_p_value(chi.statistic, chi.degrees_of_freedom);

    let mut report = Report::new("sample");
    report.scenario = Some(ScenarioSummary::from(&s));
    report.sampling = Some(SamplingSection::new(
        context,
        description,
        state_bloch,
        iso.residual(),
        &dist,
        &hist,
        chi,
        p_value,
    ));
    Ok(report)
}

/// Upper-tail probability of the chi-square distribution.
pub fn chi_square_p_value(statistic: f64, dof: usize) -> f64 {
    if !statistic.is_finite() {
        return 0.0;
    }
    if dof == 0 {
        return if statistic == 0.0 { 1.0 } else { 0.0 };
    }
    ChiSquared::new(dof as f64)
        .map(|d| d.sf(statistic))
        .unwrap_or(f64::NAN)
}
