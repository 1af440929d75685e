//! Verdict reports in two renderings: a JSON document (`machine`) and
//! plain text carrying the same facts.

use std::fmt::Write as _;

use qubitks_core::contextuality::{
    Census, Certificate, Outcome, ParityCertificate, Scenario, Verdict,
};
use qubitks_core::dilation::{ChiSquare, Distribution, Isometry, OutcomeHistogram};
use qubitks_core::effects::{CompletenessReport, CompletenessStatus};
use qubitks_core::exactnum::QuadNum;
use serde::Serialize;

use crate::document::{encode, QuadCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

/// An exact number: its four-integer code and a readable form.
#[derive(Debug, Clone, Serialize)]
pub struct ExactValue {
    pub exact: QuadCode,
    pub text: String,
    pub approx: f64,
}

impl From<&QuadNum> for ExactValue {
    fn from(x: &QuadNum) -> Self {
        ExactValue {
            exact: encode(x),
            text: x.to_string(),
            approx: x.to_f64(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub radicand: u64,
    pub effects: Vec<String>,
    pub context_count: usize,
    /// False for a bare hypergraph admitted without effect coordinates.
    pub has_effects: bool,
}

impl From<&Scenario> for ScenarioSummary {
    fn from(s: &Scenario) -> Self {
        ScenarioSummary {
            name: s.name().to_string(),
            radicand: s.radicand(),
            effects: s.labels().iter().map(ToString::to_string).collect(),
            context_count: s.contexts().len(),
            has_effects: s.effects().is_some(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassResidual {
    pub norm_sq: ExactValue,
    pub residual: [ExactValue; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct ContextCheck {
    pub index: usize,
    pub members: Vec<String>,
    pub status: &'static str,
    pub trace_residual: ExactValue,
    pub bloch_residuals: Vec<ClassResidual>,
    pub float_residual: f64,
}

pub fn status_name(s: CompletenessStatus) -> &'static str {
    match s {
        CompletenessStatus::Exact => "exact",
        CompletenessStatus::NumericOnly => "numeric-only",
        CompletenessStatus::Failed => "failed",
    }
}

impl ContextCheck {
    pub fn new(index: usize, members: Vec<String>, r: &CompletenessReport) -> Self {
        ContextCheck {
            index,
            members,
            status: status_name(r.status),
            trace_residual: (&r.trace_residual).into(),
            bloch_residuals: r
                .bloch_residuals
                .iter()
                .map(|(n, v)| ClassResidual {
                    norm_sq: n.into(),
                    residual: v.components().map(Into::into),
                })
                .collect(),
            float_residual: r.float_residual,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsdCheck {
    pub label: String,
    pub weight: String,
    pub positive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Multiplicity {
    pub label: String,
    pub contexts: usize,
}

fn multiplicities(m: &[(qubitks_core::Label, usize)]) -> Vec<Multiplicity> {
    m.iter()
        .map(|(l, c)| Multiplicity {
            label: l.to_string(),
            contexts: *c,
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ParitySection {
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub context_count: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub multiplicities: Vec<Multiplicity>,
}

impl From<Option<&ParityCertificate>> for ParitySection {
    fn from(p: Option<&ParityCertificate>) -> Self {
        match p {
            Some(c) => ParitySection {
                found: true,
                context_count: Some(c.context_count),
                multiplicities: multiplicities(&c.multiplicities),
            },
            None => ParitySection {
                found: false,
                context_count: None,
                multiplicities: Vec::new(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateSection {
    Parity {
        context_count: usize,
        multiplicities: Vec<Multiplicity>,
    },
    Exhaustive {
        nodes_explored: u64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictSection {
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coloring_count: Option<u64>,
    /// Labels answered yes by the witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_yes: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateSection>,
}

pub fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Colorable => "colorable",
        Outcome::Uncolorable => "uncolorable",
    }
}

impl From<&Verdict> for VerdictSection {
    fn from(v: &Verdict) -> Self {
        VerdictSection {
            outcome: outcome_name(v.outcome),
            coloring_count: v.coloring_count,
            witness_yes: v
                .witness
                .as_ref()
                .map(|w| w.yes_labels().map(ToString::to_string).collect()),
            certificate: v.certificate.as_ref().map(|c| match c {
                Certificate::Parity(p) => CertificateSection::Parity {
                    context_count: p.context_count,
                    multiplicities: multiplicities(&p.multiplicities),
                },
                Certificate::Exhaustive { nodes_explored } => CertificateSection::Exhaustive {
                    nodes_explored: *nodes_explored,
                },
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusSection {
    pub multiplicities: Vec<Multiplicity>,
    pub context_sizes: Vec<usize>,
    pub all_multiplicities_even: bool,
    pub context_count_odd: bool,
}

impl From<&Census> for CensusSection {
    fn from(c: &Census) -> Self {
        CensusSection {
            multiplicities: multiplicities(&c.multiplicities),
            context_sizes: c.context_sizes.clone(),
            all_multiplicities_even: c.all_multiplicities_even,
            context_count_odd: c.context_count_odd,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CubeEntry {
    pub index: usize,
    pub pairs: Vec<String>,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharedPair {
    pub first: usize,
    pub second: usize,
    pub shared: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometrySection {
    pub vertex_count: usize,
    pub norm_sq: ExactValue,
    pub candidates_examined: usize,
    pub cubes: Vec<CubeEntry>,
    pub shared_pairs: Vec<SharedPair>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsometryRow {
    pub label: String,
    /// `[[re, im], [re, im]]`.
    pub row: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct DilationSection {
    pub context: usize,
    pub rows: Vec<IsometryRow>,
    pub residual: f64,
    pub within_tolerance: bool,
}

impl DilationSection {
    pub fn new(context: usize, iso: &Isometry, tolerance: f64) -> Self {
        let residual = iso.residual();
        DilationSection {
            context,
            rows: iso
                .labels
                .iter()
                .zip(&iso.rows)
                .map(|(l, r)| IsometryRow {
                    label: l.to_string(),
                    row: [[r[0].re, r[0].im], [r[1].re, r[1].im]],
                })
                .collect(),
            residual,
            within_tolerance: residual < tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeRow {
    pub label: String,
    pub probability: f64,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplingSection {
    pub context: usize,
    pub state: String,
    pub state_bloch: [f64; 3],
    pub isometry_residual: f64,
    pub seed: u64,
    pub samples: u64,
    pub outcomes: Vec<OutcomeRow>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl SamplingSection {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        context: usize,
        state: String,
        state_bloch: [f64; 3],
        isometry_residual: f64,
        dist: &Distribution,
        hist: &OutcomeHistogram,
        chi: ChiSquare,
        p_value: f64,
    ) -> Self {
        SamplingSection {
            context,
            state,
            state_bloch,
            isometry_residual,
            seed: hist.seed,
            samples: hist.total,
            outcomes: dist
                .labels
                .iter()
                .zip(&dist.probabilities)
                .zip(&hist.counts)
                .map(|((l, &p), &c)| OutcomeRow {
                    label: l.to_string(),
                    probability: p,
                    count: c,
                    frequency: c as f64 / hist.total as f64,
                })
                .collect(),
            chi_square: chi.statistic,
            degrees_of_freedom: chi.degrees_of_freedom,
            p_value,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationSection {
    pub expected: &'static str,
    pub actual: &'static str,
    pub met: bool,
}

/// One command's findings. Sections a command does not produce are omitted.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub completeness: Vec<ContextCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub positivity: Vec<PsdCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<ParitySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census: Option<CensusSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dilation: Vec<DilationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation: Option<ExpectationSection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            scenario: None,
            completeness: Vec::new(),
            positivity: Vec::new(),
            parity: None,
            verdict: None,
            census: None,
            geometry: None,
            dilation: Vec::new(),
            sampling: None,
            expectation: None,
            warnings: Vec::new(),
            exit_code: 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => self.to_text(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let o = &mut out;
        if let Some(s) = &self.scenario {
            let _ = writeln!(o, "scenario {} (radicand {})", s.name, s.radicand);
            let _ = writeln!(
                o,
                "  effects ({}): {}",
                s.effects.len(),
                s.effects.join(" ")
            );
            let _ = writeln!(o, "  contexts: {}", s.context_count);
            if !s.has_effects {
                let _ = writeln!(o, "  bare hypergraph: no effect coordinates");
            }
        }
        if !self.completeness.is_empty() {
            let _ = writeln!(o, "completeness");
            for c in &self.completeness {
                let _ = writeln!(
                    o,
                    "  context {} [{}]: {} (trace residual {}, matrix residual {:.3e})",
                    c.index,
                    c.members.join(" "),
                    c.status,
                    c.trace_residual.text,
                    c.float_residual
                );
                for r in &c.bloch_residuals {
                    let _ = writeln!(
                        o,
                        "    class |n|^2 = {}: bloch residual ({}, {}, {})",
                        r.norm_sq.text, r.residual[0].text, r.residual[1].text, r.residual[2].text
                    );
                }
            }
        }
        if !self.positivity.is_empty() {
            let bad: Vec<&str> = self
                .positivity
                .iter()
                .filter(|p| !p.positive)
                .map(|p| p.label.as_str())
                .collect();
            if bad.is_empty() {
                let _ = writeln!(
                    o,
                    "positivity: all {} effects positive semidefinite",
                    self.positivity.len()
                );
            } else {
                let _ = writeln!(
                    o,
                    "positivity: not positive semidefinite: {}",
                    bad.join(" ")
                );
            }
            let weights: Vec<String> = self
                .positivity
                .iter()
                .map(|p| format!("{}={}", p.label, p.weight))
                .collect();
            let _ = writeln!(o, "  weights: {}", weights.join(" "));
        }
        if let Some(c) = &self.census {
            let _ = writeln!(o, "census");
            let mults: Vec<String> = c
                .multiplicities
                .iter()
                .map(|m| format!("{}:{}", m.label, m.contexts))
                .collect();
            let _ = writeln!(o, "  label multiplicities: {}", mults.join(" "));
            let sizes: Vec<String> = c.context_sizes.iter().map(ToString::to_string).collect();
            let _ = writeln!(o, "  context sizes: {}", sizes.join(" "));
            let _ = writeln!(
                o,
                "  all multiplicities even: {}; context count odd: {}",
                c.all_multiplicities_even, c.context_count_odd
            );
        }
        if let Some(p) = &self.parity {
            if p.found {
                let _ = writeln!(
                    o,
                    "parity certificate: every label in an even number of contexts, {} contexts (odd)",
                    p.context_count.unwrap_or_default()
                );
            } else {
                let _ = writeln!(o, "parity certificate: not applicable");
            }
        }
        if let Some(v) = &self.verdict {
            let _ = write!(o, "verdict: {}", v.outcome);
            if let Some(n) = v.coloring_count {
                let _ = write!(o, " ({n} valid assignments)");
            }
            let _ = writeln!(o);
            if let Some(w) = &v.witness_yes {
                let _ = writeln!(o, "  witness yes: {}", w.join(" "));
            }
            match &v.certificate {
                Some(CertificateSection::Exhaustive { nodes_explored }) => {
                    let plural = if *nodes_explored == 1 { "" } else { "s" };
                    let _ = writeln!(
                        o,
                        "  exhaustive certificate: {nodes_explored} search node{plural} explored"
                    );
                }
                Some(CertificateSection::Parity { context_count, .. }) => {
                    let _ = writeln!(o, "  parity certificate over {context_count} contexts");
                }
                None => {}
            }
        }
        if let Some(g) = &self.geometry {
            let _ = writeln!(
                o,
                "{} vertices, |v|^2 = {}, {} candidate pair sets examined",
                g.vertex_count, g.norm_sq.text, g.candidates_examined
            );
            let _ = writeln!(o, "inscribed cubes: {}", g.cubes.len());
            for c in &g.cubes {
                let _ = writeln!(
                    o,
                    "  cube {}: {} [{}]",
                    c.index,
                    c.pairs.join(""),
                    c.members.join(" ")
                );
            }
            let _ = writeln!(o, "shared antipodal pairs: {}", g.shared_pairs.len());
            for s in &g.shared_pairs {
                let _ = writeln!(
                    o,
                    "  cubes {} and {}: {}",
                    s.first,
                    s.second,
                    s.shared.join(" ")
                );
            }
        }
        for d in &self.dilation {
            let _ = writeln!(
                o,
                "isometry for context {}: residual |V'V - I| = {:.3e} ({})",
                d.context,
                d.residual,
                if d.within_tolerance { "ok" } else { "FAILED" }
            );
            for r in &d.rows {
                let _ = writeln!(
                    o,
                    "  {:>4}: ({:+.6} {:+.6}i, {:+.6} {:+.6}i)",
                    r.label, r.row[0][0], r.row[0][1], r.row[1][0], r.row[1][1]
                );
            }
        }
        if let Some(s) = &self.sampling {
            let _ = writeln!(
                o,
                "sampling context {} in state {} (bloch {:.6}, {:.6}, {:.6})",
                s.context, s.state, s.state_bloch[0], s.state_bloch[1], s.state_bloch[2]
            );
            let _ = writeln!(o, "  isometry residual {:.3e}", s.isometry_residual);
            let _ = writeln!(o, "  {} samples, seed {}", s.samples, s.seed);
            for r in &s.outcomes {
                let _ = writeln!(
                    o,
                    "  {:>4}: p = {:.6}  count = {:>8}  freq = {:.6}",
                    r.label, r.probability, r.count, r.frequency
                );
            }
            let _ = writeln!(
                o,
                "  chi-square {:.4} on {} degrees of freedom, p-value {:.4}",
                s.chi_square, s.degrees_of_freedom, s.p_value
            );
        }
        if let Some(e) = &self.expectation {
            let _ = writeln!(
                o,
                "expectation {}: {} (actual {})",
                if e.met { "met" } else { "NOT met" },
                e.expected,
                e.actual
            );
        }
        for w in &self.warnings {
            let _ = writeln!(o, "warning: {w}");
        }
        out
    }
}
