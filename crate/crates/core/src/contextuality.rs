//! Noncontextual yes/no colorings of effect scenarios.
//!
//! A scenario is a hypergraph: effects are vertices, contexts (complete
//! measurements) are hyperedges, and a noncontextual assignment must answer
//! yes to exactly one effect in every context. Uncolorability is certified
//! either by parity or by exhaustive backtracking.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::effects::{check_psd, Effect, EffectError, Povm, DEFAULT_TOLERANCE};
use crate::exactnum::FieldError;
use crate::geometry::Label;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("label {0} is declared twice")]
    DuplicateLabel(Label),
    #[error("context {context} references undeclared label {label}")]
    UnknownLabel { context: usize, label: Label },
    #[error("context {context} lists {label} more than once")]
    RepeatedMember { context: usize, label: Label },
    #[error("context {context} is not a valid measurement: {source}")]
    ContextNotRealizable {
        context: usize,
        #[source]
        source: EffectError,
    },
    #[error("effect {0} is not positive semidefinite")]
    NotPositive(Label),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("assignment has no answer for {0}")]
    MissingLabel(Label),
}

/// How strictly a scenario is checked on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admission {
    /// Skip completeness and positivity checks: admit a bare hypergraph.
    pub combinatorial_only: bool,
    pub tolerance: f64,
}

impl Default for Admission {
    fn default() -> Self {
        Admission {
            combinatorial_only: false,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl Admission {
    pub fn combinatorial() -> Self {
        Admission {
            combinatorial_only: true,
            ..Self::default()
        }
    }
}

/// Effects plus contexts, stored as indices into the label list.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    name: String,
    labels: Vec<Label>,
    effects: Option<Vec<Effect>>,
    contexts: Vec<Vec<usize>>,
}

impl Scenario {
    /// A scenario of concrete effects. Unless `admission` says otherwise,
    /// every context must be a complete POVM and every effect positive.
    pub fn from_effects(
        name: impl Into<String>,
        effects: Vec<Effect>,
        contexts: Vec<Vec<Label>>,
        admission: Admission,
    ) -> Result<Self, ScenarioError> {
        let labels: Vec<Label> = effects.iter().map(|e| e.label().clone()).collect();
        let mut scenario = Self::combinatorial(name, labels, contexts)?;
        if !admission.combinatorial_only {
            for e in &effects {
                if !check_psd(e) {
                    return Err(ScenarioError::NotPositive(e.label().clone()));
                }
            }
            for (i, members) in scenario.contexts.iter().enumerate() {
                let povm_effects = members.iter().map(|&k| effects[k].clone()).collect();
                Povm::with_tolerance(povm_effects, admission.tolerance)
                    .map_err(|source| ScenarioError::ContextNotRealizable { context: i, source })?;
            }
        }
        scenario.effects = Some(effects);
        Ok(scenario)
    }

    /// A bare hypergraph over `labels`.
    pub fn combinatorial(
        name: impl Into<String>,
        labels: Vec<Label>,
        contexts: Vec<Vec<Label>>,
    ) -> Result<Self, ScenarioError> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ScenarioError::DuplicateLabel(l.clone()));
            }
        }
        let mut indexed = Vec::with_capacity(contexts.len());
        for (c, members) in contexts.into_iter().enumerate() {
            let mut idx: Vec<usize> = Vec::with_capacity(members.len());
            for label in members {
                let k = labels.iter().position(|l| *l == label).ok_or_else(|| {
                    ScenarioError::UnknownLabel {
                        context: c,
                        label: label.clone(),
                    }
                })?;
                if idx.contains(&k) {
                    return Err(ScenarioError::RepeatedMember { context: c, label });
                }
                idx.push(k);
            }
            indexed.push(idx);
        }
        Ok(Scenario {
            name: name.into(),
            labels,
            effects: None,
            contexts: indexed,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Concrete effects, parallel to [`Scenario::labels`]; `None` for a bare
    /// hypergraph.
    pub fn effects(&self) -> Option<&[Effect]> {
        self.effects.as_deref()
    }

    pub fn effect(&self, label: &Label) -> Option<&Effect> {
        let k = self.index_of(label)?;
        self.effects.as_ref().map(|es| &es[k])
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    pub fn context_labels(&self, c: usize) -> Vec<&Label> {
        self.contexts[c].iter().map(|&k| &self.labels[k]).collect()
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Radicand shared by the effect coordinates; 1 when all are rational
    /// or the scenario has no effects.
    pub fn radicand(&self) -> u64 {
        self.effects
            .iter()
            .flatten()
            .map(|e| e.direction().radicand())
            .find(|&d| d != 1)
            .unwrap_or(1)
    }

    /// Labels that occur in no context. They are pinned to "no".
    pub fn unused_labels(&self) -> Vec<&Label> {
        let mult = self.multiplicities();
        self.labels
            .iter()
            .zip(mult)
            .filter(|(_, m)| *m == 0)
            .map(|(l, _)| l)
            .collect()
    }

    /// The POVM of context `c`, when the scenario carries effects.
    pub fn povm(&self, c: usize) -> Option<Result<Povm, EffectError>> {
        let effects = self.effects.as_ref()?;
        let members = self.contexts.get(c)?;
        Some(Povm::new(
            members.iter().map(|&k| effects[k].clone()).collect(),
        ))
    }

    fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0usize; self.labels.len()];
        for ctx in &self.contexts {
            for &k in ctx {
                m[k] += 1;
            }
        }
        m
    }

    fn label_contexts(&self) -> Vec<Vec<usize>> {
        let mut lc = vec![Vec::new(); self.labels.len()];
        for (c, ctx) in self.contexts.iter().enumerate() {
            for &k in ctx {
                lc[k].push(c);
            }
        }
        lc
    }
}

/// A total yes/no answer per label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment(BTreeMap<Label, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, label: Label, yes: bool) {
        self.0.insert(label, yes);
    }

    pub fn get(&self, label: &Label) -> Option<bool> {
        self.0.get(label).copied()
    }

    pub fn yes_labels(&self) -> impl Iterator<Item = &Label> {
        self.0.iter().filter(|(_, &v)| v).map(|(l, _)| l)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, bool)> {
        self.0.iter().map(|(l, &v)| (l, v))
    }

    /// Everything answered "no".
    pub fn all_no(s: &Scenario) -> Self {
        Assignment(s.labels.iter().map(|l| (l.clone(), false)).collect())
    }
}

impl FromIterator<(Label, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (Label, bool)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// True iff every context has exactly one yes.
pub fn verify_assignment(s: &Scenario, a: &Assignment) -> Result<bool, ScenarioError> {
    let answers: Vec<bool> = s
        .labels
        .iter()
        .map(|l| {
            a.get(l)
                .ok_or_else(|| ScenarioError::MissingLabel(l.clone()))
        })
        .collect::<Result<_, _>>()?;
    Ok(s.contexts
        .iter()
        .all(|ctx| ctx.iter().filter(|&&k| answers[k]).count() == 1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCertificate {
    pub context_count: usize,
    /// Number of contexts each label occurs in, in label order.
    pub multiplicities: Vec<(Label, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Parity(ParityCertificate),
    /// The full search tree was explored without finding a coloring.
    Exhaustive {
        nodes_explored: u64,
    },
}

/// Counting yeses context by context gives the (odd) number of contexts;
/// counting label by label gives a sum of even multiplicities. Both count
/// the same set, so no valid assignment exists.
///
/// `None` only says the parity argument does not apply.
pub fn parity_certificate(s: &Scenario) -> Option<ParityCertificate> {
    let mult = s.multiplicities();
    let context_count = s.contexts.len();
    if context_count % 2 == 1 && mult.iter().all(|m| m % 2 == 0) {
        Some(ParityCertificate {
            context_count,
            multiplicities: s.labels.iter().cloned().zip(mult).collect(),
        })
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Colorable,
    Uncolorable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    FirstWitness,
    CountAll,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Assignment>,
    /// Exact number of valid assignments; present in count-all mode.
    pub coloring_count: Option<u64>,
    pub certificate: Option<Certificate>,
}

struct Search<'a> {
    contexts: &'a [Vec<usize>],
    label_contexts: Vec<Vec<usize>>,
    state: Vec<Option<bool>>,
    yes: Vec<usize>,
    open: Vec<usize>,
    trail: Vec<usize>,
    mode: SearchMode,
    nodes: u64,
    count: u64,
    first: Option<Vec<Option<bool>>>,
}

impl Search<'_> {
    /// Decides one label and reports whether every touched context can
    /// still get exactly one yes.
    fn set(&mut self, k: usize, value: bool) -> bool {
        self.state[k] = Some(value);
        self.trail.push(k);
        let mut ok = true;
        for &c in &self.label_contexts[k] {
            self.open[c] -= 1;
            if value {
                self.yes[c] += 1;
            }
            if self.yes[c] > 1 || (self.yes[c] == 0 && self.open[c] == 0) {
                ok = false;
            }
        }
        ok
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let k = self.trail.pop().expect("trail above mark");
            let value = self.state[k].take().expect("trail holds decided labels");
            for &c in &self.label_contexts[k] {
                self.open[c] += 1;
                if value {
                    self.yes[c] -= 1;
                }
            }
        }
    }

    /// Answers yes to `k` and no to every other open label sharing a
    /// context with it.
    fn choose(&mut self, k: usize) -> bool {
        if !self.set(k, true) {
            return false;
        }
        for ci in 0..self.label_contexts[k].len() {
            let c = self.label_contexts[k][ci];
            for mi in 0..self.contexts[c].len() {
                let other = self.contexts[c][mi];
                if self.state[other].is_none() && !self.set(other, false) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, from: usize) {
        self.nodes += 1;
        let Some(c) = (from..self.contexts.len()).find(|&c| self.yes[c] == 0) else {
            self.count += 1;
            if self.first.is_none() {
                self.first = Some(self.state.clone());
            }
            return;
        };
        for mi in 0..self.contexts[c].len() {
            let k = self.contexts[c][mi];
            if self.state[k].is_some() {
                continue;
            }
            let mark = self.trail.len();
            if self.choose(k) {
                self.run(c + 1);
            }
            self.undo_to(mark);
            if self.mode == SearchMode::FirstWitness && self.first.is_some() {
                return;
            }
        }
    }
}

/// Complete backtracking search for exactly-one-yes colorings.
///
/// Contexts are visited in input order and candidate yes-labels in member
/// order, so node counts and witnesses are reproducible.
pub fn search_colorings(s: &Scenario, mode: SearchMode) -> Verdict {
    let n = s.labels.len();
    let mut search = Search {
        contexts: &s.contexts,
        label_contexts: s.label_contexts(),
        state: vec![None; n],
        yes: vec![0; s.contexts.len()],
        open: s.contexts.iter().map(Vec::len).collect(),
        trail: Vec::with_capacity(n),
        mode,
        nodes: 0,
        count: 0,
        first: None,
    };
    // An empty context can never hold a yes.
    if s.contexts.iter().all(|c| !c.is_empty()) {
        search.run(0);
    } else {
        search.nodes = 1;
    }

    let witness = search.first.as_ref().map(|state| {
        s.labels
            .iter()
            .zip(state)
            .map(|(l, v)| (l.clone(), v.unwrap_or(false)))
            .collect::<Assignment>()
    });
    let coloring_count = (mode == SearchMode::CountAll).then_some(search.count);
    match witness {
        Some(w) => Verdict {
            outcome: Outcome::Colorable,
            witness: Some(w),
            coloring_count,
            certificate: None,
        },
        None => Verdict {
            outcome: Outcome::Uncolorable,
            witness: None,
            coloring_count,
            certificate: Some(Certificate::Exhaustive {
                nodes_explored: search.nodes,
            }),
        },
    }
}

/// Incidence statistics of a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    /// `(label, number of contexts containing it)` in label order.
    pub multiplicities: Vec<(Label, usize)>,
    pub context_sizes: Vec<usize>,
    pub all_multiplicities_even: bool,
    pub context_count_odd: bool,
}

pub fn coloring_census(s: &Scenario) -> Census {
    let mult = s.multiplicities();
    Census {
        all_multiplicities_even: mult.iter().all(|m| m % 2 == 0),
        multiplicities: s.labels.iter().cloned().zip(mult).collect(),
        context_sizes: s.contexts.iter().map(Vec::len).collect(),
        context_count_odd: s.contexts.len() % 2 == 1,
    }
}

/// Whether two hypergraphs, given as edge lists over arbitrary vertex ids,
/// are isomorphic. Tries every edge bijection; vertices are then matched by
/// the set of edges they lie on. Vertices on no edge are ignored.
pub fn incidence_isomorphic(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let profile = |edges: &[Vec<usize>]| -> Vec<Vec<usize>> {
        let mut by_vertex: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (e, members) in edges.iter().enumerate() {
            for &v in members {
                by_vertex.entry(v).or_default().push(e);
            }
        }
        by_vertex.into_values().collect()
    };
    let pa = profile(a);
    let mut pb = profile(b);
    if pa.len() != pb.len() {
        return false;
    }
    pb.sort();
    let mut perm: Vec<usize> = (0..a.len()).collect();
    permutations_any(&mut perm, 0, &mut |p| {
        let mut mapped: Vec<Vec<usize>> = pa
            .iter()
            .map(|es| {
                let mut m: Vec<usize> = es.iter().map(|&e| p[e]).collect();
                m.sort_unstable();
                m
            })
            .collect();
        mapped.sort();
        mapped == pb
    })
}

fn permutations_any(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return f(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations_any(p, k + 1, f) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}
