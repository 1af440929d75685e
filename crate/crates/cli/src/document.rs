//! JSON scenario documents.
//!
//! Numbers are exact: each coordinate is `[a_num, a_den, b_num, b_den]`,
//! meaning `a_num/a_den + (b_num/b_den)·√D` with `D` given once per
//! document as `radicand`. Integers may be JSON numbers or decimal strings
//! for values outside the 64-bit range.
//!
//! ```json
//! {
//!   "name": "hexagon",
//!   "radicand": 3,
//!   "directions": [
//!     { "label": "A", "coords": [[2,1,0,1], [0,1,0,1], [0,1,0,1]] },
//!     { "label": "B", "coords": [[1,1,0,1], [0,1,1,1], [0,1,0,1]] }
//!   ],
//!   "contexts": [ { "members": ["A+", "A-", "B+", "B-"], "weight": [1, 2] } ]
//! }
//! ```
//!
//! A context's `weight` defaults to `2/size`. Directions may carry an
//! informational `approx` triple of floats, ignored on input.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use qubitks_core::contextuality::{Admission, Scenario, ScenarioError};
use qubitks_core::effects::{effect_from_direction, EffectError};
use qubitks_core::exactnum::{is_square_free, FieldError, QuadNum, Rational};
use qubitks_core::geometry::{Label, Polarity, Vec3Q};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An integer of any size: a JSON number, or a string of decimal digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(n) => s.serialize_i64(n),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Small(i64),
            Text(String),
        }
        match Repr::deserialize(d).map_err(|_| {
            serde::de::Error::custom("expected an integer or a string of decimal digits")
        })? {
            Repr::Small(n) => Ok(Int(n.into())),
            Repr::Text(t) => BigInt::from_str(t.trim())
                .map(Int)
                .map_err(|_| serde::de::Error::custom(format!("{t:?} is not an integer"))),
        }
    }
}

impl From<&BigInt> for Int {
    fn from(n: &BigInt) -> Self {
        Int(n.clone())
    }
}

impl From<i64> for Int {
    fn from(n: i64) -> Self {
        Int(n.into())
    }
}

/// `[a_num, a_den, b_num, b_den]`.
pub type QuadCode = [Int; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    pub radicand: u64,
    pub directions: Vec<DirectionEntry>,
    pub contexts: Vec<ContextEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionEntry {
    pub label: String,
    pub coords: [QuadCode; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextEntry {
    pub members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<[Int; 2]>,
}

/// Whether a failure is about reading the document or about the physics it
/// describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Validation,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("syntax error at {path}: {message}")]
    Syntax { path: String, message: String },
    #[error("radicand {0} must be 1 or a square-free integer >= 2")]
    BadRadicand(u64),
    #[error("direction {label}: {message}")]
    BadDirection { label: String, message: String },
    #[error("duplicate direction label {0}")]
    DuplicateDirection(String),
    #[error("context {context}: {message}")]
    BadContext { context: usize, message: String },
    #[error("context {context} references undeclared label {label}")]
    UnknownLabel { context: usize, label: String },
    #[error(
        "effect {label} has weight {first} in context {first_context} but {second} in context {context}"
    )]
    InconsistentWeight {
        label: String,
        first_context: usize,
        first: Box<Rational>,
        context: usize,
        second: Box<Rational>,
    },
    #[error("effect {label}: {source}")]
    Effect {
        label: String,
        #[source]
        source: EffectError,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("cannot export scenario: {0}")]
    Export(String),
}

impl DocumentError {
    pub fn class(&self) -> ErrorClass {
        match self {
            DocumentError::InconsistentWeight { .. }
            | DocumentError::Effect { .. }
            | DocumentError::Scenario(ScenarioError::ContextNotRealizable { .. })
            | DocumentError::Scenario(ScenarioError::NotPositive(_)) => ErrorClass::Validation,
            _ => ErrorClass::Input,
        }
    }
}

fn rational(num: &Int, den: &Int) -> Result<Rational, FieldError> {
    Rational::new(num.0.clone(), den.0.clone())
}

fn decode(code: &QuadCode, radicand: u64) -> Result<QuadNum, FieldError> {
    let a = rational(&code[0], &code[1])?;
    let b = rational(&code[2], &code[3])?;
    if b.is_zero() {
        return Ok(QuadNum::rational(a));
    }
    QuadNum::new(a, b, radicand)
}

pub fn encode(x: &QuadNum) -> QuadCode {
    let a = x.rat_part();
    let b = x.rad_part();
    [
        a.numer().into(),
        a.denom().into(),
        b.numer().into(),
        b.denom().into(),
    ]
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses JSON text into a document, reporting the failing field path with
/// line and column.
pub fn parse_document(bytes: &[u8]) -> Result<ScenarioDocument, DocumentError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let doc = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        DocumentError::Syntax {
            path: if path == "." { "document".into() } else { path },
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| DocumentError::Syntax {
        path: "document".into(),
        message: e.to_string(),
    })?;
    Ok(doc)
}

/// Parses and validates a scenario document.
pub fn parse_scenario(bytes: &[u8], admission: Admission) -> Result<Scenario, DocumentError> {
    document_to_scenario(&parse_document(bytes)?, admission)
}

/// Resolves a document into a validated [`Scenario`].
///
/// Effects are the rays referenced by some context, ordered by direction
/// declaration and `+` before `-`. With `combinatorial_only`, a document
/// whose effects cannot all be constructed (for example a negative weight)
/// is admitted as a bare hypergraph.
pub fn document_to_scenario(
    doc: &ScenarioDocument,
    admission: Admission,
) -> Result<Scenario, DocumentError> {
    let d = doc.radicand;
    if d != 1 && !is_square_free(d) {
        return Err(DocumentError::BadRadicand(d));
    }

    let mut directions: Vec<(String, Vec3Q)> = Vec::with_capacity(doc.directions.len());
    for entry in &doc.directions {
        let bad = |message: String| DocumentError::BadDirection {
            label: entry.label.clone(),
            message,
        };
        if entry.label.is_empty() || entry.label.ends_with(['+', '-', '\u{2212}']) {
            return Err(bad("labels must be nonempty and carry no sign".into()));
        }
        if directions.iter().any(|(n, _)| *n == entry.label) {
            return Err(DocumentError::DuplicateDirection(entry.label.clone()));
        }
        let mut parts = Vec::with_capacity(3);
        for (axis, code) in ["x", "y", "z"].iter().zip(&entry.coords) {
            let value = decode(code, d).map_err(|e| bad(format!("{axis} coordinate: {e}")))?;
            parts.push(value);
        }
        let [x, y, z]: [QuadNum; 3] = parts.try_into().expect("three coordinates");
        let v = Vec3Q::new(x, y, z).map_err(|e| bad(e.to_string()))?;
        if v.is_zero() {
            return Err(bad("zero vector".into()));
        }
        directions.push((entry.label.clone(), v));
    }

    // Effective weight of every referenced ray, with the first context that
    // fixed it.
    let mut weights: BTreeMap<Label, (Rational, usize)> = BTreeMap::new();
    let mut contexts: Vec<Vec<Label>> = Vec::with_capacity(doc.contexts.len());
    for (c, entry) in doc.contexts.iter().enumerate() {
        let weight = match &entry.weight {
            Some([n, den]) => rational(n, den).map_err(|e| DocumentError::BadContext {
                context: c,
                message: format!("weight: {e}"),
            })?,
            None if entry.members.is_empty() => Rational::zero(),
            None => Rational::frac(2, entry.members.len() as i64),
        };
        let mut members = Vec::with_capacity(entry.members.len());
        for m in &entry.members {
            let label: Label = m.parse().map_err(|_| DocumentError::BadContext {
                context: c,
                message: format!(
                    "malformed member {m:?}: expected a direction label followed by + or -"
                ),
            })?;
            if !directions.iter().any(|(n, _)| *n == label.name) {
                return Err(DocumentError::UnknownLabel {
                    context: c,
                    label: label.to_string(),
                });
            }
            match weights.get(&label) {
                Some((w, first)) if *w != weight => {
                    return Err(DocumentError::InconsistentWeight {
                        label: label.to_string(),
                        first_context: *first,
                        first: Box::new(w.clone()),
                        context: c,
                        second: Box::new(weight),
                    })
                }
                Some(_) => {}
                None => {
                    weights.insert(label.clone(), (weight.clone(), c));
                }
            }
            members.push(label);
        }
        contexts.push(members);
    }

    let mut labels = Vec::new();
    let mut effects = Vec::new();
    let mut effect_error = None;
    for (name, v) in &directions {
        for polarity in [Polarity::Plus, Polarity::Minus] {
            let label = Label::new(name.as_str(), polarity);
            let Some((w, _)) = weights.get(&label) else {
                continue;
            };
            let dir = match polarity {
                Polarity::Plus => v.clone(),
                Polarity::Minus => -v,
            };
            match effect_from_direction(label.clone(), dir, w.clone()) {
                Ok(e) => effects.push(e),
                Err(source) if effect_error.is_none() => {
                    effect_error = Some(DocumentError::Effect {
                        label: label.to_string(),
                        source,
                    })
                }
                Err(_) => {}
            }
            labels.push(label);
        }
    }

    match effect_error {
        None => Ok(Scenario::from_effects(
            doc.name.clone(),
            effects,
            contexts,
            admission,
        )?),
        Some(_) if admission.combinatorial_only => {
            Ok(Scenario::combinatorial(doc.name.clone(), labels, contexts)?)
        }
        Some(err) => Err(err),
    }
}

/// Serializes a scenario that carries effects. Every context must give its
/// members one common weight, and the two rays of a direction must be
/// antipodal.
pub fn scenario_to_document(
    s: &Scenario,
    with_approx: bool,
) -> Result<ScenarioDocument, DocumentError> {
    let effects = s
        .effects()
        .ok_or_else(|| DocumentError::Export("scenario has no effect coordinates".into()))?;
    let mut directions: Vec<DirectionEntry> = Vec::new();
    let mut plus_coords: BTreeMap<String, Vec3Q> = BTreeMap::new();
    for e in effects {
        let label = e.label();
        let plus = match label.polarity {
            Polarity::Plus => e.direction().clone(),
            Polarity::Minus => -e.direction(),
        };
        match plus_coords.get(&label.name) {
            Some(existing) if *existing != plus => {
                return Err(DocumentError::Export(format!(
                    "rays of direction {} are not antipodal",
                    label.name
                )))
            }
            Some(_) => {}
            None => {
                plus_coords.insert(label.name.clone(), plus.clone());
                let [x, y, z] = plus.components();
                directions.push(DirectionEntry {
                    label: label.name.clone(),
                    coords: [encode(x), encode(y), encode(z)],
                    approx: with_approx.then(|| plus.to_f64()),
                });
            }
        }
    }

    let mut contexts = Vec::with_capacity(s.contexts().len());
    for (c, members) in s.contexts().iter().enumerate() {
        let weight = match members.first() {
            Some(&k) => {
                let w = effects[k].weight();
                if members.iter().any(|&m| effects[m].weight() != w) {
                    return Err(DocumentError::Export(format!(
                        "context {c} mixes effect weights"
                    )));
                }
                Some([w.numer().into(), w.denom().into()])
            }
            None => None,
        };
        contexts.push(ContextEntry {
            members: members.iter().map(|&k| s.labels()[k].to_string()).collect(),
            weight,
        });
    }

    Ok(ScenarioDocument {
        name: s.name().to_string(),
        radicand: s.radicand(),
        directions,
        contexts,
    })
}

pub fn to_json(doc: &ScenarioDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}
