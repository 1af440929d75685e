//! Rank-one qubit effects in exact Bloch form and the POVMs built from them.
//!
//! An effect `E = w·|n=+1⟩⟨n=+1|` is stored as `(w, n, n·n)` with `n` left
//! unnormalized, so `E = (w/2)(I + n̂·σ)` with `n̂ = n/|n|`. Sums of effects
//! are checked per class of equal `n·n`, where the common factor `1/|n|`
//! drops out and everything stays in the coordinate field.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::exactnum::{FieldError, QuadNum, Rational};
use crate::geometry::{CubeSubset, Label, Vec3Q, VertexSet};

/// Default tolerance for the floating completeness fallback.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// A 2×2 complex matrix, row-major.
pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EffectError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("effect {0} has a zero direction")]
    ZeroDirection(Label),
    #[error("effect {label} has weight {weight}, outside (0, 1]")]
    WeightOutOfRange { label: Label, weight: Rational },
    #[error("effect {0} is not positive semidefinite")]
    NotPositive(Label),
    #[error("label {0} appears twice in one measurement")]
    DuplicateLabel(Label),
    #[error("effects do not sum to the identity (trace residual {trace_residual}, matrix residual {float_residual:.3e})")]
    Incomplete {
        trace_residual: Box<QuadNum>,
        float_residual: f64,
    },
    #[error("{0}")]
    InvalidCube(&'static str),
    #[error("state Bloch vector has length {0}, outside the unit ball")]
    StateOutsideBall(f64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Effect {
    label: Label,
    weight: Rational,
    direction: Vec3Q,
    norm_sq: QuadNum,
}

impl Effect {
    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn direction(&self) -> &Vec3Q {
        &self.direction
    }

    pub fn norm_sq(&self) -> &QuadNum {
        &self.norm_sq
    }

    /// Operator trace, equal to the weight.
    pub fn trace(&self) -> &Rational {
        &self.weight
    }

    /// Builds an effect without range checks; only for exercising
    /// [`check_psd`] on operators the public constructor refuses.
    #[doc(hidden)]
    pub fn from_parts_unchecked(label: Label, weight: Rational, direction: Vec3Q) -> Self {
        let norm_sq = direction.norm_sq();
        Effect {
            label,
            weight,
            direction,
            norm_sq,
        }
    }

    /// Unit Bloch axis in floating point.
    pub fn unit_axis(&self) -> [f64; 3] {
        let [x, y, z] = self.direction.to_f64();
        let len = libm::sqrt(self.norm_sq.to_f64());
        [x / len, y / len, z / len]
    }

    /// The operator `(w/2)(I + n̂·σ)` as a complex matrix.
    pub fn matrix(&self) -> Matrix2 {
        let h = self.weight.to_f64() / 2.0;
        let [nx, ny, nz] = self.unit_axis();
        [
            [
                Complex64::new(h * (1.0 + nz), 0.0),
                Complex64::new(h * nx, -h * ny),
            ],
            [
                Complex64::new(h * nx, h * ny),
                Complex64::new(h * (1.0 - nz), 0.0),
            ],
        ]
    }
}

/// `w·|n=+1⟩⟨n=+1|` with the direction kept exact and unnormalized.
pub fn effect_from_direction(
    label: Label,
    dir: Vec3Q,
    weight: Rational,
) -> Result<Effect, EffectError> {
    if dir.is_zero() {
        return Err(EffectError::ZeroDirection(label));
    }
    if weight.signum() <= 0 || weight > Rational::one() {
        return Err(EffectError::WeightOutOfRange { label, weight });
    }
    Ok(Effect::from_parts_unchecked(label, weight, dir))
}

/// Exact positivity test on the Bloch form `α·I + v·σ` with `α = w/2` and
/// `v = α·n̂`: requires `α ≥ 0` and `α² − v·v ≥ 0`, evaluated as
/// `α²·(n·n) − (α·n)·(α·n)` so no square root is needed.
pub fn check_psd(e: &Effect) -> bool {
    let alpha = e.weight.mul(&Rational::frac(1, 2));
    if alpha.signum() < 0 {
        return false;
    }
    let scaled = e.direction.scale(&alpha);
    let Ok(vv) = scaled.dot(&scaled) else {
        return false;
    };
    let lhs = e.norm_sq.scale(&alpha.square());
    lhs.try_sub(&vv).map(|d| d.sign() >= 0).unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletenessStatus {
    /// Zero symbolic residual.
    Exact,
    /// Exact per-class test failed, floating sum within tolerance.
    NumericOnly,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub status: CompletenessStatus,
    /// `Σ wᵢ − 2`.
    pub trace_residual: QuadNum,
    /// `(n·n, Σ wᵢ·nᵢ)` for each class of equal squared length, in order of
    /// first appearance.
    pub bloch_residuals: Vec<(QuadNum, Vec3Q)>,
    /// Largest entry of `|Σ Eᵢ − I|`.
    pub float_residual: f64,
}

impl CompletenessReport {
    pub fn is_complete(&self) -> bool {
        self.status != CompletenessStatus::Failed
    }
}

pub fn check_completeness(effects: &[Effect]) -> Result<CompletenessReport, FieldError> {
    check_completeness_with_tolerance(effects, DEFAULT_TOLERANCE)
}

pub fn check_completeness_with_tolerance(
    effects: &[Effect],
    tolerance: f64,
) -> Result<CompletenessReport, FieldError> {
    let total = effects
        .iter()
        .fold(Rational::zero(), |acc, e| acc.add(&e.weight));
    let trace_residual = QuadNum::rational(total.sub(&Rational::from(2)));

    let mut classes: Vec<(QuadNum, Vec3Q)> = Vec::new();
    for e in effects {
        let term = e.direction.scale(&e.weight);
        match classes.iter_mut().find(|(n, _)| *n == e.norm_sq) {
            Some((_, sum)) => *sum = sum.try_add(&term)?,
            None => classes.push((e.norm_sq.clone(), term)),
        }
    }

    let mut sum = [[Complex64::new(0.0, 0.0); 2]; 2];
    for e in effects {
        let m = e.matrix();
        for (row, mrow) in sum.iter_mut().zip(m) {
            for (s, x) in row.iter_mut().zip(mrow) {
                *s += x;
            }
        }
    }
    let float_residual = max_deviation_from_identity(&sum);

    let open_classes = classes.iter().filter(|(_, v)| !v.is_zero()).count();
    let status = if !trace_residual.is_zero() {
        CompletenessStatus::Failed
    } else if open_classes == 0 {
        CompletenessStatus::Exact
    } else if open_classes >= 2 && float_residual < tolerance {
        // Different squared lengths carry different irrational 1/|n|
        // factors; cancellation across them is only checked numerically.
        CompletenessStatus::NumericOnly
    } else {
        CompletenessStatus::Failed
    };

    Ok(CompletenessReport {
        status,
        trace_residual,
        bloch_residuals: classes,
        float_residual,
    })
}

pub(crate) fn max_deviation_from_identity(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((x - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Born rule `tr(E·ρ) = (w/2)(1 + n̂·r)` for the state with Bloch vector `r`.
pub fn born_probability(state_bloch: [f64; 3], e: &Effect) -> Result<f64, EffectError> {
    let len = libm::sqrt(state_bloch.iter().map(|c| c * c).sum::<f64>());
    if len > 1.0 + 1e-12 {
        return Err(EffectError::StateOutsideBall(len));
    }
    let n = e.unit_axis();
    let proj: f64 = n.iter().zip(state_bloch).map(|(a, b)| a * b).sum();
    Ok(e.weight.to_f64() / 2.0 * (1.0 + proj))
}

/// A validated measurement: distinct labels, positive effects, and a sum
/// equal to the identity (exactly or numerically).
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<Effect>,
    completeness: CompletenessReport,
}

impl Povm {
    pub fn new(effects: Vec<Effect>) -> Result<Self, EffectError> {
        Self::with_tolerance(effects, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(effects: Vec<Effect>, tolerance: f64) -> Result<Self, EffectError> {
        for (i, e) in effects.iter().enumerate() {
            if effects[..i].iter().any(|f| f.label == e.label) {
                return Err(EffectError::DuplicateLabel(e.label.clone()));
            }
            if !check_psd(e) {
                return Err(EffectError::NotPositive(e.label.clone()));
            }
        }
        let completeness = check_completeness_with_tolerance(&effects, tolerance)?;
        if !completeness.is_complete() {
            return Err(EffectError::Incomplete {
                trace_residual: Box::new(completeness.trace_residual),
                float_residual: completeness.float_residual,
            });
        }
        Ok(Povm {
            effects,
            completeness,
        })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn completeness(&self) -> &CompletenessReport {
        &self.completeness
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.effects.iter().map(|e| &e.label)
    }
}

/// The POVM on both rays of each named antipodal pair, every effect with
/// weight `2/N` for `N` outcomes.
pub fn antipodal_povm(vs: &VertexSet, names: &[&str]) -> Result<Povm, EffectError> {
    let n = i64::try_from(names.len() * 2).expect("small");
    let weight = Rational::frac(2, n.max(1));
    let mut effects = Vec::with_capacity(names.len() * 2);
    for name in names {
        for label in [Label::plus(*name), Label::minus(*name)] {
            let v = vs
                .get(&label)
                .ok_or(EffectError::InvalidCube("unknown direction name"))?;
            effects.push(effect_from_direction(
                label,
                v.coords.clone(),
                weight.clone(),
            )?);
        }
    }
    Povm::new(effects)
}

/// Eight effects of weight ¼, one per vertex of the cube.
pub fn cube_povm(cube: &CubeSubset, vs: &VertexSet) -> Result<Povm, EffectError> {
    let names = cube.pair_names().each_ref().map(String::as_str);
    CubeSubset::from_names(vs, names).ok_or(EffectError::InvalidCube(
        "not an inscribed cube of this vertex set",
    ))?;
    antipodal_povm(vs, &names)
}
