//! Floating-point Neumark dilation of rank-one qubit POVMs and seeded
//! sampling of measurement outcomes.
//!
//! For effects `Eᵢ = wᵢ|uᵢ⟩⟨uᵢ|` the `N×2` matrix `V` with rows `√wᵢ·⟨uᵢ|`
//! is an isometry (`V†V = Σ Eᵢ = I`), and measuring the standard basis of
//! `C^N` after `V` reproduces `tr(Eᵢρ)`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::effects::{check_completeness, Effect, EffectError, Matrix2, Povm};
use crate::geometry::{Label, Vec3Q};

/// Tolerance for algebraic identities such as `V†V = I`.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Tolerance for agreement between independent probability routes.
pub const AGREEMENT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DilationError {
    #[error("cannot build a spinor from the zero direction")]
    ZeroDirection,
    #[error("POVM is not complete: {0}")]
    Incomplete(#[from] EffectError),
    #[error("state Bloch vector has length {0}, outside the unit ball")]
    InvalidState(f64),
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// A normalized qubit ket `(c₀, c₁)` with `c₀` real and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub c0: Complex64,
    pub c1: Complex64,
}

impl Spinor {
    /// `+1` eigenstate of `n̂·σ` for a unit axis: `(cos θ/2, e^{iφ} sin θ/2)`.
    pub fn from_unit_axis(n: [f64; 3]) -> Self {
        let [x, y, z] = n;
        let z = z.clamp(-1.0, 1.0);
        let cos_half = libm::sqrt((1.0 + z) / 2.0);
        let sin_half = libm::sqrt((1.0 - z) / 2.0);
        let phase = if x == 0.0 && y == 0.0 {
            0.0
        } else {
            libm::atan2(y, x)
        };
        Spinor {
            c0: Complex64::new(cos_half, 0.0),
            c1: Complex64::from_polar(sin_half, phase),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.c0.norm_sqr() + self.c1.norm_sqr()
    }

    /// Bloch vector `⟨ψ|σ|ψ⟩`.
    pub fn bloch(&self) -> [f64; 3] {
        let cross = self.c0.conj() * self.c1;
        [
            2.0 * cross.re,
            2.0 * cross.im,
            self.c0.norm_sqr() - self.c1.norm_sqr(),
        ]
    }
}

pub fn spinor_from_direction(n: &Vec3Q) -> Result<Spinor, DilationError> {
    if n.is_zero() {
        return Err(DilationError::ZeroDirection);
    }
    let [x, y, z] = n.to_f64();
    let len = libm::sqrt(x * x + y * y + z * z);
    Ok(Spinor::from_unit_axis([x / len, y / len, z / len]))
}

/// A qubit state: a ket or a Bloch vector in the unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitState {
    Pure(Spinor),
    Bloch([f64; 3]),
}

impl QubitState {
    pub fn maximally_mixed() -> Self {
        QubitState::Bloch([0.0; 3])
    }

    /// `ρ = (I + r·σ)/2`.
    pub fn density(&self) -> Result<Matrix2, DilationError> {
        match self {
            QubitState::Pure(psi) => {
                let n = psi.norm_sq();
                if (n - 1.0).abs() > IDENTITY_TOLERANCE {
                    return Err(DilationError::InvalidState(libm::sqrt(n)));
                }
                let v = [psi.c0, psi.c1];
                Ok([
                    [v[0] * v[0].conj(), v[0] * v[1].conj()],
                    [v[1] * v[0].conj(), v[1] * v[1].conj()],
                ])
            }
            QubitState::Bloch(r) => {
                let len = libm::sqrt(r.iter().map(|c| c * c).sum::<f64>());
                if len > 1.0 + IDENTITY_TOLERANCE || !len.is_finite() {
                    return Err(DilationError::InvalidState(len));
                }
                let [x, y, z] = *r;
                Ok([
                    [
                        Complex64::new((1.0 + z) / 2.0, 0.0),
                        Complex64::new(x / 2.0, -y / 2.0),
                    ],
                    [
                        Complex64::new(x / 2.0, y / 2.0),
                        Complex64::new((1.0 - z) / 2.0, 0.0),
                    ],
                ])
            }
        }
    }
}

/// `N×2` isometry whose rows are `√wᵢ·⟨uᵢ|`, one per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    pub labels: Vec<Label>,
    pub rows: Vec<[Complex64; 2]>,
}

impl Isometry {
    /// `V†V` as a 2×2 matrix.
    pub fn gram(&self) -> Matrix2 {
        let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
        for row in &self.rows {
            for (j, gj) in g.iter_mut().enumerate() {
                for (k, gjk) in gj.iter_mut().enumerate() {
                    *gjk += row[j].conj() * row[k];
                }
            }
        }
        g
    }

    /// `max |(V†V − I)ⱼₖ|`.
    pub fn residual(&self) -> f64 {
        crate::effects::max_deviation_from_identity(&self.gram())
    }
}

/// Isometry for any list of rank-one effects that sum to the identity.
pub fn neumark_isometry_from_effects(effects: &[Effect]) -> Result<Isometry, DilationError> {
    let report = check_completeness(effects).map_err(EffectError::from)?;
    if !report.is_complete() {
        return Err(DilationError::Incomplete(EffectError::Incomplete {
            trace_residual: Box::new(report.trace_residual),
            float_residual: report.float_residual,
        }));
    }
    Ok(build_isometry(effects))
}

pub fn neumark_isometry(p: &Povm) -> Isometry {
    build_isometry(p.effects())
}

fn build_isometry(effects: &[Effect]) -> Isometry {
    let rows = effects
        .iter()
        .map(|e| {
            let u = Spinor::from_unit_axis(e.unit_axis());
            let s = libm::sqrt(e.weight().to_f64());
            [u.c0.conj() * s, u.c1.conj() * s]
        })
        .collect();
    Isometry {
        labels: effects.iter().map(|e| e.label().clone()).collect(),
        rows,
    }
}

/// Outcome probabilities in effect order.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub labels: Vec<Label>,
    pub probabilities: Vec<f64>,
}

impl Distribution {
    pub fn get(&self, label: &Label) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.probabilities[i])
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// `pᵢ = ⟨row_i|ρ|row_i⟩`, the squared amplitude of basis state `i` after
/// applying the isometry.
pub fn outcome_distribution_via(
    iso: &Isometry,
    state: &QubitState,
) -> Result<Distribution, DilationError> {
    let rho = state.density()?;
    let probabilities = iso
        .rows
        .iter()
        .map(|row| {
            let mut p = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                for k in 0..2 {
                    p += row[j] * rho[j][k] * row[k].conj();
                }
            }
            // clamp rounding noise below zero
            p.re.max(0.0)
        })
        .collect();
    Ok(Distribution {
        labels: iso.labels.clone(),
        probabilities,
    })
}

pub fn outcome_distribution(p: &Povm, state: &QubitState) -> Result<Distribution, DilationError> {
    outcome_distribution_via(&neumark_isometry(p), state)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeHistogram {
    pub labels: Vec<Label>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub seed: u64,
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one 64-bit output.
fn unit_interval(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `count` outcomes by inverse CDF over the distribution in outcome
/// order. The generator is ChaCha8 seeded with `ChaCha8Rng::seed_from_u64`,
/// so histograms are identical across platforms for equal inputs.
pub fn sample(
    p: &Povm,
    state: &QubitState,
    count: u64,
    seed: u64,
) -> Result<OutcomeHistogram, DilationError> {
    let dist = outcome_distribution(p, state)?;
    sample_distribution(&dist, count, seed)
}

pub fn sample_distribution(
    dist: &Distribution,
    count: u64,
    seed: u64,
) -> Result<OutcomeHistogram, DilationError> {
    if count == 0 {
        return Err(DilationError::NoSamples);
    }
    let mut cumulative = Vec::with_capacity(dist.probabilities.len());
    let mut acc = 0.0;
    for p in &dist.probabilities {
        acc += p;
        cumulative.push(acc);
    }
    let last_nonzero = dist
        .probabilities
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.probabilities.len()];
    for _ in 0..count {
        let u = unit_interval(&mut rng) * acc;
        let i = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(last_nonzero);
        counts[i] += 1;
    }
    Ok(OutcomeHistogram {
        labels: dist.labels.clone(),
        counts,
        total: count,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    /// Outcomes with nonzero probability, minus one.
    pub degrees_of_freedom: usize,
}

/// Pearson statistic of a histogram against the exact distribution.
/// A count on a zero-probability outcome gives an infinite statistic.
pub fn chi_square(hist: &OutcomeHistogram, dist: &Distribution) -> ChiSquare {
    let n = hist.total as f64;
    let mut statistic = 0.0;
    let mut support = 0usize;
    for (&c, &p) in hist.counts.iter().zip(&dist.probabilities) {
        if p > 0.0 {
            support += 1;
            let expected = n * p;
            let d = c as f64 - expected;
            statistic += d * d / expected;
        } else if c > 0 {
            statistic = f64::INFINITY;
        }
    }
    ChiSquare {
        statistic,
        degrees_of_freedom: support.saturating_sub(1),
    }
}
