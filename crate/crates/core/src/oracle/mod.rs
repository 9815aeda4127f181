//! Floating-point ground truth from random Hermitian sums.
//!
//! Samples meet the exact core at a single point: spectra are normalized into
//! `[0, 1]`, snapped to multiples of `2^-53`, and then checked exactly. The
//! tolerance applies only to the resulting verdicts.

pub mod eig;
pub mod haar;

use nalgebra::Complex;
use num_traits::Zero;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{self, horn_margin};
use crate::horncomb::{self, HornTriple};
use crate::quantile::{QuantileTriple, StepQuantile};
use crate::rational::{self, Rational};
use eig::CMatrix;

/// Default verdict tolerance for float-derived margins.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest enumeration depth accepted by [`soundness_check`].
pub const MAX_DEPTH: u32 = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraSample {
    pub n: usize,
    pub seed: u64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub residual: f64,
}

impl SpectraSample {
    /// Adds `delta` to `γ₁` and subtracts it from `γ_n`, keeping the trace.
    pub fn with_gamma_shift(&self, delta: f64) -> Self {
        let mut out = self.clone();
        let n = out.gamma.len();
        out.gamma[0] += delta;
        out.gamma[n - 1] -= delta;
        out.gamma.sort_by(|a, b| b.total_cmp(a));
        out
    }
}

/// Independent seed for item `index` of a batch.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

fn is_nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1]) && v.iter().all(|x| x.is_finite())
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { Complex::new(values[i], 0.0) } else { Complex::zero() })
}

/// Spectrum of `diag(α) + U diag(β) U*` for a Haar unitary `U` drawn from `seed`.
pub fn sample_horn_point(alpha: &[f64], beta: &[f64], seed: u64) -> Result<SpectraSample> {
    let n = alpha.len();
    if n == 0 || beta.len() != n {
        return Err(Error::Precondition("α and β must be nonempty and of equal length".into()));
    }
    if !is_nonincreasing(alpha) || !is_nonincreasing(beta) {
        return Err(Error::Precondition("α and β must be finite and nonincreasing".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar::haar_unitary(n, &mut rng);
    let c = diag(alpha) + &u * diag(beta) * u.adjoint();
    let e = eig::eig_hermitian(&c)?;
    let sample = SpectraSample {
        n,
        seed,
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        gamma: e.values,
        residual: e.residual,
    };
    check_trace(&sample)?;
    Ok(sample)
}

fn check_trace(s: &SpectraSample) -> Result<()> {
    let scale = s
        .alpha
        .iter()
        .chain(&s.beta)
        .chain(&s.gamma)
        .fold(1.0f64, |m, x| m.max(x.abs()));
    let defect = s.alpha.iter().sum::<f64>() + s.beta.iter().sum::<f64>() - s.gamma.iter().sum::<f64>();
    if defect.abs() > 1e-9 * s.n as f64 * scale {
        return Err(Error::Numerical(format!("trace identity off by {defect:e}")));
    }
    Ok(())
}

/// A sample with standard Gaussian `α`, `β` drawn from the same seed.
pub fn random_sample(n: usize, seed: u64) -> Result<SpectraSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || sorted_desc((0..n).map(|_| StandardNormal.sample(&mut rng)).collect());
    let alpha = draw();
    let beta = draw();
    let mut sample = sample_horn_point(&alpha, &beta, derive_seed(seed, 1))?;
    sample.seed = seed;
    Ok(sample)
}

/// Samples for indices `0..count`, each seeded by [`derive_seed`].
pub fn sample_batch(n: usize, master: u64, count: u64) -> Result<Vec<SpectraSample>> {
    (0..count)
        .into_par_iter()
        .map(|i| random_sample(n, derive_seed(master, i)))
        .collect()
}

/// The affine map `x ↦ scale·(x − shift)` applied to each component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Normalization {
    pub scale: f64,
    pub shift_alpha: f64,
    pub shift_beta: f64,
}

/// Dilates and translates the sample into `[0, 1]` and snaps it to exact rationals.
pub fn normalize(s: &SpectraSample) -> Result<(QuantileTriple, Normalization)> {
    let bounds = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (a_lo, a_hi) = bounds(&s.alpha);
    let (b_lo, b_hi) = bounds(&s.beta);
    let spread = (a_hi - a_lo) + (b_hi - b_lo);
    let scale = if spread > 0.0 { 1.0 / spread } else { 1.0 };
    let norm = Normalization {
        scale,
        shift_alpha: a_lo,
        shift_beta: b_lo,
    };
    let comp = |v: &[f64], shift: f64| -> Result<StepQuantile> {
        let mut atoms = v
            .iter()
            .map(|x| rational::snap_f64(scale * (x - shift)))
            .collect::<Result<Vec<Rational>>>()?;
        atoms.reverse();
        if atoms.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invariant("normalization broke the ordering".into()));
        }
        StepQuantile::from_atoms(atoms)
    };
    let q = QuantileTriple::new(
        comp(&s.alpha, a_lo)?,
        comp(&s.beta, b_lo)?,
        comp(&s.gamma, a_lo + b_lo)?,
    );
    Ok((q, norm))
}

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessReport {
    pub n: usize,
    pub seed: u64,
    pub depth: u32,
    pub min_margin: f64,
    pub witness: Option<HornTriple>,
    pub violations: usize,
    pub trace: f64,
    pub normalization: Normalization,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks every `T^m_r` margin with `m ≤ depth` against `-tol`.
pub fn soundness_check(s: &SpectraSample, depth: u32, tol: f64) -> Result<SoundnessReport> {
    if !(2..=MAX_DEPTH).contains(&depth) {
        return Err(Error::Precondition(format!("depth must lie in 2..={MAX_DEPTH}")));
    }
    let (q, normalization) = normalize(s)?;
    let mut min_margin = f64::INFINITY;
    let mut witness = None;
    let mut violations = 0;
    for m in 2..=depth {
        for r in 1..m {
            for h in horncomb::enumerate_t(m, r)?.iter() {
                let v = rational::to_f64(&horn_margin(&q, h)?.value);
                if v < -tol {
                    violations += 1;
                }
                if v < min_margin {
                    min_margin = v;
                    witness = Some(h.clone());
                }
            }
        }
    }
    Ok(SoundnessReport {
        n: s.n,
        seed: s.seed,
        depth,
        min_margin,
        witness,
        violations,
        trace: rational::to_f64(&q.trace()),
        normalization,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SudokuReport {
    pub n: usize,
    pub seed: u64,
    pub bottom_row: SpectraSample,
    pub soundness: SoundnessReport,
}

impl SudokuReport {
    pub fn passed(&self) -> bool {
        self.soundness.passed()
    }
}

/// Four random Hermitian blocks; the bottom row (column sums and total) must satisfy Horn.
pub fn sudoku_check(n: usize, seed: u64) -> Result<SudokuReport> {
    if n == 0 || n > 16 {
        return Err(Error::Precondition("Sudoku grids need 1 ≤ n ≤ 16".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<CMatrix> = (0..4).map(|_| haar::random_hermitian(n, &mut rng)).collect();
    sudoku_from_blocks(&blocks, seed)
}

/// Sudoku check on given blocks `[A11, A12, A21, A22]`.
pub fn sudoku_from_blocks(blocks: &[CMatrix], seed: u64) -> Result<SudokuReport> {
    let [a11, a12, a21, a22] = blocks else {
        return Err(Error::Precondition("need four blocks".into()));
    };
    let n = a11.nrows();
    let left = a11 + a21;
    let right = a12 + a22;
    let total = &left + &right;
    let spec = |m: &CMatrix| eig::eig_hermitian(m);
    let (l, r, t) = (spec(&left)?, spec(&right)?, spec(&total)?);
    let bottom_row = SpectraSample {
        n,
        seed,
        alpha: l.values,
        beta: r.values,
        gamma: t.values,
        residual: l.residual.max(r.residual).max(t.residual),
    };
    check_trace(&bottom_row)?;
    let depth = (n as u32).clamp(2, 5);
    let soundness = soundness_check(&bottom_row, depth, DEFAULT_TOL)?;
    Ok(SudokuReport {
        n,
        seed,
        bottom_row,
        soundness,
    })
}

/// Parameters of the limiting classical inequalities.
#[derive(Clone, Debug)]
pub enum AsymptoticKind {
    /// `-Q1(a) - Q2(b) + Q3(a+b) ≥ 0` for `a, b ≥ 0`, `a + b ≤ 1`.
    Weyl { a: Rational, b: Rational },
    /// `∫_x^1 Q1 + Q2 − Q3 ≥ 0`.
    KyFan { x: Rational },
    /// `E(Q, (S, 0, S) + μt) ≥ 0` for `S` valued in `[0, 1−μ]`.
    Lidskii { s: StepQuantile, mu: Rational },
}

/// Exact margin of one limiting inequality on an exact triple.
pub fn asymptotic_margin(q: &QuantileTriple, kind: &AsymptoticKind) -> Result<Rational> {
    let zero = rational::zero();
    match kind {
        AsymptoticKind::Weyl { a, b } => {
            let qt = QuantileTriple::dirac(a.clone(), b.clone());
            if !qt.values_within_unit() {
                return Err(Error::OutOfRange("Weyl needs a, b ≥ 0 and a + b ≤ 1".into()));
            }
            functional::energy(q, &qt, &zero)
        }
        AsymptoticKind::KyFan { x } => {
            if *x < zero || *x > rational::one() {
                return Err(Error::OutOfRange("Ky Fan needs x ∈ [0, 1]".into()));
            }
            if x.is_zero() {
                return Ok(-q.trace());
            }
            let flat = QuantileTriple::constant(zero.clone(), zero.clone(), zero);
            Ok(functional::energy(q, &flat, x)? * x - q.trace())
        }
        AsymptoticKind::Lidskii { s, mu } => {
            let qt = QuantileTriple::new(s.clone(), StepQuantile::constant(zero), s.clone());
            functional::energy(q, &qt, mu)
        }
    }
}

/// Float margins of the named inequalities on the normalized sample.
pub fn asymptotic_inequality_check(s: &SpectraSample, kinds: &[AsymptoticKind]) -> Result<Vec<f64>> {
    let (q, _) = normalize(s)?;
    kinds
        .iter()
        .map(|k| asymptotic_margin(&q, k).map(|m| rational::to_f64(&m)))
        .collect()
}
