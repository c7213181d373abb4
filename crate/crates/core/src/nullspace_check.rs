//! Desk-scale Monte Carlo verification of the null-space success conditions.
//!
//! For a measurement matrix `A` and a direction `w` with `A w = 0`, exact
//! recovery by ℓq minimization is governed by strict inequalities on `w`
//! (one per recovery notion).  This module samples random null-space
//! directions of small dense instances and measures the condition margins:
//!
//! * sectional: `Σ_{i ≤ n-k} |w_i|^q − Σ_{i > n-k} |w_i|^q > 0`
//! * strong:    `min over sign patterns b of Σ b_i |w_i|^q > 0`
//! * weak:      `Σ_{i ≤ n-k} |w_i|^q + Σ_{i > n-k} |x_i + w_i|^q
//!               − Σ_{i > n-k} |x_i|^q > 0`
//!
//! Sampling is Monte Carlo evidence, never a certificate: a report with
//! zero violations does not prove the universal condition, and the
//! `refine` flag exists to hunt counterexamples harder, not to certify.

use crate::error::{Error, Result};
use crate::inner_opt::{pow_q, Exponent};
use crate::width_bound::ThresholdKind;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Absolute tolerance for declaring `A w = 0` on a unit-norm direction.
const NULL_TOL: f64 = 1e-10;
/// Number of log-spaced perturbation scales probed per direction in the
/// weak condition (which, unlike the others, is not scale-invariant).
const WEAK_SCALE_COUNT: usize = 25;

/// A concrete `(A, x, k)` triple for null-space condition checks.
///
/// The sparse vector's nonzero block always occupies the **last** `k`
/// coordinates; the margins below rely on that layout.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    a: DMatrix<f64>,
    x_true: DVector<f64>,
    k: usize,
    m: usize,
    n: usize,
}

impl ProblemInstance {
    /// Random instance: `m x n` matrix with i.i.d. standard normal entries
    /// (row-major draw order) and a k-sparse vector whose last `k`
    /// coordinates equal 1.  Deterministic given `seed`.
    pub fn gaussian(n: usize, m: usize, k: usize, seed: u64) -> Result<Self> {
        check_dims(m, n, k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DMatrix::zeros(m, n);
        for r in 0..m {
            for c in 0..n {
                a[(r, c)] = rng.sample::<f64, _>(StandardNormal);
            }
        }
        let mut x_true = DVector::zeros(n);
        for i in n - k..n {
            x_true[i] = 1.0;
        }
        Ok(Self { a, x_true, k, m, n })
    }

    /// Wrap an explicit matrix and sparse vector.  Requires `m < n`,
    /// `1 <= k <= m`, matching shapes, and the nonzero block of `x_true`
    /// equal to exactly the last `k` coordinates.
    pub fn with_matrix(a: DMatrix<f64>, x_true: DVector<f64>, k: usize) -> Result<Self> {
        let (m, n) = (a.nrows(), a.ncols());
        check_dims(m, n, k)?;
        if x_true.len() != n {
            return Err(Error::Domain(format!(
                "x_true has length {} but the matrix has {} columns",
                x_true.len(),
                n
            )));
        }
        if !a.iter().all(|v| v.is_finite()) || !x_true.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("matrix and vector entries must be finite".into()));
        }
        for i in 0..n - k {
            if x_true[i] != 0.0 {
                return Err(Error::Domain(format!(
                    "x_true must vanish outside the last {k} coordinates, \
                     found x_true[{i}] = {}",
                    x_true[i]
                )));
            }
        }
        for i in n - k..n {
            if x_true[i] == 0.0 {
                return Err(Error::Domain(format!(
                    "x_true must be nonzero on the last {k} coordinates, \
                     found x_true[{i}] = 0"
                )));
            }
        }
        Ok(Self { a, x_true, k, m, n })
    }

    /// Wrap explicit row-major entries, pairing them with the canonical
    /// sparse vector (ones on the last `k` coordinates).  This is the
    /// explicit-matrix hook used by the CLI.
    pub fn from_rows(rows: &[Vec<f64>], k: usize) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("matrix rows must all have the same length".into()));
        }
        check_dims(m, n, k)?;
        let a = DMatrix::from_fn(m, n, |r, c| rows[r][c]);
        let mut x_true = DVector::zeros(n);
        for i in n - k..n {
            x_true[i] = 1.0;
        }
        Self::with_matrix(a, x_true, k)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn x_true(&self) -> &DVector<f64> {
        &self.x_true
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

fn check_dims(m: usize, n: usize, k: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::Domain(format!(
            "need 1 <= m < n, got m = {m}, n = {n}"
        )));
    }
    if k == 0 || k > m {
        return Err(Error::Domain(format!(
            "need 1 <= k <= m, got k = {k}, m = {m}"
        )));
    }
    Ok(())
}

/// A vector of signs with exactly `k` entries equal to -1 (the sign
/// patterns the strong condition minimizes over).
#[derive(Debug, Clone)]
pub struct SignPattern {
    signs: Vec<i8>,
}

impl SignPattern {
    pub fn new(signs: Vec<i8>, k: usize) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("sign entries must be +1 or -1".into()));
        }
        let negatives = signs.iter().filter(|&&s| s == -1).count();
        if negatives != k {
            return Err(Error::Domain(format!(
                "expected exactly {k} entries equal to -1, found {negatives}"
            )));
        }
        Ok(Self { signs })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// `Σ b_i |w_i|^q` for this pattern.
    pub fn weighted_sum(&self, w: &DVector<f64>, q: Exponent) -> f64 {
        assert_eq!(self.signs.len(), w.len(), "pattern/direction length mismatch");
        let qv = q.value();
        self.signs
            .iter()
            .zip(w.iter())
            .map(|(&b, wi)| f64::from(b) * pow_q(wi.abs(), qv))
            .sum()
    }
}

/// Outcome of a Monte Carlo condition check.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    /// Number of sampled null directions.
    pub samples: usize,
    /// Smallest margin over all sampled directions (after refinement, if
    /// requested); a positive value means no violation was found.
    pub min_margin: f64,
    /// Fraction of sampled directions with margin <= 0 (the conditions are
    /// strict inequalities, so ties count as violations).  Refinement does
    /// not change this; it only tightens `min_margin`.
    pub violation_fraction: f64,
    /// Unit-norm null direction attaining `min_margin`.
    pub worst_direction: DVector<f64>,
}

/// Orthonormal basis of the null space of `instance.a`, one basis vector
/// per column, obtained from an orthogonal factorization of the transpose.
fn null_basis(instance: &ProblemInstance) -> Result<DMatrix<f64>> {
    let (m, n) = (instance.m, instance.n);
    let qr = instance.a.transpose().qr();
    let r = qr.r();
    let scale = instance.a.norm().max(1.0);
    for i in 0..m {
        if r[(i, i)].abs() <= NULL_TOL * scale {
            return Err(Error::DegenerateInstance(format!(
                "matrix is rank deficient: the null space has dimension \
                 larger than n - m = {}",
                n - m
            )));
        }
    }
    // Rows m..n of Q^T span the orthogonal complement of the row space.
    let mut qt = DMatrix::identity(n, n);
    qr.q_tr_mul(&mut qt);
    let basis = qt.rows(m, n - m).transpose();
    for j in 0..n - m {
        let residual = (&instance.a * basis.column(j)).norm();
        if residual > NULL_TOL {
            return Err(Error::DegenerateInstance(format!(
                "null basis column {j} has residual |A b| = {residual:e}"
            )));
        }
    }
    Ok(basis)
}

/// Standard normal coefficient vector for sample `stream`, normalized onto
/// the unit sphere.  Deterministic in `(seed, stream)`.
fn unit_coefficients(dim: usize, seed: u64, stream: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut c = DVector::zeros(dim);
    for i in 0..dim {
        c[i] = rng.sample::<f64, _>(StandardNormal);
    }
    let norm = c.norm();
    if norm < 1e-12 {
        c[0] = 1.0;
        c
    } else {
        c / norm
    }
}

fn unit_direction(basis: &DMatrix<f64>, coeffs: &DVector<f64>) -> DVector<f64> {
    let w = basis * coeffs;
    let norm = w.norm();
    if norm < 1e-12 {
        basis.column(0).into_owned()
    } else {
        w / norm
    }
}

/// Draw one unit-norm null-space direction of `instance.a`, uniformly on
/// the null-space sphere.  Deterministic given `seed`.
pub fn sample_null_direction(instance: &ProblemInstance, seed: u64) -> Result<DVector<f64>> {
    let basis = null_basis(instance)?;
    let coeffs = unit_coefficients(instance.n - instance.m, seed, 0);
    Ok(unit_direction(&basis, &coeffs))
}

/// Sectional condition margin for a fixed support on the last `k`
/// coordinates: `Σ_{i <= n-k} |w_i|^q − Σ_{i > n-k} |w_i|^q`.
/// Positive means the condition holds for this direction.
pub fn sectional_margin(w: &DVector<f64>, k: usize, q: Exponent) -> f64 {
    let n = w.len();
    assert!(k <= n, "k = {k} exceeds the direction length {n}");
    let qv = q.value();
    let mut off = 0.0;
    let mut on = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let v = pow_q(wi.abs(), qv);
        if i < n - k {
            off += v;
        } else {
            on += v;
        }
    }
    off - on
}

/// Strong condition margin: the minimum of `Σ b_i |w_i|^q` over all sign
/// patterns with exactly `k` entries equal to -1, computed without
/// enumeration as `Σ |w_i|^q − 2 · (sum of the k largest |w_i|^q)`.
pub fn strong_margin(w: &DVector<f64>, k: usize, q: Exponent) -> f64 {
    let n = w.len();
    assert!(k <= n, "k = {k} exceeds the direction length {n}");
    let qv = q.value();
    let mut mags: Vec<f64> = w.iter().map(|wi| pow_q(wi.abs(), qv)).collect();
    let total: f64 = mags.iter().sum();
    mags.sort_by(|a, b| b.partial_cmp(a).expect("finite magnitudes"));
    let top_k: f64 = mags[..k].iter().sum();
    total - 2.0 * top_k
}

/// Weak condition margin for the instance's fixed sparse vector:
/// `Σ_{i <= n-k} |w_i|^q + Σ_{i > n-k} |x_i + w_i|^q − Σ_{i > n-k} |x_i|^q`.
/// Exactly zero at `w = 0`.
pub fn weak_margin(instance: &ProblemInstance, w: &DVector<f64>, q: Exponent) -> f64 {
    let (n, k) = (instance.n, instance.k);
    assert_eq!(w.len(), n, "direction length must match the instance");
    let qv = q.value();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..n - k {
        lhs += pow_q(w[i].abs(), qv);
    }
    for i in n - k..n {
        lhs += pow_q((instance.x_true[i] + w[i]).abs(), qv);
        rhs += pow_q(instance.x_true[i].abs(), qv);
    }
    lhs - rhs
}

fn weak_scales() -> impl Iterator<Item = f64> {
    (0..WEAK_SCALE_COUNT)
        .map(|j| 10f64.powf(-3.0 + 6.0 * j as f64 / (WEAK_SCALE_COUNT - 1) as f64))
}

/// Margin of one unit direction under the requested condition.  The weak
/// condition is probed at `±t·w` over log-spaced scales `t` in
/// `[1e-3, 1e3]` and the worst value is returned.
///
/// Margins below the factorization noise floor are snapped to zero:
/// coordinates that are equal in exact arithmetic (e.g. the null direction
/// of `A = [1, 1]`) can differ by an ulp after the orthogonal
/// factorization, and the resulting sign of a ~1e-16 margin is noise.
/// Ties are violations, so snapping is the conservative direction.
fn direction_margin(
    instance: &ProblemInstance,
    kind: ThresholdKind,
    q: Exponent,
    w: &DVector<f64>,
) -> f64 {
    const NOISE_FLOOR: f64 = 1e-12;
    let raw = match kind {
        ThresholdKind::Sectional => sectional_margin(w, instance.k, q),
        ThresholdKind::Strong => strong_margin(w, instance.k, q),
        ThresholdKind::Weak => {
            let mut worst = f64::INFINITY;
            for t in weak_scales() {
                for sign in [1.0, -1.0] {
                    let scaled = w * (sign * t);
                    worst = worst.min(weak_margin(instance, &scaled, q));
                }
            }
            worst
        }
    };
    if raw.abs() < NOISE_FLOOR {
        0.0
    } else {
        raw
    }
}

/// Coordinate descent on the null-space coefficients of the worst sampled
/// direction, minimizing its margin.  Returns the refined coefficients and
/// margin (never worse than the input).
fn refine_worst(
    instance: &ProblemInstance,
    kind: ThresholdKind,
    q: Exponent,
    basis: &DMatrix<f64>,
    start: &DVector<f64>,
    start_margin: f64,
) -> (DVector<f64>, f64) {
    let dim = start.len();
    let mut coeffs = start.clone();
    let mut best = start_margin;
    let mut step = 0.25;
    for _ in 0..200 {
        let mut improved = false;
        for i in 0..dim {
            for delta in [step, -step] {
                let mut trial = coeffs.clone();
                trial[i] += delta;
                if trial.norm() < 1e-9 {
                    continue;
                }
                let w = unit_direction(basis, &trial);
                let margin = direction_margin(instance, kind, q, &w);
                if margin < best - 1e-15 {
                    best = margin;
                    coeffs = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-4 {
                break;
            }
        }
    }
    (coeffs, best)
}

/// Sample `samples` null directions of the instance and measure the
/// condition margins.  Violations are samples with margin <= 0 (strict
/// inequalities; ties fail).  With `refine`, the worst direction is
/// polished by coordinate descent on its null-space coefficients to push
/// `min_margin` lower; `violation_fraction` still reflects the raw
/// samples.  Bit-for-bit deterministic given `seed`, independently of
/// thread scheduling.
pub fn verify_condition(
    instance: &ProblemInstance,
    kind: ThresholdKind,
    q: Exponent,
    samples: usize,
    refine: bool,
    seed: u64,
) -> Result<ConditionReport> {
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let basis = null_basis(instance)?;
    let dim = instance.n - instance.m;

    let margins: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let coeffs = unit_coefficients(dim, seed, i as u64);
            let w = unit_direction(&basis, &coeffs);
            direction_margin(instance, kind, q, &w)
        })
        .collect();

    let mut violations = 0usize;
    let mut worst_index = 0usize;
    let mut min_margin = f64::INFINITY;
    for (i, &margin) in margins.iter().enumerate() {
        if margin <= 0.0 {
            violations += 1;
        }
        if margin < min_margin {
            min_margin = margin;
            worst_index = i;
        }
    }

    let worst_coeffs = unit_coefficients(dim, seed, worst_index as u64);
    let mut worst_direction = unit_direction(&basis, &worst_coeffs);
    if refine {
        let (coeffs, refined) =
            refine_worst(instance, kind, q, &basis, &worst_coeffs, min_margin);
        if refined < min_margin {
            min_margin = refined;
            worst_direction = unit_direction(&basis, &coeffs);
        }
    }

    Ok(ConditionReport {
        samples,
        min_margin,
        violation_fraction: violations as f64 / samples as f64,
        worst_direction,
    })
}
