//! Width-bound objectives, dual minimization, and threshold curves.
//!
//! For sparsity ratio `beta` and exponent `q`, each recovery notion
//! (sectional / strong / weak) has a normalized mean-width bound `W(beta)`
//! obtained by minimizing, over dual parameters `(nu, gamma)`, an objective
//! of the form
//!
//! ```text
//!     sectional:  beta * I1 + (1 - beta) * I2 + gamma
//!     strong:     I1 + I2 + gamma
//!     weak:       max over the signal magnitude x~ of
//!                 min over duals of  beta * I1 + (1 - beta) * I2 + gamma
//! ```
//!
//! where `I1`, `I2` are Gaussian expectations of per-coordinate inner maxima
//! (see [`crate::inner_opt`]).  The aspect-ratio threshold is
//! `alpha(beta) = W(beta)^2`: random measurements with `m/n > alpha`
//! succeed with overwhelming probability by the escape-through-the-mesh
//! bound (see [`gordon_success_probability`]).

use crate::error::{Error, Result};
use crate::inner_opt::{minus_tie_raw, pow_q, Exponent, MinusSolver, PlusSolver};
use crate::optim::{golden_section_min, nelder_mead_2d};
use crate::special_math::{
    erfinv, half_normal_expectation, signed_normal_expectation, QuadratureSpec,
};
use rayon::prelude::*;

/// Upper edge of the dual search box in `nu`.
pub const DUAL_NU_MAX: f64 = 50.0;
/// Lower edge of the dual search box in `gamma` (strict positivity).
pub const DUAL_GAMMA_MIN: f64 = 1e-6;
/// Upper edge of the dual search box in `gamma`.
pub const DUAL_GAMMA_MAX: f64 = 5.0;

/// Which recovery notion a threshold refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    /// All signals on one fixed support.
    Sectional,
    /// All signals on all supports of the given size.
    Strong,
    /// One fixed signal.
    Weak,
}

impl ThresholdKind {
    /// Stable lowercase name used by the CLI and file outputs.
    pub fn name(self) -> &'static str {
        match self {
            ThresholdKind::Sectional => "sectional",
            ThresholdKind::Strong => "strong",
            ThresholdKind::Weak => "weak",
        }
    }
}

/// Dual pair `(nu, gamma)` with `nu >= 0` and `gamma >= 1e-6` enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualParams {
    nu: f64,
    gamma: f64,
}

impl DualParams {
    pub fn new(nu: f64, gamma: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::Domain(format!(
                "nu must be finite and nonnegative, got {nu}"
            )));
        }
        if !(gamma >= DUAL_GAMMA_MIN) || !gamma.is_finite() {
            return Err(Error::Domain(format!(
                "gamma must be finite and at least {DUAL_GAMMA_MIN}, got {gamma}"
            )));
        }
        Ok(Self { nu, gamma })
    }

    pub fn nu(self) -> f64 {
        self.nu
    }

    pub fn gamma(self) -> f64 {
        self.gamma
    }
}

/// The two Gaussian expectations entering a width-bound objective.
#[derive(Debug, Clone, Copy)]
pub struct ExpectationPair {
    pub i1: f64,
    pub i2: f64,
}

/// Magnitude quantile `c_nu = sqrt(2) * erfinv(1 - beta)` splitting the
/// strong-case expectation into the regions `|h| >= c_nu` and `|h| <= c_nu`.
#[derive(Debug, Clone, Copy)]
pub struct StrongRegionSplit {
    c_nu: f64,
}

impl StrongRegionSplit {
    pub fn from_beta(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let c_nu = std::f64::consts::SQRT_2 * erfinv(1.0 - beta)?;
        Ok(Self { c_nu })
    }

    pub fn c_nu(self) -> f64 {
        self.c_nu
    }
}

/// Common magnitude of the nonzero entries of the fixed signal in the weak
/// bound (the bound is worst-cased over this scalar).
#[derive(Debug, Clone, Copy)]
pub struct WeakSignal {
    x_mag: f64,
}

impl WeakSignal {
    pub fn new(x_mag: f64) -> Result<Self> {
        if !(x_mag >= 0.0) || !x_mag.is_finite() {
            return Err(Error::Domain(format!(
                "signal magnitude must be finite and nonnegative, got {x_mag}"
            )));
        }
        Ok(Self { x_mag })
    }

    pub fn x_mag(self) -> f64 {
        self.x_mag
    }
}

/// One computed point of a threshold curve.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub beta: f64,
    /// Aspect-ratio lower bound `min(objective^2, 1)`.
    pub alpha: f64,
    /// Minimizing dual parameters.
    pub duals: DualParams,
    /// Maximizing signal magnitude (weak kind only).
    pub x_mag: Option<f64>,
    /// The minimized width bound; `alpha = objective^2` unless clamped.
    pub objective: f64,
    /// True when the bound reached 1 and `alpha` was clamped there.  The
    /// dual point `(nu, gamma) = (0, 1/2)` always attains objective exactly
    /// 1, so the minimum never meaningfully exceeds 1: landing on it means
    /// the bound carries no information below `alpha = 1`.
    pub vacuous: bool,
}

/// Normalized Gaussian mean width (the large-`n` limit of width / sqrt(n)).
#[derive(Debug, Clone, Copy)]
pub struct MeshWidthEstimate {
    normalized_width: f64,
}

impl MeshWidthEstimate {
    pub fn new(normalized_width: f64) -> Result<Self> {
        if !(normalized_width >= 0.0) || !normalized_width.is_finite() {
            return Err(Error::Domain(format!(
                "width must be finite and nonnegative, got {normalized_width}"
            )));
        }
        Ok(Self { normalized_width })
    }

    pub fn normalized_width(self) -> f64 {
        self.normalized_width
    }

    /// Width in absolute units for an ambient dimension `n`, as consumed by
    /// [`gordon_success_probability`].
    pub fn absolute_width(self, n: usize) -> f64 {
        self.normalized_width * (n as f64).sqrt()
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "beta must lie strictly inside (0, 1), got {beta}"
        )))
    }
}

// ---------------------------------------------------------------------------
// Expectations and objectives
// ---------------------------------------------------------------------------

fn pair_sectional(nu: f64, gamma: f64, q: f64, spec: &QuadratureSpec) -> (f64, f64) {
    let plus = PlusSolver::new(nu, gamma, q);
    let i1 = half_normal_expectation(|h| plus.solve(h).1, spec);
    let minus = MinusSolver::new(nu, gamma, q);
    let spec2 = spec.with_breakpoints(&[minus_tie_raw(nu, gamma, q)]);
    let i2 = half_normal_expectation(|h| minus.solve(h).1, &spec2);
    (i1, i2)
}

fn pair_strong(nu: f64, gamma: f64, q: f64, c_nu: f64, spec: &QuadratureSpec) -> (f64, f64) {
    let plus = PlusSolver::new(nu, gamma, q);
    let spec1 = spec.with_breakpoints(&[c_nu]);
    let i1 = half_normal_expectation(|h| if h >= c_nu { plus.solve(h).1 } else { 0.0 }, &spec1);
    let minus = MinusSolver::new(nu, gamma, q);
    let spec2 = spec.with_breakpoints(&[c_nu, minus_tie_raw(nu, gamma, q)]);
    let i2 = half_normal_expectation(|h| if h <= c_nu { minus.solve(h).1 } else { 0.0 }, &spec2);
    (i1, i2)
}

fn pair_weak(nu: f64, gamma: f64, q: f64, x: f64, spec: &QuadratureSpec) -> (f64, f64) {
    let minus = MinusSolver::new(nu, gamma, q);
    let tie = minus_tie_raw(nu, gamma, q);
    let center = 2.0 * gamma * x;
    // Constant part of the integrand; the h*x term integrates to zero by
    // symmetry but is kept so the integrand is the literal inner value.
    let shift = nu * pow_q(x, q) - gamma * x * x;
    let spec1 = spec.with_breakpoints(&[center, (center - tie).abs(), center + tie]);
    let i1 = signed_normal_expectation(
        |h| minus.solve((h + center).abs()).1 - h * x + shift,
        &spec1,
    );
    let spec2 = spec.with_breakpoints(&[tie]);
    let i2 = half_normal_expectation(|h| minus.solve(h).1, &spec2);
    (i1, i2)
}

/// Expectations `I1 = E max_t (|h| t + nu t^q - gamma t^2)` and
/// `I2 = E max_t (|h| t - nu t^q - gamma t^2)` over half-normal `|h|`.
pub fn expectations_sectional(
    duals: DualParams,
    q: Exponent,
    spec: &QuadratureSpec,
) -> ExpectationPair {
    let (i1, i2) = pair_sectional(duals.nu(), duals.gamma(), q.value(), spec);
    ExpectationPair { i1, i2 }
}

/// Sectional width-bound objective `beta * I1 + (1 - beta) * I2 + gamma`.
pub fn objective_sectional(
    beta: f64,
    q: Exponent,
    duals: DualParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_beta(beta)?;
    let e = expectations_sectional(duals, q, spec);
    Ok(beta * e.i1 + (1.0 - beta) * e.i2 + duals.gamma())
}

/// Strong-case expectations: the plus expectation restricted to
/// `|h| >= c_nu` and the minus expectation restricted to `|h| <= c_nu`
/// (indicators under the full half-normal density).  The split point and
/// the minus kink are merged into the quadrature panels internally.
pub fn expectations_strong(
    duals: DualParams,
    q: Exponent,
    split: StrongRegionSplit,
    spec: &QuadratureSpec,
) -> ExpectationPair {
    let (i1, i2) = pair_strong(duals.nu(), duals.gamma(), q.value(), split.c_nu(), spec);
    ExpectationPair { i1, i2 }
}

/// Strong width-bound objective `I1 + I2 + gamma`.
pub fn objective_strong(
    beta: f64,
    q: Exponent,
    duals: DualParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let split = StrongRegionSplit::from_beta(beta)?;
    let e = expectations_strong(duals, q, split, spec);
    Ok(e.i1 + e.i2 + duals.gamma())
}

/// Weak-case expectations for a fixed signal magnitude:
/// `I1 = E max_w (h w - nu(|x~ + w|^q - x~^q) - gamma w^2)` over signed
/// normal `h`, and `I2` as in the sectional case.
pub fn expectations_weak(
    duals: DualParams,
    q: Exponent,
    signal: WeakSignal,
    spec: &QuadratureSpec,
) -> ExpectationPair {
    let (i1, i2) = pair_weak(duals.nu(), duals.gamma(), q.value(), signal.x_mag(), spec);
    ExpectationPair { i1, i2 }
}

/// Weak width-bound objective `beta * I1 + (1 - beta) * I2 + gamma` at a
/// fixed signal magnitude (the threshold maximizes this over the magnitude).
pub fn objective_weak(
    beta: f64,
    q: Exponent,
    duals: DualParams,
    signal: WeakSignal,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_beta(beta)?;
    let e = expectations_weak(duals, q, signal, spec);
    Ok(beta * e.i1 + (1.0 - beta) * e.i2 + duals.gamma())
}

/// Untyped objective used by the optimizer loops; `gamma` is clamped to the
/// mathematical domain, inputs otherwise assumed pre-validated.
fn objective_raw(
    kind: ThresholdKind,
    beta: f64,
    q: f64,
    nu: f64,
    gamma: f64,
    c_nu: f64,
    x_mag: f64,
    spec: &QuadratureSpec,
) -> f64 {
    let nu = nu.max(0.0);
    let gamma = gamma.max(DUAL_GAMMA_MIN);
    match kind {
        ThresholdKind::Sectional => {
            let (i1, i2) = pair_sectional(nu, gamma, q, spec);
            beta * i1 + (1.0 - beta) * i2 + gamma
        }
        ThresholdKind::Strong => {
            let (i1, i2) = pair_strong(nu, gamma, q, c_nu, spec);
            i1 + i2 + gamma
        }
        ThresholdKind::Weak => {
            let (i1, i2) = pair_weak(nu, gamma, q, x_mag, spec);
            beta * i1 + (1.0 - beta) * i2 + gamma
        }
    }
}

// ---------------------------------------------------------------------------
// Dual minimization
// ---------------------------------------------------------------------------

/// Coarse log-spaced pre-grid over the dual box used to seed the simplex.
const NU_GRID: [f64; 8] = [0.0, 0.05, 0.155, 0.48, 1.5, 4.65, 14.5, 45.0];
const GAMMA_GRID: [f64; 8] = [0.0015, 0.0047, 0.0148, 0.0465, 0.146, 0.458, 1.43, 4.5];
/// Analytic anchor: at nu = 0 every objective equals 1/(4 gamma) + gamma,
/// minimized to exactly 1 at gamma = 1/2.
const ANCHOR: [f64; 2] = [0.0, 0.5];
/// Objectives at or above this are treated as divergent.
const DIVERGENCE_CAP: f64 = 1e6;

fn nm_scale(p: [f64; 2]) -> [f64; 2] {
    [
        (0.15 * p[0]).max(0.25),
        (0.15 * p[1]).max(0.05),
    ]
}

/// Minimize the width-bound objective over the dual box
/// `[0, DUAL_NU_MAX] x [DUAL_GAMMA_MIN, DUAL_GAMMA_MAX]`.
///
/// Seeds a Nelder-Mead simplex from every supplied start plus the best
/// cells of a coarse log-spaced pre-grid (and the nu = 0 anchor), then
/// re-polishes from the incumbent.  The result never exceeds the objective
/// at any start.  `signal` is required for the weak kind and ignored
/// otherwise.
pub fn minimize_duals(
    kind: ThresholdKind,
    beta: f64,
    q: Exponent,
    signal: Option<WeakSignal>,
    spec: &QuadratureSpec,
    starts: &[DualParams],
) -> Result<(DualParams, f64)> {
    check_beta(beta)?;
    let x_mag = match (kind, signal) {
        (ThresholdKind::Weak, Some(sig)) => sig.x_mag(),
        (ThresholdKind::Weak, None) => {
            return Err(Error::Domain(
                "weak kind requires a signal magnitude".into(),
            ))
        }
        (_, _) => 0.0,
    };
    if starts.is_empty() {
        return Err(Error::Domain("at least one start is required".into()));
    }
    let c_nu = if kind == ThresholdKind::Strong {
        StrongRegionSplit::from_beta(beta)?.c_nu()
    } else {
        0.0
    };
    let qv = q.value();
    let obj = |p: [f64; 2]| objective_raw(kind, beta, qv, p[0], p[1], c_nu, x_mag, spec);

    let mut best_p = [starts[0].nu(), starts[0].gamma()];
    let mut best_v = f64::INFINITY;

    // Rank pre-grid cells, the anchor, and the starts.
    let mut cells: Vec<([f64; 2], f64)> = Vec::with_capacity(NU_GRID.len() * GAMMA_GRID.len() + 9);
    for &nu in NU_GRID.iter() {
        for &gamma in GAMMA_GRID.iter() {
            let p = [nu, gamma];
            cells.push((p, obj(p)));
        }
    }
    cells.push((ANCHOR, obj(ANCHOR)));
    for s in starts {
        let p = [s.nu(), s.gamma()];
        cells.push((p, obj(p)));
    }
    cells.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
    for (p, v) in cells.iter().take(1) {
        // The incumbent before any simplex runs.
        best_p = *p;
        best_v = *v;
    }

    let lo = [0.0, DUAL_GAMMA_MIN];
    let hi = [DUAL_NU_MAX, DUAL_GAMMA_MAX];
    let mut seeds: Vec<[f64; 2]> = starts.iter().map(|s| [s.nu(), s.gamma()]).collect();
    for (p, _) in cells.iter().take(3) {
        seeds.push(*p);
    }
    for seed in seeds {
        let (p, v) = nelder_mead_2d(obj, seed, nm_scale(seed), lo, hi, 250, 1e-10);
        if v < best_v {
            best_v = v;
            best_p = p;
        }
    }
    // Final tightening from the incumbent with a small simplex.
    let small = [
        (0.01 * (1.0 + best_p[0])).max(1e-3),
        (0.01 * (1.0 + best_p[1])).max(1e-4),
    ];
    let (p, v) = nelder_mead_2d(obj, best_p, small, lo, hi, 150, 1e-12);
    if v < best_v {
        best_v = v;
        best_p = p;
    }

    if !best_v.is_finite() || best_v >= DIVERGENCE_CAP {
        return Err(Error::OptimizationFailure(format!(
            "no finite dual minimum found (best {best_v:e})"
        )));
    }
    let duals = DualParams::new(best_p[0].max(0.0), best_p[1].max(DUAL_GAMMA_MIN))?;
    Ok((duals, best_v))
}

/// Cheap warm-started dual minimization used inside the weak signal scan:
/// one simplex run from the warm start, with the nu = 0 anchor as a safety
/// net in case the dual minimum jumps basins between scan cells.
fn minimize_duals_lean(
    kind: ThresholdKind,
    beta: f64,
    qv: f64,
    x_mag: f64,
    spec: &QuadratureSpec,
    warm: [f64; 2],
) -> ([f64; 2], f64) {
    let obj = |p: [f64; 2]| objective_raw(kind, beta, qv, p[0], p[1], 0.0, x_mag, spec);
    let lo = [0.0, DUAL_GAMMA_MIN];
    let hi = [DUAL_NU_MAX, DUAL_GAMMA_MAX];
    let (mut bp, mut bv) = nelder_mead_2d(obj, warm, nm_scale(warm), lo, hi, 130, 1e-9);
    let anchor_v = obj(ANCHOR);
    if anchor_v < bv - 1e-3 {
        // The warm basin lost to the analytic anchor; restart from there.
        let (p, v) = nelder_mead_2d(obj, ANCHOR, nm_scale(ANCHOR), lo, hi, 130, 1e-9);
        if v < bv {
            bp = p;
            bv = v;
        }
    }
    if anchor_v < bv {
        bp = ANCHOR;
        bv = anchor_v;
    }
    (bp, bv)
}

// ---------------------------------------------------------------------------
// Threshold curves
// ---------------------------------------------------------------------------

/// Scan step for the weak signal magnitude.
const WEAK_X_STEP: f64 = 0.25;
/// Initial scan ceiling; extended while the maximum sits on the boundary.
const WEAK_X_SOFT_MAX: f64 = 12.0;
/// Hard ceiling of the scan (the bound flattens far earlier).
const WEAK_X_HARD_MAX: f64 = 24.0;

fn default_starts() -> Vec<DualParams> {
    vec![DualParams::new(1.0, 0.3).expect("valid default start")]
}

/// Half-resolution copy of `spec` used while ranking weak scan cells.
fn scan_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec::new(
        (spec.node_count() / 2).max(256),
        spec.truncation(),
        spec.breakpoints().to_vec(),
    )
    .unwrap_or_else(|_| spec.clone())
}

fn finish_point(
    beta: f64,
    duals: DualParams,
    width: f64,
    x_mag: Option<f64>,
) -> CurvePoint {
    let raw = width * width;
    // The anchor (nu, gamma) = (0, 1/2) pins the dual minimum at exactly 1,
    // so "raw >= 1 up to optimizer noise" is the vacuous regime.
    let vacuous = raw >= 1.0 - 1e-9;
    CurvePoint {
        beta,
        alpha: if vacuous { 1.0 } else { raw },
        duals,
        x_mag,
        objective: width,
        vacuous,
    }
}

/// Threshold point for one sparsity ratio: minimizes the dual objective
/// (maximizing over the signal magnitude first for the weak kind) and
/// squares the width bound.  `alpha` is clamped to 1 and flagged vacuous
/// when the bound exceeds 1.
pub fn alpha_for_beta(
    kind: ThresholdKind,
    beta: f64,
    q: Exponent,
    spec: &QuadratureSpec,
) -> Result<CurvePoint> {
    check_beta(beta)?;
    match kind {
        ThresholdKind::Sectional | ThresholdKind::Strong => {
            let (duals, width) = minimize_duals(kind, beta, q, None, spec, &default_starts())?;
            Ok(finish_point(beta, duals, width, None))
        }
        ThresholdKind::Weak => {
            let qv = q.value();
            let coarse = scan_spec(spec);
            // Seed the scan at x~ = 0 with the full minimizer.
            let (d0, w0) =
                minimize_duals(kind, beta, q, Some(WeakSignal::new(0.0)?), &coarse, &default_starts())?;
            let mut warm = [d0.nu(), d0.gamma()];
            let (mut best_x, mut best_w, mut best_p) = (0.0, w0, warm);
            let mut scan_max = WEAK_X_SOFT_MAX;
            let mut x = WEAK_X_STEP;
            while x <= scan_max + 1e-9 {
                let (p, w) = minimize_duals_lean(kind, beta, qv, x, &coarse, warm);
                warm = p;
                if w > best_w {
                    best_w = w;
                    best_x = x;
                    best_p = p;
                }
                if x + WEAK_X_STEP > scan_max + 1e-9
                    && best_x >= scan_max - 0.5 * WEAK_X_STEP
                    && scan_max < WEAK_X_HARD_MAX
                {
                    scan_max = (scan_max + 6.0).min(WEAK_X_HARD_MAX);
                }
                x += WEAK_X_STEP;
            }
            // Golden refinement around the best cell, on the full spec.
            let lo = (best_x - WEAK_X_STEP).max(0.0);
            let hi = (best_x + WEAK_X_STEP).min(WEAK_X_HARD_MAX);
            let mut warm2 = best_p;
            let (x_ref, neg_w) = golden_section_min(
                |xx| {
                    let (p, w) = minimize_duals_lean(kind, beta, qv, xx, spec, warm2);
                    warm2 = p;
                    -w
                },
                lo,
                hi,
                28,
            );
            let (x_star, seed) = if -neg_w >= best_w {
                (x_ref, warm2)
            } else {
                (best_x, best_p)
            };
            let start = DualParams::new(seed[0].max(0.0), seed[1].max(DUAL_GAMMA_MIN))?;
            let sig = WeakSignal::new(x_star)?;
            let (duals, width) = minimize_duals(kind, beta, q, Some(sig), spec, &[start])?;
            Ok(finish_point(beta, duals, width, Some(x_star)))
        }
    }
}

/// Invert the threshold curve: find `beta` with
/// `alpha_for_beta(beta).alpha` within 1e-4 of the requested `alpha`, by
/// bisection on the (nondecreasing) curve over `beta in [1e-3, 0.999]`.
pub fn beta_for_alpha(
    kind: ThresholdKind,
    alpha: f64,
    q: Exponent,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    const TOL: f64 = 1e-4;
    let mut lo = 1e-3;
    let mut hi = 0.999;
    let eval = |b: f64| -> Result<f64> { Ok(alpha_for_beta(kind, b, q, spec)?.alpha) };
    // Verify the curve is nondecreasing across the bracket before bisecting.
    let a_lo = eval(lo)?;
    let a_mid = eval(0.5 * (lo + hi))?;
    let a_hi = eval(hi)?;
    if a_mid < a_lo - TOL || a_hi < a_mid - TOL {
        return Err(Error::Range(format!(
            "curve not nondecreasing on the bracket: alpha({lo}) = {a_lo}, \
             alpha(mid) = {a_mid}, alpha({hi}) = {a_hi}"
        )));
    }
    if alpha < a_lo - TOL {
        return Err(Error::Range(format!(
            "requested alpha {alpha} below the curve start {a_lo}"
        )));
    }
    if alpha > a_hi + TOL {
        return Err(Error::Range(format!(
            "requested alpha {alpha} above the curve end {a_hi}"
        )));
    }
    let mut best = (0.5 * (lo + hi), f64::INFINITY);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let a = eval(mid)?;
        let err = (a - alpha).abs();
        if err < best.1 {
            best = (mid, err);
        }
        if err <= TOL || hi - lo < 1e-9 {
            break;
        }
        if a < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.1 <= 10.0 * TOL {
        Ok(best.0)
    } else {
        Err(Error::OptimizationFailure(format!(
            "bisection stalled at |alpha error| = {:.2e}",
            best.1
        )))
    }
}

/// Threshold curve over a strictly increasing grid of sparsity ratios.
/// Per-point failures are reported per point without aborting the sweep;
/// points are computed in parallel and returned in grid order.
pub fn curve(
    kind: ThresholdKind,
    q: Exponent,
    beta_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<(f64, Result<CurvePoint>)>> {
    for b in beta_grid {
        check_beta(*b)?;
    }
    for w in beta_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Domain(format!(
                "beta grid must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(beta_grid
        .par_iter()
        .map(|&b| (b, alpha_for_beta(kind, b, q, spec)))
        .collect())
}

// ---------------------------------------------------------------------------
// Closed forms and the escape bound
// ---------------------------------------------------------------------------

/// Closed-form sectional threshold at q = 0:
/// `alpha = 2 beta + (1 - beta) * (2/sqrt(pi)) * z * exp(-z^2)` with
/// `z = erfinv((1 - 2 beta) / (1 - beta))`, valid for `beta in (0, 1/2]`.
///
/// Derivation sketch: at q = 0 the inner maxima are `h^2/(4 gamma) + nu`
/// (plus) and `(h^2/(4 gamma) - nu)_+` (minus), so with `s = 4 nu gamma` the
/// squared objective becomes `beta (1 + s) + (1 - beta) E (h^2 - s)_+`,
/// minimized at `erfc(z) = beta / (1 - beta)` with `s = 2 z^2`; collapsing
/// the Gaussian partial moments leaves the expression above.  It saturates
/// at exactly 1 when `beta = 1/2`.
pub fn sectional_alpha_q0(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::Domain(format!(
            "closed form requires 0 < beta <= 1/2, got {beta}"
        )));
    }
    let z = erfinv((1.0 - 2.0 * beta) / (1.0 - beta))?;
    Ok(2.0 * beta + (1.0 - beta) * (2.0 / std::f64::consts::PI.sqrt()) * z * (-z * z).exp())
}

/// Closed-form strong threshold at q = 0:
/// `alpha = 2 beta + (2/sqrt(pi)) * y * exp(-y^2)` with
/// `y = erfinv(1 - 2 beta)`, valid for `beta in (0, 1/2]`.
pub fn strong_alpha_q0(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::Domain(format!(
            "closed form requires 0 < beta <= 1/2, got {beta}"
        )));
    }
    let y = erfinv(1.0 - 2.0 * beta)?;
    Ok(2.0 * beta + (2.0 / std::f64::consts::PI.sqrt()) * y * (-y * y).exp())
}

/// Escape-through-the-mesh success bound: for `m` Gaussian measurements and
/// a set of absolute mean width `width` (see
/// [`MeshWidthEstimate::absolute_width`]), recovery succeeds with
/// probability at least
/// `1 - 3.5 * exp(-(sqrt(m) - 1/(4 sqrt(m)) - width)^2 / 18)`,
/// provided `width < sqrt(m) - 1/(4 sqrt(m))`.
pub fn gordon_success_probability(m: usize, width: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    if !(width >= 0.0) || !width.is_finite() {
        return Err(Error::Domain(format!(
            "width must be finite and nonnegative, got {width}"
        )));
    }
    let sm = (m as f64).sqrt();
    let margin = sm - 1.0 / (4.0 * sm) - width;
    if margin <= 0.0 {
        return Err(Error::Domain(format!(
            "width {width} must be below sqrt(m) - 1/(4 sqrt(m)) = {}",
            sm - 1.0 / (4.0 * sm)
        )));
    }
    Ok(1.0 - 3.5 * (-margin * margin / 18.0).exp())
}
