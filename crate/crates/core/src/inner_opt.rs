//! Per-coordinate inner maximizations.
//!
//! Every width-bound objective in this crate reduces to expectations of
//! one-dimensional maxima of the form
//!
//! ```text
//!     max_{t >= 0}  c*t + nu*t^q - gamma*t^2      ("plus" variant)
//!     max_{t >= 0}  c*t - nu*t^q - gamma*t^2      ("minus" variant)
//! ```
//!
//! together with shifted variants over a signed coordinate.  For
//! `0 < q < 1` the stationarity condition is solved by a Newton iteration
//! whose starting point provably brackets the root from one side:
//!
//! * plus: the derivative `c + q*nu*t^(q-1) - 2*gamma*t` is strictly
//!   decreasing and convex, and is nonnegative at
//!   `t0 = max(c/(2*gamma), (q*nu/(2*gamma))^(1/(2-q)))`, so Newton ascends
//!   monotonically to the unique root;
//! * minus: the derivative is concave with its maximum at
//!   `t_min = (q*(1-q)*nu/(2*gamma))^(1/(2-q))`; when the maximum is
//!   negative the supremum sits at `t = 0`, otherwise Newton descends
//!   monotonically from `t0 = c/(2*gamma)` to the larger root, which is the
//!   interior local maximum.
//!
//! `q = 0`, `q = 1`, and `nu = 0` admit closed forms.  Throughout, `t^0` is
//! taken to be 1 for `t > 0` and 0 at `t = 0`, so the `q = 0` penalty counts
//! nonzero coordinates.

use crate::error::{Error, Result};

/// Sparsity exponent `q` in `[0, 1]`, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    /// Accepts any `q` with `0 <= q <= 1`.
    pub fn new(q: f64) -> Result<Self> {
        if q >= 0.0 && q <= 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::Domain(format!(
                "exponent must satisfy 0 <= q <= 1, got {q}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Location and value of a one-dimensional inner maximum.
///
/// For the plain variants the maximizer is the optimal `t >= 0`; for the
/// shifted variants it is the optimal signed displacement `w`.
#[derive(Debug, Clone, Copy)]
pub struct InnerSolution {
    pub maximizer: f64,
    pub value: f64,
}

/// Sign carried by the `t^q` term of the inner problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerVariant {
    Plus,
    Minus,
}

/// Newton convergence tolerance on the maximizer.
const STEP_TOL: f64 = 1e-13;
/// Iteration cap; monotone quadratic convergence needs far fewer.
const MAX_ITERS: usize = 60;

/// `t^q` under the convention `t^0 = [t != 0]`.
#[inline]
pub(crate) fn pow_q(t: f64, q: f64) -> f64 {
    if q == 0.0 {
        if t > 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        t.powf(q)
    }
}

fn validate(h: f64, nu: f64, gamma: f64) -> Result<()> {
    if !h.is_finite() {
        return Err(Error::Domain(format!("coefficient must be finite, got {h}")));
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!(
            "nu must be finite and nonnegative, got {nu}"
        )));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Unbounded(gamma));
    }
    Ok(())
}

enum PlusMode {
    /// `nu = 0`: pure quadratic, maximum at `c/(2*gamma)`.
    Quad,
    /// `q = 0`: quadratic plus a constant reward `nu` for being nonzero.
    Q0,
    /// `q = 1`: quadratic in disguise, maximum at `(c+nu)/(2*gamma)`.
    Q1,
    /// `0 < q < 1`: monotone Newton from `max(c/(2*gamma), t_floor)`.
    Newton { t_floor: f64 },
}

/// Reusable solver for `max_{t>=0} c*t + nu*t^q - gamma*t^2` at fixed
/// `(nu, gamma, q)`; the per-`c` dispatch and Newton start are precomputed
/// so the solver can sit in quadrature inner loops.
pub(crate) struct PlusSolver {
    nu: f64,
    gamma: f64,
    q: f64,
    mode: PlusMode,
}

impl PlusSolver {
    /// Caller guarantees `nu >= 0`, `gamma > 0`, `0 <= q <= 1`.
    pub(crate) fn new(nu: f64, gamma: f64, q: f64) -> Self {
        let mode = if nu == 0.0 {
            PlusMode::Quad
        } else if q == 0.0 {
            PlusMode::Q0
        } else if q == 1.0 {
            PlusMode::Q1
        } else {
            PlusMode::Newton {
                t_floor: (q * nu / (2.0 * gamma)).powf(1.0 / (2.0 - q)),
            }
        };
        Self { nu, gamma, q, mode }
    }

    /// Maximizer and value for coefficient `c >= 0`.
    pub(crate) fn solve(&self, c: f64) -> (f64, f64) {
        match self.mode {
            PlusMode::Quad => {
                let t = c / (2.0 * self.gamma);
                (t, 0.5 * c * t)
            }
            PlusMode::Q0 => {
                // Supremum value c^2/(4*gamma) + nu; at c = 0 it is the
                // t -> 0+ limit and we report maximizer 0.
                let t = c / (2.0 * self.gamma);
                (t, 0.5 * c * t + self.nu)
            }
            PlusMode::Q1 => {
                let t = (c + self.nu) / (2.0 * self.gamma);
                (t, 0.5 * (c + self.nu) * t)
            }
            PlusMode::Newton { t_floor } => {
                let (nu, gamma, q) = (self.nu, self.gamma, self.q);
                let mut t = (c / (2.0 * gamma)).max(t_floor);
                for _ in 0..MAX_ITERS {
                    let tq1 = t.powf(q - 1.0);
                    let gp = c + q * nu * tq1 - 2.0 * gamma * t;
                    let gpp = q * (q - 1.0) * nu * tq1 / t - 2.0 * gamma;
                    let step = gp / gpp;
                    t -= step;
                    if step.abs() <= STEP_TOL * (1.0 + t) {
                        break;
                    }
                }
                (t, c * t + nu * t.powf(q) - gamma * t * t)
            }
        }
    }
}

enum MinusMode {
    Quad,
    Q0,
    Q1,
    Newton { r_min: f64, t_min: f64 },
}

/// Reusable solver for `max_{t>=0} c*t - nu*t^q - gamma*t^2` at fixed
/// `(nu, gamma, q)`.
pub(crate) struct MinusSolver {
    nu: f64,
    gamma: f64,
    q: f64,
    mode: MinusMode,
}

impl MinusSolver {
    /// Caller guarantees `nu >= 0`, `gamma > 0`, `0 <= q <= 1`.
    pub(crate) fn new(nu: f64, gamma: f64, q: f64) -> Self {
        let mode = if nu == 0.0 {
            MinusMode::Quad
        } else if q == 0.0 {
            MinusMode::Q0
        } else if q == 1.0 {
            MinusMode::Q1
        } else {
            let t_min = (q * (1.0 - q) * nu / (2.0 * gamma)).powf(1.0 / (2.0 - q));
            let r_min = q * nu * t_min.powf(q - 1.0) + 2.0 * gamma * t_min;
            MinusMode::Newton { r_min, t_min }
        };
        Self { nu, gamma, q, mode }
    }

    /// Maximizer and value for coefficient `c >= 0`.  Ties between the
    /// interior stationary point and `t = 0` resolve to the interior point.
    pub(crate) fn solve(&self, c: f64) -> (f64, f64) {
        match self.mode {
            MinusMode::Quad => {
                let t = c / (2.0 * self.gamma);
                (t, 0.5 * c * t)
            }
            MinusMode::Q0 => {
                let t = c / (2.0 * self.gamma);
                let value = 0.5 * c * t - self.nu;
                if value <= 0.0 {
                    (0.0, 0.0)
                } else {
                    (t, value)
                }
            }
            MinusMode::Q1 => {
                if c <= self.nu {
                    (0.0, 0.0)
                } else {
                    let t = (c - self.nu) / (2.0 * self.gamma);
                    (t, 0.5 * (c - self.nu) * t)
                }
            }
            MinusMode::Newton { r_min, t_min } => {
                if c <= r_min {
                    return (0.0, 0.0);
                }
                let (nu, gamma, q) = (self.nu, self.gamma, self.q);
                let mut t = c / (2.0 * gamma);
                for _ in 0..MAX_ITERS {
                    let tq1 = t.powf(q - 1.0);
                    let gp = c - q * nu * tq1 - 2.0 * gamma * t;
                    let gpp = -q * (q - 1.0) * nu * tq1 / t - 2.0 * gamma;
                    let step = gp / gpp;
                    let mut next = t - step;
                    if !(next > t_min) {
                        // Safeguard: the sought root lies in (t_min, t).
                        next = 0.5 * (t + t_min);
                    }
                    let moved = (next - t).abs();
                    t = next;
                    if moved <= STEP_TOL * (1.0 + t) {
                        break;
                    }
                }
                let value = c * t - nu * t.powf(q) - gamma * t * t;
                if value < 0.0 {
                    (0.0, 0.0)
                } else {
                    (t, value)
                }
            }
        }
    }
}

/// `max_{t >= 0} h_abs*t + nu*t^q - gamma*t^2`.
pub fn coordinate_max_plus(h_abs: f64, nu: f64, gamma: f64, q: Exponent) -> Result<InnerSolution> {
    validate(h_abs, nu, gamma)?;
    if h_abs < 0.0 {
        return Err(Error::Domain(format!(
            "plus variant takes a nonnegative coefficient, got {h_abs}"
        )));
    }
    let (maximizer, value) = PlusSolver::new(nu, gamma, q.value()).solve(h_abs);
    Ok(InnerSolution { maximizer, value })
}

/// `max_{t >= 0} h_abs*t - nu*t^q - gamma*t^2`.  The value is 0 (at `t = 0`)
/// whenever the coefficient is below the activation threshold
/// [`minus_activation_threshold`].
pub fn coordinate_max_minus(h_abs: f64, nu: f64, gamma: f64, q: Exponent) -> Result<InnerSolution> {
    validate(h_abs, nu, gamma)?;
    if h_abs < 0.0 {
        return Err(Error::Domain(format!(
            "minus variant takes a nonnegative coefficient, got {h_abs}"
        )));
    }
    let (maximizer, value) = MinusSolver::new(nu, gamma, q.value()).solve(h_abs);
    Ok(InnerSolution { maximizer, value })
}

/// Coefficient `c` at which the minus-variant maximum switches from 0 to an
/// interior point: the value `max_t c*t - nu*t^q - gamma*t^2` is 0 for
/// `c <= threshold` and strictly positive beyond.  The integrands built on
/// the minus variant have a kink here, so quadrature panels must break at
/// this coefficient.
pub fn minus_activation_threshold(nu: f64, gamma: f64, q: Exponent) -> f64 {
    minus_tie_raw(nu, gamma, q.value())
}

/// Untyped version of [`minus_activation_threshold`] for internal hot paths.
pub(crate) fn minus_tie_raw(nu: f64, gamma: f64, q: f64) -> f64 {
    if nu <= 0.0 {
        0.0
    } else if q >= 1.0 {
        nu
    } else if q <= 0.0 {
        2.0 * (gamma * nu).sqrt()
    } else {
        // Simultaneous root of the value and its derivative.
        let t_tie = (nu * (1.0 - q) / gamma).powf(1.0 / (2.0 - q));
        nu * t_tie.powf(q - 1.0) + gamma * t_tie
    }
}

/// `max_{w} h*w + nu*(|x_mag + w|^q - x_mag^q) - gamma*w^2` over signed `w`,
/// for a nonnegative anchor `x_mag`.
///
/// Substituting `u = x_mag + w` reduces this to the plus variant at
/// coefficient `|h + 2*gamma*x_mag|`; the reported maximizer is the optimal
/// `w`.  The value is always `>= 0` since `w = 0` attains 0.
pub fn coordinate_max_shifted(
    h: f64,
    nu: f64,
    gamma: f64,
    q: Exponent,
    x_mag: f64,
) -> Result<InnerSolution> {
    validate(h, nu, gamma)?;
    if !(x_mag >= 0.0) || !x_mag.is_finite() {
        return Err(Error::Domain(format!(
            "x_mag must be finite and nonnegative, got {x_mag}"
        )));
    }
    let c = h + 2.0 * gamma * x_mag;
    let (t, inner) = PlusSolver::new(nu, gamma, q.value()).solve(c.abs());
    let value = inner - (h * x_mag + nu * pow_q(x_mag, q.value()) + gamma * x_mag * x_mag);
    let u = if c >= 0.0 { t } else { -t };
    finish_shifted(u - x_mag, value)
}

/// `max_{w} h*w - nu*(|x_mag + w|^q - x_mag^q) - gamma*w^2` over signed `w`,
/// for a nonnegative anchor `x_mag`.
///
/// Substituting `u = x_mag + w` reduces this to the minus variant at
/// coefficient `|h + 2*gamma*x_mag|`; the reported maximizer is the optimal
/// `w`.  The value is always `>= 0` since `w = 0` attains 0.
pub fn coordinate_max_shifted_minus(
    h: f64,
    nu: f64,
    gamma: f64,
    q: Exponent,
    x_mag: f64,
) -> Result<InnerSolution> {
    validate(h, nu, gamma)?;
    if !(x_mag >= 0.0) || !x_mag.is_finite() {
        return Err(Error::Domain(format!(
            "x_mag must be finite and nonnegative, got {x_mag}"
        )));
    }
    let c = h + 2.0 * gamma * x_mag;
    let (t, inner) = MinusSolver::new(nu, gamma, q.value()).solve(c.abs());
    let value = inner - h * x_mag + nu * pow_q(x_mag, q.value()) - gamma * x_mag * x_mag;
    let u = if c >= 0.0 { t } else { -t };
    finish_shifted(u - x_mag, value)
}

/// Clamp tiny negative round-off to the `w = 0` candidate, preserving the
/// `value >= 0` guarantee of the shifted variants.
fn finish_shifted(w: f64, value: f64) -> Result<InnerSolution> {
    if value < 0.0 {
        Ok(InnerSolution {
            maximizer: 0.0,
            value: 0.0,
        })
    } else {
        Ok(InnerSolution {
            maximizer: w,
            value,
        })
    }
}

/// Nonnegative real stationary points, in increasing order, of the
/// `q = 1/2` inner problem reparametrized by `t = sqrt(w)`:
/// the roots of `2*gamma*t^3 - h_abs*t -+ nu/2 = 0` (minus sign for the
/// plus variant, plus sign for the minus variant).
pub fn cubic_stationary_q_half(
    h_abs: f64,
    nu: f64,
    gamma: f64,
    variant: InnerVariant,
) -> Result<Vec<f64>> {
    validate(h_abs, nu, gamma)?;
    if h_abs < 0.0 {
        return Err(Error::Domain(format!(
            "cubic stationarity takes a nonnegative coefficient, got {h_abs}"
        )));
    }
    let s = match variant {
        InnerVariant::Plus => 1.0,
        InnerVariant::Minus => -1.0,
    };
    // Normalize 2*gamma*t^3 - h*t - s*nu/2 to t^3 + p*t + r.
    let p = -h_abs / (2.0 * gamma);
    let r = -s * nu / (4.0 * gamma);
    let mut roots = depressed_cubic_real_roots(p, r);
    roots.retain(|t| *t >= -1e-12);
    for t in roots.iter_mut() {
        if *t < 0.0 {
            *t = 0.0;
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10 * (1.0 + b.abs()));
    Ok(roots)
}

/// All real roots of `t^3 + p*t + r = 0` (one or three, with multiplicity
/// collapsed), via the trigonometric form when three roots exist and the
/// cancellation-safe Cardano form otherwise.
fn depressed_cubic_real_roots(p: f64, r: f64) -> Vec<f64> {
    if r == 0.0 {
        let mut roots = vec![0.0];
        if p < 0.0 {
            roots.push((-p).sqrt());
            roots.push(-(-p).sqrt());
        }
        return roots;
    }
    if p == 0.0 {
        return vec![(-r).cbrt()];
    }
    let d = 0.25 * r * r + p * p * p / 27.0;
    if d <= 0.0 {
        // Three real roots (requires p < 0): t_k = m*cos(phi_k) with
        // cos(3*phi) = -4r/m^3.
        let m = 2.0 * (-p / 3.0).sqrt();
        let m3 = m * m * m;
        let arg = (-4.0 * r / m3).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let third = 2.0 * std::f64::consts::PI / 3.0;
        vec![
            m * phi.cos(),
            m * (phi - third).cos(),
            m * (phi + third).cos(),
        ]
    } else {
        // One real root t = u - p/(3u); pick the cube root with the larger
        // magnitude to avoid cancellation.
        let sq = d.sqrt();
        let big = if -0.5 * r >= 0.0 {
            -0.5 * r + sq
        } else {
            -0.5 * r - sq
        };
        let u = big.cbrt();
        vec![u - p / (3.0 * u)]
    }
}

/// Closed-form `q = 1/2` inner maximum over `w >= 0` (value and maximizing
/// `w`), obtained by evaluating the objective at the cubic stationary
/// points and at `w = 0`.  Ties resolve to the interior candidate.
pub fn coordinate_max_q_half(
    h_abs: f64,
    nu: f64,
    gamma: f64,
    variant: InnerVariant,
) -> Result<InnerSolution> {
    let roots = cubic_stationary_q_half(h_abs, nu, gamma, variant)?;
    let s = match variant {
        InnerVariant::Plus => 1.0,
        InnerVariant::Minus => -1.0,
    };
    let mut best = InnerSolution {
        maximizer: 0.0,
        value: 0.0,
    };
    for t in roots {
        let w = t * t;
        let value = h_abs * w + s * nu * t - gamma * w * w;
        if value >= best.value {
            best = InnerSolution {
                maximizer: w,
                value,
            };
        }
    }
    Ok(best)
}

/// Closed-form `q = 0` inner maximum over `t >= 0`, counting a nonzero
/// coordinate as `nu` reward (plus) or penalty (minus).
pub fn coordinate_max_q0(
    h_abs: f64,
    nu: f64,
    gamma: f64,
    variant: InnerVariant,
) -> Result<InnerSolution> {
    validate(h_abs, nu, gamma)?;
    if h_abs < 0.0 {
        return Err(Error::Domain(format!(
            "q = 0 maximum takes a nonnegative coefficient, got {h_abs}"
        )));
    }
    let solution = match variant {
        InnerVariant::Plus => {
            let (maximizer, value) = PlusSolver::new(nu, gamma, 0.0).solve(h_abs);
            InnerSolution { maximizer, value }
        }
        InnerVariant::Minus => {
            let (maximizer, value) = MinusSolver::new(nu, gamma, 0.0).solve(h_abs);
            InnerSolution { maximizer, value }
        }
    };
    Ok(solution)
}
