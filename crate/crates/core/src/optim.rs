//! Derivative-free scalar and two-dimensional minimizers.
//!
//! Small, allocation-free routines tailored to the dual search: a golden
//! section scan for one-dimensional refinements and a Nelder-Mead simplex
//! for the (nu, gamma) plane with box clamping.

/// 1/phi, the golden-section interior ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal function on `[a, b]`.
/// Returns the best probed point and its value after `iters` shrinks.
pub(crate) fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    iters: usize,
) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Nelder-Mead minimization in two dimensions over the box `[lo, hi]`.
///
/// Points outside the box are evaluated at their clamped projection with a
/// quadratic penalty, which steers the simplex back inside without ever
/// feeding the objective an out-of-range argument.  Returns the best vertex
/// (clamped into the box) and its raw objective value.
pub(crate) fn nelder_mead_2d<F: FnMut([f64; 2]) -> f64>(
    mut f: F,
    start: [f64; 2],
    scale: [f64; 2],
    lo: [f64; 2],
    hi: [f64; 2],
    max_iters: usize,
    ftol: f64,
) -> ([f64; 2], f64) {
    let clamp = |p: [f64; 2]| [p[0].clamp(lo[0], hi[0]), p[1].clamp(lo[1], hi[1])];
    let mut eval = |p: [f64; 2]| {
        let c = clamp(p);
        let d0 = p[0] - c[0];
        let d1 = p[1] - c[1];
        f(c) + 1e3 * (d0 * d0 + d1 * d1)
    };

    let mut pts = [
        start,
        [start[0] + scale[0], start[1]],
        [start[0], start[1] + scale[1]],
    ];
    let mut vals = [eval(pts[0]), eval(pts[1]), eval(pts[2])];

    for _ in 0..max_iters {
        // Order the simplex: index 0 best, 2 worst.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).expect("finite objective"));
        pts = [pts[order[0]], pts[order[1]], pts[order[2]]];
        vals = [vals[order[0]], vals[order[1]], vals[order[2]]];

        if (vals[2] - vals[0]).abs() <= ftol * (1.0 + vals[0].abs()) {
            break;
        }

        let centroid = [
            0.5 * (pts[0][0] + pts[1][0]),
            0.5 * (pts[0][1] + pts[1][1]),
        ];
        let reflect = [
            centroid[0] + (centroid[0] - pts[2][0]),
            centroid[1] + (centroid[1] - pts[2][1]),
        ];
        let fr = eval(reflect);

        if fr < vals[0] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - pts[2][0]),
                centroid[1] + 2.0 * (centroid[1] - pts[2][1]),
            ];
            let fe = eval(expand);
            if fe < fr {
                pts[2] = expand;
                vals[2] = fe;
            } else {
                pts[2] = reflect;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = reflect;
            vals[2] = fr;
        } else {
            // Contract toward the better of the reflected/worst points.
            let (anchor, fa) = if fr < vals[2] {
                (reflect, fr)
            } else {
                (pts[2], vals[2])
            };
            let contract = [
                centroid[0] + 0.5 * (anchor[0] - centroid[0]),
                centroid[1] + 0.5 * (anchor[1] - centroid[1]),
            ];
            let fc = eval(contract);
            if fc < fa {
                pts[2] = contract;
                vals[2] = fc;
            } else {
                // Shrink toward the best vertex.
                for i in 1..3 {
                    pts[i] = [
                        pts[0][0] + 0.5 * (pts[i][0] - pts[0][0]),
                        pts[0][1] + 0.5 * (pts[i][1] - pts[0][1]),
                    ];
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..3 {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    (clamp(pts[best]), vals[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_scalar_minimum() {
        // Argmin resolution near a quadratic minimum is limited to about
        // sqrt(eps) by floating point, independent of iteration count.
        let (x, v) = golden_section_min(|x| (x - 1.3).powi(2) + 0.25, 0.0, 4.0, 60);
        assert!((x - 1.3).abs() <= 1e-6);
        assert!((v - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let f = |p: [f64; 2]| (p[0] - 2.0).powi(2) + 3.0 * (p[1] - 0.7).powi(2) + 5.0;
        let (p, v) = nelder_mead_2d(f, [0.1, 0.1], [0.5, 0.5], [0.0, 0.0], [10.0, 10.0], 300, 1e-12);
        assert!((p[0] - 2.0).abs() <= 1e-5, "p = {p:?}");
        assert!((p[1] - 0.7).abs() <= 1e-5, "p = {p:?}");
        assert!((v - 5.0).abs() <= 1e-9);
    }

    #[test]
    fn nelder_mead_respects_the_box() {
        // Unconstrained minimum at (-1, -1); box forces (0, 0.5).
        let f = |p: [f64; 2]| (p[0] + 1.0).powi(2) + (p[1] + 1.0).powi(2);
        let (p, _) = nelder_mead_2d(f, [2.0, 2.0], [0.5, 0.5], [0.0, 0.5], [5.0, 5.0], 300, 1e-12);
        assert!(p[0] >= 0.0 && p[1] >= 0.5);
        assert!(p[0] <= 1e-4 && (p[1] - 0.5).abs() <= 1e-4, "p = {p:?}");
    }
}
