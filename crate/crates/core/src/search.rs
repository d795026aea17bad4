//! Scalar root finding, scalar maximisation and two-dimensional simplex
//! minimisation used by design calibration.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub root: f64,
    /// `f(root)`.
    pub residual: f64,
    /// Width of the final bracket.
    pub bracket_width: f64,
    pub iterations: usize,
}

pub const BRENT_MAX_ITER: usize = 200;

/// Brent's method on a bracketing interval, stopping once `|f| <= tol` or
/// the bracket is narrower than `tol`.
pub fn brent_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<RootResult>
where
    F: FnMut(f64) -> f64,
{
    brent_root_with(f, lo, hi, tol, BRENT_MAX_ITER)
}

pub fn brent_root_with<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<RootResult>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() || fa * fb > 0.0 {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if fa == 0.0 {
        return Ok(RootResult {
            root: a,
            residual: 0.0,
            bracket_width: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(RootResult {
            root: b,
            residual: 0.0,
            bracket_width: 0.0,
            iterations: 0,
        });
    }

    // b is the best estimate, c the contrapoint, so that [b, c] brackets.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=max_iter {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol {
            return Ok(RootResult {
                root: b,
                residual: fb,
                bracket_width: (c - b).abs(),
                iterations: iter,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b);
    }
    Err(Error::Convergence {
        method: "brent",
        iterations: max_iter,
    })
}

pub const GOLDEN_MAX_ITER: usize = 500;

/// Golden-section search for a maximiser of `f` on [lo, hi]. Returns
/// `(argmax, value)`. For f that is not unimodal the result is a local
/// maximiser.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::domain("interval", format!("[{lo}, {hi}] is empty")));
    }
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_MAX_ITER {
        if (b - a).abs() <= tol {
            return Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) });
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    Err(Error::Convergence {
        method: "golden-section",
        iterations: GOLDEN_MAX_ITER,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexResult {
    pub argmin: [f64; 2],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead settings for a two-dimensional search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Spread of function values across the simplex.
    pub f_tol: f64,
    /// Largest vertex distance from the best vertex.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            f_tol: 1e-12,
            x_tol: 1e-12,
            max_iter: 1000,
        }
    }
}

impl NelderMead {
    pub fn minimize<F>(&self, mut f: F, start: [f64; 2]) -> SimplexResult
    where
        F: FnMut([f64; 2]) -> f64,
    {
        let step = |x: f64| (0.05 * x.abs()).max(0.1);
        let mut simplex = [
            start,
            [start[0] + step(start[0]), start[1]],
            [start[0], start[1] + step(start[1])],
        ];
        let mut values = simplex.map(&mut f);

        for iter in 0..self.max_iter {
            let mut order = [0usize, 1, 2];
            order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
            simplex = order.map(|i| simplex[i]);
            values = order.map(|i| values[i]);

            let spread = values[2] - values[0];
            let diameter = simplex[1..]
                .iter()
                .map(|v| ((v[0] - simplex[0][0]).powi(2) + (v[1] - simplex[0][1]).powi(2)).sqrt())
                .fold(0.0, f64::max);
            if spread <= self.f_tol && diameter <= self.x_tol {
                return SimplexResult {
                    argmin: simplex[0],
                    value: values[0],
                    iterations: iter,
                    converged: true,
                };
            }

            let centroid = [
                0.5 * (simplex[0][0] + simplex[1][0]),
                0.5 * (simplex[0][1] + simplex[1][1]),
            ];
            let along = |t: f64| {
                [
                    centroid[0] + t * (simplex[2][0] - centroid[0]),
                    centroid[1] + t * (simplex[2][1] - centroid[1]),
                ]
            };

            let reflected = along(-1.0);
            let fr = f(reflected);
            if fr < values[0] {
                let expanded = along(-2.0);
                let fe = f(expanded);
                if fe < fr {
                    simplex[2] = expanded;
                    values[2] = fe;
                } else {
                    simplex[2] = reflected;
                    values[2] = fr;
                }
                continue;
            }
            if fr < values[1] {
                simplex[2] = reflected;
                values[2] = fr;
                continue;
            }
            let (contracted, fc) = if fr < values[2] {
                let p = along(-0.5);
                let v = f(p);
                (p, v)
            } else {
                let p = along(0.5);
                let v = f(p);
                (p, v)
            };
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
                continue;
            }
            // shrink toward the best vertex
            for i in 1..3 {
                simplex[i] = [
                    simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                    simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                ];
                values[i] = f(simplex[i]);
            }
        }

        let best = (0..3).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
        SimplexResult {
            argmin: simplex[best],
            value: values[best],
            iterations: self.max_iter,
            converged: false,
        }
    }
}

/// Nelder–Mead with a single tolerance on both value spread and diameter.
pub fn nelder_mead<F>(f: F, start: [f64; 2], tol: f64) -> SimplexResult
where
    F: FnMut([f64; 2]) -> f64,
{
    NelderMead {
        f_tol: tol,
        x_tol: tol,
        ..NelderMead::default()
    }
    .minimize(f, start)
}
