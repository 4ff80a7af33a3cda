//! Submodular function minimization by the minimum-norm-point method
//! (Fujishige–Wolfe), specialized to integer-valued set functions.
//!
//! The iterate `x` is always a convex combination of greedy vertices of the
//! base polytope of `h(U) = g(U) - g(∅)`, so `Σ min(x_i, 0)` is a lower bound
//! on `min h`. Level sets of `x` are evaluated every major cycle and the
//! search stops as soon as the best of them is within 1 of the bound, which
//! proves optimality for integer-valued functions.

use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_GROUND};

pub const MAX_MAJOR_CYCLES: usize = 100_000;

/// Coefficients of affine-minimizer solutions at or below this are treated
/// as zero.
const COEFF_TOL: f64 = 1e-12;

/// Entries of the iterate within this distance of zero snap to zero.
const SNAP_TOL: f64 = 1e-6;

/// An integer-valued set function on subsets of `{0, .., n-1}`.
pub trait SetFunction {
    fn ground_size(&self) -> usize;
    fn eval(&self, set: Subset) -> i64;
}

impl<T: SetFunction + ?Sized> SetFunction for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }

    fn eval(&self, set: Subset) -> i64 {
        (**self).eval(set)
    }
}

/// Adapts a closure to [`SetFunction`].
pub struct FnSetFunction<F> {
    n: usize,
    f: F,
}

impl<F: Fn(Subset) -> i64> FnSetFunction<F> {
    pub fn new(n: usize, f: F) -> Self {
        assert!(n <= MAX_GROUND);
        FnSetFunction { n, f }
    }
}

impl<F: Fn(Subset) -> i64> SetFunction for FnSetFunction<F> {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, set: Subset) -> i64 {
        (self.f)(set)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SfmResult {
    pub value: i64,
    pub minimizer: Subset,
    pub major_cycles: usize,
}

/// Greedy vertex for `order`: `q[π_i] = g({π_1..π_i}) - g({π_1..π_{i-1}})`.
/// Prefix sums therefore equal `g(prefix) - g(∅)`.
pub fn greedy_base_vertex<G: SetFunction + ?Sized>(g: &G, order: &[usize]) -> Vec<i64> {
    let mut q = vec![0i64; g.ground_size()];
    let mut prefix = Subset::EMPTY;
    let mut prev = g.eval(prefix);
    for &e in order {
        prefix = prefix.with(e);
        let cur = g.eval(prefix);
        q[e] = cur - prev;
        prev = cur;
    }
    q
}

/// Indices sorted by ascending value, ties by ascending index.
fn ascending_order(x: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    order
}

/// Global minimum of a submodular `g` and one minimizer.
pub fn sfm_min<G: SetFunction + ?Sized>(g: &G) -> Result<SfmResult> {
    let order: Vec<usize> = (0..g.ground_size()).collect();
    sfm_min_from(g, &order)
}

/// As [`sfm_min`], starting from the greedy vertex of `start`.
pub fn sfm_min_from<G: SetFunction + ?Sized>(g: &G, start: &[usize]) -> Result<SfmResult> {
    let n = g.ground_size();
    assert_eq!(start.len(), n, "start must order the whole ground set");
    let base = g.eval(Subset::EMPTY);
    if n == 0 {
        return Ok(SfmResult {
            value: base,
            minimizer: Subset::EMPTY,
            major_cycles: 0,
        });
    }

    let to_f64 = |q: Vec<i64>| q.into_iter().map(|v| v as f64).collect::<Vec<f64>>();
    let mut points: Vec<Vec<f64>> = vec![to_f64(greedy_base_vertex(g, start))];
    let mut lambda = vec![1.0];
    let mut x = points[0].clone();
    let mut best = (base, Subset::EMPTY);

    for cycle in 0..MAX_MAJOR_CYCLES {
        for v in x.iter_mut() {
            if v.abs() < SNAP_TOL {
                *v = 0.0;
            }
        }
        let order = ascending_order(&x);
        let mut prefix = Subset::EMPTY;
        for &e in &order {
            prefix = prefix.with(e);
            let val = g.eval(prefix);
            if val < best.0 {
                best = (val, prefix);
            }
        }
        let lower: f64 = x.iter().map(|&v| v.min(0.0)).sum();
        if ((best.0 - base) as f64) - lower < 1.0 - 1e-7 {
            return Ok(SfmResult {
                value: best.0,
                minimizer: best.1,
                major_cycles: cycle,
            });
        }

        let q = to_f64(greedy_base_vertex(g, &order));
        let xx = dot(&x, &x);
        if xx - dot(&x, &q) <= 1e-10 * xx.max(1.0) || points.contains(&q) {
            // At the min-norm point the certificate closes exactly; reaching
            // it without closing means rounding broke the iterate.
            return Err(Error::SfmNoConvergence(cycle));
        }
        points.push(q);
        lambda.push(0.0);

        loop {
            let Some(alpha) = affine_minimizer(&points) else {
                return Err(Error::SfmNoConvergence(cycle));
            };
            if alpha.iter().all(|&a| a > COEFF_TOL) {
                lambda = alpha;
                break;
            }
            let theta = lambda
                .iter()
                .zip(&alpha)
                .filter(|(_, &a)| a <= COEFF_TOL)
                .map(|(&l, &a)| l / (l - a))
                .fold(f64::INFINITY, f64::min)
                .clamp(0.0, 1.0);
            for (l, &a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            // drop at least the point that limited the step
            let (drop, _) = lambda
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("nonempty");
            let mut keep: Vec<bool> = lambda.iter().map(|&l| l > COEFF_TOL).collect();
            keep[drop] = false;
            let mut i = 0;
            points.retain(|_| {
                i += 1;
                keep[i - 1]
            });
            let mut i = 0;
            lambda.retain(|_| {
                i += 1;
                keep[i - 1]
            });
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            if points.len() == 1 {
                lambda = vec![1.0];
                break;
            }
        }
        x = combine(&points, &lambda);
    }
    Err(Error::SfmNoConvergence(MAX_MAJOR_CYCLES))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(points: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; points[0].len()];
    for (p, &c) in points.iter().zip(coeffs) {
        for (xi, &pi) in x.iter_mut().zip(p) {
            *xi += c * pi;
        }
    }
    x
}

/// Coefficients (summing to 1) of the minimum-norm point of the affine hull
/// of `points`, from `[G 1; 1ᵀ 0][α; μ] = [0; 1]` with `G` the Gram matrix.
fn affine_minimizer(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let m = points.len();
    let dim = m + 1;
    let mut a = vec![vec![0.0; dim + 1]; dim];
    let mut scale = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            a[i][j] = dot(&points[i], &points[j]);
            scale = scale.max(a[i][j].abs());
        }
        a[i][m] = 1.0;
        a[m][i] = 1.0;
    }
    a[m][dim] = 1.0;
    // The coefficients do not depend on the scale of G, but the multiplier's
    // pivot shrinks like 1/scale, so work with G normalized to unit size.
    if scale > 0.0 {
        for row in a.iter_mut().take(m) {
            for v in row.iter_mut().take(m) {
                *v /= scale;
            }
        }
    }
    let tol = 1e-12;
    for col in 0..dim {
        let piv = (col..dim).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() <= tol {
            return None;
        }
        a.swap(col, piv);
        for r in 0..dim {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=dim {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Some((0..m).map(|i| a[i][dim] / a[i][i]).collect())
}
