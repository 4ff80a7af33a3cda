//! Exact linear programming over arbitrary-precision rationals.
//!
//! Solves `min cᵀx` subject to `Ax ≥ b`, `x ≥ 0` with `c ≥ 0`. The dual
//! `max bᵀy` subject to `Aᵀy ≤ c`, `y ≥ 0` starts feasible from its slack
//! basis, so no phase one is needed; it is solved by revised simplex with
//! Bland's rule and the primal optimum is read off the simplex multipliers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sparse constraint row `Σ coeffs · x ≥ rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, BigRational)>,
    pub rhs: BigRational,
}

#[derive(Clone, Debug, Default)]
pub struct ExactLp {
    objective: Vec<BigRational>,
    rows: Vec<LpRow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub value: BigRational,
    pub x: Vec<BigRational>,
    pub pivots: usize,
}

pub fn rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl ExactLp {
    /// Minimizes `objective · x` over `x ≥ 0`.
    pub fn new(objective: Vec<BigRational>) -> Result<Self> {
        if objective.iter().any(|c| c.is_negative()) {
            return Err(Error::Lp("objective coefficients must be nonnegative".into()));
        }
        Ok(ExactLp {
            objective,
            rows: Vec::new(),
        })
    }

    /// Minimizes `Σ x_i` over `x ≥ 0`.
    pub fn unit_cost(vars: usize) -> Self {
        ExactLp {
            objective: vec![BigRational::one(); vars],
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn rows(&self) -> &[LpRow] {
        &self.rows
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, BigRational)>, rhs: BigRational) -> Result<()> {
        if let Some(&(v, _)) = coeffs.iter().find(|(v, _)| *v >= self.vars()) {
            return Err(Error::Dimension(format!(
                "row references variable {v} of {}",
                self.vars()
            )));
        }
        self.rows.push(LpRow { coeffs, rhs });
        Ok(())
    }

    /// `Σ_{i∈vars} x_i ≥ rhs`.
    pub fn add_covering_row(&mut self, vars: impl IntoIterator<Item = usize>, rhs: i64) -> Result<()> {
        self.add_row(
            vars.into_iter().map(|v| (v, BigRational::one())).collect(),
            rational(rhs),
        )
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.vars();
        let m = self.rows.len();
        // Dual variables: y_0..y_{m-1}, then slacks t_0..t_{n-1}.
        // basis[r] is the dual variable basic in row r; binv = B^{-1}.
        let mut basis: Vec<usize> = (m..m + n).collect();
        let mut binv: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| if r == c { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        let mut beta: Vec<BigRational> = self.objective.clone();
        let mut in_basis = vec![false; m + n];
        for &b in &basis {
            in_basis[b] = true;
        }
        let dual_cost = |v: usize| -> BigRational {
            if v < m {
                self.rows[v].rhs.clone()
            } else {
                BigRational::zero()
            }
        };
        let column = |v: usize| -> Vec<(usize, BigRational)> {
            if v < m {
                self.rows[v].coeffs.clone()
            } else {
                vec![(v - m, BigRational::one())]
            }
        };

        let mut pivots = 0;
        loop {
            // π = c_B B^{-1}
            let mut pi = vec![BigRational::zero(); n];
            for (r, &b) in basis.iter().enumerate() {
                let cb = dual_cost(b);
                if !cb.is_zero() {
                    for (c, p) in pi.iter_mut().enumerate() {
                        *p += &cb * &binv[r][c];
                    }
                }
            }
            let entering = (0..m + n).find(|&v| {
                if in_basis[v] {
                    return false;
                }
                let mut reduced = dual_cost(v);
                for (i, a) in column(v) {
                    reduced -= &pi[i] * a;
                }
                reduced.is_positive()
            });
            let Some(enter) = entering else {
                let value = self
                    .objective
                    .iter()
                    .zip(&pi)
                    .fold(BigRational::zero(), |acc, (c, x)| acc + c * x);
                return Ok(LpSolution {
                    value,
                    x: pi,
                    pivots,
                });
            };

            // d = B^{-1} a_enter
            let col = column(enter);
            let d: Vec<BigRational> = (0..n)
                .map(|r| {
                    col.iter()
                        .fold(BigRational::zero(), |acc, (i, a)| acc + &binv[r][*i] * a)
                })
                .collect();
            let mut leave: Option<(usize, BigRational)> = None;
            for r in 0..n {
                if d[r].is_positive() {
                    let ratio = &beta[r] / &d[r];
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < *best || (ratio == *best && basis[r] < basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((lr, _)) = leave else {
                // dual unbounded
                return Err(Error::LpInfeasible);
            };

            let piv = d[lr].clone();
            for c in 0..n {
                binv[lr][c] = &binv[lr][c] / &piv;
            }
            beta[lr] = &beta[lr] / &piv;
            for r in 0..n {
                if r != lr && !d[r].is_zero() {
                    let f = d[r].clone();
                    for c in 0..n {
                        let delta = &f * &binv[lr][c];
                        binv[r][c] -= delta;
                    }
                    let delta = &f * &beta[lr];
                    beta[r] -= delta;
                }
            }
            in_basis[basis[lr]] = false;
            in_basis[enter] = true;
            basis[lr] = enter;
            pivots += 1;
        }
    }
}

/// Whether `x` satisfies every row and `x ≥ 0`.
pub fn satisfies(lp: &ExactLp, x: &[BigRational]) -> bool {
    x.iter().all(|v| !v.is_negative())
        && lp.rows().iter().all(|row| {
            let lhs = row
                .coeffs
                .iter()
                .fold(BigRational::zero(), |acc, (i, a)| acc + a * &x[*i]);
            lhs >= row.rhs
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn triangle_pairs_cost_three_halves() {
        let mut lp = ExactLp::unit_cost(3);
        lp.add_covering_row([1, 2], 1).unwrap();
        lp.add_covering_row([0, 2], 1).unwrap();
        lp.add_covering_row([0, 1], 1).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, frac(3, 2));
        assert_eq!(sol.x, vec![frac(1, 2); 3]);
        assert!(satisfies(&lp, &sol.x));
    }

    #[test]
    fn no_rows_costs_nothing() {
        let lp = ExactLp::unit_cost(4);
        assert_eq!(lp.solve().unwrap().value, BigRational::zero());
    }

    #[test]
    fn infeasible_row_is_detected() {
        // 0 · x >= 1
        let mut lp = ExactLp::unit_cost(2);
        lp.add_row(vec![], rational(1)).unwrap();
        assert!(matches!(lp.solve(), Err(Error::LpInfeasible)));
    }

    #[test]
    fn weighted_objective() {
        // min 3a + b, a + b >= 2, a >= 1/2
        let mut lp = ExactLp::new(vec![rational(3), rational(1)]).unwrap();
        lp.add_covering_row([0, 1], 2).unwrap();
        lp.add_row(vec![(0, rational(2))], rational(1)).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.x, vec![frac(1, 2), frac(3, 2)]);
        assert_eq!(sol.value, rational(3));
    }

    #[test]
    fn negative_cost_rejected() {
        assert!(ExactLp::new(vec![rational(-1)]).is_err());
    }
}
