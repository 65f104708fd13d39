//! Dense tableau simplex for `max c·x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! The slack basis is feasible, so no phase one is needed. Pricing is
//! Dantzig's largest reduced cost; any degenerate pivot switches to Bland's
//! smallest-index rule until the objective moves again, which rules out
//! cycling. The solver is generic over [`LpScalar`] so the same code runs in
//! `f64` and in exact rational arithmetic.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Reduced-cost and pivot tolerance for `f64`.
pub const F64_TOL: f64 = 1e-9;

pub trait LpScalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Strictly positive beyond the scalar's tolerance.
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_pos(&self) -> bool {
        *self > F64_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -F64_TOL
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("objective is unbounded")]
    Unbounded,
    #[error("no optimum after {0} pivots")]
    IterationLimit(usize),
    #[error("right-hand side {row} is negative")]
    InfeasibleOrigin { row: usize },
    #[error("row {row} has {got} coefficients, expected {expected}")]
    Shape {
        row: usize,
        expected: usize,
        got: usize,
    },
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub objective: T,
    pub x: Vec<T>,
    pub pivots: usize,
}

/// `max c·x` over `{x >= 0 : A x <= b}`, `b >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    objective: Vec<T>,
    rows: Vec<(Vec<T>, T)>,
}

impl<T: LpScalar> LinearProgram<T> {
    pub fn new(objective: Vec<T>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn add_le(&mut self, coeffs: Vec<T>, rhs: T) {
        self.rows.push((coeffs, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution<T>, LpError> {
        let n = self.objective.len();
        let m = self.rows.len();
        let width = n + m + 1;
        let mut tab: Vec<T> = Vec::with_capacity(m * width);
        for (r, (coeffs, rhs)) in self.rows.iter().enumerate() {
            if coeffs.len() != n {
                return Err(LpError::Shape {
                    row: r,
                    expected: n,
                    got: coeffs.len(),
                });
            }
            if rhs.is_neg() {
                return Err(LpError::InfeasibleOrigin { row: r });
            }
            tab.extend(coeffs.iter().cloned());
            for s in 0..m {
                tab.push(if s == r { T::from_f64(1.0) } else { T::zero() });
            }
            tab.push(rhs.clone());
        }
        // Reduced costs of a maximization; entering candidates are positive.
        let mut cost: Vec<T> = self.objective.clone();
        cost.extend((0..m).map(|_| T::zero()));
        let mut value = T::zero();
        let mut basis: Vec<usize> = (n..n + m).collect();

        let max_pivots = 50 * (n + m) + 1000;
        let mut bland = false;
        for pivots in 0..max_pivots {
            let entering = if bland {
                (0..n + m).find(|&j| cost[j].is_pos())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..n + m {
                    if cost[j].is_pos() && best.is_none_or(|b| cost[j] > cost[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                let mut x = vec![T::zero(); n];
                for (r, &b) in basis.iter().enumerate() {
                    if b < n {
                        x[b] = tab[r * width + n + m].clone();
                    }
                }
                return Ok(LpSolution {
                    objective: value,
                    x,
                    pivots,
                });
            };

            // Ratio test; ties leave by smallest basic index.
            let mut leave: Option<(usize, T)> = None;
            for r in 0..m {
                let a = &tab[r * width + col];
                if !a.is_pos() {
                    continue;
                }
                let ratio = tab[r * width + n + m].clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        let diff = ratio.clone() - best.clone();
                        diff.is_neg() || (!diff.is_pos() && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(LpError::Unbounded);
            };
            bland = !ratio.is_pos();

            let piv = tab[row * width + col].clone();
            for k in 0..width {
                let v = tab[row * width + k].clone() / piv.clone();
                tab[row * width + k] = v;
            }
            let pivot_row: Vec<T> = tab[row * width..(row + 1) * width].to_vec();
            for r in 0..m {
                if r == row {
                    continue;
                }
                let f = tab[r * width + col].clone();
                if is_exact_zero(&f) {
                    continue;
                }
                let base = r * width;
                for (k, pv) in pivot_row.iter().enumerate() {
                    if is_exact_zero(pv) {
                        continue;
                    }
                    let v = tab[base + k].clone() - f.clone() * pv.clone();
                    tab[base + k] = v;
                }
            }
            let f = cost[col].clone();
            for k in 0..n + m {
                let v = cost[k].clone() - f.clone() * pivot_row[k].clone();
                cost[k] = v;
            }
            value = value + f * pivot_row[n + m].clone();
            basis[row] = col;
        }
        Err(LpError::IterationLimit(max_pivots))
    }
}

fn is_exact_zero<T: LpScalar>(x: &T) -> bool {
    !x.is_pos() && !x.is_neg() && x.to_f64() == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::new(vec![3.0, 5.0]);
        lp.add_le(vec![1.0, 0.0], 4.0);
        lp.add_le(vec![0.0, 2.0], 12.0);
        lp.add_le(vec![3.0, 2.0], 18.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective - 36.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn exact_rational_solution() {
        let mut lp = LinearProgram::new(vec![rat(1, 1), rat(1, 1)]);
        lp.add_le(vec![rat(3, 1), rat(1, 1)], rat(1, 1));
        lp.add_le(vec![rat(1, 1), rat(3, 1)], rat(1, 1));
        let sol = lp.solve().unwrap();
        assert_eq!(sol.objective, rat(1, 2));
    }

    #[test]
    fn unbounded_and_bad_rhs() {
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.add_le(vec![0.0, 1.0], 1.0);
        assert_eq!(lp.solve().unwrap_err(), LpError::Unbounded);
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_le(vec![1.0], -1.0);
        assert!(matches!(lp.solve(), Err(LpError::InfeasibleOrigin { .. })));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example (converted to max form).
        let mut lp = LinearProgram::new(vec![0.75, -20.0, 0.5, -6.0]);
        lp.add_le(vec![0.25, -8.0, -1.0, 9.0], 0.0);
        lp.add_le(vec![0.5, -12.0, -0.5, 3.0], 0.0);
        lp.add_le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective - 1.25).abs() < 1e-9);
    }
}
