//! Quasi-polynomial fits of exact counting sequences.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::counting::LeadingMonomial;
use crate::error::{Error, Result};

/// Coefficients in `n`, constant term first, trailing zeros trimmed.
pub type Poly = Vec<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiPolynomial {
    pub period: usize,
    /// `polys[r]` applies to n ≡ r (mod period).
    pub polys: Vec<Poly>,
    /// First n from which the fit reproduces the data.
    pub onset: u64,
}

/// Degree of a polynomial; `None` for the zero polynomial.
pub fn degree(p: &Poly) -> Option<usize> {
    p.len().checked_sub(1)
}

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &mut Poly, b: &Poly) {
    if a.len() < b.len() {
        a.resize(b.len(), BigRational::zero());
    }
    for (i, y) in b.iter().enumerate() {
        a[i] += y;
    }
}

pub fn eval(p: &Poly, n: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * n + c)
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl QuasiPolynomial {
    pub fn eval(&self, n: u64) -> BigRational {
        eval(
            &self.polys[(n % self.period as u64) as usize],
            &int(n as i64),
        )
    }

    pub fn degree(&self) -> Option<usize> {
        degree(&self.polys[0])
    }

    /// Leading term of the average order: degree deg Q₀, coefficient the
    /// mean over residues of the n^{deg Q₀} coefficients.
    pub fn average_order_leading(&self) -> LeadingMonomial {
        let d = self.degree().unwrap_or(0);
        let sum: BigRational = self
            .polys
            .iter()
            .map(|p| p.get(d).cloned().unwrap_or_else(BigRational::zero))
            .sum();
        LeadingMonomial::new(d as u32, sum / int(self.period as i64))
    }

    pub fn report(&self) -> serde_json::Value {
        let lead = self.average_order_leading();
        json!({
            "W": self.period,
            "onset": self.onset,
            "polys": self.polys.iter()
                .map(|p| p.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "leading": {
                "degree": lead.degree,
                "avg_coefficient": lead.coefficient.to_string(),
            },
        })
    }
}

#[derive(Debug, Clone, Serialize)]
struct ResidueFit {
    degree: usize,
    tail_start: usize,
}

/// Smallest degree whose tail (at least degree + 2 points) is exactly
/// polynomial.
fn fit_residue(values: &[BigInt], max_degree: usize) -> Option<ResidueFit> {
    let m = values.len();
    for d in 0..=max_degree {
        if m < d + 2 {
            return None;
        }
        // (d+1)-th differences; entry i depends on values[i..=i+d+1].
        let mut diff: Vec<BigInt> = values.to_vec();
        for _ in 0..=d {
            diff = diff.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        let mut s = diff.len();
        while s > 0 && diff[s - 1].is_zero() {
            s -= 1;
        }
        if m - s >= d + 2 {
            return Some(ResidueFit {
                degree: d,
                tail_start: s,
            });
        }
    }
    None
}

/// Newton interpolation of `values[start..]`, taken at n = n_start + W·k,
/// rewritten in the variable n.
fn interpolate(values: &[BigInt], n_start: u64, w: usize, degree: usize) -> Poly {
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut diff: Vec<BigInt> = values.to_vec();
    for _ in 0..=degree {
        coeffs.push(diff[0].clone());
        diff = diff.windows(2).map(|x| &x[1] - &x[0]).collect();
    }
    let w_r = int(w as i64);
    // x = (n − n_start)/W
    let x: Poly = vec![-int(n_start as i64) / &w_r, BigRational::one() / &w_r];
    let mut out: Poly = Vec::new();
    let mut basis: Poly = vec![BigRational::one()];
    for (k, c) in coeffs.iter().enumerate() {
        let term: Poly = basis
            .iter()
            .map(|b| b * BigRational::from_integer(c.clone()))
            .collect();
        poly_add(&mut out, &term);
        let mut factor = x.clone();
        factor[0] -= int(k as i64);
        basis = poly_mul(&basis, &factor);
        basis = basis.into_iter().map(|b| b / int(k as i64 + 1)).collect();
    }
    trim(out)
}

/// Fits `sequence` (contiguous in n) by the smallest period, then smallest
/// degrees, that reproduce its tail exactly.
pub fn fit(
    sequence: &BTreeMap<u64, BigInt>,
    max_period: usize,
    max_degree: usize,
) -> Result<QuasiPolynomial> {
    let keys: Vec<u64> = sequence.keys().copied().collect();
    if keys.is_empty() {
        return Err(Error::NoFit("empty sequence".into()));
    }
    if keys.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::NoFit("sequence must be contiguous in n".into()));
    }
    let mut diagnostics = Vec::new();
    for w in 1..=max_period.max(1) {
        let mut polys = Vec::with_capacity(w);
        let mut onset = keys[0];
        let mut ok = true;
        for r in 0..w {
            let ns: Vec<u64> = keys
                .iter()
                .copied()
                .filter(|n| (n % w as u64) as usize == r)
                .collect();
            let vals: Vec<BigInt> = ns.iter().map(|n| sequence[n].clone()).collect();
            match fit_residue(&vals, max_degree) {
                Some(f) => {
                    let n_start = ns[f.tail_start];
                    onset = onset.max(n_start);
                    let p = interpolate(&vals[f.tail_start..], n_start, w, f.degree);
                    polys.push(p);
                }
                None => {
                    diagnostics.push(format!(
                        "W={w}: residue {r} has no polynomial tail of degree ≤ {max_degree}"
                    ));
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        // The zero polynomial counts as a constant here.
        let deg0 = |p: &Poly| degree(p).unwrap_or(0);
        let d0 = deg0(&polys[0]);
        if let Some(bad) = (1..w).find(|&i| deg0(&polys[i]) > d0) {
            return Err(Error::NoFit(format!(
                "period {w}: residue {bad} has degree {} above residue 0's {d0}",
                deg0(&polys[bad])
            )));
        }
        let q = QuasiPolynomial {
            period: w,
            polys,
            onset,
        };
        check_integer_valued(&q)?;
        return Ok(q);
    }
    Err(Error::NoFit(diagnostics.join("; ")))
}

/// Each Q_r must take integer values along n = r + W·j for all integers j.
fn check_integer_valued(q: &QuasiPolynomial) -> Result<()> {
    for (r, p) in q.polys.iter().enumerate() {
        let d = degree(p).unwrap_or(0);
        for j in 0..=d as i64 {
            let v = eval(p, &int(r as i64 + q.period as i64 * j));
            if !v.is_integer() {
                return Err(Error::NoFit(format!(
                    "residue {r} polynomial is not integer-valued"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(f: impl Fn(u64) -> i64, range: std::ops::RangeInclusive<u64>) -> BTreeMap<u64, BigInt> {
        range.map(|n| (n, BigInt::from(f(n)))).collect()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn constant() {
        let q = fit(&seq(|_| 5, 3..=10), 4, 3).unwrap();
        assert_eq!(q.period, 1);
        assert_eq!(q.polys[0], vec![int(5)]);
        assert_eq!(q.onset, 3);
    }

    #[test]
    fn alternating() {
        let q = fit(&seq(|n| (n % 2) as i64, 0..=9), 4, 2).unwrap();
        assert_eq!(q.period, 2);
        assert!(q.polys[0].is_empty());
        assert_eq!(q.polys[1], vec![int(1)]);
        assert!(fit(&seq(|n| (n % 2) as i64, 0..=9), 1, 2).is_err());
    }

    #[test]
    fn constructed_half_slope() {
        let f = |n: u64| {
            if n % 2 == 1 {
                0
            } else if n >= 6 {
                3 * (n as i64 / 2) + 5
            } else {
                1
            }
        };
        let q = fit(&seq(f, 0..=16), 4, 3).unwrap();
        assert_eq!(q.period, 2);
        assert_eq!(q.polys[0], vec![int(5), rat(3, 2)]);
        assert!(q.polys[1].is_empty());
        assert_eq!(q.onset, 6);
        let lead = q.average_order_leading();
        assert_eq!((lead.degree, lead.coefficient), (1, rat(3, 4)));
    }

    #[test]
    fn linear_average() {
        let q = fit(&seq(|n| 3 * n as i64 + 5, 0..=6), 3, 3).unwrap();
        let lead = q.average_order_leading();
        assert_eq!((lead.degree, lead.coefficient), (1, int(3)));
    }

    #[test]
    fn degree_order_violation() {
        let f = |n: u64| if n.is_multiple_of(2) { 1 } else { n as i64 };
        assert!(matches!(fit(&seq(f, 0..=12), 2, 2), Err(Error::NoFit(_))));
    }

    #[test]
    fn short_data_fails() {
        let s = seq(|n| (n * n) as i64, 0..=2);
        assert!(fit(&s, 1, 3).is_err());
    }
}
