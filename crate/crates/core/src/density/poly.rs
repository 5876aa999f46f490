use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::local_ring::{pow_q, q_int, Q};

/// Polynomial in `X` with exact rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DensityPoly {
    coeffs: Vec<Q>,
}

impl DensityPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        DensityPoly { coeffs }
    }

    pub fn zero() -> Self {
        DensityPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    /// `c·X^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `1 - c·X`.
    pub fn one_minus(c: Q) -> Self {
        Self::new(vec![Q::one(), -c])
    }

    pub fn x() -> Self {
        Self::monomial(Q::one(), 1)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    /// `α' = -dP/dX` at `X = 1`.
    pub fn derivative_prime(&self) -> Q {
        -self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .fold(Q::zero(), |acc, (k, c)| acc + c * q_int(k as i64))
    }

    /// `P(c·X)`.
    pub fn rescale(&self, c: &Q) -> Self {
        let mut pow = Q::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pow);
            pow *= c;
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Newton interpolation through `(x_i, y_i)` with distinct nodes.
    pub fn interpolate(points: &[(Q, Q)]) -> Self {
        let n = points.len();
        let xs: Vec<Q> = points.iter().map(|p| p.0.clone()).collect();
        let mut dd: Vec<Q> = points.iter().map(|p| p.1.clone()).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        let mut result = DensityPoly::zero();
        for i in (0..n).rev() {
            // result = result·(X - x_i) + dd_i
            let shifted = &result * &DensityPoly::new(vec![-xs[i].clone(), Q::one()]);
            result = &shifted + &DensityPoly::constant(dd[i].clone());
        }
        result
    }

    /// Render with `X` as the variable, e.g. `1 - 4X + 3X^2`.
    pub fn pretty(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let body = match k {
                0 => a.to_string(),
                _ => {
                    let var = if k == 1 { "X".to_string() } else { format!("X^{k}") };
                    if a.is_one() {
                        var
                    } else if a.is_integer() {
                        format!("{a}{var}")
                    } else {
                        format!("({a}){var}")
                    }
                }
            };
            s.push_str(&body);
        }
        s
    }
}

impl<'a> Add<&'a DensityPoly> for &'a DensityPoly {
    type Output = DensityPoly;
    fn add(self, o: &DensityPoly) -> DensityPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        DensityPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a DensityPoly> for &'a DensityPoly {
    type Output = DensityPoly;
    fn sub(self, o: &DensityPoly) -> DensityPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        DensityPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a DensityPoly> for &'a DensityPoly {
    type Output = DensityPoly;
    fn mul(self, o: &DensityPoly) -> DensityPoly {
        if self.is_zero() || o.is_zero() {
            return DensityPoly::zero();
        }
        let mut v = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        DensityPoly::new(v)
    }
}

impl Add for DensityPoly {
    type Output = DensityPoly;
    fn add(self, o: DensityPoly) -> DensityPoly {
        &self + &o
    }
}

impl Sub for DensityPoly {
    type Output = DensityPoly;
    fn sub(self, o: DensityPoly) -> DensityPoly {
        &self - &o
    }
}

impl Mul for DensityPoly {
    type Output = DensityPoly;
    fn mul(self, o: DensityPoly) -> DensityPoly {
        &self * &o
    }
}

impl Neg for DensityPoly {
    type Output = DensityPoly;
    fn neg(self) -> DensityPoly {
        DensityPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for DensityPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl Serialize for DensityPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

/// `q^k` as a rational, for any integer `k`.
pub fn qpow(q: u64, k: i64) -> Q {
    pow_q(&q_int(q as i64), k)
}
