//! Exact arithmetic in `Q_p` and its ramified quadratic extension `F = Q_p(π)`,
//! `π² = π₀`, together with the quadratic character of `F/Q_p`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{FromPrimitive, Num, One, Signed, Zero};
use num::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rationals; the base field `F₀` is modelled by these.
pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("the quadratic character is undefined at 0")]
    ZeroCharacter,
}

/// Which uniformizer of `Q_p` is a norm: `π₀ = p` or `π₀ = s·p` with `s` a non-residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Twist {
    One,
    NonResidue,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingConfig {
    pub p: u64,
    pub twist: Twist,
    nonres: u64,
}

impl RingConfig {
    pub fn new(p: u64, twist: Twist) -> Result<Self, RingError> {
        if p < 3 || p % 2 == 0 || !(2..).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return Err(RingError::BadPrime(p));
        }
        let nonres = (2..p)
            .find(|&s| legendre_u64(s, p) == -1)
            .expect("odd primes have non-residues");
        Ok(RingConfig { p, twist, nonres })
    }

    /// Residue field size.
    pub fn q(&self) -> u64 {
        self.p
    }

    /// Smallest quadratic non-residue mod `p`.
    pub fn nonresidue(&self) -> u64 {
        self.nonres
    }

    pub fn pi0_int(&self) -> i64 {
        let t = match self.twist {
            Twist::One => 1,
            Twist::NonResidue => self.nonres,
        };
        (t * self.p) as i64
    }

    pub fn pi0(&self) -> Q {
        Q::from_integer(BigInt::from(self.pi0_int()))
    }

    /// The element `-π₀ = Nm(π)^{-1}·...`, i.e. `π·π̄ = -π₀`.
    pub fn neg_pi0(&self) -> Q {
        -self.pi0()
    }

    pub fn pi(&self) -> Ext {
        Extended::pi(self.pi0_int())
    }

    pub fn ext(&self, a: Q, b: Q) -> Ext {
        Extended::new(a, b, self.pi0_int())
    }

    pub fn embed(&self, a: Q) -> Ext {
        Extended::from_base(a, self.pi0_int())
    }

    pub fn int(&self, n: i64) -> Ext {
        self.embed(Q::from_integer(n.into()))
    }

    pub fn zero(&self) -> Ext {
        self.int(0)
    }

    pub fn one(&self) -> Ext {
        self.int(1)
    }

    /// `π^k` for any integer `k`.
    pub fn pi_pow(&self, k: i64) -> Ext {
        let half = Q::from_integer(self.pi0().to_integer().pow(k.unsigned_abs() as u32 / 2));
        let even = if k >= 0 { half } else { half.recip() };
        let base = self.embed(even);
        if k.rem_euclid(2) == 0 {
            base
        } else if k > 0 {
            base * self.pi()
        } else {
            // π^{-1} = π / π₀
            base * self.pi() * self.embed(self.pi0().recip())
        }
    }

    /// `(-π₀)^k` in `F₀`.
    pub fn neg_pi0_pow(&self, k: i64) -> Q {
        pow_q(&self.neg_pi0(), k)
    }

    pub fn vp(&self, x: &Q) -> Option<i64> {
        vp(x, self.p)
    }

    /// Write `t = t₀·(-π₀)^{v}` and return `(t₀, v)`.
    pub fn unit_part(&self, t: &Q) -> Option<(Q, i64)> {
        let v = self.vp(t)?;
        Some((t / self.neg_pi0_pow(v), v))
    }

    /// Legendre symbol of a `p`-adic unit given as a rational.
    pub fn legendre(&self, u: &Q) -> i8 {
        let r = self.residue(u);
        legendre_u64(r, self.p)
    }

    /// Residue mod `p` of a `p`-integral rational.
    pub fn residue(&self, u: &Q) -> u64 {
        residue_mod(u, &BigInt::from(self.p))
            .to_u64_digits()
            .1
            .first()
            .copied()
            .unwrap_or(0)
    }

    /// Quadratic character of `F/F₀`: `χ(u(-π₀)^k) = (u/p)`.
    pub fn chi(&self, t: &Q) -> Result<i8, RingError> {
        let (u, _) = self.unit_part(t).ok_or(RingError::ZeroCharacter)?;
        Ok(self.legendre(&u))
    }

    /// A unit representative with the requested character.
    pub fn unit_with_chi(&self, chi: i8) -> Q {
        if chi == 1 {
            Q::one()
        } else {
            Q::from_integer(BigInt::from(self.nonres))
        }
    }

    /// Galois data `(conj, trace, norm)`.
    pub fn galois(&self, x: &Ext) -> (Ext, Q, Q) {
        (x.conj(), x.trace(), x.norm())
    }

    pub fn val_pi(&self, x: &Ext) -> Option<i64> {
        x.val_pi(self.p)
    }
}

fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let mut result = 1u64;
    let mut base = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

/// `x mod m` for a rational whose denominator is prime to `m`.
pub fn residue_mod(x: &Q, m: &BigInt) -> BigInt {
    let den = x.denom().mod_floor(m);
    let inv = mod_inverse(&den, m).expect("denominator must be invertible");
    (x.numer() * inv).mod_floor(m)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else {
        None
    }
}

pub fn vp_int(n: &BigInt, p: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    Some(v)
}

/// `p`-adic valuation of a rational; `None` for zero.
pub fn vp(x: &Q, p: u64) -> Option<i64> {
    Some(vp_int(x.numer(), p)? - vp_int(x.denom(), p).unwrap_or(0))
}

pub fn pow_q(x: &Q, k: i64) -> Q {
    let r = num::pow(x.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        r.recip()
    } else {
        r
    }
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `a + bπ` with `π² = pi0`. The field of definition travels with each value
/// so that the usual operator traits can be implemented.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Extended<T> {
    pub a: T,
    pub b: T,
    pub pi0: i64,
}

/// The concrete scalar used everywhere else in the crate.
pub type Ext = Extended<Q>;

impl<T> Extended<T>
where
    T: Clone + Num + Neg<Output = T> + FromPrimitive,
{
    pub fn new(a: T, b: T, pi0: i64) -> Self {
        Extended { a, b, pi0 }
    }

    pub fn from_base(a: T, pi0: i64) -> Self {
        Extended { a, b: T::zero(), pi0 }
    }

    pub fn pi(pi0: i64) -> Self {
        Extended { a: T::zero(), b: T::one(), pi0 }
    }

    fn pi0_t(&self) -> T {
        T::from_i64(self.pi0).expect("π₀ representable")
    }

    pub fn conj(&self) -> Self {
        Extended { a: self.a.clone(), b: -self.b.clone(), pi0: self.pi0 }
    }

    pub fn trace(&self) -> T {
        self.a.clone() + self.a.clone()
    }

    pub fn norm(&self) -> T {
        self.a.clone() * self.a.clone() - self.pi0_t() * self.b.clone() * self.b.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn in_base(&self) -> bool {
        self.b.is_zero()
    }

    pub fn scale(&self, c: &T) -> Self {
        Extended { a: self.a.clone() * c.clone(), b: self.b.clone() * c.clone(), pi0: self.pi0 }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conj();
        Some(Extended { a: c.a / n.clone(), b: c.b / n, pi0: self.pi0 })
    }
}

impl Ext {
    /// `v_π(a + bπ) = min(2 v_p(a), 1 + 2 v_p(b))`; `None` encodes `+∞`.
    pub fn val_pi(&self, p: u64) -> Option<i64> {
        let va = vp(&self.a, p).map(|v| 2 * v);
        let vb = vp(&self.b, p).map(|v| 1 + 2 * v);
        match (va, vb) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    pub fn is_integral(&self, p: u64) -> bool {
        self.val_pi(p).map_or(true, |v| v >= 0)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, T> $tr<&'a Extended<T>> for &'a Extended<T>
        where
            T: Clone + Num + Neg<Output = T> + FromPrimitive,
        {
            type Output = Extended<T>;
            fn $m(self, rhs: &'a Extended<T>) -> Extended<T> {
                debug_assert_eq!(self.pi0, rhs.pi0, "mixing fields");
                let f: fn(&Extended<T>, &Extended<T>) -> Extended<T> = $body;
                f(self, rhs)
            }
        }
        impl<T> $tr<Extended<T>> for Extended<T>
        where
            T: Clone + Num + Neg<Output = T> + FromPrimitive,
        {
            type Output = Extended<T>;
            fn $m(self, rhs: Extended<T>) -> Extended<T> {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| Extended {
    a: x.a.clone() + y.a.clone(),
    b: x.b.clone() + y.b.clone(),
    pi0: x.pi0
});
forward_binop!(Sub, sub, |x, y| Extended {
    a: x.a.clone() - y.a.clone(),
    b: x.b.clone() - y.b.clone(),
    pi0: x.pi0
});
forward_binop!(Mul, mul, |x, y| {
    let pi0 = T::from_i64(x.pi0).expect("π₀ representable");
    Extended {
        a: x.a.clone() * y.a.clone() + pi0 * x.b.clone() * y.b.clone(),
        b: x.a.clone() * y.b.clone() + x.b.clone() * y.a.clone(),
        pi0: x.pi0,
    }
});
forward_binop!(Div, div, |x, y| x * &y.inv().expect("division by zero in F"));

impl<T> Neg for Extended<T>
where
    T: Clone + Num + Neg<Output = T> + FromPrimitive,
{
    type Output = Extended<T>;
    fn neg(self) -> Self {
        Extended { a: -self.a, b: -self.b, pi0: self.pi0 }
    }
}

impl<T> Neg for &Extended<T>
where
    T: Clone + Num + Neg<Output = T> + FromPrimitive,
{
    type Output = Extended<T>;
    fn neg(self) -> Extended<T> {
        Extended { a: -self.a.clone(), b: -self.b.clone(), pi0: self.pi0 }
    }
}

impl<T: fmt::Display + Zero + Signed> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "({})π", self.b),
            (false, false) => write!(f, "{} + ({})π", self.a, self.b),
        }
    }
}
