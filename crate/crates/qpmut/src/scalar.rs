//! Exact scalars: arbitrary-precision rationals or a prime field 𝔽_p.
//!
//! Every value carries enough information to perform field arithmetic without an
//! external context; mixing values from different fields is a programmer error
//! and panics.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::QpError;

/// The ground field F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    /// Arbitrary-precision rationals (the default).
    Rational,
    /// The prime field 𝔽_p.
    Fp(u64),
}

impl Field {
    /// Characteristic of the field (0 for the rationals).
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Fp(p) => p,
        }
    }

    /// Check that `p` is actually prime (trial division; p is small by contract).
    pub fn validate(self) -> Result<(), QpError> {
        if let Field::Fp(p) = self {
            if p < 2 || !is_prime(p) {
                return Err(QpError::Validation(format!("{p} is not a prime")));
            }
            if p >= 1 << 31 {
                return Err(QpError::Validation(format!(
                    "prime modulus {p} too large (must be < 2^31)"
                )));
            }
        }
        Ok(())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Fp { val: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Rational,
            Scalar::Fp { p, .. } => Field::Fp(*p),
        }
    }

    pub fn zero(field: Field) -> Self {
        Scalar::from_i64(0, field)
    }

    pub fn one(field: Field) -> Self {
        Scalar::from_i64(1, field)
    }

    pub fn from_i64(n: i64, field: Field) -> Self {
        match field {
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            Field::Fp(p) => {
                let v = n.rem_euclid(p as i64) as u64;
                Scalar::Fp { val: v, p }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { val, .. } => *val == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { val, .. } => *val == 1,
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        match self {
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
            Scalar::Fp { val, p } => Scalar::Fp {
                val: mod_pow(*val, *p - 2, *p),
                p: *p,
            },
        }
    }

    /// Parse a lowest-terms fraction string like "-3/2" or "7".
    pub fn parse(s: &str, field: Field) -> Result<Self, QpError> {
        let s = s.trim();
        let (num_str, den_str) = match s.split_once('/') {
            Some((a, b)) => (a, b),
            None => (s, "1"),
        };
        let num: BigInt = num_str
            .parse()
            .map_err(|_| QpError::Validation(format!("bad scalar {s:?}")))?;
        let den: BigInt = den_str
            .parse()
            .map_err(|_| QpError::Validation(format!("bad scalar {s:?}")))?;
        if den.is_zero() {
            return Err(QpError::Validation(format!("zero denominator in {s:?}")));
        }
        match field {
            Field::Rational => Ok(Scalar::Rat(BigRational::new(num, den))),
            Field::Fp(p) => {
                let pb = BigInt::from(p);
                let n = ((num % &pb) + &pb) % &pb;
                let d = ((den % &pb) + &pb) % &pb;
                let n: u64 = n.try_into().unwrap();
                let d: u64 = d.try_into().unwrap();
                if d == 0 {
                    return Err(QpError::Validation(format!(
                        "denominator of {s:?} vanishes mod {p}"
                    )));
                }
                Ok(Scalar::Fp {
                    val: mulmod(n, mod_pow(d, p - 2, p), p),
                    p,
                })
            }
        }
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

impl fmt::Display for Scalar {
    /// Lowest-terms fraction string ("-3/2", "7"); 𝔽_p values print as canonical
    /// representatives in [0, p).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { val, .. } => write!(f, "{val}"),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt, $fp:expr) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a $op b),
                    (Scalar::Fp { val: a, p }, Scalar::Fp { val: b, p: q }) => {
                        assert_eq!(p, q, "mixed prime fields");
                        let f: fn(u64, u64, u64) -> u64 = $fp;
                        Scalar::Fp { val: f(a, b, p), p }
                    }
                    _ => panic!("mixed ground fields"),
                }
            }
        }
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.clone().$method(rhs.clone())
            }
        }
    };
}

binop!(Add, add, +, |a, b, p| (a + b) % p);
binop!(Sub, sub, -, |a, b, p| (a + p - b) % p);
binop!(Mul, mul, *, mulmod);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self * rhs.inv()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Fp { val, p } => Scalar::Fp {
                val: (p - val) % p,
                p,
            },
        }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = self.clone() + rhs;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self = self.clone() - rhs;
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = self.clone() * rhs;
    }
}

impl Scalar {
    /// Absolute-value-free "signum" used only for display niceties in reports.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_negative(),
            Scalar::Fp { .. } => false,
        }
    }
}
