//! Exact rational arithmetic for polynomials in the backshift variable `z`.
//!
//! Coefficients are stored in ascending powers of `z`, so index `j` of
//! [`RationalPoly::coefficients`] multiplies `z^j`. Applying a polynomial in
//! the backshift operator to a series is a convolution with past values and
//! lives in the analysis module; this module is pure algebra.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational number kept in canonical form (positive denominator,
/// numerator and denominator coprime).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Nearest `f64`. Exact whenever both parts fit in 53 bits.
    pub fn to_f64(&self) -> f64 {
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => self.0.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Always renders as `numerator/denominator`, including `n/1` for integers.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `n` or `n/d` with optional surrounding whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |part: &str| {
            part.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Rational::from_bigints(parse(n)?, parse(d)?),
            None => Ok(Rational(BigRational::from_integer(parse(s)?))),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Polynomial in `z` with exact rational coefficients, trailing zeros trimmed.
///
/// The zero polynomial has no coefficients and degree `-1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    /// `(n_0 + n_1 z + ...)/den` from integer numerators.
    pub fn from_integers(numerators: &[i64], den: i64) -> Self {
        RationalPoly::new(numerators.iter().map(|&n| Rational::new(n, den)).collect())
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RationalPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RationalPoly::new(vec![c])
    }

    /// `z^power`.
    pub fn monomial(power: usize) -> Self {
        RationalPoly::one().shift_mul(power)
    }

    /// The simple moving average polynomial `(1 + z + ... + z^{k-1})/k`.
    pub fn sma(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroOrder);
        }
        let w = Rational::new(1, i64::from(k));
        Ok(RationalPoly::new(vec![w; k as usize]))
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `z^j`, zero beyond the stored range.
    pub fn coeff(&self, j: usize) -> Rational {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    /// Number of stored coefficients (filter length); 0 for the zero polynomial.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Exact product; the coefficient sequences are convolved.
    pub fn mul(&self, other: &RationalPoly) -> RationalPoly {
        if self.is_zero() || other.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        RationalPoly::new(out)
    }

    /// Multiplies by `z^power`.
    pub fn shift_mul(&self, power: usize) -> RationalPoly {
        if self.is_zero() {
            return RationalPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        RationalPoly { coeffs }
    }

    pub fn scale(&self, c: &Rational) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * z + c)
    }

    /// The `order`-th derivative at `z = 1`: `sum_j c_j * j!/(j-order)!`.
    pub fn derivative_at_one(&self, order: usize) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .skip(order)
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let falling: BigInt = ((j - order + 1)..=j).map(BigInt::from).product();
                c * &Rational(BigRational::from_integer(falling))
            })
            .sum()
    }

    pub fn sum_of_squares(&self) -> Rational {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Least common multiple of the coefficient denominators (1 for the zero polynomial).
    pub fn common_denominator(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Integer numerators over [`RationalPoly::common_denominator`].
    pub fn scaled_numerators(&self) -> (Vec<BigInt>, BigInt) {
        let den = self.common_denominator();
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (nums, den)
    }

    pub fn to_f64_coefficients(&self) -> Vec<f64> {
        self.coeffs.iter().map(Rational::to_f64).collect()
    }

    /// Text rendering `(a0 + a1 z + a2 z^2 ...)/D` with integer numerators over
    /// the common denominator `D`; the `/D` and parentheses are dropped when `D = 1`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let (nums, den) = self.scaled_numerators();
        let mut body = String::new();
        for (j, n) in nums.iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            let mag = n.abs();
            if body.is_empty() {
                if n.is_negative() {
                    body.push('-');
                }
            } else {
                body.push_str(if n.is_negative() { " - " } else { " + " });
            }
            match j {
                0 => body.push_str(&mag.to_string()),
                _ => {
                    if !mag.is_one() {
                        body.push_str(&mag.to_string());
                    }
                    body.push('z');
                    if j > 1 {
                        body.push_str(&format!("^{j}"));
                    }
                }
            }
        }
        if den.is_one() {
            body
        } else {
            format!("({body})/{den}")
        }
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPoly[{}]", self.render())
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.len().max(rhs.len());
        RationalPoly::new((0..n).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.len().max(rhs.len());
        RationalPoly::new((0..n).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        RationalPoly::mul(self, rhs)
    }
}
