//! Scalar abstraction shared by every stage.
//!
//! Algebraic stages only need field arithmetic and are generic over
//! [`Scalar`], which covers `f32`, `f64` and exact `Ratio<i64>`. Stages that
//! diagonalize or exponentiate matrices need [`Real`], which adds the
//! nalgebra field machinery and is implemented for the two float types.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for bookkeeping without rounding.
pub type Rational = Ratio<i64>;

/// Field element usable as the real part of an amplitude.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// Lossy conversion from a double.
    fn from_f64(x: f64) -> Self;

    fn as_f64(&self) -> f64;

    /// Square root when it is representable in this type.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Exact parse of a decimal literal such as `12`, `0.25` or `1e-3`.
    fn parse_decimal(text: &str) -> Option<Self>;

    /// The constant π, if the type can hold it.
    fn pi() -> Option<Self>;

    /// Whether the value counts as zero at tolerance `tol`. Exact types
    /// ignore the tolerance.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Text that [`Scalar::parse_decimal`] or the DSL reads back to the same value.
    fn to_literal(&self) -> String;

    fn from_usize(n: usize) -> Self {
        let mut acc = Self::zero();
        let mut bit = Self::one();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc + bit.clone();
            }
            bit = bit.clone() + bit;
            n >>= 1;
        }
        acc
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn as_f64(&self) -> f64 {
                *self as f64
            }
            fn sqrt_exact(&self) -> Option<Self> {
                (*self >= 0.0).then(|| self.sqrt())
            }
            fn parse_decimal(text: &str) -> Option<Self> {
                text.parse::<$t>().ok()
            }
            fn pi() -> Option<Self> {
                Some(std::f64::consts::PI as $t)
            }
            fn is_negligible(&self, tol: f64) -> bool {
                (self.abs() as f64) <= tol
            }
            fn to_literal(&self) -> String {
                format!("{:?}", self)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for Rational {
    fn from_f64(x: f64) -> Self {
        Ratio::approximate_float(x).unwrap_or_else(Ratio::zero)
    }

    fn as_f64(&self) -> f64 {
        self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = isqrt(*self.numer())?;
        let d = isqrt(*self.denom())?;
        Some(Ratio::new(n, d))
    }

    fn parse_decimal(text: &str) -> Option<Self> {
        let (mantissa, exp) = match text.find(['e', 'E']) {
            Some(k) => (&text[..k], text[k + 1..].parse::<i32>().ok()?),
            None => (text, 0),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(k) => (&mantissa[..k], &mantissa[k + 1..]),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let numer: i64 = digits.parse().ok()?;
        let scale = exp - frac_part.len() as i32;
        let pow = 10i64.checked_pow(scale.unsigned_abs())?;
        Some(if scale >= 0 {
            Ratio::from_integer(numer.checked_mul(pow)?)
        } else {
            Ratio::new(numer, pow)
        })
    }

    fn pi() -> Option<Self> {
        None
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn to_literal(&self) -> String {
        if self.denom().is_one() {
            format!("{}", self.numer())
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

fn isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt().round() as i64;
    (r.checked_mul(r)? == n).then_some(r)
}

/// Float scalar with the linear-algebra support needed by the dense oracle.
pub trait Real: Scalar + nalgebra::RealField + Copy + num_traits::Float {}

impl Real for f32 {}
impl Real for f64 {}

/// Scalar from a double literal, avoiding trait-method ambiguity at call sites.
pub fn lit<T: Scalar>(x: f64) -> T {
    <T as Scalar>::from_f64(x)
}

/// Complex amplitude over a scalar.
pub type C<T> = Complex<T>;

pub fn re<T: Scalar>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

pub fn imag_unit<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::one())
}

/// Whether both parts of `z` are negligible.
pub fn c_negligible<T: Scalar>(z: &C<T>, tol: f64) -> bool {
    z.re.is_negligible(tol) && z.im.is_negligible(tol)
}

/// Conjugate without requiring `Clone + Neg` bounds at every call site.
pub fn conj<T: Scalar>(z: &C<T>) -> C<T> {
    Complex::new(z.re.clone(), -z.im.clone())
}

/// Render an amplitude so the DSL parses it back to the same value.
pub fn c_literal<T: Scalar>(z: &C<T>) -> String {
    if z.im.is_zero() {
        wrap_neg(z.re.to_literal())
    } else if z.re.is_zero() {
        format!("{}*i", wrap_neg(z.im.to_literal()))
    } else {
        format!("({} + {}*i)", wrap_neg(z.re.to_literal()), wrap_neg(z.im.to_literal()))
    }
}

fn wrap_neg(s: String) -> String {
    if s.starts_with('-') || s.contains('/') {
        format!("({s})")
    } else {
        s
    }
}

/// Lift an amplitude to doubles for numeric reporting.
pub fn c_to_f64<T: Scalar>(z: &C<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

/// Convert a float amplitude to any real scalar type.
pub fn c_cast<T: Scalar, U: Scalar>(z: &C<T>) -> C<U> {
    Complex::new(U::from_f64(z.re.as_f64()), U::from_f64(z.im.as_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_decimal_parse_is_exact() {
        assert_eq!(Rational::parse_decimal("0.25"), Some(Ratio::new(1, 4)));
        assert_eq!(Rational::parse_decimal("12"), Some(Ratio::from_integer(12)));
        assert_eq!(Rational::parse_decimal("1.5e2"), Some(Ratio::from_integer(150)));
        assert_eq!(Rational::parse_decimal("5e-1"), Some(Ratio::new(1, 2)));
        assert_eq!(Rational::parse_decimal("x"), None);
    }

    #[test]
    fn exact_sqrt_only_for_squares() {
        assert_eq!(Ratio::new(9i64, 4).sqrt_exact(), Some(Ratio::new(3, 2)));
        assert_eq!(Rational::from_integer(2).sqrt_exact(), None);
        assert_eq!(2.0f64.sqrt_exact(), Some(std::f64::consts::SQRT_2));
    }

    #[test]
    fn from_usize_matches_cast() {
        for n in 0..40 {
            assert_eq!(<f64 as Scalar>::from_usize(n), n as f64);
            assert_eq!(<Rational as Scalar>::from_usize(n), Ratio::from_integer(n as i64));
        }
    }

    #[test]
    fn pi_is_available_for_floats_only() {
        assert_eq!(<f64 as Scalar>::pi(), Some(std::f64::consts::PI));
        assert!((<f32 as Scalar>::pi().unwrap() - std::f32::consts::PI).abs() < 1e-6);
        assert_eq!(<Rational as Scalar>::pi(), None);
    }
}
