//! Working precision and the arbitrary-precision real type.
//!
//! Every numeric routine in the crate takes a [`PrecisionContext`]. Values are
//! [`Real`]s backed by `astro_float::BigFloat` with round-half-even
//! arithmetic; elementary functions are faithfully rounded at the precision
//! of their argument.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{Error, Result};

pub const MIN_TARGET_DIGITS: u32 = 10;
pub const MIN_GUARD_DIGITS: u32 = 10;

/// Extra decimal orders below working precision at which a factor is
/// treated as exactly zero.
pub const UNDERFLOW_MARGIN_DIGITS: u32 = 50;

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const RM: RoundingMode = RoundingMode::ToEven;
// Transcendentals are truncated rather than correctly rounded: the library's
// correct-rounding loop never terminates when the exact result is
// representable (e.g. `4^0.5`). The error stays below one ulp.
const RM_FN: RoundingMode = RoundingMode::None;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache allocation"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Requested, guard, and working decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    target_digits: u32,
    guard_digits: u32,
    working_digits: u32,
}

impl PrecisionContext {
    /// Context for `target_digits` with the default guard rule
    /// `guard = max(10, ceil(target / 2))`.
    pub fn new(target_digits: u32) -> Result<Self> {
        if target_digits < MIN_TARGET_DIGITS {
            return Err(Error::Config(format!(
                "digits must be at least {MIN_TARGET_DIGITS}, got {target_digits}"
            )));
        }
        let guard = MIN_GUARD_DIGITS.max(target_digits.div_ceil(2));
        Self::with_guard(target_digits, guard)
    }

    pub fn with_guard(target_digits: u32, guard_digits: u32) -> Result<Self> {
        if target_digits < MIN_TARGET_DIGITS {
            return Err(Error::Config(format!(
                "digits must be at least {MIN_TARGET_DIGITS}, got {target_digits}"
            )));
        }
        if guard_digits < MIN_GUARD_DIGITS {
            return Err(Error::Config(format!(
                "guard digits must be at least {MIN_GUARD_DIGITS}, got {guard_digits}"
            )));
        }
        let working_digits = target_digits
            .checked_add(guard_digits)
            .ok_or_else(|| Error::Config("digits out of range".into()))?;
        if working_digits > 100_000 {
            return Err(Error::Config(format!("{target_digits} digits is beyond the supported range")));
        }
        Ok(Self {
            target_digits,
            guard_digits,
            working_digits,
        })
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn working_digits(&self) -> u32 {
        self.working_digits
    }

    /// Context with twice the target digits, used for reference evaluations.
    pub fn doubled(&self) -> Self {
        Self::new(self.target_digits * 2).expect("doubling a valid context stays valid")
    }

    /// Binary precision carrying at least `working_digits` decimal digits.
    pub fn bits(&self) -> usize {
        (f64::from(self.working_digits) * LOG2_10).ceil() as usize + 8
    }

    /// Base-2 exponent below which a magnitude is under
    /// `10^-(working + 50)` and may be replaced by zero.
    pub fn underflow_exponent(&self) -> i64 {
        -((f64::from(self.working_digits + UNDERFLOW_MARGIN_DIGITS) * LOG2_10).ceil() as i64)
    }

    /// The underflow-skip threshold `10^-(working + 50)` as a value.
    pub fn underflow_threshold(&self) -> Real {
        Real::pow10(-i64::from(self.working_digits + UNDERFLOW_MARGIN_DIGITS), self)
    }

    /// `10^-working`, the unit roundoff scale of the context.
    pub fn epsilon(&self) -> Real {
        Real::pow10(-i64::from(self.working_digits), self)
    }
}

/// Arbitrary-precision real number.
///
/// The precision in bits is tracked next to the value because exact results
/// such as zero carry no mantissa width of their own.
#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    p: usize,
}

impl Real {
    fn at(v: BigFloat, p: usize) -> Self {
        Real { v, p }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Real::at(BigFloat::from_u32(0, ctx.bits()), ctx.bits())
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Real::at(BigFloat::from_u32(1, ctx.bits()), ctx.bits())
    }

    pub fn from_i64(v: i64, ctx: &PrecisionContext) -> Self {
        Real::at(BigFloat::from_i64(v, ctx.bits()), ctx.bits())
    }

    pub fn from_u64(v: u64, ctx: &PrecisionContext) -> Self {
        Real::at(BigFloat::from_u64(v, ctx.bits()), ctx.bits())
    }

    /// Exact binary value of `v` (every finite `f64` is representable).
    pub fn from_f64(v: f64, ctx: &PrecisionContext) -> Self {
        Real::at(BigFloat::from_f64(v, ctx.bits().max(64)), ctx.bits().max(64))
    }

    /// Ratio `num / den` rounded at working precision.
    pub fn ratio(num: i64, den: i64, ctx: &PrecisionContext) -> Self {
        Self::from_i64(num, ctx) / Self::from_i64(den, ctx)
    }

    pub fn from_bigint(v: &num_bigint::BigInt, ctx: &PrecisionContext) -> Self {
        let text = v.to_string();
        let v = with_consts(|cc| BigFloat::parse(&text, Radix::Dec, ctx.bits(), RM_FN, cc));
        Real::at(v, ctx.bits())
    }

    /// Exact rational rounded at working precision.
    pub fn from_rational(v: &num_rational::BigRational, ctx: &PrecisionContext) -> Self {
        let mut hi = *ctx;
        hi.working_digits += 10;
        let n = Self::from_bigint(v.numer(), &hi);
        let d = Self::from_bigint(v.denom(), &hi);
        (n / d).with_precision(ctx)
    }

    /// `10^k` at working precision.
    pub fn pow10(k: i64, ctx: &PrecisionContext) -> Self {
        let p = ctx.bits();
        let ten = BigFloat::from_u32(10, p);
        let v = ten.powi(k.unsigned_abs() as usize, p, RM);
        if k < 0 {
            Real::at(v.reciprocal(p, RM), p)
        } else {
            Real::at(v, p)
        }
    }

    /// Parses a decimal literal (`123`, `0.5`, `1.5e-3`) correctly rounded at
    /// working precision.
    pub fn parse_decimal(text: &str, ctx: &PrecisionContext) -> Result<Self> {
        let ok = !text.is_empty()
            && text
                .bytes()
                .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
            && text.bytes().any(|b| b.is_ascii_digit());
        if !ok {
            return Err(Error::Config(format!("`{text}` is not a decimal number")));
        }
        let v = with_consts(|cc| BigFloat::parse(text, Radix::Dec, ctx.bits(), RM_FN, cc));
        if v.is_nan() || v.is_inf() {
            return Err(Error::Config(format!("`{text}` is not a finite decimal number")));
        }
        Ok(Real::at(v, ctx.bits()))
    }

    pub fn precision_bits(&self) -> usize {
        self.p
    }

    /// Rounds to the precision of `ctx`.
    pub fn with_precision(&self, ctx: &PrecisionContext) -> Self {
        let mut v = self.v.clone();
        // Only fails on NaN/Inf, which carry no mantissa to round.
        let _ = v.set_precision(ctx.bits(), RM);
        Real::at(v, ctx.bits())
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.is_finite() && self.v.is_int()
    }

    /// Binary exponent `e` with `2^(e-1) <= |self| < 2^e`; `None` for zero
    /// and non-finite values.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() || !self.is_finite() {
            None
        } else {
            self.v.exponent().map(i64::from)
        }
    }

    /// True when `|self| < 10^-(working + 50)`.
    pub fn is_negligible(&self, ctx: &PrecisionContext) -> bool {
        match self.exponent() {
            None => self.is_zero(),
            Some(e) => e <= ctx.underflow_exponent(),
        }
    }

    fn p(&self) -> usize {
        self.p
    }

    pub fn abs(&self) -> Self {
        Real::at(self.v.abs(), self.p)
    }

    pub fn sqrt(&self) -> Self {
        Real::at(self.v.sqrt(self.p(), RM_FN), self.p())
    }

    pub fn recip(&self) -> Self {
        Real::at(self.v.reciprocal(self.p(), RM), self.p())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn exp(&self) -> Self {
        let p = self.p();
        with_consts(|cc| Real::at(self.v.exp(p, RM_FN, cc), p))
    }

    pub fn ln(&self) -> Self {
        let p = self.p();
        with_consts(|cc| Real::at(self.v.ln(p, RM_FN, cc), p))
    }

    pub fn sin(&self) -> Self {
        let p = self.p();
        with_consts(|cc| Real::at(self.v.sin(p, RM_FN, cc), p))
    }

    pub fn cos(&self) -> Self {
        let p = self.p();
        with_consts(|cc| Real::at(self.v.cos(p, RM_FN, cc), p))
    }

    pub fn atan(&self) -> Self {
        let p = self.p();
        with_consts(|cc| Real::at(self.v.atan(p, RM_FN, cc), p))
    }

    pub fn sinh(&self) -> Self {
        let p = self.p();
        with_consts(|cc| Real::at(self.v.sinh(p, RM_FN, cc), p))
    }

    pub fn cosh(&self) -> Self {
        let p = self.p();
        with_consts(|cc| Real::at(self.v.cosh(p, RM_FN, cc), p))
    }

    pub fn tanh(&self) -> Self {
        let p = self.p();
        with_consts(|cc| Real::at(self.v.tanh(p, RM_FN, cc), p))
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = self.p();
        let v = self.v.powi(n.unsigned_abs() as usize, p, RM);
        if n < 0 {
            Real::at(v.reciprocal(p, RM), p)
        } else {
            Real::at(v, p)
        }
    }

    /// `self^e` for `self > 0` as `exp(e ln self)`.
    pub fn powf(&self, e: &Real) -> Self {
        let p = self.p().max(e.p());
        with_consts(|cc| Real::at(self.v.pow(&e.v, p, RM_FN, cc), p))
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        let mut v = self.v.clone();
        if let Some(e) = v.exponent() {
            if !v.is_zero() {
                v.set_exponent((i64::from(e) + k) as i32);
            }
        }
        Real::at(v, self.p)
    }

    pub fn max_abs<'a>(a: &'a Real, b: &'a Real) -> &'a Real {
        if a.abs() >= b.abs() {
            a
        } else {
            b
        }
    }

    /// Nearest `f64`, for diagnostics and step-size heuristics only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if !self.is_finite() {
            return if self.v.is_nan() {
                f64::NAN
            } else if self.v.is_inf_neg() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        let (neg, digits, exp10) = self.decimal_digits(20, DigitRounding::Nearest);
        let s = format!("{}{}.{}e{}", if neg { "-" } else { "" }, &digits[..1], &digits[1..], exp10);
        s.parse().unwrap_or(f64::NAN)
    }

    /// Sign, `sig` significant decimal digits, and decimal exponent of the
    /// leading digit. Zero yields all zeros with exponent 0.
    pub fn decimal_digits(&self, sig: usize, rounding: DigitRounding) -> (bool, String, i64) {
        let sig = sig.max(1);
        if self.is_zero() || !self.is_finite() {
            return (false, "0".repeat(sig), 0);
        }
        // Format with enough bits that the requested digits are all present.
        let need_bits = ((sig as f64 + 4.0) * LOG2_10).ceil() as usize;
        let mut v = self.v.clone();
        if v.precision().unwrap_or(0) < need_bits {
            let _ = v.set_precision(need_bits, RM);
        }
        let text = with_consts(|cc| v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "0".into());
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.as_str()),
        };
        let (mantissa, exp) = body.split_once('e').unwrap_or((body, "0"));
        let exp: i64 = exp.parse().unwrap_or(0);
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        let mut digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).map(|b| b - b'0').collect();
        // Position of the decimal point relative to the first digit.
        let mut exp10 = exp + int_part.len() as i64 - 1;
        while digits.len() > 1 && digits[0] == 0 {
            digits.remove(0);
            exp10 -= 1;
        }
        if digits.len() > sig {
            let round_up = rounding == DigitRounding::Nearest && digits[sig] >= 5;
            digits.truncate(sig);
            if round_up {
                let mut i = sig;
                loop {
                    if i == 0 {
                        digits.insert(0, 1);
                        digits.truncate(sig);
                        exp10 += 1;
                        break;
                    }
                    i -= 1;
                    if digits[i] == 9 {
                        digits[i] = 0;
                    } else {
                        digits[i] += 1;
                        break;
                    }
                }
            }
        }
        digits.resize(sig, 0);
        let s = digits.iter().map(|d| char::from(b'0' + d)).collect();
        (neg, s, exp10)
    }

    /// Decimal string with `sig` significant digits. Plain notation when the
    /// leading digit sits between `10^-5` and `10^(sig-1)`, scientific
    /// otherwise.
    pub fn to_decimal_string(&self, sig: usize) -> String {
        self.render(sig, DigitRounding::Nearest)
    }

    /// Like [`Real::to_decimal_string`] but truncating, so the result at `n`
    /// digits is a prefix of the result at `m > n` digits.
    pub fn to_truncated_string(&self, sig: usize) -> String {
        self.render(sig, DigitRounding::Truncate)
    }

    /// Rounded to `sig` digits with trailing zeros dropped, e.g. `0.5`.
    pub fn to_trimmed_string(&self, sig: usize) -> String {
        self.render_with(sig, DigitRounding::Nearest, true)
    }

    fn render(&self, sig: usize, rounding: DigitRounding) -> String {
        self.render_with(sig, rounding, false)
    }

    fn render_with(&self, sig: usize, rounding: DigitRounding, trim: bool) -> String {
        if !self.is_finite() {
            return format!("{}", self.to_f64());
        }
        if self.is_zero() {
            return "0".to_string();
        }
        let (neg, mut digits, exp10) = self.decimal_digits(sig, rounding);
        if trim {
            let keep = digits.trim_end_matches('0').len().max(1);
            digits.truncate(keep);
        }
        let sign = if neg { "-" } else { "" };
        if (-5..sig.max(1) as i64).contains(&exp10) {
            if exp10 >= 0 {
                let split = (exp10 + 1) as usize;
                if digits.len() < split {
                    digits.push_str(&"0".repeat(split - digits.len()));
                }
                let (int, frac) = digits.split_at(split);
                if frac.is_empty() {
                    format!("{sign}{int}")
                } else {
                    format!("{sign}{int}.{frac}")
                }
            } else {
                let zeros = "0".repeat((-exp10 - 1) as usize);
                format!("{sign}0.{zeros}{digits}")
            }
        } else {
            let (first, rest) = digits.split_at(1);
            if rest.is_empty() {
                format!("{sign}{first}e{exp10}")
            } else {
                format!("{sign}{first}.{rest}e{exp10}")
            }
        }
    }

    /// Same value at the same binary precision.
    pub fn bit_eq(&self, other: &Real) -> bool {
        self.is_finite() && other.is_finite() && self == other && self.precision_bits() == other.precision_bits()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitRounding {
    Nearest,
    Truncate,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or_else(|| {
            ((self.precision_bits() as f64) / LOG2_10).floor().max(1.0) as usize
        });
        f.write_str(&self.to_decimal_string(digits))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.p().max(rhs.p());
                Real::at(self.v.$method(&rhs.v, p, RM), p)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::at(self.v.neg(), self.p)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::at(BigFloat::neg(&self.v), self.p)
    }
}
