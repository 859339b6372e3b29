//! π, √π, Euler's constant γ, and Catalan's constant G.
//!
//! Each constant has a primary algorithm (used by the engine) and an
//! algorithmically independent second route kept for cross-checking:
//!
//! | constant | primary                        | cross-check                          |
//! |----------|--------------------------------|--------------------------------------|
//! | π        | Gauss–Legendre AGM             | Machin arctangent formula            |
//! | γ        | Brent–McMillan (Bessel sums)   | Euler–Maclaurin on harmonic numbers  |
//! | G        | Cohen–Villegas–Zagier on Σ(-1)^k/(2k+1)² | Ramanujan's central-binomial series |
//!
//! Values are cached per [`PrecisionContext`]; concurrent first access may
//! compute a value twice, and both results are identical.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::precision::{PrecisionContext, Real};

/// Decimal digits of internal headroom for every constant algorithm.
const EXTRA_DIGITS: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstantName {
    Pi,
    SqrtPi,
    Gamma,
    Catalan,
}

impl ConstantName {
    pub const ALL: [ConstantName; 4] = [
        ConstantName::Pi,
        ConstantName::SqrtPi,
        ConstantName::Gamma,
        ConstantName::Catalan,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstantName::Pi => "pi",
            ConstantName::SqrtPi => "sqrt_pi",
            ConstantName::Gamma => "gamma",
            ConstantName::Catalan => "catalan",
        }
    }
}

impl fmt::Display for ConstantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstantName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstantName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Lookup {
                kind: "constant",
                name: s.to_string(),
            })
    }
}

/// A constant together with the number of decimal digits it carries.
#[derive(Clone, Debug)]
pub struct NamedConstant {
    pub name: ConstantName,
    pub value: Real,
    pub digits: u32,
}

impl NamedConstant {
    pub fn compute(name: ConstantName, ctx: &PrecisionContext) -> Self {
        NamedConstant {
            name,
            value: constant(name, ctx),
            digits: ctx.working_digits(),
        }
    }
}

fn headroom(ctx: &PrecisionContext) -> PrecisionContext {
    PrecisionContext::with_guard(ctx.target_digits(), ctx.guard_digits() + EXTRA_DIGITS)
        .expect("widening a valid context stays valid")
}

type Cache = Mutex<HashMap<(ConstantName, PrecisionContext), Real>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cached value of `name` at the working precision of `ctx`.
pub fn constant(name: ConstantName, ctx: &PrecisionContext) -> Real {
    let key = (name, *ctx);
    if let Some(v) = cache().lock().expect("constant cache poisoned").get(&key) {
        return v.clone();
    }
    let value = match name {
        ConstantName::Pi => pi_agm(ctx),
        ConstantName::SqrtPi => {
            let wide = headroom(ctx);
            pi_agm(&wide).sqrt().with_precision(ctx)
        }
        ConstantName::Gamma => euler_gamma_brent_mcmillan(ctx),
        ConstantName::Catalan => catalan_cvz(ctx),
    };
    cache()
        .lock()
        .expect("constant cache poisoned")
        .entry(key)
        .or_insert(value)
        .clone()
}

pub fn pi(ctx: &PrecisionContext) -> Real {
    constant(ConstantName::Pi, ctx)
}

pub fn sqrt_pi(ctx: &PrecisionContext) -> Real {
    constant(ConstantName::SqrtPi, ctx)
}

pub fn euler_gamma(ctx: &PrecisionContext) -> Real {
    constant(ConstantName::Gamma, ctx)
}

pub fn catalan(ctx: &PrecisionContext) -> Real {
    constant(ConstantName::Catalan, ctx)
}

/// Dispatch by name: `pi`, `sqrt_pi`, `gamma`, or `catalan`.
pub fn named_constant(name: &str, ctx: &PrecisionContext) -> Result<Real> {
    Ok(constant(name.parse()?, ctx))
}

/// Gauss–Legendre arithmetic-geometric mean iteration.
pub fn pi_agm(ctx: &PrecisionContext) -> Real {
    let w = headroom(ctx);
    let eps = w.epsilon();
    let one = Real::one(&w);
    let mut a = one.clone();
    let mut b = Real::ratio(1, 2, &w).sqrt();
    let mut t = Real::ratio(1, 4, &w);
    let mut scale: i64 = 0; // p = 2^scale
    loop {
        let next_a = (&a + &b).mul_pow2(-1);
        let next_b = (&a * &b).sqrt();
        let d = &a - &next_a;
        t = &t - &d.square().mul_pow2(scale);
        scale += 1;
        a = next_a;
        b = next_b;
        if (&a - &b).abs() < eps {
            break;
        }
    }
    let s = &a + &b;
    (s.square() / t.mul_pow2(2)).with_precision(ctx)
}

/// `arctan(1/n)` by its Taylor series.
fn arctan_recip(n: i64, ctx: &PrecisionContext) -> Real {
    let eps = ctx.epsilon().mul_pow2(-4);
    let n_real = Real::from_i64(n, ctx);
    let n2 = Real::from_i64(n * n, ctx);
    let mut power = n_real.recip();
    let mut sum = power.clone();
    let mut k: i64 = 1;
    loop {
        power = &power / &n2;
        let term = &power / Real::from_i64(2 * k + 1, ctx);
        if k % 2 == 1 {
            sum = &sum - &term;
        } else {
            sum = &sum + &term;
        }
        if term < eps {
            break;
        }
        k += 1;
    }
    sum
}

/// Machin's formula `π = 16 arctan(1/5) - 4 arctan(1/239)`.
pub fn pi_machin(ctx: &PrecisionContext) -> Real {
    let w = headroom(ctx);
    let v = arctan_recip(5, &w).mul_pow2(4) - arctan_recip(239, &w).mul_pow2(2);
    v.with_precision(ctx)
}

/// Brent–McMillan algorithm B1: `γ ≈ U/V` with
/// `V = Σ (n^k/k!)^2` and `U = Σ (n^k/k!)^2 (H_k - ln n)`; the neglected
/// remainder is `O(e^-4n)`.
pub fn euler_gamma_brent_mcmillan(ctx: &PrecisionContext) -> Real {
    let w = headroom(ctx);
    let target = f64::from(w.working_digits() + 2) * std::f64::consts::LN_10;
    let n = ((target + std::f64::consts::PI.ln()) / 4.0).ceil().max(1.0) as i64;
    let eps = w.epsilon();
    let n_real = Real::from_i64(n, &w);
    let n2 = Real::from_i64(n * n, &w);
    let mut a = -n_real.ln();
    let mut b = Real::one(&w);
    let mut u = a.clone();
    let mut v = b.clone();
    let mut k: i64 = 1;
    loop {
        let kk = Real::from_i64(k, &w);
        b = &(&b * &n2) / &kk.square();
        a = &(&(&a * &n2) / &kk + &b) / &kk;
        u = &u + &a;
        v = &v + &b;
        if k > n && b < &eps * &v && a.abs() < &eps * &v {
            break;
        }
        k += 1;
    }
    (u / v).with_precision(ctx)
}

/// Bernoulli numbers `B_0 ..= B_m` from `Σ_{j<=m} C(m+1, j) B_j = 0`.
pub(crate) fn bernoulli_numbers(m: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(m + 1);
    b.push(BigRational::one());
    for n in 1..=m {
        // binom(n+1, j) for j = 0..n
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            if j > 0 {
                binom = binom * BigInt::from(n + 2 - j) / BigInt::from(j);
            }
            if !bj.is_zero() {
                acc += BigRational::from_integer(binom.clone()) * bj;
            }
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
    }
    b
}

/// Euler–Maclaurin: `γ = H_N - ln N - 1/(2N) + Σ_{k>=1} B_2k / (2k N^2k)`.
pub fn euler_gamma_euler_maclaurin(ctx: &PrecisionContext) -> Real {
    let w = headroom(ctx);
    let digits = f64::from(w.working_digits());
    // Terms shrink like (2k)!/(2πN)^2k; N = digits keeps the minimum far
    // below the target.
    let n = digits.ceil().max(10.0) as i64;
    let max_k = (std::f64::consts::PI * n as f64) as usize;
    let eps = w.epsilon();

    let mut harmonic = BigRational::zero();
    for j in 1..=n {
        harmonic += BigRational::new(BigInt::one(), BigInt::from(j));
    }
    let mut sum = Real::from_rational(&harmonic, &w);
    let n_real = Real::from_i64(n, &w);
    sum = &sum - &n_real.ln();
    sum = &sum - &(Real::one(&w) / n_real.mul_pow2(1));

    let n2 = BigInt::from(n * n);
    let mut n_pow = BigInt::one();
    let mut bernoulli = bernoulli_numbers(16);
    let mut k = 1usize;
    loop {
        if 2 * k >= bernoulli.len() {
            bernoulli = bernoulli_numbers(bernoulli.len() * 2);
        }
        n_pow *= &n2;
        let coeff = &bernoulli[2 * k] / BigRational::from_integer(BigInt::from(2 * k) * &n_pow);
        let term = Real::from_rational(&coeff, &w);
        sum = &sum + &term;
        if term.abs() < eps || k >= max_k {
            break;
        }
        k += 1;
    }
    sum.with_precision(ctx)
}

/// Cohen–Villegas–Zagier acceleration of `Σ (-1)^k / (2k+1)^2`; each term
/// gains `log10(3 + √8) ≈ 0.77` digits.
pub fn catalan_cvz(ctx: &PrecisionContext) -> Real {
    let w = headroom(ctx);
    let n = (f64::from(w.working_digits() + 2) / (3.0 + 8f64.sqrt()).log10()).ceil() as i64;
    let root8 = Real::from_i64(8, &w).sqrt();
    let d = (Real::from_i64(3, &w) + root8).powi(n);
    let d = (&d + &d.recip()).mul_pow2(-1);
    let mut b = Real::from_i64(-1, &w);
    let mut c = -&d;
    let mut s = Real::zero(&w);
    for k in 0..n {
        c = &b - &c;
        let denom = Real::from_i64((2 * k + 1) * (2 * k + 1), &w);
        s = &s + &(&c / &denom);
        let num = Real::from_i64(2 * (k + n) * (k - n), &w);
        let den = Real::from_i64((2 * k + 1) * (k + 1), &w);
        b = &(&b * &num) / &den;
    }
    (s / d).with_precision(ctx)
}

/// Ramanujan: `G = (π/8) ln(2 + √3) + (3/8) Σ (k!)^2 / ((2k)! (2k+1)^2)`.
pub fn catalan_ramanujan(ctx: &PrecisionContext) -> Real {
    let w = headroom(ctx);
    let eps = w.epsilon().mul_pow2(-4);
    // (k!)^2/(2k)! as an exact ratio keeps the sum free of rounding drift
    // in the recurrence.
    let mut ratio = BigRational::one();
    let mut sum = Real::zero(&w);
    let mut k: i64 = 0;
    loop {
        let odd = 2 * k + 1;
        let term = &ratio / BigRational::from_integer(BigInt::from(odd * odd));
        let term = Real::from_rational(&term, &w);
        sum = &sum + &term;
        if term < eps {
            break;
        }
        // (k+1)^2 / ((2k+1)(2k+2)) = (k+1) / (2(2k+1))
        let step = BigRational::new(BigInt::from(k + 1), BigInt::from(2 * (2 * k + 1)));
        ratio *= step;
        let g = ratio.numer().gcd(ratio.denom());
        if !g.is_one() {
            ratio = BigRational::new(ratio.numer() / &g, ratio.denom() / &g);
        }
        k += 1;
    }
    let pi = pi_machin(&w);
    let log_term = (Real::from_i64(2, &w) + Real::from_i64(3, &w).sqrt()).ln();
    let head = (&pi * &log_term).mul_pow2(-3);
    let tail = (&sum * &Real::from_i64(3, &w)).mul_pow2(-3);
    (head + tail).with_precision(ctx)
}
