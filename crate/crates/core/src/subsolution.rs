//! Exact sign analysis of the polynomial that decides whether the model profile
//!
//! `tau(r) = (r - R*)^2 / (2(n-1)) - log(1 + (r - R*)^2) / 2`
//!
//! is a subsolution, i.e. `Psi(tau) <= 0` with
//! `Psi(f) = f'' - (1 + f'^2)(1 - (n-1) f' / r)`.
//!
//! With `m = n - 1`, `s = r - R*` and `D = 1 + s^2` the derivatives are rational,
//! `tau' = s (D - m) / (m D)` and `tau'' = (D^2 - m (1 - s^2)) / (m D^2)`, so
//! `m^2 D^3 r Psi(tau)` is a polynomial of degree 8 in `r`. All arithmetic here is
//! over arbitrary-precision rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense polynomial with rational coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"0.5"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mag = BigRational::from_integer(w.abs()) + BigRational::new(f, scale);
        return Ok(if neg { -mag } else { mag });
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial { coeffs: vec![] }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| int(v)).collect())
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(BigRational::one()), |acc, _| &acc * self)
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap() / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading();
        a.scale(&(BigRational::one() / lead))
    }

    /// Exact decimal-fraction strings, ascending degree.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        Ok(Self::new(
            items
                .iter()
                .map(|s| parse_rational(s.as_ref()))
                .collect::<Result<_>>()?,
        ))
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*x"),
                _ => format!("({c})*x^{k}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, o: &RationalPolynomial) -> RationalPolynomial {
        let len = self.coeffs.len().max(o.coeffs.len());
        RationalPolynomial::new((0..len).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, o: &RationalPolynomial) -> RationalPolynomial {
        let len = self.coeffs.len().max(o.coeffs.len());
        RationalPolynomial::new((0..len).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, o: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || o.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// `q(x) = p(x + a)` by repeated synthetic division.
pub fn taylor_shift(p: &RationalPolynomial, a: &BigRational) -> RationalPolynomial {
    let mut c = p.coeffs.clone();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &c[j + 1] * a;
            c[j] += t;
        }
    }
    RationalPolynomial::new(c)
}

/// `tau(r)` for dimension `n` and base point `R*`.
pub fn tau_eval(n: usize, r_star: &BigRational, r: f64) -> f64 {
    let s = r - to_f64(r_star);
    s * s / (2.0 * (n as f64 - 1.0)) - 0.5 * (s * s).ln_1p()
}

/// `(tau', tau'')` at `r`, exactly.
pub fn tau_derivatives(
    n: usize,
    r_star: &BigRational,
    r: &BigRational,
) -> (BigRational, BigRational) {
    let m = int(n as i64 - 1);
    let s = r - r_star;
    let d = BigRational::one() + &s * &s;
    let d1 = &s * (&d - &m) / (&m * &d);
    let d2 = (&d * &d - &m * (BigRational::one() - &s * &s)) / (&m * &d * &d);
    (d1, d2)
}

/// `Psi(f)(r)` from callables for `f, f', f''`.
pub fn psi<F0, F1, F2>(n: usize, f: (F0, F1, F2), r: f64) -> Result<f64>
where
    F0: Fn(f64) -> f64,
    F1: Fn(f64) -> f64,
    F2: Fn(f64) -> f64,
{
    if !(r > 0.0) {
        return Err(Error::Domain(format!("Psi needs r > 0, got {r}")));
    }
    let _ = &f.0;
    let p = (f.1)(r);
    Ok((f.2)(r) - (1.0 + p * p) * (1.0 - (n as f64 - 1.0) * p / r))
}

/// `Psi(tau)(r)` exactly for rational `r > 0`.
pub fn psi_tau_exact(n: usize, r_star: &BigRational, r: &BigRational) -> Result<BigRational> {
    if !r.is_positive() {
        return Err(Error::Domain(format!("Psi needs r > 0, got {r}")));
    }
    let m = int(n as i64 - 1);
    let (d1, d2) = tau_derivatives(n, r_star, r);
    Ok(d2 - (BigRational::one() + &d1 * &d1) * (BigRational::one() - &m * &d1 / r))
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    Ok(())
}

/// `m^2 D^3 r Psi(tau)` as a polynomial in `r`; the factor is positive for `r > 0`.
pub fn derive_polynomial(n: usize, r_star: &BigRational) -> Result<RationalPolynomial> {
    check_n(n)?;
    if r_star.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "R* must be >= 0, got {r_star}"
        )));
    }
    let m = RationalPolynomial::constant(int(n as i64 - 1));
    let one = RationalPolynomial::constant(BigRational::one());
    let r = RationalPolynomial::x();
    let s = &r - &RationalPolynomial::constant(r_star.clone());
    let s2 = &s * &s;
    let d = &one + &s2;
    let dm = &d - &m;
    // m r D (D^2 - m (1 - s^2))
    let first = &(&(&m * &r) * &d) * &(&(&d * &d) - &(&m * &(&one - &s2)));
    // (m^2 D^2 + s^2 (D - m)^2) (r D - s (D - m))
    let growth = &(&(&m * &m) * &(&d * &d)) + &(&s2 * &(&dm * &dm));
    let drift = &(&r * &d) - &(&s * &dm);
    Ok(&first - &(&growth * &drift))
}

/// The positive factor cleared by [`derive_polynomial`] at rational `r`.
pub fn clearing_factor(n: usize, r_star: &BigRational, r: &BigRational) -> BigRational {
    let m = int(n as i64 - 1);
    let s = r - r_star;
    let d = BigRational::one() + &s * &s;
    &m * &m * &d * &d * &d * r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Coefficients of `r^k`.
    Origin,
    /// Coefficients of `(r - R*)^k`.
    Centered,
}

/// The printed coefficient tables, transcribed as printed (including their typos).
pub fn paper_coefficients(
    n: usize,
    r_star: &BigRational,
    basis: Basis,
) -> Result<Vec<BigRational>> {
    check_n(n)?;
    let n = int(n as i64);
    let n2 = &n * &n;
    let n3 = &n2 * &n;
    let rp = |e: i32| -> BigRational { (0..e).fold(BigRational::one(), |acc, _| acc * r_star) };
    let poly_n = |a: i64, b: i64, c: i64, d: i64| -> BigRational {
        int(a) + int(b) * &n + int(c) * &n2 + int(d) * &n3
    };
    let q = poly_n(7, -5, 1, 0);
    let out = match basis {
        Basis::Origin => vec![
            rp(9)
                + &q * rp(7)
                + poly_n(16, -21, 9, -1) * rp(5)
                + poly_n(13, -24, 15, -3) * rp(3)
                + poly_n(2, -5, 4, -1) * rp(1),
            int(8) * rp(8)
                + poly_n(42, -30, 6, 0) * rp(6)
                + poly_n(67, -92, 42, -5) * rp(4)
                + poly_n(29, -59, 41, -9) * rp(2)
                + poly_n(-1, 0, 2, -1),
            int(28) * rp(7)
                + poly_n(105, -75, 15, 0) * rp(5)
                + poly_n(108, -158, 78, -10) * rp(3)
                + poly_n(19, -46, 37, -9) * rp(1),
            int(56) * rp(6)
                + int(20) * &q * rp(4)
                + poly_n(82, -132, 72, -10) * rp(2)
                + poly_n(3, -11, 11, -3),
            int(70) * rp(5) + int(15) * &q * rp(3) + poly_n(28, -53, 33, -5) * rp(1),
            int(56) * rp(2) + int(6) * &q * rp(2) + poly_n(3, -8, 6, -1),
            (&q + int(28) * rp(2)) * rp(1),
            int(8) * rp(2),
            -rp(1),
        ],
        Basis::Centered => vec![
            poly_n(-3, 5, -2, 0) * rp(1),
            poly_n(-1, 0, 2, -1),
            poly_n(-10, 13, -4, 0) * rp(1),
            poly_n(3, -11, 11, -3),
            poly_n(-13, 13, -3, 0) * rp(1),
            poly_n(3, -8, 6, -1),
            poly_n(-7, 5, -1, 0) * rp(1),
            BigRational::zero(),
            -rp(1),
        ],
    };
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SignVerdict {
    NonpositiveOnRay,
    NonnegativeOnRay,
    /// A sign change of the polynomial inside `[lo, hi]`, in the original variable.
    SignChange {
        lo: String,
        hi: String,
        lo_f64: f64,
        hi_f64: f64,
    },
}

impl SignVerdict {
    pub fn is_nonpositive(&self) -> bool {
        matches!(self, SignVerdict::NonpositiveOnRay)
    }

    pub fn bracket(&self) -> Option<(BigRational, BigRational)> {
        match self {
            SignVerdict::SignChange { lo, hi, .. } => {
                Some((parse_rational(lo).ok()?, parse_rational(hi).ok()?))
            }
            _ => None,
        }
    }
}

fn sign(x: &BigRational) -> Ordering {
    x.cmp(&BigRational::zero())
}

fn sturm_chain(p: &RationalPolynomial) -> Vec<RationalPolynomial> {
    let mut chain = vec![p.clone(), p.derivative()];
    while !chain.last().unwrap().is_zero() {
        let k = chain.len();
        let (_, r) = chain[k - 2].div_rem(&chain[k - 1]);
        chain.push(-&r);
    }
    chain.pop();
    chain
}

fn variations(chain: &[RationalPolynomial], x: &BigRational) -> usize {
    let signs: Vec<Ordering> = chain
        .iter()
        .map(|q| sign(&q.eval(x)))
        .filter(|s| *s != Ordering::Equal)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

// Distinct roots of a squarefree `g` in (lo, hi], given g(lo) != 0.
fn roots_between(chain: &[RationalPolynomial], lo: &BigRational, hi: &BigRational) -> usize {
    variations(chain, lo) - variations(chain, hi)
}

/// Upper bound on the absolute value of every root.
fn cauchy_bound(p: &RationalPolynomial) -> BigRational {
    let lead = p.leading().abs();
    let max = p.coeffs[..p.coeffs.len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(BigRational::zero);
    BigRational::one() + max
}

// Isolating intervals (lo, hi] of the roots of squarefree `g` in (0, bound], with
// endpoints that are not roots, in increasing order.
fn isolate(g: &RationalPolynomial, bound: &BigRational) -> Vec<(BigRational, BigRational)> {
    let chain = sturm_chain(g);
    let mut out = vec![];
    let mut stack = vec![(BigRational::zero(), bound.clone())];
    let two = int(2);
    while let Some((lo, hi)) = stack.pop() {
        let k = roots_between(&chain, &lo, &hi);
        if k == 0 {
            continue;
        }
        if k == 1 {
            out.push((lo, hi));
            continue;
        }
        let mut mid = (&lo + &hi) / &two;
        // keep endpoints off the roots
        let mut nudge = (&hi - &lo) / int(7);
        while g.eval(&mid).is_zero() {
            mid += &nudge;
            nudge /= &two;
        }
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Sign of `p` on `[a, infinity)`, decided exactly.
///
/// The polynomial is shifted to base `a`, factors of the new variable are
/// removed, and the remaining roots on the open ray are isolated by Sturm
/// sequences. A sign change is reported with a bracket of width at most `1e-9`.
pub fn nonpositive_on_ray(p: &RationalPolynomial, a: &BigRational) -> SignVerdict {
    let q = taylor_shift(p, a);
    if q.is_zero() {
        return SignVerdict::NonpositiveOnRay;
    }
    let k = q.coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let q = RationalPolynomial::new(q.coeffs[k..].to_vec());
    let nonzero: Vec<Ordering> = q
        .coeffs
        .iter()
        .map(sign)
        .filter(|s| *s != Ordering::Equal)
        .collect();
    if nonzero.iter().all(|s| *s == Ordering::Less) {
        return SignVerdict::NonpositiveOnRay;
    }
    if nonzero.iter().all(|s| *s == Ordering::Greater) {
        return SignVerdict::NonnegativeOnRay;
    }
    let g = {
        let d = q.gcd(&q.derivative());
        q.div_rem(&d).0
    };
    let bound = cauchy_bound(&q);
    let isolated = isolate(&g, &bound);
    // one sample below the first root, then one past each root
    let mut points = vec![BigRational::zero()];
    points.extend(isolated.iter().map(|(_, hi)| hi.clone()));
    let signs: Vec<Ordering> = points.iter().map(|x| sign(&q.eval(x))).collect();
    if signs.iter().all(|s| *s == Ordering::Less) {
        return SignVerdict::NonpositiveOnRay;
    }
    if signs.iter().all(|s| *s == Ordering::Greater) {
        return SignVerdict::NonnegativeOnRay;
    }
    let i = signs
        .windows(2)
        .position(|w| w[0] != w[1])
        .expect("mixed signs");
    let (mut lo, mut hi) = (points[i].clone(), points[i + 1].clone());
    let s_lo = signs[i];
    let width = rat(1, 1_000_000_000);
    let two = int(2);
    while &hi - &lo > width {
        let mid = (&lo + &hi) / &two;
        match sign(&q.eval(&mid)) {
            Ordering::Equal => {
                // exact rational root: shrink symmetrically around it
                let mut h = (&hi - &lo) / int(4);
                while h > &width / &two {
                    h /= &two;
                }
                loop {
                    let (l, u) = (&mid - &h, &mid + &h);
                    let (sl, su) = (sign(&q.eval(&l)), sign(&q.eval(&u)));
                    if sl == s_lo && su != s_lo && su != Ordering::Equal {
                        lo = l;
                        hi = u;
                        break;
                    }
                    h /= &two;
                }
                break;
            }
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    // keep the lower endpoint strictly inside the ray when it touches the base
    if lo.is_zero() && k > 0 {
        let mut l = &hi / &two;
        while sign(&q.eval(&l)) != s_lo {
            l = &l / &two;
        }
        lo = l;
    }
    let (lo, hi) = (lo + a, hi + a);
    SignVerdict::SignChange {
        lo_f64: to_f64(&lo),
        hi_f64: to_f64(&hi),
        lo: lo.to_string(),
        hi: hi.to_string(),
    }
}

/// Compares `q` with `c * p` for a positive rational `c` fixed by the leading terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub proportional: bool,
    /// `lead(q) / lead(p)` when both are nonzero.
    pub factor: Option<String>,
    pub mismatches: Vec<CoefficientDiff>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDiff {
    pub k: usize,
    pub printed: String,
    pub expected: String,
    /// `printed / expected` when `expected` is nonzero.
    pub ratio: Option<String>,
}

pub fn compare_up_to_factor(
    printed: &RationalPolynomial,
    reference: &RationalPolynomial,
) -> Comparison {
    let factor = if printed.is_zero() || reference.is_zero() {
        None
    } else {
        Some(printed.leading() / reference.leading())
    };
    let scaled = match &factor {
        Some(f) => reference.scale(f),
        None => reference.clone(),
    };
    let len = printed.coeffs.len().max(scaled.coeffs.len());
    let mismatches: Vec<CoefficientDiff> = (0..len)
        .filter(|&k| printed.coeff(k) != scaled.coeff(k))
        .map(|k| {
            let (p, e) = (printed.coeff(k), scaled.coeff(k));
            CoefficientDiff {
                k,
                ratio: if e.is_zero() {
                    None
                } else {
                    Some((&p / &e).to_string())
                },
                printed: p.to_string(),
                expected: e.to_string(),
            }
        })
        .collect();
    let positive = factor.as_ref().is_some_and(|f| f.is_positive());
    Comparison {
        proportional: positive && mismatches.is_empty(),
        factor: factor.map(|f| f.to_string()),
        mismatches,
    }
}

/// Audit of the printed tables against each other and against the derivation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableAudit {
    pub n: usize,
    pub r_star: String,
    /// Printed origin table shifted to `R*`, against the printed centered table.
    pub shifted_origin_vs_centered: Comparison,
    /// Printed centered table against the derived polynomial in the centered basis.
    pub centered_vs_derived: Comparison,
    /// Printed origin table against the derived polynomial.
    pub origin_vs_derived: Comparison,
    /// Signs of the derived centered coefficients: all `<= 0`, all `>= 0`, or mixed.
    pub derived_centered_signs: String,
    pub derived_centered: Vec<String>,
}

pub fn audit_tables(n: usize, r_star: &BigRational) -> Result<TableAudit> {
    let origin = RationalPolynomial::new(paper_coefficients(n, r_star, Basis::Origin)?);
    let centered = RationalPolynomial::new(paper_coefficients(n, r_star, Basis::Centered)?);
    let derived = derive_polynomial(n, r_star)?;
    let derived_c = taylor_shift(&derived, r_star);
    Ok(TableAudit {
        n,
        r_star: r_star.to_string(),
        shifted_origin_vs_centered: compare_up_to_factor(&taylor_shift(&origin, r_star), &centered),
        centered_vs_derived: compare_up_to_factor(&centered, &derived_c),
        origin_vs_derived: compare_up_to_factor(&origin, &derived),
        derived_centered_signs: coefficient_signs(&derived_c).to_string(),
        derived_centered: derived_c.to_strings(),
    })
}

fn coefficient_signs(p: &RationalPolynomial) -> &'static str {
    if p.coeffs.iter().all(|c| !c.is_positive()) {
        "nonpositive"
    } else if p.coeffs.iter().all(|c| !c.is_negative()) {
        "nonnegative"
    } else {
        "mixed"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaEntry {
    pub n: usize,
    pub r_star: String,
    pub verdict: SignVerdict,
    /// For `n >= 5`: whether every centered coefficient of the derived polynomial is `<= 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centered_nonpositive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub entries: Vec<LemmaEntry>,
    /// Entries whose verdict is not nonpositive.
    pub counterexamples: Vec<LemmaEntry>,
    pub all_nonpositive: bool,
}

/// Sign verdicts of the derived polynomial on `[R*, infinity)` over a grid.
pub fn verify_lemmas(n_set: &[usize], r_star_grid: &[BigRational]) -> Result<LemmaReport> {
    for &n in n_set {
        check_n(n)?;
    }
    let jobs: Vec<(usize, &BigRational)> = n_set
        .iter()
        .flat_map(|&n| r_star_grid.iter().map(move |r| (n, r)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|&(n, r)| {
            let p = derive_polynomial(n, r)?;
            let centered = taylor_shift(&p, r);
            Ok(LemmaEntry {
                n,
                r_star: r.to_string(),
                verdict: nonpositive_on_ray(&p, r),
                centered_nonpositive: (n >= 5)
                    .then(|| coefficient_signs(&centered) == "nonpositive"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let counterexamples: Vec<LemmaEntry> = entries
        .iter()
        .filter(|e| !e.verdict.is_nonpositive())
        .cloned()
        .collect();
    Ok(LemmaReport {
        all_nonpositive: counterexamples.is_empty(),
        counterexamples,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> RationalPolynomial {
        RationalPolynomial::from_ints(c)
    }

    #[test]
    fn shift_examples() {
        assert_eq!(taylor_shift(&poly(&[0, 0, 1]), &int(1)), poly(&[1, 2, 1]));
        let p = poly(&[3, -1, 4, 1, -5, 9]);
        let a = rat(-7, 3);
        assert_eq!(taylor_shift(&taylor_shift(&p, &a), &-a.clone()), p);
    }

    #[test]
    fn arithmetic_and_division() {
        let a = poly(&[1, 1]);
        let b = poly(&[-1, 1]);
        assert_eq!(&a * &b, poly(&[-1, 0, 1]));
        let (q, r) = poly(&[-1, 0, 1]).div_rem(&b);
        assert_eq!(q, a);
        assert!(r.is_zero());
        let g = (&(&a * &a) * &b).gcd(&(&a * &poly(&[2, 1])));
        assert_eq!(g, a);
        assert_eq!(poly(&[1, 2, 3]).derivative(), poly(&[2, 6]));
        assert_eq!(a.pow(3), poly(&[1, 3, 3, 1]));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-2.25").unwrap(), rat(-9, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn tau_and_psi_examples() {
        let r0 = int(0);
        assert_eq!(tau_eval(3, &int(2), 2.0), 0.0);
        let (d1, _) = tau_derivatives(3, &int(2), &int(2));
        assert!(d1.is_zero());
        assert!((tau_eval(2, &r0, 1.0) - (0.5 - 0.5 * 2f64.ln())).abs() < 1e-15);
        assert!((tau_eval(2, &r0, 1.0) - 0.1534).abs() < 1e-4);
        // at r = R*: tau'' - 1 = 1/(n-1) - 2
        let v = psi_tau_exact(2, &int(1), &int(1)).unwrap();
        assert_eq!(v, int(-1));
        let v = psi_tau_exact(4, &int(3), &int(3)).unwrap();
        assert_eq!(v, rat(1, 3) - int(2));
        let c = psi(2, (|_| 4.0, |_| 0.0, |_| 0.0), 1.5).unwrap();
        assert_eq!(c, -1.0);
        assert!(psi(2, (|_| 0.0, |_| 0.0, |_| 0.0), 0.0).is_err());
    }

    #[test]
    fn derived_matches_clearing_identity() {
        for n in [2usize, 3, 5, 8] {
            for r_star in [int(0), rat(1, 2), int(3)] {
                let p = derive_polynomial(n, &r_star).unwrap();
                assert_eq!(p.degree() == Some(8), !r_star.is_zero());
                for r in [rat(1, 3), int(1), rat(7, 2), int(11)] {
                    let lhs = p.eval(&r);
                    let rhs =
                        clearing_factor(n, &r_star, &r) * psi_tau_exact(n, &r_star, &r).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn printed_centered_table_examples() {
        let d = paper_coefficients(5, &int(1), Basis::Centered).unwrap();
        let expect: Vec<BigRational> = [-28, -76, -45, -152, -23, -12, -7, 0, -1]
            .iter()
            .map(|&v| int(v))
            .collect();
        assert_eq!(d, expect);
        let d = paper_coefficients(2, &int(1), Basis::Centered).unwrap();
        assert_eq!(d[3], int(1));
        assert_eq!(d[5], int(3));
        for n in 2..9 {
            let d = paper_coefficients(n, &rat(5, 2), Basis::Centered).unwrap();
            assert!(d[7].is_zero());
            assert_eq!(d[8], rat(-5, 2));
        }
    }

    #[test]
    fn verdict_examples() {
        assert_eq!(
            nonpositive_on_ray(&poly(&[2, -1]), &int(2)),
            SignVerdict::NonpositiveOnRay
        );
        // (r - 2)^2 - 1 from a = 2: root at 3
        let p = poly(&[3, -4, 1]);
        let v = nonpositive_on_ray(&p, &int(2));
        let (lo, hi) = v.bracket().unwrap();
        assert!(lo <= int(3) && int(3) <= hi && &hi - &lo <= rat(1, 1_000_000_000));
        assert_ne!(sign(&p.eval(&lo)), sign(&p.eval(&hi)));
        assert_eq!(
            nonpositive_on_ray(&poly(&[1, 0, 1]), &int(0)),
            SignVerdict::NonnegativeOnRay
        );
        // touching root of even multiplicity does not change sign
        let touch = -&(&poly(&[-1, 1]) * &poly(&[-1, 1]));
        assert_eq!(
            nonpositive_on_ray(&touch, &int(0)),
            SignVerdict::NonpositiveOnRay
        );
        assert_eq!(
            nonpositive_on_ray(&RationalPolynomial::zero(), &int(0)),
            SignVerdict::NonpositiveOnRay
        );
    }

    #[test]
    fn subcritical_counterexample_brackets_quartic_root() {
        let p = derive_polynomial(2, &int(0)).unwrap();
        // s (3 s^4 + s^2 - 1) up to sign
        let v = nonpositive_on_ray(&p, &int(0));
        let (lo, hi) = v.bracket().unwrap();
        let root = ((13f64.sqrt() - 1.0) / 6.0).sqrt();
        assert!(to_f64(&lo) <= root && root <= to_f64(&hi), "{v:?}");
        assert!(to_f64(&(&hi - &lo)) <= 1e-9);
        assert!((root - 0.6588).abs() < 1e-3);
    }

    #[test]
    fn lemma_grid_small() {
        let rep = verify_lemmas(&[5, 6], &[int(0), int(1), int(4)]).unwrap();
        assert!(rep.all_nonpositive);
        assert!(rep
            .entries
            .iter()
            .all(|e| e.centered_nonpositive == Some(true)));
        let rep = verify_lemmas(&[2], &[int(0)]).unwrap();
        assert!(!rep.all_nonpositive);
        assert_eq!(rep.counterexamples.len(), 1);
    }
}
