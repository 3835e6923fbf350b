//! Exact scalar and parameter-polynomial arithmetic.
//!
//! Scalars are Gaussian rationals: complex numbers whose real and imaginary
//! parts are arbitrary-precision rationals. Parameter polynomials live in
//! the Laurent ring `Q(i)[k, k^-1, u]` where `k` is the deformation
//! parameter and `u` stands for the squared radius; the defining relations
//! involve the radius only through its square, so `u` is the natural
//! variable and matrix specializations `u = (N^2-1)/4` stay rational.
//!
//! Monomials carry a weight `w(k^i u^j) = i + 2j`; together with
//! `w(Jp) = w(Jm) = w(z) = 1` every defining relation is weight
//! homogeneous. [`weight_lift`] uses that grading to restore the full
//! `k`-dependence of a coefficient from its `k = 1` specialization.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Rational from an integer pair. Panics on zero denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A complex number with exact rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn zero() -> Self {
        GaussRational::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussRational::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussRational::from_rational(BigRational::from(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRational::from_rational(ratio(num, den))
    }

    pub fn from_rational(re: BigRational) -> Self {
        GaussRational::new(re, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        GaussRational::new(self.re.clone(), -self.im.clone())
    }

    pub fn neg(&self) -> Self {
        GaussRational::new(-self.re.clone(), -self.im.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        GaussRational::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &Self) -> Self {
        GaussRational::new(&self.re - &other.re, &self.im - &other.im)
    }

    pub fn mul(&self, other: &Self) -> Self {
        GaussRational::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        GaussRational::new(&self.re * r, &self.im * r)
    }

    /// Exact division. Panics on a zero divisor; callers guard.
    pub fn div(&self, other: &Self) -> Self {
        let norm = &other.re * &other.re + &other.im * &other.im;
        assert!(!norm.is_zero(), "GaussRational division by zero");
        let num = self.mul(&other.conj());
        GaussRational::new(num.re / &norm, num.im / &norm)
    }

    pub fn inv(&self) -> Self {
        GaussRational::one().div(self)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussRational::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Lossy conversion for the numeric sphere layer.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders the imaginary part together with `i`: `i`, `-i`, `2/3*i`.
fn fmt_imag(im: &BigRational) -> String {
    if im.is_one() {
        "i".to_string()
    } else if (-im).is_one() {
        "-i".to_string()
    } else {
        format!("{}*i", fmt_rational(im))
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}", fmt_imag(&self.im));
        }
        if self.im.is_negative() {
            write!(f, "{}-{}", fmt_rational(&self.re), fmt_imag(&(-self.im.clone())))
        } else {
            write!(f, "{}+{}", fmt_rational(&self.re), fmt_imag(&self.im))
        }
    }
}

/// A Laurent polynomial in `k` and ordinary polynomial in `u` over the
/// Gaussian rationals. Keys are `(k exponent, u exponent)`; `u` exponents
/// are never negative and zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamPoly {
    terms: BTreeMap<(i64, i64), GaussRational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }

    pub fn one() -> Self {
        ParamPoly::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> Self {
        ParamPoly::monomial(0, 0, c)
    }

    pub fn from_int(n: i64) -> Self {
        ParamPoly::constant(GaussRational::from_int(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        ParamPoly::constant(GaussRational::from_ratio(num, den))
    }

    pub fn kappa() -> Self {
        ParamPoly::monomial(1, 0, GaussRational::one())
    }

    pub fn u() -> Self {
        ParamPoly::monomial(0, 1, GaussRational::one())
    }

    pub fn monomial(k_exp: i64, u_exp: i64, c: GaussRational) -> Self {
        assert!(u_exp >= 0, "negative u exponent");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((k_exp, u_exp), c);
        }
        ParamPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &GaussRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k_exp: i64, u_exp: i64) -> GaussRational {
        self.terms
            .get(&(k_exp, u_exp))
            .cloned()
            .unwrap_or_else(GaussRational::zero)
    }

    pub fn add_term(&mut self, key: (i64, i64), c: &GaussRational) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(key)
            .or_insert_with(GaussRational::zero);
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.add_term(*key, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (*k, c.neg()))
            .collect();
        ParamPoly { terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = ParamPoly::zero();
        for ((k1, u1), c1) in &self.terms {
            for ((k2, u2), c2) in &other.terms {
                out.add_term((k1 + k2, u1 + u2), &c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (*k, v.mul(c)))
            .collect();
        ParamPoly { terms }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.scale(&GaussRational::from_rational(r.clone()))
    }

    /// Multiplies by `k^e` (Laurent shift).
    pub fn mul_kappa(&self, e: i64) -> Self {
        self.mul_monomial(e, 0)
    }

    /// Multiplies by the monomial `k^ke u^ue`: a key shift, no scalar
    /// arithmetic.
    pub fn mul_monomial(&self, ke: i64, ue: i64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|((k, u), c)| {
                debug_assert!(u + ue >= 0);
                ((k + ke, u + ue), c.clone())
            })
            .collect();
        ParamPoly { terms }
    }

    /// Conjugation treats `k` and `u` as real: coefficients conjugate.
    pub fn conjugate(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (*k, c.conj()))
            .collect();
        ParamPoly { terms }
    }

    /// Substitutes `k = k0`, `u = u0` exactly. Fails only when a negative
    /// `k` exponent meets `k0 = 0`. Powers are built incrementally, once
    /// per call.
    pub fn eval(&self, k0: &BigRational, u0: &BigRational) -> Result<GaussRational> {
        if self.terms.is_empty() {
            return Ok(GaussRational::zero());
        }
        let max_u = self.terms.keys().map(|(_, u)| *u).max().unwrap_or(0);
        let mut u_pows: Vec<BigRational> = Vec::with_capacity(max_u as usize + 1);
        u_pows.push(BigRational::one());
        for e in 1..=max_u as usize {
            u_pows.push(&u_pows[e - 1] * u0);
        }
        let k_one = k0.is_one();
        let min_k = self.terms.keys().map(|(k, _)| *k).min().unwrap_or(0);
        let max_k = self.terms.keys().map(|(k, _)| *k).max().unwrap_or(0);
        if min_k < 0 && k0.is_zero() {
            return Err(Error::DivisionByZero(
                "k = 0 meets a negative k exponent".into(),
            ));
        }
        let mut k_pos: Vec<BigRational> = vec![BigRational::one()];
        if !k_one {
            for _ in 1..=max_k.max(0) {
                k_pos.push(k_pos.last().unwrap() * k0);
            }
        }
        let mut k_neg: Vec<BigRational> = vec![BigRational::one()];
        if !k_one && min_k < 0 {
            let k_inv = BigRational::one() / k0;
            for _ in 1..=(-min_k) {
                k_neg.push(k_neg.last().unwrap() * &k_inv);
            }
        }
        let mut acc = GaussRational::zero();
        for ((ke, ue), c) in &self.terms {
            let mut factor = u_pows[*ue as usize].clone();
            if !k_one {
                if *ke >= 0 {
                    factor *= &k_pos[*ke as usize];
                } else {
                    factor *= &k_neg[(-*ke) as usize];
                }
            }
            acc = acc.add(&c.scale(&factor));
        }
        Ok(acc)
    }

    /// Smallest `k` exponent present, if any.
    pub fn min_kappa_exp(&self) -> Option<i64> {
        self.terms.keys().map(|(k, _)| *k).min()
    }

    pub fn max_u_exp(&self) -> i64 {
        self.terms.keys().map(|(_, u)| *u).max().unwrap_or(0)
    }

    /// The common weight `k_exp + 2 u_exp` of all monomials, if it exists.
    pub fn homogeneous_weight(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|(k, u)| k + 2 * u);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Splits into weight-homogeneous parts keyed by weight.
    pub fn split_by_weight(&self) -> BTreeMap<i64, ParamPoly> {
        let mut out: BTreeMap<i64, ParamPoly> = BTreeMap::new();
        for ((k, u), c) in &self.terms {
            out.entry(k + 2 * u)
                .or_insert_with(ParamPoly::zero)
                .add_term((*k, *u), c);
        }
        out
    }

    /// Specializes `k = 1`, producing a univariate polynomial in `u`.
    pub fn at_kappa_one(&self) -> UPoly {
        let mut coeffs: BTreeMap<i64, GaussRational> = BTreeMap::new();
        for ((_, u), c) in &self.terms {
            let entry = coeffs.entry(*u).or_insert_with(GaussRational::zero);
            *entry = entry.add(c);
        }
        let deg = coeffs.keys().max().copied().unwrap_or(0);
        let mut v = vec![GaussRational::zero(); (deg + 1) as usize];
        for (u, c) in coeffs {
            v[u as usize] = c;
        }
        UPoly::new(v)
    }

    /// Keeps only the `k^0` part (the value at `k = 0`, as a polynomial in
    /// `u`). Returns `None` when a negative `k` exponent is present.
    pub fn at_kappa_zero(&self) -> Option<UPoly> {
        if self.min_kappa_exp().map_or(false, |m| m < 0) {
            return None;
        }
        let mut v: Vec<GaussRational> = Vec::new();
        for ((k, u), c) in &self.terms {
            if *k != 0 {
                continue;
            }
            let idx = *u as usize;
            if v.len() <= idx {
                v.resize(idx + 1, GaussRational::zero());
            }
            v[idx] = v[idx].add(c);
        }
        Some(UPoly::new(v))
    }

    /// True when no `k` appears at all (pure `u` polynomial).
    pub fn is_kappa_free(&self) -> bool {
        self.terms.keys().all(|(k, _)| *k == 0)
    }

    /// Exact division when the divisor, viewed as a polynomial in `u`, has
    /// an invertible (single-monomial) leading coefficient. Returns `None`
    /// if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &ParamPoly) -> Option<ParamPoly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        // Leading u-coefficient of the divisor must be a single k-monomial.
        let dv_deg = divisor.max_u_exp();
        let lead: Vec<_> = divisor
            .terms
            .iter()
            .filter(|((_, u), _)| *u == dv_deg)
            .collect();
        if lead.len() != 1 {
            return None;
        }
        let (&(lead_k, _), lead_c) = lead[0];
        let lead_inv = lead_c.inv();

        let mut rem = self.clone();
        let mut quot = ParamPoly::zero();
        loop {
            if rem.is_zero() {
                return Some(quot);
            }
            let rd = rem.max_u_exp();
            if rd < dv_deg {
                return None;
            }
            // Peel every monomial at the top u-degree.
            let top: Vec<((i64, i64), GaussRational)> = rem
                .terms
                .iter()
                .filter(|((_, u), _)| *u == rd)
                .map(|(k, c)| (*k, c.clone()))
                .collect();
            for ((ke, _), c) in top {
                let q = ParamPoly::monomial(ke - lead_k, rd - dv_deg, c.mul(&lead_inv));
                quot = quot.add(&q);
                rem = rem.sub(&q.mul(divisor));
            }
            if rem.max_u_exp() >= rd && !rem.is_zero() {
                // No progress: remainder.
                return None;
            }
        }
    }
}

impl fmt::Display for ParamPoly {
    /// Renders e.g. `1/12*k^-2 + 2/3*u`; terms ascend in `(k, u)` exponent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((ke, ue), c) in &self.terms {
            let body = monomial_string(*ke, *ue, c);
            if first {
                write!(f, "{body}")?;
                first = false;
            } else if let Some(stripped) = body.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

fn monomial_string(ke: i64, ue: i64, c: &GaussRational) -> String {
    let mut factors: Vec<String> = Vec::new();
    if ke != 0 {
        factors.push(if ke == 1 { "k".into() } else { format!("k^{ke}") });
    }
    if ue != 0 {
        factors.push(if ue == 1 { "u".into() } else { format!("u^{ue}") });
    }
    let cs = c.to_string();
    if factors.is_empty() {
        return cs;
    }
    let tail = factors.join("*");
    if cs == "1" {
        tail
    } else if cs == "-1" {
        format!("-{tail}")
    } else if !c.re.is_zero() && !c.im.is_zero() {
        format!("({cs})*{tail}")
    } else {
        format!("{cs}*{tail}")
    }
}

/// A dense univariate polynomial over the Gaussian rationals. Used both
/// for polynomials in `u` (interpolation targets) and in `z` (Hahn
/// polynomials, sector polynomials).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<GaussRational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<GaussRational>) -> Self {
        while coeffs.last().map_or(false, GaussRational::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly::new(vec![GaussRational::one()])
    }

    pub fn constant(c: GaussRational) -> Self {
        UPoly::new(vec![c])
    }

    /// The variable itself.
    pub fn var() -> Self {
        UPoly::new(vec![GaussRational::zero(), GaussRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, e: usize) -> GaussRational {
        self.coeffs.get(e).cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> GaussRational {
        self.coeffs.last().cloned().unwrap_or_else(GaussRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for idx in 0..n {
            v.push(self.coeff(idx).add(&other.coeff(idx)));
        }
        UPoly::new(v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&GaussRational::from_int(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![GaussRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            for (b, cb) in other.coeffs.iter().enumerate() {
                v[a + b] = v[a + b].add(&ca.mul(cb));
            }
        }
        UPoly::new(v)
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        UPoly::new(self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn eval(&self, at: &GaussRational) -> GaussRational {
        let mut acc = GaussRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(e, c)| c.scale(&BigRational::from(BigInt::from(e as i64))))
            .collect();
        UPoly::new(v)
    }

    /// Promotes to a [`ParamPoly`] in the `u` variable.
    pub fn to_param_in_u(&self) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (e, c) in self.coeffs.iter().enumerate() {
            out.add_term((0, e as i64), c);
        }
        out
    }
}

/// Exact Newton interpolation through `samples = (u_i, value_i)`.
///
/// All samples participate; the result is the unique polynomial through
/// every sample. Errors with [`Error::DuplicateNode`] on repeated nodes and
/// with [`Error::DegreeExceeded`] when that polynomial has degree above
/// `degree_bound` (which signals a wrong bound upstream, not a data issue).
pub fn poly_interpolate(
    samples: &[(BigRational, GaussRational)],
    degree_bound: usize,
) -> Result<UPoly> {
    for (idx, (x, _)) in samples.iter().enumerate() {
        for (x2, _) in &samples[idx + 1..] {
            if x == x2 {
                return Err(Error::DuplicateNode(fmt_rational(x)));
            }
        }
    }
    if samples.is_empty() {
        return Ok(UPoly::zero());
    }

    // Divided differences.
    let xs: Vec<GaussRational> = samples
        .iter()
        .map(|(x, _)| GaussRational::from_rational(x.clone()))
        .collect();
    let mut table: Vec<GaussRational> = samples.iter().map(|(_, v)| v.clone()).collect();
    let mut newton_coeffs = vec![table[0].clone()];
    for level in 1..samples.len() {
        for idx in 0..(samples.len() - level) {
            let num = table[idx + 1].sub(&table[idx]);
            let den = xs[idx + level].sub(&xs[idx]);
            table[idx] = num.div(&den);
        }
        table.truncate(samples.len() - level);
        newton_coeffs.push(table[0].clone());
    }

    // Expand the Newton form.
    let mut poly = UPoly::zero();
    let mut basis = UPoly::one();
    for (idx, c) in newton_coeffs.iter().enumerate() {
        poly = poly.add(&basis.scale(c));
        if idx < xs.len() {
            let factor = UPoly::new(vec![xs[idx].neg(), GaussRational::one()]);
            basis = basis.mul(&factor);
        }
    }

    if !poly.is_zero() && poly.degree() > degree_bound {
        return Err(Error::DegreeExceeded {
            bound: degree_bound,
            got: poly.degree(),
        });
    }
    Ok(poly)
}

/// Restores `k`-dependence from a `k = 1` specialization of a
/// weight-homogeneous quantity: each monomial `c u^e` becomes
/// `c k^(total_weight - word_degree - 2e) u^e`. The result may be Laurent
/// in `k`.
pub fn weight_lift(q: &UPoly, total_weight: i64, word_degree: i64) -> ParamPoly {
    let mut out = ParamPoly::zero();
    for (e, c) in q.coeffs().iter().enumerate() {
        let e = e as i64;
        out.add_term((total_weight - word_degree - 2 * e, e), c);
    }
    out
}

/// Factorial as a big rational, for norm constants.
pub fn factorial(n: u64) -> BigRational {
    let mut acc = BigInt::one();
    for v in 2..=n {
        acc *= BigInt::from(v);
    }
    BigRational::from(acc)
}

/// Pochhammer symbol `(a)_n = a (a+1) ... (a+n-1)` over the rationals.
pub fn pochhammer(a: &BigRational, n: u64) -> BigRational {
    let mut acc = BigRational::one();
    for s in 0..n {
        acc *= a + BigRational::from(BigInt::from(s));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn br(n: i64, d: i64) -> BigRational {
        ratio(n, d)
    }

    #[test]
    fn eval_examples() {
        // p = u/3 at (1, 3/4) -> 1/4
        let p = ParamPoly::u().scale(&GaussRational::from_ratio(1, 3));
        assert_eq!(
            p.eval(&br(1, 1), &br(3, 4)).unwrap(),
            GaussRational::from_ratio(1, 4)
        );
        // constants evaluate to themselves
        assert_eq!(
            ParamPoly::one().eval(&br(7, 2), &br(-3, 5)).unwrap(),
            GaussRational::one()
        );
        // k^2*u at (2, 1) -> 4
        let p = ParamPoly::monomial(2, 1, GaussRational::one());
        assert_eq!(p.eval(&br(2, 1), &br(1, 1)).unwrap(), GaussRational::from_int(4));
    }

    #[test]
    fn eval_laurent_at_zero_kappa_fails() {
        let p = ParamPoly::monomial(-2, 0, GaussRational::one());
        assert!(matches!(
            p.eval(&br(0, 1), &br(1, 1)),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn interpolate_examples() {
        // {(0,0),(1,1),(2,4)} with bound 2 -> u^2
        let samples = vec![
            (br(0, 1), GaussRational::zero()),
            (br(1, 1), GaussRational::one()),
            (br(2, 1), GaussRational::from_int(4)),
        ];
        let p = poly_interpolate(&samples, 2).unwrap();
        assert_eq!(p, UPoly::new(vec![
            GaussRational::zero(),
            GaussRational::zero(),
            GaussRational::one(),
        ]));

        // {(1,2/3),(2,4/3),(3,2)} with bound 1 -> (2/3) u
        let samples = vec![
            (br(1, 1), GaussRational::from_ratio(2, 3)),
            (br(2, 1), GaussRational::from_ratio(4, 3)),
            (br(3, 1), GaussRational::from_int(2)),
        ];
        let p = poly_interpolate(&samples, 1).unwrap();
        assert_eq!(
            p,
            UPoly::new(vec![GaussRational::zero(), GaussRational::from_ratio(2, 3)])
        );

        // single sample, bound 0 -> constant
        let samples = vec![(br(0, 1), GaussRational::from_int(5))];
        let p = poly_interpolate(&samples, 0).unwrap();
        assert_eq!(p, UPoly::constant(GaussRational::from_int(5)));
    }

    #[test]
    fn interpolate_errors() {
        let samples = vec![
            (br(1, 1), GaussRational::one()),
            (br(1, 1), GaussRational::from_int(2)),
        ];
        assert!(matches!(
            poly_interpolate(&samples, 3),
            Err(Error::DuplicateNode(_))
        ));

        let samples = vec![
            (br(0, 1), GaussRational::zero()),
            (br(1, 1), GaussRational::one()),
            (br(2, 1), GaussRational::from_int(4)),
        ];
        assert!(matches!(
            poly_interpolate(&samples, 1),
            Err(Error::DegreeExceeded { bound: 1, got: 2 })
        ));
    }

    #[test]
    fn weight_lift_examples() {
        // q = u/3, weight 2, word degree 0 -> u/3 (k^0)
        let q = UPoly::new(vec![GaussRational::zero(), GaussRational::from_ratio(1, 3)]);
        let lifted = weight_lift(&q, 2, 0);
        assert_eq!(lifted, ParamPoly::monomial(0, 1, GaussRational::from_ratio(1, 3)));

        // q = 1/12, weight 2, word degree 2 -> 1/12 (k^0)
        let q = UPoly::constant(GaussRational::from_ratio(1, 12));
        assert_eq!(
            weight_lift(&q, 2, 2),
            ParamPoly::constant(GaussRational::from_ratio(1, 12))
        );
        // same coefficient against a weight-4 component: k^-2/12
        assert_eq!(
            weight_lift(&q, 2, 4),
            ParamPoly::monomial(-2, 0, GaussRational::from_ratio(1, 12))
        );

        // q = 2u/3, weight 4, word degree 0 -> k^2 * 2/3 u
        let q = UPoly::new(vec![GaussRational::zero(), GaussRational::from_ratio(2, 3)]);
        assert_eq!(
            weight_lift(&q, 4, 0),
            ParamPoly::monomial(2, 1, GaussRational::from_ratio(2, 3))
        );
    }

    #[test]
    fn div_exact_recovers_quotient() {
        // (4u + k^2)(u - 3) / (4u + k^2) = u - 3
        let divisor = ParamPoly::u()
            .scale(&GaussRational::from_int(4))
            .add(&ParamPoly::monomial(2, 0, GaussRational::one()));
        let quotient = ParamPoly::u().sub(&ParamPoly::from_int(3));
        let product = divisor.mul(&quotient);
        assert_eq!(product.div_exact(&divisor).unwrap(), quotient);

        // remainder case
        let bad = product.add(&ParamPoly::one());
        assert!(bad.div_exact(&divisor).is_none());
    }

    #[test]
    fn display_matches_interface_form() {
        let p = ParamPoly::monomial(-2, 0, GaussRational::from_ratio(1, 12))
            .add(&ParamPoly::monomial(0, 1, GaussRational::from_ratio(2, 3)));
        assert_eq!(p.to_string(), "1/12*k^-2 + 2/3*u");
        let q = ParamPoly::monomial(1, 0, GaussRational::i());
        assert_eq!(q.to_string(), "i*k");
    }

    fn arb_gauss() -> impl Strategy<Value = GaussRational> {
        ((-20i64..20), (1i64..6), (-20i64..20), (1i64..6))
            .prop_map(|(a, b, c, d)| GaussRational::new(ratio(a, b), ratio(c, d)))
    }

    fn arb_upoly(max_deg: usize) -> impl Strategy<Value = UPoly> {
        prop::collection::vec(arb_gauss(), 1..=max_deg + 1).prop_map(UPoly::new)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn interpolation_round_trip(p in arb_upoly(5)) {
            let deg = p.degree();
            let samples: Vec<_> = (0..=deg as i64)
                .map(|x| {
                    let xr = br(x, 1);
                    let v = p.eval(&GaussRational::from_rational(xr.clone()));
                    (xr, v)
                })
                .collect();
            let q = poly_interpolate(&samples, deg).unwrap();
            prop_assert_eq!(p, q);
        }

        #[test]
        fn conjugation_is_involutive_automorphism(a in arb_gauss(), b in arb_gauss()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
            prop_assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
        }

        #[test]
        fn weight_lift_inverts_kappa_one(q in arb_upoly(4), word_degree in 0i64..6) {
            // Build a weight-homogeneous ParamPoly of known total weight,
            // specialize k = 1, lift back.
            let total_weight = 2 * (q.degree() as i64) + word_degree + 1;
            let lifted = weight_lift(&q, total_weight, word_degree);
            prop_assert!(lifted.is_zero()
                || lifted.homogeneous_weight() == Some(total_weight - word_degree));
            let back = weight_lift(&lifted.at_kappa_one(), total_weight, word_degree);
            prop_assert_eq!(lifted, back);
        }
    }
}
