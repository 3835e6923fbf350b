//! The commutative limit: band-limited functions on the sphere.
//!
//! At the degenerate parameter value the generators become coordinate
//! functions,
//!
//! ```text
//! x = R sin(phi) sin(theta),  y = R cos(phi) sin(theta),  z = R cos(theta),
//! Jp = i e^(-i phi) R sin(theta),   Jm = -i e^(i phi) R sin(theta),
//! ```
//!
//! and the basis elements become spherical harmonics: the normalized
//! element behind `T(n,m)` tends to `(-1)^n Y(n,-m)`. Functions carry two
//! faces here: floating-point harmonic coefficients (for evaluation,
//! quadrature, and the limiting vector fields) and an exact component
//! form `sum_m J^m p_m(z)` with rational coefficients (for the Poisson
//! bracket, which is computed symbolically and only then sampled).
//!
//! Normalization convention: the inner product averages over the sphere,
//! `<F, G> = (1/4pi) int conj(F) G sin(theta) dtheta dphi`, so `Y(0,0) = 1`
//! and `<Y, Y> = 1` without any `4pi` factors. Quadrature is
//! Gauss-Legendre in `cos(theta)` crossed with a uniform trapezoid in
//! `phi`, sized to be exact for the band limit in play. Evaluation grids
//! are midpoint in `theta` (`theta_j = pi (j + 1/2)/n_theta`) and uniform
//! in `phi`.

use crate::basis::{BasisCache, BasisDecomp, LadderOp};
use crate::coeff::{GaussRational, ParamPoly};
use crate::freealg::{nf_mul, NormalForm};
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// Spherical harmonics and quadrature
// ---------------------------------------------------------------------------

/// Associated Legendre function with the Condon-Shortley phase, `m >= 0`.
fn assoc_legendre(n: u32, m: u32, x: f64) -> f64 {
    assert!(m <= n);
    // P(m, m) = (-1)^m (2m-1)!! (1 - x^2)^(m/2)
    let mut pmm = 1.0;
    if m > 0 {
        let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
        let mut fact = 1.0;
        for _ in 0..m {
            pmm *= -fact * somx2;
            fact += 2.0;
        }
    }
    if n == m {
        return pmm;
    }
    // P(m+1, m) = x (2m+1) P(m, m)
    let mut pmmp1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if n == m + 1 {
        return pmmp1;
    }
    // upward recurrence in the degree
    let mut pnm = 0.0;
    for degree in (m + 2)..=n {
        let d = degree as f64;
        let mf = m as f64;
        pnm = (x * (2.0 * d - 1.0) * pmmp1 - (d + mf - 1.0) * pmm) / (d - mf);
        pmm = pmmp1;
        pmmp1 = pnm;
    }
    pnm
}

fn factorial_f64(n: u32) -> f64 {
    (1..=n as u64).map(|v| v as f64).product::<f64>().max(1.0)
}

/// Orthonormal spherical harmonic under the averaged inner product:
/// `Y(0,0) = 1`, `<Y(n,m), Y(n,m)> = 1`.
pub fn ylm(n: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > n {
        return Err(Error::DomainError(format!(
            "ylm requires |m| <= n, got n={n}, m={m}"
        )));
    }
    let ma = m.unsigned_abs();
    let norm =
        ((2.0 * n as f64 + 1.0) * factorial_f64(n - ma) / factorial_f64(n + ma)).sqrt();
    let p = assoc_legendre(n, ma, theta.cos());
    let positive = norm * p * Complex64::new(0.0, ma as f64 * phi).exp();
    if m >= 0 {
        Ok(positive)
    } else {
        // Y(n,-m) = (-1)^m conj(Y(n,m))
        let sign = if ma % 2 == 0 { 1.0 } else { -1.0 };
        Ok(positive.conj() * sign)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    for i in 0..count {
        let mut x = (PI * (i as f64 + 0.75) / (count as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre value and derivative by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=count {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let deriv = count as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / deriv;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let mut p0 = 1.0;
        let mut p1 = x;
        for k in 2..=count {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let deriv = count as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * deriv * deriv);
    }
    (nodes, weights)
}

/// Midpoint-in-theta, uniform-in-phi evaluation grid.
pub fn grid(n_theta: usize, n_phi: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for j in 0..n_theta {
        let theta = PI * (j as f64 + 0.5) / n_theta as f64;
        for k in 0..n_phi {
            out.push((theta, 2.0 * PI * k as f64 / n_phi as f64));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Exact component form
// ---------------------------------------------------------------------------

/// Polynomial in `z` with `u`-polynomial coefficients (no `k` anywhere).
type ZPoly = Vec<ParamPoly>;

fn zp_trim(p: &mut ZPoly) {
    while p.last().map_or(false, ParamPoly::is_zero) {
        p.pop();
    }
}

fn zp_add(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = vec![ParamPoly::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] = out[i].add(c);
    }
    for (i, c) in b.iter().enumerate() {
        out[i] = out[i].add(c);
    }
    zp_trim(&mut out);
    out
}

fn zp_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ParamPoly::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ca.mul(cb));
        }
    }
    zp_trim(&mut out);
    out
}

fn zp_scale(a: &ZPoly, c: &GaussRational) -> ZPoly {
    let mut out: ZPoly = a.iter().map(|v| v.scale(c)).collect();
    zp_trim(&mut out);
    out
}

fn zp_derivative(a: &ZPoly) -> ZPoly {
    let mut out = Vec::new();
    for (i, c) in a.iter().enumerate().skip(1) {
        out.push(c.scale(&GaussRational::from_int(i as i64)));
    }
    zp_trim(&mut out);
    out
}

fn zp_conj(a: &ZPoly) -> ZPoly {
    a.iter().map(ParamPoly::conjugate).collect()
}

/// `u - z^2`, the image of `Jp Jm` on the sphere.
fn u_minus_z2() -> ZPoly {
    vec![ParamPoly::u(), ParamPoly::zero(), ParamPoly::from_int(-1)]
}

fn zp_pow(base: &ZPoly, e: u32) -> ZPoly {
    let mut acc = vec![ParamPoly::one()];
    for _ in 0..e {
        acc = zp_mul(&acc, base);
    }
    acc
}

/// Exact component form of a sphere function: a sum of terms
/// `Jp^m p_m(z)` (`m > 0`), `p_0(z)`, `Jm^-m p_m(z)` (`m < 0`), all
/// commutative.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JForm {
    comps: BTreeMap<i64, ZPoly>,
}

impl JForm {
    pub fn zero() -> Self {
        JForm::default()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&i64, &ZPoly)> {
        self.comps.iter()
    }

    pub fn add_component(&mut self, m: i64, poly: ZPoly) {
        if poly.is_empty() {
            return;
        }
        let entry = self.comps.entry(m).or_default();
        *entry = zp_add(entry, &poly);
        if entry.is_empty() {
            self.comps.remove(&m);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, poly) in &other.comps {
            out.add_component(m, poly.clone());
        }
        out
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        let mut out = JForm::zero();
        for (&m, poly) in &self.comps {
            out.add_component(m, zp_scale(poly, c));
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = JForm::zero();
        for (&m, poly) in &self.comps {
            out.add_component(-m, zp_conj(poly));
        }
        out
    }

    /// Scales by a `u`-polynomial coefficient.
    pub fn scale_param(&self, c: &ParamPoly) -> Self {
        let mut out = JForm::zero();
        for (&m, poly) in &self.comps {
            let mut scaled: ZPoly = poly.iter().map(|v| v.mul(c)).collect();
            zp_trim(&mut scaled);
            out.add_component(m, scaled);
        }
        out
    }

    /// Commutative product; opposite-sign powers contract through
    /// `Jp Jm = u - z^2`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = JForm::zero();
        for (&m1, p) in &self.comps {
            for (&m2, q) in &other.comps {
                let mut poly = zp_mul(p, q);
                if m1.signum() * m2.signum() < 0 {
                    let contracted = m1.unsigned_abs().min(m2.unsigned_abs()) as u32;
                    poly = zp_mul(&poly, &zp_pow(&u_minus_z2(), contracted));
                }
                out.add_component(m1 + m2, poly);
            }
        }
        out
    }

    /// Band limit: each component is a polynomial of degree
    /// `|m| + deg(p_m)` in the coordinates.
    pub fn band_limit(&self) -> u32 {
        self.comps
            .iter()
            .map(|(m, p)| m.unsigned_abs() as u32 + p.len().saturating_sub(1) as u32)
            .max()
            .unwrap_or(0)
    }

    /// Pointwise evaluation with radius `r`.
    pub fn eval(&self, theta: f64, phi: f64, r: f64) -> Complex64 {
        let u_val = r * r;
        let z_val = r * theta.cos();
        // Jp = i e^(-i phi) R sin(theta), Jm = conj(Jp) = -i e^(i phi) R sin(theta)
        let jp = Complex64::new(0.0, 1.0) * Complex64::new(0.0, -phi).exp() * r * theta.sin();
        let jm = jp.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&m, poly) in &self.comps {
            let mut val = Complex64::new(0.0, 0.0);
            for coeff in poly.iter().rev() {
                val = val * z_val + param_to_c64(coeff, u_val);
            }
            let ladder = if m >= 0 {
                jp.powi(m as i32)
            } else {
                jm.powi((-m) as i32)
            };
            acc += ladder * val;
        }
        acc
    }
}

/// Evaluates a `u`-only parameter polynomial numerically.
fn param_to_c64(p: &ParamPoly, u_val: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&(ke, ue), c) in p.terms() {
        assert_eq!(ke, 0, "sphere-side coefficients are k-free");
        let (re, im) = c.to_f64_pair();
        acc += Complex64::new(re, im) * u_val.powi(ue as i32);
    }
    acc
}

// ---------------------------------------------------------------------------
// Sphere functions
// ---------------------------------------------------------------------------

/// A band-limited function on the sphere of radius `r`: floating-point
/// harmonic coefficients, and, when it came from the exact side, the
/// exact component form. When both faces are present they agree
/// pointwise to grid precision.
#[derive(Debug, Clone, Default)]
pub struct SphereFunction {
    pub radius: f64,
    harmonics: BTreeMap<(u32, i32), Complex64>,
    jform: Option<JForm>,
}

impl SphereFunction {
    pub fn from_harmonics(radius: f64, harmonics: BTreeMap<(u32, i32), Complex64>) -> Self {
        SphereFunction {
            radius,
            harmonics,
            jform: None,
        }
    }

    pub fn from_jform(radius: f64, jform: JForm) -> Self {
        SphereFunction {
            radius,
            harmonics: BTreeMap::new(),
            jform: Some(jform),
        }
    }

    pub fn harmonics(&self) -> &BTreeMap<(u32, i32), Complex64> {
        &self.harmonics
    }

    pub fn jform(&self) -> Option<&JForm> {
        self.jform.as_ref()
    }

    pub fn band_limit(&self) -> u32 {
        let from_harmonics = self.harmonics.keys().map(|(n, _)| *n).max().unwrap_or(0);
        let from_jform = self.jform.as_ref().map(JForm::band_limit).unwrap_or(0);
        from_harmonics.max(from_jform)
    }

    /// Evaluation through the exact form when present, harmonics
    /// otherwise.
    pub fn eval(&self, theta: f64, phi: f64) -> Complex64 {
        match &self.jform {
            Some(jf) => jf.eval(theta, phi, self.radius),
            None => self.eval_harmonics(theta, phi),
        }
    }

    /// Evaluation through the harmonic expansion.
    pub fn eval_harmonics(&self, theta: f64, phi: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(n, m), coeff) in &self.harmonics {
            acc += coeff * ylm(n, m, theta, phi).expect("stored indices are valid");
        }
        acc
    }
}

/// The averaged inner product `(1/4pi) int conj(F) G sin dtheta dphi`,
/// by Gauss-Legendre in `cos(theta)` crossed with a uniform rule in
/// `phi`; exact (to rounding) for the band limits involved.
pub fn sphere_inner(f: &SphereFunction, g: &SphereFunction) -> Complex64 {
    let band = f.band_limit().max(g.band_limit()) as usize;
    let n_theta = band + 1;
    let n_phi = 2 * band + 2;
    let (nodes, weights) = gauss_legendre(n_theta);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(&weights) {
        let theta = x.acos();
        let mut ring = Complex64::new(0.0, 0.0);
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            ring += f.eval(theta, phi).conj() * g.eval(theta, phi);
        }
        acc += ring * *w;
    }
    acc / (2.0 * n_phi as f64)
}

/// The limit scale factor carrying `T(n, m)` to
/// `(-1)^n (-i)^m Y(n, -m)`:
/// `t_scale(n,m) = sqrt((2n)! (n-m)!/(n+m)!) * n! (2R)^n / sqrt((2n+1)!)`.
///
/// The `(-i)^m` pins the phase convention: with it, the limiting ladder
/// fields are exactly `e^(-+ i phi)(d_theta -+ i cot(theta) d_phi)` on
/// the Condon-Shortley harmonics used here.
pub fn t_limit_scale(n: u32, m: i32, radius: f64) -> f64 {
    let n_i = n as i64;
    let m_i = m as i64;
    let c_inv = (factorial_f64(2 * n) * factorial_f64((n_i - m_i) as u32)
        / factorial_f64((n_i + m_i) as u32))
    .sqrt();
    c_inv * factorial_f64(n) * (2.0 * radius).powi(n as i32)
        / factorial_f64(2 * n + 1).sqrt()
}

/// `(-i)^m` for any integer `m`.
pub fn minus_i_pow(m: i32) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Carries a basis decomposition into its commutative limit. Each
/// coefficient, times the conversion factor `k^(n-m)`, must stay finite
/// when the deformation switches off; the component `(n, m)` lands on
/// `(-1)^n (-i)^m Y(n, -m)` with the conversion scale above. Both faces
/// are rescaled the same way: the exact face pairs the limit of
/// `k^(m-n) T(n,m)` with the limit of the coefficient.
pub fn to_sphere(basis: &BasisCache, d: &BasisDecomp, radius: f64) -> Result<SphereFunction> {
    let mut harmonics: BTreeMap<(u32, i32), Complex64> = BTreeMap::new();
    let mut jform = JForm::zero();
    let u_val = radius * radius;
    for (&(n, m), coeff) in d.terms() {
        let regular = coeff.mul_kappa(n as i64 - m as i64);
        let limit = regular
            .at_kappa_zero()
            .ok_or(Error::DivergentLimit(n, m))?;

        // Numeric face.
        let mut value = Complex64::new(0.0, 0.0);
        for (e, c) in limit.coeffs().iter().enumerate() {
            let (re, im) = c.to_f64_pair();
            value += Complex64::new(re, im) * u_val.powi(e as i32);
        }
        if value.norm() != 0.0 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let scaled = value * sign * minus_i_pow(m) * t_limit_scale(n, m, radius);
            let entry = harmonics.entry((n, -m)).or_insert(Complex64::new(0.0, 0.0));
            *entry += scaled;
        }

        // Exact face: limit of k^(m-n) T(n,m), scaled by the coefficient
        // limit kept as an exact u-polynomial.
        let rescaled_t = basis
            .t(n, m)?
            .scale(&ParamPoly::monomial(m as i64 - n as i64, 0, GaussRational::one()));
        let t_limit = jform_at_kappa_zero(&rescaled_t)?;
        jform = jform.add(&t_limit.scale_param(&limit.to_param_in_u()));
    }

    Ok(SphereFunction {
        radius,
        harmonics,
        jform: Some(jform),
    })
}

/// The `k = 0` part of a normal form as an exact component form. At the
/// commutative point the stored `z^b Jm^c` monomials need no reordering.
fn jform_at_kappa_zero(f: &NormalForm) -> Result<JForm> {
    let mut out = JForm::zero();
    for (m, stored) in f.sectors() {
        let degree = stored.keys().max().copied().unwrap_or(0) as usize;
        let mut poly = vec![ParamPoly::zero(); degree + 1];
        for (b, coeff) in stored {
            let limit = coeff
                .at_kappa_zero()
                .ok_or(Error::DivergentLimit(m.unsigned_abs() as u32, m as i32))?;
            poly[b as usize] = poly[b as usize].add(&limit.to_param_in_u());
        }
        zp_trim(&mut poly);
        out.add_component(m, poly);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Poisson bracket and the commutator limit
// ---------------------------------------------------------------------------

/// `{F, G}` for positive components `f = Jp^a p(z)`, `g = Jp^b q(z)`:
/// `-i Jp^(a+b) (b p' q - a p q')`.
fn bracket_pp(a: u32, p: &ZPoly, b: u32, q: &ZPoly) -> JForm {
    let bp_q = zp_scale(&zp_mul(&zp_derivative(p), q), &GaussRational::from_int(b as i64));
    let a_pq = zp_scale(&zp_mul(p, &zp_derivative(q)), &GaussRational::from_int(a as i64));
    let mut inner = zp_add(&bp_q, &zp_scale(&a_pq, &GaussRational::from_int(-1)));
    inner = zp_scale(&inner, &GaussRational::i().neg());
    let mut out = JForm::zero();
    out.add_component((a + b) as i64, inner);
    out
}

/// `{F, G}` for `f = Jp^a p(z)`, `g = Jm^b q(z)` with `a >= b >= 1`:
/// `-i Jp^(a-b) [ (u-z^2)^b (-b p' q - a p q') + 2ab z (u-z^2)^(b-1) p q ]`.
fn bracket_pm(a: u32, p: &ZPoly, b: u32, q: &ZPoly) -> JForm {
    debug_assert!(a >= b && b >= 1);
    let minus_bpq = zp_scale(
        &zp_mul(&zp_derivative(p), q),
        &GaussRational::from_int(-(b as i64)),
    );
    let minus_apq = zp_scale(
        &zp_mul(p, &zp_derivative(q)),
        &GaussRational::from_int(-(a as i64)),
    );
    let lead = zp_mul(&zp_pow(&u_minus_z2(), b), &zp_add(&minus_bpq, &minus_apq));
    let z_poly: ZPoly = vec![ParamPoly::zero(), ParamPoly::one()];
    let cross = zp_scale(
        &zp_mul(
            &zp_mul(&z_poly, &zp_pow(&u_minus_z2(), b - 1)),
            &zp_mul(p, q),
        ),
        &GaussRational::from_int(2 * (a as i64) * (b as i64)),
    );
    let inner = zp_scale(&zp_add(&lead, &cross), &GaussRational::i().neg());
    let mut out = JForm::zero();
    out.add_component((a - b) as i64, inner);
    out
}

fn bracket_components(m_f: i64, p: &ZPoly, m_g: i64, q: &ZPoly) -> JForm {
    if m_f >= 0 && m_g >= 0 {
        return bracket_pp(m_f as u32, p, m_g as u32, q);
    }
    if m_f <= 0 && m_g <= 0 {
        // {F, G} = conj({conj F, conj G})
        return bracket_components(-m_f, &zp_conj(p), -m_g, &zp_conj(q)).conj();
    }
    if m_f > 0 && m_g < 0 {
        let (a, b) = (m_f as u32, (-m_g) as u32);
        if a >= b {
            return bracket_pm(a, p, b, q);
        }
        // a < b: conjugate, then antisymmetry, lands in the a' >= b' case.
        return bracket_pm(b, &zp_conj(q), a, &zp_conj(p))
            .conj()
            .scale(&GaussRational::from_int(-1));
    }
    // m_f < 0 < m_g: antisymmetry.
    bracket_components(m_g, q, m_f, p).scale(&GaussRational::from_int(-1))
}

/// The sphere bracket `(1/(R sin)) (d_phi F d_theta G - d_theta F d_phi G)`
/// computed exactly on component forms.
pub fn poisson(f: &SphereFunction, g: &SphereFunction) -> Result<SphereFunction> {
    let (jf, jg) = match (&f.jform, &g.jform) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::MissingExactForm),
    };
    let mut out = JForm::zero();
    for (&m_f, p) in jf.components() {
        for (&m_g, q) in jg.components() {
            out = out.add(&bracket_components(m_f, p, m_g, q));
        }
    }
    Ok(SphereFunction::from_jform(f.radius, out))
}

/// The commutator limit `lim (1/(i k)) [f, g]`: the commutator is formed
/// exactly, its decomposition checked for divisibility by `k`, divided,
/// and carried to the sphere. Equals the Poisson bracket of the limits.
pub fn moyal_limit(
    basis: &BasisCache,
    f: &NormalForm,
    g: &NormalForm,
    radius: f64,
) -> Result<SphereFunction> {
    let comm = nf_mul(f, g).sub(&nf_mul(g, f));
    let d = basis.decompose(&comm)?;
    // Every coefficient, after the T -> normalized conversion k^(n-m),
    // must vanish at k = 0 so the division below stays regular.
    for (&(n, m), coeff) in d.terms() {
        let converted = coeff.mul_kappa(n as i64 - m as i64);
        if converted.min_kappa_exp().map_or(false, |e| e < 1) {
            return Err(Error::NotDivisible(n, m));
        }
    }
    // divide by i k
    let minus_i = GaussRational::i().neg();
    let mut scaled = BasisDecomp::zero();
    for (&(n, m), coeff) in d.terms() {
        scaled.add_term((n, m), &coeff.mul_kappa(-1).scale(&minus_i));
    }
    to_sphere(basis, &scaled, radius)
}

/// Limits of the adjoint operators as vector fields on the sphere, in
/// the harmonic basis (the stored index is `mu = -m` relative to the
/// algebra side):
///
/// ```text
/// e_z-limit:    (n, mu) *-> i mu                      (d_phi)
/// Delta-limit:  (n, mu) *-> -n(n+1)                   (Laplacian)
/// e_+-limit:    (n, mu) -> (n, mu-1),  -sqrt((n+mu)(n-mu+1))
/// e_--limit:    (n, mu) -> (n, mu+1),  +sqrt((n-mu)(n+mu+1))
/// ```
///
/// with `e_x = (e_+ + e_-)/2`, `e_y = (e_+ - e_-)/(2i)`. These are the
/// actions of `e^(-+ i phi)(d_theta -+ i cot(theta) d_phi)`; the phases
/// are fixed by consistency with the exact ladder action under
/// `to_sphere`.
pub fn vector_field(op: LadderOp, f: &SphereFunction) -> SphereFunction {
    let mut harmonics: BTreeMap<(u32, i32), Complex64> = BTreeMap::new();
    let mut add = |key: (u32, i32), val: Complex64| {
        if val.norm() != 0.0 {
            *harmonics.entry(key).or_insert(Complex64::new(0.0, 0.0)) += val;
        }
    };
    match op {
        LadderOp::Ez => {
            for (&(n, mu), c) in &f.harmonics {
                add((n, mu), c * Complex64::new(0.0, mu as f64));
            }
        }
        LadderOp::Delta => {
            for (&(n, mu), c) in &f.harmonics {
                add((n, mu), c * (-(n as f64) * (n as f64 + 1.0)));
            }
        }
        LadderOp::Ep => {
            for (&(n, mu), c) in &f.harmonics {
                let n_i = n as i64;
                let mu_i = mu as i64;
                let factor = ((n_i + mu_i) * (n_i - mu_i + 1)) as f64;
                if factor != 0.0 {
                    add((n, mu - 1), c * -factor.sqrt());
                }
            }
        }
        LadderOp::Em => {
            for (&(n, mu), c) in &f.harmonics {
                let n_i = n as i64;
                let mu_i = mu as i64;
                let factor = ((n_i - mu_i) * (n_i + mu_i + 1)) as f64;
                if factor != 0.0 {
                    add((n, mu + 1), c * factor.sqrt());
                }
            }
        }
        LadderOp::Ex => {
            let plus = vector_field(LadderOp::Ep, f);
            let minus = vector_field(LadderOp::Em, f);
            for (&key, c) in plus.harmonics.iter() {
                add(key, c * 0.5);
            }
            for (&key, c) in minus.harmonics.iter() {
                add(key, c * 0.5);
            }
        }
        LadderOp::Ey => {
            let plus = vector_field(LadderOp::Ep, f);
            let minus = vector_field(LadderOp::Em, f);
            // 1/(2i) = -i/2
            for (&key, c) in plus.harmonics.iter() {
                add(key, c * Complex64::new(0.0, -0.5));
            }
            for (&key, c) in minus.harmonics.iter() {
                add(key, c * Complex64::new(0.0, 0.5));
            }
        }
    }
    SphereFunction::from_harmonics(f.radius, harmonics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisCache;
    use crate::freealg::{normalize, parse};

    fn nf(text: &str) -> NormalForm {
        normalize(&parse(text).unwrap()).unwrap()
    }

    fn sphere_of(basis: &BasisCache, text: &str, radius: f64) -> SphereFunction {
        let d = basis.decompose(&nf(text)).unwrap();
        to_sphere(basis, &d, radius).unwrap()
    }

    fn max_grid_error<FA, FB>(fa: FA, fb: FB) -> f64
    where
        FA: Fn(f64, f64) -> Complex64,
        FB: Fn(f64, f64) -> Complex64,
    {
        grid(17, 32)
            .into_iter()
            .map(|(t, p)| (fa(t, p) - fb(t, p)).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn ylm_examples() {
        // Y(0,0) = 1 under the averaged measure
        assert!((ylm(0, 0, 0.7, 1.3).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        // Y(1,0) proportional to cos(theta) with unit quadrature norm
        let y10 = SphereFunction::from_harmonics(
            1.0,
            [((1u32, 0i32), Complex64::new(1.0, 0.0))].into_iter().collect(),
        );
        let norm = sphere_inner(&y10, &y10);
        assert!((norm - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let ratio0 = ylm(1, 0, 0.4, 0.0).unwrap().re / 0.4f64.cos();
        let ratio1 = ylm(1, 0, 1.1, 2.0).unwrap().re / 1.1f64.cos();
        assert!((ratio0 - ratio1).abs() < 1e-12);
        // conjugation symmetry on a grid
        for n in 0..=4u32 {
            for m in 0..=(n as i32) {
                let err = max_grid_error(
                    |t, p| ylm(n, m, t, p).unwrap().conj(),
                    |t, p| ylm(n, -m, t, p).unwrap() * if m % 2 == 0 { 1.0 } else { -1.0 },
                );
                assert!(err < 1e-12, "conj symmetry at ({n},{m})");
            }
        }
        assert!(ylm(1, 2, 0.0, 0.0).is_err());
    }

    #[test]
    fn quadrature_orthonormality() {
        for n1 in 0..=3u32 {
            for m1 in -(n1 as i32)..=(n1 as i32) {
                for n2 in 0..=3u32 {
                    for m2 in -(n2 as i32)..=(n2 as i32) {
                        let f = SphereFunction::from_harmonics(
                            1.0,
                            [((n1, m1), Complex64::new(1.0, 0.0))].into_iter().collect(),
                        );
                        let g = SphereFunction::from_harmonics(
                            1.0,
                            [((n2, m2), Complex64::new(1.0, 0.0))].into_iter().collect(),
                        );
                        let val = sphere_inner(&f, &g);
                        let expected = if (n1, m1) == (n2, m2) { 1.0 } else { 0.0 };
                        assert!(
                            (val - Complex64::new(expected, 0.0)).norm() < 1e-9,
                            "<Y({n1},{m1}), Y({n2},{m2})> = {val}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn to_sphere_coordinates() {
        let basis = BasisCache::new();
        let radius = 1.0;
        // z -> R cos(theta)
        let fz = sphere_of(&basis, "z", radius);
        let err = max_grid_error(
            |t, p| fz.eval_harmonics(t, p),
            |t, _| Complex64::new(radius * t.cos(), 0.0),
        );
        assert!(err < 1e-12, "z limit, err={err}");

        // Jp -> i e^(-i phi) R sin(theta)
        let fjp = sphere_of(&basis, "Jp", radius);
        let err = max_grid_error(
            |t, p| fjp.eval_harmonics(t, p),
            |t, p| Complex64::new(0.0, 1.0) * Complex64::new(0.0, -p).exp() * radius * t.sin(),
        );
        assert!(err < 1e-12, "Jp limit, err={err}");

        // x -> R sin(phi) sin(theta)
        let fx = sphere_of(&basis, "x", radius);
        let err = max_grid_error(
            |t, p| fx.eval_harmonics(t, p),
            |t, p| Complex64::new(radius * p.sin() * t.sin(), 0.0),
        );
        assert!(err < 1e-12, "x limit, err={err}");
    }

    #[test]
    fn jform_and_harmonics_agree() {
        let basis = BasisCache::new();
        for text in ["z^2", "Jp*z", "x*y - y*x", "Jm^2 + u*z"] {
            let f = sphere_of(&basis, text, 1.0);
            assert!(f.jform().is_some());
            let err = max_grid_error(|t, p| f.eval(t, p), |t, p| f.eval_harmonics(t, p));
            assert!(err < 1e-10, "faces disagree for {text}: {err}");
        }
    }

    #[test]
    fn basis_elements_limit_to_harmonics() {
        let basis = BasisCache::new();
        let radius = 1.0;
        for n in 0..=4u32 {
            for m in -(n as i32)..=(n as i32) {
                // The normalized element behind T(n,m) carries k^(m-n);
                // the raw element itself vanishes in the limit for n > m.
                let d = BasisDecomp::single(
                    n,
                    m,
                    ParamPoly::monomial(m as i64 - n as i64, 0, GaussRational::one()),
                );
                let f = to_sphere(&basis, &d, radius).unwrap();
                let scale = t_limit_scale(n, m, radius);
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let phase = minus_i_pow(m);
                // exact face against the recurrence-built harmonics
                let err = max_grid_error(
                    |t, p| f.eval(t, p) / (scale * sign * phase),
                    |t, p| ylm(n, -m, t, p).unwrap(),
                );
                assert!(err < 1e-10, "T({n},{m}) limit, err={err}");
            }
        }
    }

    #[test]
    fn divergent_limit_detected() {
        let basis = BasisCache::new();
        // k^-3 T(1,1) has no limit.
        let d = BasisDecomp::single(1, 1, ParamPoly::monomial(-3, 0, GaussRational::one()));
        assert!(matches!(
            to_sphere(&basis, &d, 1.0),
            Err(Error::DivergentLimit(1, 1))
        ));
    }

    #[test]
    fn sphere_inner_examples() {
        let basis = BasisCache::new();
        let one = sphere_of(&basis, "1", 1.0);
        assert!((sphere_inner(&one, &one) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // <z, z> = R^2/3
        for radius in [1.0, 2.0] {
            let fz = sphere_of(&basis, "z", radius);
            let val = sphere_inner(&fz, &fz);
            assert!(
                (val - Complex64::new(radius * radius / 3.0, 0.0)).norm() < 1e-10,
                "<z,z> at R={radius}: {val}"
            );
        }
    }

    #[test]
    fn poisson_generator_table() {
        let basis = BasisCache::new();
        let fx = sphere_of(&basis, "x", 1.0);
        let fy = sphere_of(&basis, "y", 1.0);
        let fz = sphere_of(&basis, "z", 1.0);
        // {x, y} = z exactly on component forms
        let bracket = poisson(&fx, &fy).unwrap();
        assert_eq!(bracket.jform().unwrap(), fz.jform().unwrap());
        // {Jp, z} = i Jp
        let fjp = sphere_of(&basis, "Jp", 1.0);
        let bracket = poisson(&fjp, &fz).unwrap();
        let expected = fjp.jform().unwrap().scale(&GaussRational::i());
        assert_eq!(bracket.jform().unwrap(), &expected);
        // {F, F} = 0
        let f = sphere_of(&basis, "z^2 + Jp*z - Jm", 1.0);
        assert!(poisson(&f, &f).unwrap().jform().unwrap().is_zero());
    }

    #[test]
    fn poisson_antisymmetry_and_leibniz() {
        let basis = BasisCache::new();
        let f = sphere_of(&basis, "Jp*z + z^2", 1.0);
        let g = sphere_of(&basis, "Jm - i*z", 1.0);
        let h = sphere_of(&basis, "z + Jp", 1.0);
        let fg = poisson(&f, &g).unwrap();
        let gf = poisson(&g, &f).unwrap();
        assert_eq!(
            fg.jform().unwrap(),
            &gf.jform().unwrap().scale(&GaussRational::from_int(-1))
        );
        // {f, g h} = {f, g} h + g {f, h}
        let gh = SphereFunction::from_jform(1.0, g.jform().unwrap().mul(h.jform().unwrap()));
        let lhs = poisson(&f, &gh).unwrap();
        let rhs = fg
            .jform()
            .unwrap()
            .mul(h.jform().unwrap())
            .add(&g.jform().unwrap().mul(poisson(&f, &h).unwrap().jform().unwrap()));
        assert_eq!(lhs.jform().unwrap(), &rhs);
    }

    #[test]
    fn moyal_limit_examples() {
        let basis = BasisCache::new();
        // (x, y) -> z
        let out = moyal_limit(&basis, &nf("x"), &nf("y"), 1.0).unwrap();
        let fz = sphere_of(&basis, "z", 1.0);
        assert_eq!(out.jform().unwrap(), fz.jform().unwrap());
        // (Jp, Jm) -> -2 i z
        let out = moyal_limit(&basis, &nf("Jp"), &nf("Jm"), 1.0).unwrap();
        let expected = fz
            .jform()
            .unwrap()
            .scale(&GaussRational::new(
                num_rational::BigRational::from(num_bigint::BigInt::from(0)),
                num_rational::BigRational::from(num_bigint::BigInt::from(-2)),
            ));
        assert_eq!(out.jform().unwrap(), &expected);
    }

    #[test]
    fn moyal_equals_poisson_on_samples() {
        let basis = BasisCache::new();
        let pairs = [("x", "z"), ("Jp*z", "Jm"), ("z^2", "Jp")];
        for (ft, gt) in pairs {
            let f = nf(ft);
            let g = nf(gt);
            let moyal = moyal_limit(&basis, &f, &g, 1.0).unwrap();
            let pf = sphere_of(&basis, ft, 1.0);
            let pg = sphere_of(&basis, gt, 1.0);
            let bracket = poisson(&pf, &pg).unwrap();
            let err = max_grid_error(|t, p| moyal.eval(t, p), |t, p| bracket.eval(t, p));
            assert!(err < 1e-10, "moyal vs poisson for ({ft},{gt}): {err}");
        }
    }

    #[test]
    fn vector_field_table() {
        let basis = BasisCache::new();
        // Delta-limit multiplies (n, mu) by -n(n+1)
        let f = SphereFunction::from_harmonics(
            1.0,
            [((2u32, 1i32), Complex64::new(1.0, 0.0))].into_iter().collect(),
        );
        let lap = vector_field(LadderOp::Delta, &f);
        assert!((lap.harmonics()[&(2, 1)] - Complex64::new(-6.0, 0.0)).norm() < 1e-14);

        // e_z limit is d_phi: on to_sphere(T(1,1)) it multiplies by -i
        let t11 = sphere_of(&basis, "Jp", 1.0);
        let dphi = vector_field(LadderOp::Ez, &t11);
        let err = max_grid_error(
            |t, p| dphi.eval_harmonics(t, p),
            |t, p| t11.eval_harmonics(t, p) * Complex64::new(0.0, -1.0),
        );
        assert!(err < 1e-12, "e_z limit on Jp: {err}");

        // e_x-limit(y) = z
        let fy = sphere_of(&basis, "y", 1.0);
        let fz = sphere_of(&basis, "z", 1.0);
        let out = vector_field(LadderOp::Ex, &fy);
        let err = max_grid_error(
            |t, p| out.eval_harmonics(t, p),
            |t, p| fz.eval_harmonics(t, p),
        );
        assert!(err < 1e-12, "e_x(y) = z: {err}");
    }

    #[test]
    fn vector_field_matches_exact_ladder_route() {
        // (1/(i k)) e_+ on the algebra side, pushed through to_sphere,
        // agrees with the harmonic-basis action.
        let basis = BasisCache::new();
        for text in ["z", "Jp*z", "Jm^2", "x*y"] {
            let d = basis.decompose(&nf(text)).unwrap();
            for op in [LadderOp::Ep, LadderOp::Em, LadderOp::Ez] {
                let exact = basis.apply_operator(op, &d);
                // scale by 1/(i k): k exponent down by one, times -i
                let mut scaled = BasisDecomp::zero();
                for (&(n, m), coeff) in exact.terms() {
                    scaled.add_term(
                        (n, m),
                        &coeff.mul_kappa(-1).scale(&GaussRational::i().neg()),
                    );
                }
                let via_algebra = to_sphere(&basis, &scaled, 1.0).unwrap();
                let via_table = vector_field(op, &to_sphere(&basis, &d, 1.0).unwrap());
                let err = max_grid_error(
                    |t, p| via_algebra.eval_harmonics(t, p),
                    |t, p| via_table.eval_harmonics(t, p),
                );
                assert!(err < 1e-10, "{op:?} routes disagree on {text}: {err}");
            }
        }
    }

    #[test]
    fn euler_relation() {
        // x e_x(F) + y e_y(F) + z e_z(F) = 0 for the limiting fields.
        let basis = BasisCache::new();
        let f = sphere_of(&basis, "Jp*z + z^3 - i*Jm^2", 1.0);
        let ex = vector_field(LadderOp::Ex, &f);
        let ey = vector_field(LadderOp::Ey, &f);
        let ez = vector_field(LadderOp::Ez, &f);
        let err = grid(17, 32)
            .into_iter()
            .map(|(t, p)| {
                let x = p.sin() * t.sin();
                let y = p.cos() * t.sin();
                let z = t.cos();
                (ex.eval_harmonics(t, p) * x
                    + ey.eval_harmonics(t, p) * y
                    + ez.eval_harmonics(t, p) * z)
                    .norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "Euler relation: {err}");
    }
}
