//! The orthogonal basis of the quotient algebra and everything built on
//! top of it: exact inner products, norms and signs, ladder and Laplacian
//! actions, the Hahn-polynomial cross-check, the averaging operators
//! `omega_p`, and ideal-membership tests.
//!
//! The working basis is the unnormalized family
//!
//! ```text
//! T(n, m) = ad_Jm^(n-m) (Jp^n),          |m| <= n,
//! ```
//!
//! a square-root-free multiple of the orthonormal basis. Keeping the
//! normalization out of the algebra keeps every coefficient inside the
//! Gaussian-rational Laurent ring; the normalized elements appear only
//! where their square roots cancel in pairs (inside `omega_apply`) or
//! numerically in the sphere module.

use crate::coeff::{factorial, pochhammer, GaussRational, ParamPoly, UPoly};
use crate::freealg::{nf_mul, NormalForm};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

/// Adjoint action of `Jp`: the raising operator `e_+ f = [Jp, f]`.
pub fn ad_jp(f: &NormalForm) -> NormalForm {
    let jp = NormalForm::jp();
    nf_mul(&jp, f).sub(&nf_mul(f, &jp))
}

/// Adjoint action of `Jm`: the lowering operator `e_- f = [Jm, f]`.
pub fn ad_jm(f: &NormalForm) -> NormalForm {
    let jm = NormalForm::jm();
    nf_mul(&jm, f).sub(&nf_mul(f, &jm))
}

/// Adjoint action of `z`: `e_z f = [z, f]`.
pub fn ad_z(f: &NormalForm) -> NormalForm {
    let z = NormalForm::z();
    nf_mul(&z, f).sub(&nf_mul(f, &z))
}

/// The Laplacian `e_z^2 - k e_z + e_+ e_-` acting on elements.
pub fn laplacian(f: &NormalForm) -> NormalForm {
    let ez = ad_z(f);
    ad_z(&ez)
        .sub(&ez.scale(&ParamPoly::kappa()))
        .add(&ad_jp(&ad_jm(f)))
}

/// Coefficients of an element relative to the `T(n, m)` basis. Laurent
/// powers of `k` are allowed here (and only here).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BasisDecomp {
    terms: BTreeMap<(u32, i32), ParamPoly>,
}

impl BasisDecomp {
    pub fn zero() -> Self {
        BasisDecomp::default()
    }

    pub fn unit(n: u32, m: i32) -> Self {
        BasisDecomp::single(n, m, ParamPoly::one())
    }

    pub fn single(n: u32, m: i32, coeff: ParamPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((n, m), coeff);
        }
        BasisDecomp { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, i32), &ParamPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, n: u32, m: i32) -> ParamPoly {
        self.terms
            .get(&(n, m))
            .cloned()
            .unwrap_or_else(ParamPoly::zero)
    }

    pub fn add_term(&mut self, key: (u32, i32), c: &ParamPoly) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(ParamPoly::zero);
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

    pub fn scale(&self, c: &ParamPoly) -> Self {
        let mut out = BasisDecomp::zero();
        for (key, v) in &self.terms {
            out.add_term(*key, &v.mul(c));
        }
        out
    }

    /// Largest basis degree present.
    pub fn max_n(&self) -> u32 {
        self.terms.keys().map(|(n, _)| *n).max().unwrap_or(0)
    }

    /// Evaluates every coefficient at `(k0, u0)`. The flag reports a
    /// degenerate specialization: some component has `sigma_n = 0` there,
    /// so the bilinear form cannot see it even though the value is exact.
    pub fn evaluate_at(
        &self,
        k0: &BigRational,
        u0: &BigRational,
    ) -> Result<(BTreeMap<(u32, i32), GaussRational>, bool)> {
        let mut out = BTreeMap::new();
        let mut degenerate = false;
        for (&(n, m), coeff) in &self.terms {
            out.insert((n, m), coeff.eval(k0, u0)?);
            if sigma_n(n, k0, u0)? == 0 {
                degenerate = true;
            }
        }
        Ok((out, degenerate))
    }
}

/// Result of an `omega_apply` evaluation.
#[derive(Debug, Clone)]
pub struct OmegaResult {
    pub value: NormalForm,
    /// Set when `sigma_p` vanished at the requested point; the sum is then
    /// unnormalized (`alpha_p := 1`).
    pub degenerate: bool,
}

/// Operators acting diagonally (or by shifts) on the `T` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderOp {
    Ex,
    Ey,
    Ez,
    Ep,
    Em,
    Delta,
}

impl LadderOp {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "ex" => Some(LadderOp::Ex),
            "ey" => Some(LadderOp::Ey),
            "ez" => Some(LadderOp::Ez),
            "ep" => Some(LadderOp::Ep),
            "em" => Some(LadderOp::Em),
            "delta" => Some(LadderOp::Delta),
            _ => None,
        }
    }
}

/// Shared tables: basis elements and norm data are computed once and
/// reused. Insertions are idempotent, so concurrent readers are fine.
#[derive(Default)]
pub struct BasisCache {
    t_table: RwLock<HashMap<(u32, i32), NormalForm>>,
    nu_table: RwLock<HashMap<u32, ParamPoly>>,
}

impl BasisCache {
    pub fn new() -> Self {
        BasisCache::default()
    }

    /// The basis element `T(n, m)`, built by `n - m` lowering steps from
    /// `Jp^n`. Weight homogeneous of weight `2n - m`; eigenvector of the
    /// `z`-commutator with eigenvalue `k m`.
    pub fn t(&self, n: u32, m: i32) -> Result<NormalForm> {
        if m.unsigned_abs() > n {
            return Err(Error::DomainError(format!(
                "T(n,m) requires |m| <= n, got n={n}, m={m}"
            )));
        }
        if let Some(hit) = self.t_table.read().unwrap().get(&(n, m)) {
            return Ok(hit.clone());
        }
        let value = if m == n as i32 {
            NormalForm::monomial(n, 0, 0, ParamPoly::one())
        } else {
            ad_jm(&self.t(n, m + 1)?)
        };
        self.t_table
            .write()
            .unwrap()
            .entry((n, m))
            .or_insert_with(|| value.clone());
        Ok(value)
    }

    /// `nu_n = pi0(Jm^n Jp^n)` in closed form:
    /// `(n!)^2/(2n+1)! * prod_{r=1..n} (4u + k^2 (1 - r^2))`.
    pub fn nu(&self, n: u32) -> ParamPoly {
        if let Some(hit) = self.nu_table.read().unwrap().get(&n) {
            return hit.clone();
        }
        let mut value = ParamPoly::constant(GaussRational::from_rational(
            factorial(n as u64).pow(2) / factorial(2 * n as u64 + 1),
        ));
        for r in 1..=n as i64 {
            let factor = ParamPoly::monomial(0, 1, GaussRational::from_int(4)).add(
                &ParamPoly::monomial(2, 0, GaussRational::from_int(1 - r * r)),
            );
            value = value.mul(&factor);
        }
        self.nu_table
            .write()
            .unwrap()
            .entry(n)
            .or_insert_with(|| value.clone());
        value
    }

    /// Exact squared norm
    /// `<T(n,m), T(n,m)> = k^(2(n-m)) (2n)! (n-m)!/(n+m)! nu_n`.
    pub fn norm_t(&self, n: u32, m: i32) -> Result<ParamPoly> {
        if m.unsigned_abs() > n {
            return Err(Error::DomainError(format!(
                "norm_T requires |m| <= n, got n={n}, m={m}"
            )));
        }
        let n_i = n as i64;
        let m_i = m as i64;
        let factor = factorial(2 * n as u64) * factorial((n_i - m_i) as u64)
            / factorial((n_i + m_i) as u64);
        Ok(self
            .nu(n)
            .scale_rational(&factor)
            .mul_kappa(2 * (n_i - m_i)))
    }

    /// Scalar component of an element: the coefficient of `T(0,0) = 1` in
    /// its basis expansion. This is not the constant monomial of the
    /// normal form; the sector polynomial is reduced triangularly against
    /// the diagonal basis polynomials `T(b, 0)`.
    pub fn pi0(&self, f: &NormalForm) -> ParamPoly {
        let sectors = f.sectors();
        let Some(sector0) = sectors.get(&0) else {
            return ParamPoly::zero();
        };
        let mut poly: BTreeMap<u32, ParamPoly> = sector0.clone();
        poly.retain(|_, c| !c.is_zero());
        loop {
            let Some((&b, coeff)) = poly.iter().next_back() else {
                return ParamPoly::zero();
            };
            if b == 0 {
                return coeff.clone();
            }
            let coeff = coeff.clone();
            let q = self.t(b, 0).expect("T(b,0) is always defined");
            let q_sector = q
                .sectors()
                .remove(&0)
                .expect("T(b,0) lives in the zero sector");
            let lead = q_sector
                .get(&b)
                .cloned()
                .expect("T(b,0) has z-degree exactly b");
            let factor = coeff.mul(&monomial_inverse(&lead));
            for (deg, qc) in &q_sector {
                let entry = poly.entry(*deg).or_insert_with(ParamPoly::zero);
                *entry = entry.sub(&factor.mul(qc));
                if entry.is_zero() {
                    let deg = *deg;
                    poly.remove(&deg);
                }
            }
            debug_assert!(!poly.contains_key(&b));
        }
    }

    /// The sesquilinear form `<f, g> = pi0(f^dagger g)`.
    pub fn inner(&self, f: &NormalForm, g: &NormalForm) -> ParamPoly {
        self.pi0(&nf_mul(&f.dagger(), g))
    }

    /// Reference decomposition: orthogonal projection onto each basis
    /// element, `f_nm = <T(n,m), f> / <T(n,m), T(n,m)>`, with the division
    /// carried out exactly in the Laurent ring. The pairing runs sector by
    /// sector: the ladder grading is exact, so a basis element pairs to
    /// zero against every other sector and only the matching one is fed
    /// through the product.
    pub fn decompose(&self, f: &NormalForm) -> Result<BasisDecomp> {
        let mut out = BasisDecomp::zero();
        for (m, sector) in f.sectors() {
            let degree = sector.keys().max().copied().unwrap_or(0);
            let am = m.unsigned_abs() as u32;
            let mut f_sector = NormalForm::zero();
            for (&b, coeff) in &sector {
                if m >= 0 {
                    f_sector.add_term((m as u32, b, 0), coeff);
                } else {
                    f_sector.add_term((0, b, (-m) as u32), coeff);
                }
            }
            let m = m as i32;
            for n in am..=am + degree {
                let t = self.t(n, m)?;
                let num = self.inner(&t, &f_sector);
                if num.is_zero() {
                    continue;
                }
                let den = self.norm_t(n, m)?;
                if den.is_zero() {
                    return Err(Error::DegenerateNorm(n, m));
                }
                let coeff = num
                    .div_exact(&den)
                    .expect("projection onto an orthogonal basis divides exactly");
                out.add_term((n, m), &coeff);
            }
        }
        Ok(out)
    }

    /// Rebuilds the element from its basis coefficients.
    pub fn reconstruct(&self, d: &BasisDecomp) -> Result<NormalForm> {
        let mut out = NormalForm::zero();
        for (&(n, m), coeff) in d.terms() {
            out = out.add(&self.t(n, m)?.scale(coeff));
        }
        Ok(out)
    }

    /// Diagonal/shift action of the standard operators on basis
    /// coefficients:
    ///
    /// ```text
    /// e_z T(n,m)  = k m T(n,m)
    /// e_- T(n,m)  = T(n,m-1)                   (zero below m = -n)
    /// e_+ T(n,m)  = k^2 (n-m)(n+m+1) T(n,m+1)
    /// Delta T(n,m) = k^2 n(n+1) T(n,m)
    /// ```
    ///
    /// with `e_x = (e_+ + e_-)/2` and `e_y = (e_+ - e_-)/(2i)`.
    pub fn apply_operator(&self, op: LadderOp, d: &BasisDecomp) -> BasisDecomp {
        match op {
            LadderOp::Ez => {
                let mut out = BasisDecomp::zero();
                for (&(n, m), coeff) in d.terms() {
                    let factor = ParamPoly::kappa().scale(&GaussRational::from_int(m as i64));
                    out.add_term((n, m), &coeff.mul(&factor));
                }
                out
            }
            LadderOp::Em => {
                let mut out = BasisDecomp::zero();
                for (&(n, m), coeff) in d.terms() {
                    if m - 1 >= -(n as i32) {
                        out.add_term((n, m - 1), coeff);
                    }
                }
                out
            }
            LadderOp::Ep => {
                let mut out = BasisDecomp::zero();
                for (&(n, m), coeff) in d.terms() {
                    let n_i = n as i64;
                    let m_i = m as i64;
                    let scalar = (n_i - m_i) * (n_i + m_i + 1);
                    if scalar == 0 {
                        continue;
                    }
                    let factor = ParamPoly::monomial(2, 0, GaussRational::from_int(scalar));
                    out.add_term((n, m + 1), &coeff.mul(&factor));
                }
                out
            }
            LadderOp::Delta => {
                let mut out = BasisDecomp::zero();
                for (&(n, m), coeff) in d.terms() {
                    let n_i = n as i64;
                    let factor =
                        ParamPoly::monomial(2, 0, GaussRational::from_int(n_i * (n_i + 1)));
                    out.add_term((n, m), &coeff.mul(&factor));
                }
                out
            }
            LadderOp::Ex => {
                let half = ParamPoly::from_ratio(1, 2);
                self.apply_operator(LadderOp::Ep, d)
                    .add(&self.apply_operator(LadderOp::Em, d))
                    .scale(&half)
            }
            LadderOp::Ey => {
                // 1/(2i) = -i/2
                let half_over_i = ParamPoly::constant(GaussRational::new(
                    BigRational::zero(),
                    BigRational::new(BigInt::from(-1), BigInt::from(2)),
                ));
                let plus = self.apply_operator(LadderOp::Ep, d);
                let minus = self.apply_operator(LadderOp::Em, d);
                plus.add(&minus.scale(&ParamPoly::from_int(-1)))
                    .scale(&half_over_i)
            }
        }
    }

    /// The averaging operator `omega_p(f) = sum_m (P(p,m))^dagger f P(p,m)`
    /// evaluated at an exact parameter point. The normalized basis enters
    /// only through `alpha_p^2 = 1/|nu_p|` and the rational conversion
    /// factors, so the square roots cancel pairwise and the output is
    /// exact. When `sigma_p = 0` at the point, the paper's convention
    /// `alpha_p = 1` is used and the result is flagged degenerate.
    pub fn omega_apply(
        &self,
        p: u32,
        f: &NormalForm,
        k0: &BigRational,
        u0: &BigRational,
    ) -> Result<OmegaResult> {
        if k0.is_zero() {
            return Err(Error::DomainError(
                "omega_apply needs k != 0 (use the sphere module at k = 0)".into(),
            ));
        }
        let sigma = sigma_n(p, k0, u0)?;
        let degenerate = sigma == 0;
        let alpha_sq = if degenerate {
            BigRational::one()
        } else {
            let nu_val = self.nu(p).eval(k0, u0)?;
            debug_assert!(nu_val.is_real());
            BigRational::one() / nu_val.re.abs()
        };

        let p_i = p as i64;
        let mut acc = NormalForm::zero();
        for m in -(p as i32)..=(p as i32) {
            let m_i = m as i64;
            let t = self.t(p, m)?;
            let term = nf_mul(&nf_mul(&t.dagger(), f), &t);
            // k0^(2(m-p)) * (p+m)!/((2p)!(p-m)!)
            let mut factor = factorial((p_i + m_i) as u64)
                / (factorial(2 * p as u64) * factorial((p_i - m_i) as u64));
            let shift = 2 * (m_i - p_i);
            if shift >= 0 {
                for _ in 0..shift {
                    factor *= k0;
                }
            } else {
                for _ in 0..(-shift) {
                    factor /= k0;
                }
            }
            acc = acc.add(&term.scale(&ParamPoly::constant(GaussRational::from_rational(factor))));
        }
        let value = acc
            .specialize(k0, u0)?
            .scale(&ParamPoly::constant(GaussRational::from_rational(alpha_sq)));
        Ok(OmegaResult { value, degenerate })
    }
}

/// Inverts a single-monomial coefficient (used for triangular solves
/// against basis leading terms, which are pure `k` powers).
fn monomial_inverse(p: &ParamPoly) -> ParamPoly {
    let mut it = p.terms();
    let (&(ke, ue), c) = it.next().expect("nonzero monomial");
    assert!(it.next().is_none(), "leading coefficient is not a monomial");
    assert_eq!(ue, 0, "leading coefficient carries u");
    ParamPoly::monomial(-ke, 0, c.inv())
}

/// Sign of `pi0(Jm^n Jp^n)` at an exact parameter point, by the three-case
/// rule: with `N0 = ceil(sqrt(4 u0 / k0^2 + 1))`,
///
/// * `+1` for `n <= N0 - 1`;
/// * `0` for `n >= N0` when `sqrt(4 u0 / k0^2 + 1)` is exactly the
///   integer `N0`;
/// * `(-1)^(n - N0 + 1)` for `n >= N0` otherwise.
///
/// `k0 = 0` is the commutative limit: every sign is `+1` for `u0 > 0`.
pub fn sigma_n(n: u32, k0: &BigRational, u0: &BigRational) -> Result<i8> {
    if !u0.is_positive() {
        return Err(Error::DomainError("sigma_n needs u > 0".into()));
    }
    if k0.is_zero() {
        return Ok(1);
    }
    // s = 4 u0 / k0^2 + 1 > 1
    let s = BigRational::from(BigInt::from(4)) * u0 / (k0 * k0) + BigRational::one();
    let (n0, exact) = ceil_sqrt_rational(&s);
    let n_i = n as i64;
    if n_i <= n0 - 1 {
        Ok(1)
    } else if exact {
        Ok(0)
    } else if (n_i - n0 + 1) % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// Smallest integer `t >= sqrt(s)` for positive rational `s`, plus
/// whether `sqrt(s) = t` exactly.
fn ceil_sqrt_rational(s: &BigRational) -> (i64, bool) {
    let p = s.numer();
    let q = s.denom();
    // floor(sqrt(p/q)) seed from integer sqrt, then fix up.
    let mut t = (p / q).sqrt();
    while &t * &t * q < *p {
        t += 1;
    }
    while t > BigInt::zero() && (&t - 1) * (&t - 1) * q >= *p {
        t -= 1;
    }
    let exact = &t * &t * q == *p;
    let t_i: i64 = t.to_string().parse().expect("N0 fits in i64 at desk scale");
    (t_i, exact)
}

/// The ladder-form polynomial of one sector: coefficients of `p` in
/// `Jp^m p(z)` (for `m >= 0`, the stored polynomial itself) or
/// `Jm^c p(z)` (for `m = -c < 0`, where the stored `z^b Jm^c` terms shift
/// by `z^b Jm^c = Jm^c (z - c k)^b`).
pub fn sector_ladder_poly(m: i64, stored: &BTreeMap<u32, ParamPoly>) -> Vec<ParamPoly> {
    let degree = stored.keys().max().copied().unwrap_or(0) as usize;
    let mut out = vec![ParamPoly::zero(); degree + 1];
    if m >= 0 {
        for (&b, coeff) in stored {
            out[b as usize] = out[b as usize].add(coeff);
        }
        return out;
    }
    let c = -m;
    // (z - c k)^b expanded binomially.
    for (&b, coeff) in stored {
        let mut binom = BigRational::one();
        for j in 0..=b {
            // C(b, j) z^j (-c k)^(b - j)
            let mut term = ParamPoly::monomial(
                (b - j) as i64,
                0,
                GaussRational::from_int(if (b - j) % 2 == 0 { 1 } else { -1 }),
            )
            .scale_rational(&binom);
            for _ in 0..(b - j) {
                term = term.scale(&GaussRational::from_int(c));
            }
            out[j as usize] = out[j as usize].add(&coeff.mul(&term));
            binom = binom * BigRational::from(BigInt::from((b - j) as i64))
                / BigRational::from(BigInt::from(j as i64 + 1));
        }
    }
    out
}

/// Membership in the left ideal generated by `z`: every ladder-form sector
/// polynomial must have zero constant term.
pub fn left_ideal_z_member(f: &NormalForm) -> bool {
    f.sectors()
        .iter()
        .all(|(m, stored)| sector_ladder_poly(*m, stored)[0].is_zero())
}

/// When `f` lies in the ideal, the witness `g` with `f = g z`; otherwise
/// `None`. Divides each ladder-form sector polynomial by `z`.
pub fn left_ideal_z_quotient(f: &NormalForm) -> Option<NormalForm> {
    let mut out = NormalForm::zero();
    for (m, stored) in f.sectors() {
        let ladder = sector_ladder_poly(m, &stored);
        if !ladder[0].is_zero() {
            return None;
        }
        // g sector in ladder form: p(z)/z, then re-expressed in storage
        // order through the reducer.
        let mut part = NormalForm::zero();
        for (b, coeff) in ladder.iter().enumerate().skip(1) {
            if m >= 0 {
                part.add_term((m as u32, (b - 1) as u32, 0), coeff);
            } else {
                // Jm^c z^(b-1) as a free product, reduced to storage order.
                let jm_pow = NormalForm::monomial(0, 0, (-m) as u32, ParamPoly::one());
                let z_pow = NormalForm::monomial(0, (b - 1) as u32, 0, coeff.clone());
                part = part.add(&nf_mul(&jm_pow, &z_pow));
                continue;
            }
        }
        out = out.add(&part);
    }
    Some(out)
}

/// The Hahn-route sector polynomial: a polynomial in `z`, proportional to
/// the `J`-form polynomial of `T(n, m)` at `k = 1`, `u = (N^2 - 1)/4`,
/// computed from the terminating hypergeometric sum
///
/// ```text
/// 3F2(m-n, -z-(N-1)/2, n+m+1; m+1, m+1-N; 1)
/// ```
///
/// (argument shifted by `-m` and sign `(-1)^m` for `m < 0`). Exact over
/// the rationals; degree `n - |m|` in `z`. Requires `N > n` so that no
/// lower Pochhammer factor vanishes.
pub fn hahn_p(n: u32, m: i32, big_n: i64) -> Result<UPoly> {
    if m.unsigned_abs() > n {
        return Err(Error::DomainError(format!(
            "hahn_p requires |m| <= n, got n={n}, m={m}"
        )));
    }
    if big_n <= n as i64 {
        return Err(Error::DomainError(format!(
            "hahn_p requires N > n, got n={n}, N={big_n}"
        )));
    }
    let mm = m.unsigned_abs();
    let nn = n - mm;
    // Argument x = z + (N-1)/2, shifted to x = z - |m| + (N-1)/2 for m < 0.
    let mut shift = BigRational::new(BigInt::from(big_n - 1), BigInt::from(2));
    if m < 0 {
        shift -= BigRational::from(BigInt::from(mm as i64));
    }
    let x = UPoly::new(vec![
        GaussRational::from_rational(shift),
        GaussRational::one(),
    ]);

    // 3F2(-nn, -x, nn + 2 mm + 1; mm + 1, mm + 1 - N; 1), polynomial in x.
    let a1 = BigRational::from(BigInt::from(-(nn as i64)));
    let a3 = BigRational::from(BigInt::from(nn as i64 + 2 * mm as i64 + 1));
    let b1 = BigRational::from(BigInt::from(mm as i64 + 1));
    let b2 = BigRational::from(BigInt::from(mm as i64 + 1 - big_n));
    let mut sum = UPoly::zero();
    for k in 0..=nn as u64 {
        let num = pochhammer(&a1, k) * pochhammer(&a3, k);
        let den = pochhammer(&b1, k) * pochhammer(&b2, k) * factorial(k);
        // (-x)_k = prod_{j<k} (j - x)
        let mut x_poch = UPoly::one();
        for j in 0..k {
            let factor = UPoly::constant(GaussRational::from_rational(BigRational::from(
                BigInt::from(j),
            )))
            .sub(&x);
            x_poch = x_poch.mul(&factor);
        }
        sum = sum.add(&x_poch.scale(&GaussRational::from_rational(num / den)));
    }

    // Rational prefactor (m+1)_(n-m) (m+1-N)_(n-m) / (n-m)! and the sign
    // conventions; global scalars only, kept for definiteness.
    let mut prefactor = pochhammer(&b1, nn as u64) * pochhammer(&b2, nn as u64)
        / factorial(nn as u64);
    let sign_pow = if m >= 0 { nn } else { mm };
    if sign_pow % 2 == 1 {
        prefactor = -prefactor;
    }
    Ok(sum.scale(&GaussRational::from_rational(prefactor)))
}
