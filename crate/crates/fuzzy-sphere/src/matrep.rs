//! Exact finite-dimensional representations and the fast decomposition.
//!
//! When `k^2 (N^2 - 1) = 4 u` the quotient algebra maps onto `N x N`
//! matrices. We work at the `k = 1` point, where `u = (N^2 - 1)/4` is
//! rational, in the non-unitary weight basis
//!
//! ```text
//! Jp v_r = (r + 1) v_(r+1),   Jm v_r = (N - r) v_(r-1),
//! z  v_r = (r - (N-1)/2) v_r,
//! ```
//!
//! which satisfies the same commutation relations and Casimir value as
//! the square-root form but keeps every entry rational; traces are
//! similarity invariant, so nothing is lost for the functionals used
//! here. General `k` dependence is recovered afterwards through the
//! weight grading (`weight_lift`).
//!
//! `decompose_fast` implements the evaluate-and-interpolate route: pair
//! the input against each basis element under the matrix trace at enough
//! sizes `N`, interpolate the coefficient as a polynomial in `u`, and
//! lift the `k` powers. Output is identical to the reference projection
//! in `basis`, at polynomial instead of rewriting cost.

use crate::basis::{BasisCache, BasisDecomp};
use crate::coeff::{poly_interpolate, weight_lift, GaussRational, ParamPoly, UPoly};
use crate::freealg::{rewrite_steps_total, FreeElement, Gen, NormalForm};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::time::Instant;

/// Dense `N x N` matrix over the Gaussian rationals; the image of an
/// element at `k = 1`, `u = (N^2 - 1)/4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRep {
    n: usize,
    entries: Vec<GaussRational>,
}

impl MatrixRep {
    pub fn zeros(n: usize) -> Self {
        MatrixRep {
            n,
            entries: vec![GaussRational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixRep::zeros(n);
        for r in 0..n {
            *m.at_mut(r, r) = GaussRational::one();
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, row: usize, col: usize) -> &GaussRational {
        &self.entries[row * self.n + col]
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut GaussRational {
        &mut self.entries[row * self.n + col]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GaussRational::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        MatrixRep { n: self.n, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        MatrixRep { n: self.n, entries }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        let entries = self.entries.iter().map(|a| a.mul(c)).collect();
        MatrixRep { n: self.n, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = MatrixRep::zeros(self.n);
        for r in 0..self.n {
            for k in 0..self.n {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..self.n {
                    let b = other.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let entry = out.at_mut(r, c);
                    *entry = entry.add(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn trace(&self) -> GaussRational {
        let mut acc = GaussRational::zero();
        for r in 0..self.n {
            acc = acc.add(self.at(r, r));
        }
        acc
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> GaussRational {
        assert_eq!(self.n, other.n);
        let mut acc = GaussRational::zero();
        for r in 0..self.n {
            for s in 0..self.n {
                let a = self.at(r, s);
                if a.is_zero() {
                    continue;
                }
                let b = other.at(s, r);
                if !b.is_zero() {
                    acc = acc.add(&a.mul(b));
                }
            }
        }
        acc
    }
}

fn rat(v: i64) -> BigRational {
    BigRational::from(BigInt::from(v))
}

/// The specialization point `u = (N^2 - 1)/4`.
pub fn u_at(n: i64) -> BigRational {
    BigRational::new(BigInt::from(n * n - 1), BigInt::from(4))
}

/// Generator image: strictly lower shift.
pub fn jp_matrix(big_n: usize) -> MatrixRep {
    let mut m = MatrixRep::zeros(big_n);
    for r in 0..big_n.saturating_sub(1) {
        *m.at_mut(r + 1, r) = GaussRational::from_rational(rat(r as i64 + 1));
    }
    m
}

/// Generator image: strictly upper shift.
pub fn jm_matrix(big_n: usize) -> MatrixRep {
    let mut m = MatrixRep::zeros(big_n);
    for r in 1..big_n {
        *m.at_mut(r - 1, r) = GaussRational::from_rational(rat(big_n as i64 - r as i64));
    }
    m
}

/// Generator image: diagonal weights `r - (N-1)/2`.
pub fn z_matrix(big_n: usize) -> MatrixRep {
    let mut m = MatrixRep::zeros(big_n);
    for r in 0..big_n {
        let val = BigRational::new(BigInt::from(2 * r as i64 - (big_n as i64 - 1)), BigInt::from(2));
        *m.at_mut(r, r) = GaussRational::from_rational(val);
    }
    m
}

fn gen_matrix(g: Gen, big_n: usize) -> MatrixRep {
    match g {
        Gen::Jp => jp_matrix(big_n),
        Gen::Jm => jm_matrix(big_n),
        Gen::Z => z_matrix(big_n),
        // x = (Jp + Jm)/2, y = (Jp - Jm)/(2i) = -i (Jp - Jm)/2
        Gen::X => jp_matrix(big_n)
            .add(&jm_matrix(big_n))
            .scale(&GaussRational::from_ratio(1, 2)),
        Gen::Y => {
            let half_over_i = GaussRational::new(
                BigRational::zero(),
                BigRational::new(BigInt::from(-1), BigInt::from(2)),
            );
            jp_matrix(big_n).sub(&jm_matrix(big_n)).scale(&half_over_i)
        }
    }
}

/// Adds `scale` times the image of one ordered monomial `Jp^a z^b Jm^c`
/// into `out`, column by column from the ladder actions (no matrix
/// products, no intermediate allocation).
fn phi_monomial_into(out: &mut MatrixRep, a: u32, b: u32, c: u32, scale: &GaussRational) {
    let big_n = out.size();
    let n_i = big_n as i64;
    for col in 0..big_n {
        let r = col as i64;
        if r < c as i64 || r - c as i64 + a as i64 > n_i - 1 {
            continue;
        }
        let mut val = BigRational::new(BigInt::from(1), BigInt::from(1));
        // Jm^c: product of (N - r + j), stepping down
        for j in 0..c as i64 {
            val *= rat(n_i - r + j);
        }
        // z^b at level r - c
        let level = r - c as i64;
        let zval = BigRational::new(BigInt::from(2 * level - (n_i - 1)), BigInt::from(2));
        for _ in 0..b {
            val *= &zval;
        }
        // Jp^a: product of (level + 1 + j), stepping up
        for j in 0..a as i64 {
            val *= rat(level + 1 + j);
        }
        let row = (r - c as i64 + a as i64) as usize;
        let entry = out.at_mut(row, col);
        *entry = entry.add(&scale.scale(&val));
    }
}

/// Image of one ordered monomial `Jp^a z^b Jm^c`.
#[cfg(test)]
fn phi_monomial(big_n: usize, a: u32, b: u32, c: u32) -> MatrixRep {
    let mut m = MatrixRep::zeros(big_n);
    phi_monomial_into(&mut m, a, b, c, &GaussRational::one());
    m
}

/// The representation of a normal form: each monomial maps to its ladder
/// matrix, coefficients evaluated at `k = 1`, `u = (N^2 - 1)/4`.
pub fn phi_n(f: &NormalForm, big_n: usize) -> Result<MatrixRep> {
    if big_n < 1 {
        return Err(Error::DomainError("phi_N needs N >= 1".into()));
    }
    let k0 = rat(1);
    let u0 = u_at(big_n as i64);
    let mut out = MatrixRep::zeros(big_n);
    for (&(a, b, c), coeff) in f.terms() {
        let val = coeff.eval(&k0, &u0)?;
        if val.is_zero() {
            continue;
        }
        phi_monomial_into(&mut out, a, b, c, &val);
    }
    Ok(out)
}

/// Word-by-word evaluation of a free element: the product of generator
/// matrices, no rewriting involved. Independent route used against
/// [`phi_n`] composed with normalization.
pub fn phi_free(f: &FreeElement, big_n: usize) -> Result<MatrixRep> {
    if big_n < 1 {
        return Err(Error::DomainError("phi_N needs N >= 1".into()));
    }
    let k0 = rat(1);
    let u0 = u_at(big_n as i64);
    let mut out = MatrixRep::zeros(big_n);
    for (word, coeff) in f.terms() {
        let val = coeff.eval(&k0, &u0)?;
        if val.is_zero() {
            continue;
        }
        let mut acc = MatrixRep::identity(big_n);
        for g in &word.0 {
            acc = acc.mul(&gen_matrix(*g, big_n));
        }
        out = out.add(&acc.scale(&val));
    }
    Ok(out)
}

/// The scalar functional through the matrix trace:
/// `pi0(f) = tr(phi_N(f)) / N` at the size-`N` point.
pub fn pi0_trace(f: &NormalForm, big_n: usize) -> Result<GaussRational> {
    let m = phi_n(f, big_n)?;
    Ok(m.trace().scale(&BigRational::new(BigInt::from(1), BigInt::from(big_n as i64))))
}

/// Fast decomposition by evaluate-and-interpolate. Exactly equal to
/// `BasisCache::decompose` on every input.
///
/// Each weight-homogeneous part is paired against `dagger T(n,m)` under
/// the matrix trace at sizes `N = n_max+1, ..., n_max+1+e_max` (all above
/// every basis degree present, so no kernel component is sampled); the
/// pairing values interpolate the `k = 1` coefficient as a polynomial in
/// `u`, and the weight grading restores the `k` powers.
pub fn decompose_fast(basis: &BasisCache, f: &NormalForm) -> Result<BasisDecomp> {
    let mut out = BasisDecomp::zero();
    let parts = f.split_by_weight();

    // Sector layout per weight: target (n, m) pairs and their u-degree
    // bounds. The pairing numerator is weight homogeneous of weight
    // (2n - m) + w with nonnegative k exponents, the norm has u-degree n,
    // and the division is exact, so deg_u <= (w - m)/2. (The k exponent of
    // the lifted coefficient may well be negative; that is the Laurent
    // part of the decomposition.)
    let mut targets: Vec<(i64, u32, i32, usize)> = Vec::new();
    let mut n_max = 0u32;
    for (&weight, fw) in &parts {
        for (m, stored) in fw.sectors() {
            let degree = stored.keys().max().copied().unwrap_or(0);
            let am = m.unsigned_abs() as u32;
            n_max = n_max.max(am + degree);
            for n in am..=am + degree {
                let e_bound = (weight - m).div_euclid(2);
                debug_assert!(e_bound >= 0, "sector above the total weight");
                targets.push((weight, n, m as i32, e_bound as usize));
            }
        }
    }
    if targets.is_empty() {
        return Ok(out);
    }

    // One size set for the whole run: every size lies above every basis
    // degree present (so no kernel component is sampled) and there are
    // enough nodes for the largest interpolation bound.
    let e_max = targets.iter().map(|&(_, _, _, e)| e).max().unwrap_or(0);
    let sizes: Vec<usize> = ((n_max as usize + 1)..=(n_max as usize + 1 + e_max)).collect();
    let u_values: Vec<BigRational> = sizes.iter().map(|&s| u_at(s as i64)).collect();

    // Lazy caches. The dagger-T images are single-band matrices (every
    // term of T(n,m) has ladder index m), held as band vectors and paired
    // in O(N); their k = 1 coefficients are specialized once per (n, m)
    // and Horner-evaluated per size. phi_N(fw) and the norm values are
    // cached per size as well.
    let mut fw_phi: HashMap<(i64, usize), MatrixRep> = HashMap::new();
    let mut t_k1: HashMap<(u32, i32), Vec<(u32, u32, u32, UPoly)>> = HashMap::new();
    let mut t_band: HashMap<(u32, i32, usize), Vec<GaussRational>> = HashMap::new();
    let mut norm_k1: HashMap<(u32, i32), UPoly> = HashMap::new();
    let mut norm_eval: HashMap<(u32, i32, usize), GaussRational> = HashMap::new();

    for (weight, n, m, e_bound) in targets {
        // e_bound + 1 nodes pin the interpolant; one extra node keeps the
        // degree check redundant. Small sizes keep the rationals small.
        let node_count = (e_bound + 2).min(sizes.len());
        let mut samples: Vec<(BigRational, GaussRational)> = Vec::new();
        for (&size, u0) in sizes.iter().zip(&u_values).take(node_count) {
            if !t_k1.contains_key(&(n, m)) {
                let dagger = basis.t(n, m)?.dagger();
                let terms: Vec<(u32, u32, u32, UPoly)> = dagger
                    .terms()
                    .map(|(&(a, b, c), coeff)| (a, b, c, coeff.at_kappa_one()))
                    .collect();
                t_k1.insert((n, m), terms);
            }
            if !t_band.contains_key(&(n, m, size)) {
                let u0_g = GaussRational::from_rational(u0.clone());
                let band = phi_band(&t_k1[&(n, m)], size, &u0_g);
                t_band.insert((n, m, size), band);
            }
            let band = &t_band[&(n, m, size)];
            if !fw_phi.contains_key(&(weight, size)) {
                fw_phi.insert((weight, size), phi_n(&parts[&weight], size)?);
            }
            // tr(A B) with A supported on row = col - m.
            let fw_mat = &fw_phi[&(weight, size)];
            let mut pairing = GaussRational::zero();
            for (col, a_val) in band.iter().enumerate() {
                if a_val.is_zero() {
                    continue;
                }
                let row = col as i64 - m as i64;
                let b_val = fw_mat.at(col, row as usize);
                if !b_val.is_zero() {
                    pairing = pairing.add(&a_val.mul(b_val));
                }
            }
            if !norm_eval.contains_key(&(n, m, size)) {
                if !norm_k1.contains_key(&(n, m)) {
                    norm_k1.insert((n, m), basis.norm_t(n, m)?.at_kappa_one());
                }
                let val = norm_k1[&(n, m)].eval(&GaussRational::from_rational(u0.clone()));
                debug_assert!(!val.is_zero(), "norm vanishes above every degree");
                norm_eval.insert((n, m, size), val.scale(&rat(size as i64)));
            }
            let val = pairing.div(&norm_eval[&(n, m, size)]);
            samples.push((u0.clone(), val));
        }
        let q: UPoly = poly_interpolate(&samples, e_bound)?;
        if q.is_zero() {
            continue;
        }
        let coeff = weight_lift(&q, weight, 2 * n as i64 - m as i64);
        out.add_term((n, m), &coeff);
    }
    Ok(out)
}

/// Band vector of a single-sector element's image from its `k = 1`
/// coefficient polynomials: entry `col` holds the matrix element in the
/// row the common ladder shift sends it to. Columns whose image falls
/// outside the matrix stay zero.
fn phi_band(
    terms: &[(u32, u32, u32, UPoly)],
    big_n: usize,
    u0: &GaussRational,
) -> Vec<GaussRational> {
    let n_i = big_n as i64;
    let mut band = vec![GaussRational::zero(); big_n];
    for (a, b, c, poly) in terms {
        let val = poly.eval(u0);
        if val.is_zero() {
            continue;
        }
        for col in 0..big_n {
            let r = col as i64;
            if r < *c as i64 || r - *c as i64 + *a as i64 > n_i - 1 {
                continue;
            }
            let mut entry = BigRational::new(BigInt::from(1), BigInt::from(1));
            for j in 0..*c as i64 {
                entry *= rat(n_i - r + j);
            }
            let level = r - *c as i64;
            let zval = BigRational::new(BigInt::from(2 * level - (n_i - 1)), BigInt::from(2));
            for _ in 0..*b {
                entry *= &zval;
            }
            for j in 0..*a as i64 {
                entry *= rat(level + 1 + j);
            }
            band[col] = band[col].add(&val.scale(&entry));
        }
    }
    band
}

/// Benchmark record for one degree: wall time of both decomposition
/// routes over the same seeded inputs, the rewrite-step count consumed by
/// the slow route, and exact agreement of the outputs.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub degree: u32,
    pub trials: u32,
    pub seed: u64,
    pub fast_ms: f64,
    pub direct_ms: Option<f64>,
    pub direct_rewrite_steps: Option<u64>,
    pub agree: Option<bool>,
}

/// Sparse pseudo-random normal form: `terms` monomials drawn from the
/// sectors of total degree at most `degree`, with small random Gaussian
/// rational coefficients.
pub fn random_sparse_normal_form(degree: u32, terms: usize, rng: &mut ChaCha8Rng) -> NormalForm {
    let mut out = NormalForm::zero();
    for _ in 0..terms {
        let m = rng.gen_range(-(degree as i64)..=(degree as i64));
        let b = rng.gen_range(0..=(degree - m.unsigned_abs() as u32));
        let re = GaussRational::from_ratio(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=4));
        let im = if rng.gen_range(0..3) == 0 {
            GaussRational::i().scale(&BigRational::from(BigInt::from(rng.gen_range(-3i64..=3))))
        } else {
            GaussRational::zero()
        };
        let coeff = ParamPoly::constant(re.add(&im));
        if coeff.is_zero() {
            continue;
        }
        if m >= 0 {
            out.add_term((m as u32, b, 0), &coeff);
        } else {
            out.add_term((0, b, (-m) as u32), &coeff);
        }
    }
    out
}

/// Dense pseudo-random normal form of the given degree: every sector
/// monomial `Jp^m z^b` / `z^b Jm^c` with total degree at most `degree`
/// gets a small random rational coefficient.
pub fn random_normal_form(degree: u32, rng: &mut ChaCha8Rng) -> NormalForm {
    let mut out = NormalForm::zero();
    for m in -(degree as i64)..=(degree as i64) {
        for b in 0..=(degree - m.unsigned_abs() as u32) {
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=4);
            let coeff = ParamPoly::constant(GaussRational::from_ratio(num, den));
            if coeff.is_zero() {
                continue;
            }
            if m >= 0 {
                out.add_term((m as u32, b, 0), &coeff);
            } else {
                out.add_term((0, b, (-m) as u32), &coeff);
            }
        }
    }
    out
}

/// Runs both decomposition routes on `trials` seeded dense inputs of the
/// given degree. The direct route can be skipped (it is the one with
/// super-polynomial growth).
pub fn bench_decompose(
    basis: &BasisCache,
    degree: u32,
    trials: u32,
    seed: u64,
    include_direct: bool,
) -> Result<BenchReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<NormalForm> = (0..trials.max(1))
        .map(|_| random_normal_form(degree, &mut rng))
        .collect();

    let start = Instant::now();
    let mut fast_results = Vec::with_capacity(inputs.len());
    for f in &inputs {
        fast_results.push(decompose_fast(basis, f)?);
    }
    let fast_ms = start.elapsed().as_secs_f64() * 1e3;

    if !include_direct {
        return Ok(BenchReport {
            degree,
            trials: trials.max(1),
            seed,
            fast_ms,
            direct_ms: None,
            direct_rewrite_steps: None,
            agree: None,
        });
    }

    let steps_before = rewrite_steps_total();
    let start = Instant::now();
    let mut agree = true;
    for (f, fast) in inputs.iter().zip(&fast_results) {
        let direct = basis.decompose(f)?;
        if direct != *fast {
            agree = false;
        }
    }
    let direct_ms = start.elapsed().as_secs_f64() * 1e3;
    let direct_rewrite_steps = rewrite_steps_total() - steps_before;

    Ok(BenchReport {
        degree,
        trials: trials.max(1),
        seed,
        fast_ms,
        direct_ms: Some(direct_ms),
        direct_rewrite_steps: Some(direct_rewrite_steps),
        agree: Some(agree),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisCache;
    use crate::coeff::ratio;
    use crate::freealg::{normalize, parse, Word};

    fn nf(text: &str) -> NormalForm {
        normalize(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn generator_relations_hold_exactly() {
        for big_n in 1..=6usize {
            let jp = jp_matrix(big_n);
            let jm = jm_matrix(big_n);
            let z = z_matrix(big_n);
            // [z, Jp] = Jp
            assert_eq!(z.mul(&jp).sub(&jp.mul(&z)), jp, "N={big_n}: [z,Jp]");
            // [z, Jm] = -Jm
            assert_eq!(
                z.mul(&jm).sub(&jm.mul(&z)),
                jm.scale(&GaussRational::from_int(-1)),
                "N={big_n}: [z,Jm]"
            );
            // [Jp, Jm] = 2 z
            assert_eq!(
                jp.mul(&jm).sub(&jm.mul(&jp)),
                z.scale(&GaussRational::from_int(2)),
                "N={big_n}: [Jp,Jm]"
            );
            // Casimir: z^2 + (Jm Jp + Jp Jm)/2 = u I
            let casimir = z
                .mul(&z)
                .add(&jm.mul(&jp).add(&jp.mul(&jm)).scale(&GaussRational::from_ratio(1, 2)));
            let expected = MatrixRep::identity(big_n)
                .scale(&GaussRational::from_rational(u_at(big_n as i64)));
            assert_eq!(casimir, expected, "N={big_n}: Casimir");
        }
    }

    #[test]
    fn phi_monomial_matches_products() {
        for big_n in 1..=5usize {
            for (a, b, c) in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 1, 0), (0, 2, 3), (1, 1, 1)] {
                let direct = phi_monomial(big_n, a, b, c);
                let mut prod = MatrixRep::identity(big_n);
                for _ in 0..a {
                    prod = prod.mul(&jp_matrix(big_n));
                }
                for _ in 0..b {
                    prod = prod.mul(&z_matrix(big_n));
                }
                for _ in 0..c {
                    prod = prod.mul(&jm_matrix(big_n));
                }
                assert_eq!(direct, prod, "N={big_n}, monomial ({a},{b},{c})");
            }
        }
    }

    #[test]
    fn phi_examples() {
        // phi_2(Jm Jp) = diag(1, 0)
        let m = phi_n(&nf("Jm*Jp"), 2).unwrap();
        let mut expected = MatrixRep::zeros(2);
        *expected.at_mut(0, 0) = GaussRational::one();
        assert_eq!(m, expected);

        // the Casimir combination vanishes identically
        for big_n in 1..=6usize {
            let f = nf("x^2 + y^2 + z^2 - u");
            assert!(phi_n(&f, big_n).unwrap().is_zero(), "Casimir at N={big_n}");
        }
    }

    #[test]
    fn kernel_is_exactly_high_degrees() {
        let basis = BasisCache::new();
        for big_n in 1..=7usize {
            for n in 0..=6u32 {
                for m in [-(n as i32), 0, n as i32] {
                    let t = basis.t(n, m).unwrap();
                    let image = phi_n(&t, big_n).unwrap();
                    assert_eq!(
                        image.is_zero(),
                        n as usize >= big_n,
                        "kernel at N={big_n}, T({n},{m})"
                    );
                }
            }
        }
    }

    #[test]
    fn pi0_trace_examples() {
        // z^2 at N = 2: trace diag(1/4, 1/4) / 2 = 1/4
        assert_eq!(
            pi0_trace(&nf("z^2"), 2).unwrap(),
            GaussRational::from_ratio(1, 4)
        );
        // constants
        for big_n in 1..=5usize {
            assert_eq!(
                pi0_trace(&NormalForm::one(), big_n).unwrap(),
                GaussRational::one()
            );
        }
        // pi0_trace(Jm^n Jp^n, N) matches the closed form nu_n
        let basis = BasisCache::new();
        for n in 0..=6u32 {
            for big_n in (n as usize + 1)..=10 {
                let word = nf(&format!("Jm^{n}*Jp^{n}"));
                let lhs = pi0_trace(&word, big_n).unwrap();
                let rhs = basis.nu(n).eval(&ratio(1, 1), &u_at(big_n as i64)).unwrap();
                assert_eq!(lhs, rhs, "nu_{n} at N={big_n}");
            }
        }
    }

    #[test]
    fn homomorphism_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..12 {
            let f = random_normal_form(3, &mut rng);
            let g = random_normal_form(2, &mut rng);
            let prod = crate::freealg::nf_mul(&f, &g);
            for big_n in [2usize, 4, 7] {
                let lhs = phi_n(&prod, big_n).unwrap();
                let rhs = phi_n(&f, big_n).unwrap().mul(&phi_n(&g, big_n).unwrap());
                assert_eq!(lhs, rhs, "homomorphism at N={big_n}");
            }
        }
    }

    #[test]
    fn normalize_agrees_with_word_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..30 {
            let len = rng.gen_range(0..=6);
            let letters: Vec<Gen> = (0..len)
                .map(|_| match rng.gen_range(0..3) {
                    0 => Gen::Jp,
                    1 => Gen::Jm,
                    _ => Gen::Z,
                })
                .collect();
            let f = FreeElement::from_word(Word(letters), ParamPoly::one());
            let normalized = normalize(&f).unwrap();
            for big_n in [2usize, 3, 5, 8] {
                assert_eq!(
                    phi_n(&normalized, big_n).unwrap(),
                    phi_free(&f, big_n).unwrap(),
                    "soundness at N={big_n}"
                );
            }
        }
    }

    #[test]
    fn trace_consistency_with_symbolic_pi0() {
        let basis = BasisCache::new();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let f = random_normal_form(4, &mut rng);
            let symbolic = basis.pi0(&f);
            for big_n in [5usize, 6, 9] {
                let lhs = pi0_trace(&f, big_n).unwrap();
                let rhs = symbolic.eval(&ratio(1, 1), &u_at(big_n as i64)).unwrap();
                assert_eq!(lhs, rhs, "trace functional at N={big_n}");
            }
        }
    }

    #[test]
    fn decompose_fast_examples() {
        let basis = BasisCache::new();
        // z^2 -> {(0,0): u/3, (2,0): k^-2/12}
        let d = decompose_fast(&basis, &nf("z^2")).unwrap();
        let mut expected = BasisDecomp::zero();
        expected.add_term((0, 0), &ParamPoly::monomial(0, 1, GaussRational::from_ratio(1, 3)));
        expected.add_term(
            (2, 0),
            &ParamPoly::monomial(-2, 0, GaussRational::from_ratio(1, 12)),
        );
        assert_eq!(d, expected);

        // basis element round trip
        let t = basis.t(3, 1).unwrap();
        let d = decompose_fast(&basis, &t).unwrap();
        assert_eq!(d, BasisDecomp::unit(3, 1));
    }

    #[test]
    fn decompose_fast_matches_reference() {
        let basis = BasisCache::new();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..6 {
            let f = random_normal_form(5, &mut rng);
            let fast = decompose_fast(&basis, &f).unwrap();
            let direct = basis.decompose(&f).unwrap();
            assert_eq!(fast, direct);
        }
        // and on an element with parameter-laden coefficients
        let f = nf("u*z^2 + k^2*Jp*z - 3*Jm");
        assert_eq!(
            decompose_fast(&basis, &f).unwrap(),
            basis.decompose(&f).unwrap()
        );
    }

    #[test]
    fn bench_smoke() {
        let basis = BasisCache::new();
        let report = bench_decompose(&basis, 4, 2, 99, true).unwrap();
        assert_eq!(report.agree, Some(true));
        assert!(report.direct_rewrite_steps.unwrap() > 0);
        let fast_only = bench_decompose(&basis, 4, 2, 99, false).unwrap();
        assert!(fast_only.direct_ms.is_none());
    }
}
