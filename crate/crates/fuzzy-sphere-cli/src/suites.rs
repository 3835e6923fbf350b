//! Named verification suites behind `fuzzy-sphere verify`.
//!
//! Each suite runs a family of exact identities (or tolerance checks on
//! the numeric sphere side) and returns human-readable failure strings;
//! an empty list means the suite passed.

use fuzzy_sphere::basis::{
    ad_jm, ad_jp, ad_z, hahn_p, laplacian, left_ideal_z_member, left_ideal_z_quotient, sigma_n,
    BasisCache, BasisDecomp,
};
use fuzzy_sphere::coeff::{factorial, ratio, GaussRational, ParamPoly, UPoly};
use fuzzy_sphere::freealg::{nf_mul, normalize, parse, NormalForm};
use fuzzy_sphere::matrep::{phi_n, pi0_trace, random_normal_form, u_at};
use fuzzy_sphere::sphere::{
    grid, minus_i_pow, moyal_limit, poisson, sphere_inner, t_limit_scale, to_sphere, ylm,
    SphereFunction,
};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct SuiteReport {
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new() -> Self {
        SuiteReport {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, label: impl Fn() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(label());
        }
    }
}

fn nf(text: &str) -> NormalForm {
    normalize(&parse(text).expect("suite expression parses")).expect("suite expression reduces")
}

fn all_t(basis: &BasisCache, n_max: u32) -> Vec<(u32, i32, NormalForm)> {
    let mut out = Vec::new();
    for n in 0..=n_max {
        for m in -(n as i32)..=(n as i32) {
            out.push((n, m, basis.t(n, m).expect("|m| <= n")));
        }
    }
    out
}

pub fn orthogonality(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    let all = all_t(basis, n_max);
    for (i, (n1, m1, t1)) in all.iter().enumerate() {
        for (n2, m2, t2) in &all[i + 1..] {
            let val = basis.inner(t1, t2);
            report.check(val.is_zero(), || {
                format!("<T({n1},{m1}), T({n2},{m2})> = {val} != 0")
            });
        }
    }
    report
}

pub fn norms(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    for n in 0..=n_max {
        let t = basis.t(n, n as i32).expect("diagonal element");
        let direct = basis.inner(&t, &t);
        let closed = basis.nu(n);
        report.check(direct == closed, || {
            format!("inner(T({n},{n})) = {direct} differs from closed form {closed}")
        });
        // independent route: matrix traces + interpolation at k = 1
        let word = {
            let jm = NormalForm::monomial(0, 0, n, ParamPoly::one());
            let jp = NormalForm::monomial(n, 0, 0, ParamPoly::one());
            nf_mul(&jm, &jp)
        };
        let mut samples = Vec::new();
        for big_n in (n as usize + 1)..=(n as usize + 2 + n as usize) {
            let val = pi0_trace(&word, big_n).expect("trace");
            samples.push((u_at(big_n as i64), val));
        }
        let interp = fuzzy_sphere::coeff::poly_interpolate(&samples, n as usize)
            .expect("nu_n has u-degree n");
        report.check(interp == closed.at_kappa_one(), || {
            format!("trace-interpolated nu_{n} differs from closed form")
        });
    }
    report
}

pub fn spectra(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    for (n, m, t) in all_t(basis, n_max) {
        let ez = ad_z(&t);
        let expected = t.scale(&ParamPoly::kappa().scale(&GaussRational::from_int(m as i64)));
        report.check(ez == expected, || format!("e_z eigenvalue at T({n},{m})"));
        let lap = laplacian(&t);
        let factor = ParamPoly::monomial(2, 0, GaussRational::from_int(n as i64 * (n as i64 + 1)));
        report.check(lap == t.scale(&factor), || {
            format!("Laplacian eigenvalue at T({n},{m})")
        });
    }
    report
}

pub fn ladder(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    for (n, m, t) in all_t(basis, n_max) {
        let up = ad_jp(&t);
        let expected_up = if m < n as i32 {
            let scalar = (n as i64 - m as i64) * (n as i64 + m as i64 + 1);
            basis
                .t(n, m + 1)
                .unwrap()
                .scale(&ParamPoly::monomial(2, 0, GaussRational::from_int(scalar)))
        } else {
            NormalForm::zero()
        };
        report.check(up == expected_up, || format!("e_+ on T({n},{m})"));

        let down = ad_jm(&t);
        let expected_down = if m > -(n as i32) {
            basis.t(n, m - 1).unwrap()
        } else {
            NormalForm::zero()
        };
        report.check(down == expected_down, || format!("e_- on T({n},{m})"));
    }
    report
}

pub fn dagger(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    let k1 = ratio(1, 1);
    for (n, m, t) in all_t(basis, n_max) {
        let m_i = m as i64;
        let mut factor =
            factorial((n as i64 - m_i) as u64) / factorial((n as i64 + m_i) as u64);
        if m_i.rem_euclid(2) == 1 {
            factor = -factor;
        }
        // at k = 1 the Laurent factor k^(-2m) collapses
        let lhs = t.dagger().specialize(&k1, &ratio(7, 3)).expect("k=1 point");
        let rhs = basis
            .t(n, -m)
            .unwrap()
            .scale(&ParamPoly::constant(GaussRational::from_rational(factor)))
            .specialize(&k1, &ratio(7, 3))
            .expect("k=1 point");
        report.check(lhs == rhs, || format!("dagger law at T({n},{m})"));
    }
    report
}

pub fn sigma(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    let k1 = ratio(1, 1);
    // integer case at u = 2: zero signs from n = 3 on
    for n in 0..=n_max {
        let expected = if n <= 2 { 1 } else { 0 };
        let got = sigma_n(n, &k1, &ratio(2, 1)).expect("u > 0");
        report.check(got == expected, || {
            format!("sigma_{n}(1, 2) = {got}, expected {expected}")
        });
    }
    let got = sigma_n(3, &k1, &ratio(1, 1)).expect("u > 0");
    report.check(got == -1, || format!("sigma_3(1, 1) = {got}, expected -1"));
    // table against the sign of the evaluated product form
    for u0 in [ratio(1, 1), ratio(2, 1), ratio(7, 3), ratio(5, 1), ratio(9, 2)] {
        for n in 0..=n_max {
            let nu_val = basis.nu(n).eval(&k1, &u0).expect("rational point");
            let sign = if nu_val.re.is_zero() {
                0
            } else if nu_val.re.is_positive() {
                1
            } else {
                -1
            };
            let table = sigma_n(n, &k1, &u0).expect("u > 0");
            report.check(table == sign, || {
                format!("sigma_{n} at u={u0}: table {table} vs product sign {sign}")
            });
        }
    }
    report
}

pub fn representation(basis: &BasisCache, n_max: u32, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // homomorphism
    for _ in 0..20 {
        let f = random_normal_form(3, &mut rng);
        let g = random_normal_form(2, &mut rng);
        let prod = nf_mul(&f, &g);
        for big_n in [2usize, 5, 8] {
            let lhs = phi_n(&prod, big_n).expect("phi");
            let rhs = phi_n(&f, big_n)
                .expect("phi")
                .mul(&phi_n(&g, big_n).expect("phi"));
            report.check(lhs == rhs, || format!("homomorphism at N={big_n}"));
        }
    }
    // kernel
    for big_n in 1..=7usize {
        for n in 0..=n_max.min(6) {
            for m in [-(n as i32), 0, n as i32] {
                let t = basis.t(n, m).unwrap();
                let zero = phi_n(&t, big_n).expect("phi").is_zero();
                report.check(zero == (n as usize >= big_n), || {
                    format!("kernel at N={big_n}, T({n},{m})")
                });
            }
        }
    }
    // trace functional
    for _ in 0..10 {
        let f = random_normal_form(4, &mut rng);
        let symbolic = basis.pi0(&f);
        for big_n in [5usize, 7, 9] {
            let lhs = pi0_trace(&f, big_n).expect("trace");
            let rhs = symbolic
                .eval(&ratio(1, 1), &u_at(big_n as i64))
                .expect("rational point");
            report.check(lhs == rhs, || format!("pi0 trace at N={big_n}"));
        }
    }
    report
}

pub fn hahn(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    for n in 0..=n_max {
        for m in 0..=(n as i32) {
            for big_n in (n as i64 + 1)..=(n as i64 + 4) {
                let u0 = BigRational::new(
                    num_bigint::BigInt::from(big_n * big_n - 1),
                    num_bigint::BigInt::from(4),
                );
                let t = basis
                    .t(n, m)
                    .unwrap()
                    .specialize(&ratio(1, 1), &u0)
                    .expect("k=1 point");
                let sector = t.sectors().remove(&(m as i64)).unwrap_or_default();
                let mut tp = UPoly::zero();
                for (deg, coeff) in sector {
                    let c = coeff.eval(&ratio(1, 1), &u0).expect("constant");
                    let mut mono = vec![GaussRational::zero(); deg as usize + 1];
                    mono[deg as usize] = c;
                    tp = tp.add(&UPoly::new(mono));
                }
                let h = hahn_p(n, m, big_n).expect("N > n");
                let lhs = tp.scale(&h.leading());
                let rhs = h.scale(&tp.leading());
                report.check(lhs == rhs, || {
                    format!("Hahn route differs at (n,m,N)=({n},{m},{big_n})")
                });
            }
        }
    }
    report
}

pub fn sphere(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    let radius = 1.0;
    let points = grid(17, 32);
    // orthonormality
    for n1 in 0..=n_max.min(5) {
        for m1 in -(n1 as i32)..=(n1 as i32) {
            for n2 in n1..=n_max.min(5) {
                for m2 in -(n2 as i32)..=(n2 as i32) {
                    let f = SphereFunction::from_harmonics(
                        radius,
                        [((n1, m1), Complex64::new(1.0, 0.0))].into_iter().collect(),
                    );
                    let g = SphereFunction::from_harmonics(
                        radius,
                        [((n2, m2), Complex64::new(1.0, 0.0))].into_iter().collect(),
                    );
                    let val = sphere_inner(&f, &g);
                    let expected = if (n1, m1) == (n2, m2) { 1.0 } else { 0.0 };
                    report.check((val - expected).norm() < 1e-9, || {
                        format!("<Y({n1},{m1}), Y({n2},{m2})> = {val}")
                    });
                }
            }
        }
    }
    // basis limit
    for n in 0..=n_max.min(5) {
        for m in -(n as i32)..=(n as i32) {
            let d = BasisDecomp::single(
                n,
                m,
                ParamPoly::monomial(m as i64 - n as i64, 0, GaussRational::one()),
            );
            let f = to_sphere(basis, &d, radius).expect("regular limit");
            let scale = t_limit_scale(n, m, radius) * minus_i_pow(m)
                * if n % 2 == 0 { 1.0 } else { -1.0 };
            let err = points
                .iter()
                .map(|&(t, p)| (f.eval(t, p) / scale - ylm(n, -m, t, p).unwrap()).norm())
                .fold(0.0, f64::max);
            report.check(err < 1e-10, || {
                format!("basis limit at T({n},{m}), err = {err:.3e}")
            });
        }
    }
    report
}

pub fn moyal(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    let radius = 1.0;
    let points = grid(17, 32);
    let mut elements: Vec<(String, NormalForm)> = vec![
        ("x".into(), nf("x")),
        ("y".into(), nf("y")),
        ("z".into(), nf("z")),
    ];
    for n in 0..=n_max.min(3) {
        for m in -(n as i32)..=(n as i32) {
            elements.push((format!("T({n},{m})"), basis.t(n, m).unwrap()));
        }
    }
    for (name_f, f) in &elements {
        for (name_g, g) in &elements {
            let lhs = moyal_limit(basis, f, g, radius).expect("regular pair");
            let ff = to_sphere(basis, &basis.decompose(f).unwrap(), radius).unwrap();
            let gg = to_sphere(basis, &basis.decompose(g).unwrap(), radius).unwrap();
            let rhs = poisson(&ff, &gg).expect("exact forms present");
            let err = points
                .iter()
                .map(|&(t, p)| (lhs.eval(t, p) - rhs.eval(t, p)).norm())
                .fold(0.0, f64::max);
            report.check(err < 1e-10, || {
                format!("bracket routes differ on ({name_f}, {name_g}): {err:.3e}")
            });
        }
    }
    // generator identity {x, y} = z exactly
    let fx = to_sphere(basis, &basis.decompose(&nf("x")).unwrap(), radius).unwrap();
    let fy = to_sphere(basis, &basis.decompose(&nf("y")).unwrap(), radius).unwrap();
    let fz = to_sphere(basis, &basis.decompose(&nf("z")).unwrap(), radius).unwrap();
    let bracket = poisson(&fx, &fy).expect("exact forms");
    report.check(bracket.jform() == fz.jform(), || "{x, y} != z".to_string());
    report
}

pub fn omega(basis: &BasisCache, n_max: u32) -> SuiteReport {
    let mut report = SuiteReport::new();
    let k1 = ratio(1, 1);
    for p in 0..=n_max.min(4) {
        for u0 in [ratio(2, 1), ratio(3, 1), ratio(5, 1)] {
            let out = basis
                .omega_apply(p, &NormalForm::one(), &k1, &u0)
                .expect("k != 0");
            let s = sigma_n(p, &k1, &u0).expect("u > 0");
            if s == 0 {
                report.check(out.degenerate && out.value.is_zero(), || {
                    format!("degenerate omega_{p}(1) at u={u0}")
                });
            } else {
                let expected =
                    NormalForm::scalar(ParamPoly::from_int(s as i64 * (2 * p as i64 + 1)));
                report.check(!out.degenerate && out.value == expected, || {
                    format!("omega_{p}(1) at u={u0}")
                });
            }
        }
    }
    // diagonality with m-independent eigenvalue
    let u0 = ratio(7, 1);
    for p in 0..=n_max.min(3) {
        for n in 0..=n_max.min(3) {
            let mut eigenvalue: Option<ParamPoly> = None;
            for m in -(n as i32)..=(n as i32) {
                let t = basis
                    .t(n, m)
                    .unwrap()
                    .specialize(&k1, &u0)
                    .expect("k=1 point");
                let out = basis
                    .omega_apply(p, &basis.t(n, m).unwrap(), &k1, &u0)
                    .expect("k != 0");
                // out.value = lambda * t for a scalar lambda
                let lambda = match (out.value.terms().next(), t.terms().next()) {
                    (None, _) => ParamPoly::zero(),
                    (Some((key, coeff)), _) => {
                        let base = t.coeff(key.0, key.1, key.2);
                        if base.is_zero() {
                            report
                                .failures
                                .push(format!("omega_{p}(T({n},{m})) not aligned"));
                            continue;
                        }
                        coeff.div_exact(&base).unwrap_or_else(ParamPoly::zero)
                    }
                };
                report.check(out.value == t.scale(&lambda), || {
                    format!("omega_{p}(T({n},{m})) is not a multiple of T({n},{m})")
                });
                match &eigenvalue {
                    None => eigenvalue = Some(lambda),
                    Some(prev) => {
                        report.check(*prev == lambda, || {
                            format!("omega_{p} eigenvalue at T({n},{m}) depends on m")
                        });
                    }
                }
            }
        }
    }
    report
}

pub fn appendix(n_max: u32) -> SuiteReport {
    use fuzzy_sphere::symtf::{formal_trace, split_check, SExpr, SymCache};
    let mut report = SuiteReport::new();
    let sym = SymCache::new();
    let cap = n_max.min(5);
    // splitting identity
    for a in 0..=cap {
        for b in 0..=(cap - a) {
            for c in 0..=(cap - a - b) {
                for m in 0..=(a + b + c) {
                    report.check(split_check(a, b, c, m), || {
                        format!("split of Ssym({a},{b},{c}) at order {m}")
                    });
                }
            }
        }
    }
    // trace-free diagonal elements
    for n in 0..=n_max.min(6) {
        let s = sym.t_sexpr(n, n as i32).expect("diagonal");
        report.check(formal_trace(&s).is_zero(), || {
            format!("symmetric form of T({n},{n}) is not trace-free")
        });
    }
    // Tr ad = ad Tr on seeded random symmetric expressions
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    use rand::Rng;
    for _ in 0..30 {
        let mut s = SExpr::zero();
        for _ in 0..3 {
            let a = rng.gen_range(0..3u32);
            let b = rng.gen_range(0..3u32);
            let c = rng.gen_range(0..2u32);
            s.add_term(
                (a, b, c),
                &ParamPoly::constant(GaussRational::from_ratio(
                    rng.gen_range(-4i64..5),
                    rng.gen_range(1i64..4),
                )),
            );
        }
        for axis in [
            fuzzy_sphere::freealg::Gen::X,
            fuzzy_sphere::freealg::Gen::Y,
            fuzzy_sphere::freealg::Gen::Z,
        ] {
            let lhs = formal_trace(&sym.ad_gen(axis, &s));
            let rhs = sym.ad_gen(axis, &formal_trace(&s));
            report.check(lhs == rhs, || format!("Tr ad != ad Tr on {axis:?}"));
        }
    }
    report
}

pub fn ideal(n_max: u32, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degree = n_max.min(4);
    for trial in 0..100 {
        // member: g z
        let g = random_normal_form(degree, &mut rng);
        let member = nf_mul(&g, &NormalForm::z());
        report.check(left_ideal_z_member(&member), || {
            format!("constructed member rejected (trial {trial})")
        });
        let witness = left_ideal_z_quotient(&member);
        report.check(
            witness
                .map(|w| nf_mul(&w, &NormalForm::z()) == member)
                .unwrap_or(false),
            || format!("witness reconstruction failed (trial {trial})"),
        );
        // non-member: shift by a nonzero constant
        let bad = member.add(&NormalForm::one());
        report.check(!left_ideal_z_member(&bad), || {
            format!("shifted non-member accepted (trial {trial})")
        });
        report.check(left_ideal_z_quotient(&bad).is_none(), || {
            format!("witness produced for non-member (trial {trial})")
        });
    }
    report
}

pub fn run(name: &str, n_max: u32, seed: u64) -> Option<SuiteReport> {
    let basis = BasisCache::new();
    let report = match name {
        "orthogonality" => orthogonality(&basis, n_max),
        "norms" => norms(&basis, n_max),
        "spectra" => spectra(&basis, n_max),
        "ladder" => ladder(&basis, n_max),
        "dagger" => dagger(&basis, n_max),
        "sigma" => sigma(&basis, n_max),
        "representation" => representation(&basis, n_max, seed),
        "hahn" => hahn(&basis, n_max),
        "sphere" => sphere(&basis, n_max),
        "moyal" => moyal(&basis, n_max),
        "omega" => omega(&basis, n_max),
        "appendix" => appendix(n_max),
        "ideal" => ideal(n_max, seed),
        _ => return None,
    };
    Some(report)
}

pub const SUITE_NAMES: &[&str] = &[
    "orthogonality",
    "norms",
    "spectra",
    "ladder",
    "dagger",
    "sigma",
    "representation",
    "hahn",
    "sphere",
    "moyal",
    "omega",
    "appendix",
    "ideal",
];
