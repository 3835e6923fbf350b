use fuzzy_sphere::basis::BasisCache;
use fuzzy_sphere::matrep::bench_decompose;
fn main() {
    let basis = BasisCache::new();
    for degree in [4u32, 5, 6, 7, 8] {
        let r = bench_decompose(&basis, degree, 1, 12345, true).unwrap();
        println!(
            "degree {degree}: fast {:.0} ms, direct {:.0} ms, steps {}, agree {:?}",
            r.fast_ms, r.direct_ms.unwrap(), r.direct_rewrite_steps.unwrap(), r.agree
        );
    }
}
