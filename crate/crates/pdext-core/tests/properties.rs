//! Property tests for the structural invariants: Hermitian symmetry, the
//! F(0) bound, split/recombine, positivity of products, transform bounds,
//! and determinism of the stochastic pieces.

use num_complex::Complex64;
use pdext_core::bochner::{self, QuadratureSpec};
use pdext_core::gp::{self, CovKernel};
use pdext_core::model::{PdFunction, SpectralMeasure};
use pdext_core::pdcheck::{self, PsdVerdict};
use proptest::prelude::*;

fn catalog_function(id: u8, p: f64) -> PdFunction {
    match id % 7 {
        0 => PdFunction::f1(),
        1 => PdFunction::f2(),
        2 => PdFunction::f3(),
        3 => PdFunction::f4(),
        4 => PdFunction::f5(),
        5 => PdFunction::f6(),
        _ => PdFunction::f7(p).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_symmetry_and_bound(id in 0u8..7, p in 0.5f64..4.0, t in -0.999f64..0.999) {
        let f = catalog_function(id, p);
        let x = t * f.half_width();
        let v = f.evaluate(x).unwrap();
        let r = f.evaluate(-x).unwrap();
        prop_assert!((r - v.conj()).norm() < 1e-12);
        let f0 = f.evaluate(0.0).unwrap().re;
        prop_assert!(v.norm() <= f0 + 1e-12);
    }

    #[test]
    fn split_recombines(id in 0u8..7, p in 0.5f64..4.0, t in -0.99f64..0.99) {
        let f = catalog_function(id, p);
        let x = t * f.half_width();
        let (k, l) = f.split_real_imag();
        let v = f.evaluate(x).unwrap();
        let recombined = Complex64::new(k.evaluate(x).unwrap().re, l.evaluate(x).unwrap());
        prop_assert!((recombined - v).norm() < 1e-12);
        // K even, L odd
        prop_assert!((k.evaluate(x).unwrap().re - k.evaluate(-x).unwrap().re).abs() < 1e-12);
        prop_assert!((l.evaluate(x).unwrap() + l.evaluate(-x).unwrap()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn products_of_real_catalog_entries_stay_pd(
        ia in 0u8..6,
        ib in 0u8..6,
        n in 4usize..64,
        jitter in 0.0f64..1.0,
    ) {
        // real entries only: products of complex F7 with itself need the
        // conjugate factor to stay p.d.
        let fa = catalog_function(ia, 1.0);
        let fb = catalog_function(ib, 1.0);
        let prod = fa.product(&fb).unwrap();
        let hw = prod.half_width() * 0.49;
        let pts: Vec<f64> = (0..n)
            .map(|i| -hw + 2.0 * hw * (i as f64 + 0.5 * jitter) / n as f64)
            .collect();
        let report = pdcheck::is_pd_grid(&prod, &pts).unwrap();
        prop_assert_eq!(report.verdict, PsdVerdict::Psd);
    }

    #[test]
    fn transform_is_bounded_by_total_mass(which in 0u8..7, p in 0.6f64..3.5, x in -4.0f64..4.0) {
        let mu = match which % 7 {
            0 => SpectralMeasure::mu1(),
            1 => SpectralMeasure::mu2(),
            2 => SpectralMeasure::mu3(),
            3 => SpectralMeasure::mu4(),
            4 => SpectralMeasure::mu5(),
            5 => SpectralMeasure::mu6(),
            _ => SpectralMeasure::mu7(p).unwrap(),
        };
        let q = QuadratureSpec::default();
        let v = bochner::bochner_transform(&mu, x, &q).unwrap();
        prop_assert!(v.norm() <= mu.mass() + 1e-4);
        let at_zero = bochner::bochner_transform(&mu, 0.0, &q).unwrap();
        prop_assert!((at_zero.re - mu.mass()).abs() < 1e-4);
        prop_assert!(at_zero.im.abs() < 1e-9);
    }

    #[test]
    fn gram_verdict_is_order_independent(seed in 0u64..1000) {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let f3 = PdFunction::f3();
        let f2 = PdFunction::f2();
        let mut pts: Vec<f64> = (0..8).map(|_| 0.44 * next() + 0.01).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        prop_assume!(pts.len() >= 3);
        let fwd = pdcheck::domination(&f2, &f3, &pts, None).unwrap().minimal_a.unwrap();
        let mut rev = pts.clone();
        rev.reverse();
        let bwd = pdcheck::domination(&f2, &f3, &rev, None).unwrap().minimal_a.unwrap();
        prop_assert!((fwd - bwd).abs() <= 1e-8 * fwd.abs().max(1.0));
    }

    #[test]
    fn path_sampling_is_deterministic(seed in 0u64..500, m in 2usize..16) {
        let times: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let a = gp::sample_paths(&CovKernel::Bm, &times, m, seed).unwrap();
        let b = gp::sample_paths(&CovKernel::Bm, &times, m, seed).unwrap();
        prop_assert_eq!(a.paths, b.paths);
    }

    #[test]
    fn conjugate_reflect_preserves_positivity(p in 0.6f64..3.0, n in 3usize..12) {
        let f7 = PdFunction::f7(p).unwrap();
        let reflected = f7.conjugate_reflect();
        let pts: Vec<f64> = (0..n).map(|i| 0.45 * i as f64 / n as f64).collect();
        let r = pdcheck::is_pd_grid(&reflected, &pts).unwrap();
        prop_assert_eq!(r.verdict, PsdVerdict::Psd);
    }
}

#[test]
fn catalog_identity_holds_for_defaults() {
    // F(0) = 1 and the default pairs (F_i, mu_i) have matching values at
    // a couple of interior points (spot check; the acceptance suite sweeps).
    let q = QuadratureSpec::default();
    for (f, mu) in [
        (PdFunction::f1(), SpectralMeasure::mu1()),
        (PdFunction::f4(), SpectralMeasure::mu4()),
        (PdFunction::f6(), SpectralMeasure::mu6()),
    ] {
        for &t in &[0.25, 0.7] {
            let x = t * f.half_width();
            let lhs = bochner::bochner_transform(&mu, x, &q).unwrap();
            let rhs = f.evaluate(x).unwrap();
            assert!((lhs - rhs).norm() < 1e-6, "mismatch at {x}");
        }
    }
}
