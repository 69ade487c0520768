mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use common::{rng, to_state, unit_vector};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::Rng;
use rmom::bloch::{sector_lengths, SectorVector};
use rmom::polytope::*;
use rmom::statezoo;

fn sectors_of(rho: &rmom::qmat::DensityMatrix) -> SectorVector {
    sector_lengths(rho).unwrap()
}

fn ghz_w_sectors(g: f64, w: f64) -> SectorVector {
    sectors_of(&statezoo::noisy_ghz_w(g, w).unwrap())
}

fn threshold(pred: impl Fn(f64) -> bool) -> f64 {
    bisect(0.0, 1.0, 1e-12, pred).unwrap()
}

#[test]
fn full_sep_thresholds() {
    let g = threshold(|g| full_sep_test(&ghz_w_sectors(g, 0.0), 2).unwrap().violated);
    assert!((g - 1.0 / 5f64.sqrt()).abs() < 1e-8, "{g}");
    let w = threshold(|w| full_sep_test(&ghz_w_sectors(0.0, w), 2).unwrap().violated);
    assert!((w - 3.0 / 41f64.sqrt()).abs() < 1e-8, "{w}");
    let mm = sectors_of(&statezoo::maximally_mixed(2, 3).unwrap());
    assert!(!full_sep_test(&mm, 2).unwrap().violated);
}

#[test]
fn bisep_thresholds() {
    let g = threshold(|g| bisep_test(&ghz_w_sectors(g, 0.0), 2).unwrap().violated);
    assert!((g - (3.0f64 / 7.0).sqrt()).abs() < 1e-8, "{g}");
    for (g, inside) in [(0.25, false), (0.30, true), (0.45, true), (0.61, true), (0.62, false), (0.9, false)] {
        let v = bisep_test(&ghz_w_sectors(g, 1.0 - g), 2).unwrap();
        assert_eq!(!v.violated, inside, "g={g}");
    }
}

#[test]
fn legacy_thresholds() {
    let g = threshold(|g| legacy_sector_tests(&ghz_w_sectors(g, 0.0)).unwrap()[0].violated);
    assert!((g - 0.5).abs() < 1e-8);
    let w = threshold(|w| legacy_sector_tests(&ghz_w_sectors(0.0, w)).unwrap()[1].violated);
    assert!((w - 3.0 / 11f64.sqrt()).abs() < 1e-8);
    let ghz = legacy_sector_tests(&sectors_of(&statezoo::ghz())).unwrap();
    assert!((ghz[1].lhs - 4.0).abs() < 1e-12 && ghz[1].violated);
    assert!(legacy_sector_tests(&sectors_of(&statezoo::maximally_mixed(3, 3).unwrap())).is_err());
}

#[test]
fn verdict_tolerance() {
    assert!(!CriterionVerdict::new("x", 1.0 + 1e-10, 1.0).violated);
    assert!(CriterionVerdict::new("x", 1.0 + 1e-8, 1.0).violated);
    let v = CriterionVerdict::new("x", 2.0, 0.5);
    assert!((v.gap() - 1.5).abs() < 1e-15);
}

#[test]
fn wrong_party_count_is_rejected() {
    let s = sectors_of(&statezoo::bell());
    assert!(full_sep_test(&s, 2).is_err());
    assert!(bisep_test(&s, 2).is_err());
}

#[test]
fn three_qubit_polytope_points() {
    let ghz = sectors_of(&statezoo::ghz());
    assert!(three_qubit_polytope_member(ghz.a[1], ghz.a[2], ghz.a[3]));
    assert!(ghz.a[1].abs() < 1e-12 && (ghz.a[2] - 3.0).abs() < 1e-12 && (ghz.a[3] - 4.0).abs() < 1e-12);
    assert!(three_qubit_polytope_member(0.0, 0.0, 0.0));
    assert!(!three_qubit_polytope_member(3.0, 0.0, 0.0));
    assert!(!three_qubit_polytope_member(0.0, 3.5, 0.5));
    assert!(!three_qubit_polytope_member(-0.1, 0.0, 0.0));
    assert_eq!(three_qubit_facets(0.0, 0.0, 0.0)[0], 0.0);
}

#[test]
fn two_qudit_polytope_vertices() {
    for d in 2..=6 {
        let dm = (d - 1) as f64;
        let full = dm * (dm + 2.0);
        assert!(two_qudit_polytope_member(0.0, 0.0, full, d));
        assert!(two_qudit_polytope_member(dm, dm, dm * dm, d));
        assert!(two_qudit_polytope_member(dm, 0.0, 0.0, d));
        assert!(!two_qudit_polytope_member(dm, dm, 0.0, d));
        assert!(!two_qudit_polytope_member(0.0, 0.0, full + 0.01, d));

        // the example states sit where the labels say
        let me = sectors_of(&statezoo::phi_plus(d).unwrap());
        assert!((me.a[2] - full).abs() < 1e-10 && me.a[1].abs() < 1e-10);
        let pp = sectors_of(&statezoo::product_zero(d, 2).unwrap());
        assert!((pp.a[1] + pp.a[2] - full).abs() < 1e-10);
        assert!((dm * dm - dm * pp.a[1] + pp.a[2]).abs() < 1e-10);
    }
}

#[test]
fn isotropic_thresholds() {
    for d in 2..=5 {
        let purity_thr = threshold(|p| {
            let s = sectors_of(&statezoo::isotropic(p, d).unwrap());
            purity_sep_test(s.one_body_parts[0], s.one_body_parts[1], s.a[2], d).violated
        });
        assert!((purity_thr - 1.0 / ((d + 1) as f64).sqrt()).abs() < 1e-8, "d={d}");
        let legacy_thr = threshold(|p| {
            let s = sectors_of(&statezoo::isotropic(p, d).unwrap());
            legacy_two_qudit_test(s.a[2], d).violated
        });
        let want = ((d - 1) as f64).sqrt() / ((d + 1) as f64).sqrt();
        assert!((legacy_thr - want).abs() < 1e-8, "d={d}");
    }
}

#[test]
fn sep_family_saturates_purity_bound() {
    for d in 2..=5 {
        let df = d as f64;
        for i in 0..=8 {
            let p = 1.0 / df + (1.0 - 1.0 / df) * i as f64 / 8.0;
            for j in 0..=6 {
                let theta = FRAC_PI_2 * j as f64 / 6.0;
                for swap in [false, true] {
                    let rho = statezoo::sep_family(p, theta, d, swap).unwrap();
                    let s = sectors_of(&rho);
                    let (a1a, a1b) = (s.one_body_parts[0], s.one_body_parts[1]);
                    let v = purity_sep_test(a1a, a1b, s.a[2], d);
                    assert!(v.gap().abs() < 1e-9, "d={d} p={p} theta={theta}: {}", v.gap());

                    // closed forms for the unswapped one-body parts
                    let q = (1.0 - p) / (df - 1.0);
                    let c2 = theta.cos().powi(2);
                    let ea = df * p * p + df * (df - 1.0) * q * q - 1.0;
                    let choose = (df - 1.0) * (df - 2.0) / 2.0;
                    let eb = ea + 2.0 * df * (df - 1.0) * p * q * c2 + 2.0 * df * choose * q * q * c2 * c2;
                    let (got_a, got_b) = if swap { (a1b, a1a) } else { (a1a, a1b) };
                    assert!((got_a - ea).abs() < 1e-9);
                    assert!((got_b - eb).abs() < 1e-9);

                    // the purity equality on the marginal that carries the
                    // smaller one-body part
                    let ra = rho.partial_trace(&[if swap { 1 } else { 0 }]).unwrap();
                    assert!((rho.purity() - ra.purity()).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn sep_family_vertices() {
    for d in 2..=4 {
        let c = statezoo::sep_family(1.0, 0.3, d, false).unwrap();
        assert!(c.matrix().max_abs_diff(statezoo::product_zero(d, 2).unwrap().matrix()) < 1e-12);
        let a = sectors_of(&statezoo::sep_family(1.0 / d as f64, FRAC_PI_2, d, false).unwrap());
        assert!(a.one_body_parts[0].abs() < 1e-12 && a.one_body_parts[1].abs() < 1e-12);
        // theta = pi/2 keeps both one-body parts equal
        let s = sectors_of(&statezoo::sep_family(0.6, FRAC_PI_2, d, false).unwrap());
        assert!((s.one_body_parts[0] - s.one_body_parts[1]).abs() < 1e-12);
        let df = d as f64;
        let bound = df - 1.0 + (df - 2.0) / 2.0 * s.a[1];
        assert!((s.a[2] - bound).abs() < 1e-9);
    }
    assert!(statezoo::sep_family(0.1, 0.0, 3, false).is_err());
    assert!(statezoo::sep_family(0.5, 2.0, 3, false).is_err());
}

#[test]
fn bisep_family_saturates_and_matches_closed_forms() {
    for sign in [1.0, -1.0] {
        for i in 0..=10 {
            let p = 0.5 + 0.5 * i as f64 / 10.0;
            let lo = (1.0 - 1.0 / (2.0 * p)).max(0.0).sqrt();
            let hi = (1.0 / (2.0 * p)).sqrt().min(FRAC_1_SQRT_2);
            for j in 0..=10 {
                let a = lo + (hi - lo) * j as f64 / 10.0;
                let rho = statezoo::bisep_family(p, a, sign).unwrap();
                let s = sectors_of(&rho);
                let v = bisep_test(&s, 2).unwrap();
                assert!(v.gap().abs() < 1e-9, "p={p} a={a}: {}", v.gap());

                let (b, c, d) = statezoo::bisep_family_coefficients(p, a, sign).unwrap();
                let a1 = (2.0 * p - 1.0).powi(2);
                let x = 2.0 * p * a * b;
                let y = 2.0 * (1.0 - p) * c * d;
                let z = p * (a * a - b * b) - (1.0 - p) * (c * c - d * d);
                let a2 = 1.0 + 2.0 * (x + y).powi(2) + 2.0 * z * z;
                let a3 = a1 + 2.0 * (x - y).powi(2);
                assert!((s.a[1] - a1).abs() < 1e-9);
                assert!((s.a[2] - a2).abs() < 1e-9);
                assert!((s.a[3] - a3).abs() < 1e-9);
                assert!((8.0 * purity_gap_three(&rho).unwrap() - v.gap()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn bisep_family_vertices() {
    let zero = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let one = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
    let s = FRAC_1_SQRT_2;
    let phi_p = [C::new(s, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(s, 0.0)];
    let phi_m = [C::new(s, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(-s, 0.0)];
    let proj = |a: &[C; 2], b: &[C; 4]| {
        let v = nalgebra::DVector::from_fn(8, |i, _| a[i / 4] * b[i % 4]);
        common::projector(&v)
    };
    let va = statezoo::bisep_family(1.0, s, 1.0).unwrap();
    assert!(common::max_diff(&common::dense(va.matrix()), &proj(&zero, &phi_p)) < 1e-12);
    let vb = statezoo::bisep_family(0.5, s, -1.0).unwrap();
    let want = (proj(&zero, &phi_p) + proj(&one, &phi_m)) * C::new(0.5, 0.0);
    assert!(common::max_diff(&common::dense(vb.matrix()), &want) < 1e-12);
    assert!(statezoo::bisep_family(0.4, 0.5, 1.0).is_err());
    assert!(statezoo::bisep_family(1.0, 0.1, 1.0).is_err());
}

fn c2(v: &nalgebra::DVector<C>) -> [C; 2] {
    [v[0], v[1]]
}

fn c4(v: &nalgebra::DVector<C>) -> [C; 4] {
    [v[0], v[1], v[2], v[3]]
}

fn random_rank2<R: Rng>(r: &mut R) -> Rank2Sample {
    Rank2Sample {
        a: c2(&unit_vector(2, r)),
        bc: c4(&unit_vector(4, r)),
        ab: c4(&unit_vector(4, r)),
        c: c2(&unit_vector(2, r)),
    }
}

#[test]
fn rank2_examples() {
    let s = FRAC_1_SQRT_2;
    let z = C::new(0.0, 0.0);
    let phi = [C::new(s, 0.0), z, z, C::new(s, 0.0)];
    let zero = [C::new(1.0, 0.0), z];
    let sample = Rank2Sample { a: zero, bc: phi, ab: phi, c: zero };
    assert!(rank2_bisep_gap(&sample, 1.0).unwrap().abs() < 1e-12);
    assert!(rank2_bisep_gap(&sample, 0.5).unwrap() <= 1e-12);
    // maximally mixed single-party marginals on both sides
    let one = [z, C::new(1.0, 0.0)];
    let deg = Rank2Sample { a: zero, bc: phi, ab: phi, c: one };
    for p in [0.2, 0.5, 0.8] {
        assert!(rank2_bisep_gap(&deg, p).unwrap() < -1e-3, "p={p}");
    }
    assert!(rank2_bisep_gap(&sample, 1.5).is_err());
}

#[test]
fn rank2_mixtures_stay_below_zero() {
    let mut r = rng(77);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let sample = random_rank2(&mut r);
        let p: f64 = r.random();
        worst = worst.max(rank2_bisep_gap(&sample, p).unwrap());
    }
    assert!(worst <= 1e-9, "worst gap {worst}");
}

#[test]
fn product_mixtures_never_violate_full_sep() {
    let mut r = rng(1);
    for i in 0..10_000 {
        let m = common::random_product_mixture(&[2, 2, 2], &mut r);
        let s = sectors_of(&to_state(&[2, 2, 2], &m));
        let v = full_sep_test(&s, 2).unwrap();
        assert!(!v.violated, "sample {i}: gap {}", v.gap());
        assert!(three_qubit_polytope_member(s.a[1], s.a[2], s.a[3]));
    }
}

#[test]
fn fixed_bipartition_mixtures_never_violate_bisep() {
    let mut r = rng(2);
    for i in 0..10_000 {
        let m = common::random_fixed_bisep(i % 3, &mut r);
        let s = sectors_of(&to_state(&[2, 2, 2], &m));
        let v = bisep_test(&s, 2).unwrap();
        assert!(!v.violated, "sample {i}: gap {}", v.gap());
    }
}

#[test]
fn random_two_qudit_states_are_in_the_polytope() {
    let mut r = rng(3);
    for d in 2..=4 {
        for i in 0..10_000 {
            let m = if i % 2 == 0 {
                common::projector(&unit_vector(d * d, &mut r))
            } else {
                common::random_mixed(d * d, &mut r)
            };
            let s = sectors_of(&to_state(&[d, d], &m));
            assert!(two_qudit_polytope_member(s.one_body_parts[0], s.one_body_parts[1], s.a[2], d));
        }
    }
}

#[test]
fn purity_criterion_equals_marginal_purity_comparison() {
    let mut r = rng(4);
    let mut agree = 0;
    for i in 0..1000 {
        let d = 2 + i % 3;
        // mixtures with identity spread samples across the decision boundary
        let m = common::random_mixed(d * d, &mut r);
        let t: f64 = r.random();
        let m = m * C::new(t, 0.0) + common::M::identity(d * d, d * d) * C::new((1.0 - t) / (d * d) as f64, 0.0);
        let rho = to_state(&[d, d], &m);
        let s = sectors_of(&rho);
        let v = purity_sep_test(s.one_body_parts[0], s.one_body_parts[1], s.a[2], d);
        let pa = common::purity(&common::partial_trace(&m, &[d, d], &[0]));
        let pb = common::purity(&common::partial_trace(&m, &[d, d], &[1]));
        let direct = common::purity(&m) > pa.min(pb);
        assert_eq!(v.violated, direct, "sample {i}");
        agree += 1;
    }
    assert_eq!(agree, 1000);
}

proptest! {
    #![proptest_config(common::prop_config(200))]

    #[test]
    fn criterion_violation_matches_gap(lhs in -10.0f64..10.0, bound in -10.0f64..10.0) {
        let v = CriterionVerdict::new("t", lhs, bound);
        prop_assert_eq!(v.violated, lhs - bound > 1e-9);
    }

    #[test]
    fn bisep_family_in_window_saturates(p in 0.5f64..=1.0, t in 0.0f64..=1.0, neg in any::<bool>()) {
        let lo = (1.0 - 1.0 / (2.0 * p)).max(0.0).sqrt();
        let hi = (1.0 / (2.0 * p)).sqrt().min(FRAC_1_SQRT_2);
        let a = lo + (hi - lo) * t;
        let rho = statezoo::bisep_family(p, a, if neg { -1.0 } else { 1.0 }).unwrap();
        let s = sectors_of(&rho);
        prop_assert!((s.a[2] + s.a[3] - 3.0 * (1.0 + s.a[1])).abs() < 1e-9);
        prop_assert!(((2.0 * p - 1.0).powi(2) - s.a[1]).abs() < 1e-9);
    }
}
