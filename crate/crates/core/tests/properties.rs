//! Property tests over random fields, IFS and walks.

use std::cmp::Ordering;

use num_rational::BigRational;
use proptest::prelude::*;
use ssm_ball::RealBall;
use ssm_core::algebraic::height;
use ssm_core::diophantine::dc_count;
use ssm_core::fourier::{self, NumericIfs, DEFAULT_DELTA};
use ssm_core::io::{ifs_from_json, IfsJson};
use ssm_core::renewal::{hitting_probs, WalkSpec};
use ssm_core::uniqueness::{
    claim2_constant, claim2_distance, claim3_holds, classify_uniqueness, gamma_search, integral_form, s_decompose,
};
use ssm_core::{build_ifs, FieldElement, Ifs, IfsInput, NumberField, RatioSpec, Real, RootSelector};

const PREC: u32 = 128;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn same(a: &Real, b: &Real) -> bool {
    a.cmp_to(b, 1024) == Some(Ordering::Equal)
}

fn fields() -> Vec<NumberField> {
    [&[-1, -1, 1][..], &[-1, -1, 0, 1], &[-2, 0, 1], &[-3, -1, 1]]
        .iter()
        .map(|c| NumberField::from_coeffs(c, RootSelector::LargestReal).unwrap())
        .collect()
}

fn element(k: &NumberField, c: &[(i64, i64)]) -> FieldElement {
    k.from_coords(c.iter().take(k.degree()).map(|&(n, d)| q(n, d)).collect())
}

fn coords() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-20i64..=20, 1i64..=6), 3)
}

/// A rational IFS with base `1/b`, exponents in `1..=3`, distinct translations and a non-singleton attractor.
fn rational_ifs() -> impl Strategy<Value = Ifs> {
    (2i64..=4, prop::collection::vec((1u64..=3, -12i64..=12, 1i64..=4), 2..=3)).prop_filter_map("distinct maps", |(b, maps)| {
        let translations: Vec<Real> = maps.iter().map(|&(_, n, d)| Real::ratio(n, d)).collect();
        for i in 0..translations.len() {
            for j in 0..i {
                if same(&translations[i], &translations[j]) {
                    return None;
                }
            }
        }
        let k = maps.len() as i64;
        build_ifs(IfsInput {
            field: None,
            ratios: RatioSpec::Base { r: Real::ratio(1, b), exponents: maps.iter().map(|m| m.0).collect() },
            translations,
            probs: vec![q(1, k); maps.len()],
        })
        .ok()
        .filter(|ifs| (1..ifs.len()).any(|i| !same(&ifs.fixed_point(i), &ifs.fixed_point(0))))
    })
}

fn input_of(ifs: &Ifs) -> IfsInput {
    IfsInput {
        field: ifs.field().cloned(),
        ratios: RatioSpec::Base { r: ifs.r().clone(), exponents: ifs.exponents().to_vec() },
        translations: ifs.translations().to_vec(),
        probs: ifs.probs().to_vec(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_axioms(fi in 0usize..4, a in coords(), b in coords(), c in coords()) {
        let k = &fields()[fi];
        let (a, b, c) = (element(k, &a), element(k, &b), element(k, &c));
        prop_assert_eq!(k.mul(&a, &b), k.mul(&b, &a));
        prop_assert_eq!(k.mul(&k.add(&a, &b), &c), k.add(&k.mul(&a, &c), &k.mul(&b, &c)));
        prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
        if !a.is_zero() {
            prop_assert_eq!(k.mul(&a, &k.inv(&a).unwrap()), k.one());
        }
        for e in 0..k.degree() {
            let lhs = k.embed(&k.mul(&a, &b), e, PREC);
            let rhs = k.embed(&a, e, PREC).mul(&k.embed(&b, e, PREC));
            prop_assert!(lhs.overlaps(&rhs));
        }
    }

    #[test]
    fn height_is_nonnegative_and_inversion_invariant(fi in 0usize..4, a in coords()) {
        let k = &fields()[fi];
        let a = element(k, &a);
        prop_assume!(!a.is_zero());
        let h = height(k, &a, PREC);
        let hi = height(k, &k.inv(&a).unwrap(), PREC);
        prop_assert!(h.upper().to_f64() >= 0.0);
        prop_assert!(h.overlaps(&hi));
    }

    #[test]
    fn normalize_is_idempotent(ifs in rational_ifs()) {
        let n = ifs.normalize();
        let nn = n.normalize();
        prop_assert!(same(&n.translations()[0], &Real::int(0)));
        for (x, y) in n.translations().iter().zip(nn.translations()) {
            prop_assert!(same(x, y));
        }
    }

    #[test]
    fn rewrite_preserves_transform(ifs in rational_ifs(), seed in 0u64..1000) {
        let n = ifs.normalize();
        let (out, _) = match n.equal_ratio_rewrite(1, 256) {
            Ok(x) => x,
            Err(_) => return Ok(()),
        };
        prop_assert_eq!(out.exponents()[0], out.exponents()[1]);
        let a = NumericIfs::new(&n, PREC);
        let b = NumericIfs::new(&out, PREC);
        for i in 0..20 {
            let w = RealBall::from_f64(0.05 * (1.37f64).powi(i) * (1.0 + (seed % 7) as f64 / 10.0), PREC);
            let x = fourier::mu_hat(&a, &w, DEFAULT_DELTA).unwrap();
            let y = fourier::mu_hat(&b, &w, DEFAULT_DELTA).unwrap();
            prop_assert!(x.overlaps(&y), "ω = {}: {:?} vs {:?}", w.to_f64(), x.to_f64(), y.to_f64());
        }
    }

    #[test]
    fn verdict_is_conjugation_invariant(ifs in rational_ifs(), s in (1i64..=9, 1i64..=5, any::<bool>()), t in (-9i64..=9, 1i64..=5)) {
        let s = Real::ratio(if s.2 { s.0 } else { -s.0 }, s.1);
        let t = Real::ratio(t.0, t.1);
        let v = classify_uniqueness(&input_of(&ifs)).unwrap();
        let w = classify_uniqueness(&input_of(&ifs.conjugate(&s, &t))).unwrap();
        prop_assert_eq!(v.tag, w.tag);
    }

    #[test]
    fn dp_matches_product_when_homogeneous(b in 2i64..=5, a in prop::collection::vec(-8i64..=8, 2..=4), w in 0.1f64..5000.0) {
        let mut a = a;
        a.sort();
        a.dedup();
        prop_assume!(a.len() >= 2);
        let maps: Vec<String> = a.iter().map(|x| format!(r#"{{"l": 1, "a": "{x}/3"}}"#)).collect();
        let ifs = ifs_from_json(&format!(r#"{{"r": "1/{b}", "maps": [{}]}}"#, maps.join(","))).unwrap();
        let n = NumericIfs::new(&ifs, PREC);
        let w = RealBall::from_f64(w, PREC);
        let dp = fourier::mu_hat(&n, &w, DEFAULT_DELTA).unwrap();
        let pr = fourier::product_oracle(&n, &w, 1e-12).unwrap();
        prop_assert!(dp.overlaps(&pr));
        prop_assert!(dp.abs().lower().to_f64() <= 1.0);
    }

    #[test]
    fn points_lie_in_hull(ifs in rational_ifs(), prefix in prop::collection::vec(0usize..3, 0..12)) {
        let prefix: Vec<usize> = prefix.into_iter().map(|i| i % ifs.len()).collect();
        let p = ifs.point(&prefix, PREC).unwrap();
        let (lo, hi) = ifs.attractor_hull();
        prop_assert!(p.lower().to_f64() >= lo.to_f64() - 1e-8 * (1.0 + hi.to_f64() - lo.to_f64()));
        prop_assert!(p.upper().to_f64() <= hi.to_f64() + 1e-8 * (1.0 + hi.to_f64() - lo.to_f64()));
    }

    #[test]
    fn hitting_probabilities_are_probabilities(steps in prop::collection::vec(1u64..=5, 1..=4), w in prop::collection::vec(1i64..=5, 4)) {
        let total: i64 = w[..steps.len()].iter().sum();
        let probs = w[..steps.len()].iter().map(|&x| q(x, total)).collect();
        let Ok(spec) = WalkSpec::new(steps, probs) else {
            return Ok(());
        };
        let p = hitting_probs(&spec, 60);
        let zero = q(0, 1);
        let one = q(1, 1);
        prop_assert_eq!(&p[0], &one);
        prop_assert!(p.iter().all(|x| *x >= zero && *x <= one));
    }

    #[test]
    fn digit_changes_shift_with_the_ladder(n in 1i64..100_000, d in 1i64..50, lam in 2i64..=5) {
        let k = NumberField::from_coeffs(&[-lam, 1], RootSelector::LargestReal).unwrap();
        let x = Real::ratio(n, d);
        prop_assume!(x.to_f64() >= 1.0);
        let eps = q(1, 7);
        let (Ok(a), Ok(b)) = (dc_count(&x, &k, &eps), dc_count(&x.mul(&Real::int(lam)), &k, &eps)) else {
            return Ok(());
        };
        let top = b.rows[0].counted as u64;
        prop_assert_eq!(b.count, a.count + top);
    }

    #[test]
    fn ifs_json_round_trip(ifs in rational_ifs()) {
        let j = IfsJson::describe(&ifs);
        let text = serde_json::to_string(&j).unwrap();
        let back = IfsJson::from_str(&text).unwrap().build().unwrap();
        prop_assert_eq!(back.exponents(), ifs.exponents());
        prop_assert_eq!(back.probs(), ifs.probs());
        prop_assert!(same(back.r(), ifs.r()));
        for (x, y) in back.translations().iter().zip(ifs.translations()) {
            prop_assert!(same(x, y));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn claims_hold_on_random_prefixes(prefix in prop::collection::vec(0usize..3, 1..25), n_frac in 0.0f64..1.0, j in 0u64..25, ri in 0usize..3) {
        let ifs = ifs_from_json(r#"{"field": {"min_poly": [-1, -1, 1]}, "r": "[-1, 1]",
            "maps": [{"l": 1, "a": "0"}, {"l": 2, "a": "1"}, {"l": 2, "a": "[0, 1]"}]}"#).unwrap();
        let form = integral_form(&ifs).unwrap();
        let big_r = [10.0, 100.0, 1000.0][ri];
        let w = gamma_search(&form.field, big_r, None).unwrap();
        let total: u64 = prefix.iter().map(|&i| form.ifs.exponents()[i]).sum();
        let n = 1 + ((total - 1) as f64 * n_frac) as u64;
        let dec = s_decompose(&form.ifs, &prefix, n).unwrap();
        prop_assert!(claim2_distance(&form, &w.gamma, j, &dec) <= claim2_constant(&form, w.c) / big_r);
        if dec.e_prime < 2 {
            prop_assert!(claim3_holds(&form.ifs, &dec));
        }
    }
}
