use hsolv::algebra::{
    aberth_roots, commutative_symbol, companion_roots, homogeneous_part, is_ordered, min_pairwise_gap, order_roots,
    root_set_distance, Letter, NcPolynomial, NcWord,
};
use hsolv::config::{Config, GammaRange};
use hsolv::diagonalization::{build_frame, exponents, normalized, table_roots};
use hsolv::numerics::{gamma_scan, schwartz_match, schwartz_match_realization, OdeModel};
use hsolv::realization::{coefficient_table, eval_q, realize, Sign};
use hsolv::scalar::{gauss, Gauss, C64};
use hsolv::verdict::{classify, integral_bound_harness};
use hsolv::verify::{exponent_laws, frame_errors, operator_from_roots};
use proptest::prelude::*;

fn word() -> impl Strategy<Value = NcWord> {
    prop::collection::vec(prop_oneof![Just(Letter::X), Just(Letter::Y)], 0..=6).prop_map(NcWord)
}

fn small_gauss() -> impl Strategy<Value = Gauss> {
    (-5i64..=5, -5i64..=5).prop_map(|(a, b)| gauss(a, b))
}

fn poly(max_terms: usize) -> impl Strategy<Value = NcPolynomial> {
    prop::collection::vec((word(), small_gauss()), 1..=max_terms).prop_map(NcPolynomial::from_terms)
}

/// Lower-grade terms (grade below `n`) with small integer coefficients.
fn lower_terms(n: usize) -> impl Strategy<Value = NcPolynomial> {
    prop::collection::vec(
        (prop::collection::vec(prop_oneof![Just(Letter::X), Just(Letter::Y)], 0..n), small_gauss()),
        0..=4,
    )
    .prop_map(|ts| NcPolynomial::from_terms(ts.into_iter().map(|(w, c)| (NcWord(w), c))))
}

fn separated(roots: &[C64], gap: f64) -> bool {
    min_pairwise_gap(roots) >= gap
}

/// Distinct roots with gap at least 0.1 and, if `re_floor > 0`, real parts away from zero.
fn root_set(max_n: usize, re_floor: f64) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..=max_n)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect::<Vec<_>>())
        .prop_filter("separated", |r| separated(r, 0.1))
        .prop_filter("off the axis", move |r| r.iter().all(|z| z.re.abs() >= re_floor))
}

/// Monic coefficients of `prod (z - r)`, lowest degree first.
fn monic(roots: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= v * r;
        }
        c = next;
    }
    c
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

fn quick_config() -> Config {
    let mut cfg = Config::default();
    cfg.gamma_range = GammaRange::new(1.0, 10.0, 3).unwrap();
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn graded_parts_reassemble(p in poly(12)) {
        let mut sum = NcPolynomial::zero();
        for l in 0..=p.degree() {
            sum = sum.add(&homogeneous_part(&p, l).unwrap());
        }
        prop_assert_eq!(sum, p);
    }

    #[test]
    fn symbol_ignores_letter_order(p in poly(8), seed in any::<u64>(), z in (-2.0f64..2.0, -2.0f64..2.0), y in -2.0f64..2.0) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut q = NcPolynomial::zero();
        for (w, c) in p.terms() {
            let mut letters = w.0.clone();
            letters.shuffle(&mut rng);
            q.add_term(NcWord(letters), c.clone());
        }
        let z = C64::new(z.0, z.1);
        let y = C64::new(y, 0.0);
        let a = commutative_symbol(&p, z, y);
        let b = commutative_symbol(&q, z, y);
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn root_methods_agree(roots in root_set(6, 0.0)) {
        let c = monic(&roots);
        let a = aberth_roots(&c).unwrap();
        let b = companion_roots(&c).unwrap();
        let scale = max_abs(&roots);
        prop_assert!(root_set_distance(&a, &b) <= 1e-9 * scale);
        prop_assert!(root_set_distance(&a, &roots) <= 1e-9 * scale);
    }

    #[test]
    fn ordering_holds_pairwise(roots in root_set(6, 0.0)) {
        let (sorted, perm) = order_roots(&roots).unwrap();
        prop_assert!(is_ordered(&sorted));
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                let d = sorted[i] - sorted[j];
                prop_assert!(d.re > 0.0 || (d.re == 0.0 && d.im > 0.0));
            }
        }
        for (k, &i) in perm.iter().enumerate() {
            prop_assert_eq!(sorted[k], roots[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn table_has_no_residual(roots in prop::collection::vec(-4i64..=4, 2..=4), lower in lower_terms(4), sign in any::<bool>()) {
        let mut r = roots.clone();
        r.sort();
        r.dedup();
        prop_assume!(r.len() >= 2);
        let top = operator_from_roots(&r.iter().map(|&x| C64::new(x as f64, 0.0)).collect::<Vec<_>>());
        let n = top.degree();
        let lower = NcPolynomial::from_terms(lower.terms().filter(|(w, _)| w.len() < n).map(|(w, c)| (w.clone(), c.clone())));
        let p = top.add(&lower);
        let sign = if sign { Sign::Plus } else { Sign::Minus };
        prop_assert!(coefficient_table(&realize(&p, sign).unwrap()).is_ok());
    }

    #[test]
    fn subleading_top_coefficient_is_minus_root_sum(roots in root_set(6, 0.0)) {
        let p = operator_from_roots(&roots);
        let t = normalized(&coefficient_table(&realize(&p, Sign::Plus).unwrap()).unwrap());
        let n = roots.len();
        let sum: C64 = roots.iter().sum();
        prop_assert!((t.d_c64(n, n - 1) + sum).norm() <= 1e-10 * max_abs(&roots));
    }

    #[test]
    fn q_approaches_principal_part(roots in prop::collection::vec(-3i64..=3, 2..=3), lower in lower_terms(3), t in 1.0f64..10.0) {
        let mut r = roots.clone();
        r.sort();
        r.dedup();
        prop_assume!(r.len() >= 2);
        let top = operator_from_roots(&r.iter().map(|&x| C64::new(x as f64, 0.0)).collect::<Vec<_>>());
        let n = top.degree();
        let lower = NcPolynomial::from_terms(lower.terms().filter(|(w, _)| w.len() < n).map(|(w, c)| (w.clone(), c.clone())));
        let table = coefficient_table(&realize(&top.add(&lower), Sign::Plus).unwrap()).unwrap();
        let tc = C64::new(t, 0.0);
        for j in 0..n {
            let limit = eval_q(&table, j, tc, C64::new(0.0, 0.0)).unwrap();
            let errs: Vec<f64> = [10.0, 100.0, 1000.0]
                .iter()
                .map(|g: &f64| (eval_q(&table, j, tc, C64::new(1.0 / g, 0.0)).unwrap() - limit).norm())
                .collect();
            prop_assert!(errs[2] <= errs[1] + 1e-12 && errs[1] <= errs[0] + 1e-12);
            prop_assert!(errs[2] <= 1e-2 * (1.0 + errs[0]));
        }
    }

    #[test]
    fn frame_identities(roots in root_set(6, 0.0)) {
        let (sorted, _) = order_roots(&roots).unwrap();
        let f = build_frame(&sorted).unwrap();
        for t in [0.5, 1.0, 2.0, 10.0] {
            let e = frame_errors(&f, t);
            prop_assert!(e.intertwining <= 1e-10, "intertwining {} at t={}", e.intertwining, t);
            prop_assert!(e.determinant <= 1e-10, "determinant {} at t={}", e.determinant, t);
            prop_assert!(e.inverse <= 1e-10, "inverse {} at t={}", e.inverse, t);
        }
    }

    #[test]
    fn gauge_residuals_vanish(roots in root_set(5, 0.0), lower in lower_terms(5), g in (0.5f64..8.0, -2.0f64..2.0)) {
        let top = operator_from_roots(&roots);
        let n = top.degree();
        let lower = NcPolynomial::from_terms(lower.terms().filter(|(w, _)| w.len() < n).map(|(w, c)| (w.clone(), c.clone())));
        let table = normalized(&coefficient_table(&realize(&top.add(&lower), Sign::Plus).unwrap()).unwrap());
        let cfg = Config::default();
        let sorted = table_roots(&table, &cfg.tol).unwrap();
        let frame = build_frame(&sorted).unwrap();
        let (_, gauge) = exponents(&table, &frame, C64::new(1.0, 0.0) / C64::new(g.0, g.1)).unwrap();
        let (r1, r2) = gauge.residuals(&frame.roots);
        let s1 = 1.0 + gauge.d1.norm();
        let s2 = 1.0 + gauge.rhs2.norm();
        prop_assert!(r1 <= 1e-12 * s1 && r2 <= 1e-12 * s2, "{} {}", r1 / s1, r2 / s2);
    }

    #[test]
    fn exponents_scale_with_gamma(roots in root_set(4, 0.0), lower in lower_terms(4), sign in any::<bool>()) {
        let top = operator_from_roots(&roots);
        let n = top.degree();
        let lower = NcPolynomial::from_terms(lower.terms().filter(|(w, _)| w.len() < n).map(|(w, c)| (w.clone(), c.clone())));
        let sign = if sign { Sign::Plus } else { Sign::Minus };
        let laws = exponent_laws(&top.add(&lower), sign, &[2.0, 4.0, 8.0, 16.0], &Config::default()).unwrap();
        prop_assert!(laws.gamma_beta_spread <= 1e-10, "{}", laws.gamma_beta_spread);
        prop_assert!(laws.rho_affine_defect <= 1e-10, "{}", laws.rho_affine_defect);
    }

    #[test]
    fn beta_ignores_grade_below_next_to_top(roots in root_set(4, 0.0), lower in lower_terms(4), extra in lower_terms(3)) {
        let top = operator_from_roots(&roots);
        let n = top.degree();
        let base = top.add(&NcPolynomial::from_terms(
            lower.terms().filter(|(w, _)| w.len() == n - 1).map(|(w, c)| (w.clone(), c.clone())),
        ));
        let perturbed = base.add(&NcPolynomial::from_terms(
            extra.terms().filter(|(w, _)| w.len() == n - 2).map(|(w, c)| (w.clone(), c.clone())),
        ));
        let tol = Config::default().tol;
        let a = OdeModel::for_operator(&base, Sign::Plus, C64::new(4.0, 0.0), &tol).unwrap();
        let b = OdeModel::for_operator(&perturbed, Sign::Plus, C64::new(4.0, 0.0), &tol).unwrap();
        for j in 0..n {
            prop_assert!((a.expo.beta[j] - b.expo.beta[j]).norm() <= 1e-12 * (1.0 + a.expo.beta[j].norm()));
        }
    }

    #[test]
    fn parity_law_is_exact(roots in prop::collection::vec((-4i64..=4, -2i64..=2), 2..=4), lower in lower_terms(4)) {
        let mut r: Vec<C64> = roots.iter().map(|&(a, b)| C64::new(a as f64, b as f64)).collect();
        r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        r.dedup();
        prop_assume!(r.len() >= 2);
        let top = operator_from_roots(&r);
        let n = top.degree();
        let lower = NcPolynomial::from_terms(lower.terms().filter(|(w, _)| w.len() < n).map(|(w, c)| (w.clone(), c.clone())));
        let p = top.add(&lower);
        let plus = realize(&p, Sign::Plus).unwrap();
        let minus = realize(&p, Sign::Minus).unwrap();
        prop_assert_eq!(&plus.parity_flip(), &minus);
        let tp = coefficient_table(&plus).unwrap();
        let tm = coefficient_table(&minus).unwrap();
        for j in 0..=n {
            let s = if (n - j) % 2 == 0 { gauss(1, 0) } else { -gauss(1, 0) };
            prop_assert_eq!(tm.d(n, j), tp.d(n, j) * s);
        }
        for j in 0..n {
            let s = if (n - 1 - j) % 2 == 0 { gauss(1, 0) } else { -gauss(1, 0) };
            prop_assert_eq!(tm.d(n - 1, j), tp.d(n - 1, j) * s);
        }
        let tol = Config::default().tol;
        let mp = OdeModel::for_operator(&p, Sign::Plus, C64::new(4.0, 0.0), &tol).unwrap();
        let mm = OdeModel::for_operator(&p, Sign::Minus, C64::new(4.0, 0.0), &tol).unwrap();
        for (j, g) in mp.expo.roots.iter().enumerate() {
            let k = (0..n).min_by(|&a, &b| (mm.expo.roots[a] + g).norm().total_cmp(&(mm.expo.roots[b] + g).norm())).unwrap();
            prop_assert!((mm.expo.roots[k] + g).norm() <= 1e-12);
            prop_assert!((mm.expo.beta[k] - mp.expo.beta[j]).norm() <= 1e-12 * (1.0 + mp.expo.beta[j].norm()));
        }
    }

    #[test]
    fn harness_is_monotone_in_t_max(gamma in 0.5f64..2.0, a in 0.0f64..2.0, alpha in -4.0f64..4.0) {
        let mut prev = (0.0, 0.0);
        for t_max in [10.0, 20.0, 30.0, 40.0] {
            let h = integral_bound_harness(gamma, alpha, a, t_max, 4.0).unwrap();
            prop_assert!(h.at_alpha.growth >= prev.0 * (1.0 - 1e-12));
            prop_assert!(h.at_alpha.decay >= prev.1 * (1.0 - 1e-12));
            prev = (h.at_alpha.growth, h.at_alpha.decay);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn sigma_invariant_under_operator_scaling(roots in root_set(3, 0.3), c in (1i64..=4, -3i64..=3), g in 1.0f64..10.0) {
        let p = operator_from_roots(&roots);
        let cp = p.scale(&gauss(c.0, c.1));
        let cfg = Config::default();
        let ginv = C64::new(1.0 / g, 0.0);
        let a = schwartz_match_realization(&realize(&p, Sign::Plus).unwrap(), ginv, &cfg).unwrap();
        let b = schwartz_match_realization(&realize(&cp, Sign::Plus).unwrap(), ginv, &cfg).unwrap();
        prop_assert_eq!((a.p, a.q), (b.p, b.q));
        prop_assert!((a.sigma_min - b.sigma_min).abs() <= 1e-8, "{} {}", a.sigma_min, b.sigma_min);
    }

    #[test]
    fn sigma_stable_under_refinement(roots in root_set(3, 0.3), g in 1.0f64..10.0) {
        let p = operator_from_roots(&roots);
        let cfg = Config::default();
        let mut fine = cfg;
        fine.tol.rtol /= 2.0;
        fine.tol.atol /= 2.0;
        let gamma = C64::new(g, 0.0);
        let a = schwartz_match(&p, Sign::Plus, gamma, &cfg).unwrap();
        let b = schwartz_match(&p, Sign::Plus, gamma, &fine).unwrap();
        prop_assert!((a.sigma_min - b.sigma_min).abs() <= 10.0 * cfg.tol.rtol, "{} {}", a.sigma_min, b.sigma_min);
    }

    #[test]
    fn dimension_count_forces_kernel(pos in prop::collection::vec((0.3f64..3.0, -2.0f64..2.0), 2..=3), neg in prop::collection::vec((-3.0f64..-0.3, -2.0f64..2.0), 0..=1)) {
        prop_assume!(pos.len() > neg.len());
        let roots: Vec<C64> = pos.iter().chain(neg.iter()).map(|&(a, b)| C64::new(a, b)).collect();
        prop_assume!(separated(&roots, 0.1));
        let p = operator_from_roots(&roots);
        let cfg = quick_config();
        let scan = gamma_scan(&p, Sign::Plus, &cfg.gamma_range, &cfg).unwrap();
        for row in &scan.rows {
            prop_assert!(row.p + row.q > roots.len());
            prop_assert!(row.sigma_min < cfg.tol.sigma);
        }
    }

    #[test]
    fn classify_is_deterministic_and_mirror_symmetric(roots in root_set(3, 0.3), lower in lower_terms(3)) {
        let top = operator_from_roots(&roots);
        let n = top.degree();
        let lower = NcPolynomial::from_terms(lower.terms().filter(|(w, _)| w.len() < n).map(|(w, c)| (w.clone(), c.clone())));
        let p = top.add(&lower);
        let cfg = quick_config();
        let v = classify(&p, &cfg);
        prop_assert_eq!(&v, &classify(&p, &cfg));
        let m = classify(&p.flip_y(), &cfg);
        prop_assert_eq!(m.status, v.status);
        prop_assert_eq!(m.root_counts.p_pos, v.root_counts.p_neg);
        prop_assert_eq!(m.root_counts.p_neg, v.root_counts.p_pos);
        for r in &v.reasons {
            prop_assert!(!r.numbers.is_empty() || !r.fired, "reason {} carries no numbers", r.criterion);
        }
    }
}
