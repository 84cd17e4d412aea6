use dirac_chains::corpus;
use dirac_chains::exec::Exec;
use dirac_chains::exterior::{binomial, KCovector};
use dirac_chains::norms::{self, FrequencyBudget};
use dirac_chains::{FormSpec, KVector, PointedChain};
use proptest::prelude::*;

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, n)
}

fn kvector(n: usize, k: usize) -> impl Strategy<Value = KVector> {
    prop::collection::vec(-1.0..1.0f64, binomial(n, k)).prop_map(move |c| KVector::new(n, k, c).unwrap())
}

fn simple(n: usize, k: usize) -> impl Strategy<Value = KVector> {
    prop::collection::vec(coords(n), k).prop_map(move |vs| {
        vs.iter().fold(KVector::scalar(n, 1.0), |acc, v| acc.wedge(&KVector::vector(v)).unwrap())
    })
}

/// Random trig form in ℝⁿ of grade k, from a seed.
fn trig_form(n: usize, k: usize) -> impl Strategy<Value = FormSpec> {
    (any::<u64>(), 1..4usize).prop_map(move |(seed, atoms)| corpus::random_trig_form(&mut corpus::rng(seed), n, k, atoms))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_graded_commutativity(j in 0..=2usize, k in 0..=2usize, seed in any::<u64>()) {
        let n = 4;
        let mut rng = corpus::rng(seed);
        let a = corpus::random_kvector(&mut rng, n, j);
        let b = corpus::random_kvector(&mut rng, n, k);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap().scale(if (j * k) % 2 == 0 { 1.0 } else { -1.0 });
        for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
            prop_assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn wedge_is_bilinear(a in kvector(4, 1), b in kvector(4, 1), c in kvector(4, 2), s in -3.0..3.0f64) {
        let lhs = (&(&a * s) + &b).wedge(&c).unwrap();
        let rhs = &(&a.wedge(&c).unwrap() * s) + &b.wedge(&c).unwrap();
        for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            prop_assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn mass_is_a_norm_where_exact(n in 2..=4usize, pick in 0..4usize, s in -3.0..3.0f64, seed in any::<u64>()) {
        // grades where every k-vector is simple
        let k = [0, 1, n - 1, n][pick];
        let mut rng = corpus::rng(seed);
        let a = corpus::random_kvector(&mut rng, n, k);
        let b = corpus::random_kvector(&mut rng, n, k);
        let (ma, mb) = (a.mass(), b.mass());
        prop_assert!(ma.exact && mb.exact);
        prop_assert!(close(a.scale(s).mass().value, s.abs() * ma.value, 1e-12));
        let sum = a.try_add(&b).unwrap().mass();
        prop_assert!(sum.value <= ma.value + mb.value + 1e-12);
    }

    #[test]
    fn hadamard_inequality(a in simple(4, 2), b in simple(4, 1)) {
        let ab = a.wedge(&b).unwrap();
        prop_assert!(ab.mass().value <= a.mass().value * b.mass().value * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn covector_pairing_is_bounded_by_comass(c in prop::collection::vec(-1.0..1.0f64, 6), a in simple(4, 2)) {
        let w = KCovector::new(4, 2, c).unwrap();
        prop_assert!(w.apply(&a).unwrap().abs() <= w.comass_bound() * a.mass().value * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn derivative_is_symmetric(w in trig_form(3, 1), p in coords(3), a in kvector(3, 1), u in coords(3), v in coords(3), x in coords(3)) {
        let d1 = w.derivative(&[u.clone(), v.clone(), x.clone()], &p, &a).unwrap();
        let d2 = w.derivative(&[x.clone(), u.clone(), v.clone()], &p, &a).unwrap();
        let d3 = w.derivative(&[v, x, u], &p, &a).unwrap();
        prop_assert!(close(d1, d2, 1e-10) && close(d1, d3, 1e-10));
    }

    #[test]
    fn derivative_matches_central_difference(w in trig_form(3, 2), p in coords(3), a in kvector(3, 2), v in coords(3)) {
        let t = 1e-4;
        let shift = |s: f64| -> Vec<f64> { p.iter().zip(&v).map(|(x, y)| x + s * y).collect() };
        let fd = (w.eval(&shift(t), &a).unwrap() - w.eval(&shift(-t), &a).unwrap()) / (2.0 * t);
        let exact = w.derivative(std::slice::from_ref(&v), &p, &a).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6, "fd {fd} exact {exact}");
    }

    #[test]
    fn cr_bound_dominates_samples(w in trig_form(3, 1), r in 0..=3usize, seed in any::<u64>()) {
        let bound = w.cr_bound(r).unwrap();
        let mut rng = corpus::rng(seed);
        for j in 0..=r {
            for _ in 0..8 {
                let dirs: Vec<Vec<f64>> = (0..j).map(|_| corpus::random_unit_vector(&mut rng, 3)).collect();
                let p = corpus::random_point(&mut rng, 3, 5.0);
                let a = corpus::random_simple_kvector(&mut rng, 3, 1, 1.0);
                let d = w.derivative(&dirs, &p, &a).unwrap();
                prop_assert!(d.abs() <= bound * (1.0 + 1e-12), "{d} > {bound}");
            }
        }
    }

    #[test]
    fn pairing_is_bilinear(seed in any::<u64>(), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let mut rng = corpus::rng(seed);
        let a = corpus::random_dipole_chain(&mut rng, 3, 1, 3, 2);
        let b = corpus::random_dipole_chain(&mut rng, 3, 1, 3, 2);
        let w1 = corpus::random_trig_form(&mut rng, 3, 1, 2);
        let w2 = corpus::random_trig_form(&mut rng, 3, 1, 2);
        let combo = a.scale(s).add(&b.scale(t)).unwrap();
        let lhs = combo.pair(&w1).unwrap();
        let rhs = s * a.pair(&w1).unwrap() + t * b.pair(&w1).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
        let wsum = w1.scale(s).sum(&w2.scale(t)).unwrap();
        let lhs = a.pair(&wsum).unwrap();
        let rhs = s * a.pair(&w1).unwrap() + t * a.pair(&w2).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn duality_identity(seed in any::<u64>()) {
        for c in corpus::duality_cases(seed, 4) {
            let lhs = c.chain.apply_pv(&c.direction).unwrap().pair(&c.form).unwrap();
            let rhs = c.chain.pair(&c.form.lie_derivative(&c.direction).unwrap()).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9);
        }
    }

    #[test]
    fn sandwich_is_ordered_and_monotone(seed in any::<u64>(), n in 1..=3usize, terms in 1..6usize) {
        let mut rng = corpus::rng(seed);
        let k = (seed % (n as u64 + 1)) as usize;
        let pts: Vec<(Vec<f64>, KVector)> = (0..terms)
            .map(|_| (corpus::random_point(&mut rng, n, 0.5), corpus::random_kvector(&mut rng, n, k)))
            .collect();
        let a = PointedChain::from_terms(n, k, pts).unwrap();
        let ests = norms::estimate_orders(&a, 3, &FrequencyBudget::default_for(n), Exec::default()).unwrap();
        for e in &ests {
            prop_assert!(e.validate(&a).is_ok());
        }
        for w in ests.windows(2) {
            prop_assert!(w[1].upper <= w[0].upper);
            prop_assert!(w[1].lower <= w[0].upper);
        }
    }
}

#[test]
fn finite_differences_converge_linearly() {
    let mut rng = corpus::rng(5);
    let a = PointedChain::from_terms(
        3,
        1,
        (0..4).map(|_| (corpus::random_point(&mut rng, 3, 1.0), corpus::random_kvector(&mut rng, 3, 1))).collect::<Vec<_>>(),
    )
    .unwrap();
    let w = corpus::random_trig_form(&mut rng, 3, 1, 3);
    let v = corpus::random_unit_vector(&mut rng, 3);
    let exact = a.to_dipole(4).apply_pv(&v).unwrap().pair(&w).unwrap();
    let ts = [1e-1, 1e-2, 1e-3, 1e-4];
    let errs: Vec<f64> = ts.iter().map(|&t| (a.difference_chain(&v, t).unwrap().pair(&w).unwrap() - exact).abs()).collect();
    let slope = dirac_chains::approx::fit_loglog_slope(&ts, &errs).unwrap();
    assert!(slope >= 0.9, "{slope} {errs:?}");
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    for e in corpus::norm_corpus(99).iter().take(12) {
        let budget = FrequencyBudget::default_for(e.chain.dim());
        let s = norms::estimate_orders(&e.chain, 3, &budget, Exec::Sequential).unwrap();
        let p = norms::estimate_orders(&e.chain, 3, &budget, Exec::Parallel).unwrap();
        for (x, y) in s.iter().zip(&p) {
            assert_eq!(x.lower.to_bits(), y.lower.to_bits());
            assert_eq!(x.upper.to_bits(), y.upper.to_bits());
        }
    }
}
