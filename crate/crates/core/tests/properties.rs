use coulomb_core::abelian::{AbelianAlgebra, AbelianElement, Poly};
use coulomb_core::checks::{self, random_element, rng, ElementShape};
use coulomb_core::format::{parse_theory, render_theory};
use coulomb_core::higgs::{check_toric_duality, higgs_graded_dimension, HiggsProblem};
use coulomb_core::monopole::{hilbert_series, HilbertOptions};
use coulomb_core::series::TruncatedSeries;
use coulomb_core::theory::GaugeTheory;
use coulomb_core::BigRational;
use proptest::prelude::*;

fn series(order: u32, rank: usize) -> impl Strategy<Value = TruncatedSeries> {
    let term = (0..=order, prop::collection::vec(-2i64..=2, rank), -4i64..=4);
    prop::collection::vec(term, 0..6).prop_map(move |terms| {
        let mut s = TruncatedSeries::zero(order, rank);
        for (k, z, c) in terms {
            s.add_term(k, z, BigRational::from_integer(c.into()));
        }
        s
    })
}

fn torus_theory() -> impl Strategy<Value = GaugeTheory> {
    (1usize..=2).prop_flat_map(|rank| {
        prop::collection::vec(prop::collection::vec(-2i64..=2, rank), rank..=4)
            .prop_map(move |w| GaugeTheory::torus(rank, w).unwrap())
    })
}

fn good(th: &GaugeTheory) -> bool {
    AbelianAlgebra::from_theory(th).map(|a| a.is_good()).unwrap_or(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_ring_axioms(a in series(5, 1), b in series(5, 1), c in series(5, 1)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn series_inverse(a in series(6, 0), c in 1i64..=5) {
        let unit = a.shift(1, &[]).add(&TruncatedSeries::monomial(0, vec![], BigRational::from_integer(c.into()), 6)).unwrap();
        let inv = unit.inverse_unit().unwrap();
        prop_assert_eq!(unit.mul(&inv).unwrap(), TruncatedSeries::one(6, 0));
    }

    #[test]
    fn series_display_round_trips(a in series(6, 2)) {
        prop_assert_eq!(TruncatedSeries::parse(&a.to_string(), 6, 2).unwrap(), a);
    }

    #[test]
    fn validate_is_idempotent(th in torus_theory()) {
        let once = th.validate().unwrap();
        prop_assert_eq!(once.validate().unwrap(), once.clone());
        prop_assert_eq!(parse_theory(&render_theory(&once)).unwrap(), once);
    }

    #[test]
    fn refined_series_unrefines(th in torus_theory()) {
        prop_assume!(good(&th));
        let refined = hilbert_series(&th, &HilbertOptions::new(6).refined()).unwrap();
        let plain = hilbert_series(&th, &HilbertOptions::new(6)).unwrap();
        prop_assert_eq!(refined.unrefine(), plain);
    }

    #[test]
    fn coordinate_permutation_invariance(th in torus_theory()) {
        prop_assume!(good(&th) && th.torus_rank() == 2);
        let swapped: Vec<Vec<i64>> = th.weights().iter().map(|w| vec![w[1], w[0]]).collect();
        let other = GaugeTheory::torus(2, swapped).unwrap();
        let opts = HilbertOptions::new(6);
        prop_assert_eq!(hilbert_series(&th, &opts).unwrap(), hilbert_series(&other, &opts).unwrap());
    }

    #[test]
    fn poly_shifts_compose(l in prop::collection::vec(-3i64..=3, 2), m in prop::collection::vec(-3i64..=3, 2), k in 0u32..=3) {
        let p = Poly::linear(&[1, -2], 1).pow(k).add(&Poly::w(2, 1));
        let sum: Vec<i64> = l.iter().zip(&m).map(|(a, b)| a + b).collect();
        prop_assert_eq!(p.shift(&l).shift(&m), p.shift(&sum));
    }

    #[test]
    fn element_display_round_trips(seed in any::<u64>(), rank in 1usize..=3) {
        let a = random_element(&mut rng(seed), rank, ElementShape { terms: 3, lambda_bound: 3, w_degree: 3 });
        prop_assert_eq!(AbelianElement::parse(&a.to_string(), rank).unwrap(), a);
    }

    #[test]
    fn higgs_symmetries(charges in prop::collection::vec(prop::collection::vec(-2i64..=2, 1), 2..=3), d in 0u32..=5) {
        let p = HiggsProblem::new(1, charges.clone(), 5).unwrap();
        let base = higgs_graded_dimension(&p, d).unwrap();
        let mut reversed = charges.clone();
        reversed.reverse();
        let negated: Vec<Vec<i64>> = charges.iter().map(|c| vec![-c[0]]).collect();
        prop_assert_eq!(higgs_graded_dimension(&HiggsProblem::new(1, reversed, 5).unwrap(), d).unwrap(), base);
        prop_assert_eq!(higgs_graded_dimension(&HiggsProblem::new(1, negated, 5).unwrap(), d).unwrap(), base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dualize_is_an_involution(seed in any::<u64>(), d in 2usize..=4) {
        let s = checks::random_exact_sequence(&mut rng(seed), d);
        prop_assert_eq!(s.dual().unwrap().dual().unwrap(), s);
    }

    #[test]
    fn duality_is_symmetric(seed in any::<u64>(), d in 2usize..=3) {
        let s = checks::random_exact_sequence(&mut rng(seed), d);
        let forward = check_toric_duality(&s, 4).unwrap();
        let backward = check_toric_duality(&s.dual().unwrap(), 4).unwrap();
        prop_assert_eq!(forward.matches(), backward.matches());
        prop_assert!(forward.matches(), "{}", forward.verdict());
    }

    #[test]
    fn graded_dimension_matches_monopole(seed in any::<u64>()) {
        let th = checks::random_good_torus_theory(&mut rng(seed), 2, 4, 2);
        let rep = checks::check_oracle_equivalence(&th, 8);
        prop_assert!(rep.passed(), "{}", rep);
    }
}

#[test]
fn gl_block_order_does_not_matter() {
    // U(2) x U(1) with a bifundamental, two flavours on U(2) and one on U(1)
    let a = GaugeTheory::new(vec![2, 1], 0, vec![
        vec![1, 0, -1], vec![0, 1, -1], vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1],
    ]).unwrap();
    let b = GaugeTheory::new(vec![1, 2], 0, vec![
        vec![-1, 1, 0], vec![-1, 0, 1], vec![0, 1, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0],
    ]).unwrap();
    let opts = HilbertOptions::new(6);
    assert_eq!(hilbert_series(&a, &opts).unwrap(), hilbert_series(&b, &opts).unwrap());
}

#[test]
fn graded_dimension_unit_and_classical_product_grade() {
    for alg in checks::sample_algebras().iter().filter(|a| a.is_good()) {
        assert_eq!(alg.graded_dimension(0).unwrap(), 1);
        let rep = checks::check_classical(alg, 20, 7);
        assert!(rep.passed(), "{rep}");
    }
}
