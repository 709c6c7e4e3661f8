mod common;

use common::*;
use monostack::field::{Field, Matrix};
use monostack::graded::GradedModule;
use monostack::parabolic::{hom_space, ParabolicMap, ParabolicSheaf, ParabolicSpec};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

/// A random linear combination of a basis of `Hom(source, target)`.
fn random_map(rng: &mut StdRng, source: &ParabolicSheaf, target: &ParabolicSheaf) -> ParabolicMap {
    let field = source.field();
    let basis = hom_space(source, target).unwrap();
    let mut blocks: Vec<Matrix> = (0..source.label_count())
        .map(|l| Matrix::zeros(target.dim(l), source.dim(l)))
        .collect();
    for f in &basis {
        let c = field.from_i64(rng.gen_range(-2..=2));
        for (b, fb) in blocks.iter_mut().zip(f.blocks()) {
            *b = b.add(&fb.scale(&c, field), field);
        }
    }
    ParabolicMap::new(source.clone(), target.clone(), blocks).unwrap()
}

#[test]
fn the_integral_weights_sheaf_needs_its_own_level() {
    let n1 = naturals(1);
    for big_n in [2u64, 3, 4, 6] {
        let e = ParabolicSheaf::integral_weights(&n1, big_n, Field::Rational).unwrap();
        assert_eq!(e.minimal_induced_level().unwrap(), big_n);
        // the colimit at weight 1/N is k (from E_0), but E_{1/N} = 0
        let ind = e.restrict(1).unwrap().induce(big_n).unwrap();
        assert_eq!(ind.dims().iter().sum::<usize>(), big_n as usize);
        assert_eq!(e.total_dim(), 1);
    }
}

#[test]
fn restriction_and_induction_compose() {
    let mut rng = rng(21);
    for p in [naturals(1), naturals(2)] {
        let e = random_sheaf(&mut rng, &p, 4);
        assert_eq!(e.restrict(2).unwrap().restrict(1).unwrap(), e.restrict(1).unwrap());
        let small = random_sheaf(&mut rng, &p, 1);
        let twice = small.induce(2).unwrap().induce(4).unwrap();
        let once = small.induce(4).unwrap();
        assert_eq!(twice.dims(), once.dims());
        assert_eq!(
            hom_space(&twice, &once).unwrap().len(),
            hom_space(&once, &once).unwrap().len()
        );
    }
}

#[test]
fn sheaves_survive_json() {
    let mut rng = rng(22);
    for _ in 0..5 {
        let e = random_sheaf(&mut rng, &paper_monoid(), 2);
        let text = serde_json::to_string(&e.to_spec()).unwrap();
        let spec: ParabolicSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(ParabolicSheaf::from_spec(&spec).unwrap(), e);
    }
}

#[test]
fn every_twist_round_trips() {
    for p in [naturals(1), naturals(2), paper_monoid()] {
        for n in 1..=3 {
            let a = algebra(&p, n);
            for l in 0..a.label_count() {
                let m = GradedModule::twist(&a, l);
                let e = ParabolicSheaf::from_graded(&m);
                assert_eq!(e.to_graded().unwrap(), m);
                assert!(ParabolicMap::identity(&e).to_graded().unwrap().is_isomorphism());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn induction_agrees_with_base_change(seed in 0u64..10_000, which in 0usize..3) {
        let p = [naturals(1), naturals(2), paper_monoid()][which].clone();
        let (m, n) = if which == 2 { (1, 2) } else { (2, 4) };
        let mut rng = rng(seed);
        let small = random_sheaf(&mut rng, &p, m);
        let ind = small.induce(n).unwrap().to_graded().unwrap();
        let bc = small.to_graded().unwrap().base_change(n).unwrap();
        prop_assert_eq!(ind.dims().to_vec(), bc.dims().to_vec());
        // and the two modules are isomorphic: mutual Hom dimensions agree
        let (ei, eb) = (ParabolicSheaf::from_graded(&ind), ParabolicSheaf::from_graded(&bc));
        let ends = hom_space(&ei, &ei).unwrap().len();
        prop_assert_eq!(hom_space(&ei, &eb).unwrap().len(), ends);
        prop_assert_eq!(hom_space(&eb, &ei).unwrap().len(), ends);
    }

    #[test]
    fn kernels_and_cokernels_commute_with_the_equivalence(seed in 0u64..10_000, which in 0usize..3) {
        let p = [naturals(1), naturals(2), paper_monoid()][which].clone();
        let n = if which == 2 { 2 } else { 3 };
        let mut rng = rng(seed);
        let (s, t) = (random_sheaf(&mut rng, &p, n), random_sheaf(&mut rng, &p, n));
        let f = random_map(&mut rng, &s, &t);
        let g = f.to_graded().unwrap();
        let k = f.kernel().unwrap();
        prop_assert_eq!(k.source().to_graded().unwrap().dims().to_vec(), g.kernel().unwrap().source().dims().to_vec());
        prop_assert!(k.then(&f).unwrap().blocks().iter().all(Matrix::is_zero));
        let c = f.cokernel().unwrap();
        prop_assert_eq!(c.target().to_graded().unwrap().dims().to_vec(), g.cokernel().unwrap().target().dims().to_vec());
        prop_assert!(f.then(&c).unwrap().blocks().iter().all(Matrix::is_zero));
    }

    #[test]
    fn random_modules_round_trip(seed in 0u64..10_000, which in 0usize..3, n in 1u64..=3) {
        let p = [naturals(1), naturals(2), paper_monoid()][which].clone();
        let m = random_module(&mut rng(seed), &algebra(&p, n));
        let e = ParabolicSheaf::from_graded(&m);
        prop_assert_eq!(e.to_graded().unwrap(), m);
        prop_assert_eq!(ParabolicSheaf::from_graded(&e.to_graded().unwrap()), e);
    }

    #[test]
    fn adjunction_and_triangles(seed in 0u64..10_000, which in 0usize..3) {
        let p = [naturals(1), naturals(2), paper_monoid()][which].clone();
        let (m, n) = if which == 2 { (1, 2) } else { (1, 3) };
        let mut rng = rng(seed);
        let small = random_sheaf(&mut rng, &p, m);
        let big = random_sheaf(&mut rng, &p, n);
        prop_assert_eq!(
            hom_space(&small.induce(n).unwrap(), &big).unwrap().len(),
            hom_space(&small, &big.restrict(m).unwrap()).unwrap().len()
        );
        let res = big.restrict(m).unwrap();
        let first = res.unit(n).unwrap().then(&big.counit(m).unwrap().restrict(m).unwrap()).unwrap();
        prop_assert!(first.is_identity());
        let ind = small.induce(n).unwrap();
        let second = small.unit(n).unwrap().induce(n).unwrap().then(&ind.counit(m).unwrap()).unwrap();
        prop_assert!(second.is_identity());
        prop_assert!(ind.is_induced_from(m).unwrap());
    }
}
