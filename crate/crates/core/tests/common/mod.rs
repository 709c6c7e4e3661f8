//! Shared fixtures, random generators and brute-force oracles.
#![allow(dead_code)]

use std::sync::Arc;

use monostack::field::{Field, Rat};
use monostack::graded::{GradedAlgebra, GradedMap, GradedModule};
use monostack::kummer::{root_extension, MonoidHom};
use monostack::lattice::RationalVector;
use monostack::monoid::MonoidPresentation;
use monostack::parabolic::ParabolicSheaf;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn naturals(r: usize) -> MonoidPresentation {
    MonoidPresentation::free(r).unwrap()
}

/// The cone spanned by e1, e2, e3 and e1 + e2 - e3.
pub fn paper_monoid() -> MonoidPresentation {
    MonoidPresentation::validate(3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]]).unwrap()
}

/// A test monoid together with hand-derived data: facet inequalities and
/// Hilbert basis. All of them have group `Z^r`.
pub struct Fixture {
    pub name: &'static str,
    pub monoid: MonoidPresentation,
    pub facets: Vec<Vec<i64>>,
    pub hilbert_basis: Vec<Vec<i64>>,
}

fn unit_vectors(r: usize) -> Vec<Vec<i64>> {
    (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn fixtures() -> Vec<Fixture> {
    let mut out: Vec<Fixture> = (1..=3)
        .map(|r| Fixture {
            name: ["N", "N^2", "N^3"][r - 1],
            monoid: naturals(r),
            facets: unit_vectors(r),
            hilbert_basis: unit_vectors(r),
        })
        .collect();
    out.push(Fixture {
        name: "paper",
        monoid: paper_monoid(),
        // a1 >= 0, a2 >= 0, a1 + a3 >= 0, a2 + a3 >= 0
        facets: vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 1]],
        hilbert_basis: vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]],
    });
    out
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Fixture {
    /// Cone membership of the numerator vector `y` (any level).
    pub fn in_cone(&self, y: &[i64]) -> bool {
        self.facets.iter().all(|f| dot(f, y) >= 0)
    }

    /// `y / n ∈ Δ_P` straight from the definition: in the cone, and no
    /// Hilbert basis element can be subtracted without leaving it.
    pub fn in_delta(&self, n: i64, y: &[i64]) -> bool {
        self.in_cone(y)
            && self.hilbert_basis.iter().all(|v| {
                let z: Vec<i64> = y.iter().zip(v).map(|(a, b)| a - n * b).collect();
                !self.in_cone(&z)
            })
    }

    /// Brute-force `Δ_P ∩ 1/n P` as numerator vectors, scanning the box
    /// `[-4n, 4n]^r` (every Δ point of the fixtures lies inside it).
    pub fn delta_numerators(&self, n: i64) -> Vec<Vec<i64>> {
        let r = self.monoid.ambient_rank();
        let mut out = Vec::new();
        let mut y = vec![-4 * n; r];
        loop {
            if self.in_delta(n, &y) {
                out.push(y.clone());
            }
            let mut i = 0;
            loop {
                if i == r {
                    return out;
                }
                y[i] += 1;
                if y[i] <= 4 * n {
                    break;
                }
                y[i] = -4 * n;
                i += 1;
            }
        }
    }
}

pub fn numerators(x: &RationalVector, n: i64) -> Vec<i64> {
    x.scaled_integral(n).expect("point of 1/n Z^r")
}

/// Congruence modulo `Z^r` of two level-`n` numerator vectors.
pub fn congruent(n: i64, a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).rem_euclid(n) == 0)
}

pub fn algebra(p: &MonoidPresentation, n: u64) -> Arc<GradedAlgebra> {
    GradedAlgebra::new(p, n, Field::Rational).unwrap()
}

fn random_vector(rng: &mut StdRng, len: usize, field: Field) -> Vec<Rat> {
    (0..len).map(|_| field.from_i64(rng.gen_range(-2..=2))).collect()
}

/// A random presentation `F1 -f-> F0` between free modules of small rank.
pub fn random_free_map(rng: &mut StdRng, a: &Arc<GradedAlgebra>) -> GradedMap {
    let count = a.label_count();
    let t0: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..count)).collect();
    let t1: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..count)).collect();
    let f0 = GradedModule::free(a, &t0).unwrap();
    let images: Vec<Vec<Rat>> = t1
        .iter()
        .map(|&l| random_vector(rng, f0.dim(a.label_neg(l)), a.field()))
        .collect();
    GradedMap::from_free(&t1, &f0, &images).unwrap()
}

/// A random finitely generated module: the cokernel of a random map of
/// free modules.
pub fn random_module(rng: &mut StdRng, a: &Arc<GradedAlgebra>) -> GradedModule {
    random_free_map(rng, a).cokernel().unwrap().target().clone()
}

pub fn random_sheaf(rng: &mut StdRng, p: &MonoidPresentation, n: u64) -> ParabolicSheaf {
    ParabolicSheaf::from_graded(&random_module(rng, &algebra(p, n)))
}

/// Random saturated sharp monoid of rank 2: the saturation of a few
/// random vectors in the open upper-right quadrant.
pub fn random_rank_two(rng: &mut StdRng) -> MonoidPresentation {
    loop {
        let gens: Vec<Vec<i64>> = (0..rng.gen_range(2..=3))
            .map(|_| vec![rng.gen_range(0..=3), rng.gen_range(0..=3)])
            .filter(|v: &Vec<i64>| v.iter().any(|&c| c != 0))
            .collect();
        if let Ok(p) = MonoidPresentation::validate(2, gens) {
            if p.group_rank() == 2 {
                if let Ok(q) = p.saturate() {
                    return q;
                }
            }
        }
    }
}

/// A random unimodular 2x2 matrix: a product of elementary shears.
pub fn random_unimodular(rng: &mut StdRng) -> [[i64; 2]; 2] {
    let mut m = [[1i64, 0], [0, 1]];
    for _ in 0..rng.gen_range(1..=3) {
        let k = rng.gen_range(-2..=2);
        let e = if rng.gen_bool(0.5) {
            [[1, k], [0, 1]]
        } else {
            [[1, 0], [k, 1]]
        };
        let mut out = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = (0..2).map(|t| m[i][t] * e[t][j]).sum();
            }
        }
        m = out;
    }
    m
}

fn inverse_unimodular(u: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    assert!(det == 1 || det == -1);
    [[u[1][1] * det, -u[0][1] * det], [-u[1][0] * det, u[0][0] * det]]
}

/// A chain `P -f-> Q -g-> R` of Kummer homomorphisms: `Q` random,
/// `P = U·Q` for a random unimodular `U` with `f = k·U⁻¹`, and
/// `R = 1/m Q` with `g` the root inclusion.
pub struct KummerChain {
    pub f: MonoidHom,
    pub g: MonoidHom,
    pub k: i64,
    pub m: i64,
}

pub fn random_kummer_chain(rng: &mut StdRng) -> KummerChain {
    let q = random_rank_two(rng);
    let u = random_unimodular(rng);
    let apply = |v: &[i64]| -> Vec<i64> { (0..2).map(|i| u[i][0] * v[0] + u[i][1] * v[1]).collect() };
    let p_gens: Vec<Vec<i64>> = q.hilbert_basis().unwrap().iter().map(|v| apply(v)).collect();
    let p = MonoidPresentation::validate(2, p_gens).unwrap();
    let k = rng.gen_range(1..=3);
    let inv = inverse_unimodular(u);
    let f_matrix: Vec<Vec<i64>> = inv.iter().map(|row| row.iter().map(|x| k * x).collect()).collect();
    let f = MonoidHom::new(p, q.clone(), f_matrix).unwrap();
    let m = rng.gen_range(1..=3);
    let r = root_extension(&q, m as u64).unwrap();
    let g = MonoidHom::new(q, r, vec![vec![m, 0], vec![0, m]]).unwrap();
    KummerChain { f, g, k, m }
}
