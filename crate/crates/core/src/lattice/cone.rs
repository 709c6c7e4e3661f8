//! Rational polyhedral cones given by generators.
//!
//! Facets are found by testing every hyperplane spanned by `r - 1` linearly
//! independent generator directions inside the linear span of the cone
//! (`r` = rank of the span). This is exhaustive and exact, and cheap for the
//! handful of generators in rank at most six that the library works with.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::vector::{dot, make_primitive, normalize_sign, RationalVector};
use crate::error::{Error, Result};
use crate::field::{Field, Matrix, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCone {
    dim: usize,
    generators: Vec<RationalVector>,
    /// Primitive integer directions of the nonzero generators, deduplicated.
    directions: Vec<Vec<i64>>,
    facets: Vec<Vec<i64>>,
    /// Primitive integer equations cutting out the linear span.
    equations: Vec<Vec<i64>>,
}

fn combinations(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, n, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn subsets(k: usize, n: usize) -> Vec<Vec<usize>> {
    combinations(k, n)
}

/// Scale a rational column vector to a primitive integer vector.
fn primitive_from_rational(v: &[Rat]) -> Result<Vec<i64>> {
    let den = v.iter().fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|q| (q * Rat::from_integer(den.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| {
            let y = if g.is_zero() { x.clone() } else { x / &g };
            y.to_i64().ok_or(Error::Overflow)
        })
        .collect()
}

impl RationalCone {
    /// The cone `Q_{>=0}`-spanned by `generators`.
    pub fn new(generators: Vec<RationalVector>) -> Result<Self> {
        let dim = generators
            .first()
            .map(RationalVector::dim)
            .ok_or(Error::EmptyGenerators)?;
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
        }
        let mut directions: Vec<Vec<i64>> = Vec::new();
        for g in &generators {
            if g.is_zero() {
                continue;
            }
            let d = g.primitive_direction()?;
            if !directions.contains(&d) {
                directions.push(d);
            }
        }
        directions.sort();

        let field = Field::Rational;
        let gen_matrix = Matrix::from_i64_rows(&directions, dim, field)?;
        let span_basis = gen_matrix.nullspace(field);
        let mut equations = Vec::new();
        for k in 0..span_basis.cols() {
            let col: Vec<Rat> = (0..dim).map(|i| span_basis.get(i, k).clone()).collect();
            let mut e = primitive_from_rational(&col)?;
            normalize_sign(&mut e);
            equations.push(e);
        }
        equations.sort();
        let rank = dim - equations.len();

        let mut facets: Vec<Vec<i64>> = Vec::new();
        if rank >= 1 {
            for subset in combinations(rank - 1, directions.len()) {
                let mut rows: Vec<Vec<i64>> = subset.iter().map(|&i| directions[i].clone()).collect();
                rows.extend(equations.iter().cloned());
                let ns = Matrix::from_i64_rows(&rows, dim, field)?.nullspace(field);
                if ns.cols() != 1 {
                    continue;
                }
                let col: Vec<Rat> = (0..dim).map(|i| ns.get(i, 0).clone()).collect();
                let mut l = primitive_from_rational(&col)?;
                let values: Vec<i64> = directions.iter().map(|d| dot(&l, d)).collect();
                if values.iter().all(|&v| v >= 0) {
                } else if values.iter().all(|&v| v <= 0) {
                    l.iter_mut().for_each(|x| *x = -*x);
                } else {
                    continue;
                }
                make_primitive(&mut l);
                if !facets.contains(&l) {
                    facets.push(l);
                }
            }
        }
        facets.sort();
        Ok(RationalCone {
            dim,
            generators,
            directions,
            facets,
            equations,
        })
    }

    pub fn from_integer_generators(gens: &[Vec<i64>]) -> Result<Self> {
        RationalCone::new(gens.iter().map(|g| RationalVector::from_ints(g)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[RationalVector] {
        &self.generators
    }

    pub fn directions(&self) -> &[Vec<i64>] {
        &self.directions
    }

    pub fn facets(&self) -> &[Vec<i64>] {
        &self.facets
    }

    pub fn equations(&self) -> &[Vec<i64>] {
        &self.equations
    }

    /// Rank of the linear span.
    pub fn span_rank(&self) -> usize {
        self.dim - self.equations.len()
    }

    /// Facets together with both signs of every span equation, sorted.
    pub fn inequalities(&self) -> Vec<Vec<i64>> {
        let mut out = self.facets.clone();
        for e in &self.equations {
            out.push(e.clone());
            out.push(e.iter().map(|x| -x).collect());
        }
        out.sort();
        out
    }

    /// True when the cone contains no line.
    pub fn is_pointed(&self) -> bool {
        let mut rows = self.facets.clone();
        rows.extend(self.equations.iter().cloned());
        if rows.is_empty() {
            return self.dim == 0;
        }
        Matrix::from_i64_rows(&rows, self.dim, Field::Rational)
            .map(|m| m.rank(Field::Rational) == self.dim)
            .unwrap_or(false)
    }

    /// Primitive directions spanning extreme rays (pointed cones).
    pub fn extreme_rays(&self) -> Vec<Vec<i64>> {
        let r = self.span_rank();
        self.directions
            .iter()
            .filter(|d| {
                let tight: Vec<Vec<i64>> = self.facets.iter().filter(|f| dot(f, d) == 0).cloned().collect();
                if r == 1 {
                    return true;
                }
                tight.len() >= r - 1
                    && Matrix::from_i64_rows(&tight, self.dim, Field::Rational)
                        .map(|m| m.rank(Field::Rational) == r - 1)
                        .unwrap_or(false)
            })
            .cloned()
            .collect()
    }

    /// Membership for an integer vector (or any positive multiple of a point).
    pub fn contains_int(&self, x: &[i64]) -> bool {
        self.equations.iter().all(|e| dot(e, x) == 0) && self.facets.iter().all(|f| dot(f, x) >= 0)
    }

    pub fn contains(&self, x: &RationalVector) -> Result<bool> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        Ok(self.equations.iter().all(|e| x.eval(e).is_zero()) && self.facets.iter().all(|f| !x.eval(f).is_negative()))
    }
}

/// Inequalities `l >= 0` whose common solution set is the cone spanned by
/// `generators`. Span equations appear with both signs.
pub fn facet_inequalities(generators: &[RationalVector]) -> Result<Vec<Vec<i64>>> {
    Ok(RationalCone::new(generators.to_vec())?.inequalities())
}

pub fn cone_contains(cone: &RationalCone, x: &RationalVector) -> Result<bool> {
    cone.contains(x)
}

/// Numerators `y` (points `y / n`) of `cone ∩ (1/n)Z^d ∩ {l <= bound}`, in
/// lexicographic order.
pub fn enumerate_scaled(cone: &RationalCone, n: u64, functional: &[i64], bound: &Rat) -> Result<Vec<Vec<i64>>> {
    if functional.len() != cone.dim {
        return Err(Error::DimensionMismatch {
            expected: cone.dim,
            found: functional.len(),
        });
    }
    if n == 0 {
        return Err(Error::Parse("denominator must be positive".into()));
    }
    let n_rat = Rat::from_integer(BigInt::from(n));
    let mut lo = vec![Rat::zero(); cone.dim];
    let mut hi = vec![Rat::zero(); cone.dim];
    for d in &cone.directions {
        let value = dot(functional, d);
        if value <= 0 {
            return Err(Error::UnboundedRegion);
        }
        let t = bound / Rat::from_integer(BigInt::from(value));
        if t.is_negative() {
            continue;
        }
        for i in 0..cone.dim {
            let c = &t * Rat::from_integer(BigInt::from(d[i]));
            if c < lo[i] {
                lo[i] = c.clone();
            }
            if c > hi[i] {
                hi[i] = c;
            }
        }
    }
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let to_i64 = |q: Rat| q.to_integer().to_i64().ok_or(Error::Overflow);
    let lo: Vec<i64> = lo.iter().map(|q| to_i64((q * &n_rat).ceil())).collect::<Result<_>>()?;
    let hi: Vec<i64> = hi.iter().map(|q| to_i64((q * &n_rat).floor())).collect::<Result<_>>()?;
    let scaled_bound = to_i64((bound * &n_rat).floor())?;

    let mut out = Vec::new();
    let mut y = lo.clone();
    loop {
        if dot(functional, &y) <= scaled_bound && cone.contains_int(&y) {
            out.push(y.clone());
        }
        // odometer, last coordinate fastest
        let mut i = cone.dim;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if y[i] < hi[i] {
                y[i] += 1;
                y[i + 1..cone.dim].copy_from_slice(&lo[i + 1..cone.dim]);
                break;
            }
        }
    }
}

/// Points `x` with `n x` integral, `x` in the cone and `l(x) <= bound`.
pub fn enumerate_points(cone: &RationalCone, n: u64, functional: &[i64], bound: &Rat) -> Result<Vec<RationalVector>> {
    Ok(enumerate_scaled(cone, n, functional, bound)?
        .iter()
        .map(|y| RationalVector::from_scaled(y, n as i64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(v: &[i64]) -> RationalVector {
        RationalVector::from_ints(v)
    }

    fn int(v: i64) -> Rat {
        Rat::from_integer(v.into())
    }

    fn paper_cone() -> RationalCone {
        RationalCone::from_integer_generators(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]]).unwrap()
    }

    #[test]
    fn coordinate_cone_facets() {
        let f = facet_inequalities(&[rv(&[1, 0]), rv(&[0, 1])]).unwrap();
        assert_eq!(f, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn four_ray_cone_facets() {
        let c = paper_cone();
        assert_eq!(
            c.facets(),
            &[vec![0, 1, 0], vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 1]]
        );
        assert!(c.equations().is_empty());
        assert!(c.is_pointed());
        assert_eq!(c.extreme_rays().len(), 4);
    }

    #[test]
    fn fourth_generator_e2_plus_e3_minus_e1_swaps_coordinates() {
        let c = RationalCone::from_integer_generators(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, 1, 1]])
            .unwrap();
        assert_eq!(
            c.facets(),
            &[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 1], vec![1, 1, 0]]
        );
    }

    #[test]
    fn single_ray_is_cut_out_exactly() {
        let c = RationalCone::new(vec![rv(&[2, 1])]).unwrap();
        assert_eq!(c.equations(), &[vec![1, -2]]);
        assert_eq!(c.facets(), &[vec![2, 1]]);
        // sample rational points on and off the ray
        for a in -6..=6 {
            for b in -6..=6 {
                let x = RationalVector::from_scaled(&[a, b], 3);
                let on_ray = a == 2 * b && b >= 0;
                assert_eq!(c.contains(&x).unwrap(), on_ray, "{x}");
            }
        }
    }

    #[test]
    fn membership_examples() {
        let n2 = RationalCone::new(vec![rv(&[1, 0]), rv(&[0, 1])]).unwrap();
        assert!(cone_contains(&n2, &rv(&[0, 0])).unwrap());
        assert!(!cone_contains(&n2, &rv(&[1, -1])).unwrap());
        assert!(!cone_contains(&paper_cone(), &rv(&[0, 0, -1])).unwrap());
        assert_eq!(
            cone_contains(&n2, &rv(&[1, 0, 0])),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn enumerate_segment_and_simplex() {
        let n1 = RationalCone::new(vec![rv(&[1])]).unwrap();
        let pts = enumerate_points(&n1, 3, &[1], &int(1)).unwrap();
        let keys: Vec<String> = pts.iter().map(RationalVector::key).collect();
        assert_eq!(keys, ["0", "1/3", "2/3", "1"]);

        let n2 = RationalCone::new(vec![rv(&[1, 0]), rv(&[0, 1])]).unwrap();
        let pts = enumerate_points(&n2, 1, &[1, 1], &int(1)).unwrap();
        let keys: Vec<String> = pts.iter().map(RationalVector::key).collect();
        assert_eq!(keys, ["0,0", "0,1", "1,0"]);
    }

    #[test]
    fn enumerate_four_ray_cone_against_box_scan() {
        let c = paper_cone();
        let l: Vec<i64> = c
            .facets()
            .iter()
            .fold(vec![0; 3], |acc, f| acc.iter().zip(f).map(|(a, b)| a + b).collect());
        let bound = int(dot(&l, &[2, 2, 0]));
        let pts = enumerate_scaled(&c, 1, &l, &bound).unwrap();
        for e in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, -1]] {
            assert!(pts.contains(&e.to_vec()));
        }
        // brute force over a generous box
        let mut brute = Vec::new();
        for a in -10..=10 {
            for b in -10..=10 {
                for d in -10..=10 {
                    let y = vec![a, b, d];
                    if a >= 0 && b >= 0 && a + d >= 0 && b + d >= 0 && dot(&l, &y) <= 8 {
                        brute.push(y);
                    }
                }
            }
        }
        assert_eq!(pts, brute);
    }

    #[test]
    fn unbounded_functional_is_rejected() {
        let n2 = RationalCone::new(vec![rv(&[1, 0]), rv(&[0, 1])]).unwrap();
        assert_eq!(enumerate_points(&n2, 1, &[1, 0], &int(3)), Err(Error::UnboundedRegion));
    }

    /// Exact feasibility of `x = sum c_i g_i, c_i >= 0` by enumerating the
    /// vertices of the feasibility polyhedron: `x` is in the cone iff it is a
    /// nonnegative combination of some linearly independent subset.
    fn feasible(gens: &[Vec<i64>], x: &[Rat]) -> bool {
        let d = x.len();
        let f = Field::Rational;
        for k in 0..=gens.len().min(d) {
            for s in combinations(k, gens.len()) {
                let cols: Vec<Vec<i64>> = s.iter().map(|&i| gens[i].clone()).collect();
                let m = Matrix::from_i64_rows(&cols, d, f).unwrap().transpose();
                if m.rank(f) != k {
                    continue;
                }
                if let Some(c) = m.solve(x, f) {
                    if c.iter().all(|v| !v.is_negative()) {
                        return true;
                    }
                }
            }
        }
        false
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn facets_agree_with_feasibility(
            rank in 1usize..=4,
            ngen in 1usize..=6,
            gens_seed in prop::collection::vec(-3i64..=3, 24),
            pts_seed in prop::collection::vec(-6i64..=6, 400),
        ) {
            let gens: Vec<Vec<i64>> = (0..ngen).map(|i| gens_seed[i * 4..i * 4 + rank].to_vec()).collect();
            let cone = RationalCone::from_integer_generators(&gens).unwrap();
            for p in 0..100 {
                let x: Vec<Rat> = (0..rank).map(|i| Rat::new(pts_seed[p * 4 + i].into(), 2.into())).collect();
                let xv = RationalVector::new(x.clone()).unwrap();
                prop_assert_eq!(cone.contains(&xv).unwrap(), feasible(&gens, &x));
            }
        }

        #[test]
        fn enumeration_is_closed_and_complete(
            rank in 1usize..=3,
            ngen in 1usize..=4,
            gens_seed in prop::collection::vec(0i64..=3, 12),
            n in 1u64..=3,
        ) {
            let mut gens: Vec<Vec<i64>> = (0..ngen).map(|i| gens_seed[i * 3..i * 3 + rank].to_vec()).collect();
            gens.retain(|g| g.iter().any(|&v| v != 0));
            prop_assume!(!gens.is_empty());
            let cone = RationalCone::from_integer_generators(&gens).unwrap();
            let l = vec![1i64; rank];
            let bound = int(3);
            let pts = enumerate_scaled(&cone, n, &l, &bound).unwrap();
            for y in &pts {
                prop_assert!(cone.contains_int(y));
                prop_assert!(dot(&l, y) <= 3 * n as i64);
            }
            // all coordinates are nonnegative here, so the box [0, 3n]^rank is exhaustive
            let side = 3 * n as i64;
            let total = (side + 1).pow(rank as u32);
            let mut brute = Vec::new();
            for idx in 0..total {
                let mut y = vec![0; rank];
                let mut t = idx;
                for i in (0..rank).rev() {
                    y[i] = t % (side + 1);
                    t /= side + 1;
                }
                if cone.contains_int(&y) && dot(&l, &y) <= side {
                    brute.push(y);
                }
            }
            brute.sort();
            prop_assert_eq!(pts, brute);
        }
    }
}
