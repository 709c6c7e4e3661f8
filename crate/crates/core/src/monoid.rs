//! Sharp fine saturated affine monoids given by integer generators.
//!
//! Every presentation carries a lattice basis of its group `P^gp` (the
//! nonzero rows of the Hermite normal form of the generators). Heavy
//! computations run in *internal coordinates*: `y in Z^r` stands for the
//! ambient vector `y * basis`. A presentation may also carry a `scale`
//! `s`, meaning the monoid is `(1/s) * <generators>`; all integer data is
//! stored unscaled.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Matrix, Rat};
use crate::lattice::cone::subsets;
use crate::lattice::{dot, hermite_normal_form, smith_normal_form, IntegerMatrix, RationalCone, RationalVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidPresentation {
    ambient_rank: usize,
    generators: Vec<Vec<i64>>,
    scale: u64,
    basis: Vec<Vec<i64>>,
    pivots: Vec<usize>,
    cone: RationalCone,
    internal_cone: RationalCone,
    hilbert_basis: Vec<Vec<i64>>,
    is_saturated: bool,
    is_simplicial: bool,
}

/// JSON form of a monoid: derived data is never read back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidSpec {
    pub ambient_rank: usize,
    pub generators: Vec<Vec<i64>>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: u64,
}

fn one() -> u64 {
    1
}

fn is_one(s: &u64) -> bool {
    *s == 1
}

/// An element of a monoid, checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidElement {
    owner: MonoidPresentation,
    vector: Vec<i64>,
}

impl MonoidElement {
    pub fn new(owner: &MonoidPresentation, vector: Vec<i64>) -> Result<Self> {
        if !owner.contains(&vector)? {
            return Err(Error::NotInLattice(format!("{vector:?}")));
        }
        Ok(MonoidElement {
            owner: owner.clone(),
            vector,
        })
    }

    pub fn owner(&self) -> &MonoidPresentation {
        &self.owner
    }

    pub fn vector(&self) -> &[i64] {
        &self.vector
    }
}

fn int_to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow)
}

/// Lattice points of the half-open parallelepiped spanned by the rows of
/// `rays` (a square, nonsingular integer matrix), zero included.
fn parallelepiped_points(rays: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let r = rays.len();
    let field = Field::Rational;
    // column convention: M has the rays as columns
    let m = IntegerMatrix::from_columns(rays, r)?;
    let snf = smith_normal_form(&m);
    let u_inv = snf
        .u
        .unimodular_inverse()
        .ok_or_else(|| Error::NotInLattice("singular basis change".into()))?;
    let divisors: Vec<i64> = snf
        .elementary_divisors()
        .iter()
        .map(int_to_i64)
        .collect::<Result<_>>()?;
    let m_inv = m
        .to_rational()
        .inverse(field)
        .ok_or_else(|| Error::NotInLattice("rays are dependent".into()))?;
    let total: i64 = divisors.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut t = vec![0i64; r];
        let mut rest = idx;
        for i in (0..r).rev() {
            t[i] = rest % divisors[i];
            rest /= divisors[i];
        }
        let x: Vec<i64> = (0..r)
            .map(|i| (0..r).map(|j| int_to_i64(u_inv.get(i, j)).map(|v| v * t[j])).sum())
            .collect::<Result<_>>()?;
        let xr: Vec<Rat> = x.iter().map(|&v| Rat::from_integer(v.into())).collect();
        let coeffs = m_inv.apply(&xr, field);
        let floors: Vec<i64> = coeffs
            .iter()
            .map(|c| int_to_i64(&c.floor().to_integer()))
            .collect::<Result<_>>()?;
        let y: Vec<i64> = (0..r)
            .map(|i| x[i] - (0..r).map(|j| rays[j][i] * floors[j]).sum::<i64>())
            .collect();
        out.push(y);
    }
    Ok(out)
}

/// Hilbert basis of `cone ∩ Z^r` for a full-dimensional pointed cone.
fn saturated_hilbert_basis(cone: &RationalCone) -> Result<Vec<Vec<i64>>> {
    let rays = cone.extreme_rays();
    let r = cone.dim();
    let field = Field::Rational;
    let mut candidates: Vec<Vec<i64>> = rays.clone();
    for subset in subsets(r, rays.len()) {
        let w: Vec<Vec<i64>> = subset.iter().map(|&i| rays[i].clone()).collect();
        if Matrix::from_i64_rows(&w, r, field)?.rank(field) < r {
            continue;
        }
        for p in parallelepiped_points(&w)? {
            if p.iter().any(|&v| v != 0) && !candidates.contains(&p) {
                candidates.push(p);
            }
        }
    }
    let reducible = |x: &Vec<i64>| {
        candidates.iter().any(|c| {
            c != x && {
                let d: Vec<i64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
                cone.contains_int(&d)
            }
        })
    };
    let mut basis: Vec<Vec<i64>> = candidates.iter().filter(|x| !reducible(x)).cloned().collect();
    basis.sort();
    Ok(basis)
}

impl MonoidPresentation {
    /// Validate generators and derive the lattice, cone, flags and Hilbert
    /// basis. Non-saturated input is accepted (flagged); non-sharp input
    /// is rejected.
    pub fn validate(ambient_rank: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        MonoidPresentation::with_scale(ambient_rank, generators, 1)
    }

    pub fn with_scale(ambient_rank: usize, generators: Vec<Vec<i64>>, scale: u64) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        if scale == 0 {
            return Err(Error::Parse("scale must be positive".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != ambient_rank {
                return Err(Error::DimensionMismatch {
                    expected: ambient_rank,
                    found: g.len(),
                });
            }
            if g.iter().all(|&v| v == 0) {
                return Err(Error::ZeroGenerator(i));
            }
        }
        let cone = RationalCone::from_integer_generators(&generators)?;
        if !cone.is_pointed() {
            return Err(Error::NotSharp);
        }
        let (h, _, pivots) = hermite_normal_form(&IntegerMatrix::from_rows(&generators)?);
        let basis: Vec<Vec<i64>> = h.to_i64_rows()?.into_iter().take(pivots.len()).collect();
        let mut presentation = MonoidPresentation {
            ambient_rank,
            generators,
            scale,
            basis,
            pivots,
            cone,
            internal_cone: RationalCone::from_integer_generators(&[vec![1]])?,
            hilbert_basis: Vec::new(),
            is_saturated: true,
            is_simplicial: false,
        };
        let internal: Vec<Vec<i64>> = presentation
            .generators
            .iter()
            .map(|g| presentation.to_internal(g).expect("generators lie in their own group"))
            .collect();
        presentation.internal_cone = RationalCone::from_integer_generators(&internal)?;
        let sat_basis = saturated_hilbert_basis(&presentation.internal_cone)?;
        presentation.is_saturated = sat_basis
            .iter()
            .all(|v| in_nonneg_span(&internal, v, &presentation.internal_cone));
        presentation.is_simplicial = presentation.internal_cone.extreme_rays().len() == presentation.group_rank();
        presentation.hilbert_basis = if presentation.is_saturated {
            sat_basis.iter().map(|y| presentation.to_ambient(y)).collect()
        } else {
            let mut hb: Vec<Vec<i64>> = internal
                .iter()
                .filter(|g| {
                    !internal.iter().any(|c| {
                        c != *g && {
                            let d: Vec<i64> = g.iter().zip(c).map(|(a, b)| a - b).collect();
                            d.iter().any(|&v| v != 0) && in_nonneg_span(&internal, &d, &presentation.internal_cone)
                        }
                    })
                })
                .map(|y| presentation.to_ambient(y))
                .collect();
            hb.sort();
            hb.dedup();
            hb
        };
        Ok(presentation)
    }

    pub fn from_spec(spec: &MonoidSpec) -> Result<Self> {
        MonoidPresentation::with_scale(spec.ambient_rank, spec.generators.clone(), spec.scale)
    }

    pub fn to_spec(&self) -> MonoidSpec {
        MonoidSpec {
            ambient_rank: self.ambient_rank,
            generators: self.generators.clone(),
            scale: self.scale,
        }
    }

    /// `N^r` on the coordinate vectors.
    pub fn free(r: usize) -> Result<Self> {
        let gens = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
        MonoidPresentation::validate(r, gens)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Rank `r` of `P^gp`.
    pub fn group_rank(&self) -> usize {
        self.basis.len()
    }

    /// Lattice basis of `P^gp` (rows, ambient integer coordinates).
    pub fn lattice_basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn cone(&self) -> &RationalCone {
        &self.cone
    }

    /// The cone in internal coordinates (full-dimensional in `Q^r`).
    pub fn internal_cone(&self) -> &RationalCone {
        &self.internal_cone
    }

    pub fn is_sharp(&self) -> bool {
        true
    }

    pub fn is_saturated(&self) -> bool {
        self.is_saturated
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_simplicial
    }

    /// Hilbert basis (of the saturation when the monoid is not saturated,
    /// see [`MonoidPresentation::hilbert_basis`] for the checked accessor).
    pub fn hilbert_basis_unchecked(&self) -> &[Vec<i64>] {
        &self.hilbert_basis
    }

    pub fn hilbert_basis(&self) -> Result<&[Vec<i64>]> {
        if !self.is_saturated {
            return Err(Error::NotSaturated);
        }
        Ok(&self.hilbert_basis)
    }

    /// Hilbert basis in internal coordinates.
    pub fn internal_hilbert_basis(&self) -> Vec<Vec<i64>> {
        self.hilbert_basis
            .iter()
            .map(|v| self.to_internal(v).expect("Hilbert basis lies in the group"))
            .collect()
    }

    /// `y * basis`.
    pub fn to_ambient(&self, y: &[i64]) -> Vec<i64> {
        (0..self.ambient_rank)
            .map(|k| y.iter().zip(&self.basis).map(|(c, b)| c * b[k]).sum())
            .collect()
    }

    /// Rational version of [`MonoidPresentation::to_ambient`].
    pub fn to_ambient_rat(&self, y: &[Rat]) -> Vec<Rat> {
        (0..self.ambient_rank)
            .map(|k| {
                y.iter()
                    .zip(&self.basis)
                    .fold(Rat::zero(), |acc, (c, b)| acc + c * Rat::from_integer(b[k].into()))
            })
            .collect()
    }

    /// Coordinates of a rational ambient vector in the lattice basis, if it
    /// lies in the rational span.
    pub fn to_internal_rat(&self, x: &[Rat]) -> Option<Vec<Rat>> {
        if x.len() != self.ambient_rank {
            return None;
        }
        let mut rest = x.to_vec();
        let mut y = Vec::with_capacity(self.basis.len());
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = &rest[p] / Rat::from_integer(row[p].into());
            for k in 0..self.ambient_rank {
                rest[k] = &rest[k] - &c * Rat::from_integer(row[k].into());
            }
            y.push(c);
        }
        if rest.iter().all(Zero::is_zero) {
            Some(y)
        } else {
            None
        }
    }

    /// Internal coordinates of an integer ambient vector, if it lies in `P^gp`.
    pub fn to_internal(&self, x: &[i64]) -> Option<Vec<i64>> {
        let xr: Vec<Rat> = x.iter().map(|&v| Rat::from_integer(v.into())).collect();
        self.to_internal_rat(&xr)?
            .iter()
            .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
            .collect()
    }

    pub fn in_group(&self, x: &[i64]) -> bool {
        self.to_internal(x).is_some()
    }

    /// Membership `x in P^gp ∩ P_Q` (saturated monoids only).
    pub fn contains(&self, x: &[i64]) -> Result<bool> {
        if !self.is_saturated {
            return Err(Error::NotSaturated);
        }
        if x.len() != self.ambient_rank {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_rank,
                found: x.len(),
            });
        }
        Ok(self.in_group(x) && self.cone.contains_int(x))
    }

    /// Membership in the submonoid generated by the generators, decided by
    /// a bounded search (works for non-saturated monoids too).
    pub fn generated_contains(&self, x: &[i64]) -> bool {
        let Some(y) = self.to_internal(x) else {
            return false;
        };
        let internal: Vec<Vec<i64>> = self.generators.iter().filter_map(|g| self.to_internal(g)).collect();
        in_nonneg_span(&internal, &y, &self.internal_cone)
    }

    /// Strictly positive integer functional on `P_Q ∖ {0}`: the sum of the
    /// facet functionals (ambient coordinates).
    pub fn positive_functional(&self) -> Vec<i64> {
        let mut l = vec![0i64; self.ambient_rank];
        for f in self.cone.facets() {
            for (a, b) in l.iter_mut().zip(f) {
                *a += b;
            }
        }
        l
    }

    /// The positive functional pulled back to internal coordinates.
    pub fn internal_functional(&self) -> Vec<i64> {
        let l = self.positive_functional();
        self.basis.iter().map(|b| dot(b, &l)).collect()
    }

    /// `Σ_i ℓ(v_i)` over the Hilbert basis.
    pub fn hilbert_weight(&self) -> i64 {
        let l = self.positive_functional();
        self.hilbert_basis.iter().map(|v| dot(&l, v)).sum()
    }

    /// `P^gp ∩ P_Q`, presented by its Hilbert basis.
    pub fn saturate(&self) -> Result<Self> {
        if self.is_saturated {
            return Ok(self.clone());
        }
        let hb: Vec<Vec<i64>> = saturated_hilbert_basis(&self.internal_cone)?
            .iter()
            .map(|y| self.to_ambient(y))
            .collect();
        MonoidPresentation::with_scale(self.ambient_rank, hb, self.scale)
    }

    /// Rational ambient point `x / scale`.
    pub fn actual(&self, x: &[i64]) -> RationalVector {
        RationalVector::from_scaled(x, self.scale as i64)
    }
}

/// Is `target` a nonnegative integer combination of `gens`? Depth-first
/// search with nondecreasing generator indices, pruned by cone membership
/// of the remainder (every remainder of a valid decomposition lies in the
/// cone).
fn in_nonneg_span(gens: &[Vec<i64>], target: &[i64], cone: &RationalCone) -> bool {
    fn go(
        gens: &[Vec<i64>],
        start: usize,
        target: &[i64],
        cone: &RationalCone,
        seen: &mut HashSet<(usize, Vec<i64>)>,
    ) -> bool {
        if target.iter().all(|&v| v == 0) {
            return true;
        }
        if !cone.contains_int(target) || !seen.insert((start, target.to_vec())) {
            return false;
        }
        for i in start..gens.len() {
            let rest: Vec<i64> = target.iter().zip(&gens[i]).map(|(a, b)| a - b).collect();
            if go(gens, i, &rest, cone, seen) {
                return true;
            }
        }
        false
    }
    go(gens, 0, target, cone, &mut HashSet::new())
}
