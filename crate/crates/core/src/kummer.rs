//! Monoid homomorphisms, the Kummer condition, root extensions `1/n P`,
//! finite cokernels and the grading groups `(1/n P)^gp / P^gp`.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Matrix, Rat};
use crate::lattice::{smith_normal_form, IntegerMatrix, RationalVector};
use crate::monoid::{MonoidPresentation, MonoidSpec};

/// A finite abelian group by invariant factors `d_1 | d_2 | ...`, all `> 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            invariant_factors: Vec::new(),
        }
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A lattice map between monoid presentations, `x ↦ matrix * x` on the
/// (unscaled) integer coordinates of source and target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidHom {
    source: MonoidPresentation,
    target: MonoidPresentation,
    matrix: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomSpec {
    pub source: MonoidSpec,
    pub target: MonoidSpec,
    /// `target_rank x source_rank`, acting on column vectors.
    pub matrix: Vec<Vec<i64>>,
}

impl MonoidHom {
    pub fn new(source: MonoidPresentation, target: MonoidPresentation, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != target.ambient_rank() {
            return Err(Error::DimensionMismatch {
                expected: target.ambient_rank(),
                found: matrix.len(),
            });
        }
        for row in &matrix {
            if row.len() != source.ambient_rank() {
                return Err(Error::DimensionMismatch {
                    expected: source.ambient_rank(),
                    found: row.len(),
                });
            }
        }
        let hom = MonoidHom { source, target, matrix };
        for (i, g) in hom.source.generators().iter().enumerate() {
            let image = hom.apply(g);
            let ok = if hom.target.is_saturated() {
                hom.target.contains(&image)?
            } else {
                hom.target.generated_contains(&image)
            };
            if !ok {
                return Err(Error::NotAHomomorphism(i));
            }
        }
        Ok(hom)
    }

    pub fn from_spec(spec: &HomSpec) -> Result<Self> {
        MonoidHom::new(
            MonoidPresentation::from_spec(&spec.source)?,
            MonoidPresentation::from_spec(&spec.target)?,
            spec.matrix.clone(),
        )
    }

    pub fn to_spec(&self) -> HomSpec {
        HomSpec {
            source: self.source.to_spec(),
            target: self.target.to_spec(),
            matrix: self.matrix.clone(),
        }
    }

    pub fn source(&self) -> &MonoidPresentation {
        &self.source
    }

    pub fn target(&self) -> &MonoidPresentation {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &MonoidHom) -> Result<MonoidHom> {
        if self.target.to_spec() != g.source.to_spec() {
            return Err(Error::DimensionMismatch {
                expected: self.target.ambient_rank(),
                found: g.source.ambient_rank(),
            });
        }
        let matrix = g
            .matrix
            .iter()
            .map(|row| {
                (0..self.source.ambient_rank())
                    .map(|j| row.iter().zip(&self.matrix).map(|(a, r)| a * r[j]).sum())
                    .collect()
            })
            .collect();
        MonoidHom::new(self.source.clone(), g.target.clone(), matrix)
    }

    /// The induced map `P^gp -> Q^gp` in internal coordinates: row `i` is
    /// the image of the `i`-th lattice basis vector of the source.
    pub fn group_matrix(&self) -> Vec<Vec<i64>> {
        self.source
            .lattice_basis()
            .iter()
            .map(|b| {
                self.target
                    .to_internal(&self.apply(b))
                    .expect("images of generators lie in the target group")
            })
            .collect()
    }

    fn group_rank(&self) -> usize {
        let g = self.group_matrix();
        Matrix::from_i64_rows(&g, self.target.group_rank(), Field::Rational)
            .map(|m| m.rank(Field::Rational))
            .unwrap_or(0)
    }

    /// Invariant factors of `Q^gp / f(P^gp)`.
    pub fn cokernel(&self) -> Result<FiniteAbelianGroup> {
        let (rp, rq) = (self.source.group_rank(), self.target.group_rank());
        if rp != rq || self.group_rank() != rp {
            return Err(Error::InfiniteCokernel);
        }
        let snf = smith_normal_form(&IntegerMatrix::from_rows(&self.group_matrix())?);
        let invariant_factors = snf
            .elementary_divisors()
            .iter()
            .filter(|d| !d.is_one())
            .map(|d| d.abs().to_u64().ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(FiniteAbelianGroup { invariant_factors })
    }

    /// Injective on groups, and every Hilbert basis element of the target
    /// has a positive multiple in the image of `P`. With equal ranks this
    /// amounts to: the rational preimage of each target Hilbert basis
    /// element lies in `P_Q`.
    pub fn is_kummer(&self) -> bool {
        let (rp, rq) = (self.source.group_rank(), self.target.group_rank());
        if rp != rq || self.group_rank() != rp {
            return false;
        }
        let field = Field::Rational;
        let g = self.group_matrix();
        // x * G = q  <=>  G^T x^T = q^T
        let gt = Matrix::from_i64_rows(&g, rq, field)
            .expect("square group matrix")
            .transpose();
        let target_hb: Vec<Vec<i64>> = self
            .target
            .hilbert_basis_unchecked()
            .iter()
            .map(|q| self.target.to_internal(q).expect("Hilbert basis lies in the group"))
            .collect();
        target_hb.iter().all(|q| {
            let qr: Vec<Rat> = q.iter().map(|&v| Rat::from_integer(v.into())).collect();
            match gt.solve(&qr, field) {
                Some(x) => {
                    let xv = RationalVector::new(x).expect("nonempty");
                    self.source.internal_cone().contains(&xv).unwrap_or(false)
                }
                None => false,
            }
        })
    }
}

/// `1/n P`: same integer generators, scale multiplied by `n`.
pub fn root_extension(p: &MonoidPresentation, n: u64) -> Result<MonoidPresentation> {
    if n == 0 {
        return Err(Error::Parse("root level must be positive".into()));
    }
    let scale = p.scale().checked_mul(n).ok_or(Error::Overflow)?;
    MonoidPresentation::with_scale(p.ambient_rank(), p.generators().to_vec(), scale)
}

/// The inclusion `P ↪ 1/n P` (the matrix `n I`).
pub fn root_inclusion(p: &MonoidPresentation, n: u64) -> Result<MonoidHom> {
    let target = root_extension(p, n)?;
    let d = p.ambient_rank();
    let matrix = (0..d)
        .map(|i| (0..d).map(|j| if i == j { n as i64 } else { 0 }).collect())
        .collect();
    MonoidHom::new(p.clone(), target, matrix)
}

/// `(1/n P)^gp / P^gp ≅ (Z/n)^r`.
pub fn picard_group(p: &MonoidPresentation, n: u64) -> Result<FiniteAbelianGroup> {
    root_inclusion(p, n)?.cokernel()
}

/// A class in `(1/n P)^gp / P^gp`. The normal form is the vector of
/// internal coordinates of `n * rep` reduced into `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetLabel {
    level: u64,
    residues: Vec<i64>,
}

impl CosetLabel {
    pub fn zero(p: &MonoidPresentation, n: u64) -> Self {
        CosetLabel {
            level: n,
            residues: vec![0; p.group_rank()],
        }
    }

    /// Label of the point `y / n` given in internal coordinates.
    pub fn from_internal(n: u64, y: &[i64]) -> Self {
        let n = n as i64;
        CosetLabel {
            level: n as u64,
            residues: y.iter().map(|v| v.rem_euclid(n)).collect(),
        }
    }

    /// Label of an ambient rational point `x` with `n x ∈ P^gp`.
    pub fn of(p: &MonoidPresentation, n: u64, x: &RationalVector) -> Result<Self> {
        let scaled = x.scale(&Rat::from_integer(n.into()));
        let y = p
            .to_internal_rat(scaled.coords())
            .filter(|y| y.iter().all(|c| c.is_integer()))
            .ok_or_else(|| Error::NotInLattice(format!("{x} at level {n}")))?;
        let y: Vec<i64> = y
            .iter()
            .map(|c| c.to_integer().to_i64().ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(CosetLabel::from_internal(n, &y))
    }

    /// Mixed-radix index among the `n^r` labels (lexicographic order).
    pub fn index(&self) -> usize {
        self.residues
            .iter()
            .fold(0usize, |acc, &r| acc * self.level as usize + r as usize)
    }

    pub fn from_index(n: u64, rank: usize, mut index: usize) -> Self {
        let mut residues = vec![0i64; rank];
        for i in (0..rank).rev() {
            residues[i] = (index % n as usize) as i64;
            index /= n as usize;
        }
        CosetLabel { level: n, residues }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn residues(&self) -> &[i64] {
        &self.residues
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    /// Canonical representative `to_ambient(residues) / n` (ambient).
    pub fn representative(&self, p: &MonoidPresentation) -> RationalVector {
        RationalVector::from_scaled(&p.to_ambient(&self.residues), self.level as i64)
    }

    pub fn add(&self, other: &CosetLabel) -> CosetLabel {
        assert_eq!(self.level, other.level);
        let sum: Vec<i64> = self.residues.iter().zip(&other.residues).map(|(a, b)| a + b).collect();
        CosetLabel::from_internal(self.level, &sum)
    }

    pub fn neg(&self) -> CosetLabel {
        let neg: Vec<i64> = self.residues.iter().map(|a| -a).collect();
        CosetLabel::from_internal(self.level, &neg)
    }

    /// `(n/m) * λ` as a level-`m` label, for `m | n`.
    pub fn multiply_down(&self, m: u64) -> Result<CosetLabel> {
        if m == 0 || !self.level.is_multiple_of(m) {
            return Err(Error::NotADivisor(m, self.level));
        }
        Ok(CosetLabel::from_internal(m, &self.residues))
    }

    /// The same class viewed at level `n`, for `level | n`.
    pub fn lift(&self, n: u64) -> Result<CosetLabel> {
        if self.level == 0 || !n.is_multiple_of(self.level) {
            return Err(Error::NotAMultiple(self.level, n));
        }
        let k = (n / self.level) as i64;
        let y: Vec<i64> = self.residues.iter().map(|r| r * k).collect();
        Ok(CosetLabel::from_internal(n, &y))
    }

    /// Whether this level-`n` class comes from level `m` (for `m | n`).
    pub fn comes_from(&self, m: u64) -> bool {
        m != 0 && self.level.is_multiple_of(m) && self.residues.iter().all(|r| r % (self.level / m) as i64 == 0)
    }

    /// For a label coming from level `m`, its level-`m` version.
    pub fn descend(&self, m: u64) -> Result<CosetLabel> {
        if !self.comes_from(m) {
            return Err(Error::NotADivisor(m, self.level));
        }
        let k = (self.level / m) as i64;
        let y: Vec<i64> = self.residues.iter().map(|r| r / k).collect();
        Ok(CosetLabel::from_internal(m, &y))
    }

    pub fn key(&self, p: &MonoidPresentation) -> String {
        self.representative(p).key()
    }
}

/// All `n^r` labels at level `n`, in normal-form order.
pub fn all_labels(p: &MonoidPresentation, n: u64) -> Vec<CosetLabel> {
    let r = p.group_rank();
    let count = (n as usize).pow(r as u32);
    (0..count).map(|i| CosetLabel::from_index(n, r, i)).collect()
}

/// Number of labels at level `n` (`n^r`).
pub fn label_count(p: &MonoidPresentation, n: u64) -> usize {
    (n as usize).pow(p.group_rank() as u32)
}
