use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Rat;
use crate::lattice::{dot, enumerate_scaled, RationalVector};
use crate::monoid::{MonoidPresentation, MonoidSpec};

/// How membership in a [`MonoidIdeal`] is decided. All vectors are
/// numerators in internal coordinates at the ideal's level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdealKind {
    /// `x ∈ I` iff `x - g ∈ 1/n P` for some generator `g`.
    Generated(Vec<Vec<i64>>),
    /// `x ∈ I` iff `x ∈ 1/n P` and `x + shift ∈ 1/n P`.
    Colon { shift: Vec<i64> },
}

/// An ideal of the monoid `1/n P` (saturated `P`), together with the bound
/// of the region in which its minimal generators are searched.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoidIdeal {
    monoid: MonoidPresentation,
    level: u64,
    kind: IdealKind,
    region_bound: Rat,
}

/// Numerator of `x` at level `n` in internal coordinates, if `x ∈ 1/n P^gp`.
fn numerator(p: &MonoidPresentation, n: u64, x: &RationalVector) -> Result<Vec<i64>> {
    if x.dim() != p.ambient_rank() {
        return Err(Error::DimensionMismatch {
            expected: p.ambient_rank(),
            found: x.dim(),
        });
    }
    x.scaled_integral(n as i64)
        .and_then(|v| p.to_internal(&v))
        .ok_or_else(|| Error::NotInLattice(x.to_string()))
}

/// Default region bound `3 Σ_i ℓ(v_i)`.
fn default_bound(p: &MonoidPresentation) -> Rat {
    Rat::from_integer((3 * p.hilbert_weight()).into())
}

impl MonoidIdeal {
    fn build(p: &MonoidPresentation, n: u64, kind: IdealKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("level must be positive".into()));
        }
        p.hilbert_basis()?;
        Ok(MonoidIdeal {
            monoid: p.clone(),
            level: n,
            kind,
            region_bound: default_bound(p),
        })
    }

    /// The ideal of `1/n P` generated by the given points of `1/n P`.
    pub fn generated(p: &MonoidPresentation, n: u64, generators: &[RationalVector]) -> Result<Self> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            let y = numerator(p, n, g)?;
            if !p.internal_cone().contains_int(&y) {
                return Err(Error::NotInLattice(g.to_string()));
            }
            gens.push(y);
        }
        MonoidIdeal::build(p, n, IdealKind::Generated(gens))
    }

    /// The whole monoid `1/n P`.
    pub fn whole(p: &MonoidPresentation, n: u64) -> Result<Self> {
        MonoidIdeal::build(p, n, IdealKind::Generated(vec![vec![0; p.group_rank()]]))
    }

    /// Replace the region bound (in units of `ℓ`).
    pub fn with_region_bound(mut self, bound: Rat) -> Self {
        self.region_bound = bound;
        self
    }

    pub fn monoid(&self) -> &MonoidPresentation {
        &self.monoid
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn kind(&self) -> &IdealKind {
        &self.kind
    }

    pub fn region_bound(&self) -> &Rat {
        &self.region_bound
    }

    fn contains_numerator(&self, y: &[i64]) -> bool {
        let cone = self.monoid.internal_cone();
        match &self.kind {
            IdealKind::Generated(gens) => gens.iter().any(|g| {
                let d: Vec<i64> = y.iter().zip(g).map(|(a, b)| a - b).collect();
                cone.contains_int(&d)
            }),
            IdealKind::Colon { shift } => {
                let s: Vec<i64> = y.iter().zip(shift).map(|(a, b)| a + b).collect();
                cone.contains_int(y) && cone.contains_int(&s)
            }
        }
    }

    /// Membership of a rational point; points outside `1/n P^gp` are not
    /// members.
    pub fn contains(&self, x: &RationalVector) -> Result<bool> {
        match numerator(&self.monoid, self.level, x) {
            Ok(y) => Ok(self.contains_numerator(&y)),
            Err(Error::NotInLattice(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// Minimal generators: members `x` with `ℓ(x) <= B` such that no
    /// `x - v_i/n` is a member. Ordered by `ℓ`, then lexicographically in
    /// the monoid's lattice coordinates.
    pub fn min_generators(&self) -> Result<Vec<RationalVector>> {
        let p = &self.monoid;
        let n = self.level;
        let l = p.internal_functional();
        let hb = p.internal_hilbert_basis();
        let max_weight = hb.iter().map(|v| dot(&l, v)).max().unwrap_or(0);
        let margin = &self.region_bound - Rat::from_integer(max_weight.into());
        let mut found = Vec::new();
        for y in enumerate_scaled(p.internal_cone(), n, &l, &self.region_bound)? {
            if !self.contains_numerator(&y) {
                continue;
            }
            let reducible = hb.iter().any(|v| {
                let d: Vec<i64> = y.iter().zip(v).map(|(a, b)| a - b).collect();
                self.contains_numerator(&d)
            });
            if reducible {
                continue;
            }
            let x = p.actual(&p.to_ambient(&y));
            let weight = Rat::new(dot(&l, &y).into(), (n as i64).into());
            if weight > margin {
                return Err(Error::RegionTooSmall(x.to_string()));
            }
            found.push((dot(&l, &y), y, x));
        }
        found.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        Ok(found.into_iter().map(|(_, _, x)| scale_down(&x, n)).collect())
    }
}

fn scale_down(x: &RationalVector, n: u64) -> RationalVector {
    x.scale(&Rat::new(1.into(), (n as i64).into()))
}

/// See [`MonoidIdeal::min_generators`].
pub fn ideal_min_generators(ideal: &MonoidIdeal) -> Result<Vec<RationalVector>> {
    ideal.min_generators()
}

/// The degrees `{c ∈ 1/n P : c + a - b ∈ 1/n P}` of the first projection of
/// the syzygies of `(x^a, x^b)`.
pub fn colon_degree_ideal(
    p: &MonoidPresentation,
    n: u64,
    a: &RationalVector,
    b: &RationalVector,
) -> Result<MonoidIdeal> {
    let (ya, yb) = (numerator(p, n, a)?, numerator(p, n, b)?);
    for (v, y) in [(a, &ya), (b, &yb)] {
        if !p.internal_cone().contains_int(y) {
            return Err(Error::NotInLattice(v.to_string()));
        }
    }
    let shift = ya.iter().zip(&yb).map(|(s, t)| s - t).collect();
    MonoidIdeal::build(p, n, IdealKind::Colon { shift })
}

/// One level of a coherence probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: u64,
    pub min_gens: usize,
    pub generators: Vec<RationalVector>,
}

/// A coherence probe table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTable {
    pub monoid: MonoidSpec,
    pub pair: [RationalVector; 2],
    pub rows: Vec<ProbeRow>,
}

/// Minimal-generator counts of the colon-degree ideal of `(a, b)` per
/// level. Growth without bound witnesses that the syzygies of `(x^a, x^b)`
/// are not finitely generated.
pub fn coherence_probe(
    p: &MonoidPresentation,
    a: &RationalVector,
    b: &RationalVector,
    levels: &[u64],
) -> Result<ProbeTable> {
    if !p.is_sharp() {
        return Err(Error::NotSharp);
    }
    let rows = levels
        .iter()
        .map(|&n| {
            let generators = colon_degree_ideal(p, n, a, b)?.min_generators()?;
            Ok(ProbeRow {
                n,
                min_gens: generators.len(),
                generators,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ProbeTable {
        monoid: p.to_spec(),
        pair: [a.clone(), b.clone()],
        rows,
    })
}
