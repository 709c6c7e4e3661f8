use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{format_rat, parse_rat, Field, Matrix, Quotient};
use crate::graded::module::left_inverse;
use crate::graded::{GradedAlgebra, GradedMap, GradedModule};
use crate::infquot::{delta_points, DeltaSet};
use crate::kummer::CosetLabel;
use crate::lattice::RationalVector;
use crate::monoid::{MonoidPresentation, MonoidSpec};

/// A parabolic sheaf over the log point with weights in `1/n P^wt`.
///
/// The pseudo-period isomorphisms identify `E_{a+p}` with `E_a` for
/// `p ∈ P^gp`, so a sheaf is stored by one space per label (its canonical
/// representative `a`), and for every Hilbert basis element `v/n` of
/// `1/n P` and every label the structure matrix `E_a -> E_{rep(a + v/n)}`.
/// Over the log point every composite whose total weight gain lies in `P⁺`
/// vanishes.
#[derive(Debug, Clone)]
pub struct ParabolicSheaf {
    monoid: MonoidPresentation,
    level: u64,
    field: Field,
    dims: Vec<usize>,
    /// `[hilbert basis index][label]`.
    maps: Vec<Vec<Matrix>>,
}

impl PartialEq for ParabolicSheaf {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level
            && self.field == other.field
            && self.monoid.to_spec() == other.monoid.to_spec()
            && self.dims == other.dims
            && self.maps == other.maps
    }
}

/// A homomorphism of parabolic sheaves, one matrix per label.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicMap {
    source: ParabolicSheaf,
    target: ParabolicSheaf,
    blocks: Vec<Matrix>,
}

/// JSON form of a parabolic sheaf. Components are keyed by canonical
/// representative; maps by `"<rep>|<u>"` with `u` a Hilbert basis element
/// of `1/n P`. Missing components have dimension 0, missing maps are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicSpec {
    pub monoid: MonoidSpec,
    pub level: u64,
    /// `"Q"` or `"Fp:<p>"`; `Q` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub components: BTreeMap<String, usize>,
    #[serde(default)]
    pub maps: BTreeMap<String, Vec<Vec<String>>>,
}

/// The summands `ι_u(E′_u)` of `colim_{u ≤ a} E′_u` for one label: weights
/// `u = a - d` with `d ∈ Δ_P ∩ 1/n P`.
#[derive(Debug, Clone)]
struct Colimit {
    /// `(index of d in Δ, level-m label of u, offset, size)`.
    summands: Vec<(usize, usize, usize, usize)>,
    by_d: HashMap<usize, usize>,
    quotient: Quotient,
}

impl Colimit {
    fn summand(&self, d: usize) -> Option<&(usize, usize, usize, usize)> {
        self.by_d.get(&d).map(|&i| &self.summands[i])
    }
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl ParabolicSheaf {
    pub fn new(
        monoid: &MonoidPresentation,
        level: u64,
        field: Field,
        dims: Vec<usize>,
        maps: Vec<Vec<Matrix>>,
    ) -> Result<Self> {
        let e = ParabolicSheaf {
            monoid: monoid.clone(),
            level,
            field,
            dims,
            maps,
        };
        e.to_graded()?;
        Ok(e)
    }

    /// The zero sheaf.
    pub fn zero(monoid: &MonoidPresentation, level: u64, field: Field) -> Result<Self> {
        let count = (level as usize).pow(monoid.group_rank() as u32);
        let hb = monoid.hilbert_basis()?.len();
        ParabolicSheaf::new(
            monoid,
            level,
            field,
            vec![0; count],
            vec![vec![Matrix::zeros(0, 0); count]; hb],
        )
    }

    /// `E_a = k` for `a ∈ P^gp` and `0` otherwise, with the only possible
    /// maps.
    pub fn integral_weights(monoid: &MonoidPresentation, level: u64, field: Field) -> Result<Self> {
        let a = GradedAlgebra::new(monoid, level, field)?;
        Ok(ParabolicSheaf::from_graded(&GradedModule::trivial(&a, 1)))
    }

    pub fn monoid(&self) -> &MonoidPresentation {
        &self.monoid
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, label: usize) -> usize {
        self.dims[label]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn label_count(&self) -> usize {
        self.dims.len()
    }

    pub fn label(&self, index: usize) -> CosetLabel {
        CosetLabel::from_index(self.level, self.monoid.group_rank(), index)
    }

    /// Canonical representative of a label.
    pub fn representative(&self, label: usize) -> RationalVector {
        self.label(label).representative(&self.monoid)
    }

    /// Structure matrix of the `i`-th Hilbert basis element at `label`.
    pub fn structure_map(&self, hb: usize, label: usize) -> &Matrix {
        &self.maps[hb][label]
    }

    fn label_after(&self, label: usize, v: &[i64]) -> usize {
        self.label(label).add(&CosetLabel::from_internal(self.level, v)).index()
    }

    /// The graded module over `A_n` with `M_λ = E_{rep λ}` and `x^{v/n}`
    /// acting by the structure matrices. Fails with `InvalidSheaf` when the
    /// data is not a parabolic sheaf.
    pub fn to_graded(&self) -> Result<GradedModule> {
        let algebra = GradedAlgebra::new(&self.monoid, self.level, self.field)?;
        self.to_graded_over(&algebra)
    }

    /// As [`ParabolicSheaf::to_graded`], over a given algebra.
    pub fn to_graded_over(&self, algebra: &Arc<GradedAlgebra>) -> Result<GradedModule> {
        if algebra.level() != self.level {
            return Err(Error::LevelMismatch(self.level, algebra.level()));
        }
        if algebra.field() != self.field || algebra.monoid().to_spec() != self.monoid.to_spec() {
            return Err(Error::AlgebraMismatch);
        }
        let hb = self.monoid.internal_hilbert_basis();
        let count = algebra.label_count();
        if self.dims.len() != count || self.maps.len() != hb.len() {
            return Err(Error::InvalidSheaf("wrong number of components or maps".into()));
        }
        for (i, v) in hb.iter().enumerate() {
            if self.maps[i].len() != count {
                return Err(Error::InvalidSheaf(format!("map {i}: one matrix per label required")));
            }
            for l in 0..count {
                let t = self.label_after(l, v);
                let m = &self.maps[i][l];
                if m.rows() != self.dims[t] || m.cols() != self.dims[l] {
                    return Err(Error::InvalidSheaf(format!(
                        "structure map {i} at {} has the wrong shape",
                        self.representative(l)
                    )));
                }
            }
            // a Hilbert basis element outside Δ has gain in P⁺ + 1/n P
            if algebra.index_of(v).is_none() && self.maps[i].iter().any(|m| !m.is_zero()) {
                return Err(Error::InvalidSheaf(format!(
                    "structure map {i} has weight gain in P⁺ but is nonzero"
                )));
            }
        }
        let gens = algebra
            .generators()
            .iter()
            .map(|&g| {
                let i = hb
                    .iter()
                    .position(|v| v.as_slice() == algebra.point(g))
                    .expect("generator");
                self.maps[i].clone()
            })
            .collect();
        GradedModule::from_generator_actions(algebra.clone(), self.dims.clone(), gens)
            .map_err(|e| Error::InvalidSheaf(e.to_string()))
    }

    /// The parabolic sheaf of a graded module.
    pub fn from_graded(m: &GradedModule) -> Self {
        let a = m.algebra();
        let p = a.monoid();
        let maps = p
            .internal_hilbert_basis()
            .iter()
            .map(|v| match a.index_of(v) {
                Some(u) => (0..a.label_count()).map(|l| m.action(u, l).clone()).collect(),
                None => (0..a.label_count())
                    .map(|l| {
                        let t = a.label_add(l, CosetLabel::from_internal(a.level(), v).index());
                        Matrix::zeros(m.dim(t), m.dim(l))
                    })
                    .collect(),
            })
            .collect();
        ParabolicSheaf {
            monoid: p.clone(),
            level: a.level(),
            field: a.field(),
            dims: m.dims().to_vec(),
            maps,
        }
    }

    /// `Res`: the restriction to the weights `1/m P^wt`, `m | n`. The
    /// structure map of `v/m` is the composite of `n/m` structure maps of
    /// `v/n`.
    pub fn restrict(&self, m: u64) -> Result<ParabolicSheaf> {
        let n = self.level;
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotADivisor(m, n));
        }
        let r = self.monoid.group_rank();
        let k = n / m;
        let count = (m as usize).pow(r as u32);
        let lift = |l: usize| CosetLabel::from_index(m, r, l).lift(n).expect("m | n").index();
        let dims = (0..count).map(|l| self.dims[lift(l)]).collect();
        let maps = self
            .monoid
            .internal_hilbert_basis()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                (0..count)
                    .map(|l| {
                        let mut cur = lift(l);
                        let mut acc = Matrix::identity(self.dims[cur]);
                        for _ in 0..k {
                            acc = self.maps[i][cur].mul(&acc, self.field);
                            cur = self.label_after(cur, v);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        ParabolicSheaf::new(&self.monoid, m, self.field, dims, maps)
    }

    /// Colimit presentations of `Ind_n` of this sheaf (level `m`), per
    /// level-`n` label `ν` with weight `a = rep ν`:
    /// `colim_{u ∈ 1/m P^wt, u ≤ a} E_u`.
    ///
    /// Only weights with `a - u ∈ Δ_P` survive: if `a - u ∈ P⁺ + P_Q` then
    /// `E_u -> E_{u+p}` vanishes for some `p ∈ P⁺` below `a - u`. These
    /// weights are upward closed, so the colimit is their direct sum modulo
    /// the covering identifications `ι_u(x) = ι_{u+v/m}(x^{v/m} x)` and the
    /// images `ι_{u}(x^{v/m} y)` of weights `u - v/m` that do not survive.
    fn colimits(&self, n: u64, delta: &DeltaSet) -> Vec<Colimit> {
        let m = self.level;
        let k = (n / m) as i64;
        let r = self.monoid.group_rank();
        let field = self.field;
        let hb = self.monoid.internal_hilbert_basis();
        let count = (n as usize).pow(r as u32);
        (0..count)
            .map(|nu| {
                let alpha = CosetLabel::from_index(n, r, nu).residues().to_vec();
                let mut summands = Vec::new();
                let mut by_d = HashMap::new();
                let mut offset = 0;
                for (d, y) in delta.internal_points().iter().enumerate() {
                    let u = sub(&alpha, y);
                    if u.iter().all(|c| c % k == 0) {
                        let coarse: Vec<i64> = u.iter().map(|c| c / k).collect();
                        let label = CosetLabel::from_internal(m, &coarse).index();
                        let size = self.dims[label];
                        by_d.insert(d, summands.len());
                        summands.push((d, label, offset, size));
                        offset += size;
                    }
                }
                let mut relations: Vec<Vec<_>> = Vec::new();
                for &(d, label, off, size) in &summands {
                    let y = &delta.internal_points()[d];
                    for (i, v) in hb.iter().enumerate() {
                        let step: Vec<i64> = v.iter().map(|c| c * k).collect();
                        // covering u -> u + v/m, i.e. d -> d - v/m
                        if let Some(d2) = delta.index_of(&sub(y, &step)) {
                            let &(_, _, off2, size2) = &summands[by_d[&d2]];
                            let s = &self.maps[i][label];
                            for x in 0..size {
                                let mut row = vec![field.zero(); offset];
                                row[off + x] = field.one();
                                for j in 0..size2 {
                                    row[off2 + j] = field.neg(s.get(j, x));
                                }
                                relations.push(row);
                            }
                        }
                        // u - v/m does not survive: its images die at u
                        if delta.index_of(&add(y, &step)).is_none() {
                            let below = self.label_after_coarse(label, v, -1);
                            let s = &self.maps[i][below];
                            for x in 0..s.cols() {
                                let mut row = vec![field.zero(); offset];
                                for j in 0..size {
                                    row[off + j] = s.get(j, x).clone();
                                }
                                relations.push(row);
                            }
                        }
                    }
                }
                let rel = Matrix::from_rows(relations, offset).expect("relation length");
                Colimit {
                    summands,
                    by_d,
                    quotient: Quotient::new(&rel, offset, field),
                }
            })
            .collect()
    }

    fn label_after_coarse(&self, label: usize, v: &[i64], sign: i64) -> usize {
        let w: Vec<i64> = v.iter().map(|c| c * sign).collect();
        self.label_after(label, &w)
    }

    fn induce_presented(&self, n: u64) -> Result<(ParabolicSheaf, Vec<Colimit>)> {
        let m = self.level;
        if n == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotAMultiple(m, n));
        }
        let delta = delta_points(&self.monoid, n)?;
        let cols = self.colimits(n, &delta);
        let r = self.monoid.group_rank();
        let field = self.field;
        let hb = self.monoid.internal_hilbert_basis();
        let dims: Vec<usize> = cols.iter().map(|c| c.quotient.dim()).collect();
        let maps = hb
            .iter()
            .map(|v| {
                (0..cols.len())
                    .map(|nu| {
                        // a ↦ a + v/n; the weight u of a summand is kept, so d ↦ d + v/n
                        let t = CosetLabel::from_index(n, r, nu)
                            .add(&CosetLabel::from_internal(n, v))
                            .index();
                        let (src, dst) = (&cols[nu], &cols[t]);
                        let mut pre = Matrix::zeros(dst.quotient.section.rows(), src.quotient.section.rows());
                        for &(d, _, off, size) in &src.summands {
                            let y = &delta.internal_points()[d];
                            if let Some(d2) = delta.index_of(&add(y, v)) {
                                let &(_, _, off2, _) = dst.summand(d2).expect("summand present");
                                pre.set_block(off2, off, &Matrix::identity(size));
                            }
                        }
                        dst.quotient
                            .projection
                            .mul(&pre.mul(&src.quotient.section, field), field)
                    })
                    .collect()
            })
            .collect();
        let e = ParabolicSheaf::new(&self.monoid, n, field, dims, maps)?;
        Ok((e, cols))
    }

    /// `Ind`: the sheaf at level `n` (a multiple of this level) with
    /// `(Ind E′)_a = colim_{u ∈ 1/m P^wt, u ≤ a} E′_u`.
    pub fn induce(&self, n: u64) -> Result<ParabolicSheaf> {
        Ok(self.induce_presented(n)?.0)
    }

    /// Unit `E′ -> Res_m Ind_n E′`, `x ↦ ι_a(x)`.
    pub fn unit(&self, n: u64) -> Result<ParabolicMap> {
        let (ind, cols) = self.induce_presented(n)?;
        let res = ind.restrict(self.level)?;
        let r = self.monoid.group_rank();
        let zero = delta_points(&self.monoid, n)?.index_of(&vec![0; r]).expect("0 ∈ Δ");
        let blocks = (0..self.label_count())
            .map(|l| {
                let nu = self.label(l).lift(n).expect("m | n").index();
                let col = &cols[nu];
                let &(_, _, off, size) = col.summand(zero).expect("weight a itself");
                let mut inc = Matrix::zeros(col.quotient.section.rows(), size);
                inc.set_block(off, 0, &Matrix::identity(size));
                col.quotient.projection.mul(&inc, self.field)
            })
            .collect();
        ParabolicMap::new(self.clone(), res, blocks)
    }

    /// Counit `Ind_n Res_m E -> E` (`m | n`, `n` this level), induced by
    /// the maps `E_u -> E_a`.
    pub fn counit(&self, m: u64) -> Result<ParabolicMap> {
        let n = self.level;
        let res = self.restrict(m)?;
        let (ind, cols) = res.induce_presented(n)?;
        let graded = self.to_graded()?;
        let r = self.monoid.group_rank();
        let blocks = cols
            .iter()
            .enumerate()
            .map(|(nu, col)| {
                let mut pre = Matrix::zeros(self.dims[nu], col.quotient.section.rows());
                for &(d, label, off, _) in &col.summands {
                    // E_u -> E_a is x^{a-u} = x^d at the label of u
                    let u_label = CosetLabel::from_index(m, r, label).lift(n).expect("m | n").index();
                    // the algebra's basis is Δ ∩ 1/n P in the same order
                    pre.set_block(0, off, graded.action(d, u_label));
                }
                pre.mul(&col.quotient.section, self.field)
            })
            .collect();
        ParabolicMap::new(ind, self.clone(), blocks)
    }

    /// Whether the counit `Ind_n Res_m E -> E` is an isomorphism, i.e.
    /// whether every `colim_{u ∈ 1/m P^{≤a}} E_u -> E_a` is one.
    pub fn is_induced_from(&self, m: u64) -> Result<bool> {
        Ok(self.counit(m)?.is_isomorphism())
    }

    /// The least divisor `m` of the level with [`is_induced_from`] true.
    ///
    /// [`is_induced_from`]: ParabolicSheaf::is_induced_from
    pub fn minimal_induced_level(&self) -> Result<u64> {
        for m in crate::infquot::divisors(self.level) {
            if self.is_induced_from(m)? {
                return Ok(m);
            }
        }
        unreachable!("every sheaf is induced from its own level")
    }

    pub fn from_spec(spec: &ParabolicSpec) -> Result<Self> {
        let p = MonoidPresentation::from_spec(&spec.monoid)?;
        let n = spec.level;
        if n == 0 {
            return Err(Error::Parse("level must be positive".into()));
        }
        let field: Field = spec.field.as_deref().unwrap_or("Q").parse()?;
        let r = p.group_rank();
        let count = (n as usize).pow(r as u32);
        let hb = p.hilbert_basis()?.to_vec();
        let find = |key: &str| -> Result<usize> {
            let v = RationalVector::parse(key)?;
            let lab = CosetLabel::of(&p, n, &v)?;
            let l = lab.index();
            if lab.representative(&p) != v {
                return Err(Error::Parse(format!("{key} is not a canonical representative")));
            }
            Ok(l)
        };
        let mut dims = vec![0; count];
        for (k, &d) in &spec.components {
            dims[find(k)?] = d;
        }
        let hb_keys: Vec<String> = hb.iter().map(|v| p.actual(v).scale(&inv(n)).to_string()).collect();
        let hb_int = p.internal_hilbert_basis();
        let mut maps: Vec<Vec<Matrix>> = hb_int
            .iter()
            .map(|v| {
                (0..count)
                    .map(|l| {
                        let t = CosetLabel::from_index(n, r, l)
                            .add(&CosetLabel::from_internal(n, v))
                            .index();
                        Matrix::zeros(dims[t], dims[l])
                    })
                    .collect()
            })
            .collect();
        for (key, rows) in &spec.maps {
            let (rep, u) = key
                .split_once('|')
                .ok_or_else(|| Error::Parse(format!("map key {key:?} must be \"<rep>|<u>\"")))?;
            let l = find(rep.trim())?;
            let u = RationalVector::parse(u.trim())?.to_string();
            let i = hb_keys
                .iter()
                .position(|k| *k == u)
                .ok_or_else(|| Error::Parse(format!("{u} is not a Hilbert basis element of 1/n P")))?;
            let (rr, cc) = (maps[i][l].rows(), maps[i][l].cols());
            let parsed: Vec<Vec<_>> = rows
                .iter()
                .map(|row| row.iter().map(|s| parse_rat(s).map(|q| field.normalize(q))).collect())
                .collect::<Result<_>>()?;
            if parsed.len() != rr || parsed.iter().any(|row| row.len() != cc) {
                return Err(Error::InvalidSheaf(format!("map {key} must be {rr}x{cc}")));
            }
            maps[i][l] = Matrix::from_rows(parsed, cc)?;
        }
        ParabolicSheaf::new(&p, n, field, dims, maps)
    }

    pub fn to_spec(&self) -> ParabolicSpec {
        let p = &self.monoid;
        let n = self.level;
        let mut components = BTreeMap::new();
        let mut maps = BTreeMap::new();
        let hb = p.hilbert_basis_unchecked();
        for l in 0..self.label_count() {
            if self.dims[l] == 0 {
                continue;
            }
            let rep = self.representative(l).to_string();
            components.insert(rep.clone(), self.dims[l]);
            for (i, v) in hb.iter().enumerate() {
                let m = &self.maps[i][l];
                if m.is_zero() {
                    continue;
                }
                let u = p.actual(v).scale(&inv(n));
                let rows = m
                    .to_rows()
                    .iter()
                    .map(|row| row.iter().map(format_rat).collect())
                    .collect();
                maps.insert(format!("{rep}|{u}"), rows);
            }
        }
        ParabolicSpec {
            monoid: p.to_spec(),
            level: n,
            field: Some(self.field.to_string()),
            components,
            maps,
        }
    }
}

fn inv(n: u64) -> crate::field::Rat {
    crate::field::Rat::new(1.into(), (n as i64).into())
}

impl ParabolicMap {
    pub fn new(source: ParabolicSheaf, target: ParabolicSheaf, blocks: Vec<Matrix>) -> Result<Self> {
        if source.level != target.level {
            return Err(Error::LevelMismatch(source.level, target.level));
        }
        if source.field != target.field || source.monoid.to_spec() != target.monoid.to_spec() {
            return Err(Error::AlgebraMismatch);
        }
        if blocks.len() != source.label_count() {
            return Err(Error::InvalidMap("one block per label required".into()));
        }
        for (l, b) in blocks.iter().enumerate() {
            if b.rows() != target.dims[l] || b.cols() != source.dims[l] {
                return Err(Error::InvalidMap(format!("block {l} has the wrong shape")));
            }
        }
        let field = source.field;
        for (i, v) in source.monoid.internal_hilbert_basis().iter().enumerate() {
            for l in 0..blocks.len() {
                let t = source.label_after(l, v);
                let lhs = target.maps[i][l].mul(&blocks[l], field);
                let rhs = blocks[t].mul(&source.maps[i][l], field);
                if lhs != rhs {
                    return Err(Error::InvalidMap(format!(
                        "does not commute with structure map {i} at label {l}"
                    )));
                }
            }
        }
        Ok(ParabolicMap { source, target, blocks })
    }

    pub fn identity(e: &ParabolicSheaf) -> Self {
        ParabolicMap {
            source: e.clone(),
            target: e.clone(),
            blocks: e.dims.iter().map(|&d| Matrix::identity(d)).collect(),
        }
    }

    pub fn source(&self) -> &ParabolicSheaf {
        &self.source
    }

    pub fn target(&self) -> &ParabolicSheaf {
        &self.target
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &ParabolicMap) -> Result<ParabolicMap> {
        if self.target != g.source {
            return Err(Error::InvalidMap("composable maps must share a sheaf".into()));
        }
        let field = self.source.field;
        let blocks = g
            .blocks
            .iter()
            .zip(&self.blocks)
            .map(|(b, a)| b.mul(a, field))
            .collect();
        Ok(ParabolicMap {
            source: self.source.clone(),
            target: g.target.clone(),
            blocks,
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.blocks.iter().all(|b| b.is_invertible(self.source.field))
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self
                .blocks
                .iter()
                .zip(&self.source.dims)
                .all(|(b, &d)| *b == Matrix::identity(d))
    }

    /// The corresponding map of graded modules.
    pub fn to_graded(&self) -> Result<GradedMap> {
        let s = self.source.to_graded()?;
        let t = self.target.to_graded_over(s.algebra())?;
        GradedMap::new(s, t, self.blocks.clone())
    }

    /// `Res_m` of the map.
    pub fn restrict(&self, m: u64) -> Result<ParabolicMap> {
        let (s, t) = (self.source.restrict(m)?, self.target.restrict(m)?);
        let n = self.source.level;
        let r = self.source.monoid.group_rank();
        let blocks = (0..s.label_count())
            .map(|l| self.blocks[CosetLabel::from_index(m, r, l).lift(n).expect("m | n").index()].clone())
            .collect();
        ParabolicMap::new(s, t, blocks)
    }

    /// `Ind_n` of the map: `ι_u(x) ↦ ι_u(f x)` on every colimit.
    pub fn induce(&self, n: u64) -> Result<ParabolicMap> {
        let (s, sc) = self.source.induce_presented(n)?;
        let (t, tc) = self.target.induce_presented(n)?;
        let field = self.source.field;
        let blocks = sc
            .iter()
            .zip(&tc)
            .map(|(a, b)| {
                let mut pre = Matrix::zeros(b.quotient.section.rows(), a.quotient.section.rows());
                for (&(d, label, off, _), &(d2, _, off2, _)) in a.summands.iter().zip(&b.summands) {
                    debug_assert_eq!(d, d2);
                    pre.set_block(off2, off, &self.blocks[label]);
                }
                b.quotient.projection.mul(&pre.mul(&a.quotient.section, field), field)
            })
            .collect();
        ParabolicMap::new(s, t, blocks)
    }

    /// Inclusion of the kernel, computed componentwise.
    pub fn kernel(&self) -> Result<ParabolicMap> {
        let e = &self.source;
        let field = e.field;
        let bases: Vec<Matrix> = self.blocks.iter().map(|b| b.nullspace(field)).collect();
        let lefts: Vec<Matrix> = bases.iter().map(|b| left_inverse(b, field)).collect();
        let maps = e
            .monoid
            .internal_hilbert_basis()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                (0..bases.len())
                    .map(|l| {
                        let t = e.label_after(l, v);
                        lefts[t].mul(&e.maps[i][l].mul(&bases[l], field), field)
                    })
                    .collect()
            })
            .collect();
        let dims = bases.iter().map(Matrix::cols).collect();
        let k = ParabolicSheaf::new(&e.monoid, e.level, field, dims, maps)?;
        ParabolicMap::new(k, e.clone(), bases)
    }

    /// Projection onto the cokernel, computed componentwise.
    pub fn cokernel(&self) -> Result<ParabolicMap> {
        let e = &self.target;
        let field = e.field;
        let quots: Vec<Quotient> = self
            .blocks
            .iter()
            .zip(&e.dims)
            .map(|(b, &d)| Quotient::new(&b.transpose(), d, field))
            .collect();
        let maps = e
            .monoid
            .internal_hilbert_basis()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                (0..quots.len())
                    .map(|l| {
                        let t = e.label_after(l, v);
                        quots[t]
                            .projection
                            .mul(&e.maps[i][l].mul(&quots[l].section, field), field)
                    })
                    .collect()
            })
            .collect();
        let dims = quots.iter().map(Quotient::dim).collect();
        let c = ParabolicSheaf::new(&e.monoid, e.level, field, dims, maps)?;
        let blocks = quots.into_iter().map(|q| q.projection).collect();
        ParabolicMap::new(e.clone(), c, blocks)
    }
}

/// `Res_m E`.
pub fn restrict(e: &ParabolicSheaf, m: u64) -> Result<ParabolicSheaf> {
    e.restrict(m)
}

/// `Ind_n E′`.
pub fn induce(e: &ParabolicSheaf, n: u64) -> Result<ParabolicSheaf> {
    e.induce(n)
}

/// See [`ParabolicSheaf::is_induced_from`].
pub fn is_induced_from(e: &ParabolicSheaf, m: u64) -> Result<bool> {
    e.is_induced_from(m)
}

/// A basis of `Hom(E′, E)`: all families of matrices commuting with the
/// structure maps.
pub fn hom_space(source: &ParabolicSheaf, target: &ParabolicSheaf) -> Result<Vec<ParabolicMap>> {
    if source.level != target.level {
        return Err(Error::LevelMismatch(source.level, target.level));
    }
    if source.field != target.field || source.monoid.to_spec() != target.monoid.to_spec() {
        return Err(Error::AlgebraMismatch);
    }
    let field = source.field;
    let count = source.label_count();
    // unknown X_l (target_l x source_l), row-major, at offset[l]
    let mut offsets = Vec::with_capacity(count);
    let mut total = 0;
    for l in 0..count {
        offsets.push(total);
        total += target.dims[l] * source.dims[l];
    }
    let var = |l: usize, i: usize, j: usize| offsets[l] + i * source.dims[l] + j;
    let mut rows = Vec::new();
    for (h, v) in source.monoid.internal_hilbert_basis().iter().enumerate() {
        for l in 0..count {
            let t = source.label_after(l, v);
            let (s_map, t_map) = (&source.maps[h][l], &target.maps[h][l]);
            // (T X_l - X_t S)[i][j] = 0
            for i in 0..target.dims[t] {
                for j in 0..source.dims[l] {
                    let mut row = vec![field.zero(); total];
                    for k in 0..target.dims[l] {
                        let c = t_map.get(i, k);
                        let idx = var(l, k, j);
                        row[idx] = field.add(&row[idx], c);
                    }
                    for k in 0..source.dims[t] {
                        let c = s_map.get(k, j);
                        let idx = var(t, i, k);
                        row[idx] = field.sub(&row[idx], c);
                    }
                    rows.push(row);
                }
            }
        }
    }
    let system = Matrix::from_rows(rows, total)?;
    let null = system.nullspace(field);
    (0..null.cols())
        .map(|c| {
            let x = null.column(c);
            let blocks = (0..count)
                .map(|l| {
                    let mut b = Matrix::zeros(target.dims[l], source.dims[l]);
                    for i in 0..target.dims[l] {
                        for j in 0..source.dims[l] {
                            b.set(i, j, x[var(l, i, j)].clone());
                        }
                    }
                    b
                })
                .collect();
            ParabolicMap::new(source.clone(), target.clone(), blocks)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::tests::paper_monoid;

    fn naturals() -> MonoidPresentation {
        MonoidPresentation::free(1).unwrap()
    }

    #[test]
    fn zero_sheaf_is_zero_module() {
        let e = ParabolicSheaf::zero(&paper_monoid(), 2, Field::Rational).unwrap();
        let a = GradedAlgebra::new(&paper_monoid(), 2, Field::Rational).unwrap();
        assert_eq!(e.to_graded().unwrap(), GradedModule::zero(&a));
    }

    #[test]
    fn point_sheaf_is_residue_module() {
        let e = ParabolicSheaf::integral_weights(&naturals(), 1, Field::Rational).unwrap();
        let m = e.to_graded().unwrap();
        assert_eq!(m.dims(), &[1]);
        assert_eq!(ParabolicSheaf::from_graded(&m), e);
    }

    #[test]
    fn restrict_example_sheaf() {
        let e = ParabolicSheaf::integral_weights(&naturals(), 4, Field::Rational).unwrap();
        let r = e.restrict(2).unwrap();
        assert_eq!(r.dims(), &[1, 0]);
        assert_eq!(e.restrict(4).unwrap(), e);
    }

    #[test]
    fn induce_naturals_to_level_two() {
        let a = GradedAlgebra::new(&naturals(), 1, Field::Rational).unwrap();
        let e = ParabolicSheaf::from_graded(&GradedModule::trivial(&a, 1));
        let ind = e.induce(2).unwrap();
        assert_eq!(ind.dims(), &[1, 1]);
        // E_0 -> E_{1/2} is the identity
        assert_eq!(ind.structure_map(0, 0), &Matrix::identity(1));
        assert_eq!(e.induce(1).unwrap(), e);
    }

    #[test]
    fn example_sheaf_is_not_induced() {
        let e = ParabolicSheaf::integral_weights(&naturals(), 4, Field::Rational).unwrap();
        assert!(!e.is_induced_from(1).unwrap());
        assert!(!e.is_induced_from(2).unwrap());
        assert!(e.is_induced_from(4).unwrap());
        let ind = e.restrict(1).unwrap().induce(4).unwrap();
        assert_ne!(ind.dims(), e.dims());
        assert!(ind.is_induced_from(1).unwrap());
        assert_eq!(e.minimal_induced_level().unwrap(), 4);
    }

    #[test]
    fn hom_of_simple_is_one_dimensional() {
        let e = ParabolicSheaf::integral_weights(&paper_monoid(), 2, Field::Rational).unwrap();
        assert_eq!(hom_space(&e, &e).unwrap().len(), 1);
    }

    #[test]
    fn spec_round_trip() {
        let a = GradedAlgebra::new(&paper_monoid(), 2, Field::Rational).unwrap();
        let e = ParabolicSheaf::from_graded(&GradedModule::twist(&a, 5));
        let spec = e.to_spec();
        let json = serde_json::to_string(&spec).unwrap();
        let back: ParabolicSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(ParabolicSheaf::from_spec(&back).unwrap(), e);
    }

    #[test]
    fn nonzero_gain_in_p_plus_is_rejected() {
        // level 1, P = N: the structure map of 1 must vanish
        let bad = ParabolicSheaf::new(
            &naturals(),
            1,
            Field::Rational,
            vec![1],
            vec![vec![Matrix::identity(1)]],
        );
        assert!(matches!(bad, Err(Error::InvalidSheaf(_))));
    }
}
