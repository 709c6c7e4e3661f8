use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::algebra::GradedAlgebra;
use crate::error::{Error, Result};
use crate::field::{format_rat, parse_rat, Field, Matrix, Quotient, Rat};
use crate::kummer::CosetLabel;
use crate::lattice::RationalVector;
use crate::monoid::{MonoidPresentation, MonoidSpec};

/// A finite-dimensional graded module over `A_n`: one space per label
/// (by dimension, with its standard basis) and, for every basis point
/// `x^u` of the algebra and every label `λ`, a matrix
/// `M_λ -> M_{λ + [u]}`.
#[derive(Debug, Clone)]
pub struct GradedModule {
    algebra: Arc<GradedAlgebra>,
    dims: Vec<usize>,
    action: Vec<Vec<Matrix>>,
}

impl PartialEq for GradedModule {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same_as(&other.algebra) && self.dims == other.dims && self.action == other.action
    }
}

/// Columns of `basis` are independent; returns `L` with `L * basis = I`.
pub(crate) fn left_inverse(basis: &Matrix, field: Field) -> Matrix {
    let k = basis.cols();
    if k == 0 {
        return Matrix::zeros(0, basis.rows());
    }
    let (_, rows) = basis.transpose().rref(field);
    let mut square = Matrix::zeros(k, k);
    for (i, &r) in rows.iter().enumerate() {
        for j in 0..k {
            square.set(i, j, basis.get(r, j).clone());
        }
    }
    let inv = square.inverse(field).expect("independent columns");
    let mut select = Matrix::zeros(k, basis.rows());
    for (i, &r) in rows.iter().enumerate() {
        select.set(i, r, Rat::from_integer(1.into()));
    }
    inv.mul(&select, field)
}

/// A direct sum of blocks `(key_a, key_b)` modulo relations, for one label.
#[derive(Debug, Clone)]
pub struct PresentedSpace {
    /// `(key_a, key_b, offset, size)`.
    pub blocks: Vec<(usize, usize, usize, usize)>,
    pub total: usize,
    pub quotient: Quotient,
    index: HashMap<(usize, usize), usize>,
}

impl PresentedSpace {
    fn new(blocks: Vec<(usize, usize, usize)>) -> (Self, Vec<Vec<Rat>>) {
        let mut out = Vec::new();
        let mut index = HashMap::new();
        let mut offset = 0;
        for (a, b, size) in blocks {
            index.insert((a, b), out.len());
            out.push((a, b, offset, size));
            offset += size;
        }
        (
            PresentedSpace {
                blocks: out,
                total: offset,
                quotient: Quotient::new(&Matrix::zeros(0, offset), offset, Field::Rational),
                index,
            },
            Vec::new(),
        )
    }

    pub fn block(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        self.index.get(&(a, b)).map(|&i| (self.blocks[i].2, self.blocks[i].3))
    }

    fn finish(&mut self, relations: Vec<Vec<Rat>>, field: Field) {
        let rel = Matrix::from_rows(relations, self.total).expect("relation length");
        self.quotient = Quotient::new(&rel, self.total, field);
    }
}

impl GradedModule {
    /// Build from all actions, validating the module axioms.
    pub fn new(algebra: Arc<GradedAlgebra>, dims: Vec<usize>, action: Vec<Vec<Matrix>>) -> Result<Self> {
        let m = GradedModule { algebra, dims, action };
        m.validate()?;
        Ok(m)
    }

    /// Build from the actions of the algebra generators only: the other
    /// actions are composed along the algebra's decompositions and the
    /// result is validated.
    pub fn from_generator_actions(
        algebra: Arc<GradedAlgebra>,
        dims: Vec<usize>,
        generator_actions: Vec<Vec<Matrix>>,
    ) -> Result<Self> {
        if dims.len() != algebra.label_count() {
            return Err(Error::InvalidModule(format!(
                "expected {} components, found {}",
                algebra.label_count(),
                dims.len()
            )));
        }
        if generator_actions.len() != algebra.generators().len()
            || generator_actions.iter().any(|g| g.len() != dims.len())
        {
            return Err(Error::InvalidModule("wrong number of generator matrices".into()));
        }
        for (g, mats) in generator_actions.iter().enumerate() {
            let gl = algebra.point_label(algebra.generators()[g]);
            for (l, a) in mats.iter().enumerate() {
                let t = algebra.label_add(l, gl);
                if a.rows() != dims[t] || a.cols() != dims[l] {
                    return Err(Error::InvalidModule(format!(
                        "generator {g} at label {l} has shape {}x{}, expected {}x{}",
                        a.rows(),
                        a.cols(),
                        dims[t],
                        dims[l]
                    )));
                }
            }
        }
        let field = algebra.field();
        let l_int = algebra.monoid().internal_functional();
        let mut order: Vec<usize> = (0..algebra.dim()).collect();
        order.sort_by_key(|&i| crate::lattice::dot(&l_int, algebra.point(i)));
        let mut action: Vec<Vec<Matrix>> = vec![Vec::new(); algebra.dim()];
        for &i in &order {
            action[i] = match algebra.decomposition(i) {
                None => dims.iter().map(|&d| Matrix::identity(d)).collect(),
                Some((prev, g)) => {
                    let pl = algebra.point_label(prev);
                    (0..dims.len())
                        .map(|l| {
                            let mid = algebra.label_add(l, pl);
                            generator_actions[g][mid].mul(&action[prev][l], field)
                        })
                        .collect()
                }
            };
        }
        GradedModule::new(algebra, dims, action)
    }

    /// Checks shapes, `x^0 = 1` and `x^w x^γ = x^{γ+w}` (or `0`) for all
    /// generators `w` and basis points `γ`; by induction on a
    /// decomposition this gives the full multiplication table.
    pub fn validate(&self) -> Result<()> {
        let a = &self.algebra;
        let field = a.field();
        if self.dims.len() != a.label_count() {
            return Err(Error::InvalidModule(format!(
                "expected {} components, found {}",
                a.label_count(),
                self.dims.len()
            )));
        }
        if self.action.len() != a.dim() {
            return Err(Error::InvalidModule("one action list per basis point required".into()));
        }
        for (u, mats) in self.action.iter().enumerate() {
            if mats.len() != self.dims.len() {
                return Err(Error::InvalidModule(format!("basis point {u}: wrong number of labels")));
            }
            let ul = a.point_label(u);
            for (l, m) in mats.iter().enumerate() {
                let t = a.label_add(l, ul);
                if m.rows() != self.dims[t] || m.cols() != self.dims[l] {
                    return Err(Error::InvalidModule(format!(
                        "action of basis point {u} at label {l} has the wrong shape"
                    )));
                }
            }
        }
        for l in 0..self.dims.len() {
            if self.action[a.zero_index()][l] != Matrix::identity(self.dims[l]) {
                return Err(Error::InvalidModule("x^0 must act as the identity".into()));
            }
        }
        for &w in a.generators() {
            for gamma in 0..a.dim() {
                let gl = a.point_label(gamma);
                let sum = a.multiply(gamma, w);
                for l in 0..self.dims.len() {
                    let mid = a.label_add(l, gl);
                    let lhs = self.action[w][mid].mul(&self.action[gamma][l], field);
                    let ok = match sum {
                        Some(s) => lhs == self.action[s][l],
                        None => lhs.is_zero(),
                    };
                    if !ok {
                        return Err(Error::InvalidModule(format!(
                            "x^w x^γ != x^(γ+w) for w = {w}, γ = {gamma}, label {l}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn field(&self) -> Field {
        self.algebra.field()
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

    /// `x^u : M_λ -> M_{λ+[u]}`.
    pub fn action(&self, u: usize, label: usize) -> &Matrix {
        &self.action[u][label]
    }

    /// Actions of the algebra generators, `[g][label]`.
    pub fn generator_actions(&self) -> Vec<Vec<Matrix>> {
        self.algebra
            .generators()
            .iter()
            .map(|&g| self.action[g].clone())
            .collect()
    }

    pub fn zero(algebra: &Arc<GradedAlgebra>) -> Self {
        let dims = vec![0; algebra.label_count()];
        let action = vec![vec![Matrix::zeros(0, 0); dims.len()]; algebra.dim()];
        GradedModule {
            algebra: algebra.clone(),
            dims,
            action,
        }
    }

    /// `R(λ)` with `R(λ)_μ = R_{λ+μ}`; component `μ` has the basis
    /// `Δ ∩ (λ + μ)` in the algebra's order.
    pub fn twist(algebra: &Arc<GradedAlgebra>, lambda: usize) -> Self {
        let a = algebra;
        let field = a.field();
        let count = a.label_count();
        let comp = |mu: usize| a.basis_in_label(a.label_add(lambda, mu));
        let dims: Vec<usize> = (0..count).map(|mu| comp(mu).len()).collect();
        let action = (0..a.dim())
            .map(|u| {
                let ul = a.point_label(u);
                (0..count)
                    .map(|mu| {
                        let src = comp(mu);
                        let dst = comp(a.label_add(mu, ul));
                        let mut m = Matrix::zeros(dst.len(), src.len());
                        for (j, &delta) in src.iter().enumerate() {
                            if let Some(s) = a.multiply(u, delta) {
                                let i = dst.iter().position(|&x| x == s).expect("grading");
                                m.set(i, j, field.one());
                            }
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        GradedModule {
            algebra: algebra.clone(),
            dims,
            action,
        }
    }

    /// `⊕_j R(λ_j)`.
    pub fn free(algebra: &Arc<GradedAlgebra>, twists: &[usize]) -> Result<Self> {
        let parts: Vec<GradedModule> = twists.iter().map(|&l| GradedModule::twist(algebra, l)).collect();
        let refs: Vec<&GradedModule> = parts.iter().collect();
        GradedModule::direct_sum(algebra, &refs)
    }

    /// `k^dim` placed in degree `label`, with every `x^u`, `u != 0`, acting
    /// by zero.
    pub fn simple(algebra: &Arc<GradedAlgebra>, label: usize, dim: usize) -> Self {
        let mut dims = vec![0; algebra.label_count()];
        dims[label] = dim;
        let action = (0..algebra.dim())
            .map(|u| {
                let ul = algebra.point_label(u);
                (0..dims.len())
                    .map(|l| {
                        let t = algebra.label_add(l, ul);
                        if u == algebra.zero_index() {
                            Matrix::identity(dims[l])
                        } else {
                            Matrix::zeros(dims[t], dims[l])
                        }
                    })
                    .collect()
            })
            .collect();
        GradedModule {
            algebra: algebra.clone(),
            dims,
            action,
        }
    }

    /// `k^dim` in degree `0` (the module `k = A / A⁺` to the power `dim`).
    pub fn trivial(algebra: &Arc<GradedAlgebra>, dim: usize) -> Self {
        GradedModule::simple(algebra, 0, dim)
    }

    pub fn direct_sum(algebra: &Arc<GradedAlgebra>, parts: &[&GradedModule]) -> Result<Self> {
        for p in parts {
            if !p.algebra.same_as(algebra) {
                return Err(Error::AlgebraMismatch);
            }
        }
        let count = algebra.label_count();
        let dims: Vec<usize> = (0..count).map(|l| parts.iter().map(|p| p.dims[l]).sum()).collect();
        let action = (0..algebra.dim())
            .map(|u| {
                let ul = algebra.point_label(u);
                (0..count)
                    .map(|l| {
                        let t = algebra.label_add(l, ul);
                        let mut m = Matrix::zeros(dims[t], dims[l]);
                        let (mut i0, mut j0) = (0, 0);
                        for p in parts {
                            m.set_block(i0, j0, &p.action[u][l]);
                            i0 += p.dims[t];
                            j0 += p.dims[l];
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        Ok(GradedModule {
            algebra: algebra.clone(),
            dims,
            action,
        })
    }

    /// The submodule spanned per label by the columns of `bases` (assumed
    /// stable under the action), with its inclusion.
    pub fn submodule(&self, bases: Vec<Matrix>) -> Result<GradedMap> {
        let a = &self.algebra;
        let field = a.field();
        let lefts: Vec<Matrix> = bases.iter().map(|b| left_inverse(b, field)).collect();
        let dims: Vec<usize> = bases.iter().map(Matrix::cols).collect();
        let action = (0..a.dim())
            .map(|u| {
                let ul = a.point_label(u);
                (0..dims.len())
                    .map(|l| {
                        let t = a.label_add(l, ul);
                        lefts[t].mul(&self.action[u][l].mul(&bases[l], field), field)
                    })
                    .collect()
            })
            .collect();
        let sub = GradedModule::new(a.clone(), dims, action)?;
        GradedMap::new(sub, self.clone(), bases)
    }

    /// The quotient by the submodule spanned per label by the columns of
    /// `spans`, with its projection.
    pub fn quotient(&self, spans: &[Matrix]) -> Result<GradedMap> {
        let a = &self.algebra;
        let field = a.field();
        let quots: Vec<Quotient> = spans
            .iter()
            .zip(&self.dims)
            .map(|(s, &d)| Quotient::new(&s.transpose(), d, field))
            .collect();
        let dims: Vec<usize> = quots.iter().map(Quotient::dim).collect();
        let action = (0..a.dim())
            .map(|u| {
                let ul = a.point_label(u);
                (0..dims.len())
                    .map(|l| {
                        let t = a.label_add(l, ul);
                        quots[t]
                            .projection
                            .mul(&self.action[u][l].mul(&quots[l].section, field), field)
                    })
                    .collect()
            })
            .collect();
        let q = GradedModule::new(a.clone(), dims, action)?;
        let blocks = quots.into_iter().map(|q| q.projection).collect();
        GradedMap::new(self.clone(), q, blocks)
    }

    /// Components whose label comes from level `m`, as a module over `A_m`.
    pub fn degree_zero_part(&self, m: u64) -> Result<GradedModule> {
        let a = &self.algebra;
        let n = a.level();
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotADivisor(m, n));
        }
        if m == n {
            return Ok(self.clone());
        }
        let am = GradedAlgebra::new(a.monoid(), m, a.field())?;
        let lift = |mu: usize| am.label(mu).lift(n).expect("m | n").index();
        let dims: Vec<usize> = (0..am.label_count()).map(|mu| self.dims[lift(mu)]).collect();
        let k = (n / m) as i64;
        let action = (0..am.dim())
            .map(|w| {
                let y: Vec<i64> = am.point(w).iter().map(|v| v * k).collect();
                let wn = a.index_of(&y).expect("Δ ∩ 1/m P ⊆ Δ ∩ 1/n P");
                (0..am.label_count())
                    .map(|mu| self.action[wn][lift(mu)].clone())
                    .collect()
            })
            .collect();
        GradedModule::new(am, dims, action)
    }

    /// `M ⊗_A N` together with its presentation per label.
    pub fn tensor_presented(&self, other: &GradedModule) -> Result<(GradedModule, Vec<PresentedSpace>)> {
        if !self.algebra.same_as(&other.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        let a = &self.algebra;
        let field = a.field();
        let count = a.label_count();
        let mut spaces: Vec<PresentedSpace> = Vec::with_capacity(count);
        let mut relations: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(count);
        for nu in 0..count {
            let blocks = (0..count)
                .filter_map(|lam| {
                    let mu = a.label_sub(nu, lam);
                    let size = self.dims[lam] * other.dims[mu];
                    (size > 0).then_some((lam, mu, size))
                })
                .collect();
            let (space, rel) = PresentedSpace::new(blocks);
            spaces.push(space);
            relations.push(rel);
        }
        // x^w m ⊗ n - m ⊗ x^w n for generators w
        for &w in a.generators() {
            let wl = a.point_label(w);
            for lam in 0..count {
                for mu in 0..count {
                    let size = self.dims[lam] * other.dims[mu];
                    if size == 0 {
                        continue;
                    }
                    let nu = a.label_add(a.label_add(lam, mu), wl);
                    let left = self.action[w][lam].kron(&Matrix::identity(other.dims[mu]), field);
                    let right = Matrix::identity(self.dims[lam]).kron(&other.action[w][mu], field);
                    let space = &spaces[nu];
                    let mut rel = Matrix::zeros(space.total, size);
                    if let Some((off, _)) = space.block(a.label_add(lam, wl), mu) {
                        rel.set_block(off, 0, &left);
                    }
                    if let Some((off, _)) = space.block(lam, a.label_add(mu, wl)) {
                        let cur = rel.block(off, 0, right.rows(), size);
                        rel.set_block(off, 0, &cur.sub(&right, field));
                    }
                    relations[nu].extend(rel.transpose().to_rows());
                }
            }
        }
        for (space, rel) in spaces.iter_mut().zip(relations) {
            space.finish(rel, field);
        }
        let dims: Vec<usize> = spaces.iter().map(|s| s.quotient.dim()).collect();
        let action = (0..a.dim())
            .map(|u| {
                let ul = a.point_label(u);
                (0..count)
                    .map(|nu| {
                        let t = a.label_add(nu, ul);
                        let (src, dst) = (&spaces[nu], &spaces[t]);
                        let mut pre = Matrix::zeros(dst.total, src.total);
                        for &(lam, mu, off, _) in &src.blocks {
                            if let Some((doff, _)) = dst.block(a.label_add(lam, ul), mu) {
                                let b = self.action[u][lam].kron(&Matrix::identity(other.dims[mu]), field);
                                pre.set_block(doff, off, &b);
                            }
                        }
                        dst.quotient
                            .projection
                            .mul(&pre.mul(&src.quotient.section, field), field)
                    })
                    .collect()
            })
            .collect();
        Ok((GradedModule::new(a.clone(), dims, action)?, spaces))
    }

    pub fn tensor(&self, other: &GradedModule) -> Result<GradedModule> {
        Ok(self.tensor_presented(other)?.0)
    }

    /// `A_n ⊗_{A_m} M` for a module `M` over `A_m`, `m | n`, together with
    /// its presentation: summands `(c, λ)` for basis points `c` of `A_n`
    /// and labels `λ` of `M`, each a copy of `M_λ`.
    pub fn base_change_presented(&self, n: u64) -> Result<(GradedModule, Vec<PresentedSpace>)> {
        let am = &self.algebra;
        let m = am.level();
        if n == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotAMultiple(m, n));
        }
        let an = GradedAlgebra::new(am.monoid(), n, am.field())?;
        let field = an.field();
        let k = (n / m) as i64;
        let lift = |lam: usize| am.label(lam).lift(n).expect("m | n").index();
        let count = an.label_count();
        let mut blocks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); count];
        for c in 0..an.dim() {
            for lam in 0..am.label_count() {
                if self.dims[lam] > 0 {
                    let nu = an.label_add(an.point_label(c), lift(lam));
                    blocks[nu].push((c, lam, self.dims[lam]));
                }
            }
        }
        let mut spaces = Vec::with_capacity(count);
        let mut relations: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(count);
        for b in blocks {
            let (space, rel) = PresentedSpace::new(b);
            spaces.push(space);
            relations.push(rel);
        }
        // x^c ⊗ x^w x = x^{c+w} ⊗ x   (the right side is 0 when c + w ∉ Δ)
        for &w in am.generators() {
            let y: Vec<i64> = am.point(w).iter().map(|v| v * k).collect();
            let wn = an.index_of(&y).expect("generator stays in Δ");
            let wl_m = am.point_label(w);
            for c in 0..an.dim() {
                for lam in 0..am.label_count() {
                    let size = self.dims[lam];
                    if size == 0 {
                        continue;
                    }
                    let nu = an.label_add(an.label_add(an.point_label(c), lift(lam)), an.point_label(wn));
                    let space = &spaces[nu];
                    let mut rel = Matrix::zeros(space.total, size);
                    let lam_w = am.label_add(lam, wl_m);
                    if let Some((off, _)) = space.block(c, lam_w) {
                        rel.set_block(off, 0, &self.action[w][lam]);
                    }
                    if let Some(cw) = an.multiply(c, wn) {
                        let (off, _) = space.block(cw, lam).expect("summand present");
                        let cur = rel.block(off, 0, size, size);
                        rel.set_block(off, 0, &cur.sub(&Matrix::identity(size), field));
                    }
                    relations[nu].extend(rel.transpose().to_rows());
                }
            }
        }
        for (space, rel) in spaces.iter_mut().zip(relations) {
            space.finish(rel, field);
        }
        let dims: Vec<usize> = spaces.iter().map(|s| s.quotient.dim()).collect();
        let action = (0..an.dim())
            .map(|u| {
                let ul = an.point_label(u);
                (0..count)
                    .map(|nu| {
                        let t = an.label_add(nu, ul);
                        let (src, dst) = (&spaces[nu], &spaces[t]);
                        let mut pre = Matrix::zeros(dst.total, src.total);
                        for &(c, lam, off, size) in &src.blocks {
                            if let Some(cu) = an.multiply(c, u) {
                                let (doff, _) = dst.block(cu, lam).expect("summand present");
                                pre.set_block(doff, off, &Matrix::identity(size));
                            }
                        }
                        dst.quotient
                            .projection
                            .mul(&pre.mul(&src.quotient.section, field), field)
                    })
                    .collect()
            })
            .collect();
        Ok((GradedModule::new(an, dims, action)?, spaces))
    }

    pub fn base_change(&self, n: u64) -> Result<GradedModule> {
        Ok(self.base_change_presented(n)?.0)
    }

    /// The unit `M -> (A_n ⊗_{A_m} M)_{deg 0}`, `x ↦ 1 ⊗ x`, as a map of
    /// `A_m`-modules.
    pub fn base_change_unit(&self, n: u64) -> Result<GradedMap> {
        let (bc, spaces) = self.base_change_presented(n)?;
        let am = &self.algebra;
        let back = bc.degree_zero_part(am.level())?;
        let zero = bc.algebra.zero_index();
        let field = am.field();
        let blocks = (0..am.label_count())
            .map(|lam| {
                let nu = am.label(lam).lift(n).expect("m | n").index();
                let space = &spaces[nu];
                let size = self.dims[lam];
                let mut inc = Matrix::zeros(space.total, size);
                if let Some((off, _)) = space.block(zero, lam) {
                    inc.set_block(off, 0, &Matrix::identity(size));
                }
                space.quotient.projection.mul(&inc, field)
            })
            .collect();
        GradedMap::new(self.clone(), back, blocks)
    }
}

/// A degree-preserving module map, one matrix per label.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMap {
    source: GradedModule,
    target: GradedModule,
    blocks: Vec<Matrix>,
}

impl GradedMap {
    pub fn new(source: GradedModule, target: GradedModule, blocks: Vec<Matrix>) -> Result<Self> {
        if !source.algebra.same_as(&target.algebra) {
            return Err(Error::AlgebraMismatch);
        }
        if blocks.len() != source.dims.len() {
            return Err(Error::InvalidMap("one block per label required".into()));
        }
        for (l, b) in blocks.iter().enumerate() {
            if b.rows() != target.dims[l] || b.cols() != source.dims[l] {
                return Err(Error::InvalidMap(format!("block {l} has the wrong shape")));
            }
        }
        let a = &source.algebra;
        let field = a.field();
        for &w in a.generators() {
            let wl = a.point_label(w);
            for l in 0..blocks.len() {
                let t = a.label_add(l, wl);
                let lhs = target.action[w][l].mul(&blocks[l], field);
                let rhs = blocks[t].mul(&source.action[w][l], field);
                if lhs != rhs {
                    return Err(Error::InvalidMap(format!(
                        "does not commute with generator {w} at label {l}"
                    )));
                }
            }
        }
        Ok(GradedMap { source, target, blocks })
    }

    pub fn identity(m: &GradedModule) -> Self {
        GradedMap {
            source: m.clone(),
            target: m.clone(),
            blocks: m.dims.iter().map(|&d| Matrix::identity(d)).collect(),
        }
    }

    pub fn zero(source: &GradedModule, target: &GradedModule) -> Result<Self> {
        let blocks = source
            .dims
            .iter()
            .zip(&target.dims)
            .map(|(&s, &t)| Matrix::zeros(t, s))
            .collect();
        GradedMap::new(source.clone(), target.clone(), blocks)
    }

    /// The map `⊕_j R(λ_j) -> target` sending the generator of the `j`-th
    /// summand to `images[j] ∈ target_{-λ_j}`.
    pub fn from_free(twists: &[usize], target: &GradedModule, images: &[Vec<Rat>]) -> Result<Self> {
        let a = target.algebra.clone();
        let field = a.field();
        let source = GradedModule::free(&a, twists)?;
        let count = a.label_count();
        let mut blocks = Vec::with_capacity(count);
        for mu in 0..count {
            let mut cols: Vec<Vec<Rat>> = Vec::new();
            for (j, &lam) in twists.iter().enumerate() {
                let home = a.label_neg(lam);
                if images[j].len() != target.dims[home] {
                    return Err(Error::InvalidMap(format!("image {j} lies in the wrong component")));
                }
                for &delta in a.basis_in_label(a.label_add(lam, mu)) {
                    cols.push(target.action[delta][home].apply(&images[j], field));
                }
            }
            blocks.push(Matrix::from_columns(&cols, target.dims[mu]));
        }
        GradedMap::new(source, target.clone(), blocks)
    }

    pub fn source(&self) -> &GradedModule {
        &self.source
    }

    pub fn target(&self) -> &GradedModule {
        &self.target
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn block(&self, label: usize) -> &Matrix {
        &self.blocks[label]
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &GradedMap) -> Result<GradedMap> {
        if self.target != g.source {
            return Err(Error::InvalidMap("composable maps must share a module".into()));
        }
        let field = self.source.field();
        let blocks = g
            .blocks
            .iter()
            .zip(&self.blocks)
            .map(|(b, a)| b.mul(a, field))
            .collect();
        Ok(GradedMap {
            source: self.source.clone(),
            target: g.target.clone(),
            blocks,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    pub fn is_injective(&self) -> bool {
        let field = self.source.field();
        self.blocks.iter().all(|b| b.rank(field) == b.cols())
    }

    pub fn is_surjective(&self) -> bool {
        let field = self.source.field();
        self.blocks.iter().all(|b| b.rank(field) == b.rows())
    }

    pub fn is_isomorphism(&self) -> bool {
        let field = self.source.field();
        self.blocks.iter().all(|b| b.is_invertible(field))
    }

    /// Inclusion of the kernel.
    pub fn kernel(&self) -> Result<GradedMap> {
        let field = self.source.field();
        self.source
            .submodule(self.blocks.iter().map(|b| b.nullspace(field)).collect())
    }

    /// Projection onto the cokernel.
    pub fn cokernel(&self) -> Result<GradedMap> {
        self.target.quotient(&self.blocks)
    }

    /// Inclusion of the image.
    pub fn image(&self) -> Result<GradedMap> {
        let field = self.source.field();
        self.target
            .submodule(self.blocks.iter().map(|b| b.column_space(field)).collect())
    }

    /// Restriction to the components coming from level `m`.
    pub fn degree_zero_part(&self, m: u64) -> Result<GradedMap> {
        let a = &self.source.algebra;
        let n = a.level();
        let source = self.source.degree_zero_part(m)?;
        let target = self.target.degree_zero_part(m)?;
        let am = source.algebra.clone();
        let blocks = (0..am.label_count())
            .map(|mu| self.blocks[am.label(mu).lift(n).expect("m | n").index()].clone())
            .collect();
        GradedMap::new(source, target, blocks)
    }
}

fn exact_at_every_label(f: &GradedMap, g: &GradedMap, field: Field) -> bool {
    f.blocks.iter().zip(&g.blocks).all(|(fb, gb)| {
        gb.mul(fb, field).is_zero()
            && fb.rank(field) == fb.cols()
            && gb.rank(field) == gb.rows()
            && fb.rank(field) + gb.rank(field) == fb.rows()
    })
}

/// For a short exact sequence `0 -> A -f-> B -g-> C -> 0` of modules over
/// `A_n`, check that taking the components from level `m` keeps it exact.
pub fn check_exactness(f: &GradedMap, g: &GradedMap, m: u64) -> Result<bool> {
    if f.target != g.source {
        return Err(Error::NotExactInput("maps are not composable".into()));
    }
    let field = f.source.field();
    if !exact_at_every_label(f, g, field) {
        return Err(Error::NotExactInput("sequence is not exact at some label".into()));
    }
    let (f0, g0) = (f.degree_zero_part(m)?, g.degree_zero_part(m)?);
    Ok(exact_at_every_label(&f0, &g0, field))
}

/// Projection formula: for `M₀` over `A_m` and `N` over `A_n` (`m | n`),
/// the natural map `M₀ ⊗ N_{deg 0} -> ((A_n ⊗ M₀) ⊗ N)_{deg 0}`,
/// `x ⊗ y ↦ (1 ⊗ x) ⊗ y`, is an isomorphism of `A_m`-modules.
pub fn projection_formula_check(m0: &GradedModule, n_mod: &GradedModule) -> Result<bool> {
    let (am, an) = (m0.algebra.clone(), n_mod.algebra.clone());
    if am.field() != an.field() || am.monoid().to_spec() != an.monoid().to_spec() {
        return Err(Error::AlgebraMismatch);
    }
    let (m, n) = (am.level(), an.level());
    if n % m != 0 {
        return Err(Error::NotADivisor(m, n));
    }
    let field = am.field();
    let n_g = n_mod.degree_zero_part(m)?;
    let (lhs, lhs_spaces) = m0.tensor_presented(&n_g)?;
    let (bc, bc_spaces) = m0.base_change_presented(n)?;
    let (rhs_full, rhs_spaces) = bc.tensor_presented(n_mod)?;
    let rhs = rhs_full.degree_zero_part(m)?;
    let lift = |l: usize| am.label(l).lift(n).expect("m | n").index();
    let zero = an.zero_index();
    let mut blocks = Vec::with_capacity(am.label_count());
    for nu in 0..am.label_count() {
        let nu_n = lift(nu);
        let (src, dst) = (&lhs_spaces[nu], &rhs_spaces[nu_n]);
        let mut pre = Matrix::zeros(dst.total, src.total);
        for &(lam, mu, off, _) in &src.blocks {
            // x ↦ 1 ⊗ x  into the base change at label lift(λ)
            let lam_n = lift(lam);
            let bc_space = &bc_spaces[lam_n];
            let size = m0.dims[lam];
            let mut inc = Matrix::zeros(bc_space.total, size);
            if let Some((boff, _)) = bc_space.block(zero, lam) {
                inc.set_block(boff, 0, &Matrix::identity(size));
            }
            let unit = bc_space.quotient.projection.mul(&inc, field);
            let mu_n = lift(mu);
            if let Some((doff, _)) = dst.block(lam_n, mu_n) {
                let b = unit.kron(&Matrix::identity(n_mod.dims[mu_n]), field);
                pre.set_block(doff, off, &b);
            }
        }
        blocks.push(
            dst.quotient
                .projection
                .mul(&pre.mul(&src.quotient.section, field), field),
        );
    }
    let phi = GradedMap::new(lhs, rhs, blocks)?;
    Ok(phi.is_isomorphism())
}

/// Unit check: `M₀ -> (A_n ⊗_{A_m} M₀)_{deg 0}` is an isomorphism.
pub fn unit_check(m0: &GradedModule, n: u64) -> Result<bool> {
    Ok(m0.base_change_unit(n)?.is_isomorphism())
}

/// Label index of a coset label in an algebra.
pub fn label_index(algebra: &GradedAlgebra, label: &CosetLabel) -> Result<usize> {
    if label.level() != algebra.level() {
        return Err(Error::LevelMismatch(label.level(), algebra.level()));
    }
    Ok(label.index())
}

/// JSON form of a graded module: components keyed by the canonical
/// representative of their label, generator actions keyed by
/// `"<rep>|<u>"` with `u` an algebra generator. Missing components have
/// dimension 0, missing actions are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedModuleSpec {
    pub monoid: MonoidSpec,
    pub level: u64,
    /// `"Q"` or `"Fp:<p>"`; `Q` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub components: BTreeMap<String, usize>,
    #[serde(default)]
    pub actions: BTreeMap<String, Vec<Vec<String>>>,
}

impl GradedModule {
    pub fn to_spec(&self) -> GradedModuleSpec {
        let a = &self.algebra;
        let p = a.monoid();
        let rep = |l: usize| a.label(l).representative(p).to_string();
        let mut components = BTreeMap::new();
        let mut actions = BTreeMap::new();
        for l in 0..self.dims.len() {
            if self.dims[l] == 0 {
                continue;
            }
            components.insert(rep(l), self.dims[l]);
            for &g in a.generators() {
                let m = &self.action[g][l];
                if !m.is_zero() {
                    let rows = m
                        .to_rows()
                        .iter()
                        .map(|row| row.iter().map(format_rat).collect())
                        .collect();
                    actions.insert(format!("{}|{}", rep(l), a.point_rational(g)), rows);
                }
            }
        }
        GradedModuleSpec {
            monoid: p.to_spec(),
            level: a.level(),
            field: Some(a.field().to_string()),
            components,
            actions,
        }
    }

    pub fn from_spec(spec: &GradedModuleSpec) -> Result<Self> {
        let p = MonoidPresentation::from_spec(&spec.monoid)?;
        let field: Field = spec.field.as_deref().unwrap_or("Q").parse()?;
        let a = GradedAlgebra::new(&p, spec.level, field)?;
        let find = |key: &str| -> Result<usize> {
            let v = RationalVector::parse(key)?;
            let label = CosetLabel::of(&p, a.level(), &v)?;
            if label.representative(&p) != v {
                return Err(Error::Parse(format!("{key} is not a canonical representative")));
            }
            Ok(label.index())
        };
        let mut dims = vec![0; a.label_count()];
        for (k, &d) in &spec.components {
            dims[find(k)?] = d;
        }
        let mut gens: Vec<Vec<Matrix>> = a
            .generators()
            .iter()
            .map(|&g| {
                (0..dims.len())
                    .map(|l| Matrix::zeros(dims[a.label_add(l, a.point_label(g))], dims[l]))
                    .collect()
            })
            .collect();
        for (key, rows) in &spec.actions {
            let (rep, u) = key
                .split_once('|')
                .ok_or_else(|| Error::Parse(format!("action key {key:?} must be \"<rep>|<u>\"")))?;
            let l = find(rep.trim())?;
            let u = RationalVector::parse(u.trim())?;
            let g = a
                .generators()
                .iter()
                .position(|&g| a.point_rational(g) == u)
                .ok_or_else(|| Error::Parse(format!("{u} is not a generator of the algebra")))?;
            let (r, c) = (gens[g][l].rows(), gens[g][l].cols());
            let parsed: Vec<Vec<Rat>> = rows
                .iter()
                .map(|row| row.iter().map(|s| parse_rat(s).map(|q| field.normalize(q))).collect())
                .collect::<Result<_>>()?;
            if parsed.len() != r || parsed.iter().any(|row| row.len() != c) {
                return Err(Error::InvalidModule(format!("action {key} must be {r}x{c}")));
            }
            gens[g][l] = Matrix::from_rows(parsed, c)?;
        }
        GradedModule::from_generator_actions(a, dims, gens)
    }
}
