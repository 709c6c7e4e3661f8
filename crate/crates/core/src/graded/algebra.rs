use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::infquot::{delta_points, DeltaSet};
use crate::kummer::CosetLabel;
use crate::lattice::RationalVector;
use crate::monoid::MonoidPresentation;

/// `A_n = k[1/n P] / (P⁺)` with basis `Δ_P ∩ 1/n P` and
/// `x^γ x^δ = x^{γ+δ}` when `γ + δ ∈ Δ_P`, else `0`.
#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    monoid: MonoidPresentation,
    level: u64,
    field: Field,
    delta: DeltaSet,
    label_count: usize,
    point_labels: Vec<usize>,
    by_label: Vec<Vec<usize>>,
    zero: usize,
    generators: Vec<usize>,
    decomposition: Vec<Option<(usize, usize)>>,
}

impl GradedAlgebra {
    pub fn new(monoid: &MonoidPresentation, level: u64, field: Field) -> Result<Arc<Self>> {
        if level == 0 {
            return Err(Error::Parse("level must be positive".into()));
        }
        let delta = delta_points(monoid, level)?;
        let rank = monoid.group_rank();
        let label_count = (level as usize).pow(rank as u32);
        let point_labels: Vec<usize> = (0..delta.len()).map(|i| delta.label(i).index()).collect();
        let mut by_label = vec![Vec::new(); label_count];
        for (i, &l) in point_labels.iter().enumerate() {
            by_label[l].push(i);
        }
        let zero = delta.index_of(&vec![0; rank]).expect("0 always lies in Δ");
        // the points v_i / n that lie in Δ generate the algebra
        let generators: Vec<usize> = monoid
            .internal_hilbert_basis()
            .iter()
            .filter_map(|v| delta.index_of(v))
            .collect();
        let mut decomposition = vec![None; delta.len()];
        for (i, y) in delta.internal_points().iter().enumerate() {
            if i == zero {
                continue;
            }
            for (g, &gi) in generators.iter().enumerate() {
                let v = &delta.internal_points()[gi];
                let prev: Vec<i64> = y.iter().zip(v).map(|(a, b)| a - b).collect();
                if let Some(j) = delta.index_of(&prev) {
                    decomposition[i] = Some((j, g));
                    break;
                }
            }
            debug_assert!(decomposition[i].is_some());
        }
        Ok(Arc::new(GradedAlgebra {
            monoid: monoid.clone(),
            level,
            field,
            delta,
            label_count,
            point_labels,
            by_label,
            zero,
            generators,
            decomposition,
        }))
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

    pub fn delta(&self) -> &DeltaSet {
        &self.delta
    }

    /// Same monoid, level and field.
    pub fn same_as(&self, other: &GradedAlgebra) -> bool {
        self.level == other.level && self.field == other.field && self.monoid.to_spec() == other.monoid.to_spec()
    }

    pub fn dim(&self) -> usize {
        self.delta.len()
    }

    /// Numerator (internal coordinates) of the `i`-th basis point.
    pub fn point(&self, i: usize) -> &[i64] {
        &self.delta.internal_points()[i]
    }

    pub fn point_rational(&self, i: usize) -> RationalVector {
        self.delta.point(i)
    }

    pub fn index_of(&self, y: &[i64]) -> Option<usize> {
        self.delta.index_of(y)
    }

    pub fn zero_index(&self) -> usize {
        self.zero
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }

    pub fn rank(&self) -> usize {
        self.monoid.group_rank()
    }

    pub fn label(&self, index: usize) -> CosetLabel {
        CosetLabel::from_index(self.level, self.rank(), index)
    }

    /// Label index of the `i`-th basis point.
    pub fn point_label(&self, i: usize) -> usize {
        self.point_labels[i]
    }

    /// Basis points in the class with label index `l`.
    pub fn basis_in_label(&self, l: usize) -> &[usize] {
        &self.by_label[l]
    }

    pub fn label_add(&self, a: usize, b: usize) -> usize {
        self.label(a).add(&self.label(b)).index()
    }

    pub fn label_neg(&self, a: usize) -> usize {
        self.label(a).neg().index()
    }

    pub fn label_sub(&self, a: usize, b: usize) -> usize {
        self.label_add(a, self.label_neg(b))
    }

    /// Basis indices of the algebra generators `v_i / n` (those in `Δ`).
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// For a nonzero basis point `i`: `(j, g)` with
    /// `point(i) = point(j) + point(generators[g])`.
    pub fn decomposition(&self, i: usize) -> Option<(usize, usize)> {
        self.decomposition[i]
    }

    /// `x^{γ_i} x^{γ_j}` as a basis index, or `None` for zero.
    pub fn multiply(&self, i: usize, j: usize) -> Option<usize> {
        let sum: Vec<i64> = self.point(i).iter().zip(self.point(j)).map(|(a, b)| a + b).collect();
        self.delta.index_of(&sum)
    }

    /// Exhaustive check of associativity, commutativity, unit and grading.
    pub fn check_axioms(&self) -> bool {
        let d = self.dim();
        for i in 0..d {
            if self.multiply(self.zero, i) != Some(i) {
                return false;
            }
            for j in 0..d {
                let ij = self.multiply(i, j);
                if ij != self.multiply(j, i) {
                    return false;
                }
                if let Some(ij) = ij {
                    if self.point_label(ij) != self.label_add(self.point_label(i), self.point_label(j)) {
                        return false;
                    }
                }
                for k in 0..d {
                    let left = ij.and_then(|ij| self.multiply(ij, k));
                    let right = self.multiply(j, k).and_then(|jk| self.multiply(i, jk));
                    if left != right {
                        return false;
                    }
                }
            }
        }
        true
    }
}
