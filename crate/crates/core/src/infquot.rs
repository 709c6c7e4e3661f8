//! The sets `Δ_P = P_Q ∖ (P⁺ + P_Q)` and `Δ_P⁰`, truncated profinite
//! families of cosets, and the infinite-quotient decision procedure.
//!
//! Points at level `n` are handled as numerators `y ∈ Z^r` in internal
//! coordinates, standing for `y / n`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{format_rat, Rat};
use crate::kummer::CosetLabel;
use crate::lattice::{dot, enumerate_scaled, RationalVector};
use crate::monoid::{MonoidElement, MonoidPresentation};

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Strictly positive functional on `P_Q ∖ {0}` (sum of the facets).
pub fn positive_functional(p: &MonoidPresentation) -> Vec<i64> {
    p.positive_functional()
}

/// Is `y / n` (internal coordinates) in `Δ_P`?
pub fn in_delta(p: &MonoidPresentation, hb: &[Vec<i64>], n: u64, y: &[i64]) -> bool {
    let cone = p.internal_cone();
    if !cone.contains_int(y) {
        return false;
    }
    let n = n as i64;
    hb.iter().all(|v| {
        let rest: Vec<i64> = y.iter().zip(v).map(|(a, b)| a - n * b).collect();
        !cone.contains_int(&rest)
    })
}

/// `Δ_P ∩ 1/n P`, with the `Δ_P⁰` flags.
#[derive(Debug, Clone)]
pub struct DeltaSet {
    monoid: MonoidPresentation,
    level: u64,
    points: Vec<Vec<i64>>,
    in_delta0: Vec<bool>,
    classes: HashMap<CosetLabel, Vec<usize>>,
}

impl DeltaSet {
    pub fn monoid(&self) -> &MonoidPresentation {
        &self.monoid
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Numerators in internal coordinates, lexicographically sorted.
    pub fn internal_points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient rational point of the `i`-th element.
    pub fn point(&self, i: usize) -> RationalVector {
        let scale = self.level as i64 * self.monoid.scale() as i64;
        RationalVector::from_scaled(&self.monoid.to_ambient(&self.points[i]), scale)
    }

    pub fn points(&self) -> Vec<RationalVector> {
        (0..self.points.len()).map(|i| self.point(i)).collect()
    }

    pub fn in_delta0(&self, i: usize) -> bool {
        self.in_delta0[i]
    }

    pub fn index_of(&self, y: &[i64]) -> Option<usize> {
        self.points.binary_search_by(|p| p.as_slice().cmp(y)).ok()
    }

    pub fn contains(&self, y: &[i64]) -> bool {
        self.index_of(y).is_some()
    }

    pub fn label(&self, i: usize) -> CosetLabel {
        CosetLabel::from_internal(self.level, &self.points[i])
    }

    /// Indices of the points in the class `label`.
    pub fn class(&self, label: &CosetLabel) -> &[usize] {
        self.classes.get(label).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Indices of the `Δ_P⁰` points.
    pub fn delta0_indices(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| self.in_delta0[i]).collect()
    }

    pub fn delta0_points(&self) -> Vec<RationalVector> {
        self.delta0_indices().into_iter().map(|i| self.point(i)).collect()
    }
}

/// `Δ_P ∩ 1/n P`, enumerated inside `ℓ ≤ Σ_i ℓ(v_i)`.
pub fn delta_points(p: &MonoidPresentation, n: u64) -> Result<DeltaSet> {
    p.hilbert_basis()?;
    let hb_int = p.internal_hilbert_basis();
    let l = p.internal_functional();
    let bound = Rat::from_integer(p.hilbert_weight().into());
    let candidates = enumerate_scaled(p.internal_cone(), n, &l, &bound)?;
    let points: Vec<Vec<i64>> = candidates.into_iter().filter(|y| in_delta(p, &hb_int, n, y)).collect();
    let mut classes: HashMap<CosetLabel, Vec<usize>> = HashMap::new();
    for (i, y) in points.iter().enumerate() {
        classes.entry(CosetLabel::from_internal(n, y)).or_default().push(i);
    }
    let in_delta0 = points
        .iter()
        .map(|y| classes[&CosetLabel::from_internal(n, y)].len() == 1)
        .collect();
    Ok(DeltaSet {
        monoid: p.clone(),
        level: n,
        points,
        in_delta0,
        classes,
    })
}

/// The `Δ_P⁰` points of `Δ_P ∩ 1/n P`. A point congruent to `γ` modulo
/// `P^gp` has the same denominator, so the level-`n` set decides this.
pub fn delta0_points(p: &MonoidPresentation, n: u64) -> Result<Vec<RationalVector>> {
    Ok(delta_points(p, n)?.delta0_points())
}

/// A compatible family `{λ_n}` indexed by the divisors of `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedProfiniteElement {
    monoid: MonoidPresentation,
    level: u64,
    labels: BTreeMap<u64, CosetLabel>,
}

/// JSON form: `{ "level": N, "labels": { "n": ["p/q", ...] } }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub level: u64,
    pub labels: BTreeMap<String, RationalVector>,
}

impl TruncatedProfiniteElement {
    pub fn new(monoid: &MonoidPresentation, level: u64, labels: BTreeMap<u64, CosetLabel>) -> Result<Self> {
        if level == 0 {
            return Err(Error::Parse("level must be positive".into()));
        }
        for n in divisors(level) {
            let lambda = labels
                .get(&n)
                .ok_or_else(|| Error::IncompatibleFamily(format!("missing label for n = {n}")))?;
            if lambda.level() != n || lambda.residues().len() != monoid.group_rank() {
                return Err(Error::IncompatibleFamily(format!(
                    "label for n = {n} has the wrong level"
                )));
            }
        }
        if let Some(extra) = labels.keys().find(|n| !level.is_multiple_of(**n)) {
            return Err(Error::IncompatibleFamily(format!("{extra} does not divide {level}")));
        }
        if !labels[&1].is_zero() {
            return Err(Error::IncompatibleFamily("λ_1 must be 0".into()));
        }
        for n in divisors(level) {
            for m in divisors(n) {
                if labels[&n].multiply_down(m)? != labels[&m] {
                    return Err(Error::IncompatibleFamily(format!(
                        "(n/m) λ_n != λ_m for n = {n}, m = {m}"
                    )));
                }
            }
        }
        Ok(TruncatedProfiniteElement {
            monoid: monoid.clone(),
            level,
            labels,
        })
    }

    /// `{[p / n]}` for `p ∈ P^gp` (ambient integer coordinates).
    pub fn of_element(monoid: &MonoidPresentation, level: u64, p: &[i64]) -> Result<Self> {
        let y = monoid
            .to_internal(p)
            .ok_or_else(|| Error::NotInLattice(format!("{p:?}")))?;
        let labels = divisors(level)
            .into_iter()
            .map(|n| (n, CosetLabel::from_internal(n, &y)))
            .collect();
        TruncatedProfiniteElement::new(monoid, level, labels)
    }

    pub fn from_spec(monoid: &MonoidPresentation, spec: &FamilySpec) -> Result<Self> {
        let mut labels = BTreeMap::new();
        for (key, rep) in &spec.labels {
            let n: u64 = key
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad level key {key:?}")))?;
            if rep.dim() != monoid.ambient_rank() {
                return Err(Error::DimensionMismatch {
                    expected: monoid.ambient_rank(),
                    found: rep.dim(),
                });
            }
            labels.insert(n, CosetLabel::of(monoid, n, rep)?);
        }
        TruncatedProfiniteElement::new(monoid, spec.level, labels)
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec {
            level: self.level,
            labels: self
                .labels
                .iter()
                .map(|(n, l)| (n.to_string(), l.representative(&self.monoid)))
                .collect(),
        }
    }

    pub fn monoid(&self) -> &MonoidPresentation {
        &self.monoid
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn label(&self, n: u64) -> Option<&CosetLabel> {
        self.labels.get(&n)
    }

    pub fn labels(&self) -> &BTreeMap<u64, CosetLabel> {
        &self.labels
    }
}

/// Outcome of the infinite-quotient test at a finite truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfquotVerdict {
    /// The family is `{[p/n]}` for this `p ∈ P`.
    ConfirmedElement(MonoidElement),
    /// Every candidate characteristic integer `m₀ | N` is refuted; the
    /// witnesses are the pairs `(m₀, j)` with no admissible sequence.
    NotAnInfiniteQuotient { obstructions: Vec<(u64, u64)> },
    /// Neither verdict could be reached at level `N`.
    InconclusiveAtLevel(u64),
}

impl InfquotVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            InfquotVerdict::ConfirmedElement(_) => "ConfirmedElement",
            InfquotVerdict::NotAnInfiniteQuotient { .. } => "NotAnInfiniteQuotient",
            InfquotVerdict::InconclusiveAtLevel(_) => "InconclusiveAtLevel",
        }
    }
}

/// Is there a multiset `γ_1, …, γ_j` of points of `class` (numerators at
/// level `n`) whose sum lies in `Δ_P`? Partial sums of an admissible
/// sequence lie in `Δ_P` too (summands of a `Δ_P` point are in `Δ_P`), so
/// the search prunes as soon as a partial sum leaves it.
fn admissible_sequence_exists(p: &MonoidPresentation, hb: &[Vec<i64>], n: u64, class: &[Vec<i64>], j: u64) -> bool {
    fn go(
        p: &MonoidPresentation,
        hb: &[Vec<i64>],
        n: u64,
        class: &[Vec<i64>],
        start: usize,
        left: u64,
        sum: &[i64],
    ) -> bool {
        if left == 0 {
            return true;
        }
        for i in start..class.len() {
            let next: Vec<i64> = sum.iter().zip(&class[i]).map(|(a, b)| a + b).collect();
            if in_delta(p, hb, n, &next) && go(p, hb, n, class, i, left - 1, &next) {
                return true;
            }
        }
        false
    }
    let zero = vec![0; p.group_rank()];
    go(p, hb, n, class, 0, j, &zero)
}

/// Decide whether a truncated family is the image of an element of `P`.
///
/// Recognition tries the divisors `n` of `N` from the largest down: when
/// `λ_n` has a unique representative `γ` in `Δ_P ∩ 1/n P` (so `γ ∈ Δ_P⁰`),
/// `p = n γ` is tested against every `λ_m`. Refutation scans candidate
/// characteristic integers `m₀ | N` in increasing order and looks for a
/// `j ≤ depth` with `j m₀ | N` admitting no sequence in `λ_{j m₀} ∩ Δ_P`
/// summing into `Δ_P`.
pub fn is_infinite_quotient(x: &TruncatedProfiniteElement, depth: u64) -> Result<InfquotVerdict> {
    is_infinite_quotient_cached(x, depth, &mut DeltaCache::default())
}

/// Memoized `Δ_P ∩ 1/n P` sets, for deciding many families over the same
/// monoid.
#[derive(Debug, Default)]
pub struct DeltaCache {
    sets: HashMap<DeltaKey, Arc<DeltaSet>>,
}

/// Monoid generators, monoid scale and level.
type DeltaKey = (Vec<Vec<i64>>, u64, u64);

impl DeltaCache {
    pub fn get(&mut self, p: &MonoidPresentation, n: u64) -> Result<Arc<DeltaSet>> {
        let key = (p.generators().to_vec(), p.scale(), n);
        if let Some(d) = self.sets.get(&key) {
            return Ok(d.clone());
        }
        let d = Arc::new(delta_points(p, n)?);
        self.sets.insert(key, d.clone());
        Ok(d)
    }
}

/// [`is_infinite_quotient`] reusing previously enumerated `Δ` sets.
pub fn is_infinite_quotient_cached(
    x: &TruncatedProfiniteElement,
    depth: u64,
    cache: &mut DeltaCache,
) -> Result<InfquotVerdict> {
    let p = &x.monoid;
    let hb = p.internal_hilbert_basis();
    let big_n = x.level;
    let mut delta = |n: u64| cache.get(p, n);

    for &n in divisors(big_n).iter().rev() {
        let d = delta(n)?;
        let class = d.class(&x.labels[&n]);
        if class.len() != 1 {
            continue;
        }
        let y = &d.internal_points()[class[0]];
        let consistent = divisors(big_n)
            .into_iter()
            .all(|m| CosetLabel::from_internal(m, y) == x.labels[&m]);
        if consistent {
            let element = MonoidElement::new(p, p.to_ambient(y))?;
            return Ok(InfquotVerdict::ConfirmedElement(element));
        }
    }

    let mut obstructions = Vec::new();
    for m0 in divisors(big_n) {
        let mut refuted = None;
        for j in 1..=depth {
            let n = j * m0;
            if !big_n.is_multiple_of(n) {
                continue;
            }
            let d = delta(n)?;
            let class: Vec<Vec<i64>> = d
                .class(&x.labels[&n])
                .iter()
                .map(|&i| d.internal_points()[i].clone())
                .collect();
            if !admissible_sequence_exists(p, &hb, n, &class, j) {
                refuted = Some(j);
                break;
            }
        }
        match refuted {
            Some(j) => obstructions.push((m0, j)),
            None => return Ok(InfquotVerdict::InconclusiveAtLevel(big_n)),
        }
    }
    Ok(InfquotVerdict::NotAnInfiniteQuotient { obstructions })
}

/// `ℓ(y / n)` as an exact rational, for reporting.
pub fn functional_value(p: &MonoidPresentation, n: u64, y: &[i64]) -> String {
    format_rat(&Rat::new(dot(&p.internal_functional(), y).into(), (n as i64).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::tests::paper_monoid;

    fn keys(v: &[RationalVector]) -> Vec<String> {
        v.iter().map(RationalVector::key).collect()
    }

    fn nat() -> MonoidPresentation {
        MonoidPresentation::free(1).unwrap()
    }

    #[test]
    fn delta_of_naturals_and_plane() {
        assert_eq!(keys(&delta_points(&nat(), 3).unwrap().points()), ["0", "1/3", "2/3"]);
        let n2 = MonoidPresentation::free(2).unwrap();
        assert_eq!(
            keys(&delta_points(&n2, 2).unwrap().points()),
            ["0,0", "0,1/2", "1/2,0", "1/2,1/2"]
        );
        assert!(delta_points(&paper_monoid(), 1).unwrap().contains(&[0, 0, 0]));
    }

    #[test]
    fn delta0_examples() {
        for n in 1..=5 {
            assert_eq!(delta0_points(&nat(), n).unwrap().len(), n as usize);
        }
        let p = paper_monoid();
        let d = delta_points(&p, 2).unwrap();
        assert!(d.in_delta0(d.index_of(&[0, 0, 0]).unwrap()));
        let excluded = (0..d.len()).filter(|&i| !d.in_delta0(i)).count();
        assert!(excluded > 0);
        // every excluded point shares its class with another Δ point
        for i in (0..d.len()).filter(|&i| !d.in_delta0(i)) {
            let class = d.class(&d.label(i));
            assert!(class.len() >= 2 && class.contains(&i));
        }
    }

    #[test]
    fn functional_examples() {
        assert_eq!(positive_functional(&nat()), vec![1]);
        assert_eq!(positive_functional(&MonoidPresentation::free(2).unwrap()), vec![1, 1]);
        let p = paper_monoid();
        let l = positive_functional(&p);
        assert_eq!(l, vec![2, 2, 2]);
        for g in p.generators() {
            assert!(dot(&l, g) > 0);
        }
    }

    #[test]
    fn recognizes_generator_and_zero() {
        let p = paper_monoid();
        let x = TruncatedProfiniteElement::of_element(&p, 4, &[1, 0, 0]).unwrap();
        match is_infinite_quotient(&x, 4).unwrap() {
            InfquotVerdict::ConfirmedElement(e) => assert_eq!(e.vector(), &[1, 0, 0]),
            v => panic!("unexpected {v:?}"),
        }
        let zero = TruncatedProfiniteElement::of_element(&p, 4, &[0, 0, 0]).unwrap();
        match is_infinite_quotient(&zero, 4).unwrap() {
            InfquotVerdict::ConfirmedElement(e) => assert_eq!(e.vector(), &[0, 0, 0]),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn half_and_three_quarters_is_the_image_of_three() {
        // λ_2 = [1/2], λ_4 = [3/4] is the truncation of p = 3: 3/2 ≡ 1/2 and 3/4 ≡ 3/4
        let n1 = nat();
        let spec: FamilySpec =
            serde_json::from_str(r#"{"level":4,"labels":{"1":["0"],"2":["1/2"],"4":["3/4"]}}"#).unwrap();
        let x = TruncatedProfiniteElement::from_spec(&n1, &spec).unwrap();
        assert_eq!(x, TruncatedProfiniteElement::of_element(&n1, 4, &[3]).unwrap());
        match is_infinite_quotient(&x, 4).unwrap() {
            InfquotVerdict::ConfirmedElement(e) => assert_eq!(e.vector(), &[3]),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn incompatible_families_are_rejected() {
        let n1 = nat();
        let bad: FamilySpec =
            serde_json::from_str(r#"{"level":4,"labels":{"1":["0"],"2":["0"],"4":["1/4"]}}"#).unwrap();
        assert!(matches!(
            TruncatedProfiniteElement::from_spec(&n1, &bad),
            Err(Error::IncompatibleFamily(_))
        ));
        let missing: FamilySpec = serde_json::from_str(r#"{"level":4,"labels":{"1":["0"],"4":["1/4"]}}"#).unwrap();
        assert!(matches!(
            TruncatedProfiniteElement::from_spec(&n1, &missing),
            Err(Error::IncompatibleFamily(_))
        ));
    }

    #[test]
    fn family_json_round_trip() {
        let p = paper_monoid();
        let x = TruncatedProfiniteElement::of_element(&p, 6, &[2, 1, 0]).unwrap();
        let json = serde_json::to_string(&x.to_spec()).unwrap();
        let spec: FamilySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(TruncatedProfiniteElement::from_spec(&p, &spec).unwrap(), x);
    }
}
