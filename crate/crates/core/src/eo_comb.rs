//! Combinatorics of Ekedahl-Oort types.
//!
//! Three encodings of the same data appear throughout the crate:
//!
//! * a [`FinalType`] `ν = (ν(1), ..., ν(g))`, a step sequence with increments in `{0, 1}`;
//! * a [`YoungDiagram`] `μ = [μ_1 > ... > μ_n > 0]` with `μ_1 ≤ g`;
//! * a [`HWPartition`] `δ = δ_1 ≥ ... ≥ δ_n > 0`, the successive rank drops of
//!   the iterated Frobenius.
//!
//! `ν ↔ μ` is a bijection; `ν ↦ δ` forgets information once `g ≥ 3`, and
//! [`mu_candidates`] quantifies what is lost.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Largest genus accepted by the enumeration routines.
pub const MAX_ENUMERATION_GENUS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombError {
    #[error("invalid final type {values:?}: {reason}")]
    InvalidFinalType { values: Vec<u32>, reason: String },
    #[error("invalid Young diagram {0:?}: parts must be positive and strictly decreasing")]
    InvalidDiagram(Vec<u32>),
    #[error("invalid Hasse-Witt partition {0:?}: parts must be positive and non-increasing")]
    InvalidPartition(Vec<u32>),
    #[error("part {part} exceeds g = {g}")]
    PartExceedsG { part: u32, g: u32 },
    #[error("partition sum {sum} exceeds g = {g}")]
    DeltaExceedsG { sum: u32, g: u32 },
    #[error("g = {g} outside the supported range 1..={max}")]
    GTooLarge { g: u32, max: u32 },
}

/// Final type `ν`, stored on `1..=g`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct FinalType {
    values: Vec<u32>,
}

impl FinalType {
    pub fn new(values: Vec<u32>) -> Result<Self, CombError> {
        if values.is_empty() {
            return Err(CombError::InvalidFinalType {
                values,
                reason: "g must be at least 1".into(),
            });
        }
        let mut prev = 0u32;
        for (i, &v) in values.iter().enumerate() {
            if v < prev || v - prev > 1 {
                return Err(CombError::InvalidFinalType {
                    reason: format!("step from ν({i}) to ν({}) is not 0 or 1", i + 1),
                    values,
                });
            }
            prev = v;
        }
        Ok(FinalType { values })
    }

    /// The ordinary type `(1, 2, ..., g)`.
    pub fn ordinary(g: u32) -> Self {
        FinalType { values: (1..=g).collect() }
    }

    pub fn g(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// `ν(i)` for `0 ≤ i ≤ 2g`, extended by `ν(0) = 0` and `ν(2g − i) = ν(i) − i + g`.
    pub fn at(&self, i: u32) -> u32 {
        let g = self.g();
        assert!(i <= 2 * g, "ν is defined on 0..=2g");
        if i == 0 {
            0
        } else if i <= g {
            self.values[i as usize - 1]
        } else {
            let j = 2 * g - i;
            self.at(j) + g - j
        }
    }

    /// Values on `0..=2g`.
    pub fn extended(&self) -> Vec<u32> {
        (0..=2 * self.g()).map(|i| self.at(i)).collect()
    }

    /// `ν'` with `ν'(i) = i` for `i ≤ l` and `ν'(i + l) = ν(i) + l`: the type of
    /// the module obtained by adding `l` ordinary rank-2 blocks.
    pub fn shift(&self, l: u32) -> FinalType {
        let mut values: Vec<u32> = (1..=l).collect();
        values.extend(self.values.iter().map(|v| v + l));
        FinalType { values }
    }
}

impl fmt::Display for FinalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Young diagram `μ` with strictly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Default)]
#[serde(transparent)]
pub struct YoungDiagram {
    parts: Vec<u32>,
}

impl YoungDiagram {
    pub fn new(parts: Vec<u32>) -> Result<Self, CombError> {
        let strict = parts.windows(2).all(|w| w[0] > w[1]);
        if !strict || parts.last() == Some(&0) {
            return Err(CombError::InvalidDiagram(parts));
        }
        Ok(YoungDiagram { parts })
    }

    pub fn empty() -> Self {
        YoungDiagram { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `μ_1`, or 0 for the empty diagram.
    pub fn largest(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    fn check_g(&self, g: u32) -> Result<(), CombError> {
        if self.largest() > g {
            return Err(CombError::PartExceedsG { part: self.largest(), g });
        }
        Ok(())
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Hasse-Witt partition `δ` inside genus `ambient_g`. Serializes as the array of parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HWPartition {
    parts: Vec<u32>,
    ambient_g: u32,
}

impl Serialize for HWPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl HWPartition {
    pub fn new(parts: Vec<u32>, ambient_g: u32) -> Result<Self, CombError> {
        let non_increasing = parts.windows(2).all(|w| w[0] >= w[1]);
        if !non_increasing || parts.last() == Some(&0) {
            return Err(CombError::InvalidPartition(parts));
        }
        let sum: u32 = parts.iter().sum();
        if sum > ambient_g {
            return Err(CombError::DeltaExceedsG { sum, g: ambient_g });
        }
        Ok(HWPartition { parts, ambient_g })
    }

    /// `δ_i = ρ_{i−1} − ρ_i` from a non-increasing rank sequence starting at `ρ_0 = g`.
    pub fn from_ranks(rho: &[u32]) -> Result<Self, CombError> {
        let g = rho.first().copied().unwrap_or(0);
        let mut parts: Vec<u32> = rho
            .windows(2)
            .map(|w| {
                w[0].checked_sub(w[1])
                    .ok_or_else(|| CombError::InvalidPartition(rho.to_vec()))
            })
            .collect::<Result<_, _>>()?;
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Self::new(parts, g)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn ambient_g(&self) -> u32 {
        self.ambient_g
    }

    pub fn sum(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// `g − Σδ`.
    pub fn p_rank(&self) -> u32 {
        self.ambient_g - self.sum()
    }

    /// `δ_1`, or 0 when `δ` is empty.
    pub fn a_number(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `ρ_j = f + Σ_{i>j} δ_i` for `0 ≤ j ≤ len`; constant `f` afterwards.
    pub fn rank_at(&self, j: usize) -> u32 {
        self.p_rank() + self.parts.iter().skip(j).sum::<u32>()
    }

    /// Rank sequence truncated by [`truncate_ranks`].
    pub fn ranks(&self) -> Vec<u32> {
        truncate_ranks(self.ambient_g, |j| self.rank_at(j))
    }

    /// Componentwise sum, padding the shorter partition with zeros.
    pub fn componentwise_sum(&self, other: &HWPartition) -> HWPartition {
        let n = self.parts.len().max(other.parts.len());
        let parts = (0..n)
            .map(|j| self.parts.get(j).copied().unwrap_or(0) + other.parts.get(j).copied().unwrap_or(0))
            .collect();
        HWPartition {
            parts,
            ambient_g: self.ambient_g + other.ambient_g,
        }
    }

    /// Same parts inside a larger genus (adding `extra` to `g`, e.g. for loops).
    pub fn with_extra_genus(&self, extra: u32) -> HWPartition {
        HWPartition {
            parts: self.parts.clone(),
            ambient_g: self.ambient_g + extra,
        }
    }
}

impl fmt::Display for HWPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        if self.parts.iter().all(|&p| p < 10) {
            for p in &self.parts {
                write!(f, "{p}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.parts.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Collects `ρ_0 = g, ρ_1, ρ_2, ...` and stops right after the first value that is
/// zero or equal to its predecessor.
pub fn truncate_ranks(g: u32, mut rank: impl FnMut(usize) -> u32) -> Vec<u32> {
    let mut rho = vec![g];
    if g == 0 {
        return rho;
    }
    for j in 1..=(g as usize + 1) {
        let r = rank(j);
        let prev = *rho.last().expect("nonempty");
        rho.push(r);
        if r == 0 || r == prev {
            break;
        }
    }
    rho
}

/// `μ_j = #{i ∈ 1..=g : ν(i) ≤ i − j}`.
pub fn mu_from_nu(nu: &FinalType) -> YoungDiagram {
    let mut parts = Vec::new();
    for j in 1.. {
        let count = nu
            .values
            .iter()
            .enumerate()
            .filter(|&(i, &v)| (v as i64) <= (i as i64 + 1) - j as i64)
            .count() as u32;
        if count == 0 {
            break;
        }
        parts.push(count);
    }
    YoungDiagram { parts }
}

/// Inverse of [`mu_from_nu`]: `ν(i) = i − #{j : μ_j ≥ g + 1 − i}`.
pub fn nu_from_mu(mu: &YoungDiagram, g: u32) -> Result<FinalType, CombError> {
    if g == 0 {
        return Err(CombError::InvalidFinalType {
            values: Vec::new(),
            reason: "g must be at least 1".into(),
        });
    }
    mu.check_g(g)?;
    let values = (1..=g)
        .map(|i| i - mu.parts.iter().filter(|&&m| m >= g + 1 - i).count() as u32)
        .collect();
    FinalType::new(values)
}

/// Iterates `ρ_{j+1} = ν(ρ_j)` from `ρ_0 = g`; returns `δ` and the fixpoint `f` (the p-rank).
pub fn delta_from_nu(nu: &FinalType) -> (HWPartition, u32) {
    let g = nu.g();
    let mut cur = g;
    let rho = truncate_ranks(g, |_| {
        cur = nu.at(cur);
        cur
    });
    let f = *rho.last().expect("nonempty");
    debug_assert_eq!(nu.at(f), f);
    let delta = HWPartition::from_ranks(&rho).expect("ν iteration is non-increasing");
    (delta, f)
}

/// Rank sequence `ρ` of a final type (same truncation as [`delta_from_nu`]).
pub fn rho_from_nu(nu: &FinalType) -> Vec<u32> {
    let mut cur = nu.g();
    truncate_ranks(nu.g(), |_| {
        cur = nu.at(cur);
        cur
    })
}

/// `a ≤ b`, i.e. `b ≥ a`: `b` has at most as many parts and `b_i ≤ a_i` for every part of `b`.
pub fn diagram_leq(a: &YoungDiagram, b: &YoungDiagram) -> bool {
    b.parts.len() <= a.parts.len() && b.parts.iter().zip(&a.parts).all(|(bi, ai)| bi <= ai)
}

/// Every strict partition with parts `≤ g`, i.e. every subset of `{1, ..., g}`.
pub fn strict_partitions(g: u32) -> Result<Vec<YoungDiagram>, CombError> {
    check_genus(g)?;
    let mut out = Vec::with_capacity(1 << g);
    for mask in 0u32..(1 << g) {
        let parts: Vec<u32> = (1..=g).rev().filter(|&i| mask & (1 << (i - 1)) != 0).collect();
        out.push(YoungDiagram { parts });
    }
    out.sort();
    Ok(out)
}

/// All `μ' ≤ μ` with parts `≤ g`. These are order-theoretic candidates for
/// strata in the closure of `Z_μ`; the converse containment can fail.
pub fn downset(mu: &YoungDiagram, g: u32) -> Result<Vec<YoungDiagram>, CombError> {
    mu.check_g(g)?;
    Ok(strict_partitions(g)?
        .into_iter()
        .filter(|d| diagram_leq(d, mu))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiagramStats {
    pub codim: u32,
    pub p_rank: u32,
    pub a_number: u32,
}

/// Codimension `Σμ_i`, p-rank `g − μ_1` and a-number `n`.
pub fn diagram_stats(mu: &YoungDiagram, g: u32) -> Result<DiagramStats, CombError> {
    mu.check_g(g)?;
    Ok(DiagramStats {
        codim: mu.parts.iter().sum(),
        p_rank: g - mu.largest(),
        a_number: mu.parts.len() as u32,
    })
}

fn check_genus(g: u32) -> Result<(), CombError> {
    if g == 0 || g > MAX_ENUMERATION_GENUS {
        return Err(CombError::GTooLarge { g, max: MAX_ENUMERATION_GENUS });
    }
    Ok(())
}

/// All `2^g` final types in lexicographic order.
pub fn enumerate_final_types(g: u32) -> Result<Vec<FinalType>, CombError> {
    check_genus(g)?;
    let mut out = Vec::with_capacity(1 << g);
    for mask in 0u32..(1 << g) {
        // bit g-1 is the step at i = 1, so ascending masks give ascending ν
        let mut acc = 0;
        let values = (1..=g)
            .map(|i| {
                acc += (mask >> (g - i)) & 1;
                acc
            })
            .collect();
        out.push(FinalType { values });
    }
    Ok(out)
}

/// `{μ(ν) : δ(ν) = δ and p-rank(ν) = g − Σδ}`.
pub fn mu_candidates(delta: &HWPartition, g: u32) -> Result<BTreeSet<YoungDiagram>, CombError> {
    let sum = delta.sum();
    if sum > g {
        return Err(CombError::DeltaExceedsG { sum, g });
    }
    let target = HWPartition::new(delta.parts.clone(), g)?;
    Ok(enumerate_final_types(g)?
        .iter()
        .filter(|nu| delta_from_nu(nu).0 == target)
        .map(mu_from_nu)
        .collect())
}

/// p-rank-0 correspondence `δ ↦ {μ}` in genus `g`, keyed in lexicographic order of `δ`.
pub fn delta_mu_table(g: u32) -> Result<BTreeMap<HWPartition, BTreeSet<YoungDiagram>>, CombError> {
    let mut table: BTreeMap<HWPartition, BTreeSet<YoungDiagram>> = BTreeMap::new();
    for nu in enumerate_final_types(g)? {
        let (delta, f) = delta_from_nu(&nu);
        if f == 0 {
            table.entry(delta).or_default().insert(mu_from_nu(&nu));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ft(v: &[u32]) -> FinalType {
        FinalType::new(v.to_vec()).unwrap()
    }

    fn yd(v: &[u32]) -> YoungDiagram {
        YoungDiagram::new(v.to_vec()).unwrap()
    }

    fn hw(v: &[u32], g: u32) -> HWPartition {
        HWPartition::new(v.to_vec(), g).unwrap()
    }

    #[test]
    fn final_type_validation() {
        assert!(FinalType::new(vec![2]).is_err());
        assert!(FinalType::new(vec![0, 2]).is_err());
        assert!(FinalType::new(vec![1, 0]).is_err());
        assert!(FinalType::new(vec![]).is_err());
        assert!(FinalType::new(vec![0, 1, 1, 2]).is_ok());
    }

    #[test]
    fn final_type_duality_extension() {
        let nu = ft(&[0, 1, 1]);
        let ext = nu.extended();
        assert_eq!(ext.len(), 7);
        assert_eq!(ext[6], 3);
        for i in 0..=3u32 {
            assert_eq!(nu.at(6 - i) + i, nu.at(i) + 3);
        }
        assert!(ext.windows(2).all(|w| w[1] - w[0] <= 1));
    }

    #[test]
    fn mu_from_nu_examples() {
        assert_eq!(mu_from_nu(&FinalType::ordinary(4)), YoungDiagram::empty());
        assert_eq!(mu_from_nu(&ft(&[0, 1, 2, 3])), yd(&[4]));
        assert_eq!(mu_from_nu(&ft(&[0, 0, 1, 1])), yd(&[4, 3, 1]));
    }

    #[test]
    fn nu_from_mu_examples() {
        assert_eq!(nu_from_mu(&yd(&[2, 1]), 2).unwrap(), ft(&[0, 0]));
        assert_eq!(nu_from_mu(&yd(&[3, 1]), 3).unwrap(), ft(&[0, 1, 1]));
        assert_eq!(nu_from_mu(&YoungDiagram::empty(), 5).unwrap(), FinalType::ordinary(5));
        assert_eq!(
            nu_from_mu(&yd(&[3]), 2).unwrap_err(),
            CombError::PartExceedsG { part: 3, g: 2 }
        );
    }

    #[test]
    fn delta_from_nu_examples() {
        let (d, f) = delta_from_nu(&ft(&[0, 0]));
        assert_eq!((d.parts(), f), (&[2][..], 0));
        assert_eq!(rho_from_nu(&ft(&[0, 0])), vec![2, 0]);

        let (d, f) = delta_from_nu(&ft(&[0, 1, 1]));
        assert_eq!((d.parts(), f), (&[2, 1][..], 0));
        assert_eq!(rho_from_nu(&ft(&[0, 1, 1])), vec![3, 1, 0]);

        let (d, f) = delta_from_nu(&ft(&[1, 1]));
        assert_eq!((d.parts(), f), (&[1][..], 1));
        assert_eq!(rho_from_nu(&ft(&[1, 1])), vec![2, 1, 1]);
    }

    #[test]
    fn partial_order_examples() {
        let a = yd(&[3, 1]);
        assert!(diagram_leq(&a, &a));
        assert!(diagram_leq(&a, &yd(&[3])));
        assert!(!diagram_leq(&yd(&[3]), &a));
        assert!(!diagram_leq(&yd(&[4, 1]), &yd(&[3, 2])));
        assert!(!diagram_leq(&yd(&[3, 2]), &yd(&[4, 1])));
        assert!(diagram_leq(&yd(&[1]), &YoungDiagram::empty()));
    }

    #[test]
    fn downset_contents() {
        let d = downset(&yd(&[2]), 2).unwrap();
        assert_eq!(d, vec![yd(&[2]), yd(&[2, 1])]);
        let all = downset(&YoungDiagram::empty(), 3).unwrap();
        assert_eq!(all.len(), 8);
        assert!(downset(&yd(&[4]), 3).is_err());
    }

    #[test]
    fn stats_examples() {
        let s = diagram_stats(&YoungDiagram::empty(), 4).unwrap();
        assert_eq!((s.codim, s.p_rank, s.a_number), (0, 4, 0));
        let s = diagram_stats(&yd(&[2, 1]), 2).unwrap();
        assert_eq!((s.codim, s.p_rank, s.a_number), (3, 0, 2));
        let s = diagram_stats(&yd(&[4, 3]), 4).unwrap();
        assert_eq!((s.codim, s.p_rank, s.a_number), (7, 0, 2));
        assert!(diagram_stats(&yd(&[5]), 4).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_final_types(1).unwrap(), vec![ft(&[0]), ft(&[1])]);
        let g4 = enumerate_final_types(4).unwrap();
        assert_eq!(g4.len(), 16);
        assert!(g4.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g4.iter().filter(|nu| delta_from_nu(nu).1 == 0).count(), 8);
        assert!(enumerate_final_types(0).is_err());
        assert!(enumerate_final_types(21).is_err());
    }

    #[test]
    fn table_small_genus() {
        let t = delta_mu_table(2).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[&hw(&[1, 1], 2)], BTreeSet::from([yd(&[2])]));
        assert_eq!(t[&hw(&[2], 2)], BTreeSet::from([yd(&[2, 1])]));
        let t3 = delta_mu_table(3).unwrap();
        assert_eq!(t3[&hw(&[2, 1], 3)], BTreeSet::from([yd(&[3, 1]), yd(&[3, 2])]));
    }

    #[test]
    fn candidates_examples() {
        assert_eq!(mu_candidates(&hw(&[2, 2], 4), 4).unwrap(), BTreeSet::from([yd(&[4, 3])]));
        assert_eq!(
            mu_candidates(&hw(&[2, 1, 1], 4), 4).unwrap(),
            BTreeSet::from([yd(&[4, 1]), yd(&[4, 2])])
        );
        assert_eq!(
            mu_candidates(&hw(&[], 3), 3).unwrap(),
            BTreeSet::from([YoungDiagram::empty()])
        );
        assert!(matches!(
            mu_candidates(&hw(&[3], 3), 2),
            Err(CombError::DeltaExceedsG { .. })
        ));
    }

    #[test]
    fn partition_helpers() {
        let d = hw(&[2, 1], 5);
        assert_eq!(d.p_rank(), 2);
        assert_eq!(d.a_number(), 2);
        assert_eq!(d.ranks(), vec![5, 3, 2, 2]);
        assert_eq!(d.to_string(), "21");
        let s = d.componentwise_sum(&hw(&[1, 1, 1], 3));
        assert_eq!(s.parts(), &[3, 2, 1]);
        assert_eq!(s.ambient_g(), 8);
        assert!(HWPartition::new(vec![1, 2], 5).is_err());
        assert!(HWPartition::new(vec![3, 3], 5).is_err());
        assert_eq!(HWPartition::from_ranks(&[4, 2, 0]).unwrap().parts(), &[2, 2]);
        assert_eq!(HWPartition::from_ranks(&[4, 4]).unwrap().parts(), &[] as &[u32]);
    }

    #[test]
    fn shift_law_on_types() {
        let nu = ft(&[0, 0]);
        assert_eq!(nu.shift(1), ft(&[1, 1, 1]));
        assert_eq!(mu_from_nu(&nu.shift(3)), mu_from_nu(&nu));
    }
}
