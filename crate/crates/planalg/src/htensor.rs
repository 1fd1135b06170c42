//! Sparse elements of `A^{⊗n} ⊗ H` (and `A^{⊗n} ⊗ H ⊗ H`), plus the
//! materialized linear maps `A^{⊗n} → A^{⊗m}` and `A^{⊗n} → A^{⊗m} ⊗ H`
//! used throughout the tower.

use std::collections::BTreeMap;

use crate::algebra::{c_zero, fmt_key, Basis, IndexedAlgebra, Key, Space, Tensor, C64, PRUNE_EPS};
use crate::error::{Error, Result};
use crate::hopf::{HopfData, HVec};

/// Element of `A^{⊗n} ⊗ H^{⊗k}`: loop keys with dense H-coefficient vectors
/// of length `hdim` (`dim H` for k = 1, `dim H ^ 2` for k = 2, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct HTensor {
    pub space: Space,
    pub hdim: usize,
    coeffs: BTreeMap<Key, HVec>,
}

impl HTensor {
    pub fn zero(space: Space, hdim: usize) -> Self {
        HTensor { space, hdim, coeffs: BTreeMap::new() }
    }

    /// `x ⊗ h`.
    pub fn from_tensor(x: &Tensor, h: &[C64]) -> Self {
        let mut out = HTensor::zero(x.space, h.len());
        for (k, v) in x.iter() {
            out.add_term(k.clone(), &h.iter().map(|c| c * v).collect::<Vec<_>>());
        }
        out
    }

    pub fn add_term(&mut self, key: Key, h: &[C64]) {
        assert_eq!(h.len(), self.hdim);
        let entry = self.coeffs.entry(key.clone()).or_insert_with(|| vec![c_zero(); self.hdim]);
        for (e, v) in entry.iter_mut().zip(h) {
            *e += v;
        }
        if entry.iter().all(|v| v.norm() < PRUNE_EPS) {
            self.coeffs.remove(&key);
        }
    }

    pub fn get(&self, key: &Key) -> HVec {
        self.coeffs.get(key).cloned().unwrap_or_else(|| vec![c_zero(); self.hdim])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &HVec)> {
        self.coeffs.iter()
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scale(&self, f: C64) -> HTensor {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, h)| (k.clone(), h.iter().map(|v| v * f).collect()))
            .collect();
        HTensor { space: self.space, hdim: self.hdim, coeffs }
    }

    pub fn max_diff(&self, other: &HTensor) -> (f64, String) {
        assert_eq!(self.space, other.space);
        assert_eq!(self.hdim, other.hdim);
        let mut worst = (0.0f64, String::from("-"));
        let keys: std::collections::BTreeSet<&Key> =
            self.coeffs.keys().chain(other.coeffs.keys()).collect();
        for k in keys {
            let a = self.get(k);
            let b = other.get(k);
            let d = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            if d > worst.0 {
                worst = (d, fmt_key(k));
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .values()
            .flat_map(|h| h.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Product with loop-index matching on the A part and a caller-supplied
    /// product on the H part (plain `mul` for H, `mul2` for H ⊗ H).
    pub fn mul_with<F>(&self, other: &HTensor, hmul: F) -> Result<HTensor>
    where
        F: Fn(&[C64], &[C64]) -> HVec,
    {
        if self.space != other.space || self.hdim != other.hdim {
            return Err(Error::Tower("shape mismatch in H-tensor product".into()));
        }
        let mut by_bottom: BTreeMap<&[u8], Vec<(&Key, &HVec)>> = BTreeMap::new();
        for (k, h) in &other.coeffs {
            by_bottom.entry(k.0.as_slice()).or_default().push((k, h));
        }
        let mut out = HTensor::zero(self.space, self.hdim);
        for ((b, t), h1) in &self.coeffs {
            if let Some(matches) = by_bottom.get(t.as_slice()) {
                for (k2, h2) in matches {
                    out.add_term((b.clone(), k2.1.clone()), &hmul(h1, h2));
                }
            }
        }
        Ok(out)
    }

    /// Involution: swap loop rows, star the H part.
    pub fn adjoint(&self, hopf: &HopfData) -> HTensor {
        assert_eq!(self.hdim, hopf.dim);
        let mut out = HTensor::zero(self.space, self.hdim);
        for ((b, t), h) in &self.coeffs {
            out.add_term((t.clone(), b.clone()), &hopf.star_of(h));
        }
        out
    }

    /// Apply a scalar-valued functional to the H leg.
    pub fn contract_h<F>(&self, f: F) -> Tensor
    where
        F: Fn(&[C64]) -> C64,
    {
        let mut coeffs = BTreeMap::new();
        for (k, h) in &self.coeffs {
            coeffs.insert(k.clone(), f(h));
        }
        Tensor::from_coeffs(self.space, coeffs)
    }

    /// Apply a vector-valued map to the H leg (e.g. `Δ`, giving hdim d²).
    pub fn map_h<F>(&self, new_hdim: usize, f: F) -> HTensor
    where
        F: Fn(&[C64]) -> HVec,
    {
        let mut out = HTensor::zero(self.space, new_hdim);
        for (k, h) in &self.coeffs {
            out.add_term(k.clone(), &f(h));
        }
        out
    }

    /// Apply a `TowerMap` to the A leg.
    pub fn map_a(&self, t: &TowerMap) -> Result<HTensor> {
        if t.source != self.space {
            return Err(Error::Tower(format!(
                "map source {} does not match tensor space {}",
                t.source, self.space
            )));
        }
        let mut out = HTensor::zero(t.target, self.hdim);
        for (k, h) in &self.coeffs {
            for (k2, c) in t.column(k) {
                out.add_term(k2.clone(), &h.iter().map(|v| v * c).collect::<Vec<_>>());
            }
        }
        Ok(out)
    }
}

/// Tangle role implemented by a materialized map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapRole {
    Inclusion,
    InclusionMixed,
    Expectation,
    ExpectationTilde,
    ExpectationMinus,
    ExpectationPlus,
    Shift,
    ShiftSpin,
    ShiftMinus,
    ShiftPlus,
    Gamma,
    Multiplication,
    Theta,
    Identity,
    Composite,
}

/// Materialized linear map between loop/mixed spaces.
#[derive(Debug, Clone)]
pub struct TowerMap {
    pub source: Space,
    pub target: Space,
    pub role: MapRole,
    cols: BTreeMap<Key, Vec<(Key, C64)>>,
}

impl TowerMap {
    pub fn from_fn<F>(
        alg: &IndexedAlgebra,
        source: Space,
        target: Space,
        role: MapRole,
        f: F,
    ) -> Self
    where
        F: Fn(&Key) -> Vec<(Key, C64)>,
    {
        let basis = Basis::new(alg, source);
        let mut cols = BTreeMap::new();
        for k in &basis.keys {
            let mut col: BTreeMap<Key, C64> = BTreeMap::new();
            for (k2, c) in f(k) {
                debug_assert!(alg.valid_key(target, &k2), "invalid image key {}", fmt_key(&k2));
                *col.entry(k2).or_insert_with(c_zero) += c;
            }
            col.retain(|_, v| v.norm() >= PRUNE_EPS);
            cols.insert(k.clone(), col.into_iter().collect());
        }
        TowerMap { source, target, role, cols }
    }

    pub fn identity(alg: &IndexedAlgebra, space: Space) -> Self {
        Self::from_fn(alg, space, space, MapRole::Identity, |k| {
            vec![(k.clone(), C64::new(1.0, 0.0))]
        })
    }

    pub fn column(&self, key: &Key) -> &[(Key, C64)] {
        self.cols.get(key).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn apply(&self, x: &Tensor) -> Result<Tensor> {
        if x.space != self.source {
            return Err(Error::Tower(format!(
                "map source {} does not match tensor space {}",
                self.source, x.space
            )));
        }
        let mut out = Tensor::zero(self.target);
        for (k, v) in x.iter() {
            for (k2, c) in self.column(k) {
                out.add_term(k2.clone(), v * c);
            }
        }
        Ok(out)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &TowerMap) -> Result<TowerMap> {
        if inner.target != self.source {
            return Err(Error::Tower(format!(
                "cannot compose: inner target {} vs outer source {}",
                inner.target, self.source
            )));
        }
        let mut cols = BTreeMap::new();
        for (k, col) in &inner.cols {
            let mut acc: BTreeMap<Key, C64> = BTreeMap::new();
            for (mid, c) in col {
                for (k2, c2) in self.column(mid) {
                    *acc.entry(k2.clone()).or_insert_with(c_zero) += c * c2;
                }
            }
            acc.retain(|_, v| v.norm() >= PRUNE_EPS);
            cols.insert(k.clone(), acc.into_iter().collect());
        }
        Ok(TowerMap {
            source: inner.source,
            target: self.target,
            role: MapRole::Composite,
            cols,
        })
    }

    /// Max entrywise difference against another map with the same shape.
    pub fn max_diff(&self, other: &TowerMap) -> (f64, String) {
        assert_eq!(self.source, other.source);
        assert_eq!(self.target, other.target);
        let mut worst = (0.0f64, String::from("-"));
        let keys: std::collections::BTreeSet<&Key> =
            self.cols.keys().chain(other.cols.keys()).collect();
        for k in keys {
            let mut diff: BTreeMap<&Key, C64> = BTreeMap::new();
            for (k2, c) in self.column(k) {
                *diff.entry(k2).or_insert_with(c_zero) += c;
            }
            for (k2, c) in other.column(k) {
                *diff.entry(k2).or_insert_with(c_zero) -= c;
            }
            for (k2, d) in diff {
                if d.norm() > worst.0 {
                    worst = (d.norm(), format!("{} -> {}", fmt_key(k), fmt_key(k2)));
                }
            }
        }
        worst
    }

    /// Columns as sparse vectors (for rank computations).
    pub fn columns(&self) -> Vec<BTreeMap<Key, C64>> {
        self.cols
            .values()
            .map(|col| col.iter().cloned().collect::<BTreeMap<Key, C64>>())
            .collect()
    }

    pub fn source_keys(&self) -> impl Iterator<Item = &Key> {
        self.cols.keys()
    }
}

/// Materialized coaction-shaped map `A^{⊗n} → A^{⊗n} ⊗ H`, columns over the
/// source basis.
#[derive(Debug, Clone)]
pub struct CoactionMap {
    pub space: Space,
    pub hdim: usize,
    cols: BTreeMap<Key, HTensor>,
}

impl CoactionMap {
    pub fn from_fn<F>(alg: &IndexedAlgebra, space: Space, hdim: usize, f: F) -> Self
    where
        F: Fn(&Key) -> HTensor,
    {
        let basis = Basis::new(alg, space);
        let mut cols = BTreeMap::new();
        for k in &basis.keys {
            cols.insert(k.clone(), f(k));
        }
        CoactionMap { space, hdim, cols }
    }

    pub fn column(&self, key: &Key) -> Option<&HTensor> {
        self.cols.get(key)
    }

    pub fn apply(&self, x: &Tensor) -> Result<HTensor> {
        if x.space != self.space {
            return Err(Error::Tower("coaction map applied to wrong space".into()));
        }
        let mut out = HTensor::zero(self.space, self.hdim);
        for (k, v) in x.iter() {
            if let Some(col) = self.cols.get(k) {
                for (k2, h) in col.iter() {
                    out.add_term(k2.clone(), &h.iter().map(|c| c * v).collect::<Vec<_>>());
                }
            }
        }
        Ok(out)
    }

    /// `(id ⊗ haar)` of every column: the averaging projector.
    pub fn gamma(&self, alg: &IndexedAlgebra, haar: &[C64], role: MapRole) -> TowerMap {
        TowerMap::from_fn(alg, self.space, self.space, role, |k| {
            let mut out = Vec::new();
            if let Some(col) = self.cols.get(k) {
                for (k2, h) in col.iter() {
                    let v: C64 = h.iter().zip(haar).map(|(a, b)| a * b).sum();
                    if v.norm() >= PRUNE_EPS {
                        out.push((k2.clone(), v));
                    }
                }
            }
            out
        })
    }

    /// Residual of the equivariance square `v_m ∘ T = (T ⊗ id) ∘ v_n`, where
    /// `self` is `v_n` and `other` is `v_m` on the target space of T.
    pub fn equivariance_residual(&self, t: &TowerMap, other: &CoactionMap) -> (f64, String) {
        let mut worst = (0.0f64, String::from("-"));
        for (k, col) in &self.cols {
            let lhs = col.map_a(t).expect("map_a shape");
            let mut rhs = HTensor::zero(other.space, other.hdim);
            for (k2, c) in t.column(k) {
                if let Some(col2) = other.cols.get(k2) {
                    for (k3, h) in col2.iter() {
                        rhs.add_term(k3.clone(), &h.iter().map(|v| v * c).collect::<Vec<_>>());
                    }
                }
            }
            let (d, at) = lhs.max_diff(&rhs);
            if d > worst.0 {
                worst = (d, format!("x={} at {}", fmt_key(k), at));
            }
        }
        worst
    }
}
