//! Finite dimensional C*-algebras with distinguished matrix units, the loop
//! basis of tensor powers, and the weight-derived linear forms.
//!
//! A basis element of `A^{⊗n}` is a pair of multi-indices `(bottom, top)`.
//! Multiplication matches the full top row of the left factor against the
//! bottom row of the right factor; involution swaps the rows and conjugates.
//! The pair corresponds to an elementary tensor of matrix units by reading
//! the bottom row left to right and then the top row right to left: leg `m`
//! is the matrix unit with row index at position `2m` and column index at
//! position `2m+1` of that cyclic word.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Label = u8;
pub type Row = SmallVec<[Label; 8]>;
pub type Key = (Row, Row);

/// Coefficients below this threshold are dropped after every operation.
pub const PRUNE_EPS: f64 = 1e-14;
/// Default absolute tolerance for identity checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Singular-value / Gram-Schmidt threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-8;

pub fn c_one() -> C64 {
    C64::new(1.0, 0.0)
}

pub fn c_zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn row_of(labels: &[Label]) -> Row {
    Row::from_slice(labels)
}

pub fn fmt_row(r: &Row) -> String {
    let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
    parts.join(" ")
}

pub fn fmt_key(k: &Key) -> String {
    format!("({}|{})", fmt_row(&k.0), fmt_row(&k.1))
}

/// Which algebra a sparse element lives in.
///
/// `Loop(n)` is `A^{⊗n}` in the loop basis. `Mixed(m)` is `A ⊗ A^{⊗m}` with a
/// plain matrix-unit leg in front of a degree-`m` loop leg; rows have length
/// `m + 1`. Both carry the same index-matching product and differ only in
/// which index pairs label a basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    Loop(usize),
    Mixed(usize),
}

impl Space {
    pub fn row_len(self) -> usize {
        match self {
            Space::Loop(n) => n,
            Space::Mixed(m) => m + 1,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Loop(n) => write!(f, "A^{n}"),
            Space::Mixed(m) => write!(f, "A(x)A^{m}"),
        }
    }
}

/// Block structure of `A`, the flat index set, and the fourth roots `q_i` of
/// the weights of the distinguished state.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedAlgebra {
    block_sizes: Vec<usize>,
    block_of: Vec<usize>,
    q: Vec<f64>,
    delta: Option<f64>,
}

impl IndexedAlgebra {
    /// Build from block sizes and the weights `q_i^4` (one per diagonal
    /// index). `delta` is set when (†) and (‡) hold within tolerance.
    pub fn build(block_sizes: &[usize], weights_fourth_power: &[f64]) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.iter().any(|&s| s == 0) {
            return Err(Error::Algebra("block sizes must be positive".into()));
        }
        let n: usize = block_sizes.iter().sum();
        if n > 200 {
            return Err(Error::Algebra(format!("index set too large ({n} > 200)")));
        }
        if weights_fourth_power.len() != n {
            return Err(Error::Algebra(format!(
                "expected {} weights (one per diagonal index), got {}",
                n,
                weights_fourth_power.len()
            )));
        }
        if weights_fourth_power.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Algebra("weights must be strictly positive".into()));
        }
        let mut block_of = Vec::with_capacity(n);
        for (b, &s) in block_sizes.iter().enumerate() {
            block_of.extend(std::iter::repeat(b).take(s));
        }
        let q: Vec<f64> = weights_fourth_power.iter().map(|w| w.powf(0.25)).collect();
        let mut alg = IndexedAlgebra { block_sizes: block_sizes.to_vec(), block_of, q, delta: None };
        alg.delta = alg.detect_delta(DEFAULT_TOL);
        Ok(alg)
    }

    /// Derived algebra used internally (tensor powers). Weights are the loop
    /// weights; no delta detection.
    pub(crate) fn derived(block_of: Vec<usize>, q: Vec<f64>) -> Self {
        let nblocks = block_of.iter().copied().max().map_or(0, |b| b + 1);
        let mut block_sizes = vec![0usize; nblocks];
        for &b in &block_of {
            block_sizes[b] += 1;
        }
        IndexedAlgebra { block_sizes, block_of, q, delta: None }
    }

    fn detect_delta(&self, tol: f64) -> Option<f64> {
        let total: f64 = self.q.iter().map(|q| q.powi(4)).sum();
        if (total - 1.0).abs() > tol {
            return None;
        }
        let mut delta_sq = None;
        for i in 0..self.n_labels() {
            let s: f64 = (0..self.n_labels())
                .filter(|&j| self.same_block(i as Label, j as Label))
                .map(|j| self.q[j].powi(-4))
                .sum();
            match delta_sq {
                None => delta_sq = Some(s),
                Some(d) if (d - s).abs() > tol => return None,
                _ => {}
            }
        }
        delta_sq.map(f64::sqrt)
    }

    pub fn n_labels(&self) -> usize {
        self.block_of.len()
    }

    /// Dimension of `A` as a vector space.
    pub fn dim(&self) -> usize {
        self.block_sizes.iter().map(|s| s * s).sum()
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn block_of(&self, i: Label) -> usize {
        self.block_of[i as usize]
    }

    pub fn same_block(&self, i: Label, j: Label) -> bool {
        self.block_of[i as usize] == self.block_of[j as usize]
    }

    /// Whether the matrix unit with row `i`, column `j` exists.
    pub fn unit_exists(&self, i: Label, j: Label) -> bool {
        self.same_block(i, j)
    }

    pub fn q(&self, i: Label) -> f64 {
        self.q[i as usize]
    }

    pub fn weight(&self, i: Label) -> f64 {
        self.q[i as usize].powi(4)
    }

    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    pub fn require_delta(&self) -> Result<f64> {
        self.delta.ok_or_else(|| {
            Error::Algebra("state is not a delta-form: (†)/(‡) fail, delta unset".into())
        })
    }

    /// The state is a trace iff `q_i` is constant on blocks.
    pub fn is_tracial(&self, tol: f64) -> bool {
        (0..self.n_labels()).all(|i| {
            (0..self.n_labels()).all(|j| {
                !self.same_block(i as Label, j as Label)
                    || (self.weight(i as Label) - self.weight(j as Label)).abs() < tol
            })
        })
    }

    /// All matrix units `(i, j)` in lexicographic order.
    pub fn units(&self) -> Vec<(Label, Label)> {
        let n = self.n_labels();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.same_block(i as Label, j as Label) {
                    out.push((i as Label, j as Label));
                }
            }
        }
        out
    }

    /// Alternating product `q_{i_1} q_{i_2}^{-1} q_{i_3} ... q_{i_n}^{∓1}`,
    /// the last exponent being `-1` for even `n` and `+1` for odd `n`.
    pub fn loop_weight(&self, row: &[Label]) -> Result<f64> {
        let mut acc = 1.0f64;
        for (pos, &i) in row.iter().enumerate() {
            if i as usize >= self.n_labels() {
                return Err(Error::Algebra(format!("unknown index label {i}")));
            }
            if pos % 2 == 0 {
                acc *= self.q(i);
            } else {
                acc /= self.q(i);
            }
        }
        Ok(acc)
    }

    /// The numbers `p_i = δ^{-1/2} q_i^{-1} (Σ_{l~i} q_l^4)^{1/4}`.
    pub fn p_weights(&self) -> Result<Vec<f64>> {
        let delta = self.require_delta()?;
        let n = self.n_labels();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let block_sum: f64 = (0..n)
                .filter(|&l| self.same_block(i as Label, l as Label))
                .map(|l| self.weight(l as Label))
                .sum();
            out.push(delta.powf(-0.5) / self.q(i as Label) * block_sum.powf(0.25));
        }
        Ok(out)
    }

    /// Leg `m` of a loop pair: the matrix unit at positions `2m, 2m+1` of the
    /// cyclic word `bottom ++ reverse(top)`.
    pub fn leg(key: &Key, m: usize) -> (Label, Label) {
        let n = key.0.len();
        let at = |p: usize| -> Label {
            if p < n {
                key.0[p]
            } else {
                key.1[2 * n - 1 - p]
            }
        };
        (at(2 * m), at(2 * m + 1))
    }

    /// Inverse of `leg`: assemble the loop pair whose legs are the given
    /// matrix units.
    pub fn key_from_legs(legs: &[(Label, Label)]) -> Key {
        let n = legs.len();
        let mut c = vec![0 as Label; 2 * n];
        for (m, &(r, col)) in legs.iter().enumerate() {
            c[2 * m] = r;
            c[2 * m + 1] = col;
        }
        let bottom = Row::from_slice(&c[..n]);
        let mut top = Row::from_slice(&c[n..]);
        top.reverse();
        (bottom, top)
    }

    /// Whether `(bottom, top)` labels a basis element of the space.
    pub fn valid_key(&self, space: Space, key: &Key) -> bool {
        let len = space.row_len();
        if key.0.len() != len || key.1.len() != len {
            return false;
        }
        if key.0.iter().chain(key.1.iter()).any(|&x| x as usize >= self.n_labels()) {
            return false;
        }
        match space {
            Space::Loop(n) => (0..n).all(|m| {
                let (r, c) = Self::leg(key, m);
                self.unit_exists(r, c)
            }),
            Space::Mixed(m) => {
                if !self.unit_exists(key.0[0], key.1[0]) {
                    return false;
                }
                let tail = (Row::from_slice(&key.0[1..]), Row::from_slice(&key.1[1..]));
                self.valid_key(Space::Loop(m), &tail)
            }
        }
    }
}

/// Enumerated basis of a space, lexicographically ordered by `(bottom, top)`.
#[derive(Debug, Clone)]
pub struct Basis {
    pub space: Space,
    pub keys: Vec<Key>,
}

impl Basis {
    pub fn new(alg: &IndexedAlgebra, space: Space) -> Self {
        let units = alg.units();
        let mut keys = Vec::new();
        match space {
            Space::Loop(n) => {
                let mut legs = vec![(0 as Label, 0 as Label); n];
                fn rec(
                    units: &[(Label, Label)],
                    legs: &mut Vec<(Label, Label)>,
                    m: usize,
                    keys: &mut Vec<Key>,
                ) {
                    if m == legs.len() {
                        keys.push(IndexedAlgebra::key_from_legs(legs));
                        return;
                    }
                    for &u in units {
                        legs[m] = u;
                        rec(units, legs, m + 1, keys);
                    }
                }
                rec(&units, &mut legs, 0, &mut keys);
            }
            Space::Mixed(m) => {
                let tail = Basis::new(alg, Space::Loop(m));
                for &(r, c) in &units {
                    for (tb, tt) in &tail.keys {
                        let mut bottom = Row::new();
                        bottom.push(r);
                        bottom.extend_from_slice(tb);
                        let mut top = Row::new();
                        top.push(c);
                        top.extend_from_slice(tt);
                        keys.push((bottom, top));
                    }
                }
            }
        }
        keys.sort();
        Basis { space, keys }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Sparse element of `A^{⊗n}` (or of `A ⊗ A^{⊗m}`) over the loop basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub space: Space,
    coeffs: BTreeMap<Key, C64>,
}

impl Tensor {
    pub fn zero(space: Space) -> Self {
        Tensor { space, coeffs: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        match self.space {
            Space::Loop(n) => n,
            Space::Mixed(m) => m + 1,
        }
    }

    pub fn basis_elem(alg: &IndexedAlgebra, space: Space, key: Key) -> Result<Self> {
        if !alg.valid_key(space, &key) {
            return Err(Error::Algebra(format!(
                "{} is not a basis element of {}",
                fmt_key(&key),
                space
            )));
        }
        let mut t = Tensor::zero(space);
        t.coeffs.insert(key, c_one());
        Ok(t)
    }

    /// Multiplicative unit: the sum of all valid diagonal loops.
    pub fn unit(alg: &IndexedAlgebra, space: Space) -> Self {
        let mut t = Tensor::zero(space);
        for key in Basis::new(alg, space).keys {
            if key.0 == key.1 {
                t.coeffs.insert(key, c_one());
            }
        }
        t
    }

    pub fn add_term(&mut self, key: Key, coeff: C64) {
        let entry = self.coeffs.entry(key.clone()).or_insert_with(c_zero);
        *entry += coeff;
        if entry.norm() < PRUNE_EPS {
            self.coeffs.remove(&key);
        }
    }

    pub fn get(&self, key: &Key) -> C64 {
        self.coeffs.get(key).copied().unwrap_or_else(c_zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &C64)> {
        self.coeffs.iter()
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<Key, C64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> BTreeMap<Key, C64> {
        self.coeffs
    }

    pub fn from_coeffs(space: Space, coeffs: BTreeMap<Key, C64>) -> Self {
        let mut t = Tensor { space, coeffs };
        t.prune();
        t
    }

    pub fn prune(&mut self) {
        self.coeffs.retain(|_, v| v.norm() >= PRUNE_EPS);
    }

    pub fn scale(&self, f: C64) -> Tensor {
        let coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), v * f)).collect();
        Tensor::from_coeffs(self.space, coeffs)
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.space, other.space);
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            *coeffs.entry(k.clone()).or_insert_with(c_zero) += v;
        }
        Tensor::from_coeffs(self.space, coeffs)
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient of `self - other`, with its key.
    pub fn max_diff(&self, other: &Tensor) -> (f64, String) {
        let mut worst = (0.0f64, String::from("-"));
        let mut seen: BTreeMap<&Key, C64> = self.coeffs.iter().map(|(k, v)| (k, *v)).collect();
        for (k, v) in &other.coeffs {
            let d = (seen.remove(k).unwrap_or_else(c_zero) - v).norm();
            if d > worst.0 {
                worst = (d, fmt_key(k));
            }
        }
        for (k, v) in seen {
            let d = v.norm();
            if d > worst.0 {
                worst = (d, fmt_key(k));
            }
        }
        worst
    }

    /// Product by the bilinear extension of index matching: the top row of
    /// the left factor must equal the bottom row of the right factor.
    pub fn mul(&self, other: &Tensor) -> Result<Tensor> {
        if self.space != other.space {
            return Err(Error::Algebra(format!(
                "degree mismatch in product: {} vs {}",
                self.space, other.space
            )));
        }
        let mut by_bottom: BTreeMap<&Row, Vec<(&Row, C64)>> = BTreeMap::new();
        for ((b, t), v) in &other.coeffs {
            by_bottom.entry(b).or_default().push((t, *v));
        }
        let mut out = BTreeMap::new();
        for ((b, t), v) in &self.coeffs {
            if let Some(matches) = by_bottom.get(t) {
                for (t2, w) in matches {
                    *out.entry((b.clone(), (*t2).clone())).or_insert_with(c_zero) += v * w;
                }
            }
        }
        Ok(Tensor::from_coeffs(self.space, out))
    }

    /// The involution: swap rows, conjugate coefficients.
    pub fn adjoint(&self) -> Tensor {
        let coeffs = self
            .coeffs
            .iter()
            .map(|((b, t), v)| ((t.clone(), b.clone()), v.conj()))
            .collect();
        Tensor::from_coeffs(self.space, coeffs)
    }

    /// Matrix trace of the underlying multi-matrix algebra.
    pub fn mat_trace(&self) -> C64 {
        self.coeffs
            .iter()
            .filter(|((b, t), _)| b == t)
            .map(|(_, v)| *v)
            .sum()
    }
}

/// The weighted linear forms on tensor powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// `φ̃_n`: diagonal value `q_{(bottom)}^4`.
    PhiTilde,
    /// `φ_n = δ^{1/2 ∓ 1/2 - n} φ̃_n`.
    Phi,
    /// `ψ_2` on degree 2: diagonal value `δ^{-2} q_{i_1}^{-4} q_{i_2}^4`.
    Psi2,
    /// `ψ` on degree 1: diagonal value `p_i^4`.
    Psi,
}

/// Evaluate a form on an element of `Loop(n)`.
pub fn form_value(alg: &IndexedAlgebra, kind: FormKind, x: &Tensor) -> Result<C64> {
    let n = match x.space {
        Space::Loop(n) => n,
        Space::Mixed(_) => {
            return Err(Error::Algebra("forms of this kind act on loop spaces".into()))
        }
    };
    match kind {
        FormKind::Psi2 if n != 2 => {
            return Err(Error::Algebra(format!("psi_2 needs degree 2, got {n}")))
        }
        FormKind::Psi if n != 1 => {
            return Err(Error::Algebra(format!("psi needs degree 1, got {n}")))
        }
        _ => {}
    }
    let mut acc = c_zero();
    match kind {
        FormKind::PhiTilde | FormKind::Phi => {
            let factor = match kind {
                FormKind::Phi => {
                    let delta = alg.require_delta()?;
                    let exp = if n % 2 == 0 { -(n as i32) } else { 1 - n as i32 };
                    delta.powi(exp)
                }
                _ => 1.0,
            };
            for ((b, t), v) in x.iter() {
                if b == t {
                    acc += v * alg.loop_weight(b)?.powi(4) * factor;
                }
            }
        }
        FormKind::Psi2 => {
            let delta = alg.require_delta()?;
            for ((b, t), v) in x.iter() {
                if b == t {
                    acc += v * delta.powi(-2) * alg.weight(b[0]).recip() * alg.weight(b[1]);
                }
            }
        }
        FormKind::Psi => {
            let p = alg.p_weights()?;
            for ((b, t), v) in x.iter() {
                if b == t {
                    acc += v * p[b[0] as usize].powi(4);
                }
            }
        }
    }
    Ok(acc)
}

/// `ψ ⊗ φ_m` on an element of `Mixed(m)`.
pub fn psi_tensor_phi(alg: &IndexedAlgebra, x: &Tensor) -> Result<C64> {
    let m = match x.space {
        Space::Mixed(m) => m,
        Space::Loop(_) => return Err(Error::Algebra("psi⊗phi acts on A⊗A^m".into())),
    };
    let delta = alg.require_delta()?;
    let p = alg.p_weights()?;
    let exp = if m % 2 == 0 { -(m as i32) } else { 1 - m as i32 };
    let factor = delta.powi(exp);
    let mut acc = c_zero();
    for ((b, t), v) in x.iter() {
        if b == t {
            let tail = &b[1..];
            acc += v * p[b[0] as usize].powi(4) * alg.loop_weight(tail)?.powi(4) * factor;
        }
    }
    Ok(acc)
}

/// The modular map of `φ̃_n`: scales a loop by `q_{(bottom)}^4 q_{(top)}^{-4}`.
pub fn theta(alg: &IndexedAlgebra, x: &Tensor) -> Result<Tensor> {
    let mut out = BTreeMap::new();
    for ((b, t), v) in x.iter() {
        let f = alg.loop_weight(b)?.powi(4) / alg.loop_weight(t)?.powi(4);
        out.insert((b.clone(), t.clone()), v * f);
    }
    Ok(Tensor::from_coeffs(x.space, out))
}

/// GNS inner product `<x, y> = φ̃_n(y* x)`; diagonal with weight
/// `q_{(top)}^4` in the loop basis.
pub fn gns_inner(alg: &IndexedAlgebra, x: &BTreeMap<Key, C64>, y: &BTreeMap<Key, C64>) -> C64 {
    let (small, big, conj_small) = if x.len() <= y.len() { (x, y, false) } else { (y, x, true) };
    let mut acc = c_zero();
    for (k, v) in small {
        if let Some(w) = big.get(k) {
            let weight = alg.loop_weight(&k.1).unwrap_or(1.0).powi(4);
            let prod = if conj_small { w * v.conj() } else { v * w.conj() };
            acc += prod * weight;
        }
    }
    acc
}

/// The loop algebra `A^{⊗n}` presented as an `IndexedAlgebra` over valid
/// rows: rows are the labels, two rows are in the same block when they form
/// a valid loop pair, and the weight of a row is its loop weight to the
/// fourth power. Returns the derived algebra and the row dictionary.
pub fn loop_power(alg: &IndexedAlgebra, n: usize) -> Result<(IndexedAlgebra, Vec<Row>)> {
    let mut rows: Vec<Row> = Vec::new();
    let labels = alg.n_labels() as Label;
    let mut cur: Row = Row::new();
    fn rec(alg: &IndexedAlgebra, labels: Label, n: usize, cur: &mut Row, out: &mut Vec<Row>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in 0..labels {
            // consecutive disjoint pairs must lie in one block
            if cur.len() % 2 == 1 && !alg.same_block(cur[cur.len() - 1], x) {
                continue;
            }
            cur.push(x);
            rec(alg, labels, n, cur, out);
            cur.pop();
        }
    }
    rec(alg, labels, n, &mut cur, &mut rows);
    rows.sort();
    if rows.len() > 200 {
        return Err(Error::Algebra(format!(
            "loop power too large: {} rows at degree {n}",
            rows.len()
        )));
    }
    // Even degree: any two valid rows pair up (single block). Odd degree:
    // rows pair up iff their last labels share a block.
    let block_of: Vec<usize> = if n % 2 == 0 {
        vec![0; rows.len()]
    } else {
        rows.iter().map(|r| alg.block_of(r[n - 1])).collect()
    };
    let q: Vec<f64> = rows
        .iter()
        .map(|r| alg.loop_weight(r))
        .collect::<Result<_>>()?;
    Ok((IndexedAlgebra::derived(block_of, q), rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c2_uniform() -> IndexedAlgebra {
        IndexedAlgebra::build(&[1, 1], &[0.5, 0.5]).unwrap()
    }

    fn m2_uniform() -> IndexedAlgebra {
        IndexedAlgebra::build(&[2], &[0.5, 0.5]).unwrap()
    }

    #[test]
    fn delta_two_singleton_blocks() {
        // (†): each singleton block gives q^{-4} = 2, so delta^2 = 2.
        let alg = c2_uniform();
        assert!((alg.delta().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn delta_single_m2_block() {
        // Tr(B^{-4}) = 2 + 2 = 4.
        let alg = m2_uniform();
        assert!((alg.delta().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn delta_one_dimensional() {
        let alg = IndexedAlgebra::build(&[1], &[1.0]).unwrap();
        assert!((alg.delta().unwrap() - 1.0).abs() < 1e-12);
        let one = Tensor::unit(&alg, Space::Loop(1));
        let phi = form_value(&alg, FormKind::PhiTilde, &one).unwrap();
        assert!((phi - c_one()).norm() < 1e-12);
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(IndexedAlgebra::build(&[1, 1], &[0.5, -0.5]).is_err());
        assert!(IndexedAlgebra::build(&[1, 1], &[0.5]).is_err());
        assert!(IndexedAlgebra::build(&[2], &[0.3, 0.3, 0.4]).is_err());
    }

    #[test]
    fn no_delta_when_dagger_fails() {
        // (‡) holds but (†) differs across blocks.
        let alg = IndexedAlgebra::build(&[1, 1], &[0.25, 0.75]).unwrap();
        assert!(alg.delta().is_none());
        assert!(alg.require_delta().is_err());
    }

    #[test]
    fn leg_bijection_roundtrip() {
        let key: Key = (row_of(&[0, 1, 2, 3]), row_of(&[4, 5, 6, 7]));
        let legs: Vec<(Label, Label)> =
            (0..4).map(|m| IndexedAlgebra::leg(&key, m)).collect();
        assert_eq!(legs, vec![(0, 1), (2, 3), (7, 6), (5, 4)]);
        assert_eq!(IndexedAlgebra::key_from_legs(&legs), key);
    }

    #[test]
    fn unit_of_c2_square() {
        // A diagonal degree-2 loop (l1 l2|l1 l2) needs l1 ~ l2, which for
        // 1x1 blocks forces l1 = l2: the unit is E_{00,00} + E_{11,11}.
        let alg = c2_uniform();
        let one = Tensor::unit(&alg, Space::Loop(2));
        assert_eq!(one.nnz(), 2);
        let sq = one.mul(&one).unwrap();
        assert!(sq.max_diff(&one).0 < 1e-14);
        assert!(one.adjoint().max_diff(&one).0 < 1e-14);
    }

    #[test]
    fn degree_one_product_rule() {
        let alg = m2_uniform();
        let e01 = Tensor::basis_elem(&alg, Space::Loop(1), (row_of(&[0]), row_of(&[1]))).unwrap();
        let e11 = Tensor::basis_elem(&alg, Space::Loop(1), (row_of(&[1]), row_of(&[1]))).unwrap();
        let p = e01.mul(&e11).unwrap();
        assert_eq!(p.get(&(row_of(&[0]), row_of(&[1]))), c_one());
        assert_eq!(p.nnz(), 1);
        let q = e11.mul(&e01).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn loop_weight_values() {
        let alg = IndexedAlgebra::build(&[1, 1], &[2.0, 1.0]).unwrap();
        // q_{(1)} = q_1
        assert!((alg.loop_weight(&[0]).unwrap() - 2f64.powf(0.25)).abs() < 1e-12);
        // q_{(1,2)} = q_1 q_2^{-1} = 2^{1/4}
        assert!((alg.loop_weight(&[0, 1]).unwrap() - 2f64.powf(0.25)).abs() < 1e-12);
        assert!(alg.loop_weight(&[9]).is_err());
        let uni = IndexedAlgebra::build(&[2], &[1.0, 1.0]).unwrap();
        assert!((uni.loop_weight(&[0, 1, 1, 0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_tilde_1_equals_phi() {
        let alg = IndexedAlgebra::build(&[2], &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        for (i, j) in alg.units() {
            let x =
                Tensor::basis_elem(&alg, Space::Loop(1), (row_of(&[i]), row_of(&[j]))).unwrap();
            let v = form_value(&alg, FormKind::PhiTilde, &x).unwrap();
            let expect = if i == j { alg.weight(i) } else { 0.0 };
            assert!((v - C64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn phi_n_unital_up_to_degree_four() {
        let alg = c2_uniform();
        for n in 1..=4 {
            let one = Tensor::unit(&alg, Space::Loop(n));
            let v = form_value(&alg, FormKind::Phi, &one).unwrap();
            assert!((v - c_one()).norm() < 1e-12, "phi_{n}(1) = {v}");
        }
    }

    #[test]
    fn psi2_kills_off_diagonal() {
        let alg = m2_uniform();
        let x = Tensor::basis_elem(&alg, Space::Loop(2), (row_of(&[0, 0]), row_of(&[1, 1])))
            .unwrap();
        let v = form_value(&alg, FormKind::Psi2, &x).unwrap();
        assert_eq!(v, c_zero());
    }

    #[test]
    fn theta_identity_for_tracial_state() {
        let alg = m2_uniform();
        let b = Basis::new(&alg, Space::Loop(2));
        for k in &b.keys {
            let x = Tensor::basis_elem(&alg, Space::Loop(2), k.clone()).unwrap();
            let tx = theta(&alg, &x).unwrap();
            assert!(tx.max_diff(&x).0 < 1e-12);
        }
    }

    #[test]
    fn theta_scales_degree_one_units() {
        let alg = IndexedAlgebra::build(&[2], &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        let x = Tensor::basis_elem(&alg, Space::Loop(1), (row_of(&[0]), row_of(&[1]))).unwrap();
        let tx = theta(&alg, &x).unwrap();
        let expect = alg.weight(0) / alg.weight(1);
        assert!((tx.get(&(row_of(&[0]), row_of(&[1]))) - C64::new(expect, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn modular_property_of_theta() {
        // phi(ab) = phi(b theta(a)) on all basis pairs of A.
        let alg = IndexedAlgebra::build(&[2, 1], &[0.2, 0.3, 0.5]).unwrap();
        let basis = Basis::new(&alg, Space::Loop(1));
        for ka in &basis.keys {
            for kb in &basis.keys {
                let a = Tensor::basis_elem(&alg, Space::Loop(1), ka.clone()).unwrap();
                let b = Tensor::basis_elem(&alg, Space::Loop(1), kb.clone()).unwrap();
                let lhs = form_value(&alg, FormKind::PhiTilde, &a.mul(&b).unwrap()).unwrap();
                let rhs = form_value(
                    &alg,
                    FormKind::PhiTilde,
                    &b.mul(&theta(&alg, &a).unwrap()).unwrap(),
                )
                .unwrap();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn p_weights_values() {
        // blocks [2], weights (1/3, 2/3): delta^2 = 4.5, p^4 = (2/3, 1/3).
        let alg = IndexedAlgebra::build(&[2], &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!((alg.delta().unwrap().powi(2) - 4.5).abs() < 1e-12);
        let p = alg.p_weights().unwrap();
        assert!((p[0].powi(4) - 2.0 / 3.0).abs() < 1e-12);
        assert!((p[1].powi(4) - 1.0 / 3.0).abs() < 1e-12);
        // p analogues of (†), (‡)
        let total: f64 = p.iter().map(|x| x.powi(4)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let inv: f64 = p.iter().map(|x| x.powi(-4)).sum();
        assert!((inv - 4.5).abs() < 1e-12);
        // Perron-Frobenius case: p = q
        let uni = m2_uniform();
        let pu = uni.p_weights().unwrap();
        for (i, p) in pu.iter().enumerate() {
            assert!((p - uni.q(i as Label)).abs() < 1e-12);
        }
    }

    #[test]
    fn loop_power_row_counts() {
        let alg = c2_uniform();
        for (n, expect) in [(1usize, 2usize), (2, 2), (3, 4), (4, 4)] {
            let (_, rows) = loop_power(&alg, n).unwrap();
            assert_eq!(rows.len(), expect, "degree {n}");
        }
        let m2 = m2_uniform();
        let (derived, rows) = loop_power(&m2, 2).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(derived.block_sizes(), &[4]);
        assert_eq!(derived.dim(), Basis::new(&m2, Space::Loop(2)).len());
    }

    fn arb_tensor(alg: IndexedAlgebra, n: usize) -> impl Strategy<Value = Tensor> {
        let basis = Basis::new(&alg, Space::Loop(n));
        let d = basis.len();
        proptest::collection::vec((0..d, -1.0f64..1.0, -1.0f64..1.0), 1..=d.min(6)).prop_map(
            move |entries| {
                let mut t = Tensor::zero(Space::Loop(n));
                for (i, re, im) in entries {
                    t.add_term(basis.keys[i].clone(), C64::new(re, im));
                }
                t
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_associative(
            x in arb_tensor(c2_uniform(), 2),
            y in arb_tensor(c2_uniform(), 2),
            z in arb_tensor(c2_uniform(), 2),
        ) {
            let lhs = x.mul(&y).unwrap().mul(&z).unwrap();
            let rhs = x.mul(&y.mul(&z).unwrap()).unwrap();
            prop_assert!(lhs.max_diff(&rhs).0 < 1e-12);
        }

        #[test]
        fn unit_law_and_involution(x in arb_tensor(m2_uniform(), 2)) {
            let alg = m2_uniform();
            let one = Tensor::unit(&alg, Space::Loop(2));
            prop_assert!(one.mul(&x).unwrap().max_diff(&x).0 < 1e-12);
            prop_assert!(x.mul(&one).unwrap().max_diff(&x).0 < 1e-12);
            prop_assert!(x.adjoint().adjoint().max_diff(&x).0 < 1e-12);
        }

        #[test]
        fn involution_antihomomorphism(
            x in arb_tensor(m2_uniform(), 2),
            y in arb_tensor(m2_uniform(), 2),
        ) {
            let lhs = x.mul(&y).unwrap().adjoint();
            let rhs = y.adjoint().mul(&x.adjoint()).unwrap();
            prop_assert!(lhs.max_diff(&rhs).0 < 1e-12);
        }

        #[test]
        fn markov_form_positive(x in arb_tensor(m2_uniform(), 2)) {
            let alg = m2_uniform();
            let xx = x.adjoint().mul(&x).unwrap();
            let v = form_value(&alg, FormKind::Phi, &xx).unwrap();
            prop_assert!(v.im.abs() < 1e-10);
            prop_assert!(v.re > -1e-10);
        }
    }
}
