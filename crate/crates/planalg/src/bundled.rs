//! The built-in example coactions used by tests and shipped as spec files.

use std::sync::Arc;

use crate::algebra::{c_one, c_zero, IndexedAlgebra};
use crate::coaction::{CoactionTable, Unit, VKey};
use crate::group::{cyclic, symmetric3, symmetric3_perm, FiniteGroup};
use crate::hopf::{HopfData, HVec};
use crate::linalg::{Mat, C64};

/// Permutation action on a diagonal algebra: `alpha_g(e_{xx}) = e_{g(x)g(x)}`.
fn perm_action_mats(group: &FiniteGroup, perms: &[Vec<usize>], n: usize) -> Vec<Mat> {
    // units of C^n in order: (0,0), (1,1), ..., matching alg.units()
    perms
        .iter()
        .map(|p| {
            let mut m = Mat::zeros(n, n);
            for (x, &px) in p.iter().enumerate() {
                m[(px, x)] = c_one();
            }
            m
        })
        .collect::<Vec<_>>()
        .into_iter()
        .take(group.order())
        .collect()
}

/// The flip group Z2 acting on C^2 by swapping the two points.
pub fn flip_action_mats() -> (FiniteGroup, Vec<Mat>) {
    let g = cyclic(2);
    let perms = vec![vec![0, 1], vec![1, 0]];
    let mats = perm_action_mats(&g, &perms, 2);
    (g, mats)
}

/// S3 permuting the three points of C^3.
pub fn s3_action_mats() -> (FiniteGroup, Vec<Mat>) {
    let g = symmetric3();
    let perms: Vec<Vec<usize>> = (0..6).map(|e| symmetric3_perm(e).to_vec()).collect();
    let mats = perm_action_mats(&g, &perms, 3);
    (g, mats)
}

/// Z2 acting on M2 by conjugation with diag(1, -1); in unit coordinates
/// (00, 01, 10, 11) the nontrivial element is diag(1, -1, -1, 1).
pub fn m2_ad_action_mats() -> (FiniteGroup, Vec<Mat>) {
    let g = cyclic(2);
    let mut flip = Mat::identity(4);
    flip[(1, 1)] = C64::new(-1.0, 0.0);
    flip[(2, 2)] = C64::new(-1.0, 0.0);
    (g, vec![Mat::identity(4), flip])
}

/// Trivial coaction `v(a) = a ⊗ 1` of `C(Z2)` on `C^2` (uniform state).
pub fn trivial_c2() -> CoactionTable {
    let alg = Arc::new(IndexedAlgebra::build(&[1, 1], &[0.5, 0.5]).unwrap());
    let hopf = Arc::new(HopfData::function_algebra(&cyclic(2)));
    let one = hopf.unit_vec();
    CoactionTable::from_linear_map(alg, hopf, move |u: Unit| vec![(u, one.clone())]).unwrap()
}

/// The Z2 flip on C^2 with the uniform state.
pub fn z2_flip() -> CoactionTable {
    let alg = Arc::new(IndexedAlgebra::build(&[1, 1], &[0.5, 0.5]).unwrap());
    let (g, mats) = flip_action_mats();
    CoactionTable::from_group_action(alg, &g, &mats).unwrap()
}

/// The flip with a non-invariant state (negative control): built through the
/// raw linear map, so Prop 1.5 holds but Prop 1.6 fails.
pub fn z2_flip_nonuniform() -> CoactionTable {
    let alg = Arc::new(IndexedAlgebra::build(&[1, 1], &[1.0 / 3.0, 2.0 / 3.0]).unwrap());
    let hopf = Arc::new(HopfData::function_algebra(&cyclic(2)));
    CoactionTable::from_linear_map(alg, hopf, |u: Unit| {
        let flipped = (1 - u.0, 1 - u.1);
        vec![
            (u, vec![c_one(), c_zero()]),
            (flipped, vec![c_zero(), c_one()]),
        ]
    })
    .unwrap()
}

/// S3 permuting C^3 with the uniform state.
pub fn s3_c3() -> CoactionTable {
    let alg = Arc::new(IndexedAlgebra::build(&[1, 1, 1], &[1.0 / 3.0; 3]).unwrap());
    let (g, mats) = s3_action_mats();
    CoactionTable::from_group_action(alg, &g, &mats).unwrap()
}

/// The translation coaction `v = Δ` on `C(Z2)`.
pub fn translation_cz2() -> CoactionTable {
    let hopf = Arc::new(HopfData::function_algebra(&cyclic(2)));
    CoactionTable::translation(hopf).unwrap()
}

/// Ad(diag(1,-1)) of Z2 on M2 with the normalized trace.
pub fn m2_ad() -> CoactionTable {
    let alg = Arc::new(IndexedAlgebra::build(&[2], &[0.5, 0.5]).unwrap());
    let (g, mats) = m2_ad_action_mats();
    CoactionTable::from_group_action(alg, &g, &mats).unwrap()
}

/// Ad(diag(1,-1)) of Z2 on M2 with non-tracial state (1/3, 2/3); still a
/// state-preserving coaction, but the modularity condition fails.
pub fn m2_ad_nonuniform() -> CoactionTable {
    let alg = Arc::new(IndexedAlgebra::build(&[2], &[1.0 / 3.0, 2.0 / 3.0]).unwrap());
    let (g, mats) = m2_ad_action_mats();
    CoactionTable::from_group_action(alg, &g, &mats).unwrap()
}

/// Names and builders of the bundled examples, in report order.
pub fn all_examples() -> Vec<(&'static str, CoactionTable)> {
    vec![
        ("trivial_c2", trivial_c2()),
        ("z2_flip", z2_flip()),
        ("s3_c3", s3_c3()),
        ("translation_cz2", translation_cz2()),
        ("m2_ad", m2_ad()),
    ]
}

/// Group data backing each bundled group example, for the averaging oracle.
pub fn oracle_data(name: &str) -> Option<(FiniteGroup, Vec<Mat>)> {
    match name {
        "z2_flip" => Some(flip_action_mats()),
        "s3_c3" => Some(s3_action_mats()),
        "m2_ad" => Some(m2_ad_action_mats()),
        "translation_cz2" => {
            // right translation action of Z2 on C(Z2) = C^2
            Some(flip_action_mats())
        }
        "trivial_c2" => {
            let g = cyclic(2);
            Some((g, vec![Mat::identity(2), Mat::identity(2)]))
        }
        _ => None,
    }
}

/// Export a table's entries for spec-file round trips.
pub fn export_entries(c: &CoactionTable) -> Vec<(VKey, HVec)> {
    c.entries().map(|(k, h)| (*k, h.clone())).collect()
}
