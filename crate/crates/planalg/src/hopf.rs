//! Finite dimensional Hopf *-algebras by structure constants, with the Haar
//! functional, modular automorphism and the character family in the Kac case.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::linalg::{nullspace, Mat};

pub type C64 = Complex64;
pub type HVec = Vec<C64>;

fn cz() -> C64 {
    C64::new(0.0, 0.0)
}

fn co() -> C64 {
    C64::new(1.0, 0.0)
}

/// Structure constants of `(H, m, u, Δ, ε, S, *)` over a fixed basis.
///
/// Layout: `m[(a*d + b)*d + c]` is the coefficient of `e_c` in `e_a e_b`;
/// `delta[(a*d + b)*d + c]` the coefficient of `e_b ⊗ e_c` in `Δ(e_a)`;
/// `s[a*d + b]` the coefficient of `e_b` in `S(e_a)`, likewise `star` (the
/// conjugation of coefficients is applied when evaluating `*`).
#[derive(Debug, Clone, PartialEq)]
pub struct HopfData {
    pub dim: usize,
    pub labels: Vec<String>,
    m: Vec<C64>,
    unit: HVec,
    delta: Vec<C64>,
    eps: HVec,
    s: Vec<C64>,
    star: Vec<C64>,
}

/// Per-axiom max residuals for a `HopfData`.
#[derive(Debug, Clone)]
pub struct HopfAxiomReport {
    pub assoc: f64,
    pub unit_law: f64,
    pub coassoc: f64,
    pub counit_law: f64,
    pub antipode_law: f64,
    pub delta_multiplicative: f64,
    pub star_involutive: f64,
    pub star_antimultiplicative: f64,
    pub delta_star: f64,
    pub eps_star: f64,
    pub s_star_squared: f64,
    pub s_squared_minus_id: f64,
    pub cocommutator: f64,
    pub commutator: f64,
}

impl HopfAxiomReport {
    pub fn max_axiom_residual(&self) -> f64 {
        [
            self.assoc,
            self.unit_law,
            self.coassoc,
            self.counit_law,
            self.antipode_law,
            self.delta_multiplicative,
            self.star_involutive,
            self.star_antimultiplicative,
            self.delta_star,
            self.eps_star,
            self.s_star_squared,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn is_kac(&self, tol: f64) -> bool {
        self.s_squared_minus_id < tol
    }
}

impl HopfData {
    pub fn from_constants(
        dim: usize,
        labels: Vec<String>,
        m: Vec<C64>,
        unit: HVec,
        delta: Vec<C64>,
        eps: HVec,
        s: Vec<C64>,
        star: Vec<C64>,
    ) -> Result<Self> {
        if dim == 0 || dim > 64 {
            return Err(Error::Hopf(format!("dimension {dim} out of range 1..=64")));
        }
        let sizes = [
            (m.len(), dim * dim * dim, "m"),
            (delta.len(), dim * dim * dim, "delta"),
            (unit.len(), dim, "unit"),
            (eps.len(), dim, "eps"),
            (s.len(), dim * dim, "s"),
            (star.len(), dim * dim, "star"),
        ];
        for (got, want, name) in sizes {
            if got != want {
                return Err(Error::Hopf(format!("{name}: expected {want} constants, got {got}")));
            }
        }
        let labels = if labels.len() == dim {
            labels
        } else {
            (0..dim).map(|i| format!("e{i}")).collect()
        };
        Ok(HopfData { dim, labels, m, unit, delta, eps, s, star })
    }

    /// Function algebra C(G) with the point-mass basis.
    pub fn function_algebra(g: &FiniteGroup) -> Self {
        let d = g.order();
        let mut m = vec![cz(); d * d * d];
        let mut delta = vec![cz(); d * d * d];
        let mut s = vec![cz(); d * d];
        let mut star = vec![cz(); d * d];
        let mut eps = vec![cz(); d];
        let unit = vec![co(); d];
        for a in 0..d {
            m[(a * d + a) * d + a] = co();
            s[a * d + g.inv(a)] = co();
            star[a * d + a] = co();
            for b in 0..d {
                for c in 0..d {
                    if g.mul(b, c) == a {
                        delta[(a * d + b) * d + c] = co();
                    }
                }
            }
        }
        eps[g.identity()] = co();
        let labels = (0..d).map(|i| format!("d{i}")).collect();
        HopfData { dim: d, labels, m, unit, delta, eps, s, star }
    }

    /// Group algebra C[G] with the grouplike basis.
    pub fn group_algebra(g: &FiniteGroup) -> Self {
        let d = g.order();
        let mut m = vec![cz(); d * d * d];
        let mut delta = vec![cz(); d * d * d];
        let mut s = vec![cz(); d * d];
        let mut star = vec![cz(); d * d];
        let eps = vec![co(); d];
        let mut unit = vec![cz(); d];
        unit[g.identity()] = co();
        for a in 0..d {
            delta[(a * d + a) * d + a] = co();
            s[a * d + g.inv(a)] = co();
            star[a * d + g.inv(a)] = co();
            for b in 0..d {
                m[(a * d + b) * d + g.mul(a, b)] = co();
            }
        }
        let labels = (0..d).map(|i| format!("g{i}")).collect();
        HopfData { dim: d, labels, m, unit, delta, eps, s, star }
    }

    pub fn unit_vec(&self) -> HVec {
        self.unit.clone()
    }

    pub fn eps_vec(&self) -> HVec {
        self.eps.clone()
    }

    pub fn mul(&self, x: &[C64], y: &[C64]) -> HVec {
        let d = self.dim;
        let mut out = vec![cz(); d];
        for a in 0..d {
            if x[a].norm_sqr() == 0.0 {
                continue;
            }
            for b in 0..d {
                if y[b].norm_sqr() == 0.0 {
                    continue;
                }
                let f = x[a] * y[b];
                for c in 0..d {
                    let k = self.m[(a * d + b) * d + c];
                    if k.norm_sqr() != 0.0 {
                        out[c] += f * k;
                    }
                }
            }
        }
        out
    }

    /// Product in H ⊗ H of two `d^2`-vectors (index `p*d + q`).
    pub fn mul2(&self, x: &[C64], y: &[C64]) -> HVec {
        let d = self.dim;
        let mut out = vec![cz(); d * d];
        for p1 in 0..d {
            for q1 in 0..d {
                let xv = x[p1 * d + q1];
                if xv.norm_sqr() == 0.0 {
                    continue;
                }
                for p2 in 0..d {
                    for q2 in 0..d {
                        let yv = y[p2 * d + q2];
                        if yv.norm_sqr() == 0.0 {
                            continue;
                        }
                        let f = xv * yv;
                        for c1 in 0..d {
                            let k1 = self.m[(p1 * d + p2) * d + c1];
                            if k1.norm_sqr() == 0.0 {
                                continue;
                            }
                            for c2 in 0..d {
                                let k2 = self.m[(q1 * d + q2) * d + c2];
                                if k2.norm_sqr() != 0.0 {
                                    out[c1 * d + c2] += f * k1 * k2;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn kron(&self, x: &[C64], y: &[C64]) -> HVec {
        let d = self.dim;
        let mut out = vec![cz(); d * d];
        for a in 0..d {
            if x[a].norm_sqr() == 0.0 {
                continue;
            }
            for b in 0..d {
                out[a * d + b] = x[a] * y[b];
            }
        }
        out
    }

    pub fn eps_of(&self, x: &[C64]) -> C64 {
        x.iter().zip(&self.eps).map(|(v, e)| v * e).sum()
    }

    /// Δ(x) as a `d^2` vector.
    pub fn delta_of(&self, x: &[C64]) -> HVec {
        let d = self.dim;
        let mut out = vec![cz(); d * d];
        for a in 0..d {
            if x[a].norm_sqr() == 0.0 {
                continue;
            }
            for b in 0..d {
                for c in 0..d {
                    let k = self.delta[(a * d + b) * d + c];
                    if k.norm_sqr() != 0.0 {
                        out[b * d + c] += x[a] * k;
                    }
                }
            }
        }
        out
    }

    pub fn s_of(&self, x: &[C64]) -> HVec {
        let d = self.dim;
        let mut out = vec![cz(); d];
        for a in 0..d {
            if x[a].norm_sqr() == 0.0 {
                continue;
            }
            for b in 0..d {
                out[b] += x[a] * self.s[a * d + b];
            }
        }
        out
    }

    pub fn star_of(&self, x: &[C64]) -> HVec {
        let d = self.dim;
        let mut out = vec![cz(); d];
        for a in 0..d {
            if x[a].norm_sqr() == 0.0 {
                continue;
            }
            for b in 0..d {
                out[b] += x[a].conj() * self.star[a * d + b];
            }
        }
        out
    }

    fn basis_vec(&self, a: usize) -> HVec {
        let mut v = vec![cz(); self.dim];
        v[a] = co();
        v
    }

    fn max_abs(x: &[C64]) -> f64 {
        x.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn diff(x: &[C64], y: &[C64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Per-axiom residual report; never fails.
    pub fn check_axioms(&self) -> HopfAxiomReport {
        let d = self.dim;
        let mut r = HopfAxiomReport {
            assoc: 0.0,
            unit_law: 0.0,
            coassoc: 0.0,
            counit_law: 0.0,
            antipode_law: 0.0,
            delta_multiplicative: 0.0,
            star_involutive: 0.0,
            star_antimultiplicative: 0.0,
            delta_star: 0.0,
            eps_star: 0.0,
            s_star_squared: 0.0,
            s_squared_minus_id: 0.0,
            cocommutator: 0.0,
            commutator: 0.0,
        };
        let basis: Vec<HVec> = (0..d).map(|a| self.basis_vec(a)).collect();
        for a in 0..d {
            for b in 0..d {
                let ab = self.mul(&basis[a], &basis[b]);
                let ba = self.mul(&basis[b], &basis[a]);
                r.commutator = r.commutator.max(Self::diff(&ab, &ba));
                for c in 0..d {
                    let lhs = self.mul(&ab, &basis[c]);
                    let rhs = self.mul(&basis[a], &self.mul(&basis[b], &basis[c]));
                    r.assoc = r.assoc.max(Self::diff(&lhs, &rhs));
                }
                // Δ multiplicative: Δ(ab) = Δ(a)Δ(b) in H⊗H
                let dab = self.delta_of(&ab);
                let dd = self.mul2(&self.delta_of(&basis[a]), &self.delta_of(&basis[b]));
                r.delta_multiplicative = r.delta_multiplicative.max(Self::diff(&dab, &dd));
                // (ab)* = b* a*
                let star_ab = self.star_of(&ab);
                let bs_as = self.mul(&self.star_of(&basis[b]), &self.star_of(&basis[a]));
                r.star_antimultiplicative =
                    r.star_antimultiplicative.max(Self::diff(&star_ab, &bs_as));
            }
            r.unit_law = r
                .unit_law
                .max(Self::diff(&self.mul(&self.unit, &basis[a]), &basis[a]))
                .max(Self::diff(&self.mul(&basis[a], &self.unit), &basis[a]));

            // coassociativity on e_a, as d^3 arrays
            let da = self.delta_of(&basis[a]);
            let mut lhs3 = vec![cz(); d * d * d];
            let mut rhs3 = vec![cz(); d * d * d];
            for p in 0..d {
                for q in 0..d {
                    let v = da[p * d + q];
                    if v.norm_sqr() == 0.0 {
                        continue;
                    }
                    let dq = self.delta_of(&basis[q]);
                    for x in 0..d {
                        for y in 0..d {
                            lhs3[(p * d + x) * d + y] += v * dq[x * d + y];
                        }
                    }
                    let dp = self.delta_of(&basis[p]);
                    for x in 0..d {
                        for y in 0..d {
                            rhs3[(x * d + y) * d + q] += v * dp[x * d + y];
                        }
                    }
                }
            }
            r.coassoc = r.coassoc.max(Self::diff(&lhs3, &rhs3));

            // counit laws
            let mut left = vec![cz(); d];
            let mut right = vec![cz(); d];
            for p in 0..d {
                for q in 0..d {
                    let v = da[p * d + q];
                    if v.norm_sqr() == 0.0 {
                        continue;
                    }
                    left[q] += v * self.eps[p];
                    right[p] += v * self.eps[q];
                }
            }
            r.counit_law =
                r.counit_law.max(Self::diff(&left, &basis[a])).max(Self::diff(&right, &basis[a]));

            // antipode law m(S⊗id)Δ = m(id⊗S)Δ = ε(.)1
            let mut sconv = vec![cz(); d];
            let mut conv_s = vec![cz(); d];
            for p in 0..d {
                for q in 0..d {
                    let v = da[p * d + q];
                    if v.norm_sqr() == 0.0 {
                        continue;
                    }
                    let sp = self.s_of(&basis[p]);
                    let term = self.mul(&sp, &basis[q]);
                    for c in 0..d {
                        sconv[c] += v * term[c];
                    }
                    let sq = self.s_of(&basis[q]);
                    let term2 = self.mul(&basis[p], &sq);
                    for c in 0..d {
                        conv_s[c] += v * term2[c];
                    }
                }
            }
            let target: HVec = self.unit.iter().map(|u| u * self.eps[a]).collect();
            r.antipode_law =
                r.antipode_law.max(Self::diff(&sconv, &target)).max(Self::diff(&conv_s, &target));

            // * compatibility
            let sa = self.star_of(&basis[a]);
            let ssa = self.star_of(&sa);
            r.star_involutive = r.star_involutive.max(Self::diff(&ssa, &basis[a]));
            let d_star = self.delta_of(&sa);
            let mut star_d = vec![cz(); d * d];
            for p in 0..d {
                for q in 0..d {
                    let v = da[p * d + q];
                    if v.norm_sqr() == 0.0 {
                        continue;
                    }
                    let sp = self.star_of(&basis[p]);
                    let sq = self.star_of(&basis[q]);
                    for x in 0..d {
                        for y in 0..d {
                            star_d[x * d + y] += v.conj() * sp[x] * sq[y];
                        }
                    }
                }
            }
            r.delta_star = r.delta_star.max(Self::diff(&d_star, &star_d));
            r.eps_star = r.eps_star.max((self.eps_of(&sa) - self.eps_of(&basis[a]).conj()).norm());

            // S ∘ * ∘ S ∘ * = id
            let s_star_sq = self.s_of(&self.star_of(&self.s_of(&sa)));
            r.s_star_squared = r.s_star_squared.max(Self::diff(&s_star_sq, &basis[a]));

            // S^2 vs id (Kac flag)
            let s2 = self.s_of(&self.s_of(&basis[a]));
            r.s_squared_minus_id = r.s_squared_minus_id.max(Self::diff(&s2, &basis[a]));

            // cocommutativity flag: Δ vs flip∘Δ
            let mut flipped = vec![cz(); d * d];
            for p in 0..d {
                for q in 0..d {
                    flipped[q * d + p] = da[p * d + q];
                }
            }
            r.cocommutator = r.cocommutator.max(Self::diff(&da, &flipped));
        }
        r
    }

    /// The Haar functional: the unique unital solution of
    /// `(h⊗id)Δ = (id⊗h)Δ = h(.)1`, found by solving the invariance system.
    pub fn haar(&self) -> Result<HVec> {
        let d = self.dim;
        let mut rows: Vec<Vec<C64>> = Vec::with_capacity(2 * d * d);
        for b in 0..d {
            let db = self.delta_of(&self.basis_vec(b));
            for r in 0..d {
                // sum_c Δ[b](c, r) h_c = u_r h_b
                let mut row = vec![cz(); d];
                for c in 0..d {
                    row[c] += db[c * d + r];
                }
                row[b] -= self.unit[r];
                rows.push(row);
                // sum_c Δ[b](r, c) h_c = u_r h_b
                let mut row2 = vec![cz(); d];
                for c in 0..d {
                    row2[c] += db[r * d + c];
                }
                row2[b] -= self.unit[r];
                rows.push(row2);
            }
        }
        let ns = nullspace(&rows, d, 1e-9);
        if ns.len() != 1 {
            return Err(Error::Hopf(format!(
                "Haar invariance system has solution space of dimension {} (want 1)",
                ns.len()
            )));
        }
        let h = ns.into_iter().next().unwrap();
        let h1: C64 = (0..d).map(|a| self.unit[a] * h[a]).sum();
        if h1.norm() < 1e-12 {
            return Err(Error::Hopf("Haar candidate vanishes on 1".into()));
        }
        Ok(h.into_iter().map(|v| v / h1).collect())
    }

    pub fn haar_of(&self, h: &[C64], x: &[C64]) -> C64 {
        x.iter().zip(h).map(|(v, hv)| v * hv).sum()
    }

    /// The modular automorphism: the unique linear map with
    /// `h(ab) = h(b σ(a))`. Returned as a row table like `s`.
    pub fn modular_sigma(&self) -> Result<Vec<C64>> {
        let d = self.dim;
        let h = self.haar()?;
        let mut gram = Mat::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let ab = self.mul(&self.basis_vec(a), &self.basis_vec(b));
                gram[(a, b)] = self.haar_of(&h, &ab);
            }
        }
        let mut sigma = vec![cz(); d * d];
        for a in 0..d {
            // solve sum_c gram[b][c] x_c = gram[a][b] for all b
            let rhs: Vec<C64> = (0..d).map(|b| gram[(a, b)]).collect();
            let x = gram
                .solve(&rhs, 1e-12)
                .ok_or_else(|| Error::Hopf("modular system inconsistent (h degenerate)".into()))?;
            for c in 0..d {
                sigma[a * d + c] = x[c];
            }
        }
        Ok(sigma)
    }

    pub fn apply_table(&self, table: &[C64], x: &[C64]) -> HVec {
        let d = self.dim;
        let mut out = vec![cz(); d];
        for a in 0..d {
            if x[a].norm_sqr() == 0.0 {
                continue;
            }
            for b in 0..d {
                out[b] += x[a] * table[a * d + b];
            }
        }
        out
    }

    /// `f_z`. Finite dimensional Hopf C*-algebras are Kac, where the whole
    /// family collapses to the counit; non-Kac input is rejected.
    pub fn character_f(&self, _z: f64) -> Result<HVec> {
        let rep = self.check_axioms();
        if !rep.is_kac(crate::algebra::DEFAULT_TOL) {
            return Err(Error::Hopf(
                "non-Kac finite-dimensional input unsupported: S^2 != id".into(),
            ));
        }
        Ok(self.eps.clone())
    }

    /// Residuals of the degenerate character-family identities:
    /// `f_0 = ε`, `(f_z ⊗ f_t)Δ = f_{z+t}`, `f_z S = f_{-z}`,
    /// `S^2 = (f_1 ⊗ id ⊗ f_{-1})Δ^{(2)}` and
    /// `σ = (f_1 ⊗ id ⊗ f_1)Δ^{(2)}` against the solved modular map.
    pub fn check_f_conditions(&self) -> Result<Vec<(String, f64)>> {
        let d = self.dim;
        let f = self.character_f(1.0)?;
        let mut out = Vec::new();
        out.push(("f0 = eps".into(), Self::diff(&f, &self.eps)));

        let mut conv = 0.0f64;
        let mut fs = 0.0f64;
        let mut sandwich_s2 = 0.0f64;
        let mut sandwich_sigma = 0.0f64;
        let sigma = self.modular_sigma()?;
        for a in 0..d {
            let e_a = self.basis_vec(a);
            let da = self.delta_of(&e_a);
            // (f ⊗ f)Δ(e_a) vs f(e_a)
            let mut acc = cz();
            for p in 0..d {
                for q in 0..d {
                    acc += da[p * d + q] * f[p] * f[q];
                }
            }
            conv = conv.max((acc - f[a]).norm());
            // f∘S = f
            let sa = self.s_of(&e_a);
            let fsa: C64 = sa.iter().zip(&f).map(|(v, fv)| v * fv).sum();
            fs = fs.max((fsa - f[a]).norm());
            // (f ⊗ id ⊗ f)Δ^{(2)}(e_a)
            let mut mid = vec![cz(); d];
            for p in 0..d {
                for q in 0..d {
                    let v = da[p * d + q];
                    if v.norm_sqr() == 0.0 {
                        continue;
                    }
                    let dq = self.delta_of(&self.basis_vec(q));
                    for x in 0..d {
                        for y in 0..d {
                            mid[x] += v * dq[x * d + y] * f[p] * f[y];
                        }
                    }
                }
            }
            let s2 = self.s_of(&sa);
            sandwich_s2 = sandwich_s2.max(Self::diff(&mid, &s2));
            let sig_a = self.apply_table(&sigma, &e_a);
            sandwich_sigma = sandwich_sigma.max(Self::diff(&mid, &sig_a));
        }
        out.push(("(f_z x f_t)Delta = f_{z+t}".into(), conv));
        out.push(("f_z S = f_{-z}".into(), fs));
        out.push(("S^2 = (f_1 x id x f_{-1})Delta2".into(), sandwich_s2));
        out.push(("sigma = (f_1 x id x f_1)Delta2".into(), sandwich_sigma));
        Ok(out)
    }

    /// Max residual of `h(ab) - h(b σ(a))` for the solved σ, plus σ
    /// multiplicativity and unitality residuals.
    pub fn check_sigma(&self) -> Result<Vec<(String, f64)>> {
        let d = self.dim;
        let h = self.haar()?;
        let sigma = self.modular_sigma()?;
        let mut modular = 0.0f64;
        let mut mult = 0.0f64;
        for a in 0..d {
            let e_a = self.basis_vec(a);
            let sig_a = self.apply_table(&sigma, &e_a);
            for b in 0..d {
                let e_b = self.basis_vec(b);
                let lhs = self.haar_of(&h, &self.mul(&e_a, &e_b));
                let rhs = self.haar_of(&h, &self.mul(&e_b, &sig_a));
                modular = modular.max((lhs - rhs).norm());
                let sab = self.apply_table(&sigma, &self.mul(&e_a, &e_b));
                let sasb = self.mul(&sig_a, &self.apply_table(&sigma, &e_b));
                mult = mult.max(Self::diff(&sab, &sasb));
            }
        }
        let unit_fix = Self::diff(&self.apply_table(&sigma, &self.unit), &self.unit);
        Ok(vec![
            ("h(ab) = h(b sigma(a))".into(), modular),
            ("sigma multiplicative".into(), mult),
            ("sigma(1) = 1".into(), unit_fix),
        ])
    }

    /// Residuals of the Haar projection property: applying `(id⊗h)Δ` twice
    /// equals applying it once, on every basis element.
    pub fn check_haar_projection(&self) -> Result<f64> {
        let d = self.dim;
        let h = self.haar()?;
        let proj = |x: &[C64]| -> HVec {
            let dx = self.delta_of(x);
            let mut out = vec![cz(); d];
            for p in 0..d {
                for q in 0..d {
                    out[p] += dx[p * d + q] * h[q];
                }
            }
            out
        };
        let mut worst = 0.0f64;
        for a in 0..d {
            let e_a = self.basis_vec(a);
            let once = proj(&e_a);
            let twice = proj(&once);
            worst = worst.max(Self::diff(&once, &twice));
        }
        Ok(worst)
    }

    pub fn commutative(&self, tol: f64) -> bool {
        self.check_axioms().commutator < tol
    }
}

pub fn max_abs_vec(x: &[C64]) -> f64 {
    HopfData::max_abs(x)
}

pub fn diff_vec(x: &[C64], y: &[C64]) -> f64 {
    HopfData::diff(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, symmetric3};
    use rand::{Rng, SeedableRng};

    #[test]
    fn c_z2_axioms_clean_and_kac() {
        let h = HopfData::function_algebra(&cyclic(2));
        let rep = h.check_axioms();
        assert!(rep.max_axiom_residual() < 1e-12);
        assert!(rep.is_kac(1e-9));
        assert!(rep.commutator < 1e-12);
    }

    #[test]
    fn c_s3_function_algebra_commutative_not_cocommutative() {
        let h = HopfData::function_algebra(&symmetric3());
        let rep = h.check_axioms();
        assert!(rep.max_axiom_residual() < 1e-9);
        assert!(rep.commutator < 1e-12);
        assert!(rep.cocommutator > 0.5);
    }

    #[test]
    fn s3_group_algebra_noncommutative_kac() {
        let h = HopfData::group_algebra(&symmetric3());
        let rep = h.check_axioms();
        assert!(rep.max_axiom_residual() < 1e-9);
        assert!(rep.is_kac(1e-9));
        assert!(rep.commutator > 0.5);
    }

    #[test]
    fn z3_delta_of_point_mass_spreads() {
        // Δ(d_a) = sum over factorizations: 3 product point-masses each.
        let h = HopfData::function_algebra(&cyclic(3));
        for a in 0..3 {
            let mut x = vec![cz(); 3];
            x[a] = co();
            let dx = h.delta_of(&x);
            let n_nonzero = dx.iter().filter(|v| v.norm() > 0.5).count();
            assert_eq!(n_nonzero, 3);
        }
    }

    #[test]
    fn haar_uniform_on_function_algebra() {
        let h = HopfData::function_algebra(&cyclic(2));
        let haar = h.haar().unwrap();
        for v in &haar {
            assert!((v - C64::new(0.5, 0.0)).norm() < 1e-10);
        }
        let h3 = HopfData::function_algebra(&symmetric3());
        let haar3 = h3.haar().unwrap();
        for v in &haar3 {
            assert!((v - C64::new(1.0 / 6.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn haar_point_mass_on_group_algebra() {
        let g = symmetric3();
        let h = HopfData::group_algebra(&g);
        let haar = h.haar().unwrap();
        for (a, v) in haar.iter().enumerate() {
            let expect = if a == g.identity() { 1.0 } else { 0.0 };
            assert!((v - C64::new(expect, 0.0)).norm() < 1e-10);
        }
        // h(1) = 1
        let one = h.unit_vec();
        assert!((h.haar_of(&haar, &one) - co()).norm() < 1e-12);
    }

    #[test]
    fn haar_projection_idempotent_and_positive() {
        for h in [
            HopfData::function_algebra(&symmetric3()),
            HopfData::group_algebra(&symmetric3()),
        ] {
            assert!(h.check_haar_projection().unwrap() < 1e-10);
            let haar = h.haar().unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            for _ in 0..16 {
                let a: HVec = (0..h.dim)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let asa = h.mul(&h.star_of(&a), &a);
                let v = h.haar_of(&haar, &asa);
                assert!(v.im.abs() < 1e-10);
                assert!(v.re > -1e-10);
            }
        }
    }

    #[test]
    fn sigma_identity_for_kac_examples() {
        for h in [
            HopfData::function_algebra(&cyclic(2)),
            HopfData::group_algebra(&symmetric3()),
        ] {
            let sigma = h.modular_sigma().unwrap();
            let d = h.dim;
            let mut id = vec![cz(); d * d];
            for a in 0..d {
                id[a * d + a] = co();
            }
            assert!(diff_vec(&sigma, &id) < 1e-9);
            for (name, r) in h.check_sigma().unwrap() {
                assert!(r < 1e-9, "{name}: {r}");
            }
        }
    }

    #[test]
    fn f_conditions_degenerate_cleanly() {
        let h = HopfData::function_algebra(&symmetric3());
        for (name, r) in h.check_f_conditions().unwrap() {
            assert!(r < 1e-9, "{name}: {r}");
        }
        assert_eq!(h.character_f(0.25).unwrap(), h.eps_vec());
    }

    #[test]
    fn corrupted_delta_breaks_coassociativity() {
        let mut h = HopfData::function_algebra(&cyclic(2));
        h.delta[0] += C64::new(0.1, 0.0);
        let rep = h.check_axioms();
        assert!(rep.coassoc >= 0.01, "coassoc residual {}", rep.coassoc);
    }
}
