//! Ground *-algebras, states, the GNS construction, and finite realizations
//! of the inclusion `N ⊂ |A|` with its conditional expectation.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::algebra::AlgebraObject;
use crate::error::{Error, Result};
use crate::fusion::FusionData;
use crate::linalg::{self, c, identity, re, zeros, CMat, C64};
use crate::report::ValidationReport;
use crate::SimpleIndex;

/// Residual threshold for the GNS and realization identities.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Floor on the Gram spectrum before a state is rejected.
pub const STATE_FLOOR: f64 = -1e-9;

/// A finite-dimensional unital *-algebra on a fixed basis `e_0 … e_{d-1}`.
/// `mult[(c, a*d + b)]` is the `e_c` coefficient of `e_a e_b`, and the star
/// is antilinear: `x† = star · conj(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundAlgebra {
    pub labels: Vec<String>,
    pub mult: CMat,
    pub star: CMat,
    pub unit: Vec<C64>,
}

fn unit_vector(d: usize, p: usize) -> Vec<C64> {
    let mut v = vec![re(0.0); d];
    v[p] = re(1.0);
    v
}

fn col(v: &[C64]) -> CMat {
    CMat::from_column_slice(v.len(), 1, v)
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vec_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_vec<R: Rng>(d: usize, rng: &mut R) -> Vec<C64> {
    (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

impl GroundAlgebra {
    /// The unit fiber of an algebra object.
    pub fn from_algebra(data: &FusionData, a: &AlgebraObject) -> Self {
        let u = data.unit();
        let d = a.fibers[u];
        let labels = a
            .labels
            .get(u)
            .filter(|l| l.len() == d)
            .cloned()
            .unwrap_or_else(|| (0..d).map(|i| format!("e{i}")).collect());
        GroundAlgebra {
            labels,
            mult: a.block(u, u, u),
            star: a.star[u].clone(),
            unit: a.unit.clone(),
        }
    }

    pub fn scalars() -> Self {
        GroundAlgebra {
            labels: vec!["1".into()],
            mult: identity(1),
            star: identity(1),
            unit: vec![re(1.0)],
        }
    }

    /// `M_n` on matrix units `E_ij`, basis index `i*n + j`.
    pub fn matrix_algebra(n: usize) -> Self {
        let d = n * n;
        let mut mult = zeros(d, d * d);
        let mut star = zeros(d, d);
        let mut unit = vec![re(0.0); d];
        for i in 0..n {
            unit[i * n + i] = re(1.0);
            for j in 0..n {
                star[(j * n + i, i * n + j)] = re(1.0);
                for l in 0..n {
                    mult[(i * n + l, (i * n + j) * d + j * n + l)] = re(1.0);
                }
            }
        }
        let labels = (0..n).flat_map(|i| (0..n).map(move |j| format!("E{}{}", i + 1, j + 1))).collect();
        GroundAlgebra { labels, mult, star, unit }
    }

    pub fn dim(&self) -> usize {
        self.unit.len()
    }

    pub fn multiply(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let d = self.dim();
        let mut out = vec![re(0.0); d];
        for (i, x) in a.iter().enumerate() {
            if *x == re(0.0) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if *y == re(0.0) {
                    continue;
                }
                let s = x * y;
                for (k, o) in out.iter_mut().enumerate() {
                    *o += self.mult[(k, i * d + j)] * s;
                }
            }
        }
        out
    }

    pub fn adjoint(&self, a: &[C64]) -> Vec<C64> {
        let conj: Vec<C64> = a.iter().map(|x| x.conj()).collect();
        (&self.star * col(&conj)).iter().cloned().collect()
    }

    /// Matrix of `x ↦ a x`.
    pub fn left(&self, a: &[C64]) -> CMat {
        let d = self.dim();
        let mut m = zeros(d, d);
        for j in 0..d {
            let v = self.multiply(a, &unit_vector(d, j));
            for (i, x) in v.into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn associativity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let ab = self.multiply(&unit_vector(d, a), &unit_vector(d, b));
                for e in 0..d {
                    let lhs = self.multiply(&ab, &unit_vector(d, e));
                    let bc = self.multiply(&unit_vector(d, b), &unit_vector(d, e));
                    let rhs = self.multiply(&unit_vector(d, a), &bc);
                    worst = worst.max(vec_diff(&lhs, &rhs));
                }
            }
        }
        worst
    }

    pub fn commutativity_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in a + 1..d {
                let ab = self.multiply(&unit_vector(d, a), &unit_vector(d, b));
                let ba = self.multiply(&unit_vector(d, b), &unit_vector(d, a));
                worst = worst.max(vec_diff(&ab, &ba));
            }
        }
        worst
    }

    /// `[φ(e_u† b e_v)]_{u,v}`; positive semidefinite for positive `b` and
    /// positive `φ`.
    pub fn positivity_form(&self, phi: &State, b: &[C64]) -> CMat {
        let d = self.dim();
        let mut h = zeros(d, d);
        for v in 0..d {
            let bv = self.multiply(b, &unit_vector(d, v));
            for u in 0..d {
                let us = self.adjoint(&unit_vector(d, u));
                h[(u, v)] = phi.eval(&self.multiply(&us, &bv));
            }
        }
        h
    }
}

/// A linear functional given by its values on the basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct State {
    pub values: Vec<C64>,
}

impl State {
    pub fn new(values: Vec<C64>) -> Self {
        State { values }
    }

    pub fn eval(&self, a: &[C64]) -> C64 {
        dot(&self.values, a)
    }

    pub fn scaled(&self, s: f64) -> Self {
        State {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// `Tr(L_a) / Tr(L_1)`.
    pub fn normalized_trace(b: &GroundAlgebra) -> Self {
        let d = b.dim();
        let norm = b.left(&b.unit).trace();
        State {
            values: (0..d).map(|i| b.left(&unit_vector(d, i)).trace() / norm).collect(),
        }
    }

    /// Normalization, hermiticity and positivity of the Gram matrix.
    pub fn validate(&self, b: &GroundAlgebra) -> ValidationReport {
        let d = b.dim();
        let mut r = ValidationReport::new();
        r.record("normalized", (self.eval(&b.unit) - re(1.0)).norm(), IDENTITY_TOL);
        let herm = (0..d)
            .map(|i| {
                let e = unit_vector(d, i);
                (self.eval(&b.adjoint(&e)) - self.eval(&e).conj()).norm()
            })
            .fold(0.0, f64::max);
        r.record("hermitian", herm, IDENTITY_TOL);
        let lo = linalg::min_hermitian_eigenvalue(&gram(b, self));
        r.record("positive", (-lo).max(0.0), -STATE_FLOOR);
        r
    }
}

/// `G_ab = ω(e_a† e_b)`.
pub fn gram(b: &GroundAlgebra, omega: &State) -> CMat {
    let d = b.dim();
    let mut g = zeros(d, d);
    for i in 0..d {
        let si = b.adjoint(&unit_vector(d, i));
        for j in 0..d {
            g[(i, j)] = omega.eval(&b.multiply(&si, &unit_vector(d, j)));
        }
    }
    g
}

/// Rank and nullity of a Hermitian form under the shared cutoff.
fn form_rank(g: &CMat) -> (usize, usize) {
    let ev = linalg::hermitian_eigenvalues(g);
    let abs: Vec<f64> = ev.iter().map(|e| e.abs()).collect();
    let tol = linalg::cutoff(&abs);
    let r = ev.iter().filter(|e| **e > tol).count();
    (r, g.nrows() - r)
}

#[derive(Clone, Debug, Serialize)]
pub struct Gns {
    pub gram_rank: usize,
    pub kernel_dim: usize,
    /// `π(e_a)` on an orthonormal basis of `B / N_ω`.
    #[serde(skip)]
    pub pi: Vec<CMat>,
    #[serde(skip)]
    pub cyclic: Vec<C64>,
    /// Dimension of `{a : π(a) = 0}`.
    pub representation_kernel: usize,
    pub faithful_state: bool,
    pub faithful_representation: bool,
    /// Whether `faithful_state` and `faithful_representation` agree.
    pub iff_holds: bool,
    /// `max_a |⟨Ω, π(e_a) Ω⟩ - ω(e_a)|`.
    pub cyclic_residual: f64,
    /// `max |π(e_a e_b) - π(e_a) π(e_b)|` and `max |π(e_a†) - π(e_a)†|`.
    pub homomorphism_residual: f64,
    pub star_residual: f64,
}

pub fn gns(b: &GroundAlgebra, omega: &State) -> Result<Gns> {
    let d = b.dim();
    let g = gram(b, omega);
    let h = (&g + g.adjoint()) * re(0.5);
    let eig = h.clone().symmetric_eigen();
    let ev: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    if lo < STATE_FLOOR {
        return Err(Error::NonPositiveState(lo));
    }
    let abs: Vec<f64> = ev.iter().map(|e| e.abs()).collect();
    let tol = linalg::cutoff(&abs);
    let keep: Vec<usize> = (0..d).filter(|&k| ev[k] > tol).collect();
    let r = keep.len();
    // Λ(x) = D^{1/2} V† x and a right inverse V D^{-1/2}
    let mut lam = zeros(r, d);
    let mut inv = zeros(d, r);
    for (row, &k) in keep.iter().enumerate() {
        let s = ev[k].sqrt();
        for a in 0..d {
            lam[(row, a)] = eig.eigenvectors[(a, k)].conj() * s;
            inv[(a, row)] = eig.eigenvectors[(a, k)] / s;
        }
    }
    let pi: Vec<CMat> = (0..d).map(|a| &lam * b.left(&unit_vector(d, a)) * &inv).collect();
    let cyclic: Vec<C64> = (&lam * col(&b.unit)).iter().cloned().collect();
    let omega_col = col(&cyclic);
    let mut cyclic_residual: f64 = 0.0;
    for (a, p) in pi.iter().enumerate() {
        let v = (omega_col.adjoint() * p * &omega_col)[(0, 0)];
        cyclic_residual = cyclic_residual.max((v - omega.values[a]).norm());
    }
    let mut homomorphism_residual: f64 = 0.0;
    let mut star_residual: f64 = 0.0;
    let pi_of = |x: &[C64]| -> CMat {
        let mut m = zeros(r, r);
        for (a, xa) in x.iter().enumerate() {
            if *xa != re(0.0) {
                m += &pi[a] * *xa;
            }
        }
        m
    };
    for a in 0..d {
        let ea = unit_vector(d, a);
        let adj = pi_of(&b.adjoint(&ea));
        if r > 0 {
            star_residual = star_residual.max(linalg::max_abs_diff(&adj, &pi[a].adjoint()));
        }
        for bb in 0..d {
            let prod = pi_of(&b.multiply(&ea, &unit_vector(d, bb)));
            if r > 0 {
                homomorphism_residual = homomorphism_residual.max(linalg::max_abs_diff(&prod, &(&pi[a] * &pi[bb])));
            }
        }
    }
    // kernel of a ↦ vec π(a)
    let mut stack = zeros(r * r, d);
    for (a, p) in pi.iter().enumerate() {
        for (k, x) in p.iter().enumerate() {
            stack[(k, a)] = *x;
        }
    }
    let representation_kernel = d - linalg::rank(&stack);
    let kernel_dim = d - r;
    Ok(Gns {
        gram_rank: r,
        kernel_dim,
        pi,
        cyclic,
        representation_kernel,
        faithful_state: kernel_dim == 0,
        faithful_representation: representation_kernel == 0,
        iff_holds: (kernel_dim == 0) == (representation_kernel == 0),
        cyclic_residual,
        homomorphism_residual,
        star_residual,
    })
}

/// Finite stand-in for a bimodule realization `X ↦ H(X)`: per simple a space
/// `Φ(X)`, fusion maps `Φ(X) ⊗ Φ(Y) → Φ(Z)`, antilinear stars
/// `Φ(X) → Φ(X̄)`, and a faithful trace on the algebra `Φ(1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationDatum {
    pub name: String,
    pub dims: Vec<usize>,
    pub fusion: BTreeMap<(SimpleIndex, SimpleIndex, SimpleIndex), CMat>,
    pub star: Vec<CMat>,
    pub trace: Vec<C64>,
}

impl RealizationDatum {
    /// `Φ(1) = ℂ` over the trivial category.
    pub fn trivial(data: &FusionData) -> Result<Self> {
        if data.rank() != 1 {
            return Err(Error::Realization(format!("trivial realization needs rank 1, got {}", data.rank())));
        }
        let mut fusion = BTreeMap::new();
        fusion.insert((0, 0, 0), identity(1));
        Ok(RealizationDatum {
            name: "trivial".into(),
            dims: vec![1],
            fusion,
            star: vec![identity(1)],
            trace: vec![re(1.0)],
        })
    }

    /// Group-algebra blocks over a symmetric pointed category with trivial
    /// F-symbols: `Φ(g) = ℂ[G]`, `δ_x ⊗ δ_y ↦ δ_{xy}`, `δ_x^† = δ_{x⁻¹}`,
    /// and `tr(δ_x) = δ_{x,1}`.
    pub fn regular(data: &FusionData) -> Result<Self> {
        if !crate::gluing::is_symmetric_pointed(data) {
            return Err(Error::Realization(format!(
                "`{}` is not symmetric pointed; no finite realization is shipped",
                data.name()
            )));
        }
        let n = data.rank();
        let prod = |x: usize, y: usize| data.channels(x, y).next().expect("pointed fusion has one channel");
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    let (ab, bc) = (prod(a, b), prod(b, cc));
                    let d = prod(ab, cc);
                    if (data.f(a, b, cc, d, ab, bc)? - re(1.0)).norm() > linalg::ENTRY_TOL {
                        return Err(Error::Realization(format!(
                            "F-symbol at ({}, {}, {}) is not trivial",
                            data.label(a),
                            data.label(b),
                            data.label(cc)
                        )));
                    }
                }
            }
        }
        let mut mu = zeros(n, n * n);
        for x in 0..n {
            for y in 0..n {
                mu[(prod(x, y), x * n + y)] = re(1.0);
            }
        }
        let mut j = zeros(n, n);
        for x in 0..n {
            j[(data.dual(x), x)] = re(1.0);
        }
        let mut fusion = BTreeMap::new();
        for g in 0..n {
            for h in 0..n {
                fusion.insert((g, h, prod(g, h)), mu.clone());
            }
        }
        Ok(RealizationDatum {
            name: "regular".into(),
            dims: vec![n; n],
            fusion,
            star: vec![j; n],
            trace: unit_vector(n, data.unit()),
        })
    }

    /// The shipped realization for `data`, if any.
    pub fn for_category(data: &FusionData) -> Result<Self> {
        if data.rank() == 1 {
            Self::trivial(data)
        } else {
            Self::regular(data)
        }
    }

    /// `Φ(1)` as a *-algebra.
    pub fn base_algebra(&self, data: &FusionData) -> GroundAlgebra {
        let u = data.unit();
        let h = self.dims[u];
        let mult = self.fusion.get(&(u, u, u)).cloned().unwrap_or_else(|| zeros(h, h * h));
        // the unit of Φ(1): the element acting as identity on the left
        let mut unit = vec![re(0.0); h];
        for e in 0..h {
            let ok = (0..h).all(|x| (0..h).all(|y| (mult[(y, e * h + x)] - if x == y { re(1.0) } else { re(0.0) }).norm() < 1e-12));
            if ok {
                unit[e] = re(1.0);
                break;
            }
        }
        GroundAlgebra {
            labels: (0..h).map(|i| format!("n{i}")).collect(),
            mult,
            star: self.star[u].clone(),
            unit,
        }
    }

    /// Shapes, the multiplicativity of ranks over `Φ(1)`, and
    /// associativity of the fusion maps.
    pub fn validate(&self, data: &FusionData) -> ValidationReport {
        let n = data.rank();
        let u = data.unit();
        let mut r = ValidationReport::new();
        let shapes = self.dims.len() == n
            && self.star.len() == n
            && self.trace.len() == self.dims[u]
            && (0..n).all(|x| self.star[x].shape() == (self.dims[data.dual(x)], self.dims[x]))
            && self
                .fusion
                .iter()
                .all(|(&(x, y, z), m)| m.shape() == (self.dims[z], self.dims[x] * self.dims[y]) && data.n(x, y, z) > 0);
        r.record("shapes", if shapes { 0.0 } else { 1.0 }, 0.5);
        if !shapes {
            return r;
        }
        let h1 = self.dims[u] as f64;
        let rank = |x: usize| self.dims[x] as f64 / h1;
        let mut mult: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                let rhs: f64 = data.channels(x, y).map(|z| data.n(x, y, z) as f64 * rank(z)).sum();
                mult = mult.max((rank(x) * rank(y) - rhs).abs());
            }
        }
        r.record("rank_multiplicative", mult, IDENTITY_TOL);
        let mut assoc: f64 = 0.0;
        for (&(x, y, xy), m1) in &self.fusion {
            for z in 0..n {
                for w in data.channels(xy, z).collect::<Vec<_>>() {
                    let Some(m2) = self.fusion.get(&(xy, z, w)) else { continue };
                    let lhs = m2 * linalg::kron(m1, &identity(self.dims[z]));
                    let mut rhs = zeros(self.dims[w], self.dims[x] * self.dims[y] * self.dims[z]);
                    for yz in data.channels(y, z) {
                        if let (Some(a), Some(b)) = (self.fusion.get(&(y, z, yz)), self.fusion.get(&(x, yz, w))) {
                            rhs += b * linalg::kron(&identity(self.dims[x]), a);
                        }
                    }
                    assoc = assoc.max(linalg::max_abs_diff(&lhs, &rhs));
                }
            }
        }
        r.record("fusion_associativity", assoc, IDENTITY_TOL);
        r
    }
}

/// Index of the realized basis `δ_s ⊗ e_i` in the summand of `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct Realized {
    pub algebra: GroundAlgebra,
    /// `(simple, offset, Φ-dim, fiber dim)` per nonzero summand.
    pub summands: Vec<(SimpleIndex, usize, usize, usize)>,
}

/// `|A| = ⊕_X Φ(X) ⊗ A(X)` as a finite *-algebra.
pub fn realize(data: &FusionData, a: &AlgebraObject, phi: &RealizationDatum) -> Result<Realized> {
    let check = phi.validate(data);
    if !check.pass {
        let bad: Vec<String> = check.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
        return Err(Error::Realization(bad.join(", ")));
    }
    let n = data.rank();
    let mut summands = Vec::new();
    let mut offset = vec![0; n];
    let mut total = 0;
    for x in 0..n {
        offset[x] = total;
        let size = phi.dims[x] * a.fibers[x];
        if size > 0 {
            summands.push((x, total, phi.dims[x], a.fibers[x]));
        }
        total += size;
    }
    let d = total;
    let mut mult = zeros(d, d * d);
    for &(x, ox, hx, ax) in &summands {
        for &(y, oy, hy, ay) in &summands {
            for z in data.channels(x, y).collect::<Vec<_>>() {
                let (Some(mu), Some(m)) = (phi.fusion.get(&(x, y, z)), a.mult.get(&(x, y, z))) else { continue };
                let (hz, az) = (phi.dims[z], a.fibers[z]);
                for s in 0..hx {
                    for i in 0..ax {
                        for t in 0..hy {
                            for j in 0..ay {
                                let col = (ox + s * ax + i) * d + oy + t * ay + j;
                                for rr in 0..hz {
                                    let p = mu[(rr, s * hy + t)];
                                    if p == re(0.0) {
                                        continue;
                                    }
                                    for k in 0..az {
                                        mult[(offset[z] + rr * az + k, col)] += p * m[(k, i * ay + j)];
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut star = zeros(d, d);
    for &(x, ox, hx, ax) in &summands {
        let bx = data.dual(x);
        let (j, sa) = (&phi.star[x], &a.star[x]);
        for s in 0..hx {
            for i in 0..ax {
                for s2 in 0..phi.dims[bx] {
                    for k in 0..a.fibers[bx] {
                        star[(offset[bx] + s2 * a.fibers[bx] + k, ox + s * ax + i)] += j[(s2, s)] * sa[(k, i)];
                    }
                }
            }
        }
    }
    let u = data.unit();
    let base = phi.base_algebra(data);
    let mut unit = vec![re(0.0); d];
    for s in 0..phi.dims[u] {
        for i in 0..a.fibers[u] {
            unit[offset[u] + s * a.fibers[u] + i] = base.unit[s] * a.unit[i];
        }
    }
    let labels = summands
        .iter()
        .flat_map(|&(x, _, hx, ax)| {
            (0..hx).flat_map(move |s| (0..ax).map(move |i| format!("{}:{s}:{i}", data.label(x))))
        })
        .collect();
    Ok(Realized {
        algebra: GroundAlgebra { labels, mult, star, unit },
        summands,
    })
}

impl Realized {
    /// `τ_ω = (tr ⊗ ω)` on the unit summand.
    pub fn tau_omega(&self, data: &FusionData, phi: &RealizationDatum, omega: &State) -> State {
        let mut values = vec![re(0.0); self.algebra.dim()];
        if let Some(&(_, o, h, ad)) = self.summands.iter().find(|s| s.0 == data.unit()) {
            for s in 0..h {
                for i in 0..ad {
                    values[o + s * ad + i] = phi.trace[s] * omega.values[i];
                }
            }
        }
        State { values }
    }
}

/// `⊕_X Φ(X) ⊗ A(X)` with the `X`-summand form `d_X^{-1} ⟨,⟩_Φ ⊗ ⟨,⟩_ω`,
/// where `⟨ξ,η⟩_Φ = tr(ξ^† η)` and `⟨a,b⟩_ω = d_X ω((a^♮ b)^1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedHilbert {
    pub summands: Vec<(SimpleIndex, usize, usize, usize)>,
    pub form: CMat,
}

impl WeightedHilbert {
    pub fn new(data: &FusionData, a: &AlgebraObject, phi: &RealizationDatum, omega: &State, realized: &Realized) -> Self {
        let d = realized.algebra.dim();
        let u = data.unit();
        let mut form = zeros(d, d);
        for &(x, o, h, ad) in &realized.summands {
            let bx = data.dual(x);
            let dx = data.qdim(x);
            let mu = phi.fusion.get(&(bx, x, u));
            let m = a.mult.get(&(bx, x, u));
            let (Some(mu), Some(m)) = (mu, m) else { continue };
            // ⟨δ_s, δ_t⟩_Φ
            let mut gp = zeros(h, h);
            for s in 0..h {
                let js: Vec<C64> = phi.star[x].column(s).iter().map(|v| v.conj()).collect();
                for t in 0..h {
                    let mut v = re(0.0);
                    for (s2, jv) in js.iter().enumerate() {
                        for (r, tr) in phi.trace.iter().enumerate() {
                            v += tr * mu[(r, s2 * h + t)] * jv;
                        }
                    }
                    gp[(s, t)] = v;
                }
            }
            let abx = a.fibers[bx];
            let mut ga = zeros(ad, ad);
            for i in 0..ad {
                let si: Vec<C64> = a.star[x].column(i).iter().map(|v| v.conj()).collect();
                for j in 0..ad {
                    let mut v = re(0.0);
                    for (k, om) in omega.values.iter().enumerate() {
                        for (p, sp) in si.iter().enumerate().take(abx) {
                            v += om * m[(k, p * ad + j)] * sp;
                        }
                    }
                    ga[(i, j)] = v * dx;
                }
            }
            let blk = linalg::kron(&gp, &ga) * re(1.0 / dx);
            form.view_mut((o, o), (h * ad, h * ad)).copy_from(&blk);
        }
        WeightedHilbert {
            summands: realized.summands.clone(),
            form,
        }
    }

    pub fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        let xc: Vec<C64> = x.iter().map(|v| v.conj()).collect();
        (col(&xc).transpose() * &self.form * col(y))[(0, 0)]
    }
}

/// `τ_ω(b†a) = ⟨Λ(b), Λ(a)⟩` on random pairs, the scaling test, and
/// positivity of the weighted form.
pub fn weighted_inner_identity_check<R: Rng>(
    data: &FusionData,
    a: &AlgebraObject,
    omega: &State,
    phi: &RealizationDatum,
    samples: usize,
    rng: &mut R,
) -> Result<ValidationReport> {
    let realized = realize(data, a, phi)?;
    let m = &realized.algebra;
    let tau = realized.tau_omega(data, phi, omega);
    let k = WeightedHilbert::new(data, a, phi, omega, &realized);
    let tau2 = realized.tau_omega(data, phi, &omega.scaled(2.0));
    let k2 = WeightedHilbert::new(data, a, phi, &omega.scaled(2.0), &realized);
    let d = m.dim();
    let mut worst: f64 = 0.0;
    let mut scaling: f64 = 0.0;
    for _ in 0..samples {
        let x = random_vec(d, rng);
        let y = random_vec(d, rng);
        let bxa = m.multiply(&m.adjoint(&y), &x);
        let lhs = tau.eval(&bxa);
        let rhs = k.inner(&y, &x);
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
        let (l2, r2) = (tau2.eval(&bxa), k2.inner(&y, &x));
        scaling = scaling.max((l2 - lhs * 2.0).norm().max((r2 - rhs * 2.0).norm()) / lhs.norm().max(1.0));
    }
    let mut r = ValidationReport::new();
    r.record("inner_identity", worst, IDENTITY_TOL);
    r.record("scaling", scaling, IDENTITY_TOL);
    let lo = linalg::min_hermitian_eigenvalue(&k.form);
    r.record("form_positive", (-lo).max(0.0), -linalg::PSD_FLOOR);
    let mut cross: f64 = 0.0;
    for &(_, o1, h1, a1) in &k.summands {
        for &(_, o2, h2, a2) in &k.summands {
            if o1 != o2 {
                cross = cross.max(linalg::max_abs(&k.form.view((o1, o2), (h1 * a1, h2 * a2)).clone_owned()));
            }
        }
    }
    r.record("summand_orthogonality", cross, IDENTITY_TOL);
    Ok(r)
}

/// The finite inclusion `Φ(1) ⊂ |A|` with `E(ξ ⊗ a) = ω(a) ξ` on the unit
/// summand and `0` elsewhere.
#[derive(Clone, Debug)]
pub struct Inclusion {
    pub realized: Realized,
    pub base: GroundAlgebra,
    /// Columns are the images of the base basis in `|A|`.
    pub embedding: CMat,
    /// `|A| → Φ(1)` coordinates.
    pub expectation: CMat,
    pub report: ValidationReport,
    pub state_nullity: usize,
    pub expectation_nullity: usize,
    pub faithful_state: bool,
    pub faithful_expectation: bool,
    pub iff_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InclusionSummary {
    pub ambient_dim: usize,
    pub base_dim: usize,
    pub state_nullity: usize,
    pub expectation_nullity: usize,
    pub faithful_state: bool,
    pub faithful_expectation: bool,
    pub iff_holds: bool,
    pub report: ValidationReport,
}

impl Inclusion {
    pub fn summary(&self) -> InclusionSummary {
        InclusionSummary {
            ambient_dim: self.realized.algebra.dim(),
            base_dim: self.base.dim(),
            state_nullity: self.state_nullity,
            expectation_nullity: self.expectation_nullity,
            faithful_state: self.faithful_state,
            faithful_expectation: self.faithful_expectation,
            iff_holds: self.iff_holds,
            report: self.report.clone(),
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        (&self.expectation * col(x)).iter().cloned().collect()
    }

    pub fn embed(&self, n: &[C64]) -> Vec<C64> {
        (&self.embedding * col(n)).iter().cloned().collect()
    }
}

pub fn realize_inclusion<R: Rng>(
    data: &FusionData,
    a: &AlgebraObject,
    omega: &State,
    phi: &RealizationDatum,
    samples: usize,
    rng: &mut R,
) -> Result<Inclusion> {
    let ground = GroundAlgebra::from_algebra(data, a);
    let g = gram(&ground, omega);
    let lo = linalg::min_hermitian_eigenvalue(&g);
    if lo < STATE_FLOOR {
        return Err(Error::NonPositiveState(lo));
    }
    let realized = realize(data, a, phi)?;
    let base = phi.base_algebra(data);
    let u = data.unit();
    let m = &realized.algebra;
    let d = m.dim();
    let h = base.dim();
    let mut embedding = zeros(d, h);
    let mut expectation = zeros(h, d);
    if let Some(&(_, o, hh, ad)) = realized.summands.iter().find(|s| s.0 == u) {
        for s in 0..hh {
            for i in 0..ad {
                embedding[(o + s * ad + i, s)] = a.unit[i];
                expectation[(s, o + s * ad + i)] = omega.values[i];
            }
        }
    }
    let p = &embedding * &expectation;
    let mut r = ValidationReport::new();
    let e1: Vec<C64> = (&expectation * col(&m.unit)).iter().cloned().collect();
    r.record("unital", vec_diff(&e1, &base.unit), IDENTITY_TOL);
    r.record("idempotent", linalg::max_abs_diff(&(&p * &p), &p), IDENTITY_TOL);
    r.record("onto_base", linalg::max_abs_diff(&(&expectation * &embedding), &identity(h)), IDENTITY_TOL);
    let tr = State::new(phi.trace.clone());
    let e = |x: &[C64]| -> Vec<C64> { (&expectation * col(x)).iter().cloned().collect() };
    let emb = |n: &[C64]| -> Vec<C64> { (&embedding * col(n)).iter().cloned().collect() };
    let mut bimod: f64 = 0.0;
    let mut kadison: f64 = 0.0;
    let mut positive: f64 = 0.0;
    for _ in 0..samples {
        let x = random_vec(d, rng);
        let (b1, b2) = (random_vec(h, rng), random_vec(h, rng));
        let bxb = m.multiply(&m.multiply(&emb(&b1), &x), &emb(&b2));
        let rhs = base.multiply(&base.multiply(&b1, &e(&x)), &b2);
        bimod = bimod.max(vec_diff(&e(&bxb), &rhs) / linalg::max_abs(&col(&rhs)).max(1.0));
        let ex = e(&x);
        let exx = e(&m.multiply(&m.adjoint(&x), &x));
        let diff: Vec<C64> = exx.iter().zip(base.multiply(&base.adjoint(&ex), &ex)).map(|(p, q)| p - q).collect();
        let form = base.positivity_form(&tr, &diff);
        let scale = linalg::max_abs(&base.positivity_form(&tr, &exx)).max(1.0);
        kadison = kadison.max((-linalg::min_hermitian_eigenvalue(&form) / scale).max(0.0));
        let pform = base.positivity_form(&tr, &exx);
        positive = positive.max((-linalg::min_hermitian_eigenvalue(&pform) / scale).max(0.0));
    }
    r.record("bimodular", bimod, IDENTITY_TOL);
    r.record("kadison", kadison, -linalg::PSD_FLOOR);
    r.record("positive", positive, -linalg::PSD_FLOOR);
    let (_, state_nullity) = form_rank(&g);
    let tau = realized.tau_omega(data, phi, omega);
    let (_, expectation_nullity) = form_rank(&gram(m, &tau));
    Ok(Inclusion {
        base,
        embedding,
        expectation,
        report: r,
        state_nullity,
        expectation_nullity,
        faithful_state: state_nullity == 0,
        faithful_expectation: expectation_nullity == 0,
        iff_holds: (state_nullity == 0) == (expectation_nullity == 0),
        realized,
    })
}
