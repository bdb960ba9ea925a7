//! Algebra and module objects in `Vect(C)`, stored skeletally as fibers over
//! simples with structure constants in left-associated tree bases.
//!
//! A fiber element `a ∈ V_i` stands for a morphism `i → A`. The product
//! through channel `k ⊂ i ⊗ j` is the block `mult[(i, j, k)]`, a
//! `dim V_k × (dim V_i · dim V_j)` matrix whose column `p · dim V_j + q`
//! is the product of basis vectors `e_p ∈ V_i` and `e_q ∈ V_j`.

use std::collections::BTreeMap;

use crate::category::{coequalizer, Mor, Obj, SimpleIndex};
use crate::diagram::{half_twist, rotation, Diagram, State};
use crate::error::{Error, Result};
use crate::fusion::verify::COHERENCE_TOL;
use crate::fusion::FusionData;
use crate::linalg::{self, identity, kron, re, zeros, CMat, C64};
use crate::report::ValidationReport;

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraObject {
    pub fibers: Vec<usize>,
    pub mult: BTreeMap<(SimpleIndex, SimpleIndex, SimpleIndex), CMat>,
    /// Unit vector in the unit fiber.
    pub unit: Vec<C64>,
    /// `star[i]` is `dim V_{ī} × dim V_i`; the star of `v` is `star[i] · conj(v)`.
    pub star: Vec<CMat>,
    /// Optional names of basis vectors, per fiber.
    pub labels: Vec<Vec<String>>,
}

impl AlgebraObject {
    /// The unit object `1` with multiplication `ℂ ⊗ ℂ → ℂ`.
    pub fn unit_algebra(data: &FusionData) -> Self {
        let n = data.rank();
        let u = data.unit();
        let mut fibers = vec![0; n];
        fibers[u] = 1;
        let mut mult = BTreeMap::new();
        mult.insert((u, u, u), identity(1));
        let star = (0..n)
            .map(|i| if i == u { identity(1) } else { zeros(0, 0) })
            .collect();
        let mut labels = vec![Vec::new(); n];
        labels[u] = vec!["1".to_string()];
        AlgebraObject {
            fibers,
            mult,
            unit: vec![re(1.0)],
            star,
            labels,
        }
    }

    /// Group algebra `⊕_g g` of a pointed category, with `g · h = gh` and
    /// `g^♮ = g⁻¹` up to the rotation phase of the channel.
    pub fn group_algebra(data: &FusionData) -> Result<Self> {
        let n = data.rank();
        for g in 0..n {
            if (data.qdim(g) - 1.0).abs() > 1e-9 {
                return Err(Error::Algebra(format!(
                    "group algebra needs invertible simples; `{}` has dimension {}",
                    data.label(g),
                    data.qdim(g)
                )));
            }
        }
        let mut mult = BTreeMap::new();
        for g in 0..n {
            for h in 0..n {
                for k in data.channels(g, h) {
                    mult.insert((g, h, k), identity(1));
                }
            }
        }
        let star = (0..n)
            .map(|g| {
                let phase = conjugation_phase(data, g, data.dual(g), data.unit()).unwrap_or(re(1.0));
                CMat::from_element(1, 1, phase)
            })
            .collect();
        Ok(AlgebraObject {
            fibers: vec![1; n],
            mult,
            unit: vec![re(1.0)],
            star,
            labels: (0..n).map(|g| vec![data.label(g).to_string()]).collect(),
        })
    }

    pub fn object(&self) -> Obj {
        Obj::from_dims(&self.fibers)
    }

    pub fn fiber(&self, i: SimpleIndex) -> usize {
        self.fibers[i]
    }

    pub fn block(&self, i: SimpleIndex, j: SimpleIndex, k: SimpleIndex) -> CMat {
        self.mult
            .get(&(i, j, k))
            .cloned()
            .unwrap_or_else(|| zeros(self.fibers[k], self.fibers[i] * self.fibers[j]))
    }

    pub fn multiply(&self, i: SimpleIndex, j: SimpleIndex, k: SimpleIndex, a: &[C64], b: &[C64]) -> Vec<C64> {
        let x = kron(&column(a), &column(b));
        (self.block(i, j, k) * x).iter().cloned().collect()
    }

    pub fn star_vec(&self, i: SimpleIndex, v: &[C64]) -> Vec<C64> {
        let c: Vec<C64> = v.iter().map(|x| x.conj()).collect();
        (&self.star[i] * column(&c)).iter().cloned().collect()
    }

    /// Left multiplication by `x ∈ V_unit` on `V_unit`.
    pub fn ground_left(&self, data: &FusionData, x: &[C64]) -> CMat {
        let u = data.unit();
        self.block(u, u, u) * kron(&column(x), &identity(self.fibers[u]))
    }

    pub fn with_star_scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        for m in out.star.iter_mut() {
            *m *= s;
        }
        out
    }
}

pub(crate) fn column(v: &[C64]) -> CMat {
    CMat::from_column_slice(v.len(), 1, v)
}

fn basis(n: usize, p: usize) -> Vec<C64> {
    let mut v = vec![re(0.0); n];
    v[p] = re(1.0);
    v
}

/// Coefficient `c` with `conj(|(i j)_k⟩) = c |(j̄ ī)_k̄⟩` under the rotation.
pub fn conjugation_phase(data: &FusionData, i: SimpleIndex, j: SimpleIndex, k: SimpleIndex) -> Result<C64> {
    let u = data.unit();
    let d = rotation(data, &[i, j], &[u, i, k]);
    let out = d.apply(data, &State::basis_vector(&[data.dual(k)], &[u, data.dual(k)]))?;
    Ok(out
        .amps
        .get(&vec![u, data.dual(j), data.dual(k)])
        .cloned()
        .unwrap_or(re(0.0)))
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale > 1e-12 {
        diff / scale
    } else {
        diff
    }
}

/// Associativity: for each `i, j, l → k`,
/// `Σ_m m_{mlk}(m_{ijm} ⊗ 1) = Σ_{m,n} F^{ijl}_k[m,n] m_{ink}(1 ⊗ m_{jln})` per `m`.
pub fn associativity_residual(data: &FusionData, a: &AlgebraObject) -> Result<f64> {
    let n = data.rank();
    let live: Vec<usize> = (0..n).filter(|&i| a.fibers[i] > 0).collect();
    let mut worst: f64 = 0.0;
    for &i in &live {
        for &j in &live {
            for &l in &live {
                let (di, dj, dl) = (a.fibers[i], a.fibers[j], a.fibers[l]);
                for k in 0..n {
                    if a.fibers[k] == 0 {
                        continue;
                    }
                    let ms: Vec<usize> = data.channels(i, j).filter(|&m| data.n(m, l, k) > 0).collect();
                    let ns: Vec<usize> = data.channels(j, l).filter(|&m| data.n(i, m, k) > 0).collect();
                    let mut rhs = BTreeMap::new();
                    for &nn in &ns {
                        let inner = a.block(j, l, nn);
                        let r = a.block(i, nn, k) * kron(&identity(di), &inner);
                        rhs.insert(nn, r);
                    }
                    for &m in &ms {
                        let lhs = a.block(m, l, k) * kron(&a.block(i, j, m), &identity(dl));
                        let mut acc = zeros(a.fibers[k], di * dj * dl);
                        for &nn in &ns {
                            acc += &rhs[&nn] * data.f(i, j, l, k, m, nn)?;
                        }
                        worst = worst.max(linalg::max_abs_diff(&lhs, &acc));
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn unit_residual(data: &FusionData, a: &AlgebraObject) -> f64 {
    let u = data.unit();
    let uv = column(&a.unit);
    let mut worst: f64 = 0.0;
    for i in 0..data.rank() {
        let d = a.fibers[i];
        if d == 0 {
            continue;
        }
        let left = a.block(u, i, i) * kron(&uv, &identity(d));
        let right = a.block(i, u, i) * kron(&identity(d), &uv);
        worst = worst.max(linalg::max_abs_diff(&left, &identity(d)));
        worst = worst.max(linalg::max_abs_diff(&right, &identity(d)));
    }
    worst
}

fn star_involution_residual(data: &FusionData, a: &AlgebraObject) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..data.rank() {
        let d = a.fibers[i];
        if d == 0 {
            continue;
        }
        let s = &a.star[data.dual(i)] * a.star[i].map(|x| x.conj());
        worst = worst.max(linalg::max_abs_diff(&s, &identity(d)));
    }
    worst
}

/// `(ab)^♮ = c(i,j,k) · b^♮ a^♮`, relative to `|(ab)^♮|`.
fn star_antimultiplicative_residual(data: &FusionData, a: &AlgebraObject) -> Result<f64> {
    let n = data.rank();
    let mut worst: f64 = 0.0;
    for i in (0..n).filter(|&i| a.fibers[i] > 0) {
        for j in (0..n).filter(|&j| a.fibers[j] > 0) {
            for k in data.channels(i, j).collect::<Vec<_>>() {
                if a.fibers[k] == 0 {
                    continue;
                }
                let c = conjugation_phase(data, i, j, k)?;
                let (bi, bj, bk) = (data.dual(i), data.dual(j), data.dual(k));
                let m = a.block(i, j, k);
                let mr = a.block(bj, bi, bk);
                for p in 0..a.fibers[i] {
                    for q in 0..a.fibers[j] {
                        let ab: Vec<C64> = m.column(p * a.fibers[j] + q).iter().cloned().collect();
                        let lhs = column(&a.star_vec(k, &ab));
                        let sa: Vec<C64> = a.star[i].column(p).iter().cloned().collect();
                        let sb: Vec<C64> = a.star[j].column(q).iter().cloned().collect();
                        let rhs = &mr * kron(&column(&sb), &column(&sa)) * c;
                        let diff = linalg::max_abs_diff(&lhs, &rhs);
                        worst = worst.max(rel(diff, linalg::max_abs(&lhs)));
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Smallest eigenvalue, relative to the spectral scale, of the forms
/// `H_i[(a,p),(b,q)] = τ(e_p^♮ (e_a^♮ e_b) e_q)` on `V_i ⊗ V_unit`, with
/// `τ = Tr ∘ L` on the unit fiber. Returns `max(0, -λ_min)`.
pub fn positivity_residual(data: &FusionData, a: &AlgebraObject) -> f64 {
    let u = data.unit();
    let d1 = a.fibers[u];
    if d1 == 0 {
        return 0.0;
    }
    // τ(x) = t·x, and T[a, b] = τ(e_a e_b)
    let m1 = a.block(u, u, u);
    let t: Vec<C64> = (0..d1).map(|c| a.ground_left(data, &basis(d1, c)).trace()).collect();
    let mut tt = zeros(d1, d1);
    for x in 0..d1 {
        for y in 0..d1 {
            tt[(x, y)] = (0..d1).map(|c| t[c] * m1[(c, x * d1 + y)]).sum();
        }
    }
    let mut st = zeros(d1, d1);
    for p in 0..d1 {
        let sp = a.star_vec(u, &basis(d1, p));
        for (x, v) in sp.iter().enumerate() {
            st[(p, x)] = *v;
        }
    }
    let left = st * tt;
    let mut worst: f64 = 0.0;
    for i in (0..data.rank()).filter(|&i| a.fibers[i] > 0) {
        let di = a.fibers[i];
        let bi = data.dual(i);
        let dim = di * d1;
        let mut h = zeros(dim, dim);
        for x in 0..di {
            let sx = a.star_vec(i, &basis(di, x));
            for y in 0..di {
                let g = a.multiply(bi, i, u, &sx, &basis(di, y));
                // columns g e_q
                let mut w = zeros(d1, d1);
                for (c, gc) in g.iter().enumerate() {
                    if *gc != re(0.0) {
                        w += m1.columns(c * d1, d1) * *gc;
                    }
                }
                let blk = &left * w;
                h.view_mut((x * d1, y * d1), (d1, d1)).copy_from(&blk);
            }
        }
        let ev = linalg::hermitian_eigenvalues(&h);
        let scale = ev.iter().map(|e| e.abs()).fold(1.0, f64::max);
        let herm = linalg::max_abs_diff(&h, &h.adjoint());
        worst = worst.max(-ev[0] / scale).max(herm / scale);
    }
    worst.max(0.0)
}

pub fn check_cstar_algebra(data: &FusionData, a: &AlgebraObject) -> ValidationReport {
    let mut report = ValidationReport::new();
    match associativity_residual(data, a) {
        Ok(r) => {
            report.record("associativity", r, COHERENCE_TOL);
        }
        Err(e) => report.fail("associativity", e.to_string()),
    }
    report.record("unit", unit_residual(data, a), COHERENCE_TOL);
    report.record("star_involution", star_involution_residual(data, a), COHERENCE_TOL);
    match star_antimultiplicative_residual(data, a) {
        Ok(r) => {
            report.record("star_antimultiplicative", r, COHERENCE_TOL);
        }
        Err(e) => report.fail("star_antimultiplicative", e.to_string()),
    }
    report.record("positivity", positivity_residual(data, a), -linalg::PSD_FLOOR);
    report
}

/// Components `σ_U: A ⊗ U → U ⊗ A`, keyed by `U` then `(k, i, i')`, mapping
/// `V_i` on the tree `(i U)_k` to `V_{i'}` on the tree `(U i')_k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HalfBraiding {
    pub components: BTreeMap<SimpleIndex, BTreeMap<(SimpleIndex, SimpleIndex, SimpleIndex), CMat>>,
}

impl HalfBraiding {
    /// Identity on fibers: `|(i U)_k⟩ ⊗ a ↦ |(U i)_k⟩ ⊗ a`.
    pub fn identity(data: &FusionData, a: &AlgebraObject) -> Self {
        let mut components = BTreeMap::new();
        for u in 0..data.rank() {
            let mut comp = BTreeMap::new();
            for i in (0..data.rank()).filter(|&i| a.fibers[i] > 0) {
                for k in data.channels(i, u) {
                    if data.n(u, i, k) > 0 {
                        comp.insert((k, i, i), identity(a.fibers[i]));
                    }
                }
            }
            components.insert(u, comp);
        }
        HalfBraiding { components }
    }

    fn get(&self, a: &AlgebraObject, u: usize, k: usize, i: usize, i2: usize) -> Result<CMat> {
        let comp = self.components.get(&u).ok_or(Error::MissingComponent(u))?;
        Ok(comp
            .get(&(k, i, i2))
            .cloned()
            .unwrap_or_else(|| zeros(a.fibers[i2], a.fibers[i])))
    }
}

/// Residual of `σ_U(μ ⊗ 1) = (1 ⊗ μ)(σ_U ⊗ 1)(1 ⊗ σ_U)` together with the
/// unitarity of each component and the composite law `σ_{U⊗V} = (1 ⊗ σ_V)(σ_U ⊗ 1)`.
pub fn verify_yd(data: &FusionData, a: &AlgebraObject, sigma: &HalfBraiding) -> Result<ValidationReport> {
    let n = data.rank();
    for u in 0..n {
        if !sigma.components.contains_key(&u) {
            return Err(Error::MissingComponent(u));
        }
    }
    let live: Vec<usize> = (0..n).filter(|&i| a.fibers[i] > 0).collect();
    let mut report = ValidationReport::new();

    let mut yd: f64 = 0.0;
    for &i in &live {
        for &j in &live {
            let (di, dj) = (a.fibers[i], a.fibers[j]);
            for u in 0..n {
                for k in 0..n {
                    for m in data.channels(i, j).filter(|&m| data.n(m, u, k) > 0).collect::<Vec<_>>() {
                        for q in (0..n).filter(|&q| a.fibers[q] > 0 && data.n(u, q, k) > 0) {
                            let lhs = sigma.get(a, u, k, m, q)? * a.block(i, j, m);
                            let mut rhs = zeros(a.fibers[q], di * dj);
                            for nn in data.channels(j, u).filter(|&x| data.n(i, x, k) > 0).collect::<Vec<_>>() {
                                let f1 = data.f(i, j, u, k, m, nn)?;
                                for &j2 in live.iter().filter(|&&x| data.n(u, x, nn) > 0) {
                                    let sj = sigma.get(a, u, nn, j, j2)?;
                                    for p in data.channels(i, u).filter(|&p| data.n(p, j2, k) > 0).collect::<Vec<_>>() {
                                        let f2 = data.f(i, u, j2, k, p, nn)?.conj();
                                        for &i2 in live.iter().filter(|&&x| data.n(u, x, p) > 0) {
                                            if data.n(i2, j2, q) == 0 {
                                                continue;
                                            }
                                            let f3 = data.f(u, i2, j2, k, p, q)?;
                                            let coef = f1 * f2 * f3;
                                            if coef.norm() < 1e-300 {
                                                continue;
                                            }
                                            let si = sigma.get(a, u, p, i, i2)?;
                                            rhs += a.block(i2, j2, q) * kron(&si, &sj) * coef;
                                        }
                                    }
                                }
                            }
                            yd = yd.max(linalg::max_abs_diff(&lhs, &rhs));
                        }
                    }
                }
            }
        }
    }
    report.record("yd_equation", yd, COHERENCE_TOL);

    let mut unitary: f64 = 0.0;
    for u in 0..n {
        for k in 0..n {
            let ins: Vec<usize> = live.iter().cloned().filter(|&i| data.n(i, u, k) > 0).collect();
            let outs: Vec<usize> = live.iter().cloned().filter(|&i| data.n(u, i, k) > 0).collect();
            let din: usize = ins.iter().map(|&i| a.fibers[i]).sum();
            let dout: usize = outs.iter().map(|&i| a.fibers[i]).sum();
            let mut s = zeros(dout, din);
            let mut c0 = 0;
            for &i in &ins {
                let mut r0 = 0;
                for &i2 in &outs {
                    let blk = sigma.get(a, u, k, i, i2)?;
                    s.view_mut((r0, c0), (a.fibers[i2], a.fibers[i])).copy_from(&blk);
                    r0 += a.fibers[i2];
                }
                c0 += a.fibers[i];
            }
            if din != dout {
                unitary = f64::INFINITY;
                continue;
            }
            unitary = unitary.max(linalg::max_abs_diff(&(s.adjoint() * &s), &identity(din)));
        }
    }
    report.record("unitarity", unitary, COHERENCE_TOL);

    let mut coherence: f64 = 0.0;
    for &i in &live {
        for u in 0..n {
            for v in 0..n {
                for k in 0..n {
                    for w in data.channels(u, v).filter(|&w| data.n(i, w, k) > 0).collect::<Vec<_>>() {
                        for &i3 in live.iter().filter(|&&x| data.n(w, x, k) > 0) {
                            let expect = sigma.get(a, w, k, i, i3)?;
                            let mut got = zeros(a.fibers[i3], a.fibers[i]);
                            for p in data.channels(i, u).filter(|&p| data.n(p, v, k) > 0).collect::<Vec<_>>() {
                                let f1 = data.f(i, u, v, k, p, w)?.conj();
                                for &i2 in live.iter().filter(|&&x| data.n(u, x, p) > 0) {
                                    let su = sigma.get(a, u, p, i, i2)?;
                                    for r in data.channels(i2, v).filter(|&r| data.n(u, r, k) > 0).collect::<Vec<_>>() {
                                        if data.n(v, i3, r) == 0 {
                                            continue;
                                        }
                                        let f2 = data.f(u, i2, v, k, p, r)?;
                                        let f3 = data.f(u, v, i3, k, w, r)?.conj();
                                        let sv = sigma.get(a, v, r, i2, i3)?;
                                        got += sv * &su * (f1 * f2 * f3);
                                    }
                                }
                            }
                            coherence = coherence.max(linalg::max_abs_diff(&got, &expect));
                        }
                    }
                }
            }
        }
    }
    report.record("composite_coherence", coherence, COHERENCE_TOL);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Module over an algebra object. For a right module the action block
/// `(i, j, k)` pairs module fiber `i` with algebra fiber `j`; for a left
/// module it pairs algebra fiber `i` with module fiber `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleObject {
    pub side: Side,
    pub fibers: Vec<usize>,
    pub action: BTreeMap<(SimpleIndex, SimpleIndex, SimpleIndex), CMat>,
}

impl ModuleObject {
    pub fn regular(a: &AlgebraObject, side: Side) -> Self {
        ModuleObject {
            side,
            fibers: a.fibers.clone(),
            action: a.mult.clone(),
        }
    }

    /// The unit object as a left module through a functional `chi` on the
    /// unit fiber.
    pub fn character(data: &FusionData, a: &AlgebraObject, chi: &[C64]) -> Self {
        let u = data.unit();
        let mut fibers = vec![0; data.rank()];
        fibers[u] = 1;
        let mut action = BTreeMap::new();
        action.insert((u, u, u), CMat::from_row_slice(1, chi.len(), chi));
        let _ = a;
        ModuleObject {
            side: Side::Left,
            fibers,
            action,
        }
    }

    /// Free right module `W ⊗ A`. Fiber `k` has basis `(s, c, i, p)` with
    /// `s` a simple of `W`, `c < W.mult(s)`, `p < dim V_i` and `k ⊂ s ⊗ i`.
    pub fn free_right(data: &FusionData, a: &AlgebraObject, w: &Obj) -> Result<Self> {
        let n = data.rank();
        let mut index: Vec<Vec<(usize, usize, usize, usize)>> = vec![Vec::new(); n];
        for k in 0..n {
            for (s, mult) in w.iter() {
                for c in 0..mult {
                    for i in 0..n {
                        if data.n(s, i, k) == 0 {
                            continue;
                        }
                        for p in 0..a.fibers[i] {
                            index[k].push((s, c, i, p));
                        }
                    }
                }
            }
        }
        let fibers: Vec<usize> = index.iter().map(|v| v.len()).collect();
        let pos = |k: usize, key: (usize, usize, usize, usize)| index[k].iter().position(|&x| x == key);
        let mut action = BTreeMap::new();
        for k in 0..n {
            for j in (0..n).filter(|&j| a.fibers[j] > 0) {
                for l in data.channels(k, j).collect::<Vec<_>>() {
                    let mut blk = zeros(fibers[l], fibers[k] * a.fibers[j]);
                    for (x, &(s, c, i, p)) in index[k].iter().enumerate() {
                        for m in data.channels(i, j).filter(|&m| data.n(s, m, l) > 0).collect::<Vec<_>>() {
                            let f = data.f(s, i, j, l, k, m)?;
                            let prod = a.block(i, j, m);
                            for b in 0..a.fibers[j] {
                                for r in 0..a.fibers[m] {
                                    let v = prod[(r, p * a.fibers[j] + b)] * f;
                                    if v.norm() == 0.0 {
                                        continue;
                                    }
                                    let y = pos(l, (s, c, m, r)).ok_or_else(|| Error::Internal("free module index".into()))?;
                                    blk[(y, x * a.fibers[j] + b)] += v;
                                }
                            }
                        }
                    }
                    action.insert((k, j, l), blk);
                }
            }
        }
        Ok(ModuleObject {
            side: Side::Right,
            fibers,
            action,
        })
    }

    fn block(&self, i: usize, j: usize, k: usize, dims_i: usize, dims_j: usize) -> CMat {
        self.action
            .get(&(i, j, k))
            .cloned()
            .unwrap_or_else(|| zeros(self.fibers[k], dims_i * dims_j))
    }
}

/// Module associativity and unit residual, maximum of the two.
pub fn module_residual(data: &FusionData, a: &AlgebraObject, x: &ModuleObject) -> Result<f64> {
    let n = data.rank();
    if x.fibers.len() != n || a.fibers.len() != n {
        return Err(Error::Action("fiber count differs from the rank".into()));
    }
    let u = data.unit();
    let mut worst: f64 = 0.0;
    let (fa, fx) = (&a.fibers, &x.fibers);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for k in (0..n).filter(|&k| fx[k] > 0) {
                    match x.side {
                        Side::Right => {
                            if fx[i] == 0 || fa[j] == 0 || fa[l] == 0 {
                                continue;
                            }
                            let ns: Vec<usize> = data.channels(j, l).filter(|&m| data.n(i, m, k) > 0).collect();
                            for m in data.channels(i, j).filter(|&m| data.n(m, l, k) > 0).collect::<Vec<_>>() {
                                let lhs = x.block(m, l, k, fx[m], fa[l]) * kron(&x.block(i, j, m, fx[i], fa[j]), &identity(fa[l]));
                                let mut rhs = zeros(fx[k], fx[i] * fa[j] * fa[l]);
                                for &nn in &ns {
                                    rhs += x.block(i, nn, k, fx[i], fa[nn]) * kron(&identity(fx[i]), &a.block(j, l, nn))
                                        * data.f(i, j, l, k, m, nn)?;
                                }
                                worst = worst.max(linalg::max_abs_diff(&lhs, &rhs));
                            }
                        }
                        Side::Left => {
                            if fa[i] == 0 || fa[j] == 0 || fx[l] == 0 {
                                continue;
                            }
                            let ns: Vec<usize> = data.channels(j, l).filter(|&m| data.n(i, m, k) > 0).collect();
                            for m in data.channels(i, j).filter(|&m| data.n(m, l, k) > 0).collect::<Vec<_>>() {
                                let lhs = x.block(m, l, k, fa[m], fx[l]) * kron(&a.block(i, j, m), &identity(fx[l]));
                                let mut rhs = zeros(fx[k], fa[i] * fa[j] * fx[l]);
                                for &nn in &ns {
                                    rhs += x.block(i, nn, k, fa[i], fx[nn])
                                        * kron(&identity(fa[i]), &x.block(j, l, nn, fa[j], fx[l]))
                                        * data.f(i, j, l, k, m, nn)?;
                                }
                                worst = worst.max(linalg::max_abs_diff(&lhs, &rhs));
                            }
                        }
                    }
                }
            }
        }
    }
    let uv = column(&a.unit);
    for i in (0..n).filter(|&i| fx[i] > 0) {
        let acted = match x.side {
            Side::Right => x.block(i, u, i, fx[i], fa[u]) * kron(&identity(fx[i]), &uv),
            Side::Left => x.block(u, i, i, fa[u], fx[i]) * kron(&uv, &identity(fx[i])),
        };
        worst = worst.max(linalg::max_abs_diff(&acted, &identity(fx[i])));
    }
    Ok(worst)
}

/// The two maps `X ⊗ A ⊗ Y ⇉ X ⊗ Y` on fiber `k`, in the bases
/// `((i a)_m j)_k` and `(i j)_k`.
pub fn relative_tensor_maps(
    data: &FusionData,
    x: &ModuleObject,
    a: &AlgebraObject,
    y: &ModuleObject,
) -> Result<(Obj, Obj, Mor, Mor)> {
    if x.side != Side::Right || y.side != Side::Left {
        return Err(Error::Action("expected a right module and a left module".into()));
    }
    let n = data.rank();
    if x.fibers.len() != n || y.fibers.len() != n || a.fibers.len() != n {
        return Err(Error::Action("fiber count differs from the rank".into()));
    }
    let (fx, fa, fy) = (&x.fibers, &a.fibers, &y.fibers);
    let mut src_dims = vec![0u32; n];
    let mut tgt_dims = vec![0u32; n];
    let mut b1 = BTreeMap::new();
    let mut b2 = BTreeMap::new();
    for k in 0..n {
        // target layout (i, j)
        let mut toff = BTreeMap::new();
        let mut t = 0;
        for i in 0..n {
            for j in 0..n {
                if data.n(i, j, k) > 0 && fx[i] * fy[j] > 0 {
                    toff.insert((i, j), t);
                    t += fx[i] * fy[j];
                }
            }
        }
        // source layout (i, a, m, j)
        let mut soff = Vec::new();
        let mut s = 0;
        for i in 0..n {
            for al in 0..n {
                for m in data.channels(i, al).collect::<Vec<_>>() {
                    for j in 0..n {
                        if data.n(m, j, k) > 0 && fx[i] * fa[al] * fy[j] > 0 {
                            soff.push((i, al, m, j, s));
                            s += fx[i] * fa[al] * fy[j];
                        }
                    }
                }
            }
        }
        let mut m1 = zeros(t, s);
        let mut m2 = zeros(t, s);
        for &(i, al, m, j, off) in &soff {
            let w = fx[i] * fa[al] * fy[j];
            if let Some(&to) = toff.get(&(m, j)) {
                let act = x.block(i, al, m, fx[i], fa[al]);
                let blk = kron(&act, &identity(fy[j]));
                let mut v = m1.view_mut((to, off), (fx[m] * fy[j], w));
                v += blk;
            }
            for nn in data.channels(al, j).filter(|&nn| data.n(i, nn, k) > 0).collect::<Vec<_>>() {
                if let Some(&to) = toff.get(&(i, nn)) {
                    let f = data.f(i, al, j, k, m, nn)?;
                    let act = y.block(al, j, nn, fa[al], fy[j]);
                    let blk = kron(&identity(fx[i]), &act) * f;
                    let mut v = m2.view_mut((to, off), (fx[i] * fy[nn], w));
                    v += blk;
                }
            }
        }
        src_dims[k] = s as u32;
        tgt_dims[k] = t as u32;
        if s > 0 && t > 0 {
            b1.insert(k, m1);
            b2.insert(k, m2);
        }
    }
    let src = Obj::from_pairs((0..n).map(|k| (k, src_dims[k])));
    let tgt = Obj::from_pairs((0..n).map(|k| (k, tgt_dims[k])));
    let f1 = Mor::new(src.clone(), tgt.clone(), b1)?;
    let f2 = Mor::new(src.clone(), tgt.clone(), b2)?;
    Ok((src, tgt, f1, f2))
}

/// `X ⊗_A Y`: the coequalizer of the two action maps, with its projection.
pub fn relative_tensor(data: &FusionData, x: &ModuleObject, a: &AlgebraObject, y: &ModuleObject) -> Result<(Obj, Mor)> {
    let (_, _, f1, f2) = relative_tensor_maps(data, x, a, y)?;
    coequalizer(&f1, &f2)
}

/// Maximal braided tensor product `A ⊠ B` with multiplication
/// `(μ ⊗ μ)(1 ⊗ c ⊗ 1)`. Fiber `k` has basis `(i, j, p, q)` ordered by
/// `(i, j)`, then `p`, then `q`.
pub fn braided_tensor(data: &FusionData, a: &AlgebraObject, b: &AlgebraObject) -> Result<AlgebraObject> {
    if let Some(err) = data.first_multiplicity() {
        return Err(err);
    }
    let n = data.rank();
    let u = data.unit();
    let mut comps: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for k in 0..n {
        let mut off = 0;
        for i in 0..n {
            for j in 0..n {
                if data.n(i, j, k) > 0 && a.fibers[i] * b.fibers[j] > 0 {
                    comps[k].push((i, j, off));
                    off += a.fibers[i] * b.fibers[j];
                }
            }
        }
    }
    let fibers: Vec<usize> = comps
        .iter()
        .map(|c| c.iter().map(|&(i, j, _)| a.fibers[i] * b.fibers[j]).sum())
        .collect();
    let offset = |k: usize, i: usize, j: usize| comps[k].iter().find(|c| c.0 == i && c.1 == j).map(|c| c.2);

    let mut mult = BTreeMap::new();
    for k1 in 0..n {
        for k2 in 0..n {
            for k3 in data.channels(k1, k2).collect::<Vec<_>>() {
                if fibers[k1] * fibers[k2] * fibers[k3] == 0 {
                    continue;
                }
                let mut blk = zeros(fibers[k3], fibers[k1] * fibers[k2]);
                for &(i, j, o1) in &comps[k1] {
                    for &(i2, j2, o2) in &comps[k2] {
                        let d = Diagram::new(vec![k1, k2])
                            .split(1, i2, j2)
                            .split(0, i, j)
                            .braid(1);
                        let st = d.apply(data, &State::basis_vector(&[k1, k2], &[u, k1, k3]))?;
                        for p in data.channels(i, i2).collect::<Vec<_>>() {
                            for q in data.channels(j, j2).collect::<Vec<_>>() {
                                let Some(o3) = offset(k3, p, q) else { continue };
                                let fused = Diagram::new(vec![i, i2, j, j2]).fuse(0, p).fuse(1, q).apply(data, &st)?;
                                let coef = fused.amps.get(&vec![u, p, k3]).cloned().unwrap_or(re(0.0));
                                if coef.norm() < 1e-300 {
                                    continue;
                                }
                                let ma = a.block(i, i2, p);
                                let mb = b.block(j, j2, q);
                                let (dai, dbj, dai2, dbj2) = (a.fibers[i], b.fibers[j], a.fibers[i2], b.fibers[j2]);
                                let dbq = b.fibers[q];
                                for x1 in 0..dai {
                                    for y1 in 0..dbj {
                                        let col1 = o1 + x1 * dbj + y1;
                                        for x2 in 0..dai2 {
                                            for y2 in 0..dbj2 {
                                                let col2 = o2 + x2 * dbj2 + y2;
                                                let col = col1 * fibers[k2] + col2;
                                                for r in 0..a.fibers[p] {
                                                    let va = ma[(r, x1 * dai2 + x2)];
                                                    if va.norm() == 0.0 {
                                                        continue;
                                                    }
                                                    for s in 0..dbq {
                                                        let vb = mb[(s, y1 * dbj2 + y2)];
                                                        blk[(o3 + r * dbq + s, col)] += coef * va * vb;
                                                    }
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                mult.insert((k1, k2, k3), blk);
            }
        }
    }

    let mut unit = vec![re(0.0); fibers[u]];
    if let Some(o) = offset(u, u, u) {
        let ub = b.unit.len();
        for (x, va) in a.unit.iter().enumerate() {
            for (y, vb) in b.unit.iter().enumerate() {
                unit[o + x * ub + y] = va * vb;
            }
        }
    }

    let mut star = Vec::with_capacity(n);
    for k in 0..n {
        let bk = data.dual(k);
        let mut s = zeros(fibers[bk], fibers[k]);
        for &(i, j, o) in &comps[k] {
            let (bi, bj) = (data.dual(i), data.dual(j));
            let d = rotation(data, &[i, j], &[u, i, k]).then_all(half_twist(0, 2, false));
            let st = d.apply(data, &State::basis_vector(&[bk], &[u, bk]))?;
            let c = st.amps.get(&vec![u, bi, bk]).cloned().unwrap_or(re(0.0));
            let Some(o2) = offset(bk, bi, bj) else { continue };
            let (sa, sb) = (&a.star[i], &b.star[j]);
            for x in 0..a.fibers[i] {
                for y in 0..b.fibers[j] {
                    for x2 in 0..a.fibers[bi] {
                        for y2 in 0..b.fibers[bj] {
                            s[(o2 + x2 * b.fibers[bj] + y2, o + x * b.fibers[j] + y)] += c * sa[(x2, x)] * sb[(y2, y)];
                        }
                    }
                }
            }
        }
        star.push(s);
    }

    let labels = (0..n)
        .map(|k| {
            let mut out = Vec::new();
            for &(i, j, _) in &comps[k] {
                for x in 0..a.fibers[i] {
                    for y in 0..b.fibers[j] {
                        let la = a.labels.get(i).and_then(|l| l.get(x)).cloned().unwrap_or_else(|| format!("{i}.{x}"));
                        let lb = b.labels.get(j).and_then(|l| l.get(y)).cloned().unwrap_or_else(|| format!("{j}.{y}"));
                        out.push(format!("{la}⊠{lb}"));
                    }
                }
            }
            out
        })
        .collect();

    Ok(AlgebraObject {
        fibers,
        mult,
        unit,
        star,
        labels,
    })
}

/// `Σ_{i,j} dim A(i) · dim B(j) · N[i][j][k]`.
pub fn braided_tensor_dims(data: &FusionData, a: &AlgebraObject, b: &AlgebraObject) -> Vec<usize> {
    let n = data.rank();
    (0..n)
        .map(|k| {
            let mut s = 0;
            for i in 0..n {
                for j in 0..n {
                    s += a.fibers[i] * b.fibers[j] * data.n(i, j, k) as usize;
                }
            }
            s
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::builtin;

    #[test]
    fn unit_algebra_is_cstar() {
        for name in ["trivial", "fib", "ising", "pointed:4:1/4"] {
            let d = builtin(name).unwrap();
            let a = AlgebraObject::unit_algebra(&d);
            let r = check_cstar_algebra(&d, &a);
            assert!(r.pass, "{name}: {r:?}");
            assert_eq!(r.max_residual(), 0.0);
            let y = verify_yd(&d, &a, &HalfBraiding::identity(&d, &a)).unwrap();
            assert_eq!(y.max_residual(), 0.0);
        }
    }

    #[test]
    fn group_algebra_is_cstar() {
        for name in ["pointed:2:0", "pointed:4:1/4", "pointed:2x2:1/2,0;0,0"] {
            let d = builtin(name).unwrap();
            let a = AlgebraObject::group_algebra(&d).unwrap();
            let r = check_cstar_algebra(&d, &a);
            assert!(r.pass, "{name}: {r:?}");
        }
    }

    #[test]
    fn scaled_star_breaks_compatibility() {
        let d = builtin("pointed:2:0").unwrap();
        let a = AlgebraObject::group_algebra(&d).unwrap().with_star_scaled(re(2.0));
        let r = check_cstar_algebra(&d, &a);
        assert!(!r.pass);
        assert!((r.residual("star_antimultiplicative") - 1.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn missing_component_is_reported() {
        let d = builtin("fib").unwrap();
        let a = AlgebraObject::unit_algebra(&d);
        let mut s = HalfBraiding::identity(&d, &a);
        s.components.remove(&1);
        assert_eq!(verify_yd(&d, &a, &s), Err(Error::MissingComponent(1)));
    }

    #[test]
    fn regular_module_relative_tensor() {
        for name in ["fib", "pointed:4:1/4"] {
            let d = builtin(name).unwrap();
            let a = AlgebraObject::group_algebra(&d).unwrap_or_else(|_| AlgebraObject::unit_algebra(&d));
            let r = ModuleObject::regular(&a, Side::Right);
            let l = ModuleObject::regular(&a, Side::Left);
            assert!(module_residual(&d, &a, &r).unwrap() < 1e-10);
            assert!(module_residual(&d, &a, &l).unwrap() < 1e-10);
            let (q, _) = relative_tensor(&d, &r, &a, &l).unwrap();
            assert_eq!(q.dims(d.rank()), a.fibers);
        }
    }

    #[test]
    fn braided_tensor_with_unit() {
        let d = builtin("ising").unwrap();
        let a = AlgebraObject::unit_algebra(&d);
        let b = braided_tensor(&d, &a, &a).unwrap();
        assert_eq!(b.fibers, a.fibers);
        assert!(check_cstar_algebra(&d, &b).pass);
    }
}
