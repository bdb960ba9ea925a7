//! Evaluation of string diagrams on left-associated fusion-tree bases.
//!
//! A basis vector of `Hom(root, x_0 ⊗ … ⊗ x_{k-1})` is a path
//! `e_0 = 1, e_1 = x_0, e_2, …, e_k = root` with `N[e_j][x_j][e_{j+1}] = 1`;
//! strand `j` sits between `e_j` and `e_{j+1}`. Every move acts on one or two
//! adjacent strands and re-associates locally with an F-move, so states never
//! leave the left-associated basis.

use std::collections::BTreeMap;

use crate::category::{Mor, Obj, SimpleIndex};
use crate::error::{Error, Result};
use crate::fusion::FusionData;
use crate::linalg::{re, zeros, CMat, C64};

/// Ordered basis of `Hom(root, leaves[0] ⊗ … ⊗ leaves[k-1])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeBasis {
    pub leaves: Vec<SimpleIndex>,
    pub root: SimpleIndex,
    /// Full paths `e_0 … e_k`, in lexicographic order.
    pub vectors: Vec<Vec<SimpleIndex>>,
}

impl TreeBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn position(&self, path: &[SimpleIndex]) -> Option<usize> {
        self.vectors.binary_search_by(|v| v.as_slice().cmp(path)).ok()
    }
}

pub fn tree_basis(data: &FusionData, leaves: &[SimpleIndex], root: SimpleIndex) -> TreeBasis {
    let mut vectors = Vec::new();
    let mut path = vec![data.unit()];
    extend(data, leaves, root, &mut path, &mut vectors);
    TreeBasis {
        leaves: leaves.to_vec(),
        root,
        vectors,
    }
}

fn extend(
    data: &FusionData,
    leaves: &[SimpleIndex],
    root: SimpleIndex,
    path: &mut Vec<SimpleIndex>,
    out: &mut Vec<Vec<SimpleIndex>>,
) {
    let j = path.len() - 1;
    if j == leaves.len() {
        if path[j] == root {
            out.push(path.clone());
        }
        return;
    }
    let last = path[j];
    for e in data.channels(last, leaves[j]).collect::<Vec<_>>() {
        path.push(e);
        extend(data, leaves, root, path, out);
        path.pop();
    }
}

/// Elementary move on a row of strands.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Move {
    /// Braid strands `pos, pos+1`; `inverse` uses the reverse crossing.
    Braid { pos: usize, inverse: bool },
    /// Project strands `pos, pos+1` onto the channel `channel`.
    Fuse { pos: usize, channel: SimpleIndex },
    /// Split strand `pos` into `left ⊗ right` (adjoint of `Fuse`).
    Split { pos: usize, left: SimpleIndex, right: SimpleIndex },
    /// Insert `dual(label), label` in front of strand `pos`, normalised so
    /// that the cup has squared norm `d_label`.
    Cup { pos: usize, label: SimpleIndex },
    /// Contract strands `pos, pos+1` labelled `dual(a), a` (adjoint of `Cup`).
    Cap { pos: usize },
    /// Ribbon twist on strand `pos`.
    Twist { pos: usize, inverse: bool },
    Scale(C64),
}

/// A composite of moves starting from a fixed row of leaves.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    leaves: Vec<SimpleIndex>,
    moves: Vec<Move>,
}

impl Diagram {
    pub fn new(leaves: Vec<SimpleIndex>) -> Self {
        Diagram {
            leaves,
            moves: Vec::new(),
        }
    }

    pub fn then(mut self, m: Move) -> Self {
        self.moves.push(m);
        self
    }

    pub fn braid(self, pos: usize) -> Self {
        self.then(Move::Braid { pos, inverse: false })
    }

    pub fn unbraid(self, pos: usize) -> Self {
        self.then(Move::Braid { pos, inverse: true })
    }

    pub fn fuse(self, pos: usize, channel: SimpleIndex) -> Self {
        self.then(Move::Fuse { pos, channel })
    }

    pub fn split(self, pos: usize, left: SimpleIndex, right: SimpleIndex) -> Self {
        self.then(Move::Split { pos, left, right })
    }

    pub fn cup(self, pos: usize, label: SimpleIndex) -> Self {
        self.then(Move::Cup { pos, label })
    }

    pub fn cap(self, pos: usize) -> Self {
        self.then(Move::Cap { pos })
    }

    pub fn twist(self, pos: usize) -> Self {
        self.then(Move::Twist { pos, inverse: false })
    }

    pub fn scale(self, s: C64) -> Self {
        self.then(Move::Scale(s))
    }

    pub fn then_all(mut self, moves: impl IntoIterator<Item = Move>) -> Self {
        self.moves.extend(moves);
        self
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    pub fn compose(mut self, data: &FusionData, other: &Diagram) -> Result<Self> {
        let end = self.target(data)?;
        if end != other.leaves {
            return Err(Error::Diagram {
                index: self.moves.len(),
                detail: format!("cannot append diagram on {:?} after {:?}", other.leaves, end),
            });
        }
        self.moves.extend_from_slice(&other.moves);
        Ok(self)
    }

    pub fn source(&self) -> &[SimpleIndex] {
        &self.leaves
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// Leaf row after all moves, validating each move on the way.
    pub fn target(&self, data: &FusionData) -> Result<Vec<SimpleIndex>> {
        let mut leaves = self.leaves.clone();
        for (index, m) in self.moves.iter().enumerate() {
            leaves = step_leaves(data, &leaves, m).map_err(|detail| Error::Diagram { index, detail })?;
        }
        Ok(leaves)
    }

    /// Applies the diagram to a sparse state over paths.
    pub fn apply(&self, data: &FusionData, state: &State) -> Result<State> {
        if state.leaves != self.leaves {
            return Err(Error::Diagram {
                index: 0,
                detail: format!("state on {:?} but diagram starts on {:?}", state.leaves, self.leaves),
            });
        }
        let mut cur = state.clone();
        for (index, m) in self.moves.iter().enumerate() {
            let leaves = step_leaves(data, &cur.leaves, m).map_err(|detail| Error::Diagram { index, detail })?;
            let mut next = State {
                leaves,
                amps: BTreeMap::new(),
            };
            for (path, &amp) in &cur.amps {
                apply_move(data, &cur.leaves, path, m, &mut |p, c| next.add(p, amp * c))?;
            }
            next.prune();
            cur = next;
        }
        Ok(cur)
    }
}

/// Sparse vector in `⊕_root Hom(root, leaves)`, keyed by full path.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub leaves: Vec<SimpleIndex>,
    pub amps: BTreeMap<Vec<SimpleIndex>, C64>,
}

impl State {
    pub fn basis_vector(leaves: &[SimpleIndex], path: &[SimpleIndex]) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(path.to_vec(), re(1.0));
        State {
            leaves: leaves.to_vec(),
            amps,
        }
    }

    fn add(&mut self, path: Vec<SimpleIndex>, v: C64) {
        *self.amps.entry(path).or_insert(re(0.0)) += v;
    }

    fn prune(&mut self) {
        self.amps.retain(|_, v| v.norm() > 1e-300);
    }
}

fn step_leaves(data: &FusionData, leaves: &[SimpleIndex], m: &Move) -> std::result::Result<Vec<SimpleIndex>, String> {
    let k = leaves.len();
    let need = |pos: usize, width: usize| {
        if pos + width > k {
            Err(format!("position {pos} out of range for {k} strands"))
        } else {
            Ok(())
        }
    };
    let mut out = leaves.to_vec();
    match *m {
        Move::Braid { pos, .. } => {
            need(pos, 2)?;
            out.swap(pos, pos + 1);
        }
        Move::Fuse { pos, channel } => {
            need(pos, 2)?;
            if data.n(leaves[pos], leaves[pos + 1], channel) == 0 {
                return Err(format!(
                    "{} is not a channel of {} ⊗ {}",
                    data.label(channel),
                    data.label(leaves[pos]),
                    data.label(leaves[pos + 1])
                ));
            }
            out.splice(pos..pos + 2, [channel]);
        }
        Move::Split { pos, left, right } => {
            need(pos, 1)?;
            if data.n(left, right, leaves[pos]) == 0 {
                return Err(format!(
                    "{} is not a channel of {} ⊗ {}",
                    data.label(leaves[pos]),
                    data.label(left),
                    data.label(right)
                ));
            }
            out.splice(pos..pos + 1, [left, right]);
        }
        Move::Cup { pos, label } => {
            if pos > k {
                return Err(format!("position {pos} out of range for {k} strands"));
            }
            out.splice(pos..pos, [data.dual(label), label]);
        }
        Move::Cap { pos } => {
            need(pos, 2)?;
            if leaves[pos] != data.dual(leaves[pos + 1]) {
                return Err(format!(
                    "cannot cap {} with {}",
                    data.label(leaves[pos]),
                    data.label(leaves[pos + 1])
                ));
            }
            out.drain(pos..pos + 2);
        }
        Move::Twist { pos, .. } => need(pos, 1)?,
        Move::Scale(_) => {}
    }
    Ok(out)
}

fn apply_move(
    data: &FusionData,
    leaves: &[SimpleIndex],
    path: &[SimpleIndex],
    m: &Move,
    emit: &mut dyn FnMut(Vec<SimpleIndex>, C64),
) -> Result<()> {
    let n = data.rank();
    match *m {
        Move::Braid { pos: j, inverse } => {
            let (a, b) = (leaves[j], leaves[j + 1]);
            let (ej, e1, e2) = (path[j], path[j + 1], path[j + 2]);
            for e1n in 0..n {
                if data.n(ej, b, e1n) == 0 || data.n(e1n, a, e2) == 0 {
                    continue;
                }
                let mut coef = re(0.0);
                for f in data.channels(a, b) {
                    let r = if inverse { data.r(b, a, f)?.conj() } else { data.r(a, b, f)? };
                    coef += data.f(ej, a, b, e2, e1, f)? * r * data.f(ej, b, a, e2, e1n, f)?.conj();
                }
                let mut p = path.to_vec();
                p[j + 1] = e1n;
                emit(p, coef);
            }
        }
        Move::Fuse { pos: j, channel } => {
            let (a, b) = (leaves[j], leaves[j + 1]);
            let coef = data.f(path[j], a, b, path[j + 2], path[j + 1], channel)?;
            let mut p = path.to_vec();
            p.remove(j + 1);
            emit(p, coef);
        }
        Move::Split { pos: j, left, right } => {
            let z = leaves[j];
            let (ej, e1) = (path[j], path[j + 1]);
            for mid in 0..n {
                if data.n(ej, left, mid) == 0 || data.n(mid, right, e1) == 0 {
                    continue;
                }
                let coef = data.f(ej, left, right, e1, mid, z)?.conj();
                let mut p = path.to_vec();
                p.insert(j + 1, mid);
                emit(p, coef);
            }
        }
        Move::Cup { pos: j, label } => {
            let abar = data.dual(label);
            let ej = path[j];
            let sd = data.qdim(label).sqrt();
            for mid in 0..n {
                if data.n(ej, abar, mid) == 0 || data.n(mid, label, ej) == 0 {
                    continue;
                }
                let coef = data.f(ej, abar, label, ej, mid, data.unit())?.conj() * sd;
                let mut p = path.to_vec();
                p.splice(j + 1..j + 1, [mid, ej]);
                emit(p, coef);
            }
        }
        Move::Cap { pos: j } => {
            let (abar, a) = (leaves[j], leaves[j + 1]);
            if path[j + 2] != path[j] {
                return Ok(());
            }
            let coef = data.f(path[j], abar, a, path[j], path[j + 1], data.unit())? * data.qdim(a).sqrt();
            let mut p = path.to_vec();
            p.drain(j + 1..j + 3);
            emit(p, coef);
        }
        Move::Twist { pos, inverse } => {
            let t = data.twist(leaves[pos]);
            emit(path.to_vec(), if inverse { t.conj() } else { t });
        }
        Move::Scale(s) => emit(path.to_vec(), s),
    }
    Ok(())
}

/// Splits strand `pos` (labelled `path.last()`) into `leaves` along the
/// left-associated tree `path`.
pub fn split_moves(pos: usize, leaves: &[SimpleIndex], path: &[SimpleIndex]) -> Vec<Move> {
    (1..leaves.len())
        .rev()
        .map(|t| Move::Split {
            pos,
            left: path[t],
            right: leaves[t],
        })
        .collect()
}

/// Adjoint of [`split_moves`]: projects `leaves` starting at `pos` onto
/// the tree `path`.
pub fn fuse_moves(pos: usize, path: &[SimpleIndex]) -> Vec<Move> {
    (2..path.len()).map(|t| Move::Fuse { pos, channel: path[t] }).collect()
}

/// Positive (or inverse) half twist reversing `m` strands from `pos`.
pub fn half_twist(pos: usize, m: usize, inverse: bool) -> Vec<Move> {
    let mut out = Vec::new();
    for t in 0..m.saturating_sub(1) {
        for s in 0..m - 1 - t {
            out.push(Move::Braid { pos: pos + s, inverse });
        }
    }
    out
}

/// Conjugation `Hom(U, s_1 ⊗ … ⊗ s_m) → Hom(Ū, s̄_m ⊗ … ⊗ s̄_1)` of the basis
/// tree `path`, as a diagram on the single strand `Ū`.
pub fn rotation(data: &FusionData, leaves: &[SimpleIndex], path: &[SimpleIndex]) -> Diagram {
    let root = *path.last().expect("nonempty path");
    let mut d = Diagram::new(vec![data.dual(root)]);
    for (t, &s) in leaves.iter().enumerate() {
        d = d.cup(1 + t, data.dual(s));
    }
    for m in fuse_moves(1, path) {
        d = d.then(m);
    }
    d.cap(0)
}

/// Matrix of `d` from `basis_in` to `basis_out` (columns indexed by input).
pub fn evaluate(data: &FusionData, d: &Diagram, basis_in: &TreeBasis, basis_out: &TreeBasis) -> Result<CMat> {
    if basis_in.leaves != d.leaves {
        return Err(Error::Basis(format!(
            "input basis on {:?}, diagram starts on {:?}",
            basis_in.leaves, d.leaves
        )));
    }
    let target = d.target(data)?;
    if basis_out.leaves != target {
        return Err(Error::Basis(format!(
            "output basis on {:?}, diagram ends on {:?}",
            basis_out.leaves, target
        )));
    }
    let mut m = zeros(basis_out.dim(), basis_in.dim());
    for (col, path) in basis_in.vectors.iter().enumerate() {
        let out = d.apply(data, &State::basis_vector(&basis_in.leaves, path))?;
        for (p, v) in out.amps {
            if let Some(row) = basis_out.position(&p) {
                m[(row, col)] += v;
            }
        }
    }
    Ok(m)
}

/// The diagram as a morphism `Σ_U Hom(U, source) → Σ_U Hom(U, target)`
/// of multiplicity spaces, one block per root.
pub fn evaluate_mor(data: &FusionData, d: &Diagram) -> Result<Mor> {
    let target = d.target(data)?;
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut blocks = BTreeMap::new();
    for u in 0..data.rank() {
        let bi = tree_basis(data, &d.leaves, u);
        let bo = tree_basis(data, &target, u);
        src.push((u, bi.dim() as u32));
        tgt.push((u, bo.dim() as u32));
        if bi.dim() > 0 && bo.dim() > 0 {
            blocks.insert(u, evaluate(data, d, &bi, &bo)?);
        }
    }
    Mor::new(Obj::from_pairs(src), Obj::from_pairs(tgt), blocks)
}

/// Scalar value of a diagram with no free strands.
pub fn closed_evaluation(data: &FusionData, d: &Diagram) -> Result<C64> {
    if !d.leaves.is_empty() {
        return Err(Error::Diagram {
            index: 0,
            detail: format!("diagram has {} free input strands", d.leaves.len()),
        });
    }
    let target = d.target(data)?;
    if !target.is_empty() {
        return Err(Error::Diagram {
            index: d.moves.len(),
            detail: format!("diagram has {} free output strands", target.len()),
        });
    }
    let out = d.apply(data, &State::basis_vector(&[], &[data.unit()]))?;
    Ok(out.amps.get(&vec![data.unit()]).copied().unwrap_or(re(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::builtin;
    use crate::linalg::{identity, max_abs_diff};

    #[test]
    fn basis_dimensions() {
        let t = builtin("trivial").unwrap();
        assert_eq!(tree_basis(&t, &[0], 0).dim(), 1);
        let fib = builtin("fib").unwrap();
        let tau = fib.index_of("t").unwrap();
        assert_eq!(tree_basis(&fib, &[tau; 4], fib.unit()).dim(), 2);
        let ising = builtin("ising").unwrap();
        let s = ising.index_of("sigma").unwrap();
        let p = ising.index_of("psi").unwrap();
        assert_eq!(tree_basis(&ising, &[s, s], p).dim(), 1);
    }

    #[test]
    fn unknots() {
        for name in ["trivial", "fib", "ising", "pointed:4:1/4"] {
            let d = builtin(name).unwrap();
            for a in 0..d.rank() {
                let v = closed_evaluation(&d, &Diagram::new(vec![]).cup(0, a).cap(0)).unwrap();
                assert!((v - re(d.qdim(a))).norm() < 1e-9, "{name} {a}");
                let v = closed_evaluation(&d, &Diagram::new(vec![]).cup(0, a).twist(1).cap(0)).unwrap();
                assert!((v - d.twist(a) * d.qdim(a)).norm() < 1e-9, "{name} {a}");
            }
        }
    }

    #[test]
    fn snakes() {
        for name in ["fib", "ising", "pointed:4:1/4"] {
            let d = builtin(name).unwrap();
            for a in 0..d.rank() {
                let z1 = Diagram::new(vec![a]).cup(1, a).cap(0);
                let z2 = Diagram::new(vec![a]).cup(0, d.dual(a)).cap(1);
                let b = tree_basis(&d, &[a], a);
                for z in [z1, z2] {
                    let m = evaluate(&d, &z, &b, &b).unwrap();
                    assert!(max_abs_diff(&m, &identity(1)) < 1e-9, "{name} {a}");
                }
            }
        }
    }

    #[test]
    fn braid_then_inverse() {
        let fib = builtin("fib").unwrap();
        let t = fib.index_of("t").unwrap();
        for root in 0..2 {
            let b = tree_basis(&fib, &[t, t], root);
            let m = evaluate(&fib, &Diagram::new(vec![t, t]).braid(0).unbraid(0), &b, &b).unwrap();
            assert!(max_abs_diff(&m, &identity(1)) < 1e-10);
        }
    }

    #[test]
    fn mismatched_cap_is_rejected() {
        let ising = builtin("ising").unwrap();
        let (s, p) = (ising.index_of("sigma").unwrap(), ising.index_of("psi").unwrap());
        let err = Diagram::new(vec![s, p]).cap(0).target(&ising).unwrap_err();
        assert!(matches!(err, Error::Diagram { index: 0, .. }));
    }
}
