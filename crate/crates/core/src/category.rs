//! Finite semisimple C*-categories in skeletal form.
//!
//! An object is a multiplicity vector over the simples; a morphism is a
//! family of complex matrices, one per simple in the common support of its
//! source and target. Composition is blockwise, the dagger is the blockwise
//! conjugate transpose and the norm is the largest blockwise operator norm.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};

/// Index of a simple object in the ambient category.
pub type SimpleIndex = usize;

/// Object of a semisimple category: multiplicity of each simple.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize, Hash)]
pub struct Obj {
    mult: BTreeMap<SimpleIndex, u32>,
}

impl Obj {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn simple(i: SimpleIndex) -> Self {
        Self::from_pairs([(i, 1)])
    }

    pub fn from_pairs<I: IntoIterator<Item = (SimpleIndex, u32)>>(pairs: I) -> Self {
        let mut mult = BTreeMap::new();
        for (i, m) in pairs {
            if m > 0 {
                *mult.entry(i).or_insert(0) += m;
            }
        }
        Obj { mult }
    }

    /// From a dense multiplicity vector indexed by simple.
    pub fn from_dims(dims: &[usize]) -> Self {
        Self::from_pairs(dims.iter().enumerate().map(|(i, &d)| (i, d as u32)))
    }

    pub fn mult(&self, i: SimpleIndex) -> usize {
        self.mult.get(&i).copied().unwrap_or(0) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.mult.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = SimpleIndex> + '_ {
        self.mult.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SimpleIndex, usize)> + '_ {
        self.mult.iter().map(|(&i, &m)| (i, m as usize))
    }

    pub fn total_dim(&self) -> usize {
        self.mult.values().map(|&m| m as usize).sum()
    }

    /// Dense multiplicity vector of length `n`.
    pub fn dims(&self, n: usize) -> Vec<usize> {
        (0..n).map(|i| self.mult(i)).collect()
    }
}

impl fmt::Debug for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.mult.iter()).finish()
    }
}

/// Morphism between two objects, stored as one block per simple.
#[derive(Clone, Debug, PartialEq)]
pub struct Mor {
    source: Obj,
    target: Obj,
    blocks: BTreeMap<SimpleIndex, CMat>,
}

fn common_support<'a>(x: &'a Obj, y: &'a Obj) -> impl Iterator<Item = SimpleIndex> + 'a {
    x.support().filter(move |&i| y.mult(i) > 0)
}

impl Mor {
    /// Builds a morphism from explicit blocks, checking every block shape.
    pub fn new(source: Obj, target: Obj, mut blocks: BTreeMap<SimpleIndex, CMat>) -> Result<Self> {
        for (&i, b) in &blocks {
            if b.shape() != (target.mult(i), source.mult(i)) {
                return Err(Error::Composition {
                    simple: i,
                    detail: format!(
                        "block has shape {:?}, expected ({}, {})",
                        b.shape(),
                        target.mult(i),
                        source.mult(i)
                    ),
                });
            }
        }
        blocks.retain(|&i, _| source.mult(i) > 0 && target.mult(i) > 0);
        for i in common_support(&source, &target).collect::<Vec<_>>() {
            blocks
                .entry(i)
                .or_insert_with(|| linalg::zeros(target.mult(i), source.mult(i)));
        }
        Ok(Mor {
            source,
            target,
            blocks,
        })
    }

    pub fn zero(source: &Obj, target: &Obj) -> Self {
        let blocks = common_support(source, target)
            .map(|i| (i, linalg::zeros(target.mult(i), source.mult(i))))
            .collect();
        Mor {
            source: source.clone(),
            target: target.clone(),
            blocks,
        }
    }

    pub fn identity(x: &Obj) -> Self {
        let blocks = x.iter().map(|(i, m)| (i, linalg::identity(m))).collect();
        Mor {
            source: x.clone(),
            target: x.clone(),
            blocks,
        }
    }

    pub fn source(&self) -> &Obj {
        &self.source
    }

    pub fn target(&self) -> &Obj {
        &self.target
    }

    pub fn block(&self, i: SimpleIndex) -> Option<&CMat> {
        self.blocks.get(&i)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (SimpleIndex, &CMat)> {
        self.blocks.iter().map(|(&i, b)| (i, b))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            *b *= s;
        }
        out
    }

    pub fn add(&self, other: &Mor) -> Result<Self> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Composition {
                simple: first_mismatch(&self.source, &other.source)
                    .or_else(|| first_mismatch(&self.target, &other.target))
                    .unwrap_or(0),
                detail: "sum of morphisms with different source or target".into(),
            });
        }
        let mut out = self.clone();
        for (i, b) in out.blocks.iter_mut() {
            *b += &other.blocks[i];
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Mor) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Maximum absolute entry difference; `f64::INFINITY` when the shapes
    /// differ.
    pub fn distance(&self, other: &Mor) -> f64 {
        if self.source != other.source || self.target != other.target {
            return f64::INFINITY;
        }
        self.blocks
            .iter()
            .map(|(i, b)| linalg::max_abs_diff(b, &other.blocks[i]))
            .fold(0.0, f64::max)
    }
}

fn first_mismatch(x: &Obj, y: &Obj) -> Option<SimpleIndex> {
    x.support()
        .chain(y.support())
        .find(|&i| x.mult(i) != y.mult(i))
}

/// `f ∘ g`. Requires `g.target == f.source`.
pub fn compose(f: &Mor, g: &Mor) -> Result<Mor> {
    if let Some(i) = first_mismatch(&g.target, &f.source) {
        return Err(Error::Composition {
            simple: i,
            detail: format!(
                "inner target has multiplicity {}, outer source has {}",
                g.target.mult(i),
                f.source.mult(i)
            ),
        });
    }
    let mut out = Mor::zero(&g.source, &f.target);
    for (i, b) in out.blocks.iter_mut() {
        // both blocks exist: i is in the support of g.source, f.target and
        // the shared middle object
        if let (Some(fb), Some(gb)) = (f.blocks.get(i), g.blocks.get(i)) {
            *b = fb * gb;
        }
    }
    Ok(out)
}

pub fn dagger(f: &Mor) -> Mor {
    Mor {
        source: f.target.clone(),
        target: f.source.clone(),
        blocks: f.blocks.iter().map(|(&i, b)| (i, b.adjoint())).collect(),
    }
}

/// Maximum over simples of the operator norm of each block.
pub fn norm(f: &Mor) -> f64 {
    f.blocks
        .values()
        .map(linalg::spectral_norm)
        .fold(0.0, f64::max)
}

/// Cokernel of `f - g` with its coisometric projection `q`.
pub fn coequalizer(f: &Mor, g: &Mor) -> Result<(Obj, Mor)> {
    let diff = f.sub(g)?;
    let target = f.target.clone();
    let mut q_blocks = BTreeMap::new();
    let mut dims = Vec::new();
    for (i, m) in target.iter() {
        let rows = match diff.blocks.get(&i) {
            Some(d) => linalg::cokernel_rows(d),
            None => linalg::identity(m),
        };
        dims.push((i, rows.nrows() as u32));
        q_blocks.insert(i, rows);
    }
    let quotient = Obj::from_pairs(dims);
    let q = Mor::new(target, quotient.clone(), q_blocks)?;
    Ok((quotient, q))
}

/// `x ⊕ y` with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub object: Obj,
    pub inj_left: Mor,
    pub inj_right: Mor,
}

impl DirectSum {
    pub fn proj_left(&self) -> Mor {
        dagger(&self.inj_left)
    }

    pub fn proj_right(&self) -> Mor {
        dagger(&self.inj_right)
    }
}

pub fn direct_sum(x: &Obj, y: &Obj) -> DirectSum {
    let object = Obj::from_pairs(x.iter().chain(y.iter()).map(|(i, m)| (i, m as u32)));
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for (i, total) in object.iter() {
        let (a, b) = (x.mult(i), y.mult(i));
        if a > 0 {
            let mut blk = linalg::zeros(total, a);
            blk.view_mut((0, 0), (a, a)).fill_with_identity();
            left.insert(i, blk);
        }
        if b > 0 {
            let mut blk = linalg::zeros(total, b);
            blk.view_mut((a, 0), (b, b)).fill_with_identity();
            right.insert(i, blk);
        }
    }
    DirectSum {
        inj_left: Mor::new(x.clone(), object.clone(), left).expect("consistent shapes"),
        inj_right: Mor::new(y.clone(), object.clone(), right).expect("consistent shapes"),
        object,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, re};

    fn sample() -> Mor {
        let x = Obj::from_dims(&[2, 1]);
        let y = Obj::from_dims(&[1, 2]);
        let mut b = BTreeMap::new();
        b.insert(0, CMat::from_row_slice(1, 2, &[re(1.0), c(0.0, 2.0)]));
        b.insert(1, CMat::from_row_slice(2, 1, &[re(3.0), c(1.0, -1.0)]));
        Mor::new(x, y, b).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let f = sample();
        let l = compose(&Mor::identity(f.target()), &f).unwrap();
        let r = compose(&f, &Mor::identity(f.source())).unwrap();
        assert_eq!(l.distance(&f), 0.0);
        assert_eq!(r.distance(&f), 0.0);
    }

    #[test]
    fn compose_reports_offending_simple() {
        let f = sample();
        let err = compose(&f, &f).unwrap_err();
        assert!(matches!(err, Error::Composition { simple: 0, .. }));
    }

    #[test]
    fn zero_object_propagates() {
        let z = Obj::zero();
        let f = Mor::identity(&z);
        assert_eq!(norm(&f), 0.0);
        let (q, p) = coequalizer(&f, &f).unwrap();
        assert!(q.is_zero());
        assert!(p.source().is_zero());
    }

    #[test]
    fn direct_sum_adds_multiplicities() {
        let s = direct_sum(&Obj::from_dims(&[1, 2]), &Obj::from_dims(&[0, 3]));
        assert_eq!(s.object, Obj::from_dims(&[1, 5]));
        let z = direct_sum(&Obj::from_dims(&[2, 1]), &Obj::zero());
        assert_eq!(z.object, Obj::from_dims(&[2, 1]));
    }

    #[test]
    fn coequalizer_of_identity_and_zero_is_zero() {
        let x = Obj::from_dims(&[2, 3]);
        let (q, _) = coequalizer(&Mor::identity(&x), &Mor::zero(&x, &x)).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn bad_block_shape_is_rejected() {
        let mut b = BTreeMap::new();
        b.insert(0, linalg::zeros(2, 2));
        assert!(Mor::new(Obj::simple(0), Obj::simple(0), b).is_err());
    }
}
