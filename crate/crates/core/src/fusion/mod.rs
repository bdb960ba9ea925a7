//! Skeletal data of a unitary braided fusion category.
//!
//! F-symbols follow the convention
//! `|(a b)_e c; d> = Σ_f F^{abc}_d[e, f] |a (b c)_f; d>`
//! on orthonormal splitting trees, with every F-matrix that has a unit
//! among `a, b, c` equal to the identity. R-symbols are the eigenvalues of
//! the braiding `σ_{a,b}` on the splitting space `Hom(c, a ⊗ b)`.

mod builtin;
mod pointed;
mod schema;
pub mod verify;

use std::collections::HashMap;

use crate::category::SimpleIndex;
use crate::error::{Error, Result};
use crate::linalg::{re, C64};

pub use builtin::{builtin, builtin_document, BUILTIN_NAMES};
pub use pointed::{parse_pointed, pointed, PointedParams};
pub use schema::{load, CategoryDocument};
pub use verify::verify;

/// Tolerance used when cross-checking user-supplied dimensions and twists.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct FusionData {
    name: String,
    labels: Vec<String>,
    unit: SimpleIndex,
    dual: Vec<SimpleIndex>,
    fusion: Vec<u32>,
    f_symbols: HashMap<[SimpleIndex; 6], C64>,
    r_symbols: HashMap<[SimpleIndex; 3], C64>,
    qdim: Vec<f64>,
    twist: Vec<C64>,
}

impl FusionData {
    /// Assembles and validates the structural part of a category. Missing
    /// `qdim`/`twist` are derived; supplied ones are cross-checked.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        unit: SimpleIndex,
        dual: Vec<SimpleIndex>,
        fusion: Vec<u32>,
        f_symbols: HashMap<[SimpleIndex; 6], C64>,
        r_symbols: HashMap<[SimpleIndex; 3], C64>,
        qdim: Option<Vec<f64>>,
        twist: Option<Vec<C64>>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Schema("category has no simples".into()));
        }
        if fusion.len() != n * n * n {
            return Err(Error::Schema("fusion tensor has the wrong size".into()));
        }
        let mut data = FusionData {
            name: name.into(),
            labels,
            unit,
            dual,
            fusion,
            f_symbols,
            r_symbols,
            qdim: Vec::new(),
            twist: Vec::new(),
        };
        data.check_structure()?;
        let derived = derive_qdims(&data)?;
        if let Some(given) = qdim {
            for (a, (&g, &d)) in given.iter().zip(&derived).enumerate() {
                if (g - d).abs() > CROSS_CHECK_TOL {
                    return Err(Error::DerivedMismatch {
                        field: "qdim",
                        label: data.labels[a].clone(),
                        given: format!("{g}"),
                        derived: format!("{d}"),
                    });
                }
            }
        }
        data.qdim = derived;
        data.fill_trivial_symbols()?;
        if data.has_braiding() {
            let derived = derive_twists(&data)?;
            if let Some(given) = twist {
                for (a, (&g, &d)) in given.iter().zip(&derived).enumerate() {
                    if (g - d).norm() > CROSS_CHECK_TOL {
                        return Err(Error::DerivedMismatch {
                            field: "twist",
                            label: data.labels[a].clone(),
                            given: format!("{g}"),
                            derived: format!("{d}"),
                        });
                    }
                }
            }
            data.twist = derived;
        } else if let Some(given) = twist {
            data.twist = given;
        }
        Ok(data)
    }

    fn check_structure(&self) -> Result<()> {
        let n = self.rank();
        let u = self.unit;
        if u >= n {
            return Err(Error::Schema(format!("unit index {u} out of range")));
        }
        if self.dual.len() != n {
            return Err(Error::Schema("dual map has the wrong size".into()));
        }
        for a in 0..n {
            let d = self.dual[a];
            if d >= n || self.dual[d] != a {
                return Err(Error::Dual(self.labels[a].clone()));
            }
        }
        if self.dual[u] != u {
            return Err(Error::Dual(self.labels[u].clone()));
        }
        for a in 0..n {
            for c in 0..n {
                let expect = u32::from(a == c);
                if self.n(a, u, c) != expect || self.n(u, a, c) != expect {
                    return Err(Error::UnitCompatibility(self.labels[a].clone()));
                }
            }
            for b in 0..n {
                let expect = u32::from(b == self.dual[a]);
                if self.n(a, b, u) != expect {
                    return Err(Error::Rigidity(self.labels[a].clone()));
                }
            }
        }
        Ok(())
    }

    /// Inserts the identity F-symbols with a unit leg and unit R-symbols;
    /// fills 1×1 F-matrices that were left out of the document with 1.
    fn fill_trivial_symbols(&mut self) -> Result<()> {
        let n = self.rank();
        if !self.is_multiplicity_free() {
            return Ok(());
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let es: Vec<_> = (0..n)
                            .filter(|&e| self.n(a, b, e) > 0 && self.n(e, c, d) > 0)
                            .collect();
                        let fs: Vec<_> = (0..n)
                            .filter(|&f| self.n(b, c, f) > 0 && self.n(a, f, d) > 0)
                            .collect();
                        if es.is_empty() {
                            continue;
                        }
                        let trivial = a == self.unit || b == self.unit || c == self.unit;
                        for &e in &es {
                            for &f in &fs {
                                let key = [a, b, c, d, e, f];
                                if trivial {
                                    let v = if es.len() == 1 || e == f { re(1.0) } else { re(0.0) };
                                    self.f_symbols.insert(key, v);
                                } else if !self.f_symbols.contains_key(&key) {
                                    if es.len() == 1 && fs.len() == 1 {
                                        self.f_symbols.insert(key, re(1.0));
                                    } else {
                                        return Err(Error::MissingSymbol {
                                            kind: "F",
                                            key: self.key_string(&key),
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        if self.r_symbols.is_empty() {
            return Ok(());
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.n(a, b, c) == 0 {
                        continue;
                    }
                    let key = [a, b, c];
                    if a == self.unit || b == self.unit {
                        self.r_symbols.insert(key, re(1.0));
                    } else if !self.r_symbols.contains_key(&key) {
                        return Err(Error::MissingSymbol {
                            kind: "R",
                            key: self.key_string(&key),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn key_string(&self, key: &[SimpleIndex]) -> String {
        let parts: Vec<&str> = key.iter().map(|&i| self.labels[i].as_str()).collect();
        format!("({})", parts.join(","))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: SimpleIndex) -> &str {
        &self.labels[a]
    }

    pub fn index_of(&self, label: &str) -> Result<SimpleIndex> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn unit(&self) -> SimpleIndex {
        self.unit
    }

    pub fn dual(&self, a: SimpleIndex) -> SimpleIndex {
        self.dual[a]
    }

    /// Fusion multiplicity `N[a][b][c]`.
    pub fn n(&self, a: SimpleIndex, b: SimpleIndex, c: SimpleIndex) -> u32 {
        let n = self.rank();
        self.fusion[(a * n + b) * n + c]
    }

    /// Channels `c` with `N[a][b][c] > 0`, ascending.
    pub fn channels(&self, a: SimpleIndex, b: SimpleIndex) -> impl Iterator<Item = SimpleIndex> + '_ {
        (0..self.rank()).filter(move |&c| self.n(a, b, c) > 0)
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.fusion.iter().all(|&m| m <= 1)
    }

    pub fn has_braiding(&self) -> bool {
        !self.r_symbols.is_empty() || self.rank() == 1
    }

    fn require_mult_free(&self, a: SimpleIndex, b: SimpleIndex, c: SimpleIndex) -> Result<()> {
        let m = self.n(a, b, c);
        if m > 1 {
            return Err(Error::UnsupportedMultiplicity { a, b, c, n: m });
        }
        Ok(())
    }

    /// First fusion entry with multiplicity above one, if any.
    pub fn first_multiplicity(&self) -> Option<Error> {
        let n = self.rank();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.n(a, b, c) > 1 {
                        return Some(Error::UnsupportedMultiplicity { a, b, c, n: self.n(a, b, c) });
                    }
                }
            }
        }
        None
    }

    /// `F^{abc}_d[e, f]`; zero when the tuple is not admissible.
    pub fn f(&self, a: usize, b: usize, c: usize, d: usize, e: usize, f: usize) -> Result<C64> {
        self.require_mult_free(a, b, e)?;
        self.require_mult_free(e, c, d)?;
        self.require_mult_free(b, c, f)?;
        self.require_mult_free(a, f, d)?;
        Ok(self.f_symbols.get(&[a, b, c, d, e, f]).copied().unwrap_or(re(0.0)))
    }

    /// `R^{ab}_c`; zero when `c` is not a channel of `a ⊗ b`.
    pub fn r(&self, a: usize, b: usize, c: usize) -> Result<C64> {
        self.require_mult_free(a, b, c)?;
        if self.n(a, b, c) == 0 {
            return Ok(re(0.0));
        }
        if a == self.unit || b == self.unit {
            return Ok(re(1.0));
        }
        self.r_symbols
            .get(&[a, b, c])
            .copied()
            .ok_or_else(|| Error::MissingSymbol {
                kind: "R",
                key: self.key_string(&[a, b, c]),
            })
    }

    pub fn qdim(&self, a: SimpleIndex) -> f64 {
        self.qdim[a]
    }

    pub fn qdims(&self) -> &[f64] {
        &self.qdim
    }

    pub fn twist(&self, a: SimpleIndex) -> C64 {
        self.twist.get(a).copied().unwrap_or(re(1.0))
    }

    pub fn twists(&self) -> &[C64] {
        &self.twist
    }

    /// `Σ_a d_a²`.
    pub fn global_dimension(&self) -> f64 {
        self.qdim.iter().map(|d| d * d).sum()
    }

    /// Adds `delta` to a stored F-symbol `F^{abc}_d[e,f]`. Derived data is
    /// left untouched, so this is only meant for negative controls.
    pub fn perturb_f(&mut self, key: [SimpleIndex; 6], delta: C64) -> Result<()> {
        let v = self
            .f_symbols
            .get_mut(&key)
            .ok_or_else(|| Error::Schema(format!("no stored F-symbol at {key:?}")))?;
        *v += delta;
        Ok(())
    }

    /// Canonical textual form used for content hashing.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("simples={:?};unit={};dual={:?};", self.labels, self.unit, self.dual));
        out.push_str(&format!("fusion={:?};", self.fusion));
        let mut f: Vec<_> = self.f_symbols.iter().collect();
        f.sort_by_key(|(k, _)| **k);
        for (k, v) in f {
            out.push_str(&format!("F{:?}={:.15e},{:.15e};", k, v.re, v.im));
        }
        let mut r: Vec<_> = self.r_symbols.iter().collect();
        r.sort_by_key(|(k, _)| **k);
        for (k, v) in r {
            out.push_str(&format!("R{:?}={:.15e},{:.15e};", k, v.re, v.im));
        }
        out
    }
}

/// Perron–Frobenius dimensions of every simple.
///
/// Iterates `v ← (N_a + I) v` from the all-ones vector; the shift makes the
/// dominant eigenvalue strictly dominant even for permutation matrices.
pub fn derive_qdims(data: &FusionData) -> Result<Vec<f64>> {
    const MAX_STEPS: usize = 100_000;
    let n = data.rank();
    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        let mut v = vec![1.0; n];
        let mut lambda = f64::NAN;
        let mut converged = false;
        for _ in 0..MAX_STEPS {
            let mut w = v.clone();
            for (b, wb) in w.iter_mut().enumerate() {
                for (c, vc) in v.iter().enumerate() {
                    *wb += data.n(a, b, c) as f64 * vc;
                }
            }
            let norm_v: f64 = v.iter().sum();
            let norm_w: f64 = w.iter().sum();
            let next = norm_w / norm_v;
            let scale = 1.0 / norm_w;
            w.iter_mut().for_each(|x| *x *= scale);
            let moved: f64 = w.iter().zip(&v).map(|(x, y)| (x - y * (1.0 / norm_v)).abs()).sum();
            v = w;
            if (next - lambda).abs() < 1e-15 * next && moved < 1e-14 {
                lambda = next;
                converged = true;
                break;
            }
            lambda = next;
        }
        if !converged {
            return Err(Error::NonConvergence(data.labels[a].clone()));
        }
        out.push(lambda - 1.0);
    }
    out[data.unit] = 1.0;
    Ok(out)
}

/// Twists `θ_a = Σ_c (d_c / d_a) N[a][a][c] R^{aa}_c`.
pub fn derive_twists(data: &FusionData) -> Result<Vec<C64>> {
    if let Some(err) = data.first_multiplicity() {
        return Err(err);
    }
    let n = data.rank();
    let mut out = Vec::with_capacity(n);
    for a in 0..n {
        let mut theta = re(0.0);
        for c in data.channels(a, a).collect::<Vec<_>>() {
            theta += data.r(a, a, c)? * (data.qdim(c) / data.qdim(a));
        }
        out.push(theta);
    }
    out[data.unit] = re(1.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_category() {
        let t = builtin("trivial").unwrap();
        assert_eq!(t.rank(), 1);
        assert_eq!(t.qdim(0), 1.0);
        assert_eq!(t.twist(0), re(1.0));
    }

    #[test]
    fn fibonacci_dimension_and_twist() {
        let fib = builtin("fib").unwrap();
        let tau = fib.index_of("t").unwrap();
        assert!((fib.qdim(tau) - 1.618_033_988_7).abs() < 1e-9);
        let expect = C64::from_polar(1.0, 4.0 * std::f64::consts::PI / 5.0);
        assert!((fib.twist(tau) - expect).norm() < 1e-12);
    }

    #[test]
    fn ising_sigma_dimension() {
        let ising = builtin("ising").unwrap();
        let s = ising.index_of("sigma").unwrap();
        assert!((ising.qdim(s) - 1.414_213_562_4).abs() < 1e-9);
    }

    #[test]
    fn pointed_dimensions_are_one() {
        let z2 = builtin("pointed:2:0").unwrap();
        assert!(z2.qdims().iter().all(|&d| (d - 1.0).abs() < 1e-12));
        assert!((z2.twist(1) - re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn multiplicity_two_blocks_symbol_lookup() {
        // Z/1 ⊕ X with X ⊗ X = 1 + 2X (Haagerup-like fusion ring, dims only)
        let labels = vec!["1".to_string(), "x".to_string()];
        let mut fusion = vec![0u32; 8];
        let idx = |a: usize, b: usize, c: usize| (a * 2 + b) * 2 + c;
        fusion[idx(0, 0, 0)] = 1;
        fusion[idx(0, 1, 1)] = 1;
        fusion[idx(1, 0, 1)] = 1;
        fusion[idx(1, 1, 0)] = 1;
        fusion[idx(1, 1, 1)] = 2;
        let data = FusionData::new(
            "mult2",
            labels,
            0,
            vec![0, 1],
            fusion,
            HashMap::new(),
            HashMap::new(),
            None,
            None,
        )
        .unwrap();
        assert!((data.qdim(1) - (1.0 + 2f64.sqrt())).abs() < 1e-9);
        assert!(matches!(
            data.f(1, 1, 1, 1, 1, 1),
            Err(Error::UnsupportedMultiplicity { .. })
        ));
        assert!(matches!(derive_twists(&data), Err(Error::UnsupportedMultiplicity { .. })));
    }
}
