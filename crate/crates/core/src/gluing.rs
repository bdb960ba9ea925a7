//! Gluing patterns for disks with handles, their topology, and the handle
//! algebras `a_P`.

use std::fmt;

use serde::Serialize;

use crate::algebra::{module_residual, relative_tensor, AlgebraObject, HalfBraiding, ModuleObject, Side};
use crate::category::{Mor, Obj};
use crate::error::{Error, Result};
use crate::fusion::FusionData;
use crate::linalg::{self, C64};
use crate::strand::{strand_algebra, strand_half_braiding, Exchange, StrandBasis};

/// Default cap on `rank^(2n)` channel terms.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Relative position of two handles `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Crossing {
    /// `P(i) < P(j) < P(i') < P(j')`
    L,
    /// `P(j) < P(i) < P(j') < P(i')`
    #[serde(rename = "L^-1")]
    LInv,
    /// `P(i) < P(j) < P(j') < P(i')`
    N,
    /// `P(j) < P(i) < P(i') < P(j')`
    #[serde(rename = "N^-1")]
    NInv,
    U,
}

impl fmt::Display for Crossing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Crossing::L => "L",
            Crossing::LInv => "L^-1",
            Crossing::N => "N",
            Crossing::NInv => "N^-1",
            Crossing::U => "U",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluingPattern {
    pub rank: usize,
    /// `start[i] = P(i+1)` and `end[i] = P((i+1)')`, 1-based positions.
    pub start: Vec<usize>,
    pub end: Vec<usize>,
    /// `tau[pos - 1]` is the slot of the strand at `pos` in the row
    /// `X̄_1 X_1 … X̄_n X_n`.
    pub tau: Vec<usize>,
    pub classification: Vec<Vec<Option<Crossing>>>,
    pub genus: usize,
    pub boundary: usize,
}

fn parse_token(tok: &str) -> Option<(usize, bool)> {
    let (num, primed) = if let Some(s) = tok.strip_suffix('\'') {
        (s, true)
    } else if let Some(s) = tok.strip_suffix('′') {
        (s, true)
    } else {
        (tok, false)
    };
    if num.is_empty() || !num.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let k: usize = num.parse().ok()?;
    (k >= 1).then_some((k, primed))
}

pub fn parse_pattern(text: &str) -> Result<GluingPattern> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() % 2 != 0 {
        return Err(Error::Pattern(format!("odd number of tokens ({})", tokens.len())));
    }
    let n = tokens.len() / 2;
    let mut start = vec![0usize; n];
    let mut end = vec![0usize; n];
    for (p, tok) in tokens.iter().enumerate() {
        let (k, primed) = parse_token(tok).ok_or_else(|| Error::Pattern(format!("malformed token `{tok}` at position {}", p + 1)))?;
        if k > n {
            return Err(Error::Pattern(format!("token `{tok}` at position {} exceeds rank {n}", p + 1)));
        }
        let slot = if primed { &mut end[k - 1] } else { &mut start[k - 1] };
        if *slot != 0 {
            return Err(Error::Pattern(format!("token `{tok}` repeated at position {}", p + 1)));
        }
        *slot = p + 1;
    }
    from_positions(start, end)
}

/// Builds a pattern from `P(i)` and `P(i')`.
pub fn from_positions(start: Vec<usize>, end: Vec<usize>) -> Result<GluingPattern> {
    let n = start.len();
    if end.len() != n {
        return Err(Error::Pattern("rank mismatch between starts and ends".into()));
    }
    let mut seen = vec![false; 2 * n];
    for &p in start.iter().chain(&end) {
        if p == 0 || p > 2 * n || seen[p - 1] {
            return Err(Error::Pattern(format!("assignment is not a bijection onto 1..{} (position {p})", 2 * n)));
        }
        seen[p - 1] = true;
    }
    let mut tau = vec![0; 2 * n];
    for i in 0..n {
        tau[start[i] - 1] = 2 * i;
        tau[end[i] - 1] = 2 * i + 1;
    }
    let mut pat = GluingPattern {
        rank: n,
        start,
        end,
        tau,
        classification: vec![vec![None; n]; n],
        genus: 0,
        boundary: 0,
    };
    for i in 0..n {
        for j in i + 1..n {
            pat.classification[i][j] = Some(classify(&pat, i, j));
        }
    }
    let (g, b) = topology(&pat)?;
    pat.genus = g;
    pat.boundary = b;
    Ok(pat)
}

/// Ends of handle `i` in increasing order; a handle listed as `k' … k`
/// glues the same band as `k … k'`.
fn ends(p: &GluingPattern, i: usize) -> (usize, usize) {
    (p.start[i].min(p.end[i]), p.start[i].max(p.end[i]))
}

fn classify(p: &GluingPattern, i: usize, j: usize) -> Crossing {
    let ((a, a2), (b, b2)) = (ends(p, i), ends(p, j));
    if a < b && b < a2 && a2 < b2 {
        Crossing::L
    } else if b < a && a < b2 && b2 < a2 {
        Crossing::LInv
    } else if a < b && b < b2 && b2 < a2 {
        Crossing::N
    } else if b < a && a < a2 && a2 < b2 {
        Crossing::NInv
    } else {
        Crossing::U
    }
}

/// A height for each strand `X̄_k`, `X_k` of the row. Every exchange
/// `C_{ij}` and the half-braiding of `a_P` are read off from this one order:
/// linked and nested pairs keep their composites, and an unlinked pair
/// passes over as `σ` unless the surrounding handles force another
/// exchange.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layering {
    /// `height[2k]` for `X̄_k` and `height[2k + 1]` for `X_k`, a permutation
    /// of `0..2n` counted from the bottom.
    pub height: Vec<usize>,
    /// The strand crossing every handle sits above the strands of height
    /// below `cut`.
    pub cut: usize,
}

impl Layering {
    /// Exchange moving handle `i` in front of handle `j > i`.
    pub fn exchange(&self, i: usize, j: usize) -> Exchange {
        let h = &self.height;
        let (vb, v, ub, u) = (h[2 * i], h[2 * i + 1], h[2 * j], h[2 * j + 1]);
        Exchange([vb > u, v > u, vb > ub, v > ub])
    }

    /// Per handle, whether the crossing strand passes over `X_k` and `X̄_k`.
    pub fn half_braiding(&self) -> Vec<[bool; 2]> {
        (0..self.height.len() / 2)
            .map(|k| [self.height[2 * k + 1] < self.cut, self.height[2 * k] < self.cut])
            .collect()
    }
}

/// Exchanges tried for an unlinked pair: first those with no winding
/// between the two handles, then the linked composites, then the rest.
const UNLINKED: [[bool; 4]; 16] = [
    [true, true, true, true],
    [true, true, false, false],
    [true, false, true, false],
    [false, false, false, false],
    [false, true, false, true],
    [false, false, true, true],
    [true, true, true, false],
    [true, false, false, false],
    [false, true, true, true],
    [false, false, false, true],
    [true, true, false, true],
    [true, false, true, true],
    [false, true, false, false],
    [false, false, true, false],
    [true, false, false, true],
    [false, true, true, false],
];

struct Heights {
    above: Vec<Vec<bool>>,
}

impl Heights {
    fn reaches(&self, from: usize, to: usize) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![false; self.above.len()];
        while let Some(a) = stack.pop() {
            if a == to {
                return true;
            }
            for (b, &e) in self.above[a].iter().enumerate() {
                if e && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        false
    }

    /// Adds `hi` above `lo` unless that closes a cycle.
    fn add(&mut self, hi: usize, lo: usize) -> bool {
        if self.reaches(lo, hi) {
            return false;
        }
        self.above[hi][lo] = true;
        true
    }

    fn add_pair(&mut self, i: usize, j: usize, e: [bool; 4]) -> bool {
        let moving = [2 * i, 2 * i + 1, 2 * i, 2 * i + 1];
        let fixed = [2 * j + 1, 2 * j + 1, 2 * j, 2 * j];
        (0..4).all(|t| if e[t] { self.add(moving[t], fixed[t]) } else { self.add(fixed[t], moving[t]) })
    }
}

fn settle(h: &Heights, pairs: &[(usize, usize)]) -> Option<Heights> {
    let Some((&(i, j), rest)) = pairs.split_first() else {
        return Some(Heights { above: h.above.clone() });
    };
    UNLINKED.iter().find_map(|&e| {
        let mut h2 = Heights { above: h.above.clone() };
        if h2.add_pair(i, j, e) {
            settle(&h2, rest)
        } else {
            None
        }
    })
}

pub fn layering(p: &GluingPattern) -> Result<Layering> {
    let n = p.rank;
    let mut h = Heights { above: vec![vec![false; 2 * n]; 2 * n] };
    for k in 0..n {
        h.add(2 * k, 2 * k + 1);
    }
    let mut unlinked = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            match classify(p, i, j) {
                Crossing::U => unlinked.push((i, j)),
                c => {
                    if !h.add_pair(i, j, Exchange::literal(c).0) {
                        return Err(Error::Internal(format!("linked exchanges of handles {} and {} are cyclic", i + 1, j + 1)));
                    }
                }
            }
        }
    }
    let h = settle(&h, &unlinked).ok_or_else(|| Error::Internal("no consistent layering of unlinked handles".into()))?;
    let height: Vec<usize> = (0..2 * n).map(|a| (0..2 * n).filter(|&b| b != a && h.reaches(a, b)).count()).collect();
    let mut sorted = height.clone();
    sorted.sort_unstable();
    if sorted != (0..2 * n).collect::<Vec<_>>() {
        return Err(Error::Internal("layering is not a total order".into()));
    }
    let threaded = |cut: usize| (0..n).filter(|&k| height[2 * k + 1] < cut && height[2 * k] >= cut).count();
    let cut = (0..=2 * n).rev().max_by_key(|&c| threaded(c)).unwrap_or(0);
    Ok(Layering { height, cut })
}

/// Classification of handles `i < j`, 1-based.
pub fn classify_pair(p: &GluingPattern, i: usize, j: usize) -> Result<Crossing> {
    if i == 0 || i >= j || j > p.rank {
        return Err(Error::Pattern(format!("need 1 ≤ i < j ≤ {}, got ({i}, {j})", p.rank)));
    }
    Ok(classify(p, i - 1, j - 1))
}

/// Counts of each crossing type among all pairs.
pub fn crossing_counts(p: &GluingPattern) -> [(Crossing, usize); 5] {
    let mut out = [
        (Crossing::L, 0),
        (Crossing::LInv, 0),
        (Crossing::N, 0),
        (Crossing::NInv, 0),
        (Crossing::U, 0),
    ];
    for row in &p.classification {
        for c in row.iter().flatten() {
            for e in out.iter_mut() {
                if e.0 == *c {
                    e.1 += 1;
                }
            }
        }
    }
    out
}

/// `(genus, boundary_count)` from the boundary walk: leaving position `q`
/// along the disk boundary reaches position `q + 1`, and crossing a handle
/// jumps to the partner end.
pub fn topology(p: &GluingPattern) -> Result<(usize, usize)> {
    let m = 2 * p.rank;
    if m == 0 {
        return Ok((0, 1));
    }
    let mut partner = vec![0; m];
    for i in 0..p.rank {
        partner[p.start[i] - 1] = p.end[i] - 1;
        partner[p.end[i] - 1] = p.start[i] - 1;
    }
    let mut seen = vec![false; m];
    let mut b = 0;
    for s in 0..m {
        if seen[s] {
            continue;
        }
        b += 1;
        let mut q = s;
        let mut steps = 0;
        while !seen[q] {
            seen[q] = true;
            q = (partner[q] + 1) % m;
            steps += 1;
            if steps > m {
                return Err(Error::Internal("boundary walk did not close".into()));
            }
        }
        if q != s {
            return Err(Error::Internal(format!("boundary walk from {s} closed at {q}")));
        }
    }
    let twice = (1 + p.rank) as i64 - b as i64;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::Internal(format!("odd Euler defect for rank {} with {b} boundary circles", p.rank)));
    }
    Ok(((twice / 2) as usize, b))
}

pub fn build_a_p(p: &GluingPattern, data: &FusionData, cap: u64) -> Result<AlgebraObject> {
    let lay = layering(p)?;
    let basis = StrandBasis::new(data, p.rank, cap)?;
    strand_algebra(data, &basis, &|i, j| lay.exchange(i, j))
}

pub fn a_p_half_braiding(p: &GluingPattern, data: &FusionData, cap: u64) -> Result<HalfBraiding> {
    let lay = layering(p)?;
    let basis = StrandBasis::new(data, p.rank, cap)?;
    strand_half_braiding(data, &basis, &lay.half_braiding())
}

/// `dim a_P(1) = Σ_{X⃗} N(1, X̄_1 ⊗ X_1 ⊗ … )`, from multiset fusion counts.
pub fn ground_dimension(data: &FusionData, n: usize) -> u64 {
    // multiplicity of each simple in ⊕_X X̄ ⊗ X
    let rank = data.rank();
    let mut one = vec![0u64; rank];
    for x in 0..rank {
        for u in 0..rank {
            one[u] += data.n(data.dual(x), x, u) as u64;
        }
    }
    let mut acc = vec![0u64; rank];
    acc[data.unit()] = 1;
    for _ in 0..n {
        let mut next = vec![0u64; rank];
        for a in 0..rank {
            for b in 0..rank {
                if acc[a] == 0 || one[b] == 0 {
                    continue;
                }
                for c in data.channels(a, b) {
                    next[c] += acc[a] * one[b];
                }
            }
        }
        acc = next;
    }
    acc[data.unit()]
}

/// Whether every simple is invertible and the double braiding is trivial.
pub fn is_symmetric_pointed(data: &FusionData) -> bool {
    let n = data.rank();
    (0..n).all(|a| (data.qdim(a) - 1.0).abs() < 1e-9)
        && (0..n).all(|a| {
            (0..n).all(|b| {
                data.channels(a, b).all(|c| match (data.r(a, b, c), data.r(b, a, c)) {
                    (Ok(x), Ok(y)) => (x * y - C64::new(1.0, 0.0)).norm() < 1e-9,
                    _ => false,
                })
            })
        })
}

/// Right `F`-module structure on `a_P` through a functional on `F(1)`:
/// `x ◁ f = χ(f) x` for `f` in the unit fiber.
pub fn character_boundary_module(data: &FusionData, a_p: &AlgebraObject, f: &AlgebraObject, chi: &[C64]) -> ModuleObject {
    let u = data.unit();
    let mut action = std::collections::BTreeMap::new();
    for i in 0..data.rank() {
        let d = a_p.fibers[i];
        if d == 0 {
            continue;
        }
        let row = crate::linalg::CMat::from_row_slice(1, chi.len(), chi);
        action.insert((i, u, i), linalg::kron(&linalg::identity(d), &row));
    }
    let _ = f;
    ModuleObject {
        side: Side::Right,
        fibers: a_p.fibers.clone(),
        action,
    }
}

/// Shipped boundary modules: the annulus (regular action), and any pattern
/// with one boundary circle over the trivial or a symmetric pointed
/// category (action through the counit).
pub fn shipped_boundary_module(
    p: &GluingPattern,
    data: &FusionData,
    a_p: &AlgebraObject,
    f: &AlgebraObject,
    counit: &[C64],
) -> Option<ModuleObject> {
    if p.rank == 1 {
        return Some(ModuleObject::regular(f, Side::Right));
    }
    if p.boundary == 1 && (data.rank() == 1 || is_symmetric_pointed(data)) {
        return Some(character_boundary_module(data, a_p, f, counit));
    }
    None
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub quotient: Obj,
    pub projection: Mor,
    pub dimension: usize,
    pub module_residual: f64,
}

/// `a_P ⊗_F 1`, with `1` a left `F`-module through the counit.
pub fn closed_surface_reduction(
    p: &GluingPattern,
    data: &FusionData,
    f: &AlgebraObject,
    counit: &[C64],
    boundary: &ModuleObject,
) -> Result<Reduction> {
    let u = data.unit();
    if p.rank == 0 {
        let unit = Obj::simple(u);
        return Ok(Reduction {
            projection: Mor::identity(&unit),
            quotient: unit,
            dimension: 1,
            module_residual: 0.0,
        });
    }
    let res = module_residual(data, f, boundary)?;
    if !(res < 1e-6) {
        return Err(Error::InvalidModule(res));
    }
    let one = ModuleObject::character(data, f, counit);
    let (quotient, projection) = relative_tensor(data, boundary, f, &one)?;
    Ok(Reduction {
        dimension: quotient.mult(u),
        quotient,
        projection,
        module_residual: res,
    })
}
