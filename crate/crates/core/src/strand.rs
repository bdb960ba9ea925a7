//! Algebras whose fibers are spanned by strand trees on rows
//! `X̄_1 X_1 … X̄_n X_n`, as for the reflection equation algebra and the
//! handle algebras `a_P`.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraObject, HalfBraiding};
use crate::category::SimpleIndex;
use crate::diagram::{half_twist, rotation, split_moves, tree_basis, Diagram, Move, State};
use crate::error::{Error, Result};
use crate::fusion::FusionData;
use crate::gluing::Crossing;
use crate::linalg::{re, zeros, CMat, C64};

/// One basis vector: handle labels `X_1 … X_n` and a tree path on the row.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StrandVector {
    pub labels: Vec<SimpleIndex>,
    pub path: Vec<SimpleIndex>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrandBasis {
    pub handles: usize,
    pub fibers: Vec<Vec<StrandVector>>,
}

pub fn row(data: &FusionData, labels: &[SimpleIndex]) -> Vec<SimpleIndex> {
    labels.iter().flat_map(|&x| [data.dual(x), x]).collect()
}

fn label_tuples(rank: usize, n: usize) -> Vec<Vec<SimpleIndex>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..rank).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Number of channel terms enumerated for `n` handles: `rank^(2n)`.
pub fn enumeration_size(rank: usize, n: usize) -> u64 {
    (rank as u64).saturating_pow(2 * n as u32)
}

impl StrandBasis {
    pub fn new(data: &FusionData, n: usize, cap: u64) -> Result<Self> {
        if let Some(err) = data.first_multiplicity() {
            return Err(err);
        }
        let needed = enumeration_size(data.rank(), n);
        if needed > cap {
            return Err(Error::Cap { needed, cap });
        }
        let mut fibers = vec![Vec::new(); data.rank()];
        for labels in label_tuples(data.rank(), n) {
            let r = row(data, &labels);
            for (root, fiber) in fibers.iter_mut().enumerate() {
                for path in tree_basis(data, &r, root).vectors {
                    fiber.push(StrandVector {
                        labels: labels.clone(),
                        path,
                    });
                }
            }
        }
        Ok(StrandBasis { handles: n, fibers })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.fibers.iter().map(|f| f.len()).collect()
    }

    pub fn position(&self, root: SimpleIndex, v: &StrandVector) -> Option<usize> {
        self.fibers[root].binary_search(v).ok()
    }

    pub fn labels(&self, data: &FusionData) -> Vec<Vec<String>> {
        self.fibers
            .iter()
            .map(|f| {
                f.iter()
                    .map(|v| {
                        let names: Vec<&str> = v.labels.iter().map(|&x| data.label(x)).collect();
                        if v.path.len() <= 3 {
                            format!("R[{}]", names.join(","))
                        } else {
                            let inner: Vec<&str> = v.path[2..v.path.len() - 1].iter().map(|&x| data.label(x)).collect();
                            format!("R[{}|{}]", names.join(","), inner.join(","))
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Crossing signs of an exchange on `(Ū, U, V̄, V)`: `true` where the
/// moving strand passes over, for the pairs `(V̄,U)`, `(V,U)`, `(V̄,Ū)` and
/// `(V,Ū)` in that order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exchange(pub [bool; 4]);

impl Exchange {
    /// The block `(V̄, V)` passes entirely over `(Ū, U)`.
    pub const OVER: Exchange = Exchange([true; 4]);

    /// The composites `L`, `N` and their inverses, and `U = σ`.
    pub fn literal(kind: Crossing) -> Exchange {
        match kind {
            Crossing::L => Exchange([true, true, true, false]),
            Crossing::LInv => Exchange([true, false, false, false]),
            Crossing::N => Exchange([true, true, false, false]),
            Crossing::NInv => Exchange([true, false, true, false]),
            Crossing::U => Exchange::OVER,
        }
    }

    /// Moves at `p`.
    pub fn moves(self, p: usize) -> Vec<Move> {
        let b = |pos: usize, over: bool| Move::Braid { pos, inverse: !over };
        let [a, bb, c, d] = self.0;
        vec![b(p + 1, a), b(p + 2, bb), b(p, c), b(p + 1, d)]
    }

    pub fn word(self) -> String {
        self.0.iter().map(|&s| if s { '+' } else { '-' }).collect()
    }
}

/// Exchange `C_{ij}` on `(Ū, U, V̄, V)` at `p`, bringing the block `(V̄, V)`
/// in front of `(Ū, U)`.
pub fn exchange_moves(kind: Crossing, p: usize) -> Vec<Move> {
    Exchange::literal(kind).moves(p)
}

/// Multiplication `(X̄ X)(Ȳ Y) → (Z̄ Z)` on four strands at `p`.
pub fn product_moves(data: &FusionData, x: SimpleIndex, y: SimpleIndex, z: SimpleIndex, p: usize) -> Vec<Move> {
    let s = data.qdim(z) / (data.qdim(x) * data.qdim(y));
    vec![
        Move::Braid { pos: p + 1, inverse: false },
        Move::Fuse { pos: p + 2, channel: z },
        Move::Cup { pos: p + 2, label: data.dual(z) },
        Move::Split { pos: p + 2, left: x, right: y },
        Move::Braid { pos: p + 1, inverse: true },
        Move::Cap { pos: p + 2 },
        Move::Cap { pos: p },
        Move::Scale(re(s)),
    ]
}

/// Embeds basis vectors `x ∈ fiber i` and `y ∈ fiber j` as a state on the
/// row `x-row ⊗ y-row` inside the channel `k ⊂ i ⊗ j`.
fn embed_pair(data: &FusionData, k: SimpleIndex, x: &StrandVector, i: SimpleIndex, y: &StrandVector, j: SimpleIndex) -> Result<State> {
    let u = data.unit();
    let rx = row(data, &x.labels);
    let ry = row(data, &y.labels);
    let d = Diagram::new(vec![i, j])
        .then_all(split_moves(1, &ry, &y.path))
        .then_all(split_moves(0, &rx, &x.path));
    d.apply(data, &State::basis_vector(&[i, j], &[u, i, k]))
}

/// Structure constants of the strand algebra with `n` handles and pair
/// exchanges `exchange(i, j)` for `i < j` (0-based).
pub fn strand_multiplication(
    data: &FusionData,
    basis: &StrandBasis,
    exchange: &dyn Fn(usize, usize) -> Exchange,
) -> Result<BTreeMap<(SimpleIndex, SimpleIndex, SimpleIndex), CMat>> {
    let n = basis.handles;
    let rank = data.rank();
    let dims = basis.dims();
    let mut moves = Vec::new();
    for hi in 0..n {
        for hj in (hi + 1..n).rev() {
            let p = 2 * (2 * hi + (hj - hi));
            moves.extend(exchange(hi, hj).moves(p));
        }
    }
    let mut tasks = Vec::new();
    for i in 0..rank {
        for j in 0..rank {
            for k in data.channels(i, j) {
                if dims[i] * dims[j] * dims[k] == 0 {
                    continue;
                }
                tasks.extend((0..dims[i]).map(|a| (i, j, k, a)));
            }
        }
    }
    // one column strip `x_a · (all y)` per task
    let strips = crate::parallel::map(&tasks, |&(i, j, k, a)| -> Result<Vec<(usize, usize, C64)>> {
        let x = &basis.fibers[i][a];
        let mut out = Vec::new();
        for (b, y) in basis.fibers[j].iter().enumerate() {
            let mut st = embed_pair(data, k, x, i, y, j)?;
            if !moves.is_empty() {
                st = Diagram::new(st.leaves.clone()).then_all(moves.clone()).apply(data, &st)?;
            }
            for zs in channel_tuples(data, &x.labels, &y.labels) {
                let mut d = Diagram::new(st.leaves.clone());
                for (h, &z) in zs.iter().enumerate() {
                    d = d.then_all(product_moves(data, x.labels[h], y.labels[h], z, 2 * h));
                }
                let res = d.apply(data, &st)?;
                for (path, amp) in res.amps {
                    let v = StrandVector { labels: zs.clone(), path };
                    let Some(c) = basis.position(k, &v) else {
                        return Err(Error::Internal(format!("product left the basis at {:?}", v)));
                    };
                    out.push((c, b, amp));
                }
            }
        }
        Ok(out)
    });
    let mut mult = BTreeMap::new();
    for (&(i, j, k, a), strip) in tasks.iter().zip(strips) {
        let blk = mult.entry((i, j, k)).or_insert_with(|| zeros(dims[k], dims[i] * dims[j]));
        for (c, b, amp) in strip? {
            blk[(c, a * dims[j] + b)] += amp;
        }
    }
    Ok(mult)
}

fn channel_tuples(data: &FusionData, xs: &[SimpleIndex], ys: &[SimpleIndex]) -> Vec<Vec<SimpleIndex>> {
    let mut out = vec![Vec::new()];
    for (&x, &y) in xs.iter().zip(ys) {
        out = out
            .into_iter()
            .flat_map(|t| {
                data.channels(x, y)
                    .map(|z| {
                        let mut t = t.clone();
                        t.push(z);
                        t
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Conjugation: rotate the row, conjugate each handle block with a half
/// twist and a twist, then restore the handle order with the exchange maps.
/// `(X̄_1 X_1 …)` over `U` goes to `(X_1 X̄_1 …)` over `Ū`.
pub fn strand_star(data: &FusionData, basis: &StrandBasis, exchange: &dyn Fn(usize, usize) -> Exchange) -> Result<Vec<CMat>> {
    let u = data.unit();
    let rank = data.rank();
    let n = basis.handles;
    let dims = basis.dims();
    let mut blocks = Vec::new();
    for h in 0..n {
        blocks.extend(half_twist(2 * h, 2, false));
        blocks.push(Move::Twist { pos: 2 * h, inverse: false });
    }
    let mut sorts = Vec::new();
    let mut order: Vec<usize> = (0..n).rev().collect();
    for i in 0..n {
        let mut q = order.iter().position(|&h| h == i).unwrap();
        while q > i {
            let hj = order[q - 1];
            sorts.extend(exchange(i, hj).moves(2 * (q - 1)));
            order.swap(q - 1, q);
            q -= 1;
        }
    }
    let mut out = Vec::with_capacity(rank);
    for root in 0..rank {
        let broot = data.dual(root);
        let mut s = zeros(dims[broot], dims[root]);
        for (a, v) in basis.fibers[root].iter().enumerate() {
            let r = row(data, &v.labels);
            let d = rotation(data, &r, &v.path).then_all(blocks.clone()).then_all(sorts.clone());
            let st = d.apply(data, &State::basis_vector(&[broot], &[u, broot]))?;
            let duals: Vec<SimpleIndex> = v.labels.iter().map(|&x| data.dual(x)).collect();
            for (path, amp) in st.amps {
                let w = StrandVector { labels: duals.clone(), path };
                let Some(b) = basis.position(broot, &w) else {
                    return Err(Error::Internal(format!("star left the basis at {:?}", w)));
                };
                s[(b, a)] += amp;
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Half-braiding moving `U` leftwards through each handle. `over[h]` gives
/// whether `U` passes over `X_h` and over `X̄_h`; the reflection equation
/// algebra uses `[true, false]`.
pub fn strand_half_braiding(data: &FusionData, basis: &StrandBasis, over: &[[bool; 2]]) -> Result<HalfBraiding> {
    let u0 = data.unit();
    let rank = data.rank();
    let n = basis.handles;
    if over.len() != n {
        return Err(Error::Internal(format!("{} half-braiding signs for {n} handles", over.len())));
    }
    let mut components = BTreeMap::new();
    for uu in 0..rank {
        let mut comp: BTreeMap<(usize, usize, usize), CMat> = BTreeMap::new();
        for i in 0..rank {
            for k in data.channels(i, uu).collect::<Vec<_>>() {
                for (a, x) in basis.fibers[i].iter().enumerate() {
                    let r = row(data, &x.labels);
                    let mut d = Diagram::new(vec![i, uu]).then_all(split_moves(0, &r, &x.path));
                    for b in (0..n).rev() {
                        let p = 2 * b;
                        let [ox, oxb] = over[b];
                        d = d.then(Move::Braid { pos: p + 1, inverse: !ox }).then(Move::Braid { pos: p, inverse: !oxb });
                    }
                    let st = d.apply(data, &State::basis_vector(&[i, uu], &[u0, i, k]))?;
                    for i2 in data.channels(data.dual(uu), k).collect::<Vec<_>>() {
                        if data.n(uu, i2, k) == 0 {
                            continue;
                        }
                        let dim2 = basis.fibers[i2].len();
                        let mut target = zeros(dim2, basis.fibers[i].len());
                        let mut any = false;
                        for (b, y) in basis.fibers[i2].iter().enumerate() {
                            if y.labels != x.labels {
                                continue;
                            }
                            let refd = Diagram::new(vec![uu, i2]).then_all(split_moves(1, &r, &y.path));
                            let rs = refd.apply(data, &State::basis_vector(&[uu, i2], &[u0, uu, k]))?;
                            let mut ip = re(0.0);
                            for (p, amp) in &rs.amps {
                                if let Some(v) = st.amps.get(p) {
                                    ip += amp.conj() * v;
                                }
                            }
                            target[(b, a)] = ip;
                            any = true;
                        }
                        if any || dim2 > 0 {
                            let e = comp.entry((k, i, i2)).or_insert_with(|| zeros(dim2, basis.fibers[i].len()));
                            *e += target;
                        }
                    }
                }
            }
        }
        components.insert(uu, comp);
    }
    Ok(HalfBraiding { components })
}

/// Assembles the strand algebra with `n` handles.
pub fn strand_algebra(
    data: &FusionData,
    basis: &StrandBasis,
    exchange: &dyn Fn(usize, usize) -> Exchange,
) -> Result<AlgebraObject> {
    let u = data.unit();
    let mult = strand_multiplication(data, basis, exchange)?;
    let star = strand_star(data, basis, exchange)?;
    let unit_vec = StrandVector {
        labels: vec![u; basis.handles],
        path: vec![u; 2 * basis.handles + 1],
    };
    let mut unit = vec![re(0.0); basis.fibers[u].len()];
    let pos = basis
        .position(u, &unit_vec)
        .ok_or_else(|| Error::Internal("unit vector missing from the basis".into()))?;
    unit[pos] = re(1.0);
    Ok(AlgebraObject {
        fibers: basis.dims(),
        mult,
        unit,
        star,
        labels: basis.labels(data),
    })
}
