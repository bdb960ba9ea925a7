//! The reflection equation algebra `F = ⊕_X X̄ ⊠ X`, its counit, norms and
//! the Dehn-twist candidates on the annulus.
//!
//! The fiber `F(U)` has the orthonormal basis `e_X = |X̄ X; U⟩` over all `X`
//! with `U ⊂ X̄ ⊗ X`. On the unit fiber `R_X = √d_X e_X` is the coevaluation.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{check_cstar_algebra, verify_yd, AlgebraObject, HalfBraiding};
use crate::category::SimpleIndex;
use crate::diagram::{Diagram, Move, State};
use crate::error::{Error, Result};
use crate::fusion::verify::COHERENCE_TOL;
use crate::fusion::FusionData;
use crate::linalg::{self, re, zeros, CMat, C64};
use crate::report::ValidationReport;
use crate::strand::{product_moves, strand_half_braiding, strand_star, Exchange, StrandBasis};

#[derive(Clone, Debug)]
pub struct ReflectionAlgebra {
    pub algebra: AlgebraObject,
    pub half_braiding: HalfBraiding,
    /// Simples `X` labelling `R_X`, in the order of the unit fiber.
    pub ground_basis: Vec<SimpleIndex>,
    /// `ε(e_X)` on the unit fiber basis.
    pub counit: Vec<C64>,
    /// `fiber_basis[U]` lists the `X` with `U ⊂ X̄ ⊗ X`.
    pub fiber_basis: Vec<Vec<SimpleIndex>>,
}

fn fiber_basis(data: &FusionData) -> Vec<Vec<SimpleIndex>> {
    (0..data.rank())
        .map(|u| (0..data.rank()).filter(|&x| data.n(data.dual(x), x, u) > 0).collect())
        .collect()
}

/// `μ^Z` on `|((X̄X)_U (ȲY)_V)_W⟩`. The input is expanded onto left-associated
/// trees with `F^{UȲY}_W`; `alternative` caps the outer pair first.
pub fn product_coefficient(
    data: &FusionData,
    (x, u): (SimpleIndex, SimpleIndex),
    (y, v): (SimpleIndex, SimpleIndex),
    z: SimpleIndex,
    w: SimpleIndex,
    alternative: bool,
) -> Result<C64> {
    let one = data.unit();
    let (bx, by, bz) = (data.dual(x), data.dual(y), data.dual(z));
    let leaves = vec![bx, x, by, y];
    let mut st = State {
        leaves: leaves.clone(),
        amps: BTreeMap::new(),
    };
    for m in data.channels(u, by).filter(|&m| data.n(m, y, w) > 0).collect::<Vec<_>>() {
        let c = data.f(u, by, y, w, m, v)?.conj();
        st.amps.insert(vec![one, bx, u, m, w], c);
    }
    let moves = if alternative {
        vec![
            Move::Scale(re(data.qdim(z) / (data.qdim(x) * data.qdim(y)))),
            Move::Braid { pos: 1, inverse: false },
            Move::Fuse { pos: 2, channel: z },
            Move::Cup { pos: 2, label: bz },
            Move::Split { pos: 2, left: x, right: y },
            Move::Braid { pos: 1, inverse: true },
            Move::Cap { pos: 0 },
            Move::Cap { pos: 0 },
        ]
    } else {
        product_moves(data, x, y, z, 0)
    };
    let out = Diagram::new(leaves).then_all(moves).apply(data, &st)?;
    Ok(out.amps.get(&vec![one, bz, w]).cloned().unwrap_or(re(0.0)))
}

pub fn build_reflection_algebra(data: &FusionData) -> Result<ReflectionAlgebra> {
    if let Some(err) = data.first_multiplicity() {
        return Err(err);
    }
    let n = data.rank();
    let one = data.unit();
    let fb = fiber_basis(data);
    let fibers: Vec<usize> = fb.iter().map(|v| v.len()).collect();
    let mut mult = BTreeMap::new();
    for u in 0..n {
        for v in 0..n {
            for w in data.channels(u, v).collect::<Vec<_>>() {
                if fibers[u] * fibers[v] * fibers[w] == 0 {
                    continue;
                }
                let mut blk = zeros(fibers[w], fibers[u] * fibers[v]);
                for (a, &x) in fb[u].iter().enumerate() {
                    for (b, &y) in fb[v].iter().enumerate() {
                        for z in data.channels(x, y).collect::<Vec<_>>() {
                            let Some(r) = fb[w].iter().position(|&t| t == z) else { continue };
                            blk[(r, a * fibers[v] + b)] += product_coefficient(data, (x, u), (y, v), z, w, false)?;
                        }
                    }
                }
                mult.insert((u, v, w), blk);
            }
        }
    }
    let basis = StrandBasis::new(data, 1, u64::MAX)?;
    let star = strand_star(data, &basis, &|_, _| Exchange::OVER)?;
    let half_braiding = strand_half_braiding(data, &basis, &[[true, false]])?;
    let mut unit = vec![re(0.0); fibers[one]];
    unit[fb[one].iter().position(|&x| x == one).expect("unit in the ground basis")] = re(1.0);
    let labels = fb
        .iter()
        .map(|v| v.iter().map(|&x| format!("R[{}]", data.label(x))).collect())
        .collect();
    let ground_basis = fb[one].clone();
    let counit = ground_basis.iter().map(|&x| re(1.0 / data.qdim(x).sqrt())).collect();
    Ok(ReflectionAlgebra {
        algebra: AlgebraObject {
            fibers,
            mult,
            unit,
            star,
            labels,
        },
        half_braiding,
        ground_basis,
        counit,
        fiber_basis: fb,
    })
}

impl ReflectionAlgebra {
    /// Change of basis `e_X → R_X` factor on the unit fiber.
    fn scale(&self, data: &FusionData, p: usize) -> f64 {
        data.qdim(self.ground_basis[p]).sqrt()
    }

    /// `R_X`'s coordinates on the unit fiber.
    pub fn r_vector(&self, data: &FusionData, p: usize) -> Vec<C64> {
        let mut v = vec![re(0.0); self.ground_basis.len()];
        v[p] = re(self.scale(data, p));
        v
    }

    /// Value of a functional given on `{R_X}` at a vector in the `e_X` basis.
    pub fn in_r_basis(&self, data: &FusionData, v: &[C64]) -> Vec<C64> {
        v.iter().enumerate().map(|(p, c)| c / self.scale(data, p)).collect()
    }

    pub fn counit_value(&self, v: &[C64]) -> C64 {
        v.iter().zip(&self.counit).map(|(a, b)| a * b).sum()
    }
}

/// `c[X][Y][Z]` with `R_X R_Y = Σ_Z c^Z_{XY} R_Z`, indices over `ground_basis`.
pub fn ground_multiplication_table(data: &FusionData, f: &ReflectionAlgebra) -> Vec<Vec<Vec<C64>>> {
    let one = data.unit();
    let m = f.algebra.block(one, one, one);
    let g = f.ground_basis.len();
    let mut out = vec![vec![vec![re(0.0); g]; g]; g];
    for a in 0..g {
        for b in 0..g {
            for c in 0..g {
                out[a][b][c] = m[(c, a * g + b)] * f.scale(data, a) * f.scale(data, b) / f.scale(data, c);
            }
        }
    }
    out
}

/// The same table from the alternative cap schedule.
pub fn ground_multiplication_table_alternative(data: &FusionData, f: &ReflectionAlgebra) -> Result<Vec<Vec<Vec<C64>>>> {
    let one = data.unit();
    let g = f.ground_basis.len();
    let mut out = vec![vec![vec![re(0.0); g]; g]; g];
    for a in 0..g {
        for b in 0..g {
            for c in 0..g {
                let (x, y, z) = (f.ground_basis[a], f.ground_basis[b], f.ground_basis[c]);
                if data.n(x, y, z) == 0 {
                    continue;
                }
                let v = product_coefficient(data, (x, one), (y, one), z, one, true)?;
                out[a][b][c] = v * f.scale(data, a) * f.scale(data, b) / f.scale(data, c);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CounitReport {
    pub values: Vec<(String, f64, f64)>,
    pub report: ValidationReport,
}

/// Values `ε(R_X)`, unitality, multiplicativity, star compatibility and the
/// identity `ε(a†a) = |Σ λ_X|²` on `samples` random `a = Σ λ_X R_X`.
pub fn counit_battery<R: Rng>(data: &FusionData, f: &ReflectionAlgebra, samples: usize, rng: &mut R) -> CounitReport {
    let one = data.unit();
    let g = f.ground_basis.len();
    let a = &f.algebra;
    let mut values = Vec::new();
    let mut value_res: f64 = 0.0;
    for p in 0..g {
        let e = f.counit_value(&f.r_vector(data, p));
        values.push((data.label(f.ground_basis[p]).to_string(), e.re, e.im));
        value_res = value_res.max((e - re(1.0)).norm());
    }
    let mut report = ValidationReport::new();
    report.record("counit_values", value_res, COHERENCE_TOL);
    report.record("unital", (f.counit_value(&a.unit) - re(1.0)).norm(), COHERENCE_TOL);
    let mut mult_res: f64 = 0.0;
    let mut star_res: f64 = 0.0;
    for p in 0..g {
        let rp = f.r_vector(data, p);
        for q in 0..g {
            let rq = f.r_vector(data, q);
            let prod = a.multiply(one, one, one, &rp, &rq);
            let lhs = f.counit_value(&prod);
            let rhs = f.counit_value(&rp) * f.counit_value(&rq);
            mult_res = mult_res.max((lhs - rhs).norm());
        }
        let s = a.star_vec(one, &rp);
        star_res = star_res.max((f.counit_value(&s) - f.counit_value(&rp).conj()).norm());
    }
    report.record("multiplicative", mult_res, COHERENCE_TOL);
    report.record("star_compatible", star_res, COHERENCE_TOL);
    let mut pos_res: f64 = 0.0;
    for _ in 0..samples {
        let lambda: Vec<C64> = (0..g).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut v = vec![re(0.0); g];
        for p in 0..g {
            v[p] = lambda[p] * f.scale(data, p);
        }
        let av = a.multiply(one, one, one, &a.star_vec(one, &v), &v);
        let lhs = f.counit_value(&av);
        let s: C64 = lambda.iter().sum();
        pos_res = pos_res.max((lhs - re(s.norm_sqr())).norm());
    }
    report.record("positivity_identity", pos_res, COHERENCE_TOL);
    CounitReport { values, report }
}

/// `‖R_X‖`, the norm of the coevaluation `1 → X̄ ⊗ X` as a morphism.
pub fn r_norms(data: &FusionData, f: &ReflectionAlgebra) -> Result<Vec<f64>> {
    let one = data.unit();
    f.ground_basis
        .iter()
        .map(|&x| {
            let st = Diagram::new(vec![]).cup(0, x).apply(data, &State::basis_vector(&[], &[one]))?;
            Ok(st.amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt())
        })
        .collect()
}

/// Operator norm of left multiplication by `R_X` on the unit fiber.
pub fn ground_operator_norms(data: &FusionData, f: &ReflectionAlgebra) -> Vec<f64> {
    (0..f.ground_basis.len())
        .map(|p| linalg::spectral_norm(&f.algebra.ground_left(data, &f.r_vector(data, p))))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DehnCandidate {
    ComponentTwist,
    PairTwist,
    Monodromy,
}

impl DehnCandidate {
    pub const ALL: [DehnCandidate; 3] = [DehnCandidate::ComponentTwist, DehnCandidate::PairTwist, DehnCandidate::Monodromy];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "component-twist" => Ok(DehnCandidate::ComponentTwist),
            "pair-twist" => Ok(DehnCandidate::PairTwist),
            "monodromy" => Ok(DehnCandidate::Monodromy),
            other => Err(Error::UnknownCandidate(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DehnCandidate::ComponentTwist => "component-twist",
            DehnCandidate::PairTwist => "pair-twist",
            DehnCandidate::Monodromy => "monodromy",
        }
    }

    fn moves(&self) -> Vec<Move> {
        let braid = Move::Braid { pos: 0, inverse: false };
        let twist = |pos| Move::Twist { pos, inverse: false };
        match self {
            DehnCandidate::ComponentTwist => vec![braid, braid, twist(0), twist(1)],
            DehnCandidate::PairTwist => vec![twist(0), twist(1)],
            DehnCandidate::Monodromy => vec![braid, braid],
        }
    }
}

/// Fiberwise matrices of the candidate, in the `e_X` bases. The component
/// twist is the balancing `θ_U` on fiber `U`; `dehn_twist_moves` evaluates
/// the same candidate as a move word.
pub fn dehn_twist(data: &FusionData, f: &ReflectionAlgebra, cand: DehnCandidate) -> Result<Vec<CMat>> {
    if cand != DehnCandidate::ComponentTwist {
        return dehn_twist_moves(data, f, cand);
    }
    Ok(f.fiber_basis
        .iter()
        .enumerate()
        .map(|(u, xs)| linalg::identity(xs.len()) * data.twist(u))
        .collect())
}

/// Fiberwise matrices of the candidate's move word.
pub fn dehn_twist_moves(data: &FusionData, f: &ReflectionAlgebra, cand: DehnCandidate) -> Result<Vec<CMat>> {
    let one = data.unit();
    let mut out = Vec::new();
    for (u, xs) in f.fiber_basis.iter().enumerate() {
        let mut m = zeros(xs.len(), xs.len());
        for (a, &x) in xs.iter().enumerate() {
            let leaves = vec![data.dual(x), x];
            let st = Diagram::new(leaves.clone())
                .then_all(cand.moves())
                .apply(data, &State::basis_vector(&leaves, &[one, data.dual(x), u]))?;
            for (path, amp) in st.amps {
                if st.leaves != leaves {
                    return Err(Error::Internal("Dehn candidate permuted the strands".into()));
                }
                let b = xs
                    .iter()
                    .position(|&y| path == [one, data.dual(y), u])
                    .ok_or_else(|| Error::Internal(format!("candidate left the fiber at {path:?}")))?;
                m[(b, a)] += amp;
            }
        }
        out.push(m);
    }
    Ok(out)
}

/// Fixes every `R_X`; preserves `ε` on the ground fiber; is a `*`-algebra
/// automorphism of `F`.
pub fn verify_mcg(data: &FusionData, f: &ReflectionAlgebra, cand: DehnCandidate) -> Result<ValidationReport> {
    let one = data.unit();
    let delta = dehn_twist(data, f, cand)?;
    let g = f.ground_basis.len();
    let ground = &delta[one];
    let fix = linalg::max_abs_diff(ground, &linalg::identity(g));
    let mut eps: f64 = 0.0;
    for p in 0..g {
        let r = f.r_vector(data, p);
        let dr: Vec<C64> = (ground * crate::algebra::column(&r)).iter().cloned().collect();
        eps = eps.max((f.counit_value(&dr) - f.counit_value(&r)).norm());
    }
    let a = &f.algebra;
    let mut auto: f64 = 0.0;
    for (&(i, j, k), m) in &a.mult {
        let lhs = &delta[k] * m;
        let rhs = m * linalg::kron(&delta[i], &delta[j]);
        auto = auto.max(linalg::max_abs_diff(&lhs, &rhs));
    }
    for i in 0..data.rank() {
        let bi = data.dual(i);
        if a.fibers[i] == 0 {
            continue;
        }
        let lhs = &delta[bi] * &a.star[i];
        let rhs = &a.star[i] * delta[i].map(|x| x.conj());
        auto = auto.max(linalg::max_abs_diff(&lhs, &rhs));
    }
    let mut report = ValidationReport::new();
    report.record("fixes_ground", fix, COHERENCE_TOL);
    report.record("counit_invariant", eps, COHERENCE_TOL);
    report.record("automorphism", auto, COHERENCE_TOL);
    Ok(report)
}

/// `check_cstar_algebra` and `verify_yd` for `F`.
pub fn certify(data: &FusionData, f: &ReflectionAlgebra) -> Result<ValidationReport> {
    let mut report = check_cstar_algebra(data, &f.algebra);
    let yd = verify_yd(data, &f.algebra, &f.half_braiding)?;
    for c in yd.checks {
        report.pass &= c.pass;
        report.checks.push(c);
    }
    Ok(report)
}
