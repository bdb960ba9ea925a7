//! Coherence battery: pentagon, both hexagons, unitarity and ribbon checks.

use super::FusionData;
use crate::error::Result;
use crate::linalg::{re, C64};
use crate::report::ValidationReport;

/// Residuals below this pass.
pub const COHERENCE_TOL: f64 = 1e-8;

pub fn verify(data: &FusionData) -> ValidationReport {
    let mut report = ValidationReport::new();
    report.record("fusion_associativity", fusion_associativity(data), 0.5);
    report.record("dimension_homomorphism", dimension_homomorphism(data), 1e-9);
    if let Some(err) = data.first_multiplicity() {
        report.fail("multiplicity_free", err.to_string());
        return report;
    }
    push(&mut report, "pentagon", pentagon(data));
    push(&mut report, "f_unitarity", f_unitarity(data));
    if data.has_braiding() {
        push(&mut report, "hexagon_left", hexagon_left(data));
        push(&mut report, "hexagon_right", hexagon_right(data));
        push(&mut report, "r_unitarity", r_unitarity(data));
        push(&mut report, "ribbon_dual", ribbon_dual(data));
    } else {
        report.fail("braiding", "no R-symbols present");
    }
    report
}

fn push(report: &mut ValidationReport, name: &str, r: Result<f64>) {
    match r {
        Ok(v) => {
            report.record(name, v, COHERENCE_TOL);
        }
        Err(e) => report.fail(name, e.to_string()),
    }
}

/// `max |Σ_e N_ab^e N_ec^d − Σ_f N_bc^f N_af^d|`.
pub fn fusion_associativity(data: &FusionData) -> f64 {
    let n = data.rank();
    let mut worst = 0i64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let l: i64 = (0..n).map(|e| (data.n(a, b, e) * data.n(e, c, d)) as i64).sum();
                    let r: i64 = (0..n).map(|f| (data.n(b, c, f) * data.n(a, f, d)) as i64).sum();
                    worst = worst.max((l - r).abs());
                }
            }
        }
    }
    worst as f64
}

/// `max |d_a d_b − Σ_c N_ab^c d_c|`.
pub fn dimension_homomorphism(data: &FusionData) -> f64 {
    let n = data.rank();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let s: f64 = (0..n).map(|c| data.n(a, b, c) as f64 * data.qdim(c)).sum();
            worst = worst.max((data.qdim(a) * data.qdim(b) - s).abs());
        }
    }
    worst
}

fn adm(data: &FusionData, a: usize, b: usize, c: usize) -> bool {
    data.n(a, b, c) > 0
}

/// `F^{fcd}_e[g,l] F^{abl}_e[f,k] = Σ_h F^{abc}_g[f,h] F^{ahd}_e[g,k] F^{bcd}_k[h,l]`.
pub fn pentagon(data: &FusionData) -> Result<f64> {
    let n = data.rank();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        for f in data.channels(a, b) {
                            for g in data.channels(f, c) {
                                if !adm(data, g, d, e) {
                                    continue;
                                }
                                for l in data.channels(c, d) {
                                    for k in data.channels(b, l) {
                                        if !adm(data, a, k, e) {
                                            continue;
                                        }
                                        let lhs = data.f(f, c, d, e, g, l)? * data.f(a, b, l, e, f, k)?;
                                        let mut rhs = re(0.0);
                                        for h in data.channels(b, c) {
                                            rhs += data.f(a, b, c, g, f, h)?
                                                * data.f(a, h, d, e, g, k)?
                                                * data.f(b, c, d, k, h, l)?;
                                        }
                                        worst = worst.max((lhs - rhs).norm());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Largest entry of `F F† − 1` over all F-matrices.
pub fn f_unitarity(data: &FusionData) -> Result<f64> {
    let n = data.rank();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let es: Vec<_> = (0..n).filter(|&e| adm(data, a, b, e) && adm(data, e, c, d)).collect();
                    let fs: Vec<_> = (0..n).filter(|&f| adm(data, b, c, f) && adm(data, a, f, d)).collect();
                    if es.len() != fs.len() {
                        return Ok(f64::INFINITY);
                    }
                    for &e1 in &es {
                        for &e2 in &es {
                            let mut s = re(0.0);
                            for &f in &fs {
                                s += data.f(a, b, c, d, e1, f)? * data.f(a, b, c, d, e2, f)?.conj();
                            }
                            let target = if e1 == e2 { 1.0 } else { 0.0 };
                            worst = worst.max((s - re(target)).norm());
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Braiding `c` leftwards past `a ⊗ b` one strand at a time agrees with
/// braiding past the fused channel:
/// `Σ_h R^{ac}_g F̄^{acb}_d[g,h] R^{bc}_h F^{abc}_d[f,h] = R^{fc}_d F̄^{cab}_d[g,f]`.
pub fn hexagon_left(data: &FusionData) -> Result<f64> {
    let n = data.rank();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for f in data.channels(a, b) {
                        if !adm(data, f, c, d) {
                            continue;
                        }
                        for g in data.channels(c, a) {
                            if !adm(data, g, b, d) {
                                continue;
                            }
                            let mut lhs = re(0.0);
                            for h in data.channels(b, c) {
                                lhs += data.r(a, c, g)?
                                    * data.f(a, c, b, d, g, h)?.conj()
                                    * data.r(b, c, h)?
                                    * data.f(a, b, c, d, f, h)?;
                            }
                            let rhs = data.r(f, c, d)? * data.f(c, a, b, d, g, f)?.conj();
                            worst = worst.max((lhs - rhs).norm());
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Braiding `c` rightwards past `a ⊗ b`:
/// `Σ_h R^{ca}_g F^{acb}_d[g,h] R^{cb}_h F̄^{abc}_d[f,h] = F^{cab}_d[g,f] R^{cf}_d`.
pub fn hexagon_right(data: &FusionData) -> Result<f64> {
    let n = data.rank();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for g in data.channels(c, a) {
                        if !adm(data, g, b, d) {
                            continue;
                        }
                        for f in data.channels(a, b) {
                            if !adm(data, c, f, d) {
                                continue;
                            }
                            let mut lhs = re(0.0);
                            for h in data.channels(c, b) {
                                lhs += data.r(c, a, g)?
                                    * data.f(a, c, b, d, g, h)?
                                    * data.r(c, b, h)?
                                    * data.f(a, b, c, d, f, h)?.conj();
                            }
                            let rhs = data.f(c, a, b, d, g, f)? * data.r(c, f, d)?;
                            worst = worst.max((lhs - rhs).norm());
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

pub fn r_unitarity(data: &FusionData) -> Result<f64> {
    let n = data.rank();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in data.channels(a, b) {
                worst = worst.max((data.r(a, b, c)?.norm() - 1.0).abs());
            }
        }
    }
    Ok(worst)
}

/// `max |θ_{ā} − θ_a|` together with `max ||θ_a| − 1|`.
pub fn ribbon_dual(data: &FusionData) -> Result<f64> {
    let n = data.rank();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        let t: C64 = data.twist(a);
        worst = worst.max((t - data.twist(data.dual(a))).norm());
        worst = worst.max((t.norm() - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::builtin;

    #[test]
    fn fixtures_pass() {
        for name in ["trivial", "fib", "ising", "pointed:2:0", "pointed:2:1/2", "pointed:4:1/4", "pointed:2x2:1/2,0;0,0"] {
            let d = builtin(name).unwrap();
            let r = verify(&d);
            assert!(r.pass, "{name}: {r:?}");
            assert!(r.max_residual() < 1e-10, "{name}: {r:?}");
        }
    }

    #[test]
    fn trivial_residuals_are_zero() {
        let r = verify(&builtin("trivial").unwrap());
        assert!(r.pass);
        assert_eq!(r.max_residual(), 0.0);
    }

    #[test]
    fn perturbed_ising_fails_pentagon() {
        let mut d = builtin("ising").unwrap();
        let s = d.index_of("sigma").unwrap();
        let u = d.unit();
        d.perturb_f([s, s, s, s, u, u], re(1e-3)).unwrap();
        let r = verify(&d);
        assert!(!r.pass);
        assert!(r.residual("pentagon") >= 1e-4, "{r:?}");
    }
}
