#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::Rng;
use surfhom_core::linalg::{c, zeros, CMat, C64};
use surfhom_core::{Mor, Obj};

pub const FIXTURES: [&str; 6] = ["trivial", "fib", "ising", "pointed:2:0", "pointed:3:1/3", "pointed:4:1/4"];

pub fn random_c(rng: &mut StdRng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_mat(rng: &mut StdRng, rows: usize, cols: usize) -> CMat {
    let mut m = zeros(rows, cols);
    for x in m.iter_mut() {
        *x = random_c(rng);
    }
    m
}

pub fn random_vec(rng: &mut StdRng, n: usize) -> Vec<C64> {
    (0..n).map(|_| random_c(rng)).collect()
}

pub fn random_obj(rng: &mut StdRng, rank: usize, max: u32) -> Obj {
    Obj::from_pairs((0..rank).map(|i| (i, rng.gen_range(0..=max))))
}

pub fn random_mor(rng: &mut StdRng, source: &Obj, target: &Obj) -> Mor {
    let mut blocks = BTreeMap::new();
    for (i, m) in source.iter() {
        let n = target.mult(i);
        if n > 0 {
            blocks.insert(i, random_mat(rng, n, m));
        }
    }
    Mor::new(source.clone(), target.clone(), blocks).unwrap()
}

/// Naive triple loop.
pub fn naive_product(a: &CMat, b: &CMat) -> CMat {
    let mut out = zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..a.ncols() {
                s += a[(i, k)] * b[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn gauss_rank(m: &CMat, tol: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let (piv, best) = (r..rows).map(|i| (i, a[(i, col)].norm())).fold((r, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            continue;
        }
        a.swap_rows(r, piv);
        for i in 0..rows {
            if i != r {
                let f = a[(i, col)] / a[(r, col)];
                for j in 0..cols {
                    let v = a[(r, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        r += 1;
    }
    r
}
