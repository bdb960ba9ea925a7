//! Pointed braided categories `Vec_G` with trivial associator and braiding
//! given by a bicharacter `β(g, h) = exp(2πi Σ_{jk} q_{jk} g_j h_k)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::FusionData;
use crate::error::{Error, Result};
use crate::linalg::{re, C64};

/// A rational phase `num/den`; deserialises from `"p/q"` strings or numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "serde_json::Value", into = "String")]
pub struct Phase {
    pub num: i64,
    pub den: i64,
}

impl Phase {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.trim().parse::<i64>(), q.trim().parse::<i64>()),
            None => (s.parse::<i64>(), Ok(1)),
        };
        match (num, den) {
            (Ok(num), Ok(den)) if den > 0 => Ok(Phase { num, den }),
            _ => Err(Error::Schema(format!("malformed rational phase `{s}`"))),
        }
    }

    /// Whether `k · num/den` is an integer.
    fn times_is_integer(&self, k: i64) -> bool {
        (k * self.num) % self.den == 0
    }
}

impl TryFrom<serde_json::Value> for Phase {
    type Error = Error;
    fn try_from(v: serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => Phase::parse(&s),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(|num| Phase { num, den: 1 })
                .ok_or_else(|| Error::Schema(format!("phase `{n}` must be an integer or a \"p/q\" string"))),
            other => Err(Error::Schema(format!("malformed phase {other}"))),
        }
    }
}

impl From<Phase> for String {
    fn from(p: Phase) -> String {
        format!("{}/{}", p.num, p.den)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointedParams {
    /// Orders of the cyclic factors.
    pub group: Vec<i64>,
    /// `q_{jk}`; the bicharacter is `exp(2πi Σ q_{jk} g_j h_k)`.
    pub bichar: Vec<Vec<Phase>>,
}

/// Parses the compact builtin form `<orders>:<bichar>`, e.g. `2:1/2`,
/// `4:1/4` or `2x2:1/2,0;0,0`.
pub fn parse_pointed(s: &str) -> Result<PointedParams> {
    let (g, q) = s
        .split_once(':')
        .ok_or_else(|| Error::Schema(format!("pointed category `{s}` needs <group>:<bichar>")))?;
    let group = g
        .split('x')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Schema(format!("bad group order `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    let bichar = q
        .split(';')
        .map(|row| row.split(',').map(Phase::parse).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(PointedParams { group, bichar })
}

/// Builds the pointed category; elements are labelled by their coordinates
/// joined with `.` (a single cyclic factor gives labels `0`, `1`, ...).
pub fn pointed(params: &PointedParams) -> Result<FusionData> {
    let orders = &params.group;
    let k = orders.len();
    if k == 0 || orders.iter().any(|&n| n < 1) {
        return Err(Error::Schema("group must be a nonempty list of positive orders".into()));
    }
    if params.bichar.len() != k || params.bichar.iter().any(|r| r.len() != k) {
        return Err(Error::Schema(format!("bichar must be a {k}x{k} matrix")));
    }
    for j in 0..k {
        for l in 0..k {
            let q = params.bichar[j][l];
            if !q.times_is_integer(orders[j]) || !q.times_is_integer(orders[l]) {
                return Err(Error::Schema(format!(
                    "bichar entry ({j},{l}) = {}/{} is not well defined on the group",
                    q.num, q.den
                )));
            }
        }
    }
    let size: i64 = orders.iter().product();
    let n = size as usize;
    let coords = |mut x: usize| -> Vec<i64> {
        let mut out = vec![0; k];
        for j in (0..k).rev() {
            out[j] = (x as i64) % orders[j];
            x /= orders[j] as usize;
        }
        out
    };
    let index = |v: &[i64]| -> usize {
        v.iter()
            .zip(orders)
            .fold(0usize, |acc, (&x, &o)| acc * o as usize + x.rem_euclid(o) as usize)
    };
    let labels: Vec<String> = (0..n)
        .map(|x| coords(x).iter().map(|c| c.to_string()).collect::<Vec<_>>().join("."))
        .collect();
    let add = |a: usize, b: usize| -> usize {
        let (x, y) = (coords(a), coords(b));
        index(&x.iter().zip(&y).map(|(p, q)| p + q).collect::<Vec<_>>())
    };
    let neg = |a: usize| index(&coords(a).iter().map(|p| -p).collect::<Vec<_>>());
    let beta = |a: usize, b: usize| -> C64 {
        let (x, y) = (coords(a), coords(b));
        let mut phase = 0.0;
        for j in 0..k {
            for l in 0..k {
                // reduce the integer product first so the float phase stays small
                let q = params.bichar[j][l];
                let num = (q.num * x[j] * y[l]).rem_euclid(q.den);
                phase += num as f64 / q.den as f64;
            }
        }
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
    };
    let mut fusion = vec![0u32; n * n * n];
    let mut f_symbols = HashMap::new();
    let mut r_symbols = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            let ab = add(a, b);
            fusion[(a * n + b) * n + ab] = 1;
            r_symbols.insert([a, b, ab], beta(a, b));
            for c in 0..n {
                let abc = add(ab, c);
                f_symbols.insert([a, b, c, abc, ab, add(b, c)], re(1.0));
            }
        }
    }
    let name = format!(
        "pointed:{}:{}",
        orders.iter().map(|o| o.to_string()).collect::<Vec<_>>().join("x"),
        params.bichar
            .iter()
            .map(|r| r.iter().map(|p| String::from(*p)).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    );
    let dual = (0..n).map(neg).collect();
    FusionData::new(name, labels, 0, dual, fusion, f_symbols, r_symbols, None, None)
}
