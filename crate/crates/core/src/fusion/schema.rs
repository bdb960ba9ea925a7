//! JSON category-description documents.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::pointed::{pointed, PointedParams};
use super::FusionData;
use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// Explicit presentation of a multiplicity-free braided fusion category.
///
/// F-symbols are entered in the gauge where every F-matrix with a unit
/// among its three upper labels is the identity; those entries, unit
/// R-symbols and omitted 1×1 F-matrices (taken to be 1) may be left out.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDocument {
    #[serde(default)]
    pub name: Option<String>,
    pub simples: Vec<String>,
    pub unit: String,
    pub dual: BTreeMap<String, String>,
    #[serde(default)]
    pub fusion: Vec<(String, String, String, u32)>,
    #[serde(default, rename = "F")]
    pub f: Vec<(String, String, String, String, String, String, f64, f64)>,
    #[serde(default, rename = "R")]
    pub r: Vec<(String, String, String, f64, f64)>,
    #[serde(default)]
    pub qdim: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub twist: Option<BTreeMap<String, (f64, f64)>>,
}

impl CategoryDocument {
    pub fn into_fusion_data(self) -> Result<FusionData> {
        let labels = self.simples.clone();
        let n = labels.len();
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Schema(format!("duplicate simple `{l}`")));
            }
        }
        let idx = |l: &str| -> Result<usize> {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))
        };
        let unit = idx(&self.unit)?;
        let mut dual = vec![usize::MAX; n];
        for (a, b) in &self.dual {
            let ia = idx(a)?;
            let ib = labels
                .iter()
                .position(|x| x == b)
                .ok_or_else(|| Error::Dual(a.clone()))?;
            dual[ia] = ib;
        }
        if let Some(a) = (0..n).find(|&a| dual[a] == usize::MAX) {
            return Err(Error::Dual(labels[a].clone()));
        }
        let mut fusion = vec![0u32; n * n * n];
        for (a, b, cc, m) in &self.fusion {
            let (a, b, cc) = (idx(a)?, idx(b)?, idx(cc)?);
            fusion[(a * n + b) * n + cc] = *m;
        }
        let mut f_symbols = HashMap::new();
        for (a, b, cc, d, e, f, x, y) in &self.f {
            let key = [idx(a)?, idx(b)?, idx(cc)?, idx(d)?, idx(e)?, idx(f)?];
            f_symbols.insert(key, c(*x, *y));
        }
        let mut r_symbols = HashMap::new();
        for (a, b, cc, x, y) in &self.r {
            r_symbols.insert([idx(a)?, idx(b)?, idx(cc)?], c(*x, *y));
        }
        let qdim = match &self.qdim {
            Some(m) => Some(dense(&labels, m, "qdim", |v| *v)?),
            None => None,
        };
        let twist = match &self.twist {
            Some(m) => Some(dense(&labels, m, "twist", |(x, y)| C64::new(*x, *y))?),
            None => None,
        };
        FusionData::new(
            self.name.unwrap_or_else(|| "custom".into()),
            labels,
            unit,
            dual,
            fusion,
            f_symbols,
            r_symbols,
            qdim,
            twist,
        )
    }
}

fn dense<V, T>(labels: &[String], m: &BTreeMap<String, V>, field: &str, f: impl Fn(&V) -> T) -> Result<Vec<T>> {
    for k in m.keys() {
        if !labels.contains(k) {
            return Err(Error::UnknownLabel(k.clone()));
        }
    }
    labels
        .iter()
        .map(|l| {
            m.get(l)
                .map(&f)
                .ok_or_else(|| Error::Schema(format!("`{field}` is missing label `{l}`")))
        })
        .collect()
}

/// Parses a category document: either an explicit presentation or a
/// pointed-category generator input (`group` + `bichar`).
pub fn load(text: &str) -> Result<FusionData> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if value.get("group").is_some() {
        let params: PointedParams =
            serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        return pointed(&params);
    }
    let doc: CategoryDocument =
        serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
    doc.into_fusion_data()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_document_loads() {
        let t = load(r#"{"simples":["1"],"unit":"1","dual":{"1":"1"},"fusion":[["1","1","1",1]]}"#)
            .unwrap();
        assert_eq!(t.rank(), 1);
        assert_eq!(t.qdim(0), 1.0);
    }

    #[test]
    fn bad_dual_names_label() {
        let err = load(
            r#"{"simples":["1","x"],"unit":"1","dual":{"1":"1","x":"y"},
                "fusion":[["1","1","1",1],["1","x","x",1],["x","1","x",1],["x","x","1",1]]}"#,
        )
        .unwrap_err();
        assert_eq!(err, Error::Dual("x".into()));
    }

    #[test]
    fn non_involutive_dual_is_rejected() {
        let err = load(
            r#"{"simples":["1","a","b"],"unit":"1","dual":{"1":"1","a":"b","b":"b"},"fusion":[]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Dual(_)));
    }

    #[test]
    fn missing_unit_row_is_reported() {
        let err = load(r#"{"simples":["1","x"],"unit":"1","dual":{"1":"1","x":"x"},"fusion":[["1","1","1",1],["x","x","1",1]]}"#)
            .unwrap_err();
        assert_eq!(err, Error::UnitCompatibility("x".into()));
    }

    #[test]
    fn inconsistent_qdim_is_an_error() {
        let err = load(
            r#"{"simples":["1","x"],"unit":"1","dual":{"1":"1","x":"x"},
                "fusion":[["1","1","1",1],["1","x","x",1],["x","1","x",1],["x","x","1",1]],
                "R":[["x","x","1",1.0,0.0]],
                "qdim":{"1":1.0,"x":2.0}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DerivedMismatch { field: "qdim", .. }));
    }

    #[test]
    fn pointed_generator_document() {
        let d = load(r#"{"group":[2],"bichar":[["1/2"]]}"#).unwrap();
        assert_eq!(d.rank(), 2);
        assert!((d.twist(1) + C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
