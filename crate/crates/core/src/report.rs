// SPDX-License-Identifier: Apache-2.0

//! Machine-readable analysis reports. Every number is an exact rational
//! encoded as `"num/den"`; −∞ is `"-inf"`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{PsadfGraph, QuasiStaticSchedule};
use crate::maxplus::{MaxPlusMatrix, MaxPlusValue, Mpag};
use crate::model::{self, Model};
use crate::paramopt::{RegionResult, WorstCase};
use crate::poly::{Point, Polynomial};
use crate::rational::{self, Rational};
use crate::symbolic::SymbolicMatrix;

pub const SCHEMA_ID: &str = "psadf-report/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub kind: String,
    pub name: String,
    /// Canonical text of the analysed model.
    pub model: String,
    pub labels: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub repetition_vector: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schedule: Option<String>,
    #[serde(default)]
    pub scenarios: Vec<ScenarioReport>,
    #[serde(default)]
    pub regions: Vec<RegionReport>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analysis: Option<AnalysisReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionReport {
    pub region: String,
    pub conflicts: Vec<String>,
    pub symbolic: Vec<Vec<String>>,
    #[serde(default)]
    pub maxima: Vec<EntryReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub row: usize,
    pub col: usize,
    pub polynomial: String,
    pub value: String,
    pub argmax: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub from: String,
    pub to: String,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub matrix: Vec<Vec<String>>,
    pub mpag: Vec<EdgeReport>,
    pub lambda: String,
    pub critical_cycle: Vec<String>,
    pub throughput: String,
    pub throughput_decimal: String,
}

pub fn matrix_to_json(m: &MaxPlusMatrix) -> Vec<Vec<String>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(MaxPlusValue::to_fraction_string).collect())
        .collect()
}

pub fn matrix_from_json(labels: &[String], rows: &[Vec<String>]) -> Result<MaxPlusMatrix> {
    let entries = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| MaxPlusValue::parse(s).ok_or_else(|| Error::InvalidGraph(format!("bad matrix entry '{s}'"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    MaxPlusMatrix::new(labels.to_vec(), entries)
}

/// Parses symbolic entries back; `durations` names the duration
/// parameters.
pub fn symbolic_from_json(rows: &[Vec<String>], durations: &BTreeSet<String>) -> Result<Vec<Vec<Option<Polynomial>>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|s| {
                    if s == "-inf" {
                        Ok(None)
                    } else {
                        Polynomial::parse(s, durations).map(Some)
                    }
                })
                .collect()
        })
        .collect()
}

fn point_json(p: &Point) -> BTreeMap<String, String> {
    p.iter()
        .map(|(k, v)| (k.clone(), rational::to_fraction_string(v)))
        .collect()
}

fn mpag_json(g: &Mpag, labels: &[String]) -> Vec<EdgeReport> {
    g.edges
        .iter()
        .map(|e| EdgeReport {
            from: labels[e.from].clone(),
            to: labels[e.to].clone(),
            weight: rational::to_fraction_string(&e.weight),
        })
        .collect()
}

/// Cycle-mean analysis of a concrete matrix.
pub fn analysis(matrix: &MaxPlusMatrix, mpag: &Mpag, lambda: &Rational, cycle: &[String]) -> AnalysisReport {
    let tp = Rational::from_integer(1.into()) / lambda;
    AnalysisReport {
        matrix: matrix_to_json(matrix),
        mpag: mpag_json(mpag, matrix.labels()),
        lambda: rational::to_fraction_string(lambda),
        critical_cycle: cycle.to_vec(),
        throughput: rational::to_fraction_string(&tp),
        throughput_decimal: rational::to_decimal(&tp),
    }
}

fn region_json(m: &SymbolicMatrix, r: Option<&RegionResult>) -> RegionReport {
    RegionReport {
        region: m.region.to_string(),
        conflicts: m.region.conflict_lines(),
        symbolic: m.entry_strings(),
        maxima: r
            .map(|r| {
                r.maxima
                    .entries
                    .iter()
                    .map(|e| EntryReport {
                        row: e.row,
                        col: e.col,
                        polynomial: e.polynomial.to_string(),
                        value: rational::to_fraction_string(&e.max.value),
                        argmax: point_json(&e.max.argmax),
                    })
                    .collect()
            })
            .unwrap_or_default(),
        matrix: r.map(|r| matrix_to_json(&r.maxima.matrix)),
    }
}

fn base(m: &Model, labels: Vec<String>) -> Report {
    Report {
        schema: SCHEMA_ID.into(),
        kind: m.kind().into(),
        name: m.name().into(),
        model: model::print(m),
        labels,
        repetition_vector: None,
        schedule: None,
        scenarios: Vec::new(),
        regions: Vec::new(),
        diagnostics: Vec::new(),
        analysis: None,
    }
}

fn schedule_fields(r: &mut Report, rv: &crate::graph::RepetitionVector, s: &QuasiStaticSchedule) {
    r.repetition_vector = Some(rv.entries.iter().map(|(a, e)| (a.clone(), e.to_string())).collect());
    r.schedule = Some(s.to_string());
}

/// Report of a parametric worst-case analysis.
pub fn worstcase_report(g: &PsadfGraph, w: &WorstCase) -> Report {
    let m = Model::Psadf(g.clone());
    let mut r = base(&m, g.token_labels());
    schedule_fields(&mut r, &w.repetition, &w.schedule);
    r.regions = w.regions.iter().map(|x| region_json(&x.symbolic, Some(x))).collect();
    r.analysis = Some(analysis(&w.combined, &w.mpag, &w.lambda, &w.critical_cycle));
    r
}

/// Report of a symbolic extraction without optimisation.
pub fn extract_report(
    g: &PsadfGraph,
    rv: &crate::graph::RepetitionVector,
    s: &QuasiStaticSchedule,
    ms: &[SymbolicMatrix],
) -> Report {
    let m = Model::Psadf(g.clone());
    let mut r = base(&m, g.token_labels());
    schedule_fields(&mut r, rv, s);
    r.regions = ms.iter().map(|x| region_json(x, None)).collect();
    r
}

/// Report of a concrete (SDF or SADF) analysis.
pub fn concrete_report(
    m: &Model,
    scenarios: &[(String, MaxPlusMatrix)],
    diagnostics: &[String],
    a: AnalysisReport,
    labels: Vec<String>,
) -> Report {
    let mut r = base(m, labels);
    r.scenarios = scenarios
        .iter()
        .map(|(n, x)| ScenarioReport {
            name: n.clone(),
            matrix: matrix_to_json(x),
        })
        .collect();
    r.diagnostics = diagnostics.to_vec();
    r.analysis = Some(a);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::extract_graph;

    #[test]
    fn matrices_round_trip_through_json() {
        let n = MaxPlusValue::NegInf;
        let v = |x: i64, d: i64| MaxPlusValue::Finite(rational::frac(x, d));
        let m = MaxPlusMatrix::from_rows(vec![vec![v(3, 2), n.clone()], vec![v(0, 1), v(-7, 3)]]).unwrap();
        let js = serde_json::to_string(&matrix_to_json(&m)).unwrap();
        assert_eq!(js, r#"[["3/2","-inf"],["0/1","-7/3"]]"#);
        let back: Vec<Vec<String>> = serde_json::from_str(&js).unwrap();
        assert_eq!(matrix_from_json(m.labels(), &back).unwrap(), m);
    }

    #[test]
    fn symbolic_matrices_round_trip_through_json() {
        let g = match model::parse(include_str!("../../../models/dvfs_pipeline.psadf")).unwrap() {
            Model::Psadf(g) => g,
            _ => unreachable!(),
        };
        let (s, ms) = extract_graph(&g).unwrap();
        let rv = crate::graph::repetition_vector(&g).unwrap();
        let rep = extract_report(&g, &rv, &s, &ms);
        let text = serde_json::to_string_pretty(&rep).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        for (rr, m) in back.regions.iter().zip(&ms) {
            assert_eq!(
                symbolic_from_json(&rr.symbolic, &g.duration_names()).unwrap(),
                m.entries
            );
        }
        assert_eq!(back.schedule.as_deref(), Some("A B^p C^{p*q} D^s E"));
    }
}
