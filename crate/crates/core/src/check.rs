// SPDX-License-Identifier: Apache-2.0

//! Cross-validation of symbolic matrices against one-iteration numeric
//! simulation at sampled parameter points.

use crate::error::Result;
use crate::graph::{bind, PsadfGraph};
use crate::maxplus::MaxPlusValue;
use crate::paramopt::{sample_points, Region};
use crate::poly::Point;
use crate::sdf::extract_numeric_matrix;
use crate::symbolic::{evaluate_symbolic, regions_containing, SymbolicMatrix};

/// One differing entry: row, column, symbolic value, simulated value.
pub type EntryDiff = (usize, usize, MaxPlusValue, MaxPlusValue);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub point: Point,
    /// Region whose matrix disagrees, `None` if no region holds the point.
    pub region: Option<usize>,
    pub entries: Vec<EntryDiff>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub samples: usize,
    pub passed: usize,
    pub first_failure: Option<Mismatch>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.samples
    }
}

/// Compares every region containing each sampled point of the declared
/// parameter space with the simulated matrix of the bound graph.
pub fn check_equivalence(
    g: &PsadfGraph,
    matrices: &[SymbolicMatrix],
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let omega = Region::from_graph(g)?;
    let points = sample_points(&omega, samples, seed)?;
    let mut report = CheckReport {
        samples,
        passed: 0,
        first_failure: None,
    };
    for point in points {
        let failure = check_point(g, matrices, &point)?;
        match failure {
            None => report.passed += 1,
            Some(m) => {
                if report.first_failure.is_none() {
                    report.first_failure = Some(m);
                }
            }
        }
    }
    Ok(report)
}

/// `None` when every region containing `point` agrees with simulation.
pub fn check_point(g: &PsadfGraph, matrices: &[SymbolicMatrix], point: &Point) -> Result<Option<Mismatch>> {
    let numeric = extract_numeric_matrix(&bind(g, point)?.graph)?;
    let inside = regions_containing(matrices, point)?;
    if inside.is_empty() {
        return Ok(Some(Mismatch {
            point: point.clone(),
            region: None,
            entries: Vec::new(),
        }));
    }
    for i in inside {
        let sym = evaluate_symbolic(&matrices[i], point)?;
        let mut entries = Vec::new();
        for r in 0..sym.n() {
            for c in 0..sym.n() {
                if sym.get(r, c) != numeric.get(r, c) {
                    entries.push((r, c, sym.get(r, c).clone(), numeric.get(r, c).clone()));
                }
            }
        }
        if !entries.is_empty() {
            return Ok(Some(Mismatch {
                point: point.clone(),
                region: Some(i),
                entries,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{self, Model};
    use crate::poly::Polynomial;
    use crate::symbolic::extract_graph;

    fn pipeline() -> PsadfGraph {
        match model::parse(include_str!("../../../models/dvfs_pipeline.psadf")).unwrap() {
            Model::Psadf(g) => g,
            _ => unreachable!(),
        }
    }

    #[test]
    fn pipeline_passes_a_small_sample() {
        let g = pipeline();
        let (_, ms) = extract_graph(&g).unwrap();
        let r = check_equivalence(&g, &ms, 5, 1).unwrap();
        assert_eq!(r.passed, 5, "{:?}", r.first_failure);
        assert!(r.all_passed());
    }

    #[test]
    fn zero_samples_pass_trivially() {
        let g = pipeline();
        let (_, ms) = extract_graph(&g).unwrap();
        let r = check_equivalence(&g, &ms, 0, 1).unwrap();
        assert_eq!((r.samples, r.passed), (0, 0));
        assert!(r.all_passed());
    }

    #[test]
    fn corrupted_matrix_is_caught() {
        let g = pipeline();
        let (_, mut ms) = extract_graph(&g).unwrap();
        for m in ms.iter_mut() {
            m.entries[2][2] = Some(Polynomial::constant(crate::rational::int(1)));
        }
        let r = check_equivalence(&g, &ms, 3, 9).unwrap();
        assert_eq!(r.passed, 0);
        let f = r.first_failure.unwrap();
        assert_eq!(f.entries[0].0, 2);
        assert_eq!(f.entries[0].1, 2);
    }

    #[test]
    fn uncovered_point_is_a_failure() {
        let g = pipeline();
        let (_, mut ms) = extract_graph(&g).unwrap();
        ms.truncate(1);
        let mut p = model::parse_point("p=10,q=10,s=1000,ci=1").unwrap();
        model::complete_point(&g, &mut p);
        let m = check_point(&g, &ms, &p).unwrap().unwrap();
        assert_eq!(m.region, None);
    }
}
