//! JSON loaders and CSV writers. Graphs, operators, metric graphs, and
//! length decompositions travel as JSON; all tabular results leave as CSV
//! with headers. No binary formats.

use crate::discrete::{
    DiscreteError, DiscreteOperator, NodalReport, OperatorKind,
};
use crate::graph::{CombinatorialGraph, GraphError};
use crate::magnetic::SurplusMorseTable;
use crate::metric::{MetricError, MetricGraph, MetricNodalReport, VertexCondition};
use crate::torus::{DependencySpec, LengthDecomposition, SurplusHistogram};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Discrete(#[from] DiscreteError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("operator kind \"generalized\" requires both \"diagonal\" and \"edge_weights\"")]
    MissingOperatorData,
    #[error("coefficient denominator must be nonzero")]
    ZeroDenominator,
}

/// `{"vertices": n, "edges": [[u,v],...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<CombinatorialGraph, GraphError> {
        CombinatorialGraph::new(self.vertices, &self.edges)
    }

    pub fn from_graph(graph: &CombinatorialGraph) -> Self {
        Self { vertices: graph.vertex_count(), edges: graph.edges().to_vec() }
    }
}

/// `{"graph": {...}, "kind": "normalized"|"generalized",
///   "diagonal": [...], "edge_weights": [...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub graph: GraphJson,
    pub kind: OperatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_weights: Option<Vec<f64>>,
}

impl OperatorJson {
    pub fn to_operator(&self) -> Result<DiscreteOperator, IoError> {
        let graph = self.graph.to_graph()?;
        match self.kind {
            OperatorKind::Normalized => Ok(DiscreteOperator::normalized(graph)),
            OperatorKind::Generalized => {
                let (Some(diagonal), Some(weights)) = (&self.diagonal, &self.edge_weights)
                else {
                    return Err(IoError::MissingOperatorData);
                };
                Ok(DiscreteOperator::generalized(graph, weights, diagonal)?)
            }
        }
    }
}

/// Graph schema plus `"lengths"` and optional `"conditions"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricGraphJson {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub lengths: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Vec<VertexCondition>>,
}

impl MetricGraphJson {
    pub fn to_metric_graph(&self) -> Result<MetricGraph, IoError> {
        let graph = CombinatorialGraph::new(self.vertices, &self.edges)?;
        match &self.conditions {
            None => Ok(MetricGraph::new(graph, &self.lengths)?),
            Some(c) => Ok(MetricGraph::with_conditions(graph, &self.lengths, c)?),
        }
    }
}

/// `{"generators": [...], "coefficients": [[[num,den],...],...]}`; generators
/// are output-only and ignored on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<f64>>,
    pub coefficients: Vec<Vec<[i64; 2]>>,
}

impl DecompositionJson {
    pub fn to_spec(&self) -> Result<DependencySpec, IoError> {
        let mut coefficients = Vec::with_capacity(self.coefficients.len());
        for row in &self.coefficients {
            let mut out = Vec::with_capacity(row.len());
            for &[num, den] in row {
                if den == 0 {
                    return Err(IoError::ZeroDenominator);
                }
                out.push(Rational64::new(num, den));
            }
            coefficients.push(out);
        }
        Ok(DependencySpec { coefficients })
    }

    pub fn from_decomposition(decomp: &LengthDecomposition) -> Self {
        Self {
            generators: Some(decomp.generators().to_vec()),
            coefficients: decomp
                .coefficients()
                .iter()
                .map(|row| row.iter().map(|q| [*q.numer(), *q.denom()]).collect())
                .collect(),
        }
    }
}

pub fn load_graph(path: &Path) -> Result<CombinatorialGraph, IoError> {
    let json: GraphJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    Ok(json.to_graph()?)
}

pub fn load_operator(path: &Path) -> Result<DiscreteOperator, IoError> {
    let json: OperatorJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    json.to_operator()
}

pub fn load_metric_graph(path: &Path) -> Result<MetricGraph, IoError> {
    let json: MetricGraphJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    json.to_metric_graph()
}

pub fn load_dependency_spec(path: &Path) -> Result<DependencySpec, IoError> {
    let json: DecompositionJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    json.to_spec()
}

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Columns: n, lambda, generic, phi, nu, sigma. Non-generic rows keep their
/// index and eigenvalue with empty nodal cells.
pub fn nodal_csv(eigenvalues: &[f64], report: &NodalReport) -> String {
    let mut out = String::from("n,lambda,generic,phi,nu,sigma\n");
    for (i, entry) in report.entries.iter().enumerate() {
        out.push_str(&format!(
            "{},{:.12e},{},{},{},{}\n",
            i + 1,
            eigenvalues[i],
            entry.is_some(),
            fmt_opt(entry.as_ref().map(|e| e.phi)),
            fmt_opt(entry.as_ref().map(|e| e.nu)),
            fmt_opt(entry.as_ref().map(|e| e.sigma)),
        ));
    }
    out
}

/// Columns: n, k, lambda, generic, phi, nu, sigma, morse.
pub fn metric_spectrum_csv(
    report: &MetricNodalReport,
    morse: &[Option<usize>],
) -> String {
    let mut out = String::from("n,k,lambda,generic,phi,nu,sigma,morse\n");
    for (i, entry) in report.entries.iter().enumerate() {
        let k = entry.as_ref().map(|e| e.k);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            i + 1,
            fmt_opt(k.map(|k| format!("{k:.12e}"))),
            fmt_opt(k.map(|k| format!("{:.12e}", k * k))),
            entry.is_some(),
            fmt_opt(entry.as_ref().map(|e| e.phi)),
            fmt_opt(entry.as_ref().map(|e| e.nu)),
            fmt_opt(entry.as_ref().map(|e| e.sigma)),
            fmt_opt(morse.get(i).copied().flatten()),
        ));
    }
    out
}

/// Columns: n, lambda, sigma, morse, pass.
pub fn surplus_morse_csv(table: &SurplusMorseTable) -> String {
    let mut out = String::from("n,lambda,sigma,morse,pass\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{:.12e},{},{},{}\n",
            row.n, row.eigenvalue, row.sigma, row.morse, row.pass
        ));
    }
    out
}

/// Columns: sigma, count, frequency.
pub fn surplus_stats_csv(histogram: &SurplusHistogram) -> String {
    let total: usize = histogram.counts.iter().sum();
    let mut out = String::from("sigma,count,frequency\n");
    for (sigma, &count) in histogram.counts.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{:.6}\n",
            sigma,
            count,
            count as f64 / total.max(1) as f64
        ));
    }
    out
}

/// Flux sweep of all eigenvalues: columns alpha, lambda_1, ..., lambda_n.
pub fn flux_sweep_csv(op: &DiscreteOperator, points: usize) -> Result<String, DiscreteError> {
    let dim = op.graph().vertex_count();
    let beta = op.flux_count();
    let mut out = String::from("alpha");
    for n in 1..=dim {
        out.push_str(&format!(",lambda_{n}"));
    }
    out.push('\n');
    for i in 0..points {
        let alpha = 2.0 * std::f64::consts::PI * i as f64 / (points - 1).max(1) as f64;
        let spectrum = op.spectrum_at(&vec![alpha; beta])?;
        out.push_str(&format!("{alpha:.12e}"));
        for lambda in &spectrum.eigenvalues {
            out.push_str(&format!(",{lambda:.12e}"));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete;

    #[test]
    fn graph_json_round_trip() {
        let text = r#"{"vertices": 4, "edges": [[1,2],[1,4],[2,3],[2,4],[3,4]]}"#;
        let parsed: GraphJson = serde_json::from_str(text).unwrap();
        let g = parsed.to_graph().unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.betti_number(), 2);
        let back = GraphJson::from_graph(&g);
        let reparsed: GraphJson =
            serde_json::from_str(&serde_json::to_string(&back).unwrap()).unwrap();
        assert_eq!(reparsed.edges, back.edges);
    }

    #[test]
    fn operator_json_kinds() {
        let text = r#"{
            "graph": {"vertices": 3, "edges": [[1,2],[1,3],[2,3]]},
            "kind": "normalized"
        }"#;
        let op: OperatorJson = serde_json::from_str(text).unwrap();
        let op = op.to_operator().unwrap();
        assert!((op.base()[(0, 0)] - 1.0).abs() < 1e-15);

        let text = r#"{
            "graph": {"vertices": 2, "edges": [[1,2]]},
            "kind": "generalized",
            "diagonal": [1.0, 2.0],
            "edge_weights": [-1.5]
        }"#;
        let op: OperatorJson = serde_json::from_str(text).unwrap();
        let op = op.to_operator().unwrap();
        assert!((op.base()[(0, 1)] + 1.5).abs() < 1e-15);

        let text = r#"{
            "graph": {"vertices": 2, "edges": [[1,2]]},
            "kind": "generalized"
        }"#;
        let op: OperatorJson = serde_json::from_str(text).unwrap();
        assert!(matches!(op.to_operator(), Err(IoError::MissingOperatorData)));
    }

    #[test]
    fn metric_json_with_conditions() {
        let text = r#"{
            "vertices": 2, "edges": [[1,2]], "lengths": [3.141592653589793],
            "conditions": ["dirichlet", "dirichlet"]
        }"#;
        let parsed: MetricGraphJson = serde_json::from_str(text).unwrap();
        let mg = parsed.to_metric_graph().unwrap();
        assert!(!mg.is_neumann());
        assert_eq!(mg.conditions()[0], VertexCondition::Dirichlet);
    }

    #[test]
    fn decomposition_json_round_trip() {
        let text = r#"{"coefficients": [[[1,1],[0,1]], [[2,1],[0,1]], [[0,1],[1,1]]]}"#;
        let parsed: DecompositionJson = serde_json::from_str(text).unwrap();
        let spec = parsed.to_spec().unwrap();
        assert_eq!(spec.coefficients[1][0], Rational64::new(2, 1));
        let lengths = [2.0f64.sqrt(), 2.0 * 2.0f64.sqrt(), 3.0f64.sqrt()];
        let decomp = crate::torus::decompose_lengths(&lengths, &spec).unwrap();
        let json = DecompositionJson::from_decomposition(&decomp);
        assert_eq!(json.generators.as_ref().unwrap().len(), 2);
        assert_eq!(json.coefficients[1][0], [2, 1]);
    }

    #[test]
    fn nodal_csv_shape() {
        let g = CombinatorialGraph::new(3, &[(1, 2), (2, 3)]).unwrap();
        let op = DiscreteOperator::normalized(g);
        let spectrum = op.spectrum().unwrap();
        let report = discrete::nodal_report(&op, &spectrum);
        let csv = nodal_csv(&spectrum.eigenvalues, &report);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], "n,lambda,generic,phi,nu,sigma");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
    }

    #[test]
    fn flux_sweep_has_header_and_rows() {
        let g = CombinatorialGraph::new(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        let op = DiscreteOperator::normalized(g);
        let csv = flux_sweep_csv(&op, 101).unwrap();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], "alpha,lambda_1,lambda_2,lambda_3");
        assert_eq!(lines.len(), 102);
    }
}
