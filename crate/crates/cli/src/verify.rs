use pathmc_core::chain::grand_coupling_step;
use pathmc_core::oracle::{
    build_transition_matrix, curvature_scan, enumerate_family, geodesic_check, sandwich_closure_check,
};
use pathmc_core::path::WallRecord;
use pathmc_core::{
    partial_le, FamilyConstraint, FamilyKind, FamilySpec, FlipInstruction, PathError, Result, WeightMode, WeightTable,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Check;

/// At most this many witnesses are listed in a report.
const WITNESS_LIMIT: usize = 10;

#[derive(Serialize)]
pub struct Instance {
    pub family: FamilyKind,
    pub n: usize,
    pub a: i64,
    pub b: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall: Option<WallRecord>,
    pub weights: WeightMode,
}

impl Instance {
    pub fn new(spec: &FamilySpec, weights: WeightMode) -> Self {
        let p = spec.params();
        let wall = match *spec.constraint() {
            FamilyConstraint::Wall { h, r, s } => Some(WallRecord { h, r, s }),
            _ => None,
        };
        Self {
            family: spec.constraint().kind(),
            n: p.n(),
            a: p.a(),
            b: p.b(),
            wall,
            weights,
        }
    }
}

#[derive(Serialize)]
pub struct Report {
    pub check: &'static str,
    pub instance: Instance,
    pub pass: bool,
    pub witnesses: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_contraction: Option<f64>,
    /// The contraction the scan is compared against, when one is certified.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmix: Option<u64>,
}

fn tuple_json(f: &FlipInstruction) -> Value {
    json!({
        "i": f.index(),
        "direction": format!("{:?}", f.direction()).to_lowercase(),
        "tail": format!("{:?}", f.tail()).to_lowercase(),
    })
}

pub fn run(check: Check, spec: &FamilySpec, weights: WeightMode, tmix_cap: u64) -> Result<Report> {
    let table = WeightTable::new(spec.n(), weights);
    let enumeration = enumerate_family(spec)?;
    let members = enumeration.members();
    let mut report = Report {
        check: check.name(),
        instance: Instance::new(spec, weights),
        pass: true,
        witnesses: Vec::new(),
        min_contraction: None,
        bound: None,
        tmix: None,
    };
    match check {
        Check::Matrix => {
            let p = build_transition_matrix(spec, &table, &enumeration)?;
            let asymmetry = p.max_asymmetry();
            let rows = p.max_row_sum_error();
            let stationarity = p.stationarity_error();
            report.pass = asymmetry == 0.0 && rows <= 1e-12 && stationarity <= 1e-12 && p.min_entry() >= 0.0;
            if !report.pass {
                report.witnesses.push(json!({
                    "max_asymmetry": asymmetry,
                    "max_row_sum_error": rows,
                    "stationarity_error": stationarity,
                }));
            }
            report.tmix = Some(p.exact_tmix(tmix_cap)?);
        }
        Check::Geodesic => {
            let g = geodesic_check(spec, &enumeration);
            report.pass = g.pass;
            if let Some((i, j, graph, metric)) = g.counterexample {
                report.witnesses.push(json!({
                    "from": members[i].word_string(),
                    "to": members[j].word_string(),
                    "graph_distance": graph,
                    "d1": metric,
                    "connected": g.connected,
                }));
            }
        }
        Check::Curvature => {
            let scan = curvature_scan(spec, &table, &enumeration);
            let min = if scan.pairs.is_empty() { 1.0 } else { scan.min_contraction };
            report.min_contraction = Some(min);
            // A certified bound exists only for the lower-bound families with
            // quadratic weights; elsewhere the check asks for positivity.
            let bound = match table.effective_kappa() {
                Ok(k) if !spec.is_culminating() => Some(k),
                Ok(_) | Err(PathError::UniformWeights) => None,
                Err(e) => return Err(e),
            };
            report.bound = bound;
            report.pass = match bound {
                Some(k) => min >= k - 1e-12,
                None => min > 1e-12,
            };
            report.witnesses = scan
                .witnesses
                .iter()
                .take(WITNESS_LIMIT)
                .map(|w| {
                    json!({
                        "lower": members[w.lower].word_string(),
                        "upper": members[w.upper].word_string(),
                        "position": w.position,
                        "contraction": w.contraction,
                    })
                })
                .collect();
        }
        Check::Monotone => {
            for s in members {
                for t in members.iter().filter(|t| partial_le(s, t)) {
                    for f in FlipInstruction::all(spec.n()) {
                        let next = grand_coupling_step(&[s.clone(), t.clone()], &f, spec);
                        if !partial_le(&next[0], &next[1]) {
                            report.pass = false;
                            if report.witnesses.len() < WITNESS_LIMIT {
                                report.witnesses.push(json!({
                                    "lower": s.word_string(),
                                    "upper": t.word_string(),
                                    "tuple": tuple_json(&f),
                                }));
                            }
                        }
                    }
                }
            }
        }
        Check::Sandwich => {
            let r = sandwich_closure_check(spec, &enumeration)?;
            report.pass = r.holds;
            if let Some((lower, middle, upper)) = r.witness {
                report.witnesses.push(json!({ "lower": lower, "middle": middle, "upper": upper }));
            }
        }
    }
    Ok(report)
}
