//! JSON formats.
//!
//! Scalars are written as numbers by the `f64` backend and as `"p/q"` strings
//! by the rational backend; both backends read either form.
//!
//! | Object | Shape |
//! |---|---|
//! | problem | `{"num_qubits": N, "h": [..], "couplers": [[i, j, J], ..]}` |
//! | hardware | `{"num_nodes": M, "edges": [[p, q], ..]}` |
//! | embedding | `{"chains": [[p, ..], ..], "edge_map": [[i, j, tau_ij, tau_ji], ..]}` |
//! | field split | `{"h_dist": [[h_i(k), ..], ..]}` |
//! | job shop | `{"machines": [[..]], "durations": [[..]], "timespan": T, "energy_scale": E}` |
//! | schedule | `{"starts": [[t, ..], ..], "makespan": m}` |

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::bounds::{AdmissibilityReport, AdmissibilityViolation, BoundsReport, Certification, OptimizedChain, SubsetWitness};
use crate::embedding::{EdgeMapping, HardwareGraph, MinorEmbedding};
use crate::error::{Error, Result};
use crate::ising::{GroundStateSet, IsingProblem, SpinConfig};
use crate::jsp::{Decoded, GapReport, JspEncoding, JspInstance, Schedule};
use crate::oracle::{DomainWallReport, ProbeOutcome, VerifyOutcome};
use crate::scalar::{Rational, Scalar};
use crate::solver::SaOutcome;

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values always serialize");
    s.push('\n');
    s
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn index(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("{what} must be a nonnegative integer, got {v}")))
}

fn index_list(v: &Value, what: &str) -> Result<Vec<usize>> {
    array(v, what)?.iter().map(|x| index(x, what)).collect()
}

fn scalars<S: Scalar>(v: &Value, what: &str) -> Result<Vec<S>> {
    array(v, what)?.iter().map(S::from_json).collect()
}

fn scalar_list<S: Scalar>(values: &[S]) -> Value {
    Value::Array(values.iter().map(|v| v.to_json()).collect())
}

pub fn problem_from_json<S: Scalar>(v: &Value) -> Result<IsingProblem<S>> {
    let fields: Vec<S> = scalars(field(v, "h")?, "h")?;
    if let Some(n) = v.get("num_qubits") {
        let n = index(n, "num_qubits")?;
        if n != fields.len() {
            return Err(Error::Dimension {
                expected: n,
                got: fields.len(),
            });
        }
    }
    let couplers = match v.get("couplers") {
        None => Vec::new(),
        Some(c) => array(c, "couplers")?
            .iter()
            .map(|entry| {
                let e = array(entry, "coupler")?;
                if e.len() != 3 {
                    return Err(Error::Parse(format!("coupler must be [i, j, J], got {entry}")));
                }
                Ok((index(&e[0], "coupler index")?, index(&e[1], "coupler index")?, S::from_json(&e[2])?))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    IsingProblem::new(fields, couplers)
}

pub fn problem_to_json<S: Scalar>(p: &IsingProblem<S>) -> Value {
    json!({
        "num_qubits": p.num_qubits(),
        "h": scalar_list(p.fields()),
        "couplers": p.couplers().iter().map(|c| json!([c.i, c.j, c.value.to_json()])).collect::<Vec<_>>(),
    })
}

pub fn hardware_from_json(v: &Value) -> Result<HardwareGraph> {
    let n = index(field(v, "num_nodes")?, "num_nodes")?;
    let edges = array(field(v, "edges")?, "edges")?
        .iter()
        .map(|e| {
            let pair = index_list(e, "edge")?;
            match pair.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(Error::Parse(format!("edge must be [p, q], got {e}"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    HardwareGraph::new(n, edges)
}

pub fn hardware_to_json(hw: &HardwareGraph) -> Value {
    json!({
        "num_nodes": hw.num_nodes(),
        "edges": hw.edges().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

pub fn embedding_from_json(v: &Value) -> Result<MinorEmbedding> {
    let chains = array(field(v, "chains")?, "chains")?
        .iter()
        .map(|c| index_list(c, "chain"))
        .collect::<Result<Vec<_>>>()?;
    let edge_map = match v.get("edge_map") {
        None => Vec::new(),
        Some(m) => array(m, "edge_map")?
            .iter()
            .map(|e| {
                let entry = index_list(e, "edge_map entry")?;
                match entry.as_slice() {
                    [i, j, tau_ij, tau_ji] => Ok(EdgeMapping {
                        i: *i,
                        j: *j,
                        tau_ij: *tau_ij,
                        tau_ji: *tau_ji,
                    }),
                    _ => Err(Error::Parse(format!("edge_map entry must be [i, j, tau_ij, tau_ji], got {e}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(MinorEmbedding { chains, edge_map })
}

pub fn embedding_to_json(emb: &MinorEmbedding) -> Value {
    json!({
        "chains": emb.chains,
        "edge_map": emb.edge_map.iter().map(|m| json!([m.i, m.j, m.tau_ij, m.tau_ji])).collect::<Vec<_>>(),
    })
}

/// Reads `{"h_dist": [[..], ..]}` or a bare nested array.
pub fn distribution_from_json<S: Scalar>(v: &Value) -> Result<Vec<Vec<S>>> {
    let rows = v.get("h_dist").unwrap_or(v);
    array(rows, "h_dist")?.iter().map(|row| scalars(row, "h_dist row")).collect()
}

pub fn distribution_to_json<S: Scalar>(fields: &[Vec<S>]) -> Value {
    json!({ "h_dist": fields.iter().map(|row| scalar_list(row)).collect::<Vec<_>>() })
}

pub fn jsp_from_json(v: &Value) -> Result<JspInstance> {
    let machines = array(field(v, "machines")?, "machines")?
        .iter()
        .map(|row| index_list(row, "machine row"))
        .collect::<Result<Vec<_>>>()?;
    let durations = array(field(v, "durations")?, "durations")?
        .iter()
        .map(|row| {
            array(row, "duration row")?
                .iter()
                .map(|d| {
                    d.as_u64()
                        .and_then(|x| u32::try_from(x).ok())
                        .ok_or_else(|| Error::Parse(format!("duration must be a nonnegative integer, got {d}")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let timespan = field(v, "timespan")?
        .as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| Error::Parse("timespan must be a nonnegative integer".into()))?;
    let energy_scale = match v.get("energy_scale") {
        None => Rational::from_int(1),
        Some(e) => Rational::from_json(e)?,
    };
    JspInstance::new(machines, durations, timespan, energy_scale)
}

pub fn jsp_to_json(inst: &JspInstance) -> Value {
    json!({
        "machines": inst.machines,
        "durations": inst.durations,
        "timespan": inst.timespan,
        "energy_scale": inst.energy_scale.to_json(),
    })
}

pub fn schedule_to_json(s: &Schedule) -> Value {
    json!({ "starts": s.starts, "makespan": s.makespan })
}

pub fn decoded_to_json(d: &Decoded) -> Value {
    let mut out = Map::new();
    out.insert("feasible".into(), json!(d.is_feasible()));
    if let Some(s) = &d.schedule {
        out.insert("starts".into(), json!(s.starts));
        out.insert("makespan".into(), json!(s.makespan));
    }
    out.insert(
        "violations".into(),
        Value::Array(d.violations.iter().map(|v| json!(v.to_string())).collect()),
    );
    Value::Object(out)
}

pub fn encoding_to_json<S: Scalar>(enc: &JspEncoding<S>) -> Value {
    let mut problem = problem_to_json(&enc.problem);
    let obj = problem.as_object_mut().expect("problem is an object");
    obj.insert("offset".into(), enc.offset.to_json());
    obj.insert(
        "variables".into(),
        Value::Array(enc.variable_map().iter().map(|&(n, k, t)| json!([n, k, t])).collect()),
    );
    problem
}

pub fn gap_report_to_json<S: Scalar>(g: &GapReport<S>) -> Value {
    json!({
        "energy_scale": g.energy_scale.to_json(),
        "c_min": g.c_min.to_json(),
        "c_max": g.c_max.to_json(),
        "variables_matching_half_scale": g.matching_half_scale,
        "variables": g.variables.len(),
        "stated_rule": g.stated_rule.to_json(),
        "measured_rule": g.measured_rule.to_json(),
        "per_variable": g.variables.iter().map(|v| json!({
            "var": [v.job, v.op, v.t],
            "C": v.c_value.to_json(),
            "equals_half_scale": v.equals_half_scale,
        })).collect::<Vec<_>>(),
    })
}

fn witness_to_json<S: Scalar>(w: &SubsetWitness<S>) -> Value {
    json!({
        "subset": w.subset,
        "boundary": w.boundary_size,
        "hW": w.h_w.to_json(),
        "jW": w.j_w.to_json(),
        "value": w.value.to_json(),
    })
}

fn certification_name(c: Certification) -> &'static str {
    match c {
        Certification::Direct => "direct",
        Certification::Complement => "complement",
        Certification::Vacuous => "vacuous",
        Certification::NotCertified => "not_certified",
    }
}

fn violation_to_json<S: Scalar>(v: &AdmissibilityViolation<S>) -> Value {
    json!({
        "qubit": v.qubit,
        "subset": v.subset,
        "boundary": v.boundary_size,
        "slack": v.slack.to_json(),
    })
}

pub fn optimized_to_json<S: Scalar>(o: &OptimizedChain<S>) -> Value {
    json!({
        "qubit": o.qubit,
        "bound": o.bound.to_json(),
        "h_dist": scalar_list(&o.fields),
        "sign_coherent": o.sign_coherent,
        "witness": o.witness.as_ref().map(witness_to_json),
    })
}

pub fn bounds_report_to_json<S: Scalar>(r: &BoundsReport<S>) -> Value {
    let qubits: Vec<Value> = r
        .qubits
        .iter()
        .map(|q| {
            let mut obj = Map::new();
            obj.insert("qubit".into(), json!(q.qubit));
            obj.insert("C".into(), q.c_value.to_json());
            obj.insert("locally_determinable".into(), json!(q.locally_determinable));
            obj.insert("leaves".into(), json!(q.leaves));
            obj.insert("choi1".into(), q.choi1.to_json());
            obj.insert("choi2".into(), q.choi2.map_or(Value::Null, |v| v.to_json()));
            obj.insert("tight".into(), q.tight.to_json());
            obj.insert("witness".into(), q.witness.as_ref().map_or(Value::Null, witness_to_json));
            obj.insert("certified".into(), json!(q.certification.is_certified()));
            obj.insert("certification".into(), json!(certification_name(q.certification)));
            obj.insert("h_dist".into(), scalar_list(&q.fields));
            obj.insert("fell_back_to_uniform".into(), json!(q.fell_back_to_uniform));
            obj.insert("admissible_from".into(), q.admissible_from.to_json());
            if !q.admissible_at.is_empty() {
                obj.insert(
                    "admissible_at".into(),
                    Value::Array(
                        q.admissible_at
                            .iter()
                            .map(|(f, worst)| {
                                json!({
                                    "F": f.to_json(),
                                    "admissible": worst.is_none(),
                                    "worst": worst.as_ref().map(violation_to_json),
                                })
                            })
                            .collect(),
                    ),
                );
            }
            if let Some(o) = &q.optimized {
                obj.insert("optimized".into(), json!({"bound": o.bound.to_json(), "h_dist": scalar_list(&o.fields)}));
            }
            Value::Object(obj)
        })
        .collect();
    json!({ "qubits": qubits })
}

pub fn admissibility_to_json<S: Scalar>(r: &AdmissibilityReport<S>) -> Value {
    json!({
        "admissible": r.is_admissible(),
        "thresholds": scalar_list(&r.thresholds),
        "violations": r.violations.iter().map(violation_to_json).collect::<Vec<_>>(),
    })
}

fn spins_json(c: &SpinConfig) -> Value {
    json!(c.spins())
}

fn domain_wall_to_json(d: &DomainWallReport) -> Value {
    json!({
        "qubit": d.qubit,
        "subset": d.subset,
        "positive": d.positive,
        "found_in_ground_state": d.found_in_ground_state,
        "witness_config": spins_json(&d.witness_config),
    })
}

pub fn verify_to_json<S: Scalar>(v: &VerifyOutcome<S>) -> Value {
    json!({
        "passed": v.passed,
        "ground_states": v.ground_states,
        "all_chains_aligned": v.all_chains_aligned,
        "energy_matches": v.energy_matches,
        "physical_minimum": v.physical_minimum.to_json(),
        "offset": v.offset.to_json(),
        "logical_minimum": v.logical_minimum.to_json(),
        "domain_wall": v.domain_wall.as_ref().map(domain_wall_to_json),
    })
}

pub fn probe_to_json<S: Scalar>(p: &ProbeOutcome<S>) -> Value {
    json!({
        "qubit": p.qubit,
        "found": p.found,
        "magnitude": p.magnitude.to_json(),
        "neighbor_spins": p.neighbor_spins.iter().map(|&(j, s)| json!([j, s])).collect::<Vec<_>>(),
        "broken_config": p.broken_config,
        "broken_energy": p.broken_energy.to_json(),
        "aligned_up_energy": p.aligned_up_energy.to_json(),
        "aligned_down_energy": p.aligned_down_energy.to_json(),
    })
}

pub fn ground_states_to_json<S: Scalar>(g: &GroundStateSet<S>) -> Value {
    json!({
        "energy": g.energy.to_json(),
        "count": g.len(),
        "configs": g.configs().map(|c| spins_json(&c)).collect::<Vec<_>>(),
    })
}

pub fn sa_outcome_to_json<S: Scalar>(o: &SaOutcome<S>) -> Value {
    json!({
        "energy": o.energy.to_json(),
        "best": spins_json(&o.best),
        "trace": o.trace.iter().map(|r| json!({"restart": r.restart, "energy": r.energy.to_json()})).collect::<Vec<_>>(),
    })
}
