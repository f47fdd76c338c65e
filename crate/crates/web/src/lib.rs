//! Browser bindings for the angle-field demo. Every export takes plain
//! numbers or strings and returns JSON, so the same functions run natively
//! in tests.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use nts_core::ctl::{check, parse_ctl};
use nts_core::partition::{me_partition, MePartitionConfig, PartitionSet};
use nts_core::reach::HyperRectangle;
use nts_core::synthetic::{angle_attractor, angle_demonstrations, angle_field};
use nts_core::traces::TraceSet;
use nts_core::transition::{build_abstraction, AbstractionParams, Boundary, SelfLoopConfig, TransitionSystem};

const TRACES: usize = 20;
const HORIZON: usize = 200;

#[derive(Serialize)]
struct Cell {
    id: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize)]
struct Edge {
    from: usize,
    to: usize,
    guaranteed: bool,
}

#[derive(Serialize)]
struct Scene {
    zone: Cell,
    cells: Vec<Cell>,
    traces: Vec<Vec<[f64; 2]>>,
    goal: Option<usize>,
    edges: Vec<Edge>,
    /// Full transition system JSON, for `check_formula`.
    system: Option<String>,
}

fn data(seed: u32) -> Result<(TraceSet, HyperRectangle), String> {
    let traces = angle_demonstrations(TRACES, HORIZON, seed as u64).map_err(|e| e.to_string())?;
    let zone = traces.state_hull().ok_or("no samples")?;
    Ok((traces, zone))
}

fn cells(parts: &PartitionSet) -> Vec<Cell> {
    parts
        .partitions()
        .iter()
        .map(|p| Cell {
            id: p.id,
            lower: p.bounds.lower().to_vec(),
            upper: p.bounds.upper().to_vec(),
        })
        .collect()
}

fn scene(traces: &TraceSet, parts: &PartitionSet, ts: Option<&TransitionSystem>) -> Scene {
    let zone = parts.working_zone();
    let edges = ts
        .map(|ts| {
            ts.transitions()
                .entries()
                .map(|(i, j)| Edge {
                    from: ts.id_of(i),
                    to: ts.id_of(j),
                    guaranteed: ts.guaranteed().get(i, j),
                })
                .collect()
        })
        .unwrap_or_default();
    Scene {
        zone: Cell {
            id: 0,
            lower: zone.lower().to_vec(),
            upper: zone.upper().to_vec(),
        },
        cells: cells(parts),
        traces: traces
            .traces()
            .iter()
            .map(|t| t.states().map(|x| [x[0], x[1]]).collect())
            .collect(),
        goal: parts.locate(&angle_attractor()).map(|i| parts.partitions()[i].id),
        edges,
        system: ts.map(TransitionSystem::to_json),
    }
}

/// Partitions the demonstrations of the angle field.
#[wasm_bindgen]
pub fn partition_demo(entropy: f64, min_length: f64, seed: u32) -> Result<String, String> {
    let (traces, zone) = data(seed)?;
    let cfg = MePartitionConfig::new(entropy, min_length).map_err(|e| e.to_string())?;
    let parts = me_partition(&traces, &zone, &cfg).map_err(|e| e.to_string())?;
    serde_json::to_string(&scene(&traces, &parts, None)).map_err(|e| e.to_string())
}

/// Partitions, then builds the transition system of the exact field.
#[wasm_bindgen]
pub fn abstraction_demo(entropy: f64, min_length: f64, dwell: u32, epsilon: f64, seed: u32) -> Result<String, String> {
    let (traces, zone) = data(seed)?;
    let params = AbstractionParams {
        partitioning: MePartitionConfig::new(entropy, min_length).map_err(|e| e.to_string())?,
        self_loops: SelfLoopConfig::new(dwell as usize).map_err(|e| e.to_string())?,
        epsilon,
        boundary: Boundary::Closed,
        exit_sink: false,
    };
    let ts = build_abstraction(&angle_field(), &traces, &zone, &HyperRectangle::empty_input(), &params)
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&scene(&traces, ts.partition_set(), Some(&ts))).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Verdict {
    formula: String,
    holds: bool,
    witness: Vec<usize>,
    stutter_dependent: bool,
}

/// Checks one CTL formula on a transition system JSON document.
#[wasm_bindgen]
pub fn check_formula(system_json: &str, formula: &str, initial: u32) -> Result<String, String> {
    let ts = TransitionSystem::from_json(system_json).map_err(|e| e.to_string())?;
    let phi = parse_ctl(formula).map_err(|e| e.to_string())?;
    let o = check(&ts, &phi, initial as usize).map_err(|e| e.to_string())?;
    serde_json::to_string(&Verdict {
        formula: phi.to_string(),
        holds: o.holds,
        witness: o.witness,
        stutter_dependent: o.stutter_dependent,
    })
    .map_err(|e| e.to_string())
}
