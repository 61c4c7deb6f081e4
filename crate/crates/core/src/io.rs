//! CSV and JSON renderings of scans and boundary traces.
//!
//! CSV output carries no timestamps so it is byte-identical for identical
//! inputs; the JSON documents add a metadata block.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::quadrature::QuadConfig;
use crate::thermolimit::{BoundaryCurve, BoundaryOutcome, MagnetizationFormula, RegionGrid};

pub const REGION_CSV_HEADER: &str = "kT_over_J,B_over_J,W,entangled";
pub const BOUNDARY_CSV_HEADER: &str = "B_over_J,kTc_over_J";

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub quadrature: QuadConfig,
    pub bisection_tolerance: Option<f64>,
    pub magnetization_formula: MagnetizationFormula,
    pub timestamp: String,
}

impl Metadata {
    pub fn now(quadrature: QuadConfig, magnetization_formula: MagnetizationFormula) -> Metadata {
        Metadata {
            quadrature,
            bisection_tolerance: None,
            magnetization_formula,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// One row per cell, `B` outer and `kT` inner. Failed cells print `NaN`.
pub fn region_csv(grid: &RegionGrid) -> String {
    let mut out = String::with_capacity(32 * (grid.cells.len() + 1));
    out.push_str(REGION_CSV_HEADER);
    out.push('\n');
    for cell in &grid.cells {
        let w = cell.witness.unwrap_or(f64::NAN);
        writeln!(out, "{},{},{},{}", cell.kt_over_j, cell.b_over_j, w, cell.entangled).expect("write to String");
    }
    out
}

pub fn region_json(grid: &RegionGrid, meta: &Metadata) -> Value {
    json!({ "metadata": meta, "axes": grid.axes, "cells": grid.cells })
}

/// Analytic anchors written as comment lines ahead of the boundary table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryEndpoints {
    pub zero_field_kt: Option<f64>,
    pub zero_temperature_field: f64,
}

pub fn boundary_csv(curve: &BoundaryCurve, endpoints: &BoundaryEndpoints) -> String {
    let mut out = String::new();
    match endpoints.zero_field_kt {
        Some(t) => writeln!(out, "# B=0 critical kT/|J| (root of W=1) = {t}"),
        None => writeln!(out, "# B=0 critical kT/|J| not bracketed"),
    }
    .expect("write to String");
    writeln!(out, "# kT->0 critical B/|J| = 2*sqrt(1-pi^2/16) = {}", endpoints.zero_temperature_field)
        .expect("write to String");
    out.push_str(BOUNDARY_CSV_HEADER);
    out.push('\n');
    for p in &curve.points {
        match &p.outcome {
            BoundaryOutcome::Crossing { kt_over_j, .. } => writeln!(out, "{},{}", p.b_over_j, kt_over_j),
            BoundaryOutcome::NoCrossing { .. } => writeln!(out, "{},no crossing", p.b_over_j),
            BoundaryOutcome::Failed { .. } => writeln!(out, "{},failed", p.b_over_j),
        }
        .expect("write to String");
    }
    out
}

pub fn boundary_json(curve: &BoundaryCurve, endpoints: &BoundaryEndpoints, meta: &Metadata) -> Value {
    json!({ "metadata": meta, "endpoints": endpoints, "config": curve.config, "points": curve.points })
}
