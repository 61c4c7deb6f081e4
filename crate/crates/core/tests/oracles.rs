use std::f64::consts::{LN_2, PI};

use thermowitness::freefermion::jw_observables;
use thermowitness::thermolimit::{
    boundary_trace, lowtemp_ferro_log_partition, lowtemp_ferro_observables, lowtemp_ferro_witness,
    region_scan, xx_internal_energy, xx_log_partition_density, xx_magnetization, xx_witness,
    zero_field_critical_temperature, Axis, BoundaryOutcome, GridAxes, LowTempExponent, TraceConfig, XxOptions,
};
use thermowitness::SignConvention;

fn opts() -> XxOptions {
    XxOptions::default()
}

#[test]
fn uncoupled_limit_reduces_to_free_spins() {
    for (kt, b) in [(0.5, 0.3), (1.0, -1.2), (2.0, 2.5)] {
        let c: f64 = b / kt;
        let u = xx_internal_energy(kt, b, 0.0, &opts().quad).unwrap();
        let m = xx_magnetization(kt, b, 0.0, &opts()).unwrap();
        assert!((u + b * c.tanh()).abs() < 1e-12, "U = {u}");
        assert!((m - c.tanh()).abs() < 1e-12, "M = {m}");
        let ln_z = xx_log_partition_density(0.0, c, &opts().quad).unwrap();
        assert!((ln_z - (2.0 * c.cosh()).ln()).abs() < 1e-12);
    }
    assert!((xx_log_partition_density(0.0, 0.0, &opts().quad).unwrap() - LN_2).abs() < 1e-14);
}

#[test]
fn zero_temperature_limits() {
    let u = xx_internal_energy(1e-3, 0.0, 1.0, &opts().quad).unwrap();
    assert!((u + 4.0 / PI).abs() < 1e-6, "U = {u}");
    let w = xx_witness(1e-3, 0.0, 1.0, &opts()).unwrap();
    assert!((w.value - 4.0 / PI).abs() < 1e-6 && w.entangled);
}

#[test]
fn magnetization_anchors() {
    for kt in [0.3, 1.0, 2.0] {
        assert!(xx_magnetization(kt, 0.0, 1.0, &opts()).unwrap().abs() < 1e-14);
    }
    let saturated = xx_magnetization(1.0, 60.0, 1.0, &opts()).unwrap();
    assert!((saturated - 1.0).abs() < 1e-12, "{saturated}");
}

#[test]
fn energy_even_in_coupling_at_zero_field() {
    for kt in [0.2, 1.0, 3.0] {
        let up = xx_internal_energy(kt, 0.0, 1.3, &opts().quad).unwrap();
        let down = xx_internal_energy(kt, 0.0, -1.3, &opts().quad).unwrap();
        assert!((up - down).abs() < 1e-12);
    }
}

#[test]
fn high_temperature_washes_out_witness() {
    for b in [0.0, 1.0, 2.0, 3.0] {
        assert!(xx_witness(100.0, b, 1.0, &opts()).unwrap().value < 0.1);
    }
}

#[test]
fn single_cell_grid_at_low_temperature_is_entangled() {
    let axes = GridAxes {
        kt_over_j: Axis { min: 0.1, max: 0.1, count: 1 },
        b_over_j: Axis { min: 0.0, max: 0.0, count: 1 },
        coupling: 1.0,
    };
    let grid = region_scan(&axes, &opts()).unwrap();
    assert_eq!(grid.cells.len(), 1);
    assert!(grid.cells[0].witness.unwrap() > 1.0 && grid.cells[0].entangled);
}

#[test]
fn default_region_is_connected_and_anchored_at_the_corner() {
    let axes = GridAxes::default();
    let grid = region_scan(&axes, &opts()).unwrap();
    let (nb, nt) = (axes.b_over_j.count, axes.kt_over_j.count);
    assert!(grid.cells.iter().all(|c| c.witness.is_some_and(|w| w >= 0.0 && c.entangled == (w > 1.0))));
    assert!(grid.cell(0, 0).entangled);

    let mut seen = vec![false; nb * nt];
    let mut stack = vec![(0usize, 0usize)];
    seen[0] = true;
    while let Some((bi, ti)) = stack.pop() {
        let neighbours = [(bi.wrapping_sub(1), ti), (bi + 1, ti), (bi, ti.wrapping_sub(1)), (bi, ti + 1)];
        for (b2, t2) in neighbours {
            if b2 < nb && t2 < nt && !seen[b2 * nt + t2] && grid.cell(b2, t2).entangled {
                seen[b2 * nt + t2] = true;
                stack.push((b2, t2));
            }
        }
    }
    let reached = seen.iter().filter(|&&s| s).count();
    assert_eq!(reached, grid.entangled_count());

    for bi in 0..nb {
        let cell = grid.cell(bi, 0);
        if cell.b_over_j > 2.0 {
            assert!(!cell.entangled, "{cell:?}");
        }
    }
}

#[test]
fn boundary_examples() {
    let trace = TraceConfig::default();
    let tc = zero_field_critical_temperature(1.0, &trace, &opts()).unwrap().unwrap();
    assert!((1.2..1.5).contains(&tc), "{tc}");

    let curve = boundary_trace(&[3.0], 1.0, &trace, &opts()).unwrap();
    assert!(matches!(curve.points[0].outcome, BoundaryOutcome::NoCrossing { w_at_kt_min, .. } if w_at_kt_min < 1.0));
}

#[test]
fn free_fermions_converge_to_the_limit() {
    for (kt, b) in [(0.5, 0.0), (1.0, 1.0), (2.0, 2.0), (0.7, 0.4)] {
        let limit = xx_internal_energy(kt, b, 1.0, &opts().quad).unwrap();
        let errors: Vec<f64> = [100, 200, 400, 800, 1600]
            .iter()
            .map(|&n| (jw_observables(n, kt, 1.0, b, SignConvention::SingletGround).unwrap().energy_per_site - limit).abs())
            .collect();
        let inversions = errors.windows(2).filter(|w| w[1] > w[0]).count();
        let large_inversions = errors.windows(2).filter(|w| w[1] > w[0] && w[0] >= 1e-6).count();
        assert!(inversions <= 1 && large_inversions == 0, "kT={kt} B={b}: {errors:?}");
    }
}

#[test]
fn lowtemp_ferromagnet_large_n_behaviour() {
    let (kt, b, j) = (0.2, 0.4, 1.0);
    let beta = 1.0 / kt;
    let mut previous_excess = 0.0;
    let mut previous_density_gap = f64::INFINITY;
    for n in [100usize, 10_000, 1_000_000, 100_000_000] {
        let ln_z = lowtemp_ferro_log_partition(n, kt, b, j, LowTempExponent::Extensive).unwrap();
        let excess = ln_z - n as f64 * beta * (j + b);
        assert!(excess > previous_excess);
        let density_gap = (ln_z / n as f64 - beta * (j + b)).abs();
        assert!(density_gap < previous_density_gap);
        previous_excess = excess;
        previous_density_gap = density_gap;
        assert!(!lowtemp_ferro_witness(n, kt, b, j, LowTempExponent::Extensive).unwrap().entangled);
    }
    let w_small = lowtemp_ferro_witness(100, kt, b, j, LowTempExponent::Extensive).unwrap().value;
    let w_large = lowtemp_ferro_witness(10_000, kt, b, j, LowTempExponent::Extensive).unwrap().value;
    assert!((w_large - 1.0).abs() < (w_small - 1.0).abs());
}

#[test]
fn lowtemp_derivatives_match_finite_differences() {
    let (n, kt, b, j) = (500usize, 0.25, 0.3, 1.0);
    for exponent in [LowTempExponent::Extensive, LowTempExponent::AsPrinted] {
        let ln_z = |beta: f64, field: f64| lowtemp_ferro_log_partition(n, 1.0 / beta, field, j, exponent).unwrap();
        let beta = 1.0 / kt;
        let (hb, hf) = (1e-4, 1e-5);
        let u_fd = -(ln_z(beta + hb, b) - ln_z(beta - hb, b)) / (2.0 * hb);
        let m_fd = (ln_z(beta, b + hf) - ln_z(beta, b - hf)) / (2.0 * hf) / beta;
        let (u, m) = lowtemp_ferro_observables(n, kt, b, j, exponent).unwrap();
        assert!((u - u_fd).abs() < 1e-5 * u.abs().max(1.0), "{exponent:?}: U {u} vs {u_fd}");
        assert!((m - m_fd).abs() < 1e-5 * m.abs().max(1.0), "{exponent:?}: M {m} vs {m_fd}");
    }
}
