//! The experiment commands: `profile`, `averaged`, `scan`, `agreement`,
//! `reconstruct`.

use crate::config::{Config, ConfigError};
use crate::output::{write_csv, write_labeled_csv, OutputDir, Summary};
use crate::setup;
use crate::svg::Plot;
use crate::CliError;
use tori_core::averaged::{find_equilibria, twist, AveragedSystem};
use tori_core::hamiltonian::{admissible_temperatures, CriticalKind, EdgeKind};
use tori_core::orbit::ActionProfile;
use tori_core::poincare::{
    assemble_report, averaging_agreement, log_log_slope, omega_beta_det, scan_grid, scan_point,
    ScanConfig, SectionSpec,
};
use tori_core::thermostats::Variant;

fn edge_tag(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::Oscillation => "osc",
        EdgeKind::RotationUpper => "rotu",
        EdgeKind::RotationLower => "rotl",
    }
}

pub fn cmd_profile(cfg: &mut Config, out: &OutputDir) -> Result<(), CliError> {
    let ham = setup::hamiltonian_from(cfg)?;
    let opts = setup::grid_from(cfg)?;
    let graph = ham.reeb_graph()?;
    // an explicit cap below an edge's lower end means an empty window
    if let Some(cap) = opts.spec.h_cap {
        for edge in graph.unbounded_edges() {
            if cap <= edge.h_lo {
                return Err(CliError::Config(ConfigError(format!(
                    "no data: h_cap = {cap} is below the start of edge {} at h = {}",
                    edge.id, edge.h_lo
                ))));
            }
        }
    }
    let profiles = setup::all_profiles(&ham, &graph, &opts)?;

    let mut kappa_plot = Plot::new("K vs H", "h", "K");
    let shift = ham.v_floor();
    let mut ktilde_plot = Plot::new("Ktilde_k (k+1)/2 vs H", "h", "(k+1)/2 Ktilde_k");
    let mut lnf_plot = Plot::new("ln f_k vs ln(h - min V)", "ln(h - min V)", "ln f_k");
    for v in &graph.vertices {
        if v.kind == CriticalKind::Saddle {
            kappa_plot.add_vline(v.h);
        }
    }
    for profile in &profiles {
        let mut header: Vec<String> = vec!["h".into(), "I".into(), "H_I".into(), "K".into()];
        for &k in &profile.ks {
            header.push(format!("f_{k}"));
        }
        for &k in &profile.ks {
            header.push(format!("Ktilde_{k}"));
        }
        for &k in &profile.ks {
            header.push(format!("F_{k}"));
        }
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        let mut rows = Vec::with_capacity(profile.h.len());
        for &h in &profile.h {
            let mut row = vec![h];
            row.extend(profile.row(h));
            rows.push(row);
        }
        if out.csv {
            let name = format!("profile_e{}_{}.csv", profile.edge_id, edge_tag(profile.kind));
            write_csv(&out.path(&name), &header_refs, &rows)?;
        }
        let tag = format!("e{}", profile.edge_id);
        kappa_plot.add_series(&tag, profile.h.iter().map(|&h| (h, profile.kappa_of_h(h))).collect());
        for &k in &profile.ks {
            if k <= 7 {
                let pts = profile
                    .h
                    .iter()
                    .map(|&h| {
                        (h, profile.ktilde_of_h(k, h).unwrap() * (k as f64 + 1.0) / 2.0)
                    })
                    .collect();
                ktilde_plot.add_series(&format!("k={k} {tag}"), pts);
            }
            if k >= 3 {
                let pts = profile
                    .h
                    .iter()
                    .filter(|&&h| h > shift)
                    .map(|&h| {
                        ((h - shift).ln(), profile.f_of_h(k, h).unwrap().max(1e-300).ln())
                    })
                    .collect();
                lnf_plot.add_series(&format!("k={k} {tag}"), pts);
            }
        }
    }
    if out.svg {
        kappa_plot.write(&out.path("kappa_vs_h.svg"))?;
        ktilde_plot.write(&out.path("ktilde_rescaled.svg"))?;
        lnf_plot.write(&out.path("lnfk_vs_lnh.svg"))?;
    }
    let mut summary = Summary::new();
    summary.push_usize("edges", profiles.len());
    for p in &profiles {
        summary.push_f64(&format!("edge{}_h_min", p.edge_id), p.h_min());
        summary.push_f64(&format!("edge{}_h_max", p.edge_id), p.h_max());
        if let Some(hi) = &p.vertex_hi {
            summary.push_f64(&format!("edge{}_kappa_saddle_limit", p.edge_id), hi.kappa);
            if let Some(kt3) = hi.ktilde_limit(3) {
                summary.push_f64(&format!("edge{}_ktilde3_saddle_limit", p.edge_id), kt3);
            }
        }
    }
    summary.write(&out.path("profile_summary.txt"))?;
    Ok(())
}

pub fn cmd_averaged(cfg: &mut Config, out: &OutputDir) -> Result<(), CliError> {
    let ham = setup::hamiltonian_from(cfg)?;
    let thermostat = setup::thermostat_from(cfg)?;
    let opts = setup::grid_from(cfg)?;
    let g_lo_frac = cfg.f64_or("experiment", "twist_g_lo_frac", 0.05)?;
    let g_hi_frac = cfg.f64_or("experiment", "twist_g_hi_frac", 0.6)?;
    let g_levels = cfg.usize_or("experiment", "twist_levels", 15)?;
    let graph = ham.reeb_graph()?;
    let profiles = setup::all_profiles(&ham, &graph, &opts)?;

    // admissibility gate for the WK thermostat
    let admissible = if let Variant::WatanabeKobayashi { k, .. } = thermostat.variant {
        Some(admissible_temperatures(&graph, &profiles, k)?)
    } else {
        None
    };

    let mut equil_rows: Vec<Vec<f64>> = Vec::new();
    let mut summary = Summary::new();
    let mut count = 0usize;
    for profile in &profiles {
        let roots = find_equilibria(&thermostat, profile)?;
        for (j, &h0) in roots.iter().enumerate() {
            let sys = AveragedSystem::build(&thermostat, profile, h0, admissible.as_ref())?;
            equil_rows.push(vec![profile.edge_id as f64, h0, sys.i0]);
            let tag = format!("e{}_r{j}", profile.edge_id);
            let (sig_nodes, u_nodes) = {
                let mut s = Vec::new();
                let mut u = Vec::new();
                let (lo, hi) = sys.sigma_range();
                let n = 201;
                for i in 0..n {
                    let sigma = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                    s.push(sigma);
                    u.push(sys.potential(sigma));
                }
                (s, u)
            };
            if out.csv {
                let rows: Vec<Vec<f64>> =
                    sig_nodes.iter().zip(u_nodes.iter()).map(|(&s, &u)| vec![s, u]).collect();
                write_csv(&out.path(&format!("potential_{tag}.csv")), &["sigma", "U_T"], &rows)?;
                // σ, ln I and their difference along the profile grid
                let mut rows = Vec::new();
                for &h in &profile.h {
                    let sigma = sys.sigma_at_h(h)?;
                    let lni = (profile.action_of_h(h) / sys.i0).ln();
                    rows.push(vec![h, sigma, lni, sigma - lni]);
                }
                write_csv(
                    &out.path(&format!("sigma_vs_lni_{tag}.csv")),
                    &["h", "sigma", "ln_I_over_I0", "difference"],
                    &rows,
                )?;
            }
            if out.svg {
                let mut plot = Plot::new(&format!("U_T ({tag})"), "sigma", "U_T");
                plot.add_series("U_T", sig_nodes.iter().zip(u_nodes.iter()).map(|(&a, &b)| (a, b)).collect());
                plot.write(&out.path(&format!("potential_{tag}.svg")))?;
                let mut plot = Plot::new(&format!("sigma vs ln I ({tag})"), "h", "");
                let s1: Vec<(f64, f64)> =
                    profile.h.iter().map(|&h| (h, sys.sigma_at_h(h).unwrap())).collect();
                let s2: Vec<(f64, f64)> = profile
                    .h
                    .iter()
                    .map(|&h| (h, (profile.action_of_h(h) / sys.i0).ln()))
                    .collect();
                let s3: Vec<(f64, f64)> =
                    s1.iter().zip(s2.iter()).map(|(a, b)| (a.0, a.1 - b.1)).collect();
                plot.add_series("sigma", s1);
                plot.add_series("ln I/I0", s2);
                plot.add_series("difference", s3);
                plot.write(&out.path(&format!("sigma_vs_lni_{tag}.svg")))?;
            }
            // twist report
            let cap = sys.level_cap();
            let report = twist(&sys, g_lo_frac * cap, g_hi_frac * cap, g_levels)?;
            if out.csv {
                let rows: Vec<Vec<f64>> = report
                    .rows
                    .iter()
                    .map(|r| vec![r.action, r.level, r.period, r.freq, r.twist, r.twist_err])
                    .collect();
                write_csv(
                    &out.path(&format!("twist_{tag}.csv")),
                    &["J", "g", "T_avg", "freq", "twist", "twist_err"],
                    &rows,
                )?;
            }
            let (gxx_xi, gxx_h) = sys.hessian_at_equilibrium()?;
            summary.push_f64(&format!("{tag}_h0"), h0);
            summary.push_f64(&format!("{tag}_I0"), sys.i0);
            summary.push_f64(&format!("{tag}_hessian_xi"), gxx_xi);
            summary.push_f64(&format!("{tag}_hessian_h"), gxx_h);
            summary.push_f64(&format!("{tag}_max_abs_twist"), report.max_abs_twist());
            summary.push_str(
                &format!("{tag}_twist_significant"),
                if report.significant() { "true" } else { "false" },
            );
            count += 1;
        }
    }
    if count == 0 {
        return Err(CliError::Numerical(
            "no thermostatic equilibrium in the tabulated range".to_string(),
        ));
    }
    if out.csv {
        write_csv(&out.path("equilibria.csv"), &["edge", "h0", "I0"], &equil_rows)?;
    }
    if let Some(adm) = &admissible {
        for (i, x) in adm.excluded.iter().enumerate() {
            summary.push_f64(&format!("excluded_temperature_{i}"), *x);
        }
    }
    summary.write(&out.path("averaged_summary.txt"))?;
    Ok(())
}

/// Pick the scan edge and its equilibrium: the first edge (by id) carrying
/// a root of the balance function, unless overridden.
fn scan_system<'a>(
    cfg: &mut Config,
    thermostat: &tori_core::thermostats::ThermostatSpec,
    profiles: &'a [ActionProfile],
) -> Result<(&'a ActionProfile, f64), CliError> {
    let requested = cfg.f64_opt("experiment", "edge")?.map(|e| e as usize);
    for profile in profiles {
        if let Some(e) = requested {
            if profile.edge_id != e {
                continue;
            }
        }
        let roots = find_equilibria(thermostat, profile)?;
        if let Some(&h0) = roots.first() {
            return Ok((profile, h0));
        }
    }
    Err(CliError::Numerical("no thermostatic equilibrium found for the scan".to_string()))
}

fn section_from(
    cfg: &mut Config,
    ham: &tori_core::hamiltonian::HamiltonianSpec,
    graph: &tori_core::hamiltonian::ReebGraph,
    profile: &ActionProfile,
    h0: f64,
    temperature: f64,
) -> Result<SectionSpec, CliError> {
    let edge = &graph.edges[profile.edge_id];
    // anchor at the deepest minimum of the component (or the global one
    // for rotation cells)
    let q_star = if edge.minima.is_empty() {
        graph
            .vertices
            .iter()
            .filter(|v| v.kind == CriticalKind::Minimum)
            .map(|v| v.locations[0])
            .next()
            .unwrap_or(0.0)
    } else {
        *edge
            .minima
            .iter()
            .min_by(|a, b| ham.v(**a).partial_cmp(&ham.v(**b)).unwrap())
            .unwrap()
    };
    let q_star = cfg.f64_or("experiment", "q_star", q_star)?;
    let half_default = 0.4 * (h0 - edge.h_lo);
    let window_h = cfg
        .f64_pair_opt("experiment", "window_h")?
        .unwrap_or((h0 - half_default, h0 + half_default));
    let xi_half = 0.5 * temperature.sqrt();
    let window_xi = cfg.f64_pair_opt("experiment", "window_xi")?.unwrap_or((-xi_half, xi_half));
    let circle = ham.domain == tori_core::hamiltonian::DomainKind::Circle;
    let mut section = SectionSpec::new(q_star, circle, window_h, window_xi);
    section.t_cap_per_return = cfg.f64_or("experiment", "t_cap_per_return", 1e4)?;
    Ok(section)
}

pub fn cmd_scan(cfg: &mut Config, out: &OutputDir, threads: usize) -> Result<(), CliError> {
    let ham = setup::hamiltonian_from(cfg)?;
    let thermostat = setup::thermostat_from(cfg)?;
    let opts = setup::grid_from(cfg)?;
    let graph = ham.reeb_graph()?;
    let profiles = setup::all_profiles(&ham, &graph, &opts)?;
    let (profile, h0) = scan_system(cfg, &thermostat, &profiles)?;
    let section = section_from(cfg, &ham, &graph, profile, h0, thermostat.temperature)?;

    let nh_grid = cfg.usize_or("experiment", "nh_grid", 41)?;
    let nxi_grid = cfg.usize_or("experiment", "nxi_grid", 41)?;
    let mut scan_cfg = ScanConfig::default();
    scan_cfg.n_iters = cfg.usize_or("experiment", "n_iters", scan_cfg.n_iters)?;
    scan_cfg.companion_iters =
        cfg.usize_or("experiment", "companion_iters", scan_cfg.companion_iters)?;
    scan_cfg.residual_threshold =
        cfg.f64_or("experiment", "residual_threshold", scan_cfg.residual_threshold)?;
    scan_cfg.separation_threshold =
        cfg.f64_or("experiment", "separation_threshold", scan_cfg.separation_threshold)?;
    scan_cfg.rtol = cfg.f64_or("experiment", "rtol", scan_cfg.rtol)?;
    scan_cfg.atol = cfg.f64_or("experiment", "atol", scan_cfg.atol)?;

    let grid = scan_grid(&section, nh_grid, nxi_grid);
    let points = run_scan_parallel(&ham, &thermostat, &section, h0, &grid, &scan_cfg, threads);
    let report = assemble_report(&ham, &thermostat, &section, points, nh_grid, nxi_grid);

    if out.csv {
        let rows: Vec<(Vec<f64>, String, Vec<f64>)> = report
            .points
            .iter()
            .map(|p| {
                (
                    vec![p.h0, p.xi0],
                    p.class.label().to_string(),
                    vec![p.rho, p.residual, p.iterations as f64],
                )
            })
            .collect();
        write_labeled_csv(
            &out.path("scan_points.csv"),
            &["h0", "xi0", "class", "rho", "residual", "iterations"],
            &rows,
        )?;
    }
    let det = omega_beta_det(&ham, &thermostat, &section, h0, 0.1 * section.window_xi.1)?;
    let mut summary = Summary::new();
    summary.push_f64("fraction_torus", report.fraction);
    summary.push_f64("fraction_torus_weighted", report.fraction_weighted);
    summary.push_usize("grid_h", nh_grid);
    summary.push_usize("grid_xi", nxi_grid);
    summary.push_usize("n_iters", scan_cfg.n_iters);
    summary.push_f64("epsilon", thermostat.epsilon);
    summary.push_f64("temperature", thermostat.temperature);
    summary.push_f64("h_equilibrium", h0);
    summary.push_f64("window_h_lo", section.window_h.0);
    summary.push_f64("window_h_hi", section.window_h.1);
    summary.push_f64("window_xi_lo", section.window_xi.0);
    summary.push_f64("window_xi_hi", section.window_xi.1);
    summary.push_f64("residual_threshold", scan_cfg.residual_threshold);
    summary.push_f64("separation_threshold", scan_cfg.separation_threshold);
    summary.push_f64("omega_beta_det", det);
    summary.write(&out.path("scan_summary.txt"))?;
    Ok(())
}

/// Order-preserving parallel map over the grid points.
pub fn run_scan_parallel(
    ham: &tori_core::hamiltonian::HamiltonianSpec,
    thermostat: &tori_core::thermostats::ThermostatSpec,
    section: &SectionSpec,
    h_eq: f64,
    grid: &[(f64, f64)],
    scan_cfg: &ScanConfig,
    threads: usize,
) -> Vec<tori_core::poincare::ScanPoint> {
    let threads = threads.max(1);
    let mut results: Vec<Option<tori_core::poincare::ScanPoint>> = vec![None; grid.len()];
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for _ in 0..threads {
            let next = &next;
            handles.push(scope.spawn(move || {
                let mut local: Vec<(usize, tori_core::poincare::ScanPoint)> = Vec::new();
                loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= grid.len() {
                        break;
                    }
                    let (h0, xi0) = grid[i];
                    local.push((i, scan_point(ham, thermostat, section, h_eq, h0, xi0, scan_cfg)));
                }
                local
            }));
        }
        for handle in handles {
            for (i, p) in handle.join().expect("scan worker panicked") {
                results[i] = Some(p);
            }
        }
    });
    results.into_iter().map(|p| p.expect("scan point missing")).collect()
}

pub fn cmd_agreement(cfg: &mut Config, out: &OutputDir) -> Result<(), CliError> {
    let ham = setup::hamiltonian_from(cfg)?;
    let thermostat = setup::thermostat_from(cfg)?;
    let opts = setup::grid_from(cfg)?;
    let graph = ham.reeb_graph()?;
    let profiles = setup::all_profiles(&ham, &graph, &opts)?;
    let (profile, h0) = scan_system(cfg, &thermostat, &profiles)?;
    let sys = AveragedSystem::build(&thermostat, profile, h0, None)?;
    let mut section = section_from(cfg, &ham, &graph, profile, h0, thermostat.temperature)?;
    // the agreement experiment ranges over ε, so keep the window wide
    section.window_h = (profile.h_min(), profile.h_max());
    section.window_xi = (-3.0, 3.0);

    let eps_list = cfg.f64_list_or("experiment", "eps_list", &[0.1, 0.05, 0.025])?;
    let edge = &graph.edges[profile.edge_id];
    let h_start = cfg.f64_or("experiment", "h0", h0 + 0.2 * (h0 - edge.h_lo))?;
    let xi_start = cfg.f64_or("experiment", "xi0", 0.25 * thermostat.temperature.sqrt())?;
    let rows = averaging_agreement(
        &ham, &thermostat, &section, &sys, profile, h_start, xi_start, &eps_list,
    )?;
    let slope = log_log_slope(&rows);
    if out.csv {
        let data: Vec<Vec<f64>> = rows.iter().map(|&(e, d)| vec![e, d]).collect();
        write_csv(&out.path("agreement.csv"), &["epsilon", "defect"], &data)?;
    }
    let mut summary = Summary::new();
    summary.push_f64("slope", slope);
    summary.push_f64("h0", h_start);
    summary.push_f64("xi0", xi_start);
    for (i, (e, d)) in rows.iter().enumerate() {
        summary.push_f64(&format!("eps_{i}"), *e);
        summary.push_f64(&format!("defect_{i}"), *d);
    }
    summary.write(&out.path("agreement_summary.txt"))?;
    Ok(())
}

pub fn cmd_reconstruct(cfg: &mut Config, out: &OutputDir) -> Result<(), CliError> {
    let beta = cfg.f64_or("experiment", "beta", 1.0)?;
    let widths = cfg.f64_list_or(
        "experiment",
        "widths",
        &[0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0],
    )?;
    let example = tori_core::reconstruct::rational_example(beta)?;
    let designed = &example.designed;
    if out.csv {
        let rows: Vec<Vec<f64>> = designed
            .sigma
            .iter()
            .map(|&s| {
                vec![
                    s,
                    tori_core::reconstruct::rational_potential(s),
                    designed.h_of_sigma(s),
                    designed.i_of_sigma(s),
                ]
            })
            .collect();
        write_csv(&out.path("design.csv"), &["sigma", "U", "H", "I"], &rows)?;
    }
    let width_table = tori_core::reconstruct::isochrone_width(
        tori_core::reconstruct::rational_potential,
        (-0.999_999, 80.0),
        &widths,
    )?;
    if out.csv {
        let rows: Vec<Vec<f64>> = width_table
            .iter()
            .map(|&(u, d)| vec![u, d, d / u.sqrt()])
            .collect();
        write_csv(&out.path("width.csv"), &["u", "delta", "delta_over_sqrt_u"], &rows)?;
    }
    if out.svg {
        let mut plot = Plot::new("designed H and I", "sigma", "");
        plot.add_series(
            "H",
            designed.sigma.iter().map(|&s| (s, designed.h_of_sigma(s))).collect(),
        );
        plot.add_series(
            "I",
            designed.sigma.iter().map(|&s| (s, designed.i_of_sigma(s))).collect(),
        );
        plot.write(&out.path("design.svg"))?;
    }

    // round trip through the fresh evaluator on a compact interval
    let consts = tori_core::reconstruct::DesignConstants {
        beta,
        sigma1: -1.0,
        h0: designed.h0,
        i0: designed.i0,
    };
    let mut round_trip: f64 = 0.0;
    for i in 0..=40 {
        let s = -0.5 + 3.5 * i as f64 / 40.0;
        let (h, iv) = tori_core::reconstruct::design_eval(
            &tori_core::reconstruct::rational_potential,
            &consts,
            s,
        )?;
        let rec = (h - consts.h0) - (iv / consts.i0).ln() / beta;
        let expect = tori_core::reconstruct::rational_potential(s)
            - tori_core::reconstruct::rational_potential(0.0);
        round_trip = round_trip.max((rec - expect).abs() / (1.0 + expect.abs()));
    }

    let mut summary = Summary::new();
    summary.push_f64("beta", beta);
    summary.push_f64("integral_full_quadrature", example.integral_full.0);
    summary.push_f64("integral_full_closed", example.integral_full.1);
    summary.push_f64("integral_half_quadrature", example.integral_half.0);
    summary.push_f64("integral_half_closed", example.integral_half.1);
    summary.push_f64("H0_design", example.h0_pair.0);
    summary.push_f64("H0_closed", example.h0_pair.1);
    summary.push_f64("I0_design", example.i0_pair.0);
    summary.push_f64("I0_closed", example.i0_pair.1);
    summary.push_f64("W0", example.w0);
    summary.push_f64("round_trip_residual", round_trip);
    let width_dev = width_table
        .iter()
        .map(|&(u, d)| (d / u.sqrt() - 1.0).abs())
        .fold(0.0_f64, f64::max);
    summary.push_f64("width_max_dev_from_sqrt_u", width_dev);
    summary.write(&out.path("reconstruct_summary.txt"))?;
    Ok(())
}
