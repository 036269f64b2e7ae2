use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use gausscap::bandpass::{
    capacity_bandpass_with, divergence_certificate, infinite_capacity_probe_classical,
    infinite_capacity_probe_quantum, BandpassProblem, ProbeBand,
};
use gausscap::broadband::{
    capacity_broadband_with, capacity_upper_bound, convergence_trace, error_probability_bounds, BroadbandModel,
    BroadbandOptions,
};
use gausscap::channel_models::{capacity_single_mode, SingleModeChannel, SingleModeModel};
use gausscap::io::{parse_covariance, parse_modes, write_columns};
use gausscap::spectra::{make_grid, CutoffSchedule, ProfileDocument};
use gausscap::symplectic::{
    kernel_symplectic_spectrum, vacuum_form_frequency, vacuum_form_slobodeckij, williamson_eigenvalues,
    SampledFunction, StationaryKernel,
};
use gausscap::waterfill::waterfill_discrete;
use gausscap::{load_profile, SpectralProfile};
use serde_json::{json, Value};

use crate::*;

type Table = (Vec<&'static str>, Vec<Vec<f64>>);

pub fn run(cli: &Cli) -> Result<()> {
    let (result, table) = match &cli.command {
        Command::Capacity(CapacityCmd::SingleMode(a)) => single_mode(a)?,
        Command::Capacity(CapacityCmd::Broadband(a)) => broadband(cli, a)?,
        Command::Capacity(CapacityCmd::Bandpass(a)) => bandpass(cli, a)?,
        Command::Waterfill(a) => waterfill(cli, a)?,
        Command::Converge(a) => converge(cli, a)?,
        Command::Probe(ProbeCmd::Quantum(a)) => probe(cli, a, true)?,
        Command::Probe(ProbeCmd::Classical(a)) => probe(cli, a, false)?,
        Command::Symplectic(cmd) => symplectic(cmd)?,
        Command::VacuumForm(a) => vacuum_form(a)?,
        Command::Validate(a) => (validate(cli, a), None),
    };
    emit(cli, result, table)
}

fn emit(cli: &Cli, result: Value, table: Option<Table>) -> Result<()> {
    let doc = json!({ "config": cli, "result": result });
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    if let Some(path) = &cli.csv {
        let Some((headers, rows)) = table else {
            return Err(InputError("this command has no tabular output for --csv".into()).into());
        };
        fs::write(path, write_columns(&headers, &rows)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())).into())
}

fn profile(path: &Path) -> Result<SpectralProfile> {
    let text = read(path)?;
    load_profile(&text).with_context(|| format!("profile {}", path.display()))
}

fn options(cli: &Cli) -> BroadbandOptions<f64> {
    let mut opts = BroadbandOptions::default();
    if let Some(tol) = cli.tol {
        opts.tol = tol;
    }
    opts
}

fn single_mode(a: &SingleModeArgs) -> Result<(Value, Option<Table>)> {
    let model = match a.model {
        SingleModel::Attenuator => SingleModeModel::Attenuator,
        SingleModel::Amplifier => SingleModeModel::Amplifier,
        SingleModel::ClassicalNoise => SingleModeModel::ClassicalNoise,
        SingleModel::ContravariantAmplifier => SingleModeModel::ContravariantAmplifier,
        SingleModel::ClassicalQuantum => SingleModeModel::ClassicalQuantum,
        SingleModel::QuantumClassical => SingleModeModel::QuantumClassical,
    };
    let ch = SingleModeChannel::new(model, a.k, a.noise)?;
    let c = capacity_single_mode(&ch, a.energy)?;
    Ok((json!({ "capacity": c }), Some((vec!["capacity"], vec![vec![c]]))))
}

fn broadband(cli: &Cli, a: &BroadbandArgs) -> Result<(Value, Option<Table>)> {
    let prof = profile(&a.profile)?;
    let model = match a.model {
        BroadModel::GaugeCovariant => BroadbandModel::GaugeCovariant,
        BroadModel::GaugeContravariant => BroadbandModel::GaugeContravariant,
        BroadModel::ClassicalQuantum => BroadbandModel::ClassicalQuantum,
        BroadModel::QuantumClassical => BroadbandModel::QuantumClassical,
    };
    let mut r = capacity_broadband_with(&prof, a.energy, model, cli.hbar, &options(cli))?;
    if model == BroadbandModel::GaugeCovariant {
        r.bound = Some(capacity_upper_bound(&r, prof.kappa(), cli.hbar)?);
    }
    let row = vec![r.capacity, r.theta, r.energy_residual];
    Ok((serde_json::to_value(&r)?, Some((vec!["capacity", "theta", "energy_residual"], vec![row]))))
}

fn bandpass(cli: &Cli, a: &BandpassArgs) -> Result<(Value, Option<Table>)> {
    let p = BandpassProblem::new(profile(&a.profile)?, a.energy, a.carrier, cli.hbar)?;
    let r = capacity_bandpass_with(&p, &options(cli))?;
    let row = vec![r.capacity, r.theta, r.energy_residual];
    Ok((serde_json::to_value(&r)?, Some((vec!["capacity", "theta", "energy_residual"], vec![row]))))
}

fn waterfill(cli: &Cli, a: &WaterfillArgs) -> Result<(Value, Option<Table>)> {
    let text = read(&a.modes)?;
    let modes = parse_modes(&text, cli.hbar).with_context(|| format!("mode table {}", a.modes.display()))?;
    let sol = waterfill_discrete(&modes, a.energy, a.weight)?;
    let rows = modes
        .iter()
        .zip(&sol.allocations)
        .map(|(m, &x)| vec![m.omega, m.k_abs, m.noise_n, x])
        .collect();
    let result = json!({
        "capacity": sol.capacity,
        "theta": sol.theta,
        "energy_used": sol.energy_used,
        "allocations": sol.allocations,
        "active": sol.active,
        "kt_violation": sol.kt_violation(&modes),
    });
    Ok((result, Some((vec!["omega", "K_abs", "N", "allocation"], rows))))
}

fn converge(cli: &Cli, a: &ConvergeArgs) -> Result<(Value, Option<Table>)> {
    let prof = profile(&a.profile)?;
    let schedule = CutoffSchedule::power_law(a.schedule_c, a.schedule_alpha)?;
    let trace = convergence_trace(&prof, a.energy, cli.hbar, &schedule, &a.horizons)?;
    let mut headers = vec!["T", "modes", "cutoff", "rate", "theta", "gap"];
    let mut rows: Vec<Vec<f64>> = trace
        .rows
        .iter()
        .map(|r| vec![r.horizon, r.modes as f64, r.cutoff, r.rate, r.theta, r.gap.unwrap_or(f64::NAN)])
        .collect();
    let mut result = serde_json::to_value(&trace)?;
    if let Some(delta) = a.delta {
        let rate = match (a.rate, trace.reference) {
            (Some(r), _) => r,
            (None, Some(c)) => 0.5 * c,
            (None, None) => return Err(InputError("--rate is required when no reference capacity exists".into()).into()),
        };
        let mut bounds = Vec::new();
        for (row, &t) in rows.iter_mut().zip(&a.horizons) {
            let grid = make_grid(t, &schedule)?;
            let b = error_probability_bounds(&prof, &grid, a.energy, cli.hbar, rate, delta, None)?;
            row.extend([b.cheb_output, b.cheb_vacuum, b.random_coding]);
            bounds.push(b);
        }
        headers.extend(["cheb_output", "cheb_vacuum", "random_coding"]);
        result["error_bounds"] = json!({ "rate": rate, "delta": delta, "rows": bounds });
    }
    Ok((result, Some((headers, rows))))
}

fn probe(cli: &Cli, a: &ProbeArgs, quantum: bool) -> Result<(Value, Option<Table>)> {
    let prof = profile(&a.profile)?;
    let noise = |w: f64| prof.noise(w);
    let mut probes = Vec::new();
    for &w1 in &a.omega1 {
        let band = match (a.width, a.height, a.height_rule) {
            (Some(w), _, _) => ProbeBand::Width(w),
            (None, Some(h), _) => ProbeBand::Height(h),
            (None, None, true) => ProbeBand::Height((-w1 / 2.0).exp()),
            (None, None, false) => {
                return Err(InputError("give one of --width, --height or --height-rule".into()).into())
            }
        };
        let p = if quantum {
            let photon = a.photon_energy.unwrap_or(cli.hbar);
            infinite_capacity_probe_quantum(noise, a.energy, photon, w1, band)?
        } else {
            infinite_capacity_probe_classical(noise, a.energy, w1, band)?
        };
        probes.push(p);
    }
    let rows = probes
        .iter()
        .map(|p| {
            vec![p.omega1, p.band, p.m, p.lower_bound, p.exact_rectangle_capacity.unwrap_or(f64::INFINITY)]
        })
        .collect();
    let cert = divergence_certificate(probes, a.threshold.unwrap_or(f64::INFINITY));
    let mut result = serde_json::to_value(&cert)?;
    if a.threshold.is_none() {
        result["exceeds_threshold"] = Value::Null;
    }
    Ok((result, Some((vec!["omega1", "band", "M", "lower_bound", "exact"], rows))))
}

fn symplectic(cmd: &SymplecticCmd) -> Result<(Value, Option<Table>)> {
    let spec = match cmd {
        SymplecticCmd::Williamson { covariance } => {
            let text = read(covariance)?;
            let cov = parse_covariance(&text).with_context(|| format!("covariance {}", covariance.display()))?;
            williamson_eigenvalues(&cov)?
        }
        SymplecticCmd::Kernel { profile: path, horizon, grid } => {
            let prof = profile(path)?;
            kernel_symplectic_spectrum(&StationaryKernel::from_profile(&prof, *horizon, *grid)?)?
        }
    };
    let rows = spec.lambdas.iter().map(|&l| vec![l]).collect();
    Ok((serde_json::to_value(&spec)?, Some((vec!["lambda"], rows))))
}

/// Smooth compactly supported bump of half-width `w` around `c`.
fn bump(t: f64, c: f64, w: f64) -> f64 {
    let x = (t - c) / w;
    if x.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

/// Smooth step from 0 at `x <= 0` to 1 at `x >= 1`.
fn smooth_step(x: f64) -> f64 {
    let h = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
    h(x) / (h(x) + h(1.0 - x))
}

fn shape(kind: Shape, params: &[f64]) -> Result<Box<dyn Fn(f64) -> f64>> {
    match (kind, params) {
        (Shape::Bump, &[c, w]) if w > 0.0 => Ok(Box::new(move |t| bump(t, c, w))),
        (Shape::Plateau, &[c, inner, outer]) if 0.0 <= inner && inner < outer => {
            Ok(Box::new(move |t| smooth_step((outer - (t - c).abs()) / (outer - inner))))
        }
        _ => Err(InputError(format!(
            "bad parameters {params:?} for {kind:?}: bump takes centre,half-width; plateau takes centre,inner,outer"
        ))
        .into()),
    }
}

fn sampled_pair(text: &str) -> Result<(SampledFunction, SampledFunction)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    if lines.next().map(|h| h.replace(' ', "")) != Some("t,f,g".into()) {
        return Err(CapacityError::Schema("sample table header must be t,f,g".into()).into());
    }
    let (mut t, mut f, mut g) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| CapacityError::Schema(format!("sample row {}: {e}", i + 1)))?;
        let &[a, b, c] = vals.as_slice() else {
            return Err(CapacityError::Schema(format!("sample row {} needs 3 columns", i + 1)).into());
        };
        t.push(a);
        f.push(b);
        g.push(c);
    }
    if t.len() < 2 {
        return Err(CapacityError::Schema("sample table needs at least two rows".into()).into());
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if t.iter().enumerate().any(|(i, &ti)| (ti - (t[0] + i as f64 * dt)).abs() > 1e-9 * dt.abs() * t.len() as f64) {
        return Err(CapacityError::Schema("sample times must form a uniform grid".into()).into());
    }
    Ok((SampledFunction::new(t[0], dt, f)?, SampledFunction::new(t[0], dt, g)?))
}

fn vacuum_form(a: &VacuumFormArgs) -> Result<(Value, Option<Table>)> {
    let (f, g) = match &a.samples {
        Some(path) => sampled_pair(&read(path)?).with_context(|| format!("samples {}", path.display()))?,
        None => {
            let &[lo, hi] = a.span.as_slice() else {
                return Err(InputError("--span takes two values a,b".into()).into());
            };
            let fs = shape(a.f_shape, &a.f_params)?;
            let gs = shape(a.g_shape, &a.g_params)?;
            (SampledFunction::sample(fs, lo, hi, a.points)?, SampledFunction::sample(gs, lo, hi, a.points)?)
        }
    };
    let forms = vacuum_form_frequency(&f, &g)?;
    let mut result = serde_json::to_value(forms)?;
    let mut row = vec![forms.delta, forms.j];
    let mut headers = vec!["delta", "j"];
    if a.slobodeckij {
        let s = vacuum_form_slobodeckij(&f, &g)?;
        result["slobodeckij"] = json!(s);
        result["relative_difference"] = json!((s - forms.j).abs() / forms.j.abs());
        row.push(s);
        headers.push("slobodeckij");
    }
    Ok((result, Some((headers, vec![row]))))
}

fn validate(cli: &Cli, a: &ValidateArgs) -> Value {
    let mut diagnostics = Vec::new();
    if !(cli.hbar.is_finite() && cli.hbar > 0.0) {
        diagnostics.push(format!("hbar must be positive, got {}", cli.hbar));
    }
    if let Some(path) = &a.profile {
        match read(path).and_then(|t| Ok(ProfileDocument::parse(&t)?)) {
            Err(e) => diagnostics.push(format!("profile: {e:#}")),
            Ok(doc) => {
                let found = doc.diagnostics();
                if found.is_empty() {
                    if let Err(e) = doc.to_profile::<f64>() {
                        diagnostics.push(format!("profile: {e}"));
                    }
                }
                diagnostics.extend(found.into_iter().map(|d| format!("profile: {d}")));
            }
        }
    }
    if let Some(path) = &a.modes {
        if let Err(e) = read(path).and_then(|t| Ok(parse_modes(&t, cli.hbar.max(f64::MIN_POSITIVE))?)) {
            diagnostics.push(format!("modes: {e:#}"));
        }
    }
    if let Some(path) = &a.covariance {
        match read(path).and_then(|t| Ok(parse_covariance(&t)?)) {
            Err(e) => diagnostics.push(format!("covariance: {e:#}")),
            Ok(cov) if !cov.satisfies_state_condition() => {
                diagnostics.push("covariance: alpha + (i/2) Delta is not positive semidefinite".into())
            }
            Ok(_) => {}
        }
    }
    if let Some(e) = a.energy {
        if !(e.is_finite() && e >= 0.0) {
            diagnostics.push(format!("energy must be non-negative, got {e}"));
        }
    }
    if a.horizons.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        diagnostics.push("observation times must be positive".into());
    }
    if a.horizons.windows(2).any(|w| w[1] <= w[0]) {
        diagnostics.push("observation times must be strictly increasing".into());
    }
    json!({ "runnable": diagnostics.is_empty(), "diagnostics": diagnostics })
}
