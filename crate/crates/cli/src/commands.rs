//! One function per subcommand. Configs are fully validated before the
//! output directory is created; all writing happens after the parallel
//! computation finishes.

use crate::config::*;
use crate::run::{num, usage, Globals, Run, UsageError, MANIFEST};
use anyhow::{Context, Result};
use circlab_core::dense::{
    exact_correlation, porter_thomas_test, run_grid_circuit, transport_profile, typicality_correlation, xeb,
    GridCircuit, HeisenbergChain, MAX_QUBITS,
};
use circlab_core::monitored::{mean_stderr, run_ensemble, CircuitConfig, Observables};
use circlab_core::purification::{
    correlation_samples, order_parameter_samples, purification_ensemble, ProbeConfig, PurificationConfig,
};
use circlab_core::rng::{rng_from_seed, trajectory_seed};
use circlab_core::scaling::{bootstrap_collapse, collapse as fit_collapse, power_law_fit, CellSamples, FitReport, ScanPoint};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Seed of grid cell `(i, j)` under `master`; trajectory `k` then uses `trajectory_seed(cell, k)`.
fn cell_seed(master: u64, i: usize, j: usize) -> u64 {
    trajectory_seed(trajectory_seed(master, i as u64), j as u64)
}

fn nonempty<T>(v: &[T], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(UsageError::new(format!("`{what}` is empty")));
    }
    Ok(())
}

fn positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(UsageError::new(format!("`{what}` must be at least 1")));
    }
    Ok(())
}

// ---------------------------------------------------------------- mipt-scan

fn scan_cells(cfg: &ScanConfig, seed: u64) -> Result<Vec<CircuitConfig>> {
    nonempty(&cfg.l, "l")?;
    nonempty(&cfg.p, "p")?;
    positive(cfg.trajectories, "trajectories")?;
    positive(cfg.steps_per_site, "steps_per_site")?;
    let mut cells = Vec::new();
    for (i, &l) in cfg.l.iter().enumerate() {
        for (j, &p) in cfg.p.iter().enumerate() {
            let mut c = CircuitConfig::new(l, p, cell_seed(seed, i, j));
            c.steps = cfg.steps_per_site * l;
            c.boundary = cfg.boundary;
            c.record_every = cfg.record_every;
            c.observables = Observables { s_half: cfg.observables.s_half, i3: cfg.observables.i3, i2: cfg.observables.i2, layout: false };
            if cfg.steady_state {
                c = c.steady_state_window();
            }
            usage(c.validate())?;
            cells.push(c);
        }
    }
    Ok(cells)
}

pub fn mipt_scan(mut cfg: ScanConfig, g: &Globals) -> Result<()> {
    let seed = g.seed(cfg.seed);
    cfg.seed = Some(seed);
    let cells = scan_cells(&cfg, seed)?;
    let mut results = Vec::with_capacity(cells.len());
    for c in &cells {
        results.push(run_ensemble(c, cfg.trajectories).with_context(|| format!("L = {}, p = {}", c.l, c.p))?);
    }
    let mut run = Run::create(g.out(cfg.out.as_deref()), "mipt-scan")?;
    let header = ["L", "p", "seed", "observable", "t", "value"];
    let mut all = run.csv("scan.csv", &header)?;
    let mut summary = run.csv("summary.csv", &["L", "p", "observable", "mean", "stderr", "n"])?;
    for (c, recs) in cells.iter().zip(&results) {
        let mut cell = run.csv(&format!("cells/L{}_p{}.csv", c.l, num(c.p)), &header)?;
        let mut window: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        let from = c.steps.saturating_sub(c.l) + 1;
        for (k, r) in recs.iter().enumerate() {
            let tseed = trajectory_seed(c.seed, k as u64).to_string();
            let mut series: Vec<(&str, &[i64])> = Vec::new();
            if c.observables.s_half {
                series.push(("s_half", &r.s_half));
            }
            if c.observables.i3 {
                series.push(("i3", &r.i3));
            }
            if let Some(v) = &r.i2_pairs {
                series.push(("i2", v));
            }
            for &(name, vals) in &series {
                for (t, v) in r.times.iter().zip(vals) {
                    let row = [c.l.to_string(), num(c.p), tseed.clone(), name.to_string(), t.to_string(), v.to_string()];
                    cell.write_record(&row)?;
                    all.write_record(&row)?;
                }
                if let Some(m) = r.window_mean(vals, from) {
                    window.entry(name).or_default().push(m);
                }
            }
        }
        cell.flush()?;
        for (name, vals) in window {
            let (m, s) = mean_stderr(&vals);
            summary.write_record([c.l.to_string(), num(c.p), name.to_string(), num(m), num(s), vals.len().to_string()])?;
        }
    }
    all.flush()?;
    summary.flush()?;
    run.finish(seed, &cfg)
}

// ---------------------------------------------------------------- collapse

/// Cells from `summary.csv`-style or raw scan files. Raw rows are averaged per
/// trajectory over the last `L` recorded steps of their cell.
fn read_cells(inputs: &[std::path::PathBuf], observable: &str) -> Result<(Vec<ScanPoint>, Vec<CellSamples>)> {
    let mut points = Vec::new();
    // (L, p bits) -> seed -> (t, value)
    let mut raw: BTreeMap<(usize, u64), BTreeMap<u64, Vec<(usize, f64)>>> = BTreeMap::new();
    for path in inputs {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| UsageError::new(format!("{}: {e}", path.display())))?;
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let bad = |e: &dyn std::fmt::Display| UsageError::new(format!("{}: {e}", path.display()));
        match header.join(",").as_str() {
            "L,p,observable,mean,stderr,n" => {
                for rec in rdr.records() {
                    let rec = rec.map_err(|e| bad(&e))?;
                    if &rec[2] != observable {
                        continue;
                    }
                    let f = |i: usize| rec[i].parse::<f64>().map_err(|e| bad(&e));
                    points.push(ScanPoint { l: rec[0].parse().map_err(|e| bad(&e))?, p: f(1)?, value: f(3)?, stderr: f(4)? });
                }
            }
            "L,p,seed,observable,t,value" => {
                for rec in rdr.records() {
                    let rec = rec.map_err(|e| bad(&e))?;
                    if &rec[3] != observable {
                        continue;
                    }
                    let l: usize = rec[0].parse().map_err(|e| bad(&e))?;
                    let p: f64 = rec[1].parse().map_err(|e| bad(&e))?;
                    let seed: u64 = rec[2].parse().map_err(|e| bad(&e))?;
                    let t: usize = rec[4].parse().map_err(|e| bad(&e))?;
                    let v: f64 = rec[5].parse().map_err(|e| bad(&e))?;
                    raw.entry((l, p.to_bits())).or_default().entry(seed).or_default().push((t, v));
                }
            }
            h => return Err(UsageError::new(format!("{}: unrecognized header `{h}`", path.display()))),
        }
    }
    let mut cells = Vec::new();
    for ((l, pb), trajs) in raw {
        let t_max = trajs.values().flatten().map(|&(t, _)| t).max().unwrap_or(0);
        let from = t_max.saturating_sub(l) + 1;
        let values: Vec<f64> = trajs
            .values()
            .filter_map(|tv| {
                let w: Vec<f64> = tv.iter().filter(|&&(t, _)| t >= from).map(|&(_, v)| v).collect();
                (!w.is_empty()).then(|| w.iter().sum::<f64>() / w.len() as f64)
            })
            .collect();
        cells.push(CellSamples { l, p: f64::from_bits(pb), values });
    }
    points.extend(cells.iter().map(CellSamples::point));
    if points.is_empty() {
        return Err(UsageError::new(format!("no rows for observable `{observable}`")));
    }
    Ok((points, cells))
}

pub fn collapse(mut cfg: CollapseConfig, g: &Globals) -> Result<()> {
    let seed = g.seed(cfg.seed);
    cfg.seed = Some(seed);
    let (points, cells) = read_cells(&cfg.inputs, &cfg.observable)?;
    if cfg.bootstrap > 0 && cells.is_empty() {
        return Err(UsageError::new("bootstrap needs raw per-trajectory input"));
    }
    let fit = fit_collapse(&points, &cfg.options).context("collapse")?;
    let boot = if cfg.bootstrap > 0 { Some(bootstrap_collapse(&cells, &cfg.options, cfg.bootstrap, seed)?) } else { None };
    let report = FitReport::new(&fit, boot.as_ref(), &cfg.options);
    let mut run = Run::create(g.out(cfg.out.as_deref()), "collapse")?;
    run.json("collapse.json", &report)?;
    run.finish(seed, &cfg)
}

// ---------------------------------------------------------------- purify

pub fn purify(mut cfg: PurifyConfig, g: &Globals) -> Result<()> {
    let seed = g.seed(cfg.seed);
    cfg.seed = Some(seed);
    nonempty(&cfg.l, "l")?;
    nonempty(&cfg.p, "p")?;
    positive(cfg.trajectories, "trajectories")?;
    positive(cfg.steps_per_site, "steps_per_site")?;
    let mut cells = Vec::new();
    for (i, &l) in cfg.l.iter().enumerate() {
        for (j, &p) in cfg.p.iter().enumerate() {
            let mut base = CircuitConfig::new(l, p, cell_seed(seed, i, j));
            base.steps = cfg.steps_per_site * l;
            base.boundary = cfg.boundary;
            let mut pc = PurificationConfig::new(base);
            pc.purity_threshold_bits = cfg.threshold_bits;
            usage(pc.validate())?;
            cells.push(pc);
        }
    }
    let results = cells
        .iter()
        .map(|c| purification_ensemble(c, cfg.trajectories))
        .collect::<circlab_core::Result<Vec<_>>>()?;
    let mut run = Run::create(g.out(cfg.out.as_deref()), "purify")?;
    let mut tp = run.csv("purify.csv", &["L", "p", "seed", "t_p"])?;
    let mut sr = run.csv("s_ref.csv", &["L", "p", "seed", "t", "value"])?;
    for (c, rs) in cells.iter().zip(&results) {
        let (l, p) = (c.base.l.to_string(), num(c.base.p));
        for (k, r) in rs.iter().enumerate() {
            let s = trajectory_seed(c.base.seed, k as u64).to_string();
            tp.write_record([&l, &p, &s, &r.t_p.map(|t| t.to_string()).unwrap_or_default()])?;
            for (t, v) in r.s_ref.iter().enumerate() {
                sr.write_record([l.clone(), p.clone(), s.clone(), (t + 1).to_string(), v.to_string()])?;
            }
        }
    }
    tp.flush()?;
    sr.flush()?;
    run.finish(seed, &cfg)
}

// ---------------------------------------------------------------- probes

fn probe_cells(cfg: &ProbeFileConfig, seed: u64, pair: bool) -> Result<Vec<ProbeConfig>> {
    nonempty(&cfg.l, "l")?;
    nonempty(&cfg.p, "p")?;
    positive(cfg.trajectories, "trajectories")?;
    let mut cells = Vec::new();
    for (i, &l) in cfg.l.iter().enumerate() {
        for (j, &p) in cfg.p.iter().enumerate() {
            let base = CircuitConfig::new(l, p, cell_seed(seed, i, j));
            let mut pc = match (cfg.surface, pair) {
                (true, two) => ProbeConfig::surface(base, two),
                (false, true) => ProbeConfig::pair(base),
                (false, false) => ProbeConfig::single(base),
            };
            pc.t0 = cfg.t0_per_site * l;
            pc.t1 = cfg.t1_per_site * l;
            usage(pc.validate())?;
            cells.push(pc);
        }
    }
    Ok(cells)
}

#[derive(Serialize)]
struct ExponentFit {
    key: String,
    exponent: Option<f64>,
    stderr: Option<f64>,
    points: usize,
}

fn fit_entry(key: String, xs: &[f64], ys: &[f64], es: &[f64]) -> ExponentFit {
    let f = power_law_fit(xs, ys, Some(es)).ok();
    ExponentFit { key, exponent: f.map(|f| f.exponent), stderr: f.map(|f| f.stderr), points: xs.len() }
}

fn probe(mut cfg: ProbeFileConfig, g: &Globals, pair: bool) -> Result<()> {
    let seed = g.seed(cfg.seed);
    cfg.seed = Some(seed);
    let cells = probe_cells(&cfg, seed, pair)?;
    let samples = cells
        .iter()
        .map(|c| if pair { correlation_samples(c, cfg.trajectories) } else { order_parameter_samples(c, cfg.trajectories) })
        .collect::<circlab_core::Result<Vec<_>>>()?;
    let command = if pair { "probe-eta" } else { "probe-beta" };
    let mut run = Run::create(g.out(cfg.out.as_deref()), command)?;
    let mut raw = run.csv("samples.csv", &["L", "p", "seed", "value"])?;
    let mut agg = run.csv("probe.csv", &["L", "p", "mean", "stderr", "n"])?;
    let mut stats = Vec::new();
    for (c, vals) in cells.iter().zip(&samples) {
        let (l, p) = (c.base.l.to_string(), num(c.base.p));
        for (k, v) in vals.iter().enumerate() {
            raw.write_record([&l, &p, &trajectory_seed(c.base.seed, k as u64).to_string(), &num(*v)])?;
        }
        let (m, s) = mean_stderr(vals);
        agg.write_record([l, p, num(m), num(s), vals.len().to_string()])?;
        stats.push((c.base.l, c.base.p, m, s));
    }
    raw.flush()?;
    agg.flush()?;
    if pair {
        // decay of I2 with L at each p
        let mut fits = Vec::new();
        for &p in &cfg.p {
            let pts: Vec<_> = stats.iter().filter(|s| s.1 == p).collect();
            if pts.len() >= 2 {
                let xs: Vec<f64> = pts.iter().map(|s| s.0 as f64).collect();
                let ys: Vec<f64> = pts.iter().map(|s| s.2).collect();
                let es: Vec<f64> = pts.iter().map(|s| s.3).collect();
                fits.push(fit_entry(format!("p={}", num(p)), &xs, &ys, &es));
            }
        }
        run.json("eta.json", &fits)?;
    } else if let Some(p_c) = cfg.p_c {
        // S(R) ∝ (p_c − p)^β on p ∈ [p_c − 0.06, p_c − 0.005]
        let mut fits = Vec::new();
        for &l in &cfg.l {
            let pts: Vec<_> = stats.iter().filter(|s| s.0 == l && s.1 >= p_c - 0.06 && s.1 <= p_c - 0.005).collect();
            let xs: Vec<f64> = pts.iter().map(|s| p_c - s.1).collect();
            let ys: Vec<f64> = pts.iter().map(|s| s.2).collect();
            let es: Vec<f64> = pts.iter().map(|s| s.3).collect();
            fits.push(fit_entry(format!("L={l}"), &xs, &ys, &es));
        }
        run.json("beta.json", &fits)?;
    }
    run.finish(seed, &cfg)
}

pub fn probe_beta(cfg: ProbeFileConfig, g: &Globals) -> Result<()> {
    probe(cfg, g, false)
}

pub fn probe_eta(cfg: ProbeFileConfig, g: &Globals) -> Result<()> {
    probe(cfg, g, true)
}

// ---------------------------------------------------------------- hydro

fn read_reference(path: &Path, times: &[f64]) -> Result<Vec<f64>> {
    let bad = |e: &dyn std::fmt::Display| UsageError::new(format!("{}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(&e))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(&e))?;
        let t: f64 = rec[0].parse().map_err(|e| bad(&e))?;
        let v: f64 = rec[1].parse().map_err(|e| bad(&e))?;
        rows.push((t, v));
    }
    times
        .iter()
        .map(|&t| {
            rows.iter()
                .find(|(rt, _)| (rt - t).abs() < 1e-9)
                .map(|r| r.1)
                .ok_or_else(|| bad(&format!("no reference value at t = {t}")))
        })
        .collect()
}

#[derive(Serialize)]
struct HydroSummary {
    max_deviation: Option<f64>,
    transport: Option<circlab_core::dense::TransportProfile>,
}

pub fn hydro(mut cfg: HydroConfig, g: &Globals) -> Result<()> {
    let seed = g.seed(cfg.seed);
    cfg.seed = Some(seed);
    positive(cfg.realizations, "realizations")?;
    let chain = HeisenbergChain::new(cfg.l).with_dt(cfg.dt).with_order(cfg.order);
    usage(chain.validate())?;
    if cfg.source >= cfg.l {
        return Err(UsageError::new(format!("source {} outside the chain", cfg.source)));
    }
    let step = cfg.t_step.unwrap_or(cfg.dt);
    let ratio = step / cfg.dt;
    if !(step > 0.0) || (ratio - ratio.round()).abs() > 1e-9 || !(cfg.t_max >= 0.0) {
        return Err(UsageError::new("t_step must be a positive multiple of dt and t_max non-negative"));
    }
    let times: Vec<f64> = (0..=((cfg.t_max / step) + 1e-9).floor() as usize).map(|k| k as f64 * step).collect();
    let reference = cfg.reference.as_deref().map(|p| read_reference(p, &times)).transpose()?;
    let run_t = typicality_correlation(&chain, cfg.source, cfg.depth, &times, cfg.realizations, seed)?;
    let mean = run_t.mean_profile();
    let exact = match reference {
        Some(r) => Some(r),
        None if cfg.exact => Some(exact_correlation(&chain, cfg.source, &times)?.iter().map(|row| row[cfg.source]).collect()),
        None => None,
    };
    let mut run = Run::create(g.out(cfg.out.as_deref()), "hydro")?;
    let mut prof = run.csv("profiles.csv", &["L", "realization", "t", "site", "value"])?;
    for (r, rows) in run_t.profiles.iter().enumerate() {
        for (t, row) in times.iter().zip(rows) {
            for (site, v) in row.iter().enumerate() {
                prof.write_record([cfg.l.to_string(), r.to_string(), num(*t), site.to_string(), num(*v)])?;
            }
        }
    }
    prof.flush()?;
    let mut auto = run.csv("autocorrelation.csv", &["t", "typicality", "exact", "deviation"])?;
    let mut max_dev: Option<f64> = None;
    for (k, &t) in times.iter().enumerate() {
        let v = mean[k][cfg.source];
        let (e, d) = match &exact {
            Some(ex) => {
                let d = (v - ex[k]).abs();
                max_dev = Some(max_dev.map_or(d, |m: f64| m.max(d)));
                (num(ex[k]), num(d))
            }
            None => (String::new(), String::new()),
        };
        auto.write_record([num(t), num(v), e, d])?;
    }
    auto.flush()?;
    let transport = transport_profile(&times, &mean, cfg.source).ok();
    run.json("summary.json", &HydroSummary { max_deviation: max_dev, transport })?;
    run.finish(seed, &cfg)
}

// ---------------------------------------------------------------- sample

#[derive(Serialize)]
struct SampleSummary {
    dim: usize,
    realizations: usize,
    ks_distance: f64,
    participation_entropy: f64,
    participation_target: f64,
    xeb: f64,
    xeb_stderr: f64,
    xeb_target: f64,
}

pub fn sample(mut cfg: SampleConfig, g: &Globals) -> Result<()> {
    let seed = g.seed(cfg.seed);
    cfg.seed = Some(seed);
    positive(cfg.realizations, "realizations")?;
    positive(cfg.samples, "samples")?;
    if cfg.l < 2 || cfg.l > MAX_QUBITS {
        return Err(UsageError::new(format!("l = {} outside 2..={MAX_QUBITS}", cfg.l)));
    }
    let (rows, cols) = circlab_core::dense::grid_shape(cfg.l);
    let dim = 1usize << cfg.l;
    let mut z = Vec::with_capacity(cfg.realizations * dim);
    let mut pe = Vec::new();
    let mut xebs = Vec::new();
    let mut counts = Vec::new();
    for r in 0..cfg.realizations {
        let mut rng = rng_from_seed(trajectory_seed(seed, r as u64));
        let grid = GridCircuit::random(rows, cols, cfg.depth, cfg.entangler, &mut rng);
        let s = run_grid_circuit(&grid, None)?;
        let probs = s.probabilities();
        let shots = s.sample(cfg.samples, &mut rng);
        xebs.push(xeb(&shots, &probs)?);
        pe.push(s.participation_entropy());
        let mut c: BTreeMap<usize, usize> = BTreeMap::new();
        for k in shots {
            *c.entry(k).or_default() += 1;
        }
        counts.push(c);
        z.extend(probs);
    }
    let ks = porter_thomas_test(&z, dim).ks_distance;
    let (pe_mean, _) = mean_stderr(&pe);
    let (xm, xs) = mean_stderr(&xebs);
    let ln_d = (dim as f64).ln();
    let mut run = Run::create(g.out(cfg.out.as_deref()), "sample")?;
    for (r, c) in counts.iter().enumerate() {
        let mut w = run.csv(&format!("counts/r{r:04}.csv"), &["bitstring", "count"])?;
        for (k, n) in c {
            w.write_record([format!("{:0width$b}", k, width = cfg.l), n.to_string()])?;
        }
        w.flush()?;
    }
    run.json(
        "summary.json",
        &SampleSummary {
            dim,
            realizations: cfg.realizations,
            ks_distance: ks,
            participation_entropy: pe_mean,
            participation_target: ln_d - 1.0 + EULER_GAMMA,
            xeb: xm,
            xeb_stderr: xs,
            xeb_target: ln_d + EULER_GAMMA - 1.0,
        },
    )?;
    run.finish(seed, &cfg)
}

// ---------------------------------------------------------------- replay

pub fn replay(path: &Path, g: &Globals) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError::new(format!("{}: {e}", path.display())))?;
    let m: serde_json::Value = serde_json::from_str(&text).map_err(|e| UsageError::new(format!("{}: {e}", path.display())))?;
    let command = m["command"].as_str().ok_or_else(|| UsageError::new(format!("{MANIFEST} has no command")))?;
    let config = m["config"].clone();
    fn parse<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T> {
        serde_json::from_value(v).map_err(|e| UsageError::new(format!("manifest config: {e}")))
    }
    match command {
        "mipt-scan" => mipt_scan(parse(config)?, g),
        "collapse" => collapse(parse(config)?, g),
        "purify" => purify(parse(config)?, g),
        "probe-beta" => probe_beta(parse(config)?, g),
        "probe-eta" => probe_eta(parse(config)?, g),
        "hydro" => hydro(parse(config)?, g),
        "sample" => sample(parse(config)?, g),
        other => Err(UsageError::new(format!("unknown command `{other}` in manifest"))),
    }
}
