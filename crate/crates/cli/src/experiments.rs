use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use gapwave::export::{
    svg_plot, write_density, write_half_plane, write_phase_curve, write_signal, write_spectrum, write_temperature,
    write_zero_set, write_zero_trajectory, Series,
};
use gapwave::hardy::{decompose_on, lattice_crossings, nevanlinna_exponent, phase_curve};
use gapwave::heat::{monotonicity_check_trig, zero_trajectory, TemperatureField};
use gapwave::limit_sets::examples::{default_schedule, example1_build, example2_build};
use gapwave::oscillation::{default_zero_tol, density_profile, s_count, sign_change_places};
use gapwave::signals::{random_highpass, spectrum_of, synth_trig};
use gapwave::sturm::check_sturm_bound;
use gapwave::{GapSpec, Grid, SampledSignal, TrigPoly};
use serde_json::json;

use crate::config::{parse_intervals, parse_range, ConfigError, ExperimentConfig, Kind};
use crate::report::{Check, Outcome};

pub enum RunError {
    Config(ConfigError),
    Failed(anyhow::Error),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<gapwave::GapwaveError> for RunError {
    fn from(e: gapwave::GapwaveError) -> Self {
        match e {
            gapwave::GapwaveError::InvalidInput(msg) => RunError::Config(ConfigError(msg)),
            other => RunError::Failed(other.into()),
        }
    }
}

impl From<anyhow::Error> for RunError {
    fn from(e: anyhow::Error) -> Self {
        RunError::Failed(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Failed(e.into())
    }
}

type Run<T> = Result<T, RunError>;

struct Artifacts<'a> {
    dir: &'a Path,
    svg: bool,
    names: Vec<String>,
}

impl Artifacts<'_> {
    fn csv(&mut self, name: &str, write: impl FnOnce(BufWriter<File>) -> gapwave::Result<()>) -> Run<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write(BufWriter::new(file))?;
        self.names.push(name.to_string());
        Ok(())
    }

    fn plot(&mut self, name: &str, title: &str, series: &[Series<'_>], hlines: &[f64]) -> Run<()> {
        if self.svg {
            fs::write(self.dir.join(name), svg_plot(title, series, hlines))?;
            self.names.push(name.to_string());
        }
        Ok(())
    }
}

pub fn run(cfg: &ExperimentConfig, svg: bool) -> Run<Outcome> {
    fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating output directory {}", cfg.output_dir.display()))?;
    let mut art = Artifacts {
        dir: &cfg.output_dir,
        svg,
        names: Vec::new(),
    };
    let mut out = match cfg.kind {
        Kind::Sturm => sturm(cfg, &mut art)?,
        Kind::Density => density(cfg, &mut art)?,
        Kind::Heat => heat(cfg, &mut art)?,
        Kind::Decompose => decomposition(cfg, &mut art)?,
        Kind::Example1 => example1(cfg, &mut art)?,
        Kind::Example2 => example2(cfg, &mut art)?,
    };
    out.artifacts = art.names;
    Ok(out)
}

fn sturm(cfg: &ExperimentConfig, art: &mut Artifacts<'_>) -> Run<Outcome> {
    let (m_lo, m_hi) = parse_range(cfg.str_or("m_range", "1..8")?)?;
    let trials = cfg.count_or("trials", 200)?;
    let max_degree = cfg.count_or("max_degree", 16)?;
    if max_degree < m_hi {
        return Err(ConfigError(format!("max_degree {max_degree} below the largest gap order {m_hi}")).into());
    }
    let span = m_hi - m_lo + 1;
    let mut rows = Vec::new();
    let mut violations = 0;
    for i in 0..trials {
        let m = m_lo + i % span;
        let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        let p = random_highpass(&GapSpec::high_pass(m as f64)?, m..=max_degree, 2.0 * PI, seed)?;
        let c = check_sturm_bound(&p)?;
        violations += usize::from(!c.pass);
        rows.push(json!({ "m": c.m, "count": c.count, "pass": c.pass }));
    }
    let mut exact = Vec::new();
    for m in m_lo..=m_hi {
        let c = check_sturm_bound(&TrigPoly::cos(m, 1.0, 2.0 * PI)?)?;
        exact.push(Check::equals(
            format!("cos({m}x) sign changes"),
            c.count as f64,
            2.0 * m as f64,
        ));
    }
    art.csv("sturm.csv", |w| {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["trial", "m", "count", "pass"])?;
        for (i, r) in rows.iter().enumerate() {
            w.write_record([
                i.to_string(),
                r["m"].to_string(),
                r["count"].to_string(),
                r["pass"].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let mut checks = vec![Check::equals(
        "random trials violating count >= 2m",
        violations as f64,
        0.0,
    )];
    checks.extend(exact);
    Ok(Outcome {
        results: json!({ "rows": rows }),
        checks,
        artifacts: Vec::new(),
    })
}

fn random_poly(cfg: &ExperimentConfig, trial: u64) -> Run<(TrigPoly, f64)> {
    let gap = cfg.positive_or("gap", 1.0)?;
    let band = cfg.count_or("band", 8)?;
    if (band as f64) < gap {
        return Err(ConfigError(format!("band {band} below gap {gap}")).into());
    }
    let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add(trial);
    Ok((
        random_highpass(&GapSpec::high_pass(gap)?, 1..=band, 2.0 * PI, seed)?,
        gap,
    ))
}

fn density(cfg: &ExperimentConfig, art: &mut Artifacts<'_>) -> Run<Outcome> {
    let window = cfg.positive_or("window", 200.0 * PI)?;
    let band = cfg.count_or("band", 8)?;
    let dx = cfg.positive_or("dx", 2.0 * PI / (16.0 * band as f64))?;
    let trials = cfg.count_or("trials", 1)?;
    let r_grid: Vec<f64> = (1..=200).map(|i| window * i as f64 / 200.0).collect();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for trial in 0..trials as u64 {
        let (p, gap) = random_poly(cfg, trial)?;
        let n = (window / dx).ceil() as usize;
        let grid = Grid::new(-2.0 * dx, window / n as f64, n + 5)?;
        let eval = |x: f64| p.eval(x);
        let s = SampledSignal::from_fn(grid, eval)?;
        let rep = sign_change_places(&s, default_zero_tol(&s), Some(&eval))?;
        let prof = density_profile(&rep, &r_grid)?;
        let target = gap / PI;
        checks.push(Check::at_least(
            format!("trial {trial}: tail-min s(r)/r"),
            prof.tail_min,
            0.95 * target,
        ));
        rows.push(json!({ "trial": trial, "gap_order": p.gap_order(), "tail_min": prof.tail_min, "target": target }));
        if trial == 0 {
            art.csv("density.csv", |w| write_density(w, &prof))?;
            let pts: Vec<(f64, f64)> = prof.samples.iter().map(|d| (d.r, d.density)).collect();
            art.plot(
                "density.svg",
                "s(r)/r",
                &[Series {
                    name: "s(r)/r",
                    points: pts,
                }],
                &[target],
            )?;
        }
    }
    Ok(Outcome {
        results: json!({ "trials": rows }),
        checks,
        artifacts: Vec::new(),
    })
}

fn heat(cfg: &ExperimentConfig, art: &mut Artifacts<'_>) -> Run<Outcome> {
    let (p, _) = random_poly(cfg, 0)?;
    let periods = (cfg.positive_or("window", 4.0 * PI)? / (2.0 * PI)).round().max(1.0);
    let window = periods * 2.0 * PI;
    let dx = cfg.positive_or("dx", 0.01)?;
    let t_max = cfg.positive_or("t_max", 1.0)?;
    let steps = cfg.count_or("steps", 100)?;
    let times: Vec<f64> = (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect();

    let mono = monotonicity_check_trig(&p, &times, window, 400.0)?;
    let grid = Grid::periodic(0.0, window, (window / dx).round() as usize)?;
    let s = synth_trig(&p, grid)?;
    let traj = zero_trajectory(&s, &times)?;
    let traj_counts: Vec<usize> = traj.iter().map(|(_, z)| z.len()).collect();
    let traj_increases = traj_counts.windows(2).filter(|w| w[1] > w[0]).count();

    let coarse: Vec<f64> = (0..=10).map(|i| t_max * i as f64 / 10.0).collect();
    let field = TemperatureField::from_trig(&p, grid, &coarse)?;
    art.csv("zero_trajectory.csv", |w| write_zero_trajectory(w, &traj))?;
    art.csv("temperature.csv", |w| write_temperature(w, &field))?;

    let max_zeros = traj.iter().map(|(_, z)| z.len()).max().unwrap_or(0);
    let tracks: Vec<(String, Vec<(f64, f64)>)> = (0..max_zeros)
        .map(|i| {
            let pts = traj.iter().filter_map(|(t, z)| z.get(i).map(|&x| (x, *t))).collect();
            (format!("zero {i}"), pts)
        })
        .collect();
    let series: Vec<Series<'_>> = tracks
        .iter()
        .map(|(n, pts)| Series {
            name: n,
            points: pts.clone(),
        })
        .collect();
    art.plot("zero_trajectory.svg", "zeros of f_t (x against t)", &series, &[])?;

    let checks = vec![
        Check::equals("increases of s(r, f_t) along t", mono.violations as f64, 0.0),
        Check::equals("increases of the sampled zero count", traj_increases as f64, 0.0),
    ];
    let results =
        json!({ "window": window, "times": mono.times, "counts": mono.counts, "sampled_counts": traj_counts });
    Ok(Outcome {
        results,
        checks,
        artifacts: Vec::new(),
    })
}

fn decomposition(cfg: &ExperimentConfig, art: &mut Artifacts<'_>) -> Run<Outcome> {
    let (p, _) = random_poly(cfg, 0)?;
    let periods = (cfg.positive_or("window", 64.0 * PI)? / (2.0 * PI)).round().max(1.0);
    let window = periods * 2.0 * PI;
    let dx = cfg.positive_or("dx", 2.0 * PI / 256.0)?;
    let grid = Grid::periodic(0.0, window, (window / dx).round() as usize)?;
    let s = synth_trig(&p, grid)?;
    let d = decompose_on(&s, &[0.25, 0.5, 1.0, 2.0])?;
    let recon = d.reconstruction_error(&s);
    let curve = phase_curve(&d, 1e-9)?;
    let eval = |x: f64| p.eval(x);
    let rep = sign_change_places(&s, default_zero_tol(&s), Some(&eval))?;
    let mut mismatches = 0;
    let mut probes = Vec::new();
    for i in 1..=20 {
        let r = grid.last() * i as f64 / 20.5;
        let (lc, sc) = (lattice_crossings(&curve, r)?, s_count(&rep, r)?);
        mismatches += usize::from(lc != sc);
        probes.push(json!({ "r": r, "lattice_crossings": lc, "s": sc }));
    }
    let order = p.gap_order().unwrap_or(0) as f64;
    let slope = nevanlinna_exponent(&d, 0.0, 5.0, 20.0, 31)?;

    art.csv("signal.csv", |w| write_signal(w, &s))?;
    art.csv("spectrum.csv", |w| write_spectrum(w, &spectrum_of(&s)))?;
    art.csv("phase_curve.csv", |w| write_phase_curve(w, &curve))?;
    if let Some(field) = &d.h_upper {
        art.csv("half_plane.csv", |w| write_half_plane(w, field))?;
    }
    let pts: Vec<(f64, f64)> = curve.xs.iter().copied().zip(curve.phi.iter().copied()).collect();
    let (lo, hi) = curve
        .phi
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let lines: Vec<f64> = ((lo / PI).floor() as i64 - 1..=(hi / PI).ceil() as i64)
        .map(|k| PI / 2.0 + k as f64 * PI)
        .collect();
    art.plot(
        "phase_curve.svg",
        "phase curve with lattice lines",
        &[Series {
            name: "phi",
            points: pts,
        }],
        &lines,
    )?;

    let checks = vec![
        Check::below("reconstruction error", recon, 1e-8),
        Check::equals("lattice/sign-change mismatches", mismatches as f64, 0.0),
        Check::at_most(
            "relative slope error of log|h(iy)|",
            (slope - order).abs() / order,
            0.01,
        ),
    ];
    let results = json!({
        "gap_order": order,
        "slope": slope,
        "reconstruction_error": recon,
        "touches": curve.touches,
        "jumps": curve.jumps.len(),
        "probes": probes,
    });
    Ok(Outcome {
        results,
        checks,
        artifacts: Vec::new(),
    })
}

fn example1(cfg: &ExperimentConfig, art: &mut Artifacts<'_>) -> Run<Outcome> {
    let intervals = parse_intervals(cfg.str_or("intervals", "10-13,40-46")?)?;
    let alpha = cfg.positive_or("alpha", 0.75)?;
    let epsilon = cfg.positive_or("epsilon", 0.05)? * PI;
    let half_width = cfg.positive_or("window", 500.0)?;
    let dx = cfg.positive_or("dx", 0.05)?;
    let ex = example1_build(&intervals, alpha, epsilon, half_width, dx)?;
    let r = &ex.report;
    let mut checks: Vec<Check> = r
        .intervals
        .iter()
        .map(|i| {
            Check::equals(
                format!("sign changes on [{}, {}]", i.interval.0, i.interval.1),
                i.sign_changes as f64,
                0.0,
            )
        })
        .collect();
    checks.push(Check::below("in-gap spectral energy ratio", r.gap_energy_ratio, 1e-2));
    art.csv("signal.csv", |w| write_signal(w, &ex.f))?;
    let last = intervals.last().map(|i| i.1 as f64 + 5.0).unwrap_or(half_width);
    let pts: Vec<(f64, f64)> =
        ex.f.grid
            .points()
            .zip(&ex.f.values)
            .filter(|(x, _)| x.abs() <= last)
            .map(|(x, v)| (x, v.signum() * v.abs().ln_1p()))
            .collect();
    art.plot(
        "signal.svg",
        "sign(f)·ln(1+|f|)",
        &[Series { name: "f", points: pts }],
        &[0.0],
    )?;
    Ok(Outcome {
        results: serde_json::to_value(r).context("serializing report")?,
        checks,
        artifacts: Vec::new(),
    })
}

fn example2(cfg: &ExperimentConfig, art: &mut Artifacts<'_>) -> Run<Outcome> {
    let k = cfg.positive_or("k", 0.1)?;
    let r_max = cfg.positive_or("window", 5120.0)?;
    let ex = example2_build(k, &default_schedule(r_max), r_max)?;
    let r = &ex.report;
    let checks = vec![
        Check::at_most("zero density relative error vs m + eta", r.zero_density_rel_error, 0.10),
        Check::at_most(
            "sign-change density vs 1 - zero density + 0.05",
            r.sign_change_density,
            r.sign_change_bound,
        ),
        Check::below("sign-change density vs 1 - m", r.sign_change_density, r.one_minus_m),
    ];
    art.csv("zeros.csv", |w| write_zero_set(w, &ex.zeros))?;
    art.csv("signal.csv", |w| write_signal(w, &ex.f))?;
    let mut count = 0usize;
    let pts: Vec<(f64, f64)> = (1..=r_max as i64)
        .map(|n| {
            if ex.zeros.contains(n) {
                count += 1;
            }
            (n as f64, count as f64 / n as f64)
        })
        .collect();
    art.plot(
        "zero_density.svg",
        "n(r)/r",
        &[Series {
            name: "n(r)/r",
            points: pts,
        }],
        &[r.m_plus_eta, r.constants.m],
    )?;
    Ok(Outcome {
        results: serde_json::to_value(r).context("serializing report")?,
        checks,
        artifacts: Vec::new(),
    })
}
