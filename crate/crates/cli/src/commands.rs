//! One function per subcommand; each returns the tables to write.

use dasim::evolve::{EvolutionSpec, ExactOptions};
use dasim::experiments::{error_sweep, linear_grid, windowed_scaling_index};
use dasim::gamma::{eigenframe_sequence, gamma_product, transition_matrices};
use dasim::metrics::{adiabatic_bound, TripletEvaluator};
use dasim::rllemma::{rl_bounds, OscillatorySumSpec, Profile};
use dasim::zeno::{locate_critical_step, near_degeneracy_test, step_sweep, FamilyKind, OperatorFamily, ZenoTrace};
use dasim::Error;
use num_complex::Complex;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{num, Table};
use crate::svg::Axes;
use crate::CliError;

/// A table plus how to plot it.
pub struct Output {
    pub table: Table,
    pub plot: Option<Plot>,
}

pub struct Plot {
    pub title: &'static str,
    pub x: &'static str,
    pub ys: Vec<&'static str>,
    pub axes: Axes,
}

fn plain(table: Table) -> Output {
    Output { table, plot: None }
}

fn exact_options(config: &RunConfig) -> ExactOptions {
    ExactOptions::with_tol(config.exact_tol)
}

pub fn fig1(config: &RunConfig) -> Result<Vec<Output>, CliError> {
    let template = config.template(config.sweep.steps)?;
    let evaluator = TripletEvaluator::new(template, true, exact_options(config))?;
    let rows = config
        .sweep_times()?
        .par_iter()
        .map(|&t| Ok((evaluator.at(t)?, evaluator.discrete_trotter_error(t)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut table = Table::new("fig1", vec!["T", "dt", "norm_dist", "eps_tro", "eps_tro_discrete"]);
    for (r, discrete) in rows {
        table.push(vec![num(r.total_time), num(r.dt), num(r.norm_dist.unwrap_or(f64::NAN)), num(r.eps_tro), num(discrete)]);
    }
    let plot = Plot {
        title: "Norm distance and fidelity error",
        x: "T",
        ys: vec!["norm_dist", "eps_tro"],
        axes: Axes { log_x: true, log_y: true },
    };
    Ok(vec![Output { table, plot: Some(plot) }])
}

pub fn fig2(config: &RunConfig) -> Result<Vec<Output>, CliError> {
    let template = config.template(config.sweep.steps)?;
    let times = config.sweep_times()?;
    let rows = error_sweep(&template, &times, false, exact_options(config))?;
    let mut table = Table::new("fig2", vec!["T", "dt", "eps_adb", "eps_tro", "eps_tot"]);
    let lo = times.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = config.sweep.steps as f64 * config.sweep.robust_t_c;
    table.notes.push(match windowed_scaling_index(&rows, lo, hi) {
        Ok(index) => format!("scaling_index over T in [{lo}, {hi}]: {index}"),
        Err(e) => format!("scaling_index over T in [{lo}, {hi}]: unavailable ({e})"),
    });
    for r in &rows {
        table.push(vec![num(r.total_time), num(r.dt), num(r.eps_adb), num(r.eps_tro), num(r.eps_tot)]);
    }
    let plot = Plot {
        title: "Error scaling",
        x: "T",
        ys: vec!["eps_adb", "eps_tro", "eps_tot"],
        axes: Axes { log_x: true, log_y: true },
    };
    Ok(vec![Output { table, plot: Some(plot) }])
}

fn trace_table(name: String, trace: &ZenoTrace<f64>) -> Table {
    let mut table = Table::new(name, vec!["step", "s", "overlap", "gap"]);
    table.notes.push(format!("pass: {}, min_overlap: {}, argmin: {}", trace.pass, trace.min_overlap, trace.argmin));
    let steps = trace.overlaps.len();
    for (k, (o, g)) in trace.overlaps.iter().zip(&trace.gaps).enumerate() {
        table.push(vec![(k + 1).to_string(), num((k + 1) as f64 / steps as f64), num(*o), num(*g)]);
    }
    table
}

pub fn fig3(config: &RunConfig) -> Result<Vec<Output>, CliError> {
    let z = &config.zeno;
    let template = config.template(config.sweep.steps)?;
    let grid = linear_grid(z.dt_min, z.dt_max, z.dt_step)?;
    let traces = step_sweep(&template, &grid, z.threshold, z.steps)?;
    let results: Vec<(f64, bool, f64)> = grid.iter().zip(&traces).map(|(&dt, t)| (dt, t.pass, t.min_overlap)).collect();

    let mut table = Table::new("fig3", vec!["dt", "pass", "min_overlap"]);
    table.notes.push(match locate_critical_step(results.clone()) {
        Ok(c) => format!("t_c: {}, first_failure: {}, monotone: {}", c.t_c, c.first_failure, c.monotone),
        Err(e) => format!("t_c: undefined ({e})"),
    });
    for (dt, pass, min) in results {
        table.push(vec![num(dt), u8::from(pass).to_string(), num(min)]);
    }
    let plot = Plot {
        title: "Near-degeneracy test",
        x: "dt",
        ys: vec!["min_overlap"],
        axes: Axes { log_x: false, log_y: false },
    };
    let mut out = vec![Output { table, plot: Some(plot) }];
    let extra = z
        .trace_dts
        .par_iter()
        .map(|&dt| near_degeneracy_test(&OperatorFamily::trotter(&template, dt)?, z.steps, z.threshold))
        .collect::<Result<Vec<_>, Error>>()?;
    for (dt, trace) in z.trace_dts.iter().zip(&extra) {
        let plot = Plot { title: "Overlap trace", x: "s", ys: vec!["overlap"], axes: Axes { log_x: false, log_y: false } };
        out.push(Output { table: trace_table(format!("fig3_trace_dt{dt:.2}"), trace), plot: Some(plot) });
    }
    Ok(out)
}

pub fn zeno(config: &RunConfig) -> Result<Vec<Output>, CliError> {
    let z = &config.zeno;
    let template = config.template(config.sweep.steps)?;
    let family = match z.family {
        FamilyKind::HermitianPath => OperatorFamily::Hermitian(template.path.clone()),
        FamilyKind::TrotterUnitary => OperatorFamily::trotter(&template, z.dt)?,
    };
    let trace = near_degeneracy_test(&family, z.steps, z.threshold)?;
    let plot = Plot { title: "Overlap trace", x: "s", ys: vec!["overlap"], axes: Axes { log_x: false, log_y: false } };
    Ok(vec![Output { table: trace_table("zeno".into(), &trace), plot: Some(plot) }])
}

fn polynomial<V>(coeffs: Vec<V>) -> impl Fn(f64) -> V + Send + Sync + 'static
where
    V: Copy + Send + Sync + 'static + std::ops::Mul<f64, Output = V> + std::ops::Add<Output = V>,
{
    move |s| {
        let (last, rest) = coeffs.split_last().expect("validated nonempty");
        rest.iter().rev().fold(*last, |acc, &c| acc * s + c)
    }
}

pub fn rl(config: &RunConfig) -> Result<Vec<Output>, CliError> {
    let c = &config.rl;
    let f_coeffs: Vec<Complex<f64>> = c.f.iter().map(|&[re, im]| Complex::new(re, im)).collect();
    let mut table = Table::new(
        "rl",
        vec![
            "T",
            "L",
            "dt",
            "re_j",
            "im_j",
            "abs_j",
            "abs_continuum_i",
            "boundary_bound",
            "variation_bound",
            "eta_boundary_bound",
            "a_eta_lambda",
            "first_order_bound",
            "second_order_bound",
            "max_lambda_dt",
            "threshold_ok",
        ],
    );
    let reports = c
        .total_times
        .par_iter()
        .map(|&t| {
            let spec = OscillatorySumSpec::new(
                Profile::analytic(polynomial(f_coeffs.clone())),
                Profile::analytic(polynomial(c.lambda.clone())),
                t,
                c.steps,
            )?;
            Ok((spec.dt(), rl_bounds(&spec)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    for (&t, (dt, r)) in c.total_times.iter().zip(reports) {
        table.push(vec![
            num(t),
            c.steps.to_string(),
            num(dt),
            num(r.j.re),
            num(r.j.im),
            num(r.abs_j),
            num(r.continuum_i.norm()),
            num(r.boundary_bound),
            num(r.variation_bound),
            num(r.eta_boundary_bound),
            num(r.a_eta_lambda),
            num(r.first_order_bound),
            num(r.second_order_bound),
            num(r.max_lambda_dt),
            u8::from(r.threshold_ok).to_string(),
        ]);
    }
    Ok(vec![plain(table)])
}

pub fn gamma(config: &RunConfig) -> Result<Vec<Output>, CliError> {
    let c = &config.gamma;
    let template = config.template(c.steps)?;
    let mut table = Table::new("gamma", vec!["T", "L", "dt", "eps_adb_exact", "eps_first_order"]);
    let rows = c
        .total_times
        .par_iter()
        .map(|&t| {
            let spec: EvolutionSpec<f64> = template.with_total_time(t)?;
            let frames = eigenframe_sequence(&spec)?;
            let g = gamma_product(&frames, &transition_matrices(&frames), t)?;
            let first = g.eps_l.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
            Ok(vec![num(t), c.steps.to_string(), num(spec.dt()), num(g.eps_adb_exact), num(first)])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    rows.into_iter().for_each(|r| table.push(r));
    Ok(vec![plain(table)])
}

pub fn bound(config: &RunConfig) -> Result<Vec<Output>, CliError> {
    let path = config.path()?;
    let mut table = Table::new("bound", vec!["T", "boundary_0", "boundary_1", "integral", "total"]);
    for &t in &config.bound.total_times {
        let b = adiabatic_bound(&path, t, config.bound.quad_points)?;
        table.push(vec![num(t), num(b.boundary_terms.0), num(b.boundary_terms.1), num(b.integral_term), num(b.total)]);
    }
    let plot = Plot { title: "Adiabatic bound", x: "T", ys: vec!["total"], axes: Axes { log_x: true, log_y: true } };
    Ok(vec![Output { table, plot: Some(plot) }])
}
