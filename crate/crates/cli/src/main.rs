use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mtdc_core::analysis::{delay_margin, gain_sensitivity, sweep_eigen, CommMask, LoopOptions, SweepAxis};
use mtdc_core::grid::CompositePlant;
use mtdc_core::sim::io::{fmt_num, write_eigenlocus, write_state_space, write_table, write_timeseries};
use mtdc_core::sim::{
    build_case_labelled, run_cases, run_weighting_study, simulate_with, table, write_weighting_csv, Case,
    CaseControllers, DesignOptions, DisturbanceSource, FilterKind, Metrics, Scenario,
};
use mtdc_core::synthesis::SynthesisReport;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "mtdc", version, about = "Secondary frequency control of MTDC-linked AC grids")]
struct Cli {
    /// Scenario file (JSON, schema 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Overrides the disturbance and uncertainty seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and comparisons.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the composite plant matrices and its channel registry.
    BuildModel,
    /// Synthesize the controllers of the scenario's case.
    Synthesize,
    /// Synthesize and reduce by balanced truncation.
    Reduce,
    /// Eigenvalue sweep, delay margin, communication conditions and gain
    /// sensitivity.
    Analyze(AnalyzeArgs),
    /// Simulate the scenario's case.
    Simulate,
    /// Run Cases 1-3 on the same scenario.
    Compare(CompareArgs),
    /// Compare the cases and print a summary with relative reductions.
    Report,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Axis {
    Lf,
    Uncertainty,
    Delay,
}

#[derive(clap::Args, Debug)]
struct AnalyzeArgs {
    #[arg(long, value_enum, default_value = "lf")]
    sweep: Axis,
    /// First swept value (mH, fraction or seconds).
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long, default_value_t = 30)]
    points: usize,
    /// Upper end of the delay-margin search (s).
    #[arg(long, default_value_t = 0.6)]
    margin_max: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Filter {
    LowPass,
    BandPass,
}

#[derive(clap::Args, Debug)]
struct CompareArgs {
    /// Run the weighting-function study instead of a single comparison.
    #[arg(long, value_enum)]
    weighting: Option<Filter>,
    /// Cutoffs or bandwidths (rad/s) for the weighting study.
    #[arg(long, value_delimiter = ',', default_values_t = [1e2, 1e3, 1e4, 1e5])]
    values: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<mtdc_core::Error>()) {
        Some(err) if err.is_validation() => EXIT_VALIDATION,
        Some(_) => EXIT_NUMERICAL,
        None => EXIT_VALIDATION,
    }
}

fn set_threads(n: Option<usize>) -> Result<()> {
    let Some(n) = n else { return Ok(()) };
    if n == 0 {
        anyhow::bail!(mtdc_core::Error::Validation { field: "threads".into(), reason: "must be positive".into() });
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    #[cfg(not(feature = "parallel"))]
    log::warn!("built without the `parallel` feature, ignoring --threads {n}");
    Ok(())
}

fn load_scenario(cli: &Cli) -> Result<Scenario> {
    let path = cli.config.as_deref().ok_or_else(|| mtdc_core::Error::Validation {
        field: "--config".into(),
        reason: "a scenario file is required".into(),
    })?;
    let mut s = Scenario::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(seed) = cli.seed {
        s.uncertainty.seed = seed;
        if let DisturbanceSource::RegdLike(r) = &mut s.disturbance {
            r.seed = seed;
        }
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<()> {
    set_threads(cli.threads)?;
    let scenario = load_scenario(cli)?;
    let out = &cli.out;
    std::fs::create_dir_all(out).map_err(|source| mtdc_core::Error::Io { path: out.display().to_string(), source })?;
    let plant = CompositePlant::build(&scenario.system_params()?)?;
    match &cli.command {
        Command::BuildModel => build_model(&plant, out),
        Command::Synthesize => {
            let mut s = scenario.clone();
            s.reduction_threshold = None;
            let ctrl = build_case_labelled(&plant, s.case, &DesignOptions::from(&s))?;
            write_controllers(out, &ctrl)?;
            write_reports(&out.join("synthesis_report.csv"), &ctrl.reports)?;
            println!("{}: {} controller(s), orders {:?}", ctrl.case.label(), ctrl.controllers.len(), orders(&ctrl));
            Ok(())
        }
        Command::Reduce => {
            let ctrl = build_case_labelled(&plant, scenario.case, &DesignOptions::from(&scenario))?;
            write_controllers(out, &ctrl)?;
            write_reports(&out.join("synthesis_report.csv"), &ctrl.reports)?;
            write_reductions(out, &ctrl)?;
            println!("{}: full {:?}, reduced {:?}", ctrl.case.label(), full_orders(&ctrl), orders(&ctrl));
            Ok(())
        }
        Command::Analyze(a) => analyze(&scenario, &plant, a, out),
        Command::Simulate => {
            let ctrl = build_case_labelled(&plant, scenario.case, &DesignOptions::from(&scenario))?;
            let res = simulate_with(&scenario, &plant, &ctrl)?;
            write_timeseries(&out.join("timeseries.csv"), &res)?;
            write_metrics(&out.join("metrics.csv"), &[(ctrl.case, &res.metrics)])?;
            if res.unstable() {
                log::warn!("closed loop is unstable, max real part {:.3e}", res.max_real);
            }
            println!("{}: sum |df|max {} Hz, sum df rms {} Hz", ctrl.case.label(), fmt_num(res.metrics.sum_f_max), fmt_num(res.metrics.sum_f_rms));
            Ok(())
        }
        Command::Compare(c) => match c.weighting {
            Some(f) => {
                let kind = match f {
                    Filter::LowPass => FilterKind::LowPass,
                    Filter::BandPass => FilterKind::BandPass,
                };
                let pts = run_weighting_study(&scenario, kind, &c.values)?;
                write_weighting_csv(&out.join("weighting.csv"), &pts)?;
                let ok = pts.iter().filter(|p| p.succeeded()).count();
                println!("weighting study: {ok}/{} points synthesized", pts.len());
                Ok(())
            }
            None => {
                let runs = run_cases(&scenario, &plant, &Case::compared())?;
                table(&runs).write_csv(&out.join("metrics.csv"))?;
                for (ctrl, res) in &runs {
                    println!("{}: sum |df|max {} Hz, sum df rms {} Hz", ctrl.case.label(), fmt_num(res.metrics.sum_f_max), fmt_num(res.metrics.sum_f_rms));
                }
                Ok(())
            }
        },
        Command::Report => report(&scenario, &plant, out),
    }
}

fn orders(c: &CaseControllers) -> Vec<usize> {
    c.controllers.iter().map(|k| k.order()).collect()
}

fn full_orders(c: &CaseControllers) -> Vec<usize> {
    c.full.iter().map(|k| k.order()).collect()
}

fn strings<const N: usize>(v: [&str; N]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn build_model(plant: &CompositePlant, out: &Path) -> Result<()> {
    write_state_space(&out.join("model.csv"), &plant.ss)?;
    let ss = &plant.ss;
    let mut rows = Vec::new();
    for (kind, names) in [("input", &ss.inputs), ("state", &ss.states), ("output", &ss.outputs)] {
        for (i, n) in names.iter().enumerate() {
            rows.push(vec![kind.to_string(), i.to_string(), n.clone()]);
        }
    }
    write_table(&out.join("registry.csv"), &strings(["kind", "index", "name"]), &rows)?;
    println!("plant: {} states, {} inputs, {} outputs", ss.n_states(), ss.n_inputs(), ss.n_outputs());
    Ok(())
}

fn write_controllers(out: &Path, ctrl: &CaseControllers) -> Result<()> {
    for (i, c) in ctrl.controllers.iter().enumerate() {
        write_state_space(&out.join(format!("controller_k{}.csv", i + 1)), &c.ss)?;
    }
    Ok(())
}

/// One row per γ step, tagged with the design it belongs to.
fn write_reports(path: &Path, reports: &[SynthesisReport]) -> Result<()> {
    let header = strings([
        "design", "step", "gamma", "x_ok", "y_ok", "rho_ok", "rho", "final_gamma", "gamma_lower", "x_residual",
        "y_residual", "closed_loop_norm", "order",
    ]);
    let mut rows = Vec::new();
    for (d, r) in reports.iter().enumerate() {
        for (i, s) in r.steps.iter().enumerate() {
            rows.push(vec![
                (d + 1).to_string(),
                (i + 1).to_string(),
                fmt_num(s.gamma),
                s.x_ok.to_string(),
                s.y_ok.to_string(),
                s.rho_ok.to_string(),
                fmt_num(s.rho),
                fmt_num(r.gamma),
                fmt_num(r.gamma_lower),
                fmt_num(r.x_residual),
                fmt_num(r.y_residual),
                fmt_num(r.closed_loop_norm),
                r.order.to_string(),
            ]);
        }
    }
    write_table(path, &header, &rows)?;
    Ok(())
}

fn write_reductions(out: &Path, ctrl: &CaseControllers) -> Result<()> {
    let mut hsv_rows = Vec::new();
    let mut rows = Vec::new();
    for (i, r) in ctrl.reductions.iter().enumerate() {
        for (j, (h, e)) in r.hsv.iter().zip(&r.energy).enumerate() {
            hsv_rows.push(vec![(i + 1).to_string(), (j + 1).to_string(), fmt_num(*h), fmt_num(*e)]);
        }
        rows.push(vec![
            (i + 1).to_string(),
            r.full_order.to_string(),
            r.energy_order.to_string(),
            r.order.to_string(),
            fmt_num(r.bound),
            fmt_num(r.error),
            r.bound_holds().to_string(),
        ]);
    }
    write_table(&out.join("hsv.csv"), &strings(["controller", "index", "hsv", "cumulative_energy"]), &hsv_rows)?;
    let header = strings(["controller", "full_order", "energy_order", "order", "bound", "error", "bound_holds"]);
    write_table(&out.join("reduction.csv"), &header, &rows)?;
    Ok(())
}

fn write_metrics(path: &Path, rows: &[(Case, &Metrics)]) -> Result<()> {
    let n = rows.first().map_or(0, |r| r.1.f_max.len());
    let mut header = strings(["case", "sum_f_max_hz", "sum_f_rms_hz", "vdc_max_pu", "vdc_rms_pu"]);
    header.extend((1..=n).map(|k| format!("f{k}_max_hz")));
    header.extend((1..=n).map(|k| format!("f{k}_rms_hz")));
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(c, m)| {
            let mut v = vec![c.label().to_string(), fmt_num(m.sum_f_max), fmt_num(m.sum_f_rms), fmt_num(m.vdc_max), fmt_num(m.vdc_rms)];
            v.extend(m.f_max.iter().chain(&m.f_rms).map(|x| fmt_num(*x)));
            v
        })
        .collect();
    write_table(path, &header, &body)?;
    Ok(())
}

fn analyze(scenario: &Scenario, plant: &CompositePlant, a: &AnalyzeArgs, out: &Path) -> Result<()> {
    let ctrl = build_case_labelled(plant, scenario.case, &DesignOptions::from(scenario))?;
    let cs = &ctrl.controllers;
    let (axis, lo, hi) = match a.sweep {
        Axis::Lf => (SweepAxis::FilterInductance, 0.03, 1.5),
        Axis::Uncertainty => (
            SweepAxis::Uncertainty { seed: scenario.uncertainty.seed, groups: scenario.uncertainty.groups.clone() },
            0.0,
            0.5,
        ),
        Axis::Delay => (SweepAxis::Delay, 0.0, 0.6),
    };
    let (lo, hi) = (a.from.unwrap_or(lo), a.to.unwrap_or(hi));
    if a.points < 2 || !(hi > lo) {
        anyhow::bail!(mtdc_core::Error::Validation {
            field: "sweep".into(),
            reason: "need at least two points and to > from".into()
        });
    }
    let values: Vec<f64> = (0..a.points).map(|i| lo + (hi - lo) * i as f64 / (a.points - 1) as f64).collect();
    let opts = LoopOptions { delay: None, mask: scenario.comm_mask.clone() };
    let locus = sweep_eigen(plant, cs, &opts, &axis, &values)?;
    write_eigenlocus(&out.join("eigenlocus.csv"), &locus.values, &locus.spectra)?;
    match locus.first_unstable {
        Some(v) => println!("{} sweep: first unstable at {}", locus.parameter, fmt_num(v)),
        None => println!("{} sweep: stable over [{}, {}]", locus.parameter, fmt_num(lo), fmt_num(hi)),
    }

    let mut rows = Vec::new();
    for (name, mask) in CommMask::conditions(plant.n_grids()) {
        let cl = mtdc_core::analysis::close_loop(plant, cs, None, &mask)?;
        let re = cl.spectrum()?.max_real();
        let m = if cs.is_empty() { None } else { Some(delay_margin(plant, cs, &mask, a.margin_max, 1e-3)?) };
        let t = m.and_then(|m| m.t_crit).map(fmt_num).unwrap_or_default();
        rows.push(vec![name, fmt_num(re), t]);
    }
    write_table(&out.join("comm_conditions.csv"), &strings(["condition", "max_real", "delay_margin_s"]), &rows)?;
    if let Some(intact) = rows.first() {
        let t = if intact[2].is_empty() { format!("none up to {} s", fmt_num(a.margin_max)) } else { format!("{} s", intact[2]) };
        println!("delay margin: {t}");
    }

    let mut rows = Vec::new();
    for (i, c) in cs.iter().enumerate() {
        for r in gain_sensitivity(c) {
            rows.push(vec![
                (i + 1).to_string(),
                r.channel,
                r.grid.map(|g| (g + 1).to_string()).unwrap_or_default(),
                r.remote.to_string(),
                fmt_num(r.b_norm),
                fmt_num(r.d_norm),
            ]);
        }
    }
    let header = strings(["controller", "channel", "grid", "remote", "b_norm", "d_norm"]);
    write_table(&out.join("sensitivity.csv"), &header, &rows)?;
    Ok(())
}

fn report(scenario: &Scenario, plant: &CompositePlant, out: &Path) -> Result<()> {
    let runs = run_cases(scenario, plant, &Case::compared())?;
    let t = table(&runs);
    t.write_csv(&out.join("metrics.csv"))?;
    let mut text = String::new();
    text.push_str("case        sum|df|max(Hz)  sum df_rms(Hz)  |dVdc|max(pu)  dVdc_rms(pu)  orders\n");
    for r in &t.rows {
        let m = &r.metrics;
        let ord: Vec<String> = r.orders.iter().map(|o| o.to_string()).collect();
        text.push_str(&format!(
            "{:<11} {:>14} {:>15} {:>14} {:>13}  {}{}\n",
            r.case.label(),
            fmt_num(m.sum_f_max),
            fmt_num(m.sum_f_rms),
            fmt_num(m.vdc_max),
            fmt_num(m.vdc_rms),
            ord.join("/"),
            if r.unstable { "  UNSTABLE" } else { "" }
        ));
    }
    for other in [Case::Case2, Case::Case3] {
        let pct = |f: fn(&Metrics) -> f64| t.reduction(Case::Case1, other, f).map(|v| format!("{v:.1}%")).unwrap_or_default();
        text.push_str(&format!(
            "case1 vs {}: sum|df|max {}, sum df_rms {}, |dVdc|max {}, dVdc_rms {}\n",
            other.label(),
            pct(|m| m.sum_f_max),
            pct(|m| m.sum_f_rms),
            pct(|m| m.vdc_max),
            pct(|m| m.vdc_rms)
        ));
    }
    std::fs::write(out.join("report.txt"), &text)
        .map_err(|source| mtdc_core::Error::Io { path: out.join("report.txt").display().to_string(), source })?;
    print!("{text}");
    Ok(())
}
