//! Command-line front end for the `lossdisc` library: point evaluation of
//! the discrimination bounds, figure-grid sweeps to CSV/JSON, the
//! biophysical detection models, and the Fock-oracle validation suite.
//!
//! Exit codes: 0 success, 1 domain or tolerance failure, 2 usage error.

mod figures;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{ArgGroup, Args, Parser, Subcommand};
use lossdisc::biophoto::{
    beer_lambert, concentration_degraded, concentration_growth, error_vs_time, memory_readout,
    memory_transmissivity, GrowthParams, SaturationParams,
};
use lossdisc::bounds::{HoeffdingClass, HoeffdingResult};
use lossdisc::transmitters::{
    coherent_qhb, comparison_point, epr_qcb_broadband, epr_qhb_with_cap, qhb_ratio_with_cap,
    QhbRatio,
};
use serde_json::{json, Value};

use figures::{FigureId, Format, Overrides};

/// Writes raw bytes to stdout, exiting successfully when the reader has
/// already closed the pipe (e.g. `lossdisc figure ... | head`): truncated
/// consumption is normal line-tool usage, not an error.
pub(crate) fn emit_bytes(bytes: &[u8]) -> std::io::Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(bytes).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        other => other,
    }
}

/// [`emit_bytes`] for one newline-terminated text line.
pub(crate) fn emit_line(text: &str) -> std::io::Result<()> {
    emit_bytes(text.as_bytes())?;
    emit_bytes(b"\n")
}

#[derive(Parser)]
#[command(
    name = "lossdisc",
    version,
    about = "Quantum discrimination bounds for bosonic loss channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the bound set at one (energy, transmissivity, copies) point
    Bounds(BoundsArgs),
    /// Sweep a figure's parameter grid and emit CSV or JSON
    Figure(FigureArgs),
    /// Bacterial-growth detection errors at one observation time
    Growth(GrowthArgs),
    /// Optical-memory readout information at one read energy
    Memory(MemoryArgs),
    /// Cross-check the Gaussian closed forms against the Fock-space oracle
    Validate(ValidateArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("energy").required(true).args(["nbar", "total_nbar"])))]
struct BoundsArgs {
    /// Mean signal photons per copy
    #[arg(long)]
    nbar: Option<f64>,
    /// Total signal energy, split evenly across copies
    #[arg(long)]
    total_nbar: Option<f64>,
    /// Channel transmissivity under the loss hypothesis
    #[arg(long)]
    tau: f64,
    /// Number of identical probe copies
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    copies: u32,
    /// False-positive exponent constraint; adds the Hoeffding bounds
    #[arg(long)]
    r: Option<f64>,
    /// Supremum cap above which a Hoeffding scan is classified divergent
    #[arg(long)]
    divergence_cap: Option<f64>,
}

#[derive(Args)]
struct FigureArgs {
    /// Which figure's grid to evaluate
    #[arg(long, value_enum)]
    figure_id: FigureId,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Override the figure's default total energy
    #[arg(long)]
    total_nbar: Option<f64>,
    /// Fixed false-positive exponent constraint (qhb-ratio; default r_coh)
    #[arg(long)]
    r: Option<f64>,
    /// Initial concentration scale of the growth model
    #[arg(long)]
    c0: Option<f64>,
    /// Growth rate
    #[arg(long)]
    g: Option<f64>,
    /// Degradability per photon per unit time
    #[arg(long)]
    gamma: Option<f64>,
    /// Memory absorbance at zero read energy
    #[arg(long)]
    theta1: Option<f64>,
    /// Memory bleaching rate per photon
    #[arg(long)]
    theta2: Option<f64>,
    /// Supremum cap above which a Hoeffding scan is classified divergent
    #[arg(long)]
    divergence_cap: Option<f64>,
}

#[derive(Args)]
struct GrowthArgs {
    /// Observation time
    #[arg(long)]
    t: f64,
    /// Total signal energy
    #[arg(long, default_value_t = 500.0)]
    total_nbar: f64,
    /// Initial concentration scale
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
    /// Growth rate
    #[arg(long, default_value_t = 0.2)]
    g: f64,
    /// Degradability per photon per unit time
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Include illumination damage in the concentration dynamics
    #[arg(long)]
    degraded: bool,
}

#[derive(Args)]
struct MemoryArgs {
    /// Read energy per memory cell
    #[arg(long)]
    total_nbar: f64,
    /// Absorbance at zero read energy
    #[arg(long, default_value_t = 5e-3)]
    theta1: f64,
    /// Bleaching rate per photon
    #[arg(long, default_value_t = 1e-4)]
    theta2: f64,
}

#[derive(Args)]
struct ValidateArgs {
    /// Fock-space photon-number cutoff per mode
    #[arg(long, default_value_t = 40)]
    cutoff: usize,
    /// Restrict the energy grid to one value (default {0.5, 1, 2})
    #[arg(long)]
    nbar: Option<f64>,
    /// Restrict the transmissivity grid to one value (default {0.25, 0.5, 0.9})
    #[arg(long)]
    tau: Option<f64>,
    /// Number of interior s points, s_k = k/(n+1)
    #[arg(long, default_value_t = 9)]
    s_grid: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Bounds(a) => {
            run_bounds(a)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure(a) => {
            let overrides = Overrides {
                total_nbar: a.total_nbar,
                r: a.r,
                c0: a.c0,
                g: a.g,
                gamma: a.gamma,
                theta1: a.theta1,
                theta2: a.theta2,
                divergence_cap: a.divergence_cap,
            };
            let table = figures::build(a.figure_id, &overrides)?;
            figures::write_table(&table, a.format, a.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Growth(a) => {
            run_growth(a)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Memory(a) => {
            run_memory(a)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(a) => validate::run(a.cutoff, a.nbar, a.tau, a.s_grid),
    }
}

fn run_bounds(a: BoundsArgs) -> Result<()> {
    let m = a.copies;
    let (nbar, total) = match (a.nbar, a.total_nbar) {
        (Some(n), None) => (n, n * m as f64),
        (None, Some(t)) => (t / m as f64, t),
        _ => unreachable!("clap group enforces exactly one energy flag"),
    };
    let point = comparison_point(nbar, a.tau, m, None)?;
    let mut doc = json!({
        "nbar": point.nbar,
        "tau": point.tau,
        "m_copies": point.m_copies,
        "total_nbar": total,
        "p_coh": point.p_coh,
        "p_quant_qcb": point.p_quant_qcb,
        "p_quant_broadband": epr_qcb_broadband(total, a.tau)?,
        "delta": point.delta,
        "rate_ratio": point.rate_ratio,
        "r_coh": point.r_coh,
        "r_quant": point.r_quant,
    });
    if let Some(r) = a.r {
        let cap = figures::cap_with(a.divergence_cap);
        let h_coh = coherent_qhb(nbar, a.tau, r)?;
        let h_quant = epr_qhb_with_cap(nbar, a.tau, r, cap)?;
        let ratio = qhb_ratio_with_cap(nbar, a.tau, r, cap)?;
        doc["r"] = json!(r);
        doc["h_coh"] = hoeffding_value(&h_coh);
        doc["h_coh_class"] = json!(class_name(h_coh.classification));
        doc["h_quant"] = hoeffding_value(&h_quant);
        doc["h_quant_class"] = json!(class_name(h_quant.classification));
        doc["qhb_ratio"] = ratio_value(&ratio);
    }
    emit_line(&serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

/// Finite Hoeffding values serialize as numbers, divergent ones as the
/// string "inf" (JSON has no infinity literal).
fn hoeffding_value(h: &HoeffdingResult) -> Value {
    match h.classification {
        HoeffdingClass::Infinite => json!("inf"),
        _ => json!(h.h_value),
    }
}

fn class_name(c: HoeffdingClass) -> &'static str {
    match c {
        HoeffdingClass::Finite => "finite",
        HoeffdingClass::Infinite => "infinite",
        HoeffdingClass::Boundary => "boundary",
    }
}

fn ratio_value(r: &QhbRatio) -> Value {
    match r {
        QhbRatio::Finite(v) => json!(v),
        QhbRatio::Infinite => json!("inf"),
        QhbRatio::Indeterminate => json!("indeterminate"),
    }
}

fn run_growth(a: GrowthArgs) -> Result<()> {
    let gp = GrowthParams::new(a.c0, a.g, a.gamma)?;
    let total = a.total_nbar;
    let conc = if a.degraded {
        concentration_degraded(a.t, total, &gp)?
    } else {
        concentration_growth(a.t, &gp)?
    };
    let grid = [a.t];
    let p_coh = error_vs_time(
        &grid,
        total,
        &figures::coherent_config(total)?,
        &gp,
        a.degraded,
    )?;
    let p_m1 = error_vs_time(
        &grid,
        total,
        &figures::epr_single_config(total)?,
        &gp,
        a.degraded,
    )?;
    let p_bb = error_vs_time(
        &grid,
        total,
        &figures::broadband_config(total)?,
        &gp,
        a.degraded,
    )?;
    let doc = json!({
        "t": a.t,
        "total_nbar": total,
        "degraded": a.degraded,
        "concentration": conc,
        "tau": beer_lambert(conc, gp.epsilon_l)?,
        "p_coh": p_coh[0].1,
        "p_epr_m1": p_m1[0].1,
        "p_epr_broadband": p_bb[0].1,
    });
    emit_line(&serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn run_memory(a: MemoryArgs) -> Result<()> {
    let sp = SaturationParams::new(a.theta1, a.theta2)?;
    let total = a.total_nbar;
    let doc = json!({
        "total_nbar": total,
        "theta1": a.theta1,
        "theta2": a.theta2,
        "tau": memory_transmissivity(total, &sp)?,
        "i_coh": memory_readout(total, &sp, &figures::coherent_config(total)?)?,
        "i_epr_m1": memory_readout(total, &sp, &figures::epr_single_config(total)?)?,
        "i_epr_broadband": memory_readout(total, &sp, &figures::broadband_config(total)?)?,
    });
    emit_line(&serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}
