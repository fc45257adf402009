//! Figure-grid evaluation: each figure id names a deterministic parameter
//! sweep, evaluated row by row into a [`Table`] and serialized as CSV or
//! JSON. Row order is fixed (outer loop varies the first column), floats
//! are printed at 9 significant digits, and the first CSV line is a `#`
//! comment recording the exact parameter set and tool version, so reruns
//! with identical flags are byte-identical.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Result};
use clap::ValueEnum;
use lossdisc::biophoto::{
    beer_lambert, concentration_degraded, concentration_growth, error_vs_time, memory_readout,
    memory_transmissivity, GrowthParams, SaturationParams,
};
use lossdisc::bounds::DivergenceCap;
use lossdisc::transmitters::{
    epr_qcb, gain, optimal_gain, qhb_ratio_with_cap, r_coh_threshold, rate_ratio, Copies,
    EnergyConstraint, QhbRatio, TransmitterConfig, TransmitterKind,
};
use serde_json::{json, Value};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    /// Error-probability gain of the entangled transmitter, single copy
    #[value(name = "gain-m1")]
    GainM1,
    /// Gain at twenty copies per probe
    #[value(name = "gain-m20")]
    GainM20,
    /// Ratio of quantum to classical error exponents
    #[value(name = "rate-ratio")]
    RateRatio,
    /// Ratio of quantum to classical Hoeffding exponents
    #[value(name = "qhb-ratio")]
    QhbRatio,
    /// Chernoff bound vs copy count at fixed total energy
    #[value(name = "qcb-vs-copies")]
    QcbVsCopies,
    /// Broadband gain over total energy and transmissivity
    #[value(name = "optimal-gain")]
    OptimalGain,
    /// Growth-detection gain over observation time and energy
    #[value(name = "growth-gain")]
    GrowthGain,
    /// Error probabilities along a bacterial-growth curve
    #[value(name = "growth-time")]
    GrowthTime,
    /// Growth curve with illumination damage
    #[value(name = "degrade-time")]
    DegradeTime,
    /// Information per memory cell vs read energy
    #[value(name = "memory")]
    Memory,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flag-level overrides of a figure's default parameters. Each figure
/// consumes the subset relevant to its model and records exactly what it
/// used in the output header; the rest are ignored.
#[derive(Default)]
pub struct Overrides {
    pub total_nbar: Option<f64>,
    pub r: Option<f64>,
    pub c0: Option<f64>,
    pub g: Option<f64>,
    pub gamma: Option<f64>,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub divergence_cap: Option<f64>,
}

pub enum Cell {
    Num(f64),
    Int(u32),
    Text(&'static str),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.8e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => (*s).to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
        }
    }
}

pub struct Table {
    figure: &'static str,
    params: Vec<(&'static str, String)>,
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

pub fn build(id: FigureId, ov: &Overrides) -> Result<Table> {
    match id {
        FigureId::GainM1 => gain_table("gain-m1", 1),
        FigureId::GainM20 => gain_table("gain-m20", 20),
        FigureId::RateRatio => rate_ratio_table(),
        FigureId::QhbRatio => qhb_ratio_table(ov),
        FigureId::QcbVsCopies => qcb_vs_copies_table(ov),
        FigureId::OptimalGain => optimal_gain_table(),
        FigureId::GrowthGain => growth_gain_table(ov),
        FigureId::GrowthTime => growth_time_table(ov),
        FigureId::DegradeTime => degrade_time_table(ov),
        FigureId::Memory => memory_table(ov),
    }
}

pub fn write_table(t: &Table, format: Format, out: Option<&Path>) -> Result<()> {
    let bytes = match format {
        Format::Csv => to_csv(t)?,
        Format::Json => to_json(t)?,
    };
    match out {
        Some(path) => {
            fs::write(path, &bytes).map_err(|e| anyhow!("writing {}: {e}", path.display()))?
        }
        None => crate::emit_bytes(&bytes)?,
    }
    Ok(())
}

/// Divergence policy with an optional override of the supremum cap.
pub fn cap_with(sup_cap: Option<f64>) -> DivergenceCap {
    match sup_cap {
        Some(sup_cap) => DivergenceCap {
            sup_cap,
            ..DivergenceCap::default()
        },
        None => DivergenceCap::default(),
    }
}

pub fn coherent_config(total_nbar: f64) -> Result<TransmitterConfig> {
    Ok(TransmitterConfig::new(
        TransmitterKind::Coherent,
        total_nbar,
        Copies::Finite(1),
        EnergyConstraint::Global { total_nbar },
    )?)
}

pub fn epr_single_config(total_nbar: f64) -> Result<TransmitterConfig> {
    Ok(TransmitterConfig::new(
        TransmitterKind::Epr,
        total_nbar,
        Copies::Finite(1),
        EnergyConstraint::Global { total_nbar },
    )?)
}

pub fn broadband_config(total_nbar: f64) -> Result<TransmitterConfig> {
    Ok(TransmitterConfig::new(
        TransmitterKind::Epr,
        0.0,
        Copies::Broadband,
        EnergyConstraint::Global { total_nbar },
    )?)
}

fn tau_grid() -> Vec<f64> {
    (0..=99).map(|j| 0.01 * j as f64).collect()
}

fn nbar_grid() -> Vec<f64> {
    (1..=100).map(|i| 0.1 * i as f64).collect()
}

fn time_grid() -> Vec<f64> {
    (0..=200).map(|k| 0.005 * k as f64).collect()
}

fn log_grid(decades: usize, per_decade: usize) -> Vec<f64> {
    (0..=decades * per_decade)
        .map(|k| 10f64.powf(k as f64 / per_decade as f64))
        .collect()
}

fn gain_table(figure: &'static str, copies: u32) -> Result<Table> {
    let mut rows = Vec::new();
    for &nbar in &nbar_grid() {
        for &tau in &tau_grid() {
            rows.push(vec![
                Cell::Num(nbar),
                Cell::Num(tau),
                Cell::Num(gain(nbar, tau, copies)?),
            ]);
        }
    }
    Ok(Table {
        figure,
        params: vec![("copies", copies.to_string())],
        columns: &["nbar", "tau", "gain"],
        rows,
    })
}

fn rate_ratio_table() -> Result<Table> {
    let mut rows = Vec::new();
    for &nbar in &nbar_grid() {
        for &tau in &tau_grid() {
            rows.push(vec![
                Cell::Num(nbar),
                Cell::Num(tau),
                Cell::Num(rate_ratio(nbar, tau)?),
            ]);
        }
    }
    Ok(Table {
        figure: "rate-ratio",
        params: vec![],
        columns: &["nbar", "tau", "rate_ratio"],
        rows,
    })
}

/// Hoeffding-exponent ratio map. By default the constraint is set
/// pointwise to the classical threshold `r_coh(nbar, tau)`, the smallest
/// constraint the classical transmitter meets with a finite exponent;
/// `--r` fixes one global constraint instead.
fn qhb_ratio_table(ov: &Overrides) -> Result<Table> {
    let cap = cap_with(ov.divergence_cap);
    let r_label = match ov.r {
        Some(r) => r.to_string(),
        None => "r_coh".to_string(),
    };
    let mut rows = Vec::new();
    for &nbar in &nbar_grid() {
        for &tau in &tau_grid() {
            let r = match ov.r {
                Some(r) => r,
                None => r_coh_threshold(nbar, tau)?,
            };
            let cell = match qhb_ratio_with_cap(nbar, tau, r, cap)? {
                QhbRatio::Finite(v) => Cell::Num(v),
                QhbRatio::Infinite => Cell::Text("inf"),
                QhbRatio::Indeterminate => Cell::Text("indeterminate"),
            };
            rows.push(vec![Cell::Num(nbar), Cell::Num(tau), cell]);
        }
    }
    Ok(Table {
        figure: "qhb-ratio",
        params: vec![("r", r_label), ("divergence_cap", cap.sup_cap.to_string())],
        columns: &["nbar", "tau", "qhb_ratio"],
        rows,
    })
}

fn qcb_vs_copies_table(ov: &Overrides) -> Result<Table> {
    let total = ov.total_nbar.unwrap_or(1.0);
    let mut rows = Vec::new();
    for m in 1..=50u32 {
        for &tau in &tau_grid() {
            rows.push(vec![
                Cell::Int(m),
                Cell::Num(tau),
                Cell::Num(epr_qcb(total / m as f64, tau, m)?),
            ]);
        }
    }
    Ok(Table {
        figure: "qcb-vs-copies",
        params: vec![("total_nbar", total.to_string())],
        columns: &["m_copies", "tau", "p_qcb"],
        rows,
    })
}

fn optimal_gain_table() -> Result<Table> {
    let mut rows = Vec::new();
    for &total in &log_grid(4, 20) {
        for &tau in &tau_grid() {
            rows.push(vec![
                Cell::Num(total),
                Cell::Num(tau),
                Cell::Num(optimal_gain(total, tau)?),
            ]);
        }
    }
    Ok(Table {
        figure: "optimal-gain",
        params: vec![],
        columns: &["total_nbar", "tau", "gain_opt"],
        rows,
    })
}

fn growth_gain_table(ov: &Overrides) -> Result<Table> {
    let c0 = ov.c0.unwrap_or(1.0);
    let g = ov.g.unwrap_or(0.2);
    let gp = GrowthParams::new(c0, g, 0.0)?;
    let mut rows = Vec::new();
    for &t in &time_grid() {
        let tau = beer_lambert(concentration_growth(t, &gp)?, gp.epsilon_l)?;
        for i in 1..=100 {
            let total = 10.0 * i as f64;
            rows.push(vec![
                Cell::Num(t),
                Cell::Num(total),
                Cell::Num(gain(total, tau, 1)?),
                Cell::Num(optimal_gain(total, tau)?),
            ]);
        }
    }
    Ok(Table {
        figure: "growth-gain",
        params: vec![("c0", c0.to_string()), ("g", g.to_string())],
        columns: &["t", "total_nbar", "gain_m1", "gain_opt"],
        rows,
    })
}

fn growth_time_table(ov: &Overrides) -> Result<Table> {
    let c0 = ov.c0.unwrap_or(1.0);
    let g = ov.g.unwrap_or(0.2);
    let total = ov.total_nbar.unwrap_or(500.0);
    let params = vec![
        ("c0", c0.to_string()),
        ("g", g.to_string()),
        ("total_nbar", total.to_string()),
    ];
    growth_curve_table("growth-time", c0, g, 0.0, total, false, params)
}

fn degrade_time_table(ov: &Overrides) -> Result<Table> {
    let c0 = ov.c0.unwrap_or(1.0);
    let g = ov.g.unwrap_or(10.0);
    let gamma = ov.gamma.unwrap_or(1.0);
    let total = ov.total_nbar.unwrap_or(100.0);
    let params = vec![
        ("c0", c0.to_string()),
        ("g", g.to_string()),
        ("gamma", gamma.to_string()),
        ("total_nbar", total.to_string()),
    ];
    growth_curve_table("degrade-time", c0, g, gamma, total, true, params)
}

fn growth_curve_table(
    figure: &'static str,
    c0: f64,
    g: f64,
    gamma: f64,
    total: f64,
    degraded: bool,
    params: Vec<(&'static str, String)>,
) -> Result<Table> {
    let gp = GrowthParams::new(c0, g, gamma)?;
    let ts = time_grid();
    let coh = error_vs_time(&ts, total, &coherent_config(total)?, &gp, degraded)?;
    let m1 = error_vs_time(&ts, total, &epr_single_config(total)?, &gp, degraded)?;
    let bb = error_vs_time(&ts, total, &broadband_config(total)?, &gp, degraded)?;
    let mut rows = Vec::new();
    for i in 0..ts.len() {
        let t = ts[i];
        let conc = if degraded {
            concentration_degraded(t, total, &gp)?
        } else {
            concentration_growth(t, &gp)?
        };
        rows.push(vec![
            Cell::Num(t),
            Cell::Num(conc),
            Cell::Num(coh[i].1),
            Cell::Num(m1[i].1),
            Cell::Num(bb[i].1),
        ]);
    }
    Ok(Table {
        figure,
        params,
        columns: &["t", "concentration", "p_coh", "p_epr_m1", "p_epr_broadband"],
        rows,
    })
}

fn memory_table(ov: &Overrides) -> Result<Table> {
    let theta1 = ov.theta1.unwrap_or(5e-3);
    let theta2 = ov.theta2.unwrap_or(1e-4);
    let sp = SaturationParams::new(theta1, theta2)?;
    let mut rows = Vec::new();
    for &total in &log_grid(6, 25) {
        rows.push(vec![
            Cell::Num(total),
            Cell::Num(memory_transmissivity(total, &sp)?),
            Cell::Num(memory_readout(total, &sp, &coherent_config(total)?)?),
            Cell::Num(memory_readout(total, &sp, &epr_single_config(total)?)?),
            Cell::Num(memory_readout(total, &sp, &broadband_config(total)?)?),
        ]);
    }
    Ok(Table {
        figure: "memory",
        params: vec![
            ("theta1", theta1.to_string()),
            ("theta2", theta2.to_string()),
        ],
        columns: &["total_nbar", "tau", "i_coh", "i_epr_m1", "i_epr_broadband"],
        rows,
    })
}

fn header_line(t: &Table) -> String {
    let mut line = format!("# figure={}", t.figure);
    for (k, v) in &t.params {
        line.push_str(&format!(" {k}={v}"));
    }
    line.push_str(&format!(" version={}", env!("CARGO_PKG_VERSION")));
    line
}

fn to_csv(t: &Table) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(t.columns)?;
    for row in &t.rows {
        w.write_record(row.iter().map(|c| c.csv()))?;
    }
    let body = w.into_inner().map_err(|e| anyhow!("csv buffer: {e}"))?;
    let mut out = header_line(t).into_bytes();
    out.push(b'\n');
    out.extend_from_slice(&body);
    Ok(out)
}

fn to_json(t: &Table) -> Result<Vec<u8>> {
    let params: serde_json::Map<String, Value> = t
        .params
        .iter()
        .map(|(k, v)| ((*k).to_string(), json!(v)))
        .collect();
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
        .collect();
    let doc = json!({
        "figure": t.figure,
        "version": env!("CARGO_PKG_VERSION"),
        "params": params,
        "columns": t.columns,
        "rows": rows,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}
