use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use spincat_core::field1d::{tf_chi, tf_tcat};

use crate::config::{Engine, PulseSchedule, RunConfig};
use crate::record::{write_columns, RunRecord};
use crate::run::{central_traces, gamma2_period, prepare, run};
use crate::{ExpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7Mini,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7Mini,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7Mini => "fig7-mini",
        }
    }
}

impl FromStr for Figure {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| ExpError::Config(format!("unknown figure '{s}' (fig2..fig6, fig7-mini)")))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FigureOptions {
    pub n_atoms: usize,
    /// Include the `μ = 0.6` runs, which take minutes each.
    pub long: bool,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            n_atoms: 100,
            long: false,
        }
    }
}

#[derive(Debug, Default)]
pub struct FigureOutput {
    pub files: Vec<PathBuf>,
    pub records: Vec<RunRecord>,
}

impl FigureOutput {
    fn keep(&mut self, record: RunRecord, dir: &Path, stem: &str) -> Result<()> {
        let (csv, json) = record.persist(dir, stem)?;
        self.files.push(csv);
        self.files.push(json);
        self.records.push(record);
        Ok(())
    }

    pub fn all_ok(&self) -> bool {
        self.records.iter().all(RunRecord::is_ok)
    }
}

/// Step size for the long near-single-mode runs.
pub const LONG_RUN_DT: f64 = 1e-2;

fn tag(mu: f64) -> String {
    format!("{mu}").replace('.', "p")
}

/// Multimode configuration running to `span` times the cat time of the
/// initial twisting rate.
pub fn multimode_config(n_atoms: usize, mu: f64, lambda: f64, span: f64) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(Engine::Multimode, n_atoms, mu, 1.0);
    cfg.lambda = lambda;
    if mu < 1.0 {
        cfg.dt = Some(LONG_RUN_DT);
    }
    let chi0 = prepare(&cfg)?.chi0;
    cfg.t_final = span * PI / (2.0 * chi0);
    Ok(cfg)
}

pub fn figure(which: Figure, out: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    std::fs::create_dir_all(out)?;
    match which {
        Figure::Fig2 => fig2(out, opts),
        Figure::Fig3 => fig3(out, opts),
        Figure::Fig4 => fig4(out, opts),
        Figure::Fig5 => fig5(out, opts),
        Figure::Fig6 => fig6(out, opts),
        Figure::Fig7Mini => fig7_mini(opts.n_atoms, out).map(|(o, _)| o),
    }
}

fn fig2(out: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    let mut o = FigureOutput::default();
    for (engine, stem) in [(Engine::Dicke, "fig2_exact"), (Engine::Tw, "fig2_tw")] {
        let mut cfg = RunConfig::new(engine, opts.n_atoms, 1.0, PI);
        cfg.chi = Some(1.0);
        cfg.sample_count = 400;
        o.keep(run(&cfg), out, stem)?;
    }
    Ok(o)
}

fn fig3(out: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    let mut o = FigureOutput::default();
    let mut mus = vec![32.08, 200.0];
    if opts.long {
        mus.insert(0, 0.6);
    }
    for mu in mus {
        let cfg = multimode_config(opts.n_atoms, mu, 1.0, 1.5)?;
        let record = run(&cfg);
        let mut exact = RunConfig::new(Engine::Dicke, opts.n_atoms, mu, cfg.t_final);
        exact.chi = Some(record.diagnostics.chi0);
        exact.sample_count = 400;
        o.keep(record, out, &format!("fig3_mu{}", tag(mu)))?;
        o.keep(run(&exact), out, &format!("fig3_mu{}_single_mode", tag(mu)))?;
    }
    Ok(o)
}

fn fig4(out: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    let mut o = FigureOutput::default();
    let n = opts.n_atoms;
    for mu in [0.6, 32.08] {
        let cfg = RunConfig::new(Engine::Multimode, n, mu, 10.0);
        let prep = prepare(&cfg)?;
        let tr = central_traces(&prep, n, cfg.effective_dt(), 10.0, 1000)?;
        let tf = vec![tf_chi(mu, n, 1.0, 0.0); tr.tau.len()];
        let path = out.join(format!("fig4_mu{}.csv", tag(mu)));
        write_columns(
            &path,
            &[
                ("tau [1/omega]", tr.tau),
                ("chi [hbar omega]", tr.chi),
                ("chi_tf [hbar omega]", tf),
            ],
        )?;
        o.files.push(path);
    }
    Ok(o)
}

fn fig5(out: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    let mut o = FigureOutput::default();
    let mut mus = vec![10.29];
    if opts.long {
        mus.insert(0, 0.6);
    }
    for mu in mus {
        let sym = multimode_config(opts.n_atoms, mu, 1.0, 1.3)?;
        o.keep(run(&sym), out, &format!("fig5_mu{}_lambda1", tag(mu)))?;
        let mut asym = multimode_config(opts.n_atoms, mu, 0.5, 1.3)?;
        let tau_tf = tf_tcat(mu, opts.n_atoms, 0.5, 0.0)?;
        asym.t_final = asym.t_final.max(1.2 * tau_tf);
        asym.pulse = PulseSchedule::Optimize;
        o.keep(run(&asym), out, &format!("fig5_mu{}_lambda0p5", tag(mu)))?;
    }
    Ok(o)
}

fn fig6(out: &Path, opts: FigureOptions) -> Result<FigureOutput> {
    let mut o = FigureOutput::default();
    let mut cfg = RunConfig::new(Engine::Multimode, opts.n_atoms, 32.08, 8.0);
    cfg.sample_count = 400;
    o.keep(run(&cfg), out, "fig6_mu32p08")?;
    if opts.long {
        let cfg = multimode_config(opts.n_atoms, 0.6, 1.0, 1.3)?;
        o.keep(run(&cfg), out, "fig6_mu0p6")?;
    }
    Ok(o)
}

/// One point of the reduced speed-limit sweep.
#[derive(Debug, Clone, Serialize)]
pub struct Fig7Point {
    /// Target ratio `τ_cat^TF / T`.
    pub multiple: f64,
    pub mu: f64,
    pub mu_over_n: f64,
    pub gamma2_period: f64,
    pub tau_cat_tf: f64,
    pub f_peak: Option<f64>,
    pub f_peak_over_n2: Option<f64>,
    pub tau_peak: Option<f64>,
    pub ok: bool,
}

/// Ratios `τ_cat^TF / T` of the reduced sweep.
pub const FIG7_MULTIPLES: [f64; 3] = [1.0, 1.5, 2.0];
const PERIOD_WINDOW: f64 = 12.0;

/// `μ` with `τ_cat^TF(μ) = multiple · T(μ)` for `λ = 1`, `κ = 0`, by
/// fixed-point iteration on the extracted `|γ^{aa}_2|` period.
pub fn mu_for_multiple(n_atoms: usize, multiple: f64) -> Result<(f64, f64)> {
    let mut period = 1.8;
    let mut mu = 5.0 * PI * n_atoms as f64 / (8.0 * multiple * period);
    for _ in 0..8 {
        let cfg = RunConfig::new(Engine::Multimode, n_atoms, mu, 1.0);
        let prep = prepare(&cfg)?;
        period = gamma2_period(&prep, n_atoms, cfg.effective_dt(), PERIOD_WINDOW)?
            .ok_or_else(|| ExpError::Input(format!("no |gamma_2| period at mu = {mu}")))?;
        let next = 5.0 * PI * n_atoms as f64 / (8.0 * multiple * period);
        let done = ((next - mu) / mu).abs() < 2e-3;
        mu = next;
        if done {
            break;
        }
    }
    Ok((mu, period))
}

pub fn fig7_mini(n_atoms: usize, out: &Path) -> Result<(FigureOutput, Vec<Fig7Point>)> {
    std::fs::create_dir_all(out)?;
    let mut o = FigureOutput::default();
    let mut points = Vec::new();
    let n2 = (n_atoms * n_atoms) as f64;
    for multiple in FIG7_MULTIPLES {
        let (mu, period) = mu_for_multiple(n_atoms, multiple)?;
        let tau_tf = tf_tcat(mu, n_atoms, 1.0, 0.0)?;
        let mut cfg = RunConfig::new(Engine::Multimode, n_atoms, mu, 1.5 * tau_tf);
        cfg.sample_count = 300;
        let record = run(&cfg);
        points.push(Fig7Point {
            multiple,
            mu,
            mu_over_n: mu / n_atoms as f64,
            gamma2_period: period,
            tau_cat_tf: tau_tf,
            f_peak: record.f_peak(),
            f_peak_over_n2: record.f_peak().map(|f| f / n2),
            tau_peak: record.tau_peak(),
            ok: record.is_ok(),
        });
        o.keep(record, out, &format!("fig7_mini_k{}", tag(multiple)))?;
    }
    let path = out.join("fig7_mini_summary.csv");
    let mut w = csv::Writer::from_path(&path)?;
    for p in &points {
        w.serialize(p)?;
    }
    w.flush()?;
    o.files.push(path);
    Ok((o, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        assert!("fig8".parse::<Figure>().is_err());
    }

    #[test]
    fn fig2_writes_exact_and_tw_series() {
        let dir = tempfile::tempdir().unwrap();
        let opts = FigureOptions {
            n_atoms: 20,
            long: false,
        };
        let o = figure(Figure::Fig2, dir.path(), opts).unwrap();
        assert!(o.all_ok());
        assert_eq!(o.records.len(), 2);
        let exact = &o.records[0];
        assert_eq!(*exact.series.tau.last().unwrap(), PI);
        let p = exact.peak.unwrap();
        assert!((p.tau - PI / 2.0).abs() < 1e-2 && (p.value - 400.0).abs() < 1e-6);
        for f in &o.files {
            assert!(f.exists());
        }
    }

    #[test]
    fn fig4_emits_chi_traces() {
        let dir = tempfile::tempdir().unwrap();
        let opts = FigureOptions {
            n_atoms: 20,
            long: false,
        };
        let o = figure(Figure::Fig4, dir.path(), opts).unwrap();
        assert_eq!(o.files.len(), 2);
        let text = std::fs::read_to_string(&o.files[1]).unwrap();
        assert_eq!(text.lines().next().unwrap(), "tau [1/omega],chi [hbar omega],chi_tf [hbar omega]");
        assert_eq!(text.lines().count(), 1002);
    }
}
