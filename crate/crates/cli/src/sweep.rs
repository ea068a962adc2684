use std::path::PathBuf;
use std::thread;

use nsamg_core::linalg::svd;
use nsamg_core::solver::{build_hierarchy_with, convergence_probe, CycleKind, HierarchyConfig};
use nsamg_core::theory::{
    coarse_pair, fap_constant, measure_projection, measured_equivalence, select_k, stability_bound,
    wcycle_requirements, BasisParams, Metric, SAP, SSAP, WAP,
};
use nsamg_core::transfer::{build_pair, counterexample_transfer, default_svd_coarse_size, TransferConfig};

use crate::config::{PairChoice, RunConfig};
use crate::error::CliResult;
use crate::output::{csv_bytes, num, OutputSet};
use crate::problem::load_system;
use crate::solve::PROBE_ITERS;

pub const SWEEP_HEADER: &[&str] = &[
    "n", "pair", "K_wap", "K_sap", "K_ssap", "pi_qa", "c_pi", "c1_over_c0", "nu_min", "rho_measured", "status",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub pair: String,
    pub k_wap: f64,
    pub k_sap: f64,
    pub k_ssap: f64,
    pub pi_qa: f64,
    pub c_pi: Option<f64>,
    pub c1_over_c0: f64,
    pub nu_min: Option<f64>,
    pub rho_measured: Option<f64>,
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

impl SweepRow {
    fn record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.pair.clone(),
            num(self.k_wap),
            num(self.k_sap),
            num(self.k_ssap),
            num(self.pi_qa),
            opt(self.c_pi),
            num(self.c1_over_c0),
            opt(self.nu_min),
            opt(self.rho_measured),
            "ok".into(),
        ]
    }
}

pub fn sweep_row(cfg: &RunConfig, n: usize, choice: PairChoice) -> CliResult<SweepRow> {
    let sys = load_system(cfg, n)?;
    let f = svd(&sys.a.to_dense())?;
    let pair = match choice {
        PairChoice::Builders(interp, restrict) => {
            build_pair(&sys.a, &TransferConfig { interp, restrict, ..cfg.transfer }, Some(&f))?
        }
        PairChoice::Counterexample => counterexample_transfer(&f, default_svd_coarse_size(sys.n()), 1)?,
    };
    let (p, r) = (pair.p.to_dense(), pair.r.to_dense());
    let pi_qa = measure_projection(&p, &r, &f, Metric::Qa)?.norm;
    let k_wap = fap_constant(&p, &f, WAP.0, WAP.1)?.uniform_k;
    let k_sap = fap_constant(&p, &f, SAP.0, SAP.1)?.uniform_k;
    let k_ssap = fap_constant(&p, &f, SSAP.0, SSAP.1)?.uniform_k;
    let params = BasisParams {
        beta: cfg.beta,
        gamma: cfg.gamma,
        k_p: fap_constant(&p, &f, cfg.beta, 0.0)?.uniform_k,
        k_r: fap_constant(&r, &f.transposed(), cfg.gamma, 0.0)?.uniform_k,
    };
    let c_pi = match select_k(&p, &r, &f, &params)? {
        Some(dec) => stability_bound(&dec)?.bound.map(|b| b.c_pi),
        None => None,
    };
    let (ac, g) = coarse_pair(&p, &r, &f)?;
    let (c0, c1, _, _) = measured_equivalence(&ac, &g)?;
    let k_p1 = fap_constant(&p, &f, cfg.beta, 1.0)?.uniform_k;
    let nu_min = wcycle_requirements(c0, c1, k_p1, (pi_qa * pi_qa).max(1.0), cfg.beta)
        .ok()
        .map(|w| w.nu_min);
    let hcfg = HierarchyConfig {
        transfer: cfg.transfer,
        max_levels: 2,
        coarsest_max: 1,
    };
    let h = build_hierarchy_with(&sys, &hcfg, Some(pair))?;
    let rho = convergence_probe(&h, CycleKind::TwoGrid, cfg.nu, 1, PROBE_ITERS, cfg.seed)?.rho;
    Ok(SweepRow {
        n,
        pair: choice.label(),
        k_wap,
        k_sap,
        k_ssap,
        pi_qa,
        c_pi,
        c1_over_c0: c1 / c0,
        nu_min,
        rho_measured: Some(rho),
    })
}

/// One record per (n, pair) in input order; failing rows carry an error tag.
pub fn sweep(cfg: &RunConfig) -> Vec<Vec<String>> {
    let jobs: Vec<(usize, PairChoice)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| cfg.pairs.iter().map(move |&p| (n, p)))
        .collect();
    thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(n, p)| s.spawn(move || (n, p, sweep_row(cfg, n, p))))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                let (n, p, res) = h.join().expect("sweep worker panicked");
                match res {
                    Ok(row) => row.record(),
                    Err(e) => {
                        let mut rec = vec![n.to_string(), p.label()];
                        rec.extend(std::iter::repeat(String::new()).take(SWEEP_HEADER.len() - 3));
                        rec.push(format!("error: {e}"));
                        rec
                    }
                }
            })
            .collect()
    })
}

pub fn run_sweep(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let rows = sweep(cfg);
    let mut set = OutputSet::default();
    set.add(cfg.out_path("sweep.csv"), csv_bytes(SWEEP_HEADER, &rows)?);
    set.commit()
}
