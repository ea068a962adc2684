use std::path::PathBuf;

use nsamg_core::linalg::{polar_q, svd, DenseMatrix, SvdFactorization};
use nsamg_core::theory::{
    cgc_angle, coarse_pair, fap_constant, inner_product_equivalence, measure_projection, measured_equivalence,
    select_k, stability_bound, two_grid_bound, wcycle_requirements, AngleReport, BasisParams, CPiBound, Deltas,
    EquivalenceReport, FapReport, Hypotheses, Metric, WcycleRequirements, SAP, SSAP, WAP,
};
use nsamg_core::transfer::{build_pair, q_pair_restrict, InterpKind, RestrictKind, TransferConfig};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{csv_bytes, json_bytes, num, OutputSet};
use crate::problem::{load_system, ProblemInfo};
use crate::svg::FigureSeries;

pub const FAP_HEADER: &[&str] = &["side", "builder", "vector_index", "sigma", "K_wap", "K_sap", "K_ssap"];
pub const PROJECTION_HEADER: &[&str] = &["variant", "metric", "vector_index", "sigma", "amplification", "operator_norm"];

pub const BLOCK_BOUND_NOTE: &str = "block bounds use the cross-term pairing (a^2+c^2-b^2-d^2)^2 + 4(ab+cd)^2; \
the alternative pairing (a^2+b^2-c^2-d^2)^2 + 4(ac+bd)^2 has the same discriminant T^2 - 4(ad-bc)^2, so both give identical bounds";

/// Uniform and per-vector maxima of the three standard properties for one builder.
#[derive(Clone, Debug, Serialize)]
pub struct FapSummary {
    pub side: &'static str,
    pub builder: String,
    pub k_wap: f64,
    pub k_sap: f64,
    pub k_ssap: f64,
    pub max_wap: f64,
    pub max_sap: f64,
    pub max_ssap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionSummary {
    pub variant: &'static str,
    pub metric: &'static str,
    pub operator_norm: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisSummary {
    pub k: usize,
    pub n_c: usize,
    pub deltas: Deltas,
    pub s1: Option<f64>,
    pub hypotheses: Hypotheses,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheorySummary {
    pub problem: ProblemInfo,
    pub interp: String,
    pub restrict: String,
    pub theta_s: f64,
    pub degree: usize,
    pub n_coarse: usize,
    pub beta: f64,
    pub gamma: f64,
    pub nu: usize,
    pub fap: Vec<FapSummary>,
    /// Uniform FAP(beta, 1) constant of the configured interpolation.
    pub k_p_beta_1: f64,
    pub k_p_beta_0: f64,
    pub k_r_gamma_0: f64,
    pub projection: Vec<ProjectionSummary>,
    pub pi_qa: f64,
    pub pi_qa_squared: f64,
    pub pi_l2: f64,
    pub angle: Option<AngleReport>,
    pub basis: Option<BasisSummary>,
    pub c_pi_bound: Option<CPiBound>,
    pub c_pi_bound_holds: Option<bool>,
    pub equivalence: EquivalenceSummary,
    pub two_grid_bound_apriori: Option<f64>,
    pub two_grid_bound_measured: f64,
    pub wcycle_apriori: Option<WcycleRequirements>,
    pub wcycle_measured: Option<WcycleRequirements>,
    pub block_bound_note: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceSummary {
    pub c0_measured: f64,
    pub c1_measured: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub report: Option<EquivalenceReport>,
    pub certified: bool,
    pub sandwich_holds: Option<bool>,
}

/// Everything `analyze` writes, kept in memory until committed.
#[derive(Clone, Debug)]
pub struct AnalyzeOutput {
    pub fap_rows: Vec<Vec<String>>,
    pub projection_rows: Vec<Vec<String>>,
    pub theory: TheorySummary,
    pub figures: Vec<(String, FigureSeries)>,
}

fn interp_builders(cfg: &RunConfig) -> Vec<InterpKind> {
    let mut out = vec![InterpKind::Classical, InterpKind::Laip];
    if !out.contains(&cfg.transfer.interp) {
        out.push(cfg.transfer.interp);
    }
    out
}

fn restrict_builders(cfg: &RunConfig) -> Vec<RestrictKind> {
    let mut out = vec![RestrictKind::ClassicalT, RestrictKind::Lair];
    if !out.contains(&cfg.transfer.restrict) {
        out.push(cfg.transfer.restrict);
    }
    out
}

struct Triple {
    wap: FapReport,
    sap: FapReport,
    ssap: FapReport,
}

fn triple(m: &DenseMatrix, f: &SvdFactorization) -> CliResult<Triple> {
    Ok(Triple {
        wap: fap_constant(m, f, WAP.0, WAP.1)?,
        sap: fap_constant(m, f, SAP.0, SAP.1)?,
        ssap: fap_constant(m, f, SSAP.0, SSAP.1)?,
    })
}

fn fap_block(
    side: &'static str,
    builder: &str,
    t: &Triple,
    rows: &mut Vec<Vec<String>>,
    fig: &mut FigureSeries,
) -> FapSummary {
    for (i, ((s, w), ((_, a), (_, b)))) in t
        .wap
        .per_vector
        .iter()
        .zip(t.sap.per_vector.iter().zip(&t.ssap.per_vector))
        .enumerate()
    {
        rows.push(vec![side.into(), builder.into(), (i + 1).to_string(), num(*s), num(*w), num(*a), num(*b)]);
    }
    for (name, rep) in [("WAP", &t.wap), ("SAP", &t.sap), ("SSAP", &t.ssap)] {
        let k = fig.series.len();
        fig.series.push((format!("{builder} {name}"), rep.constants()));
        fig.markers.push((format!("{builder} {name} uniform"), rep.uniform_k, k));
    }
    FapSummary {
        side,
        builder: builder.into(),
        k_wap: t.wap.uniform_k,
        k_sap: t.sap.uniform_k,
        k_ssap: t.ssap.uniform_k,
        max_wap: t.wap.max_per_vector,
        max_sap: t.sap.max_per_vector,
        max_ssap: t.ssap.max_per_vector,
    }
}

pub fn analyze(cfg: &RunConfig) -> CliResult<AnalyzeOutput> {
    let n = cfg.single_n()?;
    let sys = load_system(cfg, n)?;
    let a = sys.a.to_dense();
    let f = svd(&a)?;
    let sigma = f.sigma.clone();
    let tc = cfg.transfer;

    let mut fap_rows = Vec::new();
    let mut fap = Vec::new();
    let mut fig_p = FigureSeries {
        title: "Interpolation approximation constants".into(),
        y_label: "constant".into(),
        x: sigma.clone(),
        secondary: Some(("sigma_i".into(), sigma.clone())),
        ..FigureSeries::default()
    };
    let mut fig_r = FigureSeries {
        title: "Restriction approximation constants".into(),
        ..fig_p.clone()
    };
    for ip in interp_builders(cfg) {
        let pair = build_pair(&sys.a, &TransferConfig { interp: ip, restrict: RestrictKind::ClassicalT, ..tc }, Some(&f))?;
        let t = triple(&pair.p.to_dense(), &f)?;
        fap.push(fap_block("P", ip.name(), &t, &mut fap_rows, &mut fig_p));
    }
    let ft = f.transposed();
    for rs in restrict_builders(cfg) {
        let pair = build_pair(&sys.a, &TransferConfig { restrict: rs, ..tc }, Some(&f))?;
        let t = triple(&pair.r.to_dense(), &ft)?;
        fap.push(fap_block("R", rs.name(), &t, &mut fap_rows, &mut fig_r));
    }

    let pair = build_pair(&sys.a, &tc, Some(&f))?;
    let (p, r) = (pair.p.to_dense(), pair.r.to_dense());
    let variants: [(&'static str, DenseMatrix); 3] = [
        ("orthogonal", q_pair_restrict(&p, &polar_q(&f)?)?),
        ("galerkin", p.clone()),
        ("petrov_galerkin", r.clone()),
    ];
    let mut projection_rows = Vec::new();
    let mut projection = Vec::new();
    let mut figs_proj = Vec::new();
    for metric in [Metric::L2, Metric::Qa] {
        let mut fig = FigureSeries {
            title: format!("Coarse-grid projection amplification ({})", metric.name()),
            y_label: "amplification".into(),
            x: sigma.clone(),
            secondary: Some(("sigma_i".into(), sigma.clone())),
            ..FigureSeries::default()
        };
        for (variant, rv) in &variants {
            match measure_projection(&p, rv, &f, metric) {
                Ok(rep) => {
                    for (i, (s, amp)) in rep.amplifications.iter().enumerate() {
                        projection_rows.push(vec![
                            (*variant).into(),
                            metric.name().into(),
                            (i + 1).to_string(),
                            num(*s),
                            num(*amp),
                            num(rep.norm),
                        ]);
                    }
                    let k = fig.series.len();
                    fig.series.push(((*variant).into(), rep.amplifications.iter().map(|x| x.1).collect()));
                    fig.markers.push((format!("{variant} norm"), rep.norm, k));
                    projection.push(ProjectionSummary {
                        variant,
                        metric: metric.name(),
                        operator_norm: Some(rep.norm),
                        error: None,
                    });
                }
                Err(e) => projection.push(ProjectionSummary {
                    variant,
                    metric: metric.name(),
                    operator_norm: None,
                    error: Some(e.to_string()),
                }),
            }
        }
        figs_proj.push((format!("projection_{}.svg", metric.name()), fig));
    }

    let pi_qa = measure_projection(&p, &r, &f, Metric::Qa)?.norm;
    let pi_l2 = measure_projection(&p, &r, &f, Metric::L2)?.norm;
    let angle = cgc_angle(&p, &r, &f).ok();
    let k_p0 = fap_constant(&p, &f, cfg.beta, 0.0)?.uniform_k;
    let k_r0 = fap_constant(&r, &ft, cfg.gamma, 0.0)?.uniform_k;
    let k_p1 = fap_constant(&p, &f, cfg.beta, 1.0)?.uniform_k;
    let params = BasisParams {
        beta: cfg.beta,
        gamma: cfg.gamma,
        k_p: k_p0,
        k_r: k_r0,
    };
    let (ac, g) = coarse_pair(&p, &r, &f)?;
    let (c0m, c1m, ratio_min, ratio_max) = measured_equivalence(&ac, &g)?;
    let mut basis = None;
    let mut c_pi_bound = None;
    let mut eq_report = None;
    if let Some(dec) = select_k(&p, &r, &f, &params)? {
        let stab = stability_bound(&dec)?;
        c_pi_bound = stab.bound;
        basis = Some(BasisSummary {
            k: dec.k,
            n_c: dec.n_c,
            deltas: dec.deltas,
            s1: dec.s1(),
            hypotheses: dec.hypotheses(),
        });
        eq_report = Some(inner_product_equivalence(&p, &r, &f, &dec)?);
    }
    let certified = eq_report.as_ref().is_some_and(|e| e.certified());
    let sandwich_holds = eq_report.as_ref().and_then(|e| e.sandwich_holds());
    let c_pi_bound_holds = c_pi_bound.map(|b| pi_qa * pi_qa <= b.c_pi + 1e-6);

    let pi_sq = pi_qa * pi_qa;
    let two_grid_bound_measured = two_grid_bound(pi_sq.max(1.0), k_p1, cfg.nu.max(1) as u32, cfg.beta)?;
    let two_grid_bound_apriori = match c_pi_bound {
        Some(b) => Some(two_grid_bound(b.c_pi, k_p1, cfg.nu.max(1) as u32, cfg.beta)?),
        None => None,
    };
    let wcycle_apriori = match (&eq_report, c_pi_bound) {
        (Some(e), Some(b)) if e.certified() => match (e.c0_bound, e.c1_bound) {
            (Some(c0), Some(c1)) => wcycle_requirements(c0, c1, k_p1, b.c_pi, cfg.beta).ok(),
            _ => None,
        },
        _ => None,
    };
    let wcycle_measured = wcycle_requirements(c0m, c1m, k_p1, pi_sq.max(1.0), cfg.beta).ok();

    let theory = TheorySummary {
        problem: ProblemInfo::new(cfg, n, &sys),
        interp: tc.interp.name().into(),
        restrict: tc.restrict.name().into(),
        theta_s: tc.theta_s,
        degree: tc.degree,
        n_coarse: pair.n_coarse(),
        beta: cfg.beta,
        gamma: cfg.gamma,
        nu: cfg.nu,
        fap,
        k_p_beta_1: k_p1,
        k_p_beta_0: k_p0,
        k_r_gamma_0: k_r0,
        projection,
        pi_qa,
        pi_qa_squared: pi_sq,
        pi_l2,
        angle,
        basis,
        c_pi_bound,
        c_pi_bound_holds,
        equivalence: EquivalenceSummary {
            c0_measured: c0m,
            c1_measured: c1m,
            ratio_min,
            ratio_max,
            report: eq_report,
            certified,
            sandwich_holds,
        },
        two_grid_bound_apriori,
        two_grid_bound_measured,
        wcycle_apriori,
        wcycle_measured,
        block_bound_note: BLOCK_BOUND_NOTE,
    };
    let mut figures = vec![("fap_P.svg".to_string(), fig_p), ("fap_R.svg".to_string(), fig_r)];
    figures.extend(figs_proj);
    Ok(AnalyzeOutput {
        fap_rows,
        projection_rows,
        theory,
        figures,
    })
}

pub fn run_analyze(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let out = analyze(cfg)?;
    let mut set = OutputSet::default();
    if cfg.formats.csv {
        set.add(cfg.out_path("fap_constants.csv"), csv_bytes(FAP_HEADER, &out.fap_rows)?);
        set.add(cfg.out_path("projection_norms.csv"), csv_bytes(PROJECTION_HEADER, &out.projection_rows)?);
    }
    if cfg.formats.json {
        set.add(cfg.out_path("theory.json"), json_bytes(&out.theory)?);
    }
    if cfg.formats.svg {
        for (name, fig) in &out.figures {
            set.add(cfg.out_path(name), fig.render());
        }
    }
    set.commit()
}
