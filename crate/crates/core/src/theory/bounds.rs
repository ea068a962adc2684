use serde::Serialize;

use crate::error::{Error, Result};

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.5) || !beta.is_finite() {
        return Err(Error::InvalidBeta(beta));
    }
    Ok(())
}

/// Two-grid QA contraction bound for a FAP(beta, 1) interpolation and `nu`
/// Richardson sweeps.
pub fn two_grid_bound(c_pi: f64, k_p1: f64, nu: u32, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if nu == 0 {
        return Err(Error::InvalidArgument("two-grid bound needs nu >= 1".into()));
    }
    let q = 2.0 * beta - 1.0;
    let nu = f64::from(nu);
    Ok((4.0 / (4.0 + q)).powi(2) * (q / (4.0 * nu + q)).powf(q / 2.0) * c_pi * k_p1)
}

/// The SAP form: `16 C_Pi K_P / (25 sqrt(4 nu + 1))`.
pub fn two_grid_bound_sap(c_pi: f64, k_p: f64, nu: u32) -> f64 {
    16.0 * c_pi * k_p / (25.0 * (4.0 * f64::from(nu) + 1.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WcycleRequirements {
    /// The relaxation expression before rounding up.
    pub nu_raw: f64,
    pub nu_min: f64,
    /// `2 (c1/c0) K_P C_Pi`
    pub c_mu: f64,
    pub rho_bound: f64,
    /// `2 (c1/c0) C_Pi`
    pub c_mu_text: f64,
    pub rho_bound_text: f64,
}

pub fn wcycle_requirements(c0: f64, c1: f64, k_p1: f64, c_pi: f64, beta: f64) -> Result<WcycleRequirements> {
    check_beta(beta)?;
    if !(c0 > 0.0 && c1 >= c0) {
        return Err(Error::InvalidArgument(format!("need 0 < c0 <= c1 (c0 = {c0}, c1 = {c1})")));
    }
    let q = 2.0 * beta - 1.0;
    let ratio = c1 / c0;
    let nu_raw = (q / 4.0) * (4.0 * ratio * k_p1 * c_pi * (2.0 * c_pi - 1.0)).powf(2.0 / q);
    let c_mu = 2.0 * ratio * k_p1 * c_pi;
    let c_mu_text = 2.0 * ratio * c_pi;
    Ok(WcycleRequirements {
        nu_raw,
        nu_min: nu_raw.ceil(),
        c_mu,
        rho_bound: 1.0 / (2.0 * c_mu),
        c_mu_text,
        rho_bound_text: 1.0 / (2.0 * c_mu_text),
    })
}
