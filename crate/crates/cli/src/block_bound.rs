use nsamg_core::theory::{block_bounds_with, scalar_block_extremes, BlockBounds, Pairing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CliResult;

/// Relative slack when comparing a bound with the scalar oracle.
pub const SANDWICH_RTOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairingResult {
    pub pairing: Pairing,
    pub eta0: f64,
    pub eta1: f64,
}

/// Both pairings plus the exact extremes at the lower and upper scalar corners.
#[derive(Clone, Debug, Serialize)]
pub struct BlockBoundReport {
    pub input: BlockBounds,
    pub pairings: Vec<PairingResult>,
    pub oracle_lower: (f64, f64),
    pub oracle_upper: (f64, f64),
    pub pairings_differ: bool,
}

pub fn evaluate(bb: BlockBounds) -> CliResult<BlockBoundReport> {
    let mut pairings = Vec::new();
    for pairing in [Pairing::AbCd, Pairing::AcBd] {
        let (eta0, eta1) = block_bounds_with(&bb, pairing)?;
        pairings.push(PairingResult { pairing, eta0, eta1 });
    }
    let (x, y) = (pairings[0], pairings[1]);
    let differ = (x.eta0 - y.eta0).abs() > SANDWICH_RTOL * x.eta0.abs().max(1e-300)
        || (x.eta1 - y.eta1).abs() > SANDWICH_RTOL * x.eta1.abs();
    Ok(BlockBoundReport {
        input: bb,
        pairings,
        oracle_lower: scalar_block_extremes(bb.a0, bb.b, bb.c, bb.d0),
        oracle_upper: scalar_block_extremes(bb.a1, bb.b, bb.c, bb.d1),
        pairings_differ: differ,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FuzzSummary {
    pub samples: usize,
    pub seed: u64,
    pub ab_cd_violations: usize,
    pub ac_bd_violations: usize,
    pub max_pairing_gap: f64,
}

fn violates(eta: (f64, f64), oracle: (f64, f64)) -> bool {
    oracle.0 < eta.0 * (1.0 - SANDWICH_RTOL) || oracle.1 > eta.1 * (1.0 + SANDWICH_RTOL)
}

/// Samples scalar quadruples `(a, b, c, d)` with `ad > bc` and checks that
/// each pairing sandwiches the exact squared singular values.
pub fn fuzz(samples: usize, seed: u64) -> FuzzSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FuzzSummary {
        samples,
        seed,
        ..FuzzSummary::default()
    };
    let mut taken = 0;
    while taken < samples {
        let a: f64 = rng.gen_range(0.01..3.0);
        let d: f64 = rng.gen_range(0.01..3.0);
        let b: f64 = rng.gen_range(0.0..3.0);
        let c: f64 = rng.gen_range(0.0..3.0);
        if a * d <= b * c {
            continue;
        }
        taken += 1;
        let bb = BlockBounds::new(a, a, b, c, d, d);
        let oracle = scalar_block_extremes(a, b, c, d);
        let x = block_bounds_with(&bb, Pairing::AbCd).expect("validated sample");
        let y = block_bounds_with(&bb, Pairing::AcBd).expect("validated sample");
        out.ab_cd_violations += violates(x, oracle) as usize;
        out.ac_bd_violations += violates(y, oracle) as usize;
        let gap = ((x.0 - y.0).abs() / x.0.max(1e-300)).max((x.1 - y.1).abs() / x.1);
        out.max_pairing_gap = out.max_pairing_gap.max(gap);
    }
    out
}

pub fn format_report(r: &BlockBoundReport) -> String {
    let i = r.input;
    let mut s = format!(
        "a0={} a1={} b={} c={} d0={} d1={}\n{:<10} {:>24} {:>24}\n",
        i.a0, i.a1, i.b, i.c, i.d0, i.d1, "pairing", "eta0", "eta1"
    );
    for p in &r.pairings {
        let name = match p.pairing {
            Pairing::AbCd => "ab+cd",
            Pairing::AcBd => "ac+bd",
        };
        s += &format!("{name:<10} {:>24e} {:>24e}\n", p.eta0, p.eta1);
    }
    s += &format!("{:<10} {:>24e} {:>24e}\n", "oracle_lo", r.oracle_lower.0, r.oracle_lower.1);
    s += &format!("{:<10} {:>24e} {:>24e}\n", "oracle_hi", r.oracle_upper.0, r.oracle_upper.1);
    if r.pairings_differ {
        s += "ac+bd pairing differs from ab+cd pairing\n";
    }
    s
}

pub fn format_fuzz(f: &FuzzSummary) -> String {
    format!(
        "samples {} seed {}\nab+cd violations {}\nac+bd violations {}\nmax relative pairing gap {:e}\n",
        f.samples, f.seed, f.ab_cd_violations, f.ac_bd_violations, f.max_pairing_gap
    )
}
