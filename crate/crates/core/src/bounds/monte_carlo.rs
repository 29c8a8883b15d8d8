use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ratio_at, SupCertificate};
use crate::chebyshev::ChebPoly;
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::precision::{format_real, PrecisionContext, Real};

/// Name of the sampling generator, recorded in outputs.
pub const MC_GENERATOR: &str = "ChaCha8 (rand_chacha 0.3), seed_from_u64";

#[derive(Debug, Clone)]
pub struct MonteCarloReport {
    pub max_ratio: Real,
    /// `certificate.bound - max_ratio`, never negative.
    pub gap_to_certificate: Real,
    pub argmax: Real,
    pub n_points: usize,
    pub trials: usize,
    pub seed: u64,
}

/// `monte_carlo_check`: samples `R = L_t p / p` at `trials * n_points`
/// points `a + (b - a)(u + 1/2) 2^-64` with `u` drawn from ChaCha8.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_check(
    map: &MapSpec,
    t: &Real,
    p: &ChebPoly,
    certificate: &SupCertificate,
    n_points: usize,
    trials: usize,
    seed: u64,
    ctx: &PrecisionContext,
) -> Result<MonteCarloReport> {
    if n_points == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "Monte-Carlo check needs n_points >= 1 and trials >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = ctx.real(&map.interval.a);
    let len = ctx.real(&map.interval.length());
    let mut best: Option<(Real, Real)> = None;
    for _ in 0..trials {
        for _ in 0..n_points {
            let mut frac = ctx.real(rng.next_u64());
            frac += 0.5f64;
            frac >>= 64u32;
            let x = ctx.real(&frac * &len) + &a;
            let r = ratio_at(map, t, p, &x, ctx)?;
            if r > certificate.bound {
                return Err(Error::CertificateViolation {
                    sample: format_real(&r, 40),
                    bound: format_real(&certificate.bound, 40),
                    x: format_real(&x, 40),
                });
            }
            if best.as_ref().is_none_or(|(m, _)| r > *m) {
                best = Some((r, x));
            }
        }
    }
    let (max_ratio, argmax) = best.expect("at least one sample");
    let gap_to_certificate = ctx.real(&certificate.bound - &max_ratio);
    Ok(MonteCarloReport {
        max_ratio,
        gap_to_certificate,
        argmax,
        n_points,
        trials,
        seed,
    })
}
