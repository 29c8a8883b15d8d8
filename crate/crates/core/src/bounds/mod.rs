//! Sup-ratio certificates, pressure bounds and Lyapunov enclosures.
//!
//! The supremum of `R = L_t p / p` is bounded by re-interpolating `R` at
//! `K m` Chebyshev nodes, requiring geometric decay of the coefficient
//! tail, and taking the maximum of the interpolant over a dense angular
//! grid padded by the tail mass and a grid-spacing term. This is
//! validated numerics: the gap between `R` and its interpolant is assumed
//! to be covered by the tail pad, which holds when the tail really
//! decays geometrically.

mod monte_carlo;
mod sweep;

use rayon::prelude::*;

use crate::chebyshev::{chebyshev_nodes, values_to_coeffs, ChebPoly};
use crate::collocation::{apply_transfer, test_polynomial, EigenPair, PowerOptions};
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::precision::{format_real, neg_log10, PrecisionContext, Real};

pub use monte_carlo::{monte_carlo_check, MonteCarloReport, MC_GENERATOR};
pub use sweep::{linspace, sweep, SweepRow, SweepTable};

/// Tuning of the sup-ratio certificate.
#[derive(Debug, Clone)]
pub struct CertOptions {
    /// `K`: interpolation degree is `K m`.
    pub refine_factor: usize,
    /// `G`: the dense grid has `G K m` points.
    pub grid_factor: usize,
    /// `tau`; `None` means `10^(-digits/2)`.
    pub tail_threshold: Option<Real>,
}

impl Default for CertOptions {
    fn default() -> Self {
        Self {
            refine_factor: 4,
            grid_factor: 8,
            tail_threshold: None,
        }
    }
}

impl CertOptions {
    pub fn threshold(&self, ctx: &PrecisionContext) -> Real {
        self.tail_threshold
            .clone()
            .unwrap_or_else(|| ctx.ten_pow_neg(f64::from(ctx.digits()) / 2.0))
    }

    fn check(&self) -> Result<()> {
        if self.refine_factor == 0 || self.grid_factor == 0 {
            return Err(Error::InvalidArgument(
                "refine and grid factors must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Certified upper bound for the supremum of a function on the interval.
#[derive(Debug, Clone)]
pub struct SupCertificate {
    /// `dense_max + tail_pad + grid_pad`.
    pub bound: Real,
    pub dense_max: Real,
    /// Twice the absolute coefficient mass of the last quarter.
    pub tail_pad: Real,
    /// Between-grid-point and rounding allowance.
    pub grid_pad: Real,
    /// `M'`.
    pub refine_degree: usize,
    pub grid_points: usize,
    pub tail_ratio: Real,
    pub tail_threshold: Real,
}

/// Bounds the maximum of a Chebyshev series of length `M'`.
fn certify_series(
    coeffs: &[Real],
    grid_factor: usize,
    threshold: &Real,
    ctx: &PrecisionContext,
    interval: &crate::precision::Interval,
) -> Result<SupCertificate> {
    let n = coeffs.len();
    let abs: Vec<Real> = coeffs.iter().map(|c| ctx.real(c.abs_ref())).collect();
    let max_of = |s: &[Real]| {
        s.iter()
            .fold(ctx.zero(), |m, v| if *v > m { v.clone() } else { m })
    };
    let tail = &abs[(3 * n) / 4..];
    let overall = max_of(&abs);
    let tail_max = max_of(tail);
    let tail_ratio = if overall.is_zero() {
        ctx.zero()
    } else {
        ctx.real(&tail_max / &overall)
    };
    if tail_ratio > *threshold {
        return Err(Error::CertificateRefused {
            tail_ratio: format_real(&tail_ratio, 6),
            threshold: format_real(threshold, 6),
        });
    }
    let tail_pad = tail.iter().fold(ctx.zero(), |acc, v| acc + v) * 2u32;

    let poly = ChebPoly {
        coeffs: coeffs.to_vec(),
        interval: interval.clone(),
    };
    let points = (grid_factor * n).max(2);
    let pi = ctx.pi();
    let dense_max = (0..points)
        .into_par_iter()
        .map(|i| {
            let u = if i == 0 {
                ctx.one()
            } else if i + 1 == points {
                -ctx.one()
            } else {
                (ctx.real(&pi * i as u32) / (points as u32 - 1)).cos()
            };
            poly.eval_reference(&u, ctx)
        })
        .reduce_with(|a, b| if b > a { b } else { a })
        .expect("grid is nonempty");

    // |q(theta) - max over grid| <= h^2/8 sup|q''| with q'' bounded by sum j^2 |c_j|
    let h = ctx.real(&pi / (points as u32 - 1));
    let curvature = abs.iter().enumerate().fold(ctx.zero(), |acc, (j, v)| {
        acc + ctx.real(v * (j as u64 * j as u64))
    });
    let mass = abs.iter().fold(ctx.zero(), |acc, v| acc + v);
    let mut grid_pad = ctx.real(&h * &h) * curvature / 8u32;
    grid_pad += mass * ctx.tolerance(10);

    let mut bound = ctx.real(&dense_max + &tail_pad);
    bound += &grid_pad;
    Ok(SupCertificate {
        bound,
        dense_max,
        tail_pad,
        grid_pad,
        refine_degree: n,
        grid_points: points,
        tail_ratio,
        tail_threshold: threshold.clone(),
    })
}

/// `certify_min_positive`: certified lower bound for `min p`, obtained by
/// bounding `sup(-p)`. The zero-padded coefficient vector of length
/// `K (deg + 1)` is the exact interpolant, so its tail vanishes.
pub fn certify_min_positive(
    p: &ChebPoly,
    opts: &CertOptions,
    ctx: &PrecisionContext,
) -> Result<Real> {
    opts.check()?;
    if p.coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidArgument(
            "cannot certify the zero polynomial".into(),
        ));
    }
    let neg: Vec<Real> = p
        .padded(opts.refine_factor * p.coeffs.len(), ctx)
        .coeffs
        .into_iter()
        .map(|c| -c)
        .collect();
    let cert = certify_series(
        &neg,
        opts.grid_factor,
        &opts.threshold(ctx),
        ctx,
        &p.interval,
    )?;
    let lower = -cert.bound;
    if lower <= 0u32 {
        return Err(Error::Positivity(format!(
            "certified minimum of the test polynomial is {} <= 0; raise m",
            format_real(&lower, 10)
        )));
    }
    Ok(lower)
}

/// `sup_ratio`: certificate for `sup [L_t p] / p`.
pub fn sup_ratio(
    map: &MapSpec,
    t: &Real,
    p: &ChebPoly,
    opts: &CertOptions,
    ctx: &PrecisionContext,
) -> Result<SupCertificate> {
    opts.check()?;
    let refine = opts.refine_factor * p.coeffs.len();
    let nodes = chebyshev_nodes(refine.max(2), &map.interval, ctx)?;
    let values: Vec<Real> = nodes
        .mapped_nodes
        .par_iter()
        .map(|x| ratio_at(map, t, p, x, ctx))
        .collect::<Result<_>>()?;
    let interp = values_to_coeffs(&values, &map.interval, ctx)?;
    certify_series(
        &interp.coeffs,
        opts.grid_factor,
        &opts.threshold(ctx),
        ctx,
        &map.interval,
    )
}

/// `R(x) = [L_t p](x) / p(x)`.
pub fn ratio_at(
    map: &MapSpec,
    t: &Real,
    p: &ChebPoly,
    x: &Real,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let px = p.eval(x, ctx)?;
    if px <= 0u32 {
        return Err(Error::Positivity(format!(
            "test polynomial is {} at x = {}",
            format_real(&px, 10),
            format_real(x, 20)
        )));
    }
    Ok(apply_transfer(map, t, p, x, ctx)? / px)
}

/// `e^{P(t)} <= e^{rho}`.
#[derive(Debug, Clone)]
pub struct PressureBound {
    pub t: Real,
    pub rho: Real,
    pub certificate: SupCertificate,
    pub poly_degree: usize,
}

/// `pressure_log_bound`.
pub fn pressure_log_bound(
    map: &MapSpec,
    t: &Real,
    p: &ChebPoly,
    opts: &CertOptions,
    ctx: &PrecisionContext,
) -> Result<PressureBound> {
    let certificate = sup_ratio(map, t, p, opts, ctx)?;
    if certificate.bound <= 0u32 {
        return Err(Error::Positivity(format!(
            "sup-ratio bound {} is not positive",
            format_real(&certificate.bound, 10)
        )));
    }
    Ok(PressureBound {
        t: t.clone(),
        rho: ctx.real(certificate.bound.ln_ref()),
        certificate,
        poly_degree: p.degree(),
    })
}

/// Controls for `lyapunov_enclosure`.
#[derive(Debug, Clone, Default)]
pub struct EnclosureOptions {
    pub cert: CertOptions,
    pub power: PowerOptions,
}

/// One of the two `t = 1 +- epsilon` pipelines.
#[derive(Debug, Clone)]
pub struct PressureSide {
    pub bound: PressureBound,
    pub eigen: EigenPair,
    pub poly: ChebPoly,
    /// Certified lower bound for the test polynomial.
    pub min_value: Real,
}

/// `[alpha / epsilon, beta / epsilon]`.
#[derive(Debug, Clone)]
pub struct LyapunovEnclosure {
    pub lower: Real,
    pub upper: Real,
    pub width: Real,
    pub epsilon: Real,
    pub alpha: Real,
    pub beta: Real,
    pub m: usize,
    pub digits: u32,
    pub map_name: String,
    /// `t = 1 + epsilon` (gives alpha).
    pub plus: PressureSide,
    /// `t = 1 - epsilon` (gives beta).
    pub minus: PressureSide,
}

impl LyapunovEnclosure {
    pub fn certificates(&self) -> [&SupCertificate; 2] {
        [&self.plus.bound.certificate, &self.minus.bound.certificate]
    }

    pub fn contains(&self, value: &Real) -> bool {
        self.lower <= *value && *value <= self.upper
    }
}

/// Digits needed for an enclosure at `epsilon`: `2.5 (-log10 eps) + 30`.
pub fn required_digits(epsilon: &Real) -> u32 {
    (2.5 * neg_log10(epsilon) + 30.0).ceil().max(30.0) as u32
}

/// `lyapunov_enclosure`.
pub fn lyapunov_enclosure(
    map: &MapSpec,
    epsilon: &Real,
    m: usize,
    ctx: &PrecisionContext,
    opts: &EnclosureOptions,
) -> Result<LyapunovEnclosure> {
    if *epsilon <= 0u32 || *epsilon >= 1u32 {
        return Err(Error::OutOfRange {
            what: "epsilon",
            value: format_real(epsilon, 10),
            range: "(0, 1)".into(),
        });
    }
    let required = required_digits(epsilon);
    if ctx.digits() < required {
        return Err(Error::PrecisionBudget {
            digits: ctx.digits(),
            required,
            epsilon: format_real(epsilon, 6),
        });
    }
    if !map.is_expanding() {
        return Err(Error::NotExpanding {
            name: map.name.clone(),
            floor: format_real(&map.expansion_floor, 10),
        });
    }
    let epsilon = ctx.real(epsilon);
    let t_plus = ctx.real(&epsilon + 1u32);
    let t_minus = ctx.real(1u32 - &epsilon);
    let (plus, minus) = rayon::join(
        || pressure_side(map, &t_plus, m, opts, ctx),
        || pressure_side(map, &t_minus, m, opts, ctx),
    );
    let (plus, minus) = (plus?, minus?);
    let alpha = -plus.bound.rho.clone();
    let beta = minus.bound.rho.clone();
    if alpha <= 0u32 || beta <= 0u32 {
        return Err(Error::EpsilonTooLarge {
            alpha: format_real(&alpha, 10),
            beta: format_real(&beta, 10),
        });
    }
    let lower = ctx.real(&alpha / &epsilon);
    let upper = ctx.real(&beta / &epsilon);
    let width = ctx.real(&upper - &lower);
    Ok(LyapunovEnclosure {
        lower,
        upper,
        width,
        epsilon,
        alpha,
        beta,
        m,
        digits: ctx.digits(),
        map_name: map.name.clone(),
        plus,
        minus,
    })
}

fn pressure_side(
    map: &MapSpec,
    t: &Real,
    m: usize,
    opts: &EnclosureOptions,
    ctx: &PrecisionContext,
) -> Result<PressureSide> {
    let tp = test_polynomial(map, t, m, &opts.power, ctx)?;
    let min_value = certify_min_positive(&tp.poly, &opts.cert, ctx)?;
    let bound = pressure_log_bound(map, t, &tp.poly, &opts.cert, ctx)?;
    Ok(PressureSide {
        bound,
        eigen: tp.eigen,
        poly: tp.poly,
        min_value,
    })
}
