//! Expanding full-branch interval maps described by their inverse branches.

mod builtin;
mod config;

use rug::Rational;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::precision::{format_real, Interval, PrecisionContext, Real};

pub use builtin::{builtin, family_map, linear, BUILTIN_NAMES, FAMILY_NAMES};
pub use config::parse_map_spec;

/// Default validation grid size.
pub const DEFAULT_GRID: usize = 1024;

/// Digits used for the construction-time expansion estimate.
const FLOOR_DIGITS: u32 = 64;

/// Where the derivative magnitude of a branch came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivSource {
    Supplied,
    Symbolic,
}

/// One inverse branch `f_k: I -> I`.
#[derive(Debug, Clone)]
pub struct Branch {
    pub label: String,
    pub inverse: Expr,
    /// `f_k'(x)`; its absolute value is taken at evaluation time.
    pub deriv_abs: Expr,
    pub deriv_source: DerivSource,
    /// Forward map restricted to the image of this branch, when known.
    pub forward: Option<Expr>,
}

impl Branch {
    pub fn new(label: impl Into<String>, inverse: Expr, deriv_abs: Option<Expr>) -> Self {
        let (deriv_abs, deriv_source) = match deriv_abs {
            Some(d) => (d, DerivSource::Supplied),
            None => (inverse.derivative(), DerivSource::Symbolic),
        };
        Self {
            label: label.into(),
            inverse,
            deriv_abs,
            deriv_source,
            forward: None,
        }
    }

    pub fn with_forward(mut self, forward: Expr) -> Self {
        self.forward = Some(forward);
        self
    }

    fn bind_param(&self, c: &Rational) -> Branch {
        Branch {
            label: self.label.clone(),
            inverse: self.inverse.bind_param(c),
            deriv_abs: self.deriv_abs.bind_param(c),
            deriv_source: self.deriv_source,
            forward: self.forward.as_ref().map(|f| f.bind_param(c)),
        }
    }
}

/// An expanding full-branch map on `[a, b]`.
#[derive(Debug, Clone)]
pub struct MapSpec {
    pub name: String,
    pub interval: Interval,
    pub branches: Vec<Branch>,
    pub parameter: Option<Rational>,
    /// Topological mixing is not machine-checked; this records the
    /// user's (or the catalog's) assertion.
    pub mixing_asserted: bool,
    /// `min 1/|f_k'|` over the default grid at 64 digits.
    pub expansion_floor: Real,
    pub warnings: Vec<String>,
}

impl MapSpec {
    /// Builds a map, binding the parameter `c` into every branch and
    /// estimating the expansion floor on the default grid.
    pub fn new(
        name: impl Into<String>,
        interval: Interval,
        branches: Vec<Branch>,
        parameter: Option<Rational>,
        mixing_asserted: bool,
    ) -> Result<Self> {
        let name = name.into();
        if branches.len() < 2 {
            return Err(Error::InvalidMap(format!(
                "a full-branch map needs at least 2 branches, `{name}` has {}",
                branches.len()
            )));
        }
        let uses_param = branches
            .iter()
            .any(|b| b.inverse.uses_param() || b.deriv_abs.uses_param());
        let branches = match (&parameter, uses_param) {
            (Some(c), _) => branches.iter().map(|b| b.bind_param(c)).collect(),
            (None, true) => {
                return Err(Error::InvalidMap(format!(
                    "`{name}` uses the parameter c but no value was given"
                )))
            }
            (None, false) => branches,
        };
        let ctx = PrecisionContext::new(FLOOR_DIGITS)?;
        let mut spec = Self {
            name,
            interval,
            branches,
            parameter,
            mixing_asserted,
            expansion_floor: ctx.zero(),
            warnings: Vec::new(),
        };
        let report = validate_map(&spec, DEFAULT_GRID, &ctx)?;
        if let Some(err) = report.first_error {
            return Err(err);
        }
        spec.expansion_floor = report.expansion_floor;
        Ok(spec)
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn is_expanding(&self) -> bool {
        self.expansion_floor > 1u32
    }

    /// `f_k(x)` with the domain precondition checked.
    pub fn eval_branch(&self, k: usize, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
        self.check_domain(x)?;
        eval_branch(&self.branches[k], x, ctx)
    }

    fn check_domain(&self, x: &Real) -> Result<()> {
        if !self.interval.contains(x) {
            return Err(Error::OutOfRange {
                what: "x",
                value: format_real(x, 20),
                range: self.interval.to_display(),
            });
        }
        Ok(())
    }
}

/// `eval_branch`: numeric value of the inverse branch.
pub fn eval_branch(b: &Branch, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    b.inverse.eval(x, None, ctx)
}

/// `|f_k'(x)|`, rejecting zero (a critical point).
pub fn branch_deriv_abs(b: &Branch, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let d = b.deriv_abs.eval(x, None, ctx)?.abs();
    if d.is_zero() || !d.is_finite() {
        return Err(Error::CriticalPoint {
            branch: b.label.clone(),
            x: format_real(x, 20),
            value: format_real(&d, 10),
        });
    }
    Ok(d)
}

/// `eval_branch_deriv_abs`: `|f_k'(x)|^t = exp(t log |f_k'(x)|)`.
pub fn eval_branch_deriv_abs(
    b: &Branch,
    x: &Real,
    t: &Real,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let d = branch_deriv_abs(b, x, ctx)?;
    Ok(weight_pow(&d, t, ctx))
}

pub(crate) fn weight_pow(d: &Real, t: &Real, ctx: &PrecisionContext) -> Real {
    let log = ctx.real(d.ln_ref());
    (log * t).exp()
}

/// Outcome of the grid checks behind `validate_map`.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub map_name: String,
    pub grid_size: usize,
    /// `min over branches and grid of 1/|f_k'(x)|`.
    pub expansion_floor: Real,
    pub branch_floors: Vec<Real>,
    /// Largest distance of a branch image from `[a, b]` (0 when inside).
    pub max_range_deviation: Real,
    pub mixing_asserted: bool,
    pub passed: bool,
    pub failures: Vec<String>,
    /// First evaluation error, if any.
    pub first_error: Option<Error>,
}

impl ValidationReport {
    pub fn note(&self) -> &'static str {
        "grid-based check: certifies expansion and range only at the grid points"
    }
}

/// `validate_map`: expansion floor and branch-range check on an
/// equispaced grid including both endpoints.
pub fn validate_map(
    spec: &MapSpec,
    grid_size: usize,
    ctx: &PrecisionContext,
) -> Result<ValidationReport> {
    if grid_size < 64 {
        return Err(Error::InvalidArgument(format!(
            "validation grid must have at least 64 points, got {grid_size}"
        )));
    }
    let a = ctx.real(&spec.interval.a);
    let b = ctx.real(&spec.interval.b);
    let step = ctx.real(&b - &a) / (grid_size as u32 - 1);
    let mut failures = Vec::new();
    let mut first_error = None;
    let mut branch_floors = Vec::with_capacity(spec.branches.len());
    let mut deviation = ctx.zero();
    for branch in &spec.branches {
        let mut floor: Option<Real> = None;
        for i in 0..grid_size {
            let x = if i + 1 == grid_size {
                b.clone()
            } else {
                ctx.real(&step * i as u32) + &a
            };
            let image = match eval_branch(branch, &x, ctx) {
                Ok(v) => v,
                Err(e) => {
                    failures.push(format!("branch {}: {e}", branch.label));
                    first_error.get_or_insert(e);
                    break;
                }
            };
            let below = ctx.real(&a - &image);
            let above = ctx.real(&image - &b);
            for d in [below, above] {
                if d > deviation {
                    deviation = d;
                }
            }
            match branch_deriv_abs(branch, &x, ctx) {
                Ok(d) => {
                    let inv = ctx.real(d.recip_ref());
                    if floor.as_ref().is_none_or(|f| inv < *f) {
                        floor = Some(inv);
                    }
                }
                Err(e) => {
                    failures.push(format!("branch {}: {e}", branch.label));
                    first_error.get_or_insert(e);
                    break;
                }
            }
        }
        branch_floors.push(floor.unwrap_or_else(|| ctx.zero()));
    }
    let expansion_floor = branch_floors
        .iter()
        .cloned()
        .reduce(|x, y| if y < x { y } else { x })
        .unwrap_or_else(|| ctx.zero());
    if expansion_floor <= 1u32 {
        failures.push(format!(
            "not expanding: min 1/|f'| over the grid is {}",
            format_real(&expansion_floor, 12)
        ));
    }
    if deviation > ctx.tolerance(10) {
        failures.push(format!(
            "branch images leave {} by up to {}",
            spec.interval.to_display(),
            format_real(&deviation, 12)
        ));
    }
    Ok(ValidationReport {
        map_name: spec.name.clone(),
        grid_size,
        expansion_floor,
        branch_floors,
        max_range_deviation: deviation,
        mixing_asserted: spec.mixing_asserted,
        passed: failures.is_empty(),
        failures,
        first_error,
    })
}
