//! Collocation matrices of the transfer operator
//! `[L_t h](x) = sum_i |f_i'(x)|^t h(f_i(x))`, their leading left
//! eigenpairs, and the test polynomials built from them.

use rayon::prelude::*;

use crate::chebyshev::{
    build_nodes, chebyshev_nodes, lagrange_all, values_to_coeffs, ChebPoly, NodeSet,
};
use crate::error::{Error, Result};
use crate::maps::{branch_deriv_abs, eval_branch, eval_branch_deriv_abs, weight_pow, MapSpec};
use crate::precision::{format_real, PrecisionContext, Real};

/// Smallest node count accepted for test polynomials.
pub const MIN_TEST_NODES: usize = 8;

/// `apply_transfer`: `[L_t h](x)`.
pub fn apply_transfer(
    map: &MapSpec,
    t: &Real,
    h: &ChebPoly,
    x: &Real,
    ctx: &PrecisionContext,
) -> Result<Real> {
    if !map.interval.contains(x) {
        return Err(Error::OutOfRange {
            what: "x",
            value: format_real(x, 20),
            range: map.interval.to_display(),
        });
    }
    let mut acc = ctx.zero();
    for b in &map.branches {
        let y = eval_branch(b, x, ctx)?;
        let w = eval_branch_deriv_abs(b, x, t, ctx)?;
        acc += w * h.eval(&y, ctx)?;
    }
    Ok(acc)
}

/// `M^t` with `entries[j][k] = [L_t l_j](x_k)`.
#[derive(Debug, Clone)]
pub struct CollocationMatrix {
    pub m: usize,
    pub t: Real,
    pub entries: Vec<Vec<Real>>,
    pub map_name: String,
}

impl CollocationMatrix {
    /// Row vector times matrix: `(v M)_k = sum_j v_j M_jk`.
    pub fn left_mul(&self, v: &[Real], ctx: &PrecisionContext) -> Vec<Real> {
        let mut out = vec![ctx.zero(); self.m];
        for (row, vj) in self.entries.iter().zip(v) {
            for (o, mjk) in out.iter_mut().zip(row) {
                *o += ctx.real(vj * mjk);
            }
        }
        out
    }

    pub fn column_sum(&self, k: usize, ctx: &PrecisionContext) -> Real {
        self.entries
            .iter()
            .fold(ctx.zero(), |acc, row| acc + &row[k])
    }
}

/// `build_collocation_matrix`. Columns are built concurrently.
pub fn build_collocation_matrix(
    map: &MapSpec,
    t: &Real,
    nodes: &NodeSet,
    ctx: &PrecisionContext,
) -> Result<CollocationMatrix> {
    if nodes.interval != map.interval {
        return Err(Error::InvalidArgument(format!(
            "nodes were built for {} but the map lives on {}",
            nodes.interval.to_display(),
            map.interval.to_display()
        )));
    }
    let m = nodes.m;
    let columns: Vec<Vec<Real>> = (0..m)
        .into_par_iter()
        .map(|k| collocation_column(map, t, nodes, k, ctx))
        .collect::<Result<_>>()?;
    let mut entries = vec![Vec::with_capacity(m); m];
    for (k, col) in columns.into_iter().enumerate() {
        for (j, v) in col.into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { j, k });
            }
            entries[j].push(v);
        }
    }
    Ok(CollocationMatrix {
        m,
        t: t.clone(),
        entries,
        map_name: map.name.clone(),
    })
}

/// `m x m` matrix on freshly generated nodes; `m = 1` is allowed here.
pub fn collocation_matrix(
    map: &MapSpec,
    t: &Real,
    m: usize,
    ctx: &PrecisionContext,
) -> Result<CollocationMatrix> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "matrix dimension must be positive".into(),
        ));
    }
    build_collocation_matrix(map, t, &build_nodes(m, &map.interval, ctx), ctx)
}

fn collocation_column(
    map: &MapSpec,
    t: &Real,
    nodes: &NodeSet,
    k: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<Real>> {
    let x = &nodes.mapped_nodes[k];
    let mut col = vec![ctx.zero(); nodes.m];
    for b in &map.branches {
        let y = eval_branch(b, x, ctx)?;
        let w = weight_pow(&branch_deriv_abs(b, x, ctx)?, t, ctx);
        let u = map.interval.to_reference(&y, ctx);
        let ell = lagrange_all(nodes, &u, ctx)?;
        for (c, l) in col.iter_mut().zip(&ell) {
            *c += ctx.real(&w * l);
        }
    }
    Ok(col)
}

/// Leading left eigenpair of a collocation matrix.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub eigenvalue: Real,
    /// Normalized so that the largest entry is 1.
    pub vector: Vec<Real>,
    /// `sup |v M - lambda v|`.
    pub residual: Real,
    pub iterations: usize,
}

/// Power-iteration controls; `None` picks the context defaults.
#[derive(Debug, Clone, Default)]
pub struct PowerOptions {
    pub tol: Option<Real>,
    pub max_iter: Option<usize>,
}

impl PowerOptions {
    pub fn tolerance(&self, ctx: &PrecisionContext) -> Real {
        self.tol.clone().unwrap_or_else(|| ctx.tolerance(20))
    }

    pub fn iterations(&self, ctx: &PrecisionContext) -> usize {
        self.max_iter.unwrap_or(100 * ctx.digits() as usize)
    }
}

/// `leading_left_eigenpair`: power iteration from the all-ones vector,
/// normalizing each iterate by its largest entry.
pub fn leading_left_eigenpair(
    matrix: &CollocationMatrix,
    tol: &Real,
    max_iter: usize,
    ctx: &PrecisionContext,
) -> Result<EigenPair> {
    if *tol <= 0u32 || tol.is_nan() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let mut v = vec![ctx.one(); matrix.m];
    let mut residual = ctx.zero();
    for iteration in 1..=max_iter {
        let w = matrix.left_mul(&v, ctx);
        let lambda = w
            .iter()
            .fold(None::<&Real>, |best, x| match best {
                Some(b) if b >= x => Some(b),
                _ => Some(x),
            })
            .cloned()
            .unwrap_or_else(|| ctx.zero());
        if lambda <= 0u32 {
            return Err(Error::Positivity(format!(
                "power iterate of {} has no positive entry; raise m",
                matrix.map_name
            )));
        }
        let next: Vec<Real> = w.iter().map(|x| ctx.real(x / &lambda)).collect();
        let change = next
            .iter()
            .zip(&v)
            .map(|(a, b)| ctx.real(a - b).abs())
            .fold(ctx.zero(), |acc, d| if d > acc { d } else { acc });
        // v M - lambda v = lambda (next - v)
        residual = change * &lambda;
        v = next;
        if residual < *tol {
            if let Some(k) = v.iter().position(|x| *x <= 0u32) {
                return Err(Error::Positivity(format!(
                    "eigenvector entry {k} of {} is {} <= 0; raise m",
                    matrix.map_name,
                    format_real(&v[k], 10)
                )));
            }
            return Ok(EigenPair {
                eigenvalue: lambda,
                vector: v,
                residual,
                iterations: iteration,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: format_real(&residual, 6),
    })
}

/// Test polynomial together with the eigenpair it came from.
#[derive(Debug, Clone)]
pub struct TestPolynomial {
    pub poly: ChebPoly,
    pub eigen: EigenPair,
}

/// `build_test_polynomial` with explicit power-iteration controls.
pub fn test_polynomial(
    map: &MapSpec,
    t: &Real,
    m: usize,
    opts: &PowerOptions,
    ctx: &PrecisionContext,
) -> Result<TestPolynomial> {
    if m < MIN_TEST_NODES {
        return Err(Error::InvalidArgument(format!(
            "test polynomials need at least {MIN_TEST_NODES} nodes, got {m}"
        )));
    }
    let nodes = chebyshev_nodes(m, &map.interval, ctx)?;
    let matrix = build_collocation_matrix(map, t, &nodes, ctx)?;
    let eigen = leading_left_eigenpair(&matrix, &opts.tolerance(ctx), opts.iterations(ctx), ctx)?;
    let poly = values_to_coeffs(&eigen.vector, &map.interval, ctx)?;
    Ok(TestPolynomial { poly, eigen })
}

/// `build_test_polynomial`.
pub fn build_test_polynomial(
    map: &MapSpec,
    t: &Real,
    m: usize,
    ctx: &PrecisionContext,
) -> Result<ChebPoly> {
    Ok(test_polynomial(map, t, m, &PowerOptions::default(), ctx)?.poly)
}

/// `invariant_density`: the `t = 1` test polynomial normalized to unit mass.
pub fn invariant_density(map: &MapSpec, m: usize, ctx: &PrecisionContext) -> Result<ChebPoly> {
    let p = build_test_polynomial(map, &ctx.one(), m, ctx)?;
    let mass = p.integral(ctx);
    if mass <= 0u32 {
        return Err(Error::Positivity(format!(
            "density polynomial of {} has nonpositive mass",
            map.name
        )));
    }
    Ok(p.scaled(&ctx.real(mass.recip_ref()), ctx))
}

/// `int_I log|f'| rho dx`, rewritten through the inverse branches as
/// `-sum_k int_I |f_k'| log|f_k'| rho(f_k(y)) dy` and integrated by
/// Chebyshev interpolation at `nodes` points.
pub fn lyapunov_from_density(
    map: &MapSpec,
    density: &ChebPoly,
    nodes: usize,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let grid = chebyshev_nodes(nodes, &map.interval, ctx)?;
    let values: Vec<Real> = grid
        .mapped_nodes
        .par_iter()
        .map(|y| {
            let mut acc = ctx.zero();
            for b in &map.branches {
                let d = branch_deriv_abs(b, y, ctx)?;
                let rho = density.eval(&eval_branch(b, y, ctx)?, ctx)?;
                let log = ctx.real(d.ln_ref());
                acc -= d * log * rho;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(values_to_coeffs(&values, &map.interval, ctx)?.integral(ctx))
}
