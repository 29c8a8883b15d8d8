//! Chebyshev machinery on `[-1, 1]` and its affine images: first-kind nodes,
//! basis evaluation, the node-value/coefficient transform, Clenshaw
//! summation and Lagrange basis polynomials on the nodes.
//!
//! Map-domain quantities are moved into reference coordinates at the
//! boundary of every operation; nothing is stored in both coordinate
//! systems except the node set, which keeps its mapped copy for callers.

use crate::error::{Error, Result};
use crate::precision::{format_real, Interval, PrecisionContext, Real};

/// Guard digits granted to round-trip comparisons of the O(m²) transforms.
pub const TRANSFORM_GUARD: i64 = 5;

/// Roots of `T_m` and their images in the map's domain.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub m: usize,
    /// `cos(pi (2k + 1) / (2m))`, strictly decreasing in `k`.
    pub nodes: Vec<Real>,
    pub interval: Interval,
    /// `a + (nodes[k] + 1)(b - a)/2`.
    pub mapped_nodes: Vec<Real>,
    /// `T_m'(nodes[j]) = m (-1)^j / sin(theta_j)`.
    derivatives: Vec<Real>,
}

/// Polynomial in the Chebyshev basis over an interval.
#[derive(Debug, Clone)]
pub struct ChebPoly {
    /// Coefficient of `T_j` at index `j`.
    pub coeffs: Vec<Real>,
    pub interval: Interval,
}

/// `chebyshev_nodes`.
pub fn chebyshev_nodes(m: usize, interval: &Interval, ctx: &PrecisionContext) -> Result<NodeSet> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "at least 2 Chebyshev nodes are required, got {m}"
        )));
    }
    Ok(build_nodes(m, interval, ctx))
}

/// Node construction without the `m >= 2` contract; the degenerate single
/// node set is what a `1 x 1` collocation matrix needs.
pub(crate) fn build_nodes(m: usize, interval: &Interval, ctx: &PrecisionContext) -> NodeSet {
    let pi = ctx.pi();
    let mut nodes = Vec::with_capacity(m);
    let mut derivatives = Vec::with_capacity(m);
    for k in 0..m {
        let theta = ctx.real(&pi * (2 * k as u32 + 1)) / (2 * m as u32);
        let (sin, cos) = theta.sin_cos(ctx.real(0));
        let mut d = ctx.real(m as u32) / sin;
        if k % 2 == 1 {
            d = -d;
        }
        nodes.push(cos);
        derivatives.push(d);
    }
    let mapped_nodes = nodes
        .iter()
        .map(|u| interval.from_reference(u, ctx))
        .collect();
    NodeSet {
        m,
        nodes,
        interval: interval.clone(),
        mapped_nodes,
        derivatives,
    }
}

impl NodeSet {
    pub fn derivative(&self, j: usize) -> &Real {
        &self.derivatives[j]
    }
}

/// `cheb_basis_eval`: `T_j(u) = cos(j arccos u)`.
pub fn cheb_basis_eval(j: usize, u: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if u.clone().abs() > 1u32 {
        return Err(Error::OutOfRange {
            what: "u",
            value: format_real(u, 20),
            range: "[-1, 1]".into(),
        });
    }
    Ok(chebyshev_t(j, u, ctx))
}

fn chebyshev_t(j: usize, u: &Real, ctx: &PrecisionContext) -> Real {
    let theta = ctx.real(u.acos_ref());
    (theta * j as u32).cos()
}

/// Maps `x` into `[-1, 1]`, absorbing rounding overshoot of at most
/// `10^(-digits + 10)` and rejecting anything further out.
pub fn reference_coordinate(interval: &Interval, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let u = interval.to_reference(x, ctx);
    clamp_unit(u, ctx).ok_or_else(|| Error::OutOfRange {
        what: "x",
        value: format_real(x, 20),
        range: interval.to_display(),
    })
}

pub(crate) fn clamp_unit(u: Real, ctx: &PrecisionContext) -> Option<Real> {
    if u > 1u32 {
        if ctx.real(&u - 1u32) > ctx.tolerance(10) {
            return None;
        }
        return Some(ctx.one());
    }
    if u < -1i32 {
        if ctx.real(&u + 1u32) < -ctx.tolerance(10) {
            return None;
        }
        return Some(-ctx.one());
    }
    Some(u)
}

/// `cos(pi r / (2m))` for `r in 0..4m`, from `m + 1` cosine evaluations.
pub(crate) fn quarter_wave_table(m: usize, ctx: &PrecisionContext) -> Vec<Real> {
    let pi = ctx.pi();
    let quarter: Vec<Real> = (0..=m)
        .map(|r| (ctx.real(&pi * r as u32) / (2 * m as u32)).cos())
        .collect();
    (0..4 * m)
        .map(|r| {
            if r <= m {
                quarter[r].clone()
            } else if r <= 2 * m {
                -quarter[2 * m - r].clone()
            } else if r <= 3 * m {
                -quarter[r - 2 * m].clone()
            } else {
                quarter[4 * m - r].clone()
            }
        })
        .collect()
}

/// `values_to_coeffs`: discrete Chebyshev transform of node values.
///
/// `a_0 = (1/m) sum v_k`, `a_j = (2/m) sum v_k T_j(x_k)`.
pub fn values_to_coeffs(
    values: &[Real],
    interval: &Interval,
    ctx: &PrecisionContext,
) -> Result<ChebPoly> {
    let m = values.len();
    if m == 0 {
        return Err(Error::InvalidArgument(
            "cannot transform an empty list of node values".into(),
        ));
    }
    let table = quarter_wave_table(m, ctx);
    let period = 4 * m;
    let mut coeffs = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = ctx.zero();
        for (k, v) in values.iter().enumerate() {
            let r = (j * (2 * k + 1)) % period;
            acc += ctx.real(v * &table[r]);
        }
        acc *= if j == 0 { 1u32 } else { 2u32 };
        acc /= m as u32;
        coeffs.push(acc);
    }
    Ok(ChebPoly {
        coeffs,
        interval: interval.clone(),
    })
}

/// `clenshaw_eval`.
pub fn clenshaw_eval(p: &ChebPoly, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if !p.interval.contains(x) {
        return Err(Error::OutOfRange {
            what: "x",
            value: format_real(x, 20),
            range: p.interval.to_display(),
        });
    }
    let u = clamp_unit(p.interval.to_reference(x, ctx), ctx).unwrap_or_else(|| ctx.one());
    Ok(p.eval_reference(&u, ctx))
}

impl ChebPoly {
    pub fn new(coeffs: Vec<Real>, interval: Interval) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a Chebyshev polynomial needs at least one coefficient".into(),
            ));
        }
        Ok(Self { coeffs, interval })
    }

    pub fn constant(c: Real, interval: Interval) -> Self {
        Self {
            coeffs: vec![c],
            interval,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw recurrence at reference coordinate `u`.
    pub fn eval_reference(&self, u: &Real, ctx: &PrecisionContext) -> Real {
        let two_u = ctx.real(u * 2u32);
        let mut b1 = ctx.zero();
        let mut b2 = ctx.zero();
        for a in self.coeffs.iter().skip(1).rev() {
            let mut b0 = ctx.real(&two_u * &b1);
            b0 -= &b2;
            b0 += a;
            b2 = std::mem::replace(&mut b1, b0);
        }
        let mut result = ctx.real(u * &b1);
        result -= &b2;
        result += &self.coeffs[0];
        result
    }

    /// Point value at `x` in the map domain, tolerating rounding overshoot.
    pub fn eval(&self, x: &Real, ctx: &PrecisionContext) -> Result<Real> {
        let u = reference_coordinate(&self.interval, x, ctx)?;
        Ok(self.eval_reference(&u, ctx))
    }

    /// `int_a^b p(x) dx` from the coefficients.
    pub fn integral(&self, ctx: &PrecisionContext) -> Real {
        let mut acc = ctx.zero();
        for (j, a) in self.coeffs.iter().enumerate().step_by(2) {
            // int_{-1}^{1} T_j = 2 / (1 - j^2) for even j
            let denom = 1i64 - (j as i64) * (j as i64);
            acc += ctx.real(a * 2u32) / denom;
        }
        acc * ctx.real(&self.interval.length()) / 2u32
    }

    pub fn scaled(&self, factor: &Real, ctx: &PrecisionContext) -> ChebPoly {
        ChebPoly {
            coeffs: self.coeffs.iter().map(|a| ctx.real(a * factor)).collect(),
            interval: self.interval.clone(),
        }
    }

    /// Coefficient vector zero-padded to `len`: the exact
    /// degree-`(len - 1)` interpolant of this polynomial.
    pub fn padded(&self, len: usize, ctx: &PrecisionContext) -> ChebPoly {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < len {
            coeffs.push(ctx.zero());
        }
        ChebPoly {
            coeffs,
            interval: self.interval.clone(),
        }
    }

    /// Naive `sum a_j T_j(u)` in trigonometric form, for cross-checks.
    pub fn eval_direct(&self, u: &Real, ctx: &PrecisionContext) -> Real {
        let mut acc = ctx.zero();
        for (j, a) in self.coeffs.iter().enumerate() {
            acc += ctx.real(a * &chebyshev_t(j, u, ctx));
        }
        acc
    }
}

/// `lagrange_node_eval`: `l_j(y)` for the Lagrange basis on the nodes.
pub fn lagrange_node_eval(
    nodes: &NodeSet,
    j: usize,
    y: &Real,
    ctx: &PrecisionContext,
) -> Result<Real> {
    if j >= nodes.m {
        return Err(Error::InvalidArgument(format!(
            "node index {j} out of range 0..{}",
            nodes.m
        )));
    }
    let y = checked_unit(y, ctx)?;
    let tm = chebyshev_t(nodes.m, &y, ctx);
    Ok(lagrange_with_tm(
        nodes,
        j,
        &y,
        &tm,
        &near_threshold(ctx),
        ctx,
    ))
}

/// All `m` basis values at `y` (reference coordinates), sharing one
/// evaluation of `T_m(y)`.
pub fn lagrange_all(nodes: &NodeSet, y: &Real, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let y = checked_unit(y, ctx)?;
    let tm = chebyshev_t(nodes.m, &y, ctx);
    let near = near_threshold(ctx);
    Ok((0..nodes.m)
        .map(|j| lagrange_with_tm(nodes, j, &y, &tm, &near, ctx))
        .collect())
}

fn checked_unit(y: &Real, ctx: &PrecisionContext) -> Result<Real> {
    clamp_unit(y.clone(), ctx).ok_or_else(|| Error::OutOfRange {
        what: "y",
        value: format_real(y, 20),
        range: "[-1, 1]".into(),
    })
}

fn near_threshold(ctx: &PrecisionContext) -> Real {
    ctx.ten_pow_neg(f64::from(ctx.digits()) / 2.0)
}

fn lagrange_with_tm(
    nodes: &NodeSet,
    j: usize,
    y: &Real,
    tm: &Real,
    near: &Real,
    ctx: &PrecisionContext,
) -> Real {
    let diff = ctx.real(y - &nodes.nodes[j]);
    if ctx.real(diff.abs_ref()) < *near {
        return lagrange_product(nodes, j, y, ctx);
    }
    let denom = ctx.real(&nodes.derivatives[j] * &diff);
    ctx.real(tm / &denom)
}

/// Explicit product `prod_{k != j} (y - x_k)/(x_j - x_k)`.
fn lagrange_product(nodes: &NodeSet, j: usize, y: &Real, ctx: &PrecisionContext) -> Real {
    let xj = &nodes.nodes[j];
    let mut acc = ctx.one();
    for (k, xk) in nodes.nodes.iter().enumerate() {
        if k == j {
            continue;
        }
        let num = ctx.real(y - xk);
        let den = ctx.real(xj - xk);
        acc *= num;
        acc /= den;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::make_context;
    use rug::Float;

    fn close(a: &Real, b: &Real, tol: &Real) -> bool {
        Float::with_val(a.prec(), a - b).abs() <= *tol
    }

    #[test]
    fn two_nodes_are_plus_minus_half_root_two() {
        let ctx = make_context(60).unwrap();
        let ns = chebyshev_nodes(2, &Interval::symmetric(), &ctx).unwrap();
        let half_root2 = ctx.real(2).sqrt() / 2u32;
        let tol = ctx.tolerance(2);
        assert!(close(&ns.nodes[0], &half_root2, &tol));
        assert!(close(&ns.nodes[1], &(-half_root2), &tol));
    }

    #[test]
    fn three_nodes_are_roots_of_t3() {
        let ctx = make_context(60).unwrap();
        let ns = chebyshev_nodes(3, &Interval::symmetric(), &ctx).unwrap();
        let r = ctx.real(3).sqrt() / 2u32;
        let tol = ctx.tolerance(2);
        assert!(close(&ns.nodes[0], &r, &tol));
        assert!(close(&ns.nodes[1], &ctx.zero(), &tol));
        assert!(close(&ns.nodes[2], &(-r), &tol));
    }

    #[test]
    fn four_hundred_nodes_at_512_digits() {
        let ctx = make_context(512).unwrap();
        let ns = chebyshev_nodes(400, &Interval::unit(), &ctx).unwrap();
        assert_eq!(ns.mapped_nodes.len(), 400);
        let first = (ctx.pi() / 800u32).cos() + 1u32;
        let first = first / 2u32;
        assert!(close(&ns.mapped_nodes[0], &first, &ctx.tolerance(3)));
        for w in ns.nodes.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert!(ns.mapped_nodes.iter().all(|x| *x > 0u32 && *x < 1u32));
    }

    #[test]
    fn single_node_is_rejected() {
        let ctx = make_context(40).unwrap();
        assert!(chebyshev_nodes(1, &Interval::unit(), &ctx).is_err());
    }

    #[test]
    fn basis_values() {
        let ctx = make_context(60).unwrap();
        let tol = ctx.tolerance(3);
        for j in [0, 1, 5, 300] {
            let v = cheb_basis_eval(j, &ctx.one(), &ctx).unwrap();
            assert!(close(&v, &ctx.one(), &tol));
        }
        let v = cheb_basis_eval(2, &ctx.zero(), &ctx).unwrap();
        assert!(close(&v, &ctx.real(-1), &tol));
        assert!(cheb_basis_eval(3, &ctx.parse_real("1.01").unwrap(), &ctx).is_err());
    }

    #[test]
    fn basis_matches_three_term_recurrence() {
        let ctx = make_context(80).unwrap();
        let u = ctx.parse_real("0.3").unwrap();
        // T_{n+1} = 2u T_n - T_{n-1}
        let mut prev = ctx.one();
        let mut cur = u.clone();
        for _ in 1..7 {
            let next = ctx.real(&u * &cur) * 2u32 - &prev;
            prev = cur;
            cur = next;
        }
        let direct = cheb_basis_eval(7, &u, &ctx).unwrap();
        assert!(close(&direct, &cur, &ctx.tolerance(5)));
    }

    #[test]
    fn constant_values_give_constant_coefficients() {
        let ctx = make_context(60).unwrap();
        let c = ctx.parse_real("2.75").unwrap();
        let p = values_to_coeffs(&vec![c.clone(); 9], &Interval::unit(), &ctx).unwrap();
        let tol = ctx.tolerance(TRANSFORM_GUARD);
        assert!(close(&p.coeffs[0], &c, &tol));
        assert!(p.coeffs[1..].iter().all(|a| close(a, &ctx.zero(), &tol)));
    }

    #[test]
    fn t1_values_reproduce_the_basis_vector() {
        let ctx = make_context(60).unwrap();
        let ns = chebyshev_nodes(7, &Interval::symmetric(), &ctx).unwrap();
        let p = values_to_coeffs(&ns.nodes, &Interval::symmetric(), &ctx).unwrap();
        let tol = ctx.tolerance(TRANSFORM_GUARD);
        for (j, a) in p.coeffs.iter().enumerate() {
            let expect = if j == 1 { ctx.one() } else { ctx.zero() };
            assert!(close(a, &expect, &tol), "coefficient {j}");
        }
    }

    #[test]
    fn cubic_expansion() {
        // x^3 = (3 T_1 + T_3) / 4
        let ctx = make_context(60).unwrap();
        let ns = chebyshev_nodes(8, &Interval::symmetric(), &ctx).unwrap();
        let values: Vec<Real> = ns.nodes.iter().map(|x| ctx.real(x * x) * x).collect();
        let p = values_to_coeffs(&values, &Interval::symmetric(), &ctx).unwrap();
        let tol = ctx.tolerance(TRANSFORM_GUARD);
        let expect = [0.0, 0.75, 0.0, 0.25, 0.0, 0.0, 0.0, 0.0];
        for (a, e) in p.coeffs.iter().zip(expect) {
            assert!(close(a, &ctx.real(e), &tol));
        }
    }

    #[test]
    fn empty_values_are_rejected() {
        let ctx = make_context(40).unwrap();
        assert!(values_to_coeffs(&[], &Interval::unit(), &ctx).is_err());
    }

    #[test]
    fn clenshaw_examples() {
        let ctx = make_context(60).unwrap();
        let tol = ctx.tolerance(TRANSFORM_GUARD);
        let one = ChebPoly::constant(ctx.one(), Interval::symmetric());
        let x = ctx.parse_real("-0.7").unwrap();
        assert!(close(
            &clenshaw_eval(&one, &x, &ctx).unwrap(),
            &ctx.one(),
            &tol
        ));

        let t1 = ChebPoly::new(vec![ctx.zero(), ctx.one()], Interval::symmetric()).unwrap();
        let q = ctx.parse_real("0.25").unwrap();
        assert!(close(&clenshaw_eval(&t1, &q, &ctx).unwrap(), &q, &tol));

        let cubic = ChebPoly::new(
            vec![ctx.zero(), ctx.real(0.75), ctx.zero(), ctx.real(0.25)],
            Interval::symmetric(),
        )
        .unwrap();
        let v = clenshaw_eval(&cubic, &ctx.real(0.5), &ctx).unwrap();
        assert!(close(&v, &ctx.real(0.125), &tol));

        assert!(clenshaw_eval(&cubic, &ctx.real(1.5), &ctx).is_err());
    }

    #[test]
    fn lagrange_interpolation_property() {
        let ctx = make_context(60).unwrap();
        let ns = chebyshev_nodes(6, &Interval::symmetric(), &ctx).unwrap();
        let tol = ctx.tolerance(5);
        for j in 0..6 {
            for k in 0..6 {
                let v = lagrange_node_eval(&ns, j, &ns.nodes[k], &ctx).unwrap();
                let expect = if j == k { ctx.one() } else { ctx.zero() };
                assert!(close(&v, &expect, &tol), "l_{j}(x_{k})");
            }
        }
    }

    #[test]
    fn lagrange_closed_form_for_three_nodes() {
        // T_3(0.5) / (T_3'(0) * 0.5) = (-1) / (-3 * 0.5) = 2/3
        let ctx = make_context(60).unwrap();
        let ns = chebyshev_nodes(3, &Interval::symmetric(), &ctx).unwrap();
        let v = lagrange_node_eval(&ns, 1, &ctx.real(0.5), &ctx).unwrap();
        let expect = ctx.real(2) / 3u32;
        assert!(close(&v, &expect, &ctx.tolerance(5)));
    }

    #[test]
    fn near_node_switches_to_product_formula() {
        let ctx = make_context(60).unwrap();
        let ns = chebyshev_nodes(5, &Interval::symmetric(), &ctx).unwrap();
        let y = ctx.real(&ns.nodes[2] + ctx.ten_pow_neg(45.0));
        let v = lagrange_node_eval(&ns, 2, &y, &ctx).unwrap();
        assert!(close(&v, &ctx.one(), &ctx.tolerance(20)));
        let w = lagrange_node_eval(&ns, 0, &y, &ctx).unwrap();
        assert!(close(&w, &ctx.zero(), &ctx.tolerance(20)));
    }

    #[test]
    fn integral_of_chebyshev_polynomials() {
        let ctx = make_context(50).unwrap();
        // int_0^1 (T_0 + T_2)(2x - 1) dx = (2 + 2/(1-4)) / 2 = 2/3
        let p = ChebPoly::new(vec![ctx.one(), ctx.zero(), ctx.one()], Interval::unit()).unwrap();
        let expect = ctx.real(2) / 3u32;
        assert!(close(&p.integral(&ctx), &expect, &ctx.tolerance(3)));
    }
}
