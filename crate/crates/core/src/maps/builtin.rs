//! Closed-form catalog maps.

use rug::Rational;

use super::{Branch, MapSpec};
use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::precision::{parse_rational, Interval};

/// Parametrized built-ins usable in sweeps.
pub const FAMILY_NAMES: [&str; 2] = ["lanford_family", "bent_tent"];

/// All catalog names.
pub const BUILTIN_NAMES: [&str; 6] = [
    "doubling",
    "lanford",
    "lanford_family",
    "bent_tent",
    "bent_baker",
    "linear",
];

fn e(src: &str) -> Expr {
    parse_expr(src).unwrap_or_else(|err| panic!("built-in formula `{src}`: {err}"))
}

fn branch(label: &str, inverse: &str, deriv: &str, forward: &str) -> Branch {
    Branch::new(label, e(inverse), Some(e(deriv))).with_forward(e(forward))
}

/// Splits `name(arg)` into its parts; a bare name has no argument.
fn split_call(name: &str) -> Result<(&str, Option<&str>)> {
    let name = name.trim();
    match name.split_once('(') {
        Some((head, rest)) => {
            let arg = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::UnknownMap(name.to_string()))?;
            let arg = arg.trim();
            let arg = arg
                .strip_prefix("c=")
                .or_else(|| arg.strip_prefix("n="))
                .unwrap_or(arg);
            Ok((head.trim(), Some(arg.trim())))
        }
        None => Ok((name, None)),
    }
}

/// `builtin`: looks up a catalog map. The parameter may be passed
/// separately or inline as `bent_tent(0.11)`.
pub fn builtin(name: &str, param: Option<&str>) -> Result<MapSpec> {
    let (head, inline) = split_call(name)?;
    let param = match (inline, param) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidArgument(format!(
                "parameter for `{head}` given twice"
            )))
        }
        (a, b) => a.or(b),
    };
    let needs = |what: &str| {
        param.ok_or_else(|| Error::InvalidArgument(format!("`{head}` needs a parameter {what}")))
    };
    let no_param = || match param {
        Some(_) => Err(Error::InvalidArgument(format!(
            "`{head}` takes no parameter"
        ))),
        None => Ok(()),
    };
    match head {
        "doubling" => {
            no_param()?;
            linear_named("doubling", 2, None)
        }
        "lanford" => {
            no_param()?;
            lanford()
        }
        "bent_baker" => {
            no_param()?;
            bent_baker()
        }
        "lanford_family" => lanford_family(&parse_rational(needs("c")?)?),
        "bent_tent" => bent_tent(&parse_rational(needs("c")?)?),
        "linear" => {
            let text = needs("n")?;
            let n: u32 = text.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("linear(n) needs an integer n >= 2, got `{text}`"))
            })?;
            linear(n)
        }
        _ => Err(Error::UnknownMap(name.to_string())),
    }
}

/// Family member at an exact parameter value.
pub fn family_map(family: &str, c: &Rational) -> Result<MapSpec> {
    match family {
        "lanford_family" => lanford_family(c),
        "bent_tent" => bent_tent(c),
        _ => Err(Error::UnknownMap(family.to_string())),
    }
}

/// `x -> n x mod 1` on `[0, 1]`.
pub fn linear(n: u32) -> Result<MapSpec> {
    linear_named("linear", n, Some(Rational::from(n)))
}

fn linear_named(name: &str, n: u32, parameter: Option<Rational>) -> Result<MapSpec> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "n",
            value: n.to_string(),
            range: "n >= 2".into(),
        });
    }
    let branches = (0..n)
        .map(|k| {
            branch(
                &format!("f{}", k + 1),
                &format!("(x + {k})/{n}"),
                &format!("1/{n}"),
                &format!("{n}*x - {k}"),
            )
        })
        .collect();
    // linear(n) carries n only as a label; no expression refers to c
    let mut spec = MapSpec::new(name, Interval::unit(), branches, None, true)?;
    spec.parameter = parameter;
    Ok(spec)
}

fn lanford() -> Result<MapSpec> {
    let branches = vec![
        branch(
            "f1",
            "(5 - sqrt(25 - 8*x))/2",
            "2/sqrt(25 - 8*x)",
            "2*x + x*(1 - x)/2",
        ),
        branch(
            "f2",
            "(5 - sqrt(17 - 8*x))/2",
            "2/sqrt(17 - 8*x)",
            "2*x + x*(1 - x)/2 - 1",
        ),
    ];
    MapSpec::new("lanford", Interval::unit(), branches, None, true)
}

/// `x -> 2x + c x (1 - x) mod 1`, `0 <= c < 1`.
fn lanford_family(c: &Rational) -> Result<MapSpec> {
    if *c < 0 || *c >= 1 {
        return Err(Error::OutOfRange {
            what: "c",
            value: c.to_string(),
            range: "0 <= c < 1".into(),
        });
    }
    if *c == 0 {
        let mut spec = linear_named("lanford_family", 2, None)?;
        spec.parameter = Some(c.clone());
        return Ok(spec);
    }
    // rationalized root form; avoids the cancellation in (2+c-sqrt(D))/(2c)
    let branches = vec![
        branch(
            "f1",
            "2*x/(2 + c + sqrt((2 + c)^2 - 4*c*x))",
            "1/sqrt((2 + c)^2 - 4*c*x)",
            "2*x + c*x*(1 - x)",
        ),
        branch(
            "f2",
            "2*(x + 1)/(2 + c + sqrt((2 + c)^2 - 4*c*(x + 1)))",
            "1/sqrt((2 + c)^2 - 4*c*(x + 1))",
            "2*x + c*x*(1 - x) - 1",
        ),
    ];
    let mut spec = MapSpec::new(
        "lanford_family",
        Interval::unit(),
        branches,
        Some(c.clone()),
        true,
    )?;
    if *c > (96, 100) {
        spec.warnings.push(format!(
            "c = {c} is in the weakly hyperbolic zone c > 0.96; expect wide or failed enclosures"
        ));
    }
    Ok(spec)
}

/// Tent map bent by a Möbius factor on `[-1, 1]`, `-1/4 <= c <= 1/2`.
fn bent_tent(c: &Rational) -> Result<MapSpec> {
    if *c < (-1, 4) || *c > (1, 2) {
        return Err(Error::OutOfRange {
            what: "c",
            value: c.to_string(),
            range: "-1/4 <= c <= 1/2".into(),
        });
    }
    let forward = "(1 - 2*(c + 1)*abs(x))/(1 + 2*c*abs(x))";
    let branches = vec![
        branch(
            "f1",
            "(1 - x)/(2*c*x + 2*(c + 1))",
            "(1 + 2*c)/(2*(1 + c + c*x)^2)",
            forward,
        ),
        branch(
            "f2",
            "-(1 - x)/(2*c*x + 2*(c + 1))",
            "(1 + 2*c)/(2*(1 + c + c*x)^2)",
            forward,
        ),
    ];
    let mut spec = MapSpec::new(
        "bent_tent",
        Interval::symmetric(),
        branches,
        Some(c.clone()),
        true,
    )?;
    if *c < (-24, 100) || *c > (45, 100) {
        spec.warnings.push(format!(
            "c = {c} is close to the end of -1/4 <= c <= 1/2 where expansion degenerates; \
             the computation may be unstable"
        ));
    }
    Ok(spec)
}

/// Full-branch map `g(x) mod 1` with the odd-symmetric cubic
/// `g(x) = (4 sqrt6/3) x^3 - 2 sqrt6 x^2 + (2 + 2 sqrt6/3) x`.
/// Inverse branches come from Cardano's formula for the depressed cubic
/// in `z = y - 1/2`.
fn bent_baker() -> Result<MapSpec> {
    let p3 = "((sqrt(6) - 1)/4)^3/27";
    let z1 = format!(
        "(sqrt(6*(1 - x)^2/256 + {p3}) - sqrt(6)*(1 - x)/16)^(1/3) \
         - (sqrt(6*(1 - x)^2/256 + {p3}) + sqrt(6)*(1 - x)/16)^(1/3)"
    );
    let z2 = format!(
        "(sqrt(6*x^2/256 + {p3}) + sqrt(6)*x/16)^(1/3) \
         - (sqrt(6*x^2/256 + {p3}) - sqrt(6)*x/16)^(1/3)"
    );
    let g = "4*sqrt(6)/3*x^3 - 2*sqrt(6)*x^2 + (2 + 2*sqrt(6)/3)*x";
    let deriv = |z: &str| format!("1/(2 - sqrt(6)/3 + 4*sqrt(6)*({z})^2)");
    let branches = vec![
        branch("f1", &format!("1/2 + {z1}"), &deriv(&z1), g),
        branch(
            "f2",
            &format!("1/2 + {z2}"),
            &deriv(&z2),
            &format!("{g} - 1"),
        ),
    ];
    MapSpec::new("bent_baker", Interval::unit(), branches, None, true)
}
