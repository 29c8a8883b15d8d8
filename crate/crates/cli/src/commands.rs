use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use lyapbound::bounds::{
    linspace, lyapunov_enclosure, monte_carlo_check, required_digits, sweep, CertOptions,
    EnclosureOptions, MC_GENERATOR,
};
use lyapbound::collocation::{invariant_density, lyapunov_from_density, PowerOptions};
use lyapbound::maps::{builtin, parse_map_spec, validate_map, MapSpec, ValidationReport};
use lyapbound::precision::{format_real, make_context, parse_rational, PrecisionContext, Real};

use crate::args::{
    BoundArgs, CertArgs, Cli, Command, DensityArgs, Format, MapArgs, SweepArgs, ValidateArgs,
    WORKERS_ENV,
};
use crate::exit::{quote, CliError};
use crate::output::{
    BoundRecord, DensityRecord, DensitySample, Manifest, MapRecord, MapSource, MonteCarloRecord,
    Options, SweepRecord, SweepRowRecord, Timing,
};

/// A finished command: the document to write and where.
#[derive(Debug)]
pub struct Rendered {
    pub text: String,
    pub out: Option<PathBuf>,
    /// One-line `warning ...` diagnostics.
    pub warnings: Vec<String>,
    /// Nonzero when the command produced output but still failed.
    pub exit: i32,
}

pub fn run(cli: Cli) -> Result<Rendered, CliError> {
    let command_line = std::env::args().collect::<Vec<_>>().join(" ");
    match cli.command {
        Command::Bound(a) => cmd_bound(&a, &command_line),
        Command::Sweep(a) => cmd_sweep(&a, &command_line),
        Command::Density(a) => cmd_density(&a, &command_line),
        Command::Validate(a) => cmd_validate(&a, &command_line),
    }
}

struct Clock {
    started_unix: u64,
    start: Instant,
}

impl Clock {
    fn start() -> Self {
        Self {
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            start: Instant::now(),
        }
    }

    fn timing(&self) -> Timing {
        Timing {
            started_unix: self.started_unix,
            wall_seconds: format!("{:.3}", self.start.elapsed().as_secs_f64()),
        }
    }
}

fn load_map(args: &MapArgs) -> Result<(MapSpec, MapSource), CliError> {
    if let Some(name) = &args.select.map {
        let param = args.param.as_deref().map(|p| {
            p.strip_prefix("c=")
                .or_else(|| p.strip_prefix("n="))
                .unwrap_or(p)
                .trim()
        });
        let map = builtin(name, param)?;
        return Ok((
            map,
            MapSource::Builtin {
                name: name.clone(),
                param: param.map(str::to_string),
            },
        ));
    }
    let path = args
        .select
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("one of --map or --config is required".into()))?;
    if args.param.is_some() {
        return Err(CliError::Usage(
            "--param applies to built-in maps; set `parameter c = ...` in the config".into(),
        ));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let map = parse_map_spec(&text)?;
    let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
    Ok((
        map,
        MapSource::Config {
            path: path.display().to_string(),
            sha256,
        },
    ))
}

fn map_warnings(map: &MapSpec) -> Vec<String> {
    map.warnings
        .iter()
        .map(|w| format!("warning map={} message={}", map.name, quote(w)))
        .collect()
}

fn epsilon_digits(text: &str, digits: Option<u32>) -> Result<u32, CliError> {
    if let Some(d) = digits {
        return Ok(d);
    }
    let probe = make_context(64)?;
    Ok(required_digits(&probe.real(&parse_rational(text)?)))
}

fn enclosure_options(
    cert: &CertArgs,
    ctx: &PrecisionContext,
) -> Result<(EnclosureOptions, Options), CliError> {
    let tail_threshold = match &cert.tail_threshold {
        Some(t) => Some(ctx.parse_real(t)?),
        None => None,
    };
    let opts = EnclosureOptions {
        cert: CertOptions {
            refine_factor: cert.refine_factor,
            grid_factor: cert.grid_factor,
            tail_threshold,
        },
        power: PowerOptions {
            tol: None,
            max_iter: cert.max_iter,
        },
    };
    let record = Options {
        refine_factor: cert.refine_factor,
        grid_factor: cert.grid_factor,
        tail_threshold: format_real(&opts.cert.threshold(ctx), 6),
        power_tol: format_real(&opts.power.tolerance(ctx), 6),
        max_iter: opts.power.iterations(ctx),
    };
    Ok((opts, record))
}

fn parse_monte_carlo(spec: &str) -> Result<(usize, usize, u64), CliError> {
    let bad = || {
        CliError::Usage(format!(
            "--check-monte-carlo expects n,trials,seed, got `{spec}`"
        ))
    };
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
    ))
}

fn render<T: serde::Serialize>(format: Format, record: &T, csv: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(record).expect("records serialize");
            s.push('\n');
            s
        }
        Format::Csv => csv(),
    }
}

/// `cmd_bound`.
pub fn cmd_bound(args: &BoundArgs, command_line: &str) -> Result<Rendered, CliError> {
    let clock = Clock::start();
    let (map, source) = load_map(&args.map)?;
    let digits = epsilon_digits(&args.epsilon, args.digits)?;
    let ctx = make_context(digits)?;
    let epsilon = ctx.parse_real(&args.epsilon)?;
    let (opts, options) = enclosure_options(&args.cert, &ctx)?;
    let mc = args
        .check_monte_carlo
        .as_deref()
        .map(parse_monte_carlo)
        .transpose()?;

    let enclosure = lyapunov_enclosure(&map, &epsilon, args.nodes, &ctx, &opts)?;
    let mut mc_records = None;
    if let Some((n, trials, seed)) = mc {
        let mut recs = Vec::new();
        for (side, s) in [
            ("1+epsilon", &enclosure.plus),
            ("1-epsilon", &enclosure.minus),
        ] {
            let r = monte_carlo_check(
                &map,
                &s.bound.t,
                &s.poly,
                &s.bound.certificate,
                n,
                trials,
                seed,
                &ctx,
            )?;
            recs.push(MonteCarloRecord::new(side, &r, digits as usize));
        }
        mc_records = Some(recs);
    }
    let manifest = Manifest {
        tool: "lyapbound",
        version: env!("CARGO_PKG_VERSION"),
        command: command_line.to_string(),
        map_source: source,
        epsilon: Some(args.epsilon.clone()),
        m: Some(args.nodes),
        digits,
        options: Some(options),
        seed: mc.map(|(_, _, s)| s),
        generator: mc.map(|_| MC_GENERATOR),
        workers: None,
        timing: clock.timing(),
    };
    let mut record = BoundRecord::new(manifest, &map, &enclosure);
    record.monte_carlo = mc_records;
    Ok(Rendered {
        text: render(args.format, &record, || record.to_csv()),
        out: args.out.clone(),
        warnings: map_warnings(&map),
        exit: 0,
    })
}

pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// `cmd_sweep`.
pub fn cmd_sweep(args: &SweepArgs, command_line: &str) -> Result<Rendered, CliError> {
    let clock = Clock::start();
    let digits = epsilon_digits(&args.epsilon, args.digits)?;
    let ctx = make_context(digits)?;
    let epsilon = ctx.parse_real(&args.epsilon)?;
    let (opts, options) = enclosure_options(&args.cert, &ctx)?;
    let from = parse_rational(&args.from)?;
    let to = parse_rational(&args.to)?;
    let cs = linspace(&from, &to, args.count)?;
    let workers = args.workers.unwrap_or_else(default_workers);
    let table = sweep(
        &args.family,
        &cs,
        &epsilon,
        args.nodes,
        &ctx,
        &opts,
        workers,
    )?;

    let sig = digits as usize;
    let mut first_error = None;
    let rows = table
        .rows
        .iter()
        .map(|row| {
            let c = format_real(&ctx.real(&row.c), 20);
            match &row.result {
                Ok(e) => SweepRowRecord {
                    c,
                    c_exact: row.c.to_string(),
                    lower: Some(format_real(&e.lower, sig)),
                    upper: Some(format_real(&e.upper, sig)),
                    width: Some(format_real(&e.width, 20)),
                    status: row.status(),
                    error: None,
                },
                Err(err) => {
                    first_error.get_or_insert_with(|| err.clone());
                    SweepRowRecord {
                        c,
                        c_exact: row.c.to_string(),
                        lower: None,
                        upper: None,
                        width: None,
                        status: row.status(),
                        error: Some(format!("kind={} {}", err.kind().as_str(), err)),
                    }
                }
            }
        })
        .collect();
    let manifest = Manifest {
        tool: "lyapbound",
        version: env!("CARGO_PKG_VERSION"),
        command: command_line.to_string(),
        map_source: MapSource::Builtin {
            name: args.family.clone(),
            param: Some(format!(
                "linspace({}, {}, {})",
                args.from, args.to, args.count
            )),
        },
        epsilon: Some(args.epsilon.clone()),
        m: Some(args.nodes),
        digits,
        options: Some(options),
        seed: None,
        generator: None,
        workers: Some(workers),
        timing: clock.timing(),
    };
    let record = SweepRecord {
        manifest,
        family: table.family.clone(),
        rows,
    };
    let exit = match (table.successes(), &first_error) {
        (0, Some(e)) => CliError::Core(e.clone()).code(),
        _ => 0,
    };
    let mut warnings: Vec<String> = record
        .rows
        .iter()
        .filter_map(|r| {
            r.error
                .as_ref()
                .map(|e| format!("warning row c={} message={}", r.c, quote(e)))
        })
        .collect();
    if exit != 0 {
        if let Some(e) = first_error {
            warnings.push(CliError::Core(e).diagnostic());
        }
    }
    Ok(Rendered {
        text: render(args.format, &record, || record.to_csv()),
        out: args.out.clone(),
        warnings,
        exit,
    })
}

/// `cmd_density`.
pub fn cmd_density(args: &DensityArgs, command_line: &str) -> Result<Rendered, CliError> {
    let clock = Clock::start();
    let (map, source) = load_map(&args.map)?;
    let ctx = make_context(args.digits)?;
    if args.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let rho = invariant_density(&map, args.nodes, &ctx)?;
    let integral = rho.integral(&ctx);
    let integral_error = ctx.real(&integral - 1u32).abs();
    let lambda = lyapunov_from_density(&map, &rho, 4 * args.nodes, &ctx)?;
    let a = ctx.real(&map.interval.a);
    let b = ctx.real(&map.interval.b);
    let step = ctx.real(&b - &a) / (args.samples as u32 - 1);
    let sig = args.digits as usize;
    let mut samples = Vec::with_capacity(args.samples);
    for i in 0..args.samples {
        let x: Real = if i + 1 == args.samples {
            b.clone()
        } else {
            ctx.real(&step * i as u32) + &a
        };
        let value = rho.eval(&x, &ctx)?;
        samples.push(DensitySample {
            x: format_real(&x, 20),
            rho: format_real(&value, sig),
        });
    }
    let manifest = Manifest {
        tool: "lyapbound",
        version: env!("CARGO_PKG_VERSION"),
        command: command_line.to_string(),
        map_source: source,
        epsilon: None,
        m: Some(args.nodes),
        digits: args.digits,
        options: None,
        seed: None,
        generator: None,
        workers: None,
        timing: clock.timing(),
    };
    let record = DensityRecord {
        manifest,
        map: MapRecord::new(&map),
        m: args.nodes,
        digits: args.digits,
        integral: format_real(&integral, sig),
        integral_error: format_real(&integral_error, 6),
        lyapunov_quadrature: format_real(&lambda, sig),
        coefficients: rho.coeffs.iter().map(|c| format_real(c, sig)).collect(),
        samples,
    };
    Ok(Rendered {
        text: render(args.format, &record, || record.to_csv()),
        out: args.out.clone(),
        warnings: map_warnings(&map),
        exit: 0,
    })
}

fn report_text(r: &ValidationReport) -> String {
    let mut out = format!(
        "map {}\ngrid {}\nexpansion_floor {}\n",
        r.map_name,
        r.grid_size,
        format_real(&r.expansion_floor, 20)
    );
    for (k, f) in r.branch_floors.iter().enumerate() {
        out.push_str(&format!("branch_floor[{k}] {}\n", format_real(f, 20)));
    }
    out.push_str(&format!(
        "max_range_deviation {}\nmixing_asserted {}\n",
        format_real(&r.max_range_deviation, 6),
        r.mixing_asserted
    ));
    for f in &r.failures {
        out.push_str(&format!("failure {f}\n"));
    }
    out.push_str(&format!("note {}\n", r.note()));
    out.push_str(if r.passed {
        "result pass\n"
    } else {
        "result fail\n"
    });
    out
}

/// `cmd_validate`: prints the report; failing maps exit 10.
pub fn cmd_validate(args: &ValidateArgs, command_line: &str) -> Result<Rendered, CliError> {
    let clock = Clock::start();
    let (map, source) = load_map(&args.map)?;
    let ctx = make_context(args.digits)?;
    let report = validate_map(&map, args.grid, &ctx)?;
    let mut text = report_text(&report);
    let manifest = Manifest {
        tool: "lyapbound",
        version: env!("CARGO_PKG_VERSION"),
        command: command_line.to_string(),
        map_source: source,
        epsilon: None,
        m: None,
        digits: args.digits,
        options: None,
        seed: None,
        generator: None,
        workers: None,
        timing: clock.timing(),
    };
    crate::output::push_manifest(&mut text, &manifest);
    let mut warnings = map_warnings(&map);
    let exit = if report.passed {
        0
    } else {
        let e = CliError::ValidationFailed(report.failures.join("; "));
        warnings.push(e.diagnostic());
        e.code()
    };
    Ok(Rendered {
        text,
        out: None,
        warnings,
        exit,
    })
}
