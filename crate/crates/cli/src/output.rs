//! Result records. Every number is a decimal digit string.

use serde::Serialize;

use lyapbound::bounds::{LyapunovEnclosure, MonteCarloReport, PressureSide, SupCertificate};
use lyapbound::maps::{DerivSource, MapSpec};
use lyapbound::precision::format_real;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSource {
    Builtin { name: String, param: Option<String> },
    Config { path: String, sha256: String },
}

/// Wall-clock fields; the only part of a record that varies between
/// identical runs.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub started_unix: u64,
    pub wall_seconds: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Options {
    pub refine_factor: usize,
    pub grid_factor: usize,
    pub tail_threshold: String,
    pub power_tol: String,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub map_source: MapSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub m: Option<usize>,
    pub digits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub options: Option<Options>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub timing: Timing,
}

impl Manifest {
    /// `key=value` lines for CSV comment blocks.
    pub fn comment_lines(&self) -> Vec<String> {
        let value = serde_json::to_value(self).expect("manifest serializes");
        let mut out = Vec::new();
        flatten("manifest", &value, &mut out);
        out
    }
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{prefix}.{k}"), v, out);
            }
        }
        serde_json::Value::String(s) => out.push(format!("{prefix}={s}")),
        serde_json::Value::Null => out.push(format!("{prefix}=")),
        other => out.push(format!("{prefix}={other}")),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRecord {
    pub label: String,
    pub inverse: String,
    pub deriv_abs: String,
    pub deriv_source: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapRecord {
    pub name: String,
    pub parameter: Option<String>,
    pub interval: [String; 2],
    pub branches: Vec<BranchRecord>,
    pub expansion_floor: String,
    pub mixing_asserted: bool,
    pub warnings: Vec<String>,
}

impl MapRecord {
    pub fn new(map: &MapSpec) -> Self {
        Self {
            name: map.name.clone(),
            parameter: map.parameter.as_ref().map(|c| c.to_string()),
            interval: [map.interval.a.to_string(), map.interval.b.to_string()],
            branches: map
                .branches
                .iter()
                .map(|b| BranchRecord {
                    label: b.label.clone(),
                    inverse: b.inverse.to_string(),
                    deriv_abs: b.deriv_abs.to_string(),
                    deriv_source: match b.deriv_source {
                        DerivSource::Supplied => "supplied",
                        DerivSource::Symbolic => "symbolic",
                    },
                })
                .collect(),
            expansion_floor: format_real(&map.expansion_floor, 20),
            mixing_asserted: map.mixing_asserted,
            warnings: map.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateRecord {
    pub side: &'static str,
    pub t: String,
    pub rho: String,
    pub bound: String,
    pub dense_max: String,
    pub tail_pad: String,
    pub grid_pad: String,
    pub tail_ratio: String,
    pub tail_threshold: String,
    pub refine_degree: usize,
    pub grid_points: usize,
    pub eigenvalue: String,
    pub eigen_residual: String,
    pub eigen_iterations: usize,
    pub min_test_polynomial: String,
}

impl CertificateRecord {
    fn new(side: &'static str, s: &PressureSide, sig: usize) -> Self {
        let c: &SupCertificate = &s.bound.certificate;
        Self {
            side,
            t: format_real(&s.bound.t, sig),
            rho: format_real(&s.bound.rho, sig),
            bound: format_real(&c.bound, sig),
            dense_max: format_real(&c.dense_max, sig),
            tail_pad: format_real(&c.tail_pad, 10),
            grid_pad: format_real(&c.grid_pad, 10),
            tail_ratio: format_real(&c.tail_ratio, 10),
            tail_threshold: format_real(&c.tail_threshold, 10),
            refine_degree: c.refine_degree,
            grid_points: c.grid_points,
            eigenvalue: format_real(&s.eigen.eigenvalue, sig),
            eigen_residual: format_real(&s.eigen.residual, 10),
            eigen_iterations: s.eigen.iterations,
            min_test_polynomial: format_real(&s.min_value, 20),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloRecord {
    pub side: &'static str,
    pub n_points: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_ratio: String,
    pub argmax: String,
    pub gap_to_certificate: String,
}

impl MonteCarloRecord {
    pub fn new(side: &'static str, r: &MonteCarloReport, sig: usize) -> Self {
        Self {
            side,
            n_points: r.n_points,
            trials: r.trials,
            seed: r.seed,
            max_ratio: format_real(&r.max_ratio, sig),
            argmax: format_real(&r.argmax, 30),
            gap_to_certificate: format_real(&r.gap_to_certificate, 10),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRecord {
    pub manifest: Manifest,
    pub map: MapRecord,
    pub epsilon: String,
    pub m: usize,
    pub digits: u32,
    pub alpha: String,
    pub beta: String,
    pub lower: String,
    pub upper: String,
    pub width: String,
    pub certificates: [CertificateRecord; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<Vec<MonteCarloRecord>>,
}

/// Significant digits printed for full-precision quantities.
pub fn significant(digits: u32) -> usize {
    digits as usize
}

pub fn enclosure_numbers(e: &LyapunovEnclosure) -> [String; 6] {
    let sig = significant(e.digits);
    [
        format_real(&e.epsilon, 20),
        format_real(&e.alpha, sig),
        format_real(&e.beta, sig),
        format_real(&e.lower, sig),
        format_real(&e.upper, sig),
        format_real(&e.width, 20),
    ]
}

impl BoundRecord {
    pub fn new(manifest: Manifest, map: &MapSpec, e: &LyapunovEnclosure) -> Self {
        let sig = significant(e.digits);
        let [epsilon, alpha, beta, lower, upper, width] = enclosure_numbers(e);
        Self {
            manifest,
            map: MapRecord::new(map),
            epsilon,
            m: e.m,
            digits: e.digits,
            alpha,
            beta,
            lower,
            upper,
            width,
            certificates: [
                CertificateRecord::new("1+epsilon", &e.plus, sig),
                CertificateRecord::new("1-epsilon", &e.minus, sig),
            ],
            monte_carlo: None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("map,epsilon,m,digits,alpha,beta,lower,upper,width\n");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            self.map.name,
            self.epsilon,
            self.m,
            self.digits,
            self.alpha,
            self.beta,
            self.lower,
            self.upper,
            self.width
        ));
        for c in &self.certificates {
            out.push_str(&format!(
                "# certificate side={} bound={} dense_max={} tail_pad={} grid_pad={} tail_ratio={} refine_degree={}\n",
                c.side, c.bound, c.dense_max, c.tail_pad, c.grid_pad, c.tail_ratio, c.refine_degree
            ));
        }
        for mc in self.monte_carlo.iter().flatten() {
            out.push_str(&format!(
                "# monte_carlo side={} n_points={} trials={} seed={} max_ratio={} gap={}\n",
                mc.side, mc.n_points, mc.trials, mc.seed, mc.max_ratio, mc.gap_to_certificate
            ));
        }
        push_manifest(&mut out, &self.manifest);
        out
    }
}

pub fn push_manifest(out: &mut String, manifest: &Manifest) {
    for line in manifest.comment_lines() {
        out.push_str("# ");
        out.push_str(&line);
        out.push('\n');
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRowRecord {
    pub c: String,
    pub c_exact: String,
    pub lower: Option<String>,
    pub upper: Option<String>,
    pub width: Option<String>,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub manifest: Manifest,
    pub family: String,
    pub rows: Vec<SweepRowRecord>,
}

impl SweepRecord {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c,lower,upper,width,status\n");
        let opt = |s: &Option<String>| s.clone().unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.c,
                opt(&r.lower),
                opt(&r.upper),
                opt(&r.width),
                r.status
            ));
        }
        for r in &self.rows {
            if let Some(e) = &r.error {
                out.push_str(&format!("# failed c={} error={}\n", r.c, e));
            }
        }
        push_manifest(&mut out, &self.manifest);
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DensitySample {
    pub x: String,
    pub rho: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityRecord {
    pub manifest: Manifest,
    pub map: MapRecord,
    pub m: usize,
    pub digits: u32,
    pub integral: String,
    /// `|integral - 1|` from the coefficient quadrature.
    pub integral_error: String,
    pub lyapunov_quadrature: String,
    pub coefficients: Vec<String>,
    pub samples: Vec<DensitySample>,
}

impl DensityRecord {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,rho\n");
        for s in &self.samples {
            out.push_str(&format!("{},{}\n", s.x, s.rho));
        }
        out.push_str(&format!("# integral={}\n", self.integral));
        out.push_str(&format!("# integral_error={}\n", self.integral_error));
        out.push_str(&format!(
            "# lyapunov_quadrature={}\n",
            self.lyapunov_quadrature
        ));
        for (j, c) in self.coefficients.iter().enumerate() {
            out.push_str(&format!("# coefficient[{j}]={c}\n"));
        }
        push_manifest(&mut out, &self.manifest);
        out
    }
}
