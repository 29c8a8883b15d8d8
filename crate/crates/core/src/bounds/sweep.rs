use rayon::prelude::*;
use rug::Rational;

use super::{lyapunov_enclosure, EnclosureOptions, LyapunovEnclosure};
use crate::error::{Error, Result};
use crate::maps::{family_map, FAMILY_NAMES};
use crate::precision::{PrecisionContext, Real};

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub c: Rational,
    pub result: Result<LyapunovEnclosure>,
}

impl SweepRow {
    pub fn status(&self) -> &'static str {
        if self.result.is_ok() {
            "ok"
        } else {
            "failed"
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub family: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn successes(&self) -> usize {
        self.rows.iter().filter(|r| r.result.is_ok()).count()
    }
}

/// `count` equally spaced exact values from `from` to `to` inclusive.
pub fn linspace(from: &Rational, to: &Rational, count: usize) -> Result<Vec<Rational>> {
    match count {
        0 => Err(Error::InvalidArgument(
            "sweep needs at least one point".into(),
        )),
        1 => Ok(vec![from.clone()]),
        _ => {
            let step = Rational::from(to - from) / (count as u32 - 1);
            Ok((0..count)
                .map(|j| Rational::from(&step * j as u32) + from)
                .collect())
        }
    }
}

/// `sweep`: one enclosure per parameter value on a pool of `workers`
/// threads. A failing row records its error and the sweep continues.
pub fn sweep(
    family: &str,
    c_values: &[Rational],
    epsilon: &Real,
    m: usize,
    ctx: &PrecisionContext,
    opts: &EnclosureOptions,
    workers: usize,
) -> Result<SweepTable> {
    if !FAMILY_NAMES.contains(&family) {
        return Err(Error::UnknownMap(format!(
            "{family} (sweepable families: {})",
            FAMILY_NAMES.join(", ")
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        c_values
            .par_iter()
            .map(|c| SweepRow {
                c: c.clone(),
                result: family_map(family, c)
                    .and_then(|map| lyapunov_enclosure(&map, epsilon, m, ctx, opts)),
            })
            .collect()
    });
    Ok(SweepTable {
        family: family.to_string(),
        rows,
    })
}
