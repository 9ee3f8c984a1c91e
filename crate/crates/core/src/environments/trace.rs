use std::io::Read;
use std::path::Path;

use crate::environments::{arm_mean, Environment, RewardKind};
use crate::error::{BanditError, Result};
use crate::rng::RngStream;
use crate::{ArmIndex, Reward};

/// Recorded per-arm rewards at increasing sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTrace {
    times: Vec<u64>,
    rows: Vec<Vec<f64>>,
}

impl RewardTrace {
    pub fn new(times: Vec<u64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() < 2 || times.len() != rows.len() {
            return Err(BanditError::Data(format!(
                "a trace needs at least two samples with one row each ({} times, {} rows)",
                times.len(),
                rows.len()
            )));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(BanditError::Data(format!(
                "trace times not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        let k = rows[0].len();
        if k == 0 {
            return Err(BanditError::Data("trace has no arms".into()));
        }
        for (row, t) in rows.iter().zip(&times) {
            if row.len() != k {
                return Err(BanditError::Data(format!(
                    "row at t = {t} has {} arms, expected {k}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(BanditError::range("trace reward", *v, 0.0, 1.0));
            }
        }
        Ok(RewardTrace { times, rows })
    }

    /// Parses `t,arm_0,...,arm_{k-1}` CSV. `name` is used in error messages.
    pub fn from_csv_reader<R: Read>(reader: R, name: &str) -> Result<Self> {
        let parse_err = |line: usize, msg: String| BanditError::Parse {
            path: name.to_string(),
            line,
            msg,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        if header.get(0).map(str::trim) != Some("t") || header.len() < 2 {
            return Err(parse_err(1, "header must be t,arm_0,...,arm_{k-1}".into()));
        }
        for (i, h) in header.iter().skip(1).enumerate() {
            if h.trim() != format!("arm_{i}") {
                return Err(parse_err(
                    1,
                    format!("column {} should be arm_{i}, found {h:?}", i + 1),
                ));
            }
        }
        let k = header.len() - 1;
        let mut times = Vec::new();
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                parse_err(line, e.to_string())
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            if record.len() != k + 1 {
                return Err(parse_err(
                    line,
                    format!("expected {} fields, found {}", k + 1, record.len()),
                ));
            }
            let t: u64 = record[0].trim().parse().map_err(|_| {
                parse_err(
                    line,
                    format!("time {:?} is not a non-negative integer", &record[0]),
                )
            })?;
            if let Some(&prev) = times.last() {
                if t <= prev {
                    return Err(parse_err(
                        line,
                        format!("time {t} does not increase (previous {prev})"),
                    ));
                }
            }
            let mut row = Vec::with_capacity(k);
            for (i, field) in record.iter().skip(1).enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    parse_err(line, format!("arm_{i} value {field:?} is not a number"))
                })?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(parse_err(line, format!("arm_{i} value {v} outside [0, 1]")));
                }
                row.push(v);
            }
            times.push(t);
            rows.push(row);
        }
        RewardTrace::new(times, rows).map_err(|e| parse_err(0, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| BanditError::io(path, e))?;
        Self::from_csv_reader(file, &path.display().to_string())
    }

    pub fn num_arms(&self) -> usize {
        self.rows[0].len()
    }

    pub fn first_time(&self) -> u64 {
        self.times[0]
    }

    pub fn last_time(&self) -> u64 {
        *self.times.last().expect("trace has samples")
    }

    /// Linearly interpolated rewards of every arm at time `t`.
    pub fn interpolate_into(&self, t: u64, out: &mut [f64]) -> Result<()> {
        let (first, last) = (self.first_time(), self.last_time());
        if t < first || t > last {
            return Err(BanditError::OutOfRange { t, first, last });
        }
        let hi = self.times.partition_point(|&s| s < t);
        if self.times[hi] == t {
            out.copy_from_slice(&self.rows[hi]);
            return Ok(());
        }
        let lo = hi - 1;
        let frac = (t - self.times[lo]) as f64 / (self.times[hi] - self.times[lo]) as f64;
        for ((o, a), b) in out.iter_mut().zip(&self.rows[lo]).zip(&self.rows[hi]) {
            *o = a + frac * (b - a);
        }
        Ok(())
    }

    /// Per-arm average of the interpolated rewards over every integer time
    /// in the trace.
    pub fn time_averaged_means(&self) -> Vec<f64> {
        let k = self.num_arms();
        let mut total = vec![0.0; k];
        let mut row = vec![0.0; k];
        for t in self.first_time()..=self.last_time() {
            self.interpolate_into(t, &mut row).expect("t within range");
            for (s, v) in total.iter_mut().zip(&row) {
                *s += v;
            }
        }
        let n = (self.last_time() - self.first_time() + 1) as f64;
        total.into_iter().map(|s| s / n).collect()
    }
}

/// Interpolated reward of one arm at time `t`; no extrapolation.
pub fn trace_mean(trace: &RewardTrace, t: i64, arm: ArmIndex) -> Result<Reward> {
    if arm >= trace.num_arms() {
        return Err(BanditError::InvalidArgument(format!(
            "arm {arm} not in trace"
        )));
    }
    if t < 0 {
        return Err(BanditError::OutOfRange {
            t: 0,
            first: trace.first_time(),
            last: trace.last_time(),
        });
    }
    let mut row = vec![0.0; trace.num_arms()];
    trace.interpolate_into(t as u64, &mut row)?;
    Reward::new(row[arm])
}

/// Replays a trace from its first sample time onwards.
#[derive(Debug, Clone)]
pub struct TraceEnv {
    trace: RewardTrace,
    kind: RewardKind,
    rng: RngStream,
    means: Vec<f64>,
    u: f64,
    round: u64,
}

impl TraceEnv {
    pub fn new(trace: RewardTrace, kind: RewardKind, mut rng: RngStream) -> Result<Self> {
        let values = trace.rows.iter().flatten().copied();
        let lo = values.clone().fold(f64::INFINITY, f64::min);
        let hi = values.fold(f64::NEG_INFINITY, f64::max);
        kind.check_support(lo, hi)?;
        let mut means = vec![0.0; trace.num_arms()];
        trace.interpolate_into(trace.first_time(), &mut means)?;
        let u = rng.uniform();
        Ok(TraceEnv {
            trace,
            kind,
            rng,
            means,
            u,
            round: 0,
        })
    }

    /// Number of rounds the trace can serve.
    pub fn max_rounds(&self) -> u64 {
        self.trace.last_time() - self.trace.first_time() + 1
    }
}

impl Environment for TraceEnv {
    fn num_arms(&self) -> usize {
        self.trace.num_arms()
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn means(&self) -> &[f64] {
        &self.means
    }

    fn pull(&self, arm: ArmIndex) -> Result<Reward> {
        self.kind.realize(arm_mean(&self.means, arm)?, self.u)
    }

    fn advance(&mut self) -> Result<()> {
        self.round += 1;
        let t = self.trace.first_time() + self.round;
        self.trace.interpolate_into(t, &mut self.means)?;
        self.u = self.rng.uniform();
        Ok(())
    }
}

/// Reads per-arm feature vectors from `arm,f_0,...,f_{d-1}` CSV, rows in
/// arm order.
pub fn load_features_csv<R: Read>(reader: R, name: &str) -> Result<Vec<Vec<f64>>> {
    let parse_err = |line: usize, msg: String| BanditError::Parse {
        path: name.to_string(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if header.get(0).map(str::trim) != Some("arm") || header.len() < 2 {
        return Err(parse_err(1, "header must be arm,f_0,...,f_{d-1}".into()));
    }
    let dim = header.len() - 1;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            parse_err(
                e.position().map(|p| p.line() as usize).unwrap_or(0),
                e.to_string(),
            )
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let arm: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("arm {:?} is not an index", &record[0])))?;
        if arm != out.len() {
            return Err(parse_err(
                line,
                format!("expected arm {}, found {arm}", out.len()),
            ));
        }
        let row = record
            .iter()
            .skip(1)
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(line, format!("feature {f:?} is not a finite number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != dim {
            return Err(parse_err(line, format!("expected {dim} features")));
        }
        out.push(row);
    }
    Ok(out)
}
