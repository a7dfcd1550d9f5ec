//! Run statistics, trial records and the CSV/report serializations shared
//! by the simulation arms.

use crate::capacity::CapacityPoint;

/// Formats a float with 17 significant digits; parsing the result with
/// `str::parse::<f64>()` restores the original bit pattern.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Bits to a compact `"0110"` string for logs and code files.
pub fn bitstring(bits: &[u8]) -> String {
    bits.iter().map(|&b| char::from(b'0' + b)).collect()
}

/// Header of the capacity CSV, fixed by the file contract.
pub const CAPACITY_CSV_HEADER: &str = "scheme,E,bits_per_use,bits_per_photon,nats_per_photon";

/// Serializes efficiency-table rows; locale-independent decimal points.
pub fn capacity_csv(points: &[CapacityPoint]) -> String {
    let mut out = String::from(CAPACITY_CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.scheme.label(),
            fmt_f64(p.energy),
            fmt_f64(p.bits_per_use),
            fmt_f64(p.bits_per_photon()),
            fmt_f64(p.nats_per_photon()),
        ));
    }
    out
}

/// Header of the trial-log CSV, fixed by the file contract.
pub const TRIAL_LOG_HEADER: &str = "trial,seed,message,decoded,success,min_step_prob";

/// One Monte Carlo trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    /// Derived per-trial stream key; replaying a single trial only needs
    /// this value.
    pub seed: u64,
    /// Information bits sent, as a bitstring.
    pub message: String,
    /// Information bits decoded, as a bitstring.
    pub decoded: String,
    pub success: bool,
    /// Smallest step outcome probability along the decode path; absent
    /// for the classical arm and for aborted trials.
    pub min_step_prob: Option<f64>,
    /// Trial aborted by a numeric anomaly (sampled a probability-zero
    /// branch); excluded from the error-rate denominator.
    pub anomaly: bool,
}

/// Serializes trial records in trial order.
pub fn trial_log_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRIAL_LOG_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.trial,
            r.seed,
            r.message,
            r.decoded,
            u8::from(r.success),
            r.min_step_prob.map(fmt_f64).unwrap_or_default(),
        ));
    }
    out
}

/// Aggregate outcome of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunStats {
    pub trials: u64,
    pub successes: u64,
    pub failures: u64,
    pub anomalies: u64,
    pub bit_errors: u64,
    pub info_bits: u64,
}

impl RunStats {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let mut s = RunStats {
            trials: records.len() as u64,
            ..Default::default()
        };
        for r in records {
            if r.anomaly {
                s.anomalies += 1;
                continue;
            }
            if r.success {
                s.successes += 1;
            } else {
                s.failures += 1;
            }
            s.info_bits += r.message.len() as u64;
            s.bit_errors += r
                .message
                .bytes()
                .zip(r.decoded.bytes())
                .filter(|(a, b)| a != b)
                .count() as u64;
        }
        s
    }

    fn effective(&self) -> u64 {
        self.successes + self.failures
    }

    pub fn block_error_rate(&self) -> f64 {
        if self.effective() == 0 {
            return 0.0;
        }
        self.failures as f64 / self.effective() as f64
    }

    pub fn bit_error_rate(&self) -> f64 {
        if self.info_bits == 0 {
            return 0.0;
        }
        self.bit_errors as f64 / self.info_bits as f64
    }

    /// Normal-approximation 95% confidence interval for the block error
    /// rate, clamped to [0, 1].
    pub fn block_error_ci95(&self) -> (f64, f64) {
        let n = self.effective() as f64;
        if n == 0.0 {
            return (0.0, 1.0);
        }
        let p = self.block_error_rate();
        let half = 1.959_963_984_540_054 * (p * (1.0 - p) / n).sqrt();
        ((p - half).max(0.0), (p + half).min(1.0))
    }
}

/// Ordered key=value report with `#` comment lines; the plain-text output
/// of the simulate/compare commands.
#[derive(Debug, Default, Clone)]
pub struct RunReport {
    lines: Vec<String>,
}

impl RunReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, text: &str) -> &mut Self {
        self.lines.push(format!("# {text}"));
        self
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("{key}={value}"));
        self
    }

    pub fn float(&mut self, key: &str, value: f64) -> &mut Self {
        self.lines.push(format!("{key}={}", fmt_f64(value)));
        self
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}
