/// Mean and relative standard error of `Y_i = exp(x_i)` from the logs
/// `x_i`, reduced in index order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMoments {
    pub log_mean: f64,
    pub rel_stderr: f64,
    pub samples: usize,
}

impl LogMoments {
    pub fn from_logs(logs: &[f64]) -> Self {
        let m = logs.len();
        let peak = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m == 0 || peak == f64::NEG_INFINITY {
            return Self { log_mean: f64::NEG_INFINITY, rel_stderr: 0.0, samples: m };
        }
        let mut sum = 0.0;
        for x in logs {
            sum += (x - peak).exp();
        }
        let mean = sum / m as f64;
        let rel_stderr = if m > 1 {
            let mut ss = 0.0;
            for x in logs {
                let d = (x - peak).exp() - mean;
                ss += d * d;
            }
            (ss / (m - 1) as f64 / m as f64).sqrt() / mean
        } else {
            0.0
        };
        Self { log_mean: peak + mean.ln(), rel_stderr, samples: m }
    }
}
