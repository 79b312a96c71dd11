use super::IterationRecord;

/// Relative slack on the Lyapunov monotonicity check.
const MONOTONE_SLACK: f64 = 1e-10;
/// Absolute slack on the summability check.
const SUM_SLACK: f64 = 1e-8;
/// `D_h(x_{k−1}, x_k)` counts as vanished once the last value is at most this
/// fraction of the largest one.
pub const DEFAULT_VANISH_RATIO: f64 = 1e-4;

/// Outcome of [`check_descent`]. The Lyapunov-based fields are `None` when
/// the trace carries no Ψ values (implicit priors).
#[derive(Clone, Debug, PartialEq)]
pub struct DescentReport {
    pub monotone: Option<bool>,
    /// First record whose Lyapunov value exceeds its predecessor.
    pub first_increase: Option<usize>,
    /// Running sums of `D_h(x_{k−1}, x_k)` over records `1..=n`.
    pub partial_sums: Vec<f64>,
    pub summable: Option<bool>,
    pub min_rate: Option<bool>,
    /// First prefix length violating summability or the min-rate bound.
    pub first_violation: Option<usize>,
    pub vanishing: bool,
}

impl DescentReport {
    /// Every check that could run passed.
    pub fn passed(&self) -> bool {
        self.monotone != Some(false)
            && self.summable != Some(false)
            && self.min_rate != Some(false)
            && self.vanishing
    }
}

pub fn check_descent(trace: &[IterationRecord], epsilon: f64) -> DescentReport {
    check_descent_with(trace, epsilon, DEFAULT_VANISH_RATIO)
}

/// Certifies the sufficient-decrease and summability properties on a trace.
///
/// Ψ* is replaced by the running minimum of the recorded Ψ values, so the
/// bound checked at prefix `n` is `Σ_{k=1..n} D_h ≤ (Ψ_0 − min_{j≤n} Ψ_j)/ε`.
pub fn check_descent_with(
    trace: &[IterationRecord],
    epsilon: f64,
    vanish_ratio: f64,
) -> DescentReport {
    let mut first_increase = None;
    let lyap: Option<Vec<f64>> = trace.iter().map(|r| r.lyapunov).collect();
    if let Some(h) = &lyap {
        first_increase = h
            .windows(2)
            .position(|w| w[1] > w[0] + MONOTONE_SLACK * (1.0 + w[0].abs()))
            .map(|i| trace[i + 1].k);
    }
    let monotone = lyap.as_ref().map(|_| first_increase.is_none());

    let mut partial_sums = Vec::with_capacity(trace.len().saturating_sub(1));
    let mut acc = 0.0;
    for r in trace.iter().skip(1) {
        acc += r.dh_prev_cur;
        partial_sums.push(acc);
    }

    let psi: Option<Vec<f64>> = trace.iter().map(|r| r.psi).collect();
    let (mut summable, mut min_rate, mut first_violation) = (None, None, None);
    if let (Some(psi), true) = (&psi, !trace.is_empty()) {
        let psi0 = psi[0];
        let mut psi_min = psi0;
        let mut dh_min = f64::INFINITY;
        let (mut sum_ok, mut rate_ok) = (true, true);
        for n in 1..trace.len() {
            psi_min = psi_min.min(psi[n]);
            dh_min = dh_min.min(trace[n].dh_prev_cur);
            let gap = (psi0 - psi_min) / epsilon;
            let s_ok = partial_sums[n - 1] <= gap + SUM_SLACK;
            let r_ok = dh_min <= gap / n as f64 + SUM_SLACK;
            if (!s_ok || !r_ok) && first_violation.is_none() {
                first_violation = Some(n);
            }
            sum_ok &= s_ok;
            rate_ok &= r_ok;
        }
        summable = Some(sum_ok);
        min_rate = Some(rate_ok);
    }

    let max_dh = trace.iter().map(|r| r.dh_prev_cur).fold(0.0, f64::max);
    let vanishing = match trace.last() {
        None => true,
        // A zero final change means the last step landed on a fixed point.
        Some(last) => last.rel_change == 0.0 || last.dh_prev_cur <= vanish_ratio * max_dh,
    };

    DescentReport {
        monotone,
        first_increase,
        partial_sums,
        summable,
        min_rate,
        first_violation,
        vanishing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: usize, h: f64, dh: f64) -> IterationRecord {
        IterationRecord {
            k,
            beta_accepted: 0.0,
            psi: Some(h),
            lyapunov: Some(h),
            dh_prev_cur: dh,
            dh_cur_y: 0.0,
            rel_change: 0.0,
            fallback_y: false,
        }
    }

    #[test]
    fn single_record_is_vacuous() {
        let r = check_descent(&[rec(0, 3.0, 0.0)], 0.01);
        assert_eq!(r.monotone, Some(true));
        assert!(r.passed());
    }

    #[test]
    fn increase_is_located() {
        let t = [rec(0, 3.0, 0.0), rec(1, 2.0, 0.5), rec(2, 3.0, 0.0)];
        let r = check_descent(&t, 0.5);
        assert_eq!(r.monotone, Some(false));
        assert_eq!(r.first_increase, Some(2));
        assert!(!r.passed());
    }

    #[test]
    fn summability_bound_per_prefix() {
        // Ψ drops by 1 with Σ D_h = 0.5: holds for ε = 1, fails for ε = 4.
        let t = [rec(0, 1.0, 0.0), rec(1, 0.5, 0.4), rec(2, 0.0, 0.1)];
        assert_eq!(check_descent(&t, 1.0).summable, Some(true));
        let r = check_descent(&t, 4.0);
        assert_eq!(r.summable, Some(false));
        assert_eq!(r.first_violation, Some(1));
        assert_eq!(r.partial_sums, vec![0.4, 0.5]);
    }

    #[test]
    fn implicit_trace_skips_lyapunov_checks() {
        let mut a = rec(0, 0.0, 0.0);
        a.psi = None;
        a.lyapunov = None;
        let r = check_descent(&[a], 0.01);
        assert_eq!(r.monotone, None);
        assert_eq!(r.summable, None);
        assert!(r.passed());
    }
}
