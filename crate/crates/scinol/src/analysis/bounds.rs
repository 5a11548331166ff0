//! Closed-form regret bound calculators for the two scale-invariant
//! learners, evaluated on the terminal statistics of a recorded run.

use crate::error::{Error, Result};
use crate::history::{RunHistory, TerminalStats};

fn check_inputs(u: &[f64], stats: &TerminalStats, eps: f64) -> Result<()> {
    if u.len() != stats.dim {
        return Err(Error::DimMismatch {
            expected: stats.dim,
            got: u.len(),
        });
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what: "comparator" });
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be a positive finite number, got {eps}"
        )));
    }
    Ok(())
}

/// Regret envelope of the additive-wealth learner after T trials:
/// sum_i [ 2|u_i|Ŝ_i ln(1 + 2|u_i|Ŝ_i T/ε) + ε(1 + ln T) ].
pub fn scinol1_regret_bound_from_stats(
    u: &[f64],
    stats: &TerminalStats,
    t_max: u64,
    eps: f64,
) -> Result<f64> {
    check_inputs(u, stats, eps)?;
    if t_max == 0 {
        return Err(Error::InvalidConfig(
            "bound requires at least one trial".into(),
        ));
    }
    let t = t_max as f64;
    let mut total = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        let us = ui.abs() * stats.s_hat(i);
        total += 2.0 * us * (2.0 * us * t / eps).ln_1p() + eps * (1.0 + t.ln());
    }
    Ok(total)
}

/// Regret envelope of the multiplicative-wealth learner:
/// d·ε + sum_{u_i≠0} 2|u_i|Ŝ_i (ln(3|u_i|Ŝ_i³/(ε·x²_{τ_i})) − 1),
/// where τ_i is the first trial with a nonzero input on coordinate i.
pub fn scinol2_regret_bound_from_stats(
    u: &[f64],
    stats: &TerminalStats,
    eps: f64,
) -> Result<f64> {
    check_inputs(u, stats, eps)?;
    let mut total = stats.dim as f64 * eps;
    for (i, &ui) in u.iter().enumerate() {
        if ui == 0.0 {
            continue;
        }
        let x_tau = match stats.x_tau[i] {
            Some(x) => x,
            None => return Err(Error::UndefinedTau { coord: i }),
        };
        let s_hat = stats.s_hat(i);
        let us = ui.abs() * s_hat;
        total += 2.0 * us * ((3.0 * us * s_hat * s_hat / (eps * x_tau * x_tau)).ln() - 1.0);
    }
    Ok(total)
}

pub fn scinol1_regret_bound(u: &[f64], hist: &RunHistory, eps: f64) -> Result<f64> {
    if hist.trials.is_empty() {
        return Err(Error::InvalidConfig(
            "bound requires a nonempty history".into(),
        ));
    }
    scinol1_regret_bound_from_stats(u, &hist.terminal_stats, hist.trials.len() as u64, eps)
}

pub fn scinol2_regret_bound(u: &[f64], hist: &RunHistory, eps: f64) -> Result<f64> {
    scinol2_regret_bound_from_stats(u, &hist.terminal_stats, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats_1d(m: f64, s2: f64, x_tau: Option<f64>) -> TerminalStats {
        TerminalStats {
            dim: 1,
            m: vec![m],
            g_cum: vec![0.0],
            s2: vec![s2],
            beta: None,
            eta: None,
            tau: x_tau.map(|_| Some(1)).into_iter().collect(),
            x_tau: vec![x_tau],
        }
    }

    #[test]
    fn zero_comparator_leaves_only_constant_terms() {
        let stats = TerminalStats {
            dim: 3,
            m: vec![1.0; 3],
            g_cum: vec![0.0; 3],
            s2: vec![4.0; 3],
            beta: None,
            eta: None,
            tau: vec![Some(1); 3],
            x_tau: vec![Some(1.0); 3],
        };
        let eps = 0.5;
        let b1 = scinol1_regret_bound_from_stats(&[0.0; 3], &stats, 10, eps).unwrap();
        assert!((b1 - 3.0 * eps * (1.0 + 10f64.ln())).abs() < 1e-12);
        let b2 = scinol2_regret_bound_from_stats(&[0.0; 3], &stats, eps).unwrap();
        assert!((b2 - 3.0 * eps).abs() < 1e-15);
    }

    #[test]
    fn unit_scale_bounds_match_closed_forms() {
        // S_hat = 1 via m=1, s2=0; |u|=1, T=1, eps=1.
        let stats = stats_1d(1.0, 0.0, Some(1.0));
        let b1 = scinol1_regret_bound_from_stats(&[1.0], &stats, 1, 1.0).unwrap();
        assert!((b1 - 3.1972245773362196).abs() < 1e-15);
        let b2 = scinol2_regret_bound_from_stats(&[1.0], &stats, 1.0).unwrap();
        assert!((b2 - 1.1972245773362196).abs() < 1e-15);
    }

    #[test]
    fn first_bound_is_monotone_in_comparator_magnitude() {
        let stats = stats_1d(2.0, 9.0, Some(2.0));
        let mut last = 0.0;
        for k in 0..20 {
            let u = [k as f64 * 0.5];
            let b = scinol1_regret_bound_from_stats(&u, &stats, 100, 1.0).unwrap();
            assert!(b >= last);
            last = b;
        }
    }

    #[test]
    fn comparator_on_dead_feature_is_an_error() {
        let stats = stats_1d(0.0, 0.0, None);
        assert!(matches!(
            scinol2_regret_bound_from_stats(&[1.0], &stats, 1.0),
            Err(Error::UndefinedTau { coord: 0 })
        ));
        // A zero weight on the dead feature is fine.
        assert_eq!(
            scinol2_regret_bound_from_stats(&[0.0], &stats, 1.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn bounds_are_invariant_under_joint_rescaling() {
        // x -> a·x together with u -> u/a describes the same prediction
        // problem, and both envelopes only see |u_i|S_hat_i and the invariant
        // ratio S_hat_i³/x²_τ, so they do not move. Power-of-two factors
        // commute with every rounding step, giving bit-for-bit equality;
        // other factors agree to rounding noise.
        let m = 1.5;
        let s2 = 4.0;
        let x_tau = 0.5;
        let u = 0.8;
        let eps = 0.25;
        let base1 =
            scinol1_regret_bound_from_stats(&[u], &stats_1d(m, s2, Some(x_tau)), 50, eps).unwrap();
        let base2 =
            scinol2_regret_bound_from_stats(&[u], &stats_1d(m, s2, Some(x_tau)), eps).unwrap();

        let scaled = |a: f64| {
            let stats = stats_1d(a * m, a * a * s2, Some(a * x_tau));
            (
                scinol1_regret_bound_from_stats(&[u / a], &stats, 50, eps).unwrap(),
                scinol2_regret_bound_from_stats(&[u / a], &stats, eps).unwrap(),
            )
        };

        let (p1, p2) = scaled(1024.0);
        assert_eq!(base1.to_bits(), p1.to_bits());
        assert_eq!(base2.to_bits(), p2.to_bits());

        let (q1, q2) = scaled(7.0);
        assert!(((q1 - base1) / base1).abs() < 1e-12);
        assert!(((q2 - base2) / base2).abs() < 1e-12);
    }

    #[test]
    fn input_validation() {
        let stats = stats_1d(1.0, 0.0, Some(1.0));
        assert!(scinol1_regret_bound_from_stats(&[1.0, 2.0], &stats, 1, 1.0).is_err());
        assert!(scinol1_regret_bound_from_stats(&[f64::NAN], &stats, 1, 1.0).is_err());
        assert!(scinol1_regret_bound_from_stats(&[1.0], &stats, 0, 1.0).is_err());
        assert!(scinol2_regret_bound_from_stats(&[1.0], &stats, -1.0).is_err());
    }
}
