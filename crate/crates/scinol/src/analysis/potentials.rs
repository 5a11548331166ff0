//! Per-coordinate potential functions of the negative cumulative gradient.
//!
//! Both learners are analyzed through a convex, even potential of
//! G = -sum g_t x_{t,i}, measured in units of Ŝ = √(S² + M²). The additive
//! learner uses a shifted exponential scaled by its current wealth floor β;
//! the multiplicative learner uses exp of half the quadratic-to-linear
//! interpolant h.

/// Quadratic near zero, linear past |y| = 1, continuous at the knee:
/// y²/2 for |y| ≤ 1, |y| − ½ otherwise.
pub fn h_fn(y: f64) -> f64 {
    let a = y.abs();
    if a <= 1.0 {
        0.5 * y * y
    } else {
        a - 0.5
    }
}

/// β(e^{|x|/(2Ŝ)} − |x|/(2Ŝ) − 1), defined as 0 when Ŝ = 0.
pub fn psi1(x: f64, beta: f64, s_hat: f64) -> f64 {
    if s_hat == 0.0 {
        return 0.0;
    }
    let r = x.abs() / (2.0 * s_hat);
    beta * (r.exp_m1() - r)
}

/// e^{h(x/Ŝ)/2}, defined as 1 when Ŝ = 0.
pub fn psi2(x: f64, s_hat: f64) -> f64 {
    if s_hat == 0.0 {
        return 1.0;
    }
    (0.5 * h_fn(x / s_hat)).exp()
}
