//! Closed-form tail and proxy bounds for sums of independent [0,1]-valued
//! random variables, plus the comparison formulas that bound the expected
//! maximum of independent copies through the moment generating function or
//! through raw moments.
//!
//! Constant conventions used here:
//!
//! * The additive tail bound is `e^{1 - eps^2 n / 64}`: the max-proxy bound
//!   `4 sqrt(n ln(m+1))`, doubled by the tail-from-proxy threshold, forces
//!   `8 sqrt(n ln(m+1)) <= eps n`, i.e. `m = floor(e^{eps^2 n / 64} - 1)`,
//!   and `ln 2 / m <= (2 + ln 2) e^{-eps^2 n /64} <= e^{1 - eps^2 n / 64}`.
//! * The bounded-difference (sensitivity-Delta) tail is
//!   `e^{1 - eps^2 n / 256}`: replaying the same argument with the
//!   sensitivity-aware proxy bound `8 Delta sqrt(n ln m)` doubles the
//!   leading constant, so `16 Delta sqrt(n ln m) <= eps n Delta` forces
//!   `m = floor(e^{eps^2 n / 256})`.
//! * The moment-generating-function bound uses `E[e^{lambda(X-mu)}] <=
//!   e^{lambda^2/8}` for a [0,1] variable (Hoeffding's lemma), giving
//!   `e^{lambda^2 n / 8}` for the sum; the coefficient is recorded in the
//!   returned parameters so an alternative constant can be swapped in.
//! * The (2k)-th moment bound `O(nk)^k` has an unspecified constant; it is
//!   exposed as the parameter `c` (default 2) and the moment route is
//!   reported, never used as a correctness oracle.
//!
//! None of these constants are claimed to be tight.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{domain, Result};

/// A named bound evaluation: the value, the parameters it was computed
/// from, and — for probability bounds — whether it is vacuous (>= 1).
#[derive(Debug, Clone, Serialize)]
pub struct BoundValue {
    pub name: &'static str,
    pub value: f64,
    pub params: BTreeMap<&'static str, f64>,
    pub vacuous: bool,
}

impl BoundValue {
    fn probability(name: &'static str, value: f64, params: BTreeMap<&'static str, f64>) -> Self {
        BoundValue {
            name,
            value,
            params,
            vacuous: value >= 1.0,
        }
    }

    fn quantity(name: &'static str, value: f64, params: BTreeMap<&'static str, f64>) -> Self {
        BoundValue {
            name,
            value,
            params,
            vacuous: false,
        }
    }
}

fn check_eps_nonneg(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(domain(format!("eps must be finite and >= 0, got {eps}")));
    }
    Ok(())
}

/// Additive tail bound: `P(sum X_i - mu >= eps n) <= e^{1 - eps^2 n / 64}`.
pub fn additive_tail(n: u64, eps: f64) -> Result<BoundValue> {
    check_eps_nonneg(eps)?;
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    additive_tail_with_constant(n, eps, 64.0)
}

/// Same shape with an explicit denominator constant. The default is 64; the
/// harness exposes this knob so a deliberately falsified constant can be
/// injected to prove the verifier actually rejects bad bounds.
pub fn additive_tail_with_constant(n: u64, eps: f64, denom: f64) -> Result<BoundValue> {
    check_eps_nonneg(eps)?;
    if !(denom > 0.0) {
        return Err(domain("tail constant must be positive"));
    }
    let value = (1.0 - eps * eps * n as f64 / denom).exp();
    Ok(BoundValue::probability(
        "additive_tail",
        value,
        BTreeMap::from([("n", n as f64), ("eps", eps), ("denom", denom)]),
    ))
}

/// Expected-max proxy bound: `E[max{0, Y^1..Y^m}] <= 4 sqrt(n ln(m+1))`.
pub fn proxy_bound(n: u64, m: u64) -> Result<BoundValue> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    let value = 4.0 * (n as f64 * ((m as f64) + 1.0).ln()).sqrt();
    Ok(BoundValue::quantity(
        "proxy_bound",
        value,
        BTreeMap::from([("n", n as f64), ("m", m as f64)]),
    ))
}

/// Tail-from-proxy budget: `P(Y >= 2 E[max{0, Y^1..Y^m}]) <= ln(2)/m`.
pub fn maxtb_budget(m: u64) -> Result<BoundValue> {
    if m == 0 {
        return Err(domain("m must be >= 1"));
    }
    let value = std::f64::consts::LN_2 / m as f64;
    Ok(BoundValue::probability(
        "maxtb_budget",
        value,
        BTreeMap::from([("m", m as f64)]),
    ))
}

/// Multiplicative upper tail: `P(S >= (1+eps) mu) <= e (1+eps/4)^{-eps mu/8}`,
/// and for `eps <= 10` the weaker closed form `e^{1 - eps^2 mu / 64}`.
pub fn multiplicative_upper(mu: f64, eps: f64) -> Result<(BoundValue, Option<BoundValue>)> {
    check_eps_nonneg(eps)?;
    if !mu.is_finite() || mu < 0.0 {
        return Err(domain("mu must be finite and >= 0"));
    }
    let params = BTreeMap::from([("mu", mu), ("eps", eps)]);
    let exact = (1.0 - eps * mu / 8.0 * (eps / 4.0).ln_1p()).exp();
    let first = BoundValue::probability("multiplicative_upper", exact, params.clone());
    let second = if eps <= 10.0 {
        let v = (1.0 - eps * eps * mu / 64.0).exp();
        Some(BoundValue::probability(
            "multiplicative_upper_simplified",
            v,
            params,
        ))
    } else {
        None
    };
    Ok((first, second))
}

/// Multiplicative lower tail: `P(S <= (1-eps) mu) <= e^{1 - eps^2 mu / 32}`
/// for `eps` in [0, 1].
pub fn multiplicative_lower(mu: f64, eps: f64) -> Result<BoundValue> {
    if !eps.is_finite() || !(0.0..=1.0).contains(&eps) {
        return Err(domain(format!("eps must be in [0,1], got {eps}")));
    }
    if !mu.is_finite() || mu < 0.0 {
        return Err(domain("mu must be finite and >= 0"));
    }
    let value = (1.0 - eps * eps * mu / 32.0).exp();
    Ok(BoundValue::probability(
        "multiplicative_lower",
        value,
        BTreeMap::from([("mu", mu), ("eps", eps)]),
    ))
}

/// MGF bound for the centered sum: `E[e^{lambda(S - mu)}] <= e^{lambda^2 n/8}`.
pub fn mgf_bound(n: u64, lambda: f64) -> Result<BoundValue> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    if !lambda.is_finite() {
        return Err(domain("lambda must be finite"));
    }
    let value = (lambda * lambda * n as f64 / 8.0).exp();
    Ok(BoundValue::quantity(
        "mgf_bound",
        value,
        BTreeMap::from([("n", n as f64), ("lambda", lambda), ("coeff", 0.125)]),
    ))
}

/// ln(1 + e^b), overflow-safe.
fn softplus(b: f64) -> f64 {
    b.max(0.0) + (-b.abs()).exp().ln_1p()
}

/// Proxy from the MGF route:
/// `E[max{0, Y^1..Y^m}] <= (1/lambda) ln(1 + m e^{lambda^2 n/8})`.
pub fn proxy_from_mgf(n: u64, m: u64, lambda: f64) -> Result<BoundValue> {
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(domain("lambda must be finite and > 0"));
    }
    let params = BTreeMap::from([("n", n as f64), ("m", m as f64), ("lambda", lambda)]);
    let value = if m == 0 {
        0.0
    } else {
        softplus((m as f64).ln() + lambda * lambda * n as f64 / 8.0) / lambda
    };
    Ok(BoundValue::quantity("proxy_from_mgf", value, params))
}

/// Minimize [`proxy_from_mgf`] over lambda by golden-section search.
/// Returns the minimizing lambda together with the bound there.
pub fn proxy_from_mgf_minimized(n: u64, m: u64) -> Result<(f64, BoundValue)> {
    if m == 0 {
        return Ok((1.0, proxy_from_mgf(n, m, 1.0)?));
    }
    let g = |lambda: f64| proxy_from_mgf(n, m, lambda).expect("valid lambda").value;
    // The objective is unimodal in lambda; search on a wide bracket.
    let (mut a, mut b) = (1e-6f64, 1e3f64);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d);
        }
    }
    let lambda_star = 0.5 * (a + b);
    Ok((lambda_star, proxy_from_mgf(n, m, lambda_star)?))
}

/// Proxy from the moment route:
/// `E[max{|Y^1|..|Y^m|}] <= (m (c n k)^k)^{1/(2k)}`. The constant hidden in
/// the `O(nk)^k` moment bound is the caller-supplied `c` (conventionally 2).
pub fn proxy_from_moments(n: u64, m: u64, k: u64, c: f64) -> Result<BoundValue> {
    if n == 0 || m == 0 || k == 0 {
        return Err(domain("n, m, k must all be >= 1"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(domain("c must be finite and > 0"));
    }
    let kf = k as f64;
    let log_value = ((m as f64).ln() + kf * (c * n as f64 * kf).ln()) / (2.0 * kf);
    Ok(BoundValue::quantity(
        "proxy_from_moments",
        log_value.exp(),
        BTreeMap::from([
            ("n", n as f64),
            ("m", m as f64),
            ("k", kf),
            ("c", c),
        ]),
    ))
}

/// Sensitivity-aware expected-max bound:
/// `E[max_t (f(X^t) - E f)] <= 8 Delta sqrt(n ln m)`.
pub fn sens_max_bound(n: u64, m: u64, delta: f64) -> Result<BoundValue> {
    if n == 0 || m == 0 {
        return Err(domain("n and m must be >= 1"));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(domain("delta must be finite and >= 0"));
    }
    let value = 8.0 * delta * (n as f64 * (m as f64).ln()).sqrt();
    Ok(BoundValue::quantity(
        "sens_max_bound",
        value,
        BTreeMap::from([("n", n as f64), ("m", m as f64), ("delta", delta)]),
    ))
}

/// Bounded-difference tail: `P(f - E f >= eps n Delta) <= e^{1 - eps^2 n/256}`.
pub fn mcdiarmid_tail(n: u64, delta: f64, eps: f64) -> Result<BoundValue> {
    check_eps_nonneg(eps)?;
    if n == 0 {
        return Err(domain("n must be >= 1"));
    }
    if !delta.is_finite() || delta < 0.0 {
        return Err(domain("delta must be finite and >= 0"));
    }
    let value = (1.0 - eps * eps * n as f64 / 256.0).exp();
    Ok(BoundValue::probability(
        "mcdiarmid_tail",
        value,
        BTreeMap::from([("n", n as f64), ("delta", delta), ("eps", eps)]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: f64 = std::f64::consts::E;

    #[test]
    fn additive_examples() {
        let b = additive_tail(16, 0.0).unwrap();
        assert!((b.value - E).abs() < 1e-12);
        assert!(b.vacuous);
        let b = additive_tail(64, 1.0).unwrap();
        assert!((b.value - 1.0).abs() < 1e-12);
        assert!(b.vacuous);
        let b = additive_tail(1024, 0.5).unwrap();
        assert!((b.value - 0.049_787_068_367_863_944).abs() < 1e-12);
        assert!(!b.vacuous);
        assert!(additive_tail(1024, -0.1).is_err());
        assert!(additive_tail(0, 0.5).is_err());
    }

    #[test]
    fn proxy_bound_examples() {
        assert_eq!(proxy_bound(4, 0).unwrap().value, 0.0);
        assert!((proxy_bound(1, 1).unwrap().value - 3.330_218_444_630_790_8).abs() < 1e-12);
        assert!((proxy_bound(100, 1000).unwrap().value - 105.138_040_912_432_6).abs() < 1e-9);
    }

    #[test]
    fn maxtb_budget_examples() {
        assert!((maxtb_budget(1).unwrap().value - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((maxtb_budget(2).unwrap().value - 0.346_573_590_279_972_64).abs() < 1e-15);
        assert!((maxtb_budget(1_000_000).unwrap().value - 6.931_471_805_599_453e-7).abs() < 1e-18);
        assert!(maxtb_budget(0).is_err());
    }

    #[test]
    fn multiplicative_examples() {
        let (first, second) = multiplicative_upper(64.0, 0.0).unwrap();
        assert!((first.value - E).abs() < 1e-12 && first.vacuous);
        assert!((second.unwrap().value - E).abs() < 1e-12);

        let (first, _) = multiplicative_upper(64.0, 4.0).unwrap();
        assert!((first.value - E * 2f64.powi(-32)).abs() < 1e-22);

        // eps > 10: the simplified form does not apply.
        let (_, second) = multiplicative_upper(64.0, 12.0).unwrap();
        assert!(second.is_none());

        let b = multiplicative_lower(128.0, 1.0).unwrap();
        assert!((b.value - (-3f64).exp()).abs() < 1e-12);
        assert!((multiplicative_lower(5.0, 0.0).unwrap().value - E).abs() < 1e-12);
        assert!(multiplicative_lower(128.0, 1.5).is_err());
    }

    #[test]
    fn first_multiplicative_form_dominates_up_to_ten() {
        // e (1+eps/4)^{-eps mu/8} <= e^{1 - eps^2 mu/64} iff ln(1+eps/4) >= eps/8.
        for mu in [1.0, 16.0, 256.0] {
            for i in 1..=200 {
                let eps = i as f64 * 0.05;
                let (a, b) = multiplicative_upper(mu, eps).unwrap();
                let b = b.expect("eps <= 10");
                assert!(
                    a.value <= b.value * (1.0 + 1e-12),
                    "mu={mu} eps={eps}: {} vs {}",
                    a.value,
                    b.value
                );
            }
        }
    }

    #[test]
    fn mgf_examples() {
        assert!((mgf_bound(4, 0.0).unwrap().value - 1.0).abs() < 1e-15);
        assert!((mgf_bound(8, 1.0).unwrap().value - E).abs() < 1e-12);
        // cosh(lambda/2) <= e^{lambda^2/8} for a single centered Bernoulli(1/2).
        for i in -40..=40 {
            let lambda = i as f64 * 0.25;
            let lhs = (lambda / 2.0).cosh();
            let rhs = mgf_bound(1, lambda).unwrap().value;
            assert!(lhs <= rhs * (1.0 + 1e-12), "lambda={lambda}");
        }
    }

    #[test]
    fn proxy_from_mgf_examples() {
        assert_eq!(proxy_from_mgf(5, 0, 0.7).unwrap().value, 0.0);
        // Frozen from direct evaluation: 2 ln(1 + 10 e^{3.125}).
        let v = proxy_from_mgf(100, 10, 0.5).unwrap().value;
        assert!((v - 10.863_938_324_531_22).abs() < 1e-9, "{v}");
        assert!(proxy_from_mgf(100, 10, 0.0).is_err());
        // No overflow for huge exponents.
        let big = proxy_from_mgf(1_000_000, 1_000_000, 50.0).unwrap().value;
        assert!(big.is_finite());
    }

    #[test]
    fn proxy_from_mgf_minimizer_matches_grid() {
        for &(n, m) in &[(100u64, 1000u64), (16, 2), (256, 4096)] {
            let (lambda_star, at_min) = proxy_from_mgf_minimized(n, m).unwrap();
            assert!(lambda_star > 0.0);
            // Dense-grid oracle over log-lambda.
            let mut best = f64::INFINITY;
            for i in 0..=100_000 {
                let lambda = 10f64.powf(-6.0 + 9.0 * i as f64 / 100_000.0);
                best = best.min(proxy_from_mgf(n, m, lambda).unwrap().value);
            }
            assert!(
                (at_min.value - best).abs() <= 1e-6 * best.max(1.0),
                "n={n} m={m}: {} vs grid {best}",
                at_min.value
            );
        }
    }

    #[test]
    fn mgf_route_within_factor_four_of_proxy_bound() {
        let ns = [16u64, 32, 64, 128, 256];
        let ms = [2u64, 16, 256, 4096];
        for &n in &ns {
            for &m in &ms {
                let mgf_min = proxy_from_mgf_minimized(n, m).unwrap().1.value;
                let pb = proxy_bound(n, m).unwrap().value;
                let ratio = mgf_min / pb;
                assert!(
                    (0.25..=4.0).contains(&ratio),
                    "n={n} m={m} ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn proxy_from_moments_examples() {
        let v = proxy_from_moments(1, 1, 1, 2.0).unwrap().value;
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
        // Monotone non-decreasing in m at fixed (n, k, c).
        let mut prev = 0.0;
        for m in [1u64, 2, 8, 64, 1024] {
            let v = proxy_from_moments(64, m, 3, 2.0).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        // A grid search over k improves on k=1 for large m.
        let at_k1 = proxy_from_moments(64, 4096, 1, 2.0).unwrap().value;
        let best = (1..=64)
            .map(|k| proxy_from_moments(64, 4096, k, 2.0).unwrap().value)
            .fold(f64::INFINITY, f64::min);
        assert!(best < at_k1);
    }

    #[test]
    fn sens_and_mcdiarmid_examples() {
        assert_eq!(sens_max_bound(10, 1, 0.7).unwrap().value, 0.0);
        let v = sens_max_bound(100, 100, 0.5).unwrap().value;
        assert!((v - 4.0 * (100.0 * 100f64.ln()).sqrt()).abs() < 1e-12);
        assert!((v - 85.838_359_905_365_02).abs() < 1e-6);

        let b = mcdiarmid_tail(16, 1.0, 0.0).unwrap();
        assert!((b.value - E).abs() < 1e-12 && b.vacuous);
        assert!((mcdiarmid_tail(256, 1.0, 1.0).unwrap().value - 1.0).abs() < 1e-12);
        assert!(
            (mcdiarmid_tail(4096, 1.0, 0.5).unwrap().value - (-3f64).exp()).abs() < 1e-12
        );
    }

    #[test]
    fn probability_bounds_monotone_on_grids() {
        // Non-increasing in eps and in n (or mu) for eps > 0.
        for n in [16u64, 64, 256] {
            let mut prev = f64::INFINITY;
            for i in 0..=20 {
                let eps = i as f64 * 0.05;
                let v = additive_tail(n, eps).unwrap().value;
                assert!(v <= prev + 1e-15);
                assert!(v > 0.0);
                prev = v;
            }
        }
        for i in 1..=20 {
            let eps = i as f64 * 0.05;
            let mut prev = f64::INFINITY;
            for n in [16u64, 64, 256, 1024] {
                let v = additive_tail(n, eps).unwrap().value;
                assert!(v <= prev);
                prev = v;
            }
            let mut prev = f64::INFINITY;
            for mu in [8.0, 32.0, 128.0] {
                let v = multiplicative_lower(mu, eps.min(1.0)).unwrap().value;
                assert!(v <= prev);
                prev = v;
            }
            let mut prev = f64::INFINITY;
            for n in [16u64, 64, 256] {
                let v = mcdiarmid_tail(n, 1.0, eps).unwrap().value;
                assert!(v <= prev);
                prev = v;
            }
        }
    }
}
