//! The capacity law C(p, w) = w ln(1 + h p / (w N0)), the minimum-bandwidth
//! function F and its closed-form inverse, and the analytic derivatives used
//! by the barrier solver.
//!
//! Capacities are measured in nats/second throughout.

use crate::{Error, Result};

/// Relative tolerance for every scalar root in this module. Downstream
/// solver tolerances derive from this value.
pub const ROOT_REL_TOL: f64 = 1e-10;

/// One-hop link capacity in nats/s. Continuously extended to 0 at w = 0 or
/// p = 0, which avoids the 0 * ln(inf) ambiguity of the raw formula.
pub fn link_capacity(p: f64, w: f64, h: f64, n0: f64) -> Result<f64> {
    if p < 0.0 || w < 0.0 {
        return Err(Error::InvalidInput(format!(
            "negative power or bandwidth (p={p}, w={w})"
        )));
    }
    if !(h > 0.0) || !(n0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "gain and noise PSD must be positive (h={h}, n0={n0})"
        )));
    }
    Ok(cap_raw(p, w, h / n0))
}

/// Unchecked capacity with pre-normalized gain a = h / N0.
pub(crate) fn cap_raw(p: f64, w: f64, a: f64) -> f64 {
    if w == 0.0 || p == 0.0 {
        0.0
    } else {
        w * (1.0 + a * p / w).ln()
    }
}

/// Two-hop decode-and-forward capacity: the minimum of the hop capacities.
pub fn two_hop_capacity(
    p_s: f64,
    w_s: f64,
    h_sr: f64,
    p_r: f64,
    w_r: f64,
    h_rd: f64,
    n0: f64,
) -> Result<f64> {
    let first = link_capacity(p_s, w_s, h_sr, n0)?;
    let second = link_capacity(p_r, w_r, h_rd, n0)?;
    Ok(first.min(second))
}

/// Minimum bandwidth F(p) needed to reach capacity `c` at power `p`, where
/// `h` is the channel gain already normalized by the noise PSD.
///
/// Defined for p > c/h; below that floor the capacity w ln(1 + hp/w)
/// saturates at h p < c for every bandwidth. F is strictly convex and
/// strictly decreasing on its domain.
pub fn min_bandwidth(p: f64, h: f64, c: f64) -> Result<f64> {
    if !(h > 0.0) || !(c > 0.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!(
            "need h > 0, c > 0, finite p (p={p}, h={h}, c={c})"
        )));
    }
    let floor = c / h;
    if p <= floor {
        return Err(Error::InfeasiblePower { power: p, floor });
    }
    Ok(min_bandwidth_raw(h * p, c))
}

/// Root of f(w) = w ln(1 + a/w) - c for a = h p > c. f is strictly
/// increasing from -c (w -> 0) to a - c (w -> inf), so the root is unique.
/// Bracketed bisection narrows the interval, then Newton polishes.
pub(crate) fn min_bandwidth_raw(a: f64, c: f64) -> f64 {
    debug_assert!(a > c);
    let f = |w: f64| w * (1.0 + a / w).ln() - c;
    // ln(1 + a/w) in (0, inf); first guess from the high-SNR regime.
    let mut lo = c / (1.0 + a * 1e6).ln();
    let mut hi = lo.max(c);
    while f(hi) < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    while f(lo) > 0.0 {
        lo *= 0.5;
    }
    // Bisect to a safe neighborhood, then switch to Newton.
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= ROOT_REL_TOL * hi {
            break;
        }
    }
    let mut w = 0.5 * (lo + hi);
    for _ in 0..8 {
        let val = f(w);
        // f'(w) = ln(1 + a/w) - a/(w + a), positive on the domain.
        let deriv = (1.0 + a / w).ln() - a / (w + a);
        if deriv <= 0.0 {
            break;
        }
        let next = w - val / deriv;
        if !(next > lo && next < hi) {
            break;
        }
        if (next - w).abs() <= ROOT_REL_TOL * w {
            w = next;
            break;
        }
        w = next;
    }
    w
}

/// Closed-form inverse of F: the power needed to reach capacity `c` with
/// bandwidth `w`, i.e. p = (e^{c/w} - 1) w / h.
pub fn inv_min_bandwidth(w: f64, h: f64, c: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::InvalidInput(format!("bandwidth must be > 0 (w={w})")));
    }
    if !(h > 0.0) || !(c > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need h > 0 and c > 0 (h={h}, c={c})"
        )));
    }
    Ok(((c / w).exp() - 1.0) * w / h)
}

/// First and second partial derivatives of the capacity at an interior
/// point. The Hessian is rank one and negative semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityDerivatives {
    pub dp: f64,
    pub dw: f64,
    pub dpp: f64,
    pub dpw: f64,
    pub dww: f64,
}

pub fn capacity_gradients(p: f64, w: f64, h: f64, n0: f64) -> Result<CapacityDerivatives> {
    if !(p > 0.0) || !(w > 0.0) {
        return Err(Error::InvalidInput(format!(
            "derivatives need an interior point (p={p}, w={w})"
        )));
    }
    if !(h > 0.0) || !(n0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "gain and noise PSD must be positive (h={h}, n0={n0})"
        )));
    }
    let a = h / n0;
    let s = a * p / w; // per-channel SNR
    let d = 1.0 + s;
    Ok(CapacityDerivatives {
        dp: a / d,
        dw: d.ln() - s / d,
        dpp: -a * a / (w * d * d),
        dpw: a * s / (w * d * d),
        dww: -s * s / (w * d * d),
    })
}
