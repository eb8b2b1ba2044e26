//! GIG variate generation after Hörmann & Leydold (2014), "Generating
//! generalized inverse Gaussian random variates".
//!
//! The two-parameter form has density ∝ x^(λ-1) exp(-ω (x + 1/x) / 2) with
//! λ >= 0; GIG(a, b, p) is recovered as √(b/a)·X, and negative `p` through
//! the reciprocal identity. Three regimes:
//!
//! * λ > 2 or ω > 3: ratio-of-uniforms shifted by the mode
//! * λ >= 1 - 2.25ω² or ω > 0.2: ratio-of-uniforms without shift
//! * otherwise: the three-piece hat for the non-T-concave region

use super::{sample_gamma, sample_inverse_gamma, GigParams, RngStream};
use crate::error::Result;

/// ω = √(ab) below which GIG(a, b, p) is replaced by its gamma (p > 0) or
/// inverse-gamma (p < 0) limit. The test is on ω rather than on `a` or `b`
/// alone: a tiny `a` paired with a huge `b` is an ordinary GIG.
const DEGENERATE_OMEGA: f64 = 1e-12;

pub fn sample_gig(params: GigParams, rng: &mut RngStream) -> Result<f64> {
    let GigParams { a, b, p } = params;
    let omega = (a * b).sqrt();
    let degenerate = |v: f64| v == 0.0 || (v > 0.0 && omega < DEGENERATE_OMEGA);

    // GIG(a, b, p) -> Ga(p, a/2) as ω -> 0 with a fixed
    if p > 0.0 && a > 0.0 && a.is_finite() && degenerate(b) {
        return sample_gamma(p, 0.5 * a, rng);
    }
    // GIG(a, b, p) -> IG(-p, b/2) as ω -> 0 with b fixed
    if p < 0.0 && b > 0.0 && b.is_finite() && degenerate(a) {
        return sample_inverse_gamma(-p, 0.5 * b, rng);
    }
    params.validate()?;

    let lambda = p.abs();
    let scale = (b / a).sqrt();
    let x = if lambda > 2.0 || omega > 3.0 {
        rou_shift(lambda, omega, rng)
    } else if lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2 {
        rou_noshift(lambda, omega, rng)
    } else {
        three_piece_hat(lambda, omega, rng)
    };
    Ok(if p < 0.0 { scale / x } else { scale * x })
}

fn mode(lambda: f64, omega: f64) -> f64 {
    if lambda >= 1.0 {
        (((lambda - 1.0) * (lambda - 1.0) + omega * omega).sqrt() + (lambda - 1.0)) / omega
    } else {
        omega / (((1.0 - lambda) * (1.0 - lambda) + omega * omega).sqrt() + (1.0 - lambda))
    }
}

fn rou_noshift(lambda: f64, omega: f64, rng: &mut RngStream) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    let ym = ((lambda + 1.0) + ((lambda + 1.0) * (lambda + 1.0) + omega * omega).sqrt()) / omega;
    let um = (0.5 * (lambda + 1.0) * ym.ln() - s * (ym + 1.0 / ym) - nc).exp();
    loop {
        let u = um * rng.uniform();
        let v = rng.uniform();
        let x = u / v;
        if v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

fn rou_shift(lambda: f64, omega: f64, rng: &mut RngStream) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);

    // Roots of the cubic bounding the shifted ROU region.
    let a = -(2.0 * (lambda + 1.0) / omega + xm);
    let b = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
    let c = xm;
    let p = b - a * a / 3.0;
    let q = (2.0 * a * a * a) / 27.0 - (a * b) / 3.0 + c;
    let phi = (-q / (2.0 * (-(p * p * p) / 27.0).sqrt()))
        .clamp(-1.0, 1.0)
        .acos();
    let fak = 2.0 * (-p / 3.0).sqrt();
    let y1 = fak * (phi / 3.0).cos() - a / 3.0;
    let y2 = fak * (phi / 3.0 + 4.0 / 3.0 * std::f64::consts::PI).cos() - a / 3.0;

    let uplus = (y1 - xm) * (t * y1.ln() - s * (y1 + 1.0 / y1) - nc).exp();
    let uminus = (y2 - xm) * (t * y2.ln() - s * (y2 + 1.0 / y2) - nc).exp();
    loop {
        let u = uminus + rng.uniform() * (uplus - uminus);
        let v = rng.uniform();
        let x = u / v + xm;
        if x > 0.0 && v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

fn three_piece_hat(lambda: f64, omega: f64, rng: &mut RngStream) -> f64 {
    let xm = mode(lambda, omega);
    let x0 = omega / (1.0 - lambda);
    let k0 = ((lambda - 1.0) * xm.ln() - 0.5 * omega * (xm + 1.0 / xm)).exp();
    let area0 = k0 * x0;

    let (k1, area1, k2, area2);
    if x0 >= 2.0 / omega {
        k1 = 0.0;
        area1 = 0.0;
        k2 = x0.powf(lambda - 1.0);
        area2 = k2 * 2.0 * (-omega * x0 / 2.0).exp() / omega;
    } else {
        k1 = (-omega).exp();
        area1 = if lambda == 0.0 {
            k1 * (std::f64::consts::LN_2 - 2.0 * omega.ln())
        } else {
            k1 / lambda * ((2.0 / omega).powf(lambda) - x0.powf(lambda))
        };
        k2 = (2.0 / omega).powf(lambda - 1.0);
        area2 = k2 * 2.0 * (-1.0f64).exp() / omega;
    }
    let total = area0 + area1 + area2;

    loop {
        let mut v = total * rng.uniform();
        let (x, hx);
        if v <= area0 {
            x = x0 * v / area0;
            hx = k0;
        } else {
            v -= area0;
            if v <= area1 {
                if lambda == 0.0 {
                    x = omega * (omega.exp() * v).exp();
                    hx = k1 / x;
                } else {
                    x = (x0.powf(lambda) + lambda / k1 * v).powf(1.0 / lambda);
                    hx = k1 * x.powf(lambda - 1.0);
                }
            } else {
                v -= area1;
                let start = x0.max(2.0 / omega);
                x = -2.0 / omega * ((-omega / 2.0 * start).exp() - omega / (2.0 * k2) * v).ln();
                hx = k2 * (-omega / 2.0 * x).exp();
            }
        }
        let u = rng.uniform() * hx;
        if u.ln() <= (lambda - 1.0) * x.ln() - omega / 2.0 * (x + 1.0 / x) {
            return x;
        }
    }
}
