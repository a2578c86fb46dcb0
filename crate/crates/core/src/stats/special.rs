//! Special functions: log-gamma, regularized incomplete gamma, normal and
//! chi-squared quantiles.

use crate::error::{invalid, Error, Result};
use std::sync::OnceLock;

const MAX_ITER: usize = 20_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Both regularized incomplete gamma functions `(P(a, x), Q(a, x))`.
///
/// Series for `x < a + 1`, Lentz continued fraction otherwise, so the smaller
/// tail is always computed directly.
pub fn regularized_gamma(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !(x >= 0.0) || !a.is_finite() {
        return Err(invalid(format!("incomplete gamma domain: a={a}, x={x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                let p = (log_prefactor + sum.ln()).exp().min(1.0);
                return Ok((p, 1.0 - p));
            }
        }
        Err(Error::Numerical(format!("gamma series did not converge (a={a}, x={x})")))
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                let q = (log_prefactor + h.ln()).exp().min(1.0);
                return Ok((1.0 - q, q));
            }
        }
        Err(Error::Numerical(format!("gamma continued fraction did not converge (a={a}, x={x})")))
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let (p, q) = regularized_gamma(0.5, x * x).expect("x*x is a valid gamma argument");
    if x > 0.0 {
        q
    } else {
        1.0 + p
    }
}

/// Standard normal cdf.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

// Acklam's rational approximation, relative error ~1.15e-9.
fn normal_quantile_rough(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile_rough(1.0 - p)
    }
}

/// Inverse standard normal cdf, refined by Halley steps to near machine precision.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("normal quantile needs 0 < p < 1, got {p}")));
    }
    let mut x = normal_quantile_rough(p);
    for _ in 0..3 {
        let e = normal_cdf(x) - p;
        let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

/// The 0.75 quantile of the standard normal, the MAD consistency constant.
pub fn q3() -> f64 {
    static Q3: OnceLock<f64> = OnceLock::new();
    *Q3.get_or_init(|| normal_quantile(0.75).expect("0.75 is in range"))
}

/// Chi-squared cdf with `d` degrees of freedom.
pub fn chi2_cdf(x: f64, d: u32) -> Result<f64> {
    if d == 0 {
        return Err(invalid("chi-squared needs d >= 1"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok(regularized_gamma(d as f64 / 2.0, x / 2.0)?.0)
}

fn chi2_pdf(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ((k / 2.0 - 1.0) * (x / 2.0).ln() - x / 2.0 - ln_gamma(k / 2.0)).exp() / 2.0
}

/// Chi-squared quantile: the `q` with `P(d/2, q/2) = p`.
pub fn chi2_quantile(p: f64, d: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(invalid(format!("chi-squared quantile needs 0 <= p < 1, got {p}")));
    }
    if d == 0 {
        return Err(invalid("chi-squared quantile needs d >= 1"));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    solve_chi2(d, p, 1.0 - p)
}

/// Chi-squared quantile addressed by its upper tail `q = 1 - p`, for `p` close to 1.
pub fn chi2_quantile_upper(q: f64, d: u32) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(invalid(format!("upper-tail probability must be in (0, 1], got {q}")));
    }
    if d == 0 {
        return Err(invalid("chi-squared quantile needs d >= 1"));
    }
    if q == 1.0 {
        return Ok(0.0);
    }
    solve_chi2(d, 1.0 - q, q)
}

// Safeguarded Newton on whichever tail is smaller; `p + q = 1` with both
// supplied so that neither is formed by cancellation.
fn solve_chi2(d: u32, p: f64, q: f64) -> Result<f64> {
    let k = d as f64;
    let use_lower = p <= 0.5;
    let residual = |x: f64| -> Result<f64> {
        let (lp, uq) = regularized_gamma(k / 2.0, x / 2.0)?;
        Ok(if use_lower { lp - p } else { q - uq })
    };

    // Wilson-Hilferty start
    let z = normal_quantile_rough(p.clamp(1e-300, 1.0 - 1e-16));
    let c = 2.0 / (9.0 * k);
    let mut x = (k * (1.0 - c + z * c.sqrt()).powi(3)).max(1e-8 * k.min(1.0));
    if !x.is_finite() {
        x = k;
    }

    let mut lo = 0.0;
    let mut hi = x.max(1.0);
    let mut f_hi = residual(hi)?;
    while f_hi < 0.0 {
        lo = hi;
        hi *= 2.0;
        f_hi = residual(hi)?;
        if hi > 1e12 {
            return Err(Error::Numerical("chi-squared quantile bracket overflow".into()));
        }
    }
    x = x.clamp(lo, hi);

    for _ in 0..300 {
        let f = residual(x)?;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let pdf = chi2_pdf(x, k);
        let mut next = if pdf > 0.0 { x - f / pdf } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.max(1e-300) || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
