//! Log-gamma, digamma, and trigamma for the beta-regression likelihood.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

/// Constant value for `ln(pi)`.
const LN_PI: f64 = 1.14472988584940017414;

/// Constant value for `ln(2 * sqrt(e / pi))`.
const LN_2_SQRT_E_OVER_PI: f64 = 0.62078223763524522234;

/// Polynomial coefficients for the Lanczos approximation of `ln_gamma`
/// (Pugh 2004, g = 10.900511, n = 11).
const GAMMA_DK: &[f64] = &[
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

const GAMMA_R: f64 = 10.900511;

/// Natural logarithm of the gamma function, accurate to ~14 digits.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, t| s + t.1 / (t.0 as f64 - x));

        LN_PI
            - (PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + GAMMA_R) / std::f64::consts::E).ln()
    } else {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, t| s + t.1 / (x + t.0 as f64 - 1.0));

        s.ln()
            + LN_2_SQRT_E_OVER_PI
            + (x - 0.5) * ((x - 0.5 + GAMMA_R) / std::f64::consts::E).ln()
    }
}

/// Digamma ψ(x), the derivative of `ln_gamma` (Bernardo, AS 103).
pub fn digamma(x: f64) -> f64 {
    let c = 12.0;
    let d1 = -0.57721566490153286;
    let d2 = 1.6449340668482264365;
    let s = 1e-6;
    let s3 = 1.0 / 12.0;
    let s4 = 1.0 / 120.0;
    let s5 = 1.0 / 252.0;
    let s6 = 1.0 / 240.0;
    let s7 = 1.0 / 132.0;

    if x == f64::NEG_INFINITY || x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x.floor() == x {
        return f64::NEG_INFINITY;
    }
    if x < 0.0 {
        return digamma(1.0 - x) + PI / (-PI * x).tan();
    }
    if x <= s {
        return d1 - 1.0 / x + d2 * x;
    }

    let mut result = 0.0;
    let mut z = x;
    while z < c {
        result -= 1.0 / z;
        z += 1.0;
    }

    if z >= c {
        let mut r = 1.0 / z;
        result += z.ln() - 0.5 * r;
        r *= r;
        result -= r * (s3 - r * (s4 - r * (s5 - r * (s6 - r * s7))));
    }
    result
}

/// Trigamma ψ′(x) via the recurrence ψ′(x) = ψ′(x+1) + 1/x² and the
/// asymptotic series for large arguments (Schneider, AS 121).
pub fn trigamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x.floor() == x {
        return f64::INFINITY;
    }
    if x < 0.0 {
        // reflection: psi'(1-x) + psi'(x) = pi^2 / sin^2(pi x)
        let s = (PI * x).sin();
        return PI * PI / (s * s) - trigamma(1.0 - x);
    }

    let mut result = 0.0;
    let mut z = x;
    while z < 6.0 {
        result += 1.0 / (z * z);
        z += 1.0;
    }

    // asymptotic expansion: 1/z + 1/(2z^2) + sum B_2n / z^(2n+1)
    let r = 1.0 / (z * z);
    result
        + 1.0 / z
        + r / 2.0
        + r / z * (1.0 / 6.0 - r * (1.0 / 30.0 - r * (1.0 / 42.0 - r / 30.0)))
}
