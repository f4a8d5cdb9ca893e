//! Closed-form success probability, its optimum over `delta` and the
//! large-`N` expansions used for comparison.

use std::f64::consts::E;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// `Eff_N(delta) = N d^2 (1-d^2)^(N-1) / (d^2 + (N-1)^2 (1-d^2))`.
pub fn efficiency_closed_form(n: usize, delta: f64) -> f64 {
    efficiency_of_delta_sq(n, delta * delta)
}

/// [`efficiency_closed_form`] as a function of `x = delta^2`.
pub fn efficiency_of_delta_sq(n: usize, x: f64) -> f64 {
    let m = (n - 1) as f64;
    n as f64 * x * (1.0 - x).powi(n as i32 - 1) / (x + m * m * (1.0 - x))
}

/// Maximizing `delta^2`.
///
/// For `N >= 3` this is the root of the stationarity condition that lies in
/// `[0, 1]`. At `N = 2` that expression is `0/0`; the maximizer of
/// `2 d^2 (1 - d^2)` is `d^2 = 1/2`.
pub fn optimal_delta_sq(n: usize) -> f64 {
    assert!(n >= 2, "optimal_delta_sq needs n >= 2");
    if n == 2 {
        return 0.5;
    }
    let nf = n as f64;
    let disc = (nf.powi(3) - 6.0 * nf * nf + 13.0 * nf - 8.0) / nf;
    (1.0 - nf + disc.sqrt()) / (4.0 - 2.0 * nf)
}

pub fn optimal_delta(n: usize) -> f64 {
    optimal_delta_sq(n).sqrt()
}

pub fn optimal_efficiency(n: usize) -> f64 {
    efficiency_closed_form(n, optimal_delta(n))
}

/// `e^-1 / N^2 + 7 e^-1 / (2 N^3)`.
pub fn asymptotic_efficiency(n: usize) -> f64 {
    let nf = n as f64;
    (1.0 / (nf * nf) + 3.5 / nf.powi(3)) / E
}

/// Large-`N` efficiency of the auxiliary-particle quantum-erasure scheme
/// without feedforward: `e^-1 / N^2 + e^-1 / (2 N^3)`.
pub fn competitor_asymptotic(n: usize) -> f64 {
    let nf = n as f64;
    (1.0 / (nf * nf) + 0.5 / nf.powi(3)) / E
}

/// `ln Eff(a) - ln Eff(b)` for `a, b = delta^2` in `(0, 1)`, evaluated
/// without cancellation between nearby arguments.
pub fn log_efficiency_ratio(n: usize, a: f64, b: f64) -> f64 {
    let h = a - b;
    let m2 = ((n - 1) * (n - 1)) as f64;
    let denom_b = b + m2 * (1.0 - b);
    (h / b).ln_1p() + (n - 1) as f64 * (-h / (1.0 - b)).ln_1p() - (h * (1.0 - m2) / denom_b).ln_1p()
}

/// `delta^2` bracket searched by [`golden_section_delta_sq`].
pub const GOLDEN_BRACKET: (f64, f64) = (1e-6, 1.0 - 1e-6);
/// Bracket width at which [`golden_section_delta_sq`] stops.
pub const GOLDEN_TOLERANCE: f64 = 1e-12;

/// Numerical maximizer of `Eff_N` over `delta^2` by golden-section search.
///
/// Probe points are compared through [`log_efficiency_ratio`] so that the
/// bracket keeps shrinking past the `sqrt(machine eps)` flatness limit of
/// comparing raw function values.
pub fn golden_section_delta_sq(n: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = GOLDEN_BRACKET;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    while hi - lo > GOLDEN_TOLERANCE {
        if log_efficiency_ratio(n, x1, x2) > 0.0 {
            hi = x2;
            x2 = x1;
            x1 = hi - inv_phi * (hi - lo);
        } else {
            lo = x1;
            x1 = x2;
            x2 = lo + inv_phi * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

/// Central finite difference of `Eff_N` in `delta`.
pub fn efficiency_slope(n: usize, delta: f64, step: f64) -> f64 {
    (efficiency_closed_form(n, delta + step) - efficiency_closed_form(n, delta - step))
        / (2.0 * step)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub delta_max: f64,
    pub eff_exact: f64,
    pub eff_asymptotic: f64,
    pub eff_competitor_asymptotic: f64,
}

impl EfficiencyRow {
    pub fn for_qubits(n: usize) -> Self {
        EfficiencyRow {
            n,
            delta_max: optimal_delta(n),
            eff_exact: optimal_efficiency(n),
            eff_asymptotic: asymptotic_efficiency(n),
            eff_competitor_asymptotic: competitor_asymptotic(n),
        }
    }
}

/// Optimal efficiency against `N`, one row per `N = 2..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyCurve {
    pub rows: Vec<EfficiencyRow>,
}

pub const CSV_HEADER: &str = "N,delta_max,eff_exact,eff_asymptotic,eff_competitor_asymptotic";

/// Significant digits written to CSV.
pub const CSV_DIGITS: usize = 12;

pub fn efficiency_curve(n_max: usize) -> Result<EfficiencyCurve> {
    if n_max < 2 {
        return Err(Error::TooFewQubits(n_max));
    }
    Ok(EfficiencyCurve {
        rows: (2..=n_max).map(EfficiencyRow::for_qubits).collect(),
    })
}

/// Rounds to `digits` significant digits and prints the shortest decimal
/// that reads back as the rounded value.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses");
    format!("{rounded}")
}

impl EfficiencyCurve {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.n,
                format_significant(r.delta_max, CSV_DIGITS),
                format_significant(r.eff_exact, CSV_DIGITS),
                format_significant(r.eff_asymptotic, CSV_DIGITS),
                format_significant(r.eff_competitor_asymptotic, CSV_DIGITS),
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn closed_form_edges() {
        for n in 2..=20 {
            assert_eq!(efficiency_closed_form(n, 0.0), 0.0);
            assert_eq!(efficiency_closed_form(n, 1.0), 0.0);
        }
        assert!((efficiency_closed_form(2, FRAC_1_SQRT_2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn optimum_at_two_and_three() {
        assert_eq!(optimal_delta_sq(2), 0.5);
        assert!((optimal_delta(2) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((optimal_efficiency(2) - 0.5).abs() < 1e-15);
        let x3 = 1.0 - 1.0 / 3f64.sqrt();
        assert!((optimal_delta_sq(3) - x3).abs() < 1e-15);
        assert!((optimal_delta_sq(3) - 0.422649730810).abs() < 1e-12);
        assert!((optimal_efficiency(3) - 0.154700538379).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_golden_section() {
        for n in 3..=50 {
            let numeric = golden_section_delta_sq(n);
            let diff = (numeric.sqrt() - optimal_delta(n)).abs();
            assert!(diff < 1e-9, "n={n} diff={diff:e}");
        }
    }

    #[test]
    fn golden_section_also_finds_two() {
        assert!((golden_section_delta_sq(2) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn stationary_at_optimum() {
        for n in 2..=50 {
            let d = optimal_delta(n);
            let slope = efficiency_slope(n, d, 1e-6);
            let scale = optimal_efficiency(n);
            assert!(slope.abs() < 1e-6 * scale, "n={n} slope={slope:e}");
            // and it really is a maximum
            assert!(efficiency_closed_form(n, d + 1e-3) < optimal_efficiency(n));
            assert!(efficiency_closed_form(n, d - 1e-3) < optimal_efficiency(n));
        }
    }

    #[test]
    fn log_ratio_agrees_with_direct_ratio() {
        for n in [2, 3, 10, 40] {
            for (a, b) in [(0.1, 0.3), (0.5, 0.2), (0.05, 0.9)] {
                let direct = (efficiency_of_delta_sq(n, a) / efficiency_of_delta_sq(n, b)).ln();
                assert!((log_efficiency_ratio(n, a, b) - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn asymptotic_values() {
        let e_inv = (-1f64).exp();
        assert!((asymptotic_efficiency(10) - e_inv * (0.01 + 0.0035)).abs() < 1e-16);
        assert!((competitor_asymptotic(10) - e_inv * (0.01 + 0.0005)).abs() < 1e-16);
        for n in 2..=500 {
            let nf = n as f64;
            let gap = asymptotic_efficiency(n) - competitor_asymptotic(n);
            assert!((gap - 3.0 * e_inv / nf.powi(3)).abs() < 1e-15 * asymptotic_efficiency(n));
            assert!(gap > 0.0);
            let c = competitor_asymptotic(n);
            assert!(c > 0.0 && c < 1.0);
        }
        let big = 1e7 as usize;
        assert!((asymptotic_efficiency(big) * (big as f64).powi(2) - e_inv).abs() < 1e-6);
    }

    #[test]
    fn hundred_qubits_near_asymptote() {
        assert!((optimal_efficiency(100) - asymptotic_efficiency(100)).abs() < 5e-8);
    }

    #[test]
    fn curve_shape() {
        assert!(efficiency_curve(1).is_err());
        let c = efficiency_curve(3).unwrap();
        assert_eq!(c.rows.len(), 2);
        assert!((c.rows[0].eff_exact - 0.5).abs() < 1e-15);
        assert!((c.rows[1].eff_exact - 0.1547).abs() < 1e-4);
        let long = efficiency_curve(50).unwrap();
        assert!(long
            .rows
            .windows(2)
            .all(|w| w[0].n < w[1].n && w[1].eff_exact < w[0].eff_exact));
        for r in &long.rows {
            for v in [r.eff_exact, r.eff_asymptotic, r.eff_competitor_asymptotic] {
                assert!(v > 0.0 && v <= 1.0);
            }
        }
    }

    #[test]
    fn csv_formatting() {
        let c = efficiency_curve(2).unwrap();
        let text = c.to_csv_string();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert!(lines.next().unwrap().starts_with("2,0.707106781187,0.5,"));
        assert_eq!(format_significant(0.1234567890123456, 12), "0.123456789012");
        assert_eq!(
            format_significant(4.135616386803884e-6, 12),
            "0.0000041356163868"
        );
    }
}
