//! Explicit constants and bound evaluation.
//!
//! All constants are functions of the proof parameter `M0 >= 6` (written
//! `y` below) and the exponent `k`; each tends to 1 as `M0` grows, so
//! larger `M0` gives tighter bounds. The x-dependent bounds are only
//! valid when the observed maximum chain length is at least `M0`, so
//! those operations demand an explicit witness and refuse otherwise.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters every constant depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub k: u32,
    pub m0: u64,
}

impl BoundParams {
    pub fn new(k: u32, m0: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("exponent k = {k} is below 2")));
        }
        if m0 < 6 {
            return Err(Error::domain(format!(
                "M0 = {m0} is below 6; the explicit constants are unproven there"
            )));
        }
        Ok(BoundParams { k, m0 })
    }
}

/// Every evaluated constant for one (k, M0) pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundReport {
    pub k: u32,
    pub m0: u64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub c_k: f64,
    /// 1.25506 * F / E: pairs with [`tabulated_prefactor`] in the printed
    /// constant table.
    pub u_table: f64,
    /// 1.25506 * F: carries the extra E factor the proof chain produces.
    pub u_proof: f64,
    pub l: f64,
    /// ((k+1)^2 / 2) * L.
    pub lower_constant: f64,
    /// tabulated_prefactor(k) * U_table.
    pub upper_constant: f64,
}

/// c_k = (k^2 / (k-1)) * (k+1)^{1 - 1/k}.
pub fn c_k(k: u32) -> f64 {
    let kf = k as f64;
    kf * kf / (kf - 1.0) * (kf + 1.0).powf((kf - 1.0) / kf)
}

/// The prefactor that pairs with `U_table` in the tabulated upper
/// constants: c_k for k = 2, (k+1)^{2 - 1/k} for k >= 3.
pub fn tabulated_prefactor(k: u32) -> f64 {
    let kf = k as f64;
    if k == 2 {
        c_k(k)
    } else {
        (kf + 1.0).powf(2.0 - 1.0 / kf)
    }
}

fn a_fn(y: f64) -> f64 {
    (y / 2.0).ln() / y.ln()
}

fn b_fn(y: f64, k: f64) -> f64 {
    (y + 1.0).ln() / y.ln() + (2.0 * (y + 1.0).ln()).ln() / y.ln() * k / (k + 1.0)
}

fn c_fn(y: f64, k: f64) -> f64 {
    (y / (y - 1.0)).powf(1.0 / (k + 1.0)) * b_fn(y, k).powf(k / (k + 1.0))
}

fn d_fn(y: f64, k: f64) -> f64 {
    (y / (y + 3.0)) * ((y / 2.0).ln() / (y.ln() + 2.0 * (y + 2.0).ln().ln())).powf(k / (k + 1.0))
}

fn e_fn(y: f64, k: f64) -> f64 {
    1.0 + 1.0 / ((k + 1.0) * a_fn(y) - 1.0)
}

fn f_fn(y: f64, k: f64) -> f64 {
    ((y + 1.0) / y).powf((k - 1.0) / k)
        * 4f64.powf((k - 1.0) / (k * (k + 1.0)))
        * c_fn(y, k).powf((k - 1.0) / k)
        * e_fn(y, k)
}

const PI_UPPER: f64 = 1.25506;

/// Evaluate A, B, C, D, E, F, U, L and the two headline constants.
pub fn eval_constants(params: BoundParams) -> Result<BoundReport> {
    let y = params.m0 as f64;
    let kf = params.k as f64;
    let a = a_fn(y);
    let b = b_fn(y, kf);
    let c = c_fn(y, kf);
    let d = d_fn(y, kf);
    let e = e_fn(y, kf);
    let f = f_fn(y, kf);
    let u_proof = PI_UPPER * f;
    let u_table = u_proof / e;
    let l = (y - 1.0) / y * d * d;
    Ok(BoundReport {
        k: params.k,
        m0: params.m0,
        a,
        b,
        c,
        d,
        e,
        f,
        c_k: c_k(params.k),
        u_table,
        u_proof,
        l,
        lower_constant: (kf + 1.0) * (kf + 1.0) / 2.0 * l,
        upper_constant: tabulated_prefactor(params.k) * u_table,
    })
}

/// Which power of log x the x-dependent bounds divide by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogExponent {
    /// 2k/(k+1), the power the proofs produce. Default.
    Proof,
    /// k/(k+1), the power the bound statements print.
    Statement,
}

impl LogExponent {
    fn power(self, k: u32) -> f64 {
        let kf = k as f64;
        match self {
            LogExponent::Proof => 2.0 * kf / (kf + 1.0),
            LogExponent::Statement => kf / (kf + 1.0),
        }
    }
}

/// The witness gate: x-dependent bounds hold only when M(x, k) >= M0,
/// and the caller must demonstrate that with an observed chain length.
fn require_witness(params: BoundParams, m_observed: usize) -> Result<()> {
    if (m_observed as u64) < params.m0 {
        return Err(Error::domain(format!(
            "refused: observed maximum chain length {m_observed} is below M0 = {}; \
             the bound is unproven in this range",
            params.m0
        )));
    }
    Ok(())
}

fn x_ln(x: u128) -> Result<(f64, f64)> {
    if x < 2 {
        return Err(Error::domain(format!("x = {x} is too small for a bound")));
    }
    let xf = x as f64;
    Ok((xf, xf.ln()))
}

/// Upper bound on s_k(x): c_k * U_proof * x^{2/(k+1)} / (log x)^e.
pub fn upper_bound_skx(
    x: u128,
    params: BoundParams,
    m_observed: usize,
    exponent: LogExponent,
) -> Result<f64> {
    require_witness(params, m_observed)?;
    let (xf, lx) = x_ln(x)?;
    let kf = params.k as f64;
    let report = eval_constants(params)?;
    Ok(report.c_k * report.u_proof * xf.powf(2.0 / (kf + 1.0)) / lx.powf(exponent.power(params.k)))
}

/// Lower bound on s_k(x): ((k+1)^2 / 2) * L * x^{2/(k+1)} / (log x)^e.
pub fn lower_bound_skx(
    x: u128,
    params: BoundParams,
    m_observed: usize,
    exponent: LogExponent,
) -> Result<f64> {
    require_witness(params, m_observed)?;
    let (xf, lx) = x_ln(x)?;
    let kf = params.k as f64;
    let report = eval_constants(params)?;
    Ok(
        (kf + 1.0) * (kf + 1.0) / 2.0 * report.l * xf.powf(2.0 / (kf + 1.0))
            / lx.powf(exponent.power(params.k)),
    )
}

/// Upper bound on M(x, k): 4^{1/(k+1)} (k+1) x^{1/(k+1)} / (log x)^{k/(k+1)} * C.
pub fn m_upper(x: u128, params: BoundParams, m_observed: usize) -> Result<f64> {
    require_witness(params, m_observed)?;
    let (xf, lx) = x_ln(x)?;
    let kf = params.k as f64;
    let report = eval_constants(params)?;
    Ok(
        4f64.powf(1.0 / (kf + 1.0)) * (kf + 1.0) * xf.powf(1.0 / (kf + 1.0))
            / lx.powf(kf / (kf + 1.0))
            * report.c,
    )
}

/// Lower bound on M(x, k): (k+1) x^{1/(k+1)} / (log x)^{k/(k+1)} * D.
pub fn m_lower(x: u128, params: BoundParams, m_observed: usize) -> Result<f64> {
    require_witness(params, m_observed)?;
    let (xf, lx) = x_ln(x)?;
    let kf = params.k as f64;
    let report = eval_constants(params)?;
    Ok((kf + 1.0) * xf.powf(1.0 / (kf + 1.0)) / lx.powf(kf / (kf + 1.0)) * report.d)
}

/// Bracket for log M(x, k): (log x / ((k+1) B), log x / ((k+1) A)).
pub fn logm_bounds(x: u128, params: BoundParams, m_observed: usize) -> Result<(f64, f64)> {
    require_witness(params, m_observed)?;
    let (_, lx) = x_ln(x)?;
    let kf = params.k as f64;
    let report = eval_constants(params)?;
    Ok((lx / ((kf + 1.0) * report.b), lx / ((kf + 1.0) * report.a)))
}

/// Evaluate the constant table for every (k, M0) pair, k outer, M0 inner.
pub fn bounds_table(k_list: &[u32], m0_list: &[u64]) -> Result<Vec<BoundReport>> {
    let mut out = Vec::with_capacity(k_list.len() * m0_list.len());
    for &k in k_list {
        for &m0 in m0_list {
            out.push(eval_constants(BoundParams::new(k, m0)?)?);
        }
    }
    Ok(out)
}

pub const BOUNDS_CSV_HEADER: &str = "M0,k,lower,upper";

/// Write the constant table as CSV with 6 significant figures.
pub fn write_bounds_csv<W: Write>(reports: &[BoundReport], mut w: W) -> Result<()> {
    writeln!(w, "{BOUNDS_CSV_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{}",
            r.m0,
            r.k,
            format_sig(r.lower_constant, 6),
            format_sig(r.upper_constant, 6)
        )?;
    }
    Ok(())
}

/// Fixed-point decimal with the given number of significant figures.
pub fn format_sig(v: f64, sig: u32) -> String {
    assert!(sig >= 1);
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = sig as i32 - 1 - magnitude;
    let factor = 10f64.powi(decimals);
    let rounded = (v * factor).round() / factor;
    // Rounding can bump the magnitude (9.9999 -> 10.0), costing a decimal.
    let magnitude = rounded.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0);
    format!("{rounded:.*}", decimals as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_sig6(value: f64, printed: f64) {
        let tol = 10f64.powi(printed.abs().log10().floor() as i32 - 5);
        assert!(
            (value - printed).abs() <= tol,
            "{value} differs from {printed} by more than one unit in the sixth figure"
        );
    }

    #[test]
    fn constant_spot_checks() {
        let r = eval_constants(BoundParams::new(2, 6).unwrap()).unwrap();
        assert_sig6(r.lower_constant, 0.391504);
        assert_sig6(r.upper_constant, 14.2423);

        let r = eval_constants(BoundParams::new(3, 100).unwrap()).unwrap();
        assert_sig6(r.lower_constant, 2.72032);
        assert_sig6(r.upper_constant, 18.7705);

        let r = eval_constants(BoundParams::new(5, 10_000).unwrap()).unwrap();
        assert_sig6(r.lower_constant, 8.19445);
        assert_sig6(r.upper_constant, 44.4013);

        let r = eval_constants(BoundParams::new(10, 100).unwrap()).unwrap();
        assert_sig6(r.lower_constant, 16.6068);
        assert_sig6(r.upper_constant, 182.224);

        let r = eval_constants(BoundParams::new(20, 1_000_000).unwrap()).unwrap();
        assert_sig6(r.lower_constant, 108.222);
        assert_sig6(r.upper_constant, 609.797);
    }

    #[test]
    fn params_are_validated() {
        assert!(BoundParams::new(1, 6).is_err());
        assert!(BoundParams::new(2, 5).is_err());
        assert!(BoundParams::new(2, 6).is_ok());
    }

    #[test]
    fn constants_tend_to_one() {
        for k in [2u32, 5, 20] {
            let kf = k as f64;
            let near = |m0: u64| {
                let y = m0 as f64;
                [a_fn(y), b_fn(y, kf), c_fn(y, kf), d_fn(y, kf)]
            };
            let coarse = near(1_000_000);
            let fine = near(1_000_000_000);
            for (c, f) in coarse.iter().zip(fine.iter()) {
                assert!((f - 1.0).abs() < (c - 1.0).abs());
            }
        }
    }

    #[test]
    fn witness_gate_refuses_small_chains() {
        let params = BoundParams::new(2, 6).unwrap();
        assert!(matches!(
            upper_bound_skx(1000, params, 5, LogExponent::Proof),
            Err(Error::Domain(_))
        ));
        assert!(upper_bound_skx(1000, params, 7, LogExponent::Proof).is_ok());
    }

    #[test]
    fn statement_exponent_divides_less() {
        let params = BoundParams::new(2, 6).unwrap();
        let proof = upper_bound_skx(1_000_000, params, 54, LogExponent::Proof).unwrap();
        let statement = upper_bound_skx(1_000_000, params, 54, LogExponent::Statement).unwrap();
        let lx = 1_000_000f64.ln();
        let ratio = statement / proof;
        assert!((ratio - lx.powf(2.0 / 3.0)).abs() < 1e-9 * ratio);
    }

    #[test]
    fn lemma_bounds_bracket_m_at_one_million() {
        let params = BoundParams::new(2, 6).unwrap();
        let lo = m_lower(1_000_000, params, 54).unwrap();
        let hi = m_upper(1_000_000, params, 54).unwrap();
        assert!(lo <= 54.0 && 54.0 <= hi, "bracket ({lo}, {hi})");
        assert!((lo - 16.8).abs() < 0.5, "lower {lo}");
        assert!((hi - 119.8).abs() < 1.0, "upper {hi}");

        let (llo, lhi) = logm_bounds(1_000_000, params, 54).unwrap();
        let lm = 54f64.ln();
        assert!(llo < lm && lm < lhi);
        assert!(llo < lhi);
    }

    #[test]
    fn log_bracket_tightens_with_m0() {
        // The bracket width is B/A, a function of M0 alone, so a
        // hypothetical witness at the threshold is enough.
        let mut widths = Vec::new();
        for m0 in [6u64, 100, 10_000, 1_000_000] {
            let params = BoundParams::new(2, m0).unwrap();
            let (lo, hi) = logm_bounds(10u128.pow(9), params, m0 as usize).unwrap();
            widths.push(hi / lo);
        }
        assert!(widths.windows(2).all(|w| w[1] < w[0]), "{widths:?}");
    }

    #[test]
    fn table_ordering_is_k_outer() {
        let reports = bounds_table(&[2, 3], &[6, 100]).unwrap();
        let keys: Vec<(u32, u64)> = reports.iter().map(|r| (r.k, r.m0)).collect();
        assert_eq!(keys, vec![(2, 6), (2, 100), (3, 6), (3, 100)]);
    }

    #[test]
    fn csv_shape() {
        let reports = bounds_table(&[2], &[6]).unwrap();
        let mut buf = Vec::new();
        write_bounds_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("M0,k,lower,upper"));
        assert_eq!(lines.next(), Some("6,2,0.391504,14.2423"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn significant_figure_formatting() {
        assert_eq!(format_sig(0.39150405, 6), "0.391504");
        assert_eq!(format_sig(14.242293, 6), "14.2423");
        assert_eq!(format_sig(1012.2087, 6), "1012.21");
        assert_eq!(format_sig(609.79693, 6), "609.797");
        assert_eq!(format_sig(63.156013, 6), "63.1560");
        assert_eq!(format_sig(9.999999, 6), "10.0000");
        assert_eq!(format_sig(123456.78, 6), "123457");
        assert_eq!(format_sig(0.0, 6), "0");
    }

    #[test]
    fn monotone_tightening_across_m0() {
        for k in [2u32, 3, 5, 10, 20] {
            let reports = bounds_table(&[k], &[6, 100, 10_000, 1_000_000]).unwrap();
            assert!(reports
                .windows(2)
                .all(|w| w[1].lower_constant > w[0].lower_constant));
            assert!(reports
                .windows(2)
                .all(|w| w[1].upper_constant < w[0].upper_constant));
        }
    }
}
