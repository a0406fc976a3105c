//! Information retrieved per memory cell, in bits.

use std::f64::consts::LN_2;

use crate::discrimination::{bound_report, ReadoutScenario, ReportOptions};
use crate::error::{Error, Result};
use crate::logprob::LnProb;
use crate::states::Transmitter;

/// Below this, the entropy is evaluated from the series in `p`.
const SMALL_P: f64 = 1e-15;

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("probability {p} outside [0, 1]")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    if p < SMALL_P {
        return Ok(small_p_entropy(p, p.ln()));
    }
    let q = 1.0 - p;
    Ok(-(p * p.log2()) - q * (-p).ln_1p() / LN_2)
}

/// Binary entropy from `ln p`; never exponentiates before the small-`p` branch.
pub fn binary_entropy_ln(ln_p: LnProb) -> Result<f64> {
    let lp = ln_p.0;
    if lp > 1e-15 || lp.is_nan() {
        return Err(Error::arg(format!("log-probability {lp} above 0")));
    }
    if lp == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let p = lp.exp();
    if p < SMALL_P {
        return Ok(small_p_entropy(p, lp));
    }
    binary_entropy(p.min(1.0))
}

/// `H(p) ≈ (p − p ln p)/ln 2`, dropping `O(p²)`.
fn small_p_entropy(p: f64, ln_p: f64) -> f64 {
    p * (1.0 - ln_p) / LN_2
}

/// `1 − H(p_err)`, with `p_err <= ½`.
pub fn info_retrieved(p_err: f64) -> Result<f64> {
    if p_err > 0.5 + 1e-15 {
        return Err(Error::arg(format!("error probability {p_err} above 1/2")));
    }
    Ok(1.0 - binary_entropy(p_err.min(0.5))?)
}

pub fn info_retrieved_ln(ln_p_err: LnProb) -> Result<f64> {
    if ln_p_err.0 > -LN_2 + 1e-15 {
        return Err(Error::arg(format!("error probability e^{} above 1/2", ln_p_err.0)));
    }
    Ok(1.0 - binary_entropy_ln(ln_p_err)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfoReport {
    /// `1 − H(P_QCB)`: information a quantum transmitter retrieves at least.
    pub j_min_quantum: f64,
    /// `1 − H(C)`: information any classical transmitter retrieves at most.
    pub j_max_classical: f64,
    pub gain: f64,
}

impl InfoReport {
    pub fn from_bounds(ln_p_qcb: LnProb, ln_p_classical: LnProb) -> Result<Self> {
        let j_min_quantum = info_retrieved_ln(ln_p_qcb)?;
        let j_max_classical = info_retrieved_ln(ln_p_classical)?;
        Ok(InfoReport { j_min_quantum, j_max_classical, gain: j_min_quantum - j_max_classical })
    }
}

/// Minimum information gain of `transmitter` over classical light. The gain is
/// built from an upper bound and a lower bound, so it understates the true
/// advantage.
pub fn info_report(scenario: &ReadoutScenario, transmitter: &Transmitter) -> Result<InfoReport> {
    let options = ReportOptions { numeric_infimum: false, helstrom: false };
    let report = bound_report(scenario, transmitter, options)?;
    InfoReport::from_bounds(report.ln_p_qcb.value, report.ln_p_classical_lb.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert!((binary_entropy(0.125).unwrap() - 0.543564443199596406).abs() < 1e-15);
        assert!(binary_entropy(1.2).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn entropy_series_is_continuous() {
        let below = binary_entropy(0.99e-15).unwrap();
        let above = binary_entropy(1.01e-15).unwrap();
        assert!((below / above - 0.99 / 1.01).abs() < 1e-2);
        let ln = binary_entropy_ln(LnProb(1e-16f64.ln())).unwrap();
        assert!((ln - 1e-16 * (1.0 - 1e-16f64.ln()) / LN_2).abs() < 1e-28);
    }

    #[test]
    fn entropy_from_deep_logs() {
        let h = binary_entropy_ln(LnProb(-69.0)).unwrap();
        let p = (-69.0f64).exp();
        assert!((h / (p * 70.0 / LN_2) - 1.0).abs() < 1e-14);
        assert_eq!(binary_entropy_ln(LnProb(-5000.0)).unwrap(), 0.0);
        assert_eq!(binary_entropy_ln(LnProb::ZERO).unwrap(), 0.0);
    }

    #[test]
    fn info_examples() {
        assert_eq!(info_retrieved(0.5).unwrap(), 0.0);
        assert_eq!(info_retrieved(0.0).unwrap(), 1.0);
        assert!((info_retrieved(0.102485).unwrap() - 0.5232).abs() < 1e-4);
        assert!(info_retrieved(0.6).is_err());
        let j = info_retrieved_ln(LnProb(-80.0)).unwrap();
        assert!(j > 1.0 - 1e-12 && j <= 1.0);
    }

    #[test]
    fn info_is_monotone_in_error() {
        let mut prev = f64::INFINITY;
        for i in 0..=500 {
            let p = 0.5 * i as f64 / 500.0;
            let j = info_retrieved(p).unwrap();
            assert!(j <= prev + 1e-15);
            prev = j;
        }
    }

    #[test]
    fn info_report_identical_channels() {
        let s = ReadoutScenario::new(3, 1.0, 0.01).unwrap().with_reflectivities(0.7, 0.7).unwrap();
        let r = info_report(&s, &Transmitter::SingleFock).unwrap();
        assert_eq!(r.j_max_classical, 0.0);
        assert_eq!(r.gain, r.j_min_quantum - r.j_max_classical);
    }

    #[test]
    fn info_report_single_n00n_copy() {
        // frozen from 30-digit evaluation of the closed forms
        let t = Transmitter::MandM { m: 1, m_prime: 0 };
        let s = ReadoutScenario::for_transmitter(1, &t, 1e-5).unwrap();
        let r = info_report(&s, &t).unwrap();
        assert!((r.j_min_quantum - 0.456435556835494829).abs() < 1e-9);
        assert!((r.j_max_classical - 0.306198915626223895).abs() < 1e-9);
        assert!((r.gain - 0.150236641209270934).abs() < 1e-9);
    }
}
