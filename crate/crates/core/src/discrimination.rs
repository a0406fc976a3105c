//! Error probabilities for telling the two memory-cell outputs apart.
//!
//! Multi-copy bounds are never built from tensor powers: for i.i.d. copies
//! `inf_s Q_s^M = (inf_s Q_s)^M`, so every bound is `ln ½ + M · ln(per-copy)`.

use std::f64::consts::LN_2;

use crate::channel::{channel_pair, ChannelOutputs};
use crate::error::{Error, Result};
use crate::linalg::{fidelity_pure, fractional_power, overlap_terms, tensor_with_limit, trace_norm, Operator, OverlapTerm, StateVector};
use crate::logprob::{ln_add_exp, LnProb};
use crate::search::GridGolden;
use crate::states::{StateFactory, Transmitter, TruncationPolicy};

/// Readout setting: copies, signal and noise photon numbers, reflectivities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutScenario {
    pub copies: usize,
    pub n_s: f64,
    pub n_b: f64,
    pub r0: f64,
    pub r1: f64,
    pub truncation: TruncationPolicy,
}

impl ReadoutScenario {
    /// Ideal memory (`r0 = 0`, `r1 = 1`) with the default truncation policy.
    pub fn new(copies: usize, n_s: f64, n_b: f64) -> Result<Self> {
        let s = ReadoutScenario { copies, n_s, n_b, r0: 0.0, r1: 1.0, truncation: TruncationPolicy::default() };
        s.validate()?;
        Ok(s)
    }

    /// Scenario whose `N_S` is the transmitter's signal mean.
    pub fn for_transmitter(copies: usize, transmitter: &Transmitter, n_b: f64) -> Result<Self> {
        transmitter.validate()?;
        Self::new(copies, transmitter.signal_mean(), n_b)
    }

    pub fn with_reflectivities(mut self, r0: f64, r1: f64) -> Result<Self> {
        self.r0 = r0;
        self.r1 = r1;
        self.validate()?;
        Ok(self)
    }

    pub fn with_copies(mut self, copies: usize) -> Result<Self> {
        self.copies = copies;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.copies == 0 {
            return Err(Error::arg("number of copies must be >= 1"));
        }
        if !(self.n_s > 0.0) || !self.n_s.is_finite() {
            return Err(Error::arg(format!("signal photon number must be > 0, got {}", self.n_s)));
        }
        if !(self.n_b >= 0.0) || !self.n_b.is_finite() {
            return Err(Error::arg(format!("noise photon number must be >= 0, got {}", self.n_b)));
        }
        for r in [self.r0, self.r1] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::arg(format!("reflectivity {r} outside [0, 1]")));
            }
        }
        self.truncation.validate()
    }

    pub fn is_ideal_memory(&self) -> bool {
        self.r0 == 0.0 && self.r1 == 1.0
    }

    pub fn require_ideal_memory(&self) -> Result<()> {
        if self.is_ideal_memory() {
            Ok(())
        } else {
            Err(Error::UnsupportedModel { r0: self.r0, r1: self.r1 })
        }
    }

    pub fn factory(&self) -> Result<StateFactory> {
        StateFactory::new(self.truncation)
    }
}

/// `Q_s = Tr[ρ0^s ρ1^(1-s)]` through explicit fractional powers.
pub fn s_overlap(rho0: &Operator, rho1: &Operator, s: f64) -> Result<f64> {
    if rho0.space() != rho1.space() {
        return Err(Error::arg("s-overlap needs both operators on one space"));
    }
    let a = fractional_power(rho0, s)?;
    let b = fractional_power(rho1, 1.0 - s)?;
    let (am, bm) = (a.matrix(), b.matrix());
    let n = am.nrows();
    let mut tr = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += am[(i, j)] * bm[(j, i)];
        }
    }
    if tr.im.abs() > 1e-10 {
        return Err(Error::Consistency(format!("s-overlap has imaginary part {:e}", tr.im)));
    }
    Ok(tr.re)
}

/// `Q_s` for one pair, evaluated from a single pair of eigendecompositions.
#[derive(Clone, Debug)]
pub struct OverlapProfile {
    terms: Vec<OverlapTerm>,
    rho1_rank: usize,
}

impl OverlapProfile {
    pub fn new(rho0: &Operator, rho1: &Operator) -> Result<Self> {
        if rho0.space() != rho1.space() {
            return Err(Error::arg("s-overlap needs both operators on one space"));
        }
        let e0 = rho0.eigen()?;
        let e1 = rho1.eigen()?;
        let mut rho1_rank = 0;
        for v in e1.values() {
            if crate::linalg::clamp_eigenvalue(v)? > 0.0 {
                rho1_rank += 1;
            }
        }
        Ok(OverlapProfile { terms: overlap_terms(&e0, &e1)?, rho1_rank })
    }

    pub fn q(&self, s: f64) -> f64 {
        self.terms.iter().map(|t| t.lambda.powf(s) * t.mu.powf(1.0 - s) * t.weight).sum()
    }

    /// `ln Q_s`, evaluated as a log-sum so tiny overlaps keep their exponent.
    pub fn ln_q(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| s * t.lambda.ln() + (1.0 - s) * t.mu.ln() + t.weight.ln())
            .fold(f64::NEG_INFINITY, ln_add_exp)
    }

    pub fn rho1_is_pure(&self) -> bool {
        self.rho1_rank == 1
    }
}

/// Quantum Chernoff bound with the located optimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChernoffBound {
    pub ln_p: LnProb,
    /// `ln inf_s Q_s`, the per-copy exponent.
    pub ln_q_min: f64,
    pub s_opt: f64,
}

/// `ln ½ + M ln inf_s Q_s`, infimum by a 65-point grid plus golden-section refinement.
pub fn qcb_numeric(rho0: &Operator, rho1: &Operator, copies: usize) -> Result<ChernoffBound> {
    let profile = OverlapProfile::new(rho0, rho1)?;
    qcb_from_profile(&profile, copies)
}

pub fn qcb_from_profile(profile: &OverlapProfile, copies: usize) -> Result<ChernoffBound> {
    check_copies(copies)?;
    let min = GridGolden::default().minimize(0.0, 1.0, |s| Ok::<f64, Error>(profile.ln_q(s)))?;
    // ln Q_s is convex, and Q_s <= 1 up to roundoff
    let ln_q_min = min.value.min(0.0);
    if profile.rho1_is_pure() && min.value.is_finite() && min.x < 1.0 - 1e-4 {
        return Err(Error::Consistency(format!(
            "pure bit-1 output but the Chernoff optimum sits at s = {}",
            min.x
        )));
    }
    Ok(ChernoffBound { ln_p: LnProb::half_power(ln_q_min, copies), ln_q_min, s_opt: min.x })
}

/// Chernoff bound when the bit-1 output is pure: the infimum sits at `s = 1`
/// and reduces to `⟨ψ1|ρ0|ψ1⟩`.
pub fn qcb_pure(psi1: &StateVector, rho0: &Operator, copies: usize) -> Result<LnProb> {
    check_copies(copies)?;
    let f = fidelity_pure(psi1, rho0)?;
    Ok(LnProb::half_power(ln_clamped(f), copies))
}

/// Minimum error `½(1 − ½‖ρ0 − ρ1‖₁)` for equal priors.
pub fn helstrom(rho0: &Operator, rho1: &Operator) -> Result<f64> {
    let norm = trace_norm(&rho0.sub(rho1)?)?;
    Ok((0.5 * (1.0 - 0.5 * norm)).clamp(0.0, 0.5))
}

/// Helstrom error on explicitly tensored copies; limited to `copies <= 2`
/// and to `max_total_dim`.
pub fn helstrom_copies(rho0: &Operator, rho1: &Operator, copies: usize, max_total_dim: usize) -> Result<f64> {
    match copies {
        1 => helstrom(rho0, rho1),
        2 => {
            let a = tensor_with_limit(rho0, rho0, max_total_dim)?;
            let b = tensor_with_limit(rho1, rho1, max_total_dim)?;
            helstrom(&a, &b)
        }
        0 => Err(Error::arg("number of copies must be >= 1")),
        _ => Err(Error::Capacity {
            requested: rho0.dim().saturating_pow(copies as u32),
            limit: max_total_dim,
        }),
    }
}

/// `ln p_n` of the thermal distribution, `p_n = N_B^n/(1+N_B)^(n+1)`.
pub fn ln_thermal_weight(n_b: f64, n: usize) -> f64 {
    if n_b == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * n_b.ln() - (n + 1) as f64 * n_b.ln_1p()
}

/// Closed-form Chernoff bound of the M&M state `|m::m'⟩`:
/// `½ · 4^-M · (p_m + p_m')^M`.
pub fn mm_qcb_closed(m: usize, m_prime: usize, n_b: f64, copies: usize) -> Result<LnProb> {
    Transmitter::MandM { m, m_prime }.validate()?;
    check_noise(n_b)?;
    check_copies(copies)?;
    let per_copy = ln_add_exp(ln_thermal_weight(n_b, m), ln_thermal_weight(n_b, m_prime)) - 4f64.ln();
    Ok(LnProb::half_power(per_copy, copies))
}

/// Closed-form Chernoff bound for the photon⊕coherent transmitter exactly as
/// it is usually quoted, with `x = 2N_S − 1`:
/// `½ e^{−Mx/(2(N_B+1))} [4(N_B+1)]^{−M} [1 + x(1+N_B+N_B²)/(2(N_B+1)²)]^M`.
///
/// This expression does not reduce to the M&M(1,0) value at `N_S = ½` when
/// `N_B > 0`; [`psi_qcb_numeric`] is the reference value.
pub fn psi_qcb_quoted(n_s: f64, n_b: f64, copies: usize) -> Result<LnProb> {
    if !(n_s >= 0.5) {
        return Err(Error::arg(format!("photon-coherent bound needs N_S >= 1/2, got {n_s}")));
    }
    check_noise(n_b)?;
    check_copies(copies)?;
    let x = 2.0 * n_s - 1.0;
    let g = n_b + 1.0;
    let per_copy = -x / (2.0 * g) - (4.0 * g).ln() + (x * (1.0 + n_b + n_b * n_b) / (2.0 * g * g)).ln_1p();
    Ok(LnProb::half_power(per_copy, copies))
}

/// Chernoff bound of the photon⊕coherent transmitter from the constructed
/// truncated-Fock output states.
pub fn psi_qcb_numeric(factory: &StateFactory, n_s: f64, n_b: f64, copies: usize) -> Result<LnProb> {
    let transmitter = Transmitter::photon_coherent_for_signal_mean(n_s)?;
    let scenario = ReadoutScenario { truncation: factory.policy, ..ReadoutScenario::new(copies, n_s, n_b)? };
    let out = channel_pair(factory, &scenario, &transmitter)?;
    qcb_pure(&out.psi1, &out.rho0, copies)
}

/// Single-photon Fock transmitter: `½ (N_B/(1+N_B)²)^M`.
pub fn fock_qcb_closed(n_b: f64, copies: usize) -> Result<LnProb> {
    check_noise(n_b)?;
    check_copies(copies)?;
    Ok(LnProb::half_power(ln_thermal_weight(n_b, 1), copies))
}

/// `(1 − √(1 − e^{ln_x}))/2` as a log, using `1 − √(1−x) = x/(1 + √(1−x))`.
fn ln_half_one_minus_sqrt(ln_x: f64) -> f64 {
    if ln_x == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let one_minus_x = -ln_x.exp_m1();
    ln_x - LN_2 - one_minus_x.max(0.0).sqrt().ln_1p()
}

/// Lower bound on the error of any classical transmitter, noiseless memory:
/// `(1 − √(1 − e^{−M N_S (√r1 − √r0)²}))/2`.
pub fn classical_lb_noiseless(copies: usize, n_s: f64, r0: f64, r1: f64) -> Result<f64> {
    Ok(classical_lb_noiseless_ln(copies, n_s, r0, r1)?.0.exp())
}

pub fn classical_lb_noiseless_ln(copies: usize, n_s: f64, r0: f64, r1: f64) -> Result<LnProb> {
    check_classical(copies, n_s, 0.0, r0, r1)?;
    if r0 == r1 {
        return Ok(LnProb::HALF);
    }
    let d = r1.sqrt() - r0.sqrt();
    Ok(LnProb(ln_half_one_minus_sqrt(-(copies as f64) * n_s * d * d)))
}

/// Per-copy `ln F` of the thermal-noise classical bound.
pub fn classical_ln_f(n_s: f64, n_b: f64, r0: f64, r1: f64) -> f64 {
    let gamma = 1.0 + (2.0 - r0 - r1) * n_b;
    let theta = 4.0 * n_b * n_b * [r0, r1].iter().map(|r| (1.0 - r) * (1.0 + (1.0 - r) * n_b)).product::<f64>();
    let d = r0.sqrt() - r1.sqrt();
    // √(γ²+θ) − √θ = γ² / (√(γ²+θ) + √θ)
    let denom = gamma * gamma / ((gamma * gamma + theta).sqrt() + theta.sqrt());
    -d * d * n_s / gamma - denom.ln()
}

/// Lower bound on the error of any classical transmitter with thermal noise:
/// `(1 − √(1 − F^M))/2`.
pub fn classical_lb_noisy(copies: usize, n_s: f64, n_b: f64, r0: f64, r1: f64) -> Result<f64> {
    Ok(classical_lb_noisy_ln(copies, n_s, n_b, r0, r1)?.0.exp())
}

pub fn classical_lb_noisy_ln(copies: usize, n_s: f64, n_b: f64, r0: f64, r1: f64) -> Result<LnProb> {
    check_classical(copies, n_s, n_b, r0, r1)?;
    if r0 == r1 {
        return Ok(LnProb::HALF);
    }
    let ln_fm = copies as f64 * classical_ln_f(n_s, n_b, r0, r1);
    Ok(LnProb(ln_half_one_minus_sqrt(ln_fm.min(0.0))))
}

/// Which evaluator produced a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Closed-form expression.
    ClosedForm,
    /// Pure-state fidelity on constructed Fock-space outputs.
    PureFidelity,
    /// Grid + golden-section infimum of `Q_s` on constructed outputs.
    NumericInfimum,
    /// Eigenvalues of `ρ0 − ρ1`.
    Eigen,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::PureFidelity => "pure-fidelity",
            Method::NumericInfimum => "numeric-infimum",
            Method::Eigen => "eigen",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound<T> {
    pub value: T,
    pub method: Method,
}

/// All error-probability bounds for one scenario and transmitter.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub transmitter: Transmitter,
    pub copies: usize,
    pub n_s: f64,
    pub n_b: f64,
    /// Chernoff bound from the constructed outputs (the reference value).
    pub ln_p_qcb: Bound<LnProb>,
    /// Closed-form Chernoff bound for the family, when one exists.
    pub ln_p_qcb_closed: Option<Bound<LnProb>>,
    /// Numeric infimum over `s`, single-copy pair raised to `M`.
    pub ln_p_qcb_numeric: Option<Bound<LnProb>>,
    pub ln_p_classical_lb: Bound<LnProb>,
    /// Exact minimum error, only for `M <= 2` within the capacity limit.
    pub p_helstrom: Option<Bound<f64>>,
}

#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    pub numeric_infimum: bool,
    pub helstrom: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { numeric_infimum: true, helstrom: true }
    }
}

/// Per-copy quantities of one transmitter; multi-copy bounds follow by scaling.
#[derive(Clone, Debug)]
pub struct PerCopy {
    pub transmitter: Transmitter,
    pub n_b: f64,
    pub outputs: ChannelOutputs,
    /// `ln ⟨ψ1|ρ0|ψ1⟩`.
    pub ln_fidelity: f64,
}

impl PerCopy {
    pub fn new(factory: &StateFactory, transmitter: &Transmitter, n_b: f64) -> Result<Self> {
        let scenario = ReadoutScenario { truncation: factory.policy, ..ReadoutScenario::for_transmitter(1, transmitter, n_b)? };
        let outputs = channel_pair(factory, &scenario, transmitter)?;
        let ln_fidelity = ln_clamped(fidelity_pure(&outputs.psi1, &outputs.rho0)?);
        Ok(PerCopy { transmitter: *transmitter, n_b, outputs, ln_fidelity })
    }

    pub fn qcb(&self, copies: usize) -> LnProb {
        LnProb::half_power(self.ln_fidelity, copies)
    }

    /// Closed form for the family, if it has one (the photon⊕coherent family
    /// has only the quoted expression, reported separately).
    pub fn closed_form(&self, copies: usize) -> Result<Option<LnProb>> {
        match self.transmitter.canonical() {
            Transmitter::MandM { m, m_prime } => mm_qcb_closed(m, m_prime, self.n_b, copies).map(Some),
            Transmitter::SingleFock => fock_qcb_closed(self.n_b, copies).map(Some),
            _ => Ok(None),
        }
    }
}

/// Builds the full [`BoundReport`]. The Chernoff reference value comes from the
/// constructed states; the classical bound uses the scenario's reflectivities.
pub fn bound_report(scenario: &ReadoutScenario, transmitter: &Transmitter, options: ReportOptions) -> Result<BoundReport> {
    scenario.validate()?;
    transmitter.validate()?;
    let ln_p_classical_lb = Bound {
        value: classical_lb_noisy_ln(scenario.copies, scenario.n_s, scenario.n_b, scenario.r0, scenario.r1)?,
        method: Method::ClosedForm,
    };
    let mut report = BoundReport {
        transmitter: *transmitter,
        copies: scenario.copies,
        n_s: scenario.n_s,
        n_b: scenario.n_b,
        ln_p_qcb: Bound { value: LnProb::HALF, method: Method::ClosedForm },
        ln_p_qcb_closed: None,
        ln_p_qcb_numeric: None,
        ln_p_classical_lb,
        p_helstrom: None,
    };
    if scenario.r0 == scenario.r1 {
        // identical channels: nothing to discriminate
        return Ok(report);
    }
    scenario.require_ideal_memory()?;
    let factory = scenario.factory()?;
    let per_copy = PerCopy::new(&factory, transmitter, scenario.n_b)?;
    report.ln_p_qcb = Bound { value: per_copy.qcb(scenario.copies), method: Method::PureFidelity };
    if let Some(closed) = per_copy.closed_form(scenario.copies)? {
        report.ln_p_qcb_closed = Some(Bound { value: closed, method: Method::ClosedForm });
    } else if let Transmitter::PhotonCoherent { alpha } = transmitter.canonical() {
        let quoted = psi_qcb_quoted(transmitter.signal_mean(), scenario.n_b, scenario.copies);
        if alpha.im == 0.0 {
            report.ln_p_qcb_closed = Some(Bound { value: quoted?, method: Method::ClosedForm });
        }
    }
    let out = &per_copy.outputs;
    if options.numeric_infimum {
        let numeric = qcb_numeric(&out.rho0, &out.rho1, scenario.copies)?;
        report.ln_p_qcb_numeric = Some(Bound { value: numeric.ln_p, method: Method::NumericInfimum });
    }
    if options.helstrom && scenario.copies <= 2 {
        match helstrom_copies(&out.rho0, &out.rho1, scenario.copies, factory.policy.max_total_dim) {
            Ok(p) => report.p_helstrom = Some(Bound { value: p, method: Method::Eigen }),
            Err(Error::Capacity { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

fn ln_clamped(f: f64) -> f64 {
    if f <= 0.0 {
        f64::NEG_INFINITY
    } else {
        f.min(1.0).ln()
    }
}

fn check_copies(copies: usize) -> Result<()> {
    if copies == 0 {
        return Err(Error::arg("number of copies must be >= 1"));
    }
    Ok(())
}

fn check_noise(n_b: f64) -> Result<()> {
    if !(n_b >= 0.0) || !n_b.is_finite() {
        return Err(Error::arg(format!("noise photon number must be >= 0, got {n_b}")));
    }
    Ok(())
}

fn check_classical(copies: usize, n_s: f64, n_b: f64, r0: f64, r1: f64) -> Result<()> {
    check_copies(copies)?;
    check_noise(n_b)?;
    if !(n_s >= 0.0) || !n_s.is_finite() {
        return Err(Error::arg(format!("signal photon number must be >= 0, got {n_s}")));
    }
    for r in [r0, r1] {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::arg(format!("reflectivity {r} outside [0, 1]")));
        }
    }
    Ok(())
}
