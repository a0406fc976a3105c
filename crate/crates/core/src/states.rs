//! Transmitter and environment states on truncated Fock spaces.
//!
//! Beam-splitter convention: the 50:50 unitary maps `a_S†|0,0⟩` to
//! `(|1,0⟩ + |0,1⟩)/√2`. With that choice a coherent state entering the idler
//! port leaves as `D_S(-α/√2) ⊗ D_I(α/√2)`, so the photon⊕coherent state is
//! `D_S(-α/√2) D_I(α/√2) (|1,0⟩ + |0,1⟩)/√2`. Flipping the sign of the signal
//! displacement is a parity conjugation on the signal mode, which leaves the
//! thermal bit-0 output invariant; every bound computed downstream is the same
//! for either sign (see `quoted_photon_coherent_state`).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{annihilation, exp_anti_hermitian, ModeSpace, Operator, StateVector, C64, DEFAULT_MAX_TOTAL_DIM};

/// Working precision for internal padding: amplitudes dropped there are below 1e-15.
const PAD_EPSILON: f64 = 1e-30;

/// Maximum tolerated disagreement between the two photon⊕coherent constructions.
pub const PATH_AGREEMENT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub tail_epsilon: f64,
    pub min_margin: usize,
    pub max_total_dim: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { tail_epsilon: 1e-12, min_margin: 10, max_total_dim: DEFAULT_MAX_TOTAL_DIM }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_epsilon > 0.0 && self.tail_epsilon <= 1e-6) {
            return Err(Error::arg(format!("tail_epsilon {} outside (0, 1e-6]", self.tail_epsilon)));
        }
        if self.max_total_dim == 0 {
            return Err(Error::arg("max_total_dim must be positive"));
        }
        Ok(())
    }

    /// Smallest cutoff whose thermal tail `(N_B/(1+N_B))^cutoff` is below `tail_epsilon`.
    pub fn thermal_cutoff(&self, n_b: f64) -> usize {
        thermal_cutoff_at(n_b, self.tail_epsilon)
    }

    /// Smallest cutoff whose Poisson tail beyond it is below `tail_epsilon`.
    pub fn poisson_cutoff(&self, mean: f64) -> usize {
        poisson_cutoff_at(mean, self.tail_epsilon)
    }

    /// Cutoff for a mode that carries thermal noise `n_b`, a displacement of
    /// `|β|² = displacement_sq` acting on Fock states up to `max_fock`.
    pub fn mode_cutoff(&self, n_b: f64, displacement_sq: f64, max_fock: usize) -> usize {
        let thermal = self.thermal_cutoff(n_b);
        let displaced = self.poisson_cutoff(displacement_sq) + max_fock;
        let margin = max_fock + self.min_margin;
        thermal.max(displaced).max(margin).max(1)
    }
}

pub fn thermal_tail_mass(n_b: f64, cutoff: usize) -> f64 {
    if n_b == 0.0 {
        return if cutoff >= 1 { 0.0 } else { 1.0 };
    }
    (n_b / (1.0 + n_b)).powi(cutoff as i32)
}

fn thermal_cutoff_at(n_b: f64, eps: f64) -> usize {
    if n_b <= 0.0 {
        return 1;
    }
    let ratio = n_b / (1.0 + n_b);
    let mut c = (eps.ln() / ratio.ln()).floor().max(1.0) as usize;
    while thermal_tail_mass(n_b, c) >= eps {
        c += 1;
    }
    c
}

/// `P(N >= cutoff)` for `N ~ Poisson(mean)`, summed directly in the tail.
pub fn poisson_tail_mass(mean: f64, cutoff: usize) -> f64 {
    if mean == 0.0 {
        return if cutoff == 0 { 1.0 } else { 0.0 };
    }
    let ln_mean = mean.ln();
    let ln_term = |n: usize| -mean + n as f64 * ln_mean - ln_factorial(n);
    let mut total = 0.0;
    let mut n = cutoff;
    loop {
        let t = ln_term(n).exp();
        total += t;
        if n as f64 > mean && (t < 1e-300 || t < total * 1e-17) {
            break;
        }
        n += 1;
    }
    total
}

fn poisson_cutoff_at(mean: f64, eps: f64) -> usize {
    let mut c = mean.ceil() as usize + 1;
    while poisson_tail_mass(mean, c) >= eps {
        c += 1;
    }
    c
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Photon-family descriptor of a transmitter (one signal mode and, except for
/// the bare Fock state, one idler mode per copy).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transmitter {
    /// `(|m,m'⟩ + |m',m⟩)/√2`, `m > m'`.
    MandM { m: usize, m_prime: usize },
    /// `(|m,0⟩ + |0,m⟩)/√2`.
    Noon { m: usize },
    /// Single photon mixed with a coherent state `α` on a 50:50 beam splitter.
    PhotonCoherent { alpha: C64 },
    /// Bare single-photon signal with no idler.
    SingleFock,
}

impl Transmitter {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Transmitter::MandM { m, m_prime } if m <= m_prime => {
                Err(Error::arg(format!("M&M state needs m > m', got m = {m}, m' = {m_prime}")))
            }
            Transmitter::Noon { m: 0 } => Err(Error::arg("N00N state needs m >= 1")),
            Transmitter::PhotonCoherent { alpha } if !(alpha.re.is_finite() && alpha.im.is_finite()) => {
                Err(Error::arg("coherent amplitude must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// N00N(m) is M&M(m, 0); other families are returned unchanged.
    pub fn canonical(&self) -> Transmitter {
        match *self {
            Transmitter::Noon { m } => Transmitter::MandM { m, m_prime: 0 },
            other => other,
        }
    }

    /// Mean photon number per signal mode.
    pub fn signal_mean(&self) -> f64 {
        match self.canonical() {
            Transmitter::MandM { m, m_prime } => (m + m_prime) as f64 / 2.0,
            Transmitter::PhotonCoherent { alpha } => (alpha.norm_sqr() + 1.0) / 2.0,
            Transmitter::SingleFock => 1.0,
            Transmitter::Noon { .. } => unreachable!(),
        }
    }

    /// M&M member `|m :: 2N_S - m⟩` with the given signal mean.
    pub fn mm_for_signal_mean(m: usize, n_s: f64) -> Result<Transmitter> {
        let total = 2.0 * n_s;
        if (total - total.round()).abs() > 1e-9 || total.round() < m as f64 {
            return Err(Error::arg(format!("no M&M state with m = {m} has signal mean {n_s}")));
        }
        let t = Transmitter::MandM { m, m_prime: total.round() as usize - m };
        t.validate()?;
        Ok(t)
    }

    /// Photon⊕coherent state with real `α = √(2N_S - 1)`.
    pub fn photon_coherent_for_signal_mean(n_s: f64) -> Result<Transmitter> {
        if !(n_s >= 0.5) {
            return Err(Error::arg(format!("photon-coherent transmitter needs N_S >= 1/2, got {n_s}")));
        }
        Ok(Transmitter::PhotonCoherent { alpha: C64::new((2.0 * n_s - 1.0).sqrt(), 0.0) })
    }

    pub fn has_idler(&self) -> bool {
        !matches!(self, Transmitter::SingleFock)
    }

    pub fn label(&self) -> String {
        match *self {
            Transmitter::MandM { m, m_prime } => format!("mm({m},{m_prime})"),
            Transmitter::Noon { m } => format!("noon({m})"),
            Transmitter::PhotonCoherent { alpha } if alpha.im == 0.0 => format!("psi(alpha={})", alpha.re),
            Transmitter::PhotonCoherent { alpha } => format!("psi(alpha={}{:+}i)", alpha.re, alpha.im),
            Transmitter::SingleFock => "fock(1)".to_string(),
        }
    }
}

/// Constructors bound to a [`TruncationPolicy`].
#[derive(Clone, Copy, Debug, Default)]
pub struct StateFactory {
    pub policy: TruncationPolicy,
}

impl StateFactory {
    pub fn new(policy: TruncationPolicy) -> Result<Self> {
        policy.validate()?;
        Ok(StateFactory { policy })
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.policy.max_total_dim {
            return Err(Error::Capacity { requested: dim, limit: self.policy.max_total_dim });
        }
        Ok(())
    }

    pub fn fock_state(&self, n: usize, cutoff: usize) -> Result<StateVector> {
        if n >= cutoff {
            return Err(Error::arg(format!("Fock index {n} does not fit below cutoff {cutoff}")));
        }
        self.check_dim(cutoff)?;
        StateVector::basis(ModeSpace::single(cutoff)?, &[n])
    }

    /// Truncated thermal state; not renormalized, so its trace deficit equals
    /// [`thermal_tail_mass`].
    pub fn thermal_state(&self, n_b: f64, cutoff: usize) -> Result<Operator> {
        if !(n_b >= 0.0) || !n_b.is_finite() {
            return Err(Error::arg(format!("thermal photon number must be >= 0, got {n_b}")));
        }
        self.check_dim(cutoff)?;
        let tail = thermal_tail_mass(n_b, cutoff);
        if tail >= self.policy.tail_epsilon {
            return Err(Error::Truncation { cutoff, tail, budget: self.policy.tail_epsilon });
        }
        Operator::diagonal(ModeSpace::single(cutoff)?, &thermal_weights(n_b, cutoff))
    }

    /// Coherent state `|α⟩`, renormalized after truncation.
    pub fn coherent_state(&self, alpha: C64, cutoff: usize) -> Result<StateVector> {
        self.check_dim(cutoff)?;
        let tail = poisson_tail_mass(alpha.norm_sqr(), cutoff);
        if tail >= self.policy.tail_epsilon {
            return Err(Error::Truncation { cutoff, tail, budget: self.policy.tail_epsilon });
        }
        StateVector::normalized(ModeSpace::single(cutoff)?, coherent_amplitudes(alpha, cutoff))
    }

    /// `exp(α a† − α* a)` of the truncated generator; exactly unitary on the
    /// truncated space.
    pub fn displacement_operator(&self, alpha: C64, cutoff: usize) -> Result<Operator> {
        self.check_dim(cutoff)?;
        Operator::new(ModeSpace::single(cutoff)?, displacement_matrix(alpha, cutoff))
    }

    /// 50:50 beam splitter on a truncated two-mode space, as the exponential of
    /// the truncated generator `θ (a†b − a b†)` with `θ = −π/4`.
    pub fn beamsplitter_5050(&self, cutoff_a: usize, cutoff_b: usize) -> Result<Operator> {
        let space = ModeSpace::new(vec![cutoff_a, cutoff_b])?;
        self.check_dim(space.total_dim())?;
        let a = annihilation(cutoff_a);
        let b = annihilation(cutoff_b);
        let ia = DMatrix::<C64>::identity(cutoff_a, cutoff_a);
        let ib = DMatrix::<C64>::identity(cutoff_b, cutoff_b);
        let a_full = a.kronecker(&ib);
        let b_full = ia.kronecker(&b);
        let g = a_full.adjoint() * &b_full - &a_full * b_full.adjoint();
        Operator::new(space, exp_anti_hermitian(&g, -FRAC_PI_4))
    }

    pub fn mm_state(&self, m: usize, m_prime: usize, cutoff: usize) -> Result<StateVector> {
        self.mm_state_in(m, m_prime, &ModeSpace::new(vec![cutoff, cutoff])?)
    }

    /// `|m::m'⟩` on a two-mode (signal, idler) space.
    pub fn mm_state_in(&self, m: usize, m_prime: usize, space: &ModeSpace) -> Result<StateVector> {
        Transmitter::MandM { m, m_prime }.validate()?;
        check_two_mode(space)?;
        self.check_dim(space.total_dim())?;
        let mut amps = DVector::zeros(space.total_dim());
        amps[space.index(&[m, m_prime])?] = C64::new(FRAC_1_SQRT_2, 0.0);
        amps[space.index(&[m_prime, m])?] = C64::new(FRAC_1_SQRT_2, 0.0);
        StateVector::normalized(space.clone(), amps)
    }

    pub fn photon_coherent_state(&self, alpha: C64, cutoff: usize) -> Result<StateVector> {
        self.photon_coherent_state_in(alpha, &ModeSpace::new(vec![cutoff, cutoff])?)
    }

    /// Photon⊕coherent state on a two-mode (signal, idler) space, built by the
    /// displacement formula and checked against the beam-splitter route.
    pub fn photon_coherent_state_in(&self, alpha: C64, space: &ModeSpace) -> Result<StateVector> {
        let (direct, via_bs) = self.photon_coherent_paths(alpha, space)?;
        let gap = direct
            .amplitudes()
            .iter()
            .zip(via_bs.amplitudes().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if gap > PATH_AGREEMENT_TOL {
            return Err(Error::Consistency(format!(
                "photon-coherent constructions disagree by {gap:e} at alpha = {alpha}"
            )));
        }
        Ok(direct)
    }

    /// Both constructions of the photon⊕coherent state:
    /// (i) `D_S(−α/√2) ⊗ D_I(α/√2)` applied to `(|1,0⟩ + |0,1⟩)/√2`;
    /// (ii) the 50:50 beam splitter applied to `|1⟩_S ⊗ |α⟩_I`.
    pub fn photon_coherent_paths(&self, alpha: C64, space: &ModeSpace) -> Result<(StateVector, StateVector)> {
        Transmitter::PhotonCoherent { alpha }.validate()?;
        check_two_mode(space)?;
        self.check_dim(space.total_dim())?;
        let beta = alpha * FRAC_1_SQRT_2;
        let direct = displaced_n00n(-beta, beta, space)?;

        let (cs, ci) = (space.dims()[0], space.dims()[1]);
        let w = poisson_cutoff_at(alpha.norm_sqr(), PAD_EPSILON).max(ci);
        let coherent = coherent_amplitudes(alpha, w);
        let mut input = DVector::zeros(2 * w);
        for (n, amp) in coherent.iter().enumerate() {
            input[w + n] = *amp; // |1⟩_S ⊗ |n⟩_I on dims (2, w)
        }
        let (out, out_dim) = apply_beamsplitter_sectors(&input, 2, w);
        let mut amps = DVector::zeros(space.total_dim());
        for s in 0..cs.min(out_dim) {
            for i in 0..ci.min(out_dim) {
                amps[s * ci + i] = out[s * out_dim + i];
            }
        }
        let via_bs = StateVector::normalized(space.clone(), amps)?;
        Ok((direct, via_bs))
    }

    /// The photon⊕coherent state with both displacements `+α/√2`, as the
    /// closed form is usually written. Not reachable from `|1⟩⊗|α⟩` by a single
    /// beam splitter; kept to show the bounds do not depend on the sign.
    pub fn quoted_photon_coherent_state(&self, alpha: C64, space: &ModeSpace) -> Result<StateVector> {
        check_two_mode(space)?;
        self.check_dim(space.total_dim())?;
        let beta = alpha * FRAC_1_SQRT_2;
        displaced_n00n(beta, beta, space)
    }

    /// `D(β)[½(|0⟩⟨0| + |1⟩⟨1|)]D†(β)` on `cutoff` levels.
    pub fn displaced_photon_mixture(&self, beta: C64, cutoff: usize) -> Result<Operator> {
        self.check_dim(cutoff)?;
        let d0 = displaced_fock_column(beta, 0, cutoff);
        let d1 = displaced_fock_column(beta, 1, cutoff);
        let m = (&d0 * d0.adjoint() + &d1 * d1.adjoint()) * C64::new(0.5, 0.0);
        Operator::new(ModeSpace::single(cutoff)?, m)
    }
}

pub fn thermal_weights(n_b: f64, cutoff: usize) -> Vec<f64> {
    let p0 = 1.0 / (1.0 + n_b);
    let ratio = n_b / (1.0 + n_b);
    let mut w = Vec::with_capacity(cutoff);
    let mut cur = p0;
    for _ in 0..cutoff {
        w.push(cur);
        cur *= ratio;
    }
    w
}

fn check_two_mode(space: &ModeSpace) -> Result<()> {
    if space.num_modes() != 2 {
        return Err(Error::arg(format!("expected a two-mode space, got {} modes", space.num_modes())));
    }
    if space.dims().iter().any(|&d| d < 2) {
        return Err(Error::arg("two-mode states need at least two levels per mode"));
    }
    Ok(())
}

/// Unnormalized `e^{-|α|²/2} α^n / √n!` for `n < cutoff`.
fn coherent_amplitudes(alpha: C64, cutoff: usize) -> DVector<C64> {
    let mut amps = DVector::zeros(cutoff);
    let mut cur = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..cutoff {
        amps[n] = cur;
        cur = cur * alpha / ((n + 1) as f64).sqrt();
    }
    amps
}

fn displacement_matrix(alpha: C64, cutoff: usize) -> DMatrix<C64> {
    let a = annihilation(cutoff);
    let g = a.adjoint() * alpha - &a * alpha.conj();
    exp_anti_hermitian(&g, 1.0)
}

/// `D(β)|n⟩` restricted to `cutoff` levels, computed on a padded space so the
/// truncation of the generator does not reach the kept entries.
fn displaced_fock_column(beta: C64, n: usize, cutoff: usize) -> DVector<C64> {
    let padded = cutoff.max(poisson_cutoff_at(beta.norm_sqr(), PAD_EPSILON) + n) + 40;
    let d = displacement_matrix(beta, padded);
    DVector::from_iterator(cutoff, (0..cutoff).map(|k| d[(k, n)]))
}

/// `D_S(β_s) ⊗ D_I(β_i) (|1,0⟩ + |0,1⟩)/√2`, truncated to `space` and renormalized.
fn displaced_n00n(beta_s: C64, beta_i: C64, space: &ModeSpace) -> Result<StateVector> {
    let (cs, ci) = (space.dims()[0], space.dims()[1]);
    let s0 = displaced_fock_column(beta_s, 0, cs);
    let s1 = displaced_fock_column(beta_s, 1, cs);
    let i0 = displaced_fock_column(beta_i, 0, ci);
    let i1 = displaced_fock_column(beta_i, 1, ci);
    let amps = (s1.kronecker(&i0) + s0.kronecker(&i1)) * C64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::normalized(space.clone(), amps)
}

/// Applies the 50:50 beam splitter to a two-mode vector on dims `(da, db)`
/// one photon-number sector at a time. Each sector is kept complete, so the
/// result is exact; it lives on dims `(n_max + 1, n_max + 1)` with
/// `n_max = da + db - 2`. Returns the vector and the per-mode output dimension.
pub fn apply_beamsplitter_sectors(input: &DVector<C64>, da: usize, db: usize) -> (DVector<C64>, usize) {
    apply_two_mode_rotation(input, da, db, -FRAC_PI_4)
}

/// `exp(θ (a†b − a b†))` applied sector by sector; see [`apply_beamsplitter_sectors`].
pub(crate) fn apply_two_mode_rotation(input: &DVector<C64>, da: usize, db: usize, theta: f64) -> (DVector<C64>, usize) {
    let n_max = da + db - 2;
    let od = n_max + 1;
    let mut out = DVector::zeros(od * od);
    for n in 0..=n_max {
        // sector basis |k, n-k⟩, k = 0..=n
        let mut v = DVector::<C64>::zeros(n + 1);
        let mut any = false;
        for k in 0..=n {
            let j = n - k;
            if k < da && j < db {
                v[k] = input[k * db + j];
                any |= v[k] != C64::new(0.0, 0.0);
            }
        }
        if !any {
            continue;
        }
        let u = exp_anti_hermitian(&sector_generator(n), theta);
        let w = u * v;
        for k in 0..=n {
            out[k * od + (n - k)] = w[k];
        }
    }
    (out, od)
}

/// `a†b − a b†` on the sector spanned by `|k, n−k⟩`.
pub(crate) fn sector_generator(n: usize) -> DMatrix<C64> {
    let mut g = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        // a†b |k, n-k⟩ = √(k+1)√(n-k) |k+1, n-k-1⟩
        let c = ((k + 1) as f64 * (n - k) as f64).sqrt();
        g[(k + 1, k)] = C64::new(c, 0.0);
        g[(k, k + 1)] = C64::new(-c, 0.0);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fidelity_pure, max_abs_diff, partial_trace, tensor};

    fn factory() -> StateFactory {
        StateFactory::default()
    }

    fn unitarity_defect(u: &Operator) -> f64 {
        let n = u.dim();
        max_abs_diff(&(u.matrix().adjoint() * u.matrix()), &DMatrix::identity(n, n))
    }

    #[test]
    fn fock_states() {
        let f = factory();
        let vac = f.fock_state(0, 8).unwrap();
        assert_eq!(vac.amplitudes()[0], C64::new(1.0, 0.0));
        assert!((f.fock_state(1, 8).unwrap().mean_photon_number(0).unwrap() - 1.0).abs() < 1e-15);
        let a = f.fock_state(2, 8).unwrap();
        let b = f.fock_state(3, 8).unwrap();
        assert_eq!(a.inner(&b).unwrap(), C64::new(0.0, 0.0));
        assert!(matches!(f.fock_state(8, 8), Err(Error::Argument(_))));
    }

    #[test]
    fn thermal_state_properties() {
        let f = factory();
        let vac = f.thermal_state(0.0, 6).unwrap();
        let mut expected = DMatrix::zeros(6, 6);
        expected[(0, 0)] = C64::new(1.0, 0.0);
        assert_eq!(max_abs_diff(vac.matrix(), &expected), 0.0);

        let th = f.thermal_state(0.1, 40).unwrap();
        assert!((th.mean_photon_number(0).unwrap() - 0.1).abs() < 1e-10);
        for n in 0..39 {
            let ratio = th.matrix()[(n + 1, n + 1)].re / th.matrix()[(n, n)].re;
            assert!((ratio - 0.1 / 1.1).abs() < 1e-14);
        }
        // deficit is kept, not renormalized away
        let deficit = 1.0 - th.trace().re;
        assert!((deficit - thermal_tail_mass(0.1, 40)).abs() < 1e-15);
    }

    #[test]
    fn thermal_state_truncation_error() {
        let err = factory().thermal_state(1.5, 20).unwrap_err();
        assert!(matches!(err, Error::Truncation { cutoff: 20, .. }));
    }

    #[test]
    fn thermal_mean_at_policy_cutoff() {
        let f = factory();
        for nb in [1e-5, 0.01, 0.1, 1.0, 1.5] {
            let c = f.policy.thermal_cutoff(nb);
            assert!(c <= 64);
            let th = f.thermal_state(nb, c).unwrap();
            assert!((th.mean_photon_number(0).unwrap() - nb).abs() < 1e-9, "N_B = {nb}");
        }
    }

    #[test]
    fn coherent_state_examples() {
        let f = factory();
        let vac = f.coherent_state(C64::new(0.0, 0.0), 5).unwrap();
        assert_eq!(vac.amplitudes()[0], C64::new(1.0, 0.0));
        let c = f.coherent_state(C64::new(1.2, 0.0), 40).unwrap();
        assert!((c.mean_photon_number(0).unwrap() - 1.44).abs() < 1e-9);
        let c1 = f.coherent_state(C64::new(1.0, 0.0), 40).unwrap();
        assert!((c1.amplitudes()[1].norm_sqr() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((c1.amplitudes()[1].norm_sqr() - 0.367879).abs() < 1e-6);
        assert!(matches!(f.coherent_state(C64::new(3.0, 0.0), 10), Err(Error::Truncation { .. })));
    }

    #[test]
    fn displacement_operator_examples() {
        let f = factory();
        let id = f.displacement_operator(C64::new(0.0, 0.0), 10).unwrap();
        assert!(max_abs_diff(id.matrix(), &DMatrix::identity(10, 10)) < 1e-15);

        let alpha = C64::new(1.2, 0.5);
        let d = f.displacement_operator(alpha, 40).unwrap();
        assert!(unitarity_defect(&d) < 1e-10);
        let coh = f.coherent_state(alpha, 40).unwrap();
        for n in 0..20 {
            assert!((d.matrix()[(n, 0)] - coh.amplitudes()[n]).norm() < 1e-8);
        }
        let dm = f.displacement_operator(-alpha, 40).unwrap();
        let prod = d.matrix() * dm.matrix();
        assert!(max_abs_diff(&prod, &DMatrix::identity(40, 40)) < 1e-9);
    }

    #[test]
    fn beamsplitter_examples() {
        let f = factory();
        let u = f.beamsplitter_5050(6, 6).unwrap();
        assert!(unitarity_defect(&u) < 1e-10);
        let space = u.space().clone();
        let vac = StateVector::basis(space.clone(), &[0, 0]).unwrap();
        let out = u.apply(&vac).unwrap();
        assert!((out[0] - C64::new(1.0, 0.0)).norm() < 1e-14);

        let one = StateVector::basis(space.clone(), &[1, 0]).unwrap();
        let out = u.apply(&one).unwrap();
        let i10 = space.index(&[1, 0]).unwrap();
        let i01 = space.index(&[0, 1]).unwrap();
        assert!((out[i10] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!((out[i01] - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!(out.norm_squared() - 1.0 < 1e-14);
    }

    #[test]
    fn beamsplitter_conserves_photon_number() {
        let f = factory();
        let u = f.beamsplitter_5050(8, 8).unwrap();
        let space = u.space().clone();
        // deterministic pseudo-random states confined to sectors below the cutoff
        for seed in 0..4u64 {
            let mut amps = DVector::zeros(64);
            for i in 0..64 {
                let occ = space.occupations(i);
                if occ[0] + occ[1] < 8 {
                    let x = ((i as u64 * 2654435761 + seed * 97) % 1000) as f64 / 1000.0 - 0.5;
                    let y = ((i as u64 * 40503 + seed * 31) % 1000) as f64 / 1000.0 - 0.5;
                    amps[i] = C64::new(x, y);
                }
            }
            let psi = StateVector::normalized(space.clone(), amps).unwrap();
            let total = |p: &StateVector| p.mean_photon_number(0).unwrap() + p.mean_photon_number(1).unwrap();
            let out = StateVector::normalized(space.clone(), u.apply(&psi).unwrap()).unwrap();
            assert!((total(&psi) - total(&out)).abs() < 1e-9);
        }
    }

    #[test]
    fn sector_beamsplitter_matches_dense_operator() {
        let f = factory();
        let u = f.beamsplitter_5050(7, 7).unwrap();
        let input_space = ModeSpace::new(vec![3, 4]).unwrap();
        let mut amps = DVector::zeros(12);
        for i in 0..12 {
            amps[i] = C64::new(0.1 * i as f64, 0.05 * (i % 3) as f64);
        }
        let (out, od) = apply_beamsplitter_sectors(&amps, 3, 4);
        assert_eq!(od, 6);
        let mut embedded = DVector::zeros(49);
        for i in 0..12 {
            let occ = input_space.occupations(i);
            embedded[occ[0] * 7 + occ[1]] = amps[i];
        }
        let dense = u.matrix() * embedded;
        for a in 0..6 {
            for b in 0..6 {
                assert!((dense[a * 7 + b] - out[a * od + b]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn mm_state_examples() {
        let f = factory();
        let n00n = f.mm_state(1, 0, 4).unwrap();
        let space = n00n.space().clone();
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        assert_eq!(n00n.amplitudes()[space.index(&[1, 0]).unwrap()], h);
        assert_eq!(n00n.amplitudes()[space.index(&[0, 1]).unwrap()], h);
        assert!((f.mm_state(4, 2, 16).unwrap().mean_photon_number(0).unwrap() - 3.0).abs() < 1e-14);
        let s = f.mm_state(2, 1, 12).unwrap();
        assert!((s.inner(&s).unwrap().re - 1.0).abs() < 1e-15);
        assert!(matches!(f.mm_state(1, 1, 8), Err(Error::Argument(_))));
        assert!(matches!(f.mm_state(1, 2, 8), Err(Error::Argument(_))));
    }

    #[test]
    fn photon_coherent_at_zero_is_n00n() {
        let f = factory();
        let psi = f.photon_coherent_state(C64::new(0.0, 0.0), 12).unwrap();
        let n00n = f.mm_state(1, 0, 12).unwrap();
        assert!(max_abs_diff(&psi.projector().matrix().clone(), n00n.projector().matrix()) < 1e-13);
    }

    #[test]
    fn photon_coherent_paths_agree() {
        let f = factory();
        let space = ModeSpace::new(vec![40, 40]).unwrap();
        let (a, b) = f.photon_coherent_paths(C64::new(1.0, 0.0), &space).unwrap();
        let gap = a.amplitudes().iter().zip(b.amplitudes().iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(gap < 1e-8, "gap {gap:e}");
        let (a, b) = f.photon_coherent_paths(C64::new(0.6, -0.8), &ModeSpace::new(vec![30, 30]).unwrap()).unwrap();
        let gap = a.amplitudes().iter().zip(b.amplitudes().iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(gap < 1e-8, "gap {gap:e}");
    }

    #[test]
    fn photon_coherent_signal_mean() {
        let f = factory();
        let alpha = C64::new(3.0f64.sqrt(), 0.0);
        let psi = f.photon_coherent_state(alpha, 40).unwrap();
        assert!((psi.mean_photon_number(0).unwrap() - 2.0).abs() < 1e-9);
        assert!((psi.inner(&psi).unwrap().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn photon_coherent_idler_marginal() {
        let f = factory();
        let alpha = C64::new(1.1, 0.4);
        let psi = f.photon_coherent_state(alpha, 30).unwrap();
        let idler = partial_trace(&psi.projector(), &[1]).unwrap();
        let expected = f.displaced_photon_mixture(alpha * FRAC_1_SQRT_2, 30).unwrap();
        assert!(max_abs_diff(idler.matrix(), expected.matrix()) < 1e-8);
    }

    #[test]
    fn displacement_sign_does_not_change_thermal_overlap() {
        let f = factory();
        let alpha = C64::new(1.3, 0.0);
        let space = ModeSpace::new(vec![30, 30]).unwrap();
        let ours = f.photon_coherent_state_in(alpha, &space).unwrap();
        let quoted = f.quoted_photon_coherent_state(alpha, &space).unwrap();
        let idler = partial_trace(&ours.projector(), &[1]).unwrap();
        let rho0 = tensor(&f.thermal_state(0.3, 30).unwrap(), &idler).unwrap();
        let a = fidelity_pure(&ours, &rho0).unwrap();
        let b = fidelity_pure(&quoted, &rho0).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn transmitter_signal_means() {
        assert_eq!(Transmitter::MandM { m: 4, m_prime: 2 }.signal_mean(), 3.0);
        assert_eq!(Transmitter::Noon { m: 6 }.signal_mean(), 3.0);
        assert_eq!(Transmitter::SingleFock.signal_mean(), 1.0);
        let psi = Transmitter::photon_coherent_for_signal_mean(5.0).unwrap();
        assert!((psi.signal_mean() - 5.0).abs() < 1e-12);
        assert_eq!(Transmitter::mm_for_signal_mean(5, 3.0).unwrap(), Transmitter::MandM { m: 5, m_prime: 1 });
        assert!(Transmitter::mm_for_signal_mean(2, 2.5).is_err());
        assert!(Transmitter::photon_coherent_for_signal_mean(0.4).is_err());
    }

    #[test]
    fn policy_cutoffs_stay_small() {
        let p = TruncationPolicy::default();
        assert_eq!(p.thermal_cutoff(0.0), 1);
        assert!(p.thermal_cutoff(1.5) <= 64);
        assert!(thermal_tail_mass(1.5, p.thermal_cutoff(1.5)) < 1e-12);
        assert!(poisson_tail_mass(9.0, p.poisson_cutoff(9.0)) < 1e-12);
        assert!(p.mode_cutoff(0.0, 0.0, 6) >= 16);
    }
}
