//! Memory-cell channels acting on the signal mode of a transmitter.
//!
//! Bit 1 is a perfect mirror (identity channel); bit 0 loses the signal and
//! returns thermal light `ρ_Th(N_B)` in its place. Idlers always pass through
//! untouched, one idler per signal copy.

use nalgebra::DMatrix;

use crate::discrimination::ReadoutScenario;
use crate::error::{Error, Result};
use crate::linalg::{exp_anti_hermitian, partial_trace, tensor_with_limit, ModeSpace, Operator, StateVector, C64};
use crate::states::{sector_generator, thermal_weights, StateFactory, Transmitter};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    pub reflectivity: f64,
    pub noise: f64,
}

impl ChannelSpec {
    pub fn new(reflectivity: f64, noise: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&reflectivity) {
            return Err(Error::arg(format!("reflectivity {reflectivity} outside [0, 1]")));
        }
        if !(noise >= 0.0) || !noise.is_finite() {
            return Err(Error::arg(format!("thermal noise must be >= 0, got {noise}")));
        }
        Ok(ChannelSpec { reflectivity, noise })
    }
}

/// Memory cell bit value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bit {
    Zero,
    One,
}

impl TryFrom<u8> for Bit {
    type Error = Error;

    fn try_from(v: u8) -> Result<Bit> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            other => Err(Error::arg(format!("bit must be 0 or 1, got {other}"))),
        }
    }
}

/// Single-copy output of one memory cell. Mode 0 of `input` is the signal;
/// any remaining modes are idlers.
pub fn apply_bit(factory: &StateFactory, input: &StateVector, bit: Bit, n_b: f64) -> Result<Operator> {
    match bit {
        Bit::One => Ok(input.projector()),
        Bit::Zero => {
            let space = input.space();
            let thermal = factory.thermal_state(n_b, space.dims()[0])?;
            if space.num_modes() == 1 {
                return Ok(thermal);
            }
            let idlers: Vec<usize> = (1..space.num_modes()).collect();
            let idler_state = partial_trace(&input.projector(), &idlers)?;
            tensor_with_limit(&thermal, &idler_state, factory.policy.max_total_dim)
        }
    }
}

/// Beam-splitter dilation: the signal meets an environment mode in
/// `ρ_Th(N_B)` on a splitter of reflectivity `r`, and the environment is traced
/// out. `r = 1` is the identity channel, `r = 0` replaces the signal with the
/// thermal state.
///
/// Each photon-number sector of the joint space is propagated in full, so the
/// only truncation is the final restriction to the input's cutoff.
pub fn lossy_channel(factory: &StateFactory, rho_signal: &Operator, r: f64, n_b: f64) -> Result<Operator> {
    let spec = ChannelSpec::new(r, n_b)?;
    if rho_signal.space().num_modes() != 1 {
        return Err(Error::arg("lossy channel acts on a single-mode signal operator"));
    }
    let cs = rho_signal.dim();
    let ce = factory.policy.thermal_cutoff(spec.noise).max(cs);
    let env = thermal_weights(spec.noise, ce);
    let theta = spec.reflectivity.sqrt().acos();

    let n_max = cs + ce - 2;
    let sectors: Vec<DMatrix<C64>> = (0..=n_max).map(|n| exp_anti_hermitian(&sector_generator(n), theta)).collect();

    let rho = rho_signal.matrix();
    let mut out = DMatrix::<C64>::zeros(cs, cs);
    for (k, &tau) in env.iter().enumerate() {
        if tau == 0.0 {
            continue;
        }
        for n1 in 0..cs {
            let sec1 = n1 + k;
            for n2 in 0..cs {
                let x = rho[(n1, n2)];
                if x == C64::new(0.0, 0.0) {
                    continue;
                }
                let sec2 = n2 + k;
                // environment leaves with j photons; signal with sector - j
                for j in 0..=sec1.min(sec2) {
                    let (o1, o2) = (sec1 - j, sec2 - j);
                    if o1 >= cs || o2 >= cs {
                        continue;
                    }
                    let u1 = sectors[sec1][(o1, n1)];
                    let u2 = sectors[sec2][(o2, n2)];
                    out[(o1, o2)] += u1 * x * u2.conj() * tau;
                }
            }
        }
    }
    Operator::new(rho_signal.space().clone(), out)
}

/// Single-copy outputs for both bit values.
#[derive(Clone, Debug)]
pub struct ChannelOutputs {
    /// Bit-0 output: `ρ_Th(N_B) ⊗ Tr_S[|in⟩⟨in|]`.
    pub rho0: Operator,
    /// Bit-1 output `|in⟩⟨in|`.
    pub rho1: Operator,
    /// The pure bit-1 output as a vector.
    pub psi1: StateVector,
}

/// Truncated (signal, idler) space for a transmitter under thermal noise `n_b`.
pub fn transmitter_space(factory: &StateFactory, transmitter: &Transmitter, n_b: f64) -> Result<ModeSpace> {
    transmitter.validate()?;
    let p = &factory.policy;
    let space = match transmitter.canonical() {
        Transmitter::MandM { m, .. } => ModeSpace::new(vec![p.mode_cutoff(n_b, 0.0, m), p.mode_cutoff(0.0, 0.0, m)])?,
        Transmitter::PhotonCoherent { alpha } => {
            let beta_sq = alpha.norm_sqr() / 2.0;
            ModeSpace::new(vec![p.mode_cutoff(n_b, beta_sq, 1), p.mode_cutoff(0.0, beta_sq, 1)])?
        }
        Transmitter::SingleFock => ModeSpace::single(p.mode_cutoff(n_b, 0.0, 1))?,
        Transmitter::Noon { .. } => unreachable!(),
    };
    if space.total_dim() > p.max_total_dim {
        return Err(Error::Capacity { requested: space.total_dim(), limit: p.max_total_dim });
    }
    Ok(space)
}

/// The transmitter's pure input state on its policy-chosen space.
pub fn transmitter_state(factory: &StateFactory, transmitter: &Transmitter, n_b: f64) -> Result<StateVector> {
    let space = transmitter_space(factory, transmitter, n_b)?;
    match transmitter.canonical() {
        Transmitter::MandM { m, m_prime } => factory.mm_state_in(m, m_prime, &space),
        Transmitter::PhotonCoherent { alpha } => factory.photon_coherent_state_in(alpha, &space),
        Transmitter::SingleFock => StateVector::basis(space, &[1]),
        Transmitter::Noon { .. } => unreachable!(),
    }
}

/// Single-copy output pair `(ρ_out^(0), ρ_out^(1))` for the ideal memory
/// `r0 = 0`, `r1 = 1`.
pub fn channel_pair(factory: &StateFactory, scenario: &ReadoutScenario, transmitter: &Transmitter) -> Result<ChannelOutputs> {
    scenario.validate()?;
    scenario.require_ideal_memory()?;
    let psi1 = transmitter_state(factory, transmitter, scenario.n_b)?;
    let rho0 = apply_bit(factory, &psi1, Bit::Zero, scenario.n_b)?;
    let rho1 = apply_bit(factory, &psi1, Bit::One, scenario.n_b)?;
    Ok(ChannelOutputs { rho0, rho1, psi1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, trace_distance};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn f() -> StateFactory {
        StateFactory::default()
    }

    #[test]
    fn bit_one_is_identity() {
        let psi = f().mm_state(3, 1, 14).unwrap();
        let out = apply_bit(&f(), &psi, Bit::One, 0.1).unwrap();
        assert_eq!(max_abs_diff(out.matrix(), psi.projector().matrix()), 0.0);
    }

    #[test]
    fn bit_zero_on_mm_state() {
        let nb = 0.1;
        let space = ModeSpace::new(vec![20, 12]).unwrap();
        let psi = f().mm_state_in(2, 1, &space).unwrap();
        let out = apply_bit(&f(), &psi, Bit::Zero, nb).unwrap();
        let thermal = thermal_weights(nb, 20);
        for i in 0..out.dim() {
            let occ = out.space().occupations(i);
            let idler = if occ[1] == 1 || occ[1] == 2 { 0.5 } else { 0.0 };
            assert!((out.matrix()[(i, i)].re - thermal[occ[0]] * idler).abs() < 1e-15);
        }
        let offdiag: f64 = out.matrix().iter().enumerate().filter(|(k, _)| k % (out.dim() + 1) != 0).map(|(_, x)| x.norm()).sum();
        assert_eq!(offdiag, 0.0);
        out.check_density(1e-12).unwrap();
    }

    #[test]
    fn bit_zero_on_photon_coherent_has_displaced_idler() {
        let alpha = C64::new(1.0, 0.3);
        let space = ModeSpace::new(vec![26, 26]).unwrap();
        let psi = f().photon_coherent_state_in(alpha, &space).unwrap();
        let out = apply_bit(&f(), &psi, Bit::Zero, 0.05).unwrap();
        let idler = partial_trace(&out, &[1]).unwrap();
        let thermal_trace: f64 = thermal_weights(0.05, 26).iter().sum();
        let expected = f().displaced_photon_mixture(alpha * FRAC_1_SQRT_2, 26).unwrap().scale(thermal_trace);
        assert!(max_abs_diff(idler.matrix(), expected.matrix()) < 1e-8);
    }

    #[test]
    fn bit_zero_ignores_signal_factor() {
        // two inputs with the same idler marginal but different signal content
        let space = ModeSpace::new(vec![16, 12]).unwrap();
        let a = f().mm_state_in(2, 0, &space).unwrap();
        let mut amps = nalgebra::DVector::zeros(space.total_dim());
        amps[space.index(&[5, 2]).unwrap()] = C64::new(FRAC_1_SQRT_2, 0.0);
        amps[space.index(&[7, 0]).unwrap()] = C64::new(0.0, FRAC_1_SQRT_2);
        let b = StateVector::normalized(space, amps).unwrap();
        let oa = apply_bit(&f(), &a, Bit::Zero, 0.1).unwrap();
        let ob = apply_bit(&f(), &b, Bit::Zero, 0.1).unwrap();
        assert!(max_abs_diff(oa.matrix(), ob.matrix()) < 1e-12);
    }

    #[test]
    fn invalid_bit() {
        assert!(Bit::try_from(2).is_err());
        assert_eq!(Bit::try_from(1).unwrap(), Bit::One);
    }

    #[test]
    fn lossy_endpoints() {
        let fac = f();
        let psi = fac.coherent_state(C64::new(0.8, 0.2), 20).unwrap();
        let rho = psi.projector();
        let id = lossy_channel(&fac, &rho, 1.0, 0.1).unwrap();
        assert!(trace_distance(&id, &rho).unwrap() < 1e-12);

        let five = fac.fock_state(5, 20).unwrap().projector();
        let replaced = lossy_channel(&fac, &five, 0.0, 0.1).unwrap();
        let thermal = fac.thermal_state(0.1, 20).unwrap();
        assert!(trace_distance(&replaced, &thermal).unwrap() < 1e-12);
    }

    #[test]
    fn lossy_attenuates_single_photon() {
        let fac = f();
        let one = fac.fock_state(1, 12).unwrap().projector();
        for r in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let out = lossy_channel(&fac, &one, r, 0.0).unwrap();
            assert!((out.mean_photon_number(0).unwrap() - r).abs() < 1e-12, "r = {r}");
            assert!((out.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lossy_output_is_a_density_operator() {
        let fac = f();
        let psi = fac.coherent_state(C64::new(0.5, -0.5), 24).unwrap();
        let out = lossy_channel(&fac, &psi.projector(), 0.6, 0.2).unwrap();
        out.check_density(1e-10).unwrap();
        // ⟨n⟩ = r ⟨n_in⟩ + (1 - r) N_B
        let expected = 0.6 * 0.5 + 0.4 * 0.2;
        assert!((out.mean_photon_number(0).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn lossy_rejects_bad_reflectivity() {
        let one = f().fock_state(1, 12).unwrap().projector();
        assert!(lossy_channel(&f(), &one, 1.5, 0.0).is_err());
        assert!(lossy_channel(&f(), &one, -0.1, 0.0).is_err());
    }

    #[test]
    fn channel_pair_for_single_fock() {
        let fac = f();
        let scenario = ReadoutScenario::new(1, 1.0, 0.1).unwrap();
        let out = channel_pair(&fac, &scenario, &Transmitter::SingleFock).unwrap();
        let c = out.rho0.dim();
        assert!(max_abs_diff(out.rho0.matrix(), fac.thermal_state(0.1, c).unwrap().matrix()) == 0.0);
        assert!(max_abs_diff(out.rho1.matrix(), fac.fock_state(1, c).unwrap().projector().matrix()) == 0.0);
    }

    #[test]
    fn channel_pair_rejects_other_memories() {
        let scenario = ReadoutScenario::new(1, 1.0, 0.1).unwrap().with_reflectivities(0.2, 0.9).unwrap();
        let err = channel_pair(&f(), &scenario, &Transmitter::SingleFock).unwrap_err();
        assert!(matches!(err, Error::UnsupportedModel { .. }));
    }

    #[test]
    fn zero_amplitude_photon_coherent_matches_n00n_pair() {
        let fac = f();
        for nb in [1e-5, 0.01, 0.1, 1.0] {
            let scenario = ReadoutScenario::new(1, 0.5, nb).unwrap();
            let psi = channel_pair(&fac, &scenario, &Transmitter::PhotonCoherent { alpha: C64::new(0.0, 0.0) }).unwrap();
            let mm = channel_pair(&fac, &scenario, &Transmitter::MandM { m: 1, m_prime: 0 }).unwrap();
            assert!(max_abs_diff(psi.rho0.matrix(), mm.rho0.matrix()) < 1e-10);
            assert!(max_abs_diff(psi.rho1.matrix(), mm.rho1.matrix()) < 1e-10);
        }
    }
}
