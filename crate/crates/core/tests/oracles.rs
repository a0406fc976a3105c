//! Closed forms against brute-force constructions on truncated Fock space.

use qread_core::channel::lossy_channel;
use qread_core::discrimination::{classical_lb_noiseless, helstrom, ln_thermal_weight, psi_qcb_numeric};
use qread_core::linalg::trace_distance;
use qread_core::*;

fn f() -> StateFactory {
    StateFactory::default()
}

#[test]
fn mm_closed_form_matches_constructed_states() {
    let pairs = [(1, 0), (2, 0), (2, 1), (3, 2), (4, 2), (5, 1), (6, 0)];
    for &(m, mp) in &pairs {
        for n_b in [1e-5, 0.1, 1.0, 1.5] {
            let pc = PerCopy::new(&f(), &Transmitter::MandM { m, m_prime: mp }, n_b).unwrap();
            for copies in 1..=3 {
                let closed = mm_qcb_closed(m, mp, n_b, copies).unwrap();
                let brute = qcb_pure(&pc.outputs.psi1, &pc.outputs.rho0, copies).unwrap();
                assert!((closed.0 - brute.0).abs() < 1e-9, "({m},{mp}) N_B={n_b} M={copies}: {} vs {}", closed.0, brute.0);
            }
        }
    }
}

#[test]
fn noon_alias_matches_mm() {
    let a = PerCopy::new(&f(), &Transmitter::Noon { m: 3 }, 0.2).unwrap();
    let b = PerCopy::new(&f(), &Transmitter::MandM { m: 3, m_prime: 0 }, 0.2).unwrap();
    assert_eq!(a.ln_fidelity, b.ln_fidelity);
}

#[test]
fn photon_coherent_at_zero_amplitude_is_n00n_one() {
    for n_b in [1e-5, 0.01, 0.1, 1.0] {
        let psi = PerCopy::new(&f(), &Transmitter::PhotonCoherent { alpha: C64::new(0.0, 0.0) }, n_b).unwrap();
        let mm = PerCopy::new(&f(), &Transmitter::MandM { m: 1, m_prime: 0 }, n_b).unwrap();
        let (a, b) = (&psi.outputs, &mm.outputs);
        assert_eq!(a.rho0.space(), b.rho0.space());
        assert!(trace_distance(&a.rho0, &b.rho0).unwrap() < 1e-10);
        assert!(trace_distance(&a.rho1, &b.rho1).unwrap() < 1e-10);
        let qa = qcb_numeric(&a.rho0, &a.rho1, 1).unwrap();
        let qb = qcb_numeric(&b.rho0, &b.rho1, 1).unwrap();
        assert!((qa.ln_p.0 - qb.ln_p.0).abs() < 1e-10);
    }
}

#[test]
fn photon_coherent_without_noise_matches_quoted_form() {
    for n_s in [0.5, 0.75, 1.0, 2.0, 5.0] {
        for copies in [1, 4] {
            let num = psi_qcb_numeric(&f(), n_s, 0.0, copies).unwrap();
            let quoted = psi_qcb_quoted(n_s, 0.0, copies).unwrap();
            assert!((num.0 - quoted.0).abs() < 1e-9, "N_S={n_s} M={copies}");
        }
    }
}

#[test]
fn photon_coherent_with_noise_respects_per_copy_range() {
    // ⟨ψ1|ρ0|ψ1⟩ is a weighted average of thermal populations, so it sits
    // between zero and the largest one, p_0 = 1/(1+N_B).
    for n_b in [0.01, 0.1, 1.5] {
        for n_s in [0.5, 1.0, 5.0] {
            let v = psi_qcb_numeric(&f(), n_s, n_b, 1).unwrap();
            assert!(v.0 < -std::f64::consts::LN_2 + ln_thermal_weight(n_b, 0));
        }
    }
}

#[test]
fn fock_closed_form_matches_constructed_states() {
    for n_b in [0.0, 1e-5, 0.01, 0.5, 2.0] {
        let pc = PerCopy::new(&f(), &Transmitter::SingleFock, n_b).unwrap();
        for copies in 1..=4 {
            let a = fock_qcb_closed(n_b, copies).unwrap();
            let b = pc.qcb(copies);
            if a.is_zero() {
                assert!(b.is_zero());
            } else {
                assert!((a.0 - b.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn lossy_channel_endpoints() {
    let fa = f();
    let inputs = [
        fa.fock_state(0, 24).unwrap().projector(),
        fa.fock_state(3, 24).unwrap().projector(),
        fa.coherent_state(C64::new(0.8, -0.4), 24).unwrap().projector(),
        fa.thermal_state(0.3, 24).unwrap(),
        fa.displaced_photon_mixture(C64::new(0.5, 0.0), 24).unwrap(),
    ];
    for n_b in [0.0, 0.1] {
        for rho in &inputs {
            let same = lossy_channel(&fa, rho, 1.0, n_b).unwrap();
            assert!(trace_distance(&same, rho).unwrap() < 1e-12);
            let replaced = lossy_channel(&fa, rho, 0.0, n_b).unwrap();
            let th = fa.thermal_state(n_b, replaced.dim()).unwrap();
            assert!(trace_distance(&replaced, &th).unwrap() < 1e-12);
        }
    }
}

#[test]
fn lossy_channel_attenuates_mean_photon_number() {
    let fa = f();
    let rho = fa.coherent_state(C64::new(1.2, 0.5), 24).unwrap().projector();
    let n_in = rho.mean_photon_number(0).unwrap();
    for r in [0.25, 0.5, 0.9] {
        let out = lossy_channel(&fa, &rho, r, 0.0).unwrap();
        assert!((out.mean_photon_number(0).unwrap() - r * n_in).abs() < 1e-9);
        let noisy = lossy_channel(&fa, &rho, r, 0.2).unwrap();
        assert!((noisy.mean_photon_number(0).unwrap() - (r * n_in + (1.0 - r) * 0.2)).abs() < 1e-9);
    }
}

#[test]
fn helstrom_sits_between_fidelity_bounds() {
    for &(m, mp) in &[(1, 0), (2, 1), (4, 2), (6, 0)] {
        for n_b in [1e-5, 0.1, 1.0] {
            let pc = PerCopy::new(&f(), &Transmitter::MandM { m, m_prime: mp }, n_b).unwrap();
            let h = helstrom(&pc.outputs.rho0, &pc.outputs.rho1).unwrap();
            let fid = pc.ln_fidelity.exp();
            assert!(h <= pc.qcb(1).0.exp() + 1e-10);
            assert!(h >= 0.5 * (1.0 - (1.0 - fid).sqrt()) - 1e-10);
        }
    }
}

#[test]
fn classical_bound_special_values() {
    assert!((classical_lb_noiseless(1, 1.0, 0.0, 1.0).unwrap() - 0.102469951189674946).abs() < 1e-15);
    assert_eq!(classical_lb_noisy(7, 0.3, 0.2, 0.1, 0.1).unwrap(), 0.5);
}
