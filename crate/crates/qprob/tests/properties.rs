use std::f64::consts::PI;

use proptest::prelude::*;
use qprob::io::{Metadata, Payload, ResultEnvelope};
use qprob::linalg::{self, c64};
use qprob::manybody;
use qprob::quasiprob::{self, Ordering};
use qprob::thermo;
use qprob::{ising, presets, random, schemes};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

/// Random two-time setup indexed by seed; proptest shrinks toward seed 0.
fn setup(seed: u64) -> presets::TwoTimeSetup {
    random::setup(&mut random::rng(seed), 5)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn kdq_marginals_reproduce_born_rule(seed in any::<u64>()) {
        let s = setup(seed);
        let t = s.kdq(Ordering::Kdq1).unwrap();
        prop_assert!(t.normalization_residual() < 1e-10);
        // summing over the first outcome leaves the unperturbed final statistics
        let ph = quasiprob::heisenberg_projectors(&s.channel, &s.o2).unwrap();
        for (j, h) in ph.iter().enumerate() {
            let born = linalg::trace_product(h, s.rho.matrix());
            let col: num_complex::Complex64 = (0..t.shape().0).map(|i| t.q[(i, j)]).sum();
            prop_assert!((col - born).norm() < 1e-10);
        }
        // summing over the second outcome gives the first-measurement statistics
        for i in 0..t.shape().0 {
            let born = linalg::trace_product(s.o1.projector(i), s.rho.matrix());
            let row: num_complex::Complex64 = (0..t.shape().1).map(|j| t.q[(i, j)]).sum();
            prop_assert!((row - born).norm() < 1e-10);
        }
    }

    #[test]
    fn orderings_are_conjugate(seed in any::<u64>()) {
        let s = setup(seed);
        let a = s.kdq(Ordering::Kdq1).unwrap().q;
        let b = s.kdq(Ordering::Kdq2).unwrap().q;
        prop_assert!(linalg::max_abs(&(a.map(|z| z.conj()) - b)) < 1e-10);
    }

    #[test]
    fn characteristic_from_table_matches_direct_trace(seed in any::<u64>(), re in -3.0..3.0f64, im in -0.5..0.5f64) {
        let s = setup(seed);
        let u = c64(re, im);
        let table = s.kdq(Ordering::Kdq1).unwrap();
        let direct = s.characteristic(u).unwrap();
        prop_assert!((table.characteristic(u) - direct).norm() < 1e-9 * direct.norm().max(1.0));
        prop_assert!((table.characteristic(c64(0.0, 0.0)) - c64(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn ndqp_contains_tpm_and_kdq(seed in any::<u64>()) {
        let s = setup(seed);
        let n = s.ndqp().unwrap();
        let t = s.kdq(Ordering::Kdq1).unwrap();
        prop_assert!((n.total() - c64(1.0, 0.0)).norm() < 1e-10);
        prop_assert!((n.diagonal() - &t.p_tpm).amax() < 1e-10);
        let kdq_from_ndqp = n.cross_terms() + n.diagonal().map(|v| c64(v, 0.0));
        prop_assert!(linalg::max_abs(&(kdq_from_ndqp - &t.q)) < 1e-10);
    }

    #[test]
    fn mhq_is_rebuilt_from_weak_measurements(seed in any::<u64>()) {
        let s = setup(seed);
        let via = schemes::mhq_table_via_wtpm(&s.rho, &s.o1, &s.channel, &s.o2).unwrap();
        let mhq = s.kdq(Ordering::Kdq1).unwrap().mhq();
        prop_assert!((via - mhq).amax() < 1e-10);
    }

    #[test]
    fn aleph_is_zero_only_without_negativity(seed in any::<u64>()) {
        let s = setup(seed);
        let t = s.kdq(Ordering::Kdq1).unwrap();
        let aleph = t.nonpositivity();
        prop_assert!(aleph >= -1e-12);
        let negative = t.q.iter().any(|z| z.re < -1e-9 || z.im.abs() > 1e-9);
        prop_assert_eq!(negative, aleph > 1e-10);
    }

    #[test]
    fn driven_qubit_closed_form(
        omega in 0.05..3.0f64,
        delta in -2.0..2.0f64,
        p in 0.0..1.0f64,
        frac in -1.0..1.0f64,
        t in 0.0..10.0f64,
    ) {
        prop_assume!(delta.abs() > 1e-3);
        let c = frac * (p * (1.0 - p)).sqrt();
        let protocol = thermo::driven_qubit_preset(omega, delta, p, c, t).unwrap();
        let q = thermo::work_table(&protocol).unwrap().q;
        let a = thermo::driven_qubit_analytic(omega, delta, p, c, t);
        prop_assert!(linalg::max_abs(&(q - a)) < 1e-10);
    }

    #[test]
    fn ising_mode_tables_match_oracle(
        k in 0.01..PI,
        l0 in -2.0..2.0f64,
        l1 in -2.0..2.0f64,
        beta in 0.0..3.0f64,
        p in 0.0..1.0f64,
    ) {
        let spec = ising::IsingQuenchSpec { n: 4, lambda0: l0, lambda1: l1, beta, p };
        prop_assume!(ising::bogoliubov_angle(k, l0).is_ok() && ising::bogoliubov_angle(k, l1).is_ok());
        let table = ising::mode_table(k, &spec).unwrap();
        let (oracle, off) = ising::mode_oracle(k, &spec).unwrap();
        prop_assert!(off < 1e-10);
        prop_assert!((table.total() - 1.0).abs() < 1e-12);
        for e in &oracle.entries {
            let a = table.get(e.label).unwrap();
            prop_assert!((a.q - e.q).abs() < 1e-10, "{} {} vs {}", e.label, a.q, e.q);
        }
    }

    #[test]
    fn loschmidt_routes_agree(b in 0.1..2.0f64, delta in 0.01..2.0f64, t in 0.0..20.0f64) {
        let spec = manybody::qubit_loschmidt_preset(b, delta).unwrap();
        let table = manybody::loschmidt_kdq(&spec).unwrap();
        let direct = manybody::loschmidt_amplitude(&spec, t);
        prop_assert!((manybody::loschmidt_from_kdq(&table, t) - direct).norm() < 1e-10);
        prop_assert!((manybody::qubit_loschmidt_closed_form(b, delta, t) - direct).norm() < 1e-10);
    }

    #[test]
    fn two_qubit_heat_table_is_normalised(
        pf in 0.0..1.0f64,
        ef in 0.0..1.0f64,
        xi in 0.0..(2.0 * PI),
        theta in 0.0..PI,
    ) {
        let (bc, bh) = (1.0f64, 0.1f64);
        let (ac, ah) = (1.0 / (1.0 + (-bc).exp()), 1.0 / (1.0 + (-bh).exp()));
        let p = (ac + ah - 1.0) + pf * (ac.min(ah) - (ac + ah - 1.0));
        let eta = ef * ((ac - p) * (ah - p)).sqrt();
        let spec = thermo::two_qubit_heat_preset(p, eta, xi, theta, bc, bh).unwrap();
        let table = thermo::heat_table(&spec).unwrap();
        prop_assert!((table.total() - c64(1.0, 0.0)).norm() < 1e-12);
        let closed = thermo::two_qubit_heat_closed_form(eta, xi, theta, bc, bh);
        prop_assert!((table.average_heat() - closed).abs() < 1e-12);
    }

    #[test]
    fn envelopes_round_trip_through_json(seed in any::<u64>()) {
        let t = setup(seed).kdq(Ordering::Kdq1).unwrap();
        let env = ResultEnvelope::new(Metadata::new("kdq", &seed), Payload::table(&t)).unwrap();
        let back = ResultEnvelope::from_json(&env.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), env.to_json());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn six_transitions_sum_to_one(
        k in 0.01..PI,
        l0 in -3.0..3.0f64,
        l1 in -3.0..3.0f64,
        beta in 0.0..5.0f64,
        p in 0.0..1.0f64,
    ) {
        prop_assume!(ising::dispersion(k, l0) > 1e-6 && ising::dispersion(k, l1) > 1e-6);
        let spec = ising::IsingQuenchSpec { n: 4, lambda0: l0, lambda1: l1, beta, p };
        let t = ising::mode_table(k, &spec).unwrap();
        prop_assert!((t.total() - 1.0).abs() < 1e-12);
        // the two W = 0 single-occupation rows carry 1/Z_k^2 each
        let z2 = t.zk * t.zk;
        prop_assert!((t.get("01->01").unwrap().q - 1.0 / z2).abs() < 1e-12);
        prop_assert!((t.get("10->10").unwrap().q - 1.0 / z2).abs() < 1e-12);
    }
}

#[test]
fn ising_assembly_stays_normalised_up_to_24_spins() {
    for n in [16, 20, 24] {
        let spec = ising::IsingQuenchSpec { n, lambda0: 0.0, lambda1: 0.5, beta: 0.1, p: 1.0 };
        let d = ising::assemble_distribution(&spec).unwrap();
        assert!(d.normalization_residual() < 1e-9, "N = {n}");
        let im = d.atoms.iter().fold(0.0f64, |m, a| m.max(a.weight.im.abs()));
        assert!(im < 1e-12, "N = {n}: Im {im:.2e}");
        let (mean, var) = ising::mode_cumulants(&spec).unwrap();
        assert!((d.mean().re - mean).abs() < 1e-9 && (d.variance().re - var).abs() < 1e-8);
    }
}
