use proptest::prelude::*;

use twobath::bath::{chain_coefficients, SpectralDensity};
use twobath::dmrg::{ground_state, SolverConfig};
use twobath::model::{build_two_chain_mpo, ModelParams};
use twobath::mps::Mps;
use twobath::observables::{entropy_from_bloch, spin_entropy, spin_expectations};
use twobath::oracle::exact_for;
use twobath::point::PointSpec;
use twobath::sweep::{entropy_peak, fidelity_dip, order_swap, renormalized_couplings, Grid};

fn local_dims() -> impl Strategy<Value = Vec<usize>> {
    (1usize..4, 2usize..4).prop_map(|(l, d)| {
        let mut dims = vec![d; l];
        dims.push(2);
        dims.extend(vec![d; l]);
        dims
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chain_coefficients_are_positive_and_decay(s in 0.1f64..=1.0, lambda in 1.3f64..3.0, alpha in 0.001f64..0.5) {
        let sd = SpectralDensity::new(alpha, s, 1.0).unwrap();
        let c = chain_coefficients(&sd, lambda, 30).unwrap();
        prop_assert!(c.site_energies.iter().all(|&w| w > 0.0));
        prop_assert!(c.hoppings.iter().all(|&t| t > 0.0));
        let n = c.len() - 2;
        let rw = c.site_energies[n + 1] / c.site_energies[n];
        let rt = c.hoppings[n] / c.hoppings[n - 1];
        prop_assert!((rw * lambda - 1.0).abs() < 1e-3, "ω ratio {}", rw * lambda);
        prop_assert!((rt * lambda - 1.0).abs() < 1e-3, "t ratio {}", rt * lambda);
        prop_assert!((c.site_energies[0] - (s + 1.0) / (s + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn random_states_are_normalized_canonical_forms(dims in local_dims(), bond in 1usize..6, seed in any::<u64>()) {
        let psi = Mps::random(&dims, bond, seed);
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(psi.max_bond() <= bond);
        let c = psi.canonicalize(dims.len() / 2);
        prop_assert!((c.overlap(&psi) - 1.0).abs() < 1e-12);
        let again = c.canonicalize(dims.len() / 2);
        for (a, b) in again.sites.iter().zip(&c.sites) {
            prop_assert!(a.data.iter().zip(&b.data).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn entropy_is_center_invariant(dims in local_dims(), seed in any::<u64>()) {
        let psi = Mps::random(&dims, 4, seed);
        let bond = dims.len() / 2;
        let s0 = psi.canonicalize(0).bond_entropy(bond).unwrap();
        let s1 = psi.canonicalize(dims.len() - 1).bond_entropy(bond).unwrap();
        prop_assert!((s0 - s1).abs() < 1e-10);
        prop_assert!(s0 >= 0.0);
    }

    #[test]
    fn truncation_never_increases_norm(dims in local_dims(), seed in any::<u64>(), keep in 1usize..4) {
        let psi = Mps::random(&dims, 6, seed).canonicalize(0);
        let bond = dims.len() / 2;
        let (cut, report) = psi.truncate_bond(bond, keep, 0.0).unwrap();
        prop_assert!(cut.norm_sqr() <= 1.0 + 1e-12);
        prop_assert!(report.discarded.iter().all(|&w| w >= 0.0));
        prop_assert!((cut.norm_sqr() + report.max_discarded - 1.0).abs() < 1e-10);
        let mut renorm = cut.clone();
        renorm.normalize();
        prop_assert!((renorm.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spin_observables_obey_two_level_identities(dims in local_dims(), seed in any::<u64>()) {
        let psi = Mps::random(&dims, 4, seed);
        let spin = dims.len() / 2;
        let (sx, sy, sz) = spin_expectations(&psi, spin).unwrap();
        let r = (sx * sx + sy * sy + sz * sz).sqrt();
        prop_assert!(r <= 1.0 + 1e-9);
        prop_assert!(sy.abs() < 1e-10);
        let s = spin_entropy(&psi, spin).unwrap();
        prop_assert!((0.0..=std::f64::consts::LN_2 + 1e-12).contains(&s));
        prop_assert!((s - entropy_from_bloch(r)).abs() < 1e-8);
    }

    #[test]
    fn equal_exponents_keep_coupling_ratio(a in 1e-4f64..0.5, b in 1e-4f64..0.5, s in 0.1f64..1.0) {
        let (ez, ex) = renormalized_couplings(a, s, b, s, 1.0);
        prop_assert!((ez / ex - a / b).abs() <= 1e-12 * (a / b));
    }

    #[test]
    fn grids_are_strictly_monotone(start in -1.0f64..1.0, width in 1e-6f64..1.0, points in 3usize..60) {
        let v = Grid::linear(start, start + width, points).values();
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(v.len(), points);
    }

    #[test]
    fn detector_estimates_lie_in_their_brackets(ys in prop::collection::vec(0.0f64..1.0, 5..20), zs in prop::collection::vec(-1.0f64..1.0, 20)) {
        let n = ys.len();
        let x: Vec<f64> = (0..n).map(|i| 0.01 * i as f64).collect();
        let zs = &zs[..n];
        let inside = |c: twobath::sweep::CriticalPoint| c.bracket.0 <= c.estimate && c.estimate <= c.bracket.1 && c.bracket.0 >= x[0] && c.bracket.1 <= x[n - 1];
        if let Some(c) = entropy_peak(&x, &ys) { prop_assert!(inside(c)); }
        if let Some(c) = order_swap(&x, &ys, zs) { prop_assert!(inside(c)); }
        let fid: Vec<Option<f64>> = (0..n).map(|i| (i > 0).then(|| ys[i])).collect();
        if let Some(c) = fidelity_dip(&x, &fid) { prop_assert!(inside(c)); }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pilot_free_spectra_are_paired(alpha in 0.0f64..0.5, beta in 0.0f64..0.5, s in 0.2f64..1.0, s_bar in 0.2f64..1.0) {
        let params = ModelParams { alpha, beta, s, s_bar, ..Default::default() };
        let spec = PointSpec { params, chain_length: 2, ..Default::default() };
        let sp = exact_for(&spec, 3, usize::MAX).unwrap();
        prop_assert!(sp.pair_splitting() < 1e-10, "splitting {}", sp.pair_splitting());
    }

    #[test]
    fn dmrg_is_variational_and_monotone(alpha in 0.0f64..0.4, beta in 0.0f64..0.4, delta in 0.0f64..0.2, eps in -0.1f64..0.1, seed in 0u64..1000) {
        let params = ModelParams { alpha, beta, delta, epsilon: eps, pilot_z: -1e-5, ..Default::default() };
        let spec = PointSpec { params, chain_length: 2, ..Default::default() };
        let (cz, cx) = twobath::model::build_chains(&params, spec.lambda, 2, spec.chain_method).unwrap();
        let mpo = build_two_chain_mpo(&params, &cz, &cx, 3).unwrap();
        let cfg = SolverConfig {
            d_c: 32, w_max: 1e-14, d_p: 3, d_opt: 3, max_sweeps: 20,
            energy_tol: 1e-12, eigensolver_tol: 1e-13, eigensolver_max_iter: 400, seed, strict: true,
        };
        let gs = ground_state(&mpo, &cfg).unwrap();
        let e0 = exact_for(&spec, 3, 1).unwrap().ground_energy();
        prop_assert!(gs.energy >= e0 - 1e-12);
        prop_assert!(gs.energy - e0 <= 1e-8);
        let e = gs.stats.energies();
        prop_assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{:?}", e);
    }
}

#[test]
fn same_seed_gives_identical_stats() {
    let params = ModelParams { alpha: 0.1, beta: 0.05, pilot_z: -1e-5, ..Default::default() };
    let (cz, cx) = twobath::model::build_chains(&params, 2.0, 3, Default::default()).unwrap();
    let mpo = build_two_chain_mpo(&params, &cz, &cx, 6).unwrap();
    let cfg = SolverConfig { d_c: 12, d_p: 6, d_opt: 4, strict: true, seed: 5, ..Default::default() };
    let a = ground_state(&mpo, &cfg).unwrap();
    let b = ground_state(&mpo, &cfg).unwrap();
    assert_eq!(format!("{:?}", a.stats), format!("{:?}", b.stats));
    assert_eq!(a.energy.to_bits(), b.energy.to_bits());
}
