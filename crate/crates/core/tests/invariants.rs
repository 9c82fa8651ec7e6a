use bisync::cpmaps::product_closure_residual;
use bisync::io::{from_json, to_json, DensityJson, QPermJson};
use bisync::quantum_perm::random::{random_block_pair, random_permutation_mixture, random_quantum_permutation};
use bisync::{
    compose, density_from_map, fixed_point_set, is_schur_closed, kraus_from_choi, local_bisync_membership,
    local_sync_membership, mixed_permutation_map, mixture, phi_from_density, Density, Game, Graph, Membership,
    ProjectiveSystem, QuantumPermutation,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn qp(seed: u64) -> QuantumPermutation {
    random_quantum_permutation(&mut ChaCha8Rng::seed_from_u64(seed), 6, 4).1
}

/// Random conditional distribution with no structure beyond normalization.
fn arbitrary_density() -> impl Strategy<Value = Density> {
    (1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(na, nb, ka, kb)| {
        proptest::collection::vec(0.0f64..1.0, na * nb * ka * kb).prop_map(move |raw| {
            let mut d = Density::from_fn(na, nb, ka, kb, |a, b, x, y| raw[((x * nb + y) * ka + a) * kb + b] + 1e-3);
            for x in 0..na {
                for y in 0..nb {
                    let s: f64 = (0..ka).flat_map(|a| (0..kb).map(move |b| (a, b))).map(|(a, b)| d.p(a, b, x, y)).sum();
                    for a in 0..ka {
                        for b in 0..kb {
                            let v = d.p(a, b, x, y) / s;
                            d.set(a, b, x, y, v);
                        }
                    }
                }
            }
            d
        })
    })
}

fn arbitrary_game() -> impl Strategy<Value = Game> {
    (1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(na, nb, ka, kb)| {
        proptest::collection::vec(any::<bool>(), na * nb * ka * kb)
            .prop_map(move |bits| Game::from_fn(na, nb, ka, kb, |x, y, a, b| bits[((x * nb + y) * ka + a) * kb + b]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn class_chain_on_arbitrary_densities(d in arbitrary_density()) {
        prop_assert!(d.validate(TOL));
        if let Ok(true) = d.is_bisynchronous_density(TOL) {
            prop_assert!(d.is_synchronous_density(TOL).unwrap());
        }
        if let Ok(true) = d.is_synchronous_density(TOL) {
            prop_assert!(d.is_nonsignalling(TOL).unwrap());
        }
    }

    #[test]
    fn class_chain_on_quantum_densities(seed in any::<u64>()) {
        let d = qp(seed).induced_density();
        prop_assert!(d.validate(TOL));
        prop_assert!(d.is_nonsignalling(TOL).unwrap());
        prop_assert!(d.is_synchronous_density(TOL).unwrap());
        prop_assert!(d.is_bisynchronous_density(TOL).unwrap());
    }

    #[test]
    fn flip_is_an_involution(d in arbitrary_density()) {
        prop_assert_eq!(d.flip().flip(), d);
    }

    #[test]
    fn game_flip_is_an_involution(g in arbitrary_game()) {
        prop_assert_eq!(g.flip().flip(), g);
    }

    #[test]
    fn composition_preserves_bisynchronous(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_permutation_mixture(&mut rng, n, 4).to_density();
        let q = random_permutation_mixture(&mut rng, n, 4).to_density();
        let r = compose(&q, &p).unwrap();
        prop_assert!(r.validate(TOL));
        prop_assert!(r.is_bisynchronous_density(TOL).unwrap());
    }

    #[test]
    fn membership_reconstructs_input(seed in any::<u64>(), n in 1usize..=5) {
        let mix = random_permutation_mixture(&mut ChaCha8Rng::seed_from_u64(seed), n, 6);
        let d = mix.to_density();
        let found = local_bisync_membership(&d, TOL).unwrap().member().expect("mixture is local");
        prop_assert!(found.to_density().max_abs_diff(&d) <= 10.0 * TOL);
        prop_assert!(found.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn synchronous_membership_of_mixtures(seed in any::<u64>(), n in 1usize..=4) {
        let d = random_permutation_mixture(&mut ChaCha8Rng::seed_from_u64(seed), n, 4).to_density();
        let found = local_sync_membership(&d, TOL).unwrap().member().expect("mixture is local");
        prop_assert!(found.to_density().max_abs_diff(&d) <= 10.0 * TOL);
    }

    #[test]
    fn mixtures_stay_bisynchronous(a in any::<u64>(), b in any::<u64>(), w in 0.0f64..=1.0) {
        let u = qp(a);
        let v = qp(b);
        prop_assume!(u.n() == v.n());
        let d = mixture(&[u.induced_density(), v.induced_density()], &[w, 1.0 - w]).unwrap();
        prop_assert!(d.is_bisynchronous_density(TOL).unwrap());
    }

    #[test]
    fn kraus_decomposition_reproduces_map(seed in any::<u64>()) {
        let phi = phi_from_density(&qp(seed).induced_density()).unwrap();
        let kraus = kraus_from_choi(&phi, TOL).unwrap();
        prop_assert!(kraus.to_map().choi().max_abs_diff(phi.choi()) <= 1e-10);
        let again = kraus_from_choi(&kraus.to_map(), TOL).unwrap();
        prop_assert_eq!(again.len(), kraus.len());
    }

    #[test]
    fn fixed_points_form_a_schur_closed_algebra(seed in any::<u64>()) {
        let u = qp(seed);
        let fixed = fixed_point_set(&phi_from_density(&u.induced_density()).unwrap(), TOL).unwrap();
        prop_assert!(product_closure_residual(fixed.basis(), TOL) <= 1e-8);
        prop_assert!(is_schur_closed(fixed.basis(), 1e-8));
        let n = u.n();
        prop_assert!(fixed.contains(&bisync::linalg::CMatrix::identity(n), 1e-8));
    }

    #[test]
    fn mixed_permutation_map_matches_density(seed in any::<u64>(), n in 1usize..=5) {
        let mix = random_permutation_mixture(&mut ChaCha8Rng::seed_from_u64(seed), n, 5);
        let direct = mixed_permutation_map(&mix);
        let via = phi_from_density(&mix.to_density()).unwrap();
        prop_assert!(direct.choi().max_abs_diff(via.choi()) <= 1e-12);
        let back = density_from_map(&direct, TOL).unwrap();
        prop_assert!(back.max_abs_diff(&mix.to_density()) <= 1e-12);
    }

    #[test]
    fn density_json_round_trip_is_exact(d in arbitrary_density()) {
        let text = to_json(&DensityJson::from(&d), false);
        let back = Density::try_from(from_json::<DensityJson>(&text).unwrap()).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn system_json_round_trip_is_exact(seed in any::<u64>()) {
        let u = qp(seed);
        let text = to_json(&QPermJson::from(u.system()), true);
        let back = ProjectiveSystem::try_from(from_json::<QPermJson>(&text).unwrap()).unwrap();
        prop_assert_eq!(&back, u.system());
    }

    #[test]
    fn relabeled_graphs_are_intertwined(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Graph::from_adjacency(n, (0..n * n).map(|i| {
            let (r, c) = (i / n, i % n);
            r != c && (r.min(c) * 7 + r.max(c) * 3 + seed as usize).is_multiple_of(3)
        }).collect()).unwrap();
        let sigma = bisync::quantum_perm::random::random_permutation(&mut rng, n);
        let h = g.relabel(&sigma).unwrap();
        let u = QuantumPermutation::from_permutation(&sigma).unwrap();
        prop_assert!(u.intertwines(&g, &h, TOL).unwrap());
    }
}

/// Generic `block_pair` densities lie in the local polytope: the four
/// block-respecting permutations carry weights `tau(p_s q_t)`.
#[test]
fn block_pair_densities_are_local() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in 2..=4 {
        let u = random_block_pair(&mut rng, d);
        let density = u.induced_density();
        match local_bisync_membership(&density, TOL).unwrap() {
            Membership::Member(mix) => {
                assert!(mix.to_density().max_abs_diff(&density) <= 10.0 * TOL);
                assert!(mix.permutations().iter().all(|s| s[0] < 2 && s[1] < 2 && s[2] >= 2 && s[3] >= 2));
            }
            Membership::Infeasible(w) => panic!("block_pair reported nonlocal (violation {:.3e})", w.violation()),
        }
    }
}

#[test]
fn z3_density_is_not_local() {
    let w = local_bisync_membership(&Density::z3_counterexample(), TOL).unwrap().witness().unwrap();
    assert!(w.violation() > 1e-6);
    assert!(w.evaluate(&Density::z3_counterexample()) > w.max_on_atoms);
}
