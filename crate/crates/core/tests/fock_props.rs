mod common;

use common::{oracle_for, FockOracle};
use egt_core::{enumerate_basis, exchange_operator, state_index, Basis, SpaceSpec};
use proptest::prelude::*;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let num: u128 = ((n - k + 1)..=n).map(|x| x as u128).product();
    let den: u128 = (1..=k).map(|x| x as u128).product();
    (num / den) as usize
}

fn all_specs(max_levels: usize) -> Vec<(SpaceSpec, usize)> {
    let mut out = Vec::new();
    for l in 1..=max_levels {
        for m in 0..=l {
            out.push((SpaceSpec::fermions(l), m));
        }
        for m in 0..=9 {
            out.push((SpaceSpec::bosons(l), m));
        }
    }
    out
}

#[test]
fn dimensions_and_round_trip_up_to_eight_levels() {
    for (spec, m) in all_specs(8) {
        let states = enumerate_basis(spec, m).unwrap();
        let expected = match spec.statistics {
            egt_core::Statistics::Fermion => binomial(spec.levels, m),
            egt_core::Statistics::Boson => binomial(spec.levels + m - 1, m),
        };
        assert_eq!(states.len(), expected, "{spec:?} m={m}");
        let basis = Basis::new(spec, m).unwrap();
        for (i, s) in states.iter().enumerate() {
            assert_eq!(s.particle_count(), m);
            assert_eq!(basis.index_of(s).unwrap(), i);
        }
        let mut sorted = states.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), states.len(), "duplicates in {spec:?} m={m}");
    }
}

#[test]
fn state_index_agrees_with_linear_scan() {
    let spec = SpaceSpec::bosons(4);
    let states = enumerate_basis(spec, 5).unwrap();
    for r in [0, 3, 17, 29, 42, states.len() - 1] {
        let scanned = states.iter().position(|s| *s == states[r]).unwrap();
        assert_eq!(state_index(spec, 5, &states[r]).unwrap(), scanned);
    }
}

#[test]
fn exchange_is_an_involution_everywhere() {
    for (spec, m) in all_specs(8) {
        let j = exchange_operator(spec, m).unwrap();
        assert!(j.is_involution(), "{spec:?} m={m}");
        let dim = j.dimension();
        let counterdiagonal = j.image.iter().enumerate().all(|(i, &t)| t == dim - 1 - i);
        assert_eq!(j.is_full_exchange, j.fixed_points.len() <= 1 && counterdiagonal);
        for &p in &j.fixed_points {
            assert_eq!(j.image[p], p);
        }
    }
}

#[test]
fn six_level_fermions_are_full_exchange_exactly_for_odd_particle_number() {
    for m in 1..=5 {
        let j = exchange_operator(SpaceSpec::fermions(6), m).unwrap();
        assert_eq!(j.is_full_exchange, m % 2 == 1, "m={m}");
    }
}

#[test]
fn oracle_satisfies_canonical_relations() {
    let f = FockOracle::fermions(3);
    for i in 1..=3 {
        for j in 1..=3 {
            let a = &f.annihilators[i - 1];
            let ad = f.creator(j);
            let anti = a * &ad + &ad * a;
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((anti - nalgebra::DMatrix::identity(8, 8) * expected).abs().max() < 1e-15);
        }
    }
    let b = FockOracle::bosons(2, 3);
    let comm = &b.annihilators[0] * b.creator(1) - b.creator(1) * &b.annihilators[0];
    // exact below the cutoff
    for n1 in 0..3 {
        let idx = n1 * 4;
        assert!((comm[(idx, idx)] - 1.0).abs() < 1e-15);
    }
}

fn check_transitions_against_oracle(spec: SpaceSpec, n: usize) {
    let oracle = oracle_for(spec, n);
    let n_basis = Basis::new(spec, n).unwrap();
    for k in 0..=n {
        let k_basis = match Basis::new(spec, k) {
            Ok(b) => b,
            Err(_) => continue,
        };
        let tensor = oracle.transition_tensor(&n_basis, &k_basis);
        for (a, alpha) in k_basis.states().iter().enumerate() {
            for (g, gamma) in k_basis.states().iter().enumerate() {
                for nu_idx in 0..n_basis.dimension() {
                    let action = n_basis.apply_transition(alpha, gamma, nu_idx).unwrap();
                    for mu_idx in 0..n_basis.dimension() {
                        let expected = tensor[a][g][(mu_idx, nu_idx)];
                        let got = if action.target == Some(mu_idx) {
                            action.coefficient
                        } else {
                            0.0
                        };
                        assert!(
                            (got - expected).abs() < 1e-12,
                            "{spec:?} n={n}: <{}| {alpha}† {gamma} |{}> = {got}, oracle {expected}",
                            n_basis.state(mu_idx),
                            n_basis.state(nu_idx),
                        );
                    }
                    match (spec.statistics, action.target) {
                        (egt_core::Statistics::Fermion, Some(_)) => {
                            assert_eq!(action.coefficient.abs(), 1.0)
                        }
                        (egt_core::Statistics::Boson, Some(_)) => assert!(action.coefficient > 0.0),
                        (_, None) => assert_eq!(action.coefficient, 0.0),
                    }
                }
            }
        }
    }
}

#[test]
fn fermion_transitions_match_operator_algebra() {
    for l in 1..=4 {
        for n in 0..=l.min(4) {
            check_transitions_against_oracle(SpaceSpec::fermions(l), n);
        }
    }
}

#[test]
fn boson_transitions_match_operator_algebra() {
    for l in 1..=3 {
        for n in 0..=4 {
            check_transitions_against_oracle(SpaceSpec::bosons(l), n);
        }
    }
    check_transitions_against_oracle(SpaceSpec::bosons(4), 3);
}

#[test]
fn specific_fermion_hop_sign() {
    // a†_3 a†_4 a_2 a_1 |1100> : the oracle fixes the sign
    let spec = SpaceSpec::fermions(4);
    let basis = Basis::new(spec, 2).unwrap();
    let from = egt_core::OccupationState::new(vec![1, 1, 0, 0]);
    let to = egt_core::OccupationState::new(vec![0, 0, 1, 1]);
    let action = basis
        .apply_transition(&to, &from, basis.index_of(&from).unwrap())
        .unwrap();
    let oracle = FockOracle::fermions(4);
    let expected = oracle.transition_element(&to, &to, &from, &from);
    assert_eq!(action.coefficient, expected);
    assert_eq!(action.target, Some(basis.index_of(&to).unwrap()));
}

fn space_strategy() -> impl Strategy<Value = (SpaceSpec, usize, usize)> {
    prop_oneof![
        (2usize..=6).prop_flat_map(|l| (Just(SpaceSpec::fermions(l)), 1..=l)),
        (2usize..=4).prop_flat_map(|l| (Just(SpaceSpec::bosons(l)), 1usize..=5)),
    ]
    .prop_flat_map(|(spec, n)| (Just(spec), Just(n), 1..=n))
}

proptest! {
    #[test]
    fn hermiticity_seed(
        (spec, n, k) in space_strategy(),
        picks in prop::array::uniform4(any::<prop::sample::Index>()),
    ) {
        let n_basis = Basis::new(spec, n).unwrap();
        let k_basis = Basis::new(spec, k).unwrap();
        let alpha = k_basis.state(picks[0].index(k_basis.dimension()));
        let gamma = k_basis.state(picks[1].index(k_basis.dimension()));
        let nu = picks[2].index(n_basis.dimension());
        let forward = n_basis.apply_transition(alpha, gamma, nu).unwrap();
        if let Some(mu) = forward.target {
            let back = n_basis.apply_transition(gamma, alpha, mu).unwrap();
            prop_assert_eq!(back.target, Some(nu));
            prop_assert_eq!(back.coefficient, forward.coefficient);
        }
    }
}
