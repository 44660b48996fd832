//! Assembly of the acquisition objective.
//!
//! The solver minimizes Ising energy, so every contribution is carried in
//! the minimization frame: the assembled model's energy equals
//! `-(r̂(s) + H_exploration(s) + H_encoding(s))`, making its argmin the
//! argmax of the acquisition function.

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::surrogate::FmParams;

/// Sum weighted sub-surrogates into one minimization-frame Ising model.
///
/// The result's energy at any spin vector equals `-Σ_m p_m r̂_m(s)`.
pub fn integrate_multi(submodels: &[FmParams], weights: &[f64]) -> Result<IsingModel> {
    if submodels.is_empty() {
        return Err(Error::invalid("need at least one sub-surrogate"));
    }
    if submodels.len() != weights.len() {
        return Err(Error::dims(submodels.len(), weights.len()));
    }
    let n = submodels[0].n_features();
    let k = submodels[0].rank();
    for p in submodels {
        if p.n_features() != n {
            return Err(Error::dims(n, p.n_features()));
        }
        if p.rank() != k {
            return Err(Error::dims(k, p.rank()));
        }
    }
    let mut total = IsingModel::zeros(n);
    for (p, &weight) in submodels.iter().zip(weights) {
        total.add_scaled(&p.to_ising(true), weight)?;
    }
    Ok(total)
}

/// Combine the surrogate, the incentive terms, and the encoding penalty.
///
/// `surrogate` and `penalty` are minimization-frame models (energies equal
/// to the negated maximization objectives); `incentive` holds the
/// maximization-frame linear coefficients, so they enter the field negated.
pub fn assemble_acquisition(
    surrogate: &IsingModel,
    incentive: &[f64],
    penalty: Option<&IsingModel>,
) -> Result<IsingModel> {
    let n = surrogate.n_spins();
    if incentive.len() != n {
        return Err(Error::dims(n, incentive.len()));
    }
    let mut acq = surrogate.clone();
    for (i, &term) in incentive.iter().enumerate() {
        acq.add_field(i, -term);
    }
    if let Some(p) = penalty {
        acq.add_scaled(p, 1.0)?;
    }
    Ok(acq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{encode, penalty_model, Action, ActionSpace};
    use crate::ising::{brute_force_min, SpinVector};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_params(n: usize, k: usize, seed: u64) -> FmParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = FmParams::zeros(n, k).unwrap();
        for v in &mut p.v {
            *v = rng.random_range(-1.0..1.0);
        }
        for w in &mut p.w {
            *w = rng.random_range(-1.0..1.0);
        }
        p.w0 = rng.random_range(-1.0..1.0);
        p
    }

    #[test]
    fn single_submodel_with_unit_weight_is_plain_conversion() {
        let p = random_params(5, 2, 1);
        let integrated = integrate_multi(std::slice::from_ref(&p), &[1.0]).unwrap();
        assert_eq!(integrated, p.to_ising(true));
    }

    #[test]
    fn duplicated_submodels_double_the_energy() {
        let p = random_params(5, 2, 2);
        let single = integrate_multi(std::slice::from_ref(&p), &[1.0]).unwrap();
        let double = integrate_multi(&[p.clone(), p.clone()], &[1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = SpinVector::random(5, &mut rng);
            let e1 = single.energy(&s).unwrap();
            let e2 = double.energy(&s).unwrap();
            assert!((e2 - 2.0 * e1).abs() < 1e-12);
        }
    }

    #[test]
    fn integration_cross_checks_against_weighted_predictions() {
        let subs: Vec<FmParams> = (0..3).map(|i| random_params(7, 3, 100 + i)).collect();
        let weights = [1.0, 0.5, 2.0];
        let integrated = integrate_multi(&subs, &weights).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let s = SpinVector::random(7, &mut rng);
            let expected: f64 = subs
                .iter()
                .zip(&weights)
                .map(|(p, &w)| -w * p.predict(&s).unwrap())
                .sum();
            assert!((integrated.energy(&s).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn integration_rejects_mismatched_shapes() {
        let a = random_params(5, 2, 5);
        let b = random_params(6, 2, 6);
        assert!(integrate_multi(&[a.clone(), b], &[1.0, 1.0]).is_err());
        assert!(integrate_multi(&[a], &[1.0, 1.0]).is_err());
        assert!(integrate_multi(&[], &[]).is_err());
    }

    #[test]
    fn degenerate_assembly_reduces_to_the_surrogate() {
        let p = random_params(6, 2, 7);
        let sur = p.to_ising(true);
        let acq = assemble_acquisition(&sur, &[0.0; 6], None).unwrap();
        assert_eq!(acq, sur);

        // Argmin of the assembly equals argmax of the prediction.
        let (best, _) = brute_force_min(&acq).unwrap();
        let mut max_pred = f64::NEG_INFINITY;
        let mut argmax = None;
        for idx in 0..(1u64 << 6) {
            let s = SpinVector::from_index(idx, 6);
            let r = p.predict(&s).unwrap();
            if r > max_pred {
                max_pred = r;
                argmax = Some(s);
            }
        }
        assert_eq!(p.predict(&best).unwrap(), max_pred);
        let _ = argmax;
    }

    #[test]
    fn assembled_argmin_matches_exhaustive_action_argmax() {
        // N=4 one-hot space with two binary groups; exhaustive oracle over
        // the 4 valid actions.
        let space = ActionSpace::new(vec![2, 2]).unwrap();
        for seed in 0..20 {
            let p = random_params(4, 2, 1000 + seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let incentive: Vec<f64> = (0..4).map(|_| rng.random_range(-0.5..0.5)).collect();

            let mut best_val = f64::NEG_INFINITY;
            let mut best_action = None;
            for a0 in 0..2 {
                for a1 in 0..2 {
                    let action = Action::new(vec![a0, a1]);
                    let s = encode(&space, &action).unwrap();
                    let mut val = p.predict(&s).unwrap();
                    for (i, term) in incentive.iter().enumerate() {
                        val += term * s.get(i) as f64;
                    }
                    if val > best_val {
                        best_val = val;
                        best_action = Some(s);
                    }
                }
            }

            // Large penalty coefficient so no violating state can win.
            let penalty = penalty_model(&space, 100.0).unwrap();
            let acq =
                assemble_acquisition(&p.to_ising(true), &incentive, Some(&penalty)).unwrap();
            let (min_state, _) = brute_force_min(&acq).unwrap();
            assert_eq!(min_state.as_slice(), best_action.unwrap().as_slice());
        }
    }

    #[test]
    fn constant_offset_does_not_move_the_argmin() {
        let p = random_params(6, 2, 42);
        let sur = p.to_ising(true);
        let acq = assemble_acquisition(&sur, &[0.1; 6], None).unwrap();
        let mut shifted = acq.clone();
        shifted.add_offset(123.456);
        let (a, ea) = brute_force_min(&acq).unwrap();
        let (b, eb) = brute_force_min(&shifted).unwrap();
        assert_eq!(a, b);
        assert!((eb - ea - 123.456).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let sur = IsingModel::zeros(4);
        assert!(assemble_acquisition(&sur, &[0.0; 3], None).is_err());
        let penalty = IsingModel::zeros(5);
        assert!(assemble_acquisition(&sur, &[0.0; 4], Some(&penalty)).is_err());
    }
}
