//! One-hot conversion between discrete actions and spin vectors.
//!
//! A discrete control input with `d` possible values occupies a group of
//! `d` spins in which exactly one is +1. [`penalty_model`] builds the
//! quadratic constraint term that vanishes precisely on valid one-hot
//! configurations, and [`decode`] repairs solver outputs that violate a
//! group by keeping that input's previous value.

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};

/// Cardinalities of the discrete control inputs and the derived spin layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSpace {
    cardinalities: Vec<usize>,
    offsets: Vec<usize>,
    n_spins: usize,
}

impl ActionSpace {
    pub fn new(cardinalities: Vec<usize>) -> Result<Self> {
        if cardinalities.is_empty() {
            return Err(Error::invalid("action space needs at least one input"));
        }
        if let Some(&bad) = cardinalities.iter().find(|&&d| d < 2) {
            return Err(Error::invalid(format!(
                "every cardinality must be >= 2, found {bad}"
            )));
        }
        let mut offsets = Vec::with_capacity(cardinalities.len());
        let mut acc = 0;
        for &d in &cardinalities {
            offsets.push(acc);
            acc += d;
        }
        Ok(ActionSpace {
            cardinalities,
            offsets,
            n_spins: acc,
        })
    }

    /// A space of `n` inputs that all share cardinality `d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn n_inputs(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn cardinality(&self, input: usize) -> usize {
        self.cardinalities[input]
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    /// Spin indices `offset..offset + d` belonging to input `l`.
    pub fn group_range(&self, l: usize) -> std::ops::Range<usize> {
        let start = self.offsets[l];
        start..start + self.cardinalities[l]
    }

    /// Number of distinct actions (product of cardinalities), saturating.
    pub fn n_actions(&self) -> usize {
        self.cardinalities
            .iter()
            .fold(1usize, |acc, &d| acc.saturating_mul(d))
    }

    /// Enumerate every action in lexicographic order.
    pub fn enumerate(&self) -> impl Iterator<Item = Action> + '_ {
        let n = self.n_inputs();
        let total = self.n_actions();
        (0..total).map(move |mut idx| {
            let mut values = vec![0usize; n];
            for l in (0..n).rev() {
                let d = self.cardinalities[l];
                values[l] = idx % d;
                idx /= d;
            }
            Action::new(values)
        })
    }

    pub fn contains(&self, action: &Action) -> bool {
        action.values.len() == self.n_inputs()
            && action
                .values
                .iter()
                .zip(&self.cardinalities)
                .all(|(&x, &d)| x < d)
    }
}

/// Concrete values of the discrete control inputs (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    pub values: Vec<usize>,
}

impl Action {
    pub fn new(values: Vec<usize>) -> Self {
        Action { values }
    }
}

/// One-hot encode an action: within each group the spin at the value's
/// index is +1 and all others are -1.
pub fn encode(space: &ActionSpace, action: &Action) -> Result<SpinVector> {
    if action.values.len() != space.n_inputs() {
        return Err(Error::dims(space.n_inputs(), action.values.len()));
    }
    let mut spins = vec![-1i8; space.n_spins()];
    for (l, &x) in action.values.iter().enumerate() {
        if x >= space.cardinality(l) {
            return Err(Error::invalid(format!(
                "value {x} out of range for input {l} (cardinality {})",
                space.cardinality(l)
            )));
        }
        spins[space.group_range(l).start + x] = 1;
    }
    SpinVector::new(spins)
}

/// Decode a spin vector into an action, repairing invalid groups.
///
/// A group with exactly one +1 decodes to that index; any other pattern is
/// repaired to `previous.values[l]`, so decoding is total.
pub fn decode(space: &ActionSpace, spins: &SpinVector, previous: &Action) -> Result<Action> {
    decode_with_repairs(space, spins, previous).map(|(action, _)| action)
}

/// [`decode`] plus the number of groups that needed repair.
pub fn decode_with_repairs(
    space: &ActionSpace,
    spins: &SpinVector,
    previous: &Action,
) -> Result<(Action, usize)> {
    if spins.len() != space.n_spins() {
        return Err(Error::dims(space.n_spins(), spins.len()));
    }
    if !space.contains(previous) {
        return Err(Error::invalid("previous action not valid in this space"));
    }
    let mut values = Vec::with_capacity(space.n_inputs());
    let mut repairs = 0;
    for l in 0..space.n_inputs() {
        let range = space.group_range(l);
        let mut ups = 0;
        let mut value = 0;
        for (pos, idx) in range.enumerate() {
            if spins.get(idx) == 1 {
                ups += 1;
                value = pos;
            }
        }
        if ups == 1 {
            values.push(value);
        } else {
            values.push(previous.values[l]);
            repairs += 1;
        }
    }
    Ok((Action::new(values), repairs))
}

/// Build the one-hot constraint penalty as a minimization-frame Ising model.
///
/// The maximization-frame penalty is
/// `H_enc(s) = -(c/4) Σ_l ((Σ_{i in group l} s_i) + d_l - 2)²`,
/// which is 0 exactly when every group is one-hot (group sum `2 - d_l`) and
/// negative otherwise. The returned model's energy is `-H_enc(s)`: zero on
/// valid configurations, positive on violations.
pub fn penalty_model(space: &ActionSpace, c_encoding: f64) -> Result<IsingModel> {
    if !(c_encoding > 0.0) {
        return Err(Error::invalid("c_encoding must be > 0"));
    }
    let n = space.n_spins();
    let mut model = IsingModel::zeros(n);
    let mut offset = 0.0;
    for l in 0..space.n_inputs() {
        let d = space.cardinality(l) as f64;
        let b = d - 2.0;
        let range = space.group_range(l);
        // (G + b)² = Σ_{i≠j} s_i s_j + 2b·G + d + b² over the group, so in
        // energy form: J_ij = -c/2 within the group, h_i = (c/2)·b,
        // offset += (c/4)(d + b²).
        for i in range.clone() {
            for j in range.clone() {
                if i != j {
                    model.set_coupling(i, j, -0.5 * c_encoding)?;
                }
            }
            model.add_field(i, 0.5 * c_encoding * b);
        }
        offset += 0.25 * c_encoding * (d + b * b);
    }
    model.add_offset(offset);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct evaluation of the penalty definition, used as an oracle for
    /// the quadratic expansion.
    fn penalty_direct(space: &ActionSpace, c: f64, spins: &SpinVector) -> f64 {
        let mut acc = 0.0;
        for l in 0..space.n_inputs() {
            let d = space.cardinality(l) as f64;
            let group_sum: f64 = space.group_range(l).map(|i| spins.get(i) as f64).sum();
            let term = group_sum + d - 2.0;
            acc += term * term;
        }
        -(c / 4.0) * acc
    }

    #[test]
    fn binary_input_encodings_match_the_definition() {
        let space = ActionSpace::new(vec![2]).unwrap();
        let s = encode(&space, &Action::new(vec![0])).unwrap();
        assert_eq!(s.as_slice(), &[1, -1]);
        let s = encode(&space, &Action::new(vec![1])).unwrap();
        assert_eq!(s.as_slice(), &[-1, 1]);
    }

    #[test]
    fn mixed_cardinality_encoding() {
        let space = ActionSpace::new(vec![2, 3]).unwrap();
        let s = encode(&space, &Action::new(vec![1, 2])).unwrap();
        assert_eq!(s.as_slice(), &[-1, 1, -1, -1, 1]);
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        let space = ActionSpace::new(vec![2, 3]).unwrap();
        assert!(encode(&space, &Action::new(vec![2, 0])).is_err());
        assert!(encode(&space, &Action::new(vec![0])).is_err());
    }

    #[test]
    fn round_trip_over_an_exhaustive_small_space() {
        let space = ActionSpace::new(vec![3, 4, 2]).unwrap();
        let previous = Action::new(vec![0, 0, 0]);
        let mut count = 0;
        for action in space.enumerate() {
            let spins = encode(&space, &action).unwrap();
            let decoded = decode(&space, &spins, &previous).unwrap();
            assert_eq!(decoded, action);
            count += 1;
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn violating_groups_are_repaired_to_the_previous_value() {
        let space = ActionSpace::new(vec![3]).unwrap();
        let previous = Action::new(vec![2]);
        // All -1: no winner.
        let s = SpinVector::new(vec![-1, -1, -1]).unwrap();
        let (a, repairs) = decode_with_repairs(&space, &s, &previous).unwrap();
        assert_eq!(a.values, vec![2]);
        assert_eq!(repairs, 1);
        // Two +1: ambiguous.
        let s = SpinVector::new(vec![1, 1, -1]).unwrap();
        let (a, repairs) =
            decode_with_repairs(&space, &s, &Action::new(vec![0])).unwrap();
        assert_eq!(a.values, vec![0]);
        assert_eq!(repairs, 1);
    }

    #[test]
    fn penalty_is_zero_exactly_on_one_hot_states() {
        // Exhaustive over single groups up to d = 4, plus a two-group space.
        for d in 2..=4usize {
            let space = ActionSpace::new(vec![d]).unwrap();
            let model = penalty_model(&space, 1.5).unwrap();
            for idx in 0..(1u64 << d) {
                let s = SpinVector::from_index(idx, d);
                let ups = s.iter().filter(|&v| v == 1).count();
                let e = model.energy(&s).unwrap();
                if ups == 1 {
                    assert!(e.abs() < 1e-9, "one-hot state has energy {e}");
                } else {
                    assert!(e > 1e-9, "violating state has energy {e}");
                }
            }
        }
        let space = ActionSpace::new(vec![2, 3]).unwrap();
        let model = penalty_model(&space, 2.0).unwrap();
        for idx in 0..(1u64 << 5) {
            let s = SpinVector::from_index(idx, 5);
            let valid = [(0..2), (2..5)].iter().all(|r| {
                r.clone().filter(|&i| s.get(i) == 1).count() == 1
            });
            let e = model.energy(&s).unwrap();
            if valid {
                assert!(e.abs() < 1e-9);
            } else {
                assert!(e > 1e-9);
            }
        }
    }

    #[test]
    fn penalty_values_match_hand_computations() {
        let c = 3.0;
        // Group of 3 with two +1 spins: group sum = 1, (1+1)² = 4, value -c.
        let space = ActionSpace::new(vec![3]).unwrap();
        let model = penalty_model(&space, c).unwrap();
        let s = SpinVector::new(vec![1, 1, -1]).unwrap();
        assert!((model.energy(&s).unwrap() - c).abs() < 1e-12);
        assert!((penalty_direct(&space, c, &s) + c).abs() < 1e-12);

        // All -1 in a group of d: group sum = -d, (-2)² = 4, value -c.
        for d in 2..=5usize {
            let space = ActionSpace::new(vec![d]).unwrap();
            let model = penalty_model(&space, c).unwrap();
            let s = SpinVector::new(vec![-1; d]).unwrap();
            assert!((model.energy(&s).unwrap() - c).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_expansion_matches_the_direct_formula() {
        let space = ActionSpace::new(vec![3, 2, 4]).unwrap();
        let c = 0.8;
        let model = penalty_model(&space, c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let s = SpinVector::random(space.n_spins(), &mut rng);
            let via_energy = -model.energy(&s).unwrap();
            let direct = penalty_direct(&space, c, &s);
            assert!(
                (via_energy - direct).abs() < 1e-9,
                "expansion {via_energy} vs direct {direct}"
            );
        }
    }

    #[test]
    fn cardinality_bounds_are_enforced() {
        assert!(ActionSpace::new(vec![]).is_err());
        assert!(ActionSpace::new(vec![1]).is_err());
        assert!(ActionSpace::new(vec![2, 1]).is_err());
        assert!(penalty_model(&ActionSpace::new(vec![2]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn demo_sized_space_has_171_spins() {
        let space = ActionSpace::uniform(19, 9).unwrap();
        assert_eq!(space.n_spins(), 171);
        assert_eq!(space.n_inputs(), 19);
    }
}
