//! Ising energy models and solvers.
//!
//! An [`IsingModel`] holds a symmetric zero-diagonal coupling matrix `J`, a
//! field vector `h`, and a constant offset; its energy over a spin vector
//! `s ∈ {-1,+1}^N` is
//!
//! ```text
//! E(s) = -1/2 Σ_ij J_ij s_i s_j + Σ_i h_i s_i + offset
//! ```
//!
//! Minimizers are found heuristically with ballistic simulated bifurcation
//! ([`sb_solve`]) or exactly for small instances with [`brute_force_min`].

mod brute;
mod sb;

pub use brute::{brute_force_min, BRUTE_FORCE_MAX_SPINS};
pub use sb::{sb_solve, SbConfig};

use std::io::{BufReader, Read};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

/// A vector of N spins, each exactly -1 or +1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    /// Validate and wrap raw spin values.
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = spins.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::invalid(format!(
                "spin values must be -1 or +1, found {bad}"
            )));
        }
        Ok(SpinVector(spins))
    }

    /// Read out spins as the signs of real values; sign(0) is +1.
    pub fn from_signs(xs: &[f64]) -> Self {
        SpinVector(xs.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect())
    }

    /// All spins set to +1.
    pub fn ones(n: usize) -> Self {
        SpinVector(vec![1; n])
    }

    /// Uniformly random spins.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        SpinVector((0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
    }

    /// Spins from the bits of `index`: bit i set maps spin i to +1, clear to -1.
    pub fn from_index(index: u64, n: usize) -> Self {
        SpinVector(
            (0..n)
                .map(|i| if (index >> i) & 1 == 1 { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        self.0.iter().copied()
    }

    /// Flip every spin in place.
    pub fn flip_all(&mut self) {
        for v in &mut self.0 {
            *v = -*v;
        }
    }
}

/// Quadratic energy model over spin variables.
///
/// `J` is stored row-major and normalized at construction: it is symmetrized
/// as `(J + Jᵀ)/2` and its diagonal is zeroed, so the energy of any input
/// matrix equals the energy of its symmetrized form.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    n: usize,
    j: Vec<f64>,
    h: Vec<f64>,
    offset: f64,
}

impl IsingModel {
    /// Build a model from a full row-major `n x n` coupling matrix.
    pub fn from_parts(n: usize, j: Vec<f64>, h: Vec<f64>, offset: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n_spins must be positive"));
        }
        if j.len() != n * n {
            return Err(Error::dims(n * n, j.len()));
        }
        if h.len() != n {
            return Err(Error::dims(n, h.len()));
        }
        let mut m = IsingModel { n, j, h, offset };
        m.normalize();
        Ok(m)
    }

    /// Zero couplings, zero fields, zero offset.
    pub fn zeros(n: usize) -> Self {
        IsingModel {
            n,
            j: vec![0.0; n * n],
            h: vec![0.0; n],
            offset: 0.0,
        }
    }

    fn normalize(&mut self) {
        let n = self.n;
        for i in 0..n {
            self.j[i * n + i] = 0.0;
            for jj in (i + 1)..n {
                let avg = 0.5 * (self.j[i * n + jj] + self.j[jj * n + i]);
                self.j[i * n + jj] = avg;
                self.j[jj * n + i] = avg;
            }
        }
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn field(&self) -> &[f64] {
        &self.h
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.j[i * self.n + j]
    }

    pub(crate) fn j_row(&self, i: usize) -> &[f64] {
        &self.j[i * self.n..(i + 1) * self.n]
    }

    /// Set the symmetric coupling pair `J_ij = J_ji = value` (`i != j`).
    pub fn set_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i == j {
            return Err(Error::invalid("diagonal couplings are fixed at zero"));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::dims(self.n, i.max(j) + 1));
        }
        self.j[i * self.n + j] = value;
        self.j[j * self.n + i] = value;
        Ok(())
    }

    pub fn set_field(&mut self, i: usize, value: f64) {
        self.h[i] = value;
    }

    pub fn add_field(&mut self, i: usize, delta: f64) {
        self.h[i] += delta;
    }

    pub fn set_offset(&mut self, value: f64) {
        self.offset = value;
    }

    pub fn add_offset(&mut self, delta: f64) {
        self.offset += delta;
    }

    /// Scale couplings, fields, and offset by `c`.
    pub fn scale(&mut self, c: f64) {
        for v in &mut self.j {
            *v *= c;
        }
        for v in &mut self.h {
            *v *= c;
        }
        self.offset *= c;
    }

    /// Accumulate `scale * other` into this model.
    pub fn add_scaled(&mut self, other: &IsingModel, scale: f64) -> Result<()> {
        if other.n != self.n {
            return Err(Error::dims(self.n, other.n));
        }
        for (a, b) in self.j.iter_mut().zip(&other.j) {
            *a += scale * b;
        }
        for (a, b) in self.h.iter_mut().zip(&other.h) {
            *a += scale * b;
        }
        self.offset += scale * other.offset;
        Ok(())
    }

    /// Energy of a spin configuration.
    pub fn energy(&self, s: &SpinVector) -> Result<f64> {
        if s.len() != self.n {
            return Err(Error::dims(self.n, s.len()));
        }
        Ok(self.energy_unchecked(s.as_slice()))
    }

    pub(crate) fn energy_unchecked(&self, s: &[i8]) -> f64 {
        let spins: Vec<f64> = s.iter().map(|&v| v as f64).collect();
        self.energy_f64(&spins)
    }

    pub(crate) fn energy_f64(&self, spins: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = self.offset;
        for (i, &si) in spins.iter().enumerate() {
            let row = &self.j[i * n..(i + 1) * n];
            let f = crate::kernels::dot(row, spins);
            acc += si * (self.h[i] - 0.5 * f);
        }
        acc
    }

    /// Root-mean-square of the off-diagonal couplings.
    pub fn coupling_rms(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let mut sum = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    let v = self.j[i * self.n + j];
                    sum += v * v;
                }
            }
        }
        (sum / (self.n * (self.n - 1)) as f64).sqrt()
    }

    /// Parse a model from the plain-text instance format.
    ///
    /// First non-comment line is N; each following line is either
    /// `i j value` (sets the symmetric coupling pair `J_ij = J_ji`) or
    /// `i value` (sets the field `h_i`). Indices are 0-based, `#` starts a
    /// comment.
    pub fn from_text(input: &str) -> Result<Self> {
        let mut model: Option<IsingModel> = None;
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: &str| Error::Parse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match &mut model {
                None => {
                    if fields.len() != 1 {
                        return Err(parse_err("expected the spin count on the first line"));
                    }
                    let n: usize = fields[0]
                        .parse()
                        .map_err(|_| parse_err("invalid spin count"))?;
                    if n == 0 {
                        return Err(parse_err("spin count must be positive"));
                    }
                    model = Some(IsingModel::zeros(n));
                }
                Some(m) => match fields.len() {
                    2 => {
                        let i: usize =
                            fields[0].parse().map_err(|_| parse_err("invalid index"))?;
                        let v: f64 =
                            fields[1].parse().map_err(|_| parse_err("invalid value"))?;
                        if i >= m.n {
                            return Err(parse_err("field index out of range"));
                        }
                        m.h[i] = v;
                    }
                    3 => {
                        let i: usize =
                            fields[0].parse().map_err(|_| parse_err("invalid index"))?;
                        let j: usize =
                            fields[1].parse().map_err(|_| parse_err("invalid index"))?;
                        let v: f64 =
                            fields[2].parse().map_err(|_| parse_err("invalid value"))?;
                        if i >= m.n || j >= m.n {
                            return Err(parse_err("coupling index out of range"));
                        }
                        if i == j {
                            return Err(parse_err("diagonal couplings are not allowed"));
                        }
                        m.j[i * m.n + j] = v;
                        m.j[j * m.n + i] = v;
                    }
                    _ => return Err(parse_err("expected `i j J_ij` or `i h_i`")),
                },
            }
        }
        model.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "empty instance".to_string(),
        })
    }

    /// Read an instance file in the [`IsingModel::from_text`] format.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut buf = String::new();
        BufReader::new(reader)
            .read_to_string(&mut buf)
            .map_err(|source| Error::Io {
                path: "<reader>".into(),
                source,
            })?;
        Self::from_text(&buf)
    }

    /// Load an instance file from disk.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_text(&content)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_spin_ferromagnet() -> IsingModel {
        let mut m = IsingModel::zeros(2);
        m.set_coupling(0, 1, 1.0).unwrap();
        m
    }

    #[test]
    fn zero_model_has_zero_energy() {
        let m = IsingModel::zeros(4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            let s = SpinVector::random(4, &mut rng);
            assert_eq!(m.energy(&s).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_field_energy() {
        let m = IsingModel::from_parts(1, vec![0.0], vec![1.0], 0.0).unwrap();
        assert_eq!(m.energy(&SpinVector::new(vec![1]).unwrap()).unwrap(), 1.0);
        assert_eq!(m.energy(&SpinVector::new(vec![-1]).unwrap()).unwrap(), -1.0);
    }

    #[test]
    fn ferromagnet_pair_energy() {
        let m = two_spin_ferromagnet();
        let s = SpinVector::new(vec![1, 1]).unwrap();
        assert_eq!(m.energy(&s).unwrap(), -1.0);
        let s = SpinVector::new(vec![1, -1]).unwrap();
        assert_eq!(m.energy(&s).unwrap(), 1.0);
    }

    #[test]
    fn energy_checks_dimension() {
        let m = IsingModel::zeros(3);
        let s = SpinVector::ones(2);
        assert!(matches!(
            m.energy(&s),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn construction_symmetrizes_and_zeroes_diagonal() {
        // Asymmetric input: energy must match its symmetrized form.
        let j = vec![
            5.0, 2.0, 0.0, //
            4.0, -3.0, 1.0, //
            0.0, 0.0, 7.0,
        ];
        let m = IsingModel::from_parts(3, j, vec![0.0; 3], 0.0).unwrap();
        assert_eq!(m.coupling(0, 0), 0.0);
        assert_eq!(m.coupling(2, 2), 0.0);
        assert_eq!(m.coupling(0, 1), 3.0);
        assert_eq!(m.coupling(1, 0), 3.0);
        assert_eq!(m.coupling(1, 2), 0.5);

        let pre = vec![
            0.0, 3.0, 0.0, //
            3.0, 0.0, 0.5, //
            0.0, 0.5, 0.0,
        ];
        let m2 = IsingModel::from_parts(3, pre, vec![0.0; 3], 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let s = SpinVector::random(3, &mut rng);
            assert_eq!(m.energy(&s).unwrap(), m2.energy(&s).unwrap());
        }
    }

    #[test]
    fn spin_vector_rejects_invalid_entries() {
        assert!(SpinVector::new(vec![1, 0, -1]).is_err());
        assert!(SpinVector::new(vec![1, 2]).is_err());
        assert!(SpinVector::new(vec![1, -1]).is_ok());
    }

    #[test]
    fn sign_readout_maps_zero_to_plus_one() {
        let s = SpinVector::from_signs(&[-0.5, 0.0, 3.0]);
        assert_eq!(s.as_slice(), &[-1, 1, 1]);
    }

    #[test]
    fn add_scaled_accumulates_all_parts() {
        let mut acc = IsingModel::zeros(2);
        let mut other = two_spin_ferromagnet();
        other.set_field(0, 2.0);
        other.set_offset(5.0);
        acc.add_scaled(&other, 3.0).unwrap();
        assert_eq!(acc.coupling(0, 1), 3.0);
        assert_eq!(acc.field()[0], 6.0);
        assert_eq!(acc.offset(), 15.0);
        assert!(acc.add_scaled(&IsingModel::zeros(3), 1.0).is_err());
    }

    #[test]
    fn parses_instance_text() {
        let text = "# tiny instance\n3\n0 1 1.5\n2 -0.5   # field on spin 2\n1 2 -2.0\n";
        let m = IsingModel::from_text(text).unwrap();
        assert_eq!(m.n_spins(), 3);
        assert_eq!(m.coupling(0, 1), 1.5);
        assert_eq!(m.coupling(1, 0), 1.5);
        assert_eq!(m.coupling(2, 1), -2.0);
        assert_eq!(m.field()[2], -0.5);

        // A single `i j v` line stands for the symmetric pair.
        let ferro = IsingModel::from_text("2\n0 1 1.0\n").unwrap();
        let s = SpinVector::new(vec![1, 1]).unwrap();
        assert_eq!(ferro.energy(&s).unwrap(), -1.0);
    }

    #[test]
    fn instance_parse_errors_carry_line_numbers() {
        let err = IsingModel::from_text("3\n0 3 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(IsingModel::from_text("").is_err());
        assert!(IsingModel::from_text("2\n0 0 1.0\n").is_err());
    }

    #[test]
    fn coupling_rms_matches_hand_value() {
        let m = two_spin_ferromagnet();
        // Two off-diagonal entries, both 1.
        assert!((m.coupling_rms() - 1.0).abs() < 1e-12);
        assert_eq!(IsingModel::zeros(3).coupling_rms(), 0.0);
    }
}
