//! Register state representation.
//!
//! Qubit `i` carries weight `2^i` in the basis index, so the register value
//! `a = a_0 + 2 a_1 + 4 a_2 + ...` lives at amplitude index `a`. Kets written
//! as bit strings (`|011>`) list the most significant qubit first.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Index of a computational basis state; bit `i` is the value of qubit `i`.
pub type BasisIndex = usize;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Default comparison tolerance for amplitudes and probabilities.
pub const TOLERANCE: f64 = 1e-10;

/// Pure state of an `n`-qubit register: `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Amplitude>,
}

pub(crate) fn check_capacity(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return domain("a register needs at least one qubit");
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::Capacity {
            requested: num_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// The all-zeros state `|0...0>`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis_state(num_qubits, 0)
    }

    /// Computational basis state `|a>` on `num_qubits` qubits.
    pub fn basis_state(num_qubits: usize, a: BasisIndex) -> Result<Self> {
        check_capacity(num_qubits)?;
        let dim = 1usize << num_qubits;
        if a >= dim {
            return domain(format!("basis index {a} out of range for {num_qubits} qubits"));
        }
        let mut amplitudes = vec![Amplitude::new(0.0, 0.0); dim];
        amplitudes[a] = Amplitude::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps an amplitude vector. The length must be a power of two and the
    /// vector must be normalized within [`TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Amplitude>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return domain(format!("amplitude count {len} is not a power of two >= 2"));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_capacity(num_qubits)?;
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return domain("non-finite amplitude");
        }
        let sv = Self {
            num_qubits,
            amplitudes,
        };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > TOLERANCE {
            return domain(format!("state is not normalized (norm^2 = {norm})"));
        }
        Ok(sv)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales the
    /// input to unit norm first.
    pub fn normalized(mut amplitudes: Vec<Amplitude>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return domain("cannot normalize a zero or non-finite vector");
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::from_amplitudes(amplitudes)
    }

    /// `cos(theta)|0> + e^{i phi} sin(theta)|1>`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        Self {
            num_qubits: 1,
            amplitudes: vec![
                Amplitude::new(theta.cos(), 0.0),
                Amplitude::from_polar(theta.sin(), phi),
            ],
        }
    }

    /// Uniform superposition over all `2^n` basis states.
    pub fn uniform(num_qubits: usize) -> Result<Self> {
        check_capacity(num_qubits)?;
        let dim = 1usize << num_qubits;
        let amp = Amplitude::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self {
            num_qubits,
            amplitudes: vec![amp; dim],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amplitudes
    }

    pub(crate) fn replace_amplitudes(&mut self, amplitudes: Vec<Amplitude>) {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        self.amplitudes = amplitudes;
    }

    pub fn amplitude(&self, index: BasisIndex) -> Amplitude {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Tensor product `self ⊗ other`. `self` occupies the high-order qubits:
    /// the amplitude at `i * 2^{n_other} + j` is `self[i] * other[j]`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let num_qubits = self.num_qubits + other.num_qubits;
        check_capacity(num_qubits)?;
        let mut amplitudes = Vec::with_capacity(1usize << num_qubits);
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        Ok(StateVector {
            num_qubits,
            amplitudes,
        })
    }

    /// `<self|other> = sum conj(self_i) other_i`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Amplitude> {
        if self.num_qubits != other.num_qubits {
            return domain(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Measurement distribution over basis indices.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Marginal distribution of the listed qubits. Entry `v` of the result is
    /// the probability that qubit `qubits[i]` reads bit `i` of `v` for all `i`.
    pub fn partial_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return domain(format!("qubit {q} out of range for {} qubits", self.num_qubits));
            }
            if qubits[..i].contains(&q) {
                return domain(format!("qubit {q} listed twice"));
            }
        }
        let mut out = vec![0.0; 1usize << qubits.len()];
        for (index, amp) in self.amplitudes.iter().enumerate() {
            out[gather_bits(index, qubits)] += amp.norm_sqr();
        }
        Ok(out)
    }

    /// Samples a basis index from [`probabilities`](Self::probabilities) using
    /// a ChaCha8 stream seeded with `seed`. The state is not collapsed.
    pub fn measure(&self, seed: u64) -> BasisIndex {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.measure_with(&mut rng)
    }

    pub fn measure_with<R: Rng + ?Sized>(&self, rng: &mut R) -> BasisIndex {
        sample_index(&self.probabilities(), rng)
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scale(&mut self, factor: Amplitude) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    /// Largest elementwise deviation between two states of equal size.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "state sizes differ");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Draws an index from a (not necessarily exactly normalized) distribution.
pub fn sample_index<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let total: f64 = probabilities.iter().sum();
    let mut target = rng.gen::<f64>() * total;
    let mut last_nonzero = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i;
            if target < p {
                return i;
            }
            target -= p;
        }
    }
    last_nonzero
}

/// Collects bit `qubits[i]` of `index` into bit `i` of the result.
pub(crate) fn gather_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | (((index >> q) & 1) << i))
}

/// Writes bit `i` of `value` into bit `qubits[i]` of `index`.
pub(crate) fn scatter_bits(index: usize, qubits: &[usize], value: usize) -> usize {
    qubits.iter().enumerate().fold(index, |acc, (i, &q)| {
        (acc & !(1 << q)) | (((value >> i) & 1) << q)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn plus() -> StateVector {
        StateVector::from_amplitudes(vec![
            Amplitude::new(FRAC_1_SQRT_2, 0.0),
            Amplitude::new(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap()
    }

    fn real_parts(sv: &StateVector) -> Vec<f64> {
        sv.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn basis_states() {
        let s = StateVector::basis_state(3, 3).unwrap();
        assert_eq!(real_parts(&s), vec![0., 0., 0., 1., 0., 0., 0., 0.]);
        assert_eq!(real_parts(&StateVector::basis_state(1, 0).unwrap()), vec![1., 0.]);
        assert_eq!(StateVector::basis_state(3, 7).unwrap().amplitude(7).re, 1.0);
        assert!(StateVector::basis_state(3, 8).is_err());
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            StateVector::zero(MAX_QUBITS + 1),
            Err(Error::Capacity { requested: 25, max: 24 })
        ));
        assert!(StateVector::zero(0).is_err());
    }

    #[test]
    fn tensor_examples() {
        let three = plus().tensor(&plus()).unwrap().tensor(&plus()).unwrap();
        let expected = 2f64.powf(-1.5);
        assert!(three.amplitudes().iter().all(|a| (a.re - expected).abs() < 1e-15));

        let one = StateVector::basis_state(1, 1).unwrap();
        let eleven = one.tensor(&one).unwrap();
        assert_eq!(eleven.amplitude(3).re, 1.0);

        let s = plus().tensor(&eleven).unwrap();
        for i in 0..8 {
            let want = if i == 3 || i == 7 { FRAC_1_SQRT_2 } else { 0.0 };
            assert!((s.amplitude(i).re - want).abs() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn inner_products() {
        let zero = StateVector::basis_state(1, 0).unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert_eq!(zero.inner_product(&one).unwrap(), Amplitude::new(0.0, 0.0));
        let ip = plus().inner_product(&zero).unwrap();
        assert!((ip.re - FRAC_1_SQRT_2).abs() < 1e-15 && ip.im == 0.0);
        let psi = StateVector::qubit(0.3, 1.1);
        assert!((psi.inner_product(&psi).unwrap().re - 1.0).abs() < 1e-12);
        assert!(zero.inner_product(&StateVector::zero(2).unwrap()).is_err());
    }

    #[test]
    fn probability_examples() {
        let u = StateVector::uniform(3).unwrap();
        assert!(u.probabilities().iter().all(|p| (p - 0.125).abs() < 1e-15));
        let five = StateVector::basis_state(3, 5).unwrap().probabilities();
        assert_eq!(five[5], 1.0);
        assert_eq!(five.iter().sum::<f64>(), 1.0);
        let q = StateVector::qubit(PI / 6.0, 0.7).probabilities();
        assert!((q[0] - 0.75).abs() < 1e-12 && (q[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn measurement_is_deterministic_per_seed() {
        let three = StateVector::basis_state(2, 3).unwrap();
        for seed in 0..20 {
            assert_eq!(three.measure(seed), 3);
        }
        let psi = StateVector::uniform(4).unwrap();
        assert_eq!(psi.measure(42), psi.measure(42));
    }

    #[test]
    fn measurement_frequencies_are_binomial() {
        let s = plus();
        let ones: usize = (0..10_000u64).map(|seed| s.measure(seed)).sum();
        // 3 sigma for n = 10000, p = 1/2 is 150.
        assert!((ones as f64 - 5000.0).abs() < 150.0, "ones = {ones}");
    }

    #[test]
    fn marginals() {
        let bell = StateVector::from_amplitudes(vec![
            Amplitude::new(FRAC_1_SQRT_2, 0.0),
            Amplitude::new(0.0, 0.0),
            Amplitude::new(0.0, 0.0),
            Amplitude::new(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap();
        let m = bell.partial_probabilities(&[1]).unwrap();
        assert!((m[0] - 0.5).abs() < 1e-15 && (m[1] - 0.5).abs() < 1e-15);

        let b = StateVector::basis_state(3, 0b101).unwrap();
        assert_eq!(b.partial_probabilities(&[1]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(b.partial_probabilities(&[2]).unwrap(), vec![0.0, 1.0]);

        let psi = StateVector::normalized(
            (0..8).map(|i| Amplitude::new(i as f64, 1.0)).collect(),
        )
        .unwrap();
        assert_eq!(psi.partial_probabilities(&[0, 1, 2]).unwrap(), psi.probabilities());
        assert!(psi.partial_probabilities(&[3]).is_err());
        assert!(psi.partial_probabilities(&[1, 1]).is_err());
    }

    #[test]
    fn bit_helpers_round_trip() {
        let qubits = [4, 0, 2];
        for index in 0..32 {
            let v = gather_bits(index, &qubits);
            assert_eq!(scatter_bits(index, &qubits, v), index);
        }
        assert_eq!(scatter_bits(0, &qubits, 0b111), 0b10101);
    }
}
