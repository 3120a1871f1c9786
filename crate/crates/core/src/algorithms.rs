//! Query algorithms (Deutsch, Deutsch-Jozsa, Grover) and phase estimation.
//!
//! Phases are carried in turns (`phi / 2 pi`) so that dyadic phases stay exact.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuits::{inverse_qft, Circuit, Oracle};
use crate::error::{domain, Error, Result};
use crate::gates::{apply_1q, apply_controlled, apply_permutation, Gate1, Permutation};
use crate::qstate::{check_capacity, sample_index, Amplitude, BasisIndex, StateVector};

/// Outcome class of a promise problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromiseClass {
    Constant,
    Balanced,
}

impl std::fmt::Display for PromiseClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PromiseClass::Constant => "constant",
            PromiseClass::Balanced => "balanced",
        })
    }
}

/// Final state of the Deutsch-Jozsa network: `H^n` on `|0...0>`, the
/// second register in `|0> - |1>`, one oracle query, `H^n` again.
/// The answer register is qubit `n`.
pub fn deutsch_jozsa_state(f: &Oracle) -> Result<StateVector> {
    if f.m_out() != 1 {
        return domain(format!("Deutsch-Jozsa needs a 1-bit oracle, got {} bits", f.m_out()));
    }
    let n = f.n_in();
    check_capacity(n + 1)?;
    let mut sv = StateVector::basis_state(n + 1, 1 << n)?;
    for q in 0..=n {
        apply_1q(&mut sv, &Gate1::H, q)?;
    }
    f.apply(&mut sv)?;
    for q in 0..n {
        apply_1q(&mut sv, &Gate1::H, q)?;
    }
    Ok(sv)
}

/// Probability of reading `0...0` on the input register after the
/// Deutsch-Jozsa network. It equals `(sum_x (-1)^{f(x)} / 2^n)^2`.
pub fn deutsch_jozsa_zero_probability(f: &Oracle) -> Result<f64> {
    let sv = deutsch_jozsa_state(f)?;
    let qubits: Vec<usize> = (0..f.n_in()).collect();
    Ok(sv.partial_probabilities(&qubits)?[0])
}

/// Classifies a constant-or-balanced function with a single query. Functions
/// that break the promise get an arbitrary answer.
pub fn deutsch_jozsa(f: &Oracle) -> Result<PromiseClass> {
    let p0 = deutsch_jozsa_zero_probability(f)?;
    Ok(if p0 > 0.5 {
        PromiseClass::Constant
    } else {
        PromiseClass::Balanced
    })
}

/// The one-bit case.
pub fn deutsch(f: &Oracle) -> Result<PromiseClass> {
    if f.n_in() != 1 || f.m_out() != 1 {
        return domain("Deutsch's problem takes a function {0,1} -> {0,1}");
    }
    deutsch_jozsa(f)
}

/// Rotation half-angle of the Grover iterate: `sin(phi) = 2^{-n/2}`.
pub fn grover_angle(n: usize) -> f64 {
    (2f64.powf(-(n as f64) / 2.0)).asin()
}

/// `m = pi / (4 phi) - 1/4`, rounded to nearest with ties going up.
pub fn grover_iterations(n: usize) -> usize {
    let x = PI / (4.0 * grover_angle(n)) - 0.25;
    (x + 0.5).floor().max(0.0) as usize
}

/// Success probability after `m` iterates from `|S>`: `sin^2((2m+1) phi)`.
pub fn grover_predicted_success(n: usize, m: usize) -> f64 {
    ((2 * m + 1) as f64 * grover_angle(n)).sin().powi(2)
}

fn reflect_about_uniform(sv: &mut StateVector, qubits: usize) -> Result<()> {
    for q in 0..qubits {
        apply_1q(sv, &Gate1::H, q)?;
    }
    let amps_zero = sv.amplitude(0);
    sv.amplitudes_mut()[0] = -amps_zero;
    for q in 0..qubits {
        apply_1q(sv, &Gate1::H, q)?;
    }
    Ok(())
}

/// One Grover iterate `G = R_S R_k` on the whole register. `R_k` flips the
/// sign of `|k>`; `R_S = H R_0 H` reflects about the hyperplane orthogonal
/// to the uniform superposition. The second oracle register stays in
/// `|0> - |1>` and is left implicit.
pub fn grover_iterate(sv: &mut StateVector, k: BasisIndex) -> Result<()> {
    if k >= sv.dim() {
        return domain(format!("marked index {k} out of range"));
    }
    let a = sv.amplitude(k);
    sv.amplitudes_mut()[k] = -a;
    reflect_about_uniform(sv, sv.num_qubits())
}

/// Grover iterate with the oracle register made explicit: qubits `0..n` hold
/// the search register, qubit `n` must hold `(|0> - |1>)/sqrt 2`. Both
/// reflections are realised as 1-bit oracle queries (`f_k` and `f_0`).
pub fn grover_iterate_explicit(sv: &mut StateVector, k: BasisIndex) -> Result<()> {
    let n = sv.num_qubits() - 1;
    if n == 0 || k >= 1 << n {
        return domain("explicit Grover iterate needs n >= 1 search qubits and k < 2^n");
    }
    let f_k = Oracle::from_fn(n, 1, |x| (x == k as u64) as u64)?;
    let f_0 = Oracle::from_fn(n, 1, |x| (x == 0) as u64)?;
    f_k.apply(sv)?;
    for q in 0..n {
        apply_1q(sv, &Gate1::H, q)?;
    }
    f_0.apply(sv)?;
    for q in 0..n {
        apply_1q(sv, &Gate1::H, q)?;
    }
    Ok(())
}

/// Result of a Grover run.
#[derive(Debug, Clone, PartialEq)]
pub struct GroverRun {
    pub outcome: BasisIndex,
    pub iterations: usize,
    /// Exact probability of measuring the marked item.
    pub success_probability: f64,
    pub predicted_success: f64,
}

/// Output distribution after the optimal number of iterates from `|S>`.
pub fn grover_distribution(n: usize, k: BasisIndex, explicit_ancilla: bool) -> Result<Vec<f64>> {
    check_capacity(n + explicit_ancilla as usize)?;
    if k >= 1 << n {
        return domain(format!("marked index {k} out of range for {n} qubits"));
    }
    let m = grover_iterations(n);
    if explicit_ancilla {
        let mut sv = StateVector::basis_state(n + 1, 1 << n)?;
        for q in 0..=n {
            apply_1q(&mut sv, &Gate1::H, q)?;
        }
        for _ in 0..m {
            grover_iterate_explicit(&mut sv, k)?;
        }
        let qubits: Vec<usize> = (0..n).collect();
        sv.partial_probabilities(&qubits)
    } else {
        let mut sv = StateVector::uniform(n)?;
        for _ in 0..m {
            grover_iterate(&mut sv, k)?;
        }
        Ok(sv.probabilities())
    }
}

pub fn grover_search(n: usize, k: BasisIndex, seed: u64) -> Result<GroverRun> {
    let dist = grover_distribution(n, k, false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = grover_iterations(n);
    Ok(GroverRun {
        outcome: sample_index(&dist, &mut rng),
        iterations: m,
        success_probability: dist[k],
        predicted_success: grover_predicted_success(n, m),
    })
}

/// `n`-bit phase estimate `bits / 2^n` of a phase in turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseEstimate {
    pub bits: u64,
    pub n: usize,
}

impl PhaseEstimate {
    pub fn turns(&self) -> f64 {
        self.bits as f64 / (1u64 << self.n) as f64
    }

    pub fn radians(&self) -> f64 {
        self.turns() * TAU
    }
}

/// Source of controlled `U^{2^j}` operations for phase estimation.
pub trait ControlledPowers {
    /// Width of the register `U` acts on.
    fn target_qubits(&self) -> usize;

    /// Applies `U^{2^j}` to qubits `target_offset..target_offset + m` where
    /// `control` is `|1>`.
    fn apply_controlled_power(
        &self,
        sv: &mut StateVector,
        control: usize,
        target_offset: usize,
        j: usize,
    ) -> Result<()>;
}

/// Powers of a single-qubit gate, by repeated matrix squaring.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPowers(pub Gate1);

impl MatrixPowers {
    /// The phase gate `diag(1, e^{2 pi i turns})`.
    pub fn phase_turns(turns: f64) -> Self {
        MatrixPowers(Gate1::Phase(TAU * turns))
    }
}

impl ControlledPowers for MatrixPowers {
    fn target_qubits(&self) -> usize {
        1
    }

    fn apply_controlled_power(
        &self,
        sv: &mut StateVector,
        control: usize,
        target_offset: usize,
        j: usize,
    ) -> Result<()> {
        apply_controlled(sv, &self.0.pow2(j), control, target_offset)
    }
}

/// Powers of a basis permutation, by repeated squaring of the map.
#[derive(Debug, Clone)]
pub struct PermutationPowers {
    powers: Vec<Permutation>,
}

impl PermutationPowers {
    /// Precomputes `U^{2^j}` for `j < count`.
    pub fn new(base: Permutation, count: usize) -> Self {
        let mut powers = Vec::with_capacity(count.max(1));
        powers.push(base);
        while powers.len() < count {
            let last = powers.last().expect("non-empty");
            powers.push(last.then(last));
        }
        Self { powers }
    }

    pub fn power(&self, j: usize) -> Option<&Permutation> {
        self.powers.get(j)
    }
}

impl ControlledPowers for PermutationPowers {
    fn target_qubits(&self) -> usize {
        self.powers[0].width()
    }

    fn apply_controlled_power(
        &self,
        sv: &mut StateVector,
        control: usize,
        target_offset: usize,
        j: usize,
    ) -> Result<()> {
        let fallback;
        let p = match self.powers.get(j) {
            Some(p) => p,
            None => {
                fallback = self.powers[0].pow2(j);
                &fallback
            }
        };
        let targets: Vec<usize> = (target_offset..target_offset + p.width()).collect();
        apply_permutation(sv, p, &targets, Some(control))
    }
}

/// Runs the phase-estimation network without measuring: counting register on
/// qubits `0..n` (Hadamards, controlled `U^{2^j}` from qubit `j`, inverse
/// QFT), second register `u` on qubits `n..n + m`. `u` need not be an
/// eigenstate.
pub fn phase_estimation_register<P: ControlledPowers + ?Sized>(
    powers: &P,
    u: &StateVector,
    n: usize,
) -> Result<StateVector> {
    let m = powers.target_qubits();
    if u.num_qubits() != m {
        return domain(format!("U acts on {m} qubits but the state has {}", u.num_qubits()));
    }
    if n == 0 {
        return domain("phase estimation needs at least one counting qubit");
    }
    check_capacity(n + m)?;
    let mut sv = u.tensor(&StateVector::zero(n)?)?;
    for q in 0..n {
        apply_1q(&mut sv, &Gate1::H, q)?;
    }
    for j in 0..n {
        powers.apply_controlled_power(&mut sv, j, n, j)?;
    }
    let mut iqft = Circuit::new(n + m);
    iqft.append(&inverse_qft(n), 0)?;
    iqft.run_in_place(&mut sv)?;
    Ok(sv)
}

/// Exact distribution of the counting register.
pub fn phase_estimation_distribution<P: ControlledPowers + ?Sized>(
    powers: &P,
    u: &StateVector,
    n: usize,
) -> Result<Vec<f64>> {
    let sv = phase_estimation_register(powers, u, n)?;
    let qubits: Vec<usize> = (0..n).collect();
    sv.partial_probabilities(&qubits)
}

/// Tolerance on `||U u - lambda u||` for the eigenstate precondition.
pub const EIGENSTATE_TOLERANCE: f64 = 1e-8;

/// Returns `(lambda, residual)` where `lambda = <u|U|u>` and the residual is
/// `||U u - lambda u||`.
pub fn eigen_residual<P: ControlledPowers + ?Sized>(powers: &P, u: &StateVector) -> Result<(Amplitude, f64)> {
    // Control qubit 0 set to |1>, target block above it.
    let mut sv = u.tensor(&StateVector::basis_state(1, 1)?)?;
    powers.apply_controlled_power(&mut sv, 0, 1, 0)?;
    let applied: Vec<Amplitude> = sv.amplitudes().iter().skip(1).step_by(2).copied().collect();
    let lambda: Amplitude = u
        .amplitudes()
        .iter()
        .zip(&applied)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let residual = applied
        .iter()
        .zip(u.amplitudes())
        .map(|(b, a)| (b - lambda * a).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((lambda, residual))
}

/// Estimates the eigenphase of `u` to `n` bits and samples one outcome.
pub fn phase_estimate<P: ControlledPowers + ?Sized>(
    powers: &P,
    u: &StateVector,
    n: usize,
    seed: u64,
) -> Result<PhaseEstimate> {
    let (_, residual) = eigen_residual(powers, u)?;
    if residual > EIGENSTATE_TOLERANCE {
        return Err(Error::NotEigenstate {
            residual,
            tolerance: EIGENSTATE_TOLERANCE,
        });
    }
    let dist = phase_estimation_distribution(powers, u, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(PhaseEstimate {
        bits: sample_index(&dist, &mut rng) as u64,
        n,
    })
}

/// Best `n`-bit estimates of a phase in turns: the nearest multiple of
/// `2^{-n}` (mod 1), or both neighbours when the phase sits exactly halfway.
pub fn best_estimates(turns: f64, n: usize) -> Vec<u64> {
    let size = 1u64 << n;
    let scaled = turns.rem_euclid(1.0) * size as f64;
    let lower = scaled.floor();
    let frac = scaled - lower;
    let lo = (lower as u64) % size;
    let hi = (lo + 1) % size;
    if (frac - 0.5).abs() < 1e-12 {
        vec![lo, hi]
    } else if frac < 0.5 {
        vec![lo]
    } else {
        vec![hi]
    }
}
