//! Order finding by phase estimation on modular multiplication, and the
//! factoring loop built on it.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{phase_estimation_distribution, PermutationPowers};
use crate::error::{domain, Error, Result};
use crate::gates::Permutation;
use crate::numtheory::{self, gcd, mod_pow, Convergent, Natural};
use crate::qstate::{check_capacity, sample_index, Amplitude, StateVector, MAX_QUBITS};

/// Number of qubits needed to hold values below `n`.
pub fn register_width(n: Natural) -> usize {
    (64 - n.leading_zeros()) as usize
}

/// `|y> -> |a y mod N>` for `y < N`; states `N <= y < 2^m` are left alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMulOperator {
    a: Natural,
    modulus: Natural,
    m: usize,
}

pub fn mod_mul_operator(a: Natural, modulus: Natural, m: usize) -> Result<ModMulOperator> {
    if modulus < 2 {
        return domain(format!("modulus {modulus} must be at least 2"));
    }
    if m >= 64 || modulus >> m != 0 {
        return domain(format!("modulus {modulus} does not fit in {m} qubits"));
    }
    check_capacity(m)?;
    if gcd(a, modulus) != 1 {
        return domain(format!("{a} is not coprime to {modulus}"));
    }
    Ok(ModMulOperator {
        a: a % modulus,
        modulus,
        m,
    })
}

impl ModMulOperator {
    pub fn a(&self) -> Natural {
        self.a
    }

    pub fn modulus(&self) -> Natural {
        self.modulus
    }

    pub fn width(&self) -> usize {
        self.m
    }

    pub fn apply(&self, y: Natural) -> Natural {
        if y < self.modulus {
            numtheory::mod_mul(self.a, y, self.modulus)
        } else {
            y
        }
    }

    pub fn permutation(&self) -> Permutation {
        let map = (0..1u64 << self.m).map(|y| self.apply(y) as usize).collect();
        Permutation::new(self.m, map).expect("multiplication by a unit is a bijection")
    }
}

/// `|u_k> = r^{-1/2} sum_j e^{-2 pi i k j / r} |a^j mod N>`, an eigenvector
/// of multiplication by `a` with eigenvalue `e^{2 pi i k / r}`.
pub fn eigenvector_u_k(a: Natural, modulus: Natural, k: Natural) -> Result<StateVector> {
    let r = numtheory::order_classical(a, modulus)?;
    if k == 0 || k > r {
        return domain(format!("k = {k} outside 1..={r}"));
    }
    let m = register_width(modulus);
    check_capacity(m)?;
    let mut amps = vec![Amplitude::new(0.0, 0.0); 1 << m];
    let norm = (r as f64).sqrt().recip();
    let mut power = 1 % modulus;
    for j in 0..r {
        let angle = -std::f64::consts::TAU * ((k * j) % r) as f64 / r as f64;
        amps[power as usize] = Amplitude::from_polar(norm, angle);
        power = numtheory::mod_mul(power, a, modulus);
    }
    StateVector::from_amplitudes(amps)
}

/// Outcome of one quantum order-finding run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderResult {
    /// Candidate order: the denominator of the selected convergent, or 0 when
    /// no convergent qualified.
    pub r: Natural,
    pub k_over_r: Option<Convergent>,
    pub raw_measurement: u64,
    /// Number of counting qubits.
    pub precision: usize,
    /// `a^r = 1 (mod N)` holds for the candidate.
    pub succeeded: bool,
}

/// Counting-register width used by default: `2m + 1`.
pub fn default_precision(modulus: Natural) -> usize {
    2 * register_width(modulus) + 1
}

/// Exact distribution of the counting register when phase estimation runs on
/// `|1>` instead of an eigenvector.
pub fn order_finding_distribution(a: Natural, modulus: Natural, precision: usize) -> Result<Vec<f64>> {
    let m = register_width(modulus);
    if precision + m > MAX_QUBITS {
        return Err(Error::Capacity {
            requested: precision + m,
            max: MAX_QUBITS,
        });
    }
    let op = mod_mul_operator(a, modulus, m)?;
    let powers = PermutationPowers::new(op.permutation(), precision);
    let one = StateVector::basis_state(m, 1)?;
    phase_estimation_distribution(&powers, &one, precision)
}

/// The convergent `p/q` of `x / 2^n` with `q < 2^m` and
/// `|x/2^n - p/q| < 1/2^n`. At most one exists once `n > 2m`.
pub fn select_convergent(x: u64, n: usize, m: usize) -> Option<Convergent> {
    let denom = 1u64 << n;
    numtheory::convergents(x, denom)
        .ok()?
        .into_iter()
        // |x q - p 2^n| < q  <=>  |x/2^n - p/q| < 1/2^n
        .rfind(|c| {
            let lhs = (x as i128 * c.q as i128 - c.p as i128 * denom as i128).abs();
            c.q < (1u64 << m) && lhs < c.q as i128
        })
}

/// Turns a measured `x` into an order candidate and verifies it.
pub fn post_process(a: Natural, modulus: Natural, x: u64, precision: usize) -> OrderResult {
    let m = register_width(modulus);
    let selected = select_convergent(x, precision, m);
    let (r, succeeded) = match selected {
        // p = 0 is the k = 0 branch; it carries no information about r.
        Some(c) if c.p != 0 => (
            c.q,
            mod_pow(a, c.q, modulus).map(|v| v == 1).unwrap_or(false),
        ),
        Some(c) => (c.q, false),
        None => (0, false),
    };
    OrderResult {
        r,
        k_over_r: selected,
        raw_measurement: x,
        precision,
        succeeded,
    }
}

pub fn quantum_order_find_with<R: Rng + ?Sized>(
    a: Natural,
    modulus: Natural,
    precision: usize,
    rng: &mut R,
) -> Result<OrderResult> {
    let dist = order_finding_distribution(a, modulus, precision)?;
    let x = sample_index(&dist, rng) as u64;
    Ok(post_process(a, modulus, x, precision))
}

/// Order of `a` modulo `N` from one simulated phase-estimation run with
/// `2m + 1` counting qubits.
pub fn quantum_order_find(a: Natural, modulus: Natural, seed: u64) -> Result<OrderResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    quantum_order_find_with(a, modulus, default_precision(modulus), &mut rng)
}

/// What happened in one factoring attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Attempt {
    /// `gcd(a, N)` was already a nontrivial factor.
    SharedFactor { a: Natural, factor: Natural },
    /// Order found and `gcd(a^{r/2} +- 1, N)` split `N`.
    Split { a: Natural, r: Natural, factor: Natural },
    /// Order finding did not verify (k = 0 or gcd(k, r) > 1).
    OrderNotFound { a: Natural, measurement: u64 },
    OddOrder { a: Natural, r: Natural },
    /// `a^{r/2} = -1 (mod N)`.
    TrivialRoot { a: Natural, r: Natural },
}

impl Attempt {
    pub fn factor(&self) -> Option<Natural> {
        match self {
            Attempt::SharedFactor { factor, .. } | Attempt::Split { factor, .. } => Some(*factor),
            _ => None,
        }
    }
}

impl fmt::Display for Attempt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Attempt::SharedFactor { a, factor } => write!(f, "a={a}: gcd(a, N) = {factor}"),
            Attempt::Split { a, r, factor } => write!(f, "a={a}: r={r}, factor {factor}"),
            Attempt::OrderNotFound { a, measurement } => {
                write!(f, "a={a}: measurement {measurement} gave no verified order")
            }
            Attempt::OddOrder { a, r } => write!(f, "a={a}: r={r} is odd"),
            Attempt::TrivialRoot { a, r } => write!(f, "a={a}: r={r} but a^(r/2) = -1 mod N"),
        }
    }
}

/// One attempt with a fixed base `a`.
pub fn attempt_with_base<R: Rng + ?Sized>(modulus: Natural, a: Natural, rng: &mut R) -> Result<Attempt> {
    let g = gcd(a, modulus);
    if g != 1 {
        return Ok(Attempt::SharedFactor { a, factor: g });
    }
    let found = quantum_order_find_with(a, modulus, default_precision(modulus), rng)?;
    if !found.succeeded {
        return Ok(Attempt::OrderNotFound {
            a,
            measurement: found.raw_measurement,
        });
    }
    let r = found.r;
    if r % 2 == 1 {
        return Ok(Attempt::OddOrder { a, r });
    }
    let half = mod_pow(a, r / 2, modulus)?;
    if half == modulus - 1 {
        return Ok(Attempt::TrivialRoot { a, r });
    }
    // r is minimal, so a^{r/2} != 1 and neither gcd below is trivial.
    let factor = [gcd(half - 1, modulus), gcd(half + 1, modulus)]
        .into_iter()
        .find(|&f| f > 1 && f < modulus)
        .expect("a nontrivial square root of 1 splits N");
    Ok(Attempt::Split { a, r, factor })
}

/// PRNG for attempt `index` of a run seeded with `seed`.
pub fn attempt_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// One attempt with `a` drawn uniformly from `2..N`.
pub fn random_attempt(modulus: Natural, seed: u64, index: usize) -> Result<Attempt> {
    let mut rng = attempt_rng(seed, index);
    let a = rng.gen_range(2..modulus);
    attempt_with_base(modulus, a, &mut rng)
}

/// How a factor was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorReport {
    pub factor: Natural,
    pub attempts: Vec<Attempt>,
    /// Set when the quantum loop was skipped (even `N` or a prime power).
    pub classical: bool,
}

/// Finds a nontrivial factor of `N`.
pub fn shor_factor(modulus: Natural, seed: u64, max_attempts: usize) -> Result<FactorReport> {
    if modulus < 4 {
        return Err(Error::NotComposite(modulus));
    }
    if modulus.is_multiple_of(2) {
        return Ok(FactorReport {
            factor: 2,
            attempts: Vec::new(),
            classical: true,
        });
    }
    match numtheory::prime_power(modulus)? {
        Some((_, 1)) => return Err(Error::NotComposite(modulus)),
        Some((p, _)) => {
            return Ok(FactorReport {
                factor: p,
                attempts: Vec::new(),
                classical: true,
            })
        }
        None => {}
    }
    let m = register_width(modulus);
    let needed = default_precision(modulus) + m;
    if needed > MAX_QUBITS {
        return Err(Error::Capacity {
            requested: needed,
            max: MAX_QUBITS,
        });
    }
    let mut attempts = Vec::new();
    for index in 0..max_attempts {
        let attempt = random_attempt(modulus, seed, index)?;
        let factor = attempt.factor();
        attempts.push(attempt);
        if let Some(factor) = factor {
            return Ok(FactorReport {
                factor,
                attempts,
                classical: false,
            });
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: max_attempts,
        log: attempts.iter().map(ToString::to_string).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_mul_examples() {
        let op = mod_mul_operator(2, 15, 4).unwrap();
        assert_eq!(op.apply(7), 14);
        assert_eq!(op.apply(14), 13);
        assert_eq!(op.apply(15), 15);
        assert!(mod_mul_operator(1, 15, 4).unwrap().permutation().is_identity());
        assert!(mod_mul_operator(3, 15, 4).is_err());
        assert!(mod_mul_operator(2, 17, 4).is_err());
    }

    #[test]
    fn inverse_multiplier_undoes() {
        for n in [15u64, 21, 33] {
            let m = register_width(n);
            for a in 2..n {
                if gcd(a, n) != 1 {
                    continue;
                }
                let inv = numtheory::mod_inverse(a, n).unwrap();
                let p = mod_mul_operator(a, n, m).unwrap().permutation();
                let q = mod_mul_operator(inv, n, m).unwrap().permutation();
                assert!(p.then(&q).is_identity());
            }
        }
    }

    #[test]
    fn eigenvectors_of_mult_by_two() {
        let op = mod_mul_operator(2, 15, 4).unwrap().permutation();
        for k in 1..=4u64 {
            let u = eigenvector_u_k(2, 15, k).unwrap();
            let mut v = u.clone();
            crate::gates::apply_permutation(&mut v, &op, &[0, 1, 2, 3], None).unwrap();
            let lambda = Amplitude::from_polar(1.0, std::f64::consts::TAU * k as f64 / 4.0);
            let mut expected = u.clone();
            expected.scale(lambda);
            assert!(v.max_deviation(&expected) < 1e-12, "k={k}");
        }
        assert!(eigenvector_u_k(2, 15, 0).is_err());
        assert!(eigenvector_u_k(2, 15, 5).is_err());
    }

    #[test]
    fn sum_of_eigenvectors_is_one() {
        let r = 4u64;
        let mut acc = vec![Amplitude::new(0.0, 0.0); 16];
        for k in 1..=r {
            for (s, a) in acc.iter_mut().zip(eigenvector_u_k(2, 15, k).unwrap().amplitudes()) {
                *s += a / (r as f64).sqrt();
            }
        }
        let one = StateVector::basis_state(4, 1).unwrap();
        assert!(StateVector::from_amplitudes(acc).unwrap().max_deviation(&one) < 1e-12);
    }

    #[test]
    fn convergent_selection() {
        // n = 9, m = 4: x = 128 is exactly 1/4.
        assert_eq!(select_convergent(128, 9, 4), Some(Convergent { p: 1, q: 4 }));
        assert_eq!(select_convergent(0, 9, 4), Some(Convergent { p: 0, q: 1 }));
        let pp = post_process(2, 15, 256, 9);
        assert_eq!(pp.r, 2);
        assert!(!pp.succeeded);
        assert!(!post_process(2, 15, 0, 9).succeeded);
        assert!(post_process(2, 15, 384, 9).succeeded);
    }

    #[test]
    fn order_finding_examples() {
        let mut successes = 0;
        for seed in 0..40 {
            let res = quantum_order_find(2, 15, seed).unwrap();
            if res.succeeded {
                assert_eq!(res.r, 4);
                successes += 1;
            }
        }
        assert!(successes > 0);
        let any = (0..20).map(|s| quantum_order_find(4, 15, s).unwrap()).find(|r| r.succeeded);
        assert_eq!(any.unwrap().r, 2);
    }

    #[test]
    fn fourteen_is_a_trap_for_fifteen() {
        let mut rng = attempt_rng(0, 0);
        let mut seen = None;
        for _ in 0..20 {
            match attempt_with_base(15, 14, &mut rng).unwrap() {
                Attempt::OrderNotFound { .. } => continue,
                other => {
                    seen = Some(other);
                    break;
                }
            }
        }
        assert_eq!(seen, Some(Attempt::TrivialRoot { a: 14, r: 2 }));
    }

    #[test]
    fn classical_paths() {
        assert_eq!(shor_factor(22, 0, 1).unwrap().factor, 2);
        assert_eq!(shor_factor(27, 0, 1).unwrap().factor, 3);
        assert_eq!(shor_factor(13, 0, 1), Err(Error::NotComposite(13)));
        assert!(matches!(shor_factor(251 * 241, 0, 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn factor_fifteen() {
        let report = shor_factor(15, 7, 20).unwrap();
        assert!(report.factor == 3 || report.factor == 5);
        assert!(!report.classical);
    }
}
