//! Circuits, truth-table oracles, the QFT network and small demonstration
//! networks (half adder, Mach-Zehnder interferometer, phase kickback).

use std::f64::consts::PI;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::gates::{apply_1q, Gate1, GateSpec, Permutation};
use crate::qstate::{check_capacity, StateVector};

/// Largest oracle input width stored as a dense truth table.
pub const MAX_ORACLE_INPUT: usize = 20;

/// One gate bound to concrete qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub gate: GateSpec,
    pub qubits: Vec<usize>,
}

/// Ordered list of gate applications on a fixed-size register.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    steps: Vec<Step>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            steps: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Appends a step, validating arity and indices.
    pub fn try_push(&mut self, gate: GateSpec, qubits: &[usize]) -> Result<&mut Self> {
        if gate.arity() != qubits.len() {
            return domain(format!(
                "{} takes {} qubits, got {}",
                gate.name(),
                gate.arity(),
                qubits.len()
            ));
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return domain(format!("qubit {q} out of range for a {}-qubit circuit", self.num_qubits));
            }
            if qubits[..i].contains(&q) {
                return domain(format!("qubit {q} repeated in one step"));
            }
        }
        self.steps.push(Step {
            gate,
            qubits: qubits.to_vec(),
        });
        Ok(self)
    }

    /// Like [`try_push`](Self::try_push) but panics on a malformed step.
    pub fn push(&mut self, gate: GateSpec, qubits: &[usize]) -> &mut Self {
        if let Err(e) = self.try_push(gate, qubits) {
            panic!("invalid circuit step: {e}");
        }
        self
    }

    /// Appends `other` with its qubit `i` mapped to `offset + i`.
    pub fn append(&mut self, other: &Circuit, offset: usize) -> Result<&mut Self> {
        for step in &other.steps {
            let qubits: Vec<usize> = step.qubits.iter().map(|q| q + offset).collect();
            self.try_push(step.gate.clone(), &qubits)?;
        }
        Ok(self)
    }

    /// Reversed sequence of adjoint gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| Step {
                    gate: s.gate.adjoint(),
                    qubits: s.qubits.clone(),
                })
                .collect(),
        }
    }

    /// Number of steps that are not qubit swaps.
    pub fn gate_count(&self) -> usize {
        self.steps.iter().filter(|s| s.gate != GateSpec::Swap).count()
    }

    pub fn run_in_place(&self, sv: &mut StateVector) -> Result<()> {
        if sv.num_qubits() != self.num_qubits {
            return domain(format!(
                "{}-qubit circuit run on a {}-qubit state",
                self.num_qubits,
                sv.num_qubits()
            ));
        }
        for step in &self.steps {
            step.gate.apply(sv, &step.qubits)?;
        }
        Ok(())
    }

    /// Full register-level operator, `matrix[row][col]`, built column by column
    /// from basis inputs.
    pub fn unitary(&self) -> Result<Vec<Vec<Complex64>>> {
        check_capacity(self.num_qubits)?;
        let dim = 1usize << self.num_qubits;
        let columns = (0..dim)
            .map(|col| {
                let mut sv = StateVector::basis_state(self.num_qubits, col)?;
                self.run_in_place(&mut sv)?;
                Ok(sv)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((0..dim)
            .map(|row| columns.iter().map(|c| c.amplitude(row)).collect())
            .collect())
    }
}

/// Runs `c` on a copy of `input`.
pub fn run(c: &Circuit, input: &StateVector) -> Result<StateVector> {
    let mut sv = input.clone();
    c.run_in_place(&mut sv)?;
    Ok(sv)
}

/// One step per line: `GATE q[i] q[j] (param)`.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            write!(f, "{}", step.gate.name())?;
            for q in &step.qubits {
                write!(f, " q[{q}]")?;
            }
            if let Some(p) = step.gate.parameter() {
                write!(f, " ({p:.6})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Applies `H` to every qubit: `|y> -> 2^{-n/2} sum_x (-1)^{y.x} |x>`.
pub fn hadamard_all(sv: &mut StateVector) {
    for q in 0..sv.num_qubits() {
        apply_1q(sv, &Gate1::H, q).expect("qubit index is in range");
    }
}

/// QFT network without the final swaps: `n` Hadamards and `n(n-1)/2`
/// controlled phases `B(pi/2^k)`. Output qubit order is reversed with
/// respect to [`qft`].
pub fn qft_bit_reversed(n: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for j in (0..n).rev() {
        c.push(GateSpec::Matrix1Q(Gate1::H), &[j]);
        for k in (0..j).rev() {
            let angle = PI / (1u64 << (j - k)) as f64;
            c.push(GateSpec::controlled_phase(angle), &[k, j]);
        }
    }
    c
}

/// Quantum Fourier transform `|y> -> 2^{-n/2} sum_x e^{2 pi i y x / 2^n} |x>`:
/// the bit-reversed network followed by `floor(n/2)` swaps.
pub fn qft(n: usize) -> Circuit {
    let mut c = qft_bit_reversed(n);
    for i in 0..n / 2 {
        c.push(GateSpec::Swap, &[i, n - 1 - i]);
    }
    c
}

pub fn inverse_qft(n: usize) -> Circuit {
    qft(n).inverse()
}

/// Dense truth table for `f: {0,1}^n_in -> {0,1}^m_out`, evaluated as the
/// permutation `|x, y> -> |x, (y + f(x)) mod 2^m_out>`. The input register is
/// the low-order block of qubits. Every application is counted.
#[derive(Debug)]
pub struct Oracle {
    n_in: usize,
    m_out: usize,
    table: Vec<u64>,
    queries: AtomicUsize,
}

impl Clone for Oracle {
    fn clone(&self) -> Self {
        Self {
            n_in: self.n_in,
            m_out: self.m_out,
            table: self.table.clone(),
            queries: AtomicUsize::new(0),
        }
    }
}

impl Oracle {
    pub fn new(n_in: usize, m_out: usize, table: Vec<u64>) -> Result<Self> {
        if n_in > MAX_ORACLE_INPUT {
            return domain(format!("oracle input width {n_in} exceeds {MAX_ORACLE_INPUT}"));
        }
        if m_out == 0 || m_out > 63 {
            return domain(format!("oracle output width {m_out} must be in 1..=63"));
        }
        if table.len() != 1usize << n_in {
            return domain(format!(
                "truth table has {} rows, expected {}",
                table.len(),
                1usize << n_in
            ));
        }
        if let Some((x, v)) = table.iter().enumerate().find(|(_, &v)| v >> m_out != 0) {
            return domain(format!("f({x}) = {v} does not fit in {m_out} bits"));
        }
        Ok(Self {
            n_in,
            m_out,
            table,
            queries: AtomicUsize::new(0),
        })
    }

    pub fn from_fn(n_in: usize, m_out: usize, f: impl Fn(u64) -> u64) -> Result<Self> {
        if n_in > MAX_ORACLE_INPUT {
            return domain(format!("oracle input width {n_in} exceeds {MAX_ORACLE_INPUT}"));
        }
        Self::new(n_in, m_out, (0..1u64 << n_in).map(f).collect())
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn m_out(&self) -> usize {
        self.m_out
    }

    pub fn width(&self) -> usize {
        self.n_in + self.m_out
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> u64 {
        self.table[x]
    }

    /// Number of times the oracle has been applied to a state.
    pub fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn permutation(&self) -> Permutation {
        let out_mask = (1u64 << self.m_out) - 1;
        let map = (0..1usize << self.width())
            .map(|i| {
                let x = i & ((1 << self.n_in) - 1);
                let y = (i >> self.n_in) as u64;
                let y2 = (y + self.table[x]) & out_mask;
                x | ((y2 as usize) << self.n_in)
            })
            .collect();
        Permutation::new(self.width(), map).expect("addition mod 2^m is a bijection")
    }

    /// One query on the qubits `0..n_in + m_out` of `sv`.
    pub fn apply(&self, sv: &mut StateVector) -> Result<()> {
        if sv.num_qubits() < self.width() {
            return domain(format!(
                "oracle needs {} qubits, register has {}",
                self.width(),
                sv.num_qubits()
            ));
        }
        let qubits: Vec<usize> = (0..self.width()).collect();
        GateSpec::Permutation(Arc::new(self.permutation())).apply(sv, &qubits)?;
        self.queries.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }
}

/// The oracle as a one-step circuit on `n_in + m_out` qubits.
pub fn oracle_circuit(f: &Oracle) -> Circuit {
    let mut c = Circuit::new(f.width());
    let qubits: Vec<usize> = (0..f.width()).collect();
    c.push(GateSpec::Permutation(Arc::new(f.permutation())), &qubits);
    c
}

/// Toffoli followed by c-NOT: `|x1, x2, 0> -> |x1, x1 xor x2, x1 and x2>`,
/// with `x1` on qubit 2, `x2` on qubit 1 and the carry on qubit 0.
pub fn half_adder() -> Circuit {
    let mut c = Circuit::new(3);
    c.push(GateSpec::Toffoli, &[2, 1, 0])
        .push(GateSpec::cnot(), &[2, 1]);
    c
}

/// Single-qubit interferometer `H, phase(phi0 - phi1), H` on `|0>`;
/// returns the output probabilities `(P0, P1)`.
pub fn mach_zehnder(phi0: f64, phi1: f64) -> (f64, f64) {
    let mut sv = StateVector::zero(1).expect("one qubit");
    for g in [Gate1::H, Gate1::Phase(phi0 - phi1), Gate1::H] {
        apply_1q(&mut sv, &g, 0).expect("qubit 0");
    }
    let p = sv.probabilities();
    (p[0], p[1])
}

/// `|u> = 2^{-m/2} sum_y e^{-2 pi i y / 2^m} |y>`, prepared as the QFT of
/// `|11...1>`. An `m`-bit output oracle multiplies `|x>|u>` by
/// `e^{2 pi i f(x) / 2^m}`.
pub fn eigenvalue_kickback_state(m: usize) -> Result<StateVector> {
    check_capacity(m)?;
    let mut sv = StateVector::basis_state(m, (1usize << m) - 1)?;
    qft(m).run_in_place(&mut sv)?;
    Ok(sv)
}
