//! Phase decoherence, its effect on interference and on stored qubits, and
//! the three-qubit phase-flip code.
//!
//! The environment of each qubit is modelled as one extra qubit. A system
//! qubit in `|0>` leaves it in `|m0> = |e0>`; in `|1>` it leaves
//! `|m1> = kappa|e0> + sqrt(1 - kappa^2)|e1>`, so `<m0|m1> = kappa`.

use std::fmt;
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuits::Circuit;
use crate::error::{domain, Result};
use crate::gates::{apply_1q, apply_controlled, Gate1, GateSpec};
use crate::qstate::{gather_bits, scatter_bits, BasisIndex, StateVector};

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-12;
const PSD_TOLERANCE: f64 = 1e-10;

/// Validated density operator, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return domain(format!("expected {dim}x{dim} entries, got {}", entries.len()));
        }
        let rho = Self { dim, entries };
        for i in 0..dim {
            for j in i..dim {
                if (rho.entry(i, j) - rho.entry(j, i).conj()).norm() > HERMITIAN_TOLERANCE {
                    return domain(format!("not Hermitian at ({i}, {j})"));
                }
            }
        }
        let trace = rho.trace();
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return domain(format!("trace {trace} differs from 1"));
        }
        if let Some(&low) = rho
            .eigenvalues()
            .iter()
            .find(|&&l| l < -PSD_TOLERANCE)
        {
            return domain(format!("negative eigenvalue {low:e}"));
        }
        Ok(rho)
    }

    /// `|psi><psi|`.
    pub fn from_pure(sv: &StateVector) -> Self {
        let a = sv.amplitudes();
        let dim = a.len();
        let entries = (0..dim * dim)
            .map(|k| a[k / dim] * a[k % dim].conj())
            .collect();
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i).re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| self.entry(i, j));
        let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// `<psi|rho|psi>`.
    pub fn fidelity(&self, psi: &StateVector) -> Result<f64> {
        let a = psi.amplitudes();
        if a.len() != self.dim {
            return domain(format!("state has dimension {}, matrix {}", a.len(), self.dim));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += a[i].conj() * self.entry(i, j) * a[j];
            }
        }
        Ok(acc.re)
    }
}

/// Reduced density operator of `keep` (qubit `keep[i]` becomes bit `i`).
pub fn reduced_density_matrix(sv: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = sv.num_qubits();
    if keep.iter().any(|&q| q >= n) {
        return domain(format!("qubits {keep:?} outside a {n}-qubit register"));
    }
    let k = 1usize << keep.len();
    let a = sv.amplitudes();
    let mut entries = vec![Complex64::new(0.0, 0.0); k * k];
    for base in (0..a.len()).filter(|&idx| gather_bits(idx, keep) == 0) {
        for i in 0..k {
            let ai = a[scatter_bits(base, keep, i)];
            for j in 0..k {
                entries[i * k + j] += ai * a[scatter_bits(base, keep, j)].conj();
            }
        }
    }
    Ok(DensityMatrix { dim: k, entries })
}

/// Overlap `<m0|m1>` of the two environment states, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EnvOverlap(f64);

impl EnvOverlap {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) {
            return domain(format!("overlap {kappa} outside [0, 1]"));
        }
        Ok(Self(kappa))
    }

    /// `kappa = e^{-gamma t}`.
    pub fn from_gamma_t(gamma_t: f64) -> Result<Self> {
        if gamma_t.is_nan() || gamma_t < 0.0 {
            return domain(format!("gamma t = {gamma_t} must be nonnegative"));
        }
        Ok(Self((-gamma_t).exp()))
    }

    pub fn kappa(self) -> f64 {
        self.0
    }

    /// Controlled rotation that takes the environment qubit from `|m0>` to
    /// `|m1>` when the system qubit is `|1>`.
    pub fn coupling(self) -> Gate1 {
        Gate1::Rotation(self.0.acos())
    }
}

/// Scales the coherences of a one-qubit density operator by `kappa`.
pub fn decohere_qubit(rho: &DensityMatrix, kappa: EnvOverlap) -> Result<DensityMatrix> {
    if rho.dim != 2 {
        return domain(format!("expected a qubit, got dimension {}", rho.dim));
    }
    let mut out = rho.clone();
    out.entries[1] *= kappa.0;
    out.entries[2] *= kappa.0;
    Ok(out)
}

/// Couples system qubit `system` to environment qubit `env` (starting in `|e0>`).
pub fn entangle_environment(sv: &mut StateVector, system: usize, env: usize, kappa: EnvOverlap) -> Result<()> {
    apply_controlled(sv, &kappa.coupling(), system, env)
}

/// `P0 = (1 + kappa cos phi) / 2` for a Hadamard, phase, decoherence,
/// Hadamard interferometer.
pub fn interference_probabilities(phi: f64, kappa: EnvOverlap) -> (f64, f64) {
    let p0 = 0.5 * (1.0 + kappa.0 * phi.cos());
    (p0, 1.0 - p0)
}

/// The same probabilities from a qubit plus environment state vector.
pub fn interference_probabilities_simulated(phi: f64, kappa: EnvOverlap) -> Result<(f64, f64)> {
    let mut sv = StateVector::zero(2)?;
    apply_1q(&mut sv, &Gate1::H, 0)?;
    apply_1q(&mut sv, &Gate1::Phase(phi), 0)?;
    entangle_environment(&mut sv, 0, 1, kappa)?;
    apply_1q(&mut sv, &Gate1::H, 0)?;
    let p = sv.partial_probabilities(&[0])?;
    Ok((p[0], p[1]))
}

/// `<M_x|M_y> = kappa^{H(x, y)}` for registers whose qubits decohere
/// independently.
pub fn register_coherence(x: BasisIndex, y: BasisIndex, kappa: EnvOverlap) -> f64 {
    kappa.0.powi((x ^ y).count_ones() as i32)
}

/// Fidelity `|a|^4 + |b|^4 + 2|a|^2|b|^2 kappa` of a decohered qubit with
/// `p = |a|^2`.
pub fn fidelity_plain_pointwise(p: f64, kappa: EnvOverlap) -> f64 {
    p * p + (1.0 - p) * (1.0 - p) + 2.0 * p * (1.0 - p) * kappa.0
}

/// `(2 + e^{-gamma t}) / 3`.
pub fn average_fidelity_plain(gamma_t: f64) -> Result<f64> {
    let k = EnvOverlap::from_gamma_t(gamma_t)?.0;
    Ok((2.0 + k) / 3.0)
}

/// `(4 + 3 e^{-gamma t} - e^{-3 gamma t}) / 6`.
pub fn average_fidelity_encoded(gamma_t: f64) -> Result<f64> {
    let k = EnvOverlap::from_gamma_t(gamma_t)?.0;
    Ok((4.0 + 3.0 * k - k * k * k) / 6.0)
}

/// Composite Simpson rule on `[0, 1]`; `intervals` must be even.
pub fn simpson_unit(intervals: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    assert!(intervals >= 2 && intervals.is_multiple_of(2), "Simpson needs an even interval count");
    let h = 1.0 / intervals as f64;
    let inner: f64 = (1..intervals)
        .map(|i| f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(0.0) + f(1.0) + inner) * h / 3.0
}

/// Intervals used over `|alpha|^2`.
pub const P_INTERVALS: usize = 64;
/// Equally spaced points used over the relative phase of `beta`.
pub const PHASE_POINTS: usize = 8;

/// Mean of `fidelity` over inputs `sqrt(p)|0> + e^{i phi} sqrt(1-p)|1>`,
/// with `p` uniform on `[0, 1]` and `phi` uniform on the circle.
pub fn average_over_inputs(fidelity: impl Fn(&StateVector) -> Result<f64>) -> Result<f64> {
    let mut first_err = None;
    let value = simpson_unit(P_INTERVALS, |p| {
        let mut acc = 0.0;
        for j in 0..PHASE_POINTS {
            let phi = std::f64::consts::TAU * j as f64 / PHASE_POINTS as f64;
            let psi = input_state(p, phi);
            match fidelity(&psi) {
                Ok(f) => acc += f,
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        acc / PHASE_POINTS as f64
    });
    match first_err {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// `sqrt(p)|0> + e^{i phi} sqrt(1-p)|1>`.
pub fn input_state(p: f64, phi: f64) -> StateVector {
    StateVector::qubit(p.clamp(0.0, 1.0).sqrt().acos(), phi)
}

/// Average plain fidelity by quadrature of the pointwise formula.
pub fn average_fidelity_plain_quadrature(gamma_t: f64) -> Result<f64> {
    let kappa = EnvOverlap::from_gamma_t(gamma_t)?;
    Ok(simpson_unit(P_INTERVALS, |p| fidelity_plain_pointwise(p, kappa)))
}

/// Fidelity of one unprotected qubit after coupling to its environment.
pub fn fidelity_plain_simulated(psi: &StateVector, kappa: EnvOverlap) -> Result<f64> {
    let mut sv = StateVector::zero(1)?.tensor(psi)?;
    entangle_environment(&mut sv, 0, 1, kappa)?;
    reduced_density_matrix(&sv, &[0])?.fidelity(psi)
}

/// Average plain fidelity from the environment simulation.
pub fn average_fidelity_plain_simulated(gamma_t: f64) -> Result<f64> {
    let kappa = EnvOverlap::from_gamma_t(gamma_t)?;
    average_over_inputs(|psi| fidelity_plain_simulated(psi, kappa))
}

/// Encoding network on qubits 0 (data), 1 and 2: two c-NOTs from the data
/// qubit, then a Hadamard on each.
pub fn encode_circuit() -> Circuit {
    let mut c = Circuit::new(3);
    c.push(GateSpec::cnot(), &[0, 1]).push(GateSpec::cnot(), &[0, 2]);
    for q in 0..3 {
        c.push(GateSpec::Matrix1Q(Gate1::H), &[q]);
    }
    c
}

/// Decoding network: Hadamards, the same two c-NOTs, then a Toffoli from
/// the two ancillas onto the data qubit.
pub fn decode_circuit() -> Circuit {
    let mut c = Circuit::new(3);
    for q in 0..3 {
        c.push(GateSpec::Matrix1Q(Gate1::H), &[q]);
    }
    c.push(GateSpec::cnot(), &[0, 1])
        .push(GateSpec::cnot(), &[0, 2])
        .push(GateSpec::Toffoli, &[1, 2, 0]);
    c
}

/// `a|0> + b|1>` on qubit 0 becomes `a|+++> + b|--->`.
pub fn encode3(single: &StateVector) -> Result<StateVector> {
    if single.num_qubits() != 1 {
        return domain(format!("expected one qubit, got {}", single.num_qubits()));
    }
    let mut sv = StateVector::zero(2)?.tensor(single)?;
    encode_circuit().run_in_place(&mut sv)?;
    Ok(sv)
}

/// Ancilla readout after decoding: `x1` from qubit 1, `x2` from qubit 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syndrome {
    pub x1: bool,
    pub x2: bool,
}

impl Syndrome {
    pub const NONE: Syndrome = Syndrome { x1: false, x2: false };

    fn from_bits(bits: usize) -> Self {
        Self {
            x1: bits & 1 == 1,
            x2: bits & 2 == 2,
        }
    }

    /// Code qubit whose phase flip this syndrome reports.
    pub fn flipped_qubit(self) -> Option<usize> {
        match (self.x1, self.x2) {
            (false, false) => None,
            (true, true) => Some(0),
            (true, false) => Some(1),
            (false, true) => Some(2),
        }
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.x1 as u8, self.x2 as u8)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    /// Data qubit conditioned on the reported syndrome.
    pub data: StateVector,
    pub syndrome: Syndrome,
    /// Probability of that syndrome.
    pub probability: f64,
}

/// Runs the decoding network and reads the most likely syndrome.
pub fn decode3(sv: &StateVector) -> Result<Decoded> {
    if sv.num_qubits() != 3 {
        return domain(format!("expected three qubits, got {}", sv.num_qubits()));
    }
    let mut out = sv.clone();
    decode_circuit().run_in_place(&mut out)?;
    let probs = out.partial_probabilities(&[1, 2])?;
    let (bits, &probability) = probs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("four syndrome outcomes");
    let a = out.amplitudes();
    let data = StateVector::normalized(vec![a[bits << 1], a[(bits << 1) | 1]])?;
    Ok(Decoded {
        data,
        syndrome: Syndrome::from_bits(bits),
        probability,
    })
}

/// Fidelity of the decoded data qubit when all three code qubits decohere.
/// Qubits 3, 4, 5 hold the environments of code qubits 0, 1, 2.
pub fn fidelity_encoded_simulated(psi: &StateVector, kappa: EnvOverlap) -> Result<f64> {
    let mut sv = StateVector::zero(5)?.tensor(psi)?;
    let mut encode = Circuit::new(6);
    encode.append(&encode_circuit(), 0)?;
    encode.run_in_place(&mut sv)?;
    for q in 0..3 {
        entangle_environment(&mut sv, q, q + 3, kappa)?;
    }
    let mut decode = Circuit::new(6);
    decode.append(&decode_circuit(), 0)?;
    decode.run_in_place(&mut sv)?;
    reduced_density_matrix(&sv, &[0])?.fidelity(psi)
}

/// Average encoded fidelity from the three-environment simulation.
pub fn average_fidelity_encoded_simulated(gamma_t: f64) -> Result<f64> {
    let kappa = EnvOverlap::from_gamma_t(gamma_t)?;
    average_over_inputs(|psi| fidelity_encoded_simulated(psi, kappa))
}

/// One row of the fidelity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub gamma_t: f64,
    pub plain: f64,
    pub encoded: f64,
}

/// `steps` equally spaced points from 0 to `gamma_t_max` inclusive.
pub fn fidelity_curve(gamma_t_max: f64, steps: usize) -> Result<Vec<CurvePoint>> {
    if steps == 0 {
        return domain("need at least one step");
    }
    if !gamma_t_max.is_finite() || gamma_t_max < 0.0 {
        return domain(format!("gamma t max = {gamma_t_max} must be finite and nonnegative"));
    }
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let gamma_t = if steps == 1 {
                0.0
            } else {
                gamma_t_max * i as f64 / (steps - 1) as f64
            };
            Ok(CurvePoint {
                gamma_t,
                plain: average_fidelity_plain(gamma_t)?,
                encoded: average_fidelity_encoded(gamma_t)?,
            })
        })
        .collect()
}

/// Formats `x` with `digits` significant digits, dropping trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_curve_csv(out: &mut dyn Write, points: &[CurvePoint]) -> io::Result<()> {
    writeln!(out, "gamma_t, fidelity_plain, fidelity_encoded")?;
    for p in points {
        writeln!(
            out,
            "{}, {}, {}",
            format_significant(p.gamma_t, 12),
            format_significant(p.plain, 12),
            format_significant(p.encoded, 12)
        )?;
    }
    Ok(())
}
