//! Gate definitions and in-place application kernels.
//!
//! Kernels walk the amplitude array in blocks of `2^{q+1}`: the lower half of
//! each block has bit `q` clear, the upper half has it set, so the pairs a
//! single-qubit gate mixes are `(lo[k], hi[k])`. Large registers are processed
//! block-parallel with rayon.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuits::Circuit;
use crate::error::{domain, Result};
use crate::qstate::{gather_bits, scatter_bits, Amplitude, StateVector};

/// Row-major 2×2 complex matrix.
pub type Matrix2 = [[Complex64; 2]; 2];

const PAR_THRESHOLD: usize = 1 << 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A single-qubit unitary.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate1 {
    H,
    X,
    Z,
    /// `diag(1, i)`; `V^2 = Z`.
    V,
    /// `diag(1, -i)`.
    Vdg,
    /// `diag(1, e^{i phi})`.
    Phase(f64),
    /// Real rotation `[[cos t, -sin t], [sin t, cos t]]`, so that
    /// `|0> -> cos t|0> + sin t|1>`.
    Rotation(f64),
    Matrix { label: String, matrix: Matrix2 },
}

pub fn gate_h() -> Gate1 {
    Gate1::H
}

pub fn gate_phase(phi: f64) -> Gate1 {
    Gate1::Phase(phi)
}

pub fn gate_v() -> Gate1 {
    Gate1::V
}

impl Gate1 {
    /// Builds a named gate from an explicit matrix, checking `U†U = I`.
    pub fn custom(label: impl Into<String>, matrix: Matrix2) -> Result<Self> {
        let product = mat_mul(&mat_adjoint(&matrix), &matrix);
        if mat_distance(&product, &mat_identity()) > 1e-10 {
            return domain("matrix is not unitary");
        }
        Ok(Gate1::Matrix {
            label: label.into(),
            matrix,
        })
    }

    pub fn matrix(&self) -> Matrix2 {
        match self {
            Gate1::H => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate1::X => [[ZERO, ONE], [ONE, ZERO]],
            Gate1::Z => [[ONE, ZERO], [ZERO, -ONE]],
            Gate1::V => [[ONE, ZERO], [ZERO, I]],
            Gate1::Vdg => [[ONE, ZERO], [ZERO, -I]],
            Gate1::Phase(phi) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, *phi)]],
            Gate1::Rotation(t) => {
                let (s, c) = t.sin_cos();
                [
                    [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                ]
            }
            Gate1::Matrix { matrix, .. } => *matrix,
        }
    }

    pub fn adjoint(&self) -> Gate1 {
        match self {
            Gate1::H | Gate1::X | Gate1::Z => self.clone(),
            Gate1::V => Gate1::Vdg,
            Gate1::Vdg => Gate1::V,
            Gate1::Phase(phi) => Gate1::Phase(-phi),
            Gate1::Rotation(t) => Gate1::Rotation(-t),
            Gate1::Matrix { label, matrix } => Gate1::Matrix {
                label: match label.strip_suffix("DG") {
                    Some(base) => base.to_string(),
                    None => format!("{label}DG"),
                },
                matrix: mat_adjoint(matrix),
            },
        }
    }

    /// `U^{2^j}` by repeated squaring.
    pub fn pow2(&self, j: usize) -> Gate1 {
        if j == 0 {
            return self.clone();
        }
        match self {
            Gate1::Phase(phi) => Gate1::Phase(phi * (1u64 << j) as f64),
            _ => {
                let mut m = self.matrix();
                for _ in 0..j {
                    m = mat_mul(&m, &m);
                }
                Gate1::Matrix {
                    label: format!("{}^{}", self.label(), 1u64 << j),
                    matrix: m,
                }
            }
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Gate1::H => "H",
            Gate1::X => "X",
            Gate1::Z => "Z",
            Gate1::V => "V",
            Gate1::Vdg => "VDG",
            Gate1::Phase(_) => "PHASE",
            Gate1::Rotation(_) => "ROT",
            Gate1::Matrix { label, .. } => label,
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match self {
            Gate1::Phase(p) | Gate1::Rotation(p) => Some(*p),
            _ => None,
        }
    }
}

/// Bijection on the basis states of a `width`-qubit block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    width: usize,
    map: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn new(width: usize, map: Vec<usize>) -> Result<Self> {
        if map.len() != 1usize << width {
            return domain(format!(
                "permutation over {width} qubits needs {} entries, got {}",
                1usize << width,
                map.len()
            ));
        }
        let mut inverse = vec![usize::MAX; map.len()];
        for (from, &to) in map.iter().enumerate() {
            if to >= map.len() || inverse[to] != usize::MAX {
                return domain(format!("map is not a bijection (entry {from} -> {to})"));
            }
            inverse[to] = from;
        }
        Ok(Self {
            width,
            map,
            inverse,
        })
    }

    pub fn identity(width: usize) -> Self {
        let map: Vec<usize> = (0..1usize << width).collect();
        Self {
            width,
            inverse: map.clone(),
            map,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn apply(&self, value: usize) -> usize {
        self.map[value]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            width: self.width,
            map: self.inverse.clone(),
            inverse: self.map.clone(),
        }
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.width, other.width, "permutation widths differ");
        let map: Vec<usize> = self.map.iter().map(|&v| other.map[v]).collect();
        let mut inverse = vec![0; map.len()];
        for (from, &to) in map.iter().enumerate() {
            inverse[to] = from;
        }
        Permutation {
            width: self.width,
            map,
            inverse,
        }
    }

    /// `self^{2^j}` by `j` squarings.
    pub fn pow2(&self, j: usize) -> Permutation {
        (0..j).fold(self.clone(), |p, _| p.then(&p))
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }
}

/// A gate together with the shape of qubit list it binds to.
#[derive(Debug, Clone, PartialEq)]
pub enum GateSpec {
    /// Qubits: `[target]`.
    Matrix1Q(Gate1),
    /// Qubits: `[control, target]`.
    ControlledMatrix(Gate1),
    /// Qubits: the permuted block, least significant first.
    Permutation(Arc<Permutation>),
    /// Qubits: `[control, block...]`.
    ControlledPermutation(Arc<Permutation>),
    /// Qubits: `[control, control, target]`.
    Toffoli,
    /// Qubits: `[a, b]`.
    Swap,
}

impl GateSpec {
    pub fn cnot() -> Self {
        GateSpec::ControlledMatrix(Gate1::X)
    }

    /// Controlled phase shift `B(phi)`: `|x>|y> -> e^{i x y phi}|x>|y>`.
    pub fn controlled_phase(phi: f64) -> Self {
        GateSpec::ControlledMatrix(Gate1::Phase(phi))
    }

    pub fn arity(&self) -> usize {
        match self {
            GateSpec::Matrix1Q(_) => 1,
            GateSpec::ControlledMatrix(_) | GateSpec::Swap => 2,
            GateSpec::Permutation(p) => p.width(),
            GateSpec::ControlledPermutation(p) => p.width() + 1,
            GateSpec::Toffoli => 3,
        }
    }

    pub fn adjoint(&self) -> GateSpec {
        match self {
            GateSpec::Matrix1Q(g) => GateSpec::Matrix1Q(g.adjoint()),
            GateSpec::ControlledMatrix(g) => GateSpec::ControlledMatrix(g.adjoint()),
            GateSpec::Permutation(p) => GateSpec::Permutation(Arc::new(p.inverse())),
            GateSpec::ControlledPermutation(p) => {
                GateSpec::ControlledPermutation(Arc::new(p.inverse()))
            }
            GateSpec::Toffoli | GateSpec::Swap => self.clone(),
        }
    }

    /// Applies the gate to `qubits` of `sv` in place.
    pub fn apply(&self, sv: &mut StateVector, qubits: &[usize]) -> Result<()> {
        if qubits.len() != self.arity() {
            return domain(format!(
                "{} expects {} qubits, got {}",
                self.name(),
                self.arity(),
                qubits.len()
            ));
        }
        match self {
            GateSpec::Matrix1Q(g) => apply_1q(sv, g, qubits[0]),
            GateSpec::ControlledMatrix(g) => apply_controlled(sv, g, qubits[0], qubits[1]),
            GateSpec::Permutation(p) => apply_permutation(sv, p, qubits, None),
            GateSpec::ControlledPermutation(p) => {
                apply_permutation(sv, p, &qubits[1..], Some(qubits[0]))
            }
            GateSpec::Toffoli => apply_toffoli(sv, qubits[0], qubits[1], qubits[2]),
            GateSpec::Swap => apply_swap(sv, qubits[0], qubits[1]),
        }
    }

    /// Mnemonic used by the circuit dump.
    pub fn name(&self) -> String {
        match self {
            GateSpec::Matrix1Q(g) => g.label().to_string(),
            GateSpec::ControlledMatrix(Gate1::X) => "CNOT".to_string(),
            GateSpec::ControlledMatrix(g) => format!("C{}", g.label()),
            GateSpec::Permutation(_) => "PERM".to_string(),
            GateSpec::ControlledPermutation(_) => "CPERM".to_string(),
            GateSpec::Toffoli => "TOFFOLI".to_string(),
            GateSpec::Swap => "SWAP".to_string(),
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match self {
            GateSpec::Matrix1Q(g) | GateSpec::ControlledMatrix(g) => g.parameter(),
            _ => None,
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())?;
        if let Some(p) = self.parameter() {
            write!(f, "({p:.6})")?;
        }
        Ok(())
    }
}

fn check_qubits(sv: &StateVector, qubits: &[usize]) -> Result<()> {
    let n = sv.num_qubits();
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return domain(format!("qubit {q} out of range for a {n}-qubit register"));
        }
        if qubits[..i].contains(&q) {
            return domain(format!("qubit {q} used twice in one gate"));
        }
    }
    Ok(())
}

fn pair_kernel(amps: &mut [Amplitude], q: usize, m: &Matrix2, control: Option<usize>) {
    let stride = 1usize << q;
    let block = stride << 1;
    let body = |(b, chunk): (usize, &mut [Amplitude])| {
        let base = b * block;
        if let Some(c) = control {
            if c > q && (base >> c) & 1 == 0 {
                return;
            }
        }
        let (lo, hi) = chunk.split_at_mut(stride);
        for (off, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            if let Some(c) = control {
                if c < q && ((base + off) >> c) & 1 == 0 {
                    continue;
                }
            }
            let (x, y) = (*a, *b);
            *a = m[0][0] * x + m[0][1] * y;
            *b = m[1][0] * x + m[1][1] * y;
        }
    };
    if amps.len() >= PAR_THRESHOLD {
        amps.par_chunks_mut(block).enumerate().for_each(body);
    } else {
        amps.chunks_mut(block).enumerate().for_each(body);
    }
}

/// Applies a single-qubit gate to qubit `q`.
pub fn apply_1q(sv: &mut StateVector, g: &Gate1, q: usize) -> Result<()> {
    check_qubits(sv, &[q])?;
    pair_kernel(sv.amplitudes_mut(), q, &g.matrix(), None);
    Ok(())
}

/// Applies `g` to `target` on the branch where `control` is `|1>`.
pub fn apply_controlled(sv: &mut StateVector, g: &Gate1, control: usize, target: usize) -> Result<()> {
    check_qubits(sv, &[control, target])?;
    pair_kernel(sv.amplitudes_mut(), target, &g.matrix(), Some(control));
    Ok(())
}

/// Permutes the basis states of the block `targets` (least significant
/// first), optionally only where `control` is `|1>`.
pub fn apply_permutation(
    sv: &mut StateVector,
    perm: &Permutation,
    targets: &[usize],
    control: Option<usize>,
) -> Result<()> {
    if targets.len() != perm.width() {
        return domain(format!(
            "permutation of width {} bound to {} qubits",
            perm.width(),
            targets.len()
        ));
    }
    let mut all = targets.to_vec();
    all.extend(control);
    check_qubits(sv, &all)?;

    let contiguous = targets.windows(2).all(|w| w[1] == w[0] + 1);
    let offset = targets.first().copied().unwrap_or(0);
    let mask = (1usize << perm.width()) - 1;
    // Pull formulation: out[j] = in[source(j)], so the output can be filled in parallel.
    let source = |j: usize| -> usize {
        if let Some(c) = control {
            if (j >> c) & 1 == 0 {
                return j;
            }
        }
        if contiguous {
            let local = (j >> offset) & mask;
            (j & !(mask << offset)) | (perm.inverse[local] << offset)
        } else {
            scatter_bits(j, targets, perm.inverse[gather_bits(j, targets)])
        }
    };
    let input = sv.amplitudes();
    let mut out = vec![ZERO; input.len()];
    if input.len() >= PAR_THRESHOLD {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(j, o)| *o = input[source(j)]);
    } else {
        for (j, o) in out.iter_mut().enumerate() {
            *o = input[source(j)];
        }
    }
    sv.replace_amplitudes(out);
    Ok(())
}

/// Negates `target` when both controls are `|1>`.
pub fn apply_toffoli(sv: &mut StateVector, c1: usize, c2: usize, target: usize) -> Result<()> {
    check_qubits(sv, &[c1, c2, target])?;
    let need = (1usize << c1) | (1usize << c2);
    let t = 1usize << target;
    let amps = sv.amplitudes_mut();
    for i in 0..amps.len() {
        if i & need == need && i & t == 0 {
            amps.swap(i, i | t);
        }
    }
    Ok(())
}

pub fn apply_swap(sv: &mut StateVector, a: usize, b: usize) -> Result<()> {
    check_qubits(sv, &[a, b])?;
    let (ba, bb) = (1usize << a, 1usize << b);
    let amps = sv.amplitudes_mut();
    for i in 0..amps.len() {
        if i & ba != 0 && i & bb == 0 {
            amps.swap(i, (i & !ba) | bb);
        }
    }
    Ok(())
}

/// Two-qubit c-NOT (control qubit 1, target qubit 0) built from
/// `H, c-V, c-V, H` on the target. Exact: `V^2 = Z` and `HZH = X`.
pub fn cnot_from_h_cv() -> Circuit {
    let mut c = Circuit::new(2);
    c.push(GateSpec::Matrix1Q(Gate1::H), &[0])
        .push(GateSpec::ControlledMatrix(Gate1::V), &[1, 0])
        .push(GateSpec::ControlledMatrix(Gate1::V), &[1, 0])
        .push(GateSpec::Matrix1Q(Gate1::H), &[0]);
    c
}

/// Toffoli gate from Hadamards, controlled-V/V† and two c-NOTs.
///
/// Controls are qubits 2 (`x1`) and 1 (`x2`), target is qubit 0, so the ket
/// `|x1 x2 y>` reads in the usual most-significant-first order. The target
/// picks up `V^{x2} V^{-(x1 xor x2)} V^{x1} = V^{2 x1 x2} = Z^{x1 x2}`
/// between the two Hadamards.
pub fn toffoli_from_h_cv() -> Circuit {
    let mut c = Circuit::new(3);
    c.push(GateSpec::Matrix1Q(Gate1::H), &[0])
        .push(GateSpec::ControlledMatrix(Gate1::V), &[1, 0])
        .push(GateSpec::cnot(), &[2, 1])
        .push(GateSpec::ControlledMatrix(Gate1::Vdg), &[1, 0])
        .push(GateSpec::cnot(), &[2, 1])
        .push(GateSpec::ControlledMatrix(Gate1::V), &[2, 0])
        .push(GateSpec::Matrix1Q(Gate1::H), &[0]);
    c
}

/// Prepares `cos(theta)|0> + e^{i phi} sin(theta)|1>` (up to global phase)
/// from `|0>` with the network `H, phase(2 theta), H, phase(pi/2 + phi)`.
pub fn prepare_1q(theta: f64, phi: f64) -> StateVector {
    let mut sv = StateVector::zero(1).expect("one qubit always fits");
    for g in [
        Gate1::H,
        Gate1::Phase(2.0 * theta),
        Gate1::H,
        Gate1::Phase(FRAC_PI_2 + phi),
    ] {
        apply_1q(&mut sv, &g, 0).expect("qubit 0 exists");
    }
    sv
}

pub(crate) fn mat_identity() -> Matrix2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub(crate) fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub(crate) fn mat_adjoint(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub(crate) fn mat_distance(a: &Matrix2, b: &Matrix2) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            worst = worst.max((a[r][c] - b[r][c]).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_on_zero() {
        let mut sv = StateVector::zero(1).unwrap();
        apply_1q(&mut sv, &gate_h(), 0).unwrap();
        for a in sv.amplitudes() {
            assert!((a - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn phase_zero_is_identity_and_v_squared_is_z() {
        assert!(mat_distance(&gate_phase(0.0).matrix(), &mat_identity()) < 1e-15);
        let mut sv = StateVector::basis_state(1, 1).unwrap();
        apply_1q(&mut sv, &gate_v(), 0).unwrap();
        apply_1q(&mut sv, &gate_v(), 0).unwrap();
        assert!((sv.amplitude(1) - c(-1.0, 0.0)).norm() < 1e-15);
        let mut zero = StateVector::zero(1).unwrap();
        apply_1q(&mut zero, &gate_phase(1.3), 0).unwrap();
        assert_eq!(zero, StateVector::zero(1).unwrap());
    }

    #[test]
    fn hadamards_on_101_give_alternating_signs() {
        let mut sv = StateVector::basis_state(3, 0b101).unwrap();
        for q in 0..3 {
            apply_1q(&mut sv, &Gate1::H, q).unwrap();
        }
        let signs = [1., -1., 1., -1., -1., 1., -1., 1.];
        let norm = 2f64.powf(-1.5);
        for (i, s) in signs.iter().enumerate() {
            assert!((sv.amplitude(i).re - s * norm).abs() < 1e-14, "index {i}");
        }
    }

    #[test]
    fn cnot_entangles_and_ignores_zero_control() {
        let (alpha, beta) = (0.6, 0.8);
        // Control is qubit 1 (the left ket), target qubit 0.
        let mut sv = StateVector::from_amplitudes(vec![c(alpha, 0.), c(0., 0.), c(beta, 0.), c(0., 0.)])
            .unwrap();
        apply_controlled(&mut sv, &Gate1::X, 1, 0).unwrap();
        assert!((sv.amplitude(0).re - alpha).abs() < 1e-15);
        assert!((sv.amplitude(3).re - beta).abs() < 1e-15);

        let mut b = StateVector::basis_state(2, 3).unwrap();
        apply_controlled(&mut b, &Gate1::Phase(0.7), 1, 0).unwrap();
        assert!((b.amplitude(3) - Complex64::from_polar(1.0, 0.7)).norm() < 1e-15);

        let psi = StateVector::normalized(vec![c(0.3, 0.1), c(-0.5, 0.2), c(0., 0.), c(0., 0.)]).unwrap();
        let mut out = psi.clone();
        apply_controlled(&mut out, &Gate1::H, 1, 0).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn index_errors() {
        let mut sv = StateVector::zero(2).unwrap();
        assert!(apply_1q(&mut sv, &Gate1::H, 2).is_err());
        assert!(apply_controlled(&mut sv, &Gate1::X, 1, 1).is_err());
        assert!(apply_toffoli(&mut sv, 0, 1, 1).is_err());
        let p = Permutation::identity(2);
        assert!(apply_permutation(&mut sv, &p, &[0, 1], Some(1)).is_err());
        assert!(GateSpec::Toffoli.apply(&mut sv, &[0, 1]).is_err());
    }

    #[test]
    fn v_fourth_power_and_controlled_v_cubed() {
        let v = gate_v().matrix();
        let v2 = mat_mul(&v, &v);
        assert!(mat_distance(&mat_mul(&v2, &v2), &mat_identity()) < 1e-15);
        // (c-V)^3 = (c-V)† on every basis input.
        for input in 0..4 {
            let mut a = StateVector::basis_state(2, input).unwrap();
            for _ in 0..3 {
                apply_controlled(&mut a, &Gate1::V, 1, 0).unwrap();
            }
            let mut b = StateVector::basis_state(2, input).unwrap();
            apply_controlled(&mut b, &Gate1::Vdg, 1, 0).unwrap();
            assert!(a.max_deviation(&b) < 1e-15);
        }
    }

    #[test]
    fn custom_gate_rejects_non_unitary() {
        assert!(Gate1::custom("A", [[c(1., 0.), c(1., 0.)], [c(0., 0.), c(1., 0.)]]).is_err());
        let g = Gate1::custom("S", Gate1::V.matrix()).unwrap();
        assert_eq!(g.adjoint().label(), "SDG");
    }

    #[test]
    fn pow2_matches_repeated_application() {
        for g in [Gate1::Phase(0.37), Gate1::H, Gate1::Rotation(0.2)] {
            for j in 0..5 {
                let fast = g.pow2(j).matrix();
                let mut slow = mat_identity();
                for _ in 0..(1 << j) {
                    slow = mat_mul(&slow, &g.matrix());
                }
                assert!(mat_distance(&fast, &slow) < 1e-12);
            }
        }
    }

    #[test]
    fn permutation_rules() {
        assert!(Permutation::new(2, vec![0, 1, 1, 3]).is_err());
        assert!(Permutation::new(2, vec![0, 1, 2]).is_err());
        let p = Permutation::new(2, vec![1, 2, 3, 0]).unwrap();
        assert!(p.then(&p.inverse()).is_identity());
        assert_eq!(p.pow2(1).map(), &[2, 3, 0, 1]);
        assert!(p.pow2(2).is_identity());

        // Non-contiguous block and control.
        let mut sv = StateVector::basis_state(4, 0b1001).unwrap();
        apply_permutation(&mut sv, &p, &[0, 2], Some(3)).unwrap();
        // Block value (bit0, bit2) = 1 -> 2, i.e. bit0 = 0, bit2 = 1.
        assert_eq!(sv.amplitude(0b1100).re, 1.0);
    }

    #[test]
    fn toffoli_and_swap_kernels() {
        let mut sv = StateVector::basis_state(3, 0b110).unwrap();
        apply_toffoli(&mut sv, 2, 1, 0).unwrap();
        assert_eq!(sv.amplitude(0b111).re, 1.0);
        let mut s = StateVector::basis_state(3, 0b001).unwrap();
        apply_swap(&mut s, 0, 2).unwrap();
        assert_eq!(s.amplitude(0b100).re, 1.0);
    }

    #[test]
    fn prepare_1q_examples() {
        let cases = [(0.0, 0.0), (PI / 4.0, 0.0), (PI / 6.0, PI / 2.0), (1.1, -2.3)];
        for (theta, phi) in cases {
            let got = prepare_1q(theta, phi);
            let want = StateVector::qubit(theta, phi);
            assert!(got.fidelity(&want).unwrap() > 1.0 - 1e-10, "theta={theta} phi={phi}");
        }
    }

    #[test]
    fn parallel_kernel_matches_sequential_path() {
        // 15 qubits crosses the parallel threshold; compare against a
        // 14-qubit state tensored with |0> on top.
        let small = StateVector::normalized(
            (0..1usize << 14).map(|i| c((i % 7) as f64, (i % 3) as f64)).collect(),
        )
        .unwrap();
        let big = StateVector::zero(1).unwrap().tensor(&small).unwrap();
        let (mut s, mut b) = (small.clone(), big.clone());
        apply_1q(&mut s, &Gate1::H, 3).unwrap();
        apply_1q(&mut b, &Gate1::H, 3).unwrap();
        apply_controlled(&mut s, &Gate1::Phase(0.4), 5, 9).unwrap();
        apply_controlled(&mut b, &Gate1::Phase(0.4), 5, 9).unwrap();
        let p = Permutation::new(3, vec![3, 5, 7, 1, 0, 2, 4, 6]).unwrap();
        apply_permutation(&mut s, &p, &[2, 3, 4], Some(0)).unwrap();
        apply_permutation(&mut b, &p, &[2, 3, 4], Some(0)).unwrap();
        let expanded = StateVector::zero(1).unwrap().tensor(&s).unwrap();
        assert!(expanded.max_deviation(&b) < 1e-14);
    }
}
