//! Dense brute-force engine for small registers.
//!
//! Qubit order is electron first, then nuclei in list order, big-endian.

mod matrix;

pub use matrix::CMat;

use crate::error::{invalid, Error, Result};
use crate::spin_model::{
    branch_field, unit_propagator, ConditionalRotation, Electron, NuclearSpin, PulseSequence,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Largest qubit count for a dense propagator matrix.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Largest qubit count for state-vector evolution.
pub const MAX_STATE_QUBITS: usize = 14;

/// Largest environment handled by [`numeric_kraus_fidelity`].
pub const MAX_KRAUS_ENV: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn qubits_of(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return invalid(format!("dimension {dim} is not a power of two"));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Pure state of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        qubits_of(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return invalid(format!("state norm² is {norm}, expected 1"));
        }
        Ok(Self { amps })
    }

    /// `⊗_q ψ_q`, first factor is the most significant qubit.
    pub fn product(factors: &[[Complex64; 2]]) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_STATE_QUBITS {
            return Err(Error::Capacity(format!("{} qubits", factors.len())));
        }
        let mut amps = vec![ONE];
        for f in factors {
            amps = amps.iter().flat_map(|a| [a * f[0], a * f[1]]).collect();
        }
        Self::new(amps)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_STATE_QUBITS || index >> n != 0 {
            return invalid(format!("basis state {index} of {n} qubits"));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Self { amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn evolve(&self, u: &CMat) -> Result<Self> {
        if u.dim() != self.amps.len() {
            return invalid("operator and state dimensions differ");
        }
        Ok(Self {
            amps: u.apply(&self.amps),
        })
    }

    /// Reduced density matrix of one qubit.
    pub fn reduced(&self, qubit: usize) -> Result<[[Complex64; 2]; 2]> {
        let n = self.qubits();
        if qubit >= n {
            return invalid(format!("qubit {qubit} out of range for {n} qubits"));
        }
        let shift = n - 1 - qubit;
        let mut rho = [[ZERO; 2]; 2];
        for (idx, a) in self.amps.iter().enumerate() {
            if (idx >> shift) & 1 == 0 {
                let b = self.amps[idx | (1 << shift)];
                rho[0][0] += a.norm_sqr();
                rho[1][1] += b.norm_sqr();
                rho[0][1] += a * b.conj();
            }
        }
        rho[1][0] = rho[0][1].conj();
        Ok(rho)
    }
}

/// `1 − tr ρ_q²` for single qubit `qubit`.
pub fn linear_entropy(state: &DenseState, qubit: usize) -> Result<f64> {
    let r = state.reduced(qubit)?;
    let purity = r[0][0].re.powi(2) + r[1][1].re.powi(2) + 2.0 * r[0][1].norm_sqr();
    Ok(1.0 - purity)
}

fn mat2(m: crate::spin_model::Mat2) -> CMat {
    CMat::from_array(m)
}

/// `Σ_j σ_jj ⊗ (⊗_l R_j^{(l)})`.
pub fn dense_from_rotations(rots: &[ConditionalRotation]) -> Result<CMat> {
    let n = rots.len() + 1;
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!(
            "{n} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}"
        )));
    }
    let half = 1usize << rots.len();
    let mut out = CMat::zeros(2 * half);
    for j in 0..2 {
        let block = rots.iter().fold(CMat::identity(1), |acc, r| {
            acc.kron(&mat2(r.branch[j].to_matrix()))
        });
        for a in 0..half {
            for b in 0..half {
                out[(j * half + a, j * half + b)] = block[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Dense propagator of `n` sequence units on the electron plus `register`.
pub fn dense_propagator(
    register: &[NuclearSpin],
    electron: &Electron,
    seq: &PulseSequence,
    n: u64,
) -> Result<CMat> {
    let rots: Vec<_> = register
        .iter()
        .map(|s| unit_propagator(seq, s, electron).iterate(n))
        .collect();
    dense_from_rotations(&rots)
}

/// Full Hamiltonian `Σ_j σ_jj ⊗ Σ_l H_j^{(l)}`.
fn hamiltonian(register: &[NuclearSpin], electron: &Electron) -> CMat {
    let m = register.len();
    let half = 1usize << m;
    let mut h = CMat::zeros(2 * half);
    for j in 0..2 {
        for (l, spin) in register.iter().enumerate() {
            let (hz, hx) = branch_field(spin, electron, j);
            let shift = m - 1 - l;
            for idx in 0..half {
                let bit = (idx >> shift) & 1;
                let sign = if bit == 0 { 1.0 } else { -1.0 };
                h[(j * half + idx, j * half + idx)] += Complex64::new(0.5 * hz * sign, 0.0);
                let flip = idx ^ (1 << shift);
                h[(j * half + flip, j * half + idx)] += Complex64::new(0.5 * hx, 0.0);
            }
        }
    }
    h
}

/// Propagator from matrix exponentials of the full Hamiltonian between
/// instantaneous electron π pulses.
pub fn piecewise_propagator(
    register: &[NuclearSpin],
    electron: &Electron,
    seq: &PulseSequence,
    n: u64,
) -> Result<CMat> {
    let q = register.len() + 1;
    if q > MAX_DENSE_QUBITS {
        return Err(Error::Capacity(format!("{q} qubits")));
    }
    let h = hamiltonian(register, electron);
    let half = 1usize << register.len();
    let x = CMat::from_array([[ZERO, ONE], [ONE, ZERO]]).kron(&CMat::identity(half));
    let t = seq.unit_time();
    let mut unit = CMat::identity(2 * half);
    for (i, qs) in seq.spacings().iter().enumerate() {
        if i > 0 {
            unit = x.mul(&unit);
        }
        let step = h.scale(Complex64::new(0.0, -qs * t)).expm();
        unit = step.mul(&unit);
    }
    Ok(unit.pow(n))
}

/// Haar-random single-qubit state from two complex Gaussians.
fn haar_qubit(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
    let mut g = || -> f64 { StandardNormal.sample(rng) };
    let v = [Complex64::new(g(), g()), Complex64::new(g(), g())];
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / norm, v[1] / norm]
}

/// Haar-random product state of `n` qubits.
pub fn haar_product_state(n: usize, rng: &mut ChaCha8Rng) -> Result<DenseState> {
    let factors: Vec<_> = (0..n).map(|_| haar_qubit(rng)).collect();
    DenseState::product(&factors)
}

const MC_BLOCK: usize = 1024;

/// Mean one-tangle of `qubit` after `u`, over Haar product inputs, with its standard error.
///
/// Each block of samples draws from its own ChaCha8 stream, so the result is
/// independent of the thread count.
pub fn mc_bipartition_entangling_power(
    u: &CMat,
    qubit: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let n = qubits_of(u.dim())?;
    if qubit >= n {
        return invalid(format!("qubit {qubit} out of range"));
    }
    if samples < 2 {
        return invalid("at least two samples are required");
    }
    let blocks = samples.div_ceil(MC_BLOCK);
    let sums: Vec<Result<(f64, f64)>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut acc = (0.0, 0.0);
            for _ in 0..count {
                let psi = haar_product_state(n, &mut rng)?.evolve(u)?;
                let e = linear_entropy(&psi, qubit)?;
                acc.0 += e;
                acc.1 += e * e;
            }
            Ok(acc)
        })
        .collect();
    let (mut s, mut s2) = (0.0, 0.0);
    for r in sums {
        let (a, b) = r?;
        s += a;
        s2 += b;
    }
    let m = samples as f64;
    let mean = s / m;
    let var = ((s2 - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok((mean, (var / m).sqrt()))
}

/// Kraus operators `E_i = ⟨ẽ_i|U|e_0⟩` on the first `k + 1` qubits.
pub fn numeric_kraus_operators(u: &CMat, k: usize) -> Result<Vec<CMat>> {
    let n = qubits_of(u.dim())?;
    if k + 1 > n {
        return invalid(format!("{k} targets do not fit in {n} qubits"));
    }
    let env = n - k - 1;
    if env > MAX_KRAUS_ENV {
        return Err(Error::Capacity(format!(
            "{env} environment qubits exceeds the limit of {MAX_KRAUS_ENV}"
        )));
    }
    let m = 1usize << (k + 1);
    let e = 1usize << env;
    Ok((0..e)
        .map(|i| {
            let mut op = CMat::zeros(m);
            for a in 0..m {
                for b in 0..m {
                    op[(a, b)] = u[(a * e + i, b * e)];
                }
            }
            op
        })
        .collect())
}

/// Average fidelity of the reduced channel against `target`, from its Kraus operators.
pub fn numeric_kraus_fidelity(u: &CMat, target: &CMat, k: usize) -> Result<f64> {
    let ops = numeric_kraus_operators(u, k)?;
    let m = 1usize << (k + 1);
    if target.dim() != m {
        return invalid(format!("target gate must be {m}×{m}"));
    }
    let td = target.adjoint();
    let mut completeness = CMat::zeros(m);
    let mut overlap = 0.0;
    for e in &ops {
        completeness = completeness.add(&e.adjoint().mul(e));
        overlap += td.mul(e).trace().norm_sqr();
    }
    let mf = m as f64;
    Ok((completeness.trace().re + overlap) / (mf * (mf + 1.0)))
}

/// Magic basis change `Q`.
fn magic_basis() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = Complex64::new(s, 0.0);
    let i = Complex64::new(0.0, s);
    CMat::from_array([
        [r, ZERO, ZERO, i],
        [ZERO, i, r, ZERO],
        [ZERO, i, -r, ZERO],
        [r, ZERO, ZERO, -i],
    ])
}

/// Makhlin invariants `(G1, G2)` of a 4×4 unitary from its magic-basis form.
pub fn magic_basis_invariants(u: &CMat) -> Result<(f64, f64)> {
    if u.dim() != 4 {
        return invalid("Makhlin invariants need a two-qubit gate");
    }
    let q = magic_basis();
    let ub = q.adjoint().mul(u).mul(&q);
    let m = ub.transpose().mul(&ub);
    let det = u.det();
    let tr = m.trace();
    let tr2 = m.mul(&m).trace();
    let g1 = (tr * tr / (det * 16.0)).norm();
    let g2 = ((tr * tr - tr2) / (det * 4.0)).re;
    Ok((g1, g2))
}

/// Controlled gate `|0⟩⟨0|⊗R0 + |1⟩⟨1|⊗R1` as a dense matrix.
pub fn controlled_gate(rot: &ConditionalRotation) -> CMat {
    CMat::from_array(rot.controlled_matrix())
}
