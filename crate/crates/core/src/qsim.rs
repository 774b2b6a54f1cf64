//! Dense statevector engine for the full `n`-qubit register plus one ancilla.
//!
//! Basis ordering: qubit `q` is bit `q` of the basis index (qubit 0 least
//! significant). When present, the ancilla is bit `n`, so the register
//! amplitudes with ancilla `|0⟩` occupy the first `2^n` entries.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schedule::PhaseSchedule;

/// Largest supported register.
pub const MAX_QUBITS: usize = 16;

/// Ancilla population above this after a circuit-realized reflection is a bug.
pub const ANCILLA_LEAK_BOUND: f64 = 1e-20;

const UNITARY_TOL: f64 = 1e-12;

/// Dense `dim × dim` unitary, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseUnitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseUnitary {
    /// Validates shape and `U†U = I` to 1e-12 (max entry deviation).
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidInstance(format!(
                "unitary of dimension {dim} needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        let u = DenseUnitary { dim, data };
        let dev = u.unitarity_defect();
        if dev > UNITARY_TOL {
            return Err(Error::InvalidInstance(format!("state preparation is not unitary (defect {dev:e})")));
        }
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    fn unitarity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.entry(k, i).conj() * self.entry(k, j);
                }
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - want).norm());
            }
        }
        worst
    }

    fn apply(&self, v: &mut [Complex64], adjoint: bool) {
        let n = self.dim;
        let out: Vec<Complex64> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let m = if adjoint { self.entry(k, i).conj() } else { self.entry(i, k) };
                        m * v[k]
                    })
                    .sum()
            })
            .collect();
        v.copy_from_slice(&out);
    }
}

/// State preparation `A` with `|s⟩ = A|0…0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub enum Prep {
    /// `H^{⊗n}`: uniform superposition.
    Uniform,
    Custom(DenseUnitary),
}

impl Prep {
    /// Applies `A` (or `A†`) to one `2^n` block.
    fn apply_block(&self, block: &mut [Complex64], adjoint: bool) {
        match self {
            Prep::Uniform => walsh_hadamard(block),
            Prep::Custom(u) => u.apply(block, adjoint),
        }
    }
}

/// Normalized in-place Walsh-Hadamard transform (self-inverse).
fn walsh_hadamard(v: &mut [Complex64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    v.iter_mut().for_each(|x| *x *= scale);
}

/// Search problem on `n` qubits with a nonempty marked set.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    n: usize,
    marked: Vec<usize>,
    prep: Prep,
}

impl ProblemInstance {
    pub fn new(n: usize, marked: impl IntoIterator<Item = usize>, prep: Prep) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidInstance(format!("qubit count must be in 1..={MAX_QUBITS}, got {n}")));
        }
        let dim = 1usize << n;
        let marked: Vec<usize> = marked.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if marked.is_empty() {
            return Err(Error::InvalidInstance("marked set is empty".into()));
        }
        if let Some(&bad) = marked.iter().find(|&&m| m >= dim) {
            return Err(Error::InvalidInstance(format!("marked index {bad} out of range for {n} qubits")));
        }
        if let Prep::Custom(u) = &prep {
            if u.dim() != dim {
                return Err(Error::InvalidInstance(format!(
                    "state preparation has dimension {}, register needs {dim}",
                    u.dim()
                )));
            }
        }
        Ok(ProblemInstance { n, marked, prep })
    }

    /// Uniform preparation with `marked = {0, …, m-1}`.
    pub fn uniform_first(n: usize, m: usize) -> Result<Self> {
        ProblemInstance::new(n, 0..m, Prep::Uniform)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn prep(&self) -> &Prep {
        &self.prep
    }

    /// `λ = ‖Π_marked |s⟩‖²`; equals `|marked| / 2^n` for uniform preparation.
    pub fn lambda(&self) -> f64 {
        match self.prep {
            Prep::Uniform => self.marked.len() as f64 / self.dim() as f64,
            Prep::Custom(_) => {
                let s = prepare(self);
                self.marked.iter().map(|&m| s.amps[m].norm_sqr()).sum()
            }
        }
    }
}

/// Dense amplitudes over `2^n` (or `2^{n+1}` with the ancilla) basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    ancilla: bool,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` register qubits.
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n, ancilla: false, amps }
    }

    pub fn from_amplitudes(n: usize, ancilla: bool, amps: Vec<Complex64>) -> Result<Self> {
        let want = 1usize << (n + ancilla as usize);
        if amps.len() != want {
            return Err(Error::InvalidInstance(format!("expected {want} amplitudes, got {}", amps.len())));
        }
        Ok(StateVector { n, ancilla, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_ancilla(&self) -> bool {
        self.ancilla
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Appends an ancilla in `|0⟩`.
    pub fn with_ancilla(&self) -> Self {
        assert!(!self.ancilla, "state already carries an ancilla");
        let mut amps = self.amps.clone();
        amps.resize(2 * amps.len(), Complex64::new(0.0, 0.0));
        StateVector { n: self.n, ancilla: true, amps }
    }

    /// Population of the ancilla `|1⟩` branch.
    pub fn ancilla_population(&self) -> f64 {
        if !self.ancilla {
            return 0.0;
        }
        self.amps[1 << self.n..].iter().map(|a| a.norm_sqr()).sum()
    }

    /// Register state on the ancilla `|0⟩` branch, ancilla dropped.
    pub fn register(&self) -> StateVector {
        StateVector { n: self.n, ancilla: false, amps: self.amps[..1 << self.n].to_vec() }
    }

    /// `Σ_{m in marked} |ψ_m|²` over the register (ancilla `|0⟩` branch).
    pub fn marked_prob(&self, marked: &[usize]) -> f64 {
        marked.iter().map(|&m| self.amps[m].norm_sqr()).sum()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm()
    }

    fn blocks_mut(&mut self) -> std::slice::ChunksMut<'_, Complex64> {
        let size = 1 << self.n;
        self.amps.chunks_mut(size)
    }

    /// Writes the binary dump: `b"FPQS"`, then little-endian `u32` version,
    /// `n` and flags (bit 0: ancilla present), then interleaved `(re, im)` `f64`s.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&(self.ancilla as u32).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..4] != DUMP_MAGIC {
            return Err(Error::Io("not a statevector dump (bad magic)".into()));
        }
        let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
        if word(4) != DUMP_VERSION {
            return Err(Error::Io(format!("unsupported dump version {}", word(4))));
        }
        let n = word(8) as usize;
        if n > MAX_QUBITS {
            return Err(Error::Io(format!("dump declares {n} qubits")));
        }
        let ancilla = word(12) & 1 == 1;
        let len = 1usize << (n + ancilla as usize);
        let mut amps = Vec::with_capacity(len);
        let mut buf = [0u8; 16];
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            amps.push(Complex64::new(re, im));
        }
        Ok(StateVector { n, ancilla, amps })
    }
}

pub const DUMP_MAGIC: &[u8; 4] = b"FPQS";
pub const DUMP_VERSION: u32 = 1;

/// `|s⟩ = A|0…0⟩`.
pub fn prepare(instance: &ProblemInstance) -> StateVector {
    let mut st = StateVector::zero(instance.n);
    instance.prep.apply_block(&mut st.amps, false);
    st
}

/// Multiplies every marked amplitude by `e^{iβ}` (on each ancilla branch).
pub fn direct_reflect_t(state: &mut StateVector, beta: f64, marked: &[usize]) {
    let phase = Complex64::from_polar(1.0, beta);
    for block in state.blocks_mut() {
        for &m in marked {
            block[m] *= phase;
        }
    }
}

/// Rank-one update `ψ ← ψ - (1 - e^{-iα}) ⟨s|ψ⟩ |s⟩`.
pub fn direct_reflect_s(state: &mut StateVector, alpha: f64, s: &StateVector) {
    let c = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -alpha);
    for block in state.blocks_mut() {
        let overlap: Complex64 = s.amps.iter().zip(block.iter()).map(|(a, b)| a.conj() * b).sum();
        let k = c * overlap;
        for (x, sv) in block.iter_mut().zip(&s.amps) {
            *x -= k * sv;
        }
    }
}

fn require_clean_ancilla(state: &StateVector) -> Result<()> {
    if !state.ancilla {
        return Err(Error::InvalidInstance("circuit reflection needs a state with an ancilla".into()));
    }
    let leak = state.ancilla_population();
    if leak > ANCILLA_LEAK_BOUND {
        return Err(Error::AncillaLeak { leak, bound: ANCILLA_LEAK_BOUND });
    }
    Ok(())
}

/// Flips the ancilla on every register index selected by `hit`.
fn controlled_ancilla_flip(state: &mut StateVector, hit: impl Iterator<Item = usize>) {
    let off = 1 << state.n;
    for idx in hit {
        state.amps.swap(idx, idx + off);
    }
}

/// `R_0(θ) = exp(-iθZ/2)` on the ancilla.
fn ancilla_rz(state: &mut StateVector, theta: f64) {
    let (lo, hi) = state.amps.split_at_mut(1 << state.n);
    let p0 = Complex64::from_polar(1.0, -theta / 2.0);
    let p1 = Complex64::from_polar(1.0, theta / 2.0);
    lo.iter_mut().for_each(|x| *x *= p0);
    hi.iter_mut().for_each(|x| *x *= p1);
}

fn finish_reflection(state: &StateVector) -> Result<f64> {
    let leak = state.ancilla_population();
    if leak > ANCILLA_LEAK_BOUND {
        return Err(Error::AncillaLeak { leak, bound: ANCILLA_LEAK_BOUND });
    }
    Ok(leak)
}

/// Oracle, `R_0(β)` on the ancilla, oracle: `e^{-iβ/2} S_t(β)` on the register.
///
/// Returns the ancilla population left behind.
pub fn circuit_reflect_t(state: &mut StateVector, beta: f64, marked: &[usize]) -> Result<f64> {
    require_clean_ancilla(state)?;
    controlled_ancilla_flip(state, marked.iter().copied());
    ancilla_rz(state, beta);
    controlled_ancilla_flip(state, marked.iter().copied());
    finish_reflection(state)
}

/// `A†`, ancilla flip controlled on the register being `|0…0⟩`, `R_0(-α)` on
/// the ancilla, the controlled flip again, then `A`: `e^{iα/2} S_s(α)`.
///
/// The multiply-controlled flip is applied directly rather than decomposed.
pub fn circuit_reflect_s(state: &mut StateVector, alpha: f64, instance: &ProblemInstance) -> Result<f64> {
    require_clean_ancilla(state)?;
    for block in state.blocks_mut() {
        instance.prep.apply_block(block, true);
    }
    controlled_ancilla_flip(state, std::iter::once(0));
    ancilla_rz(state, -alpha);
    controlled_ancilla_flip(state, std::iter::once(0));
    for block in state.blocks_mut() {
        instance.prep.apply_block(block, false);
    }
    finish_reflection(state)
}

/// Which operator realization [`run`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Reflections applied from their operator definitions.
    Direct,
    /// Reflections realized through the oracle and one ancilla.
    Circuit,
}

/// Result of simulating a schedule on a full register.
#[derive(Clone, Debug)]
pub struct RunReport {
    /// Probability on the marked set.
    pub probability: f64,
    /// Final register state (ancilla removed for the circuit engine).
    pub state: StateVector,
    /// Circuit engine only: final state including the ancilla qubit.
    pub with_ancilla: Option<StateVector>,
    /// Oracle queries issued: `2l`.
    pub queries: usize,
    /// Largest ancilla population seen after any reflection (circuit engine).
    pub max_ancilla_leak: Option<f64>,
    /// Largest `|‖ψ‖² - 1|` seen after any reflection.
    pub max_norm_drift: f64,
}

/// Applies `G(α_j, β_j) = -S_s(α_j) S_t(β_j)` for `j = 1 … l` to `|s⟩`.
///
/// The circuit engine reproduces each iterate up to a global phase.
pub fn run(schedule: &PhaseSchedule, instance: &ProblemInstance, engine: Engine) -> Result<RunReport> {
    let s = prepare(instance);
    let marked = instance.marked();
    let mut drift: f64 = 0.0;
    let mut track = |st: &StateVector| drift = drift.max((st.norm_sqr() - 1.0).abs());
    match engine {
        Engine::Direct => {
            let mut st = s.clone();
            for (alpha, beta) in schedule.iterates() {
                direct_reflect_t(&mut st, beta, marked);
                track(&st);
                direct_reflect_s(&mut st, alpha, &s);
                st.amps.iter_mut().for_each(|x| *x = -*x);
                track(&st);
            }
            Ok(RunReport {
                probability: st.marked_prob(marked),
                state: st,
                with_ancilla: None,
                queries: schedule.queries(),
                max_ancilla_leak: None,
                max_norm_drift: drift,
            })
        }
        Engine::Circuit => {
            let mut st = s.with_ancilla();
            let mut leak: f64 = 0.0;
            for (alpha, beta) in schedule.iterates() {
                leak = leak.max(circuit_reflect_t(&mut st, beta, marked)?);
                track(&st);
                leak = leak.max(circuit_reflect_s(&mut st, alpha, instance)?);
                track(&st);
            }
            let reg = st.register();
            Ok(RunReport {
                probability: reg.marked_prob(marked),
                state: reg,
                with_ancilla: Some(st),
                queries: schedule.queries(),
                max_ancilla_leak: Some(leak),
                max_norm_drift: drift,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{fixed_point_phases, Mode};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        // Small LCG; test-only and deterministic.
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut amps: Vec<Complex64> = (0..1 << n).map(|_| c(next(), next())).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(n, false, amps).unwrap()
    }

    fn global_phase_fidelity(a: &StateVector, b: &StateVector) -> f64 {
        a.fidelity(b)
    }

    #[test]
    fn prepare_examples() {
        let inst = ProblemInstance::new(1, [1], Prep::Uniform).unwrap();
        let s = prepare(&inst);
        assert!((s.amps[0].re - FRAC_1_SQRT_2).abs() < 1e-15 && (s.amps[1].re - FRAC_1_SQRT_2).abs() < 1e-15);

        let inst = ProblemInstance::new(3, [5], Prep::Uniform).unwrap();
        assert_eq!(inst.lambda(), 0.125);

        let mut id = vec![c(0.0, 0.0); 16];
        for i in 0..4 {
            id[i * 4 + i] = c(1.0, 0.0);
        }
        let inst = ProblemInstance::new(2, [3], Prep::Custom(DenseUnitary::new(4, id).unwrap())).unwrap();
        let s = prepare(&inst);
        assert_eq!(s.amps, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(inst.lambda(), 0.0);
    }

    #[test]
    fn instance_validation() {
        assert!(ProblemInstance::new(17, [0], Prep::Uniform).is_err());
        assert!(ProblemInstance::new(0, [0], Prep::Uniform).is_err());
        assert!(ProblemInstance::new(3, [8], Prep::Uniform).is_err());
        assert!(ProblemInstance::new(3, [], Prep::Uniform).is_err());
        let bad = DenseUnitary::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(bad.is_err());
        let h = DenseUnitary::new(2, vec![c(FRAC_1_SQRT_2, 0.0); 4]);
        assert!(h.is_err());
        let inst = ProblemInstance::new(3, [2, 2, 1], Prep::Uniform).unwrap();
        assert_eq!(inst.marked(), &[1, 2]);
    }

    #[test]
    fn reflect_t_examples() {
        let psi = random_state(3, 1);
        let mut out = psi.clone();
        direct_reflect_t(&mut out, 0.0, &[1, 6]);
        assert_eq!(out, psi);

        direct_reflect_t(&mut out, PI, &[1, 6]);
        for i in 0..8 {
            let want = if i == 1 || i == 6 { -psi.amps[i] } else { psi.amps[i] };
            assert!((out.amps[i] - want).norm() < 1e-15);
        }

        let mut out = psi.clone();
        direct_reflect_t(&mut out, PI / 2.0, &[4]);
        assert!((out.amps[4] - c(0.0, 1.0) * psi.amps[4]).norm() < 1e-15);
    }

    #[test]
    fn reflect_s_examples() {
        let inst = ProblemInstance::uniform_first(3, 1).unwrap();
        let s = prepare(&inst);
        let psi = random_state(3, 2);
        let mut out = psi.clone();
        direct_reflect_s(&mut out, 0.0, &s);
        assert_eq!(out, psi);

        let mut out = s.clone();
        direct_reflect_s(&mut out, PI, &s);
        for (a, b) in out.amps.iter().zip(&s.amps) {
            assert!((a + b).norm() < 1e-15);
        }
    }

    #[test]
    fn reflect_s_is_grover_diffusion() {
        // Dense oracle: (2|s⟩⟨s| - I) ψ, compared with -S_s(π) ψ.
        for n in 1..=4 {
            let inst = ProblemInstance::uniform_first(n, 1).unwrap();
            let s = prepare(&inst);
            let psi = random_state(n, 10 + n as u64);
            let dim = 1 << n;
            let mut want = vec![c(0.0, 0.0); dim];
            for (i, w) in want.iter_mut().enumerate() {
                for j in 0..dim {
                    let m = 2.0 * s.amps[i].re * s.amps[j].re - if i == j { 1.0 } else { 0.0 };
                    *w += m * psi.amps[j];
                }
            }
            let mut got = psi.clone();
            direct_reflect_s(&mut got, PI, &s);
            for (g, w) in got.amps.iter().zip(&want) {
                assert!((g + w).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn circuit_t_matches_direct_up_to_phase() {
        for &beta in &[0.0, 0.4, -2.1, PI] {
            let psi = random_state(4, 3);
            let marked = [2, 7, 11];
            let mut d = psi.clone();
            direct_reflect_t(&mut d, beta, &marked);
            let mut cst = psi.with_ancilla();
            let leak = circuit_reflect_t(&mut cst, beta, &marked).unwrap();
            assert!(leak <= ANCILLA_LEAK_BOUND);
            let reg = cst.register();
            let phase = Complex64::from_polar(1.0, -beta / 2.0);
            for (a, b) in reg.amps.iter().zip(&d.amps) {
                assert!((a - phase * b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn circuit_t_all_marked_is_global_phase() {
        let psi = random_state(2, 4);
        let mut cst = psi.with_ancilla();
        circuit_reflect_t(&mut cst, 1.1, &[0, 1, 2, 3]).unwrap();
        let phase = Complex64::from_polar(1.0, 1.1 / 2.0);
        for (a, b) in cst.register().amps.iter().zip(&psi.amps) {
            assert!((a - phase * b).norm() < 1e-14);
        }
    }

    #[test]
    fn circuit_s_matches_direct_up_to_phase() {
        let inst = ProblemInstance::new(4, [3, 9], Prep::Uniform).unwrap();
        let s = prepare(&inst);
        for &alpha in &[0.0, 0.7, -1.3, PI] {
            let psi = random_state(4, 5);
            let mut d = psi.clone();
            direct_reflect_s(&mut d, alpha, &s);
            let mut cst = psi.with_ancilla();
            circuit_reflect_s(&mut cst, alpha, &inst).unwrap();
            let reg = cst.register();
            assert!((global_phase_fidelity(&reg, &d) - 1.0).abs() < 1e-12);
            let phase = Complex64::from_polar(1.0, alpha / 2.0);
            for (a, b) in reg.amps.iter().zip(&d.amps) {
                assert!((a - phase * b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn circuit_s_single_qubit_hadamard() {
        // H · diag(-1, 1) · H on one qubit, against the circuit with α = π.
        let inst = ProblemInstance::new(1, [1], Prep::Uniform).unwrap();
        let psi = StateVector::from_amplitudes(1, false, vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let h = FRAC_1_SQRT_2;
        let hm = [[h, h], [h, -h]];
        let z0 = [-1.0, 1.0];
        let mut want = [c(0.0, 0.0); 2];
        for i in 0..2 {
            for j in 0..2 {
                let m: f64 = (0..2).map(|k| hm[i][k] * z0[k] * hm[k][j]).sum();
                want[i] += m * psi.amps[j];
            }
        }
        let mut cst = psi.with_ancilla();
        circuit_reflect_s(&mut cst, PI, &inst).unwrap();
        let reg = cst.register();
        let f = (reg.amps[0].conj() * want[0] + reg.amps[1].conj() * want[1]).norm();
        assert!((f - 1.0).abs() < 1e-14);
    }

    #[test]
    fn circuit_requires_ancilla() {
        let inst = ProblemInstance::uniform_first(2, 1).unwrap();
        let mut st = prepare(&inst);
        assert!(circuit_reflect_t(&mut st, 0.3, &[0]).is_err());
        let mut dirty = st.with_ancilla();
        dirty.amps[4] = c(0.1, 0.0);
        assert!(matches!(circuit_reflect_s(&mut dirty, 0.3, &inst), Err(Error::AncillaLeak { .. })));
    }

    #[test]
    fn empty_schedule_gives_lambda() {
        let inst = ProblemInstance::new(1, [1], Prep::Uniform).unwrap();
        let s = fixed_point_phases(0, 0.5, Mode::Amplify).unwrap();
        for engine in [Engine::Direct, Engine::Circuit] {
            let r = run(&s, &inst, engine).unwrap();
            assert!((r.probability - 0.5).abs() < 1e-15);
            assert_eq!(r.queries, 0);
        }
    }

    #[test]
    fn dump_round_trip() {
        let st = random_state(3, 9).with_ancilla();
        let mut buf = Vec::new();
        st.write_dump(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 16 * 16);
        assert_eq!(&buf[..4], b"FPQS");
        assert_eq!(&buf[4..16], &[1, 0, 0, 0, 3, 0, 0, 0, 1, 0, 0, 0]);
        let back = StateVector::read_dump(&buf[..]).unwrap();
        assert_eq!(back, st);
        assert!(StateVector::read_dump(&b"XXXX0000000000000000"[..]).is_err());
    }
}
