//! Exact simulation in the two-dimensional subspace spanned by `|t̄⟩` and `|t⟩`,
//! the closed-form success probability and width, and the Grover / π/3
//! reference algorithms.

use num_complex::Complex64;
use serde::Serialize;

use crate::cheb::{arccosh_recip, dolph_chebyshev_ratio, gamma_of};
use crate::error::{Error, Result};
use crate::schedule::{Mode, PhaseSchedule};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Problem parameters: target overlap `λ = |⟨T|s⟩|²` and error bound `δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchParams {
    lambda: f64,
    delta: f64,
    xi: f64,
}

impl SearchParams {
    pub fn new(lambda: f64, delta: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::Domain(format!("lambda must lie in (0, 1], got {lambda}")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Domain(format!("delta must lie in [0, 1], got {delta}")));
        }
        Ok(SearchParams { lambda, delta, xi: 0.0 })
    }

    /// Overlap phase `ξ` of `⟨T|s⟩ = √λ e^{iξ}`; the 2D model absorbs it into `|t⟩`.
    pub fn with_xi(self, xi: f64) -> Self {
        SearchParams { xi, ..self }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Bloch polar angle of `|s⟩`, `sin(φ/2) = √λ`.
    pub fn phi(&self) -> f64 {
        2.0 * self.lambda.sqrt().asin()
    }

    /// Success threshold `1 - δ²`.
    pub fn target(&self) -> f64 {
        1.0 - self.delta * self.delta
    }
}

/// Amplitudes on `|t̄⟩` and `|t⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelState {
    pub a_tbar: Complex64,
    pub a_t: Complex64,
}

impl TwoLevelState {
    pub fn new(a_tbar: Complex64, a_t: Complex64) -> Self {
        TwoLevelState { a_tbar, a_t }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a_tbar.norm_sqr() + self.a_t.norm_sqr()
    }

    /// `|⟨t|ψ⟩|²`.
    pub fn success_prob(&self) -> f64 {
        self.a_t.norm_sqr()
    }

    /// `|⟨t̄|ψ⟩|²`.
    pub fn avoid_prob(&self) -> f64 {
        self.a_tbar.norm_sqr()
    }

    /// Relative phase `χ` of the target amplitude; reported, never constrained.
    pub fn chi(&self) -> f64 {
        (self.a_t * self.a_tbar.conj()).arg()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &TwoLevelState) -> f64 {
        (self.a_tbar.conj() * other.a_tbar + self.a_t.conj() * other.a_t).norm()
    }

    fn scale(self, c: Complex64) -> Self {
        TwoLevelState::new(c * self.a_tbar, c * self.a_t)
    }
}

/// `|s⟩ = (√(1-λ), √λ)`.
pub fn initial_state(params: &SearchParams) -> TwoLevelState {
    initial_state_at(params.lambda)
}

fn initial_state_at(lambda: f64) -> TwoLevelState {
    TwoLevelState::new(Complex64::new((1.0 - lambda).sqrt(), 0.0), Complex64::new(lambda.sqrt(), 0.0))
}

/// `S_s(α) = I - (1 - e^{-iα}) |s⟩⟨s|`.
pub fn reflect_s(state: TwoLevelState, alpha: f64, lambda: f64) -> TwoLevelState {
    let c = ONE - Complex64::from_polar(1.0, -alpha);
    let s = initial_state_at(lambda);
    // ⟨s|ψ⟩ with real s
    let overlap = s.a_tbar.re * state.a_tbar + s.a_t.re * state.a_t;
    TwoLevelState::new(state.a_tbar - c * overlap * s.a_tbar.re, state.a_t - c * overlap * s.a_t.re)
}

/// `S_t(β) = diag(1, e^{iβ})`.
pub fn reflect_t(state: TwoLevelState, beta: f64) -> TwoLevelState {
    TwoLevelState::new(state.a_tbar, state.a_t * Complex64::from_polar(1.0, beta))
}

/// `G(α, β) = -S_s(α) S_t(β)`.
pub fn grover_iterate(state: TwoLevelState, alpha: f64, beta: f64, lambda: f64) -> TwoLevelState {
    reflect_s(reflect_t(state, beta), alpha, lambda).scale(-ONE)
}

/// `S_L |s⟩`, iterates applied in index order `j = 1 … l`.
pub fn apply_sequence(schedule: &PhaseSchedule, params: &SearchParams) -> TwoLevelState {
    run_iterates(schedule.iterates(), params.lambda)
}

fn run_iterates(iterates: impl Iterator<Item = (f64, f64)>, lambda: f64) -> TwoLevelState {
    iterates.fold(initial_state_at(lambda), |st, (a, b)| grover_iterate(st, a, b, lambda))
}

/// Simulated success probability for an arbitrary `λ in [0, 1]`.
///
/// `λ = 0` is outside the model (no overlap with the target); it yields
/// probability 0 and sets `zero_overlap`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimOutcome {
    pub probability: f64,
    pub zero_overlap: bool,
}

pub fn simulate_success(schedule: &PhaseSchedule, lambda: f64) -> Result<SimOutcome> {
    if lambda == 0.0 {
        return Ok(SimOutcome { probability: 0.0, zero_overlap: true });
    }
    let params = SearchParams::new(lambda, schedule.delta())?;
    Ok(SimOutcome { probability: apply_sequence(schedule, &params).success_prob(), zero_overlap: false })
}

/// Success probability of the raw iterate list `(α_j, β_j)` at overlap `λ`.
pub fn iterate_success(alphas: &[f64], betas: &[f64], lambda: f64) -> f64 {
    run_iterates(alphas.iter().copied().zip(betas.iter().copied()), lambda).success_prob()
}

/// Closed-form success probability
/// `P_L = 1 - δ² T_L(T_{1/L}(1/δ) √(1-λ))²`, with `1 - (1-λ)^L` at `δ = 0`.
pub fn success_prob_closed(big_l: usize, delta: f64, lambda: f64) -> f64 {
    let x = (1.0 - lambda).max(0.0).sqrt();
    if delta == 0.0 {
        return 1.0 - (1.0 - lambda).powi(big_l as i32);
    }
    let a = dolph_chebyshev_ratio(big_l, gamma_of(delta, big_l), x);
    (1.0 - a * a).clamp(0.0, 1.0)
}

/// Width `w = 1 - T_{1/L}(1/δ)^{-2}`: the guarantee `P_L >= 1 - δ²` holds for all `λ >= w`.
///
/// Evaluated as `tanh²(arccosh(1/δ)/L)`. Returns 1 at `δ = 0`.
pub fn width(big_l: usize, delta: f64) -> f64 {
    if delta == 0.0 {
        return 1.0;
    }
    let t = (arccosh_recip(delta) / big_l as f64).tanh();
    t * t
}

/// Large-`L`, small-`δ` approximation `(log(2/δ)/L)²` of the width.
pub fn width_approx(big_l: usize, delta: f64) -> f64 {
    let r = (2.0 / delta).ln() / big_l as f64;
    r * r
}

/// Shortest sequence meeting a bound over `λ >= λ_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QueryCount {
    #[serde(rename = "L")]
    pub big_l: usize,
    pub queries: usize,
    /// Exact width at `big_l`.
    pub width: f64,
    /// `log(2/δ)/√λ_0`.
    pub analytic_bound: f64,
}

/// Smallest odd `L` with `width(L, δ) <= λ_0`, and its query count `L - 1`.
pub fn min_queries(delta: f64, lambda0: f64) -> Result<QueryCount> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1], got {delta}")));
    }
    if !(lambda0 > 0.0 && lambda0 <= 1.0) {
        return Err(Error::Domain(format!("lambda0 must lie in (0, 1], got {lambda0}")));
    }
    // width(L) <= λ0  <=>  L >= arccosh(1/δ) / artanh(√λ0); start just below and walk up.
    let est = if lambda0 >= 1.0 { 1.0 } else { arccosh_recip(delta) / lambda0.sqrt().atanh() };
    let mut big_l = (est.floor() as usize).saturating_sub(2).max(1) | 1;
    while big_l > 1 && width(big_l - 2, delta) <= lambda0 {
        big_l -= 2;
    }
    while width(big_l, delta) > lambda0 {
        big_l += 2;
    }
    Ok(QueryCount {
        big_l,
        queries: big_l - 1,
        width: width(big_l, delta),
        analytic_bound: (2.0 / delta).ln() / lambda0.sqrt(),
    })
}

/// Least-squares constant `c` in `queries ≈ c / √λ_0` over the given `λ_0` values.
pub fn fit_query_scaling(delta: f64, lambda0s: &[f64]) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for &lam in lambda0s {
        let q = min_queries(delta, lam)?.queries as f64;
        let s = 1.0 / lam.sqrt();
        num += q * s;
        den += s * s;
    }
    Ok(num / den)
}

/// `R_0(θ) = exp(-iθZ/2)`.
fn rz(theta: f64, st: TwoLevelState) -> TwoLevelState {
    TwoLevelState::new(
        st.a_tbar * Complex64::from_polar(1.0, -theta / 2.0),
        st.a_t * Complex64::from_polar(1.0, theta / 2.0),
    )
}

/// `A_ζ = exp(-i(φ/2)(cos ζ X + sin ζ Y))` acting on `(|t̄⟩, |t⟩)`.
fn pulse(zeta: f64, half_phi: f64, st: TwoLevelState) -> TwoLevelState {
    let (s, c) = half_phi.sin_cos();
    let off_lo = -I * s * Complex64::from_polar(1.0, -zeta);
    let off_hi = -I * s * Complex64::from_polar(1.0, zeta);
    TwoLevelState::new(c * st.a_tbar + off_lo * st.a_t, off_hi * st.a_tbar + c * st.a_t)
}

/// Composite-pulse form `R_0(c) (A_{ζ_L} … A_{ζ_1}) R_0(-c) |t̄⟩` of `S_L|s⟩`.
///
/// The frame angle is `c = π/2 - ζ_1`, which aligns the first pulse with the
/// state preparation `A = A_{π/2}`; the result then equals `S_L|s⟩` up to a
/// global phase.
pub fn pulse_form_state(schedule: &PhaseSchedule, params: &SearchParams) -> Result<TwoLevelState> {
    let zetas = schedule.zeta_sequence()?.zetas;
    let half_phi = params.phi() / 2.0;
    let frame = std::f64::consts::FRAC_PI_2 - zetas[0];
    let start = rz(-frame, TwoLevelState::new(ONE, ZERO));
    let out = zetas.iter().fold(start, |st, &z| pulse(z, half_phi, st));
    Ok(rz(frame, out))
}

/// Trajectory of the pulse recurrence `(a_h, b_h) = A_{ζ_h}(a_{h-1}, b_{h-1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeTrace {
    /// `a_0 … a_L`, amplitude on `|t̄⟩`.
    pub a: Vec<Complex64>,
    /// `b_0 … b_L`, amplitude on `|t⟩`.
    pub b: Vec<Complex64>,
    /// Largest `|b'_h + a_{h-1}|` over `h = 1 … L`, with
    /// `b'_h = -x a_h - i√(1-x²) e^{-iζ_h} b_h`.
    pub aux_residual: f64,
}

impl AmplitudeTrace {
    /// `1 - |a_L|²`.
    pub fn success_prob(&self) -> f64 {
        1.0 - self.a.last().map_or(1.0, |a| a.norm_sqr())
    }
}

/// Runs the pulse recurrence from `(a_0, b_0) = (1, 0)` over `ζ_1 … ζ_L`.
pub fn amplitude_recurrence(schedule: &PhaseSchedule, params: &SearchParams) -> Result<AmplitudeTrace> {
    let zetas = schedule.zeta_sequence()?.zetas;
    let half_phi = params.phi() / 2.0;
    let x = half_phi.cos();
    let sx = half_phi.sin();
    let mut a = vec![ONE];
    let mut b = vec![ZERO];
    let mut aux_residual: f64 = 0.0;
    for &z in &zetas {
        let prev = TwoLevelState::new(*a.last().unwrap(), *b.last().unwrap());
        let next = pulse(z, half_phi, prev);
        let aux = -x * next.a_tbar - I * sx * Complex64::from_polar(1.0, -z) * next.a_t;
        aux_residual = aux_residual.max((aux + prev.a_tbar).norm());
        a.push(next.a_tbar);
        b.push(next.a_t);
    }
    Ok(AmplitudeTrace { a, b, aux_residual })
}

/// Grover's search with `l` standard iterates: `sin²((2l+1) arcsin √λ)`.
pub fn grover_reference(l: usize, lambda: f64) -> f64 {
    ((2 * l + 1) as f64 * lambda.sqrt().asin()).sin().powi(2)
}

/// Success and query count of the π/3 algorithm after `k` recursion levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Pi3Result {
    pub probability: f64,
    pub queries: usize,
}

/// `P = 1 - (1-λ)^{3^k}`, `queries = 3^k - 1`.
pub fn pi3_reference(k: u32, lambda: f64) -> Pi3Result {
    let len = 3usize.pow(k);
    Pi3Result { probability: 1.0 - (1.0 - lambda).powi(len as i32), queries: len - 1 }
}

/// Smallest recursion level of the π/3 algorithm reaching `target` at every
/// `λ >= λ_0` (its success probability is monotone in `λ`).
pub fn pi3_min_level(lambda0: f64, target: f64) -> Result<(u32, Pi3Result)> {
    if !(lambda0 > 0.0 && lambda0 <= 1.0) || target >= 1.0 {
        return Err(Error::Domain(format!("need lambda0 in (0, 1] and target < 1, got {lambda0} and {target}")));
    }
    let mut k = 0;
    loop {
        let r = pi3_reference(k, lambda0);
        if r.probability >= target {
            return Ok((k, r));
        }
        k += 1;
        if k > 30 {
            return Err(Error::Domain(format!("lambda0 = {lambda0} is too small for the pi/3 algorithm")));
        }
    }
}

/// `|⟨t̄|S_L|s⟩|²` for a target-avoiding schedule.
///
/// Follows the same Dolph-Chebyshev law as amplification, with the overlap of
/// the avoided component: `P_L(1 - λ)`.
pub fn avoidance_prob(schedule: &PhaseSchedule, params: &SearchParams) -> Result<f64> {
    if schedule.mode() != Mode::Avoid {
        return Err(Error::ModeMismatch { expected: "avoid" });
    }
    Ok(apply_sequence(schedule, params).avoid_prob())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::cheb_t;
    use crate::schedule::{fixed_point_phases, nest_chain};
    use std::f64::consts::PI;

    fn params(lambda: f64) -> SearchParams {
        SearchParams::new(lambda, 0.0).unwrap()
    }

    // 2x2 matrix oracle for S_s(α).
    fn ss_matrix(alpha: f64, lambda: f64) -> [[Complex64; 2]; 2] {
        let c = ONE - Complex64::from_polar(1.0, -alpha);
        let lb = 1.0 - lambda;
        let off = -c * (lambda * lb).sqrt();
        [[ONE - c * lb, off], [off, ONE - c * lambda]]
    }

    fn mat_apply(m: [[Complex64; 2]; 2], st: TwoLevelState) -> TwoLevelState {
        TwoLevelState::new(m[0][0] * st.a_tbar + m[0][1] * st.a_t, m[1][0] * st.a_tbar + m[1][1] * st.a_t)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn params_validation() {
        assert!(SearchParams::new(0.0, 0.5).is_err());
        assert!(SearchParams::new(1.2, 0.5).is_err());
        assert!(SearchParams::new(0.5, -0.1).is_err());
        let p = SearchParams::new(0.25, 0.3).unwrap();
        assert!((p.phi() - PI / 3.0).abs() < 1e-15);
        assert!((p.target() - 0.91).abs() < 1e-15);
        assert_eq!(p.with_xi(0.4).xi(), 0.4);
    }

    #[test]
    fn initial_states() {
        let s = initial_state(&params(1.0));
        assert_eq!((s.a_tbar.re, s.a_t.re), (0.0, 1.0));
        let s = initial_state(&params(0.25));
        assert!((s.a_tbar.re - 0.75f64.sqrt()).abs() < 1e-16 && (s.a_t.re - 0.5).abs() < 1e-16);
        let s = initial_state(&params(0.5));
        assert!((s.a_tbar.re - s.a_t.re).abs() < 1e-16);
    }

    #[test]
    fn reflect_s_examples() {
        let psi = TwoLevelState::new(Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.9));
        let out = reflect_s(psi, 0.0, 0.3);
        assert!(close(out.a_tbar, psi.a_tbar) && close(out.a_t, psi.a_t));

        let s = initial_state(&params(0.3));
        let out = reflect_s(s, PI, 0.3);
        assert!(close(out.a_tbar, -s.a_tbar) && close(out.a_t, -s.a_t));

        let out = reflect_s(TwoLevelState::new(ONE, ZERO), PI, 0.5);
        assert!(close(out.a_tbar, ZERO) && close(out.a_t, -ONE));

        for &alpha in &[0.3, -1.2, 2.9] {
            for &lambda in &[0.01, 0.4, 0.99] {
                let want = mat_apply(ss_matrix(alpha, lambda), psi);
                let got = reflect_s(psi, alpha, lambda);
                assert!(close(want.a_tbar, got.a_tbar) && close(want.a_t, got.a_t));
            }
        }
    }

    #[test]
    fn reflect_t_examples() {
        let psi = TwoLevelState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        assert_eq!(reflect_t(psi, 0.0), psi);
        let f = reflect_t(psi, PI);
        assert!(close(f.a_tbar, psi.a_tbar) && close(f.a_t, -psi.a_t));
        let f = reflect_t(TwoLevelState::new(ZERO, ONE), PI / 3.0);
        assert!(close(f.a_t, Complex64::from_polar(1.0, PI / 3.0)));
    }

    #[test]
    fn empty_schedule_is_identity() {
        let s = fixed_point_phases(0, 0.4, Mode::Amplify).unwrap();
        let p = SearchParams::new(0.37, 0.4).unwrap();
        assert_eq!(apply_sequence(&s, &p), initial_state(&p));
    }

    #[test]
    fn grover_exact_rotation() {
        let s = fixed_point_phases(1, 1.0, Mode::Amplify).unwrap();
        let out = apply_sequence(&s, &SearchParams::new(0.25, 1.0).unwrap());
        assert!((out.success_prob() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sequence_matches_closed_form_example() {
        let d = 0.1f64.sqrt();
        let s = fixed_point_phases(2, d, Mode::Amplify).unwrap();
        let out = apply_sequence(&s, &SearchParams::new(0.25, d).unwrap());
        assert!((out.success_prob() - success_prob_closed(5, d, 0.25)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        for big_l in [1, 3, 9, 25] {
            for &d in &[0.0, 0.1, 0.7, 1.0] {
                assert!((success_prob_closed(big_l, d, 1.0) - 1.0).abs() < 1e-15);
                if d > 0.0 {
                    let w = width(big_l, d);
                    assert!((success_prob_closed(big_l, d, w) - (1.0 - d * d)).abs() < 1e-12);
                }
            }
        }
        assert!((success_prob_closed(3, 0.0, 0.2) - 0.488).abs() < 1e-15);
        assert!((success_prob_closed(5, 1.0, 0.25) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn closed_form_against_raw_chebyshev() {
        // Literal formula evaluated with T_L and T_{1/L} where it cannot overflow.
        for big_l in [1usize, 3, 5, 7, 11] {
            for &d in &[0.05, 0.3, 0.8, 1.0] {
                let g_inv = crate::cheb::cheb_t_frac(big_l, 1.0 / d).unwrap();
                for i in 1..=20 {
                    let lam = i as f64 / 20.0;
                    let t = cheb_t(big_l, g_inv * (1.0 - lam).sqrt());
                    let want = 1.0 - d * d * t * t;
                    assert!((success_prob_closed(big_l, d, lam) - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn width_values() {
        assert_eq!(width(7, 1.0), 0.0);
        assert_eq!(width(7, 0.0), 1.0);
        let d = 0.1f64.sqrt();
        // mpmath, 40 digits.
        assert!((width(5, d) - 0.121_424_033_489_167_47).abs() < 1e-14);
        assert!((width(3, d) - 0.293_125_302_173_400_4).abs() < 1e-14);
        assert!((width(11, d) - 0.026_838_196_492_136_66).abs() < 1e-14);
        let d = 1e-6;
        assert!((width(2001, d) / width_approx(2001, d) - 1.0).abs() < 0.1);
    }

    #[test]
    fn min_queries_examples() {
        let d = 0.1f64.sqrt();
        let q = min_queries(d, 0.25).unwrap();
        assert_eq!((q.big_l, q.queries), (5, 4));
        let q = min_queries(1.0, 0.01).unwrap();
        assert_eq!((q.big_l, q.queries), (1, 0));
        assert!(min_queries(0.0, 0.1).is_err());
        assert!(min_queries(0.5, 0.0).is_err());
    }

    #[test]
    fn min_queries_matches_linear_scan() {
        for &d2 in &[0.5, 0.1, 0.01, 1e-4] {
            let d: f64 = f64::sqrt(d2);
            for i in 0..60 {
                let lam0 = 10f64.powf(-4.0 + 4.0 * i as f64 / 59.0);
                let mut big_l = 1;
                while width(big_l, d) > lam0 {
                    big_l += 2;
                }
                assert_eq!(min_queries(d, lam0).unwrap().big_l, big_l, "d2={d2} lam0={lam0}");
            }
        }
    }

    #[test]
    fn grover_reference_values() {
        assert!((grover_reference(0, 0.37) - 0.37).abs() < 1e-15);
        assert!((grover_reference(1, 0.25) - 1.0).abs() < 1e-15);
        let s = fixed_point_phases(4, 1.0, Mode::Amplify).unwrap();
        let p = apply_sequence(&s, &SearchParams::new(0.1, 1.0).unwrap()).success_prob();
        assert!((p - grover_reference(4, 0.1)).abs() < 1e-12);
    }

    #[test]
    fn pi3_reference_values() {
        assert_eq!(pi3_reference(0, 0.3), Pi3Result { probability: 0.30000000000000004, queries: 0 });
        assert_eq!(pi3_min_level(0.25, 0.9).unwrap().1.queries, 8);
        assert_eq!(pi3_min_level(0.03, 0.9).unwrap().1.queries, 80);
        for k in 1..=3u32 {
            let s = nest_chain(&vec![1; k as usize], 0.0, Mode::Amplify).unwrap();
            for i in 1..=10 {
                let lam = i as f64 / 10.0;
                let sim = apply_sequence(&s, &params(lam)).success_prob();
                assert!((sim - pi3_reference(k, lam).probability).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn avoidance_follows_complement_overlap() {
        let d = 0.1f64.sqrt();
        let s = fixed_point_phases(0, d, Mode::Avoid).unwrap();
        let p = SearchParams::new(0.3, d).unwrap();
        assert!((avoidance_prob(&s, &p).unwrap() - 0.7).abs() < 1e-15);

        let s = fixed_point_phases(2, d, Mode::Avoid).unwrap();
        for &lam in &[0.1, 0.5, 0.8] {
            let p = SearchParams::new(lam, d).unwrap();
            let got = avoidance_prob(&s, &p).unwrap();
            assert!((got - success_prob_closed(5, d, 1.0 - lam)).abs() < 1e-12);
        }

        // Grover-exact λ: amplification reaches the target, so nothing is left on t̄.
        let s = fixed_point_phases(2, 1.0, Mode::Avoid).unwrap();
        let lam = (PI / 10.0).sin().powi(2);
        let p = SearchParams::new(lam, 1.0).unwrap();
        assert!(avoidance_prob(&s, &p).unwrap() < 1e-12);

        let amp = fixed_point_phases(2, d, Mode::Amplify).unwrap();
        assert!(avoidance_prob(&amp, &p).is_err());
    }

    #[test]
    fn pulse_form_examples() {
        let s = fixed_point_phases(0, 0.5, Mode::Amplify).unwrap();
        let p = SearchParams::new(0.3, 0.5).unwrap();
        assert!((pulse_form_state(&s, &p).unwrap().fidelity(&initial_state(&p)) - 1.0).abs() < 1e-14);

        let s = fixed_point_phases(1, 1.0, Mode::Amplify).unwrap();
        let p = SearchParams::new(0.25, 1.0).unwrap();
        let f = pulse_form_state(&s, &p).unwrap().fidelity(&apply_sequence(&s, &p));
        assert!((f - 1.0).abs() < 1e-12);

        let d = 0.1f64.sqrt();
        let s = fixed_point_phases(4, d, Mode::Amplify).unwrap();
        let p = SearchParams::new(0.1, d).unwrap();
        let f = pulse_form_state(&s, &p).unwrap().fidelity(&apply_sequence(&s, &p));
        assert!(f >= 1.0 - 1e-10);
    }

    #[test]
    fn pulse_form_on_nested_schedule() {
        let s = nest_chain(&[1, 2], 0.5, Mode::Amplify).unwrap();
        let p = SearchParams::new(0.05, 0.5).unwrap();
        let f = pulse_form_state(&s, &p).unwrap().fidelity(&apply_sequence(&s, &p));
        assert!(f >= 1.0 - 1e-10);
    }

    #[test]
    fn recurrence_examples() {
        let d = 0.1f64.sqrt();
        let s = fixed_point_phases(2, d, Mode::Amplify).unwrap();
        let p = SearchParams::new(0.3, d).unwrap();
        let tr = amplitude_recurrence(&s, &p).unwrap();
        let x = 0.7f64.sqrt();
        assert_eq!(tr.a[0], ONE);
        assert!(close(tr.a[1], Complex64::new(x, 0.0)));
        assert!((tr.success_prob() - success_prob_closed(5, d, 0.3)).abs() < 1e-12);
        assert!(tr.aux_residual < 1e-12);

        let s = fixed_point_phases(3, 1.0, Mode::Amplify).unwrap();
        let tr = amplitude_recurrence(&s, &SearchParams::new(0.3, 1.0).unwrap()).unwrap();
        assert!((tr.a[7].norm() - cheb_t(7, x).abs()).abs() < 1e-12);
    }

    #[test]
    fn zero_lambda_is_flagged() {
        let s = fixed_point_phases(3, 0.3, Mode::Amplify).unwrap();
        let out = simulate_success(&s, 0.0).unwrap();
        assert!(out.zero_overlap && out.probability == 0.0);
        let out = simulate_success(&s, 0.5).unwrap();
        assert!(!out.zero_overlap);
    }

    #[test]
    fn long_sequences_stay_unitary() {
        let s = fixed_point_phases(2500, 0.2, Mode::Amplify).unwrap();
        let out = apply_sequence(&s, &SearchParams::new(0.013, 0.2).unwrap());
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
