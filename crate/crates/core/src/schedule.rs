//! Phase schedules for fixed-point search sequences: construction from the
//! analytic phase solution, the composite-pulse phases `ζ_k`, and nesting.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cheb::{cheb_t, gamma_of};
use crate::error::{Error, Result};

/// Whether a sequence amplifies the target or the component orthogonal to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Amplify,
    Avoid,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Amplify => "amplify",
            Mode::Avoid => "avoid",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amplify" => Ok(Mode::Amplify),
            "avoid" => Ok(Mode::Avoid),
            other => Err(Error::Domain(format!("unknown mode {other:?}"))),
        }
    }
}

/// Inverse cotangent with range `(-π/2, π/2]`, `acot(0) = π/2`.
pub fn acot(x: f64) -> f64 {
    if x == 0.0 {
        FRAC_PI_2
    } else {
        (1.0 / x).atan()
    }
}

/// Reduces an angle to `(-π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

/// The `l` generalized Grover iterates `G(α_j, β_j)` of a sequence `S_L`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSchedule {
    l: usize,
    delta: f64,
    gamma: f64,
    mode: Mode,
    alphas: Vec<f64>,
    betas: Vec<f64>,
}

impl PhaseSchedule {
    /// Number of Grover iterates.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Sequence length `L = 2l + 1`; `L - 1` oracle queries.
    pub fn big_l(&self) -> usize {
        2 * self.l + 1
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn queries(&self) -> usize {
        2 * self.l
    }

    /// `(α_j, β_j)` pairs in application order.
    pub fn iterates(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.alphas.iter().copied().zip(self.betas.iter().copied())
    }

    /// Builds a schedule from its `α` list; `β` follows from `mode`.
    pub fn from_alphas(alphas: Vec<f64>, delta: f64, mode: Mode) -> Result<Self> {
        check_delta(delta)?;
        let l = alphas.len();
        let alphas: Vec<f64> = alphas.into_iter().map(normalize_angle).collect();
        let betas = matched_betas(&alphas, mode);
        Ok(PhaseSchedule { l, delta, gamma: gamma_of(delta, 2 * l + 1), mode, alphas, betas })
    }

    /// Schedule whose iterate phases are specified directly by `γ` rather than `δ`.
    pub fn from_gamma(l: usize, gamma: f64, mode: Mode) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Domain(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        let big_l = 2 * l + 1;
        let delta = if gamma == 0.0 { 0.0 } else { (1.0 / cheb_t(big_l, 1.0 / gamma)).clamp(0.0, 1.0) };
        let alphas = analytic_alphas(l, gamma);
        let betas = matched_betas(&alphas, mode);
        Ok(PhaseSchedule { l, delta, gamma, mode, alphas, betas })
    }

    /// The same iterates with the opposite `β` convention.
    pub fn with_mode(&self, mode: Mode) -> Self {
        PhaseSchedule { betas: matched_betas(&self.alphas, mode), mode, ..self.clone() }
    }

    /// The first `count` iterates as a standalone schedule.
    ///
    /// Metadata `(δ, γ)` is kept from the parent; it describes the parent's
    /// guarantee, not the prefix's.
    pub fn prefix(&self, count: usize) -> (Vec<f64>, Vec<f64>) {
        let count = count.min(self.l);
        (self.alphas[..count].to_vec(), self.betas[..count].to_vec())
    }

    /// Checks `β_{l-j+1} = ∓α_j` (sign per mode) to within `tol` radians.
    pub fn is_phase_matched(&self, tol: f64) -> bool {
        let expect = matched_betas(&self.alphas, self.mode);
        expect.iter().zip(&self.betas).all(|(&e, &b)| angle_distance(e, b) <= tol)
    }

    /// Composite-pulse phases `ζ_1 … ζ_L` of an amplifying schedule.
    ///
    /// Steps `ζ_{k+1} - ζ_k = (-1)^k π - θ_k` where `θ = (β_1, α_1, β_2, α_2, …)`
    /// are the z-rotation angles between successive preparation pulses, anchored
    /// at `ζ_{l+1} = (-1)^l π/2` and propagated outward in both directions.
    pub fn zeta_sequence(&self) -> Result<ZetaSequence> {
        if self.mode != Mode::Amplify {
            return Err(Error::ModeMismatch { expected: "amplify" });
        }
        let thetas: Vec<f64> = self.iterates().flat_map(|(a, b)| [b, a]).collect();
        Ok(ZetaSequence::from_steps(self.l, |k| thetas[k - 1]))
    }

    /// Serializable record of this schedule.
    pub fn to_record(&self) -> ScheduleRecord {
        ScheduleRecord {
            l: self.l,
            big_l: self.big_l(),
            delta: self.delta,
            mode: self.mode,
            alphas: self.alphas.clone(),
            betas: self.betas.clone(),
        }
    }

    /// Rebuilds a schedule from a record, validating its invariants.
    pub fn from_record(rec: &ScheduleRecord) -> Result<Self> {
        check_delta(rec.delta)?;
        if rec.big_l != 2 * rec.l + 1 {
            return Err(Error::InvalidSchedule(format!("L = {} but l = {}", rec.big_l, rec.l)));
        }
        if rec.alphas.len() != rec.l || rec.betas.len() != rec.l {
            return Err(Error::InvalidSchedule(format!(
                "expected {} angles, got {} alphas and {} betas",
                rec.l,
                rec.alphas.len(),
                rec.betas.len()
            )));
        }
        let sched = PhaseSchedule {
            l: rec.l,
            delta: rec.delta,
            gamma: gamma_of(rec.delta, rec.big_l),
            mode: rec.mode,
            alphas: rec.alphas.iter().copied().map(normalize_angle).collect(),
            betas: rec.betas.iter().copied().map(normalize_angle).collect(),
        };
        if !sched.is_phase_matched(1e-12) {
            return Err(Error::InvalidSchedule(format!("betas are not phase matched for {} mode", rec.mode)));
        }
        Ok(sched)
    }
}

/// On-disk / wire form of a [`PhaseSchedule`]. Angles in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub l: usize,
    #[serde(rename = "L")]
    pub big_l: usize,
    pub delta: f64,
    pub mode: Mode,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

/// Phases `ζ_1 … ζ_L` of the composite-pulse form, each in `(-π, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaSequence {
    pub zetas: Vec<f64>,
}

impl ZetaSequence {
    fn from_steps(l: usize, theta: impl Fn(usize) -> f64) -> Self {
        let big_l = 2 * l + 1;
        let step = |k: usize| if k.is_multiple_of(2) { PI } else { -PI } - theta(k);
        // 1-based ζ, unreduced during propagation.
        let mut z = vec![0.0; big_l + 1];
        z[l + 1] = if l.is_multiple_of(2) { FRAC_PI_2 } else { -FRAC_PI_2 };
        for k in l + 1..big_l {
            z[k + 1] = z[k] + step(k);
        }
        for k in (1..=l).rev() {
            z[k] = z[k + 1] - step(k);
        }
        ZetaSequence { zetas: z[1..].iter().copied().map(normalize_angle).collect() }
    }

    pub fn len(&self) -> usize {
        self.zetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zetas.is_empty()
    }

    pub fn is_palindromic(&self, tol: f64) -> bool {
        let n = self.zetas.len();
        (0..n / 2).all(|k| angle_distance(self.zetas[k], self.zetas[n - 1 - k]) <= tol)
    }
}

/// `ζ` phases straight from the analytic step formula
/// `ζ_{k+1} - ζ_k = (-1)^k π - 2 acot(tan(kπ/L) sqrt(1-γ²))`.
pub fn zeta_closed_form(l: usize, gamma: f64) -> ZetaSequence {
    let big_l = (2 * l + 1) as f64;
    let s = (1.0 - gamma * gamma).max(0.0).sqrt();
    ZetaSequence::from_steps(l, |k| 2.0 * acot((k as f64 * PI / big_l).tan() * s))
}

fn analytic_alphas(l: usize, gamma: f64) -> Vec<f64> {
    let big_l = (2 * l + 1) as f64;
    let s = (1.0 - gamma * gamma).max(0.0).sqrt();
    (1..=l).map(|j| normalize_angle(2.0 * acot((TAU * j as f64 / big_l).tan() * s))).collect()
}

fn matched_betas(alphas: &[f64], mode: Mode) -> Vec<f64> {
    let sign = match mode {
        Mode::Amplify => -1.0,
        Mode::Avoid => 1.0,
    };
    alphas.iter().rev().map(|&a| normalize_angle(sign * a)).collect()
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta must lie in [0, 1], got {delta}")))
    }
}

/// Optimal fixed-point schedule with `l` iterates and amplitude error bound `δ`.
pub fn fixed_point_phases(l: usize, delta: f64, mode: Mode) -> Result<PhaseSchedule> {
    check_delta(delta)?;
    let gamma = gamma_of(delta, 2 * l + 1);
    let alphas = analytic_alphas(l, gamma);
    let betas = matched_betas(&alphas, mode);
    Ok(PhaseSchedule { l, delta, gamma, mode, alphas, betas })
}

/// Nests `inner` inside `outer`: the result runs `inner`, then each outer
/// iterate with the state preparation replaced by `inner`.
///
/// Produces `l = l_1 + 2 l_1 l_2 + l_2` iterates. The guarantee metadata is
/// taken from `outer`; callers choose the inner error bound (see [`nest`]).
pub fn nest_schedules(inner: &PhaseSchedule, outer: &PhaseSchedule, mode: Mode) -> Result<PhaseSchedule> {
    let l1 = inner.l;
    let big_l1 = inner.big_l();
    let l = l1 + 2 * l1 * outer.l + outer.l;
    let alphas = (1..=l)
        .map(|j| {
            let r = j % big_l1;
            if r == 0 {
                outer.alphas[j / big_l1 - 1]
            } else if r <= l1 {
                inner.alphas[r - 1]
            } else {
                -inner.alphas[big_l1 - r - 1]
            }
        })
        .collect();
    PhaseSchedule::from_alphas(alphas, outer.delta, mode)
}

/// Error bound to give the inner sequence when nesting under an outer
/// sequence of length `outer_big_l` with overall bound `δ`.
pub fn inner_delta(delta: f64, outer_big_l: usize) -> f64 {
    gamma_of(delta, outer_big_l)
}

/// Pairwise nesting of two analytic schedules with overall error bound `δ`.
pub fn nest(inner_l: usize, outer_l: usize, delta: f64, mode: Mode) -> Result<PhaseSchedule> {
    nest_chain(&[inner_l, outer_l], delta, mode)
}

/// Left fold of pairwise nesting over `ls` (innermost first).
pub fn nest_chain(ls: &[usize], delta: f64, mode: Mode) -> Result<PhaseSchedule> {
    check_delta(delta)?;
    match ls {
        [] => Err(Error::Domain("nesting needs at least one component".into())),
        [l] => fixed_point_phases(*l, delta, mode),
        [rest @ .., last] => {
            let outer = fixed_point_phases(*last, delta, Mode::Amplify)?;
            let inner = nest_chain(rest, inner_delta(delta, outer.big_l()), Mode::Amplify)?;
            nest_schedules(&inner, &outer, mode)
        }
    }
}
