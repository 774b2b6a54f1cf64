//! Invariant suites run by `fpsearch verify`, one per library module.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::cheb::{cheb_t, cheb_t_frac, dolph_chebyshev_ratio, gen_cheb_a};
use crate::config::{Profile, Tolerances};
use crate::error::Result;
use crate::model2d::{
    amplitude_recurrence, apply_sequence, avoidance_prob, fit_query_scaling, grover_reference, iterate_success,
    min_queries, pi3_min_level, pi3_reference, pulse_form_state, success_prob_closed, width, SearchParams,
};
use crate::qsim::{run, Engine, ProblemInstance};
use crate::schedule::{angle_distance, fixed_point_phases, inner_delta, nest, nest_chain, Mode};

/// Outcome of one named invariant within a suite.
#[derive(Clone, Debug)]
pub struct InvariantResult {
    pub name: &'static str,
    pub checks: usize,
    /// Worst observed value of the checked quantity (error, or margin).
    pub worst: f64,
    pub first_failure: Option<String>,
}

impl InvariantResult {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub invariants: Vec<InvariantResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.invariants.iter().all(InvariantResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantResult> {
        self.invariants.iter().filter(|i| !i.passed())
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let checks: usize = self.invariants.iter().map(|i| i.checks).sum();
        let failed: Vec<&str> = self.failures().map(|i| i.name).collect();
        if failed.is_empty() {
            write!(f, "PASS {:<9} {} invariants, {} checks", self.suite, self.invariants.len(), checks)
        } else {
            write!(f, "FAIL {:<9} failing: {}", self.suite, failed.join(", "))
        }
    }
}

/// Accumulates `|err| <= tol` style checks for one invariant.
struct Tally {
    name: &'static str,
    checks: usize,
    worst: f64,
    first_failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, checks: 0, worst: 0.0, first_failure: None }
    }

    /// Records `err`; fails when `err > tol` (NaN fails).
    fn err(&mut self, err: f64, tol: f64, ctx: impl FnOnce() -> String) {
        self.checks += 1;
        if err > self.worst || err.is_nan() {
            self.worst = err;
        }
        if (err.is_nan() || err > tol) && self.first_failure.is_none() {
            self.first_failure = Some(format!("{} (error {err:e} > {tol:e})", ctx()));
        }
    }

    fn holds(&mut self, ok: bool, ctx: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.first_failure.is_none() {
            self.first_failure = Some(ctx());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checks += other.checks;
        if other.worst > self.worst || other.worst.is_nan() {
            self.worst = other.worst;
        }
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
        self
    }

    fn finish(self) -> InvariantResult {
        InvariantResult { name: self.name, checks: self.checks, worst: self.worst, first_failure: self.first_failure }
    }
}

fn par_tally<T: Sync>(name: &'static str, items: &[T], f: impl Fn(&T, &mut Tally) + Sync) -> InvariantResult {
    items
        .par_iter()
        .map(|it| {
            let mut t = Tally::new(name);
            f(it, &mut t);
            t
        })
        .reduce(|| Tally::new(name), Tally::merge)
        .finish()
}

fn grid_pairs(ls: impl Iterator<Item = usize>, delta_sq: &[f64]) -> Vec<(usize, f64)> {
    ls.flat_map(|l| delta_sq.iter().map(move |&d2| (l, d2))).collect()
}

/// Chebyshev evaluation and the generalized polynomial identity.
pub fn cheb_suite(p: &Profile, tol: &Tolerances) -> SuiteReport {
    let mut semigroup = Tally::new("semigroup");
    for a in 1..=9 {
        for b in 1..=9 {
            for i in 0..=40 {
                let x = -2.0 + i as f64 / 10.0;
                let want = cheb_t(a * b, x);
                let err = (cheb_t(a, cheb_t(b, x)) - want).abs() / want.abs().max(1.0);
                semigroup.err(err, 1e-10, || format!("p={a} q={b} x={x}"));
            }
        }
    }

    let mut inverse = Tally::new("fractional-inverse");
    for k in 0..8 {
        let big_l = 2 * k + 1;
        for i in 0..=60 {
            let x = 10f64.powf(6.0 * i as f64 / 60.0);
            let y = cheb_t_frac(big_l, x).expect("x >= 1");
            inverse.err((cheb_t(big_l, y) - x).abs() / x, 1e-10, || format!("L={big_l} x={x}"));
        }
    }

    let mut bounded = Tally::new("bounded");
    for n in 0..=64 {
        for i in 0..=100 {
            let x = -1.0 + i as f64 / 50.0;
            let v = cheb_t(n, x).abs();
            bounded.holds(v <= 1.0, || format!("|T_{n}({x})| = {v}"));
        }
    }

    let mut recurrence = Tally::new("recurrence");
    for i in 0..=60 {
        let x = -1.5 + i as f64 / 20.0;
        let (mut t0, mut t1) = (1.0, x);
        for n in 2..=32 {
            let t2 = 2.0 * x * t1 - t0;
            t0 = t1;
            t1 = t2;
            let err = (cheb_t(n, x) - t1).abs() / t1.abs().max(1.0);
            recurrence.err(err, 1e-9, || format!("n={n} x={x}"));
        }
    }

    let xs = p.cheb_x_grid();
    let pairs: Vec<(usize, f64)> =
        (0..=p.cheb_l_max).flat_map(|l| p.cheb_gammas.iter().map(move |&g| (l, g))).collect();
    let gen = par_tally("generalized-identity", &pairs, |&(l, g), t| {
        let big_l = 2 * l + 1;
        for &x in &xs {
            let a = gen_cheb_a(big_l, g, x).expect("valid gamma");
            let want = dolph_chebyshev_ratio(big_l, g, x).abs();
            t.err((a.norm() - want).abs(), tol.gen_cheb, || format!("L={big_l} gamma={g} x={x}"));
        }
    });

    SuiteReport {
        suite: "cheb",
        invariants: vec![semigroup.finish(), inverse.finish(), bounded.finish(), recurrence.finish(), gen],
    }
}

/// Schedule construction, special cases, and nesting.
pub fn schedule_suite(p: &Profile, tol: &Tolerances) -> Result<SuiteReport> {
    let lambdas = p.lambda_grid();

    let mut special = Tally::new("special-cases");
    let s = fixed_point_phases(1, 0.0, Mode::Amplify)?;
    special.err((s.alphas()[0] + PI / 3.0).abs(), 1e-14, || "alpha_1 != -pi/3 at delta = 0".into());
    special.err((s.betas()[0] - PI / 3.0).abs(), 1e-14, || "beta_1 != pi/3 at delta = 0".into());
    for l in 1..=p.l_max {
        let g = fixed_point_phases(l, 1.0, Mode::Amplify)?;
        for (a, b) in g.iterates() {
            special.err(angle_distance(a, PI), 1e-12, || format!("Grover alpha != pi at l={l}"));
            special.err(angle_distance(b, PI), 1e-12, || format!("Grover beta != pi at l={l}"));
        }
    }

    let mut matched = Tally::new("phase-matching");
    for l in 0..=p.l_max {
        for &d2 in &p.delta_sq {
            for mode in [Mode::Amplify, Mode::Avoid] {
                let s = fixed_point_phases(l, d2.sqrt(), mode)?;
                matched.holds(s.is_phase_matched(0.0), || format!("l={l} d2={d2} {mode}"));
            }
        }
    }
    for &a in &p.nest_ls {
        for &b in &p.nest_ls {
            let s = nest(a, b, 0.3, Mode::Amplify)?;
            matched.holds(s.is_phase_matched(0.0), || format!("nest({a},{b})"));
        }
    }

    let mut palin = Tally::new("zeta-palindrome");
    for l in 0..=p.l_max {
        for &d2 in &p.delta_sq {
            let z = fixed_point_phases(l, d2.sqrt(), Mode::Amplify)?.zeta_sequence()?;
            palin.holds(z.is_palindromic(1e-10), || format!("l={l} d2={d2}"));
        }
    }

    let mut pairs = Vec::new();
    for &a in &p.nest_ls {
        for &b in &p.nest_ls {
            for &d2 in &p.nest_delta_sq {
                pairs.push((a, b, d2));
            }
        }
    }
    let semigroup = par_tally("nesting-semigroup", &pairs, |&(a, b, d2), t| {
        let d = d2.sqrt();
        let s = nest(a, b, d, Mode::Amplify).expect("valid nesting");
        let swapped = nest(b, a, d, Mode::Amplify).expect("valid nesting");
        let big_l = s.big_l();
        let (pa, pb) = s.prefix(a);
        let inner_d = inner_delta(d, 2 * b + 1);
        for &lam in &lambdas {
            let params = SearchParams::new(lam, d).expect("grid lambda");
            let sim = apply_sequence(&s, &params).success_prob();
            t.err((sim - success_prob_closed(big_l, d, lam)).abs(), tol.nesting, || {
                format!("nest({a},{b}) d2={d2} lambda={lam}")
            });
            let sim2 = apply_sequence(&swapped, &params).success_prob();
            t.err((sim - sim2).abs(), tol.nesting, || format!("nest({a},{b}) vs nest({b},{a}) lambda={lam}"));
            let pre = iterate_success(&pa, &pb, lam);
            t.err((pre - success_prob_closed(2 * a + 1, inner_d, lam)).abs(), tol.nesting, || {
                format!("prefix of nest({a},{b}) lambda={lam}")
            });
        }
    });

    let mut direct_vs_nested = Tally::new("direct-vs-nested");
    for &d2 in &p.nest_delta_sq {
        let d = d2.sqrt();
        let direct = fixed_point_phases(4, d, Mode::Amplify)?;
        let nested = nest(1, 1, d, Mode::Amplify)?;
        for &lam in &lambdas {
            let params = SearchParams::new(lam, d)?;
            let a = apply_sequence(&direct, &params).success_prob();
            let b = apply_sequence(&nested, &params).success_prob();
            direct_vs_nested.err((a - b).abs(), tol.nesting, || format!("L=9 d2={d2} lambda={lam}"));
        }
    }

    Ok(SuiteReport {
        suite: "schedule",
        invariants: vec![special.finish(), matched.finish(), palin.finish(), semigroup, direct_vs_nested.finish()],
    })
}

/// Two-level simulation against every closed form.
pub fn model2d_suite(p: &Profile, tol: &Tolerances) -> Result<SuiteReport> {
    let lambdas = p.lambda_grid();
    let pairs = grid_pairs(1..=p.l_max, &p.delta_sq);

    let equivalence = par_tally("closed-form-equivalence", &pairs, |&(l, d2), t| {
        let d = d2.sqrt();
        let s = fixed_point_phases(l, d, Mode::Amplify).expect("valid");
        for &lam in &lambdas {
            let sim = apply_sequence(&s, &SearchParams::new(lam, d).expect("grid")).success_prob();
            t.err((sim - success_prob_closed(s.big_l(), d, lam)).abs(), tol.closed_form, || {
                format!("l={l} d2={d2} lambda={lam}")
            });
        }
    });

    let bound = par_tally("fixed-point-bound", &pairs, |&(l, d2), t| {
        let d = d2.sqrt();
        let s = fixed_point_phases(l, d, Mode::Amplify).expect("valid");
        let w = width(s.big_l(), d);
        for &lam in lambdas.iter().filter(|&&lam| lam >= w) {
            let sim = apply_sequence(&s, &SearchParams::new(lam, d).expect("grid")).success_prob();
            let shortfall = (1.0 - d2) - sim;
            t.err(shortfall, tol.bound_slack, || format!("l={l} d2={d2} lambda={lam} P={sim}"));
        }
    });

    let mut monotone = Tally::new("width-monotone");
    for &d2 in &p.width_delta_sq {
        let d = d2.sqrt();
        for big_l in (1..=p.width_l_max).step_by(2) {
            let grow = width(big_l + 2, d) - width(big_l, d);
            monotone.err(grow, 0.0, || format!("L={big_l} d2={d2}"));
        }
    }

    let mut grover = Tally::new("grover-recovery");
    for l in 0..=p.grover_l_max {
        let s = fixed_point_phases(l, 1.0, Mode::Amplify)?;
        for &lam in &lambdas {
            let sim = apply_sequence(&s, &SearchParams::new(lam, 1.0)?).success_prob();
            grover.err((sim - grover_reference(l, lam)).abs(), tol.grover, || format!("l={l} lambda={lam}"));
        }
    }

    let mut pi3 = Tally::new("pi3-recovery");
    for k in 1..=p.pi3_k_max {
        let s = nest_chain(&vec![1; k as usize], 0.0, Mode::Amplify)?;
        for &lam in &lambdas {
            let sim = apply_sequence(&s, &SearchParams::new(lam, 0.0)?).success_prob();
            pi3.err((sim - pi3_reference(k, lam).probability).abs(), tol.pi3, || format!("k={k} lambda={lam}"));
        }
    }

    let mut figure = Tally::new("query-counts");
    let d = 0.1f64.sqrt();
    let q = min_queries(d, 0.25)?;
    figure.holds(q.queries == 4, || format!("lambda0=0.25 needs {} queries, expected 4", q.queries));
    let (_, r) = pi3_min_level(0.25, 0.9)?;
    figure.holds(r.queries == 8, || format!("pi/3 at lambda0=0.25 needs {}, expected 8", r.queries));
    let (_, r) = pi3_min_level(0.03, 0.9)?;
    figure.holds(r.queries == 80, || format!("pi/3 at lambda0=0.03 needs {}, expected 80", r.queries));
    let q = min_queries(d, 0.03)?;
    figure.holds(q.width <= 0.03 && (q.big_l == 1 || width(q.big_l - 2, d) > 0.03), || {
        format!("L={} is not the minimal length for lambda0=0.03", q.big_l)
    });

    let pulse_pairs = grid_pairs(0..=p.pulse_l_max, &p.delta_sq);
    let pulse = par_tally("pulse-form", &pulse_pairs, |&(l, d2), t| {
        let d = d2.sqrt();
        let s = fixed_point_phases(l, d, Mode::Amplify).expect("valid");
        for &lam in &lambdas {
            let params = SearchParams::new(lam, d).expect("grid");
            let f = pulse_form_state(&s, &params).expect("amplify").fidelity(&apply_sequence(&s, &params));
            t.err(1.0 - f, tol.pulse_fidelity, || format!("l={l} d2={d2} lambda={lam}"));
        }
    });

    let recurrence = par_tally("amplitude-recurrence", &pulse_pairs, |&(l, d2), t| {
        let d = d2.sqrt();
        let s = fixed_point_phases(l, d, Mode::Amplify).expect("valid");
        for &lam in &lambdas {
            let params = SearchParams::new(lam, d).expect("grid");
            let tr = amplitude_recurrence(&s, &params).expect("amplify");
            t.err((tr.success_prob() - success_prob_closed(s.big_l(), d, lam)).abs(), tol.closed_form, || {
                format!("l={l} d2={d2} lambda={lam}")
            });
            t.err(tr.aux_residual, tol.gen_cheb, || format!("auxiliary identity l={l} d2={d2} lambda={lam}"));
        }
    });

    let avoid_pairs = grid_pairs(0..=p.avoid_l_max, &p.delta_sq);
    let avoid = par_tally("avoidance", &avoid_pairs, |&(l, d2), t| {
        let d = d2.sqrt();
        let s = fixed_point_phases(l, d, Mode::Avoid).expect("valid");
        for &lam in &lambdas {
            let got = avoidance_prob(&s, &SearchParams::new(lam, d).expect("grid")).expect("avoid");
            t.err((got - success_prob_closed(s.big_l(), d, 1.0 - lam)).abs(), tol.avoid, || {
                format!("l={l} d2={d2} lambda={lam}")
            });
        }
    });

    let mut unitarity = Tally::new("unitarity");
    let long = fixed_point_phases(2500, 0.3, Mode::Amplify)?;
    for &lam in &[1e-3, 0.02, 0.5] {
        let st = apply_sequence(&long, &SearchParams::new(lam, 0.3)?);
        unitarity.err((st.norm_sqr() - 1.0).abs(), tol.unitarity, || format!("l=2500 lambda={lam}"));
    }

    let mut scaling = Tally::new("query-scaling");
    let d = p.scaling_delta_sq.sqrt();
    let c = fit_query_scaling(d, &p.scaling_grid())?;
    let ratio = c / (2.0 / d).ln();
    scaling.holds((tol.scaling_low..=tol.scaling_high).contains(&ratio), || format!("fitted c/log(2/delta) = {ratio}"));

    Ok(SuiteReport {
        suite: "model2d",
        invariants: vec![
            equivalence,
            bound,
            monotone.finish(),
            grover.finish(),
            pi3.finish(),
            figure.finish(),
            pulse,
            recurrence,
            avoid,
            unitarity.finish(),
            scaling.finish(),
        ],
    })
}

/// Full-register simulation against the two-level model.
pub fn qsim_suite(p: &Profile, tol: &Tolerances) -> Result<SuiteReport> {
    let d = p.qsim_delta_sq.sqrt();
    let mut cases = Vec::new();
    for &m in &p.qsim_marked {
        for &l in &p.qsim_l {
            cases.push((m, l));
        }
    }
    let n = p.qsim_n;

    let agreement = par_tally("subspace-reduction", &cases, |&(m, l), t| {
        let inst = ProblemInstance::uniform_first(n, m).expect("valid instance");
        let s = fixed_point_phases(l, d, Mode::Amplify).expect("valid");
        let lam = inst.lambda();
        let direct = run(&s, &inst, Engine::Direct).expect("direct run");
        t.err((direct.probability - success_prob_closed(s.big_l(), d, lam)).abs(), tol.statevector, || {
            format!("n={n} M={m} l={l}")
        });
        t.err(direct.max_norm_drift, tol.unitarity, || format!("norm drift n={n} M={m} l={l}"));
        let circ = run(&s, &inst, Engine::Circuit).expect("circuit run");
        t.err(1.0 - circ.state.fidelity(&direct.state), tol.engine_fidelity, || {
            format!("engine fidelity n={n} M={m} l={l}")
        });
        t.err(circ.max_ancilla_leak.unwrap_or(0.0), tol.ancilla_leak, || format!("ancilla leak n={n} M={m} l={l}"));
    });

    let perm = par_tally("permutation-invariance", &cases, |&(m, l), t| {
        let dim = 1usize << n;
        let s = fixed_point_phases(l, d, Mode::Amplify).expect("valid");
        let first = run(&s, &ProblemInstance::uniform_first(n, m).expect("valid"), Engine::Direct).expect("run");
        // A scattered marked set of the same size.
        let scattered: Vec<usize> = (0..m).map(|i| (i * 7919 + 13) % dim).collect();
        let inst = ProblemInstance::new(n, scattered, crate::qsim::Prep::Uniform).expect("valid");
        if inst.marked().len() == m {
            let other = run(&s, &inst, Engine::Direct).expect("run");
            t.err((first.probability - other.probability).abs(), tol.statevector, || format!("M={m} l={l}"));
        }
    });

    Ok(SuiteReport { suite: "qsim", invariants: vec![agreement, perm] })
}

/// Runs every suite on `profile`.
pub fn run_all(p: &Profile, tol: &Tolerances) -> Result<Vec<SuiteReport>> {
    Ok(vec![cheb_suite(p, tol), schedule_suite(p, tol)?, model2d_suite(p, tol)?, qsim_suite(p, tol)?])
}
