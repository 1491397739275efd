//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line.
//!
//! Run with `cargo test -p mdpkit --test acceptance -- --nocapture` to see
//! the report.

use std::time::{Duration, Instant};

use mdpkit::algorithms::{
    check_policy_improvement_theorem, greedy, improve, policy_evaluation, policy_iteration_trace, value_iteration,
};
use mdpkit::dist::{kleisli_compose, kleisli_iterate, Dist, Kernel};
use mdpkit::envs::{random_dist, random_value_fn, rng, turtle_mdp, MdpRng, RandomMdp, TurtleSpec};
use mdpkit::fixpoint::{check_contraction, FixpointConfig};
use mdpkit::horizon::{brute_force_optimal, optimal_finite_value};
use mdpkit::io::MdpFile;
use mdpkit::{DecisionRule, DiscountedProblem, Mdp, ValueFn};
use rand::Rng;

fn report(id: u32, name: &str, start: Instant, limit: Option<Duration>, failures: &[String], detail: String) {
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let ok = failures.is_empty() && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" / limit {:.0}s", l.as_secs_f64()));
    println!(
        "[{}] AC-{id} {name}: {detail} ({:.2}s{budget})",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for f in failures.iter().take(10) {
        println!("       {f}");
    }
    assert!(failures.is_empty(), "AC-{id}: {} failures", failures.len());
    assert!(in_time, "AC-{id}: took {elapsed:?}");
}

/// Raw distribution with up to 8 entries, duplicates allowed.
fn raw_dist(r: &mut MdpRng, n: usize) -> Dist {
    let k = r.gen_range(1..=8);
    let draws: Vec<f64> = (0..k).map(|_| 1.0 - r.gen::<f64>()).collect();
    let total: f64 = draws.iter().sum();
    let entries = draws.iter().map(|w| (w / total, r.gen_range(0..n))).collect();
    Dist::new(n, entries).unwrap()
}

fn random_kernel(r: &mut MdpRng, domain: usize, codomain: usize) -> Kernel {
    Kernel::from_fn(domain, codomain, |_| raw_dist(r, codomain)).unwrap()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().enumerate().map(|(k, x)| x * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn row_times(p: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    (0..m[0].len())
        .map(|j| p.iter().enumerate().map(|(i, x)| x * m[i][j]).sum())
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn fuzz_problem(r: &mut MdpRng, max_states: usize, max_actions: usize, gamma: f64) -> DiscountedProblem {
    let mdp = RandomMdp::sized(r, max_states, max_actions, (-5.0, 5.0)).generate_with(r);
    DiscountedProblem::new(mdp, gamma).unwrap()
}

fn random_rule(r: &mut MdpRng, mdp: &Mdp) -> DecisionRule {
    let choices = (0..mdp.n_states()).map(|s| r.gen_range(0..mdp.n_actions(s))).collect();
    DecisionRule::new(mdp, choices).unwrap()
}

fn pointwise_max(values: impl Iterator<Item = ValueFn>) -> ValueFn {
    values
        .reduce(|a, b| ValueFn::new(a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.max(*y)).collect()).unwrap())
        .unwrap()
}

const GAMMAS: [f64; 3] = [0.5, 0.9, 0.99];

#[test]
fn ac01_monad_laws() {
    let start = Instant::now();
    let mut r = rng(0xAC01);
    let mut failures = Vec::new();
    let tol = 1e-12;
    for case in 0..1000 {
        let (na, nb, nc) = (r.gen_range(1..=8), r.gen_range(1..=8), r.gen_range(1..=8));
        let p = raw_dist(&mut r, na);
        let f = random_kernel(&mut r, na, nb);
        let g = random_kernel(&mut r, nb, nc);
        let a = r.gen_range(0..na);

        let left = Dist::ret(a, na).unwrap().bind(|x| f.apply(x).clone()).unwrap();
        if !left.compact().approx_eq(&f.apply(a).compact(), tol) {
            failures.push(format!("case {case}: left identity"));
        }
        let right = p.bind(|x| Dist::ret(x, na).unwrap()).unwrap();
        if !right.compact().approx_eq(&p.compact(), tol) {
            failures.push(format!("case {case}: right identity"));
        }
        let lhs = p
            .bind(|x| f.apply(x).clone())
            .unwrap()
            .bind(|y| g.apply(y).clone())
            .unwrap();
        let rhs = p.bind(|x| f.apply(x).bind(|y| g.apply(y).clone()).unwrap()).unwrap();
        if !lhs.compact().approx_eq(&rhs.compact(), tol) {
            failures.push(format!("case {case}: associativity"));
        }
        for d in [&left, &right, &lhs, &rhs] {
            if (d.total_mass() - 1.0).abs() > 1e-9 {
                failures.push(format!("case {case}: mass {}", d.total_mass()));
            }
        }
    }
    report(
        1,
        "monad laws",
        start,
        Some(Duration::from_secs(5)),
        &failures,
        "1000 cases, tol 1e-12".into(),
    );
}

#[test]
fn ac02_chapman_kolmogorov() {
    let start = Instant::now();
    let mut r = rng(0xAC02);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = r.gen_range(1..=6);
        let f = random_kernel(&mut r, n, n);
        let g = random_kernel(&mut r, n, n);
        let composed = kleisli_compose(&f, &g).unwrap().to_matrix();
        let oracle = matmul(&f.to_matrix(), &g.to_matrix());
        for (x, y) in composed.iter().zip(&oracle) {
            worst = worst.max(max_abs_diff(x, y));
        }
        let p0 = raw_dist(&mut r, n);
        let m = f.to_matrix();
        let mut row = p0.to_dense();
        for k in 0..=6 {
            let got = kleisli_iterate(&p0, &f, k).unwrap().to_dense();
            worst = worst.max(max_abs_diff(&got, &row));
            row = row_times(&row, &m);
        }
        if worst > 1e-12 {
            failures.push(format!("case {case}: deviation {worst:e}"));
        }
    }
    report(
        2,
        "Chapman-Kolmogorov",
        start,
        Some(Duration::from_secs(5)),
        &failures,
        format!("200 kernels, max deviation {worst:.1e} <= 1e-12"),
    );
}

/// 100 MDPs with 100 value pairs each; returns (problem, pairs).
fn operator_corpus(seed: u64) -> Vec<(DiscountedProblem, Vec<(ValueFn, ValueFn)>)> {
    let mut r = rng(seed);
    (0..100)
        .map(|i| {
            let p = fuzz_problem(&mut r, 5, 3, GAMMAS[i % 3]);
            let n = p.n_states();
            let pairs = (0..100)
                .map(|_| (random_value_fn(&mut r, n, 50.0), random_value_fn(&mut r, n, 50.0)))
                .collect();
            (p, pairs)
        })
        .collect()
}

#[test]
fn ac03_contraction_certificates() {
    let start = Instant::now();
    let mut r = rng(0xAC03);
    let mut failures = Vec::new();
    let mut worst_ratio = [0.0f64; 3];
    for (i, (p, pairs)) in operator_corpus(0xC0).iter().enumerate() {
        let rule = random_rule(&mut r, &p.mdp);
        let g = p.gamma();
        let single = check_contraction(|w| p.bellman_op(&rule, w), g, pairs);
        let max = check_contraction(|w| p.bellman_max_op(w), g, pairs);
        let slot = GAMMAS.iter().position(|x| *x == g).unwrap();
        worst_ratio[slot] = worst_ratio[slot].max(single.max_ratio).max(max.max_ratio);
        if !single.holds {
            failures.push(format!("mdp {i}: B_pi excess {:e}", single.max_excess));
        }
        if !max.holds {
            failures.push(format!("mdp {i}: B_max excess {:e}", max.max_excess));
        }
    }
    report(
        3,
        "contraction",
        start,
        Some(Duration::from_secs(30)),
        &failures,
        format!("max ratio per gamma {{0.5, 0.9, 0.99}} = {worst_ratio:.4?}"),
    );
}

#[test]
fn ac04_monotonicity() {
    let start = Instant::now();
    let mut r = rng(0xAC04);
    let mut failures = Vec::new();
    let mut checked = 0;
    for (i, (p, pairs)) in operator_corpus(0xC0).iter().enumerate() {
        let rule = random_rule(&mut r, &p.mdp);
        for (u, v) in pairs {
            // lower = min(u, v) <= upper = max(u, v)
            let lower = ValueFn::new(u.as_slice().iter().zip(v.as_slice()).map(|(a, b)| a.min(*b)).collect()).unwrap();
            let upper = ValueFn::new(u.as_slice().iter().zip(v.as_slice()).map(|(a, b)| a.max(*b)).collect()).unwrap();
            for (w1, w2) in [(u, v), (&lower, &upper)] {
                if !w1.le(w2).unwrap() {
                    continue;
                }
                checked += 1;
                if !p
                    .bellman_op(&rule, w1)
                    .le_within(&p.bellman_op(&rule, w2), 1e-12)
                    .unwrap()
                {
                    failures.push(format!("mdp {i}: B_pi not monotone"));
                }
                if !p.bellman_max_op(w1).le_within(&p.bellman_max_op(w2), 1e-12).unwrap() {
                    failures.push(format!("mdp {i}: B_max not monotone"));
                }
            }
        }
    }
    report(
        4,
        "monotonicity",
        start,
        Some(Duration::from_secs(30)),
        &failures,
        format!("{checked} ordered pairs"),
    );
}

#[test]
fn ac05_optimality_vs_brute_force() {
    let start = Instant::now();
    let mut r = rng(0xAC05);
    let cfg = FixpointConfig::new(1e-10, 10_000, None).unwrap();
    let mut failures = Vec::new();
    let (mut worst_opt, mut worst_greedy) = (0.0f64, 0.0f64);
    for i in 0..50 {
        let p = fuzz_problem(&mut r, 4, 3, 0.9);
        let vi = value_iteration(&p, &cfg).unwrap();
        let best = pointwise_max(p.mdp.rules().map(|rule| p.ltv_exact(&rule).unwrap()));
        let d_opt = vi.value.dist(&best).unwrap();
        let d_greedy = p.ltv_exact(&greedy(&p, &vi.value)).unwrap().dist(&vi.value).unwrap();
        worst_opt = worst_opt.max(d_opt);
        worst_greedy = worst_greedy.max(d_greedy);
        if d_opt > 1e-6 || d_greedy > 1e-6 {
            failures.push(format!(
                "mdp {i}: |V_vi - max| = {d_opt:e}, |V_greedy - V_vi| = {d_greedy:e}"
            ));
        }
    }
    report(
        5,
        "optimality vs brute force",
        start,
        Some(Duration::from_secs(60)),
        &failures,
        format!("50 MDPs, max |V_vi - max_pi V_pi| = {worst_opt:.1e}, max |V_greedy - V_vi| = {worst_greedy:.1e}"),
    );
}

#[test]
fn ac06_finite_horizon_optimality() {
    let start = Instant::now();
    let mut r = rng(0xAC06);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for i in 0..30 {
        let p = fuzz_problem(&mut r, 3, 2, 0.9);
        let n_states = p.n_states();
        let levels: Vec<_> = (0..=4).map(|n| optimal_finite_value(&p, n)).collect();
        for _ in 0..20 {
            let p0 = random_dist(&mut r, n_states);
            for (n, level) in levels.iter().enumerate() {
                let (oracle, _) = brute_force_optimal(&p, &p0, n).unwrap();
                let d = (level.pair(&p0).unwrap() - oracle).abs();
                worst = worst.max(d);
                cases += 1;
                if d > 1e-9 {
                    failures.push(format!("mdp {i}, n {n}: deviation {d:e}"));
                }
            }
        }
    }
    report(
        6,
        "finite-horizon optimality",
        start,
        Some(Duration::from_secs(60)),
        &failures,
        format!("{cases} (mdp, p0, n) cases, max deviation {worst:.1e} <= 1e-9"),
    );
}

#[test]
fn ac07_policy_improvement() {
    let start = Instant::now();
    let mut r = rng(0xAC07);
    let cfg = FixpointConfig::default();
    let mut failures = Vec::new();
    for i in 0..200 {
        let p = fuzz_problem(&mut r, 5, 3, GAMMAS[i % 3]);
        let sigma = random_rule(&mut r, &p.mdp);
        let tau = improve(&p, &sigma, &cfg).unwrap();
        let vs = policy_evaluation(&p, &sigma, &cfg).unwrap();
        let vt = policy_evaluation(&p, &tau, &cfg).unwrap();
        if !vs.le_within(&vt, 1e-8).unwrap() {
            failures.push(format!("case {i}: V_improve < V_sigma"));
        }
    }
    let (mut applicable, mut violated) = (0, 0);
    for i in 0..1000 {
        let p = fuzz_problem(&mut r, 4, 3, GAMMAS[i % 3]);
        let sigma = random_rule(&mut r, &p.mdp);
        let tau = random_rule(&mut r, &p.mdp);
        let rep = check_policy_improvement_theorem(&p, &sigma, &tau).unwrap();
        if rep.improves != mdpkit::fixpoint::Implication::NotApplicable
            || rep.worsens != mdpkit::fixpoint::Implication::NotApplicable
        {
            applicable += 1;
        }
        if rep.any_violated() {
            violated += 1;
            failures.push(format!("pair {i}: violated implication {rep:?}"));
        }
    }
    report(
        7,
        "policy improvement",
        start,
        Some(Duration::from_secs(60)),
        &failures,
        format!("200 improvements; 1000 pairs, {applicable} applicable, {violated} violated"),
    );
}

#[test]
fn ac08_policy_iteration() {
    let start = Instant::now();
    let mut r = rng(0xAC08);
    let cfg = FixpointConfig::default();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut max_rounds = 0;
    for i in 0..150 {
        let p = fuzz_problem(&mut r, 5, 3, GAMMAS[i % 3]);
        let init = DecisionRule::first_actions(&p.mdp);
        let trace = policy_iteration_trace(&p, &init, &cfg).unwrap();
        let rounds = trace.result.iterations;
        max_rounds = max_rounds.max(rounds);
        if rounds as f64 > p.mdp.rule_count() {
            failures.push(format!("case {i}: {rounds} rounds > {} rules", p.mdp.rule_count()));
        }
        if !trace.values.windows(2).all(|w| w[0].le_within(&w[1], 1e-8).unwrap()) {
            failures.push(format!("case {i}: values decreased"));
        }
        let vi = value_iteration(&p, &cfg).unwrap();
        let d = vi.value.dist(&trace.result.value).unwrap();
        worst = worst.max(d);
        if d > 1e-6 {
            failures.push(format!("case {i}: |V_pi - V_vi| = {d:e}"));
        }
    }
    report(
        8,
        "policy iteration",
        start,
        None,
        &failures,
        format!("150 MDPs, max rounds {max_rounds}, max |V_pi - V_vi| = {worst:.1e}"),
    );
}

#[test]
fn ac09_horizon_to_infinite() {
    let start = Instant::now();
    let mut r = rng(0xAC09);
    let cfg = FixpointConfig::default();
    let mut failures = Vec::new();
    for i in 0..20 {
        let p = fuzz_problem(&mut r, 5, 3, GAMMAS[i % 3]);
        let vi = value_iteration(&p, &cfg).unwrap();
        let d_bound = p.mdp.reward_bound();
        let g = p.gamma();
        let mut v = ValueFn::zeros(p.n_states());
        for n in 1..=50 {
            v = p.bellman_max_op(&v);
            let bound = g.powi(n) * d_bound / (1.0 - g) + vi.error_bound;
            let d = v.dist(&vi.value).unwrap();
            if d > bound {
                failures.push(format!("mdp {i}, n {n}: {d:e} > {bound:e}"));
            }
        }
        // the finite-horizon module's value is the same iterate
        let fh = optimal_finite_value(&p, 50).value;
        if fh != v {
            failures.push(format!("mdp {i}: optimal_finite_value differs from B^50(0)"));
        }
    }
    report(
        9,
        "horizon-to-infinite bound",
        start,
        None,
        &failures,
        "20 MDPs, n = 1..50".into(),
    );
}

#[test]
fn ac10_turtle_regression() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let cfg = FixpointConfig::default();
    let p = turtle_mdp(0.9).unwrap();
    let spec = TurtleSpec::default();
    let vi = value_iteration(&p, &cfg).unwrap();
    let pi = policy_iteration_trace(&p, &DecisionRule::first_actions(&p.mdp), &cfg)
        .unwrap()
        .result;
    let d = vi.value.dist(&pi.value).unwrap();
    if d > 1e-6 {
        failures.push(format!("VI/PI disagree by {d:e}"));
    }
    let green = spec.green_state().unwrap();
    for v in [&vi.value, &pi.value] {
        if v[green].abs() > 1e-12 {
            failures.push(format!("green value {}", v[green]));
        }
    }
    if vi.value.sup_norm() > p.value_bound() + vi.error_bound {
        failures.push("value exceeds D / (1 - gamma)".into());
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("turtle.json");
    let path_str = path.to_str().unwrap();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = mdpkit::cli::main_with_args(["mdpkit", "turtle-export", path_str], &mut out, &mut err);
    if code != 0 {
        failures.push(format!("turtle-export exit {code}"));
    }
    let code = mdpkit::cli::main_with_args(["mdpkit", "validate", path_str], &mut out, &mut err);
    if code != 0 {
        failures.push(format!("validate exit {code}"));
    }
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = MdpFile::from_json(&text).unwrap();
    if parsed.to_json() != text {
        failures.push("export does not round-trip byte for byte".into());
    }
    if parsed.to_model().unwrap().0 != p.mdp {
        failures.push("re-parsed model differs".into());
    }
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let t = json["transitions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["s"] == "(3,4)" && t["a"] == "up")
        .unwrap();
    let p33 = t["dist"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["sp"] == "(3,3)")
        .and_then(|e| e["p"].as_f64());
    if p33 != Some(0.75) {
        failures.push(format!("T((3,4), up, (3,3)) = {p33:?}"));
    }
    report(
        10,
        "turtle regression",
        start,
        None,
        &failures,
        format!(
            "|V_vi - V_pi| = {d:.1e}, V(green) = {}, T((3,4),up,(3,3)) = 0.75",
            vi.value[green]
        ),
    );
}

#[test]
fn ac11_analytic_spot_checks() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let cfg = FixpointConfig::default();
    let one = Mdp::from_reward_fn(vec![vec![Dist::ret(0, 1).unwrap()]], |_, _, _| 1.0).unwrap();
    let p = DiscountedProblem::new(one, 0.9).unwrap();
    let vi = value_iteration(&p, &cfg).unwrap();
    let d = (vi.value[0] - 10.0).abs();
    if d > vi.error_bound {
        failures.push(format!("single state: |V - 10| = {d:e} > {:e}", vi.error_bound));
    }
    let mut r = rng(0xAC11);
    for i in 0..20 {
        let shape = RandomMdp::sized(&mut r, 5, 3, (0.0, 0.0));
        let p = DiscountedProblem::new(shape.generate_with(&mut r), GAMMAS[i % 3]).unwrap();
        let vi = value_iteration(&p, &cfg).unwrap();
        if vi.iterations != 1 || vi.value != ValueFn::zeros(p.n_states()) {
            failures.push(format!(
                "zero reward mdp {i}: {} iterations, value {:?}",
                vi.iterations, vi.value
            ));
        }
    }
    report(
        11,
        "analytic spot checks",
        start,
        None,
        &failures,
        format!(
            "V = {} (bound {:.1e}); 20 zero-reward MDPs exact after 1 iteration",
            vi.value[0], vi.error_bound
        ),
    );
}
