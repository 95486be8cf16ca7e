//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::ffi::OsStr;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use welfare_core::engine::{
    power_iteration, solve, stationary_distribution, SolverOptions, StateSpace, TransitionMatrix,
};
use welfare_core::metrics::{strategy_frequencies, welfare_report};
use welfare_core::simulate::{self, SimConfig, SimRng};
use welfare_core::{EvolutionParams, IncentiveScheme, ModelSpec, PdPayoffs, WelfareReport};

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (u32, &'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn spec(pd: &PdPayoffs, scheme: IncentiveScheme, n: usize, mu: f64, beta: f64) -> ModelSpec {
    ModelSpec::for_scheme(pd, scheme, EvolutionParams::new(n, mu, beta).unwrap()).unwrap()
}

fn report(s: &ModelSpec) -> WelfareReport {
    let sol = solve(s, &SolverOptions::default()).unwrap();
    welfare_report(s, &sol.space, &sol.stationary).unwrap()
}

fn matrix(s: &ModelSpec) -> TransitionMatrix {
    let space = StateSpace::enumerate(s.population(), s.num_strategies()).unwrap();
    TransitionMatrix::build(s, &space).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn random_scheme(
    rng: &mut SimRng,
    kind: usize,
    delta_max: f64,
    eps_max: f64,
    eff: (f64, f64),
) -> IncentiveScheme {
    let delta = rng.random_range(0.0..delta_max);
    match kind {
        0 => IncentiveScheme::None,
        1 => IncentiveScheme::PeerPunishment {
            epsilon: rng.random_range(0.0..eps_max),
            delta,
        },
        2 => IncentiveScheme::PeerReward {
            epsilon: rng.random_range(0.0..eps_max),
            delta,
        },
        3 => IncentiveScheme::InstitutionalReward {
            delta,
            a: rng.random_range(eff.0..eff.1),
        },
        _ => IncentiveScheme::InstitutionalPunishment {
            delta,
            b: rng.random_range(eff.0..eff.1),
        },
    }
}

fn all_schemes() -> [IncentiveScheme; 5] {
    [
        IncentiveScheme::None,
        IncentiveScheme::PeerPunishment {
            epsilon: 1.0,
            delta: 2.5,
        },
        IncentiveScheme::PeerReward {
            epsilon: 1.0,
            delta: 2.5,
        },
        IncentiveScheme::InstitutionalReward { delta: 1.2, a: 0.7 },
        IncentiveScheme::InstitutionalPunishment { delta: 1.6, b: 3.0 },
    ]
}

fn exact_solver_validity() -> Verdict {
    let mut rng = SimRng::seed_from_u64(1);
    let configs: Vec<ModelSpec> = (0..250)
        .map(|k| {
            let kind = k % 5;
            let scheme = random_scheme(&mut rng, kind, 4.0, 2.0, (0.2, 4.0));
            // cover the largest population in every scheme
            let n = if k < 25 { 50 } else { rng.random_range(2..=50) };
            let mu = 10f64.powf(rng.random_range(-3.0..0.0));
            let beta = if k % 11 == 0 {
                0.0
            } else {
                rng.random_range(0.0..5.0)
            };
            spec(&PdPayoffs::standard(), scheme, n, mu, beta)
        })
        .collect();
    let mut worst_row = 0.0f64;
    let mut worst_res = 0.0f64;
    let mut slowest = 0.0f64;
    let mut m3_at_50 = 0;
    for s in &configs {
        let start = Instant::now();
        let sol = solve(s, &SolverOptions::default()).unwrap();
        let secs = start.elapsed().as_secs_f64();
        worst_row = worst_row.max(sol.matrix.max_row_sum_error());
        worst_res = worst_res.max(sol.stationary.residual());
        if s.population() == 50 && s.num_strategies() == 3 {
            slowest = slowest.max(secs);
            m3_at_50 += 1;
        }
    }
    verdict(
        worst_row <= 1e-12 && worst_res < 1e-10 && slowest < 1.0 && m3_at_50 > 0,
        format!(
            "{} configs, max row-sum error {worst_row:.1e}, max residual {worst_res:.1e}, \
             slowest of {m3_at_50} solves at N=50 m=3 {slowest:.3} s",
            configs.len()
        ),
    )
}

fn neutral_and_symmetric_limits() -> Verdict {
    let mut worst_sym = 0.0f64;
    for scheme in all_schemes() {
        for (n, beta) in [(5, 0.5), (20, 2.0), (50, 0.1)] {
            let s = spec(&PdPayoffs::standard(), scheme, n, 1.0, beta);
            let sol = solve(&s, &SolverOptions::default()).unwrap();
            let f = strategy_frequencies(&sol.stationary, &sol.space).unwrap();
            let m = f.len() as f64;
            for x in f {
                worst_sym = worst_sym.max((x - 1.0 / m).abs());
            }
        }
    }
    let other = PdPayoffs::new(3.0, -2.0, 5.0, 0.5).unwrap();
    let mut worst_neutral = 0.0f64;
    for scheme in all_schemes() {
        for (n, mu) in [(7, 0.1), (30, 0.01), (50, 0.001)] {
            let a = solve(
                &spec(&PdPayoffs::standard(), scheme, n, mu, 0.0),
                &SolverOptions::default(),
            )
            .unwrap();
            let b = solve(&spec(&other, scheme, n, mu, 0.0), &SolverOptions::default()).unwrap();
            worst_neutral = worst_neutral.max(max_diff(a.stationary.probs(), b.stationary.probs()));
        }
    }
    verdict(
        worst_sym <= 1e-6 && worst_neutral <= 1e-12,
        format!("mu=1 max |f_i - 1/m| {worst_sym:.1e}; beta=0 max |pi - pi'| {worst_neutral:.1e}"),
    )
}

fn translation_invariance() -> Verdict {
    let mut worst_w = 0.0f64;
    let mut worst_pi = 0.0f64;
    for scheme in all_schemes() {
        for (n, mu, beta) in [(10, 0.05, 1.0), (50, 0.01, 0.1), (25, 0.001, 3.0)] {
            let s = spec(&PdPayoffs::standard(), scheme, n, mu, beta);
            let t = s.with_shifted_payoffs(7.3);
            let (w0, w1) = (matrix(&s), matrix(&t));
            for k in 0..w0.dim() {
                let (c0, v0) = w0.row(k);
                let (c1, v1) = w1.row(k);
                assert_eq!(c0, c1);
                worst_w = worst_w.max(max_diff(v0, v1));
            }
            let opts = SolverOptions::default();
            let p0 = stationary_distribution(&w0, &opts).unwrap();
            let p1 = stationary_distribution(&w1, &opts).unwrap();
            worst_pi = worst_pi.max(max_diff(p0.probs(), p1.probs()));
        }
    }
    verdict(
        worst_w <= 1e-12 && worst_pi <= 1e-12,
        format!("c=7.3: max |dW| {worst_w:.1e}, max |dpi| {worst_pi:.1e}"),
    )
}

fn institutional_equivalence() -> Verdict {
    let deltas: Vec<f64> = (1..=30).map(|k| k as f64 / 10.0).collect();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (a, b) in [(0.7, 3.0), (1.0, 2.0), (3.0, 0.5)] {
        for (n, mu, beta) in [(50, 0.001, 0.1), (30, 0.05, 1.0)] {
            for &delta in &deltas {
                let r = report(&spec(
                    &PdPayoffs::standard(),
                    IncentiveScheme::InstitutionalReward { delta, a },
                    n,
                    mu,
                    beta,
                ));
                let p = report(&spec(
                    &PdPayoffs::standard(),
                    IncentiveScheme::InstitutionalPunishment { delta, b },
                    n,
                    mu,
                    beta,
                ));
                worst = worst.max((r.coop_frequency - p.coop_frequency).abs());
                count += 1;
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("{count} (delta, a, b) points, max |coop_R - coop_P| {worst:.1e}"),
    )
}

/// Null vector of `W^T - I` from a dense SVD, with a check that the
/// eigenvalue 1 is simple.
fn dense_oracle(w: &TransitionMatrix) -> Vec<f64> {
    let n = w.dim();
    let d = w.to_dense();
    let a = DMatrix::from_fn(n, n, |i, j| d[j][i] - if i == j { 1.0 } else { 0.0 });
    let svd = a.svd(false, true);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]));
    assert!(
        svd.singular_values[order[1]] > 1e-8,
        "eigenvalue 1 is not simple"
    );
    let v: Vec<f64> = svd.v_t.unwrap().row(order[0]).iter().copied().collect();
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

fn oracle_equivalence() -> Verdict {
    let mut rng = SimRng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut dense_cases = 0;
    for k in 0..100 {
        let scheme = random_scheme(&mut rng, k % 5, 4.0, 2.0, (0.2, 4.0));
        let n = rng.random_range(2..=6);
        let mu = 10f64.powf(rng.random_range(-2.0..0.0));
        let beta = rng.random_range(0.0..3.0);
        let w = matrix(&spec(&PdPayoffs::standard(), scheme, n, mu, beta));
        let oracle = dense_oracle(&w);
        let power = power_iteration(&w, 1e-14, 10_000_000, None).unwrap();
        worst = worst.max(max_diff(power.probs(), &oracle));
        dense_cases += 1;
    }

    let mut rng = SimRng::seed_from_u64(6);
    let configs: Vec<ModelSpec> = (0..40)
        .map(|k| {
            let scheme = random_scheme(&mut rng, k % 5, 3.0, 1.5, (0.5, 3.0));
            let mu = rng.random_range(0.02..0.2);
            let beta = rng.random_range(0.0..1.0);
            spec(&PdPayoffs::standard(), scheme, 20, mu, beta)
        })
        .collect();
    let within: Vec<bool> = configs
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            let sol = solve(s, &SolverOptions::default()).unwrap();
            let exact = strategy_frequencies(&sol.stationary, &sol.space).unwrap();
            let mut cfg = SimConfig::new(s.clone(), 10_000_000, 1000 + k as u64);
            cfg.burn_in = 20_000;
            cfg.sample_stride = 20;
            let est = simulate::run(&cfg).unwrap();
            exact
                .iter()
                .zip(est.freq_estimates.iter().zip(&est.freq_std_errors))
                .all(|(x, (m, se))| (m - x).abs() <= 3.0 * se)
        })
        .collect();
    let hits = within.iter().filter(|&&b| b).count();
    verdict(
        worst <= 1e-10 && hits * 100 >= 95 * configs.len(),
        format!(
            "power vs dense oracle on {dense_cases} chains: max diff {worst:.1e}; \
             Monte Carlo within 3 SE on {hits}/{} configs",
            configs.len()
        ),
    )
}

/// Peer punishment and peer reward reports along a grid of `delta` (with
/// `epsilon = 1`, so `delta` is the impact-to-cost ratio).
fn peer_panel(mu: f64, beta: f64, grid: &[f64]) -> (Vec<WelfareReport>, Vec<WelfareReport>) {
    let run = |make: fn(f64) -> IncentiveScheme| -> Vec<WelfareReport> {
        grid.par_iter()
            .map(|&d| report(&spec(&PdPayoffs::standard(), make(d), 50, mu, beta)))
            .collect()
    };
    (
        run(|delta| IncentiveScheme::PeerPunishment {
            epsilon: 1.0,
            delta,
        }),
        run(|delta| IncentiveScheme::PeerReward {
            epsilon: 1.0,
            delta,
        }),
    )
}

fn ratio_grid() -> Vec<f64> {
    (2..=8).map(|k| k as f64 * 0.5).collect()
}

/// Longest run of consecutive grid points where punishment cooperates more
/// while reward yields more welfare.
fn ordering_run(sp: &[WelfareReport], sr: &[WelfareReport]) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for (p, r) in sp.iter().zip(sr) {
        if p.coop_frequency > r.coop_frequency
            && r.gross_welfare_per_capita > p.gross_welfare_per_capita
        {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

/// (reward steps non-decreasing, punishment steps non-increasing, steps)
fn trend_counts(sp: &[WelfareReport], sr: &[WelfareReport]) -> (usize, usize, usize) {
    let up = sr
        .windows(2)
        .filter(|w| w[1].gross_welfare_per_capita >= w[0].gross_welfare_per_capita)
        .count();
    let down = sp
        .windows(2)
        .filter(|w| w[1].gross_welfare_per_capita <= w[0].gross_welfare_per_capita)
        .count();
    (up, down, sp.len() - 1)
}

fn series(xs: &[WelfareReport], f: fn(&WelfareReport) -> f64) -> String {
    let v: Vec<String> = xs.iter().map(|r| format!("{:.3}", f(r))).collect();
    v.join(" ")
}

fn peer_orderings() -> Verdict {
    let start = Instant::now();
    let full: Vec<f64> = (1..=8).map(|k| k as f64 * 0.5).collect();
    let mut panels = Vec::new();
    for beta in [0.01, 0.1, 1.0] {
        panels.push((beta, peer_panel(0.01, beta, &full)));
    }
    let secs = start.elapsed().as_secs_f64();
    let (sp, sr) = &panels[1].1;
    // drop the 0.5 point: the criterion looks at ratios in [1, 4]
    let run = ordering_run(&sp[1..], &sr[1..]);
    verdict(
        run >= 3 && secs < 60.0,
        format!(
            "beta=0.1: longest run with f_C(SP) > f_C(SR) and SW(SR) > SW(SP) is {run} grid points; \
             full 3-panel grid in {secs:.2} s"
        ),
    )
}

fn peer_trend() -> Verdict {
    let (sp, sr) = peer_panel(0.01, 0.1, &ratio_grid());
    let (up, down, steps) = trend_counts(&sp, &sr);
    verdict(
        2 * up > steps && 2 * down > steps,
        format!(
            "beta=0.1: SW(SR) non-decreasing on {up}/{steps} steps, SW(SP) non-increasing on \
             {down}/{steps} steps; SW(SP) = [{}], SW(SR) = [{}]",
            series(&sp, |r| r.gross_welfare_per_capita),
            series(&sr, |r| r.gross_welfare_per_capita)
        ),
    )
}

struct Landmark {
    argmax: f64,
    interior: bool,
    net: f64,
    coop: f64,
    any_positive: bool,
}

fn institutional_curve(scheme: fn(f64, f64) -> IncentiveScheme, eff: f64) -> Landmark {
    let deltas: Vec<f64> = (1..=30).map(|k| k as f64 / 10.0).collect();
    let reports: Vec<WelfareReport> = deltas
        .par_iter()
        .map(|&d| {
            report(&spec(
                &PdPayoffs::standard(),
                scheme(d, eff),
                50,
                0.001,
                0.1,
            ))
        })
        .collect();
    let (k, best) = reports
        .iter()
        .enumerate()
        .max_by(|a, b| {
            a.1.net_welfare_per_capita
                .total_cmp(&b.1.net_welfare_per_capita)
        })
        .unwrap();
    Landmark {
        argmax: deltas[k],
        interior: k > 0 && k + 1 < deltas.len(),
        net: best.net_welfare_per_capita,
        coop: best.coop_frequency,
        any_positive: reports.iter().any(|r| r.net_welfare_per_capita > 0.0),
    }
}

fn institutional_landmarks() -> Verdict {
    let reward = |delta, a| IncentiveScheme::InstitutionalReward { delta, a };
    let punish = |delta, b| IncentiveScheme::InstitutionalPunishment { delta, b };
    let r07 = institutional_curve(reward, 0.7);
    let p3 = institutional_curve(punish, 3.0);
    let p2 = institutional_curve(punish, 2.0);

    let i =
        r07.interior && (r07.argmax - 1.2).abs() <= 0.3 + 1e-9 && (r07.coop - 0.5).abs() <= 0.15;
    let ii = p3.interior && (p3.argmax - 1.6).abs() <= 0.3 + 1e-9 && (p3.coop - 0.8).abs() <= 0.15;
    let iii = !p2.any_positive && p3.any_positive;
    let mark = |b: bool| if b { "ok" } else { "no" };
    verdict(
        i && ii && iii,
        format!(
            "(i) a=0.7: max net {:.3} at delta={} (interior: {}), coop {:.3} [{}]; \
             (ii) b=3: max net {:.3} at delta={} (interior: {}), coop {:.3} [{}]; \
             (iii) b=2 positive net somewhere: {}, b=3: {} [{}]",
            r07.net,
            r07.argmax,
            r07.interior,
            r07.coop,
            mark(i),
            p3.net,
            p3.argmax,
            p3.interior,
            p3.coop,
            mark(ii),
            p2.any_positive,
            p3.any_positive,
            mark(iii)
        ),
    )
}

fn robustness_sweeps() -> Verdict {
    let grid = ratio_grid();
    let mut binding_ok = true;
    let mut parts = Vec::new();
    for mu in [0.001, 0.05] {
        for beta in [0.01, 1.0] {
            let (sp, sr) = peer_panel(mu, beta, &grid);
            let run = ordering_run(&sp, &sr);
            let (up, down, steps) = trend_counts(&sp, &sr);
            let ok = run >= 3 && 2 * up > steps && 2 * down > steps;
            let weak = beta < 0.1;
            if weak {
                binding_ok &= ok;
            }
            parts.push(format!(
                "mu={mu} beta={beta}{}: run {run}, SR up {up}/{steps}, SP down {down}/{steps} [{}]",
                if weak { "" } else { " (informational)" },
                if ok { "ok" } else { "no" }
            ));
        }
    }
    verdict(binding_ok, parts.join("; "))
}

fn sweep_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        (
            "exact.toml",
            r#"
[scheme]
kind = ["peer_punishment", "peer_reward"]
epsilon = 1.0

[evolution]
N = 30
mu = 0.01
beta = 0.1

[[sweep.axis]]
name = "beta"
values = [0.01, 0.1, 1.0]

[[sweep.axis]]
name = "delta"
start = 0.5
stop = 4.0
step = 0.5
"#,
        ),
        (
            "mc.toml",
            r#"
[scheme]
kind = ["institutional_reward", "institutional_punishment"]
a = 0.7
b = 3.0

[evolution]
N = 20
mu = 0.05
beta = 0.5

[solver]
method = "montecarlo"

[montecarlo]
steps = 400000
seed = 11

[[sweep.axis]]
name = "delta"
start = 0.5
stop = 2.5
step = 0.5
"#,
        ),
    ];
    let mut identical = 0;
    let mut notes = Vec::new();
    for (name, text) in configs {
        let cfg = dir.path().join(name);
        std::fs::write(&cfg, text).unwrap();
        let run = |out: &Path, jobs: &str| {
            let args = [
                "welfare".as_ref(),
                "sweep".as_ref(),
                "--config".as_ref(),
                cfg.as_os_str(),
                "--out".as_ref(),
                out.as_os_str(),
                "--jobs".as_ref(),
                jobs.as_ref(),
            ];
            let mut err = Vec::new();
            let code = welfare_cli::run(
                args.map(OsStr::to_os_string),
                &mut std::io::sink(),
                &mut err,
            );
            assert_eq!(
                code,
                0,
                "sweep {name} failed: {}",
                String::from_utf8_lossy(&err)
            );
            std::fs::read(out).unwrap()
        };
        let a = run(&dir.path().join("a.csv"), "1");
        let b = run(&dir.path().join("b.csv"), "4");
        let c = run(&dir.path().join("c.csv"), "4");
        if a == b && b == c {
            identical += 1;
        }
        notes.push(format!("{name}: {} bytes", a.len()));
    }
    verdict(
        identical == configs.len(),
        format!(
            "{identical}/{} configs byte-identical across three runs (jobs 1, 4, 4); {}",
            configs.len(),
            notes.join(", ")
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "exact-solver validity", exact_solver_validity),
        (
            2,
            "neutral and symmetric limits",
            neutral_and_symmetric_limits,
        ),
        (3, "translation invariance", translation_invariance),
        (
            4,
            "institutional reward/punishment equivalence",
            institutional_equivalence,
        ),
        (5, "oracle equivalence", oracle_equivalence),
        (6, "peer incentive orderings", peer_orderings),
        (7, "peer incentive welfare trend", peer_trend),
        (
            8,
            "institutional welfare landmarks",
            institutional_landmarks,
        ),
        (9, "robustness across mu and beta", robustness_sweeps),
        (10, "sweep determinism", sweep_determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {id:>2} ({name}, {:.1} s): {}",
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!(
            "acceptance: {} of 10 criteria fail: {failed:?}",
            failed.len()
        );
        std::process::exit(1);
    }
}
