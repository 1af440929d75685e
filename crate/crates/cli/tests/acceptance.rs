//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.
//!
//! Run with `cargo test -p qubitks --test acceptance`.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qubitks::cli::chi_square_p_value;
use qubitks_core::contextuality::{
    incidence_isomorphic, parity_certificate, search_colorings, Outcome, Scenario, SearchMode,
};
use qubitks_core::dilation::{
    chi_square, neumark_isometry, outcome_distribution, sample, spinor_from_direction, QubitState,
};
use qubitks_core::effects::{check_completeness, CompletenessStatus, Effect, Povm};
use qubitks_core::geometry::{dodecahedron_vertices, find_inscribed_cubes, Label};
use qubitks_core::scenarios::{cube_scenario, dodecahedron_scenario, hexagon_scenario};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

/// Runs the command in-process with machine output and parses the report.
fn machine(args: &[&str]) -> (Value, i32) {
    let mut argv = vec!["qubitks", "--format", "machine"];
    argv.extend_from_slice(args);
    let out = qubitks::run_args(argv);
    let v: Value = serde_json::from_str(&out.stdout)
        .unwrap_or_else(|e| panic!("unparseable report ({e}): {}", out.stdout));
    (v, out.code)
}

fn all_povms(s: &Scenario) -> Vec<Povm> {
    (0..s.contexts().len())
        .map(|c| s.povm(c).expect("effects").expect("valid context"))
        .collect()
}

fn builtin_povms() -> Vec<(String, Povm)> {
    let mut out = Vec::new();
    for s in [dodecahedron_scenario(), hexagon_scenario(), cube_scenario()] {
        for (c, p) in all_povms(&s).into_iter().enumerate() {
            out.push((format!("{}[{c}]", s.name()), p));
        }
    }
    out
}

fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    let s = dodecahedron_scenario();
    for (c, members) in s.contexts().iter().enumerate() {
        ensure(
            members.len() == 8,
            format!("context {c} has {} effects", members.len()),
        )?;
        let effects: Vec<Effect> = members
            .iter()
            .map(|&k| s.effects().unwrap()[k].clone())
            .collect();
        let r = check_completeness(&effects).map_err(|e| e.to_string())?;
        ensure(
            r.status == CompletenessStatus::Exact,
            format!("context {c}: {:?}", r.status),
        )?;
        ensure(
            r.trace_residual.is_zero(),
            format!("context {c}: trace residual"),
        )?;
        ensure(
            r.bloch_residuals.iter().all(|(_, v)| v.is_zero()),
            format!("context {c}: nonzero Bloch residual"),
        )?;
    }
    let (report, code) = machine(&["verify", "dodecahedron"]);
    ensure(code == 0, format!("verify exited {code}"))?;
    let checks = report["completeness"]
        .as_array()
        .ok_or("no completeness section")?;
    ensure(checks.len() == 5, "report lists other than 5 contexts")?;
    for c in checks {
        ensure(
            c["status"] == "exact",
            format!("report status {}", c["status"]),
        )?;
        ensure(c["trace_residual"]["text"] == "0", "report trace residual")?;
    }
    let t = within(Duration::from_secs(1), start)?;
    Ok(format!(
        "5 contexts of 8 effects sum to I exactly ({t:.2?})"
    ))
}

fn criterion_2() -> Result<String, String> {
    let start = Instant::now();
    let vs = dodecahedron_vertices();
    ensure(
        vs.vertices().len() == 20,
        "dodecahedron does not have 20 vertices",
    )?;
    let cubes = find_inscribed_cubes(&vs);
    ensure(cubes.len() == 5, format!("{} cubes found", cubes.len()))?;
    for (i, a) in cubes.iter().enumerate() {
        for b in &cubes[i + 1..] {
            let shared = a.shared_pairs(b);
            ensure(
                shared.len() == 1,
                format!("cubes share {} pairs", shared.len()),
            )?;
        }
    }
    let names: Vec<&str> = vs.names().collect();
    let index = |n: &str| names.iter().position(|m| *m == n).expect("known name");
    let found: Vec<Vec<usize>> = cubes
        .iter()
        .map(|c| c.pair_names().iter().map(|n| index(n)).collect())
        .collect();
    let pattern: Vec<Vec<usize>> = ["ACIJ", "ADGH", "BDFJ", "BEHI", "CEFG"]
        .iter()
        .map(|p| p.chars().map(|ch| (ch as u8 - b'A') as usize).collect())
        .collect();
    ensure(
        incidence_isomorphic(&found, &pattern),
        "membership hypergraph differs",
    )?;
    let (report, _) = machine(&["geometry", "cubes"]);
    ensure(
        report["geometry"]["candidates_examined"] == 210,
        "report does not examine 210 candidates",
    )?;
    ensure(
        report["geometry"]["cubes"].as_array().map(Vec::len) == Some(5),
        "report cubes",
    )?;
    let t = within(Duration::from_secs(1), start)?;
    Ok(format!(
        "5 cubes of 210 candidates, pairwise one shared pair, isomorphic ({t:.2?})"
    ))
}

fn uncolorable_with_both(
    source: &str,
    s: &Scenario,
    contexts: usize,
    context_size: usize,
    limit: Duration,
) -> Result<String, String> {
    let start = Instant::now();
    ensure(s.contexts().len() == contexts, "context count")?;
    ensure(
        s.contexts().iter().all(|c| c.len() == context_size),
        "context sizes",
    )?;
    let cert = parity_certificate(s).ok_or("no parity certificate")?;
    ensure(cert.context_count == contexts, "certificate context count")?;
    ensure(
        cert.multiplicities.len() == s.labels().len()
            && cert.multiplicities.iter().all(|(_, m)| *m == 2),
        "multiplicities are not all 2",
    )?;
    let v = search_colorings(s, SearchMode::CountAll);
    ensure(v.outcome == Outcome::Uncolorable, "search found a coloring")?;
    ensure(
        v.coloring_count == Some(0),
        format!("count {:?}", v.coloring_count),
    )?;
    let (report, code) = machine(&["verify", source, "--expect", "uncolorable"]);
    ensure(
        code == 0,
        format!("verify --expect uncolorable exited {code}"),
    )?;
    ensure(report["parity"]["found"] == true, "report parity")?;
    ensure(report["verdict"]["coloring_count"] == 0, "report count")?;
    ensure(
        report["verdict"]["certificate"]["kind"] == "exhaustive",
        "report certificate",
    )?;
    let t = within(limit, start)?;
    Ok(format!(
        "parity ({} labels x2, {contexts} contexts) and exhaustive search over 2^{} agree: 0 colorings ({t:.2?})",
        s.labels().len(),
        s.labels().len()
    ))
}

fn criterion_3() -> Result<String, String> {
    uncolorable_with_both(
        "dodecahedron",
        &dodecahedron_scenario(),
        5,
        8,
        Duration::from_secs(10),
    )
}

fn criterion_4() -> Result<String, String> {
    uncolorable_with_both("hexagon", &hexagon_scenario(), 3, 4, Duration::from_secs(1))
}

fn criterion_5() -> Result<String, String> {
    let s = cube_scenario();
    ensure(s.contexts().len() == 1, "cube scenario has one context")?;
    let v = search_colorings(&s, SearchMode::CountAll);
    ensure(v.outcome == Outcome::Colorable, "cube is not colorable")?;
    ensure(
        v.coloring_count == Some(8),
        format!("count {:?}", v.coloring_count),
    )?;
    let (report, code) = machine(&["color", "cube", "--expect", "colorable"]);
    ensure(code == 0, format!("color exited {code}"))?;
    ensure(report["verdict"]["coloring_count"] == 8, "report count")?;
    Ok("single cube colorable with exactly 8 colorings".into())
}

/// Valid assignments by enumerating every answer vector as a bitmask.
fn brute_force_count(n: usize, contexts: &[Vec<usize>]) -> u64 {
    let masks: Vec<u64> = contexts
        .iter()
        .map(|c| c.iter().fold(0, |m, &k| m | 1 << k))
        .collect();
    let covered = masks.iter().fold(0, |a, m| a | m);
    (0u64..1 << n)
        .filter(|yes| yes & !covered == 0)
        .filter(|yes| masks.iter().all(|m| (yes & m).count_ones() == 1))
        .count() as u64
}

fn criterion_6() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut colorable = 0;
    for case in 0..100 {
        let n = rng.gen_range(1..=12);
        let k = rng.gen_range(0..=4);
        let density = rng.gen_range(0.2..0.9);
        let subset = |rng: &mut StdRng| -> Vec<usize> {
            let mut c: Vec<usize> = (0..n).filter(|_| rng.gen_bool(density)).collect();
            if c.is_empty() {
                c.push(rng.gen_range(0..n));
            }
            c
        };
        let contexts: Vec<Vec<usize>> = if case % 2 == 0 {
            (0..k).map(|_| subset(&mut rng)).collect()
        } else {
            // A, B and their symmetric difference cover each label an even
            // number of times; an optional fourth context perturbs that.
            let (a, b) = (subset(&mut rng), subset(&mut rng));
            let sym: Vec<usize> = (0..n).filter(|i| a.contains(i) != b.contains(i)).collect();
            let mut c = vec![a, b, sym];
            if k == 4 {
                c.push(subset(&mut rng));
            }
            c
        };
        let labels: Vec<Label> = (0..n).map(|i| Label::plus(format!("L{i}"))).collect();
        let named = contexts
            .iter()
            .map(|c| c.iter().map(|&i| labels[i].clone()).collect())
            .collect();
        let s = Scenario::combinatorial("random", labels, named).map_err(|e| e.to_string())?;
        let expected = brute_force_count(n, &contexts);
        let v = search_colorings(&s, SearchMode::CountAll);
        ensure(
            v.coloring_count == Some(expected),
            format!(
                "case {case}: search {:?}, brute force {expected}",
                v.coloring_count
            ),
        )?;
        let first = search_colorings(&s, SearchMode::FirstWitness);
        ensure(
            (first.outcome == Outcome::Colorable) == (expected > 0),
            format!("case {case}: first-witness verdict"),
        )?;
        colorable += usize::from(expected > 0);
    }
    Ok(format!(
        "100 random scenarios agree with brute force ({colorable} colorable)"
    ))
}

fn pauli_form(coef: f64, axis: [f64; 3]) -> [[Complex64; 2]; 2] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let [x, y, z] = axis;
    [
        [c(coef * (1.0 + z), 0.0), c(coef * x, -coef * y)],
        [c(coef * x, coef * y), c(coef * (1.0 - z), 0.0)],
    ]
}

/// tr(E ρ) with E = (w/2)(I + n̂·σ) and ρ = (I + r·σ)/2, by explicit
/// matrix product.
fn trace_oracle(weight: f64, direction: [f64; 3], bloch: [f64; 3]) -> f64 {
    let len = direction.iter().map(|a| a * a).sum::<f64>().sqrt();
    let e = pauli_form(weight / 2.0, direction.map(|a| a / len));
    let rho = pauli_form(0.5, bloch);
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for k in 0..2 {
            tr += e[i][k] * rho[k][i];
        }
    }
    tr.re
}

fn criterion_7() -> Result<String, String> {
    let mut worst_residual: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut rng = StdRng::seed_from_u64(7);
    for (name, p) in builtin_povms() {
        let residual = neumark_isometry(&p).residual();
        ensure(residual < 1e-12, format!("{name}: residual {residual:e}"))?;
        worst_residual = worst_residual.max(residual);
        let mut states: Vec<QubitState> = vec![QubitState::maximally_mixed()];
        for e in p.effects() {
            states.push(QubitState::Pure(
                spinor_from_direction(e.direction()).map_err(|e| e.to_string())?,
            ));
        }
        for _ in 0..4 {
            let r: [f64; 3] = [
                rng.gen_range(-0.57..0.57),
                rng.gen_range(-0.57..0.57),
                rng.gen_range(-0.57..0.57),
            ];
            states.push(QubitState::Bloch(r));
        }
        for state in &states {
            let bloch = match state {
                QubitState::Pure(psi) => psi.bloch(),
                QubitState::Bloch(r) => *r,
            };
            let d = outcome_distribution(&p, state).map_err(|e| e.to_string())?;
            for (e, &got) in p.effects().iter().zip(&d.probabilities) {
                let want = trace_oracle(e.weight().to_f64(), e.direction().to_f64(), bloch);
                worst_gap = worst_gap.max((got - want).abs());
                ensure(
                    (got - want).abs() < 1e-10,
                    format!("{name} {}: {got} vs {want}", e.label()),
                )?;
            }
        }
    }

    let s = cube_scenario();
    let p = s.povm(0).unwrap().map_err(|e| e.to_string())?;
    let c_plus = s.effect(&"C+".parse().unwrap()).ok_or("no C+")?;
    let psi = spinor_from_direction(c_plus.direction()).map_err(|e| e.to_string())?;
    let d = outcome_distribution(&p, &QubitState::Pure(psi)).map_err(|e| e.to_string())?;
    ensure(
        (d.total() - 1.0).abs() < 1e-12,
        "distribution does not sum to 1",
    )?;
    let get = |l: &str| d.get(&l.parse().unwrap()).unwrap();
    ensure(
        (get("C+") - 0.25).abs() < 1e-12 && get("C-").abs() < 1e-12,
        "C outcomes",
    )?;
    let mut rest: Vec<f64> = ["D+", "D-", "E+", "E-", "F+", "F-"]
        .iter()
        .map(|l| get(l))
        .collect();
    rest.sort_by(|a, b| b.total_cmp(a));
    let expected = [
        1.0 / 6.0,
        1.0 / 6.0,
        1.0 / 6.0,
        1.0 / 12.0,
        1.0 / 12.0,
        1.0 / 12.0,
    ];
    ensure(
        rest.iter()
            .zip(expected)
            .all(|(a, b)| (a - b).abs() < 1e-12),
        format!("|C=+1> on its cube gives {rest:?}"),
    )?;

    let (report, code) = machine(&["dilate", "dodecahedron"]);
    ensure(code == 0, format!("dilate exited {code}"))?;
    ensure(
        report["dilation"]
            .as_array()
            .is_some_and(|a| a.iter().all(|d| d["within_tolerance"] == true)),
        "report isometry tolerance",
    )?;
    Ok(format!(
        "max |V'V - I| = {worst_residual:.1e}, max oracle gap = {worst_gap:.1e}, |C=+1> gives (1/4, 0, 1/6 x3, 1/12 x3)"
    ))
}

fn criterion_8() -> Result<String, String> {
    const N: u64 = 100_000;
    const ALPHA: f64 = 1e-6;
    let povms = builtin_povms();
    let state = |p: &Povm| -> QubitState {
        QubitState::Pure(spinor_from_direction(p.effects()[0].direction()).unwrap())
    };
    let start = Instant::now();
    let mut min_p = 1.0_f64;
    for (name, p) in &povms {
        let st = state(p);
        let d = outcome_distribution(p, &st).map_err(|e| e.to_string())?;
        let h = sample(p, &st, N, 2024).map_err(|e| e.to_string())?;
        ensure(h.total == N, "histogram total")?;
        let chi = chi_square(&h, &d);
        let pv = chi_square_p_value(chi.statistic, chi.degrees_of_freedom);
        min_p = min_p.min(pv);
        ensure(
            pv > ALPHA,
            format!("{name}: chi2 {} p {pv:e}", chi.statistic),
        )?;
    }
    let t = within(Duration::from_secs(5), start)?;

    for (name, p) in &povms {
        let mixed = QubitState::maximally_mixed();
        let d = outcome_distribution(p, &mixed).map_err(|e| e.to_string())?;
        for seed in [0, 1, u64::MAX] {
            let a = sample(p, &mixed, N, seed).map_err(|e| e.to_string())?;
            let b = sample(p, &mixed, N, seed).map_err(|e| e.to_string())?;
            ensure(a == b, format!("{name}: seed {seed} not reproducible"))?;
            let chi = chi_square(&a, &d);
            let pv = chi_square_p_value(chi.statistic, chi.degrees_of_freedom);
            min_p = min_p.min(pv);
            ensure(pv > ALPHA, format!("{name} seed {seed}: p {pv:e}"))?;
        }
    }

    let run = || {
        machine(&[
            "sample",
            "hexagon",
            "--context",
            "2",
            "--state",
            "-A",
            "--seed",
            "9",
        ])
    };
    let ((a, code), (b, _)) = (run(), run());
    ensure(code == 0, format!("sample exited {code}"))?;
    ensure(a == b, "CLI histograms differ across runs")?;
    ensure(
        a["sampling"]["p_value"].as_f64().is_some_and(|p| p > ALPHA),
        "CLI p-value",
    )?;
    Ok(format!(
        "{} POVMs x 10^5 samples pass at alpha = 1e-6 (min p = {min_p:.3}), seeds reproduce ({t:.2?})",
        povms.len()
    ))
}

const BAD_DOCUMENTS: [(&str, &str, &str); 3] = [
    (
        "negative weight",
        r#"{"name":"neg","radicand":1,
            "directions":[{"label":"Z","coords":[[0,1,0,1],[0,1,0,1],[1,1,0,1]]}],
            "contexts":[{"members":["Z+","Z-"],"weight":[-1,1]}]}"#,
        "Z+",
    ),
    (
        "incomplete context",
        r#"{"name":"short","radicand":1,
            "directions":[{"label":"X","coords":[[1,1,0,1],[0,1,0,1],[0,1,0,1]]},
                          {"label":"Z","coords":[[0,1,0,1],[0,1,0,1],[1,1,0,1]]}],
            "contexts":[{"members":["X+","X-","Z+"],"weight":[1,2]}]}"#,
        "context 0",
    ),
    (
        "inconsistent shared weights",
        r#"{"name":"mixed","radicand":1,
            "directions":[{"label":"X","coords":[[1,1,0,1],[0,1,0,1],[0,1,0,1]]},
                          {"label":"Z","coords":[[0,1,0,1],[0,1,0,1],[1,1,0,1]]}],
            "contexts":[{"members":["Z+","Z-"]},
                        {"members":["X+","X-","Z+","Z-"]}]}"#,
        "Z+",
    ),
];

fn criterion_9() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (what, text, element) in BAD_DOCUMENTS {
        let path = dir.path().join(format!("{}.json", what.replace(' ', "_")));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let out = Command::new(env!("CARGO_BIN_EXE_qubitks"))
            .arg("verify")
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        let stderr = String::from_utf8_lossy(&out.stderr);
        ensure(
            out.status.code().is_some_and(|c| c != 0),
            format!("{what}: accepted with status {:?}", out.status.code()),
        )?;
        ensure(
            stderr.contains(element),
            format!("{what}: diagnostic {stderr:?} does not name {element}"),
        )?;
    }
    Ok("negative weight, incomplete context and inconsistent weights rejected by name".into())
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        (
            "exact completeness of the five dodecahedral POVMs",
            criterion_1,
        ),
        (
            "exactly five inscribed cubes with the expected overlap",
            criterion_2,
        ),
        (
            "dodecahedron uncolorable by parity and exhaustive search",
            criterion_3,
        ),
        (
            "hexagon uncolorable by parity and exhaustive search",
            criterion_4,
        ),
        ("single cube colorable in 8 ways", criterion_5),
        ("backtracking matches brute force", criterion_6),
        ("dilation isometry and outcome distributions", criterion_7),
        (
            "seeded sampling passes chi-square and reproduces",
            criterion_8,
        ),
        ("malformed scenario files are rejected", criterion_9),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS criterion {}: {title}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {title}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    std::io::stdout().flush().ok();
    if failed > 0 {
        std::process::exit(1);
    }
}
