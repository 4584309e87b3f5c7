//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use conewise::catalog::{self, RandomSpaceOptions};
use conewise::demos::{
    demos_all, diffusion_not_dp, kernel_table, pol2_demo, translation_demo, DemoConfig, Grid, Pol2Config,
    TranslationConfig,
};
use conewise::norms::{regular_norm, rho_extension, rho_meet_disjoint, NormSpec};
use conewise::operators::{
    inverse_local_check, is_local, is_local_sampled, locality_algebra_check, random_cover_multiplication,
    random_disjoint_pairs, random_local_operator, random_operator, random_positive_local_bijection, CheckStatus,
    LinOp,
};
use conewise::order::{is_disjoint, is_disjoint_oracle};
use conewise::semigroups::{
    expm, thm_generator_local, thm_local_resolvents, Semigroup, YosidaParams, LAMBDA_LADDER, T_GRID,
};
use conewise::{canonicalize, LatticeCover, OrderedSpace, Tolerances, Truth};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SPACES: usize = 20;
const SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn covers(tol: Tolerances) -> Vec<LatticeCover> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let opts = RandomSpaceOptions::default();
    let mut out = Vec::new();
    while out.len() < SPACES {
        let space = catalog::random_space(&mut rng, &opts).with_tol(tol);
        if let Ok(c) = canonicalize(&space) {
            out.push(c);
        }
    }
    out
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

fn unit(x: &DVector<f64>) -> DVector<f64> {
    x / x.amax().max(f64::MIN_POSITIVE)
}

/// Half band-complement pairs, half Gaussian pairs, all scaled to sup norm 1.
fn test_pairs(space: &OrderedSpace, count: usize, seed: u64) -> Vec<(DVector<f64>, DVector<f64>)> {
    let mut pairs: Vec<_> = random_disjoint_pairs(space, None, count / 2, seed)
        .expect("cover certified")
        .into_iter()
        .map(|(x, y)| (unit(&x), unit(&y)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    while pairs.len() < count {
        let n = space.dim();
        pairs.push((unit(&gaussian(&mut rng, n)), unit(&gaussian(&mut rng, n))));
    }
    pairs
}

fn c1_oracle_equivalence(tol8: &[LatticeCover]) -> Outcome {
    let (mut pairs, mut disjoint, mut bad) = (0usize, 0usize, 0usize);
    let mut first = None;
    for (s, cover) in tol8.iter().enumerate() {
        let space = cover.space();
        for (x, y) in test_pairs(space, 500, SEED + s as u64) {
            let oracle = is_disjoint_oracle(space, &x, &y).expect("oracle").truth;
            let fast = is_disjoint(space, &x, &y).expect("cover test");
            pairs += 1;
            disjoint += fast as usize;
            if oracle != Truth::from_bool(fast) {
                bad += 1;
                first.get_or_insert(format!("space {s}: oracle {oracle:?}, cover {fast}"));
            }
        }
    }
    let extra = first.map(|f| format!(", first: {f}")).unwrap_or_default();
    Outcome::new(
        bad == 0 && tol8.len() >= 20,
        format!("{} spaces, {pairs} pairs ({disjoint} disjoint), {bad} disagreements{extra}", tol8.len()),
    )
}

fn c2_extension(spaces: &[LatticeCover]) -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (s, cover) in spaces.iter().enumerate() {
        let space = cover.space();
        let norms = [
            NormSpec::Sup,
            NormSpec::OrderUnit {
                u: space.interior_point().iter().copied().collect(),
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 100 + s as u64);
        for _ in 0..200 {
            let x = gaussian(&mut rng, space.dim());
            let z = cover.embed(&x).expect("embed");
            for norm in &norms {
                let rho = rho_extension(cover, norm, &z).expect("rho").value;
                let reg = regular_norm(space, norm, &x).expect("regular norm").value;
                worst = worst.max((rho - reg).abs() / reg.abs().max(f64::MIN_POSITIVE));
                count += 1;
            }
        }
    }
    Outcome::new(worst <= 1e-8, format!("{count} comparisons, max relative gap {worst:.2e}"))
}

fn c3_rho_soundness(spaces: &[LatticeCover]) -> Outcome {
    let (mut small, mut violations, mut total) = (0usize, 0usize, 0usize);
    for (s, cover) in spaces.iter().enumerate() {
        let space = cover.space();
        for (x, y) in test_pairs(space, 200, SEED + 200 + s as u64) {
            let rho = rho_meet_disjoint(cover, &NormSpec::Sup, &x, &y).expect("rho").rho;
            total += 1;
            if rho <= 1e-10 {
                small += 1;
                if !is_disjoint_oracle(space, &x, &y).expect("oracle").truth.is_true() {
                    violations += 1;
                }
            }
        }
    }
    Outcome::new(
        violations == 0 && small > 0,
        format!("{total} pairs, {small} with rho <= 1e-10, {violations} violations"),
    )
}

/// Local, Gaussian, and local plus a small Gaussian perturbation.
fn mixed_operator(space: &OrderedSpace, rng: &mut ChaCha8Rng, k: usize) -> LinOp {
    match k % 3 {
        0 => random_local_operator(space, rng).expect("local operator"),
        1 => random_operator(space, rng).expect("operator"),
        _ => {
            let a = random_local_operator(space, rng).expect("local operator");
            let b = random_operator(space, rng).expect("operator");
            LinOp::combine(1.0, &a, 1e-3, &b).expect("sum")
        }
    }
}

fn c4_local_band_preserving(spaces: &[LatticeCover]) -> Outcome {
    let (mut ops, mut local, mut bad) = (0usize, 0usize, 0usize);
    for (s, cover) in spaces.iter().enumerate() {
        let space = cover.space();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 300 + s as u64);
        for k in 0..100 {
            let op = mixed_operator(space, &mut rng, k);
            let exact = is_local(space, &op).expect("band scan").value;
            let sampled = is_local_sampled(space, &op, 1000, SEED + k as u64).expect("sampled").value;
            ops += 1;
            local += exact.is_true() as usize;
            if exact != sampled {
                bad += 1;
            }
        }
    }
    Outcome::new(bad == 0, format!("{ops} operators ({local} local), {bad} disagreements"))
}

fn c5_algebra(spaces: &[LatticeCover]) -> Outcome {
    let (mut failures, mut not_applicable) = (0usize, 0usize);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 400);
    for i in 0..1000 {
        let space = spaces[i % spaces.len()].space();
        let s = random_local_operator(space, &mut rng).expect("local operator");
        let t = random_local_operator(space, &mut rng).expect("local operator");
        let (alpha, beta) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let r = locality_algebra_check(space, &s, &t, alpha, beta).expect("algebra check");
        match r.status {
            CheckStatus::Pass => {}
            CheckStatus::NotApplicable => not_applicable += 1,
            _ => failures += 1,
        }
    }
    Outcome::new(
        failures == 0 && not_applicable == 0,
        format!("1000 quadruples, {failures} failures, {not_applicable} not applicable"),
    )
}

fn c6_inverse(spaces: &[LatticeCover]) -> Outcome {
    let (mut failures, mut not_applicable) = (0usize, 0usize);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 500);
    for i in 0..100 {
        let space = spaces[i % spaces.len()].space();
        let op = random_positive_local_bijection(space, &mut rng).expect("bijection");
        match inverse_local_check(space, &op).expect("inverse check").status {
            CheckStatus::Pass => {}
            CheckStatus::NotApplicable => not_applicable += 1,
            _ => failures += 1,
        }
    }
    Outcome::new(
        failures == 0 && not_applicable == 0,
        format!("100 bijections, {failures} failures, {not_applicable} not applicable"),
    )
}

fn c7_bounded_local(spaces: &[LatticeCover]) -> Outcome {
    let ts = [-10.0, -1.0, -1e-2, 1e-2, 1.0, 10.0];
    let (mut checks, mut failures) = (0usize, 0usize);
    let mut worst = 0.0f64;
    for (s, cover) in spaces.iter().enumerate() {
        let space = cover.space();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 600 + s as u64);
        for _ in 0..50 {
            let a = random_local_operator(space, &mut rng).expect("local operator");
            for &t in &ts {
                let e = LinOp::on(space, expm(a.matrix(), t).expect("expm")).expect("operator");
                let v = is_local(space, &e).expect("band scan");
                let rel = v.residual.unwrap_or(0.0) / e.norm_inf();
                worst = worst.max(rel);
                checks += 1;
                if !v.is_true() || rel > 1e-8 {
                    failures += 1;
                }
            }
        }
    }
    Outcome::new(
        failures == 0,
        format!("{checks} exponentials, {failures} failures, max relative residual {worst:.2e}"),
    )
}

fn c8_yosida(spaces: &[LatticeCover]) -> Outcome {
    let ts = vec![1e-3, 1e-2, 1e-1, 1.0];
    let params = YosidaParams::new(LAMBDA_LADDER.to_vec(), ts).expect("params");
    let top = *LAMBDA_LADDER.last().expect("ladder");
    let (mut runs, mut failures) = (0usize, 0usize);
    let mut worst = 0.0f64;
    let mut first = None;
    for (s, cover) in spaces.iter().enumerate() {
        let space = cover.space();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 700 + s as u64);
        for _ in 0..3 {
            let (a, _) = random_cover_multiplication(space, &mut rng, -2.0, 1.0).expect("multiplication");
            let xs: Vec<_> = (0..3).map(|_| gaussian(&mut rng, space.dim())).collect();
            let r = thm_local_resolvents(space, &a, &params, &xs).expect("yosida scan");
            runs += 1;
            let mut ok = r.status == CheckStatus::Pass;
            for row in r.rows.iter().filter(|row| row.check == "convergence" && row.lambda == Some(top)) {
                let k = row.pair.expect("sample index");
                let rel = row.error.expect("error") / xs[k].amax();
                worst = worst.max(rel);
                ok &= rel <= 1e-3;
            }
            if !ok {
                failures += 1;
                first.get_or_insert(format!("space {s}: {:?} {:?}", r.status, r.reason));
            }
        }
    }
    let extra = first.map(|f| format!(", first: {f}")).unwrap_or_default();
    Outcome::new(
        failures == 0,
        format!("{runs} generators, {failures} failures, max error at lambda = 1e4: {worst:.2e}{extra}"),
    )
}

fn c9_generator_local(spaces: &[LatticeCover]) -> Outcome {
    let (mut runs, mut failures, mut pairs) = (0usize, 0usize, 0usize);
    let mut worst_ax = 0.0f64;
    let mut worst_tail = 0.0f64;
    for (s, cover) in spaces.iter().enumerate() {
        let space = cover.space();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 800 + s as u64);
        for k in 0..2 {
            let a = random_local_operator(space, &mut rng).expect("local operator");
            let sg = Semigroup::new(a).expect("semigroup");
            let r = thm_generator_local(cover, &sg, &T_GRID, 20, SEED + k, &NormSpec::Sup).expect("generator scan");
            runs += 1;
            let mut ok = r.status == CheckStatus::Pass;
            for row in &r.rows {
                match (row.check.as_str(), row.rho) {
                    ("rho(Ax)", Some(rho)) => {
                        pairs += 1;
                        worst_ax = worst_ax.max(rho);
                        ok &= rho <= 1e-9;
                    }
                    ("rho(difference quotient)", Some(rho)) if row.t == Some(1e-3) => {
                        worst_tail = worst_tail.max(rho);
                        ok &= rho <= 1e-6;
                    }
                    _ => {}
                }
            }
            failures += !ok as usize;
        }
    }
    Outcome::new(
        failures == 0,
        format!(
            "{runs} semigroups, {pairs} pairs, max rho(Ax) {worst_ax:.2e}, max rho at t = 1e-3 {worst_tail:.2e}, {failures} failures"
        ),
    )
}

fn c10_diffusion() -> Outcome {
    let grid = Grid::uniform(0.0, 1.0, 101).expect("grid");
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [0.05, 0.1, 0.5] {
        let table = kernel_table(t, &grid, 1e-12).expect("kernel table");
        let witness = diffusion_not_dp(t, 101, 1e-12).expect("witness");
        ok &= table.positive() && table.min_margin > 0.0 && witness.verified();
        parts.push(format!("t = {t}: margin {:.3e}", table.min_margin));
    }
    Outcome::new(ok, parts.join(", "))
}

fn c11_translation() -> Outcome {
    let r = translation_demo(&TranslationConfig::default()).expect("translation demo");
    Outcome::new(
        r.status == CheckStatus::Pass && !r.witnesses.is_empty(),
        format!("status {:?}, {} witnesses", r.status, r.witnesses.len()),
    )
}

fn c12_pol2() -> Outcome {
    let (r, density) = pol2_demo(&Pol2Config::default()).expect("pol2 demo");
    Outcome::new(
        r.status == CheckStatus::Pass && density.passed,
        format!("status {:?}, variant {:?}", r.status, r.variant.unwrap_or_default()),
    )
}

fn c13_determinism(spaces: &[LatticeCover]) -> Outcome {
    let run = || {
        let mut out = demos_all(&DemoConfig::default()).expect("demos").to_json();
        let cover = &spaces[0];
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let a = random_local_operator(cover.space(), &mut rng).expect("local operator");
        let sg = Semigroup::new(a).expect("semigroup");
        out += &thm_generator_local(cover, &sg, &T_GRID, 10, SEED, &NormSpec::Sup)
            .expect("generator scan")
            .to_csv();
        let op = random_operator(cover.space(), &mut rng).expect("operator");
        let v = is_local_sampled(cover.space(), &op, 100, SEED).expect("sampled");
        out += &serde_json::to_string(&v).expect("verdict json");
        out
    };
    let (a, b) = (run(), run());
    Outcome::new(a == b, format!("{} bytes per run", a.len()))
}

fn main() -> ExitCode {
    let tol8 = Tolerances {
        zero: 1e-8,
        ..Tolerances::default()
    };
    let spaces8 = covers(tol8);
    let spaces = covers(Tolerances::default());
    let dims: Vec<_> = spaces.iter().map(|c| (c.space().dim(), c.m_c())).collect();
    assert!(dims.iter().all(|&(n, m)| n <= 6 && m <= 12), "space sizes {dims:?}");

    type Criterion<'a> = (&'a str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", Some(Duration::from_secs(120)), Box::new(|| c1_oracle_equivalence(&spaces8))),
        ("rho extends the regular norm", None, Box::new(|| c2_extension(&spaces))),
        ("rho disjointness soundness", None, Box::new(|| c3_rho_soundness(&spaces))),
        ("local iff band preserving", None, Box::new(|| c4_local_band_preserving(&spaces))),
        ("locality algebra", None, Box::new(|| c5_algebra(&spaces))),
        ("inverse locality", None, Box::new(|| c6_inverse(&spaces))),
        ("bounded local generator", None, Box::new(|| c7_bounded_local(&spaces))),
        ("yosida pipeline", None, Box::new(|| c8_yosida(&spaces))),
        ("generator locality", None, Box::new(|| c9_generator_local(&spaces))),
        ("diffusion counterexample", Some(Duration::from_secs(60)), Box::new(c10_diffusion)),
        ("translation demo", None, Box::new(c11_translation)),
        ("pol2 pipeline", Some(Duration::from_secs(30)), Box::new(c12_pol2)),
        ("determinism", None, Box::new(|| c13_determinism(&spaces))),
    ];

    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let pass = out.pass && in_time;
        failed += !pass as usize;
        let limit_note = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
        println!(
            "criterion {:>2} {name}: {} [{}; {:.2}s{limit_note}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
