use std::path::Path;

use conewise::cover::CoverReport;
use conewise::demos::{demos_all, DemoConfig};
use conewise::io::{self, SpaceFile};
use conewise::linalg::spectral_bound;
use conewise::norms::NormSpec;
use conewise::operators::{
    is_bipositive_with, is_disjointness_preserving_sampled, is_disjointness_preserving_with, is_local_with,
    is_positive_with, CheckStatus, LinOp, Verdict,
};
use conewise::optim::Arith;
use conewise::report::ScanReport;
use conewise::semigroups::{
    convergence_samples, cor_positive_resolvents, default_t_grid, thm_bounded_local, thm_generator_local,
    thm_local_resolvents, Semigroup, YosidaParams, LAMBDA_LADDER, T_GRID,
};
use conewise::{canonicalize, Error, OrderedSpace, Result, Tolerances, Truth};
use serde::{Deserialize, Serialize};

use crate::render::{render, Render};
use crate::Cli;

pub const SUITES: [&str; 5] = [
    "thm-generator-local",
    "thm-bounded-local",
    "thm-yosida",
    "cor-positive",
    "demos-all",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Undecided,
    NotApplicable,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass | Outcome::NotApplicable => 0,
            Outcome::Fail => 1,
            Outcome::Undecided => 3,
        }
    }

    fn from_status(s: CheckStatus) -> Self {
        match s {
            CheckStatus::Pass => Outcome::Pass,
            CheckStatus::Fail => Outcome::Fail,
            CheckStatus::Undecided => Outcome::Undecided,
            CheckStatus::NotApplicable => Outcome::NotApplicable,
        }
    }
}

/// Everything a report carries besides its body, so that a run can be
/// reproduced from the output alone.
#[derive(Debug, Serialize)]
pub struct Envelope<T> {
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub exact_rational: bool,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub report: T,
}

fn envelope<T>(cli: &Cli, command: &str, outcome: Outcome, notes: Vec<String>, report: T) -> Result<Envelope<T>> {
    Ok(Envelope {
        command: command.to_string(),
        seed: cli.seed,
        tolerances: cli.tolerances()?,
        exact_rational: cli.exact_rational,
        outcome,
        notes,
        report,
    })
}

#[derive(Debug, Serialize)]
pub struct SpaceReport {
    pub name: String,
    pub dim: usize,
    pub rows: usize,
    pub pointed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generating: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover_certified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverReport>,
}

/// Pointedness, generation, cover certification and sampled order density.
pub fn check_space(cli: &Cli, path: &Path) -> Result<(String, Outcome)> {
    let file: SpaceFile = io::load_config(path)?;
    let mut report = SpaceReport {
        name: file.name.clone(),
        dim: file.dim,
        rows: file.dual_rays.len(),
        pointed: true,
        generating: None,
        cover_certified: None,
        reason: None,
        cover: None,
    };
    let outcome = match file.build() {
        Err(e @ Error::NotPointed { .. }) => {
            report.pointed = false;
            report.reason = Some(e.to_string());
            Outcome::Fail
        }
        Err(e @ Error::NotGenerating) => {
            report.generating = Some(false);
            report.reason = Some(e.to_string());
            Outcome::Fail
        }
        Err(e) => return Err(e),
        Ok(space) => {
            report.generating = Some(true);
            let space = space.with_tol(cli.tolerances()?);
            match canonicalize(&space) {
                Ok(cover) => {
                    report.cover_certified = Some(true);
                    let cr = cover.report(cli.samples, cli.seed)?;
                    let passed = cr.density.passed;
                    if !passed {
                        report.reason = Some("order density fails on sampled points".into());
                    }
                    report.cover = Some(cr);
                    if passed {
                        Outcome::Pass
                    } else {
                        Outcome::Fail
                    }
                }
                Err(e @ (Error::Numerical(_) | Error::Singular(_))) => return Err(e),
                Err(e) => {
                    report.cover_certified = Some(false);
                    report.reason = Some(e.to_string());
                    Outcome::Fail
                }
            }
        }
    };
    let env = envelope(cli, "check-space", outcome, Vec::new(), report)?;
    Ok((render(&env, cli.format), outcome))
}

fn load_certified_space(cli: &Cli) -> Result<OrderedSpace> {
    let path = cli
        .space
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("--space is required".into()))?;
    let space = io::load_space(path)?.with_tol(cli.tolerances()?);
    Ok(canonicalize(&space)?.into_space())
}

fn load_op(cli: &Cli, space: &OrderedSpace) -> Result<LinOp> {
    let path = cli
        .op
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("--op is required".into()))?;
    io::load_operator(path, Some(space))
}

#[derive(Debug, Serialize)]
pub struct PredicateResult {
    pub predicate: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Serialize)]
pub struct OperatorReport {
    pub space: String,
    pub dim: usize,
    pub predicates: Vec<PredicateResult>,
}

/// Requested predicates, or all of them when none is requested.
pub fn operator(cli: &Cli) -> Result<(String, Outcome)> {
    let space = load_certified_space(cli)?;
    let op = load_op(cli, &space)?;
    let arith = if cli.exact_rational { Arith::Exact } else { Arith::Float };
    let all = !(cli.positive || cli.bipositive || cli.local || cli.dp);
    let mut notes = Vec::new();
    let mut predicates = Vec::new();
    if all || cli.positive {
        predicates.push(("positive", is_positive_with(&space, &op, arith)?));
    }
    if all || cli.bipositive {
        predicates.push(("bipositive", is_bipositive_with(&space, &op, arith)?));
    }
    if all || cli.local {
        predicates.push(("local", is_local_with(&space, &op, arith)?));
    }
    if all || cli.dp {
        let v = match is_disjointness_preserving_with(&space, &op, arith) {
            Err(Error::TooLarge { .. }) => {
                notes.push(format!(
                    "band lattice too large to enumerate; disjointness preservation sampled on {} pairs",
                    cli.samples
                ));
                is_disjointness_preserving_sampled(&space, &op, cli.samples, cli.seed)?
            }
            other => other?,
        };
        predicates.push(("disjointness_preserving", v));
    }
    let value = predicates
        .iter()
        .fold(Truth::True, |acc, (_, v)| acc.and(v.value));
    let outcome = match value {
        Truth::True => Outcome::Pass,
        Truth::False => Outcome::Fail,
        Truth::Undecided => Outcome::Undecided,
    };
    let report = OperatorReport {
        space: space.name().to_string(),
        dim: space.dim(),
        predicates: predicates
            .into_iter()
            .map(|(p, verdict)| PredicateResult {
                predicate: p.to_string(),
                verdict,
            })
            .collect(),
    };
    let env = envelope(cli, "operator", outcome, notes, report)?;
    Ok((render(&env, cli.format), outcome))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct BoundedConfig {
    ts: Vec<f64>,
}

impl Default for BoundedConfig {
    fn default() -> Self {
        Self {
            ts: default_t_grid(true),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct GeneratorConfig {
    ts: Vec<f64>,
    pairs: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            ts: T_GRID.to_vec(),
            pairs: 32,
        }
    }
}

/// `lambda0` defaults to the spectral bound of the generator plus one.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CorConfig {
    lambda0: Option<f64>,
    lambdas: Vec<f64>,
    ts: Vec<f64>,
}

impl Default for CorConfig {
    fn default() -> Self {
        Self {
            lambda0: None,
            lambdas: LAMBDA_LADDER.to_vec(),
            ts: T_GRID.to_vec(),
        }
    }
}

fn config<T: Default + serde::de::DeserializeOwned>(cli: &Cli) -> Result<T> {
    cli.config.as_ref().map_or_else(|| Ok(T::default()), io::load_config)
}

pub fn suite(cli: &Cli, name: &str) -> Result<(String, Outcome)> {
    let mut notes = Vec::new();
    if cli.exact_rational {
        notes.push("exact arithmetic applies to operator predicates; suites run in floating point".to_string());
    }
    let report: ScanReport = match name {
        "demos-all" => demos_all(&config::<DemoConfig>(cli)?)?,
        "thm-bounded-local" => {
            let space = load_certified_space(cli)?;
            let a = load_op(cli, &space)?;
            thm_bounded_local(&space, &a, &config::<BoundedConfig>(cli)?.ts)?
        }
        "thm-yosida" => {
            let space = load_certified_space(cli)?;
            let a = load_op(cli, &space)?;
            let params = config::<YosidaParams>(cli)?;
            thm_local_resolvents(&space, &a, &params, &convergence_samples(space.dim()))?
        }
        "thm-generator-local" => {
            let path = cli
                .space
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("--space is required".into()))?;
            let space = io::load_space(path)?.with_tol(cli.tolerances()?);
            let cover = canonicalize(&space)?;
            let a = load_op(cli, cover.space())?;
            let norm = match &cli.norm {
                Some(p) => io::load_norm(p)?,
                None => NormSpec::Sup,
            };
            let cfg = config::<GeneratorConfig>(cli)?;
            let sg = Semigroup::new(a)?;
            thm_generator_local(&cover, &sg, &cfg.ts, cfg.pairs, cli.seed, &norm)?
        }
        "cor-positive" => {
            let space = load_certified_space(cli)?;
            let a = load_op(cli, &space)?;
            let cfg = config::<CorConfig>(cli)?;
            let lambda0 = cfg.lambda0.unwrap_or_else(|| spectral_bound(a.matrix()) + 1.0);
            let params = YosidaParams::new(cfg.lambdas, cfg.ts)?;
            cor_positive_resolvents(&space, &a, lambda0, &params, &convergence_samples(space.dim()))?
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown suite `{other}`; available: {}",
                SUITES.join(", ")
            )))
        }
    };
    let outcome = Outcome::from_status(report.status);
    let env = envelope(cli, name, outcome, notes, report)?;
    Ok((render(&env, cli.format), outcome))
}

impl Render for SpaceReport {
    fn csv(&self) -> String {
        let mut out = String::from("row,functional\n");
        if let Some(c) = &self.cover {
            for (j, r) in c.canonical_rows.iter().enumerate() {
                let vals: Vec<String> = r.iter().map(f64::to_string).collect();
                out.push_str(&format!("{j},\"{}\"\n", vals.join(" ")));
            }
        }
        out
    }

    fn table(&self) -> String {
        let opt = |b: Option<bool>| b.map_or("n/a".to_string(), |v| v.to_string());
        let mut out = format!(
            "space      {}\ndim        {}\nrows       {}\npointed    {}\ngenerating {}\ncover      {}\n",
            self.name,
            self.dim,
            self.rows,
            self.pointed,
            opt(self.generating),
            opt(self.cover_certified)
        );
        if let Some(r) = &self.reason {
            out.push_str(&format!("reason     {r}\n"));
        }
        if let Some(c) = &self.cover {
            out.push_str(&format!(
                "removed    {:?}\ndensity    {} ({} samples)\ncanonical functionals:\n",
                c.removed_rows, c.density.passed, c.density.samples
            ));
            for r in &c.canonical_rows {
                let vals: Vec<String> = r.iter().map(|v| format!("{v:>10.4}")).collect();
                out.push_str(&format!("  {}\n", vals.join(" ")));
            }
        }
        out
    }
}

impl Render for OperatorReport {
    fn csv(&self) -> String {
        let mut out = String::from("predicate,value,method,residual,pairs\n");
        for p in &self.predicates {
            let v = &p.verdict;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.predicate,
                v.value,
                serde_json::to_value(v.method)
                    .ok()
                    .and_then(|m| m.as_str().map(str::to_string))
                    .unwrap_or_default(),
                v.residual.map(|r| r.to_string()).unwrap_or_default(),
                v.pairs.map(|n| n.to_string()).unwrap_or_default()
            ));
        }
        out
    }

    fn table(&self) -> String {
        let mut out = format!("space {} (dim {})\n", self.space, self.dim);
        for p in &self.predicates {
            out.push_str(&format!("  {:<24} {}\n", p.predicate, p.verdict.value));
            if let Some(c) = &p.verdict.certificate {
                out.push_str(&format!(
                    "    witness {}\n",
                    serde_json::to_string(c).expect("certificate serializes")
                ));
            }
            if let Some(n) = &p.verdict.note {
                out.push_str(&format!("    note {n}\n"));
            }
        }
        out
    }
}

impl Render for ScanReport {
    fn csv(&self) -> String {
        self.to_csv()
    }

    fn table(&self) -> String {
        let mut out = format!("{}: {:?}\n", self.name, self.status);
        if let Some(r) = &self.reason {
            out.push_str(&format!("reason: {r}\n"));
        }
        if let Some(v) = &self.variant {
            out.push_str(&format!("variant: {v}\n"));
        }
        for (title, checks) in [("hypotheses", &self.hypotheses), ("conclusions", &self.conclusions)] {
            out.push_str(&format!("{title}:\n"));
            for c in checks.iter() {
                out.push_str(&format!("  {:<10} {}\n", c.value.to_string(), c.name));
            }
        }
        out.push_str(&format!(
            "{:<44} {:>10} {:>10} {:>5} {:>10} {:>10} {:>10} {:>10}\n",
            "check", "t", "lambda", "pair", "verdict", "rho", "error", "residual"
        ));
        let num = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.3e}"));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<44} {:>10} {:>10} {:>5} {:>10} {:>10} {:>10} {:>10}\n",
                r.check,
                num(r.t),
                num(r.lambda),
                r.pair.map_or(String::new(), |p| p.to_string()),
                r.verdict.map_or(String::new(), |v| v.to_string()),
                num(r.rho),
                num(r.error),
                num(r.residual)
            ));
        }
        if !self.witnesses.is_empty() {
            out.push_str(&format!("witnesses: {}\n", self.witnesses.len()));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}
