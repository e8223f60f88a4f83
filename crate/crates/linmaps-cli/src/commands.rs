use std::fmt::Write as _;
use std::sync::Arc;

use linmaps::calculus::verify_calculus;
use linmaps::cube::check_cube_hypercontractivity;
use linmaps::cube::check_cube_sse;
use linmaps::expansion::{check_sse_theorem, scan_family, ShortcodeGraph, SseReport};
use linmaps::fixtures::sharpness;
use linmaps::global::{check_bilinear_hypercontractivity, run_battery};
use linmaps::io::{cube_to_json, function_to_json};
use linmaps::oracle::{verify_lemmas, OracleReport, Plan};
use linmaps::report::{in_desk_profile, Coverage, IdentityReport};
use linmaps::{Field, MapFunction, Space};
use serde::Serialize;

use crate::error::CliError;
use crate::sources::{cube_function, map_function, Source};
use crate::{Command, Common, Profile, SpaceArgs};

/// A finished report, written once at the end.
pub struct Outcome {
    file: &'static str,
    report: String,
    pass: bool,
    failing_instance: Option<String>,
}

impl Outcome {
    pub fn emit(self, common: &Common) -> Result<bool, CliError> {
        print!("{}", self.report);
        if let Some(dir) = &common.out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(self.file), &self.report)?;
        }
        if let (false, Some(instance)) = (self.pass, &self.failing_instance) {
            eprintln!("failing instance: {instance}");
            if let Some(dir) = &common.out {
                std::fs::write(dir.join("failing_instance.json"), instance)?;
            }
        }
        Ok(self.pass)
    }
}

pub fn common(command: &Command) -> &Common {
    match command {
        Command::Spectrum { common, .. }
        | Command::CheckHyp { common, .. }
        | Command::CheckCube { common, .. }
        | Command::Expansion { common, .. }
        | Command::VerifyLemmas { common, .. }
        | Command::Sharpness { common, .. } => common,
    }
}

fn build_space(args: &SpaceArgs, common: &Common, direct: bool) -> Result<Arc<Space>, CliError> {
    if args.dimv == 0 || args.dimw == 0 {
        return Err(CliError::Usage("dimensions must be positive".into()));
    }
    if common.profile == Some(Profile::Desk) && !in_desk_profile(args.q, args.dimv, args.dimw, direct) {
        let limit = if direct { "at most six matrix entries" } else { "dims up to 3×3" };
        return Err(CliError::Usage(format!(
            "q={} {}×{} is outside the desk profile (q in {{2,3}}, {limit})",
            args.q, args.dimv, args.dimw
        )));
    }
    let field = Field::standard(args.q).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Space::get(&field, args.dimv, args.dimw))
}

fn json_line(value: &impl Serialize) -> Result<String, CliError> {
    Ok(serde_json::to_string(value)? + "\n")
}

fn failing_function(pass: bool, g: &MapFunction<f64>) -> Result<Option<String>, CliError> {
    if pass {
        return Ok(None);
    }
    function_to_json(g).map(Some).map_err(CliError::library)
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Spectrum { space, d, function, common } => spectrum(&build_space(space, common, false)?, function, *d),
        Command::CheckHyp { space, d, function, common } => {
            check_hyp(&build_space(space, common, false)?, function, *d)
        }
        Command::CheckCube { p, n, d, function, rho, epsilon, common } => {
            if common.profile == Some(Profile::Desk) && !(matches!(p, 2 | 3) && *n <= 4 && *d <= 3) {
                return Err(CliError::Usage("the desk profile allows p in {2,3}, n ≤ 4, d ≤ 3".into()));
            }
            check_cube(*p, *n, *d, function, *rho, *epsilon)
        }
        Command::Expansion { space, set, r, c0, common } => {
            expansion(&build_space(space, common, false)?, set, *r, *c0, common.seed)
        }
        Command::VerifyLemmas { space, samples, common } => {
            lemmas(&build_space(space, common, true)?, *samples, common.seed)
        }
        Command::Sharpness { space, d, common } => sharpness_scan(&build_space(space, common, false)?, *d),
    }
}

fn spectrum(sp: &Arc<Space>, spec: &str, d: usize) -> Result<Outcome, CliError> {
    let Source { function, .. } = map_function(spec, sp, d)?;
    let sp = function.space().clone();
    let mass = function.transform().rank_mass();
    let mut counts = vec![0usize; mass.len()];
    for &r in sp.dual_ranks() {
        counts[r as usize] += 1;
    }
    let mut report = String::from("rank,characters,mass\n");
    for (rank, (count, m)) in counts.iter().zip(&mass).enumerate() {
        writeln!(report, "{rank},{count},{m:.12e}").expect("writing to a String");
    }
    Ok(Outcome { file: "spectrum.csv", report, pass: true, failing_instance: None })
}

fn check_hyp(sp: &Arc<Space>, spec: &str, d: usize) -> Result<Outcome, CliError> {
    let Source { function, .. } = map_function(spec, sp, d)?;
    if d > function.space().max_rank() {
        return Err(CliError::Usage(format!("order {d} exceeds the maximal rank {}", function.space().max_rank())));
    }
    let battery = run_battery(&function, d).map_err(CliError::library)?;
    Ok(Outcome {
        file: "check_hyp.json",
        report: json_line(&battery)?,
        pass: battery.pass,
        failing_instance: failing_function(battery.pass, &function)?,
    })
}

#[derive(Serialize)]
struct CubeReport<H, S> {
    p: usize,
    n: usize,
    hypercontractivity: H,
    #[serde(skip_serializing_if = "Option::is_none")]
    expansion: Option<S>,
    pass: bool,
}

fn check_cube(p: usize, n: usize, d: usize, spec: &str, rho: Option<f64>, epsilon: f64) -> Result<Outcome, CliError> {
    let function = cube_function(spec, p, n, d)?;
    let hyp = check_cube_hypercontractivity(&function.upto(d), d).map_err(CliError::library)?;
    let sse = rho.map(|rho| check_cube_sse(&function, rho, d, epsilon)).transpose().map_err(CliError::library)?;
    let pass = hyp.pass && sse.as_ref().is_none_or(|s| s.pass);
    let failing_instance = if pass { None } else { Some(cube_to_json(&function).map_err(CliError::library)?) };
    let report = CubeReport { p: function.p(), n: function.n(), hypercontractivity: hyp, expansion: sse, pass };
    Ok(Outcome { file: "check_cube.json", report: json_line(&report)?, pass, failing_instance })
}

fn expansion(sp: &Arc<Space>, spec: &str, r: usize, c0: f64, seed: u64) -> Result<Outcome, CliError> {
    let sets = if spec == "family" {
        scan_family(sp, seed).map_err(CliError::library)?
    } else {
        let Source { id, function } = map_function(spec, sp, 1)?;
        vec![(id, function)]
    };
    let mut report = format!("{}\n", SseReport::CSV_HEADER);
    let mut failing = None;
    let mut graph: Option<ShortcodeGraph> = None;
    for (id, set) in &sets {
        if graph.as_ref().is_none_or(|g| !Arc::ptr_eq(g.space(), set.space())) {
            graph = Some(ShortcodeGraph::new(set.space().clone()).map_err(CliError::library)?);
        }
        let graph = graph.as_ref().expect("built above");
        if r == 0 || r > set.space().max_rank() {
            return Err(CliError::Usage(format!("r must lie in 1..={}", set.space().max_rank())));
        }
        let sse = check_sse_theorem(graph, set, r, c0).map_err(CliError::library)?;
        report.push_str(&sse.csv_row(id));
        report.push('\n');
        if !sse.pass && failing.is_none() {
            failing = failing_function(false, set)?;
        }
    }
    Ok(Outcome { file: "expansion.csv", report, pass: failing.is_none(), failing_instance: failing })
}

/// One verification line: continuous identities report their worst error, combinatorial lemmas
/// the fraction of failing configurations.
#[derive(Serialize)]
struct LemmaLine {
    lemma_id: String,
    instances_checked: usize,
    max_err: f64,
    pass: bool,
    exhaustive: bool,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    failing_instance: Option<String>,
}

impl LemmaLine {
    fn identity(r: IdentityReport, exhaustive: bool, seed: u64) -> Self {
        LemmaLine {
            lemma_id: r.lemma_id,
            instances_checked: r.instances_checked,
            max_err: r.max_err,
            pass: r.pass,
            exhaustive,
            seed,
            failing_instance: r.failing_instance,
        }
    }

    fn combinatorial(r: OracleReport) -> Self {
        LemmaLine {
            max_err: if r.configurations == 0 { 0.0 } else { r.failures as f64 / r.configurations as f64 },
            lemma_id: r.lemma_id,
            instances_checked: r.configurations,
            pass: r.pass,
            exhaustive: r.exhaustive,
            seed: r.seed,
            failing_instance: r.failing_instance,
        }
    }
}

fn lemmas(sp: &Arc<Space>, samples: usize, seed: u64) -> Result<Outcome, CliError> {
    let coverage = Coverage::auto(sp, samples, seed);
    let exhaustive = matches!(coverage, Coverage::Exhaustive { .. });
    let identities = verify_calculus(sp, &coverage).map_err(CliError::library)?;
    let lines: Vec<LemmaLine> = identities
        .into_iter()
        .map(|r| LemmaLine::identity(r, exhaustive, seed))
        .chain(verify_lemmas(sp, &Plan::new(samples, seed)).into_iter().map(LemmaLine::combinatorial))
        .collect();
    let pass = lines.iter().all(|l| l.pass);
    let failing_instance = lines
        .iter()
        .find(|l| !l.pass)
        .map(|l| format!("{}: {}", l.lemma_id, l.failing_instance.as_deref().unwrap_or("no instance recorded")));
    let mut report = String::new();
    for line in &lines {
        report.push_str(&json_line(line)?);
    }
    Ok(Outcome { file: "verify_lemmas.jsonl", report, pass, failing_instance })
}

#[derive(Serialize)]
struct SharpnessLine {
    q: usize,
    n: usize,
    m: usize,
    d: usize,
    lhs: f64,
    influence_sum: f64,
    observed_constant: f64,
    observed_exponent: Option<f64>,
    pass: bool,
}

fn sharpness_scan(sp: &Arc<Space>, order: Option<usize>) -> Result<Outcome, CliError> {
    let orders: Vec<usize> = match order {
        Some(d) if d == 0 || d > sp.max_rank() => {
            return Err(CliError::Usage(format!("order must lie in 1..={}", sp.max_rank())))
        }
        Some(d) => vec![d],
        None => (1..=sp.max_rank()).collect(),
    };
    let mut report = String::new();
    let mut failing_instance = None;
    for d in orders {
        let g = sharpness(sp, d);
        let hyp = check_bilinear_hypercontractivity(&g, d).map_err(CliError::library)?;
        report.push_str(&json_line(&SharpnessLine {
            q: sp.q(),
            n: sp.dim_v(),
            m: sp.dim_w(),
            d,
            lhs: hyp.lhs,
            influence_sum: hyp.influence_sum,
            observed_constant: hyp.observed_constant,
            observed_exponent: hyp.observed_exponent,
            pass: hyp.pass,
        })?);
        if !hyp.pass && failing_instance.is_none() {
            failing_instance = failing_function(false, &g)?;
        }
    }
    Ok(Outcome { file: "sharpness.jsonl", report, pass: failing_instance.is_none(), failing_instance })
}
