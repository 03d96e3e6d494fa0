//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a violation or counterexample was found,
//! `2` usage, input or I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bounds::{check_instance, BoundReport, TheoremId, Verdict};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::group::GroupSpec;
use crate::poly::{cn_decompose, lemma21_check, vanishes_on_grid, Line, MultiPoly};
use crate::search::{hunt_lev_counterexample, HuntReport, SweepPlan, SweepReport, Sweeper};
use crate::sumsets::{ElementText, Instance, SumsetProfile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "sumset-lab",
    version,
    about = "Restricted sumsets, executable lower bounds, sweeps and a constructive Nullstellensatz",
    after_help = "Exit status: 0 ok, 1 violation or counterexample found, 2 usage or input error."
)]
pub struct Command {
    #[command(subcommand)]
    pub verb: Verb,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Stream one record per swept instance before the summary.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    /// Worker threads for sweeps and hunts.
    #[arg(long, global = true, env = "SUMSET_LAB_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// Overrides the seed of a sweep plan.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct InstanceArgs {
    /// Path to an instance JSON file.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Instance JSON given on the command line.
    #[arg(long)]
    pub inline: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Print A + B, the restricted sumset C and the representation counts.
    Compute(InstanceArgs),
    /// Check one instance against the chosen theorems (all when none given).
    Check {
        /// Theorem id; repeat for several. One of: cauchy_davenport,
        /// kemperman_scherk, erdos_heilbronn, anr, lev_conjecture, thm_1_1,
        /// thm_1_2, thm_1_3_i, thm_1_3_ii, ps_bound, karolyi_style.
        #[arg(long = "theorem", value_parser = parse_theorem)]
        theorems: Vec<TheoremId>,
        #[command(flatten)]
        input: InstanceArgs,
    },
    /// Run a sweep plan.
    Sweep {
        /// Path to a sweep plan JSON file.
        #[arg(long)]
        plan: PathBuf,
    },
    /// Reduce a polynomial modulo the grid polynomials.
    Cn {
        #[arg(long)]
        poly: String,
        /// Comma-separated grid points; one flag per variable.
        #[arg(long = "grid", required = true)]
        grids: Vec<String>,
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Check the lines lemma on explicit data.
    Lemma21 {
        #[arg(long)]
        field: String,
        /// Comma-separated elements of A.
        #[arg(long)]
        a: String,
        /// Comma-separated elements of B.
        #[arg(long)]
        b: String,
        /// A line `λ:μ` meaning `a + λ b = μ`; repeat for several. Defaults to
        /// `1:c` for every sum `c` realized by a pair with `P(a, b) ≠ 0`.
        #[arg(long = "line")]
        lines: Vec<String>,
        #[arg(long, default_value = "1")]
        poly: String,
    },
    /// Search a finite group for a counterexample to Lev's inequality.
    Hunt {
        #[arg(long)]
        group: String,
        /// Largest |A| (default: the group order).
        #[arg(long)]
        max_a: Option<usize>,
        /// Largest |B| (default: the group order).
        #[arg(long)]
        max_b: Option<usize>,
        /// Stop after this many instances.
        #[arg(long, default_value_t = u64::MAX)]
        cap: u64,
    },
}

fn parse_theorem(s: &str) -> std::result::Result<TheoremId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn parse_command<I, T>(argv: I) -> std::result::Result<Command, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = std::iter::once(OsString::from("sumset-lab")).chain(argv.into_iter().map(Into::into));
    Command::try_parse_from(args)
}

/// Parses `argv` (without the program name) and executes it.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_command(argv) {
        Ok(cmd) => execute(&cmd, out, err),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            }
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cmd.output {
        Some(path) => match File::create(path) {
            Ok(f) => {
                let mut w = BufWriter::new(f);
                let r = dispatch(cmd, &mut w);
                r.and_then(|code| w.flush().map(|_| code).map_err(io_error))
            }
            Err(e) => Err(Error::InvalidInput(format!("cannot create {}: {e}", path.display()))),
        },
        None => dispatch(cmd, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("write failed: {e}"))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(args: &InstanceArgs) -> Result<Instance> {
    match (&args.instance, &args.inline) {
        (Some(path), _) => Instance::from_json(&read_file(path)?),
        (None, Some(text)) => Instance::from_json(text),
        (None, None) => Err(Error::InvalidInput("an instance is required".into())),
    }
}

fn emit_json(out: &mut dyn Write, v: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::InvalidInput(e.to_string()))?;
    writeln!(out, "{text}").map_err(io_error)
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match &cmd.verb {
        Verb::Compute(input) => compute(cmd, &load_instance(input)?, out),
        Verb::Check { theorems, input } => check(cmd, theorems, &load_instance(input)?, out),
        Verb::Sweep { plan } => sweep(cmd, plan, out),
        Verb::Cn { poly, grids, field } => cn(cmd, poly, grids, field, out),
        Verb::Lemma21 {
            field,
            a,
            b,
            lines,
            poly,
        } => lemma21(cmd, field, a, b, lines, poly, out),
        Verb::Hunt {
            group,
            max_a,
            max_b,
            cap,
        } => hunt(cmd, group, *max_a, *max_b, *cap, out),
    }
}

fn braces<S: ToString>(items: impl IntoIterator<Item = S>) -> String {
    let parts: Vec<String> = items.into_iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn compute(cmd: &Command, inst: &Instance, out: &mut dyn Write) -> Result<i32> {
    let profile = SumsetProfile::compute(inst)?;
    let sumset: Vec<String> = profile.nu.keys().map(ToString::to_string).collect();
    let restricted: Vec<String> = profile.restricted.iter().map(ToString::to_string).collect();
    let min_sum = profile.min_nu_sumset();
    let min_c = profile.min_nu_restricted();
    if cmd.format == Format::Json {
        let nu: Vec<Value> = profile
            .nu
            .iter()
            .map(|(c, n)| json!({"element": c.to_string(), "count": n}))
            .collect();
        let min = |m: Option<(usize, &crate::sumsets::Element)>| {
            m.map(|(n, c)| json!({"value": n, "at": c.to_string()}))
        };
        emit_json(
            out,
            &json!({
                "instance": inst.to_doc(),
                "sumset": sumset,
                "restricted": restricted,
                "nu": nu,
                "min_nu_sumset": min(min_sum),
                "min_nu_restricted": min(min_c),
            }),
        )?;
    } else {
        let mut w = |s: String| writeln!(out, "{s}").map_err(io_error);
        w(format!("ambient     {}", inst.ambient()))?;
        w(format!("A           {}", braces(inst.a())))?;
        w(format!("B           {}", braces(inst.b())))?;
        w(format!("constraint  {}", inst.constraint()))?;
        w(format!("A+B         {}  (size {})", braces(&sumset), sumset.len()))?;
        w(format!("C           {}  (size {})", braces(&restricted), restricted.len()))?;
        let nu: Vec<String> = profile.nu.iter().map(|(c, n)| format!("{c}:{n}")).collect();
        w(format!("nu          {}", nu.join(" ")))?;
        if let Some((n, c)) = min_sum {
            w(format!("min nu A+B  {n} at {c}"))?;
        }
        match min_c {
            Some((n, c)) => w(format!("min nu C    {n} at {c}"))?,
            None => w("min nu C    - (C is empty)".to_string())?,
        }
    }
    Ok(EXIT_OK)
}

fn check(cmd: &Command, theorems: &[TheoremId], inst: &Instance, out: &mut dyn Write) -> Result<i32> {
    let ids: Vec<TheoremId> = if theorems.is_empty() {
        TheoremId::ALL.to_vec()
    } else {
        theorems.to_vec()
    };
    let reports: Vec<BoundReport> = ids.iter().map(|&t| check_instance(t, inst)).collect();
    if cmd.format == Format::Json {
        if reports.len() == 1 {
            emit_json(out, &reports[0])?;
        } else {
            emit_json(out, &reports)?;
        }
    } else {
        for r in &reports {
            writeln!(out, "{r}").map_err(io_error)?;
        }
    }
    let violated = reports.iter().any(|r| r.verdict == Verdict::Violated);
    Ok(if violated { EXIT_FOUND } else { EXIT_OK })
}

fn text_set(items: &[ElementText]) -> String {
    braces(items.iter().map(ElementText::text))
}

fn record_text(v: &Value) -> String {
    let inst = &v["instance"];
    let set = |k: &str| -> String {
        let items: Vec<String> = inst[k]
            .as_array()
            .map(|a| a.iter().map(|e| e.as_str().map_or_else(|| e.to_string(), String::from)).collect())
            .unwrap_or_default();
        braces(items)
    };
    let verdicts: Vec<String> = v["verdicts"]
        .as_object()
        .map(|m| {
            m.iter()
                .map(|(k, x)| format!("{k}={}", x.as_str().unwrap_or("?")))
                .collect()
        })
        .unwrap_or_default();
    format!(
        "#{} A={} B={} constraint={} {}",
        v["index"],
        set("A"),
        set("B"),
        inst["constraint"],
        verdicts.join(" ")
    )
}

fn sweep_text(r: &SweepReport, out: &mut dyn Write) -> Result<()> {
    let mut w = |s: String| writeln!(out, "{s}").map_err(io_error);
    w(format!(
        "sweep {} ({}): {} instances in {} ms{}",
        r.ambient,
        r.mode,
        r.instances_checked,
        r.elapsed_ms,
        if r.partial { " [partial: instance cap reached]" } else { "" }
    ))?;
    w(format!(
        "{:<18} {:>12} {:>10} {:>10} {:>12}",
        "theorem", "satisfied", "tight", "violated", "n/a"
    ))?;
    for t in &r.tallies {
        w(format!(
            "{:<18} {:>12} {:>10} {:>10} {:>12}",
            t.theorem.name(),
            t.satisfied,
            t.tight,
            t.violated,
            t.not_applicable
        ))?;
    }
    w(format!("violations: {}", r.violation_count))?;
    for v in &r.violations {
        let i = &v.report.witness.instance;
        w(format!(
            "  #{} {} A={} B={}: {}",
            v.index,
            v.report.theorem,
            text_set(&i.a),
            text_set(&i.b),
            v.report.detail
        ))?;
    }
    w(format!(
        "tight instances: {} (showing {})",
        r.tight_count,
        r.tight_instances.len()
    ))?;
    for v in &r.tight_instances {
        let i = &v.report.witness.instance;
        w(format!(
            "  #{} {} A={} B={}: {}",
            v.index,
            v.report.theorem,
            text_set(&i.a),
            text_set(&i.b),
            v.report.detail
        ))?;
    }
    Ok(())
}

fn sweep(cmd: &Command, plan_path: &Path, out: &mut dyn Write) -> Result<i32> {
    let mut plan = SweepPlan::from_json(&read_file(plan_path)?)?;
    if let Some(seed) = cmd.seed {
        plan.seed = seed;
    }
    let sweeper = Sweeper::new(&plan)?;
    let report = if cmd.verbose {
        let mut failure: Option<std::io::Error> = None;
        let json = cmd.format == Format::Json;
        let report = sweeper.run_streaming(cmd.workers, &mut |v| {
            if failure.is_none() {
                let line = if json { v.to_string() } else { record_text(v) };
                if let Err(e) = writeln!(out, "{line}") {
                    failure = Some(e);
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(io_error(e));
        }
        report
    } else {
        sweeper.run(cmd.workers)?
    };
    match cmd.format {
        // With a per-instance stream, keep the whole output line-delimited.
        Format::Json if cmd.verbose => writeln!(
            out,
            "{}",
            serde_json::to_string(&report).map_err(|e| Error::InvalidInput(e.to_string()))?
        )
        .map_err(io_error)?,
        Format::Json => emit_json(out, &report)?,
        Format::Text => sweep_text(&report, out)?,
    }
    Ok(if report.has_violations() { EXIT_FOUND } else { EXIT_OK })
}

fn parse_list(field: &FieldSpec, text: &str) -> Result<Vec<FieldElement>> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| field.parse_element(t))
        .collect()
}

fn cn(cmd: &Command, poly: &str, grids: &[String], field: &str, out: &mut dyn Write) -> Result<i32> {
    let field: FieldSpec = field.parse()?;
    let grids: Vec<Vec<FieldElement>> = grids
        .iter()
        .map(|g| parse_list(&field, g))
        .collect::<Result<_>>()?;
    let f = MultiPoly::parse(poly, &field, grids.len())?;
    let d = cn_decompose(&f, &grids)?;
    let remainder_zero = d.remainder.is_zero();
    let vanishes = match vanishes_on_grid(&f, &grids) {
        Ok(v) => Some(v),
        Err(Error::ResourceLimit(_)) => None,
        Err(e) => return Err(e),
    };
    let reconstruction_ok = d.reconstruct() == f;
    let degree_bounds_ok = d.quotient_degrees_bounded(&f);
    let reduced = d.remainder_reduced();
    let consistent = reconstruction_ok
        && degree_bounds_ok
        && reduced
        && vanishes.is_none_or(|v| v == remainder_zero);
    if cmd.format == Format::Json {
        let show = |ps: &[MultiPoly]| ps.iter().map(ToString::to_string).collect::<Vec<_>>();
        emit_json(
            out,
            &json!({
                "field": field.to_string(),
                "poly": f.to_string(),
                "grids": grids.iter().map(|g| g.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "grid_polys": show(&d.grid_polys),
                "quotients": show(&d.quotients),
                "remainder": d.remainder.to_string(),
                "remainder_zero": remainder_zero,
                "vanishes_on_grid": vanishes,
                "reconstruction_ok": reconstruction_ok,
                "degree_bounds_ok": degree_bounds_ok,
                "remainder_reduced": reduced,
            }),
        )?;
    } else {
        let mut w = |s: String| writeln!(out, "{s}").map_err(io_error);
        w(format!("f = {f} over {field}"))?;
        for (i, (g, h)) in d.grid_polys.iter().zip(&d.quotients).enumerate() {
            w(format!("g{} = {g}", i + 1))?;
            w(format!("h{} = {h}", i + 1))?;
        }
        w(format!("r = {}", d.remainder))?;
        let verdict = match vanishes {
            Some(true) => "vanishes on the grid",
            Some(false) => "does not vanish on the grid",
            None => "grid too large to evaluate pointwise",
        };
        w(format!("verdict: {verdict} (remainder zero: {remainder_zero})"))?;
        w(format!(
            "checks: reconstruction {reconstruction_ok}, degree bounds {degree_bounds_ok}, reduced {reduced}"
        ))?;
    }
    Ok(if consistent { EXIT_OK } else { EXIT_FOUND })
}

fn lemma21(
    cmd: &Command,
    field: &str,
    a: &str,
    b: &str,
    lines: &[String],
    poly: &str,
    out: &mut dyn Write,
) -> Result<i32> {
    let field: FieldSpec = field.parse()?;
    let a = parse_list(&field, a)?;
    let b = parse_list(&field, b)?;
    let p = MultiPoly::parse(poly, &field, 2)?;
    let lines: Vec<Line> = if lines.is_empty() {
        let mut sums = std::collections::BTreeSet::new();
        for x in &a {
            for y in &b {
                if !field.is_zero(&p.eval(&[x.clone(), y.clone()])?) {
                    sums.insert(field.add(x, y)?);
                }
            }
        }
        let sums: Vec<FieldElement> = sums.into_iter().collect();
        crate::poly::sum_lines(&field, &sums)
    } else {
        lines
            .iter()
            .map(|l| {
                let (lambda, mu) = l
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("line {l:?} is not of the form λ:μ")))?;
                Ok(Line {
                    lambda: field.parse_element(lambda)?,
                    mu: field.parse_element(mu)?,
                })
            })
            .collect::<Result<_>>()?
    };
    let report = lemma21_check(&a, &b, &lines, &p)?;
    if cmd.format == Format::Json {
        emit_json(out, &report)?;
    } else {
        let mut w = |s: String| writeln!(out, "{s}").map_err(io_error);
        let shown: Vec<String> = lines.iter().map(|l| format!("{}:{}", l.lambda, l.mu)).collect();
        w(format!("lines             {}", shown.join(" ")))?;
        w(format!("hypotheses ok     {}", report.hypotheses_ok))?;
        if let Some(f) = &report.failure {
            w(format!("failure           {f}"))?;
        }
        let nu: Vec<String> = report.nu_values.iter().map(ToString::to_string).collect();
        w(format!("nu                ({})", nu.join(", ")))?;
        w(format!("lhs               {}", report.lhs))?;
        w(format!(
            "rhs               {}",
            report.rhs.map_or_else(|| "-".into(), |r| r.to_string())
        ))?;
        w(format!("inequality holds  {}", report.inequality_holds))?;
        w(format!("tight             {}", report.is_tight))?;
    }
    let counterexample = report.hypotheses_ok && !report.inequality_holds;
    Ok(if counterexample { EXIT_FOUND } else { EXIT_OK })
}

fn hunt(
    cmd: &Command,
    group: &str,
    max_a: Option<usize>,
    max_b: Option<usize>,
    cap: u64,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec: GroupSpec = group.parse()?;
    let order = spec
        .order()
        .ok_or_else(|| Error::InvalidInput(format!("{spec} is infinite; the hunt needs a finite group")))?
        as usize;
    let report: HuntReport = hunt_lev_counterexample(
        &spec,
        max_a.unwrap_or(order),
        max_b.unwrap_or(order),
        cap,
        cmd.workers,
    )?;
    if cmd.format == Format::Json {
        emit_json(out, &report)?;
    } else {
        let mut w = |s: String| writeln!(out, "{s}").map_err(io_error);
        match &report.witness {
            None => w(format!(
                "hunt {}: no counterexample among {} instances ({}) in {} ms",
                report.group,
                report.instances_checked,
                if report.exhausted { "search exhausted" } else { "stopped at the cap" },
                report.elapsed_ms
            ))?,
            Some(r) => {
                let i = &r.witness.instance;
                w(format!(
                    "hunt {}: counterexample after {} instances: A={} B={}: {}",
                    report.group,
                    report.instances_checked,
                    text_set(&i.a),
                    text_set(&i.b),
                    r.detail
                ))?
            }
        }
    }
    Ok(if report.witness.is_some() { EXIT_FOUND } else { EXIT_OK })
}
