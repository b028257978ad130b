//! Command-line front end: classify, embed, synth, conj, oracle, verify.
//!
//! Exit codes are a stable contract for scripting: 0 success, 1 domain
//! error (reported with the error name), 2 usage or parse error. All JSON
//! output serializes numbers as strings and is byte-identical across runs
//! on identical input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use soq_core::codec;
use soq_core::conjugacy::{
    self, conjugacy_summary, dihedral_class_with_budget, dihedral_same_class, involution_class,
    klein_invariant, representative_involution_with_budget, SummaryMode,
};
use soq_core::embedding::{embeds, synthesize_generators_with_budget, GroupSpec};
use soq_core::error::Error;
use soq_core::field::{reduce_square_class, FieldCtx, SquareClass};
use soq_core::oracle;
use soq_core::quadform::{diagonalize, TernaryForm};

#[derive(Parser)]
#[command(
    name = "soq",
    about = "Finite subgroups of SO(q) for ternary quadratic forms over Q and F_p: embeddability, verified generators, conjugacy invariants, and a brute-force oracle",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormArgs {
    /// Base field: Q or F<p> for an odd prime p
    #[arg(long)]
    field: String,
    /// Diagonal form as comma-separated rationals, e.g. "1,1,1" or "-1,2/3,5"
    #[arg(long, allow_hyphen_values = true)]
    form: Option<String>,
    /// Path to a JSON 3x3 Gram matrix (diagonalized on ingestion)
    #[arg(long)]
    gram: Option<PathBuf>,
    /// Height bound for rational witness searches
    #[arg(long, default_value_t = 5000)]
    budget: u64,
    /// Trial-division bound for square-class canonicalization over Q
    #[arg(long, default_value_t = 1_000_000)]
    factor_bound: u64,
    /// Also write the JSON report to this path
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Table of which finite groups embed into SO(q)
    Classify(FormArgs),
    /// Decide one group, with the reason trace
    Embed {
        /// Group label: C<n>, D<2n>, A4, S4 or A5
        #[arg(long)]
        group: String,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Synthesize verified generator matrices
    Synth {
        #[arg(long)]
        group: String,
        #[command(flatten)]
        form: FormArgs,
        /// Write the generator certificate to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conjugacy-class invariants and representatives
    Conj {
        #[arg(long)]
        group: String,
        #[command(flatten)]
        form: FormArgs,
        /// Compute the invariant of the subgroup in this JSON file
        /// (an array of 3x3 matrices of rational strings)
        #[arg(long)]
        class_of: Option<PathBuf>,
        /// Decide whether two classes coincide (square classes; for Klein
        /// four-groups pass pairs like "2,5")
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        same_class: Option<Vec<String>>,
        /// Synthesize a representative subgroup for this class
        #[arg(long, allow_hyphen_values = true)]
        representative: Option<String>,
    },
    /// Brute-force enumeration and census over F_p
    Oracle {
        /// Odd prime p <= 13
        #[arg(long)]
        p: u64,
        /// Diagonal form over F_p, e.g. "1,1,1"
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        /// Cross-check every prediction against the census
        #[arg(long)]
        cross_check: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-verify a generator certificate produced by synth
    Verify {
        /// Path to the certificate JSON
        path: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn parse_form(args: &FormArgs) -> Result<(FieldCtx, TernaryForm), Error> {
    soq_core::field::set_default_factor_bound(args.factor_bound);
    let ctx = FieldCtx::parse(&args.field)?;
    match (&args.form, &args.gram) {
        (Some(s), None) => {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!(
                    "--form needs three comma-separated entries, got {s:?}"
                )));
            }
            let diag: Vec<_> = parts
                .iter()
                .map(|t| ctx.parse_elem(t))
                .collect::<Result<_, _>>()?;
            Ok((ctx, TernaryForm::from_slice(&diag)?))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("cannot read {path:?}: {e}")))?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("bad JSON in {path:?}: {e}")))?;
            let gram = codec::parse_matrix(ctx, &value)?;
            let (form, _) = diagonalize(&gram)?;
            Ok((ctx, form))
        }
        _ => Err(Error::Parse(
            "exactly one of --form or --gram is required".into(),
        )),
    }
}

fn emit(report: &Value, json_path: &Option<PathBuf>) -> Result<(), Error> {
    if let Some(path) = json_path {
        let text = serde_json::to_string_pretty(report)
            .map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {path:?}: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Embed { group, form } => cmd_embed(&group, form),
        Command::Synth { group, form, out } => cmd_synth(&group, form, out),
        Command::Conj {
            group,
            form,
            class_of,
            same_class,
            representative,
        } => cmd_conj(&group, form, class_of, same_class, representative),
        Command::Oracle {
            p,
            form,
            cross_check,
            json,
        } => cmd_oracle(p, &form, cross_check, json),
        Command::Verify { path } => cmd_verify(&path),
    }
}

/// Group labels scanned by classify: over Q the orders with rational
/// alpha_n, over F_p everything up to the p+1 bound.
fn classify_candidates(ctx: FieldCtx) -> Vec<GroupSpec> {
    let mut out = Vec::new();
    match ctx {
        FieldCtx::Rationals => {
            for n in [1u32, 2, 3, 4, 6] {
                out.push(GroupSpec::Cyclic(n));
            }
            for n in [2u32, 3, 4, 6] {
                out.push(GroupSpec::Dihedral(n));
            }
        }
        FieldCtx::PrimeField(p) => {
            for n in 1..=(p as u32 + 1) {
                out.push(GroupSpec::Cyclic(n));
            }
            for n in 2..=(p as u32 + 1) {
                out.push(GroupSpec::Dihedral(n));
            }
        }
    }
    out.extend([GroupSpec::A4, GroupSpec::S4, GroupSpec::A5]);
    out
}

fn cmd_classify(args: FormArgs) -> Result<ExitCode, Error> {
    let (ctx, form) = parse_form(&args)?;
    let mut rows = Vec::new();
    println!("SO(q) for q = {form} over {ctx}");
    println!("{:<6} {:<12} reason", "group", "embeds?");
    for g in classify_candidates(ctx) {
        let (verdict, reason) = match embeds(&g, &form) {
            Ok(d) => (
                if d.embeds { "yes" } else { "no" }.to_string(),
                d.trace.join("; "),
            ),
            Err(Error::PIrregular { p, .. }) => (
                "p-irregular".to_string(),
                format!("|{g}| is divisible by the characteristic {p}; excluded from the group-by-group classification (any such subgroup forces q isotropic)"),
            ),
            Err(e) => return Err(e),
        };
        println!("{:<6} {:<12} {}", g.label(), verdict, reason);
        rows.push(json!({
            "group": g.label(),
            "embeds": verdict,
            "reason": reason,
        }));
    }
    let report = json!({
        "field": ctx.to_string(),
        "form": codec::form_to_json(&form),
        "rows": rows,
    });
    emit(&report, &args.json)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_embed(group: &str, args: FormArgs) -> Result<ExitCode, Error> {
    let (ctx, form) = parse_form(&args)?;
    let g = GroupSpec::parse(group)?;
    let d = embeds(&g, &form)?;
    println!(
        "{} {} embed into SO({form}) over {ctx}",
        g.label(),
        if d.embeds { "does" } else { "does not" }
    );
    for line in &d.trace {
        println!("  - {line}");
    }
    let report = json!({
        "field": ctx.to_string(),
        "form": codec::form_to_json(&form),
        "group": g.label(),
        "embeds": d.embeds,
        "trace": d.trace,
    });
    emit(&report, &args.json)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_synth(group: &str, args: FormArgs, out: Option<PathBuf>) -> Result<ExitCode, Error> {
    let (ctx, form) = parse_form(&args)?;
    let g = GroupSpec::parse(group)?;
    let set = synthesize_generators_with_budget(&g, &form, args.budget)?;
    let cert = codec::certificate_to_json(&set, ctx, &form);
    println!(
        "{}: {} generators, closure order {}, relations verified: {}",
        g.label(),
        set.gens.len(),
        set.presentation_check.closure_order,
        set.presentation_check.relations.join(", ")
    );
    for gen in &set.gens {
        print!("{}", gen.matrix());
        println!();
    }
    if let Some(path) = &out {
        let text =
            serde_json::to_string_pretty(&cert).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {path:?}: {e}")))?;
        println!("certificate written to {}", path.display());
    }
    emit(&cert, &args.json)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_class(ctx: FieldCtx, s: &str) -> Result<SquareClass, Error> {
    reduce_square_class(&ctx.parse_elem(s)?)
}

fn parse_pair(ctx: FieldCtx, s: &str) -> Result<(SquareClass, SquareClass), Error> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!(
            "expected a pair like \"2,5\", got {s:?}"
        )));
    }
    Ok((parse_class(ctx, parts[0])?, parse_class(ctx, parts[1])?))
}

fn cmd_conj(
    group: &str,
    args: FormArgs,
    class_of: Option<PathBuf>,
    same_class: Option<Vec<String>>,
    representative: Option<String>,
) -> Result<ExitCode, Error> {
    let (ctx, form) = parse_form(&args)?;
    let g = GroupSpec::parse(group)?;

    if let Some(path) = class_of {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Parse(format!("cannot read {path:?}: {e}")))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("bad JSON in {path:?}: {e}")))?;
        let matrices = codec::parse_matrices(ctx, &value)?;
        let report = match g {
            GroupSpec::Cyclic(2) => {
                let m = matrices
                    .first()
                    .ok_or_else(|| Error::Parse("empty matrix list".into()))?;
                let inv = involution_class(m, &form)?;
                println!("involution class: d = {} (q(axis) = {})", inv.class, inv.value);
                json!({
                    "invariant": inv.class.to_string(),
                    "axis": inv.axis.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "value": inv.value.to_string(),
                })
            }
            GroupSpec::Dihedral(2) => {
                let k = klein_invariant(&matrices, &form)?;
                println!(
                    "Klein class: pair ({},{}), orbit size {}",
                    k.pair.0,
                    k.pair.1,
                    k.orbit.len()
                );
                json!({
                    "pair": [k.pair.0.to_string(), k.pair.1.to_string()],
                    "orbit": k.orbit.iter()
                        .map(|(x, y)| vec![x.to_string(), y.to_string()])
                        .collect::<Vec<_>>(),
                    "axis_triple": k.axis_triple.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                })
            }
            GroupSpec::Dihedral(n) => {
                let d = dihedral_class_with_budget(&matrices, n, &form, args.budget)?;
                println!(
                    "dihedral coset: c = {} in D(<1,{}>)/C, C generated by {}",
                    d.c,
                    d.beta.neg(),
                    d.c_generator
                );
                json!({
                    "n": n.to_string(),
                    "beta": d.beta.to_string(),
                    "c": d.c.to_string(),
                    "c_generator": d.c_generator.to_string(),
                })
            }
            _ => {
                return Err(Error::Parse(
                    "--class-of applies to C2, D4 (Klein) or D<2n>".into(),
                ))
            }
        };
        emit(&report, &args.json)?;
        return Ok(ExitCode::SUCCESS);
    }

    if let Some(pair) = same_class {
        let (s1, s2) = (&pair[0], &pair[1]);
        let same = match g {
            GroupSpec::Cyclic(2) => {
                let c1 = parse_class(ctx, s1)?;
                let c2 = parse_class(ctx, s2)?;
                for c in [&c1, &c2] {
                    if !form.represents(&c.to_elem())? {
                        return Err(Error::NotRepresentable(format!("{c} is not in D(q)")));
                    }
                }
                c1 == c2
            }
            GroupSpec::Dihedral(2) => {
                let p1 = parse_pair(ctx, s1)?;
                let p2 = parse_pair(ctx, s2)?;
                let (qn, _) = form.normalized()?;
                let a = qn.diag()[0].neg();
                let b = qn.diag()[1].neg();
                for p in [&p1, &p2] {
                    if !conjugacy::in_q_ab(&a, &b, p)? {
                        return Err(Error::NotRepresentable(format!(
                            "({},{}) is not in Q_a,b",
                            p.0, p.1
                        )));
                    }
                }
                conjugacy::klein_orbit(&a, &b, &p1)?.contains(&p2)
            }
            GroupSpec::Dihedral(n) => {
                let c1 = parse_class(ctx, s1)?;
                let c2 = parse_class(ctx, s2)?;
                dihedral_same_class(&c1, &c2, n, &form)?
            }
            _ => {
                return Err(Error::Parse(
                    "--same-class applies to C2, D4 (Klein) or D<2n>".into(),
                ))
            }
        };
        println!("{}", if same { "same class" } else { "distinct classes" });
        emit(
            &json!({ "group": g.label(), "same_class": same }),
            &args.json,
        )?;
        return Ok(ExitCode::SUCCESS);
    }

    if let Some(spec) = representative {
        let (set, invariant) = match g {
            GroupSpec::Cyclic(2) => {
                let c = parse_class(ctx, &spec)?;
                (
                    representative_involution_with_budget(&c, &form, args.budget)?,
                    c.to_string(),
                )
            }
            GroupSpec::Dihedral(2) => {
                let p = parse_pair(ctx, &spec)?;
                let label = format!("({},{})", p.0, p.1);
                (
                    conjugacy::representative_klein_with_budget(&p, &form, args.budget)?,
                    label,
                )
            }
            GroupSpec::Dihedral(n) => {
                let c = parse_class(ctx, &spec)?;
                let (desc, set) = conjugacy::representative_dihedral_with_budget(
                    &c,
                    n,
                    &form,
                    args.budget,
                )?;
                (set, desc.c.to_string())
            }
            _ => {
                return Err(Error::Parse(
                    "--representative applies to C2, D4 (Klein) or D<2n>".into(),
                ))
            }
        };
        println!(
            "representative for class {invariant}: {} generators, closure order {}",
            set.gens.len(),
            set.presentation_check.closure_order
        );
        for gen in &set.gens {
            print!("{}", gen.matrix());
            println!();
        }
        let cert = codec::certificate_to_json(&set, ctx, &form);
        emit(
            &json!({ "invariant": invariant, "certificate": cert }),
            &args.json,
        )?;
        return Ok(ExitCode::SUCCESS);
    }

    // default: the summary
    let s = conjugacy_summary(&g, &form)?;
    match &s.mode {
        SummaryMode::FiniteCount(c) => {
            println!("{}: {} conjugacy class(es)", g.label(), c);
            for class in &s.classes {
                println!("  - {class}");
            }
        }
        SummaryMode::DecisionOnly { parameter_set } => {
            println!(
                "{}: classes are parametrized by {parameter_set}; use --class-of, --same-class or --representative",
                g.label()
            );
        }
    }
    for line in &s.trace {
        println!("  note: {line}");
    }
    let report = json!({
        "group": g.label(),
        "embeds": s.embeds,
        "mode": match &s.mode {
            SummaryMode::FiniteCount(c) => json!({ "count": c.to_string() }),
            SummaryMode::DecisionOnly { parameter_set } =>
                json!({ "parameter_set": parameter_set }),
        },
        "classes": s.classes,
        "trace": s.trace,
    });
    emit(&report, &args.json)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(
    p: u64,
    form_str: &str,
    run_cross_check: bool,
    json_path: Option<PathBuf>,
) -> Result<ExitCode, Error> {
    let ctx = FieldCtx::prime_field(p)?;
    let parts: Vec<&str> = form_str.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!(
            "--form needs three comma-separated entries, got {form_str:?}"
        )));
    }
    let diag: Vec<_> = parts
        .iter()
        .map(|t| ctx.parse_elem(t))
        .collect::<Result<_, _>>()?;
    let form = TernaryForm::from_slice(&diag)?;

    if run_cross_check {
        let report = oracle::cross_check(&form)?;
        println!(
            "SO({form})(F{p}): {} elements; cross-check against the census:",
            report.group_order
        );
        for line in &report.lines {
            println!(
                "  [{}] {} ({})",
                if line.pass { "PASS" } else { "FAIL" },
                line.name,
                line.detail
            );
        }
        println!(
            "overall: {}",
            if report.all_pass() { "PASS" } else { "FAIL" }
        );
        emit(&codec::cross_check_to_json(&report), &json_path)?;
        return Ok(if report.all_pass() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }

    let census = oracle::subgroup_census(&form)?;
    println!(
        "SO({form})(F{p}): {} elements; subgroup census:",
        census.group_order
    );
    println!("{:<26} {:>10} {:>10}", "type", "subgroups", "classes");
    for entry in &census.entries {
        println!(
            "{:<26} {:>10} {:>10}",
            entry.label.to_string(),
            entry.subgroup_count,
            entry.conjugacy_class_count
        );
    }
    emit(&codec::census_to_json(&census), &json_path)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(path: &PathBuf) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {path:?}: {e}")))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("bad JSON in {path:?}: {e}")))?;
    match codec::verify_certificate(&value) {
        Ok(set) => {
            println!(
                "PASS: {} with {} generators, closure order {}, relations {}",
                set.group.label(),
                set.gens.len(),
                set.presentation_check.closure_order,
                set.presentation_check.relations.join(", ")
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("FAIL: {e}");
            Ok(ExitCode::from(1))
        }
    }
}
