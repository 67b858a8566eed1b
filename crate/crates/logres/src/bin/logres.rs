//! Command line front end: scenario JSON in, invariants, blowup charts,
//! certificates or a full resolution report out. Exit code 0 means every
//! check passed, 2 means something was outside the decidable fragment,
//! 1 means an error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use logres::algebra::{print_poly, Monomial, Order, Polynomial, Rat};
use logres::charts::Chart;
use logres::error::{Error, Result};
use logres::hp::{hp_certificate, GenKind, HpOutcome};
use logres::ideal::{
    choose_center, decide_staircase, principal_exceptional_monomial, MonomialIdeal, Principality,
};
use logres::invariants::{rho_k, to_prelim, to_weierstrass};
use logres::logfit::{fitting_ideal, log_rank_at_origin};
use logres::pipeline::{resolve3d, Config};
use logres::prepared::{check_prepared, declared_ideal, iota_of_weier, Iota, PointKind, PreparedCheck};
use logres::scenario::Scenario;

#[derive(Parser)]
#[command(name = "logres", version, about = "Log Fitting ideals and monomial resolution certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArg {
    /// Path to a scenario JSON file.
    scenario: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full resolution driver and write a report.
    Resolve {
        #[command(flatten)]
        input: ScenarioArg,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Blowup depth cap per branch.
        #[arg(long, default_value_t = Config::default().branch_cap)]
        branch_cap: usize,
        /// Cap on full driver rounds.
        #[arg(long, default_value_t = Config::default().round_cap)]
        round_cap: usize,
        /// Number of generated probe points when the scenario lists none.
        #[arg(long, default_value_t = Config::default().generated_probes)]
        probes: usize,
    },
    /// Print a log Fitting ideal at the origin chart.
    Fitting {
        #[command(flatten)]
        input: ScenarioArg,
        /// Which Fitting ideal, counting corank from the full rank.
        #[arg(short)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print the pointwise invariants of the origin chart.
    Invariants {
        #[command(flatten)]
        input: ScenarioArg,
    },
    /// Blow up one coordinate center and print the child charts.
    Blowup {
        #[command(flatten)]
        input: ScenarioArg,
        /// Comma separated coordinate names of the center.
        #[arg(long, value_delimiter = ',')]
        center: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Extract monomial generators and check the certificate conditions.
    VerifyHp {
        #[command(flatten)]
        input: ScenarioArg,
        #[arg(long)]
        json: bool,
    },
    /// Principalize a monomial ideal by combinatorial blowups.
    Principalize {
        #[command(flatten)]
        input: ScenarioArg,
        /// Comma separated monomial generators in the scenario variables.
        #[arg(long, value_delimiter = ',')]
        ideal: Vec<String>,
        /// Coordinates allowed in centers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        divisor: Option<Vec<String>>,
    },
}

const PASS: u8 = 0;
const UNDECIDABLE: u8 = 2;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Resolve {
            input,
            out,
            branch_cap,
            round_cap,
            probes,
        } => {
            let scenario = load(&input)?;
            let config = Config {
                branch_cap,
                round_cap,
                generated_probes: probes,
            };
            let report = resolve3d(&scenario, &config)?;
            let body = report.to_json()?;
            match out {
                Some(path) => {
                    fs::write(&path, body)?;
                    println!(
                        "resolved in {} blowups over {} rounds; report written to {}",
                        report.blowups,
                        report.rounds_used,
                        path.display()
                    );
                }
                None => println!("{body}"),
            }
            if report.all_leaves_certified {
                Ok(PASS)
            } else {
                eprintln!("note: some leaves lack a certificate; see the report");
                Ok(UNDECIDABLE)
            }
        }
        Command::Fitting { input, k, json } => {
            let scenario = load(&input)?;
            let chart = scenario.root_chart()?;
            fitting(&chart, k, json)
        }
        Command::Invariants { input } => {
            let scenario = load(&input)?;
            let chart = scenario.root_chart()?;
            invariants(&chart, scenario.truncation_degree)
        }
        Command::Blowup {
            input,
            center,
            json,
        } => {
            let scenario = load(&input)?;
            let chart = scenario.root_chart()?;
            blowup(&chart, &center, json)
        }
        Command::VerifyHp { input, json } => {
            let scenario = load(&input)?;
            let chart = scenario.root_chart()?;
            verify_hp(&chart, scenario.truncation_degree, json)
        }
        Command::Principalize {
            input,
            ideal,
            divisor,
        } => {
            let scenario = load(&input)?;
            let chart = scenario.root_chart()?;
            principalize(&chart, &ideal, divisor.as_deref())
        }
    }
}

fn load(input: &ScenarioArg) -> Result<Scenario> {
    Scenario::from_json(&fs::read_to_string(&input.scenario)?)
}

fn ord_str(o: Order) -> String {
    match o {
        Order::Finite(v) => v.to_string(),
        Order::Infinite => "infinity".into(),
    }
}

fn mono_str(m: &Monomial, names: &[String]) -> String {
    let mut p = Polynomial::zero(m.0.len());
    p.add_term(m.clone(), Rat::from_integer(1.into()));
    print_poly(&p, names)
}

fn fitting(chart: &Chart, k: usize, as_json: bool) -> Result<u8> {
    let names = &chart.frame.names;
    let gens = fitting_ideal(chart, k)?;
    let staircase = decide_staircase(chart.n_vars(), &gens);
    let principality = principal_exceptional_monomial(&gens, &chart.frame.exceptional);
    if as_json {
        let principal = match &principality {
            Principality::Monomial(m) => json!({
                "principal": true,
                "generator": mono_str(m, names),
            }),
            Principality::Not { witness } => json!({
                "principal": false,
                "witness": print_poly(witness, names),
            }),
            Principality::Zero => json!({ "principal": false, "zero": true }),
        };
        let doc = json!({
            "k": k,
            "generators": gens.iter().map(|g| print_poly(g, names)).collect::<Vec<_>>(),
            "staircase": staircase
                .as_ref()
                .map(|s| s.gens().iter().map(|m| mono_str(m, names)).collect::<Vec<_>>()),
            "principal_exceptional": principal,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("F_{k} generators:");
        for g in &gens {
            println!("  {}", print_poly(g, names));
        }
        match &staircase {
            Some(s) if s.gens().is_empty() => println!("staircase: zero ideal"),
            Some(s) => {
                let list: Vec<String> = s.gens().iter().map(|m| mono_str(m, names)).collect();
                println!("staircase: {}", list.join(", "));
            }
            None => println!("staircase: undecidable"),
        }
        match &principality {
            Principality::Monomial(m) => {
                println!("principal exceptional monomial: {}", mono_str(m, names))
            }
            Principality::Not { witness } => {
                println!("not principal; witness {}", print_poly(witness, names))
            }
            Principality::Zero => println!("zero ideal"),
        }
    }
    Ok(if staircase.is_some() { PASS } else { UNDECIDABLE })
}

fn invariants(chart: &Chart, trunc: u64) -> Result<u8> {
    let names = &chart.frame.names;
    let n = chart.n_vars();
    let mut undecidable = false;

    let mut orders = serde_json::Map::new();
    for k in 0..n {
        let val = match rho_k(chart, k) {
            Ok(o) => json!(ord_str(o)),
            Err(e) => json!({ "error": e.to_string() }),
        };
        orders.insert(k.to_string(), val);
    }

    let prelim = to_prelim(chart, trunc);
    let contact_degree = match &prelim {
        Ok(p) => json!(ord_str(p.d_invariant())),
        Err(e) => json!({ "error": e.to_string() }),
    };

    let weier = prelim.as_ref().ok().map(to_weierstrass);
    let weierstrass = match &weier {
        Some(Ok(w)) => json!({
            "available": true,
            "distinguished": names[w.v_index],
            "degree": w.d,
        }),
        Some(Err(e)) => json!({ "available": false, "reason": e.to_string() }),
        None => json!({ "available": false, "reason": "no presentation" }),
    };

    let mut declared = serde_json::Value::Null;
    let prepared = match &weier {
        Some(Ok(w)) => match check_prepared(w)? {
            PreparedCheck::Prepared(p) => {
                let kind = match p.kind {
                    PointKind::TwoPoint => "two-point",
                    PointKind::OnePointGeneric => "one-point generic",
                    PointKind::OnePointNonGeneric => "one-point non-generic",
                };
                let data = declared_ideal(w, &p)?;
                let divisor: Vec<&String> = names
                    .iter()
                    .zip(&data.divisor)
                    .filter(|(_, &on)| on)
                    .map(|(n, _)| n)
                    .collect();
                declared = json!({
                    "divisor": divisor,
                    "generators": data.ideal.gens().iter().map(|m| mono_str(m, names)).collect::<Vec<_>>(),
                });
                json!({ "prepared": true, "kind": kind })
            }
            PreparedCheck::NotPrepared { reason } => {
                json!({ "prepared": false, "reason": reason })
            }
        },
        _ => json!({ "prepared": false, "reason": "no Weierstrass form" }),
    };

    let contact_rounds = match &weier {
        Some(Ok(w)) => match iota_of_weier(w) {
            Ok(Iota::Rounds(r)) => json!(r),
            Ok(Iota::Undecidable(reason)) => {
                undecidable = true;
                json!({ "undecidable": reason })
            }
            Err(e) => json!({ "error": e.to_string() }),
        },
        _ => serde_json::Value::Null,
    };

    let doc = json!({
        "variables": chart.frame.names,
        "log_rank": log_rank_at_origin(chart),
        "residual_orders": orders,
        "residual_order": match rho_k(chart, n.saturating_sub(2)) {
            Ok(o) => json!(ord_str(o)),
            Err(e) => json!({ "error": e.to_string() }),
        },
        "contact_degree": contact_degree,
        "weierstrass": weierstrass,
        "prepared": prepared,
        "contact_rounds": contact_rounds,
        "declared": declared,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(if undecidable { UNDECIDABLE } else { PASS })
}

fn blowup(chart: &Chart, center: &[String], as_json: bool) -> Result<u8> {
    if center.is_empty() {
        return Err(Error::Unsupported("empty blowup center".into()));
    }
    let idx: Vec<usize> = center
        .iter()
        .map(|n| chart.frame.index_of(n))
        .collect::<Result<_>>()?;
    let children = chart.blowup(&idx)?;
    if as_json {
        let doc: Vec<_> = children
            .iter()
            .map(|c| {
                json!({
                    "label": c.label,
                    "variables": c.frame.names.iter().zip(&c.frame.exceptional)
                        .map(|(n, &e)| json!({ "name": n, "exceptional": e }))
                        .collect::<Vec<_>>(),
                    "components": c.components.iter()
                        .map(|p| print_poly(p, &c.frame.names))
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        for c in &children {
            println!("{}:", c.label);
            for p in &c.components {
                println!("  {}", print_poly(p, &c.frame.names));
            }
        }
    }
    Ok(PASS)
}

fn verify_hp(chart: &Chart, trunc: u64, as_json: bool) -> Result<u8> {
    let names = &chart.frame.names;
    match hp_certificate(chart, trunc)? {
        HpOutcome::Certified(cert) => {
            if as_json {
                let gens: Vec<_> = cert
                    .gens
                    .iter()
                    .map(|g| {
                        let (kind, free) = match &g.kind {
                            GenKind::Alpha => ("exceptional", None),
                            GenKind::Beta { free_var } => {
                                ("free", Some(names[*free_var].clone()))
                            }
                        };
                        json!({
                            "kind": kind,
                            "free_variable": free,
                            "monomial": mono_str(&g.monomial, names),
                            "component": g.component,
                        })
                    })
                    .collect();
                let doc = json!({
                    "certified": true,
                    "generators": gens,
                    "staircase_exponents": cert.gamma_sums.iter()
                        .map(|m| mono_str(m, names)).collect::<Vec<_>>(),
                    "strengthened": cert.strengthened,
                    "truncated": cert.truncated,
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                println!("certified");
                for g in &cert.gens {
                    let kind = match &g.kind {
                        GenKind::Alpha => "exceptional".to_string(),
                        GenKind::Beta { free_var } => format!("free in {}", names[*free_var]),
                    };
                    println!(
                        "  component {}: {} ({kind})",
                        g.component,
                        mono_str(&g.monomial, names)
                    );
                }
                let sums: Vec<String> =
                    cert.gamma_sums.iter().map(|m| mono_str(m, names)).collect();
                println!("staircase exponents: {}", sums.join(", "));
                if cert.strengthened {
                    println!("strengthened form holds");
                }
                if cert.truncated {
                    println!("series were truncated at degree {}", cert.trunc);
                }
            }
            Ok(PASS)
        }
        HpOutcome::Failed { stage, reason } => {
            if as_json {
                let doc = json!({
                    "certified": false,
                    "stage": stage,
                    "reason": reason,
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                println!("not certified at generator {stage}: {reason}");
            }
            Ok(UNDECIDABLE)
        }
    }
}

fn principalize(chart: &Chart, gens: &[String], divisor: Option<&[String]>) -> Result<u8> {
    let names = &chart.frame.names;
    let n = chart.n_vars();
    if gens.is_empty() {
        return Err(Error::Unsupported("no ideal generators given".into()));
    }
    let mut monos = Vec::with_capacity(gens.len());
    for g in gens {
        let p = chart.frame.parse(g)?;
        let mut terms = p.terms();
        let (m, _) = terms
            .next()
            .ok_or_else(|| Error::Unsupported(format!("zero generator `{g}`")))?;
        if terms.next().is_some() {
            return Err(Error::Unsupported(format!(
                "generator `{g}` is not a monomial"
            )));
        }
        monos.push(m.clone());
    }
    let allowed: Vec<bool> = match divisor {
        None => vec![true; n],
        Some(list) => {
            let mut mask = vec![false; n];
            for name in list {
                mask[chart.frame.index_of(name)?] = true;
            }
            mask
        }
    };

    let mut work = vec![("root".to_string(), MonomialIdeal::from_gens(n, monos))];
    let mut steps = 0usize;
    while let Some((path, ideal)) = work.pop() {
        let Some((i, j)) = choose_center(&ideal) else {
            let m = ideal.gens().first().cloned().unwrap_or(Monomial(vec![0; n]));
            println!("{path}: principal ({})", mono_str(&m, names));
            continue;
        };
        if !allowed[i] || !allowed[j] {
            return Err(Error::Unsupported(format!(
                "required center ({}, {}) leaves the allowed divisor",
                names[i], names[j]
            )));
        }
        steps += 1;
        if steps > 256 {
            return Err(Error::StepLimit(
                "principalization exceeded 256 blowups".into(),
            ));
        }
        println!("{path}: center ({}, {})", names[i], names[j]);
        for &chart_var in &[j, i] {
            work.push((
                format!("{path}/{}", names[chart_var]),
                ideal.blowup_pair_transform(i, j, chart_var),
            ));
        }
    }
    Ok(PASS)
}
