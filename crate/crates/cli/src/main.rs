//! Command-line driver: parses group and torus specifications, runs the
//! exact experiments, and emits key-value reports.
//!
//! Exit codes: 0 = success/verified, 1 = property violated or no lift exists
//! (the report carries the witness or obstruction), 2 = parse or
//! precondition error.

mod report;
mod spec;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use gaschutz_core::abelian::{cyclic_quotient_lift_exists, smith_normal_form};
use gaschutz_core::lifting::{
    find_generating_lift, gaschutz_rank, generating_tuples, min_generators, GeneratingTuple,
    PhiEvaluator,
};
use gaschutz_core::perm::DEFAULT_ORDER_CAP;
use gaschutz_core::torus::{
    build_counterexample, find_generating_lift_torus, kronecker_generates, kronecker_witness,
    obstruction_random_check, verify_obstruction, Basis, LiftPolicy, TorusLiftOutcome,
    TorusProjection,
};
use gaschutz_core::tower::{build_cyclic_tower, tower_lift};
use gaschutz_core::{Error, Result};

use report::Report;
use spec::{GroupSpec, HomSpec};

/// Seed for the deterministic obstruction sampling.
const OBSTRUCTION_SEED: u64 = 0;
const OBSTRUCTION_TRIALS: usize = 100;

#[derive(Parser)]
#[command(
    name = "gaschutz",
    version,
    about = "Exact experiments on lifting generating tuples through epimorphisms"
)]
struct Cli {
    /// Order cap for group closures.
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER_CAP)]
    cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PhiMethodArg {
    Brute,
    Recursive,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal number of generators of a group.
    Dgen { group: String },
    /// Lift counts over all generating n-tuples of the target.
    Phi {
        source: String,
        target: String,
        hom: String,
        n: usize,
        #[arg(long, value_enum, default_value_t = PhiMethodArg::Both)]
        method: PhiMethodArg,
    },
    /// Search a generating lift of one target tuple.
    Lift {
        source: String,
        target: String,
        hom: String,
        /// Comma-separated words in the target generators, e.g. `g1,g1*g2`.
        tuple: String,
    },
    /// Exhaustively verify that every generating n-tuple of the target lifts.
    VerifyGaschutz {
        source: String,
        target: String,
        hom: String,
        n: usize,
    },
    /// Minimal m such that every quotient tuple of length >= m lifts.
    GasRank { group: String },
    /// Decide topological generation of a torus tuple exactly.
    Kronecker {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        basis: usize,
        /// Semicolon-separated points, comma-separated symbolic coordinates.
        #[arg(long)]
        points: String,
    },
    /// Build a block counterexample tuple and verify its lift obstruction.
    Counterexample {
        #[arg(long)]
        n: usize,
        /// Comma-separated block sizes.
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        basis: usize,
    },
    /// Lift a generating tuple through a tower of finite quotients.
    Tower {
        /// Tower family, e.g. `cyclic:2:3` for Z/2 <- Z/4 <- Z/8.
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
    },
    /// Smith normal form of an integer matrix file.
    Snf { matrix_file: PathBuf },
    /// Decide whether a generator of Z/m admits a generating lift to Z.
    Zlift {
        #[arg(long)]
        modulus: String,
        #[arg(long)]
        generator: String,
    },
}

fn main() {
    let cli = Cli::parse();
    let mut report = Report::new(command_name(&cli.command));
    let code = match run(&cli, &mut report) {
        Ok(code) => code,
        Err(err) => {
            report.push("error", &err);
            report.push("outcome", "error");
            2
        }
    };
    report.push("exit", code);
    print!("{report}");
    std::process::exit(code);
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Dgen { .. } => "dgen",
        Command::Phi { .. } => "phi",
        Command::Lift { .. } => "lift",
        Command::VerifyGaschutz { .. } => "verify-gaschutz",
        Command::GasRank { .. } => "gas-rank",
        Command::Kronecker { .. } => "kronecker",
        Command::Counterexample { .. } => "counterexample",
        Command::Tower { .. } => "tower",
        Command::Snf { .. } => "snf",
        Command::Zlift { .. } => "zlift",
    }
}

/// Reads `@file` homomorphism arguments from disk.
fn hom_text(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read hom file `{path}`: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn run(cli: &Cli, report: &mut Report) -> Result<i32> {
    let cap = cli.cap;
    match &cli.command {
        Command::Dgen { group } => {
            let parsed = GroupSpec::parse(group)?;
            report.push("group", parsed.print());
            let (g, _) = parsed.realize(cap)?;
            report.push("order", g.order());
            report.push("dgen", min_generators(&g));
            report.push("outcome", "ok");
            Ok(0)
        }
        Command::Phi {
            source,
            target,
            hom,
            n,
            method,
        } => {
            let (hom, src_spec, tgt_spec, hom_spec) = build_hom(source, target, hom, cap)?;
            report.push("source", src_spec.print());
            report.push("target", tgt_spec.print());
            report.push("hom", hom_spec.print());
            report.push("n", n);
            report.push("method", format!("{method:?}").to_lowercase());
            let d = min_generators(hom.source());
            report.push("dgen-source", d);
            report.push("kernel-order", hom.kernel().order());
            let tuples = generating_tuples(hom.target(), *n);
            report.push("tuple-count", tuples.len());
            let full = hom.source().full_subgroup();
            let mut evaluator = PhiEvaluator::new(&hom);
            let mut mismatches = 0usize;
            let mut min = u128::MAX;
            let mut max = 0u128;
            let mut zero_counts = 0usize;
            for h in &tuples {
                let count = match method {
                    PhiMethodArg::Brute => evaluator.brute(&full, h)?.count,
                    PhiMethodArg::Recursive => evaluator.recursive(&full, h)?.count,
                    PhiMethodArg::Both => {
                        let brute = evaluator.brute(&full, h)?.count;
                        let recursive = evaluator.recursive(&full, h)?.count;
                        if brute != recursive {
                            mismatches += 1;
                        }
                        brute
                    }
                };
                min = min.min(count);
                max = max.max(count);
                if count == 0 {
                    zero_counts += 1;
                }
            }
            if tuples.is_empty() {
                min = 0;
            }
            report.push("phi-min", min);
            report.push("phi-max", max);
            report.push("phi-constant", min == max);
            if *method == PhiMethodArg::Both {
                report.push("method-mismatches", mismatches);
            }
            let violated = mismatches > 0 || min != max || (*n >= d && zero_counts > 0);
            report.push("outcome", if violated { "violated" } else { "ok" });
            Ok(if violated { 1 } else { 0 })
        }
        Command::Lift {
            source,
            target,
            hom,
            tuple,
        } => {
            let (hom, src_spec, tgt_spec, hom_spec) = build_hom(source, target, hom, cap)?;
            report.push("source", src_spec.print());
            report.push("target", tgt_spec.print());
            report.push("hom", hom_spec.print());
            let (_, tgt_gens) = tgt_spec.realize(cap)?;
            let entries = spec::parse_tuple(hom.target(), &tgt_gens, tuple)?;
            let h = GeneratingTuple::new(hom.target(), entries)?;
            report.push("tuple", format_tuple(hom.target(), h.entries()));
            if !h.generates() {
                return Err(Error::NotGenerating);
            }
            match find_generating_lift(&hom, &h)? {
                Some(lift) => {
                    report.push("lift", format_tuple(hom.source(), lift.entries()));
                    report.push("lift-indices", format_indices(lift.entries()));
                    report.push("outcome", "lift-found");
                    Ok(0)
                }
                None => {
                    report.push("outcome", "no-generating-lift");
                    Ok(1)
                }
            }
        }
        Command::VerifyGaschutz {
            source,
            target,
            hom,
            n,
        } => {
            let (hom, src_spec, tgt_spec, hom_spec) = build_hom(source, target, hom, cap)?;
            report.push("source", src_spec.print());
            report.push("target", tgt_spec.print());
            report.push("hom", hom_spec.print());
            report.push("n", n);
            report.push("source-order", hom.source().order());
            report.push("target-order", hom.target().order());
            report.push("kernel-order", hom.kernel().order());
            let verification = gaschutz_core::lifting::verify_epi_gaschutz(&hom, *n)?;
            report.push("tuple-count", verification.tuple_count);
            report.push("phi-min", verification.phi_min);
            report.push("phi-max", verification.phi_max);
            report.push("phi-constant", verification.phi_constant());
            report.push("lifts-found", verification.lifts_found);
            report.push("violations", verification.violations.len());
            let ok = verification.verified() && verification.phi_constant();
            report.push("outcome", if ok { "verified" } else { "violated" });
            Ok(if ok { 0 } else { 1 })
        }
        Command::GasRank { group } => {
            let parsed = GroupSpec::parse(group)?;
            report.push("group", parsed.print());
            let (g, _) = parsed.realize(cap)?;
            report.push("order", g.order());
            report.push("dgen", min_generators(&g));
            report.push("quotients", g.normal_subgroups().len());
            report.push("gas-rank", gaschutz_rank(&g));
            report.push("outcome", "ok");
            Ok(0)
        }
        Command::Kronecker { dim, basis, points } => {
            let basis = Basis::new(*basis);
            let parsed = spec::parse_points(points)?;
            report.push("dim", dim);
            report.push("basis", basis.symbol_count());
            report.push("points", spec::print_points(&parsed));
            let generates = kronecker_generates(&parsed, *dim, &basis)?;
            report.push("generates", generates);
            if generates {
                report.push("outcome", "generates");
                Ok(0)
            } else {
                if let Some(witness) = kronecker_witness(&parsed, *dim, &basis)? {
                    let rendered: Vec<String> = witness.iter().map(|x| x.to_string()).collect();
                    report.push("witness-lambda", rendered.join(", "));
                }
                report.push("outcome", "does-not-generate");
                Ok(1)
            }
        }
        Command::Counterexample { n, sizes, basis } => {
            let sizes = spec::parse_sizes(sizes)?;
            let basis = Basis::new(*basis);
            report.push("n", n);
            report.push(
                "sizes",
                sizes
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            report.push("basis", basis.symbol_count());
            let h = build_counterexample(*n, &sizes, &basis)?;
            let dim: usize = sizes.iter().sum();
            report.push("dim", dim);
            report.push("points", spec::print_points(&h));
            report.push("generates", kronecker_generates(&h, dim, &basis)?);
            let projection = TorusProjection::new(dim + 1, (0..dim).collect())?;
            let certificate = verify_obstruction(&h, &projection, &basis)?;
            report.push("added-coordinate", certificate.j0());
            for (t, (&owner, &symbol)) in certificate
                .block_owner()
                .iter()
                .zip(certificate.coord_symbol())
                .enumerate()
            {
                report.push(
                    &format!("lambda-{t}"),
                    format!("-c[g{},b{symbol}]", owner + 1),
                );
            }
            report.push(&format!("lambda-{dim}"), "1");
            let sampling =
                obstruction_random_check(&certificate, &h, OBSTRUCTION_TRIALS, OBSTRUCTION_SEED)?;
            report.push("instantiations", sampling.trials);
            report.push("instantiations-valid", sampling.passes);
            // The fresh-symbol route must always produce a generating lift.
            let fresh =
                find_generating_lift_torus(&projection, &h, LiftPolicy::FreshSymbols, &basis)?;
            let fresh_ok = matches!(fresh, TorusLiftOutcome::Found(_));
            report.push("fresh-symbol-lift-generates", fresh_ok);
            let ambient =
                find_generating_lift_torus(&projection, &h, LiftPolicy::AmbientOnly, &basis)?;
            report.push(
                "ambient-lift",
                match &ambient {
                    TorusLiftOutcome::Found(_) => "found",
                    TorusLiftOutcome::Obstructed { .. } => "obstructed",
                },
            );
            let ok = sampling.all_passed() && fresh_ok;
            report.push("outcome", if ok { "certified" } else { "violated" });
            Ok(if ok { 0 } else { 1 })
        }
        Command::Tower { family, n } => {
            report.push("family", family);
            report.push("n", n);
            let tower = parse_tower_family(family, cap)?;
            let orders: Vec<String> = tower
                .levels()
                .iter()
                .map(|g| g.order().to_string())
                .collect();
            report.push("level-orders", orders.join(","));
            report.push("base-quotient-order", tower.base_quotient().order());
            let h = generating_tuples(tower.base_quotient(), *n)
                .into_iter()
                .next()
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("the base quotient has no generating {n}-tuple"))
                })?;
            report.push("tuple", format_indices(h.entries()));
            let lift = tower_lift(&tower, &h)?;
            report.push("deepest-lift", format_indices(lift.deepest.entries()));
            let mut all_positive = true;
            for level in &lift.level_reports {
                report.push(
                    &format!("level-{}", level.level),
                    format!(
                        "order={} kernel={} shifts={} generating={}",
                        level.group_order,
                        level.kernel_order,
                        level.shift_count,
                        level.generating_shifts
                    ),
                );
                all_positive &= level.generating_shifts > 0;
            }
            report.push(
                "outcome",
                if all_positive { "verified" } else { "violated" },
            );
            Ok(if all_positive { 0 } else { 1 })
        }
        Command::Snf { matrix_file } => {
            let text = std::fs::read_to_string(matrix_file).map_err(|e| {
                Error::Parse(format!("cannot read `{}`: {e}", matrix_file.display()))
            })?;
            let matrix = spec::parse_matrix(&text)?;
            report.push("rows", matrix.rows());
            report.push("cols", matrix.cols());
            let snf = smith_normal_form(&matrix);
            let factors: Vec<String> = snf
                .invariant_factors
                .iter()
                .map(|f| f.to_string())
                .collect();
            report.push("invariant-factors", factors.join(","));
            report.push("remultiplication", snf.u.mul(&matrix).mul(&snf.v) == snf.s);
            report.push("outcome", "ok");
            Ok(0)
        }
        Command::Zlift { modulus, generator } => {
            let modulus: BigInt = modulus
                .parse()
                .map_err(|_| Error::Parse(format!("bad modulus `{modulus}`")))?;
            let generator: BigInt = generator
                .parse()
                .map_err(|_| Error::Parse(format!("bad generator `{generator}`")))?;
            report.push("modulus", &modulus);
            report.push("generator", &generator);
            let decision = cyclic_quotient_lift_exists(&modulus, &generator)?;
            for (candidate, reduced, matches) in &decision.congruences {
                report.push(
                    &format!("congruence-{candidate}"),
                    format!("{candidate} = {reduced} (mod {modulus}); matches: {matches}"),
                );
            }
            match &decision.witness {
                Some(witness) => {
                    report.push("witness", witness);
                    report.push("outcome", "lift-found");
                    Ok(0)
                }
                None => {
                    report.push("outcome", "no-generating-lift");
                    Ok(1)
                }
            }
        }
    }
}

fn build_hom(
    source: &str,
    target: &str,
    hom: &str,
    cap: usize,
) -> Result<(
    gaschutz_core::group::GroupHom,
    GroupSpec,
    GroupSpec,
    HomSpec,
)> {
    let src_spec = GroupSpec::parse(source)?;
    let tgt_spec = GroupSpec::parse(target)?;
    let hom_spec = HomSpec::parse(&hom_text(hom)?)?;
    let (src, src_gens) = src_spec.realize(cap)?;
    let (tgt, tgt_gens) = tgt_spec.realize(cap)?;
    let hom = hom_spec.build(&src, &src_gens, &tgt, &tgt_gens)?;
    Ok((hom, src_spec, tgt_spec, hom_spec))
}

fn parse_tower_family(family: &str, cap: usize) -> Result<gaschutz_core::tower::TowerSpec> {
    let parts: Vec<&str> = family.split(':').collect();
    match parts.as_slice() {
        ["cyclic", p, depth] => {
            let p: usize = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime `{p}`")))?;
            let depth: usize = depth
                .parse()
                .map_err(|_| Error::Parse(format!("bad depth `{depth}`")))?;
            build_cyclic_tower(p, depth, cap)
        }
        _ => Err(Error::Parse(format!(
            "unknown tower family `{family}` (expected cyclic:<p>:<depth>)"
        ))),
    }
}

fn format_indices(entries: &[usize]) -> String {
    entries
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn format_tuple(
    group: &std::sync::Arc<gaschutz_core::group::FiniteGroup>,
    entries: &[usize],
) -> String {
    entries
        .iter()
        .map(|&e| group.element(e).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
