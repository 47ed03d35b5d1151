//! `bilinear` — exact growth analysis of bilinear systems from the command
//! line: growth tables, certified rate sandwiches, threshold decisions,
//! embeddings, transforms, and brute-force verifiers.
//!
//! Exit codes: 0 on success, 1 when a verification or decision fails to
//! establish its claim, 2 on malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use bilinear::bounds::{
    bounds_report, decide_threshold, verify_weight_certificate, Certificate, Verdict,
};
use bilinear::core::{enumerate_trees, eval_tree, growth_table, SignClass};
use bilinear::linalg::Vector;
use bilinear::patterns::{lower_bound_sequence, pattern_matrix};
use bilinear::reductions::{
    block_vector, embed_jsr, embed_mortality, embed_positive, embed_two_ops, embed_two_seeds,
    find_zero_vector, transform_append_one, transform_ensure_limit, transform_insert_zero_odd,
    verify_buffer_analysis, EmbeddedSystem,
};
use bilinear::scalar::{format_scalar, int, nth_root_below, parse_scalar, pow_scalar, Scalar};

use bilinear_cli::combination::{parse_pattern, parse_tree};
use bilinear_cli::format::{self, NamedSystem};

#[derive(Parser)]
#[command(
    name = "bilinear",
    version,
    about = "Exact growth analysis of bilinear systems",
    long_about = "Exact growth analysis of bilinear systems: growth tables, certified \
                  lower/upper sandwiches for the growth rate, threshold decisions with \
                  replayable witnesses, matrix-pair embeddings, and structural transforms. \
                  All arithmetic is exact; floating-point numbers appear only in report \
                  columns and are marked with \"≈\"."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact growth table g(n) for n = 1..=N
    Growth {
        file: PathBuf,
        /// Largest combination size
        #[arg(long)]
        n: usize,
        /// Also print the per-coordinate maxima g_i(n)
        #[arg(long)]
        per_dim: bool,
    },
    /// Certified two-sided sandwich for the growth rate λ
    Bounds {
        file: PathBuf,
        /// Largest linear-pattern size explored for lower bounds
        #[arg(long)]
        pattern_size: usize,
        /// Largest certificate horizon explored for upper bounds (0 skips it)
        #[arg(long)]
        cert_depth: usize,
    },
    /// Decide λ > θ or λ ≤ θ for a rational threshold (exit 1 if unresolved)
    Decide {
        file: PathBuf,
        /// Threshold, an exact rational like "3/2"
        #[arg(long)]
        theta: String,
        /// Rounds of alternating witness/certificate search
        #[arg(long)]
        budget: usize,
    },
    /// Build an embedded system and print its file to standard output
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// Reshape a system and print the transformed file to standard output
    #[command(subcommand)]
    Transform(TransformCommand),
    /// Brute-force verifiers (exit 1 on any counterexample)
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Search combinations of up to n-max seeds for the zero vector
    Zero {
        file: PathBuf,
        #[arg(long)]
        n_max: usize,
    },
}

#[derive(Subcommand)]
enum EmbedCommand {
    /// Joint-spectral embedding of a nonnegative matrix pair
    Jsr { a: PathBuf, b: PathBuf },
    /// Mortality embedding: the zero vector becomes reachable exactly when
    /// some product over the pair vanishes (nonnegative pairs)
    Mortality { a: PathBuf, b: PathBuf },
    /// Merge a one-operator, two-seed system into a single-seed system
    TwoSeeds { file: PathBuf },
    /// Merge a two-operator, one-seed system into a single-operator system
    TwoOps { file: PathBuf },
    /// Joint-spectral embedding with a strictly positive seed
    Positive {
        a: PathBuf,
        b: PathBuf,
        /// Starting ε for the correction solve (halved until it works)
        #[arg(long, default_value = "1/10")]
        epsilon: String,
    },
}

#[derive(Subcommand)]
enum TransformCommand {
    /// Double every size: g'(2m) = g(m), odd sizes beyond 1 give zero
    InsertZeroOdd { file: PathBuf },
    /// Append a coordinate pinned at 1 (growth rate becomes max(λ, 1))
    AppendOne { file: PathBuf },
    /// Append a geometric coordinate at rate α, making the growth roots a
    /// true limit whenever α ≤ λ
    EnsureLimit {
        file: PathBuf,
        /// The rate, an exact rational like "3/2"
        #[arg(long)]
        alpha: String,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Exhaustively check the block structure of the joint-spectral embedding
    BufferAnalysis {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        n_max: usize,
    },
    /// Exhaustively check the mod-5 block congruences of the operator merger
    /// (a one-operator file is merged with itself)
    Congruences {
        file: PathBuf,
        #[arg(long)]
        n_max: usize,
    },
    /// Check g'(2m) = g(m) and g'(2m+1) = 0 for the size-doubling transform
    InsertZeroOdd {
        file: PathBuf,
        #[arg(long)]
        m_max: usize,
    },
    /// Re-verify a printed certificate or witness (exactly one mode)
    Certificate {
        file: PathBuf,
        /// Weight-certificate mode: comma-separated weight vector, e.g. "2,1"
        #[arg(long)]
        weight: Option<String>,
        /// Contraction factor γ for the weight mode
        #[arg(long)]
        gamma: Option<String>,
        /// Pattern-witness mode: a pattern string with the mark "u"
        #[arg(long)]
        pattern: Option<String>,
        /// 1-based diagonal coordinate of the pattern matrix to read
        #[arg(long)]
        index: Option<usize>,
        /// Exact rational the diagonal entry must reach
        #[arg(long)]
        at_least: Option<String>,
        /// Zero-witness mode: a combination string that must evaluate to zero
        #[arg(long)]
        zero: Option<String>,
    },
}

/// Whether the command's claim held. `Fail` exits 1; input errors exit 2.
enum Outcome {
    Pass,
    Fail,
}

fn approx(x: f64) -> String {
    format!("≈{x:.6}")
}

fn vector_csv(v: &Vector) -> String {
    v.iter().map(format_scalar).collect::<Vec<_>>().join(", ")
}

fn print_embedded(embedded: EmbeddedSystem) -> Outcome {
    print!(
        "{}",
        format::render_system(&format::with_default_names(embedded.system))
    );
    Outcome::Pass
}

fn cmd_growth(file: &Path, n_max: usize, per_dim: bool) -> Result<Outcome> {
    let named = format::read_system(file)?;
    let table = growth_table(&named.system, n_max)?;
    let dim = named.system.dim();
    if per_dim {
        let coords = (1..=dim).map(|i| format!("\tg_{i}(n)")).collect::<String>();
        println!("n\tg(n)\tg(n)^(1/n){coords}");
    } else {
        println!("n\tg(n)\tg(n)^(1/n)");
    }
    for n in 1..=n_max {
        let g = table.g(n).expect("row exists");
        let root = nth_root_below(g, n as u32);
        let mut line = format!("{n}\t{}\t{}", format_scalar(g), approx(root));
        if per_dim {
            for i in 0..dim {
                line.push('\t');
                line.push_str(&format_scalar(table.g_dim(n, i).expect("coordinate exists")));
            }
        }
        println!("{line}");
    }
    Ok(Outcome::Pass)
}

fn cmd_bounds(file: &Path, pattern_size: usize, cert_depth: usize) -> Result<Outcome> {
    let named = format::read_system(file)?;
    let report = bounds_report(&named.system, pattern_size, cert_depth)?;
    println!("size\tx(n)\tx(n)^(1/n)\trunning lower");
    for (row, running) in report.rows.iter().zip(&report.running_lower) {
        println!(
            "{}\t{}\t{}\t{}",
            row.n,
            format_scalar(&row.x),
            approx(row.root),
            approx(*running)
        );
    }
    match &report.rate {
        Some(rate) => println!(
            "pattern-rate bound: {} from coordinate {} of powers of M(P), \
             P = {}, total order {}, exact diagonal {}",
            approx(rate.root),
            rate.index + 1,
            rate.pattern.render(&named.seed_names, &named.op_names),
            rate.power,
            format_scalar(&rate.value)
        ),
        None => println!("pattern-rate bound: none"),
    }
    let weight = &report.weight;
    println!(
        "weight certificate: w = ({}), γ = {}, seed scale c = {}, bound = {}",
        vector_csv(&weight.w),
        format_scalar(&weight.gamma),
        format_scalar(&weight.c),
        format_scalar(&weight.bound())
    );
    let mut upper_exact = weight.bound();
    match &report.graded {
        Some(graded) => {
            println!(
                "graded certificate: horizon {}, γ = {} ({})",
                graded.n_used,
                format_scalar(&graded.gamma),
                approx(bilinear::scalar::to_f64_approx(&graded.gamma))
            );
            if graded.bound() < upper_exact {
                upper_exact = graded.bound();
            }
        }
        None if cert_depth == 0 => println!("graded certificate: skipped (depth 0)"),
        None => println!("graded certificate: none up to horizon {cert_depth}"),
    }
    println!(
        "certified sandwich: {} ≤ λ ≤ {} ({})",
        approx(report.lower),
        format_scalar(&upper_exact),
        approx(report.upper)
    );
    Ok(Outcome::Pass)
}

fn cmd_decide(file: &Path, theta: &str, budget: usize) -> Result<Outcome> {
    let named = format::read_system(file)?;
    let theta = parse_scalar(theta).context("--theta")?;
    match decide_threshold(&named.system, &theta, budget)? {
        Verdict::GreaterThan { pattern, index } => {
            let m = pattern_matrix(&named.system, &pattern)?;
            let x = m.get(index, index);
            let size = pattern.leaf_count();
            let rhs = pow_scalar(&theta, size as u32);
            println!(
                "GREATER: pattern |P|={size}, M[{},{}]={} > {}",
                index + 1,
                index + 1,
                format_scalar(x),
                format_scalar(&rhs)
            );
            println!(
                "pattern: {}",
                pattern.render(&named.seed_names, &named.op_names)
            );
            Ok(Outcome::Pass)
        }
        Verdict::AtMostCertified(cert) => {
            match &cert {
                Certificate::Weight(wc) => println!(
                    "AT_MOST: weight certificate w = ({}), γ = {}, bound = {}",
                    vector_csv(&wc.w),
                    format_scalar(&wc.gamma),
                    format_scalar(&cert.bound())
                ),
                Certificate::Graded(gc) => println!(
                    "AT_MOST: graded certificate horizon {}, γ = {}",
                    gc.n_used,
                    format_scalar(&gc.gamma)
                ),
            }
            Ok(Outcome::Pass)
        }
        Verdict::Unresolved(report) => {
            println!("UNRESOLVED: {} rounds spent without a proof", report.budget);
            if let Some(best) = &report.best_lower {
                println!(
                    "best certified lower bound so far: {} from x({}) = {}",
                    approx(best.root),
                    best.n,
                    format_scalar(&best.x)
                );
            }
            Ok(Outcome::Fail)
        }
    }
}

fn cmd_embed(cmd: EmbedCommand) -> Result<Outcome> {
    match cmd {
        EmbedCommand::Jsr { a, b } => Ok(print_embedded(embed_jsr(
            &format::read_matrix(&a)?,
            &format::read_matrix(&b)?,
        )?)),
        EmbedCommand::Mortality { a, b } => Ok(print_embedded(embed_mortality(
            &format::read_matrix(&a)?,
            &format::read_matrix(&b)?,
        )?)),
        EmbedCommand::TwoSeeds { file } => {
            let named = format::read_system(&file)?;
            let ops = named.system.operators();
            let seeds = named.system.seeds();
            if ops.len() != 1 || seeds.len() != 2 {
                bail!(
                    "the seed merger needs exactly one operator and two seeds, \
                     this file has {} and {}",
                    ops.len(),
                    seeds.len()
                );
            }
            Ok(print_embedded(embed_two_seeds(&ops[0], &seeds[0], &seeds[1])?))
        }
        EmbedCommand::TwoOps { file } => {
            let named = format::read_system(&file)?;
            let ops = named.system.operators();
            let seeds = named.system.seeds();
            if ops.len() != 2 || seeds.len() != 1 {
                bail!(
                    "the operator merger needs exactly two operators and one seed, \
                     this file has {} and {}",
                    ops.len(),
                    seeds.len()
                );
            }
            Ok(print_embedded(embed_two_ops(&ops[0], &ops[1], &seeds[0])?))
        }
        EmbedCommand::Positive { a, b, epsilon } => {
            let epsilon = parse_scalar(&epsilon).context("--epsilon")?;
            Ok(print_embedded(embed_positive(
                &format::read_matrix(&a)?,
                &format::read_matrix(&b)?,
                &epsilon,
            )?))
        }
    }
}

/// Quick probe for `transform ensure-limit`: warn when α is not certified as
/// a lower bound on the growth rate, since the limit conclusion needs α ≤ λ.
fn warn_if_rate_uncertified(named: &NamedSystem, alpha: &Scalar) {
    const PROBE_SIZE: usize = 6;
    if matches!(named.system.sign_class(), SignClass::General) {
        eprintln!(
            "warning: rate {} cannot be certified on a general-sign system; \
             the appended coordinate only yields a true limit when the rate is \
             at most the growth rate",
            format_scalar(alpha)
        );
        return;
    }
    let certified = lower_bound_sequence(&named.system, PROBE_SIZE)
        .map(|rows| {
            rows.iter()
                .any(|row| pow_scalar(alpha, row.n as u32) <= row.x)
        })
        .unwrap_or(false);
    if !certified {
        eprintln!(
            "warning: rate {} exceeds every quick pattern bound (sizes ≤ {PROBE_SIZE}); \
             the appended coordinate only yields a true limit when the rate is at most \
             the growth rate",
            format_scalar(alpha)
        );
    }
}

fn cmd_transform(cmd: TransformCommand) -> Result<Outcome> {
    let named;
    let transformed;
    match cmd {
        TransformCommand::InsertZeroOdd { file } => {
            named = format::read_system(&file)?;
            transformed = transform_insert_zero_odd(&named.system)?;
        }
        TransformCommand::AppendOne { file } => {
            named = format::read_system(&file)?;
            transformed = transform_append_one(&named.system)?;
        }
        TransformCommand::EnsureLimit { file, alpha } => {
            let alpha = parse_scalar(&alpha).context("--alpha")?;
            named = format::read_system(&file)?;
            warn_if_rate_uncertified(&named, &alpha);
            transformed = transform_ensure_limit(&named.system, &alpha)?;
        }
    }
    // Operator and seed counts are preserved, so the display names carry over.
    print!(
        "{}",
        format::render_system(&NamedSystem {
            system: transformed,
            op_names: named.op_names,
            seed_names: named.seed_names,
        })
    );
    Ok(Outcome::Pass)
}

fn cmd_verify_buffer_analysis(a: &Path, b: &Path, n_max: usize) -> Result<Outcome> {
    let report = verify_buffer_analysis(
        &format::read_matrix(a)?,
        &format::read_matrix(b)?,
        n_max,
    )?;
    println!(
        "checked {} combination trees up to size {}",
        report.trees_checked, report.n_max
    );
    if report.passed() {
        println!("PASS: product-buffer structure holds");
        return Ok(Outcome::Pass);
    }
    let names = (vec!["s".to_string()], vec!["f".to_string()]);
    for violation in &report.violations {
        println!(
            "FAIL[{}]: {}; tree: {}",
            violation.condition,
            violation.detail,
            violation.tree.render(&names.0, &names.1)
        );
    }
    println!("FAIL: {} violations", report.violations.len());
    Ok(Outcome::Fail)
}

fn cmd_verify_congruences(file: &Path, n_max: usize) -> Result<Outcome> {
    let named = format::read_system(file)?;
    let ops = named.system.operators();
    let seeds = named.system.seeds();
    if seeds.len() != 1 {
        bail!("the congruence check needs a single-seed file, this one has {}", seeds.len());
    }
    let embedded = match ops {
        [only] => embed_two_ops(only, only, &seeds[0])?,
        [first, second] => embed_two_ops(first, second, &seeds[0])?,
        _ => bail!(
            "the congruence check needs one operator (merged with itself) or two, \
             this file has {}",
            ops.len()
        ),
    };
    let layout = &embedded.layout;
    let names = (vec!["s".to_string()], vec!["f".to_string()]);
    let mut checked = 0usize;
    for n in 1..=n_max {
        for tree in enumerate_trees(n, 1, 1)? {
            checked += 1;
            let v = eval_tree(&embedded.system, &tree)?;
            let claims: [(&str, bool); 4] = [
                (
                    "product block only at sizes ≡ 3 (mod 5)",
                    !block_vector(&v, &layout.r_c).is_zero() && n % 5 != 3,
                ),
                (
                    "operator blocks only at sizes ≡ 1 (mod 5)",
                    (!block_vector(&v, &layout.r_a).is_zero()
                        || !block_vector(&v, &layout.r_b).is_zero())
                        && n % 5 != 1,
                ),
                ("seed indicator only at size 1", v[layout.i] != int(0) && n != 1),
                ("pair indicator only at size 2", v[layout.j] != int(0) && n != 2),
            ];
            for (claim, violated) in claims {
                if violated {
                    println!(
                        "FAIL[{claim}]: size {n}, tree: {}",
                        tree.render(&names.0, &names.1)
                    );
                    return Ok(Outcome::Fail);
                }
            }
        }
    }
    println!("PASS: block-support congruences hold for all {checked} trees up to size {n_max}");
    Ok(Outcome::Pass)
}

fn cmd_verify_insert_zero_odd(file: &Path, m_max: usize) -> Result<Outcome> {
    if m_max == 0 {
        bail!("--m-max must be at least 1");
    }
    let named = format::read_system(file)?;
    let transformed = transform_insert_zero_odd(&named.system)?;
    let base = growth_table(&named.system, m_max)?;
    let table = growth_table(&transformed, 2 * m_max + 1)?;
    let mut failures = 0usize;
    if table.g(1) != Some(&int(1)) {
        println!("FAIL: g'(1) = {}, expected 1", format_scalar(table.g(1).unwrap()));
        failures += 1;
    }
    for m in 1..=m_max {
        let even = table.g(2 * m).unwrap();
        let expected = base.g(m).unwrap();
        if even != expected {
            println!(
                "FAIL: g'({}) = {}, expected g({m}) = {}",
                2 * m,
                format_scalar(even),
                format_scalar(expected)
            );
            failures += 1;
        }
        let odd = table.g(2 * m + 1).unwrap();
        if odd != &int(0) {
            println!("FAIL: g'({}) = {}, expected 0", 2 * m + 1, format_scalar(odd));
            failures += 1;
        }
    }
    if failures == 0 {
        println!("PASS: g'(2m) = g(m) and g'(2m+1) = 0 for all m ≤ {m_max}");
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify_certificate(
    file: &Path,
    weight: Option<String>,
    gamma: Option<String>,
    pattern: Option<String>,
    index: Option<usize>,
    at_least: Option<String>,
    zero: Option<String>,
) -> Result<Outcome> {
    let named = format::read_system(file)?;
    let modes = [weight.is_some(), pattern.is_some(), zero.is_some()];
    if modes.iter().filter(|&&m| m).count() != 1 {
        bail!("pass exactly one of --weight (with --gamma), --pattern (with --index and --at-least), or --zero");
    }
    if let Some(weight) = weight {
        let Some(gamma) = gamma else {
            bail!("--weight needs --gamma");
        };
        let gamma = parse_scalar(&gamma).context("--gamma")?;
        let entries = weight
            .split(',')
            .map(|part| parse_scalar(part.trim()).context("--weight"))
            .collect::<Result<Vec<_>>>()?;
        let w = Vector::new(entries);
        return match verify_weight_certificate(&named.system, &w, &gamma) {
            Ok(cert) => {
                println!(
                    "PASS: weight certificate verifies; certified bound c·γ = {}",
                    format_scalar(&cert.bound())
                );
                Ok(Outcome::Pass)
            }
            Err(bilinear::Error::CertificateViolated {
                condition,
                coordinate,
                detail,
            }) => {
                println!(
                    "FAIL: {condition} fails at coordinate {}: {detail}",
                    coordinate + 1
                );
                Ok(Outcome::Fail)
            }
            Err(other) => Err(other.into()),
        };
    }
    if let Some(pattern) = pattern {
        let (Some(index), Some(at_least)) = (index, at_least) else {
            bail!("--pattern needs --index and --at-least");
        };
        let at_least = parse_scalar(&at_least).context("--at-least")?;
        let pattern = parse_pattern(&pattern, &named.seed_names, &named.op_names)?;
        let m = pattern_matrix(&named.system, &pattern)?;
        if index == 0 || index > named.system.dim() {
            bail!("--index {index} out of range 1..={}", named.system.dim());
        }
        let x = m.get(index - 1, index - 1);
        return if *x >= at_least {
            println!(
                "PASS: M[{index},{index}] = {} ≥ {}",
                format_scalar(x),
                format_scalar(&at_least)
            );
            Ok(Outcome::Pass)
        } else {
            println!(
                "FAIL: M[{index},{index}] = {} < {}",
                format_scalar(x),
                format_scalar(&at_least)
            );
            Ok(Outcome::Fail)
        };
    }
    let zero = zero.expect("mode counting leaves the zero mode");
    let tree = parse_tree(&zero, &named.seed_names, &named.op_names)?;
    let value = eval_tree(&named.system, &tree)?;
    if value.is_zero() {
        println!(
            "PASS: the combination of {} seeds evaluates to the zero vector",
            tree.leaf_count()
        );
        Ok(Outcome::Pass)
    } else {
        println!("FAIL: the combination evaluates to ({})", vector_csv(&value));
        Ok(Outcome::Fail)
    }
}

fn cmd_zero(file: &Path, n_max: usize) -> Result<Outcome> {
    let named = format::read_system(file)?;
    match find_zero_vector(&named.system, n_max)? {
        Some(witness) => println!(
            "zero at n={}: {}",
            witness.size,
            witness.tree.render(&named.seed_names, &named.op_names)
        ),
        None => println!("none"),
    }
    Ok(Outcome::Pass)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Growth { file, n, per_dim } => cmd_growth(&file, n, per_dim),
        Command::Bounds {
            file,
            pattern_size,
            cert_depth,
        } => cmd_bounds(&file, pattern_size, cert_depth),
        Command::Decide {
            file,
            theta,
            budget,
        } => cmd_decide(&file, &theta, budget),
        Command::Embed(cmd) => cmd_embed(cmd),
        Command::Transform(cmd) => cmd_transform(cmd),
        Command::Verify(cmd) => match cmd {
            VerifyCommand::BufferAnalysis { a, b, n_max } => {
                cmd_verify_buffer_analysis(&a, &b, n_max)
            }
            VerifyCommand::Congruences { file, n_max } => cmd_verify_congruences(&file, n_max),
            VerifyCommand::InsertZeroOdd { file, m_max } => {
                cmd_verify_insert_zero_odd(&file, m_max)
            }
            VerifyCommand::Certificate {
                file,
                weight,
                gamma,
                pattern,
                index,
                at_least,
                zero,
            } => cmd_verify_certificate(&file, weight, gamma, pattern, index, at_least, zero),
        },
        Command::Zero { file, n_max } => cmd_zero(&file, n_max),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
