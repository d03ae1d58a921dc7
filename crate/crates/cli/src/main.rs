use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kdvsym::catalog::{self, Catalog};
use kdvsym::conslaw::{self, ConservedVector};
use kdvsym::expr::{parse, Expr, Name, Q};
use kdvsym::jetcalc::{Equation, Generator};
use kdvsym::liealg::{self, AlgebraBasis, CellDiff};
use kdvsym::reduction;
use kdvsym::solutions::{self, Slice, VerifyOptions};
use kdvsym::symmetry::{self, InfinitesimalAnsatz};

const SCHEMA_VERSION: u32 = 1;

/// Cells of the commutator and adjoint tables known to be misprinted.
const DOCUMENTED: [&str; 6] = [
    "commutator (2,6)",
    "commutator (3,6)",
    "commutator (6,2)",
    "commutator (6,3)",
    "adjoint (1,6)",
    "A7 (6,6)",
];

/// Further adjoint-table cells whose disagreement has been traced to the
/// printed form of S5. They are reported but do not fail `tables`.
const ANALYSED: [&str; 11] = [
    "adjoint (2,6)",
    "adjoint (2,7)",
    "adjoint (3,6)",
    "adjoint (6,2)",
    "adjoint (6,3)",
    "adjoint (6,4)",
    "A2 (6,5)",
    "A3 (6,5)",
    "A6 (2,5)",
    "A6 (3,5)",
    "A6 (4,5)",
];

#[derive(Parser)]
#[command(name = "kdvsym", version, about = "Symbolic toolkit for the (3+1)-dimensional KdV equation")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "KDVSYM_FORMAT", default_value = "text")]
    format: Format,
    /// Seed for all randomized numeric probing.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for numeric checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the equation from the hierarchy, in u-form and q-form.
    Derive,
    /// Print the determining equations of the point-symmetry ansatz.
    Detsys,
    /// Check that a generator leaves the equation invariant.
    VerifySym {
        /// `S1` .. `S7`, or a file holding a field such as `x*Dx + 2*t*Dt`.
        target: String,
    },
    /// Commutator and adjoint tables with the diff against the printed ones.
    Tables,
    /// Theta, the Phi system and the optimal-system representatives.
    Optimal {
        /// Random a-vectors checked against the S7 representative.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Reduce the equation by a subalgebra.
    Reduce {
        #[arg(long)]
        subalgebra: String,
        /// For S8, also run the chain down to the first integral.
        #[arg(long)]
        chain: bool,
    },
    /// Verify a closed-form solution.
    VerifySolution {
        name: String,
        /// Fixed parameter values, `k=v`.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        params: Vec<String>,
    },
    /// Conserved vector for a generator.
    Conslaw {
        #[arg(long)]
        generator: String,
        /// Print the components (the default).
        #[arg(long, conflicts_with_all = ["check", "check_paper"])]
        emit: bool,
        /// Check the divergence on the solution manifold.
        #[arg(long, conflicts_with = "check_paper")]
        check: bool,
        /// Compare against components read from a file of `t := ...` lines.
        #[arg(long, value_name = "FILE")]
        check_paper: Option<PathBuf>,
    },
    /// Sample a solution on a two-dimensional slice.
    EmitGrid {
        name: String,
        /// Fixed coordinates, `y=0,z=0`.
        #[arg(long, value_delimiter = ',')]
        fix: Vec<String>,
        /// Lattice axis `var=lo:hi:n`; give exactly two.
        #[arg(long)]
        range: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        params: Vec<String>,
        /// Split complex values into real and imaginary columns.
        #[arg(long)]
        complex: bool,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn runtime(e: impl ToString) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

/// A finished command: whether it verified, and what to print.
struct Output {
    ok: bool,
    text: String,
    json: Value,
    csv: Option<Vec<Vec<String>>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|out| emit(&cli, out)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn emit(cli: &Cli, out: Output) -> Result<bool, Failure> {
    let mut stdout = io::stdout().lock();
    match cli.format {
        Format::Text => write!(stdout, "{}", out.text).map_err(Failure::runtime)?,
        Format::Json => {
            let mut v = out.json;
            v["schema_version"] = json!(SCHEMA_VERSION);
            v["ok"] = json!(out.ok);
            let s = serde_json::to_string_pretty(&v).map_err(Failure::runtime)?;
            writeln!(stdout, "{s}").map_err(Failure::runtime)?;
        }
        Format::Csv => {
            let rows = out
                .csv
                .ok_or_else(|| Failure::Usage("this command has no csv output".into()))?;
            let mut w = csv::Writer::from_writer(stdout);
            for r in rows {
                w.write_record(&r).map_err(Failure::runtime)?;
            }
            w.flush().map_err(Failure::runtime)?;
        }
    }
    Ok(out.ok)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Derive => derive(),
        Command::Detsys => detsys(),
        Command::VerifySym { target } => verify_sym(target),
        Command::Tables => tables(),
        Command::Optimal { samples } => optimal(cli.seed, *samples),
        Command::Reduce { subalgebra, chain } => reduce(subalgebra, *chain, cli.seed),
        Command::VerifySolution { name, params } => verify_solution(name, params, cli),
        Command::Conslaw {
            generator,
            check,
            check_paper,
            ..
        } => conslaw_cmd(generator, *check, check_paper.as_ref(), cli),
        Command::EmitGrid {
            name,
            fix,
            range,
            out,
            params,
            complex,
        } => emit_grid(name, fix, range, out.as_ref(), params, *complex, cli.format),
    }
}

fn rational(q: &Q) -> String {
    q.to_string()
}

/// `lhs` as a list of monomials with rational coefficients; jets carry
/// their multi-index as variable counts.
fn term_list(e: &Expr) -> Value {
    let terms: Vec<Value> = e
        .terms()
        .iter()
        .map(|t| {
            let (c, mono) = t.split_coeff();
            let factors: Vec<Value> = if mono.is_one() {
                Vec::new()
            } else {
                mono.factors()
                    .iter()
                    .map(|f| {
                        let (base, power) = f.base_exp();
                        match base.as_jet() {
                            Some(j) => {
                                let index: BTreeMap<String, u32> =
                                    j.index.entries().iter().map(|(v, n)| (v.to_string(), *n)).collect();
                                json!({"dep": &*j.dep, "index": index, "power": power})
                            }
                            None => json!({"expr": base.to_string(), "power": power}),
                        }
                    })
                    .collect()
            };
            json!({"coefficient": rational(&c), "factors": factors})
        })
        .collect();
    Value::Array(terms)
}

fn equation_json(eq: &Equation, matches: bool) -> Value {
    json!({
        "lhs": eq.lhs.to_string(),
        "leading": Expr::jet(eq.leading.clone()).to_string(),
        "matches_transcription": matches,
        "terms": term_list(&eq.lhs),
    })
}

fn derive() -> Result<Output, Failure> {
    let cat = catalog::equations();
    let u = kdvsym::hierarchy::assemble_new_kdv().map_err(Failure::runtime)?;
    let q = kdvsym::hierarchy::potential_transform(&u).map_err(Failure::runtime)?;
    let u_ok = u.lhs == cat.expr("new_kdv_u").map_err(Failure::runtime)?.expand();
    let q_ok = q.lhs == cat.expr("new_kdv_q").map_err(Failure::runtime)?.expand();
    let text = format!(
        "u-form: {} = 0\nq-form: {} = 0\nu-form matches transcription: {u_ok}\nq-form matches transcription: {q_ok}\n",
        u.lhs, q.lhs
    );
    let mut csv = vec![vec!["form".into(), "coefficient".into(), "monomial".into()]];
    for (form, eq) in [("u", &u), ("q", &q)] {
        for t in eq.lhs.terms() {
            let (c, mono) = t.split_coeff();
            csv.push(vec![form.into(), rational(&c), mono.to_string()]);
        }
    }
    Ok(Output {
        ok: u_ok && q_ok,
        text,
        json: json!({"command": "derive", "u_form": equation_json(&u, u_ok), "q_form": equation_json(&q, q_ok)}),
        csv: Some(csv),
    })
}

fn detsys() -> Result<Output, Failure> {
    let eq = symmetry::potential_equation().map_err(Failure::runtime)?;
    let ans = InfinitesimalAnsatz::new_kdv();
    let sys = symmetry::determining_system(&ans, &eq).map_err(Failure::runtime)?;
    let eqs: Vec<String> = sys.equations.iter().map(|e| format!("{e} = 0")).collect();
    let mut text = String::new();
    for e in &eqs {
        text.push_str(e);
        text.push('\n');
    }
    let mut csv = vec![vec!["index".to_string(), "equation".to_string()]];
    csv.extend(eqs.iter().enumerate().map(|(i, e)| vec![(i + 1).to_string(), e.clone()]));
    Ok(Output {
        ok: true,
        text,
        json: json!({"command": "detsys", "equations": eqs}),
        csv: Some(csv),
    })
}

fn is_generator_label(s: &str) -> Option<usize> {
    let n: usize = s.strip_prefix('S')?.parse().ok()?;
    (1..=7).contains(&n).then_some(n)
}

fn verify_sym(target: &str) -> Result<Output, Failure> {
    let g = if is_generator_label(target).is_some() {
        symmetry::catalog_generator(target).map_err(Failure::runtime)?
    } else {
        let src = fs::read_to_string(target).map_err(|e| Failure::Usage(format!("{target}: {e}")))?;
        let ctx = catalog::named_context("fields").map_err(Failure::Runtime)?;
        let field = parse(src.trim(), &ctx).map_err(|e| Failure::Usage(format!("{target}: {e}")))?;
        symmetry::generator_from_field(&field, &["x", "y", "z", "t"], &["q"])
            .map_err(|e| Failure::Usage(format!("{target}: {e}")))?
    };
    let eq = symmetry::potential_equation().map_err(Failure::runtime)?;
    let r = symmetry::invariance_residual(&g, &eq).map_err(Failure::runtime)?;
    let ok = r.is_zero();
    Ok(Output {
        ok,
        text: format!("{target}: residual {r}\n{}\n", if ok { "symmetry" } else { "not a symmetry" }),
        json: json!({"command": "verify-sym", "target": target, "generator": field_text(&g), "residual": r.to_string(), "symmetry": ok}),
        csv: Some(vec![vec!["target".into(), "residual".into()], vec![target.into(), r.to_string()]]),
    })
}

fn field_text(g: &Generator) -> String {
    let parts = g.indep.iter().zip(&g.xi).chain(g.dep.iter().zip(&g.eta));
    let terms: Vec<Expr> = parts.map(|(v, c)| c * Expr::sym(format!("D{v}"))).collect();
    Expr::add(terms).to_string()
}

fn status(cell: &str) -> &'static str {
    if DOCUMENTED.contains(&cell) {
        "documented"
    } else if ANALYSED.contains(&cell) {
        "analysed"
    } else {
        "undocumented"
    }
}

fn tables() -> Result<Output, Failure> {
    let alg = AlgebraBasis::kdv().map_err(Failure::runtime)?;
    let comm = liealg::commutator_table(&alg);
    let adj = liealg::adjoint_table(&alg).map_err(Failure::runtime)?;
    let mut diffs: Vec<CellDiff> = liealg::commutator_diffs(&alg).map_err(Failure::runtime)?;
    diffs.extend(liealg::adjoint_diffs(&alg).map_err(Failure::runtime)?);
    diffs.extend(liealg::matrix_diffs(&alg).map_err(Failure::runtime)?);
    let s5 = liealg::adjudicate_s5().map_err(Failure::runtime)?;
    let keyed: Vec<(String, &CellDiff)> = diffs.iter().map(|d| (format!("{} {}", d.table, d.cell), d)).collect();
    let undocumented = keyed.iter().filter(|(k, _)| status(k) == "undocumented").count();
    let ok = undocumented == 0
        && alg.antisymmetry_violations().is_empty()
        && alg.jacobi_violations().is_empty();

    let cell_list = |t: &[Vec<Expr>]| -> Vec<Value> {
        let mut out = Vec::new();
        for (i, row) in t.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out.push(json!({"row": i + 1, "col": j + 1, "value": e.to_string()}));
            }
        }
        out
    };
    let mut constants = Vec::new();
    for (i, row) in alg.c.iter().enumerate() {
        for (j, col) in row.iter().enumerate() {
            for (k, c) in col.iter().enumerate() {
                if !num_is_zero(c) {
                    constants.push(json!({"i": i + 1, "j": j + 1, "k": k + 1, "c": rational(c)}));
                }
            }
        }
    }
    let diff_json: Vec<Value> = keyed
        .iter()
        .map(|(k, d)| {
            json!({"table": d.table, "cell": d.cell, "computed": d.computed, "printed": d.printed, "status": status(k)})
        })
        .collect();

    let mut text = String::from("Commutator table [Si, Sj]\n");
    for (i, row) in comm.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        text.push_str(&format!("S{}: {}\n", i + 1, cells.join(" | ")));
    }
    text.push_str("\nAdjoint table Ad(exp(eps Sj)) Si\n");
    for (i, row) in adj.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        text.push_str(&format!("S{}: {}\n", i + 1, cells.join(" | ")));
    }
    text.push_str(&format!("\nS5 adjudication: {}\n\nDiffs against the printed tables:\n", s5.chosen));
    for (k, d) in &keyed {
        text.push_str(&format!("  [{}] {d}\n", status(k)));
    }

    let mut csv = vec![vec!["table".to_string(), "row".into(), "col".into(), "value".into()]];
    for (name, t) in [("commutator", &comm), ("adjoint", &adj)] {
        for (i, row) in t.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                csv.push(vec![name.into(), (i + 1).to_string(), (j + 1).to_string(), e.to_string()]);
            }
        }
    }
    Ok(Output {
        ok,
        text,
        json: json!({
            "command": "tables",
            "commutators": cell_list(&comm),
            "adjoint": cell_list(&adj),
            "structure_constants": constants,
            "s5_adjudication": s5,
            "typo_diffs": diff_json,
            "undocumented_diffs": undocumented,
        }),
        csv: Some(csv),
    })
}

fn num_is_zero(q: &Q) -> bool {
    *q.numer() == 0.into()
}

fn optimal(seed: u64, samples: usize) -> Result<Output, Failure> {
    use rand::{Rng, SeedableRng};
    let up = AlgebraBasis::transcribed_upper().map_err(Failure::runtime)?;
    let alg = AlgebraBasis::kdv().map_err(Failure::runtime)?;
    let printed = liealg::transcribed_theta().map_err(Failure::runtime)?;
    let recomputed = liealg::theta(&alg);
    let theta_ok = liealg::theta(&up) == printed;
    let system = liealg::phi_system(&recomputed).map_err(Failure::runtime)?;
    let violations = liealg::phi_violations(&system, &Expr::sym("a7")).map_err(Failure::runtime)?;
    let eps = liealg::representative_eps().map_err(Failure::runtime)?;
    let mut target = vec![Q::from_integer(0.into()); 7];
    target[6] = Q::from_integer(1.into());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    let mut all_pass = true;
    for _ in 0..samples {
        let mut a: Vec<Q> = (0..6)
            .map(|_| Q::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=4).into()))
            .collect();
        a.push(Q::from_integer(1.into()));
        let r = liealg::verify_optimal_representative(&up, &a, &eps, &target).map_err(Failure::runtime)?;
        all_pass &= r.pass;
        reports.push(r);
    }
    let ok = theta_ok && violations.is_empty() && all_pass;
    let mut text = String::from("Theta (recomputed, printed)\n");
    for (i, (r, p)) in recomputed.iter().zip(&printed).enumerate() {
        text.push_str(&format!("  Theta{}: {r} | {p}\n", i + 1));
    }
    text.push_str(&format!(
        "Theta from the printed table equals the printed Theta: {theta_ok}\nPhi = a7 solves the Phi system: {}\n\
         Representatives mapped to S7: {}/{samples}\n",
        violations.is_empty(),
        reports.iter().filter(|r| r.pass).count()
    ));
    Ok(Output {
        ok,
        text,
        json: json!({
            "command": "optimal",
            "theta": recomputed.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "printed_theta": printed.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "theta_from_printed_table_matches": theta_ok,
            "phi_system": system.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "phi_violations": violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "representatives": reports,
        }),
        csv: None,
    })
}

fn reduce(label: &str, chain: bool, seed: u64) -> Result<Output, Failure> {
    let sub = reduction::subalgebra(label).map_err(|e| Failure::Usage(e.to_string()))?;
    let r = reduction::reduce_subalgebra(sub.label, seed).map_err(Failure::runtime)?;
    let mut ok = r.comparison.equal;
    let mut text = String::new();
    for (v, e) in &r.invariants {
        text.push_str(&format!("{v} = {e}\n"));
    }
    text.push_str(&format!("q = {}\nreduced: {} = 0\n", r.ansatz, r.reduced));
    text.push_str(&comparison_text(&r.comparison));
    let mut json = json!({"command": "reduce", "report": r});
    if chain {
        if sub.label != "S8" {
            return Err(Failure::Usage("--chain applies to S8 only".into()));
        }
        let redeq1 = catalog::reductions().expr("reduced_S8").map_err(Failure::runtime)?;
        let c = reduction::s8_chain(&redeq1).map_err(Failure::runtime)?;
        ok &= c.second.equal && c.third.equal && c.integrated.equal;
        text.push_str(&format!("chain, second reduction: {}", comparison_text(&c.second)));
        text.push_str(&format!("chain, third reduction: {} = 0\n  {}", c.third_equation, comparison_text(&c.third)));
        text.push_str(&format!(
            "chain, first integral: {} = 0\n  {}",
            c.integrated_equation,
            comparison_text(&c.integrated)
        ));
        json["chain"] = json!(c);
    }
    Ok(Output {
        ok,
        text,
        json,
        csv: None,
    })
}

fn comparison_text(c: &reduction::Comparison) -> String {
    let mut s = format!("matches printed: {}", c.equal);
    if let Some(l) = &c.lambda {
        s.push_str(&format!(", lambda = {l}"));
    }
    if let Some(m) = c.max_relative {
        s.push_str(&format!(", max relative {m:.3e}"));
    }
    if let Some(m) = &c.mismatch {
        s.push_str(&format!("\n  mismatch: {m}"));
    }
    s.push('\n');
    s
}

fn key_values(items: &[String]) -> Result<HashMap<String, f64>, Failure> {
    let mut out = HashMap::new();
    for it in items {
        let (k, v) = it
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected k=v, got `{it}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("`{v}` is not a number")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn lookup_solution(name: &str) -> Result<solutions::ClosedFormSolution, Failure> {
    solutions::solution(name).map_err(|e| match e {
        solutions::SolutionError::Unknown(_) => Failure::Usage(format!("{e}; known: {}", solutions::NAMES.join(", "))),
        e => Failure::runtime(e),
    })
}

fn verify_solution(name: &str, params: &[String], cli: &Cli) -> Result<Output, Failure> {
    let s = lookup_solution(name)?;
    let params = key_values(params)?;
    for k in params.keys() {
        if !s.params.contains(&k.as_str()) {
            return Err(Failure::Usage(format!("{name} has no parameter `{k}`; parameters: {}", s.params.join(", "))));
        }
    }
    if s.mode == solutions::Mode::Excluded {
        return Ok(Output {
            ok: false,
            text: format!("{name}: not verified; available for complex grids only\n"),
            json: json!({"command": "verify-solution", "name": name, "mode": s.mode, "verified": false}),
            csv: None,
        });
    }
    let opts = VerifyOptions {
        seed: cli.seed,
        tolerance: cli.tolerance,
        params,
        ..VerifyOptions::default()
    };
    let r = solutions::verify_solution(&s, &opts).map_err(Failure::runtime)?;
    let mut text = format!("{name} ({}): {}\n", serde_json::to_value(r.mode).map_err(Failure::runtime)?.as_str().unwrap_or(""), if r.pass { "verified" } else { "FAILED" });
    if let Some(res) = &r.residual {
        text.push_str(&format!("  residual: {res}\n"));
    }
    for (i, d) in r.draws.iter().enumerate() {
        let ps: Vec<String> = d.parameters.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
        text.push_str(&format!("  draw {}: max relative {:.3e} [{}]\n", i + 1, d.max_relative, ps.join(", ")));
    }
    if let Some(c) = &r.consistency {
        text.push_str(&format!("  u = D_x q: {}\n", c.pass));
    }
    if let Some(z) = r.abstract_residual_zero {
        text.push_str(&format!("  residual with abstract functions is zero: {z}\n"));
    }
    let mut csv = vec![vec!["draw".to_string(), "max_relative".into()]];
    csv.extend(r.draws.iter().enumerate().map(|(i, d)| vec![(i + 1).to_string(), format!("{:e}", d.max_relative)]));
    Ok(Output {
        ok: r.pass,
        text,
        json: json!({"command": "verify-solution", "report": r}),
        csv: Some(csv),
    })
}

fn components_text(t: &ConservedVector, n: usize) -> String {
    let mut s = String::new();
    for (v, e) in &t.components {
        s.push_str(&format!("T{n}_{v} := {e}\n"));
    }
    s
}

fn conslaw_cmd(generator: &str, check: bool, given: Option<&PathBuf>, cli: &Cli) -> Result<Output, Failure> {
    let n = is_generator_label(generator)
        .ok_or_else(|| Failure::Usage(format!("generator must be S1 .. S7, got `{generator}`")))?;
    let (eq, adj) = conslaw::system().map_err(Failure::runtime)?;
    let g = conslaw::printed_generator(n).map_err(Failure::runtime)?;
    let t = conslaw::conserved_vector(&g, &eq).map_err(Failure::runtime)?;
    let comps: BTreeMap<String, String> = t.components.iter().map(|(v, e)| (v.to_string(), e.to_string())).collect();
    let csv: Vec<Vec<String>> = std::iter::once(vec!["component".to_string(), "expr".into()])
        .chain(t.components.iter().map(|(v, e)| vec![v.to_string(), e.to_string()]))
        .collect();
    if check {
        let eqs = [eq, adj];
        let mut reports = vec![conslaw::onshell_divergence_check(&t, &eqs).map_err(Failure::runtime)?];
        if !reports[0].pass || n >= 6 {
            reports.push(
                conslaw::onshell_divergence_numeric(&t, &eqs, cli.seed, 40, cli.tolerance).map_err(Failure::runtime)?,
            );
        }
        let ok = reports.iter().any(|r| r.pass);
        let mut text = String::new();
        for r in &reports {
            text.push_str(&format!("T{n} divergence on shell ({}): {}", r.mode, if r.pass { "conserved" } else { "FAILED" }));
            if let Some(m) = r.max_relative {
                text.push_str(&format!(", max relative {m:.3e}"));
            }
            text.push('\n');
            for m in &r.surviving {
                text.push_str(&format!("  surviving: {m}\n"));
            }
        }
        return Ok(Output {
            ok,
            text,
            json: json!({"command": "conslaw", "generator": generator, "components": comps, "divergence": reports}),
            csv: None,
        });
    }
    if let Some(path) = given {
        let src = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let src = if src.contains("@context") { src } else { format!("@context kdv\n{src}") };
        let cat = Catalog::load(&src).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let mut reference = Vec::new();
        for entry in cat.entries() {
            let var = entry.name.rsplit('_').next().unwrap_or(&entry.name);
            if !conslaw::COMPONENTS.contains(&var) {
                return Err(Failure::Usage(format!("{}: `{}` names no component", path.display(), entry.name)));
            }
            let e = entry.expr().map_err(|e| Failure::Usage(e.to_string()))?;
            reference.push((Name::from(var), e));
        }
        let cmp = conslaw::compare_against(&t, &reference, &format!("T{n}"), cli.seed, 30).map_err(Failure::runtime)?;
        let ok = !cmp.is_empty() && cmp.iter().all(|c| c.max_relative < cli.tolerance);
        let mut text = String::new();
        for c in &cmp {
            text.push_str(&format!(
                "{}: {}, max relative {:.3e}\n",
                c.component,
                if c.exact { "exact" } else { "differs in form" },
                c.max_relative
            ));
            if let Some(d) = &c.difference {
                text.push_str(&format!("  generated - given: {d}\n"));
            }
        }
        return Ok(Output {
            ok,
            text,
            json: json!({"command": "conslaw", "generator": generator, "components": comps, "comparison": cmp}),
            csv: None,
        });
    }
    Ok(Output {
        ok: true,
        text: components_text(&t, n),
        json: json!({"command": "conslaw", "generator": generator, "components": comps}),
        csv: Some(csv),
    })
}

fn parse_range(s: &str) -> Result<(String, f64, f64, usize), Failure> {
    let bad = || Failure::Usage(format!("expected var=lo:hi:n, got `{s}`"));
    let (v, rest) = s.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad());
    };
    Ok((
        v.trim().to_string(),
        lo.parse().map_err(|_| bad())?,
        hi.parse().map_err(|_| bad())?,
        n.parse().map_err(|_| bad())?,
    ))
}

fn emit_grid(
    name: &str,
    fix: &[String],
    ranges: &[String],
    out: Option<&PathBuf>,
    params: &[String],
    complex: bool,
    format: Format,
) -> Result<Output, Failure> {
    let s = lookup_solution(name)?;
    let mut fixed: Vec<(String, f64)> = key_values(fix)?.into_iter().collect();
    fixed.sort_by(|a, b| a.0.cmp(&b.0));
    let axes: Vec<_> = ranges.iter().map(|r| parse_range(r)).collect::<Result<_, _>>()?;
    let axes: [(String, f64, f64, usize); 2] = axes
        .try_into()
        .map_err(|_| Failure::Usage("give exactly two --range axes".into()))?;
    let slice = Slice { fixed, axes };
    let overrides = key_values(params)?;
    let grid = solutions::emit_grid(&s, &slice, &overrides, complex).map_err(|e| match e {
        solutions::SolutionError::BadSlice(_) | solutions::SolutionError::ComplexValued(_) => Failure::Usage(e.to_string()),
        e => Failure::runtime(e),
    })?;
    let mut header: Vec<String> = vec![grid.axes[0].clone(), grid.axes[1].clone()];
    header.extend(grid.header().into_iter().skip(2).map(String::from));
    let mut rows = vec![header];
    rows.extend(grid.rows.iter().map(|r| r.iter().map(|v| format!("{v:e}")).collect()));
    if let Some(path) = out {
        let mut w = csv::Writer::from_path(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        for r in &rows {
            w.write_record(r).map_err(Failure::runtime)?;
        }
        w.flush().map_err(Failure::runtime)?;
        return Ok(Output {
            ok: true,
            text: format!("wrote {} rows to {}\n", grid.rows.len(), path.display()),
            json: json!({"command": "emit-grid", "name": name, "rows": grid.rows.len(), "out": path.display().to_string()}),
            csv: Some(vec![vec!["rows".into(), "out".into()], vec![grid.rows.len().to_string(), path.display().to_string()]]),
        });
    }
    let text = if format == Format::Text {
        rows.iter().map(|r| r.join(",")).collect::<Vec<_>>().join("\n") + "\n"
    } else {
        String::new()
    };
    Ok(Output {
        ok: true,
        text,
        json: json!({"command": "emit-grid", "name": name, "grid": grid}),
        csv: Some(rows),
    })
}
