use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use plumbook_core::mcg::{certify_stein, Budget, MarkedSurface, RelationTable, TwistWord};
use plumbook_core::openbook::{build_from_plumbing, OpenBook};
use plumbook_core::pipeline::{normal_form_for, run_pipeline, PipelineOptions};
use plumbook_core::plumbing::Sign;
use plumbook_core::sl2z::{recompose, torus_bundle_h1};
use plumbook_core::{fixtures, Plumbing, Sl2, Word};

#[derive(Parser)]
#[command(name = "plumbook", version, about = "Torus bundles, plumbing graphs and elliptic open books")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Graphviz output for commands that produce a plumbing graph.
    #[arg(long, global = true)]
    dot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CertArgs {
    /// Extra relations, one `name: LHS = RHS` per line.
    #[arg(long)]
    relations: Option<PathBuf>,
    /// Search depth for the certifier.
    #[arg(long)]
    budget: Option<usize>,
    /// Hide a relation by name, e.g. chain2. Repeatable.
    #[arg(long = "disable-relation")]
    disable_relation: Vec<String>,
}

#[derive(Args, Clone)]
struct FormArgs {
    /// Use the shortest normal form found by exhaustive search.
    #[arg(long)]
    shortest: bool,
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    #[arg(long, default_value_t = 8)]
    max_abs: i64,
}

#[derive(Args, Clone)]
struct GraphInput {
    /// Matrix `a,b,c,d` in SL(2,Z).
    #[arg(allow_hyphen_values = true, required_unless_present = "graph")]
    matrix: Option<String>,
    /// Plumbing graph JSON file, `-` for stdin.
    #[arg(long, conflicts_with = "matrix")]
    graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a matrix as S T^a1 S ... T^ak S.
    Decompose {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Multiply out a normal form such as "S T^1 S T^0 S" or "1,0".
    Recompose {
        #[arg(allow_hyphen_values = true)]
        word: String,
    },
    /// Cyclic plumbing graph of a matrix.
    Plumb {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[command(flatten)]
        form: FormArgs,
    },
    /// Blow up an edge, or a vertex with --leaf.
    Blowup {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, conflicts_with = "leaf", required_unless_present = "leaf")]
        edge: Option<usize>,
        #[arg(long)]
        leaf: Option<usize>,
        /// Euler number of the new vertex, +1 or -1.
        #[arg(long, allow_hyphen_values = true)]
        eps: i64,
        /// Sign of the new leaf edge.
        #[arg(long, allow_hyphen_values = true, default_value_t = -1)]
        sign: i64,
    },
    /// Remove a +-1 vertex of genus 0 and degree at most 2.
    Blowdown {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: usize,
    },
    /// First homology of a torus bundle (both ways) or of a plumbing graph.
    H1 {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Open book built from the plumbing graph.
    Openbook {
        #[command(flatten)]
        input: GraphInput,
        /// Merge twists of joins between the same two vertices.
        #[arg(long)]
        merge: bool,
    },
    /// Certify a twist word, e.g. "d1 d2 a1^-3 a2^-3".
    Certify {
        #[arg(allow_hyphen_values = true)]
        word: String,
        /// Boundary circles; defaults to the largest d index.
        #[arg(long)]
        boundary: Option<usize>,
        /// Number of alpha curves; defaults to the boundary count.
        #[arg(long)]
        alphas: Option<usize>,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Matrix to certificate report.
    Pipeline {
        #[arg(allow_hyphen_values = true)]
        matrix: String,
        #[command(flatten)]
        form: FormArgs,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Run the pinned checks for the tabulated examples.
    Fixtures {
        #[command(flatten)]
        cert: CertArgs,
    },
}

enum Failure {
    Usage(String),
    Mismatch(String),
    Fixture(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Mismatch(_) => 2,
            Failure::Fixture(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Mismatch(m) | Failure::Fixture(m) => m,
        }
    }
}

type Out = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn parse_matrix(s: &str) -> Result<Sl2, Failure> {
    let cleaned: String = s.chars().filter(|c| !matches!(c, '[' | ']' | ' ')).collect();
    cleaned.parse().map_err(usage)
}

fn read_graph(path: &PathBuf) -> Result<Plumbing, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(usage)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?
    };
    Plumbing::from_json_str(&text).map_err(usage)
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn form_options(form: &FormArgs) -> PipelineOptions {
    PipelineOptions { shortest: form.shortest.then_some((form.max_len, form.max_abs)), ..PipelineOptions::new() }
}

fn relation_table(cert: &CertArgs) -> Result<RelationTable, Failure> {
    let mut table = RelationTable::builtin();
    if let Some(path) = &cert.relations {
        let report = table.load_file(path).map_err(usage)?;
        eprintln!(
            "relations: {} loaded, {} duplicate, {} rejected",
            report.loaded,
            report.duplicates,
            report.rejected.len()
        );
        for r in &report.rejected {
            eprintln!("  line {} ({}): {}", r.line, r.name, r.reason);
        }
    }
    for name in &cert.disable_relation {
        if !table.disable(name) {
            return Err(usage(format!("no relation named {name:?}")));
        }
    }
    Ok(table)
}

fn apply_cert(opts: &mut PipelineOptions, cert: &CertArgs) -> Out {
    opts.relations = relation_table(cert)?;
    if let Some(depth) = cert.budget {
        opts.budget = Budget::with_depth(depth);
    }
    Ok(())
}

fn show_graph(cli: &Cli, g: &Plumbing) -> Out {
    if cli.dot {
        print!("{}", g.to_dot());
    } else if cli.json {
        print_json(&g.to_json().map_err(usage)?);
    } else {
        println!("{g}");
        println!("h1: {}", g.h1());
    }
    Ok(())
}

fn graph_from_input(input: &GraphInput) -> Result<Plumbing, Failure> {
    match (&input.matrix, &input.graph) {
        (_, Some(path)) => read_graph(path),
        (Some(m), None) => Ok(Plumbing::from_normal_form(&normal_form_for(&parse_matrix(m)?, &PipelineOptions::new()).map_err(usage)?)),
        (None, None) => Err(usage("give a matrix or --graph")),
    }
}

fn show_open_book(cli: &Cli, ob: &OpenBook) {
    if cli.json {
        print_json(&ob.to_json());
    } else {
        let s = ob.stats();
        println!("monodromy: {}", ob.render());
        println!(
            "genus {} boundary {} (right {}, left {}) interior (right {}, left {}) elliptic {}",
            s.genus, s.boundary, s.boundary_right, s.boundary_left, s.interior_right, s.interior_left, s.elliptic
        );
    }
}

fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Decompose { matrix, form } => {
            let a = parse_matrix(matrix)?;
            let word = normal_form_for(&a, &form_options(form)).map_err(usage)?;
            let ok = recompose(&word) == a;
            if cli.json {
                print_json(&serde_json::json!({ "matrix": a.to_csv(), "normal_form": word.to_string(), "recomposes": ok }));
            } else {
                println!("{word}");
                println!("recompose check: {}", if ok { "ok" } else { "FAILED" });
            }
            if !ok {
                return Err(Failure::Mismatch("normal form does not recompose".into()));
            }
        }
        Command::Recompose { word } => {
            let w: Word = word.parse().map_err(usage)?;
            let m = recompose(&w);
            if cli.json {
                print_json(&serde_json::json!({ "normal_form": w.to_string(), "matrix": m.to_csv() }));
            } else {
                println!("{m}");
            }
        }
        Command::Plumb { matrix, form } => {
            let a = parse_matrix(matrix)?;
            let word = normal_form_for(&a, &form_options(form)).map_err(usage)?;
            show_graph(cli, &Plumbing::from_normal_form(&word))?;
        }
        Command::Blowup { graph, edge, leaf, eps, sign } => {
            let g = read_graph(graph)?;
            let eps = Sign::from_i64(*eps).map_err(usage)?;
            let out = match (edge, leaf) {
                (Some(e), _) => g.blow_up_edge(*e, eps),
                (None, Some(v)) => g.blow_up_leaf(*v, eps, Sign::from_i64(*sign).map_err(usage)?),
                (None, None) => return Err(usage("give --edge or --leaf")),
            }
            .map_err(usage)?;
            show_graph(cli, &out)?;
        }
        Command::Blowdown { graph, vertex } => {
            let out = read_graph(graph)?.blow_down(*vertex).map_err(usage)?;
            show_graph(cli, &out)?;
        }
        Command::H1 { input } => {
            if let Some(m) = input.matrix.as_ref().filter(|_| input.graph.is_none()) {
                let a = parse_matrix(m)?;
                let bundle = torus_bundle_h1(&a);
                let plumbed = Plumbing::from_normal_form(&normal_form_for(&a, &PipelineOptions::new()).map_err(usage)?).h1();
                let agree = bundle == plumbed;
                if cli.json {
                    print_json(&serde_json::json!({
                        "bundle": bundle.to_string(), "plumbing": plumbed.to_string(), "agree": agree
                    }));
                } else {
                    println!("bundle:   {bundle}");
                    println!("plumbing: {plumbed}");
                }
                if !agree {
                    return Err(Failure::Mismatch(format!("h1 mismatch: {bundle} vs {plumbed}")));
                }
            } else {
                let h = graph_from_input(input)?.h1();
                if cli.json {
                    print_json(&serde_json::json!({ "h1": h.to_string() }));
                } else {
                    println!("{h}");
                }
            }
        }
        Command::Openbook { input, merge } => {
            let g = graph_from_input(input)?;
            let mut ob = build_from_plumbing(&g).map_err(usage)?;
            if *merge {
                ob = ob.merge_parallel_joins();
            }
            show_open_book(cli, &ob);
        }
        Command::Certify { word, boundary, alphas, cert } => {
            let mut opts = PipelineOptions::new();
            apply_cert(&mut opts, cert)?;
            let terms = plumbook_core::mcg::parse_terms(word).map_err(usage)?;
            let max_delta = terms
                .iter()
                .filter_map(|t| match t.curve {
                    plumbook_core::mcg::Curve::Delta(i) => Some(i),
                    _ => None,
                })
                .max()
                .unwrap_or(1);
            let n = boundary.unwrap_or(max_delta);
            let surface = MarkedSurface::with_alphas(n, alphas.unwrap_or(n));
            let w = TwistWord::new(surface, terms).map_err(usage)?;
            let c = certify_stein(&w, &opts.relations, opts.budget, &opts.hints);
            if cli.json {
                print_json(&c);
            } else {
                println!("{}: {:?}", c.label(), c.verdict);
                println!("rule: {:?}, {} moves", c.rule, c.trace.len());
            }
        }
        Command::Pipeline { matrix, form, cert } => {
            let a = parse_matrix(matrix)?;
            let mut opts = form_options(form);
            apply_cert(&mut opts, cert)?;
            let report = run_pipeline(&a, &opts).map_err(usage)?;
            if cli.json {
                print_json(&report);
            } else {
                println!("matrix:      {}", report.input);
                println!("normal form: {}", report.normal_form);
                println!("h1:          {} / {}", report.h1_bundle, report.h1_plumbing);
                let s = report.open_book_stats;
                println!("open book:   genus {} boundary {}", s.genus, s.boundary);
                println!("monodromy:   {}", report.monodromy);
                match (&report.certificate, &report.certificate_skipped) {
                    (Some(c), _) => println!("verdict:     {} {:?}", c.label(), c.verdict),
                    (None, Some(why)) => println!("verdict:     skipped ({why})"),
                    (None, None) => {}
                }
            }
            if report.oracle_mismatch() {
                return Err(Failure::Mismatch("homology oracles disagree".into()));
            }
        }
        Command::Fixtures { cert } => {
            let mut opts = PipelineOptions::new();
            apply_cert(&mut opts, cert)?;
            let report = fixtures::run_fixtures(&opts);
            if cli.json {
                print_json(&report);
            } else {
                for r in &report.rows {
                    println!("{} {:<40} {}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.detail);
                }
                println!("{} passed, {} failed", report.passed, report.failed);
            }
            if !report.all_pass() {
                return Err(Failure::Fixture(format!("{} fixture rows failed", report.failed)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
