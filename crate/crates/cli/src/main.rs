use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use invkb_core::distance::{circular_distance, circular_element_distance, distance_matrix, element_distance, weighted_distance};
use invkb_core::files::{parse_genomes, RuleSetFile};
use invkb_core::oracle::{coxeter_distance, lehmer_unrank, CayleyGraph, DistanceTable, DEFAULT_MAX_N};
use invkb_core::perm::Permutation;
use invkb_core::phylo::{neighbor_joining, parse_phylip, topology_split, write_newick, write_phylip, DistanceMatrix};
use invkb_core::presentation::{
    circular_presentation, coxeter_presentation, length_weighted_presentation, unit_weighted_presentation, ModelFile,
    Precedence, Presentation,
};
use invkb_core::rational::format_decimal;
use invkb_core::rewrite::{knuth_bendix, Limits, RewriteError, RewritingSystem};
use invkb_core::Rational;

#[derive(Parser)]
#[command(name = "invkb", version, about = "Weighted inversion distances by Knuth-Bendix completion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Complete a model into a confluent rewriting system.
    Complete(CompleteArgs),
    /// Distance between two genomes.
    Dist(DistArgs),
    /// PHYLIP distance matrix for a genome list.
    Matrix(MatrixArgs),
    /// Neighbor-joining tree from a PHYLIP matrix.
    Tree(TreeArgs),
    /// Compare rewriting distances with exhaustive Cayley-graph search.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Coxeter,
    Linear,
    Circular,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightKind {
    Length,
    Unit,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecedenceArg {
    WeightIj,
    Ij,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Built-in model.
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    /// Number of regions.
    #[arg(long)]
    n: Option<usize>,
    /// JSON model file instead of a built-in model.
    #[arg(long, conflicts_with_all = ["model", "n"])]
    model_file: Option<PathBuf>,
    /// Inversion weights for the linear model.
    #[arg(long, value_enum, default_value = "length")]
    weights: WeightKind,
    /// Generator precedence for the linear model.
    #[arg(long, value_enum, default_value = "weight-ij")]
    precedence: PrecedenceArg,
}

#[derive(Args, Clone)]
struct LimitArgs {
    #[arg(long, default_value_t = Limits::default().max_rules)]
    max_rules: usize,
    #[arg(long, default_value_t = Limits::default().max_word_length)]
    max_word_length: usize,
    #[arg(long, default_value_t = Limits::default().max_iterations)]
    max_iterations: u64,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_rules: self.max_rules,
            max_word_length: self.max_word_length,
            max_iterations: self.max_iterations,
        }
    }
}

/// Where a rewriting system comes from: a saved rule set or a model to complete.
#[derive(Args, Clone)]
struct SystemArgs {
    /// Rule-set JSON written by `complete`.
    #[arg(long, conflicts_with_all = ["model", "n", "model_file"])]
    rules: Option<PathBuf>,
    /// Re-verify confluence when loading a rule set.
    #[arg(long)]
    check_confluence: bool,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct CompleteArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    limits: LimitArgs,
    /// Output rule-set JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Source genome, in cycle or one-line notation.
    #[arg(long)]
    from: String,
    /// Target genome.
    #[arg(long)]
    to: String,
    /// Minimize over rotations and reflections of a circular genome.
    #[arg(long)]
    circular: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    /// Dijkstra over the model's generators.
    Weighted,
    /// Breadth-first search over all inversions at unit weight.
    Unit,
    /// Adjacent-transposition distance (inversion count).
    Coxeter,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Genome list: one `label<TAB>permutation` per line.
    #[arg(long)]
    genomes: PathBuf,
    /// Compute entries by exhaustive search instead of rewriting.
    #[arg(long, value_enum)]
    oracle: Option<OracleKind>,
    /// Treat genomes as circular
    #[arg(long)]
    circular: bool,
    /// Also build a neighbor-joining tree and print it as Newick.
    #[arg(long)]
    tree: bool,
    /// PHYLIP output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Newick output path for `--tree`; stdout when absent.
    #[arg(long, requires = "tree")]
    tree_out: Option<PathBuf>,
    /// Largest n for exhaustive search.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
}

#[derive(Args)]
struct TreeArgs {
    /// PHYLIP square distance matrix.
    #[arg(long)]
    matrix: PathBuf,
    /// Newick output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Check every element of S_n.
    #[arg(long, conflicts_with = "sample")]
    verify_all: bool,
    /// Check this many random elements.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Compare circular distances
    #[arg(long)]
    circular: bool,
    /// Largest n for exhaustive search.
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    max_n: usize,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure { code: 2, error: e.into() }
}

fn compute<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure { code: 1, error: e.into() }
}

type Outcome<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Complete(a) => cmd_complete(a),
        Command::Dist(a) => cmd_dist(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Tree(a) => cmd_tree(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)
}

fn write(path: &Path, text: &str) -> Outcome<()> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(compute)
}

fn build_presentation(m: &ModelArgs) -> Outcome<Presentation> {
    if let Some(path) = &m.model_file {
        let text = read(path)?;
        let file: ModelFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(usage)?;
        return Presentation::from_model_file(&file).map_err(usage);
    }
    let kind = m.model.ok_or_else(|| usage(anyhow!("give --model and --n, --model-file, or --rules")))?;
    let n = m.n.ok_or_else(|| usage(anyhow!("--n is required with --model")))?;
    let precedence = match m.precedence {
        PrecedenceArg::WeightIj => Precedence::WeightIJ,
        PrecedenceArg::Ij => Precedence::IJ,
    };
    let pres = match kind {
        ModelKind::Coxeter => coxeter_presentation(n),
        ModelKind::Circular => circular_presentation(n),
        ModelKind::Linear => match m.weights {
            WeightKind::Length => length_weighted_presentation(n, precedence),
            WeightKind::Unit => unit_weighted_presentation(n, precedence),
        },
    };
    pres.map_err(usage)
}

fn complete(pres: &Presentation, limits: Limits) -> Result<RewritingSystem, RewriteError> {
    let start = Instant::now();
    let result = knuth_bendix(pres, &pres.generators().default_order(), limits);
    if let Ok((sys, stats)) = &result {
        eprintln!(
            "completed: {} rules, {} critical pairs, {:.3}s",
            sys.len(),
            stats.critical_pairs,
            start.elapsed().as_secs_f64()
        );
    }
    result.map(|(sys, _)| sys)
}

fn load_system(s: &SystemArgs) -> Outcome<(Presentation, RewritingSystem)> {
    if let Some(path) = &s.rules {
        let text = read(path)?;
        let file: RuleSetFile = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(usage)?;
        return file.to_system(s.check_confluence).map_err(usage);
    }
    let pres = build_presentation(&s.model)?;
    let sys = complete(&pres, s.limits.limits()).map_err(compute)?;
    Ok((pres, sys))
}

fn show(r: &Rational) -> String {
    format!("{r} ({})", format_decimal(r, 6))
}

fn cmd_complete(a: CompleteArgs) -> Outcome<()> {
    let pres = build_presentation(&a.model)?;
    match complete(&pres, a.limits.limits()) {
        Ok(sys) => {
            if let Some(out) = &a.out {
                let file = RuleSetFile::from_system(&pres, &sys);
                let text = serde_json::to_string_pretty(&file).map_err(compute)?;
                write(out, &(text + "\n"))?;
            }
            println!("rules: {}", sys.len());
            println!("status: {}", sys.status());
            Ok(())
        }
        Err(RewriteError::LimitExceeded {
            limit,
            rules,
            iterations,
            longest,
            partial,
        }) => {
            if let Some(out) = &a.out {
                let file = RuleSetFile::from_system(&pres, &partial);
                let text = serde_json::to_string_pretty(&file).map_err(compute)?;
                write(out, &(text + "\n"))?;
            }
            println!("rules: {rules}");
            println!("status: {}", partial.status());
            Err(compute(anyhow!(
                "{limit} exceeded after {iterations} critical pairs (longest lhs {longest})"
            )))
        }
        Err(e) => Err(compute(e)),
    }
}

fn parse_genome(text: &str, n: usize) -> Outcome<Permutation> {
    Permutation::parse(text, n)
        .with_context(|| format!("genome {text:?}"))
        .map_err(usage)
}

fn cmd_dist(a: DistArgs) -> Outcome<()> {
    let (_, sys) = load_system(&a.system)?;
    let n = sys.generators().n();
    let from = parse_genome(&a.from, n)?;
    let to = parse_genome(&a.to, n)?;
    let d = if a.circular {
        circular_distance(&from, &to, &sys)
    } else {
        weighted_distance(&from, &to, &sys)
    }
    .map_err(compute)?;
    println!("distance: {}", show(&d.value));
    println!("witness: {}", sys.generators().labels(&d.witness).join(" "));
    if let Some(sym) = d.symmetry {
        println!("symmetry: {sym}");
    }
    Ok(())
}

fn oracle_matrix(
    kind: OracleKind,
    s: &SystemArgs,
    genomes: &[(String, Permutation)],
    n: usize,
    circular: bool,
    max_n: usize,
) -> Outcome<DistanceMatrix> {
    let table = match kind {
        OracleKind::Weighted => {
            let gens = if s.rules.is_some() {
                load_system(s)?.1.generators().clone()
            } else {
                build_presentation(&s.model)?.generators().clone()
            };
            Some(DistanceTable::weighted(&CayleyGraph::with_limit(&gens, max_n).map_err(compute)?))
        }
        OracleKind::Unit => Some(DistanceTable::unit(&CayleyGraph::all_inversions(n, max_n).map_err(compute)?)),
        OracleKind::Coxeter => None,
    };
    let k = genomes.len();
    let mut entries = vec![vec![Rational::from_integer(0); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (&genomes[i].1, &genomes[j].1);
            let v = match &table {
                Some(t) => t.between(a, b, circular).map_err(compute)?,
                None => {
                    let g = b.then(&a.inverse());
                    let f = |h: &Permutation| Ok::<_, ()>(coxeter_distance(h));
                    let d = if circular {
                        invkb_core::oracle::dihedral_min_distance(&g, f).expect("infallible")
                    } else {
                        coxeter_distance(&g)
                    };
                    Rational::from_integer(d as i64)
                }
            };
            entries[i][j] = v;
            entries[j][i] = v;
        }
    }
    let labels = genomes.iter().map(|(l, _)| l.clone()).collect();
    DistanceMatrix::new(labels, entries).map_err(compute)
}

fn genome_size(s: &SystemArgs) -> Outcome<usize> {
    if s.rules.is_some() {
        return Ok(load_system(s)?.1.generators().n());
    }
    if let Some(n) = s.model.n {
        return Ok(n);
    }
    Ok(build_presentation(&s.model)?.generators().n())
}

fn cmd_matrix(a: MatrixArgs) -> Outcome<()> {
    let text = read(&a.genomes)?;
    let matrix = match a.oracle {
        None => {
            let (_, sys) = load_system(&a.system)?;
            let n = sys.generators().n();
            let genomes = parse_genomes(&text, n).map_err(usage)?;
            check_count(genomes.len(), a.tree)?;
            distance_matrix(&genomes, &sys, a.circular).map_err(compute)?
        }
        Some(kind) => {
            let n = genome_size(&a.system)?;
            let genomes = parse_genomes(&text, n).map_err(usage)?;
            check_count(genomes.len(), a.tree)?;
            oracle_matrix(kind, &a.system, &genomes, n, a.circular, a.max_n)?
        }
    };
    let phylip = write_phylip(&matrix).map_err(usage)? + "\n";
    match &a.out {
        Some(path) => write(path, &phylip)?,
        None => print!("{phylip}"),
    }
    if a.tree {
        emit_tree(&matrix, a.tree_out.as_deref())?;
    }
    Ok(())
}

fn check_count(k: usize, tree: bool) -> Outcome<()> {
    let needed = if tree { 3 } else { 2 };
    if k < needed {
        return Err(usage(anyhow!("need at least {needed} genomes, got {k}")));
    }
    Ok(())
}

fn emit_tree(matrix: &DistanceMatrix, out: Option<&Path>) -> Outcome<()> {
    let tree = neighbor_joining(matrix).map_err(usage)?;
    if tree.clamped {
        eprintln!("warning: negative branch lengths clamped to zero");
    }
    for split in topology_split(&tree) {
        eprintln!("split: {split}");
    }
    let newick = write_newick(&tree) + "\n";
    match out {
        Some(path) => write(path, &newick),
        None => {
            print!("{newick}");
            Ok(())
        }
    }
}

fn cmd_tree(a: TreeArgs) -> Outcome<()> {
    let matrix = parse_phylip(&read(&a.matrix)?).map_err(usage)?;
    emit_tree(&matrix, a.out.as_deref())
}

fn cmd_oracle(a: OracleArgs) -> Outcome<()> {
    if !a.verify_all && a.sample.is_none() {
        return Err(usage(anyhow!("give --verify-all or --sample <k>")));
    }
    let n = genome_size(&a.system)?;
    if n > a.max_n {
        return Err(compute(anyhow!("n = {n} exceeds the exhaustive search limit {}", a.max_n)));
    }
    let (_, sys) = load_system(&a.system)?;
    let graph = CayleyGraph::with_limit(sys.generators(), a.max_n).map_err(compute)?;
    let start = Instant::now();
    let table = DistanceTable::weighted(&graph);
    let order: usize = (1..=n).product();
    let ranks: Vec<usize> = if a.verify_all {
        (0..order).collect()
    } else {
        let mut rng = StdRng::seed_from_u64(a.seed);
        (0..a.sample.unwrap_or(0)).map(|_| rng.gen_range(0..order)).collect()
    };
    let is_coxeter = sys.generators().len() + 1 == n
        && sys
            .generators()
            .generators()
            .iter()
            .all(|g| g.weight == Rational::from_integer(1) && g.perm.cycles().len() == 1 && g.perm.inversion_count() == 1);
    let results: Vec<(usize, Result<(Rational, Rational), String>)> = ranks
        .par_iter()
        .map(|&r| {
            let g = lehmer_unrank(r, n);
            let outcome = (|| {
                let (rw, or) = if a.circular {
                    (
                        circular_element_distance(&g, &sys).map_err(|e| e.to_string())?.value,
                        table.dihedral_min(&g).map_err(|e| e.to_string())?,
                    )
                } else {
                    (
                        element_distance(&g, &sys).map_err(|e| e.to_string())?.value,
                        table.get(&g).map_err(|e| e.to_string())?,
                    )
                };
                if is_coxeter && !a.circular && rw != Rational::from_integer(coxeter_distance(&g) as i64) {
                    return Err(format!("differs from inversion count {}", coxeter_distance(&g)));
                }
                Ok((rw, or))
            })();
            (r, outcome)
        })
        .collect();
    let mut mismatches = 0;
    for (r, outcome) in &results {
        let g = lehmer_unrank(*r, n);
        match outcome {
            Ok((rw, or)) if rw == or => {}
            Ok((rw, or)) => {
                mismatches += 1;
                println!("mismatch {g}: rewrite {rw} oracle {or}");
            }
            Err(e) => {
                mismatches += 1;
                println!("mismatch {g}: {e}");
            }
        }
    }
    let checked = results.len();
    println!("{}/{} match", checked - mismatches, checked);
    if is_coxeter && !a.circular && mismatches == 0 {
        println!("every distance equals the inversion count");
    }
    eprintln!("verified in {:.3}s", start.elapsed().as_secs_f64());
    if mismatches > 0 {
        return Err(compute(anyhow!("{mismatches} mismatches")));
    }
    Ok(())
}
