//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain error or failed check, 2 usage error.

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use screening_core::equilibrium::{
    self, canonical_strategy, default_strategy, HeuristicOptions, SearchMode, SeqSet, SolveOptions,
};
use screening_core::gameplay::{self, TiePolicy};
use screening_core::graph::{self, MisMode, Provenance, SenderGraph};
use screening_core::rate;
use screening_core::{Budgets, Honesty, Horizon, Model, SenderTypeId, SeqId};

use crate::modelfile::{self, ModelFileError};
use crate::report::{real, set, Format, Map, Node};

/// Screening-game solver.
#[derive(Debug, Parser)]
#[command(name = "screening", version, about)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Append wall-clock timing to reports (makes output nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Largest |X|^n that may be enumerated.
    #[arg(long, global = true, default_value_t = Budgets::default().enumeration)]
    pub enum_budget: usize,
    /// Largest vertex count of a sender graph.
    #[arg(long, global = true, default_value_t = Budgets::default().graph)]
    pub graph_budget: usize,
    /// Largest vertex count for exact independent sets.
    #[arg(long, global = true, default_value_t = Budgets::default().mis)]
    pub mis_budget: usize,
    /// Largest |X|^n for exhaustive questionnaire search.
    #[arg(long, global = true, default_value_t = Budgets::default().subset)]
    pub subset_budget: usize,
    /// Tied optimal questionnaires to report.
    #[arg(long, global = true, default_value_t = Budgets::default().report_cap)]
    pub report_cap: usize,
    /// Subcommand.
    #[command(subcommand)]
    pub command: Command,
}

/// Model and horizon shared by most subcommands.
#[derive(Debug, Args)]
pub struct Target {
    /// Model file path, or `example1`.
    #[arg(long)]
    pub model: String,
    /// Horizon (sequence length).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
}

/// Subcommands.
#[allow(missing_docs)]
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file and print its summary.
    Validate {
        /// Model file path, or `example1`.
        #[arg(long)]
        model: String,
        /// Print the canonical model file instead of a summary.
        #[arg(long)]
        canonical: bool,
    },
    /// Sender graphs and their independence numbers.
    Graph {
        #[command(flatten)]
        target: Target,
        /// Only this type's graph.
        #[arg(long = "type", conflicts_with = "union")]
        type_label: Option<String>,
        /// Only the union graph.
        #[arg(long)]
        union: bool,
        /// Print Graphviz DOT instead of statistics (union unless --type).
        #[arg(long)]
        export: bool,
        /// Independent set algorithm.
        #[arg(long, value_enum, default_value_t = MisChoice::Exact)]
        mis: MisChoice,
    },
    /// Receiver-optimal questionnaire.
    Solve {
        #[command(flatten)]
        target: Target,
        /// Search mode.
        #[arg(long, value_enum, default_value_t = ModeChoice::Exact)]
        mode: ModeChoice,
        /// Seed for heuristic search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Disable dead-member pruning.
        #[arg(long)]
        no_prune: bool,
    },
    /// Cross-check the receiver objective against simulated sender play.
    OracleCheck {
        #[command(flatten)]
        target: Target,
        /// Which image sets to check.
        #[arg(long, value_enum, default_value_t = StrategyChoice::All)]
        strategies: StrategyChoice,
        /// Number of sets for `--strategies random`.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Seed for `--strategies random`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Finite-horizon rate bounds.
    Bounds {
        #[command(flatten)]
        target: Target,
        /// Also solve for the equilibrium value.
        #[arg(long)]
        solve: bool,
        /// Print a table for horizons 1..=n instead of a report.
        #[arg(long)]
        plot_data: bool,
    },
    /// Independence-number growth and supermultiplicativity.
    Asymptotic {
        /// Model file path, or `example1`.
        #[arg(long)]
        model: String,
        /// Largest horizon.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        n_max: u32,
        /// Print a table instead of a report.
        #[arg(long)]
        plot_data: bool,
    },
    /// Play a receiver strategy against best-responding senders.
    Simulate {
        #[command(flatten)]
        target: Target,
        /// Strategy image; defaults to the exact equilibrium questionnaire.
        #[arg(long, num_args = 1.., value_delimiter = ';')]
        image: Vec<String>,
        /// Where reports outside the image map; defaults to the smallest member.
        #[arg(long)]
        fallback: Option<String>,
        /// Sender type; defaults to every type.
        #[arg(long = "type")]
        type_label: Option<String>,
        /// True sequence; defaults to every sequence.
        #[arg(long)]
        truth: Option<String>,
        /// Tie-breaking among equally good reports.
        #[arg(long, value_enum, default_value_t = TieChoice::Adversarial)]
        ties: TieChoice,
        /// Seed for `--ties random`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the built-in example model file.
    Example,
}

/// `--mis` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MisChoice {
    /// Branch and bound.
    Exact,
    /// Minimum-degree greedy.
    Greedy,
}

/// `--mode` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    /// Exhaustive search.
    Exact,
    /// Local search.
    Heuristic,
}

/// `--strategies` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyChoice {
    /// Every nonempty image set.
    All,
    /// `--samples` random image sets.
    Random,
}

/// `--ties` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieChoice {
    /// Prefer an outcome other than the truth.
    Adversarial,
    /// Smallest outcome.
    Lexicographic,
    /// Seeded uniform choice.
    Random,
}

/// Errors surfaced by a command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Model file problem.
    #[error(transparent)]
    ModelFile(#[from] ModelFileError),
    /// Domain error from the solver.
    #[error(transparent)]
    Core(#[from] screening_core::Error),
    /// Arguments parsed but are inconsistent.
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Process exit code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Text produced by a command and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Standard output.
    pub stdout: String,
    /// Exit code; nonzero when a check failed.
    pub status: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, status: 0 }
    }
}

impl Cli {
    fn budgets(&self) -> Budgets {
        Budgets {
            enumeration: self.enum_budget,
            graph: self.graph_budget,
            mis: self.mis_budget,
            subset: self.subset_budget,
            report_cap: self.report_cap,
        }
    }
}

/// Parses `args` (program name first), runs the command and prints the
/// result. Returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let line = command_line(&args);
    match execute(&cli, &line) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.status
        }
        Err(e) => {
            eprintln!("error: {e}");
            match &e {
                CliError::Core(screening_core::Error::SubsetBudget { .. }) => {
                    eprintln!("hint: use --mode heuristic or raise --subset-budget");
                }
                CliError::Core(
                    screening_core::Error::MisBudget { .. }
                    | screening_core::Error::GraphBudget { .. }
                    | screening_core::Error::EnumerationBudget { .. },
                ) => eprintln!("hint: lower --n or raise the matching --*-budget"),
                _ => {}
            }
            e.exit_code()
        }
    }
}

/// Arguments after the program name, joined by spaces.
pub fn command_line(args: &[OsString]) -> String {
    args.iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Runs a parsed command. `line` is echoed in reports.
pub fn execute(cli: &Cli, line: &str) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let budgets = cli.budgets();
    let finish = |body: Map, model: &Model, status: i32| {
        let mut head = Map::new()
            .field("command", line)
            .field("model_digest", modelfile::model_digest(model))
            .extend(body);
        if cli.timing {
            head.push("elapsed_ms", real(start.elapsed().as_secs_f64() * 1e3));
        }
        Outcome {
            stdout: head.render(cli.format),
            status,
        }
    };

    match &cli.command {
        Command::Example => Ok(Outcome::ok(modelfile::serialize_model(&Model::example1()))),
        Command::Validate { model, canonical } => {
            let model = modelfile::load_model(model)?;
            if *canonical {
                return Ok(Outcome::ok(modelfile::serialize_model(&model)));
            }
            Ok(finish(validate(&model), &model, 0))
        }
        Command::Graph {
            target,
            type_label,
            union,
            export,
            mis,
        } => {
            let model = modelfile::load_model(&target.model)?;
            let h = Horizon::new(&model, target.n as usize, budgets.enumeration)?;
            let graphs = select_graphs(&h, type_label.as_deref(), *union, *export, &budgets)?;
            if *export {
                return Ok(Outcome::ok(graph::export_dot(&graphs[0], &h)));
            }
            let body = graph_stats(&h, &graphs, *mis, &budgets)?;
            Ok(finish(body, &model, 0))
        }
        Command::Solve {
            target,
            mode,
            seed,
            no_prune,
        } => {
            let model = modelfile::load_model(&target.model)?;
            let h = Horizon::new(&model, target.n as usize, budgets.enumeration)?;
            let body = solve(&h, *mode, *seed, !*no_prune, &budgets)?;
            Ok(finish(body, &model, 0))
        }
        Command::OracleCheck {
            target,
            strategies,
            samples,
            seed,
        } => {
            let model = modelfile::load_model(&target.model)?;
            let h = Horizon::new(&model, target.n as usize, budgets.enumeration)?;
            let (body, ok) = oracle_check(&h, *strategies, *samples, *seed, &budgets)?;
            Ok(finish(body, &model, if ok { 0 } else { 1 }))
        }
        Command::Bounds {
            target,
            solve,
            plot_data,
        } => {
            let model = modelfile::load_model(&target.model)?;
            if *plot_data {
                return Ok(Outcome::ok(bounds_table(
                    &model,
                    target.n as usize,
                    *solve,
                    &budgets,
                )?));
            }
            let b = rate::finite_bounds(&model, target.n as usize, *solve, &budgets)?;
            let ok = b.sandwich_holds() != Some(false);
            Ok(finish(bounds(&model, &b), &model, if ok { 0 } else { 1 }))
        }
        Command::Asymptotic {
            model,
            n_max,
            plot_data,
        } => {
            let model = modelfile::load_model(model)?;
            let r = rate::asymptotic_bounds(&model, *n_max as usize, &budgets)?;
            if *plot_data {
                return Ok(Outcome::ok(asymptotic_table(&model, &r)));
            }
            let ok = r.fekete_witnesses.iter().all(|w| w.holds);
            Ok(finish(
                asymptotic(&model, &r),
                &model,
                if ok { 0 } else { 1 },
            ))
        }
        Command::Simulate {
            target,
            image,
            fallback,
            type_label,
            truth,
            ties,
            seed,
        } => {
            let model = modelfile::load_model(&target.model)?;
            let h = Horizon::new(&model, target.n as usize, budgets.enumeration)?;
            let policy = match ties {
                TieChoice::Adversarial => TiePolicy::Adversarial,
                TieChoice::Lexicographic => TiePolicy::Lexicographic,
                TieChoice::Random => TiePolicy::Random(*seed),
            };
            let body = simulate(
                &h,
                image,
                fallback.as_deref(),
                type_label.as_deref(),
                truth.as_deref(),
                policy,
                &budgets,
            )?;
            Ok(finish(body, &model, 0))
        }
    }
}

fn parse_seq(h: &Horizon<'_>, text: &str) -> Result<SeqId, CliError> {
    let seq = h.model().parse_sequence(text)?;
    Ok(h.id_of(&seq)?)
}

fn validate(model: &Model) -> Map {
    let types: Vec<Node> = model
        .types()
        .map(|t| {
            Map::new()
                .field("label", model.type_label(t))
                .field("prior", model.prior(t))
                .field("honest", matches!(model.classify_type(t), Honesty::Honest))
                .into()
        })
        .collect();
    Map::new()
        .field("status", "valid")
        .field("alphabet", model.alphabet().to_vec())
        .field("types", types)
}

fn select_graphs(
    h: &Horizon<'_>,
    type_label: Option<&str>,
    union: bool,
    export: bool,
    budgets: &Budgets,
) -> Result<Vec<SenderGraph>, CliError> {
    if let Some(label) = type_label {
        let t = h.model().type_by_label(label)?;
        return Ok(vec![graph::build_sender_graph(h, t, budgets.graph)?]);
    }
    let (mut graphs, u) = graph::type_graphs_and_union(h, budgets.graph)?;
    if union || export {
        return Ok(vec![u]);
    }
    graphs.push(u);
    Ok(graphs)
}

fn graph_stats(
    h: &Horizon<'_>,
    graphs: &[SenderGraph],
    mis: MisChoice,
    budgets: &Budgets,
) -> Result<Map, CliError> {
    let mut list = Vec::new();
    for g in graphs {
        let name = match g.provenance() {
            Provenance::Type(t) => h.model().type_label(t).to_string(),
            Provenance::Union => "union".to_string(),
        };
        let mode = match mis {
            MisChoice::Exact if g.vertex_count() <= budgets.mis => MisMode::Exact,
            _ => MisMode::Greedy,
        };
        let r = graph::max_independent_set(g, mode, budgets.mis)?;
        let witness: SeqSet = r.members.iter().copied().collect();
        list.push(Node::from(
            Map::new()
                .field("graph", name)
                .field("vertices", g.vertex_count())
                .field("edges", g.edge_count())
                .field("independence_number", r.size)
                .field("certified", r.certified)
                .field("witness", set(h, &witness))
                .field("search_nodes", r.nodes),
        ));
    }
    Ok(Map::new().field("n", h.n()).field("graphs", list))
}

fn solve(
    h: &Horizon<'_>,
    mode: ModeChoice,
    seed: u64,
    prune: bool,
    budgets: &Budgets,
) -> Result<Map, CliError> {
    let result = match mode {
        ModeChoice::Exact => equilibrium::solve_exact(
            h,
            &SolveOptions {
                prune,
                subset_budget: budgets.subset,
                report_cap: budgets.report_cap,
                ..SolveOptions::default()
            },
        )?,
        ModeChoice::Heuristic => {
            equilibrium::solve_heuristic(h, seed, &HeuristicOptions::default())?
        }
    };
    let model = h.model();
    let q = equilibrium::Questionnaire::new(h, result.questionnaire().clone())?;
    let strategy = result.strategy(h)?;
    let mut partitions = Map::new();
    for t in model.types() {
        partitions.push(model.type_label(t), set(h, &q.partitions[t.0]));
    }
    let maximizers: Vec<String> = result.maximizers.iter().map(|m| set(h, m)).collect();
    let validated = match result.stats.pruning_validated {
        None => "not run".to_string(),
        Some(v) => v.to_string(),
    };
    Ok(Map::new()
        .field("n", h.n())
        .field(
            "mode",
            match result.mode {
                SearchMode::Exact => "exact",
                SearchMode::Heuristic => "heuristic",
            },
        )
        .field("certified", result.mode == SearchMode::Exact)
        .field("optimum", result.optimum)
        .field("rate", real(rate::rate(result.optimum, h.n())))
        .field("questionnaire", set(h, result.questionnaire()))
        .field("fallback", h.label(strategy.fallback()))
        .field("partitions", partitions)
        .field("maximizers", maximizers)
        .field("maximizers_truncated", result.truncated)
        .field(
            "stats",
            Map::new()
                .field("examined", result.stats.examined)
                .field("pruned", result.stats.pruned)
                .field("pruning_validated", validated),
        ))
}

fn image_sets(
    h: &Horizon<'_>,
    strategies: StrategyChoice,
    samples: usize,
    seed: u64,
    budgets: &Budgets,
) -> Result<Vec<SeqSet>, CliError> {
    let count = h.len();
    match strategies {
        StrategyChoice::All => {
            if count > budgets.subset {
                return Err(screening_core::Error::SubsetBudget {
                    sequences: count,
                    budget: budgets.subset,
                }
                .into());
            }
            Ok((1u64..1 << count)
                .map(|mask| {
                    (0..count)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(SeqId)
                        .collect()
                })
                .collect())
        }
        StrategyChoice::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(samples);
            while out.len() < samples {
                let s: SeqSet = (0..count)
                    .filter(|_| rng.random_bool(0.5))
                    .map(SeqId)
                    .collect();
                if !s.is_empty() {
                    out.push(s);
                }
            }
            Ok(out)
        }
    }
}

fn oracle_check(
    h: &Horizon<'_>,
    strategies: StrategyChoice,
    samples: usize,
    seed: u64,
    budgets: &Budgets,
) -> Result<(Map, bool), CliError> {
    let sets = image_sets(h, strategies, samples, seed, budgets)?;
    let types = h.model().type_count();
    let mut mismatches = Vec::new();
    let mut best: Option<equilibrium::Questionnaire> = None;
    for members in &sets {
        let q = equilibrium::Questionnaire::new(h, members.clone())?;
        let fallbacks = [*members.first().unwrap(), *members.last().unwrap()];
        for (i, &fb) in fallbacks.iter().enumerate() {
            if i == 1 && fallbacks[0] == fallbacks[1] {
                break;
            }
            let g = canonical_strategy(h, members.clone(), fb)?;
            let played = gameplay::dstar(h, &g)?;
            if played != q.objective {
                mismatches.push(Node::from(
                    Map::new()
                        .field("image", set(h, members))
                        .field("fallback", h.label(fb))
                        .field("objective", q.objective)
                        .field("dstar", played),
                ));
            }
        }
        if best.as_ref().is_none_or(|b| q.objective > b.objective) {
            best = Some(q);
        }
    }
    let ok = mismatches.is_empty();
    let verdict = if ok { "verified" } else { "FAILED" };
    let mut body = Map::new()
        .field("n", h.n())
        .field(
            "play_matches_objective",
            format!("{verdict}, {} image sets × {types} types", sets.len()),
        )
        .field("mismatches", mismatches);
    let mut all_ok = ok;
    if strategies == StrategyChoice::All {
        let best = best.expect("at least one image set");
        let exact = equilibrium::solve_exact(
            h,
            &SolveOptions {
                subset_budget: budgets.subset,
                report_cap: budgets.report_cap,
                ..SolveOptions::default()
            },
        )?;
        let agree = exact.optimum == best.objective;
        all_ok &= agree;
        body.push(
            "search_matches_enumeration",
            format!(
                "{}, max over {} sets = {}, solver optimum = {}",
                if agree { "verified" } else { "FAILED" },
                sets.len(),
                best.objective,
                exact.optimum
            ),
        );
    }
    Ok((body, all_ok))
}

fn bounds(model: &Model, b: &rate::RateBounds) -> Map {
    let mut alphas = Map::new();
    for (t, a) in model.types().zip(&b.type_alphas) {
        alphas.push(model.type_label(t), *a);
    }
    let mut body = Map::new().field("n", b.n).field(
        "lower",
        Map::new()
            .field("union_independence_number", b.union_alpha)
            .field("rate", real(b.lower))
            .field("certified", b.lower_certified),
    );
    if let (Some(v), Some(r)) = (b.achieved_value, b.achieved) {
        body.push(
            "achieved",
            Map::new()
                .field("value", v)
                .field("rate", real(r))
                .field("certified", b.achieved_certified),
        );
    }
    body.push(
        "upper",
        Map::new()
            .field("value", b.upper_value)
            .field("rate", real(b.upper))
            .field("certified", b.upper_certified),
    );
    body.push("type_independence_numbers", alphas);
    let sandwich = match b.sandwich_holds() {
        None => "not checked",
        Some(true) => "holds",
        Some(false) => "VIOLATED",
    };
    body.field("sandwich", sandwich)
}

fn bounds_table(
    model: &Model,
    n_max: usize,
    solve: bool,
    budgets: &Budgets,
) -> Result<String, CliError> {
    let mut out = String::from("n\tlower\tachieved\tupper\n");
    for n in 1..=n_max {
        let b = rate::finite_bounds(model, n, solve, budgets)?;
        let achieved = b.achieved.map_or_else(|| "-".to_string(), real);
        out.push_str(&format!(
            "{n}\t{}\t{achieved}\t{}\n",
            real(b.lower),
            real(b.upper)
        ));
    }
    Ok(out)
}

fn asymptotic(model: &Model, r: &rate::AsymptoticReport) -> Map {
    let mut alphas = Map::new();
    for t in model.types() {
        alphas.push(model.type_label(t), r.alphas[t.0].clone());
    }
    let estimates: Vec<String> = r.xi_estimates.iter().map(|&x| real(x)).collect();
    let witnesses: Vec<Node> = r
        .fekete_witnesses
        .iter()
        .map(|w| {
            Map::new()
                .field("m", w.m)
                .field("n", w.n)
                .field(
                    "check",
                    format!("{} >= {} * {}", w.alpha_sum, w.alpha_m, w.alpha_n),
                )
                .field("holds", w.holds)
                .into()
        })
        .collect();
    Map::new()
        .field("lambda_star", model.type_label(r.lambda_star))
        .field("independence_numbers", alphas)
        .field("xi_estimates", estimates)
        .field("xi_lower", real(r.xi_lower))
        .field("union_floor", r.union_floor)
        .field("supermultiplicativity", witnesses)
}

fn asymptotic_table(model: &Model, r: &rate::AsymptoticReport) -> String {
    let mut out = String::from("n\txi_estimate");
    for t in model.types() {
        out.push_str(&format!("\talpha_{}", model.type_label(t)));
    }
    out.push('\n');
    for (k, xi) in r.xi_estimates.iter().enumerate() {
        out.push_str(&format!("{}\t{}", k + 1, real(*xi)));
        for t in model.types() {
            out.push_str(&format!("\t{}", r.alphas[t.0][k]));
        }
        out.push('\n');
    }
    out
}

fn simulate(
    h: &Horizon<'_>,
    image: &[String],
    fallback: Option<&str>,
    type_label: Option<&str>,
    truth: Option<&str>,
    policy: TiePolicy,
    budgets: &Budgets,
) -> Result<Map, CliError> {
    let model = h.model();
    let members: SeqSet = if image.is_empty() {
        if fallback.is_some() {
            return Err(CliError::Usage("--fallback requires --image".into()));
        }
        let options = SolveOptions {
            subset_budget: budgets.subset,
            report_cap: budgets.report_cap,
            ..SolveOptions::default()
        };
        equilibrium::solve_exact(h, &options)?
            .questionnaire()
            .clone()
    } else {
        image
            .iter()
            .map(|s| parse_seq(h, s))
            .collect::<Result<_, _>>()?
    };
    let g = match fallback {
        Some(f) => canonical_strategy(h, members, parse_seq(h, f)?)?,
        None => default_strategy(h, members)?,
    };
    let types: Vec<SenderTypeId> = match type_label {
        Some(l) => vec![model.type_by_label(l)?],
        None => model.types().collect(),
    };
    let truths: Vec<SeqId> = match truth {
        Some(t) => vec![parse_seq(h, t)?],
        None => h.ids().collect(),
    };

    let report = gameplay::recovery_report(h, &g)?;
    let mut per_type = Vec::new();
    for &t in &types {
        let rec = &report.per_type[t.0];
        let optimistic = gameplay::optimistic_recovery_set(h, &g, t)?;
        let mut sessions = Vec::new();
        let mut recovered = 0usize;
        for &x in &truths {
            let s = gameplay::simulate(h, &g, t, x, policy)?;
            recovered += usize::from(s.recovered);
            sessions.push(Node::from(
                Map::new()
                    .field("truth", h.label(s.truth))
                    .field("reported", h.label(s.reported))
                    .field("decoded", h.label(s.decoded))
                    .field("recovered", s.recovered),
            ));
        }
        per_type.push(Node::from(
            Map::new()
                .field("type", model.type_label(t))
                .field("robust_recovery", set(h, &rec.robust))
                .field("robust_count", rec.robust.len())
                .field("optimistic_recovery_diagnostic", set(h, &optimistic))
                .field(
                    "best_response_count",
                    rec.best_responses
                        .map_or_else(|| "overflow".to_string(), |c| c.to_string()),
                )
                .field(
                    "sessions_recovered",
                    format!("{recovered}/{}", truths.len()),
                )
                .field("sessions", sessions),
        ));
    }
    Ok(Map::new()
        .field("n", h.n())
        .field(
            "strategy",
            Map::new()
                .field("image", set(h, g.image()))
                .field("fallback", h.label(g.fallback())),
        )
        .field("ties", format!("{policy:?}").to_lowercase())
        .field("dstar", report.dstar)
        .field("types", per_type))
}
