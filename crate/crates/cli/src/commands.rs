use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use fringe_core::constants::{self, reference, ConstantsReport};
use fringe_core::dag::{dag_sizes, minimal_dag, unordered_minimal_dag};
use fringe_core::exact;
use fringe_core::experiment::{
    clt_sample, concentration::admissible_range, concentration_check, export, run_count_experiment,
    write_export, CltStatistic, CutPointRule, ExperimentConfig, ExportFormat, Exportable,
};
use fringe_core::format::{fmt_real, round_sig};
use fringe_core::random::{pbst_neg_log2, sample};
use fringe_core::text::{format_tree, parse_tree, read_framed, write_framed};
use fringe_core::{ClassFilter, ModelKind, Seed, Tree};
use serde_json::json;

use crate::args::*;

/// A failure carrying its exit code: 2 for bad parameters, 1 otherwise.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<fringe_core::Error> for Failure {
    fn from(e: fringe_core::Error) -> Self {
        use fringe_core::Error::*;
        match e {
            InvalidParameter(_) | OutOfRange { .. } | Budget(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(format!("writing output: {e}"))
    }
}

type Outcome = Result<(), Failure>;

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Uniform => ModelKind::Uniform,
            Model::Bst => ModelKind::Bst,
        }
    }
}

impl From<Statistic> for CltStatistic {
    fn from(s: Statistic) -> Self {
        match s {
            Statistic::Log2AutUniform => CltStatistic::Log2AutUniform,
            Statistic::Log2BstWeight => CltStatistic::Log2BstWeight,
            Statistic::SymBst => CltStatistic::SymBst,
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Generate(args) => generate(&args, out),
        Command::Compress(args) => compress(&args, out),
        Command::Stats(StatsCommand::Exact { n }) => stats_exact(n, out),
        Command::Stats(StatsCommand::Tree(input)) => stats_tree(&input, out),
        Command::Constants(args) => constants(&args, out),
        Command::Experiment(args) => experiment(&args, out),
    }
}

fn generate(args: &GenerateArgs, out: &mut dyn Write) -> Outcome {
    let seed = Seed(args.seed);
    for i in 0..args.count {
        let t = sample(args.model.into(), args.n, &mut seed.stream(i))?;
        if args.binary {
            write_framed(&t, &mut *out)?;
        } else {
            writeln!(out, "{}", format_tree(&t))?;
        }
    }
    Ok(())
}

/// Trees of an input file, in file order.
struct TreeReader<'a> {
    path: &'a Path,
    reader: BufReader<File>,
    binary: bool,
    /// Line number (text) or record index (binary) of the last tree read.
    position: usize,
    line: String,
}

impl<'a> TreeReader<'a> {
    fn open(input: &'a InputArgs) -> Result<Self, Failure> {
        let path = input.input.as_path();
        let file =
            File::open(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        Ok(TreeReader {
            path,
            reader: BufReader::new(file),
            binary: input.binary,
            position: 0,
            line: String::new(),
        })
    }

    fn next_tree(&mut self) -> Result<Option<Tree>, Failure> {
        let path = self.path.display();
        if self.binary {
            let t = read_framed(&mut self.reader)
                .map_err(|e| Failure::Runtime(format!("{path}: record {}: {e}", self.position)))?;
            self.position += 1;
            return Ok(t);
        }
        loop {
            self.line.clear();
            let read = self
                .reader
                .read_line(&mut self.line)
                .map_err(|e| Failure::Runtime(format!("{path}: {e}")))?;
            if read == 0 {
                return Ok(None);
            }
            self.position += 1;
            let text = self.line.trim_end_matches(['\n', '\r']);
            if text.trim().is_empty() {
                continue;
            }
            return parse_tree(text)
                .map(Some)
                .map_err(|e| Failure::Runtime(format!("{path}:{}: {e}", self.position)));
        }
    }
}

fn compress(args: &CompressArgs, out: &mut dyn Write) -> Outcome {
    let mut trees = TreeReader::open(&args.input)?;
    if args.format == CompressFormat::Summary {
        let header = match args.mode {
            Mode::Ordered => "n,ordered_count",
            Mode::Unordered => "n,unordered_count",
            Mode::Both => "n,ordered_count,unordered_count",
        };
        writeln!(out, "{header}")?;
    }
    while let Some(t) = trees.next_tree()? {
        let n = t.leaf_count();
        match args.format {
            CompressFormat::Summary => {
                let sizes = dag_sizes(&t);
                match args.mode {
                    Mode::Ordered => writeln!(out, "{n},{}", sizes.ordered)?,
                    Mode::Unordered => writeln!(out, "{n},{}", sizes.unordered)?,
                    Mode::Both => writeln!(out, "{n},{},{}", sizes.ordered, sizes.unordered)?,
                }
            }
            CompressFormat::DagJson => {
                let value = match args.mode {
                    Mode::Ordered => json!(minimal_dag(&t).to_json()),
                    Mode::Unordered => json!(unordered_minimal_dag(&t).to_json()),
                    Mode::Both => json!({
                        "ordered": minimal_dag(&t).to_json(),
                        "unordered": unordered_minimal_dag(&t).to_json(),
                    }),
                };
                serde_json::to_writer(&mut *out, &value).map_err(io::Error::from)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn stats_exact(n: u64, out: &mut dyn Write) -> Outcome {
    writeln!(
        out,
        "k,trees,unordered_classes,expected_occurrences_uniform,variance_occurrences_uniform,\
         expected_identical_pairs_uniform,expected_occurrences_bst"
    )?;
    let catalan = exact::catalan_table(n);
    let wedderburn = exact::wedderburn_etherington_table(n);
    for k in 1..=n {
        let trees = &catalan[k as usize - 1];
        writeln!(
            out,
            "{k},{trees},{},{},{},{},{}",
            wedderburn[k as usize],
            exact::expected_occurrences_uniform(n, k, trees)?,
            exact::variance_occurrences_uniform(n, k, trees)?,
            exact::expected_identical_pairs_uniform(n, k)?,
            exact::expected_z_bst(n, k)?,
        )?;
    }
    Ok(())
}

fn stats_tree(input: &InputArgs, out: &mut dyn Write) -> Outcome {
    let mut trees = TreeReader::open(input)?;
    writeln!(
        out,
        "leaves,sym,aut_log2,class_size_log2,pbst_neg_log2,ordered_count,unordered_count"
    )?;
    while let Some(t) = trees.next_tree()? {
        let s = t.stats();
        let sizes = dag_sizes(&t);
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.leaves,
            s.sym,
            s.aut_log2,
            s.class_size_log2,
            fmt_real(pbst_neg_log2(&t)),
            sizes.ordered,
            sizes.unordered
        )?;
    }
    Ok(())
}

fn constants_json(report: &ConstantsReport, digits: usize) -> serde_json::Value {
    let r = |x: f64| round_sig(x, digits);
    let pair = |value: f64, reference: f64| json!({ "value": r(value), "reference": reference });
    let d = &report.derived;
    json!({
        "gamma": { "value": r(report.gamma), "reference": reference::GAMMA, "source": "input" },
        "mu": {
            "value": r(report.mu.value),
            "tail_bound": r(report.mu.tail_bound),
            "partial_sum": r(report.mu.partial_sum),
            "terms": report.mu.terms,
            "reference": reference::MU,
        },
        "nu": {
            "value": r(report.nu.value),
            "tail_bound": r(report.nu.tail_bound),
            "partial_sum": r(report.nu.partial_sum),
            "terms": report.nu.terms,
            "reference": reference::NU,
        },
        "b": {
            "value": r(report.b.value),
            "error_estimate": r(report.b.error_estimate),
            "ratio": r(report.b.ratio),
            "terms": report.b.terms,
            "reference": reference::B,
        },
        "derived": {
            "c": pair(d.c, reference::C),
            "c1": pair(d.c1, reference::C1),
            "c2": pair(d.c2, reference::C2),
            "c3": pair(d.c3, reference::C3),
            "c4": pair(d.c4, reference::C4),
            "c5": pair(d.c5, reference::C5),
            "c6": pair(d.c6, reference::C6),
        },
    })
}

fn constants(args: &ConstantsArgs, out: &mut dyn Write) -> Outcome {
    let report = constants::constants_report(reference::GAMMA)?;
    let value = constants_json(&report, usize::from(args.precision));
    serde_json::to_writer_pretty(&mut *out, &value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn config(args: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::new(args.model.into(), args.n, args.trials, Seed(args.seed));
    cfg.epsilon = args.epsilon;
    cfg.delta = args.delta;
    cfg.cut_point_rule = args.cut_point.parse::<CutPointRule>()?;
    cfg.slack = args.slack;
    cfg.budget = args.budget;
    cfg.validate()?;
    Ok(cfg)
}

fn emit<T: Exportable>(item: &T, args: &ExperimentArgs, out: &mut dyn Write) -> Outcome {
    let format = match args.format {
        Format::Csv => ExportFormat::Csv,
        Format::Json => ExportFormat::Json,
    };
    match &args.out {
        Some(path) => export(item, path, format)?,
        None => write_export(item, &mut *out, format, Path::new("<stdout>"))?,
    }
    Ok(())
}

fn experiment(args: &ExperimentArgs, out: &mut dyn Write) -> Outcome {
    match args.kind {
        Kind::Counts => emit(&run_count_experiment(&config(args)?)?, args, out),
        Kind::Concentration => {
            let cfg = config(args)?;
            let (lo, hi) = admissible_range(&cfg).ok_or_else(|| {
                Failure::Usage(format!(
                    "no admissible size k with {} ln n <= k <= n^epsilon at n = {}; \
                     lower --cut-point or raise --epsilon",
                    fmt_real(cfg.cut_point_rule.coefficient()),
                    cfg.n
                ))
            })?;
            let range = args.k_min.unwrap_or(lo)..=args.k_max.unwrap_or(hi);
            let (gamma, mu, nu) = (reference::GAMMA, reference::MU, reference::NU);
            let report = match args.filter {
                FilterKind::All => concentration_check(&cfg, range, ClassFilter::all)?,
                FilterKind::HighAut => {
                    concentration_check(&cfg, range, |k| ClassFilter::high_automorphism(k, gamma))?
                }
                FilterKind::LowBst => {
                    concentration_check(&cfg, range, |k| ClassFilter::low_bst_probability(k, mu))?
                }
                FilterKind::BstIso => concentration_check(&cfg, range, |k| {
                    ClassFilter::bst_isomorphism_class(k, mu, nu)
                })?,
            };
            emit(&report, args, out)
        }
        Kind::Clt => {
            let statistic = match (args.statistic, args.model) {
                (Some(s), _) => s.into(),
                (None, Model::Uniform) => CltStatistic::Log2AutUniform,
                (None, Model::Bst) => CltStatistic::Log2BstWeight,
            };
            emit(
                &clt_sample(statistic, args.n, args.trials, Seed(args.seed))?,
                args,
                out,
            )
        }
    }
}
