use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ct_core::antonyms;
use ct_core::compare::{compare, CompareParams, NormalizationRulesView};
use ct_core::layout::{fruchterman_reingold, FrParams, HighlightSet};
use ct_core::neighbors::{knn_graph, DataMatrix, ReductionParams, Symmetrize, Variant};
use ct_core::ranges::equipartition;
use ct_core::stats::{
    corpus_summary, frequent_items, occurrence_histogram, term_frequencies, zipf_profile_with,
    CorpusSummary, ZipfConfig,
};
use ct_core::syngen::{gen_uniform_corpus, GeneratorSpec};
use ct_core::{build_matrix, load_corpus, Corpus, CorpusFormat, Error, Language, NormalizationRules};

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_ANALYSIS: u8 = 4;

/// Structural fingerprints of text corpora.
#[derive(Parser)]
#[command(name = "ct", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "CT_SEED", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a corpus and print its term-document matrix as TSV.
    Ingest {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Write matrix.tsv here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Corpus summary, frequent items and frequency histogram.
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// List items with at least this frequency.
        #[arg(long)]
        sf: Option<u64>,
        /// Count items per exact frequency in lo:hi.
        #[arg(long, value_parser = parse_range)]
        range: Option<(u64, u64)>,
    },
    /// Rank-frequency profile and its log-log fit.
    Zipf {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Fit only the first N ranks.
        #[arg(long)]
        top: Option<usize>,
        /// Write zipf.svg here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split the frequency axis into ranges of equal context mass.
    Ranges {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// First seed range, starting at 2.
        #[arg(long, value_parser = parse_range, default_value = "2:2")]
        first: (u64, u64),
        /// Second seed range, adjacent to the first.
        #[arg(long, value_parser = parse_range, default_value = "3:3")]
        second: (u64, u64),
    },
    /// Reduced co-occurrence graph statistics and edge list.
    Knn {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        reduction: ReductionArgs,
        /// Write edges.tsv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Force-directed drawing of the reduced graph.
    Layout {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        reduction: ReductionArgs,
        #[command(flatten)]
        drawing: DrawingArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Ranked antonym candidates from template matches.
    Antonyms {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Generate a uniform random corpus.
    Gen {
        #[arg(long, default_value_t = 1000)]
        lexicon_size: usize,
        #[arg(long, default_value_t = 6000)]
        docs: usize,
        #[arg(long, default_value_t = 150)]
        words: usize,
        /// Output file (jsonl) or directory (txt-dir).
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "jsonl")]
        format: CorpusFormatArg,
    },
    /// Analyze two corpora with identical parameters.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        format: Option<CorpusFormatArg>,
        #[arg(long, default_value = "en")]
        lang: Language,
        #[arg(long)]
        stem: bool,
        #[arg(long)]
        no_stopwords: bool,
        #[command(flatten)]
        reduction: ReductionArgs,
        #[command(flatten)]
        drawing: DrawingArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy)]
struct CorpusFormatArg(CorpusFormat);

impl std::str::FromStr for CorpusFormatArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.parse().map(CorpusFormatArg)
    }
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus directory (txt-dir) or file (jsonl).
    path: PathBuf,
    /// txt-dir or jsonl; inferred from the path when omitted.
    #[arg(long)]
    format: Option<CorpusFormatArg>,
    #[arg(long, default_value = "en")]
    lang: Language,
    /// Porter-stem English tokens.
    #[arg(long)]
    stem: bool,
    /// Keep stopwords.
    #[arg(long)]
    no_stopwords: bool,
}

impl CorpusArgs {
    fn load(&self) -> Result<Corpus, Error> {
        read_corpus(&self.path, self.format, self.lang)
    }

    fn rules(&self) -> NormalizationRules {
        rules(self.stem, self.no_stopwords)
    }
}

#[derive(Args)]
struct ReductionArgs {
    /// Lowest row sum kept.
    #[arg(long, default_value_t = 2.0)]
    min: f64,
    /// Highest row sum kept (`inf` for no limit).
    #[arg(long, default_value_t = 20.0)]
    max: f64,
    #[arg(long, default_value_t = 5.0)]
    beta: f64,
    /// Threshold `TD - beta * mean > 0` instead of the real-valued band.
    #[arg(long)]
    binary: bool,
    /// fr or drl.
    #[arg(long, default_value = "fr")]
    variant: Variant,
    /// or: link when either row keeps the pair; and: only when both do.
    #[arg(long, default_value = "or")]
    symmetrize: Symmetrize,
    /// Drop nodes with fewer links.
    #[arg(long)]
    min_degree: Option<usize>,
}

impl ReductionArgs {
    fn params(&self) -> ReductionParams {
        ReductionParams {
            beta: self.beta,
            min_freq: self.min,
            max_freq: self.max,
            binary: self.binary,
            variant: self.variant,
            symmetrize: self.symmetrize,
        }
    }
}

#[derive(Args)]
struct DrawingArgs {
    #[arg(long, default_value_t = 500)]
    iterations: usize,
    /// File with one term per line, drawn in red.
    #[arg(long)]
    highlight: Option<PathBuf>,
}

impl DrawingArgs {
    fn highlights(&self) -> Result<HighlightSet, Error> {
        match &self.highlight {
            Some(p) => HighlightSet::from_file(p),
            None => Ok(HighlightSet::default()),
        }
    }
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: u64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if hi < lo {
        return Err(format!("upper bound {hi} is below lower bound {lo}"));
    }
    Ok((lo, hi))
}

fn rules(stem: bool, no_stopwords: bool) -> NormalizationRules {
    NormalizationRules {
        stemming: stem,
        stopword_removal: !no_stopwords,
        ..NormalizationRules::default()
    }
}

fn read_corpus(path: &Path, format: Option<CorpusFormatArg>, lang: Language) -> Result<Corpus, Error> {
    let format = format.map_or_else(|| CorpusFormat::infer(path), |f| f.0);
    load_corpus(path, format, lang)
}

enum Failure {
    Usage(String),
    Core(Error),
    Io(PathBuf, io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Io(path.to_path_buf(), e)
}

fn stdout_err(e: io::Error) -> Failure {
    Failure::Io(PathBuf::from("<stdout>"), e)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(io_at(dir))
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let file = fs::File::create(path).map_err(io_at(path))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(io_at(path))
}

fn check_reduction(r: &ReductionArgs) -> Result<ReductionParams, Failure> {
    let p = r.params();
    p.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(p)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Ingest { corpus, out: dir } => {
            let tdm = build_matrix(&corpus.load()?, &corpus.rules())?;
            match dir {
                Some(dir) => {
                    create_dir(&dir)?;
                    let path = dir.join("matrix.tsv");
                    write_file(&path, |w| tdm.write_tsv(w))?;
                }
                None => tdm.write_tsv(&mut out).map_err(stdout_err)?,
            }
        }
        Command::Stats { corpus, sf, range } => {
            let c = corpus.load()?;
            let rules = corpus.rules();
            let summary = corpus_summary(&c, &rules)?;
            writeln!(out, "{}\n{}", CorpusSummary::TSV_HEADER, summary.tsv_row()).map_err(stdout_err)?;
            if sf.is_some() || range.is_some() {
                let tdm = build_matrix(&c, &rules)?;
                if let Some(s) = sf {
                    writeln!(out, "# frequent items (frequency >= {s})").map_err(stdout_err)?;
                    for (term, f) in frequent_items(&tdm, s)? {
                        writeln!(out, "{term}\t{f}").map_err(stdout_err)?;
                    }
                }
                if let Some((lo, hi)) = range {
                    writeln!(out, "# items per frequency in [{lo}, {hi}]").map_err(stdout_err)?;
                    for (f, n) in occurrence_histogram(&term_frequencies(&tdm)?, lo, hi)? {
                        writeln!(out, "{f}\t{n}").map_err(stdout_err)?;
                    }
                }
            }
        }
        Command::Zipf { corpus, top, out: dir } => {
            let tdm = build_matrix(&corpus.load()?, &corpus.rules())?;
            let config = match top {
                Some(n) => ZipfConfig::top(n),
                None => ZipfConfig::default(),
            };
            let profile = zipf_profile_with(&term_frequencies(&tdm)?, &config)?;
            writeln!(out, "# {}", profile.fit_line()).map_err(stdout_err)?;
            profile.write_tsv(&mut out).map_err(stdout_err)?;
            if let Some(dir) = dir {
                create_dir(&dir)?;
                let path = dir.join("zipf.svg");
                let title = corpus.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let svg = ct_core::svg::zipf_plot(&profile, &title);
                write_file(&path, |w| w.write_all(svg.as_bytes()))?;
            }
        }
        Command::Ranges { corpus, first, second } => {
            let tdm = build_matrix(&corpus.load()?, &corpus.rules())?;
            let partition = equipartition(&term_frequencies(&tdm)?, first, second)?;
            partition.write_tsv(&mut out).map_err(stdout_err)?;
        }
        Command::Knn { corpus, reduction, out: dir } => {
            let params = check_reduction(&reduction)?;
            let tdm = build_matrix(&corpus.load()?, &corpus.rules())?;
            let mut graph = knn_graph(&DataMatrix::from(&tdm), &params)?;
            if let Some(k) = reduction.min_degree {
                graph = graph.filter_min_degree(k)?;
            }
            let stats = graph.stats();
            writeln!(out, "{}\n{}", ct_core::neighbors::GraphStats::TSV_HEADER, stats.tsv_row()).map_err(stdout_err)?;
            if let Some(dir) = dir {
                create_dir(&dir)?;
                let path = dir.join("edges.tsv");
                write_file(&path, |w| graph.write_edges_tsv(w))?;
            }
        }
        Command::Layout { corpus, reduction, drawing, out: dir } => {
            let params = check_reduction(&reduction)?;
            let highlights = drawing.highlights()?;
            let tdm = build_matrix(&corpus.load()?, &corpus.rules())?;
            let mut graph = knn_graph(&DataMatrix::from(&tdm), &params)?;
            if let Some(k) = reduction.min_degree {
                graph = graph.filter_min_degree(k)?;
            }
            let fr = FrParams {
                seed: cli.seed,
                iterations: drawing.iterations,
                ..FrParams::default()
            };
            let layout = fruchterman_reingold(&graph, &fr)?;
            create_dir(&dir)?;
            write_file(&dir.join("coords.tsv"), |w| layout.write_tsv(w))?;
            write_file(&dir.join("edges.tsv"), |w| graph.write_edges_tsv(w))?;
            let caption = ct_core::svg::caption(&graph.stats());
            let svg = ct_core::svg::network(&layout, Some(&graph), &highlights, &caption);
            write_file(&dir.join("graph.svg"), |w| w.write_all(svg.as_bytes()))?;
            writeln!(out, "{}\n{}", ct_core::neighbors::GraphStats::TSV_HEADER, graph.stats().tsv_row()).map_err(stdout_err)?;
        }
        Command::Antonyms { corpus } => {
            let c = corpus.load()?;
            let patterns = antonyms::patterns_for(corpus.lang);
            let ranked = antonyms::rank_candidates(antonyms::extract_candidates(&c, &patterns));
            antonyms::write_tsv(&ranked, &mut out).map_err(stdout_err)?;
        }
        Command::Gen { lexicon_size, docs, words, out: path, format } => {
            let spec = GeneratorSpec::from_bundled(lexicon_size, docs, words, cli.seed)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let corpus = gen_uniform_corpus(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
            match format.0 {
                CorpusFormat::Jsonl => corpus.write_jsonl(&path)?,
                CorpusFormat::TxtDir => corpus.write_txt_dir(&path)?,
            }
        }
        Command::Compare { first, second, format, lang, stem, no_stopwords, reduction, drawing, out: dir } => {
            let params = check_reduction(&reduction)?;
            let highlights = drawing.highlights()?;
            let a = read_corpus(&first, format, lang)?;
            let b = read_corpus(&second, format, lang)?;
            let cp = CompareParams {
                rules: NormalizationRulesView {
                    stemming: stem,
                    stopword_removal: !no_stopwords,
                },
                reduction: params,
                layout: FrParams {
                    seed: cli.seed,
                    iterations: drawing.iterations,
                    ..FrParams::default()
                },
                min_degree: reduction.min_degree,
                ..CompareParams::default()
            };
            let report = compare(&a, &b, &cp)?;
            create_dir(&dir)?;
            let (name_a, name_b) = if a.name == b.name {
                (format!("{}-1", a.name), format!("{}-2", b.name))
            } else {
                (a.name.clone(), b.name.clone())
            };
            write_file(&dir.join("report.tsv"), |w| report.write_tsv(w))?;
            for (name, analysis) in [(&name_a, &report.a), (&name_b, &report.b)] {
                let svg = analysis.network_svg(&highlights);
                write_file(&dir.join(format!("{name}.svg")), |w| w.write_all(svg.as_bytes()))?;
            }
            report.write_tsv(&mut out).map_err(stdout_err)?;
        }
    }
    out.flush().map_err(stdout_err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("ct: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(path, e)) if e.kind() == io::ErrorKind::BrokenPipe && path.as_os_str() == "<stdout>" => {
            ExitCode::SUCCESS
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("ct: {}: {e}", path.display());
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Core(e)) => {
            eprintln!("ct: {e}");
            if e.is_input_error() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::from(EXIT_ANALYSIS)
            }
        }
    }
}
