//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ct_core::antonyms::{self, patterns_for};
use ct_core::datasets;
use ct_core::layout::{fruchterman_reingold, FrLayout, FrParams, HighlightSet};
use ct_core::neighbors::{cooccurrence, knn_graph, CooccurrenceGraph, DataMatrix, ReductionParams, Symmetrize, Variant};
use ct_core::ranges::{context_count, equipartition, partition_invariant};
use ct_core::stats::{hapax_fraction, term_frequencies, zipf_profile_with, FrequencyTable, ZipfClass, ZipfConfig};
use ct_core::syngen::{gen_uniform_corpus, GeneratorSpec};
use ct_core::{build_matrix, load_corpus, stem, Corpus, CorpusFormat, Error, Language, NormalizationRules};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(limit: Duration, started: Instant, mut o: Outcome) -> Outcome {
    let took = started.elapsed();
    if took > limit {
        o.pass = false;
    }
    o.detail = format!("{} [{:.2}s, limit {}s]", o.detail, took.as_secs_f64(), limit.as_secs());
    o
}

fn natural_corpus() -> Corpus {
    load_corpus(&datasets::natural_corpus_path(), CorpusFormat::Jsonl, Language::En).expect("bundled corpus loads")
}

fn sl_analog() -> Corpus {
    gen_uniform_corpus(&GeneratorSpec::from_bundled(1000, 6000, 150, 7).unwrap()).unwrap()
}

fn frequencies(corpus: &Corpus) -> FrequencyTable {
    term_frequencies(&build_matrix(corpus, &NormalizationRules::default()).unwrap()).unwrap()
}

// 1 ---------------------------------------------------------------------

struct IrisSetting {
    preprocessing: &'static str,
    variant: Variant,
    binary: bool,
    symmetrize: Symmetrize,
    beta: f64,
}

impl std::fmt::Display for IrisSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} rows, {}, binary={}, {}, beta={}",
            self.preprocessing, self.variant, self.binary as u8, self.symmetrize, self.beta
        )
    }
}

/// Two largest components cover 90% of the samples, one holds at least 45
/// setosa and at most 5 other samples, the other at most 5 setosa.
fn separates_setosa(graph: &CooccurrenceGraph, species: &[String]) -> bool {
    let comps = graph.connected_components();
    if comps.len() < 2 {
        return false;
    }
    let sample = |node: usize| -> usize {
        graph.nodes()[node].trim_start_matches("iris").parse::<usize>().unwrap() - 1
    };
    let count = |c: &Vec<usize>| {
        let setosa = c.iter().filter(|&&n| species[sample(n)] == "setosa").count();
        (setosa, c.len() - setosa)
    };
    let (a, b) = (count(&comps[0]), count(&comps[1]));
    let covered = comps[0].len() + comps[1].len();
    let split = |s: (usize, usize), o: (usize, usize)| s.0 >= 45 && s.1 <= 5 && o.0 <= 5;
    covered * 10 >= species.len() * 9 && (split(a, b) || split(b, a))
}

fn iris_separation() -> Outcome {
    let iris = datasets::iris().unwrap();
    let inputs = [("raw", iris.matrix.clone()), ("unit-length", iris.matrix.row_normalized())];
    let mut passing = Vec::new();
    let mut literal_passes = false;
    for (preprocessing, m) in &inputs {
        for variant in [Variant::Fr, Variant::Drl] {
            for binary in [false, true] {
                for symmetrize in [Symmetrize::Or, Symmetrize::And] {
                    for beta in [0.5, 1.0, 2.0, 3.0, 5.0] {
                        let p = ReductionParams {
                            beta,
                            min_freq: 1.0,
                            max_freq: f64::INFINITY,
                            binary,
                            variant,
                            symmetrize,
                        };
                        let Ok(g) = knn_graph(m, &p) else { continue };
                        if separates_setosa(&g, &iris.species) {
                            if *preprocessing == "raw" && !binary && symmetrize == Symmetrize::Or {
                                literal_passes = true;
                            }
                            passing.push(IrisSetting { preprocessing, variant, binary, symmetrize, beta });
                        }
                    }
                }
            }
        }
    }
    let default_note = if literal_passes {
        "raw counts with binary=0 and OR links separate"
    } else {
        "raw rows with binary=0 and OR links never separate"
    };
    match passing.first() {
        Some(s) => outcome(
            true,
            format!("{} of 80 settings separate, first: {s}; {default_note}", passing.len()),
        ),
        None => outcome(false, format!("no setting separates setosa; {default_note}")),
    }
}

// 2 ---------------------------------------------------------------------

fn random_corpus(seed: u64, lexicon: &[&str]) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_terms = rng.gen_range(1..=50);
    let n_docs = rng.gen_range(1..=20);
    let vocab: Vec<&str> = lexicon.choose_multiple(&mut rng, n_terms).copied().collect();
    let texts: Vec<(String, String)> = (0..n_docs)
        .map(|d| {
            let len = rng.gen_range(1..=30);
            let words: Vec<&str> = (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
            (format!("d{d}"), words.join(" "))
        })
        .collect();
    Corpus::from_texts(&format!("random{seed}"), Language::En, texts).unwrap()
}

fn cooccurrence_oracle() -> Outcome {
    let lexicon = datasets::lexicon();
    let rules = NormalizationRules::default();
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for seed in 1..=100 {
        let tdm = build_matrix(&random_corpus(seed, lexicon), &rules).unwrap();
        let m = DataMatrix::from(&tdm);
        let raw = cooccurrence(&m, Variant::Fr);
        let clipped = cooccurrence(&m, Variant::Drl);
        let terms = tdm.terms();
        for (i, a) in terms.iter().enumerate() {
            for (k, b) in terms.iter().enumerate() {
                let dense: u64 = tdm.doc_ids().iter().map(|d| tdm.get(a, d) * tdm.get(b, d)).sum();
                checked += 1;
                if raw.get(i, k) != dense as f64 || clipped.get(i, k) != (dense as f64).min(1.0) {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(mismatches == 0, format!("{checked} entries over 100 corpora, {mismatches} mismatches"))
}

// 3 ---------------------------------------------------------------------

fn beta_monotonicity() -> Outcome {
    let mut failures = Vec::new();
    for seed in 1..=20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = (rng.gen_range(5..=40), rng.gen_range(2..=20));
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| if rng.gen_bool(0.3) { rng.gen_range(1..6) as f64 } else { 0.0 }).collect())
            .collect();
        let names: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
        let matrix = DataMatrix::from_dense(names, &rows).unwrap();
        let edges = |beta: f64| -> usize {
            let p = ReductionParams {
                beta,
                min_freq: 1.0,
                max_freq: f64::INFINITY,
                binary: true,
                ..ReductionParams::default()
            };
            match knn_graph(&matrix, &p) {
                Ok(g) => g.n_edges(),
                Err(Error::EmptyGraph | Error::EmptyBand { .. }) => 0,
                Err(e) => panic!("{e}"),
            }
        };
        let counts: Vec<usize> = [0.0, 0.5, 1.0, 2.0, 5.0].iter().map(|&b| edges(b)).collect();
        let full = (0..n)
            .flat_map(|i| (i + 1..n).map(move |k| (i, k)))
            .filter(|&(i, k)| (0..m).any(|j| rows[i][j] > 0.0 && rows[k][j] > 0.0))
            .count();
        if counts.windows(2).any(|w| w[1] > w[0]) || counts[0] != full {
            failures.push(format!("seed {seed}: {counts:?} full={full}"));
        }
    }
    outcome(failures.is_empty(), if failures.is_empty() { "20 matrices monotone".to_string() } else { failures.join("; ") })
}

// 4, 5 ------------------------------------------------------------------

fn zipf_discrimination(natural: &FrequencyTable, sl: &FrequencyTable) -> Outcome {
    let nat = zipf_profile_with(natural, &ZipfConfig::default()).unwrap();
    let uni = zipf_profile_with(sl, &ZipfConfig::top(100)).unwrap();
    let pass = (-1.5..=-0.7).contains(&nat.slope)
        && nat.r2 >= 0.8
        && nat.classification == ZipfClass::Natural
        && uni.slope.abs() < 0.3
        && uni.classification == ZipfClass::Degenerate;
    outcome(
        pass,
        format!(
            "natural slope {:.3} r2 {:.3} {}; uniform top-100 slope {:.4} {}",
            nat.slope, nat.r2, nat.classification, uni.slope, uni.classification
        ),
    )
}

fn hapax_band(natural: &FrequencyTable, sl: &FrequencyTable) -> Outcome {
    let (h_nat, h_sl) = (hapax_fraction(natural).unwrap(), hapax_fraction(sl).unwrap());
    outcome(
        (0.35..=0.60).contains(&h_nat) && h_sl < 0.01,
        format!("natural {h_nat:.4}, uniform {h_sl:.4}"),
    )
}

// 6, 7 ------------------------------------------------------------------

fn equipartition_identity(natural: &FrequencyTable) -> Outcome {
    let example = FrequencyTable::from_pairs(
        [(2u64, 6usize), (3, 4), (4, 3), (6, 2)]
            .iter()
            .flat_map(|&(f, n)| (0..n).map(move |i| (format!("f{f}_{i}"), f))),
    );
    let p = equipartition(&example, (2, 2), (3, 3)).unwrap();
    let contexts: Vec<u64> = p.ranges.iter().map(|r| r.contexts).collect();
    let mut worst = partition_invariant(&p).rel_error;

    let mut partitions = 1;
    for seeds in [[(2, 2), (3, 3)], [(2, 3), (4, 6)], [(2, 5), (6, 12)]] {
        if let Ok(q) = equipartition(natural, seeds[0], seeds[1]) {
            worst = worst.max(partition_invariant(&q).rel_error);
            partitions += 1;
        }
    }
    for seed in 1..=50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = FrequencyTable::from_pairs((0..rng.gen_range(20..400)).map(|i| {
            let f = 2 + (rng.gen_range(0.0f64..1.0).powi(3) * 300.0) as u64;
            (format!("w{i}"), if i < 2 { 2 + i } else { f })
        }));
        if let Ok(q) = equipartition(&table, (2, 2), (3, 3)) {
            worst = worst.max(partition_invariant(&q).rel_error);
            partitions += 1;
        }
    }
    outcome(
        contexts == [12, 12, 12, 12] && worst == 0.0,
        format!("example contexts {contexts:?}; max relative error {worst} over {partitions} partitions"),
    )
}

fn context_counting() -> Outcome {
    let n = context_count([2, 2, 2]);
    outcome(n == 6, format!("three items of frequency 2 -> {n} contexts"))
}

// 8 ---------------------------------------------------------------------

const ENGLISH_ROWS: &[&str] = &[
    "(both) X and Y", "X as well as Y", "X and Y alike", "neither X nor Y", "(either) X or Y",
    "X rather than Y", "whether X or Y", "now X now Y", "from X to Y", "how X or Y", "more X than Y",
    "X is more ADJ than Y", "the difference between X and Y", "separating X and Y",
    "a gap between X and Y", "turning X into Y", "X gives way to Y", "X not Y", "X instead of Y",
    "X as opposed to Y", "the very X and the very Y", "either too X or too Y", "deeply X and deeply Y",
];

/// One matching phrase per French row.
const FRENCH_ROWS: &[&str] = &[
    "diurne ou nocturne",
    "soit constante, soit croissante",
    "à la fois offensives et défensives",
    "depuis les racines jusqu'aux feuilles",
    "ni implicitement ni explicitement",
    "aussi bien physiquement que mentalement",
    "parisiens comme provinciaux",
    "plus symbolique que réel",
    "entre exigences et besoins",
    "comprendre plutôt que juger",
];

fn pattern_coverage() -> Outcome {
    let en = antonyms::compile_patterns("en").unwrap();
    let fr = antonyms::compile_patterns("fr").unwrap();
    let en_templates: BTreeSet<&str> = en.iter().map(|p| p.template.as_str()).collect();
    let en_missing: Vec<&&str> = ENGLISH_ROWS.iter().filter(|r| !en_templates.contains(**r)).collect();
    let fr_missing: Vec<&&str> = FRENCH_ROWS
        .iter()
        .filter(|phrase| antonyms::extract_from_text("p", phrase, &fr).is_empty())
        .collect();

    let mut union = patterns_for(Language::En);
    union.extend(patterns_for(Language::Fr));
    let fixture = Corpus::from_texts(
        "fixture",
        Language::En,
        [
            ("en1", "They served both hot and cold water at the inn."),
            ("en2", "The old photograph was neither black nor white."),
            ("fr1", "Le texte le dit ni implicitement ni explicitement."),
            ("misc", "Nothing here. Rien ici."),
        ],
    )
    .unwrap();
    let found: Vec<(String, String)> = antonyms::rank_candidates(antonyms::extract_candidates(&fixture, &union))
        .into_iter()
        .map(|c| (c.x, c.y))
        .collect();
    let mut found_sorted = found.clone();
    found_sorted.sort();
    let expected: Vec<(String, String)> = [("black", "white"), ("cold", "hot"), ("explicitement", "implicitement")]
        .iter()
        .map(|&(x, y)| (x.to_string(), y.to_string()))
        .collect();
    let pass = en.len() >= 20 && en_missing.is_empty() && fr.len() >= 10 && fr_missing.is_empty() && found_sorted == expected;
    outcome(
        pass,
        format!(
            "en {} templates ({} rows missing), fr {} templates ({} rows unmatched), fixture pairs {:?}",
            en.len(),
            en_missing.len(),
            fr.len(),
            fr_missing.len(),
            found
        ),
    )
}

// 9 ---------------------------------------------------------------------

fn params_none() -> ReductionParams {
    ReductionParams::default()
}

fn two_triangles() -> CooccurrenceGraph {
    let names: Vec<String> = (0..6).map(|i| format!("n{i}")).collect();
    CooccurrenceGraph::from_edges(&names, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], params_none()).unwrap()
}

fn separated(coords: &[(f64, f64)]) -> bool {
    let centroid = |c: &[(f64, f64)]| {
        let n = c.len() as f64;
        (c.iter().map(|p| p.0).sum::<f64>() / n, c.iter().map(|p| p.1).sum::<f64>() / n)
    };
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let diameter = |c: &[(f64, f64)]| {
        let mut d: f64 = 0.0;
        for a in c {
            for b in c {
                d = d.max(dist(*a, *b));
            }
        }
        d
    };
    let (a, b) = coords.split_at(3);
    dist(centroid(a), centroid(b)) > 2.0 * diameter(a).max(diameter(b))
}

fn random_graph(seed: u64) -> CooccurrenceGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(10..=200);
    let p = (3.0 / n as f64).min(1.0);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1));
    }
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    CooccurrenceGraph::from_edges(&names, &edges, params_none()).unwrap()
}

fn layout_determinism_and_separation() -> Outcome {
    let g = two_triangles();
    let svgs: Vec<String> = (0..3)
        .map(|_| {
            let l = fruchterman_reingold(&g, &FrParams::seeded(42)).unwrap();
            ct_core::svg::network(&l, Some(&g), &HighlightSet::default(), &ct_core::svg::caption(&g.stats()))
        })
        .collect();
    let identical = svgs.windows(2).all(|w| w[0] == w[1]);

    let separated_seeds = (0..100u64)
        .filter(|&seed| separated(&fruchterman_reingold(&g, &FrParams::seeded(seed)).unwrap().coords))
        .count();

    let energy_drops = (0..100u64)
        .filter(|&seed| {
            let mut state = FrLayout::for_graph(&random_graph(seed), FrParams::seeded(seed));
            while state.iterations_done() < 10 {
                state.step();
            }
            let early = state.energy();
            state.run();
            state.energy() < early
        })
        .count();
    outcome(
        identical && separated_seeds >= 90 && energy_drops >= 95,
        format!(
            "identical SVG over 3 runs: {identical}; cliques separated {separated_seeds}/100; energy fell {energy_drops}/100"
        ),
    )
}

// 10 --------------------------------------------------------------------

fn stemming() -> Outcome {
    let fixed = stem("envisages") == "envisag" && stem("studies") == "studi";
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let sample: Vec<&str> = datasets::lexicon().choose_multiple(&mut rng, 10_000).copied().collect();
    let unstable: Vec<&str> = sample.iter().copied().filter(|w| stem(&stem(w)) != stem(w)).collect();
    outcome(
        fixed && unstable.is_empty(),
        format!(
            "envisages -> {}, studies -> {}; {} of 10000 sampled words not idempotent",
            stem("envisages"),
            stem("studies"),
            unstable.len()
        ),
    )
}

// 11 --------------------------------------------------------------------

fn end_to_end_compare() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_ct");
    let dir = tempfile::tempdir().unwrap();
    let sl = dir.path().join("sl.jsonl");
    let out = dir.path().join("report");
    let gen = Command::new(bin)
        .args(["--seed", "7", "gen", "--lexicon-size", "1000", "--docs", "6000", "--words", "150", "--out"])
        .arg(&sl)
        .status()
        .unwrap();
    if !gen.success() {
        return outcome(false, format!("gen exited with {gen}"));
    }
    let natural = datasets::natural_corpus_path();
    let run = Command::new(bin)
        .arg("compare")
        .arg(&natural)
        .arg(&sl)
        .args(["--min", "2", "--max", "20", "--beta", "5", "--seed", "1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    if !run.status.success() {
        return outcome(false, format!("compare failed: {}", String::from_utf8_lossy(&run.stderr)));
    }
    let svg_count = std::fs::read_dir(&out)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "svg"))
        .count();
    let report = std::fs::read_to_string(out.join("report.tsv")).unwrap_or_default();
    let classes: Vec<&str> = report.lines().skip(1).take(2).filter_map(|l| l.split('\t').nth(7)).collect();
    let pass = svg_count == 2 && classes.len() == 2 && classes[0] != classes[1] && Path::new(&out.join("report.tsv")).is_file();
    outcome(pass, format!("{svg_count} SVGs, zipf classes {classes:?}"))
}

fn main() {
    let natural = frequencies(&natural_corpus());
    let sl = frequencies(&sl_analog());

    type Check<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);
    let checks: Vec<Check> = vec![
        ("Iris two-cluster separation", Duration::from_secs(5), Box::new(iris_separation)),
        ("Co-occurrence oracle equivalence", Duration::from_secs(10), Box::new(cooccurrence_oracle)),
        ("Beta monotonicity", Duration::from_secs(5), Box::new(beta_monotonicity)),
        ("Zipf discrimination", Duration::from_secs(30), Box::new(|| zipf_discrimination(&natural, &sl))),
        ("Hapax band", Duration::from_secs(30), Box::new(|| hapax_band(&natural, &sl))),
        ("Equipartition identity", Duration::from_secs(30), Box::new(|| equipartition_identity(&natural))),
        ("Context counting", Duration::from_secs(1), Box::new(context_counting)),
        ("Pattern coverage", Duration::from_secs(10), Box::new(pattern_coverage)),
        ("Layout determinism and separation", Duration::from_secs(60), Box::new(layout_determinism_and_separation)),
        ("Stemming", Duration::from_secs(10), Box::new(stemming)),
        ("End-to-end compare", Duration::from_secs(120), Box::new(end_to_end_compare)),
    ];

    let mut failed = 0;
    for (i, (name, limit, check)) in checks.iter().enumerate() {
        let started = Instant::now();
        let o = within(*limit, started, check());
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<36} {} {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {} failed", checks.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
