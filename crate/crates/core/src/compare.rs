//! Side-by-side structural profile of two corpora.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{build_matrix, Corpus, NormalizationRules};
use crate::layout::{fruchterman_reingold, FrParams, HighlightSet, Layout2D};
use crate::neighbors::{knn_graph, CooccurrenceGraph, DataMatrix, GraphStats, ReductionParams};
use crate::ranges::{equipartition, RangePartition};
use crate::stats::{
    corpus_summary, hapax_fraction, term_frequencies, zipf_profile_with, CorpusSummary, ZipfConfig,
    ZipfProfile,
};
use crate::svg;
use crate::tsv;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareParams {
    pub rules: NormalizationRulesView,
    pub reduction: ReductionParams,
    pub layout: FrParams,
    pub zipf: ZipfConfig,
    pub seeds: [(u64, u64); 2],
    /// Drop nodes with fewer links before drawing.
    pub min_degree: Option<usize>,
}

/// The normalization switches a comparison may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormalizationRulesView {
    pub stemming: bool,
    pub stopword_removal: bool,
}

impl NormalizationRulesView {
    pub fn rules(&self) -> NormalizationRules {
        NormalizationRules {
            stemming: self.stemming,
            stopword_removal: self.stopword_removal,
            ..NormalizationRules::default()
        }
    }
}

impl Default for CompareParams {
    fn default() -> Self {
        CompareParams {
            rules: NormalizationRulesView {
                stemming: false,
                stopword_removal: true,
            },
            reduction: ReductionParams::default(),
            layout: FrParams::default(),
            zipf: ZipfConfig::default(),
            seeds: [(2, 2), (3, 3)],
            min_degree: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusAnalysis {
    pub summary: CorpusSummary,
    pub tokens: u64,
    pub distinct_terms: usize,
    pub zipf: ZipfProfile,
    pub hapax_fraction: f64,
    /// `None` when the seed ranges are empty.
    pub partition: Option<RangePartition>,
    /// `None` when no item falls in the band or no link survives.
    pub graph: Option<CooccurrenceGraph>,
    pub graph_stats: GraphStats,
    pub layout: Option<Layout2D>,
}

impl CorpusAnalysis {
    pub fn caption(&self) -> String {
        format!("{} {}", self.summary.name, svg::caption(&self.graph_stats))
    }

    pub fn network_svg(&self, highlights: &HighlightSet) -> String {
        match (&self.layout, &self.graph) {
            (Some(layout), Some(graph)) => svg::network(layout, Some(graph), highlights, &self.caption()),
            _ => svg::empty_network(&self.caption()),
        }
    }
}

pub fn analyze(corpus: &Corpus, params: &CompareParams) -> Result<CorpusAnalysis> {
    let rules = params.rules.rules();
    let tdm = build_matrix(corpus, &rules)?;
    let freqs = term_frequencies(&tdm)?;
    let zipf = zipf_profile_with(&freqs, &params.zipf)?;
    let hapax = hapax_fraction(&freqs)?;
    let summary = corpus_summary(corpus, &rules)?;
    let partition = match equipartition(&freqs, params.seeds[0], params.seeds[1]) {
        Ok(p) => Some(p),
        Err(Error::EmptySeedRange { .. }) => None,
        Err(e) => return Err(e),
    };
    let graph = match knn_graph(&DataMatrix::from(&tdm), &params.reduction) {
        Ok(g) => match params.min_degree {
            Some(k) => match g.filter_min_degree(k) {
                Ok(g) => Some(g),
                Err(Error::EmptyGraph) => None,
                Err(e) => return Err(e),
            },
            None => Some(g),
        },
        Err(Error::EmptyBand { .. } | Error::EmptyGraph) => None,
        Err(e) => return Err(e),
    };
    let graph_stats = graph
        .as_ref()
        .map_or_else(|| GraphStats::empty(&params.reduction), CooccurrenceGraph::stats);
    let layout = graph
        .as_ref()
        .map(|g| fruchterman_reingold(g, &params.layout))
        .transpose()?;
    Ok(CorpusAnalysis {
        summary,
        tokens: tdm.total(),
        distinct_terms: tdm.n_terms(),
        zipf,
        hapax_fraction: hapax,
        partition,
        graph,
        graph_stats,
        layout,
    })
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub params: CompareParams,
    pub a: CorpusAnalysis,
    pub b: CorpusAnalysis,
    pub verdict: Vec<String>,
}

/// Analyzes both corpora with the same parameters.
pub fn compare(a: &Corpus, b: &Corpus, params: &CompareParams) -> Result<CompareReport> {
    params.reduction.validate()?;
    let (ra, rb) = rayon::join(|| analyze(a, params), || analyze(b, params));
    let (a, b) = (ra?, rb?);
    let verdict = verdict(&a, &b);
    Ok(CompareReport {
        params: *params,
        a,
        b,
        verdict,
    })
}

fn verdict(a: &CorpusAnalysis, b: &CorpusAnalysis) -> Vec<String> {
    let (na, nb) = (&a.summary.name, &b.summary.name);
    let mut out = Vec::new();
    if a.zipf.classification == b.zipf.classification {
        out.push(format!(
            "zipf profiles agree: both {} (slopes {:.3} and {:.3})",
            a.zipf.classification, a.zipf.slope, b.zipf.slope
        ));
    } else {
        out.push(format!(
            "zipf profiles differ: {na} is {}, {nb} is {}",
            a.zipf.classification, b.zipf.classification
        ));
    }
    out.push(format!(
        "hapax share: {na} {:.3}, {nb} {:.3}",
        a.hapax_fraction, b.hapax_fraction
    ));
    let (ga, gb) = (&a.graph_stats, &b.graph_stats);
    match (ga.n_nodes, gb.n_nodes) {
        (0, 0) => out.push("neither corpus has linked items in the band".to_string()),
        (0, _) => out.push(format!("{na} has no linked items in the band {}", ga.band)),
        (_, 0) => out.push(format!("{nb} has no linked items in the band {}", gb.band)),
        _ => {
            let ratio = ga.mean_links.max(gb.mean_links) / ga.mean_links.min(gb.mean_links);
            let word = if ratio < 1.5 { "similar" } else { "different" };
            out.push(format!(
                "neighbourhood density {word}: mean links {:.2} vs {:.2}",
                ga.mean_links, gb.mean_links
            ));
        }
    }
    out
}

impl CompareReport {
    pub const TSV_HEADER: &'static str = "corpus\tdocuments\ttokens\tdistinct_terms\thapax_fraction\tzipf_slope\tzipf_r2\tzipf_class\trange_k\trange_n_c\tn_nodes\tn_edges\tmean_links\tbeta\tband\tvariant";

    fn row(c: &CorpusAnalysis) -> String {
        let (k, n_c) = match &c.partition {
            Some(p) => (p.k().to_string(), tsv::real(p.n_c())),
            None => ("0".to_string(), "NA".to_string()),
        };
        let g = &c.graph_stats;
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            tsv::field(&c.summary.name),
            c.summary.n_documents,
            c.tokens,
            c.distinct_terms,
            tsv::real(c.hapax_fraction),
            tsv::real(c.zipf.slope),
            tsv::real(c.zipf.r2),
            c.zipf.classification,
            k,
            n_c,
            g.n_nodes,
            g.n_edges,
            tsv::real(g.mean_links),
            tsv::bound(g.beta),
            g.band,
            g.variant
        )
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::TSV_HEADER)?;
        writeln!(out, "{}", Self::row(&self.a))?;
        writeln!(out, "{}", Self::row(&self.b))?;
        for line in &self.verdict {
            writeln!(out, "# {}", tsv::field(line))?;
        }
        Ok(())
    }
}
