//! Frequency tables, rank-frequency (Zipf) profiles and corpus summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{build_matrix, Corpus, NormalizationRules, TermDocumentMatrix};
use crate::tsv;

/// Corpus-wide frequency of every term, keyed by term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrequencyTable {
    entries: BTreeMap<String, u64>,
}

impl FrequencyTable {
    /// Builds a table from explicit `(term, frequency)` pairs; zero frequencies are dropped.
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut entries = BTreeMap::new();
        for (term, f) in pairs {
            if f > 0 {
                *entries.entry(term.into()).or_insert(0) += f;
            }
        }
        FrequencyTable { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<u64> {
        self.entries.get(term).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(t, &f)| (t.as_str(), f))
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn max_frequency(&self) -> u64 {
        self.entries.values().copied().max().unwrap_or(0)
    }

    /// Terms by descending frequency, ties broken lexicographically.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// `term \t freq`, in rank order.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (term, f) in self.ranked() {
            writeln!(out, "{}\t{}", tsv::field(term), f)?;
        }
        Ok(())
    }
}

/// Row sums of the matrix.
pub fn term_frequencies(tdm: &TermDocumentMatrix) -> Result<FrequencyTable> {
    if tdm.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    Ok(FrequencyTable::from_pairs(
        (0..tdm.n_terms()).map(|i| (tdm.terms()[i].as_str(), tdm.row_sum(i))),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZipfClass {
    Natural,
    Degenerate,
}

impl fmt::Display for ZipfClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZipfClass::Natural => "natural",
            ZipfClass::Degenerate => "degenerate",
        })
    }
}

/// Fit window and classification thresholds for [`zipf_profile_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfConfig {
    /// Fit only the first `n` ranks. `None` fits every rank.
    pub top_ranks: Option<usize>,
    /// Profiles flatter than this are degenerate.
    pub min_abs_slope: f64,
    /// Profiles whose fit explains less than this are degenerate.
    pub min_r2: f64,
}

impl Default for ZipfConfig {
    fn default() -> Self {
        ZipfConfig {
            top_ranks: None,
            min_abs_slope: 0.3,
            min_r2: 0.5,
        }
    }
}

impl ZipfConfig {
    pub fn top(n: usize) -> Self {
        ZipfConfig {
            top_ranks: Some(n),
            ..Self::default()
        }
    }
}

pub const MIN_ZIPF_TERMS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZipfProfile {
    /// `(rank, frequency)` for every term, rank 1 = most frequent.
    pub points: Vec<(usize, u64)>,
    /// Term at each rank, aligned with `points`.
    pub terms: Vec<String>,
    /// Number of leading ranks used by the fit.
    pub fitted_ranks: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub classification: ZipfClass,
}

impl ZipfProfile {
    /// `rank \t freq` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for &(r, f) in &self.points {
            writeln!(out, "{r}\t{f}")?;
        }
        Ok(())
    }

    pub fn fit_line(&self) -> String {
        format!(
            "slope\t{}\tintercept\t{}\tr2\t{}\tranks\t{}\tclass\t{}",
            tsv::real(self.slope),
            tsv::real(self.intercept),
            tsv::real(self.r2),
            self.fitted_ranks,
            self.classification
        )
    }
}

pub fn zipf_profile(freqs: &FrequencyTable) -> Result<ZipfProfile> {
    zipf_profile_with(freqs, &ZipfConfig::default())
}

/// Least-squares line through `(ln rank, ln frequency)`.
///
/// A flat profile has no variance to explain and gets `r2 = 0`.
pub fn zipf_profile_with(freqs: &FrequencyTable, config: &ZipfConfig) -> Result<ZipfProfile> {
    if freqs.len() < MIN_ZIPF_TERMS {
        return Err(Error::TooFewTerms {
            needed: MIN_ZIPF_TERMS,
            found: freqs.len(),
        });
    }
    let fitted_ranks = match config.top_ranks {
        Some(n) if n < MIN_ZIPF_TERMS => {
            return Err(Error::InvalidParameter(format!(
                "zipf fit window must cover at least {MIN_ZIPF_TERMS} ranks, got {n}"
            )))
        }
        Some(n) => n.min(freqs.len()),
        None => freqs.len(),
    };
    let ranked = freqs.ranked();
    let points: Vec<(usize, u64)> = ranked.iter().enumerate().map(|(i, &(_, f))| (i + 1, f)).collect();
    let terms = ranked.iter().map(|&(t, _)| t.to_string()).collect();

    let xy: Vec<(f64, f64)> = points[..fitted_ranks]
        .iter()
        .map(|&(r, f)| ((r as f64).ln(), (f as f64).ln()))
        .collect();
    let (slope, intercept, r2) = least_squares(&xy);
    let classification = if slope.abs() < config.min_abs_slope || r2 < config.min_r2 {
        ZipfClass::Degenerate
    } else {
        ZipfClass::Natural
    };
    Ok(ZipfProfile {
        points,
        terms,
        fitted_ranks,
        slope,
        intercept,
        r2,
        classification,
    })
}

fn least_squares(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    if xy.iter().all(|p| p.1 == xy[0].1) {
        return (0.0, xy[0].1, 0.0);
    }
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in xy {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if sxx > 0.0 && syy > 0.0 {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (slope, intercept, r2)
}

/// Number of terms with frequency exactly `k`, for each `k` in `lo..=hi`.
pub fn occurrence_histogram(freqs: &FrequencyTable, lo: u64, hi: u64) -> Result<Vec<(u64, usize)>> {
    if lo < 1 || hi < lo {
        return Err(Error::InvalidRange { lo, hi });
    }
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for (_, f) in freqs.iter() {
        if (lo..=hi).contains(&f) {
            *counts.entry(f).or_default() += 1;
        }
    }
    Ok((lo..=hi).map(|k| (k, counts.get(&k).copied().unwrap_or(0))).collect())
}

/// Word counts of one matrix variant (surface forms or stems).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct WordCounts {
    pub n_words: usize,
    pub freq_gt1: usize,
    pub freq_eq2: usize,
    pub freq_eq3: usize,
    pub hapax: usize,
}

impl WordCounts {
    pub fn from_frequencies(freqs: &FrequencyTable) -> Self {
        let mut c = WordCounts {
            n_words: freqs.len(),
            ..Default::default()
        };
        for (_, f) in freqs.iter() {
            match f {
                1 => c.hapax += 1,
                2 => c.freq_eq2 += 1,
                3 => c.freq_eq3 += 1,
                _ => {}
            }
            if f > 1 {
                c.freq_gt1 += 1;
            }
        }
        c
    }
}

/// Document and word counts for one corpus, unstemmed and stemmed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub name: String,
    pub n_documents: usize,
    pub unstemmed: WordCounts,
    pub stemmed: WordCounts,
}

impl CorpusSummary {
    pub const TSV_HEADER: &'static str = "corpus\tdocuments\twords\twords_freq_gt1\twords_freq_eq2\twords_freq_eq3\tstems\tstems_freq_gt1\tstems_freq_eq2\tstems_freq_eq3";

    pub fn tsv_row(&self) -> String {
        let (u, s) = (&self.unstemmed, &self.stemmed);
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            tsv::field(&self.name),
            self.n_documents,
            u.n_words,
            u.freq_gt1,
            u.freq_eq2,
            u.freq_eq3,
            s.n_words,
            s.freq_gt1,
            s.freq_eq2,
            s.freq_eq3
        )
    }
}

/// Counts words under `rules` with stemming off and on; every other rule is kept.
pub fn corpus_summary(corpus: &Corpus, rules: &NormalizationRules) -> Result<CorpusSummary> {
    let plain = NormalizationRules {
        stemming: false,
        ..rules.clone()
    };
    let stemmed = NormalizationRules {
        stemming: true,
        ..rules.clone()
    };
    let unstemmed = WordCounts::from_frequencies(&term_frequencies(&build_matrix(corpus, &plain)?)?);
    let stemmed = WordCounts::from_frequencies(&term_frequencies(&build_matrix(corpus, &stemmed)?)?);
    Ok(CorpusSummary {
        name: corpus.name.clone(),
        n_documents: corpus.len(),
        unstemmed,
        stemmed,
    })
}

/// Terms occurring at least `s_f` times in the corpus (repeats within a
/// document count), by descending frequency then lexicographically.
pub fn frequent_items(tdm: &TermDocumentMatrix, s_f: u64) -> Result<Vec<(String, u64)>> {
    if s_f < 1 {
        return Err(Error::InvalidParameter("S_f threshold must be at least 1".into()));
    }
    let mut items: Vec<(String, u64)> = (0..tdm.n_terms())
        .map(|i| (tdm.terms()[i].clone(), tdm.row_sum(i)))
        .filter(|&(_, f)| f >= s_f)
        .collect();
    items.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(items)
}

/// Share of distinct terms that occur exactly once.
pub fn hapax_fraction(freqs: &FrequencyTable) -> Result<f64> {
    if freqs.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let hapax = freqs.iter().filter(|&(_, f)| f == 1).count();
    Ok(hapax as f64 / freqs.len() as f64)
}
