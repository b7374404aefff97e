use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use super::{Corpus, NormalizationRules};
use crate::error::{Error, Result};
use crate::tsv;

/// Sparse term-by-document count matrix.
///
/// Rows are terms in lexicographic order, columns follow corpus document
/// order. Each row stores `(column, count)` pairs sorted by column; zero
/// counts are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDocumentMatrix {
    terms: Vec<String>,
    doc_ids: Vec<String>,
    rows: Vec<Vec<(u32, u64)>>,
}

impl TermDocumentMatrix {
    /// Builds a matrix from per-document token lists.
    pub fn from_token_lists<'a, I, D, T>(docs: I) -> Self
    where
        I: IntoIterator<Item = (D, T)>,
        D: Into<String>,
        T: IntoIterator<Item = &'a str>,
    {
        let mut by_term: BTreeMap<String, Vec<(u32, u64)>> = BTreeMap::new();
        let mut doc_ids = Vec::new();
        for (col, (id, tokens)) in docs.into_iter().enumerate() {
            doc_ids.push(id.into());
            let mut counts: HashMap<&str, u64> = HashMap::new();
            for t in tokens {
                *counts.entry(t).or_default() += 1;
            }
            for (term, count) in counts {
                by_term
                    .entry(term.to_string())
                    .or_default()
                    .push((col as u32, count));
            }
        }
        // columns were pushed in increasing order, so rows are already sorted
        let (terms, rows) = by_term.into_iter().unzip();
        TermDocumentMatrix { terms, doc_ids, rows }
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn row(&self, i: usize) -> &[(u32, u64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = (&str, &[(u32, u64)])> {
        self.terms
            .iter()
            .map(String::as_str)
            .zip(self.rows.iter().map(Vec::as_slice))
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn get(&self, term: &str, doc_id: &str) -> u64 {
        let Some(i) = self.term_index(term) else {
            return 0;
        };
        let Some(j) = self.doc_ids.iter().position(|d| d == doc_id) else {
            return 0;
        };
        self.rows[i]
            .binary_search_by_key(&(j as u32), |&(c, _)| c)
            .map(|pos| self.rows[i][pos].1)
            .unwrap_or(0)
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.rows[i].iter().map(|&(_, c)| c).sum()
    }

    /// Number of documents containing term `i`.
    pub fn document_frequency(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    pub fn total(&self) -> u64 {
        (0..self.rows.len()).map(|i| self.row_sum(i)).sum()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Writes `term \t doc_id \t count` triples sorted by term, then doc id.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut col_order: Vec<u32> = (0..self.doc_ids.len() as u32).collect();
        col_order.sort_by(|&a, &b| self.doc_ids[a as usize].cmp(&self.doc_ids[b as usize]));
        let mut rank = vec![0u32; col_order.len()];
        for (r, &c) in col_order.iter().enumerate() {
            rank[c as usize] = r as u32;
        }
        for (term, row) in self.rows() {
            let mut entries = row.to_vec();
            entries.sort_by_key(|&(c, _)| rank[c as usize]);
            for (c, count) in entries {
                writeln!(
                    out,
                    "{}\t{}\t{}",
                    tsv::field(term),
                    tsv::field(&self.doc_ids[c as usize]),
                    count
                )?;
            }
        }
        Ok(())
    }
}

/// Normalizes `corpus` under `rules` and counts every term per document.
pub fn build_matrix(corpus: &Corpus, rules: &NormalizationRules) -> Result<TermDocumentMatrix> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let normalized = corpus.normalized(rules);
    if normalized.token_count() == 0 {
        return Err(Error::NoTokens);
    }
    Ok(TermDocumentMatrix::from_token_lists(normalized.documents.iter().map(|d| {
        (d.id.as_str(), d.tokens.iter().map(String::as_str))
    })))
}
