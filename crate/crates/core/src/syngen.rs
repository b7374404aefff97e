//! Uniform random corpora over a fixed lexicon.
//!
//! Every word of every document is an independent uniform draw, so rank
//! and frequency are unrelated and the rank-frequency profile is flat.
//! Document `i` draws from its own ChaCha stream, which makes the output
//! independent of thread scheduling.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::datasets;
use crate::error::{Error, Result};
use crate::ingest::{Corpus, Document, Language};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSpec {
    pub lexicon: Vec<String>,
    pub n_docs: usize,
    pub words_per_doc: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Draws `lexicon_size` distinct words from the bundled word list.
    pub fn from_bundled(lexicon_size: usize, n_docs: usize, words_per_doc: usize, seed: u64) -> Result<Self> {
        let lexicon = sample_lexicon(lexicon_size, seed)?;
        Ok(GeneratorSpec {
            lexicon,
            n_docs,
            words_per_doc,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.lexicon.is_empty() {
            return Err(Error::InvalidParameter("lexicon is empty".into()));
        }
        if self.n_docs == 0 || self.words_per_doc == 0 {
            return Err(Error::InvalidParameter(
                "document count and words per document must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Uniform sample without replacement from the bundled word list, in list order.
pub fn sample_lexicon(size: usize, seed: u64) -> Result<Vec<String>> {
    let words = datasets::lexicon();
    if size == 0 || size > words.len() {
        return Err(Error::InvalidParameter(format!(
            "lexicon size must be between 1 and {}, got {size}",
            words.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, words.len(), size).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| words[i].to_string()).collect())
}

pub fn gen_uniform_corpus(spec: &GeneratorSpec) -> Result<Corpus> {
    spec.validate()?;
    let width = spec.n_docs.to_string().len().max(5);
    let documents: Vec<Document> = (0..spec.n_docs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            // stream 0 is left to the lexicon sample
            rng.set_stream(i as u64 + 1);
            let words: Vec<&str> = (0..spec.words_per_doc)
                .map(|_| spec.lexicon[rng.gen_range(0..spec.lexicon.len())].as_str())
                .collect();
            Document::new(format!("doc{:0width$}", i + 1), words.join(" "))
        })
        .collect();
    Corpus::new(format!("uniform-{}", spec.seed), Language::En, documents)
}
