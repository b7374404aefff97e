//! Data shipped with the crate: a word list, the Fisher Iris measurements
//! and a public-domain English novel split into paragraphs.

use std::path::PathBuf;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::ingest::stopwords::is_stopword;
use crate::ingest::Language;
use crate::neighbors::DataMatrix;

const LEXICON: &str = include_str!("../data/lexicon.txt");
const IRIS: &str = include_str!("../data/iris.csv");

/// Lowercase English words of at least three letters, stopwords removed.
pub fn lexicon() -> &'static [&'static str] {
    static WORDS: OnceLock<Vec<&'static str>> = OnceLock::new();
    WORDS.get_or_init(|| {
        LEXICON
            .lines()
            .map(str::trim)
            .filter(|w| w.len() >= 3 && !is_stopword(w, Language::En))
            .collect()
    })
}

/// Paragraphs of *Moby-Dick* as JSONL (`id`, `text`), one chapter
/// paragraph per document.
pub fn natural_corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join("moby_dick.jsonl")
}

pub struct Iris {
    /// 150 rows (samples) by 4 columns (sepal length, sepal width, petal
    /// length, petal width), in centimetres.
    pub matrix: DataMatrix,
    pub species: Vec<String>,
}

pub fn iris() -> Result<Iris> {
    let mut names = Vec::new();
    let mut rows = Vec::new();
    let mut species = Vec::new();
    for (i, line) in IRIS.lines().skip(1).enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::InvalidParameter(format!("iris line {}: expected 5 fields", i + 2)));
        }
        let values = fields[..4]
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidParameter(format!("iris line {}: {e}", i + 2)))?;
        names.push(format!("iris{:03}", names.len() + 1));
        rows.push(values);
        species.push(fields[4].trim().to_string());
    }
    Ok(Iris {
        matrix: DataMatrix::from_dense(names, &rows)?,
        species,
    })
}
