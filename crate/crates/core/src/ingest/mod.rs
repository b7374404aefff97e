//! Corpus loading, text normalization and the term-document matrix.

mod matrix;
mod normalize;
pub mod porter;
pub mod stopwords;

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use matrix::{build_matrix, TermDocumentMatrix};
pub use normalize::{normalize, tokenize, NormalizationRules};
pub use porter::stem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[default]
    En,
    Fr,
}

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Fr => "fr",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "en" | "english" => Ok(Language::En),
            "fr" | "french" => Ok(Language::Fr),
            _ => Err(Error::UnsupportedLanguage(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub raw_text: String,
    /// Empty until the document goes through [`normalize`].
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, raw_text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            raw_text: raw_text.into(),
            tokens: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub name: String,
    pub language: Language,
    pub documents: Vec<Document>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// A directory of UTF-8 `.txt` files, one document per file, id = file stem.
    TxtDir,
    /// One JSON object per line with string fields `id` and `text`.
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "txt-dir" | "txt" => Ok(CorpusFormat::TxtDir),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            _ => Err(Error::InvalidParameter(format!(
                "unknown corpus format `{s}` (expected txt-dir or jsonl)"
            ))),
        }
    }
}

impl CorpusFormat {
    /// Directories are read as `txt-dir`, anything else as `jsonl`.
    pub fn infer(path: &Path) -> CorpusFormat {
        if path.is_dir() {
            CorpusFormat::TxtDir
        } else {
            CorpusFormat::Jsonl
        }
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    id: String,
    text: String,
}

#[derive(Serialize)]
struct JsonRecordRef<'a> {
    id: &'a str,
    text: &'a str,
}

impl Corpus {
    pub fn new(name: impl Into<String>, language: Language, documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Corpus {
            name: name.into(),
            language,
            documents,
        })
    }

    /// Builds a corpus from `(id, text)` pairs.
    pub fn from_texts<I, S, T>(name: &str, language: Language, texts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let documents = texts.into_iter().map(|(id, text)| Document::new(id, text)).collect();
        Corpus::new(name, language, documents)
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    /// Returns a copy with every document normalized under `rules`.
    ///
    /// Documents are processed in parallel; the output is identical to a
    /// serial pass because each document is normalized independently.
    pub fn normalized(&self, rules: &NormalizationRules) -> Corpus {
        use rayon::prelude::*;

        let rules = rules.clone().with_language(self.language);
        let documents = self
            .documents
            .par_iter()
            .map(|d| normalize(d, &rules))
            .collect();
        Corpus {
            name: self.name.clone(),
            language: self.language,
            documents,
        }
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        for doc in &self.documents {
            let line = serde_json::to_string(&JsonRecordRef {
                id: &doc.id,
                text: &doc.raw_text,
            })
            .expect("string fields always serialize");
            writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_txt_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for doc in &self.documents {
            let path = dir.join(format!("{}.txt", doc.id));
            fs::write(&path, &doc.raw_text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Loads a corpus from disk. Tokens are left empty.
///
/// The corpus name is the final path component.
pub fn load_corpus(path: &Path, format: CorpusFormat, language: Language) -> Result<Corpus> {
    if !path.exists() {
        return Err(Error::MissingPath(path.to_path_buf()));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());
    let documents = match format {
        CorpusFormat::TxtDir => read_txt_dir(path)?,
        CorpusFormat::Jsonl => read_jsonl(path)?,
    };
    Corpus::new(name, language, documents)
}

fn read_txt_dir(dir: &Path) -> Result<Vec<Document>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|ext| ext == "txt") {
            paths.push(path);
        }
    }
    // read_dir order is platform dependent
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            let text = String::from_utf8(raw).map_err(|_| Error::MalformedLine {
                path: path.clone(),
                line: 1,
                reason: "file is not valid UTF-8".to_string(),
            })?;
            let id = path
                .file_stem()
                .expect("file paths have a stem")
                .to_string_lossy()
                .into_owned();
            Ok(Document::new(id, text))
        })
        .collect()
}

fn read_jsonl(path: &Path) -> Result<Vec<Document>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut documents = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::MalformedLine {
                path: path.to_path_buf(),
                line: lineno,
                reason: "line is not valid UTF-8".to_string(),
            },
            _ => Error::io(path, e),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: JsonRecord = serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            path: path.to_path_buf(),
            line: lineno,
            reason: e.to_string(),
        })?;
        documents.push(Document::new(record.id, record.text));
    }
    Ok(documents)
}
