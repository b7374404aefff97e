//! Antonym candidates from lexico-syntactic templates.
//!
//! A template is written as space-separated elements:
//!
//! * `X`, `Y`: slots, each filled by one content token;
//! * `ADJ`: one token with an adjectival suffix;
//! * a literal, with `|` between alternatives and `_` joining the tokens of
//!   a multi-token alternative (`jusqu_à` matches `jusqu'à`);
//! * any literal in parentheses may be absent.
//!
//! Text is lowercased and split on non-letters. Sentence-final `.`, `!` and
//! `?` end a sentence and no match crosses them.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::stopwords::is_stopword;
use crate::ingest::{Corpus, Language};
use crate::tsv;

const ENGLISH: &[&str] = &[
    "(both) X and Y",
    "X as well as Y",
    "X and Y alike",
    "neither X nor Y",
    "(either) X or Y",
    "X rather than Y",
    "whether X or Y",
    "now X now Y",
    "from X to Y",
    "how X or Y",
    "more X than Y",
    "X is more ADJ than Y",
    "the difference between X and Y",
    "separating X and Y",
    "a gap between X and Y",
    "turning X into Y",
    "X gives way to Y",
    "X not Y",
    "X instead of Y",
    "X as opposed to Y",
    "the very X and the very Y",
    "either too X or too Y",
    "deeply X and deeply Y",
];

const FRENCH: &[&str] = &[
    "X ou Y",
    "soit X soit Y",
    "à_la_fois X et Y",
    "de|depuis (le|la|les|l) X à|au|aux|jusqu_à|jusqu_au|jusqu_aux Y",
    "ni X ni Y",
    "aussi_bien X que|qu Y",
    "X comme Y",
    "plus|moins|aussi X que|qu Y",
    "entre X et Y",
    "X plutôt que|qu Y",
];

const ADJ_SUFFIXES: &[&str] = &["er", "ous", "ive", "al", "ic", "ful", "less"];
const MIN_SLOT_CHARS: usize = 3;

/// Logical family of an opposition, where a template implies one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Complementary,
    Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Element {
    X,
    Y,
    Adj,
    Literal {
        alternatives: Vec<Vec<String>>,
        optional: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntonymPattern {
    pub id: String,
    pub language: Language,
    pub template: String,
    pub family: Option<Family>,
    elements: Vec<Element>,
}

impl AntonymPattern {
    pub fn parse(id: &str, language: Language, template: &str) -> Result<Self> {
        let mut elements = Vec::new();
        for raw in template.split_whitespace() {
            let el = match raw {
                "X" => Element::X,
                "Y" => Element::Y,
                "ADJ" => Element::Adj,
                _ => {
                    let (body, optional) = match raw.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                        Some(inner) => (inner, true),
                        None => (raw, false),
                    };
                    let alternatives: Vec<Vec<String>> = body
                        .split('|')
                        .map(|alt| alt.split('_').map(str::to_lowercase).collect())
                        .collect();
                    if alternatives.iter().flatten().any(|t| t.is_empty()) {
                        return Err(Error::InvalidParameter(format!("empty literal in `{template}`")));
                    }
                    Element::Literal { alternatives, optional }
                }
            };
            elements.push(el);
        }
        let xs: Vec<usize> = positions(&elements, &Element::X);
        let ys: Vec<usize> = positions(&elements, &Element::Y);
        if xs.len() != 1 || ys.len() != 1 || xs[0] > ys[0] {
            return Err(Error::InvalidParameter(format!(
                "template `{template}` needs one X slot followed by one Y slot"
            )));
        }
        Ok(AntonymPattern {
            id: id.to_string(),
            language,
            template: template.to_string(),
            family: family_of(template),
            elements,
        })
    }

    /// Positions of the literal elements marked optional.
    pub fn optional_positions(&self) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(e, Element::Literal { optional: true, .. }))
            .map(|(i, _)| i)
            .collect()
    }

    fn slot_ok(&self, token: &str) -> bool {
        token.chars().count() >= MIN_SLOT_CHARS
            && token.chars().all(char::is_alphabetic)
            && !is_stopword(token, self.language)
    }

    /// Every `(x index, y index)` where the template matches from `start`.
    fn matches_from(&self, tokens: &[String], start: usize, out: &mut Vec<(usize, usize)>) {
        self.walk(0, tokens, start, None, out);
    }

    fn walk(&self, el: usize, tokens: &[String], pos: usize, x: Option<usize>, out: &mut Vec<(usize, usize)>) {
        let Some(element) = self.elements.get(el) else {
            return;
        };
        let last = el + 1 == self.elements.len();
        match element {
            Element::X => {
                if pos < tokens.len() && self.slot_ok(&tokens[pos]) {
                    self.walk(el + 1, tokens, pos + 1, Some(pos), out);
                }
            }
            Element::Y => {
                if pos < tokens.len() && self.slot_ok(&tokens[pos]) {
                    let x = x.expect("X precedes Y");
                    if tokens[x] != tokens[pos] {
                        if last {
                            out.push((x, pos));
                        } else {
                            let mut tail = Vec::new();
                            self.walk(el + 1, tokens, pos + 1, Some(x), &mut tail);
                            if !tail.is_empty() {
                                out.push((x, pos));
                            }
                        }
                    }
                }
            }
            Element::Adj => {
                if pos < tokens.len() && is_adjective(&tokens[pos]) {
                    self.walk(el + 1, tokens, pos + 1, x, out);
                }
            }
            Element::Literal { alternatives, optional } => {
                if *optional {
                    self.walk(el + 1, tokens, pos, x, out);
                }
                for alt in alternatives {
                    let end = pos + alt.len();
                    if end <= tokens.len() && tokens[pos..end] == alt[..] {
                        if last {
                            // trailing literals only confirm the match
                            out.push((x.unwrap_or(0), usize::MAX));
                        } else {
                            self.walk(el + 1, tokens, end, x, out);
                        }
                    }
                }
            }
        }
    }
}

fn positions(elements: &[Element], target: &Element) -> Vec<usize> {
    elements
        .iter()
        .enumerate()
        .filter(|(_, e)| *e == target)
        .map(|(i, _)| i)
        .collect()
}

fn family_of(template: &str) -> Option<Family> {
    let t = template;
    if t.starts_with("neither") || t.starts_with("ni ") || t == "X not Y" {
        Some(Family::Complementary)
    } else if t.starts_with("from") || t.starts_with("de|") || t.contains("more") || t.starts_with("plus|") {
        Some(Family::Scalar)
    } else {
        None
    }
}

fn is_adjective(token: &str) -> bool {
    token.chars().count() >= MIN_SLOT_CHARS && ADJ_SUFFIXES.iter().any(|s| token.ends_with(s))
}

/// Compiles the template table for a language tag (`en`, `fr`).
pub fn compile_patterns(language: &str) -> Result<Vec<AntonymPattern>> {
    let lang: Language = language.parse()?;
    Ok(patterns_for(lang))
}

pub fn patterns_for(language: Language) -> Vec<AntonymPattern> {
    let table = match language {
        Language::En => ENGLISH,
        Language::Fr => FRENCH,
    };
    table
        .iter()
        .enumerate()
        .map(|(i, t)| {
            AntonymPattern::parse(&format!("{}{:02}", language.as_str(), i + 1), language, t)
                .expect("built-in templates are well formed")
        })
        .collect()
}

/// Lowercased word sequences, one per sentence.
pub fn sentences(text: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            word.extend(c.to_lowercase());
            continue;
        }
        if !word.is_empty() {
            current.push(std::mem::take(&mut word));
        }
        if matches!(c, '.' | '!' | '?') && !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
    }
    if !word.is_empty() {
        current.push(word);
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// One template match.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Occurrence {
    pub x: String,
    pub y: String,
    pub pattern_id: String,
    pub doc_id: String,
}

/// All matches in one text, deduplicated per pattern and slot positions.
pub fn extract_from_text(doc_id: &str, text: &str, patterns: &[AntonymPattern]) -> Vec<Occurrence> {
    let mut out = Vec::new();
    for tokens in sentences(text) {
        for p in patterns {
            let mut hits = Vec::new();
            for start in 0..tokens.len() {
                p.matches_from(&tokens, start, &mut hits);
            }
            let unique: BTreeSet<(usize, usize)> = hits.into_iter().filter(|&(_, y)| y != usize::MAX).collect();
            for (x, y) in unique {
                out.push(Occurrence {
                    x: tokens[x].clone(),
                    y: tokens[y].clone(),
                    pattern_id: p.id.clone(),
                    doc_id: doc_id.to_string(),
                });
            }
        }
    }
    out
}

/// Unordered pair with its evidence. `x < y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AntonymCandidate {
    pub x: String,
    pub y: String,
    pub count: usize,
    pub distinct_patterns: usize,
    pub pattern_ids: BTreeSet<String>,
    pub doc_ids: BTreeSet<String>,
}

/// Scans every raw document and aggregates matches by unordered pair.
pub fn extract_candidates(corpus: &Corpus, patterns: &[AntonymPattern]) -> Vec<AntonymCandidate> {
    let per_doc: Vec<Vec<Occurrence>> = corpus
        .documents
        .par_iter()
        .map(|d| extract_from_text(&d.id, &d.raw_text, patterns))
        .collect();
    aggregate(per_doc.into_iter().flatten())
}

pub fn aggregate<I: IntoIterator<Item = Occurrence>>(occurrences: I) -> Vec<AntonymCandidate> {
    let mut by_pair: BTreeMap<(String, String), AntonymCandidate> = BTreeMap::new();
    for o in occurrences {
        let (x, y) = if o.x <= o.y { (o.x, o.y) } else { (o.y, o.x) };
        let c = by_pair.entry((x.clone(), y.clone())).or_insert_with(|| AntonymCandidate {
            x,
            y,
            count: 0,
            distinct_patterns: 0,
            pattern_ids: BTreeSet::new(),
            doc_ids: BTreeSet::new(),
        });
        c.count += 1;
        c.pattern_ids.insert(o.pattern_id);
        c.doc_ids.insert(o.doc_id);
        c.distinct_patterns = c.pattern_ids.len();
    }
    by_pair.into_values().collect()
}

/// Most distinct patterns first, then most occurrences, then alphabetical.
pub fn rank_candidates(mut candidates: Vec<AntonymCandidate>) -> Vec<AntonymCandidate> {
    candidates.sort_by(|a, b| {
        b.distinct_patterns
            .cmp(&a.distinct_patterns)
            .then(b.count.cmp(&a.count))
            .then_with(|| (&a.x, &a.y).cmp(&(&b.x, &b.y)))
    });
    candidates
}

/// `x \t y \t count \t distinct_patterns \t pattern_ids`.
pub fn write_tsv<W: Write>(candidates: &[AntonymCandidate], mut out: W) -> io::Result<()> {
    writeln!(out, "x\ty\tcount\tdistinct_patterns\tpattern_ids")?;
    for c in candidates {
        let ids: Vec<&str> = c.pattern_ids.iter().map(String::as_str).collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            tsv::field(&c.x),
            tsv::field(&c.y),
            c.count,
            c.distinct_patterns,
            ids.join(",")
        )?;
    }
    Ok(())
}
