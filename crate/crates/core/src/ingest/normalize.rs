use serde::{Deserialize, Serialize};

use super::porter;
use super::stopwords::is_stopword;
use super::{Document, Language};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationRules {
    pub min_token_length: usize,
    pub drop_punctuation: bool,
    pub drop_digits: bool,
    pub lowercase: bool,
    pub stopword_removal: bool,
    /// Porter stemming. English only: French tokens are never stemmed.
    pub stemming: bool,
    /// Selects the stopword list. [`super::Corpus::normalized`] overrides it
    /// with the corpus language.
    pub language: Language,
}

impl Default for NormalizationRules {
    fn default() -> Self {
        NormalizationRules {
            min_token_length: 3,
            drop_punctuation: true,
            drop_digits: true,
            lowercase: true,
            stopword_removal: true,
            stemming: false,
            language: Language::En,
        }
    }
}

impl NormalizationRules {
    pub fn stemmed() -> Self {
        NormalizationRules {
            stemming: true,
            ..Self::default()
        }
    }

    pub fn with_language(mut self, language: Language) -> Self {
        self.language = language;
        self
    }

    fn keeps_char(&self, c: char) -> bool {
        if c.is_alphabetic() {
            true
        } else if c.is_numeric() {
            !self.drop_digits
        } else if c.is_whitespace() {
            false
        } else {
            !self.drop_punctuation
        }
    }

    /// Applies the per-token rules to an already split token.
    fn finish_token(&self, raw: &str) -> Option<String> {
        let min = self.min_token_length.max(1);
        let token = if self.lowercase {
            raw.to_lowercase()
        } else {
            raw.to_string()
        };
        if token.chars().count() < min {
            return None;
        }
        if self.stopword_removal && is_stopword(&token, self.language) {
            return None;
        }
        let token = if self.stemming && self.language == Language::En {
            porter::stem(&token)
        } else {
            token
        };
        // stemming can shorten a token below the threshold
        (token.chars().count() >= min).then_some(token)
    }
}

/// Splits `text` into raw tokens: maximal runs of characters kept by `rules`.
pub fn tokenize<'a>(text: &'a str, rules: &'a NormalizationRules) -> impl Iterator<Item = &'a str> + 'a {
    text.split(move |c: char| !rules.keeps_char(c))
        .filter(|t| !t.is_empty())
}

/// Fills `tokens` from `raw_text`. Token order follows the text.
pub fn normalize(doc: &Document, rules: &NormalizationRules) -> Document {
    let tokens = tokenize(&doc.raw_text, rules)
        .filter_map(|t| rules.finish_token(t))
        .collect();
    Document {
        id: doc.id.clone(),
        raw_text: doc.raw_text.clone(),
        tokens,
    }
}
