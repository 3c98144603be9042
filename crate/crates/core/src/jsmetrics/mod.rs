//! Static complexity metrics for JavaScript: a lexer, Halstead counts,
//! cyclomatic complexity, line counts and the maintainability score,
//! composed into a 17-feature vector per script.

mod features;
mod halstead;
mod lexer;
mod structure;
pub mod table;

pub use features::{
    cyclomatic, extract_features, extract_features_lenient, line_counts, line_counts_from,
    maintainability, FeatureVector, LineCounts, Maintainability, FEATURE_COUNT, FEATURE_NAMES,
};
pub use halstead::{count_halstead, halstead_suite, HalsteadCounts, HalsteadSuite};
pub use lexer::{tokenize, tokenize_lenient, Token, TokenKind, TokenStream};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unterminated string literal starting on line {line}")]
    UnterminatedString { line: usize },
    #[error("unterminated template literal starting on line {line}")]
    UnterminatedTemplate { line: usize },
    #[error("unterminated block comment starting on line {line}")]
    UnterminatedComment { line: usize },
}

impl LexError {
    pub fn line(&self) -> usize {
        match self {
            LexError::UnterminatedString { line }
            | LexError::UnterminatedTemplate { line }
            | LexError::UnterminatedComment { line } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("program contains no code")]
    EmptyProgram,
    #[error("maintainability domain error: {0}")]
    Domain(&'static str),
}

/// CSV header for a feature file: `path,label` then the 17 feature columns.
pub fn csv_header() -> String {
    let mut cols = vec!["path", "label"];
    cols.extend(FEATURE_NAMES);
    cols.join(",")
}
