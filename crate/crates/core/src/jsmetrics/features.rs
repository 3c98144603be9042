use std::collections::BTreeSet;

use super::halstead::{count_halstead, halstead_suite};
use super::lexer::{tokenize, tokenize_lenient, Token, TokenStream};
use super::structure;
use super::{LexError, MetricsError};

/// Column names in CSV order.
pub const FEATURE_NAMES: [&str; 17] = [
    "M", "M_d", "B", "D", "E", "c_l", "T", "eta", "V", "eta1", "n1", "eta2", "n2", "params", "sloc",
    "physical", "M_s",
];

pub const FEATURE_COUNT: usize = FEATURE_NAMES.len();

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LineCounts {
    pub physical: u32,
    pub sloc: u32,
    pub logical: u32,
    pub params: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maintainability {
    pub score: f64,
    pub index: f64,
}

/// The 17 static features of one script.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub cyclomatic: u32,
    pub cyclomatic_density: f64,
    pub bugs: f64,
    pub difficulty: f64,
    pub effort: f64,
    pub logical_lines: u32,
    pub time: f64,
    pub vocabulary: u32,
    pub volume: f64,
    pub eta1: u32,
    pub n1: u32,
    pub eta2: u32,
    pub n2: u32,
    pub params: u32,
    pub sloc: u32,
    pub physical: u32,
    pub maintainability: f64,
}

impl FeatureVector {
    pub fn to_row(&self) -> [f64; FEATURE_COUNT] {
        [
            f64::from(self.cyclomatic),
            self.cyclomatic_density,
            self.bugs,
            self.difficulty,
            self.effort,
            f64::from(self.logical_lines),
            self.time,
            f64::from(self.vocabulary),
            self.volume,
            f64::from(self.eta1),
            f64::from(self.n1),
            f64::from(self.eta2),
            f64::from(self.n2),
            f64::from(self.params),
            f64::from(self.sloc),
            f64::from(self.physical),
            self.maintainability,
        ]
    }

    /// Fields formatted for CSV, integers without a fractional part.
    pub fn csv_fields(&self) -> Vec<String> {
        self.to_row()
            .iter()
            .map(|v| {
                if v.fract() == 0.0 && v.abs() < 1e15 {
                    format!("{}", *v as i64)
                } else {
                    format!("{v}")
                }
            })
            .collect()
    }
}

/// Cyclomatic complexity by decision-point counting: one for the top level,
/// one per function, one per branch point.
pub fn cyclomatic(tokens: &[Token]) -> u32 {
    let s = structure::analyze(tokens);
    1 + s.functions + s.decisions
}

pub fn line_counts(source: &str) -> LineCounts {
    let (stream, _) = tokenize_lenient(source);
    line_counts_from(source, &stream)
}

pub fn line_counts_from(source: &str, stream: &TokenStream) -> LineCounts {
    let physical = source.lines().count() as u32;
    let mut code_lines = BTreeSet::new();
    for tok in stream.code_tokens() {
        code_lines.extend(tok.line..=tok.end_line());
    }
    let s = structure::analyze(&stream.tokens);
    LineCounts {
        physical,
        sloc: code_lines.len() as u32,
        logical: s.logical_lines,
        params: s.params,
    }
}

/// Maintainability score `171 - 5.2 ln V - 0.23 M - 16.2 ln c_l` and the
/// index `max(0, score / 171)`.
pub fn maintainability(volume: f64, cyclomatic: f64, logical_lines: f64) -> Result<Maintainability, MetricsError> {
    if !(volume > 0.0) {
        return Err(MetricsError::Domain("volume must be positive"));
    }
    if !(logical_lines > 0.0) {
        return Err(MetricsError::Domain("logical line count must be positive"));
    }
    if !(cyclomatic >= 1.0) {
        return Err(MetricsError::Domain("cyclomatic complexity must be at least 1"));
    }
    let score = 171.0 - 5.2 * volume.ln() - 0.23 * cyclomatic - 16.2 * logical_lines.ln();
    Ok(Maintainability {
        score,
        index: (score / 171.0).max(0.0),
    })
}

pub fn extract_features(source: &str) -> Result<FeatureVector, MetricsError> {
    let stream = tokenize(source)?;
    features_from_stream(source, &stream)
}

/// Like [`extract_features`] but works on the lexically valid prefix of a
/// malformed script, handing back the lexer error as a warning.
pub fn extract_features_lenient(source: &str) -> Result<(FeatureVector, Option<LexError>), MetricsError> {
    let (stream, warning) = tokenize_lenient(source);
    let features = features_from_stream(source, &stream)?;
    Ok((features, warning))
}

fn features_from_stream(source: &str, stream: &TokenStream) -> Result<FeatureVector, MetricsError> {
    if stream.code_tokens().next().is_none() {
        return Err(MetricsError::EmptyProgram);
    }
    let counts = count_halstead(&stream.tokens);
    let suite = halstead_suite(counts);
    let m = cyclomatic(&stream.tokens);
    let lines = line_counts_from(source, stream);
    // Tiny programs can have zero logical lines or zero volume; both are
    // floored at 1 so density and maintainability stay finite.
    let lloc = f64::from(lines.logical.max(1));
    let mi = maintainability(suite.volume.max(1.0), f64::from(m), lloc)?;
    Ok(FeatureVector {
        cyclomatic: m,
        cyclomatic_density: f64::from(m) / lloc,
        bugs: suite.bugs,
        difficulty: suite.difficulty,
        effort: suite.effort,
        logical_lines: lines.logical,
        time: suite.time,
        vocabulary: suite.vocabulary,
        volume: suite.volume,
        eta1: counts.eta1,
        n1: counts.n1,
        eta2: counts.eta2,
        n2: counts.n2,
        params: lines.params,
        sloc: lines.sloc,
        physical: lines.physical,
        maintainability: mi.score,
    })
}
