//! Brace-tracking pass over the code tokens: decision points, function
//! definitions, logical lines and formal parameters.

use super::lexer::{Token, TokenKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Structure {
    pub functions: u32,
    pub decisions: u32,
    pub logical_lines: u32,
    pub params: u32,
}

pub fn analyze(tokens: &[Token]) -> Structure {
    let code: Vec<&Token> = tokens.iter().filter(|t| t.kind.is_code()).collect();
    let partner = match_brackets(&code);
    let mut out = Structure::default();

    // Token index ranges (open, close) of `for (...)` headers.
    let mut for_headers: Vec<(usize, usize)> = Vec::new();
    // Brace depths at which a `do` is waiting for its `while`.
    let mut pending_do: Vec<usize> = Vec::new();
    let mut brace_depth = 0usize;

    let is_op = |i: usize, text: &str| {
        code.get(i)
            .is_some_and(|t| t.kind == TokenKind::Operator && t.text == text)
    };

    for (i, tok) in code.iter().enumerate() {
        if tok.kind == TokenKind::PunctuationNoise && tok.text == "}" {
            brace_depth = brace_depth.saturating_sub(1);
            continue;
        }
        if tok.kind != TokenKind::Operator {
            continue;
        }
        match tok.text.as_str() {
            "{" => brace_depth += 1,
            ";" => {
                let in_for_header = for_headers.iter().any(|&(o, c)| o < i && i < c);
                if !in_for_header {
                    out.logical_lines += 1;
                }
            }
            "if" | "switch" | "try" | "finally" => {
                if tok.text == "if" {
                    out.decisions += 1;
                }
                out.logical_lines += 1;
            }
            "case" | "&&" | "||" | "?" => out.decisions += 1,
            "catch" => {
                out.decisions += 1;
                out.logical_lines += 1;
            }
            "else" => {
                if !is_op(i + 1, "if") {
                    out.logical_lines += 1;
                }
            }
            "for" => {
                out.decisions += 1;
                out.logical_lines += 1;
                let mut j = i + 1;
                if is_op(j, "await") {
                    j += 1;
                }
                if is_op(j, "(") {
                    if let Some(close) = partner[j] {
                        for_headers.push((j, close));
                    }
                }
            }
            "do" => {
                out.decisions += 1;
                out.logical_lines += 1;
                pending_do.push(brace_depth);
            }
            "while" => {
                if pending_do.last() == Some(&brace_depth) {
                    pending_do.pop();
                } else {
                    out.decisions += 1;
                    out.logical_lines += 1;
                }
            }
            "function" => {
                out.functions += 1;
                out.logical_lines += 1;
                let mut j = i + 1;
                if is_op(j, "*") {
                    j += 1;
                }
                if code.get(j).is_some_and(|t| t.kind == TokenKind::Operand) {
                    j += 1;
                }
                if is_op(j, "(") {
                    if let Some(close) = partner[j] {
                        out.params += count_params(&code, j, close);
                    }
                }
            }
            "=>" => {
                out.functions += 1;
                if is_op(i + 1, "{") {
                    out.logical_lines += 1;
                }
                out.params += arrow_params(&code, &partner, i);
            }
            _ => {}
        }
    }
    out
}

/// For every opening bracket, the index of its matching closer.
fn match_brackets(code: &[&Token]) -> Vec<Option<usize>> {
    let mut partner = vec![None; code.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, tok) in code.iter().enumerate() {
        match (tok.kind, tok.text.as_str()) {
            (TokenKind::Operator, "(" | "[" | "{") => stack.push(i),
            (TokenKind::PunctuationNoise, ")" | "]" | "}") => {
                if let Some(open) = stack.pop() {
                    partner[open] = Some(i);
                    partner[i] = Some(open);
                }
            }
            _ => {}
        }
    }
    partner
}

/// Counts comma-separated items directly inside the bracket pair.
fn count_params(code: &[&Token], open: usize, close: usize) -> u32 {
    if close <= open + 1 {
        return 0;
    }
    let mut depth = 0usize;
    let mut commas = 0u32;
    for tok in &code[open + 1..close] {
        match (tok.kind, tok.text.as_str()) {
            (TokenKind::Operator, "(" | "[" | "{") => depth += 1,
            (TokenKind::PunctuationNoise, ")" | "]" | "}") => depth = depth.saturating_sub(1),
            (TokenKind::Operator, ",") if depth == 0 => commas += 1,
            _ => {}
        }
    }
    let trailing_comma = code[close - 1].kind == TokenKind::Operator && code[close - 1].text == ",";
    commas + 1 - u32::from(trailing_comma)
}

fn arrow_params(code: &[&Token], partner: &[Option<usize>], arrow: usize) -> u32 {
    let Some(prev) = arrow.checked_sub(1) else {
        return 0;
    };
    let tok = code[prev];
    match (tok.kind, tok.text.as_str()) {
        (TokenKind::PunctuationNoise, ")") => match partner[prev] {
            Some(open) => count_params(code, open, prev),
            None => 0,
        },
        (TokenKind::Operand, _) => 1,
        _ => 0,
    }
}
