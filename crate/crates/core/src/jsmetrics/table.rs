//! Operator/operand classification table.
//!
//! Every oracle test in this module is written against this table, so it is
//! kept in one place and changed only deliberately. Words not listed here,
//! including `this`, `true`, `false`, `null` and `undefined`, are operands.

/// Reserved words that count as Halstead operators.
pub const KEYWORD_OPERATORS: &[&str] = &[
    "var",
    "let",
    "const",
    "if",
    "else",
    "for",
    "while",
    "do",
    "switch",
    "case",
    "default",
    "return",
    "function",
    "new",
    "typeof",
    "delete",
    "void",
    "in",
    "of",
    "instanceof",
    "try",
    "catch",
    "finally",
    "throw",
    "break",
    "continue",
    "class",
    "extends",
    "yield",
    "await",
    "import",
    "export",
    "with",
    "debugger",
];

/// Punctuators, longest first so a greedy scan picks the maximal munch.
pub const PUNCTUATORS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==", "!=",
    "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "**", "<<", ">>", "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%",
    "&", "|", "^", "!", "~", "?", ":", "=", ".", "@",
];

/// Closing halves of grouping pairs. The opening half carries the single
/// operator occurrence for the pair.
pub const CLOSERS: &[&str] = &[")", "]", "}"];

pub fn is_keyword_operator(word: &str) -> bool {
    KEYWORD_OPERATORS.contains(&word)
}
