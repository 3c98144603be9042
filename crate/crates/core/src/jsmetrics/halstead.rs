use std::collections::HashSet;

use super::lexer::Token;

/// Raw operator/operand counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HalsteadCounts {
    /// distinct operators
    pub eta1: u32,
    /// distinct operands
    pub eta2: u32,
    /// total operators
    pub n1: u32,
    /// total operands
    pub n2: u32,
}

/// Derived Halstead measures.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HalsteadSuite {
    pub vocabulary: u32,
    pub length: u32,
    pub calculated_length: f64,
    pub volume: f64,
    pub difficulty: f64,
    pub effort: f64,
    pub time: f64,
    pub bugs: f64,
}

pub fn count_halstead(tokens: &[Token]) -> HalsteadCounts {
    let mut operators: HashSet<&str> = HashSet::new();
    let mut operands: HashSet<&str> = HashSet::new();
    let mut counts = HalsteadCounts::default();
    for tok in tokens {
        if tok.kind.is_operator() {
            counts.n1 += 1;
            operators.insert(&tok.text);
        } else if tok.kind.is_operand() {
            counts.n2 += 1;
            operands.insert(&tok.text);
        }
    }
    counts.eta1 = operators.len() as u32;
    counts.eta2 = operands.len() as u32;
    counts
}

fn x_log2_x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

pub fn halstead_suite(c: HalsteadCounts) -> HalsteadSuite {
    let vocabulary = c.eta1 + c.eta2;
    let length = c.n1 + c.n2;
    if vocabulary == 0 {
        return HalsteadSuite::default();
    }
    let (eta1, eta2) = (f64::from(c.eta1), f64::from(c.eta2));
    let calculated_length = x_log2_x(eta1) + x_log2_x(eta2);
    let volume = f64::from(length) * f64::from(vocabulary).log2();
    // no operands at all means nothing to be difficult about
    let difficulty = if c.eta2 == 0 {
        0.0
    } else {
        (eta1 / 2.0) * (f64::from(c.n2) / eta2)
    };
    let effort = difficulty * volume;
    HalsteadSuite {
        vocabulary,
        length,
        calculated_length,
        volume,
        difficulty,
        effort,
        time: effort / 18.0,
        bugs: effort.powf(2.0 / 3.0) / 3000.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsmetrics::tokenize;
    use approx::assert_relative_eq;

    fn counts(src: &str) -> HalsteadCounts {
        count_halstead(&tokenize(src).unwrap().tokens)
    }

    #[test]
    fn simple_counts() {
        let c = counts("a + b");
        assert_eq!((c.eta1, c.eta2, c.n1, c.n2), (1, 2, 1, 2));
        let c = counts("a + a");
        assert_eq!((c.eta1, c.eta2, c.n1, c.n2), (1, 1, 1, 2));
        assert_eq!(counts(""), HalsteadCounts::default());
    }

    #[test]
    fn comments_do_not_count() {
        assert_eq!(counts("a + b /* c + d */ // e"), counts("a + b"));
    }

    #[test]
    fn suite_for_one_two_one_two() {
        let s = halstead_suite(HalsteadCounts { eta1: 1, eta2: 2, n1: 1, n2: 2 });
        assert_eq!(s.vocabulary, 3);
        assert_eq!(s.length, 3);
        // 3 * log2(3)
        assert_relative_eq!(s.volume, 4.754_887_502_163_468, max_relative = 1e-12);
        assert_relative_eq!(s.difficulty, 0.5);
        assert_relative_eq!(s.effort, 2.377_443_751_081_734, max_relative = 1e-12);
        assert_relative_eq!(s.time, 0.132_080_208_393_429_68, max_relative = 1e-12);
        assert_relative_eq!(s.bugs, 5.937_709_038_332_07e-4, max_relative = 1e-12);
        // 0 log 0 + 2 log2 2
        assert_relative_eq!(s.calculated_length, 2.0);
    }

    #[test]
    fn suite_for_empty_program_is_zero() {
        assert_eq!(halstead_suite(HalsteadCounts::default()), HalsteadSuite::default());
    }

    #[test]
    fn coinhive_row_vocabulary_and_length() {
        let s = halstead_suite(HalsteadCounts { eta1: 37, eta2: 331, n1: 1697, n2: 1529 });
        assert_eq!(s.vocabulary, 368);
        assert_eq!(s.length, 3226);
    }
}
