//! Parsing of parenthesized combination strings — the inverse of the
//! `render` methods on combination trees and linear patterns.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! top  := expr
//! expr := term | term star term
//! term := name | "u" | "(" expr ")"
//! star := "*" ident?           -- the operator name is required when the
//!                              -- system has several operators
//! ```
//!
//! A name directly after `*` is taken as the operator name exactly when yet
//! another operand token follows it (`a *f b`); otherwise it is the right
//! operand of a bare star (`a*b`).
//!
//! Leaves are seed names from the system file (`u` marks the hole of a
//! linear pattern); every internal node is binary and, except at top level,
//! parenthesized — exactly what the renderers emit.

use anyhow::{bail, Result};
use bilinear::core::CompositionTree;
use bilinear::patterns::{LinearPattern, PatternTree};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Star,
    Name(String),
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                tokens.push(Token::Open);
            }
            ')' => {
                chars.next();
                tokens.push(Token::Close);
            }
            '*' => {
                chars.next();
                tokens.push(Token::Star);
            }
            // Names may start with a digit: the renderer's fallback for an
            // unnamed operator is its 1-based index ("*2").
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Name(name));
            }
            other => bail!("unexpected character {other:?} in combination string"),
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    seed_names: &'a [String],
    op_names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_ahead(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn resolve_seed(&self, name: &str) -> Result<usize> {
        if let Some(idx) = self.seed_names.iter().position(|n| n == name) {
            return Ok(idx);
        }
        // The renderer falls back to `s{index}` for unnamed seeds.
        if let Some(digits) = name.strip_prefix('s') {
            if let Ok(idx) = digits.parse::<usize>() {
                if idx >= 1 && idx <= self.seed_names.len() {
                    return Ok(idx - 1);
                }
            }
        }
        bail!(
            "unknown seed {name:?}; this system has seeds {:?}",
            self.seed_names
        );
    }

    fn resolve_op(&self, name: &str) -> Result<usize> {
        if name.is_empty() {
            if self.op_names.len() == 1 {
                return Ok(0);
            }
            bail!(
                "a bare \"*\" is ambiguous here: name the operator, one of {:?}",
                self.op_names
                    .iter()
                    .map(|n| format!("*{n}"))
                    .collect::<Vec<_>>()
            );
        }
        if let Some(idx) = self.op_names.iter().position(|n| n == name) {
            return Ok(idx);
        }
        // The renderer falls back to the 1-based index for unnamed operators.
        if let Ok(idx) = name.parse::<usize>() {
            if idx >= 1 && idx <= self.op_names.len() {
                return Ok(idx - 1);
            }
        }
        bail!(
            "unknown operator {name:?}; this system has operators {:?}",
            self.op_names
        );
    }

    fn parse_term(&mut self) -> Result<PatternTree> {
        match self.next() {
            Some(Token::Open) => {
                let inner = self.parse_expr()?;
                match self.next() {
                    Some(Token::Close) => Ok(inner),
                    _ => bail!("missing closing parenthesis"),
                }
            }
            Some(Token::Name(name)) if name == "u" => Ok(PatternTree::marked()),
            Some(Token::Name(name)) => Ok(PatternTree::leaf(self.resolve_seed(&name)?)),
            Some(token) => bail!("expected a leaf or \"(\", found {token:?}"),
            None => bail!("combination string ended unexpectedly"),
        }
    }

    fn parse_expr(&mut self) -> Result<PatternTree> {
        let left = self.parse_term()?;
        if let Some(Token::Star) = self.peek() {
            self.next();
            // A name here is the operator's exactly when an operand token
            // follows it; otherwise it is itself the right operand.
            let op_name = match (self.peek(), self.peek_ahead(1)) {
                (Some(Token::Name(name)), Some(Token::Name(_) | Token::Open)) => {
                    let name = name.clone();
                    self.next();
                    name
                }
                _ => String::new(),
            };
            let op = self.resolve_op(&op_name)?;
            let right = self.parse_term()?;
            return Ok(PatternTree::node(op, left, right));
        }
        Ok(left)
    }
}

fn parse_raw(input: &str, seed_names: &[String], op_names: &[String]) -> Result<PatternTree> {
    let mut parser = Parser {
        tokens: tokenize(input)?,
        pos: 0,
        seed_names,
        op_names,
    };
    let tree = parser.parse_expr()?;
    if let Some(extra) = parser.peek() {
        bail!("trailing input after the combination: {extra:?}");
    }
    Ok(tree)
}

fn to_combination(tree: &PatternTree) -> Result<CompositionTree> {
    match tree {
        PatternTree::Marked => {
            bail!("the mark \"u\" belongs to patterns; combinations have only seeds")
        }
        PatternTree::Leaf { seed } => Ok(CompositionTree::leaf(*seed)),
        PatternTree::Node { op, left, right } => Ok(CompositionTree::node(
            *op,
            to_combination(left)?,
            to_combination(right)?,
        )),
    }
}

/// Parses a combination string (no marks) into a tree.
pub fn parse_tree(
    input: &str,
    seed_names: &[String],
    op_names: &[String],
) -> Result<CompositionTree> {
    to_combination(&parse_raw(input, seed_names, op_names)?)
}

/// Parses a linear-pattern string: exactly one leaf must be the mark `u`.
pub fn parse_pattern(
    input: &str,
    seed_names: &[String],
    op_names: &[String],
) -> Result<LinearPattern> {
    Ok(LinearPattern::new(parse_raw(input, seed_names, op_names)?)?)
}
