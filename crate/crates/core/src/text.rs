//! Single-record text codecs: bracketed trees, `i-j` alignment lines,
//! role blocks and `surface_POS` token lines.
//!
//! Whole-file readers and writers live in the std companion crate; these
//! functions handle exactly one record each and never touch IO.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{Bracketed, ParseTree, Role, RoleAnnotation, Sentence, Span, WordAlignment};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Lexeme {
    Open,
    Close,
    Atom(String),
}

fn lex(line: &str) -> Vec<(usize, Lexeme)> {
    let mut out = Vec::new();
    let mut chars = line.chars().enumerate().peekable();
    while let Some((offset, c)) = chars.next() {
        match c {
            '(' => out.push((offset, Lexeme::Open)),
            ')' => out.push((offset, Lexeme::Close)),
            c if c.is_whitespace() => {}
            c => {
                let mut atom = String::new();
                atom.push(c);
                while let Some(&(_, n)) = chars.peek() {
                    if n == '(' || n == ')' || n.is_whitespace() {
                        break;
                    }
                    atom.push(n);
                    chars.next();
                }
                out.push((offset, Lexeme::Atom(atom)));
            }
        }
    }
    out
}

struct TreeParser {
    lexemes: Vec<(usize, Lexeme)>,
    pos: usize,
    end: usize,
}

impl TreeParser {
    fn offset(&self) -> usize {
        self.lexemes.get(self.pos).map(|l| l.0).unwrap_or(self.end)
    }

    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.to_string(),
        })
    }

    fn peek(&self) -> Option<&Lexeme> {
        self.lexemes.get(self.pos).map(|l| &l.1)
    }

    // node := '(' LABEL? ( WORD | node+ ) ')'
    fn node(&mut self) -> Result<Bracketed> {
        match self.peek() {
            Some(Lexeme::Open) => self.pos += 1,
            None => return self.err("unbalanced brackets: expected '('"),
            _ => return self.err("expected '('"),
        }
        let label = match self.peek() {
            Some(Lexeme::Atom(a)) => {
                let a = a.clone();
                self.pos += 1;
                a
            }
            _ => String::new(),
        };
        match self.peek() {
            Some(Lexeme::Atom(word)) => {
                let word = word.clone();
                self.pos += 1;
                if label.is_empty() {
                    return self.err("preterminal without a POS label");
                }
                self.close()?;
                Ok(Bracketed::Leaf { pos: label, word })
            }
            Some(Lexeme::Open) => {
                let mut children = Vec::new();
                while let Some(Lexeme::Open) = self.peek() {
                    children.push(self.node()?);
                }
                if let Some(Lexeme::Atom(_)) = self.peek() {
                    return self.err("word mixed with constituents");
                }
                self.close()?;
                if label.is_empty() {
                    // PTB wraps each tree in an unlabeled outer bracket
                    if children.len() == 1 {
                        return Ok(children.pop().unwrap());
                    }
                    return self.err("unlabeled constituent");
                }
                Ok(Bracketed::Inner { label, children })
            }
            Some(Lexeme::Close) => self.err("empty constituent"),
            None => self.err("unbalanced brackets: unexpected end of input"),
        }
    }

    fn close(&mut self) -> Result<()> {
        match self.peek() {
            Some(Lexeme::Close) => {
                self.pos += 1;
                Ok(())
            }
            None => self.err("unbalanced brackets: expected ')'"),
            _ => self.err("expected ')'"),
        }
    }
}

/// Parse one bracketed tree, e.g. `(S (NP (NNP Kim)) (VP (VBD promised)))`.
pub fn parse_tree(line: &str, expected_tokens: Option<usize>) -> Result<ParseTree> {
    let mut p = TreeParser {
        lexemes: lex(line),
        pos: 0,
        end: line.chars().count(),
    };
    let shape = p.node()?;
    if p.pos != p.lexemes.len() {
        return p.err("trailing input after tree");
    }
    let tree = ParseTree::from_bracketed(&shape)?;
    if let Some(n) = expected_tokens {
        if tree.sentence().len() != n {
            return Err(Error::Format(format!(
                "tree has {} tokens, expected {n}",
                tree.sentence().len()
            )));
        }
    }
    Ok(tree)
}

/// Parse a line of whitespace-separated `i-j` links.
pub fn parse_alignment(line: &str, n_src: usize, n_tgt: usize) -> Result<WordAlignment> {
    let mut links = Vec::new();
    for pair in line.split_whitespace() {
        let (s, t) = pair
            .split_once('-')
            .ok_or_else(|| Error::Format(format!("malformed link {pair:?}")))?;
        let s: usize = s
            .parse()
            .map_err(|_| Error::Format(format!("malformed link {pair:?}")))?;
        let t: usize = t
            .parse()
            .map_err(|_| Error::Format(format!("malformed link {pair:?}")))?;
        links.push((s, t));
    }
    WordAlignment::new(n_src, n_tgt, links)
}

pub fn serialize_alignment(al: &WordAlignment) -> String {
    let mut out = String::new();
    for (i, (s, t)) in al.links().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{s}-{t}");
    }
    out
}

fn parse_span(text: &str) -> Result<Span> {
    let (lo, hi) = text
        .split_once('-')
        .ok_or_else(|| Error::Format(format!("malformed span {text:?}")))?;
    let lo = lo
        .parse()
        .map_err(|_| Error::Format(format!("malformed span {text:?}")))?;
    let hi = hi
        .parse()
        .map_err(|_| Error::Format(format!("malformed span {text:?}")))?;
    Span::new(lo, hi)
}

/// Parse one role block: a `#<sentence-no> <frame> <predicate>` header
/// followed by `ROLE<TAB>lo-hi[,lo-hi...]` lines. A predicate of `-` means
/// the predicate position is unknown.
///
/// Returns the sentence number from the header together with the annotation.
pub fn parse_roles(block: &str) -> Result<(usize, RoleAnnotation)> {
    let mut lines = block.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty role block".into()))?;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::Format(format!("role block header must start with '#': {header:?}")))?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.len() != 3 {
        return Err(Error::Format(format!(
            "role block header needs 3 fields, found {}",
            fields.len()
        )));
    }
    let sentence: usize = fields[0]
        .parse()
        .map_err(|_| Error::Format(format!("bad sentence number {:?}", fields[0])))?;
    let predicate = match fields[2] {
        "-" => None,
        p => Some(
            p.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad predicate index {p:?}")))?,
        ),
    };
    let mut roles = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Format(format!(
                "role line needs 2 tab-separated fields: {line:?}"
            )));
        }
        let spans = fields[1].split(',').map(parse_span).collect::<Result<Vec<_>>>()?;
        roles.push(Role {
            label: fields[0].to_string(),
            spans,
        });
    }
    Ok((sentence, RoleAnnotation::new(fields[1], predicate, roles)?))
}

/// Inverse of [`parse_roles`]; lines are joined by `\n` with no trailing newline.
pub fn serialize_roles(sentence: usize, a: &RoleAnnotation) -> String {
    let mut out = match a.predicate {
        Some(p) => format!("#{sentence} {} {p}", a.frame),
        None => format!("#{sentence} {} -", a.frame),
    };
    for role in a.roles() {
        out.push('\n');
        out.push_str(&role.label);
        out.push('\t');
        for (i, s) in role.spans.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{s}");
        }
    }
    out
}

/// Parse a `surface_POS` token line. The POS is everything after the last `_`.
pub fn parse_tokens(line: &str) -> Result<Sentence> {
    let mut tokens = Vec::new();
    for item in line.split(' ') {
        let (surface, pos) = item
            .rsplit_once('_')
            .ok_or_else(|| Error::Format(format!("token {item:?} lacks a _POS suffix")))?;
        if surface.is_empty() || pos.is_empty() {
            return Err(Error::Format(format!("token {item:?} has an empty surface or POS")));
        }
        tokens.push((surface, pos));
    }
    Sentence::new(tokens)
}

pub fn serialize_tokens(s: &Sentence) -> String {
    let mut out = String::new();
    for (i, t) in s.tokens().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}_{}", t.surface, t.pos);
    }
    out
}
