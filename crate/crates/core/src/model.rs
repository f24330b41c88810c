//! Bi-sentences, constituency trees, word alignments and role annotations.
//!
//! All token indices are 0-based and all spans are inclusive intervals.
//! Values are immutable once constructed; every constructor validates the
//! invariants of its type.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Identifier of a node within one [`ParseTree`].
pub type NodeId = usize;

/// Inclusive token interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::Validation(format!("span {lo}-{hi} has lo > hi")));
        }
        Ok(Span { lo, hi })
    }

    pub fn single(i: usize) -> Self {
        Span { lo: i, hi: i }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, i: usize) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn covers(&self, other: &Span) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn tokens(&self) -> core::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

/// Collapse a token set into its maximal disjoint intervals, in order.
pub fn spans_of(tokens: &BTreeSet<usize>) -> Vec<Span> {
    let mut spans: Vec<Span> = Vec::new();
    for &t in tokens {
        match spans.last_mut() {
            Some(last) if last.hi + 1 == t => last.hi = t,
            _ => spans.push(Span::single(t)),
        }
    }
    spans
}

/// Union of the tokens covered by `spans`.
pub fn tokens_of(spans: &[Span]) -> BTreeSet<usize> {
    spans.iter().flat_map(|s| s.tokens()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub surface: String,
    pub pos: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
}

impl Sentence {
    /// Build a sentence from `(surface, pos)` pairs; indices are assigned in order.
    pub fn new<I, S, P>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, P)>,
        S: Into<String>,
        P: Into<String>,
    {
        let tokens: Vec<Token> = tokens
            .into_iter()
            .enumerate()
            .map(|(index, (surface, pos))| Token {
                index,
                surface: surface.into(),
                pos: pos.into(),
            })
            .collect();
        if tokens.is_empty() {
            return Err(Error::Validation("sentence has no tokens".into()));
        }
        Ok(Sentence { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token(&self, i: usize) -> Option<&Token> {
        self.tokens.get(i)
    }
}

/// A node of a constituency tree.
///
/// Preterminals (`is_terminal`) cover exactly one token and carry its POS tag
/// as their label. A node without a span is an empty padding node; trees
/// never contain those, but matcher output may refer to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constituent {
    pub id: NodeId,
    pub label: String,
    pub span: Option<Span>,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    pub is_terminal: bool,
}

impl Constituent {
    pub fn empty(id: NodeId) -> Self {
        Constituent {
            id,
            label: String::new(),
            span: None,
            children: Vec::new(),
            parent: None,
            is_terminal: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.span.is_none()
    }
}

/// Nested tree shape used to build a [`ParseTree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bracketed {
    Inner { label: String, children: Vec<Bracketed> },
    Leaf { pos: String, word: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    sentence: Sentence,
    nodes: Vec<Constituent>,
    root: NodeId,
    preterminals: Vec<NodeId>,
}

impl ParseTree {
    /// Number nodes in pre-order and compute spans bottom-up.
    pub fn from_bracketed(tree: &Bracketed) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut words = Vec::new();
        let mut preterminals = Vec::new();
        build_node(tree, None, &mut nodes, &mut words, &mut preterminals)?;
        let sentence = Sentence::new(words)?;
        Ok(ParseTree {
            sentence,
            nodes,
            root: 0,
            preterminals,
        })
    }

    pub fn sentence(&self) -> &Sentence {
        &self.sentence
    }

    pub fn root(&self) -> &Constituent {
        &self.nodes[self.root]
    }

    pub fn root_id(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Constituent {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Constituent] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Token indices dominated by `id`. Empty nodes and unknown ids yield nothing.
    pub fn yield_of(&self, id: NodeId) -> BTreeSet<usize> {
        self.nodes
            .get(id)
            .and_then(|c| c.span)
            .map(|s| s.tokens().collect())
            .unwrap_or_default()
    }

    pub fn span_of(&self, id: NodeId) -> Option<Span> {
        self.nodes.get(id).and_then(|c| c.span)
    }

    /// The preterminal node covering token `i`.
    pub fn preterminal(&self, i: usize) -> Option<NodeId> {
        self.preterminals.get(i).copied()
    }

    /// Proper ancestors of `id`, nearest first.
    pub fn ancestors(&self, id: NodeId) -> Ancestors<'_> {
        Ancestors {
            tree: self,
            next: self.nodes.get(id).and_then(|c| c.parent),
        }
    }

    /// Whether `a` dominates `b` (reflexively).
    pub fn dominates(&self, a: NodeId, b: NodeId) -> bool {
        a == b || self.ancestors(b).any(|x| x == a)
    }

    /// Render in single-line bracketed notation.
    pub fn to_bracketed(&self) -> String {
        let mut out = String::new();
        self.render(self.root, &mut out);
        out
    }

    fn render(&self, id: NodeId, out: &mut String) {
        let node = &self.nodes[id];
        out.push('(');
        out.push_str(&node.label);
        if node.is_terminal {
            out.push(' ');
            let lo = node.span.map(|s| s.lo).unwrap_or(0);
            out.push_str(&self.sentence.tokens[lo].surface);
        } else {
            for &c in &node.children {
                out.push(' ');
                self.render(c, out);
            }
        }
        out.push(')');
    }
}

pub struct Ancestors<'a> {
    tree: &'a ParseTree,
    next: Option<NodeId>,
}

impl Iterator for Ancestors<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let cur = self.next?;
        self.next = self.tree.nodes[cur].parent;
        Some(cur)
    }
}

fn build_node(
    tree: &Bracketed,
    parent: Option<NodeId>,
    nodes: &mut Vec<Constituent>,
    words: &mut Vec<(String, String)>,
    preterminals: &mut Vec<NodeId>,
) -> Result<NodeId> {
    let id = nodes.len();
    match tree {
        Bracketed::Leaf { pos, word } => {
            let i = words.len();
            words.push((word.clone(), pos.clone()));
            preterminals.push(id);
            nodes.push(Constituent {
                id,
                label: pos.clone(),
                span: Some(Span::single(i)),
                children: Vec::new(),
                parent,
                is_terminal: true,
            });
        }
        Bracketed::Inner { label, children } => {
            if children.is_empty() {
                return Err(Error::Validation(format!("constituent {label} has no children")));
            }
            nodes.push(Constituent {
                id,
                label: label.clone(),
                span: None,
                children: Vec::new(),
                parent,
                is_terminal: false,
            });
            let mut kids = Vec::with_capacity(children.len());
            for child in children {
                kids.push(build_node(child, Some(id), nodes, words, preterminals)?);
            }
            // children are built left to right over consecutive tokens, so the
            // parent span is the first child's lo through the last child's hi
            let lo = nodes[kids[0]].span.map(|s| s.lo);
            let hi = nodes[*kids.last().unwrap()].span.map(|s| s.hi);
            nodes[id].span = match (lo, hi) {
                (Some(lo), Some(hi)) => Some(Span { lo, hi }),
                _ => None,
            };
            nodes[id].children = kids;
        }
    }
    Ok(id)
}

/// Word alignment links `(source, target)` for one bi-sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordAlignment {
    links: BTreeSet<(usize, usize)>,
    n_src: usize,
    n_tgt: usize,
}

impl WordAlignment {
    pub fn new<I>(n_src: usize, n_tgt: usize, links: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (s, t) in links {
            if s >= n_src || t >= n_tgt {
                return Err(Error::Format(format!(
                    "link {s}-{t} out of range for lengths {n_src}/{n_tgt}"
                )));
            }
            set.insert((s, t));
        }
        Ok(WordAlignment {
            links: set,
            n_src,
            n_tgt,
        })
    }

    pub fn empty(n_src: usize, n_tgt: usize) -> Self {
        WordAlignment {
            links: BTreeSet::new(),
            n_src,
            n_tgt,
        }
    }

    pub fn n_src(&self) -> usize {
        self.n_src
    }

    pub fn n_tgt(&self) -> usize {
        self.n_tgt
    }

    pub fn links(&self) -> &BTreeSet<(usize, usize)> {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, s: usize, t: usize) -> bool {
        self.links.contains(&(s, t))
    }

    pub fn targets_of(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.links.range((s, 0)..=(s, usize::MAX)).map(|&(_, t)| t)
    }

    pub fn sources_of(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.links.iter().filter(move |l| l.1 == t).map(|&(s, _)| s)
    }

    /// The same links seen from the target side.
    pub fn transpose(&self) -> Self {
        WordAlignment {
            links: self.links.iter().map(|&(s, t)| (t, s)).collect(),
            n_src: self.n_tgt,
            n_tgt: self.n_src,
        }
    }

    /// Intersection symmetrization. `other` must already be in source-target orientation.
    pub fn intersect(&self, other: &WordAlignment) -> Result<Self> {
        if self.n_src != other.n_src || self.n_tgt != other.n_tgt {
            return Err(Error::Validation(format!(
                "alignment lengths differ: {}/{} vs {}/{}",
                self.n_src, self.n_tgt, other.n_src, other.n_tgt
            )));
        }
        Ok(WordAlignment {
            links: self.links.intersection(&other.links).copied().collect(),
            n_src: self.n_src,
            n_tgt: self.n_tgt,
        })
    }
}

/// Free-function form of [`WordAlignment::intersect`].
pub fn intersect_alignments(fwd: &WordAlignment, bwd: &WordAlignment) -> Result<WordAlignment> {
    fwd.intersect(bwd)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Role {
    pub label: String,
    pub spans: Vec<Span>,
}

impl Role {
    pub fn tokens(&self) -> BTreeSet<usize> {
        tokens_of(&self.spans)
    }
}

/// One frame with its labeled role spans. Role order is preserved as given.
///
/// `predicate` is the frame-evoking token; projected annotations leave it
/// unset when the source predicate has no aligned target word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleAnnotation {
    pub frame: String,
    pub predicate: Option<usize>,
    roles: Vec<Role>,
}

impl RoleAnnotation {
    pub fn new(frame: impl Into<String>, predicate: Option<usize>, roles: Vec<Role>) -> Result<Self> {
        let frame = frame.into();
        if frame.is_empty() || frame.contains(char::is_whitespace) {
            return Err(Error::Validation(format!("invalid frame name {frame:?}")));
        }
        for (i, role) in roles.iter().enumerate() {
            if role.label.is_empty() || role.label.contains(char::is_whitespace) {
                return Err(Error::Validation(format!("invalid role label {:?}", role.label)));
            }
            if roles[..i].iter().any(|r| r.label == role.label) {
                return Err(Error::Validation(format!("duplicate role label {}", role.label)));
            }
            for (j, a) in role.spans.iter().enumerate() {
                if a.lo > a.hi {
                    return Err(Error::Validation(format!("span {a} has lo > hi")));
                }
                if let Some(b) = role.spans[..j].iter().find(|b| b.overlaps(a)) {
                    return Err(Error::Validation(format!(
                        "role {} has overlapping spans {b} and {a}",
                        role.label
                    )));
                }
            }
        }
        Ok(RoleAnnotation {
            frame,
            predicate,
            roles,
        })
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn role(&self, label: &str) -> Option<&Role> {
        self.roles.iter().find(|r| r.label == label)
    }

    /// Check that every index fits a sentence of `n` tokens.
    pub fn check_range(&self, n: usize) -> Result<()> {
        if let Some(p) = self.predicate.filter(|&p| p >= n) {
            return Err(Error::Validation(format!("predicate {p} out of range for {n} tokens")));
        }
        for role in &self.roles {
            if let Some(s) = role.spans.iter().find(|s| s.hi >= n) {
                return Err(Error::Validation(format!(
                    "role {} span {s} out of range for {n} tokens",
                    role.label
                )));
            }
        }
        Ok(())
    }
}

/// One side of a bi-sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct Side {
    pub sentence: Sentence,
    pub tree: Option<ParseTree>,
    pub roles: Option<RoleAnnotation>,
}

impl Side {
    pub fn new(sentence: Sentence) -> Self {
        Side {
            sentence,
            tree: None,
            roles: None,
        }
    }

    pub fn from_tree(tree: ParseTree) -> Self {
        Side {
            sentence: tree.sentence().clone(),
            tree: Some(tree),
            roles: None,
        }
    }

    pub fn with_roles(mut self, roles: RoleAnnotation) -> Self {
        self.roles = Some(roles);
        self
    }

    pub fn len(&self) -> usize {
        self.sentence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentence.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiSentence {
    pub src: Side,
    pub tgt: Side,
    pub alignment: WordAlignment,
}

impl BiSentence {
    pub fn new(src: Side, tgt: Side, alignment: WordAlignment) -> Result<Self> {
        if alignment.n_src() != src.len() || alignment.n_tgt() != tgt.len() {
            return Err(Error::Validation(format!(
                "alignment lengths {}/{} do not match sentence lengths {}/{}",
                alignment.n_src(),
                alignment.n_tgt(),
                src.len(),
                tgt.len()
            )));
        }
        for (side, name) in [(&src, "source"), (&tgt, "target")] {
            if let Some(tree) = &side.tree {
                if tree.sentence().len() != side.len() {
                    return Err(Error::Validation(format!(
                        "{name} tree has {} tokens but the sentence has {}",
                        tree.sentence().len(),
                        side.len()
                    )));
                }
            }
            if let Some(roles) = &side.roles {
                roles.check_range(side.len())?;
            }
        }
        Ok(BiSentence { src, tgt, alignment })
    }
}
