//! Alignment-based similarity between words and constituents, the
//! similarity-to-weight transform, and the word filters.
//!
//! Filters never edit a bi-sentence. They produce a [`BiView`], an exclusion
//! mask over both token sequences, so that token indices downstream always
//! refer to the original sentences. A link is *active* when neither endpoint
//! is excluded; only active links feed similarity computation.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::model::{BiSentence, NodeId, ParseTree, Sentence, WordAlignment};

/// Default content-word POS prefixes: adjectives, adverbs, verbs and nouns in
/// the Penn Treebank and STTS/TIGER tagsets.
#[rustfmt::skip]
pub const DEFAULT_CONTENT_POS_PREFIXES: &[&str] = &[
    // PTB
    "JJ", "RB", "VB", "NN",
    // STTS
    "ADJ", "ADV", "VV", "VA", "VM", "NE",
];

/// Default cap substituted for `-ln 0`.
pub const DEFAULT_BIG: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    SrcToTgt,
    TgtToSrc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterConfig {
    pub content_pos_prefixes: Vec<String>,
    /// Exclude words without an alignment link.
    pub na: bool,
    /// Exclude non-content words.
    pub nc: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            content_pos_prefixes: DEFAULT_CONTENT_POS_PREFIXES.iter().map(|p| p.to_string()).collect(),
            na: false,
            nc: false,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nc && self.content_pos_prefixes.is_empty() {
            return Err(Error::Config(
                "the NC filter needs at least one content POS prefix".into(),
            ));
        }
        Ok(())
    }

    pub fn is_content(&self, pos: &str) -> bool {
        self.content_pos_prefixes.iter().any(|p| pos.starts_with(p.as_str()))
    }
}

/// A word alignment seen through token exclusion masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiView<'a> {
    alignment: &'a WordAlignment,
    src_keep: Vec<bool>,
    tgt_keep: Vec<bool>,
}

impl<'a> BiView<'a> {
    /// A view with nothing excluded.
    pub fn new(alignment: &'a WordAlignment) -> Self {
        BiView {
            alignment,
            src_keep: alloc::vec![true; alignment.n_src()],
            tgt_keep: alloc::vec![true; alignment.n_tgt()],
        }
    }

    /// Apply the filters enabled in `cfg`: NA first, then NC.
    pub fn filtered(b: &'a BiSentence, cfg: &FilterConfig) -> Result<Self> {
        cfg.validate()?;
        let mut view = BiView::new(&b.alignment);
        if cfg.na {
            view = view.na_filter();
        }
        if cfg.nc {
            view = view.nc_filter(&b.src.sentence, &b.tgt.sentence, cfg)?;
        }
        Ok(view)
    }

    pub fn alignment(&self) -> &WordAlignment {
        self.alignment
    }

    pub fn src_kept(&self, i: usize) -> bool {
        self.src_keep.get(i).copied().unwrap_or(false)
    }

    pub fn tgt_kept(&self, j: usize) -> bool {
        self.tgt_keep.get(j).copied().unwrap_or(false)
    }

    pub fn is_active(&self, s: usize, t: usize) -> bool {
        self.alignment.contains(s, t) && self.src_kept(s) && self.tgt_kept(t)
    }

    pub fn active_links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.alignment
            .links()
            .iter()
            .copied()
            .filter(move |&(s, t)| self.src_kept(s) && self.tgt_kept(t))
    }

    pub fn excluded_src(&self) -> impl Iterator<Item = usize> + '_ {
        self.src_keep.iter().enumerate().filter(|(_, k)| !**k).map(|(i, _)| i)
    }

    pub fn excluded_tgt(&self) -> impl Iterator<Item = usize> + '_ {
        self.tgt_keep.iter().enumerate().filter(|(_, k)| !**k).map(|(i, _)| i)
    }

    /// Exclude every token that has no active link.
    pub fn na_filter(self) -> Self {
        let mut src_linked = alloc::vec![false; self.src_keep.len()];
        let mut tgt_linked = alloc::vec![false; self.tgt_keep.len()];
        for (s, t) in self.active_links() {
            src_linked[s] = true;
            tgt_linked[t] = true;
        }
        BiView {
            alignment: self.alignment,
            src_keep: src_linked,
            tgt_keep: tgt_linked,
        }
    }

    /// Exclude every token whose POS tag does not start with a content prefix.
    pub fn nc_filter(mut self, src: &Sentence, tgt: &Sentence, cfg: &FilterConfig) -> Result<Self> {
        for (keep, sentence, side) in [(&mut self.src_keep, src, "source"), (&mut self.tgt_keep, tgt, "target")] {
            if sentence.len() != keep.len() {
                return Err(Error::Validation(format!(
                    "{side} sentence length {} does not match the alignment",
                    sentence.len()
                )));
            }
            for (k, tok) in keep.iter_mut().zip(sentence.tokens()) {
                if tok.pos.is_empty() {
                    return Err(Error::MissingInput(format!(
                        "{side} token {} has no POS tag (required by the NC filter)",
                        tok.index
                    )));
                }
                *k = *k && cfg.is_content(&tok.pos);
            }
        }
        Ok(self)
    }
}

/// View of `b` with unaligned words excluded.
pub fn na_filter(b: &BiSentence) -> BiView<'_> {
    BiView::new(&b.alignment).na_filter()
}

/// View of `b` with non-content words excluded.
pub fn nc_filter<'a>(b: &'a BiSentence, cfg: &FilterConfig) -> Result<BiView<'a>> {
    BiView::new(&b.alignment).nc_filter(&b.src.sentence, &b.tgt.sentence, cfg)
}

/// Binary word similarity: 1 for a linked pair, 0 otherwise.
pub fn word_sim(i: usize, j: usize, al: &WordAlignment) -> f64 {
    if al.contains(i, j) {
        1.0
    } else {
        0.0
    }
}

/// Tokens on the opposite side linked (by active links) to the kept part of `c`'s yield.
pub fn aligned_words(tree: &ParseTree, c: NodeId, view: &BiView<'_>, direction: Direction) -> BTreeSet<usize> {
    let yield_ = tree.yield_of(c);
    match direction {
        Direction::SrcToTgt => view
            .active_links()
            .filter(|(s, _)| yield_.contains(s))
            .map(|(_, t)| t)
            .collect(),
        Direction::TgtToSrc => view
            .active_links()
            .filter(|(_, t)| yield_.contains(t))
            .map(|(s, _)| s)
            .collect(),
    }
}

/// Jaccard coefficient of two token sets; 0 when both are empty.
pub fn jaccard(a: &FixedBitSet, b: &FixedBitSet) -> f64 {
    let union = a.union_count(b);
    if union == 0 {
        return 0.0;
    }
    a.intersection_count(b) as f64 / union as f64
}

/// Dense similarity matrix between two unit sequences, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    src_units: Vec<usize>,
    tgt_units: Vec<usize>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn new(src_units: Vec<usize>, tgt_units: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if values.len() != src_units.len() * tgt_units.len() {
            return Err(Error::Validation(format!(
                "{} values for a {}x{} matrix",
                values.len(),
                src_units.len(),
                tgt_units.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Validation(format!("similarity {v} outside [0,1]")));
        }
        Ok(SimilarityMatrix {
            src_units,
            tgt_units,
            values,
        })
    }

    /// Units are numbered `0..rows` and `0..cols`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Validation("ragged similarity rows".into()));
        }
        SimilarityMatrix::new(
            (0..rows.len()).collect(),
            (0..cols).collect(),
            rows.iter().flatten().copied().collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.src_units.len()
    }

    pub fn cols(&self) -> usize {
        self.tgt_units.len()
    }

    pub fn src_units(&self) -> &[usize] {
        &self.src_units
    }

    pub fn tgt_units(&self) -> &[usize] {
        &self.tgt_units
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols() + j]
    }
}

/// `min(-ln sim, big)` for every cell of a [`SimilarityMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    src_units: Vec<usize>,
    tgt_units: Vec<usize>,
    values: Vec<f64>,
    big: f64,
}

impl WeightMatrix {
    pub fn rows(&self) -> usize {
        self.src_units.len()
    }

    pub fn cols(&self) -> usize {
        self.tgt_units.len()
    }

    pub fn src_units(&self) -> &[usize] {
        &self.src_units
    }

    pub fn tgt_units(&self) -> &[usize] {
        &self.tgt_units
    }

    pub fn big(&self) -> f64 {
        self.big
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols() + j]
    }

    /// Whether cell `(i, j)` carries the cap rather than a finite `-ln sim`.
    pub fn is_saturated(&self, i: usize, j: usize) -> bool {
        self.get(i, j) >= self.big
    }
}

pub fn weight_of(sim: f64, big: f64) -> f64 {
    let w = -libm::log(sim);
    if w < big {
        // -ln 1 is -0.0
        w + 0.0
    } else {
        big
    }
}

pub fn to_weights(m: &SimilarityMatrix, big: f64) -> Result<WeightMatrix> {
    if !(big > 0.0 && big.is_finite()) {
        return Err(Error::Config(format!("big must be finite and positive, got {big}")));
    }
    Ok(WeightMatrix {
        src_units: m.src_units.clone(),
        tgt_units: m.tgt_units.clone(),
        values: m.values.iter().map(|&s| weight_of(s, big)).collect(),
        big,
    })
}

/// Precomputed filtered yields and alignment images for every node of two trees.
pub struct SimContext<'a> {
    src: &'a ParseTree,
    tgt: &'a ParseTree,
    src_yield: Vec<FixedBitSet>,
    tgt_yield: Vec<FixedBitSet>,
    src_image: Vec<FixedBitSet>,
    tgt_image: Vec<FixedBitSet>,
}

impl<'a> SimContext<'a> {
    pub fn new(src: &'a ParseTree, tgt: &'a ParseTree, view: &BiView<'_>) -> Result<Self> {
        let (ns, nt) = (src.sentence().len(), tgt.sentence().len());
        if view.alignment().n_src() != ns || view.alignment().n_tgt() != nt {
            return Err(Error::Validation(format!(
                "alignment lengths {}/{} do not match trees {ns}/{nt}",
                view.alignment().n_src(),
                view.alignment().n_tgt()
            )));
        }
        let yields = |tree: &ParseTree, n: usize, kept: &dyn Fn(usize) -> bool| -> Vec<FixedBitSet> {
            tree.nodes()
                .iter()
                .map(|c| {
                    let mut set = FixedBitSet::with_capacity(n);
                    if let Some(span) = c.span {
                        for i in span.tokens().filter(|&i| kept(i)) {
                            set.insert(i);
                        }
                    }
                    set
                })
                .collect()
        };
        let src_yield = yields(src, ns, &|i| view.src_kept(i));
        let tgt_yield = yields(tgt, nt, &|j| view.tgt_kept(j));
        let links: Vec<(usize, usize)> = view.active_links().collect();
        let src_image = src_yield
            .iter()
            .map(|y| {
                let mut set = FixedBitSet::with_capacity(nt);
                for &(s, t) in &links {
                    if y.contains(s) {
                        set.insert(t);
                    }
                }
                set
            })
            .collect();
        let tgt_image = tgt_yield
            .iter()
            .map(|y| {
                let mut set = FixedBitSet::with_capacity(ns);
                for &(s, t) in &links {
                    if y.contains(t) {
                        set.insert(s);
                    }
                }
                set
            })
            .collect();
        Ok(SimContext {
            src,
            tgt,
            src_yield,
            tgt_yield,
            src_image,
            tgt_image,
        })
    }

    pub fn src_tree(&self) -> &ParseTree {
        self.src
    }

    pub fn tgt_tree(&self) -> &ParseTree {
        self.tgt
    }

    /// Directed overlap. For [`Direction::SrcToTgt`], `from` is a source node
    /// and `to` a target node; the reverse otherwise.
    pub fn overlap(&self, direction: Direction, from: NodeId, to: NodeId) -> f64 {
        let (image, yield_) = match direction {
            Direction::SrcToTgt => (self.src_image.get(from), self.tgt_yield.get(to)),
            Direction::TgtToSrc => (self.tgt_image.get(from), self.src_yield.get(to)),
        };
        match (image, yield_) {
            (Some(a), Some(b)) => jaccard(a, b),
            _ => 0.0,
        }
    }

    /// Mean of the two directed overlaps. Unknown or empty nodes score 0.
    pub fn constituent_sim(&self, c_s: NodeId, c_t: NodeId) -> f64 {
        let real = |tree: &ParseTree, id: NodeId| tree.nodes().get(id).is_some_and(|c| !c.is_empty());
        if !real(self.src, c_s) || !real(self.tgt, c_t) {
            return 0.0;
        }
        (self.overlap(Direction::SrcToTgt, c_s, c_t) + self.overlap(Direction::TgtToSrc, c_t, c_s)) / 2.0
    }

    pub fn matrix(&self, src_units: &[NodeId], tgt_units: &[NodeId]) -> SimilarityMatrix {
        let values = src_units
            .iter()
            .flat_map(|&s| tgt_units.iter().map(move |&t| (s, t)))
            .map(|(s, t)| self.constituent_sim(s, t))
            .collect();
        SimilarityMatrix {
            src_units: src_units.to_vec(),
            tgt_units: tgt_units.to_vec(),
            values,
        }
    }
}

/// Binary similarity matrix over all token pairs, using active links only.
pub fn word_similarity_matrix(view: &BiView<'_>) -> SimilarityMatrix {
    let (ns, nt) = (view.alignment().n_src(), view.alignment().n_tgt());
    let values = (0..ns)
        .flat_map(|i| (0..nt).map(move |j| (i, j)))
        .map(|(i, j)| if view.is_active(i, j) { 1.0 } else { 0.0 })
        .collect();
    SimilarityMatrix {
        src_units: (0..ns).collect(),
        tgt_units: (0..nt).collect(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Side;
    use alloc::vec;

    fn node(tree: &ParseTree, label: &str, lo: usize, hi: usize) -> NodeId {
        tree.nodes()
            .iter()
            .filter(|n| n.label == label && n.span.is_some_and(|s| s.lo == lo && s.hi == hi))
            .map(|n| n.id)
            .next_back()
            .unwrap()
    }

    #[test]
    fn kim_aligned_words() {
        let b = fixtures::kim();
        let src = b.src.tree.as_ref().unwrap();
        let view = BiView::new(&b.alignment);
        let vp = node(src, "VP", 2, 5);
        // pünktlich = 3, zu = 4
        assert_eq!(
            aligned_words(src, vp, &view, Direction::SrcToTgt),
            [3, 4].into_iter().collect()
        );
        // "be" has no links
        let be = src.preterminal(3).unwrap();
        assert!(aligned_words(src, be, &view, Direction::SrcToTgt).is_empty());
        let all: BTreeSet<usize> = b.alignment.links().iter().map(|l| l.1).collect();
        assert_eq!(aligned_words(src, src.root_id(), &view, Direction::SrcToTgt), all);
    }

    #[test]
    fn kim_overlaps() {
        let b = fixtures::kim();
        let (src, tgt) = (b.src.tree.as_ref().unwrap(), b.tgt.tree.as_ref().unwrap());
        let view = BiView::new(&b.alignment);
        let ctx = SimContext::new(src, tgt, &view).unwrap();
        let (cs, ct) = (node(src, "VP", 2, 5), node(tgt, "S", 3, 5));
        assert!((ctx.overlap(Direction::SrcToTgt, cs, ct) - 2.0 / 3.0).abs() < 1e-12);
        assert!((ctx.overlap(Direction::TgtToSrc, ct, cs) - 0.5).abs() < 1e-12);
        assert!((ctx.constituent_sim(cs, ct) - 7.0 / 12.0).abs() < 1e-12);
        // the unaligned comma overlaps nothing
        let comma = tgt.preterminal(2).unwrap();
        assert_eq!(ctx.constituent_sim(cs, comma), 0.0);
        // Kim <-> Kim preterminals are mutually aligned
        assert_eq!(
            ctx.constituent_sim(src.preterminal(0).unwrap(), tgt.preterminal(0).unwrap()),
            1.0
        );
        // out-of-tree ids behave like empty padding nodes
        assert_eq!(ctx.constituent_sim(cs, 999), 0.0);
    }

    #[test]
    fn weights() {
        let m = SimilarityMatrix::from_rows(&[vec![1.0, 0.0, 0.5]]).unwrap();
        let w = to_weights(&m, 1e6).unwrap();
        assert_eq!(w.get(0, 0), 0.0);
        assert!(w.get(0, 0).is_sign_positive());
        assert_eq!(w.get(0, 1), 1e6);
        assert!(w.is_saturated(0, 1));
        assert!((w.get(0, 2) - core::f64::consts::LN_2).abs() < 1e-15);
        assert!(matches!(to_weights(&m, 0.0), Err(Error::Config(_))));
        assert!(matches!(to_weights(&m, -1.0), Err(Error::Config(_))));
        assert!(SimilarityMatrix::from_rows(&[vec![1.5]]).is_err());
    }

    #[test]
    fn word_similarity() {
        let al = WordAlignment::new(2, 2, [(0, 1)]).unwrap();
        assert_eq!(word_sim(0, 1, &al), 1.0);
        assert_eq!(word_sim(0, 0, &al), 0.0);
        assert_eq!(word_sim(1, 1, &WordAlignment::empty(2, 2)), 0.0);
        let m = word_similarity_matrix(&BiView::new(&al));
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 0), 0.0);
    }

    #[test]
    fn na_filter_kim() {
        let b = fixtures::kim();
        let view = na_filter(&b);
        // be, on
        assert_eq!(view.excluded_src().collect::<Vec<_>>(), vec![3, 4]);
        // comma, kommen
        assert_eq!(view.excluded_tgt().collect::<Vec<_>>(), vec![2, 5]);
        assert_eq!(view.active_links().count(), b.alignment.len());
    }

    #[test]
    fn na_filter_edges() {
        let s = Sentence::new([("a", "NN"), ("b", "NN")]).unwrap();
        let full = BiSentence::new(
            Side::new(s.clone()),
            Side::new(s.clone()),
            WordAlignment::new(2, 2, [(0, 1), (1, 0)]).unwrap(),
        )
        .unwrap();
        assert_eq!(na_filter(&full).excluded_src().count(), 0);
        let none = BiSentence::new(Side::new(s.clone()), Side::new(s), WordAlignment::empty(2, 2)).unwrap();
        let v = na_filter(&none);
        assert_eq!(v.excluded_src().count(), 2);
        assert_eq!(v.excluded_tgt().count(), 2);
    }

    #[test]
    fn nc_filter_by_pos() {
        let src = Sentence::new([("the", "DT"), ("promised", "VBD"), ("on", "IN")]).unwrap();
        let tgt = Sentence::new([("der", "ART"), ("versprach", "VVFIN"), ("auf", "APPR")]).unwrap();
        let b = BiSentence::new(
            Side::new(src),
            Side::new(tgt),
            WordAlignment::new(3, 3, [(0, 0), (1, 1), (2, 2)]).unwrap(),
        )
        .unwrap();
        let cfg = FilterConfig::default();
        let v = nc_filter(&b, &cfg).unwrap();
        assert!(!v.src_kept(0));
        assert!(v.src_kept(1));
        assert!(!v.src_kept(2));
        assert!(v.tgt_kept(1));
        assert_eq!(v.active_links().collect::<Vec<_>>(), vec![(1, 1)]);
        assert!(!v.is_active(0, 0));
    }

    #[test]
    fn nc_filter_function_words_only() {
        let b = BiSentence::new(
            Side::from_tree(crate::text::parse_tree("(X (DT the) (IN of))", None).unwrap()),
            Side::from_tree(crate::text::parse_tree("(X (DT the) (IN of))", None).unwrap()),
            WordAlignment::new(2, 2, [(0, 0), (1, 1)]).unwrap(),
        )
        .unwrap();
        let v = nc_filter(&b, &FilterConfig::default()).unwrap();
        let (st, tt) = (b.src.tree.as_ref().unwrap(), b.tgt.tree.as_ref().unwrap());
        let ctx = SimContext::new(st, tt, &v).unwrap();
        for a in 0..st.len() {
            for c in 0..tt.len() {
                assert_eq!(ctx.constituent_sim(a, c), 0.0);
            }
        }
    }

    #[test]
    fn nc_filter_missing_pos() {
        let s = Sentence::new([("a", "")]).unwrap();
        let b = BiSentence::new(Side::new(s.clone()), Side::new(s), WordAlignment::empty(1, 1)).unwrap();
        assert!(matches!(
            nc_filter(&b, &FilterConfig::default()),
            Err(Error::MissingInput(_))
        ));
        let cfg = FilterConfig {
            content_pos_prefixes: vec![],
            nc: true,
            na: false,
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
