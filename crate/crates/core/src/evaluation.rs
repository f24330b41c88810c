//! Exact-match scoring, stratified shuffling, and constituent correspondence counts.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::model::{BiSentence, NodeId, ParseTree, RoleAnnotation};
use crate::projection::ProjectedAnnotation;
use crate::similarity::{BiView, SimContext};

impl AsRef<RoleAnnotation> for ProjectedAnnotation {
    fn as_ref(&self) -> &RoleAnnotation {
        &self.annotation
    }
}

impl AsRef<RoleAnnotation> for RoleAnnotation {
    fn as_ref(&self) -> &RoleAnnotation {
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Counts {
    fn add(self, o: Counts) -> Counts {
        Counts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
        }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_sentence: Vec<Counts>,
}

impl ScoreReport {
    fn from_counts(per_sentence: Vec<Counts>) -> Self {
        let total = per_sentence.iter().fold(Counts::default(), |a, &c| a.add(c));
        ScoreReport {
            true_positives: total.tp,
            false_positives: total.fp,
            false_negatives: total.fn_,
            precision: total.precision(),
            recall: total.recall(),
            f1: total.f1(),
            per_sentence,
        }
    }
}

/// Counts for one sentence. Each gold role claims the first unclaimed
/// prediction with the same label and token set.
pub fn sentence_counts(gold: &RoleAnnotation, pred: &RoleAnnotation) -> Counts {
    let key = |r: &crate::model::Role| (r.label.clone(), r.tokens());
    let mut open: Vec<Option<(alloc::string::String, BTreeSet<usize>)>> =
        pred.roles().iter().map(|r| Some(key(r))).collect();
    let mut tp = 0;
    for g in gold.roles() {
        let k = key(g);
        if let Some(slot) = open.iter_mut().find(|s| s.as_ref() == Some(&k)) {
            *slot = None;
            tp += 1;
        }
    }
    Counts {
        tp,
        fp: pred.roles().len() - tp,
        fn_: gold.roles().len() - tp,
    }
}

fn all_counts<P: AsRef<RoleAnnotation>>(gold: &[RoleAnnotation], pred: &[P]) -> Result<Vec<Counts>> {
    if gold.len() != pred.len() {
        return Err(Error::Validation(format!(
            "gold has {} sentences, prediction has {}",
            gold.len(),
            pred.len()
        )));
    }
    Ok(gold
        .iter()
        .zip(pred)
        .map(|(g, p)| sentence_counts(g, p.as_ref()))
        .collect())
}

/// Micro-averaged exact-match precision, recall and F1.
pub fn score<P: AsRef<RoleAnnotation>>(gold: &[RoleAnnotation], pred: &[P]) -> Result<ScoreReport> {
    Ok(ScoreReport::from_counts(all_counts(gold, pred)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigTestResult {
    pub observed_delta_f1: f64,
    pub p_value: f64,
    pub iterations: usize,
    pub seed: u64,
}

const DELTA_TOL: f64 = 1e-12;

/// Two-sided approximate randomization test on the F1 difference of two
/// systems. Iteration `i` draws its swaps from the ChaCha stream `i` of
/// `seed`, so results do not depend on evaluation order.
pub fn stratified_shuffling<A, B>(
    gold: &[RoleAnnotation],
    a: &[A],
    b: &[B],
    iterations: usize,
    seed: u64,
) -> Result<SigTestResult>
where
    A: AsRef<RoleAnnotation>,
    B: AsRef<RoleAnnotation>,
{
    if gold.is_empty() {
        return Err(Error::Validation("empty corpus".into()));
    }
    if iterations == 0 {
        return Err(Error::Config("iterations must be at least 1".into()));
    }
    let ca = all_counts(gold, a)?;
    let cb = all_counts(gold, b)?;
    let sum = |v: &[Counts]| v.iter().fold(Counts::default(), |x, &c| x.add(c));
    let observed = sum(&ca).f1() - sum(&cb).f1();

    let mut at_least = 0usize;
    for i in 0..iterations {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let (mut x, mut y) = (Counts::default(), Counts::default());
        let mut bits = 0u32;
        for (k, (&p, &q)) in ca.iter().zip(&cb).enumerate() {
            if k % 32 == 0 {
                bits = rng.next_u32();
            }
            if bits & 1 == 1 {
                x = x.add(q);
                y = y.add(p);
            } else {
                x = x.add(p);
                y = y.add(q);
            }
            bits >>= 1;
        }
        if libm::fabs(x.f1() - y.f1()) + DELTA_TOL >= libm::fabs(observed) {
            at_least += 1;
        }
    }
    Ok(SigTestResult {
        observed_delta_f1: observed,
        p_value: (at_least + 1) as f64 / (iterations + 1) as f64,
        iterations,
        seed,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SideCorrespondence {
    pub none: usize,
    pub one: usize,
    pub many: usize,
}

impl SideCorrespondence {
    pub fn total(&self) -> usize {
        self.none + self.one + self.many
    }

    /// Proportions of none, one and many; all zero when nothing was counted.
    pub fn proportions(&self) -> (f64, f64, f64) {
        let t = self.total();
        (ratio(self.none, t), ratio(self.one, t), ratio(self.many, t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrespondenceStats {
    pub threshold: f64,
    pub src: SideCorrespondence,
    pub tgt: SideCorrespondence,
}

/// Nodes of `tree`, with each unary chain of same-yield nodes counted once
/// (by its top node). Empty nodes are left out.
pub fn distinct_constituents(tree: &ParseTree) -> Vec<NodeId> {
    tree.nodes()
        .iter()
        .filter(|c| {
            c.span.is_some()
                && match c.parent {
                    Some(p) => tree.node(p).children.len() != 1 || tree.node(p).span != c.span,
                    None => true,
                }
        })
        .map(|c| c.id)
        .collect()
}

/// How many opposite-side constituents each constituent corresponds to,
/// where `c` corresponds to `c'` when their similarity is at least `threshold`.
pub fn correspondence_stats(corpus: &[BiSentence], threshold: f64) -> Result<CorrespondenceStats> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!("threshold must be in (0, 1], got {threshold}")));
    }
    let mut stats = CorrespondenceStats {
        threshold,
        src: SideCorrespondence::default(),
        tgt: SideCorrespondence::default(),
    };
    let bump = |side: &mut SideCorrespondence, n: usize| match n {
        0 => side.none += 1,
        1 => side.one += 1,
        _ => side.many += 1,
    };
    for (k, b) in corpus.iter().enumerate() {
        let (Some(st), Some(tt)) = (b.src.tree.as_ref(), b.tgt.tree.as_ref()) else {
            return Err(Error::MissingInput(format!("both trees for sentence {k}")));
        };
        let view = BiView::new(&b.alignment);
        let ctx = SimContext::new(st, tt, &view)?;
        let su = distinct_constituents(st);
        let tu = distinct_constituents(tt);
        let m = ctx.matrix(&su, &tu);
        for i in 0..su.len() {
            bump(
                &mut stats.src,
                (0..tu.len()).filter(|&j| m.get(i, j) >= threshold).count(),
            );
        }
        for j in 0..tu.len() {
            bump(
                &mut stats.tgt,
                (0..su.len()).filter(|&i| m.get(i, j) >= threshold).count(),
            );
        }
    }
    Ok(stats)
}
