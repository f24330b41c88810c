//! Bundled example data: the "Kim promised to be on time" bi-sentence and a
//! small English-German toy corpus, in the toolkit's file formats.

use alloc::vec::Vec;

use crate::model::{BiSentence, Side};
use crate::text::{parse_alignment, parse_roles, parse_tree};

pub const KIM_SRC_TREE: &str =
    "(S (NP (NNP Kim)) (VP (VBD promised) (VP (TO to) (VP (VB be) (PP (IN on) (NN time))))))";
pub const KIM_TGT_TREE: &str =
    "(S (NP (NE Kim)) (VVFIN versprach) ($, ,) (S (ADJD pünktlich) (PTKZU zu) (VVINF kommen)))";
/// Kim-Kim, promised-versprach, to-zu, time-pünktlich.
pub const KIM_ALIGN: &str = "0-0 1-1 2-4 5-3";
pub const KIM_SRC_ROLES: &str = "#0 COMMITMENT 1\nMESSAGE\t2-5";
pub const KIM_TGT_ROLES: &str = "#0 COMMITMENT 1\nMESSAGE\t3-5";

/// Toy corpus, one entry per line of each file.
pub const TOY_SRC_TREES: &[&str] = &[
    KIM_SRC_TREE,
    "(S (NP (NNP Bob)) (VP (VBD melted) (NP (DT the) (NN butter))))",
    "(S (NP (DT The) (NN committee)) (VP (VBD approved) (NP (DT the) (NN report))) (. .))",
    "(S (NP (PRP We)) (VP (MD must) (VP (VB support) (NP (DT this) (NN proposal)))) (. .))",
    "(S (NP (DT The) (NN minister)) (VP (VBD said) (SBAR (IN that) (S (NP (DT the) (NN plan)) (VP (VBD failed))))) (. .))",
    "(S (NP (PRP I)) (VP (VBP thank) (NP (DT the) (NN rapporteur)) (PP (IN for) (NP (PRP$ his) (NN work)))) (. .))",
];

pub const TOY_TGT_TREES: &[&str] = &[
    KIM_TGT_TREE,
    "(S (NP (NE Bob)) (VVFIN schmolz) (NP (ART die) (NN Butter)))",
    "(S (NP (ART Der) (NN Ausschuss)) (VVFIN billigte) (NP (ART den) (NN Bericht)) ($. .))",
    "(S (PPER Wir) (VMFIN müssen) (VP (NP (PDAT diesen) (NN Vorschlag)) (VVINF unterstützen)) ($. .))",
    "(S (NP (ART Der) (NN Minister)) (VVFIN sagte) ($, ,) (S (KOUS dass) (NP (ART der) (NN Plan)) (VVFIN scheiterte)) ($. .))",
    "(S (PPER Ich) (VVFIN danke) (NP (ART dem) (NN Berichterstatter)) (PP (APPR für) (NP (PPOSAT seine) (NN Arbeit))) ($. .))",
];

pub const TOY_ALIGN: &[&str] = &[
    KIM_ALIGN,
    "0-0 1-1 2-2 3-3",
    "0-0 1-1 2-2 3-3 4-4 5-5",
    "0-0 1-1 2-4 3-2 4-3 5-5",
    "0-0 1-1 2-2 3-4 4-5 5-6 6-7 7-8",
    "0-0 1-1 2-2 3-3 4-4 5-5 6-6 7-7",
];

pub const TOY_SRC_ROLES: &[&str] = &[
    KIM_SRC_ROLES,
    "#1 CAUSE_CHANGE_OF_PHASE 1\nAGENT\t0-0\nUNDERGOER\t2-3",
    "#2 DENY_OR_GRANT_PERMISSION 2\nAUTHORITY\t0-1\nACTION\t3-4",
    "#3 SUPPORTING 2\nSUPPORTER\t0-0\nSUPPORTED\t3-4",
    "#4 STATEMENT 2\nSPEAKER\t0-1\nMESSAGE\t3-6",
    "#5 JUDGMENT_DIRECT_ADDRESS 1\nCOMMUNICATOR\t0-0\nADDRESSEE\t2-3\nREASON\t4-6",
];

pub const TOY_TGT_GOLD: &[&str] = &[
    KIM_TGT_ROLES,
    "#1 CAUSE_CHANGE_OF_PHASE 1\nAGENT\t0-0\nUNDERGOER\t2-3",
    "#2 DENY_OR_GRANT_PERMISSION 2\nAUTHORITY\t0-1\nACTION\t3-4",
    "#3 SUPPORTING 4\nSUPPORTER\t0-0\nSUPPORTED\t2-3",
    "#4 STATEMENT 2\nSPEAKER\t0-1\nMESSAGE\t4-7",
    "#5 JUDGMENT_DIRECT_ADDRESS 1\nCOMMUNICATOR\t0-0\nADDRESSEE\t2-3\nREASON\t4-6",
];

fn bisentence(src_tree: &str, tgt_tree: &str, align: &str, src_roles: &str, tgt_roles: &str) -> BiSentence {
    let src = parse_tree(src_tree, None).expect("bundled source tree");
    let tgt = parse_tree(tgt_tree, None).expect("bundled target tree");
    let al = parse_alignment(align, src.sentence().len(), tgt.sentence().len()).expect("bundled alignment");
    let (_, sr) = parse_roles(src_roles).expect("bundled source roles");
    let (_, tr) = parse_roles(tgt_roles).expect("bundled target roles");
    BiSentence::new(
        Side::from_tree(src).with_roles(sr),
        Side::from_tree(tgt).with_roles(tr),
        al,
    )
    .expect("bundled bi-sentence")
}

/// "Kim promised to be on time" / "Kim versprach , pünktlich zu kommen",
/// with the source MESSAGE role and the gold target MESSAGE role.
pub fn kim() -> BiSentence {
    bisentence(KIM_SRC_TREE, KIM_TGT_TREE, KIM_ALIGN, KIM_SRC_ROLES, KIM_TGT_ROLES)
}

pub fn toy_corpus() -> Vec<BiSentence> {
    (0..TOY_SRC_TREES.len())
        .map(|i| {
            bisentence(
                TOY_SRC_TREES[i],
                TOY_TGT_TREES[i],
                TOY_ALIGN[i],
                TOY_SRC_ROLES[i],
                TOY_TGT_GOLD[i],
            )
        })
        .collect()
}
