//! Role transfer from source to target units, and the end-to-end pipeline.
//!
//! A role projects onto every target unit linked to one of its source units;
//! the projected token span is the union of those units' yields, written as
//! maximal disjoint intervals.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matcher::{build_graph, solve, AlignmentGraph, ConstraintClass, Link, SemanticAlignment};
use crate::model::{spans_of, BiSentence, NodeId, ParseTree, Role, RoleAnnotation, Span};
use crate::similarity::{BiView, FilterConfig, SimContext, DEFAULT_BIG};

/// Preterminal labels the argument filter never returns (punctuation in
/// PTB and STTS; TIGER leaves punctuation outside the tree proper).
pub const DEFAULT_ARG_SKIP_LABELS: &[&str] = &[".", ",", ":", "``", "''", "-LRB-", "-RRB-", "$,", "$.", "$("];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Word,
    Perfect,
    EdgeCover,
    Total,
}

impl Model {
    pub fn class(&self) -> ConstraintClass {
        match self {
            Model::Word => ConstraintClass::Word,
            Model::Perfect => ConstraintClass::Perfect,
            Model::EdgeCover => ConstraintClass::EdgeCover,
            Model::Total => ConstraintClass::Total,
        }
    }

    pub fn name(&self) -> &'static str {
        self.class().name()
    }

    pub fn parse(name: &str) -> Result<Model> {
        match name {
            "word" => Ok(Model::Word),
            "perfect" => Ok(Model::Perfect),
            "edgecover" => Ok(Model::EdgeCover),
            "total" => Ok(Model::Total),
            other => Err(Error::Config(format!(
                "unknown model {other:?} (expected word, perfect, edgecover or total)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgFilterConfig {
    /// Clause labels that bound the ancestor walk beyond the predicate's own clause.
    pub clause_boundary_labels: Vec<String>,
    pub skip_labels: Vec<String>,
}

impl Default for ArgFilterConfig {
    fn default() -> Self {
        ArgFilterConfig {
            clause_boundary_labels: Vec::new(),
            skip_labels: DEFAULT_ARG_SKIP_LABELS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub model: Model,
    /// Word filters (NA, NC) and the content-word tag prefixes.
    pub filter: FilterConfig,
    /// Restrict target units to likely arguments of the predicate.
    pub arg_filter: bool,
    pub arg: ArgFilterConfig,
    /// Close projected word spans to their min..max interval (word model only).
    pub fill_gaps: bool,
    pub big: f64,
}

impl PipelineConfig {
    /// The best-performing pairing for each model: perfect matching with
    /// the NA filter, edge cover with the argument filter, total alignments
    /// unfiltered, and word projection with gap filling.
    pub fn for_model(model: Model) -> Self {
        let mut cfg = PipelineConfig {
            model,
            filter: FilterConfig::default(),
            arg_filter: false,
            arg: ArgFilterConfig::default(),
            fill_gaps: false,
            big: DEFAULT_BIG,
        };
        match model {
            Model::Perfect => cfg.filter.na = true,
            Model::EdgeCover => cfg.arg_filter = true,
            Model::Total => {}
            Model::Word => cfg.fill_gaps = true,
        }
        cfg
    }

    /// A configuration with every filter off.
    pub fn unfiltered(model: Model) -> Self {
        PipelineConfig {
            model,
            filter: FilterConfig::default(),
            arg_filter: false,
            arg: ArgFilterConfig::default(),
            fill_gaps: false,
            big: DEFAULT_BIG,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        if !(self.big > 0.0 && self.big.is_finite()) {
            return Err(Error::Config(format!(
                "big must be finite and positive, got {}",
                self.big
            )));
        }
        if self.arg_filter && self.model == Model::Word {
            return Err(Error::Config(
                "the argument filter needs a constituent model (perfect, edgecover or total)".into(),
            ));
        }
        if self.fill_gaps && self.model != Model::Word {
            return Err(Error::Config("fill-gaps applies to the word model only".into()));
        }
        Ok(())
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig::for_model(Model::Perfect)
    }
}

/// How one source role was carried over.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleTrace {
    pub label: String,
    pub source_units: Vec<usize>,
    /// True when the role span is not a single constituent and had to be tiled.
    pub tiled: bool,
    pub links: Vec<Link>,
    pub projected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedAnnotation {
    pub annotation: RoleAnnotation,
    pub roles: Vec<RoleTrace>,
    pub warnings: Vec<String>,
}

/// Source units bearing a role, in role order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleUnits {
    pub label: String,
    pub units: Vec<usize>,
    pub tiled: bool,
}

/// Transfer each role onto the target units aligned with its source units.
///
/// `target_yield` maps a target unit to its token indices. Roles whose image
/// is empty are left out of the annotation and marked unprojected.
pub fn project<F>(
    alignment: &SemanticAlignment,
    source: &RoleAnnotation,
    role_units: &[RoleUnits],
    target_predicate: Option<usize>,
    target_yield: F,
) -> Result<ProjectedAnnotation>
where
    F: Fn(usize) -> BTreeSet<usize>,
{
    let mut roles = Vec::new();
    let mut traces = Vec::new();
    for ru in role_units {
        if let Some(u) = ru.units.iter().find(|u| !alignment.src_units.contains(u)) {
            return Err(Error::Integrity(format!(
                "role {} is assigned to unit {u}, which is not in the alignment graph",
                ru.label
            )));
        }
        let links: Vec<Link> = alignment
            .links
            .iter()
            .filter(|l| ru.units.contains(&l.src))
            .copied()
            .collect();
        let tokens: BTreeSet<usize> = links.iter().flat_map(|l| target_yield(l.tgt)).collect();
        let projected = !tokens.is_empty();
        if projected {
            roles.push(Role {
                label: ru.label.clone(),
                spans: spans_of(&tokens),
            });
        }
        traces.push(RoleTrace {
            label: ru.label.clone(),
            source_units: ru.units.clone(),
            tiled: ru.tiled,
            links,
            projected,
        });
    }
    Ok(ProjectedAnnotation {
        annotation: RoleAnnotation::new(source.frame.clone(), target_predicate, roles)?,
        roles: traces,
        warnings: Vec::new(),
    })
}

/// Close a token set to its min..max interval.
pub fn fill_gaps(tokens: &BTreeSet<usize>) -> BTreeSet<usize> {
    match (tokens.first(), tokens.last()) {
        (Some(&lo), Some(&hi)) => (lo..=hi).collect(),
        _ => BTreeSet::new(),
    }
}

/// Word-based projection over the active links of `view`.
pub fn project_words(
    view: &BiView<'_>,
    source: &RoleAnnotation,
    fill: bool,
    target_predicate: Option<usize>,
) -> Result<ProjectedAnnotation> {
    let mut roles = Vec::new();
    let mut traces = Vec::new();
    for role in source.roles() {
        let src_tokens = role.tokens();
        let links: Vec<Link> = view
            .active_links()
            .filter(|(s, _)| src_tokens.contains(s))
            .map(|(s, t)| Link {
                src: s,
                tgt: t,
                sim: 1.0,
                weight: 0.0,
            })
            .collect();
        let mut tokens: BTreeSet<usize> = links.iter().map(|l| l.tgt).collect();
        if fill {
            tokens = fill_gaps(&tokens);
        }
        let projected = !tokens.is_empty();
        if projected {
            roles.push(Role {
                label: role.label.clone(),
                spans: spans_of(&tokens),
            });
        }
        traces.push(RoleTrace {
            label: role.label.clone(),
            source_units: src_tokens.into_iter().collect(),
            tiled: false,
            links,
            projected,
        });
    }
    Ok(ProjectedAnnotation {
        annotation: RoleAnnotation::new(source.frame.clone(), target_predicate, roles)?,
        roles: traces,
        warnings: Vec::new(),
    })
}

/// Word-based projection over all links of `al`.
pub fn project_word_based(
    al: &crate::model::WordAlignment,
    source: &RoleAnnotation,
    fill: bool,
) -> Result<ProjectedAnnotation> {
    let predicate = source.predicate.and_then(|p| al.targets_of(p).next());
    project_words(&BiView::new(al), source, fill, predicate)
}

/// Likely arguments of the predicate at token `predicate`: children of the
/// predicate's ancestors that do not themselves dominate the predicate.
///
/// The walk goes up to the root unless clause boundary labels are given: it
/// then stops after the first boundary-labelled ancestor above the lowest
/// one. Preterminals labelled with a skip label
/// are never returned. Result is sorted by node id.
pub fn argument_filter(tree: &ParseTree, predicate: usize, cfg: &ArgFilterConfig) -> Result<Vec<NodeId>> {
    let pre = tree.preterminal(predicate).ok_or_else(|| {
        Error::Validation(format!(
            "predicate token {predicate} not in a tree of {} tokens",
            tree.sentence().len()
        ))
    })?;
    let mut out = Vec::new();
    let mut inside_clause = false;
    for anc in tree.ancestors(pre) {
        let node = tree.node(anc);
        for &child in &node.children {
            let c = tree.node(child);
            if tree.dominates(child, pre) {
                continue;
            }
            if c.is_terminal && cfg.skip_labels.contains(&c.label) {
                continue;
            }
            out.push(child);
        }
        if cfg.clause_boundary_labels.contains(&node.label) {
            if inside_clause {
                break;
            }
            inside_clause = true;
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Cover `span` with the fewest nodes whose yields lie inside it, taking the
/// deepest node of any unary chain. Returns the nodes and whether more than
/// one was needed.
pub fn tile_span(tree: &ParseTree, span: Span) -> (Vec<NodeId>, bool) {
    fn collect(tree: &ParseTree, id: NodeId, span: Span, out: &mut Vec<NodeId>) {
        let Some(own) = tree.span_of(id) else { return };
        if !own.overlaps(&span) {
            return;
        }
        if span.covers(&own) {
            let mut deepest = id;
            loop {
                let node = tree.node(deepest);
                match node.children.as_slice() {
                    [only] if tree.span_of(*only) == Some(own) => deepest = *only,
                    _ => break,
                }
            }
            out.push(deepest);
            return;
        }
        for &c in &tree.node(id).children {
            collect(tree, c, span, out);
        }
    }
    let mut out = Vec::new();
    collect(tree, tree.root_id(), span, &mut out);
    let tiled = out.len() > 1;
    (out, tiled)
}

/// Source units for every role of `roles`, via [`tile_span`].
pub fn role_units(tree: &ParseTree, roles: &RoleAnnotation) -> Vec<RoleUnits> {
    roles
        .roles()
        .iter()
        .map(|r| {
            let mut units = Vec::new();
            let mut tiled = r.spans.len() > 1;
            for s in &r.spans {
                let (nodes, t) = tile_span(tree, *s);
                tiled |= t;
                units.extend(nodes);
            }
            RoleUnits {
                label: r.label.clone(),
                units,
                tiled,
            }
        })
        .collect()
}

/// Full output of one pipeline run, including the graph for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub projection: ProjectedAnnotation,
    pub graph: Option<AlignmentGraph>,
    /// Solver output before zero-similarity links were dropped.
    pub alignment: Option<SemanticAlignment>,
}

/// Project the source roles of `b` onto its target sentence.
pub fn run_pipeline(b: &BiSentence, cfg: &PipelineConfig) -> Result<ProjectedAnnotation> {
    run_pipeline_traced(b, cfg).map(|r| r.projection)
}

pub fn run_pipeline_traced(b: &BiSentence, cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.validate()?;
    let source = b
        .src
        .roles
        .as_ref()
        .ok_or_else(|| Error::MissingInput("source role annotation".into()))?;
    let tgt_predicate = source.predicate.and_then(|p| b.alignment.targets_of(p).next());
    let mut warnings = Vec::new();
    if source.predicate.is_some() && tgt_predicate.is_none() {
        warnings.push("source predicate is unaligned; target predicate unknown".to_string());
    }

    if cfg.model == Model::Word {
        let view = BiView::filtered(b, &cfg.filter)?;
        let mut projection = project_words(&view, source, cfg.fill_gaps, tgt_predicate)?;
        projection.warnings = warnings;
        return Ok(PipelineRun {
            projection,
            graph: None,
            alignment: None,
        });
    }

    let name = cfg.model.name();
    let src_tree = b
        .src
        .tree
        .as_ref()
        .ok_or_else(|| Error::MissingInput(format!("source tree (required by the {name} model)")))?;
    let tgt_tree = b
        .tgt
        .tree
        .as_ref()
        .ok_or_else(|| Error::MissingInput(format!("target tree (required by the {name} model)")))?;
    let view = BiView::filtered(b, &cfg.filter)?;

    let src_units: Vec<NodeId> = (0..src_tree.len()).collect();
    let mut tgt_units: Vec<NodeId> = (0..tgt_tree.len()).collect();
    if cfg.arg_filter {
        match tgt_predicate {
            Some(p) => tgt_units = argument_filter(tgt_tree, p, &cfg.arg)?,
            None => warnings.push("argument filter skipped: no target predicate".to_string()),
        }
    }
    let units = role_units(src_tree, source);
    for u in units.iter().filter(|u| u.tiled) {
        warnings.push(format!("role {} does not match a single source constituent", u.label));
    }

    if tgt_units.is_empty() {
        warnings.push("no target units left after filtering; nothing projected".to_string());
        let empty = SemanticAlignment {
            links: Vec::new(),
            class: cfg.model.class(),
            cost: crate::matcher::Cost::ZERO,
            src_units: src_units.clone(),
            tgt_units: Vec::new(),
        };
        let mut projection = project(&empty, source, &units, tgt_predicate, |u| tgt_tree.yield_of(u))?;
        projection.warnings = warnings;
        return Ok(PipelineRun {
            projection,
            graph: None,
            alignment: Some(empty),
        });
    }

    let ctx = SimContext::new(src_tree, tgt_tree, &view)?;
    let sims = ctx.matrix(&src_units, &tgt_units);
    let graph = build_graph(&sims, cfg.big, cfg.model.class())?;
    let alignment = solve(&graph, cfg.model.class())?;
    let kept = alignment.without_zero_sim();
    let mut projection = project(&kept, source, &units, tgt_predicate, |u| tgt_tree.yield_of(u))?;
    projection.warnings = warnings;
    Ok(PipelineRun {
        projection,
        graph: Some(graph),
        alignment: Some(alignment),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::matcher::Cost;
    use crate::text::parse_tree;
    use alloc::vec;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn fill_gaps_examples() {
        assert_eq!(fill_gaps(&set(&[3, 5])), set(&[3, 4, 5]));
        assert_eq!(fill_gaps(&set(&[2])), set(&[2]));
        assert_eq!(fill_gaps(&set(&[1, 2, 3])), set(&[1, 2, 3]));
        assert!(fill_gaps(&BTreeSet::new()).is_empty());
    }

    #[test]
    fn argument_filter_on_german_kim_tree() {
        let tree = parse_tree(fixtures::KIM_TGT_TREE, None).unwrap();
        let args = argument_filter(&tree, 1, &ArgFilterConfig::default()).unwrap();
        let labelled: Vec<(String, Span)> = args
            .iter()
            .map(|&a| (tree.node(a).label.clone(), tree.span_of(a).unwrap()))
            .collect();
        assert_eq!(
            labelled,
            vec![
                ("NP".to_string(), Span { lo: 0, hi: 0 }),
                ("S".to_string(), Span { lo: 3, hi: 5 })
            ]
        );
    }

    #[test]
    fn argument_filter_edges() {
        let cfg = ArgFilterConfig::default();
        // predicate alone under a unary chain
        let t = parse_tree("(S (VP (VB go)))", None).unwrap();
        assert!(argument_filter(&t, 0, &cfg).unwrap().is_empty());
        // flat tree: every other preterminal
        let t = parse_tree("(S (NN a) (VB b) (NN c) (JJ d))", None).unwrap();
        let got: Vec<usize> = argument_filter(&t, 1, &cfg)
            .unwrap()
            .into_iter()
            .map(|n| t.span_of(n).unwrap().lo)
            .collect();
        assert_eq!(got, vec![0, 2, 3]);
        assert!(matches!(argument_filter(&t, 9, &cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn clause_boundary_limits_walk() {
        let t = parse_tree(
            "(S (NP (NN w)) (VP (VB think) (S (NP (NN x)) (VP (VB said) (S (NP (NN y)) (VP (VB left) (NP (NN z))))))))",
            None,
        )
        .unwrap();
        let pred = 5; // "left"
        let open = argument_filter(&t, pred, &ArgFilterConfig::default()).unwrap();
        let bounded = argument_filter(
            &t,
            pred,
            &ArgFilterConfig {
                clause_boundary_labels: vec!["S".into()],
                ..Default::default()
            },
        )
        .unwrap();
        let spans = |v: &[NodeId]| v.iter().map(|&n| t.span_of(n).unwrap()).collect::<Vec<_>>();
        let mut open = spans(&open);
        open.sort_by_key(|s| s.lo);
        assert_eq!(open, [0, 1, 2, 3, 4, 6].map(Span::single));
        // stops after the clause above the predicate's own
        let mut bounded = spans(&bounded);
        bounded.sort_by_key(|s| s.lo);
        assert_eq!(bounded, [2, 3, 4, 6].map(Span::single));
    }

    #[test]
    fn tiling() {
        let t = parse_tree(fixtures::KIM_SRC_TREE, None).unwrap();
        let (nodes, tiled) = tile_span(&t, Span { lo: 2, hi: 5 });
        assert_eq!(nodes.len(), 1);
        assert!(!tiled);
        assert_eq!(t.node(nodes[0]).label, "VP");
        // unary chain NP -> NNP resolves to the preterminal
        let (nodes, _) = tile_span(&t, Span::single(0));
        assert_eq!(t.node(nodes[0]).label, "NNP");
        // "promised to" is not a constituent
        let (nodes, tiled) = tile_span(&t, Span { lo: 1, hi: 2 });
        assert!(tiled);
        assert_eq!(nodes.len(), 2);
    }

    #[test]
    fn eq5_direct() {
        let a = SemanticAlignment {
            links: vec![
                Link {
                    src: 1,
                    tgt: 2,
                    sim: 0.5,
                    weight: 0.7,
                },
                Link {
                    src: 3,
                    tgt: 4,
                    sim: 0.5,
                    weight: 0.7,
                },
            ],
            class: ConstraintClass::Total,
            cost: Cost::ZERO,
            src_units: vec![0, 1, 2, 3],
            tgt_units: vec![0, 1, 2, 3, 4],
        };
        let src = RoleAnnotation::new(
            "F",
            Some(0),
            vec![Role {
                label: "R".into(),
                spans: vec![Span::single(1)],
            }],
        )
        .unwrap();
        let units = vec![RoleUnits {
            label: "R".into(),
            units: vec![1, 3],
            tiled: false,
        }];
        let p = project(&a, &src, &units, None, |u| set(&[u])).unwrap();
        assert_eq!(
            p.annotation.role("R").unwrap().spans,
            vec![Span::single(2), Span::single(4)]
        );

        let empty = SemanticAlignment {
            links: vec![],
            ..a.clone()
        };
        let p = project(&empty, &src, &units, Some(0), |u| set(&[u])).unwrap();
        assert!(p.annotation.roles().is_empty());
        assert_eq!(p.annotation.frame, "F");
        assert!(!p.roles[0].projected);

        let bad = vec![RoleUnits {
            label: "R".into(),
            units: vec![9],
            tiled: false,
        }];
        assert!(matches!(
            project(&a, &src, &bad, None, |u| set(&[u])),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn word_projection_kim() {
        let b = fixtures::kim();
        let src = b.src.roles.as_ref().unwrap();
        let p = project_word_based(&b.alignment, src, false).unwrap();
        assert_eq!(p.annotation.role("MESSAGE").unwrap().spans, vec![Span { lo: 3, hi: 4 }]);
        assert_eq!(p.annotation.predicate, Some(1));
    }

    #[test]
    fn word_projection_edges() {
        let al = crate::model::WordAlignment::new(3, 3, [(0, 0), (1, 1), (2, 2)]).unwrap();
        let src = RoleAnnotation::new(
            "F",
            Some(0),
            vec![Role {
                label: "A".into(),
                spans: vec![Span::single(2)],
            }],
        )
        .unwrap();
        let p = project_word_based(&al, &src, true).unwrap();
        assert_eq!(p.annotation.role("A").unwrap().spans, vec![Span::single(2)]);
        let none = crate::model::WordAlignment::empty(3, 3);
        let p = project_word_based(&none, &src, true).unwrap();
        assert!(p.annotation.roles().is_empty());
        assert_eq!(p.annotation.predicate, None);
    }

    #[test]
    fn pipeline_kim() {
        let b = fixtures::kim();
        let expected = vec![Span { lo: 3, hi: 5 }];
        for cfg in [
            PipelineConfig::unfiltered(Model::Perfect),
            PipelineConfig::for_model(Model::Perfect),
        ] {
            let p = run_pipeline(&b, &cfg).unwrap();
            assert_eq!(p.annotation.role("MESSAGE").unwrap().spans, expected, "{cfg:?}");
        }
        let mut word = PipelineConfig::unfiltered(Model::Word);
        word.fill_gaps = true;
        let p = run_pipeline(&b, &word).unwrap();
        assert_eq!(p.annotation.role("MESSAGE").unwrap().spans, vec![Span { lo: 3, hi: 4 }]);
    }

    #[test]
    fn pipeline_prerequisites() {
        let mut b = fixtures::kim();
        b.src.tree = None;
        assert!(matches!(
            run_pipeline(&b, &PipelineConfig::unfiltered(Model::Perfect)),
            Err(Error::MissingInput(m)) if m.contains("source tree")
        ));
        // the word model needs no trees
        let mut cfg = PipelineConfig::unfiltered(Model::Word);
        cfg.fill_gaps = true;
        assert!(run_pipeline(&b, &cfg).is_ok());
        b.src.roles = None;
        assert!(matches!(run_pipeline(&b, &cfg), Err(Error::MissingInput(_))));

        let mut arg_word = PipelineConfig::unfiltered(Model::Word);
        arg_word.arg_filter = true;
        assert!(matches!(arg_word.validate(), Err(Error::Config(_))));
    }
}
