//! Readers and writers for the corpus file formats.
//!
//! `.trees` one bracketed tree per line, `-` for none; `.align` one line of
//! `i-j` pairs per sentence; `.tok` one line of `surface_POS` tokens per
//! sentence; `.roles` blank-line separated blocks keyed by sentence number.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use semproj_core::model::{BiSentence, ParseTree, RoleAnnotation, Sentence, Side};
use semproj_core::text::{parse_alignment, parse_roles, parse_tokens, parse_tree, serialize_roles};

use crate::error::{CliError, CliResult};

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn lines(text: &str) -> Vec<&str> {
    text.lines().collect()
}

fn at(path: &Path, line: usize) -> String {
    format!("{}:{}", path.display(), line + 1)
}

pub fn read_trees(path: &Path) -> CliResult<Vec<Option<ParseTree>>> {
    let text = read_text(path)?;
    lines(&text)
        .into_iter()
        .enumerate()
        .map(|(i, l)| match l.trim() {
            "-" => Ok(None),
            t => parse_tree(t, None)
                .map(Some)
                .map_err(|e| CliError::input(at(path, i), e)),
        })
        .collect()
}

pub fn read_tokens(path: &Path) -> CliResult<Vec<Sentence>> {
    let text = read_text(path)?;
    lines(&text)
        .into_iter()
        .enumerate()
        .map(|(i, l)| parse_tokens(l).map_err(|e| CliError::input(at(path, i), e)))
        .collect()
}

pub fn read_alignment_lines(path: &Path) -> CliResult<Vec<String>> {
    Ok(lines(&read_text(path)?).into_iter().map(str::to_string).collect())
}

/// Role blocks keyed by sentence number.
pub fn read_roles(path: &Path) -> CliResult<BTreeMap<usize, RoleAnnotation>> {
    parse_roles_file(&read_text(path)?, &path.display().to_string())
}

pub fn parse_roles_file(text: &str, name: &str) -> CliResult<BTreeMap<usize, RoleAnnotation>> {
    let mut out = BTreeMap::new();
    let mut block = Vec::new();
    let mut start = 0;
    let flush = |block: &mut Vec<&str>, start: usize, out: &mut BTreeMap<usize, RoleAnnotation>| -> CliResult<()> {
        if block.is_empty() {
            return Ok(());
        }
        let ctx = format!("{name}:{}", start + 1);
        let (n, a) = parse_roles(&block.join("\n")).map_err(|e| CliError::input(ctx.clone(), e))?;
        if out.insert(n, a).is_some() {
            return Err(CliError::Usage(format!("{ctx}: duplicate block for sentence {n}")));
        }
        block.clear();
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            flush(&mut block, start, &mut out)?;
        } else {
            if block.is_empty() {
                start = i;
            }
            block.push(line);
        }
    }
    flush(&mut block, start, &mut out)?;
    Ok(out)
}

pub fn serialize_roles_file<'a>(blocks: impl IntoIterator<Item = (usize, &'a RoleAnnotation)>) -> String {
    let mut out = String::new();
    for (n, a) in blocks {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&serialize_roles(n, a));
        out.push('\n');
    }
    out
}

/// Paths making up a corpus; any may be absent.
#[derive(Debug, Clone, Default)]
pub struct CorpusPaths<'a> {
    pub src_trees: Option<&'a Path>,
    pub tgt_trees: Option<&'a Path>,
    pub src_tok: Option<&'a Path>,
    pub tgt_tok: Option<&'a Path>,
    pub align: Option<&'a Path>,
    pub align_inverse: Option<&'a Path>,
    pub src_roles: Option<&'a Path>,
}

fn side(
    k: usize,
    which: &str,
    trees: &Option<Vec<Option<ParseTree>>>,
    toks: &Option<Vec<Sentence>>,
) -> CliResult<Side> {
    let tree = trees.as_ref().and_then(|t| t[k].clone());
    let tok = toks.as_ref().map(|t| t[k].clone());
    match (tree, tok) {
        (Some(tree), Some(tok)) => {
            if tok.len() != tree.sentence().len() {
                return Err(CliError::Usage(format!(
                    "sentence {k}: {which} tree has {} tokens, token file has {}",
                    tree.sentence().len(),
                    tok.len()
                )));
            }
            Ok(Side::from_tree(tree))
        }
        (Some(tree), None) => Ok(Side::from_tree(tree)),
        (None, Some(tok)) => Ok(Side::new(tok)),
        (None, None) => Err(CliError::Usage(format!("sentence {k}: no {which} tree or tokens"))),
    }
}

fn check_count(what: &str, n: usize, expected: usize) -> CliResult<()> {
    if n != expected {
        return Err(CliError::Usage(format!(
            "{what} has {n} lines but the alignment file has {expected}"
        )));
    }
    Ok(())
}

/// Load a parallel corpus. Source roles, when given, are attached to the
/// source side; sentences without a role block get none.
pub fn read_corpus(p: &CorpusPaths<'_>) -> CliResult<Vec<BiSentence>> {
    let align_path = p
        .align
        .ok_or_else(|| CliError::Usage("an alignment file is required (--align)".into()))?;
    let align = read_alignment_lines(align_path)?;
    let n = align.len();
    let src_trees = p.src_trees.map(read_trees).transpose()?;
    let tgt_trees = p.tgt_trees.map(read_trees).transpose()?;
    let src_tok = p.src_tok.map(read_tokens).transpose()?;
    let tgt_tok = p.tgt_tok.map(read_tokens).transpose()?;
    let inverse = p.align_inverse.map(read_alignment_lines).transpose()?;
    for (what, len) in [
        ("source trees", src_trees.as_ref().map(Vec::len)),
        ("target trees", tgt_trees.as_ref().map(Vec::len)),
        ("source tokens", src_tok.as_ref().map(Vec::len)),
        ("target tokens", tgt_tok.as_ref().map(Vec::len)),
        ("inverse alignment", inverse.as_ref().map(Vec::len)),
    ] {
        if let Some(len) = len {
            check_count(what, len, n)?;
        }
    }
    let mut roles = p.src_roles.map(read_roles).transpose()?.unwrap_or_default();
    if let Some((&k, _)) = roles.range(n..).next() {
        return Err(CliError::Usage(format!(
            "source roles refer to sentence {k} but the corpus has {n} sentences"
        )));
    }

    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let src = side(k, "source", &src_trees, &src_tok)?;
        let tgt = side(k, "target", &tgt_trees, &tgt_tok)?;
        let ctx = || at(align_path, k);
        let mut al = parse_alignment(&align[k], src.len(), tgt.len()).map_err(|e| CliError::input(ctx(), e))?;
        if let Some(inv) = &inverse {
            let back = parse_alignment(&inv[k], tgt.len(), src.len())
                .map_err(|e| CliError::input(at(p.align_inverse.unwrap(), k), e))?;
            al = al.intersect(&back.transpose()).map_err(|e| CliError::input(ctx(), e))?;
        }
        let src = match roles.remove(&k) {
            Some(r) => src.with_roles(r),
            None => src,
        };
        out.push(BiSentence::new(src, tgt, al).map_err(|e| CliError::input(format!("sentence {k}"), e))?);
    }
    Ok(out)
}
