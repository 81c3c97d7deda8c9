//! Text formats for instances, haplotype sets, diploid genotypes and
//! realization families.
//!
//! Matrix form: whitespace-separated 0/1 entries (or one packed 0/1 token)
//! per row, with an optional first line of character names. Set form: an
//! optional `chars: ...` line followed by one set of names per line, `-` for
//! the empty set. Blank lines and lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use log::warn;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::graphreal::{FamilySet, LabeledRealization, RealizationFamily};
use crate::model::{Alphabet, Genotype, Haplotype, Instance, XorGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Matrix,
    Sets,
    /// Matrix when every body line is binary, sets otherwise.
    Auto,
}

/// An instance plus how many duplicate genotypes were dropped.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub instance: Instance,
    pub duplicates: usize,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn binary_cells(line: &str) -> Option<Vec<bool>> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let chars: Vec<char> = if toks.len() == 1 {
        toks[0].chars().collect()
    } else {
        toks.iter()
            .map(|t| {
                let mut c = t.chars();
                match (c.next(), c.next()) {
                    (Some(ch), None) => ch,
                    _ => 'x',
                }
            })
            .collect()
    };
    chars
        .into_iter()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

fn strip_chars_header(line: &str) -> Option<&str> {
    line.strip_prefix("chars:").map(str::trim)
}

pub fn parse_instance(text: &str, format: Format) -> Result<Parsed> {
    let format = match format {
        Format::Auto => detect(text),
        f => f,
    };
    let (alphabet, rows) = match format {
        Format::Matrix => parse_matrix(text, None)?,
        _ => parse_sets(text, None)?,
    };
    dedup_rows(alphabet, rows)
}

fn detect(text: &str) -> Format {
    let lines: Vec<&str> = content_lines(text).map(|(_, l)| l).collect();
    match lines.first() {
        None => Format::Matrix,
        Some(first) if strip_chars_header(first).is_some() => Format::Sets,
        Some(_) => {
            let body_binary =
                lines.len() > 1 && lines[1..].iter().all(|l| binary_cells(l).is_some());
            if body_binary || binary_cells(lines[0]).is_some() {
                Format::Matrix
            } else {
                Format::Sets
            }
        }
    }
}

fn dedup_rows(alphabet: Alphabet, rows: Vec<(usize, BitVector)>) -> Result<Parsed> {
    let mut seen = std::collections::HashSet::new();
    let mut genotypes = Vec::with_capacity(rows.len());
    let mut duplicates = 0;
    for (line, row) in rows {
        let g = Genotype::new(row).map_err(|_| Error::parse(line, "empty genotype"))?;
        if seen.insert(g.clone()) {
            genotypes.push(g);
        } else {
            warn!("line {line}: duplicate genotype dropped");
            duplicates += 1;
        }
    }
    Ok(Parsed {
        instance: Instance::new(alphabet, genotypes)?,
        duplicates,
    })
}

/// Rows of a 0/1 matrix. When `alphabet` is given, a header must match it.
fn parse_matrix(
    text: &str,
    alphabet: Option<&Alphabet>,
) -> Result<(Alphabet, Vec<(usize, BitVector)>)> {
    let mut lines = content_lines(text).peekable();
    let mut header: Option<Alphabet> = None;
    if let Some(&(line, first)) = lines.peek() {
        if binary_cells(first).is_none() {
            let names = strip_chars_header(first).unwrap_or(first);
            let a = Alphabet::new(names.split_whitespace())
                .map_err(|e| Error::parse(line, e.to_string()))?;
            if let Some(expected) = alphabet {
                if &a != expected {
                    return Err(Error::parse(
                        line,
                        "header does not match the instance alphabet",
                    ));
                }
            }
            header = Some(a);
            lines.next();
        }
    }
    let mut rows = Vec::new();
    let mut width = header
        .as_ref()
        .map(Alphabet::len)
        .or(alphabet.map(Alphabet::len));
    for (line, l) in lines {
        let cells = binary_cells(l).ok_or_else(|| Error::parse(line, "expected 0/1 entries"))?;
        match width {
            Some(w) if w != cells.len() => {
                return Err(Error::parse(
                    line,
                    format!("row has {} entries, expected {w}", cells.len()),
                ))
            }
            _ => width = Some(cells.len()),
        }
        rows.push((line, BitVector::from_bools(&cells)));
    }
    let alphabet = match (header, alphabet) {
        (Some(h), _) => h,
        (None, Some(a)) => a.clone(),
        (None, None) => Alphabet::letters(width.unwrap_or(0)),
    };
    Ok((alphabet, rows))
}

/// Sets of names. Without a `chars:` header (and no given alphabet) the
/// alphabet is the sorted set of names used.
fn parse_sets(
    text: &str,
    alphabet: Option<&Alphabet>,
) -> Result<(Alphabet, Vec<(usize, BitVector)>)> {
    let mut lines: Vec<(usize, &str)> = content_lines(text).collect();
    let mut declared: Option<Alphabet> = None;
    if let Some(&(line, first)) = lines.first() {
        if let Some(names) = strip_chars_header(first) {
            let a = Alphabet::new(names.split_whitespace())
                .map_err(|e| Error::parse(line, e.to_string()))?;
            if let Some(expected) = alphabet {
                if &a != expected {
                    return Err(Error::parse(
                        line,
                        "header does not match the instance alphabet",
                    ));
                }
            }
            declared = Some(a);
            lines.remove(0);
        }
    }
    let alphabet = match (declared, alphabet) {
        (Some(a), _) => a,
        (None, Some(a)) => a.clone(),
        (None, None) => {
            let mut names: Vec<&str> = lines
                .iter()
                .flat_map(|(_, l)| l.split_whitespace())
                .filter(|t| !is_empty_marker(t))
                .collect();
            names.sort_unstable();
            names.dedup();
            Alphabet::new(names)?
        }
    };
    let mut rows = Vec::with_capacity(lines.len());
    for (line, l) in lines {
        let mut v = BitVector::zeros(alphabet.len());
        for tok in l.split_whitespace().filter(|t| !is_empty_marker(t)) {
            let p = alphabet
                .position(tok)
                .ok_or_else(|| Error::parse(line, format!("unknown character {tok:?}")))?;
            v.set(p, true);
        }
        rows.push((line, v));
    }
    Ok((alphabet, rows))
}

fn is_empty_marker(tok: &str) -> bool {
    tok == "-" || tok == "∅"
}

/// Haplotypes over `alphabet`, in matrix or set form.
pub fn parse_haplotypes(text: &str, alphabet: &Alphabet, format: Format) -> Result<Vec<Haplotype>> {
    let format = match format {
        Format::Auto => detect(text),
        f => f,
    };
    let (_, rows) = match format {
        Format::Matrix => parse_matrix(text, Some(alphabet))?,
        _ => parse_sets(text, Some(alphabet))?,
    };
    Ok(rows.into_iter().map(|(_, v)| Haplotype::new(v)).collect())
}

/// Diploid rows over {0, 1, 2}; a site is in the xor-genotype iff it is 1.
pub fn from_diploid(text: &str) -> Result<Parsed> {
    let mut lines = content_lines(text).peekable();
    let mut header = None;
    if let Some(&(line, first)) = lines.peek() {
        if first.split_whitespace().any(|t| t.parse::<u32>().is_err()) {
            header = Some(
                Alphabet::new(first.split_whitespace())
                    .map_err(|e| Error::parse(line, e.to_string()))?,
            );
            lines.next();
        }
    }
    let mut width = header.as_ref().map(Alphabet::len);
    let mut rows = Vec::new();
    for (line, l) in lines {
        let bits = l
            .split_whitespace()
            .map(|t| match t {
                "0" | "2" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::parse(
                    line,
                    format!("diploid entry {other:?} is not 0, 1 or 2"),
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        match width {
            Some(w) if w != bits.len() => {
                return Err(Error::parse(
                    line,
                    format!("row has {} entries, expected {w}", bits.len()),
                ))
            }
            _ => width = Some(bits.len()),
        }
        if !bits.iter().any(|&b| b) {
            return Err(Error::parse(line, "row is homozygous at every site"));
        }
        rows.push((line, BitVector::from_bools(&bits)));
    }
    let alphabet = header.unwrap_or_else(|| Alphabet::letters(width.unwrap_or(0)));
    dedup_rows(alphabet, rows)
}

pub fn write_instance(instance: &Instance, format: Format) -> String {
    let a = instance.alphabet();
    let mut out = String::new();
    match format {
        Format::Matrix => {
            let _ = writeln!(out, "{}", a.names().join(" "));
            for g in instance.genotypes() {
                let _ = writeln!(out, "{}", spaced_bits(g.chars()));
            }
        }
        _ => {
            let _ = writeln!(out, "chars: {}", a.names().join(" "));
            for g in instance.genotypes() {
                let _ = writeln!(out, "{}", a.format_set(g.chars()));
            }
        }
    }
    out
}

/// Set form with a `chars:` header; the null haplotype is written as `-`.
pub fn write_haplotypes(alphabet: &Alphabet, haplotypes: &[Haplotype]) -> String {
    let mut out = format!("chars: {}\n", alphabet.names().join(" "));
    for h in haplotypes {
        if h.is_null() {
            out.push_str("-\n");
        } else {
            out.push_str(&alphabet.format_set(h.chars()));
            out.push('\n');
        }
    }
    out
}

fn spaced_bits(v: &BitVector) -> String {
    (0..v.len())
        .map(|i| if v.get(i) { "1" } else { "0" })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A realization family with the names used in its file.
#[derive(Clone, Debug)]
pub struct NamedFamily {
    pub tree_names: Vec<String>,
    pub cotree_names: Vec<String>,
    pub family: RealizationFamily,
}

/// `T: t1 t2 ...` followed by one `c: t_i t_j ...` line per set.
pub fn parse_family(text: &str) -> Result<NamedFamily> {
    let mut lines = content_lines(text);
    let (line, first) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `T:` line"))?;
    let tree = first
        .strip_prefix("T:")
        .ok_or_else(|| Error::parse(line, "first line must start with `T:`"))?;
    let tree_names: Vec<String> = tree.split_whitespace().map(str::to_string).collect();
    let mut tree_index = HashMap::new();
    for (i, t) in tree_names.iter().enumerate() {
        if tree_index.insert(t.as_str(), i).is_some() {
            return Err(Error::parse(line, format!("tree element {t:?} repeated")));
        }
    }
    let mut cotree_names = Vec::new();
    let mut sets = Vec::new();
    for (line, l) in lines {
        let (name, body) = l
            .split_once(':')
            .ok_or_else(|| Error::parse(line, "expected `name: elements`"))?;
        let name = name.trim();
        if name.is_empty()
            || tree_index.contains_key(name)
            || cotree_names.iter().any(|c| c == name)
        {
            return Err(Error::parse(
                line,
                format!("invalid or repeated cotree name {name:?}"),
            ));
        }
        let path = body
            .split_whitespace()
            .map(|t| {
                tree_index
                    .get(t)
                    .copied()
                    .ok_or_else(|| Error::parse(line, format!("unknown tree element {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let set = FamilySet::new(cotree_names.len(), path);
        RealizationFamily::new(tree_names.len(), vec![set.clone()])
            .map_err(|e| Error::parse(line, e.to_string()))?;
        cotree_names.push(name.to_string());
        sets.push(set);
    }
    let family = RealizationFamily::new(tree_names.len(), sets)?;
    Ok(NamedFamily {
        tree_names,
        cotree_names,
        family,
    })
}

/// One `name: u v` line per edge, tree edges first.
pub fn write_realization(named: &NamedFamily, r: &LabeledRealization) -> String {
    let mut out = format!("# {} vertices\n", r.vertex_count);
    for (t, &(u, v)) in r.tree_edges.iter().enumerate() {
        let _ = writeln!(out, "{}: {u} {v}", named.tree_names[t]);
    }
    for &(c, (u, v)) in &r.cotree_edges {
        let _ = writeln!(out, "{}: {u} {v}", named.cotree_names[c]);
    }
    out
}

/// Graphviz rendering: vertices labeled by haplotypes (`∅` for the null
/// haplotype), edges by genotypes, both in index order.
pub fn export_dot(graph: &XorGraph, alphabet: &Alphabet) -> String {
    let mut out = String::from("graph xor {\n");
    for (i, h) in graph.vertices().iter().enumerate() {
        let _ = writeln!(
            out,
            "  v{i} [label=\"{}\"];",
            alphabet.format_set(h.chars())
        );
    }
    for ((u, v), g) in graph.edges().iter().zip(graph.labels()) {
        let _ = writeln!(
            out,
            "  v{u} -- v{v} [label=\"{}\"];",
            alphabet.format_set(g.chars())
        );
    }
    out.push_str("}\n");
    out
}
