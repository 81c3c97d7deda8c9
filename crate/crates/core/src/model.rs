//! Genotypes, haplotypes, instances, solutions and xor-graphs.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::bitlin::{BitMatrix, BitVector};
use crate::error::{Error, Result};

/// Ordered set of character (site) names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(char::is_whitespace) {
                return Err(Error::Usage(format!("invalid character name {n:?}")));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::Usage(format!("duplicate character name {n:?}")));
            }
        }
        Ok(Self { names, index })
    }

    /// Names `c0, c1, ...`.
    pub fn numbered(len: usize) -> Self {
        Self::new((0..len).map(|i| format!("c{i}"))).expect("generated names are distinct")
    }

    /// Single-letter names `a, b, c, ...`, falling back to numbered names past 26.
    pub fn letters(len: usize) -> Self {
        if len > 26 {
            return Self::numbered(len);
        }
        Self::new((0..len).map(|i| ((b'a' + i as u8) as char).to_string()))
            .expect("letters are distinct")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Restriction to the listed positions, in order.
    pub fn select(&self, positions: &[usize]) -> Self {
        Self::new(positions.iter().map(|&p| self.names[p].clone()))
            .expect("subset of distinct names is distinct")
    }

    /// Parses a whitespace-separated token list into a vector over this alphabet.
    pub fn parse_set(&self, text: &str) -> Result<BitVector> {
        let mut v = BitVector::zeros(self.len());
        for tok in text.split_whitespace() {
            let p = self
                .position(tok)
                .ok_or_else(|| Error::Usage(format!("unknown character {tok:?}")))?;
            v.set(p, true);
        }
        Ok(v)
    }

    /// Space-separated names of the one bits; `∅` for the empty set.
    pub fn format_set(&self, v: &BitVector) -> String {
        if v.is_zero() {
            return "∅".to_string();
        }
        v.ones()
            .map(|i| self.names[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A non-empty set of heterozygous sites.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype(BitVector);

impl Genotype {
    pub fn new(chars: BitVector) -> Result<Self> {
        if chars.is_zero() {
            return Err(Error::Usage("genotypes must be non-empty".into()));
        }
        Ok(Self(chars))
    }

    pub fn chars(&self) -> &BitVector {
        &self.0
    }

    pub fn into_chars(self) -> BitVector {
        self.0
    }
}

impl fmt::Debug for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genotype({})", self.0)
    }
}

/// A possibly empty set of sites carrying the minor allele.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Haplotype(BitVector);

impl Haplotype {
    pub fn new(chars: BitVector) -> Self {
        Self(chars)
    }

    pub fn null(len: usize) -> Self {
        Self(BitVector::zeros(len))
    }

    pub fn chars(&self) -> &BitVector {
        &self.0
    }

    pub fn into_chars(self) -> BitVector {
        self.0
    }

    pub fn is_null(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Debug for Haplotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Haplotype({})", self.0)
    }
}

/// The genotype resolved by two distinct haplotypes.
pub fn resolve_pair(h1: &Haplotype, h2: &Haplotype) -> Result<Genotype> {
    let x = h1.chars().xor(h2.chars())?;
    if x.is_zero() {
        return Err(Error::Usage(
            "a resolving pair needs two distinct haplotypes".into(),
        ));
    }
    Genotype::new(x)
}

/// An alphabet plus a set of distinct, non-empty xor-genotypes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    alphabet: Alphabet,
    genotypes: Vec<Genotype>,
}

impl Instance {
    pub fn new(alphabet: Alphabet, genotypes: Vec<Genotype>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(genotypes.len());
        for (i, g) in genotypes.iter().enumerate() {
            if g.chars().len() != alphabet.len() {
                return Err(Error::Usage(format!(
                    "genotype {i} has {} positions, alphabet has {}",
                    g.chars().len(),
                    alphabet.len()
                )));
            }
            if !seen.insert(g) {
                return Err(Error::Usage(format!("genotype {i} is a duplicate")));
            }
        }
        Ok(Self {
            alphabet,
            genotypes,
        })
    }

    /// Builds an instance from raw rows, rejecting empty and duplicate rows.
    pub fn from_rows(alphabet: Alphabet, rows: Vec<BitVector>) -> Result<Self> {
        let genotypes = rows.into_iter().map(Genotype::new).collect::<Result<_>>()?;
        Self::new(alphabet, genotypes)
    }

    /// Convenience constructor: each entry is a space-separated character list.
    /// The alphabet is the sorted set of names used.
    pub fn from_sets(sets: &[&str]) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        for s in sets {
            for tok in s.split_whitespace() {
                if !names.iter().any(|n| n == tok) {
                    names.push(tok.to_string());
                }
            }
        }
        names.sort();
        let alphabet = Alphabet::new(names)?;
        let rows = sets
            .iter()
            .map(|s| alphabet.parse_set(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(alphabet, rows)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn genotypes(&self) -> &[Genotype] {
        &self.genotypes
    }

    pub fn genotype(&self, i: usize) -> &Genotype {
        &self.genotypes[i]
    }

    /// Number of genotypes (n).
    pub fn len(&self) -> usize {
        self.genotypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genotypes.is_empty()
    }

    /// Number of characters (m).
    pub fn char_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(
            self.char_count(),
            self.genotypes.iter().map(|g| g.chars().clone()).collect(),
        )
        .expect("genotype lengths match the alphabet")
    }

    /// Number of genotypes containing each character.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.char_count()];
        for g in &self.genotypes {
            for c in g.chars().ones() {
                occ[c] += 1;
            }
        }
        occ
    }

    /// Maximum number of genotypes sharing one character.
    pub fn max_occurrence(&self) -> usize {
        self.occurrences().into_iter().max().unwrap_or(0)
    }

    /// Maximum genotype size.
    pub fn max_genotype_size(&self) -> usize {
        self.genotypes
            .iter()
            .map(|g| g.chars().count_ones())
            .max()
            .unwrap_or(0)
    }

    /// Same alphabet, genotypes reordered by `order` (a permutation of indices).
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            alphabet: self.alphabet.clone(),
            genotypes: order.iter().map(|&i| self.genotypes[i].clone()).collect(),
        }
    }

    /// Keeps the listed genotypes, in order.
    pub fn subset(&self, keep: &[usize]) -> Self {
        self.permuted(keep)
    }
}

/// A set of distinct haplotypes with a resolving pair for every genotype.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    haplotypes: Vec<Haplotype>,
    resolution: Vec<(usize, usize)>,
}

impl Solution {
    pub fn haplotypes(&self) -> &[Haplotype] {
        &self.haplotypes
    }

    pub fn into_haplotypes(self) -> Vec<Haplotype> {
        self.haplotypes
    }

    /// `resolution()[i]` is the pair of haplotype indices resolving genotype `i`.
    pub fn resolution(&self) -> &[(usize, usize)] {
        &self.resolution
    }

    pub fn len(&self) -> usize {
        self.haplotypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.haplotypes.is_empty()
    }

    pub fn contains_null(&self) -> bool {
        self.haplotypes.iter().any(Haplotype::is_null)
    }
}

/// Finds a resolving pair for every genotype of `instance` among `haplotypes`.
///
/// Duplicate haplotypes are collapsed (first occurrence kept) before the
/// witness is built. Each lookup probes `x ^ h` in a hash set, so the cost is
/// `O(n * |H|)` vector operations.
pub fn verify(instance: &Instance, haplotypes: &[Haplotype]) -> Result<Solution> {
    let m = instance.char_count();
    let mut distinct: Vec<Haplotype> = Vec::with_capacity(haplotypes.len());
    let mut index: HashMap<&BitVector, usize> = HashMap::with_capacity(haplotypes.len());
    for h in haplotypes {
        if h.chars().len() != m {
            return Err(Error::Usage(format!(
                "haplotype has {} positions, alphabet has {m}",
                h.chars().len()
            )));
        }
        if !index.contains_key(h.chars()) {
            index.insert(h.chars(), distinct.len());
            distinct.push(h.clone());
        }
    }

    let mut resolution = Vec::with_capacity(instance.len());
    for (gi, g) in instance.genotypes().iter().enumerate() {
        let pair = distinct.iter().enumerate().find_map(|(i, h)| {
            let partner = h.chars().xored(g.chars());
            index.get(&partner).map(|&j| (i.min(j), i.max(j)))
        });
        match pair {
            Some(p) => resolution.push(p),
            None => {
                return Err(Error::Infeasible(format!(
                    "genotype {gi} ({}) has no resolving pair",
                    instance.alphabet().format_set(g.chars())
                )))
            }
        }
    }
    Ok(Solution {
        haplotypes: distinct,
        resolution,
    })
}

/// Each haplotype xor-ed with `t`; pairwise xors are unchanged.
pub fn translate(haplotypes: &[Haplotype], t: &Haplotype) -> Vec<Haplotype> {
    haplotypes
        .iter()
        .map(|h| Haplotype::new(h.chars().xored(t.chars())))
        .collect()
}

/// Translates so that the first haplotype becomes the null haplotype, unless
/// the null haplotype is already present.
pub fn normalize_with_null(haplotypes: &[Haplotype]) -> Vec<Haplotype> {
    match haplotypes.first() {
        Some(first) if !haplotypes.iter().any(Haplotype::is_null) => translate(haplotypes, first),
        _ => haplotypes.to_vec(),
    }
}

/// Graph whose vertices are haplotypes and whose edges are labeled by genotypes.
///
/// Edge `i` is labeled by genotype `i` of the instance it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorGraph {
    vertices: Vec<Haplotype>,
    edges: Vec<(usize, usize)>,
    labels: Vec<Genotype>,
}

impl XorGraph {
    /// Checks every invariant: simple graph, endpoint xor equals the label,
    /// labels pairwise distinct.
    pub fn new(
        vertices: Vec<Haplotype>,
        edges: Vec<(usize, usize)>,
        labels: Vec<Genotype>,
    ) -> Result<Self> {
        if edges.len() != labels.len() {
            return Err(Error::Usage("every edge needs exactly one label".into()));
        }
        let mut seen_edges = HashSet::new();
        let mut seen_labels = HashSet::new();
        for (i, (&(u, v), label)) in edges.iter().zip(&labels).enumerate() {
            if u >= vertices.len() || v >= vertices.len() {
                return Err(Error::Usage(format!(
                    "edge {i} references a missing vertex"
                )));
            }
            if u == v {
                return Err(Error::Usage(format!("edge {i} is a loop")));
            }
            if !seen_edges.insert((u.min(v), u.max(v))) {
                return Err(Error::Usage(format!(
                    "edge {i} is parallel to another edge"
                )));
            }
            if !seen_labels.insert(label) {
                return Err(Error::Usage(format!("label of edge {i} is duplicated")));
            }
            if vertices[u].chars().xored(vertices[v].chars()) != *label.chars() {
                return Err(Error::Usage(format!(
                    "edge {i}: endpoint xor differs from its label"
                )));
            }
        }
        Ok(Self {
            vertices,
            edges,
            labels,
        })
    }

    pub fn vertices(&self) -> &[Haplotype] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[Genotype] {
        &self.labels
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Edges whose label contains character `alpha`.
    pub fn character_cut(&self, alpha: usize) -> Result<Vec<usize>> {
        let width = self.labels.first().map(|l| l.chars().len());
        if let Some(w) = width {
            if alpha >= w {
                return Err(Error::Usage(format!("unknown character index {alpha}")));
            }
        }
        Ok(self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.chars().get(alpha))
            .map(|(i, _)| i)
            .collect())
    }

    /// True iff every fundamental cycle of a depth-first spanning forest has
    /// an empty label xor-sum.
    pub fn fundamental_cycle_check(&self) -> bool {
        let labeled: Vec<(usize, usize, BitVector)> = self
            .edges
            .iter()
            .zip(&self.labels)
            .map(|(&(u, v), l)| (u, v, l.chars().clone()))
            .collect();
        let width = self.vertices.first().map_or(0, |h| h.chars().len());
        label_vertices(self.vertices.len(), width, &labeled).is_ok()
    }
}

/// Builds the xor-graph of a verified solution.
pub fn build_xor_graph(instance: &Instance, solution: &Solution) -> Result<XorGraph> {
    if solution.resolution().len() != instance.len() {
        return Err(Error::Usage(
            "solution does not carry a witness for every genotype".into(),
        ));
    }
    XorGraph::new(
        solution.haplotypes().to_vec(),
        solution.resolution().to_vec(),
        instance.genotypes().to_vec(),
    )
}

/// Assigns haplotypes to the vertices of a graph with genotype-labeled edges.
///
/// The lowest-index vertex of each component receives the null haplotype and
/// the rest follow by propagation along a depth-first forest. Fails with the
/// offending fundamental cycle (as edge indices) when a non-tree edge's label
/// disagrees with its endpoints.
pub fn label_vertices(
    vertex_count: usize,
    width: usize,
    edges: &[(usize, usize, BitVector)],
) -> Result<Vec<Haplotype>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertex_count];
    for (i, (u, v, label)) in edges.iter().enumerate() {
        if *u >= vertex_count || *v >= vertex_count || label.len() != width {
            return Err(Error::Usage(format!("edge {i} is malformed")));
        }
        adj[*u].push((*v, i));
        adj[*v].push((*u, i));
    }

    let mut value: Vec<Option<BitVector>> = vec![None; vertex_count];
    let mut parent_edge: Vec<Option<usize>> = vec![None; vertex_count];
    let mut depth = vec![0usize; vertex_count];
    let mut tree_edge = vec![false; edges.len()];

    for root in 0..vertex_count {
        if value[root].is_some() {
            continue;
        }
        value[root] = Some(BitVector::zeros(width));
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &(w, e) in adj[u].iter().rev() {
                if value[w].is_none() {
                    let hv = value[u].as_ref().unwrap().xored(&edges[e].2);
                    value[w] = Some(hv);
                    parent_edge[w] = Some(e);
                    depth[w] = depth[u] + 1;
                    tree_edge[e] = true;
                    stack.push(w);
                }
            }
        }
    }

    let value: Vec<BitVector> = value.into_iter().map(Option::unwrap).collect();
    for (i, (u, v, label)) in edges.iter().enumerate() {
        if tree_edge[i] {
            continue;
        }
        if value[*u].xored(&value[*v]) != *label {
            let mut cycle = vec![i];
            let (mut a, mut b) = (*u, *v);
            let other = |x: usize, e: usize| {
                let (p, q, _) = &edges[e];
                if *p == x {
                    *q
                } else {
                    *p
                }
            };
            while a != b {
                if depth[a] >= depth[b] {
                    let e = parent_edge[a].expect("non-root has a parent");
                    cycle.push(e);
                    a = other(a, e);
                } else {
                    let e = parent_edge[b].expect("non-root has a parent");
                    cycle.push(e);
                    b = other(b, e);
                }
            }
            return Err(Error::CycleViolation { cycle });
        }
    }
    Ok(value.into_iter().map(Haplotype::new).collect())
}
