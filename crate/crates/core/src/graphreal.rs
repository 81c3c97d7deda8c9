//! Graph realization: given a family of sets `F_i = P_i ∪ {c_i}` with
//! `P_i ⊆ T`, build a graph with a spanning tree labeled by `T` in which the
//! fundamental cycle of each non-tree edge `c_i` is exactly `F_i`.
//!
//! Equivalently: find a tree whose edge set is `T` and in which every `P_i`
//! is a path; each `c_i` then joins the two ends of its path.
//!
//! The decision procedure works on matroid bridges. For a connected family
//! it picks a tree element `y` whose fundamental cut `Y` leaves at least two
//! bridges (components of the family with `Y` deleted). Each bridge is
//! realized recursively together with `y` so that `Y` becomes a vertex star,
//! which fixes how the bridge splits `Y` into classes (by the vertex each cut
//! edge lands on). Two bridges can share a side of the cut only if some class
//! of one and some class of the other cover `Y`; the family is realizable
//! iff the resulting conflict graph is bipartite. If no element yields two
//! bridges, every tree edge is a leaf edge and the tree must be a star.

use std::cmp::Reverse;
use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};

/// One member of a realization family: a cotree element and its tree path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySet {
    pub cotree: usize,
    pub path: Vec<usize>,
}

impl FamilySet {
    pub fn new(cotree: usize, path: impl IntoIterator<Item = usize>) -> Self {
        Self {
            cotree,
            path: path.into_iter().collect(),
        }
    }
}

/// Tree elements are `0..tree_count`; cotree elements are named by the sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationFamily {
    tree_count: usize,
    sets: Vec<FamilySet>,
}

impl RealizationFamily {
    pub fn new(tree_count: usize, sets: Vec<FamilySet>) -> Result<Self> {
        let mut cotree = HashSet::new();
        for s in &sets {
            validate_set(tree_count, s)?;
            if !cotree.insert(s.cotree) {
                return Err(Error::Usage(format!(
                    "cotree element {} appears in more than one set",
                    s.cotree
                )));
            }
        }
        Ok(Self { tree_count, sets })
    }

    pub fn tree_count(&self) -> usize {
        self.tree_count
    }

    pub fn sets(&self) -> &[FamilySet] {
        &self.sets
    }
}

fn validate_set(tree_count: usize, s: &FamilySet) -> Result<()> {
    if s.path.len() < 2 {
        return Err(Error::Usage(format!(
            "set of cotree element {} has fewer than two tree elements",
            s.cotree
        )));
    }
    let mut seen = HashSet::new();
    for &t in &s.path {
        if t >= tree_count {
            return Err(Error::Usage(format!("unknown tree element {t}")));
        }
        if !seen.insert(t) {
            return Err(Error::Usage(format!("tree element {t} repeated in a set")));
        }
    }
    Ok(())
}

/// A realizing graph on vertices `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledRealization {
    pub vertex_count: usize,
    /// `tree_edges[t]` is the edge labeled by tree element `t`.
    pub tree_edges: Vec<(usize, usize)>,
    /// `(cotree element, edge)` in family order.
    pub cotree_edges: Vec<(usize, (usize, usize))>,
}

/// Decides realizability; `Ok(None)` means the family is not realizable.
pub fn realize(family: &RealizationFamily) -> Result<Option<LabeledRealization>> {
    let mut paths = HashSet::new();
    for s in &family.sets {
        let mut p = s.path.clone();
        p.sort_unstable();
        if !paths.insert(p) {
            // two cotree edges with one tree path would be parallel
            return Ok(None);
        }
    }
    let sets: Vec<Vec<usize>> = family.sets.iter().map(|s| s.path.clone()).collect();
    let Some(tree) = realize_tree(family.tree_count, &sets)? else {
        return Ok(None);
    };
    let realization = attach_cotree(family, tree)
        .ok_or_else(|| Error::Internal("realized tree lost a path".into()))?;
    if !verify_realization(family, &realization) {
        return Err(Error::Internal("realization failed re-verification".into()));
    }
    Ok(Some(realization))
}

fn attach_cotree(
    family: &RealizationFamily,
    tree: Vec<(usize, usize)>,
) -> Option<LabeledRealization> {
    let mut cotree_edges = Vec::with_capacity(family.sets.len());
    for s in &family.sets {
        let ends = path_ends(&tree, &s.path)?;
        cotree_edges.push((s.cotree, ends));
    }
    Some(LabeledRealization {
        vertex_count: family.tree_count + 1,
        tree_edges: tree,
        cotree_edges,
    })
}

/// End vertices of `elements` when they form a path in `tree`.
fn path_ends(tree: &[(usize, usize)], elements: &[usize]) -> Option<(usize, usize)> {
    let mut degree: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for &e in elements {
        let (a, b) = tree[e];
        *degree.entry(a).or_default() += 1;
        *degree.entry(b).or_default() += 1;
    }
    // in a forest, |V| = |E| + 1 means a single component
    if degree.len() != elements.len() + 1 || degree.values().any(|&d| d > 2) {
        return None;
    }
    let mut ends: Vec<usize> = degree
        .into_iter()
        .filter(|&(_, d)| d == 1)
        .map(|(v, _)| v)
        .collect();
    ends.sort_unstable();
    (ends.len() == 2).then(|| (ends[0], ends[1]))
}

/// Independent check: tree edges span, every fundamental cycle matches its
/// set, and the graph is simple.
pub fn verify_realization(family: &RealizationFamily, r: &LabeledRealization) -> bool {
    let n = family.tree_count;
    if r.tree_edges.len() != n
        || r.vertex_count != n + 1
        || r.cotree_edges.len() != family.sets.len()
    {
        return false;
    }
    let mut adj = vec![Vec::new(); r.vertex_count];
    let mut uf = UnionFind::new(r.vertex_count);
    for (t, &(a, b)) in r.tree_edges.iter().enumerate() {
        if a >= r.vertex_count || b >= r.vertex_count || !uf.union(a, b) {
            return false;
        }
        adj[a].push((b, t));
        adj[b].push((a, t));
    }
    let mut seen_edges = HashSet::new();
    for &(a, b) in &r.tree_edges {
        seen_edges.insert((a.min(b), a.max(b)));
    }
    for (s, &(c, (a, b))) in family.sets.iter().zip(&r.cotree_edges) {
        if c != s.cotree || a == b || a >= r.vertex_count || b >= r.vertex_count {
            return false;
        }
        if !seen_edges.insert((a.min(b), a.max(b))) {
            return false;
        }
        let mut on_path = tree_path(&adj, a, b);
        on_path.sort_unstable();
        let mut want = s.path.clone();
        want.sort_unstable();
        if on_path != want {
            return false;
        }
    }
    true
}

/// Tree elements on the path between `from` and `to`.
fn tree_path(adj: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(w, e) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    let mut out = Vec::new();
    let mut v = to;
    while let Some((p, e)) = prev[v] {
        out.push(e);
        v = p;
    }
    out
}

/// Incremental realization with rollback: a set is accepted only if the
/// family stays realizable.
#[derive(Clone, Debug)]
pub struct RealizationSession {
    tree_count: usize,
    sets: Vec<FamilySet>,
    cotree: HashSet<usize>,
    realization: LabeledRealization,
}

impl RealizationSession {
    pub fn new(tree_count: usize) -> Self {
        Self {
            tree_count,
            sets: Vec::new(),
            cotree: HashSet::new(),
            // any tree realizes the empty family
            realization: LabeledRealization {
                vertex_count: tree_count + 1,
                tree_edges: (0..tree_count).map(|t| (t, t + 1)).collect(),
                cotree_edges: Vec::new(),
            },
        }
    }

    /// Returns whether the set was accepted; rejected sets leave the session unchanged.
    pub fn add_set(&mut self, set: FamilySet) -> Result<bool> {
        validate_set(self.tree_count, &set)?;
        if self.cotree.contains(&set.cotree) {
            return Err(Error::Usage(format!(
                "cotree element {} already in the family",
                set.cotree
            )));
        }
        let mut sets = self.sets.clone();
        sets.push(set);
        let family = RealizationFamily {
            tree_count: self.tree_count,
            sets,
        };
        match realize(&family)? {
            Some(r) => {
                self.cotree.insert(family.sets.last().unwrap().cotree);
                self.sets = family.sets;
                self.realization = r;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn family(&self) -> RealizationFamily {
        RealizationFamily {
            tree_count: self.tree_count,
            sets: self.sets.clone(),
        }
    }

    pub fn sets(&self) -> &[FamilySet] {
        &self.sets
    }

    pub fn realization(&self) -> &LabeledRealization {
        &self.realization
    }
}

// ---------------------------------------------------------------------------
// tree realization

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False when already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Component label per element (`usize::MAX` for `skip`), numbered by
/// smallest member, plus the component count.
fn components(n: usize, sets: &[&Vec<usize>], skip: Option<usize>) -> (Vec<usize>, usize) {
    let mut uf = UnionFind::new(n);
    for s in sets {
        for w in s.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut root_label = vec![usize::MAX; n];
    let mut count = 0;
    for (e, slot) in label.iter_mut().enumerate() {
        if Some(e) == skip {
            continue;
        }
        let r = uf.find(e);
        if root_label[r] == usize::MAX {
            root_label[r] = count;
            count += 1;
        }
        *slot = root_label[r];
    }
    (label, count)
}

/// A tree on vertices `0..=n` whose edge `i` is element `i`, with every set a path.
fn realize_tree(n: usize, sets: &[Vec<usize>]) -> Result<Option<Vec<(usize, usize)>>> {
    let mut norm: Vec<Vec<usize>> = sets
        .iter()
        .filter(|s| s.len() >= 2)
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    norm.sort();
    norm.dedup();

    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    if n == 1 {
        return Ok(Some(vec![(0, 1)]));
    }

    let all: Vec<&Vec<usize>> = norm.iter().collect();
    let (label, count) = components(n, &all, None);
    if count > 1 {
        return glue_components(n, &norm, &label, count);
    }

    for y in 0..n {
        let avoiding: Vec<&Vec<usize>> = norm
            .iter()
            .filter(|s| s.binary_search(&y).is_err())
            .collect();
        let (bridge_of, bridges) = components(n, &avoiding, Some(y));
        if bridges >= 2 {
            return split_on(n, &norm, y, &bridge_of, bridges);
        }
    }

    // every tree edge is a leaf edge
    if norm.iter().all(|s| s.len() <= 2) {
        Ok(Some((0..n).map(|e| (0, e + 1)).collect()))
    } else {
        Ok(None)
    }
}

/// Realizes each component separately and joins them at vertex 0.
fn glue_components(
    n: usize,
    sets: &[Vec<usize>],
    label: &[usize],
    count: usize,
) -> Result<Option<Vec<(usize, usize)>>> {
    let mut edges = vec![(0, 0); n];
    let mut next_vertex = 1;
    for comp in 0..count {
        let members: Vec<usize> = (0..n).filter(|&e| label[e] == comp).collect();
        let local = local_index(n, &members);
        let local_sets: Vec<Vec<usize>> = sets
            .iter()
            .filter(|s| label[s[0]] == comp)
            .map(|s| s.iter().map(|&e| local[e]).collect())
            .collect();
        let Some(tree) = realize_tree(members.len(), &local_sets)? else {
            return Ok(None);
        };
        let mut map = vec![usize::MAX; members.len() + 1];
        map[0] = 0;
        for slot in map.iter_mut().skip(1) {
            *slot = next_vertex;
            next_vertex += 1;
        }
        for (k, &(a, b)) in tree.iter().enumerate() {
            edges[members[k]] = (map[a], map[b]);
        }
    }
    Ok(Some(edges))
}

fn local_index(n: usize, members: &[usize]) -> Vec<usize> {
    let mut local = vec![usize::MAX; n];
    for (i, &e) in members.iter().enumerate() {
        local[e] = i;
    }
    local
}

/// A bridge realized together with the split element as a pendant edge.
struct Bridge {
    members: Vec<usize>,
    tree: Vec<(usize, usize)>,
    vertex_count: usize,
    root: usize,
    leaf: usize,
    /// Landing vertex of each cut element; index 0 is the split element itself.
    class: Vec<usize>,
}

impl Bridge {
    /// Cut elements that enter the bridge (land away from its root).
    fn entering(&self) -> Vec<usize> {
        (0..self.class.len())
            .filter(|&p| self.class[p] != self.root)
            .collect()
    }
}

fn split_on(
    n: usize,
    sets: &[Vec<usize>],
    y: usize,
    bridge_of: &[usize],
    count: usize,
) -> Result<Option<Vec<(usize, usize)>>> {
    let cut: Vec<&Vec<usize>> = sets
        .iter()
        .filter(|s| s.binary_search(&y).is_ok())
        .collect();

    let mut bridges = Vec::with_capacity(count);
    for b in 0..count {
        let members: Vec<usize> = (0..n).filter(|&e| e != y && bridge_of[e] == b).collect();
        let local = local_index(n, &members);
        let local_y = members.len();
        let mut local_sets: Vec<Vec<usize>> = sets
            .iter()
            .filter(|s| s.binary_search(&y).is_err() && bridge_of[s[0]] == b)
            .map(|s| s.iter().map(|&e| local[e]).collect())
            .collect();
        let mut anchored: Vec<Vec<usize>> = Vec::with_capacity(cut.len());
        for s in &cut {
            let part: Vec<usize> = s
                .iter()
                .filter(|&&e| e != y && bridge_of[e] == b)
                .map(|&e| local[e])
                .collect();
            if !part.is_empty() {
                let mut with_y = part.clone();
                with_y.push(local_y);
                local_sets.push(with_y);
            }
            anchored.push(part);
        }

        let Some(tree) = realize_tree(members.len() + 1, &local_sets)? else {
            return Ok(None);
        };
        let vertex_count = members.len() + 2;
        let mut degree = vec![0usize; vertex_count];
        for &(a, c) in &tree {
            degree[a] += 1;
            degree[c] += 1;
        }
        let (ya, yb) = tree[local_y];
        let (leaf, root) = if degree[ya] == 1 {
            (ya, yb)
        } else if degree[yb] == 1 {
            (yb, ya)
        } else {
            return Err(Error::Internal(
                "split element is not pendant in its bridge".into(),
            ));
        };

        let mut class = Vec::with_capacity(cut.len() + 1);
        class.push(root);
        for part in &anchored {
            if part.is_empty() {
                class.push(root);
                continue;
            }
            let (a, c) = path_ends(&tree, part)
                .ok_or_else(|| Error::Internal("anchored set is not a path".into()))?;
            let end = if a == root {
                c
            } else if c == root {
                a
            } else {
                return Err(Error::Internal(
                    "anchored set does not start at the root".into(),
                ));
            };
            class.push(end);
        }
        bridges.push(Bridge {
            members,
            tree,
            vertex_count,
            root,
            leaf,
            class,
        });
    }

    // Bridges that cannot share a side must be 2-colourable.
    let k = bridges.len();
    let mut conflicts = vec![Vec::new(); k];
    for i in 0..k {
        for j in i + 1..k {
            if !avoid(&bridges[i].class, &bridges[j].class) {
                conflicts[i].push(j);
                conflicts[j].push(i);
            }
        }
    }
    let mut side = vec![usize::MAX; k];
    for start in 0..k {
        if side[start] != usize::MAX {
            continue;
        }
        side[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(b) = queue.pop_front() {
            for &o in &conflicts[b] {
                if side[o] == usize::MAX {
                    side[o] = 1 - side[b];
                    queue.push_back(o);
                } else if side[o] == side[b] {
                    return Ok(None);
                }
            }
        }
    }

    let mut edges = vec![(usize::MAX, usize::MAX); n];
    edges[y] = (0, 1);
    let mut next_vertex = 2;
    for s in 0..2 {
        let on_side: Vec<usize> = (0..k).filter(|&b| side[b] == s).collect();
        assemble_side(&bridges, &on_side, s, &mut next_vertex, &mut edges);
    }

    for s in sets {
        if path_ends(&edges, s).is_none() {
            return Err(Error::Internal(format!(
                "assembled tree breaks the path {s:?} after splitting on {y}"
            )));
        }
    }
    Ok(Some(edges))
}

/// Some class of `a` together with some class of `b` covers the whole cut.
fn avoid(a: &[usize], b: &[usize]) -> bool {
    let covers = |va: Option<usize>, vb: Option<usize>| {
        a.iter()
            .zip(b)
            .all(|(&x, &y)| Some(x) == va || Some(y) == vb)
    };
    let try_fix_a = |va: usize| {
        // everything outside class va of `a` must share one class of `b`
        let vb = a.iter().zip(b).find(|(&x, _)| x != va).map(|(_, &y)| y);
        covers(Some(va), vb)
    };
    let try_fix_b = |vb: usize| {
        let va = a.iter().zip(b).find(|(_, &y)| y != vb).map(|(&x, _)| x);
        covers(va, Some(vb))
    };
    try_fix_a(a[0]) || try_fix_b(b[0])
}

/// Hangs the bridges of one side below `side_root`.
///
/// Bridges are placed in order of how many cut elements enter them (ties:
/// bridges whose entering elements all land on one vertex first). A bridge is
/// attached at the deepest already-placed vertex whose class contains every
/// cut element entering it, or at the side root when there is none.
fn assemble_side(
    bridges: &[Bridge],
    on_side: &[usize],
    side_root: usize,
    next_vertex: &mut usize,
    edges: &mut [(usize, usize)],
) {
    let mut order: Vec<(usize, Vec<usize>, bool)> = on_side
        .iter()
        .map(|&b| {
            let entering = bridges[b].entering();
            let single = entering
                .windows(2)
                .all(|w| bridges[b].class[w[0]] == bridges[b].class[w[1]]);
            (b, entering, single)
        })
        .collect();
    order.sort_by_key(|(b, entering, single)| (Reverse(entering.len()), !*single, *b));

    // (bridge, depth, local -> global vertex map)
    let mut placed: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for (b, entering, _) in order {
        let bridge = &bridges[b];
        let mut attach = (side_root, 0usize);
        if let Some(&first) = entering.first() {
            for (pb, depth, map) in &placed {
                let other = &bridges[*pb];
                let v = other.class[first];
                if v != other.root
                    && entering.iter().all(|&p| other.class[p] == v)
                    && depth + 1 > attach.1
                {
                    attach = (map[v], depth + 1);
                }
            }
        }
        let mut map = vec![usize::MAX; bridge.vertex_count];
        for (v, slot) in map.iter_mut().enumerate() {
            if v == bridge.root {
                *slot = attach.0;
            } else if v != bridge.leaf {
                *slot = *next_vertex;
                *next_vertex += 1;
            }
        }
        for (k, &member) in bridge.members.iter().enumerate() {
            let (a, c) = bridge.tree[k];
            edges[member] = (map[a], map[c]);
        }
        placed.push((b, attach.1, map));
    }
}

// ---------------------------------------------------------------------------
// exhaustive oracle

/// Largest tree the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_TREE: usize = 7;

/// Exhaustive realization over every edge-labeled tree.
///
/// Every edge-labeled tree arises from some vertex-labeled tree rooted at
/// vertex 0 by naming each non-root vertex `v` after the element on the edge
/// to its parent, so enumerating all Prüfer sequences on `|T| + 1` vertices
/// covers every candidate tree.
pub fn brute_force_realize(family: &RealizationFamily) -> Result<Option<LabeledRealization>> {
    let n = family.tree_count;
    if n > BRUTE_FORCE_MAX_TREE {
        return Err(Error::Budget(format!(
            "{n} tree elements exceeds the exhaustive limit of {BRUTE_FORCE_MAX_TREE}"
        )));
    }
    let vertices = n + 1;
    if vertices < 2 {
        let r = LabeledRealization {
            vertex_count: 1,
            tree_edges: Vec::new(),
            cotree_edges: Vec::new(),
        };
        return Ok(family.sets.is_empty().then_some(r));
    }
    let seq_len = vertices.saturating_sub(2);
    let mut seq = vec![0usize; seq_len];
    loop {
        let tree = tree_from_prufer(vertices, &seq);
        if let Some(r) = check_candidate(family, &tree) {
            return Ok(Some(r));
        }
        // advance the sequence odometer-style
        let mut i = 0;
        loop {
            if i == seq_len {
                return Ok(None);
            }
            seq[i] += 1;
            if seq[i] < vertices {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

fn tree_from_prufer(vertices: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; vertices];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(vertices - 1);
    for &s in seq {
        let leaf = (0..vertices)
            .find(|&v| degree[v] == 1)
            .expect("a leaf exists");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..vertices).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn check_candidate(
    family: &RealizationFamily,
    vertex_tree: &[(usize, usize)],
) -> Option<LabeledRealization> {
    let vertices = vertex_tree.len() + 1;
    let mut adj = vec![Vec::new(); vertices];
    for &(a, b) in vertex_tree {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut parent = vec![usize::MAX; vertices];
    let mut queue = VecDeque::from([0usize]);
    parent[0] = 0;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    // element t labels the edge from vertex t + 1 to its parent
    let tree: Vec<(usize, usize)> = (1..vertices).map(|v| (v, parent[v])).collect();

    let mut used: HashSet<(usize, usize)> =
        tree.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let mut cotree_edges = Vec::with_capacity(family.sets.len());
    for s in &family.sets {
        let (a, b) = path_ends(&tree, &s.path)?;
        if !used.insert((a, b)) {
            return None;
        }
        cotree_edges.push((s.cotree, (a, b)));
    }
    Some(LabeledRealization {
        vertex_count: vertices,
        tree_edges: tree,
        cotree_edges,
    })
}
