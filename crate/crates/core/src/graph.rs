//! Multigraph, incidence rules and the edge graph `G_{E,A}`.
//!
//! The nodes of every reachability analysis here are the *edges* of the
//! multigraph; an arrow `a -> b` exists when the incidence matrix allows `b`
//! to follow `a`. The multigraph vertices only matter for composition
//! compatibility and for the vertex spaces.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{GdmsError, Result};
use crate::system::{Alphabet, GdmsSystem};

/// Default bound on the number of words a single enumeration may produce.
pub const DEFAULT_WORD_LIMIT: u128 = 10_000_000;

/// Environment variable that overrides [`DEFAULT_WORD_LIMIT`].
pub const WORD_LIMIT_ENV: &str = "GDMS_WORD_LIMIT";

/// The enumeration count guard in effect for this process.
pub fn word_limit() -> u128 {
    std::env::var(WORD_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_WORD_LIMIT)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRecord {
    pub id: String,
    pub initial: usize,
    pub terminal: usize,
}

impl EdgeRecord {
    /// Integer label of the edge, if its id is a positive integer.
    pub fn label(&self) -> Option<u64> {
        parse_label(&self.id)
    }
}

pub(crate) fn parse_label(id: &str) -> Option<u64> {
    if id.is_empty() || !id.bytes().all(|b| b.is_ascii_digit()) || id.starts_with('0') {
        return None;
    }
    id.parse().ok()
}

/// Directed multigraph `(V, E, i, t)` with a finite edge list.
///
/// Infinite alphabets keep an empty (or truncated) edge list here and are
/// described by [`Alphabet::Infinite`] on the owning system.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGraph {
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
}

impl MultiGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<EdgeRecord>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(GdmsError::validation(None, format!("duplicate vertex `{v}`")));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !seen.insert(e.id.as_str()) {
                return Err(GdmsError::validation(None, format!("duplicate edge id `{}`", e.id)));
            }
            if e.initial >= vertices.len() || e.terminal >= vertices.len() {
                return Err(GdmsError::validation(
                    None,
                    format!("edge `{}` references an unknown vertex", e.id),
                ));
            }
        }
        Ok(MultiGraph { vertices, edges })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// Keeps the listed edges (in the given order) and all vertices.
    pub(crate) fn restrict(&self, keep: &[usize]) -> MultiGraph {
        MultiGraph {
            vertices: self.vertices.clone(),
            edges: keep.iter().map(|&i| self.edges[i].clone()).collect(),
        }
    }

    /// True when every ordered pair of vertices is joined by an edge.
    pub fn has_all_vertex_connections(&self) -> bool {
        let n = self.vertices.len();
        let mut hit = vec![false; n * n];
        for e in &self.edges {
            hit[e.initial * n + e.terminal] = true;
        }
        hit.into_iter().all(|b| b)
    }
}

/// Dense 0/1 matrix indexed by edge positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    size: usize,
    bits: Vec<bool>,
}

impl IncidenceMatrix {
    pub fn zeros(size: usize) -> Self {
        IncidenceMatrix {
            size,
            bits: vec![false; size * size],
        }
    }

    pub fn from_pairs(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut m = Self::zeros(size);
        for (a, b) in pairs {
            if a >= size || b >= size {
                return Err(GdmsError::Input(format!(
                    "pair ({a}, {b}) out of range for {size} edges"
                )));
            }
            m.set(a, b, true);
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.size + b]
    }

    pub fn set(&mut self, a: usize, b: usize, value: bool) {
        self.bits[a * self.size + b] = value;
    }

    /// Allowed pairs in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.size)
            .flat_map(move |a| (0..self.size).map(move |b| (a, b)))
            .filter(move |&(a, b)| self.get(a, b))
    }

    fn submatrix(&self, keep: &[usize]) -> IncidenceMatrix {
        let mut m = Self::zeros(keep.len());
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate() {
                m.set(i, j, self.get(a, b));
            }
        }
        m
    }
}

/// Which edge may follow which.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IncidenceSpec {
    /// Explicit matrix over edge positions.
    Explicit(IncidenceMatrix),
    /// Every edge may follow every edge.
    Full,
    /// `A(i, j) = 1` iff `|i - j| <= width` on integer labels.
    Banded(u64),
    /// `A(e, f) = 1` iff `e < f` on integer labels.
    UpperTriangular,
}

impl IncidenceSpec {
    /// Whether the rule reads integer labels rather than edge positions.
    pub fn needs_labels(&self) -> bool {
        matches!(self, IncidenceSpec::Banded(_) | IncidenceSpec::UpperTriangular)
    }

    /// Rule evaluation on integer labels. `None` for explicit matrices.
    pub fn allows_labels(&self, a: u64, b: u64) -> Option<bool> {
        match self {
            IncidenceSpec::Explicit(_) => None,
            IncidenceSpec::Full => Some(true),
            IncidenceSpec::Banded(w) => Some(a.abs_diff(b) <= *w),
            IncidenceSpec::UpperTriangular => Some(a < b),
        }
    }

    /// Admissibility of a word.
    ///
    /// Entries are edge positions for explicit matrices and positive integer
    /// labels for the named rules.
    pub fn is_admissible(&self, word: &[u64]) -> Result<bool> {
        if word.is_empty() {
            return Err(GdmsError::Input("words have length at least 1".into()));
        }
        match self {
            IncidenceSpec::Explicit(m) => {
                if let Some(&bad) = word.iter().find(|&&e| e as usize >= m.size() || e > usize::MAX as u64) {
                    return Err(GdmsError::Input(format!("unknown edge position {bad}")));
                }
                Ok(word.windows(2).all(|p| m.get(p[0] as usize, p[1] as usize)))
            }
            rule => {
                if word.contains(&0) {
                    return Err(GdmsError::Input("edge labels are positive integers".into()));
                }
                Ok(word.windows(2).all(|p| rule.allows_labels(p[0], p[1]).unwrap_or(false)))
            }
        }
    }

    pub(crate) fn restrict(&self, keep: &[usize]) -> IncidenceSpec {
        match self {
            IncidenceSpec::Explicit(m) => IncidenceSpec::Explicit(m.submatrix(keep)),
            other => other.clone(),
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            IncidenceSpec::Explicit(_) => "explicit",
            IncidenceSpec::Full => "full",
            IncidenceSpec::Banded(_) => "banded",
            IncidenceSpec::UpperTriangular => "upper",
        }
    }
}

impl fmt::Display for IncidenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IncidenceSpec::Banded(w) => write!(f, "banded {w}"),
            other => f.write_str(other.keyword()),
        }
    }
}

/// An admissible word, as edge positions of a finite system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }
}

/// The edge graph `G_{E,A}` of a finite system: successor lists sorted by
/// edge position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeGraph {
    succ: Vec<Vec<usize>>,
}

impl EdgeGraph {
    pub fn from_successors(mut succ: Vec<Vec<usize>>) -> Self {
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        EdgeGraph { succ }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successors(&self, a: usize) -> &[usize] {
        &self.succ[a]
    }

    pub fn allows(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    pub fn is_admissible(&self, word: &[usize]) -> bool {
        word.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.len()];
        for (a, s) in self.succ.iter().enumerate() {
            for &b in s {
                pred[b].push(a);
            }
        }
        pred
    }

    /// Number of admissible words of each length `1..=n`, saturating.
    pub fn word_counts(&self, n: usize) -> Vec<u128> {
        let mut per_start = vec![1u128; self.len()];
        let mut totals = Vec::with_capacity(n);
        for k in 1..=n {
            if k > 1 {
                per_start = self
                    .succ
                    .iter()
                    .map(|s| s.iter().fold(0u128, |acc, &b| acc.saturating_add(per_start[b])))
                    .collect();
            }
            totals.push(per_start.iter().fold(0u128, |acc, &c| acc.saturating_add(c)));
        }
        totals
    }

    /// Edges surviving iterated removal of edges without an allowed successor.
    pub fn prune(&self) -> Vec<usize> {
        let mut alive = vec![true; self.len()];
        let mut live_succ: Vec<usize> = self.succ.iter().map(Vec::len).collect();
        let pred = self.predecessors();
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&a| live_succ[a] == 0).collect();
        while let Some(a) = queue.pop_front() {
            if !alive[a] {
                continue;
            }
            alive[a] = false;
            for &p in &pred[a] {
                if alive[p] {
                    live_succ[p] -= 1;
                    if live_succ[p] == 0 {
                        queue.push_back(p);
                    }
                }
            }
        }
        (0..self.len()).filter(|&a| alive[a]).collect()
    }

    /// Tarjan's algorithm, iterative. Components come out in reverse
    /// topological order (sinks first).
    pub fn tarjan(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut out = Vec::new();
        let mut next = 0usize;
        let mut frames: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            frames.push((root, 0));
            index[root] = next;
            low[root] = next;
            next += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
                if let Some(&w) = self.succ[v].get(*pos) {
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = next;
                        low[w] = next;
                        next += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
        out
    }

    /// Strongly connected components that carry a cycle, sorted by their
    /// smallest edge.
    pub fn cyclic_components(&self) -> Vec<Vec<usize>> {
        let mut comps: Vec<Vec<usize>> = self
            .tarjan()
            .into_iter()
            .filter(|c| c.len() > 1 || self.allows(c[0], c[0]))
            .collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    fn reachable_from(&self, starts: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in starts {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(a) = queue.pop_front() {
            for &b in &self.succ[a] {
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        seen
    }

    /// Shortest nonempty word `w` with `from w to` admissible.
    fn connecting_word(&self, from: usize, to: usize, pred: &[Vec<usize>]) -> Option<Vec<usize>> {
        let n = self.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &s in &self.succ[from] {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        let ends: BTreeSet<usize> = pred[to].iter().copied().collect();
        while let Some(a) = queue.pop_front() {
            if ends.contains(&a) {
                let mut path = vec![a];
                let mut cur = a;
                while parent[cur] != usize::MAX {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &b in &self.succ[a] {
                if !seen[b] {
                    seen[b] = true;
                    parent[b] = a;
                    queue.push_back(b);
                }
            }
        }
        None
    }

    /// Period of a strongly connected graph (gcd of cycle lengths).
    fn period(&self) -> usize {
        let n = self.len();
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        let mut g = 0usize;
        while let Some(a) = queue.pop_front() {
            for &b in &self.succ[a] {
                if level[b] == usize::MAX {
                    level[b] = level[a] + 1;
                    queue.push_back(b);
                } else {
                    g = gcd(g, (level[a] + 1).abs_diff(level[b]));
                }
            }
        }
        g
    }

    /// Smallest `p` with every entry of `A^p` positive, searched up to the
    /// Wielandt bound `(n - 1)^2 + 1`.
    fn primitivity_exponent(&self) -> Option<usize> {
        let n = self.len();
        let words = n.div_ceil(64);
        let row_of = |succ: &[usize]| {
            let mut r = vec![0u64; words];
            for &b in succ {
                r[b / 64] |= 1 << (b % 64);
            }
            r
        };
        let base: Vec<Vec<u64>> = self.succ.iter().map(|s| row_of(s)).collect();
        let full = |r: &[u64]| (0..n).all(|b| r[b / 64] >> (b % 64) & 1 == 1);
        let mut power = base.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for p in 1..=bound {
            if power.iter().all(|r| full(r)) {
                return Some(p);
            }
            power = power
                .iter()
                .map(|r| {
                    let mut out = vec![0u64; words];
                    for j in 0..n {
                        if r[j / 64] >> (j % 64) & 1 == 1 {
                            for (o, x) in out.iter_mut().zip(&base[j]) {
                                *o |= x;
                            }
                        }
                    }
                    out
                })
                .collect();
        }
        None
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Lazy lexicographic stream of the admissible words of one length.
pub struct WordStream<'a> {
    graph: &'a EdgeGraph,
    n: usize,
    // (edge, index of the next successor to try)
    frames: Vec<(usize, usize)>,
    next_root: usize,
}

impl Iterator for WordStream<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        loop {
            if self.frames.is_empty() {
                if self.next_root >= self.graph.len() {
                    return None;
                }
                self.frames.push((self.next_root, 0));
                self.next_root += 1;
                if self.n == 1 {
                    let w = Word(vec![self.frames[0].0]);
                    self.frames.clear();
                    return Some(w);
                }
                continue;
            }
            let depth = self.frames.len();
            let (edge, pos) = *self.frames.last().unwrap();
            match self.graph.successors(edge).get(pos) {
                None => {
                    self.frames.pop();
                }
                Some(&b) => {
                    self.frames.last_mut().unwrap().1 += 1;
                    if depth + 1 == self.n {
                        let mut w: Vec<usize> = self.frames.iter().map(|f| f.0).collect();
                        w.push(b);
                        return Some(Word(w));
                    }
                    self.frames.push((b, 0));
                }
            }
        }
    }
}

/// Stream of `E_A^n` in lexicographic edge-list order.
///
/// Fails up front with a resource error when the stream would yield more
/// than `limit` words.
pub fn enumerate_words<'a>(graph: &'a EdgeGraph, n: usize, limit: u128) -> Result<WordStream<'a>> {
    if n == 0 {
        return Err(GdmsError::Input("word length must be at least 1".into()));
    }
    let count = *graph.word_counts(n).last().unwrap();
    if count > limit {
        return Err(GdmsError::ResourceLimit {
            what: format!("{count} admissible words of length {n}"),
            bound: limit,
        });
    }
    Ok(WordStream {
        graph,
        n,
        frames: Vec::new(),
        next_root: 0,
    })
}

/// Strongly-connected-component structure of `G_{E,A}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccReport {
    /// Components carrying a cycle, each sorted, ordered by smallest edge.
    pub components: Vec<Vec<usize>>,
    /// `C_0`: edges lying on no admissible cycle.
    pub isolated: Vec<usize>,
    /// `(i, j)`: some path leaves component `i` and enters `j` passing only
    /// through isolated edges.
    pub condensation: Vec<(usize, usize)>,
    /// `(i, j)`: an admissible word starts in `i` and later visits `j`.
    pub communication: Vec<(usize, usize)>,
    component_of: Vec<Option<usize>>,
}

impl SccReport {
    pub fn component_of(&self, edge: usize) -> Option<usize> {
        self.component_of.get(edge).copied().flatten()
    }

    /// Communication in either direction.
    pub fn communicate(&self, i: usize, j: usize) -> bool {
        self.communication.contains(&(i, j)) || self.communication.contains(&(j, i))
    }

    /// Topological order of the condensation, `None` if it had a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let k = self.components.len();
        let mut indeg = vec![0usize; k];
        for &(_, j) in &self.condensation {
            indeg[j] += 1;
        }
        let mut ready: VecDeque<usize> = (0..k).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(k);
        while let Some(i) = ready.pop_front() {
            order.push(i);
            for &(a, b) in &self.condensation {
                if a == i {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        ready.push_back(b);
                    }
                }
            }
        }
        (order.len() == k).then_some(order)
    }
}

/// Component structure of a finite edge graph.
pub fn scc_of_graph(graph: &EdgeGraph) -> SccReport {
    let components = graph.cyclic_components();
    let mut component_of = vec![None; graph.len()];
    for (ci, comp) in components.iter().enumerate() {
        for &e in comp {
            component_of[e] = Some(ci);
        }
    }
    let isolated: Vec<usize> = (0..graph.len()).filter(|&e| component_of[e].is_none()).collect();

    let mut condensation = BTreeSet::new();
    let mut communication = BTreeSet::new();
    for (ci, comp) in components.iter().enumerate() {
        // Frontier search that stops on entering another component.
        let mut seen = vec![false; graph.len()];
        let mut queue: VecDeque<usize> = comp.iter().copied().collect();
        for &e in comp {
            seen[e] = true;
        }
        while let Some(a) = queue.pop_front() {
            for &b in graph.successors(a) {
                if seen[b] {
                    continue;
                }
                seen[b] = true;
                match component_of[b] {
                    Some(cj) if cj != ci => {
                        condensation.insert((ci, cj));
                    }
                    _ => queue.push_back(b),
                }
            }
        }
        let reach = graph.reachable_from(comp);
        for (cj, other) in components.iter().enumerate() {
            if cj != ci && reach[other[0]] {
                communication.insert((ci, cj));
            }
        }
    }

    SccReport {
        components,
        isolated,
        condensation: condensation.into_iter().collect(),
        communication: communication.into_iter().collect(),
        component_of,
    }
}

/// SCC decomposition of a finite system over its declared edge set.
pub fn scc_decompose(system: &GdmsSystem) -> Result<SccReport> {
    Ok(scc_of_graph(&system.edge_graph()?))
}

/// A yes/no property with a one-line reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub value: bool,
    pub justification: String,
}

impl Verdict {
    fn new(value: bool, justification: impl Into<String>) -> Self {
        Verdict {
            value,
            justification: justification.into(),
        }
    }
}

/// One word of the finite-irreducibility witness set `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectingWord {
    pub from: usize,
    pub to: usize,
    pub word: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// One connecting word per ordered pair of edges.
    Words(Vec<ConnectingWord>),
    /// No finite witness; the string says why.
    Absent(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixProperties {
    pub irreducible: Verdict,
    pub primitive: Verdict,
    pub finitely_irreducible: Verdict,
    pub witness: Witness,
    /// gcd of cycle lengths, for strongly connected finite matrices.
    pub period: Option<usize>,
    /// Smallest `p` with `A^p > 0`, when primitive and small enough to search.
    pub primitivity_exponent: Option<usize>,
}

// Exponent search is O(n^5 / 64) in the worst case.
const EXPONENT_SEARCH_MAX_EDGES: usize = 128;

/// Irreducibility, primitivity and finite irreducibility.
///
/// Infinite alphabets get the closed-form verdicts of their named rule;
/// finite systems are analysed on their matrix.
pub fn matrix_properties(system: &GdmsSystem) -> Result<MatrixProperties> {
    match system.alphabet() {
        Alphabet::Infinite => Ok(rule_properties(system.incidence())),
        Alphabet::Finite => Ok(finite_properties(&system.edge_graph()?)),
    }
}

fn rule_properties(rule: &IncidenceSpec) -> MatrixProperties {
    match rule {
        IncidenceSpec::Full => MatrixProperties {
            irreducible: Verdict::new(true, "every entry of A is 1"),
            primitive: Verdict::new(true, "A^1 already has every entry positive"),
            finitely_irreducible: Verdict::new(true, "H = {any single edge} connects every pair"),
            witness: Witness::Absent("infinite alphabet: H = {1} works for every pair".into()),
            period: Some(1),
            primitivity_exponent: Some(1),
        },
        IncidenceSpec::Banded(w) => MatrixProperties {
            irreducible: Verdict::new(
                true,
                format!("labels i < j are joined by the monotone walk i, i+{w}, ..., j"),
            ),
            primitive: Verdict::new(
                false,
                "no uniform length p: reaching label j from label 1 needs at least (j-1)/w steps",
            ),
            finitely_irreducible: Verdict::new(
                false,
                "a connecting word between labels i and j has length at least |i-j|/w - 1, unbounded",
            ),
            witness: Witness::Absent("connecting words have unbounded length".into()),
            period: None,
            primitivity_exponent: None,
        },
        IncidenceSpec::UpperTriangular => MatrixProperties {
            irreducible: Verdict::new(false, "labels strictly increase along words, so j never reaches i < j"),
            primitive: Verdict::new(false, "not irreducible"),
            finitely_irreducible: Verdict::new(false, "not irreducible"),
            witness: Witness::Absent("no word returns to a smaller label".into()),
            period: None,
            primitivity_exponent: None,
        },
        IncidenceSpec::Explicit(_) => unreachable!("explicit incidence requires a finite alphabet"),
    }
}

fn finite_properties(graph: &EdgeGraph) -> MatrixProperties {
    let n = graph.len();
    if n == 0 {
        let no = |why: &str| Verdict::new(false, why);
        return MatrixProperties {
            irreducible: no("empty edge set"),
            primitive: no("empty edge set"),
            finitely_irreducible: no("empty edge set"),
            witness: Witness::Absent("empty edge set".into()),
            period: None,
            primitivity_exponent: None,
        };
    }
    let comps = graph.tarjan();
    let strongly_connected = comps.len() == 1 && (n > 1 || graph.allows(0, 0));
    if !strongly_connected {
        let why = format!("G_(E,A) splits into {} strongly connected pieces", comps.len());
        return MatrixProperties {
            irreducible: Verdict::new(false, why.clone()),
            primitive: Verdict::new(false, "not irreducible"),
            finitely_irreducible: Verdict::new(false, "not irreducible"),
            witness: Witness::Absent(why),
            period: None,
            primitivity_exponent: None,
        };
    }

    let period = graph.period();
    let exponent = (period == 1 && n <= EXPONENT_SEARCH_MAX_EDGES)
        .then(|| graph.primitivity_exponent())
        .flatten();
    let primitive = if period == 1 {
        let detail = exponent.map(|p| format!(", A^{p} > 0")).unwrap_or_default();
        Verdict::new(true, format!("strongly connected with cycle-length gcd 1{detail}"))
    } else {
        Verdict::new(false, format!("cycle lengths share the period {period}"))
    };

    let pred = graph.predecessors();
    let words: Vec<ConnectingWord> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(from, to)| ConnectingWord {
            from,
            to,
            word: graph
                .connecting_word(from, to, &pred)
                .expect("strongly connected graphs connect every pair"),
        })
        .collect();

    MatrixProperties {
        irreducible: Verdict::new(true, "G_(E,A) is strongly connected"),
        primitive,
        finitely_irreducible: Verdict::new(
            true,
            format!(
                "finite alphabet: H holds one connecting word for each of the {} ordered pairs",
                n * n
            ),
        ),
        witness: Witness::Words(words),
        period: Some(period),
        primitivity_exponent: exponent,
    }
}
