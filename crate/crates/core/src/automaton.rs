//! Labeled graphs coding free groups (strong Markov structures), their recurrent
//! parts, cycles and word evaluation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid label `{0}`")]
    Label(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("edges {0} and {1} do not compose")]
    NotComposable(usize, usize),
    #[error("edge id {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("graph has no start vertex")]
    NoStart,
    #[error("alias `{0}` must name a symbol that is not otherwise used as a basis generator")]
    Alias(String),
}

/// A generator symbol or its formal inverse, written `a` / `a'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub symbol: String,
    pub inverse: bool,
}

impl Letter {
    pub fn new(symbol: &str, inverse: bool) -> Self {
        Self {
            symbol: symbol.to_string(),
            inverse,
        }
    }

    pub fn inv(&self) -> Self {
        Self {
            symbol: self.symbol.clone(),
            inverse: !self.inverse,
        }
    }

    fn cancels(&self, other: &Self) -> bool {
        self.symbol == other.symbol && self.inverse != other.inverse
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.symbol, if self.inverse { "'" } else { "" })
    }
}

impl FromStr for Letter {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (sym, inverse) = match s.strip_suffix('\'') {
            Some(rest) => (rest, true),
            None => (s, false),
        };
        if sym.is_empty() || !sym.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(GraphError::Label(s.to_string()));
        }
        Ok(Self::new(sym, inverse))
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A word in generator symbols, kept freely reduced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Freely reduces `letters`.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|last| last.cancels(&l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    /// Parses single-character symbols with optional apostrophes, e.g. `ab'c`.
    pub fn parse(s: &str) -> Result<Self, GraphError> {
        let mut letters = Vec::new();
        for c in s.chars().filter(|c| !c.is_whitespace()) {
            if c == '\'' {
                let last: &mut Letter = letters.last_mut().ok_or_else(|| GraphError::Label(s.to_string()))?;
                if last.inverse {
                    return Err(GraphError::Label(s.to_string()));
                }
                last.inverse = true;
            } else if c.is_alphanumeric() {
                letters.push(Letter::new(&c.to_string(), false));
            } else {
                return Err(GraphError::Label(s.to_string()));
            }
        }
        Ok(Self::from_letters(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(Letter::inv).collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self::from_letters(self.letters.iter().chain(other.letters.iter()).cloned())
    }

    /// True when no cyclic rotation admits a cancellation.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) => self.letters.len() == 1 || !a.cancels(b),
            _ => true,
        }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: Letter,
}

/// Finite directed graph with generator labels on edges and an optional start vertex.
///
/// `aliases` expresses extra generator symbols as words in the remaining ones, e.g.
/// `c = b'a'` for the presentation `<a, b, c | abc>`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledGraph {
    vertices: Vec<String>,
    start: Option<usize>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    aliases: BTreeMap<String, GroupWord>,
}

impl LabeledGraph {
    pub fn new(vertices: Vec<String>, start: Option<usize>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(v) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let nv = vertices.len();
        if let Some(s) = start {
            if s >= nv {
                return Err(GraphError::UnknownVertex(s.to_string()));
            }
        }
        let mut out = vec![Vec::new(); nv];
        for (id, e) in edges.iter().enumerate() {
            for v in [e.source, e.target] {
                if v >= nv {
                    return Err(GraphError::UnknownVertex(v.to_string()));
                }
            }
            out[e.source].push(id);
        }
        Ok(Self {
            vertices,
            start,
            edges,
            out,
            aliases: BTreeMap::new(),
        })
    }

    pub fn with_aliases(mut self, aliases: BTreeMap<String, GroupWord>) -> Result<Self, GraphError> {
        for (name, word) in &aliases {
            if word.letters().iter().any(|l| aliases.contains_key(&l.symbol)) {
                return Err(GraphError::Alias(name.clone()));
            }
        }
        self.aliases = aliases;
        Ok(self)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn start(&self) -> Option<usize> {
        self.start
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn aliases(&self) -> &BTreeMap<String, GroupWord> {
        &self.aliases
    }

    /// Generator symbols that appear on edges, sorted.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.edges.iter().map(|e| e.label.symbol.clone()).collect()
    }

    /// Edges whose endpoints lie in a common strongly connected component that
    /// contains at least one edge.
    pub fn recurrent_edges(&self) -> Vec<usize> {
        let comp = self.scc();
        (0..self.edges.len())
            .filter(|&id| comp[self.edges[id].source] == comp[self.edges[id].target])
            .collect()
    }

    /// Recurrent vertices in vertex order.
    pub fn recurrent_vertices(&self) -> Vec<usize> {
        let mut keep = vec![false; self.vertices.len()];
        for id in self.recurrent_edges() {
            keep[self.edges[id].source] = true;
        }
        (0..self.vertices.len()).filter(|&v| keep[v]).collect()
    }

    /// Strongly connected component index of each vertex (Kosaraju).
    fn scc(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut order = Vec::with_capacity(n);
        let mut visited = vec![false; n];
        for s in 0..n {
            if visited[s] {
                continue;
            }
            visited[s] = true;
            let mut stack = vec![(s, 0usize)];
            while let Some((v, i)) = stack.pop() {
                if i < self.out[v].len() {
                    stack.push((v, i + 1));
                    let w = self.edges[self.out[v][i]].target;
                    if !visited[w] {
                        visited[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                }
            }
        }
        let mut rev = vec![Vec::new(); n];
        for e in &self.edges {
            rev[e.target].push(e.source);
        }
        let mut comp = vec![usize::MAX; n];
        let mut c = 0;
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = c;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &rev[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = c;
                        stack.push(w);
                    }
                }
            }
            c += 1;
        }
        comp
    }

    /// True if the recurrent edges form a single strongly connected component.
    pub fn recurrent_is_irreducible(&self) -> bool {
        let rec = self.recurrent_edges();
        if rec.is_empty() {
            return false;
        }
        let comp = self.scc();
        let c0 = comp[self.edges[rec[0]].source];
        rec.iter().all(|&id| comp[self.edges[id].source] == c0)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.vertices.clone(),
            start: self.start.map(|s| self.vertices[s].clone()),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    from: self.vertices[e.source].clone(),
                    to: self.vertices[e.target].clone(),
                    label: e.label.to_string(),
                })
                .collect(),
            aliases: self.aliases.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
        }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self, GraphError> {
        let index: HashMap<&str, usize> = j.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
        };
        let start = j.start.as_deref().map(lookup).transpose()?;
        let edges = j
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    source: lookup(&e.from)?,
                    target: lookup(&e.to)?,
                    label: e.label.parse()?,
                })
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        let aliases = j
            .aliases
            .iter()
            .map(|(k, v)| Ok((k.clone(), GroupWord::parse(v)?)))
            .collect::<Result<BTreeMap<_, _>, GraphError>>()?;
        Self::new(j.vertices.clone(), start, edges)?.with_aliases(aliases)
    }
}

/// Vertex id in graph JSON: a string or an integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum VertexId {
    Name(String),
    Num(i64),
}

impl From<VertexId> for String {
    fn from(v: VertexId) -> Self {
        match v {
            VertexId::Name(s) => s,
            VertexId::Num(n) => n.to_string(),
        }
    }
}

fn de_id<'de, D: serde::Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    Ok(VertexId::deserialize(d)?.into())
}

fn de_opt_id<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    Ok(Option::<VertexId>::deserialize(d)?.map(Into::into))
}

fn de_ids<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    Ok(Vec::<VertexId>::deserialize(d)?.into_iter().map(Into::into).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    #[serde(deserialize_with = "de_id")]
    pub from: String,
    #[serde(deserialize_with = "de_id")]
    pub to: String,
    pub label: String,
}

/// `{"vertices": [...], "start": id, "edges": [{"from", "to", "label"}], "aliases": {"c": "b'a'"}}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(deserialize_with = "de_ids")]
    pub vertices: Vec<String>,
    #[serde(default, deserialize_with = "de_opt_id")]
    pub start: Option<String>,
    pub edges: Vec<EdgeJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aliases: BTreeMap<String, String>,
}

/// Standard coding of `F_2 = <a, b>`: a start vertex and one vertex per generator,
/// entered by that generator and leaving by every label except its inverse.
pub fn builtin_f2_standard() -> LabeledGraph {
    let gens = ["a", "b", "a'", "b'"];
    let letters: Vec<Letter> = gens.iter().map(|g| g.parse().expect("builtin label")).collect();
    let mut vertices = vec!["start".to_string()];
    vertices.extend(gens.iter().map(|g| g.to_string()));
    let mut edges = Vec::new();
    for (j, l) in letters.iter().enumerate() {
        edges.push(Edge {
            source: 0,
            target: j + 1,
            label: l.clone(),
        });
    }
    for (i, g) in letters.iter().enumerate() {
        for (j, h) in letters.iter().enumerate() {
            if *h != g.inv() {
                edges.push(Edge {
                    source: i + 1,
                    target: j + 1,
                    label: h.clone(),
                });
            }
        }
    }
    LabeledGraph::new(vertices, Some(0), edges).expect("builtin graph")
}

/// The transition matrix of the `<a, b, c | abc>` coding, columns `(a, b, c, a', b', c')`.
pub const ABC_MATRIX: [[u8; 6]; 6] = [
    [1, 0, 1, 0, 1, 1],
    [1, 1, 0, 1, 0, 1],
    [0, 1, 1, 1, 1, 0],
    [0, 1, 1, 1, 1, 0],
    [1, 0, 1, 0, 1, 1],
    [1, 1, 0, 1, 0, 1],
];

/// Order of the vertices of [`builtin_f2_abc`] after the start vertex.
pub const ABC_ORDER: [&str; 6] = ["a", "b", "c", "a'", "b'", "c'"];

/// Coding of `F_2 = <a, b, c | abc>` whose recurrent adjacency matrix is [`ABC_MATRIX`].
///
/// Vertex `x` is entered by edges labeled `x^{-1}`; the edge `x -> y` exists iff
/// `A(x, y) = 1`.
pub fn builtin_f2_abc() -> LabeledGraph {
    let letters: Vec<Letter> = ABC_ORDER.iter().map(|g| g.parse().expect("builtin label")).collect();
    let mut vertices = vec!["start".to_string()];
    vertices.extend(ABC_ORDER.iter().map(|g| g.to_string()));
    let mut edges = Vec::new();
    for (j, y) in letters.iter().enumerate() {
        edges.push(Edge {
            source: 0,
            target: j + 1,
            label: y.inv(),
        });
    }
    for (i, row) in ABC_MATRIX.iter().enumerate() {
        for (j, y) in letters.iter().enumerate() {
            if row[j] == 1 {
                edges.push(Edge {
                    source: i + 1,
                    target: j + 1,
                    label: y.inv(),
                });
            }
        }
    }
    let aliases = BTreeMap::from([("c".to_string(), GroupWord::parse("b'a'").expect("alias"))]);
    LabeledGraph::new(vertices, Some(0), edges)
        .and_then(|g| g.with_aliases(aliases))
        .expect("builtin graph")
}

/// Subgraph of edges lying on directed cycles. Vertex names are kept; the start
/// vertex survives only if it is recurrent.
pub fn recurrent_subgraph(g: &LabeledGraph) -> LabeledGraph {
    let verts = g.recurrent_vertices();
    let mut map = vec![usize::MAX; g.vertices().len()];
    for (i, &v) in verts.iter().enumerate() {
        map[v] = i;
    }
    let edges = g
        .recurrent_edges()
        .into_iter()
        .map(|id| {
            let e = g.edge(id);
            Edge {
                source: map[e.source],
                target: map[e.target],
                label: e.label.clone(),
            }
        })
        .collect();
    let start = g.start().and_then(|s| (map[s] != usize::MAX).then_some(map[s]));
    LabeledGraph::new(verts.iter().map(|&v| g.vertices()[v].clone()).collect(), start, edges)
        .and_then(|h| h.with_aliases(g.aliases().clone()))
        .expect("subgraph of a valid graph")
}

fn check_path(g: &LabeledGraph, path: &[usize]) -> Result<(), GraphError> {
    for &id in path {
        if id >= g.edges().len() {
            return Err(GraphError::EdgeOutOfRange(id));
        }
    }
    for w in path.windows(2) {
        if g.edge(w[0]).target != g.edge(w[1]).source {
            return Err(GraphError::NotComposable(w[0], w[1]));
        }
    }
    Ok(())
}

/// `ev(e_1, ..., e_n) = pi(e_n) ... pi(e_1)`, freely reduced.
pub fn evaluate_path(g: &LabeledGraph, path: &[usize]) -> Result<GroupWord, GraphError> {
    check_path(g, path)?;
    Ok(GroupWord::from_letters(
        path.iter().rev().map(|&id| g.edge(id).label.clone()),
    ))
}

/// Closed edge path in the recurrent part, stored in its canonical rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cycle {
    pub edges: Vec<usize>,
    pub primitive: bool,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

fn minimal_period(s: &[usize]) -> usize {
    let n = s.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| s[i] == s[i - p]))
        .unwrap_or(n)
}

fn is_canonical_rotation(s: &[usize]) -> bool {
    let n = s.len();
    (1..n).all(|r| {
        for i in 0..n {
            let a = s[(i + r) % n];
            let b = s[i];
            if a != b {
                return a > b;
            }
        }
        true
    })
}

/// All closed paths of length exactly `n` in the recurrent part, one per rotation class.
pub fn enumerate_cycles(g: &LabeledGraph, n: usize) -> Vec<Cycle> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let rec: HashSet<usize> = g.recurrent_edges().into_iter().collect();
    let rec_out: Vec<Vec<usize>> = (0..g.vertices().len())
        .map(|v| g.out_edges(v).iter().copied().filter(|e| rec.contains(e)).collect())
        .collect();
    let mut path = Vec::with_capacity(n);
    for first in 0..g.edges().len() {
        if !rec.contains(&first) {
            continue;
        }
        path.clear();
        path.push(first);
        extend_cycles(g, &rec_out, first, n, &mut path, &mut out);
    }
    out
}

fn extend_cycles(
    g: &LabeledGraph,
    rec_out: &[Vec<usize>],
    first: usize,
    n: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Cycle>,
) {
    let last = *path.last().expect("nonempty path");
    if path.len() == n {
        if g.edge(last).target == g.edge(first).source && is_canonical_rotation(path) {
            out.push(Cycle {
                edges: path.clone(),
                primitive: minimal_period(path) == n,
            });
        }
        return;
    }
    for &e in &rec_out[g.edge(last).target] {
        // canonical rotations start with their smallest edge id
        if e < first {
            continue;
        }
        path.push(e);
        extend_cycles(g, rec_out, first, n, path, out);
        path.pop();
    }
}

/// Vertex adjacency of the recurrent part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Adjacency {
    pub vertices: Vec<String>,
    pub matrix: Vec<Vec<u32>>,
}

pub fn vertex_adjacency(g: &LabeledGraph) -> Adjacency {
    let verts = g.recurrent_vertices();
    let mut pos = vec![usize::MAX; g.vertices().len()];
    for (i, &v) in verts.iter().enumerate() {
        pos[v] = i;
    }
    let mut matrix = vec![vec![0u32; verts.len()]; verts.len()];
    for id in g.recurrent_edges() {
        let e = g.edge(id);
        matrix[pos[e.source]][pos[e.target]] += 1;
    }
    Adjacency {
        vertices: verts.iter().map(|&v| g.vertices()[v].clone()).collect(),
        matrix,
    }
}

/// Outcome of [`validate_strong_markov`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub depth: usize,
    pub deterministic: bool,
    pub reachable: bool,
    pub paths_checked: usize,
    pub passed: bool,
    pub violation: Option<String>,
}

type Reduced = Vec<(u32, bool)>;

struct FreeBasis {
    expansion: HashMap<Letter, Reduced>,
}

impl FreeBasis {
    fn new(g: &LabeledGraph) -> Self {
        let mut index = BTreeMap::new();
        let mut basis_symbols: BTreeSet<String> = g.symbols();
        for (name, word) in g.aliases() {
            basis_symbols.remove(name);
            basis_symbols.extend(word.letters().iter().map(|l| l.symbol.clone()));
        }
        for (i, s) in basis_symbols.into_iter().enumerate() {
            index.insert(s, i as u32);
        }
        let mut expansion = HashMap::new();
        for sym in g.symbols() {
            let fwd: Reduced = match g.aliases().get(&sym) {
                Some(w) => w.letters().iter().map(|l| (index[&l.symbol], l.inverse)).collect(),
                None => vec![(index[&sym], false)],
            };
            let inv: Reduced = fwd.iter().rev().map(|&(s, i)| (s, !i)).collect();
            expansion.insert(Letter::new(&sym, false), fwd);
            expansion.insert(Letter::new(&sym, true), inv);
        }
        Self { expansion }
    }

    /// `prefix * rest`, reduced.
    fn left_mul(&self, l: &Letter, rest: &Reduced) -> Reduced {
        let mut out = self.expansion[l].clone();
        for &x in rest {
            if out.last().is_some_and(|&(s, i)| s == x.0 && i != x.1) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        out
    }
}

/// Bounded check of the strong Markov properties: deterministic labels, every vertex
/// reachable from the start, and, for every path of length `n <= depth` from the start,
/// that its evaluation has word length `n` in the labels, that evaluations are pairwise
/// distinct, and that every group element of word length `n` is reached.
///
/// Group elements are compared as reduced words in a free basis: the label symbols,
/// with each alias replaced by its defining word.
pub fn validate_strong_markov(g: &LabeledGraph, depth: usize) -> ValidationReport {
    let mut report = ValidationReport {
        depth,
        deterministic: true,
        reachable: true,
        paths_checked: 0,
        passed: false,
        violation: None,
    };
    for v in 0..g.vertices().len() {
        let mut seen = HashSet::new();
        for &id in g.out_edges(v) {
            if !seen.insert(&g.edge(id).label) {
                report.deterministic = false;
                report.violation = Some(format!(
                    "vertex `{}` has two outgoing edges labeled `{}`",
                    g.vertices()[v],
                    g.edge(id).label
                ));
                return report;
            }
        }
    }
    let Some(start) = g.start() else {
        report.violation = Some("no start vertex".into());
        return report;
    };
    let mut reached = vec![false; g.vertices().len()];
    reached[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &id in g.out_edges(v) {
            let w = g.edge(id).target;
            if !reached[w] {
                reached[w] = true;
                queue.push_back(w);
            }
        }
    }
    if let Some(v) = reached.iter().position(|r| !r) {
        report.reachable = false;
        report.violation = Some(format!("vertex `{}` is unreachable from start", g.vertices()[v]));
        return report;
    }

    let basis = FreeBasis::new(g);
    let gens: Vec<Letter> = g
        .symbols()
        .into_iter()
        .flat_map(|s| [Letter::new(&s, false), Letter::new(&s, true)])
        .collect();
    // word length of every element in the ball of radius `depth`
    let mut length: HashMap<Reduced, usize> = HashMap::from([(Vec::new(), 0)]);
    let mut sphere: Vec<Reduced> = vec![Vec::new()];
    let mut sphere_sizes = vec![1usize];
    for r in 1..=depth {
        let mut next = Vec::new();
        for x in &sphere {
            for l in &gens {
                let y = basis.left_mul(l, x);
                if let std::collections::hash_map::Entry::Vacant(slot) = length.entry(y.clone()) {
                    slot.insert(r);
                    next.push(y);
                }
            }
        }
        sphere_sizes.push(next.len());
        sphere = next;
    }

    let mut hit: HashSet<Reduced> = HashSet::new();
    let mut frontier: Vec<(usize, Reduced, Vec<usize>)> = vec![(start, Vec::new(), Vec::new())];
    for n in 1..=depth {
        let mut next = Vec::new();
        let mut count = 0usize;
        for (v, word, path) in &frontier {
            for &id in g.out_edges(*v) {
                let e = g.edge(id);
                let w = basis.left_mul(&e.label, word);
                let mut p = path.clone();
                p.push(id);
                report.paths_checked += 1;
                count += 1;
                let len = length.get(&w).copied();
                if len != Some(n) {
                    report.violation = Some(format!(
                        "path {:?} evaluates to an element of word length {} instead of {n}",
                        p,
                        len.map_or("> depth".to_string(), |l| l.to_string())
                    ));
                    return report;
                }
                if !hit.insert(w.clone()) {
                    report.violation = Some(format!("path {p:?} repeats an element reached by another path"));
                    return report;
                }
                next.push((e.target, w, p));
            }
        }
        if count != sphere_sizes[n] {
            report.violation = Some(format!(
                "{count} paths of length {n} but {} elements of word length {n}",
                sphere_sizes[n]
            ));
            return report;
        }
        frontier = next;
    }
    report.passed = true;
    report
}
