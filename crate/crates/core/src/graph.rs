//! Feynman graphs in the half-edge model.
//!
//! Vertices are numbered globally: legs occupy `0..m` (each with a single
//! slot), internal vertices follow. An edge joins two `(vertex, slot)`
//! half-edges, so multi-edges and self-loops need no special casing.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gauss::SymmetricForm;
use crate::linalg::Matrix;
use crate::rational::Rational;

/// Largest number of half-edges whose pairings we are willing to walk.
pub const MAX_HALF_EDGES: usize = 18;
/// Largest number of internal vertices for brute-force canonical forms.
pub const MAX_INTERNAL_VERTICES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub vertex: usize,
    pub slot: usize,
}

impl HalfEdge {
    pub fn new(vertex: usize, slot: usize) -> Self {
        HalfEdge { vertex, slot }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanGraph {
    legs: usize,
    leg_owners: Vec<usize>,
    valences: Vec<usize>,
    edges: Vec<(HalfEdge, HalfEdge)>,
}

impl FeynmanGraph {
    pub fn new(legs: usize, valences: Vec<usize>, edges: Vec<(HalfEdge, HalfEdge)>) -> Result<Self> {
        let g = FeynmanGraph { legs, leg_owners: vec![0; legs], valences, edges };
        g.validate()?;
        Ok(g)
    }

    /// Builds a graph from a symmetric multiplicity matrix over all vertices
    /// (diagonal entries count self-loops), assigning slots in order.
    pub fn from_multiplicities(legs: usize, valences: Vec<usize>, mult: &[Vec<u32>]) -> Result<Self> {
        let n = legs + valences.len();
        if mult.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: mult.len() });
        }
        let mut next_slot = vec![0usize; n];
        let mut take = |v: usize| {
            let s = next_slot[v];
            next_slot[v] += 1;
            HalfEdge::new(v, s)
        };
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u..n {
                for _ in 0..mult[u][v] {
                    let a = take(u);
                    let b = take(v);
                    edges.push((a, b));
                }
            }
        }
        FeynmanGraph::new(legs, valences, edges)
    }

    fn validate(&self) -> Result<()> {
        if let Some(v) = self.valences.iter().position(|&k| k < 3) {
            return Err(Error::InvalidGraph(format!("internal vertex {} has valence < 3", v + self.legs)));
        }
        let n = self.vertex_count();
        let mut used: Vec<Vec<bool>> = (0..n).map(|v| vec![false; self.valence_of(v)]).collect();
        for &(a, b) in &self.edges {
            for h in [a, b] {
                let slot = used
                    .get_mut(h.vertex)
                    .and_then(|s| s.get_mut(h.slot))
                    .ok_or_else(|| Error::InvalidGraph(format!("no half-edge ({}, {})", h.vertex, h.slot)))?;
                if *slot {
                    return Err(Error::InvalidGraph(format!("half-edge ({}, {}) used twice", h.vertex, h.slot)));
                }
                *slot = true;
            }
        }
        if used.iter().flatten().any(|u| !u) {
            return Err(Error::InvalidGraph("unused half-edge slot".into()));
        }
        if self.leg_owners.len() != self.legs {
            return Err(Error::InvalidGraph("leg owner list has wrong length".into()));
        }
        Ok(())
    }

    pub fn with_leg_owners(mut self, owners: Vec<usize>) -> Result<Self> {
        self.leg_owners = owners;
        self.validate()?;
        Ok(self)
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn leg_owners(&self) -> &[usize] {
        &self.leg_owners
    }

    pub fn valences(&self) -> &[usize] {
        &self.valences
    }

    pub fn edges(&self) -> &[(HalfEdge, HalfEdge)] {
        &self.edges
    }

    /// Number of internal vertices.
    pub fn degree(&self) -> usize {
        self.valences.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.legs + self.valences.len()
    }

    pub fn valence_of(&self, v: usize) -> usize {
        if v < self.legs {
            1
        } else {
            self.valences[v - self.legs]
        }
    }

    /// Symmetric edge-multiplicity matrix; the diagonal counts self-loops.
    pub fn multiplicities(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count();
        let mut m = vec![vec![0u32; n]; n];
        for &(a, b) in &self.edges {
            m[a.vertex][b.vertex] += 1;
            if a.vertex != b.vertex {
                m[b.vertex][a.vertex] += 1;
            }
        }
        m
    }

    /// Legs of `self` come first, then those of `other`.
    pub fn disjoint_union(&self, other: &FeynmanGraph) -> FeynmanGraph {
        let shift = |v: usize, g: &FeynmanGraph, leg_base: usize, int_base: usize| {
            if v < g.legs {
                leg_base + v
            } else {
                int_base + v - g.legs
            }
        };
        let legs = self.legs + other.legs;
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        for &(a, b) in &self.edges {
            let f = |h: HalfEdge| HalfEdge::new(shift(h.vertex, self, 0, legs), h.slot);
            edges.push((f(a), f(b)));
        }
        let int_base = legs + self.valences.len();
        for &(a, b) in &other.edges {
            let f = |h: HalfEdge| HalfEdge::new(shift(h.vertex, other, self.legs, int_base), h.slot);
            edges.push((f(a), f(b)));
        }
        let mut valences = self.valences.clone();
        valences.extend_from_slice(&other.valences);
        let mut leg_owners = self.leg_owners.clone();
        leg_owners.extend_from_slice(&other.leg_owners);
        FeynmanGraph { legs, leg_owners, valences, edges }
    }

    /// A short stable identifier of the isomorphism class.
    pub fn canonical_code(&self) -> Result<String> {
        let c = canonical_form(self.legs, &self.valences, &self.multiplicities())?;
        Ok(c.code())
    }

    /// `{"legs": m, "vertices": [valences], "edges": [[[v,slot],[v,slot]],...]}`,
    /// with vertex numbers global (legs first).
    pub fn from_json(v: &Value) -> Result<Self> {
        let legs = v["legs"].as_u64().ok_or_else(|| Error::Parse("graph: missing \"legs\"".into()))? as usize;
        let valences = v["vertices"]
            .as_array()
            .ok_or_else(|| Error::Parse("graph: missing \"vertices\"".into()))?
            .iter()
            .map(|x| x.as_u64().map(|k| k as usize).ok_or_else(|| Error::Parse("graph: bad valence".into())))
            .collect::<Result<Vec<_>>>()?;
        let half = |x: &Value| -> Result<HalfEdge> {
            match x.as_array().map(|a| a.as_slice()) {
                Some([v, s]) => match (v.as_u64(), s.as_u64()) {
                    (Some(v), Some(s)) => Ok(HalfEdge::new(v as usize, s as usize)),
                    _ => Err(Error::Parse("graph: bad half-edge".into())),
                },
                _ => Err(Error::Parse("graph: half-edge must be [vertex, slot]".into())),
            }
        };
        let edges = v["edges"]
            .as_array()
            .ok_or_else(|| Error::Parse("graph: missing \"edges\"".into()))?
            .iter()
            .map(|e| match e.as_array().map(|a| a.as_slice()) {
                Some([a, b]) => Ok((half(a)?, half(b)?)),
                _ => Err(Error::Parse("graph: edge must be a pair of half-edges".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        let g = FeynmanGraph::new(legs, valences, edges)?;
        match v.get("leg_owners").and_then(Value::as_array) {
            Some(o) => {
                let owners = o.iter().map(|x| x.as_u64().unwrap_or(0) as usize).collect();
                g.with_leg_owners(owners)
            }
            None => Ok(g),
        }
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|(a, b)| json!([[a.vertex, a.slot], [b.vertex, b.slot]]))
            .collect();
        json!({
            "legs": self.legs,
            "leg_owners": self.leg_owners,
            "vertices": self.valences,
            "edges": edges,
        })
    }
}

/// Connected components as sorted lists of global vertex numbers.
pub fn connected_components(g: &FeynmanGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(a, b) in g.edges() {
        let (ra, rb) = (find(&mut parent, a.vertex), find(&mut parent, b.vertex));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

/// True iff some connected component contains no leg.
pub fn is_vacuum(g: &FeynmanGraph) -> bool {
    connected_components(g).iter().any(|c| c.iter().all(|&v| v >= g.legs()))
}

pub fn is_connected(g: &FeynmanGraph) -> bool {
    connected_components(g).len() <= 1
}

/// Canonical representative of an isomorphism class with legs held fixed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct CanonicalForm {
    legs: usize,
    valences: Vec<usize>,
    upper: Vec<u32>,
}

impl CanonicalForm {
    fn matrix(&self) -> Vec<Vec<u32>> {
        let n = self.legs + self.valences.len();
        let mut m = vec![vec![0u32; n]; n];
        let mut it = self.upper.iter();
        for u in 0..n {
            for v in u..n {
                let x = *it.next().expect("upper triangle length");
                m[u][v] = x;
                m[v][u] = x;
            }
        }
        m
    }

    fn code(&self) -> String {
        let mut s = format!("L{}V", self.legs);
        for k in &self.valences {
            let _ = write!(s, "{k}");
        }
        s.push('E');
        let m = self.matrix();
        let n = m.len();
        for u in 0..n {
            for v in u..n {
                if m[u][v] > 0 {
                    let _ = write!(s, "{u}-{v}");
                    if m[u][v] > 1 {
                        let _ = write!(s, "x{}", m[u][v]);
                    }
                    s.push('.');
                }
            }
        }
        s.pop();
        s
    }
}

/// Orders in which internal vertices may be listed: permutations within
/// blocks of vertices sharing a cheap invariant.
fn invariant_blocks(legs: usize, valences: &[usize], mult: &[Vec<u32>]) -> Vec<Vec<usize>> {
    let n = legs + valences.len();
    let mut keyed: Vec<(Vec<u32>, usize)> = (legs..n)
        .map(|v| {
            let mut key = vec![valences[v - legs] as u32, mult[v][v]];
            key.extend((0..legs).map(|l| mult[v][l]));
            let mut internal: Vec<u32> = (legs..n).filter(|&u| u != v).map(|u| mult[v][u]).collect();
            internal.sort_unstable();
            key.extend(internal);
            (key, v)
        })
        .collect();
    keyed.sort();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut last: Option<&Vec<u32>> = None;
    for (key, v) in &keyed {
        if last == Some(key) {
            blocks.last_mut().expect("block exists").push(*v);
        } else {
            blocks.push(vec![*v]);
        }
        last = Some(key);
    }
    blocks
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(cur, rest, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut items.to_vec(), &mut out);
    out
}

/// Calls `f` with each ordering of all vertices (legs fixed first) obtained by
/// permuting within invariant blocks.
fn for_each_ordering<F: FnMut(&[usize])>(legs: usize, blocks: &[Vec<usize>], mut f: F) {
    let per_block: Vec<Vec<Vec<usize>>> = blocks.iter().map(|b| permutations(b)).collect();
    let mut choice = vec![0usize; blocks.len()];
    let mut order: Vec<usize> = Vec::with_capacity(legs + blocks.iter().map(Vec::len).sum::<usize>());
    loop {
        order.clear();
        order.extend(0..legs);
        for (b, &c) in per_block.iter().zip(&choice) {
            order.extend_from_slice(&b[c]);
        }
        f(&order);
        let mut i = 0;
        loop {
            if i == choice.len() {
                return;
            }
            choice[i] += 1;
            if choice[i] < per_block[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn relabelled_upper(order: &[usize], mult: &[Vec<u32>]) -> Vec<u32> {
    let n = order.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(mult[order[i]][order[j]]);
        }
    }
    out
}

fn canonical_form(legs: usize, valences: &[usize], mult: &[Vec<u32>]) -> Result<CanonicalForm> {
    if valences.len() > MAX_INTERNAL_VERTICES {
        return Err(Error::SizeGuard(format!("{} internal vertices > {MAX_INTERNAL_VERTICES}", valences.len())));
    }
    let blocks = invariant_blocks(legs, valences, mult);
    let mut best: Option<Vec<u32>> = None;
    let mut best_val = Vec::new();
    for_each_ordering(legs, &blocks, |order| {
        let up = relabelled_upper(order, mult);
        if best.as_ref().is_none_or(|b| up < *b) {
            best = Some(up);
            best_val = order[legs..].iter().map(|&v| valences[v - legs]).collect();
        }
    });
    Ok(CanonicalForm { legs, valences: best_val, upper: best.expect("at least one ordering") })
}

/// Number of internal-vertex permutations preserving valences and multiplicities.
fn vertex_automorphisms(legs: usize, valences: &[usize], mult: &[Vec<u32>]) -> u64 {
    let blocks = invariant_blocks(legs, valences, mult);
    let base: Vec<usize> = (0..legs).chain(blocks.iter().flatten().copied()).collect();
    let reference = relabelled_upper(&base, mult);
    let mut count = 0;
    for_each_ordering(legs, &blocks, |order| {
        if relabelled_upper(order, mult) == reference {
            count += 1;
        }
    });
    count
}

/// Order of the automorphism group acting on half-edges, legs fixed pointwise.
///
/// Equals the vertex automorphisms times `m!` for every bundle of `m`
/// parallel edges times `l! 2^l` at a vertex carrying `l` self-loops.
pub fn automorphism_count(g: &FeynmanGraph) -> Result<u64> {
    if g.degree() > MAX_INTERNAL_VERTICES {
        return Err(Error::SizeGuard(format!("{} internal vertices > {MAX_INTERNAL_VERTICES}", g.degree())));
    }
    let mult = g.multiplicities();
    let mut aut = vertex_automorphisms(g.legs(), g.valences(), &mult);
    let n = g.vertex_count();
    let fact = |k: u32| (1..=k as u64).product::<u64>();
    for u in 0..n {
        let l = mult[u][u];
        aut *= fact(l) << l;
        for v in u + 1..n {
            aut *= fact(mult[u][v]);
        }
    }
    Ok(aut)
}

/// An isomorphism class produced by Wick contraction, with its pairing count.
#[derive(Clone, Debug)]
pub struct GraphClass {
    pub graph: FeynmanGraph,
    pub multiplicity: u64,
    pub automorphisms: u64,
    pub code: String,
}

/// `prod_k n_k! (k!)^{n_k}` for the internal valence list.
pub fn vertex_symmetry_factor(valences: &[usize]) -> u64 {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &k in valences {
        *counts.entry(k).or_default() += 1;
    }
    let fact = |k: u64| (1..=k).product::<u64>();
    counts.iter().map(|(&k, &n)| fact(n) * fact(k as u64).pow(n as u32)).product()
}

/// Walks every Wick pairing of the half-edges of `m` legs and internal
/// vertices with the given valences, grouping the results by isomorphism class.
pub fn contract_vertices(valences: &[usize], legs: usize) -> Result<Vec<GraphClass>> {
    let total = legs + valences.iter().sum::<usize>();
    if total % 2 == 1 {
        return Ok(Vec::new());
    }
    if total > MAX_HALF_EDGES {
        return Err(Error::SizeGuard(format!("{total} half-edges > {MAX_HALF_EDGES}")));
    }
    let mut owner = Vec::with_capacity(total);
    owner.extend(0..legs);
    for (i, &k) in valences.iter().enumerate() {
        owner.extend(std::iter::repeat_n(legs + i, k));
    }
    let n = legs + valences.len();
    let mut adj = vec![0u8; n * n];
    let mut raw: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut used = vec![false; total];
    walk_pairings(&owner, n, &mut used, &mut adj, &mut raw);

    let mut classes: BTreeMap<CanonicalForm, u64> = BTreeMap::new();
    for (key, count) in raw {
        let mult: Vec<Vec<u32>> = (0..n).map(|u| (0..n).map(|v| key[u * n + v] as u32).collect()).collect();
        let c = canonical_form(legs, valences, &mult)?;
        *classes.entry(c).or_default() += count;
    }
    classes
        .into_iter()
        .map(|(c, multiplicity)| {
            let graph = FeynmanGraph::from_multiplicities(legs, c.valences.clone(), &c.matrix())?;
            let automorphisms = automorphism_count(&graph)?;
            Ok(GraphClass { graph, multiplicity, automorphisms, code: c.code() })
        })
        .collect()
}

fn walk_pairings(owner: &[usize], n: usize, used: &mut [bool], adj: &mut [u8], out: &mut HashMap<Vec<u8>, u64>) {
    let Some(first) = used.iter().position(|u| !u) else {
        match out.get_mut(&adj[..]) {
            Some(c) => *c += 1,
            None => {
                out.insert(adj.to_vec(), 1);
            }
        }
        return;
    };
    used[first] = true;
    let u = owner[first];
    for second in first + 1..used.len() {
        if used[second] {
            continue;
        }
        used[second] = true;
        let v = owner[second];
        adj[u * n + v] += 1;
        if u != v {
            adj[v * n + u] += 1;
        }
        walk_pairings(owner, n, used, adj, out);
        adj[u * n + v] -= 1;
        if u != v {
            adj[v * n + u] -= 1;
        }
        used[second] = false;
    }
    used[first] = false;
}

/// All graphs of order `n` with `m` legs whose internal valences are drawn
/// from `potential_valences`, one call to [`contract_vertices`] per valence
/// multiset.
pub fn enumerate_contraction_graphs(potential_valences: &[usize], n: usize, m: usize) -> Result<Vec<GraphClass>> {
    let mut ks: Vec<usize> = potential_valences.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut out = Vec::new();
    for valences in valence_multisets(&ks, n) {
        out.extend(contract_vertices(&valences, m)?);
    }
    Ok(out)
}

/// Non-decreasing valence lists of length `n` drawn from sorted `ks`.
pub fn valence_multisets(ks: &[usize], n: usize) -> Vec<Vec<usize>> {
    fn rec(ks: &[usize], n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for (i, &k) in ks.iter().enumerate() {
            cur.push(k);
            rec(&ks[i..], n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 || !ks.is_empty() {
        rec(ks, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Memoises [`enumerate_contraction_graphs`] by `(valences, order, legs)`.
#[derive(Default)]
pub struct GraphCatalog {
    cache: HashMap<(Vec<usize>, usize, usize), Vec<GraphClass>>,
}

impl GraphCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, potential_valences: &[usize], n: usize, m: usize) -> Result<&[GraphClass]> {
        let key = (potential_valences.to_vec(), n, m);
        if !self.cache.contains_key(&key) {
            let v = enumerate_contraction_graphs(potential_valences, n, m)?;
            self.cache.insert(key.clone(), v);
        }
        Ok(&self.cache[&key])
    }
}

/// A dense symmetric tensor in `(V*)^{⊗k}`, stored with row-major indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    dim: usize,
    rank: usize,
    data: Vec<Rational>,
}

impl SymTensor {
    /// Symmetrises `data` (length `dim^rank`) by averaging over index permutations.
    pub fn symmetrized(dim: usize, rank: usize, data: Vec<Rational>) -> Result<Self> {
        let len = dim.pow(rank as u32);
        if data.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: data.len() });
        }
        let perms = permutations(&(0..rank).collect::<Vec<_>>());
        let denom = Rational::from_integer((perms.len() as i64).into());
        let mut out = vec![Rational::zero(); len];
        let mut idx = vec![0usize; rank];
        let mut permuted = vec![0usize; rank];
        for (flat, slot) in out.iter_mut().enumerate() {
            unflatten(flat, dim, &mut idx);
            let mut acc = Rational::zero();
            for p in &perms {
                for (t, &s) in permuted.iter_mut().zip(p) {
                    *t = idx[s];
                }
                acc += &data[flatten(&permuted, dim)];
            }
            *slot = acc / &denom;
        }
        Ok(SymTensor { dim, rank, data: out })
    }

    /// Builds the tensor from its values on sorted index tuples.
    pub fn from_fn<F: Fn(&[usize]) -> Rational>(dim: usize, rank: usize, f: F) -> Self {
        let len = dim.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let data = (0..len)
            .map(|flat| {
                unflatten(flat, dim, &mut idx);
                let mut sorted = idx.clone();
                sorted.sort_unstable();
                f(&sorted)
            })
            .collect();
        SymTensor { dim, rank, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, idx: &[usize]) -> &Rational {
        &self.data[flatten(idx, self.dim)]
    }

    pub fn data(&self) -> &[Rational] {
        &self.data
    }
}

pub(crate) fn flatten(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

pub(crate) fn unflatten(mut flat: usize, dim: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
}

/// Propagator plus vertex tensors, keyed by valence.
#[derive(Clone, Debug)]
pub struct WeightSystem {
    propagator: Matrix<Rational>,
    vertex_tensors: BTreeMap<usize, SymTensor>,
}

impl WeightSystem {
    pub fn new(propagator: Matrix<Rational>, vertex_tensors: BTreeMap<usize, SymTensor>) -> Result<Self> {
        let d = propagator.len();
        for t in vertex_tensors.values() {
            if t.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: t.dim() });
            }
        }
        Ok(WeightSystem { propagator, vertex_tensors })
    }

    pub fn from_form(a: &SymmetricForm, vertex_tensors: BTreeMap<usize, SymTensor>) -> Result<Self> {
        WeightSystem::new(a.inverse().clone(), vertex_tensors)
    }

    pub fn dim(&self) -> usize {
        self.propagator.len()
    }

    pub fn propagator(&self) -> &Matrix<Rational> {
        &self.propagator
    }

    pub fn vertex_tensor(&self, k: usize) -> Option<&SymTensor> {
        self.vertex_tensors.get(&k)
    }
}

/// `W_Γ(f_1..f_m)`: the contraction of vertex tensors along propagators, with
/// leg `i` contracted against the covector `legs[i]`.
///
/// Each edge raises one of its ends into that vertex's tensor, so the sum
/// runs over one index per edge rather than one per half-edge.
pub fn graph_weight(g: &FeynmanGraph, w: &WeightSystem, legs: &[Vec<Rational>]) -> Result<Rational> {
    let d = w.dim();
    if legs.len() != g.legs() {
        return Err(Error::DimensionMismatch { expected: g.legs(), got: legs.len() });
    }
    if let Some(f) = legs.iter().find(|f| f.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: f.len() });
    }
    let n = g.vertex_count();
    // slot -> (edge index, raised?)
    let mut slot_edge: Vec<Vec<(usize, bool)>> = (0..n).map(|v| vec![(0, false); g.valence_of(v)]).collect();
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        slot_edge[a.vertex][a.slot] = (e, true);
        slot_edge[b.vertex][b.slot] = (e, false);
    }
    let mut tensors: Vec<Vec<Rational>> = Vec::with_capacity(n);
    for v in 0..n {
        let base: Vec<Rational> = if v < g.legs() {
            legs[v].clone()
        } else {
            let k = g.valence_of(v);
            w.vertex_tensor(k).ok_or(Error::MissingVertexTensor(k))?.data().to_vec()
        };
        let k = g.valence_of(v);
        let raised: Vec<usize> = (0..k).filter(|&s| slot_edge[v][s].1).collect();
        tensors.push(raise(base, d, k, &raised, w.propagator()));
    }
    let e_count = g.edges().len();
    let total = d.checked_pow(e_count as u32).filter(|&t| t <= 50_000_000).ok_or_else(|| {
        Error::SizeGuard(format!("{d}^{e_count} edge labellings"))
    })?;
    let mut labels = vec![0usize; e_count];
    let mut idx = vec![0usize; 8];
    let mut acc = Rational::zero();
    for flat in 0..total {
        unflatten(flat, d, &mut labels);
        let mut term = Rational::one();
        for v in 0..n {
            let k = g.valence_of(v);
            if idx.len() < k {
                idx.resize(k, 0);
            }
            for s in 0..k {
                idx[s] = labels[slot_edge[v][s].0];
            }
            let t = &tensors[v][flatten(&idx[..k], d)];
            if t.is_zero() {
                term = Rational::zero();
                break;
            }
            term *= t;
        }
        if !term.is_zero() {
            acc += term;
        }
    }
    Ok(acc)
}

/// Contracts the listed slots of a rank-`k` tensor with the propagator.
fn raise(mut t: Vec<Rational>, d: usize, k: usize, slots: &[usize], a: &Matrix<Rational>) -> Vec<Rational> {
    let mut idx = vec![0usize; k];
    for &s in slots {
        let mut next = vec![Rational::zero(); t.len()];
        for (flat, out) in next.iter_mut().enumerate() {
            unflatten(flat, d, &mut idx);
            let i = idx[s];
            let mut acc = Rational::zero();
            for j in 0..d {
                idx[s] = j;
                let v = &t[flatten(&idx, d)];
                if !v.is_zero() && !a[i][j].is_zero() {
                    acc += v * &a[i][j];
                }
            }
            *out = acc;
        }
        t = next;
    }
    t
}

/// Coordinate covector `e_i` (zero-based) in dimension `d`.
pub fn coordinate_covector(d: usize, i: usize) -> Vec<Rational> {
    (0..d).map(|j| if j == i { Rational::one() } else { Rational::zero() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    pub(crate) fn theta() -> FeynmanGraph {
        FeynmanGraph::from_multiplicities(0, vec![3, 3], &[vec![0, 3], vec![3, 0]]).unwrap()
    }

    pub(crate) fn dumbbell() -> FeynmanGraph {
        FeynmanGraph::from_multiplicities(0, vec![3, 3], &[vec![1, 1], vec![1, 1]]).unwrap()
    }

    fn figure_eight() -> FeynmanGraph {
        FeynmanGraph::from_multiplicities(0, vec![4], &[vec![2]]).unwrap()
    }

    /// Brute force over internal-vertex bijections and slot permutations.
    fn brute_force_aut(g: &FeynmanGraph) -> u64 {
        let n = g.vertex_count();
        let legs = g.legs();
        let norm = |a: HalfEdge, b: HalfEdge| if a <= b { (a, b) } else { (b, a) };
        let edge_set: std::collections::BTreeSet<_> = g.edges().iter().map(|&(a, b)| norm(a, b)).collect();
        let internal: Vec<usize> = (legs..n).collect();
        let mut count = 0;
        for sigma in permutations(&internal) {
            let vmap = |v: usize| if v < legs { v } else { sigma[v - legs] };
            if (legs..n).any(|v| g.valence_of(vmap(v)) != g.valence_of(v)) {
                continue;
            }
            let slot_perms: Vec<Vec<Vec<usize>>> =
                (0..n).map(|v| permutations(&(0..g.valence_of(v)).collect::<Vec<_>>())).collect();
            let mut choice = vec![0usize; n];
            loop {
                let map = |h: HalfEdge| HalfEdge::new(vmap(h.vertex), slot_perms[h.vertex][choice[h.vertex]][h.slot]);
                let image: std::collections::BTreeSet<_> =
                    g.edges().iter().map(|&(a, b)| norm(map(a), map(b))).collect();
                if image == edge_set {
                    count += 1;
                }
                let mut i = 0;
                loop {
                    if i == n {
                        break;
                    }
                    choice[i] += 1;
                    if choice[i] < slot_perms[i].len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
        count
    }

    #[test]
    fn automorphisms_of_basic_graphs() {
        assert_eq!(automorphism_count(&theta()).unwrap(), 12);
        assert_eq!(automorphism_count(&dumbbell()).unwrap(), 8);
        assert_eq!(automorphism_count(&figure_eight()).unwrap(), 8);
        let chord = FeynmanGraph::from_multiplicities(2, vec![], &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(automorphism_count(&chord).unwrap(), 1);
        for g in [theta(), dumbbell(), figure_eight(), chord] {
            assert_eq!(automorphism_count(&g).unwrap(), brute_force_aut(&g));
        }
    }

    #[test]
    fn cubic_order_two() {
        let classes = enumerate_contraction_graphs(&[3], 2, 0).unwrap();
        let mut by_aut: Vec<(u64, u64)> = classes.iter().map(|c| (c.automorphisms, c.multiplicity)).collect();
        by_aut.sort();
        assert_eq!(by_aut, vec![(8, 9), (12, 6)]);
    }

    #[test]
    fn quartic_one_vertex() {
        let vac = enumerate_contraction_graphs(&[4], 1, 0).unwrap();
        assert_eq!(vac.len(), 1);
        assert_eq!(vac[0].multiplicity, 3);
        let two = enumerate_contraction_graphs(&[4], 1, 2).unwrap();
        let connected: Vec<_> = two.iter().filter(|c| !is_vacuum(&c.graph)).collect();
        assert_eq!(connected.len(), 1);
        assert_eq!(connected[0].multiplicity, 12);
        let mult = connected[0].graph.multiplicities();
        assert_eq!(mult[2][2], 1);
    }

    #[test]
    fn multiplicity_times_aut_is_symmetry_factor() {
        for (vals, legs) in [(vec![3, 3, 3, 3], 0), (vec![3, 4], 1), (vec![4, 4], 2), (vec![3, 3], 2)] {
            let classes = contract_vertices(&vals, legs).unwrap();
            let f = vertex_symmetry_factor(&vals);
            let mut total = 0u128;
            for c in &classes {
                assert_eq!(c.multiplicity * c.automorphisms, f, "{}", c.code);
                total += c.multiplicity as u128;
            }
            assert_eq!(total, crate::wick::pairing_count(legs + vals.iter().sum::<usize>()));
        }
    }

    #[test]
    fn canonical_form_ignores_vertex_labels() {
        let a = FeynmanGraph::from_multiplicities(1, vec![3, 3, 5], &[
            vec![0, 1, 0, 0],
            vec![1, 0, 1, 1],
            vec![0, 1, 0, 2],
            vec![0, 1, 2, 1],
        ])
        .unwrap();
        let b = FeynmanGraph::from_multiplicities(1, vec![5, 3, 3], &[
            vec![0, 0, 0, 1],
            vec![0, 1, 2, 1],
            vec![0, 2, 0, 1],
            vec![1, 1, 1, 0],
        ])
        .unwrap();
        assert_eq!(a.canonical_code().unwrap(), b.canonical_code().unwrap());
        assert_eq!(automorphism_count(&a).unwrap(), automorphism_count(&b).unwrap());
    }

    #[test]
    fn validation() {
        assert!(FeynmanGraph::new(0, vec![2], vec![(HalfEdge::new(0, 0), HalfEdge::new(0, 1))]).is_err());
        assert!(FeynmanGraph::new(2, vec![], vec![(HalfEdge::new(0, 0), HalfEdge::new(0, 0))]).is_err());
        assert!(FeynmanGraph::new(2, vec![], vec![]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = dumbbell().disjoint_union(&FeynmanGraph::from_multiplicities(2, vec![], &[vec![0, 1], vec![1, 0]]).unwrap());
        let back = FeynmanGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn components_and_vacuum() {
        let chord = FeynmanGraph::from_multiplicities(2, vec![], &[vec![0, 1], vec![1, 0]]).unwrap();
        let u = theta().disjoint_union(&chord);
        assert_eq!(connected_components(&u).len(), 2);
        assert!(is_vacuum(&u));
        assert!(!is_vacuum(&chord));
        assert_eq!(connected_components(&dumbbell()).len(), 1);
        assert!(is_vacuum(&dumbbell()));
    }

    fn cubic_ws(d: usize, prop: Matrix<Rational>, u: SymTensor) -> WeightSystem {
        assert_eq!(u.dim(), d);
        WeightSystem::new(prop, BTreeMap::from([(3, u)])).unwrap()
    }

    #[test]
    fn one_dimensional_weights() {
        let one = SymTensor::from_fn(1, 3, |_| rat(1));
        let w = cubic_ws(1, vec![vec![rat(1)]], one.clone());
        assert_eq!(graph_weight(&theta(), &w, &[]).unwrap(), rat(1));
        let t = ratio(2, 3);
        let w = cubic_ws(1, vec![vec![t.clone()]], one);
        assert_eq!(graph_weight(&dumbbell(), &w, &[]).unwrap(), ratio(8, 27));
    }

    #[test]
    fn theta_matches_explicit_triple_sum() {
        let u = SymTensor::from_fn(2, 3, |ix| rat(1 + ix.iter().sum::<usize>() as i64 * 2 - ix[0] as i64));
        let a = vec![vec![ratio(3, 2), ratio(-1, 3)], vec![ratio(-1, 3), rat(2)]];
        let w = cubic_ws(2, a.clone(), u.clone());
        let mut expected = Rational::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for i2 in 0..2 {
                        for j2 in 0..2 {
                            for k2 in 0..2 {
                                expected += u.get(&[i, j, k]) * u.get(&[i2, j2, k2]) * &a[i][i2] * &a[j][j2] * &a[k][k2];
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(graph_weight(&theta(), &w, &[]).unwrap(), expected);
    }

    #[test]
    fn weight_is_multiplicative() {
        let u = SymTensor::from_fn(2, 3, |ix| rat(ix.iter().sum::<usize>() as i64 - 1));
        let a = vec![vec![rat(1), ratio(1, 2)], vec![ratio(1, 2), rat(3)]];
        let w = cubic_ws(2, a, u);
        let chord = FeynmanGraph::from_multiplicities(2, vec![], &[vec![0, 1], vec![1, 0]]).unwrap();
        let f = vec![vec![rat(1), rat(2)], vec![rat(-1), rat(1)]];
        let lhs = graph_weight(&dumbbell().disjoint_union(&chord), &w, &f).unwrap();
        let rhs = graph_weight(&dumbbell(), &w, &[]).unwrap() * graph_weight(&chord, &w, &f).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn missing_tensor() {
        let w = WeightSystem::new(vec![vec![rat(1)]], BTreeMap::new()).unwrap();
        assert!(matches!(graph_weight(&theta(), &w, &[]), Err(Error::MissingVertexTensor(3))));
    }

    #[test]
    fn symmetrization() {
        let t = SymTensor::symmetrized(2, 2, vec![rat(0), rat(2), rat(0), rat(0)]).unwrap();
        assert_eq!(t.get(&[0, 1]), &rat(1));
        assert_eq!(t.get(&[1, 0]), &rat(1));
    }
}
