//! Uni-trivalent (Jacobi) diagrams on `m` oriented circles and their
//! quotient by antisymmetry, STU and IHX relations at degree at most two.
//!
//! A diagram has legs (univalent vertices) sitting on the circles in a cyclic
//! order and trivalent vertices whose three slots `0, 1, 2` list the cyclic
//! order of the half-edges there. Edges are stored in order and with a
//! direction; both are forgotten by the class map (see [`class_sign`]).

use std::collections::HashMap;

use num::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{rank, rref};
use crate::rational::{rat, rational_to_json, Rational};
use crate::wick::for_each_pairing;

pub const MAX_JACOBI_DEGREE: usize = 2;

/// One end of an edge: slot 0 for a leg, slots 0..3 for a trivalent vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct End {
    pub vertex: usize,
    pub slot: usize,
}

const fn end(vertex: usize, slot: usize) -> End {
    End { vertex, slot }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiDiagram {
    /// Leg vertices on each circle, in the circle's cyclic order.
    circles: Vec<Vec<usize>>,
    legs: usize,
    trivalent: usize,
    /// Ordered directed edges `(tail, head)`; legs are vertices `0..legs`,
    /// trivalent vertices follow.
    edges: Vec<(End, End)>,
}

/// Isomorphism invariant of an oriented diagram with unordered, undirected edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiagramCode {
    sizes: Vec<usize>,
    trivalent: usize,
    edges: Vec<(End, End)>,
}

const ROTATIONS: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
const ALL_SLOT_PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

impl JacobiDiagram {
    /// Builds a diagram; `circles` lists leg vertex ids per circle and every
    /// vertex `0..legs` must appear exactly once there.
    pub fn new(circles: Vec<Vec<usize>>, trivalent: usize, edges: Vec<(End, End)>) -> Result<Self> {
        let legs: usize = circles.iter().map(Vec::len).sum();
        let mut seen = vec![false; legs];
        for &v in circles.iter().flatten() {
            if v >= legs || seen[v] {
                return Err(Error::InvalidGraph(format!("leg {v} listed twice or out of range")));
            }
            seen[v] = true;
        }
        let d = JacobiDiagram { circles, legs, trivalent, edges };
        let mut used = HashMap::new();
        for &(a, b) in &d.edges {
            for e in [a, b] {
                let cap = if e.vertex < legs { 1 } else { 3 };
                if e.vertex >= legs + trivalent || e.slot >= cap {
                    return Err(Error::InvalidGraph(format!("bad half-edge {e:?}")));
                }
                if used.insert(e, ()).is_some() {
                    return Err(Error::InvalidGraph(format!("half-edge {e:?} used twice")));
                }
            }
        }
        if used.len() != legs + 3 * trivalent {
            return Err(Error::InvalidGraph("every half-edge must be used exactly once".into()));
        }
        Ok(d)
    }

    pub fn circles(&self) -> &[Vec<usize>] {
        &self.circles
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn trivalent(&self) -> usize {
        self.trivalent
    }

    pub fn edges(&self) -> &[(End, End)] {
        &self.edges
    }

    pub fn degree(&self) -> usize {
        (self.legs + self.trivalent) / 2
    }

    fn is_leg(&self, v: usize) -> bool {
        v < self.legs
    }

    fn partner(&self, e: End) -> End {
        for &(a, b) in &self.edges {
            if a == e {
                return b;
            }
            if b == e {
                return a;
            }
        }
        unreachable!("validated diagram has every half-edge on an edge")
    }

    fn leg_position(&self, v: usize) -> (usize, usize) {
        for (j, c) in self.circles.iter().enumerate() {
            if let Some(i) = c.iter().position(|&w| w == v) {
                return (j, i);
            }
        }
        unreachable!("leg on no circle")
    }

    /// An edge whose two ends sit at the same vertex.
    pub fn has_tadpole(&self) -> bool {
        self.edges.iter().any(|(a, b)| a.vertex == b.vertex)
    }

    /// A chord joining two legs that are neighbours on their circle.
    pub fn has_isolated_chord(&self) -> bool {
        self.edges.iter().any(|&(a, b)| {
            if !self.is_leg(a.vertex) || !self.is_leg(b.vertex) {
                return false;
            }
            let ((ja, ia), (jb, ib)) = (self.leg_position(a.vertex), self.leg_position(b.vertex));
            let n = self.circles[ja].len();
            ja == jb && ((ia + 1) % n == ib || (ib + 1) % n == ia)
        })
    }

    /// Whether every connected component reaches a circle.
    pub fn every_component_has_a_leg(&self) -> bool {
        let n = self.legs + self.trivalent;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a.vertex), find(&mut parent, b.vertex));
            parent[ra] = rb;
        }
        let mut has_leg = vec![false; n];
        for v in 0..self.legs {
            let r = find(&mut parent, v);
            has_leg[r] = true;
        }
        (0..n).all(|v| {
            let r = find(&mut parent, v);
            has_leg[r]
        })
    }

    fn code_with(&self, slot_perms: &[[usize; 3]]) -> DiagramCode {
        let sizes: Vec<usize> = self.circles.iter().map(Vec::len).collect();
        let t = self.trivalent;
        let mut best: Option<Vec<(End, End)>> = None;
        let mut rot = vec![0usize; self.circles.len()];
        let vertex_perms = permutations(t);
        loop {
            let mut leg_map = vec![0usize; self.legs];
            let mut next = 0;
            for (j, c) in self.circles.iter().enumerate() {
                for k in 0..c.len() {
                    leg_map[c[(k + rot[j]) % c.len()]] = next;
                    next += 1;
                }
            }
            for pi in &vertex_perms {
                let choices = slot_perms.len().pow(t as u32);
                for mut code in 0..choices {
                    let mut sp = Vec::with_capacity(t);
                    for _ in 0..t {
                        sp.push(slot_perms[code % slot_perms.len()]);
                        code /= slot_perms.len();
                    }
                    let map = |e: End| {
                        if e.vertex < self.legs {
                            end(leg_map[e.vertex], 0)
                        } else {
                            let w = e.vertex - self.legs;
                            end(self.legs + pi[w], sp[w][e.slot])
                        }
                    };
                    let mut edges: Vec<(End, End)> = self
                        .edges
                        .iter()
                        .map(|&(a, b)| {
                            let (x, y) = (map(a), map(b));
                            if x <= y { (x, y) } else { (y, x) }
                        })
                        .collect();
                    edges.sort();
                    if best.as_ref().is_none_or(|b| edges < *b) {
                        best = Some(edges);
                    }
                }
            }
            let mut j = 0;
            while j < rot.len() {
                rot[j] += 1;
                if rot[j] < self.circles[j].len().max(1) {
                    break;
                }
                rot[j] = 0;
                j += 1;
            }
            if j == rot.len() {
                break;
            }
        }
        DiagramCode { sizes, trivalent: t, edges: best.unwrap_or_default() }
    }

    /// Canonical code of the oriented diagram (cyclic orders kept).
    pub fn code(&self) -> DiagramCode {
        self.code_with(&ROTATIONS)
    }

    /// Canonical code of the underlying graph, ignoring vertex orientations.
    pub fn underlying_code(&self) -> DiagramCode {
        self.code_with(&ALL_SLOT_PERMS)
    }

    pub fn from_code(code: &DiagramCode) -> Self {
        let mut circles = Vec::new();
        let mut next = 0;
        for &s in &code.sizes {
            circles.push((next..next + s).collect());
            next += s;
        }
        JacobiDiagram { circles, legs: next, trivalent: code.trivalent, edges: code.edges.clone() }
    }

    pub fn canonical(&self) -> Self {
        Self::from_code(&self.code())
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.code() == other.code()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "circles": self.circles,
            "trivalent": self.trivalent,
            "edges": self.edges.iter().map(|(a, b)| json!([[a.vertex, a.slot], [b.vertex, b.slot]])).collect::<Vec<_>>(),
            "degree": self.degree(),
            "tadpole": self.has_tadpole(),
            "isolated_chord": self.has_isolated_chord(),
        })
    }
}

/// Named degree one and two diagrams used throughout tests and examples.
pub mod named {
    use super::*;

    /// A chord on one circle.
    pub fn chord() -> JacobiDiagram {
        JacobiDiagram::new(vec![vec![0, 1]], 0, vec![(end(0, 0), end(1, 0))]).unwrap()
    }

    /// A chord joining two circles.
    pub fn linking_chord() -> JacobiDiagram {
        JacobiDiagram::new(vec![vec![0], vec![1]], 0, vec![(end(0, 0), end(1, 0))]).unwrap()
    }

    /// A leg attached to a trivalent vertex carrying a looped edge.
    pub fn tadpole() -> JacobiDiagram {
        JacobiDiagram::new(vec![vec![0]], 1, vec![(end(0, 0), end(1, 0)), (end(1, 1), end(1, 2))]).unwrap()
    }

    /// Two crossing chords.
    pub fn x() -> JacobiDiagram {
        JacobiDiagram::new(vec![vec![0, 1, 2, 3]], 0, vec![(end(0, 0), end(2, 0)), (end(1, 0), end(3, 0))]).unwrap()
    }

    /// Two parallel chords, each isolated.
    pub fn parallel() -> JacobiDiagram {
        JacobiDiagram::new(vec![vec![0, 1, 2, 3]], 0, vec![(end(0, 0), end(1, 0)), (end(2, 0), end(3, 0))]).unwrap()
    }

    /// Three legs joined to one trivalent vertex whose cyclic order follows
    /// the circle.
    pub fn y() -> JacobiDiagram {
        JacobiDiagram::new(
            vec![vec![0, 1, 2]],
            1,
            vec![(end(0, 0), end(3, 0)), (end(1, 0), end(3, 1)), (end(2, 0), end(3, 2))],
        )
        .unwrap()
    }

    /// Two legs joined through two trivalent vertices linked by a double edge.
    pub fn double_edge() -> JacobiDiagram {
        JacobiDiagram::new(
            vec![vec![0, 1]],
            2,
            vec![(end(0, 0), end(2, 0)), (end(2, 1), end(3, 1)), (end(2, 2), end(3, 2)), (end(3, 0), end(1, 0))],
        )
        .unwrap()
    }
}

/// All diagrams of degree `n` on `m` circles up to isomorphism and reversal of
/// vertex orientations. Every circle carries at least one leg and every
/// connected component reaches a circle. Diagrams with looped edges are kept
/// and can be recognised by [`JacobiDiagram::has_tadpole`].
pub fn enumerate_jacobi(n: usize, m: usize) -> Result<Vec<JacobiDiagram>> {
    let mut seen: HashMap<DiagramCode, JacobiDiagram> = HashMap::new();
    for d in enumerate_oriented(n, m)? {
        seen.entry(d.underlying_code()).or_insert(d);
    }
    let mut out: Vec<(DiagramCode, JacobiDiagram)> = seen.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, d)| d).collect())
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All oriented diagrams of degree `n` on `m` circles, one per isomorphism class.
pub fn enumerate_oriented(n: usize, m: usize) -> Result<Vec<JacobiDiagram>> {
    if n > MAX_JACOBI_DEGREE {
        return Err(Error::DegreeTooHigh(n));
    }
    let mut seen: HashMap<DiagramCode, JacobiDiagram> = HashMap::new();
    for t in 0..=2 * n {
        let u = 2 * n - t;
        if (u + 3 * t) % 2 == 1 || u < m.max(1) {
            continue;
        }
        let ends: Vec<End> = (0..u).map(|v| end(v, 0)).chain((0..t).flat_map(|w| (0..3).map(move |s| end(u + w, s)))).collect();
        for sizes in compositions(u, m) {
            let mut circles = Vec::new();
            let mut next = 0;
            for s in &sizes {
                circles.push((next..next + s).collect::<Vec<_>>());
                next += s;
            }
            for_each_pairing(ends.len(), |pairs| {
                let edges = pairs.iter().map(|&(a, b)| (ends[a], ends[b])).collect();
                let d = JacobiDiagram { circles: circles.clone(), legs: u, trivalent: t, edges };
                if d.every_component_has_a_leg() {
                    let code = d.code();
                    seen.entry(code.clone()).or_insert_with(|| JacobiDiagram::from_code(&code));
                }
            });
        }
    }
    let mut out: Vec<(DiagramCode, JacobiDiagram)> = seen.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, d)| d).collect())
}

/// Changes of the orientation data of a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrientationMove {
    /// Cyclically rotate the slots of a trivalent vertex.
    RotateVertex(usize),
    /// Reverse the cyclic order at a trivalent vertex.
    ReverseVertex(usize),
    /// Swap two edges in the total order.
    TransposeEdges(usize, usize),
    /// Reverse the direction of an edge.
    ReverseEdge(usize),
}

impl JacobiDiagram {
    pub fn apply(&self, mv: OrientationMove) -> Result<Self> {
        let mut d = self.clone();
        let check_vertex = |v: usize| {
            if v < self.legs || v >= self.legs + self.trivalent {
                Err(Error::InvalidMove(format!("{v} is not a trivalent vertex")))
            } else {
                Ok(())
            }
        };
        let check_edge = |i: usize| {
            if i >= self.edges.len() {
                Err(Error::InvalidMove(format!("no edge {i}")))
            } else {
                Ok(())
            }
        };
        match mv {
            OrientationMove::RotateVertex(v) | OrientationMove::ReverseVertex(v) => {
                check_vertex(v)?;
                let perm = if matches!(mv, OrientationMove::RotateVertex(_)) { [1, 2, 0] } else { [0, 2, 1] };
                for (a, b) in &mut d.edges {
                    for e in [a, b] {
                        if e.vertex == v {
                            e.slot = perm[e.slot];
                        }
                    }
                }
            }
            OrientationMove::TransposeEdges(i, j) => {
                check_edge(i)?;
                check_edge(j)?;
                d.edges.swap(i, j);
            }
            OrientationMove::ReverseEdge(i) => {
                check_edge(i)?;
                let (a, b) = d.edges[i];
                d.edges[i] = (b, a);
            }
        }
        Ok(d)
    }

    /// Coordinates of the configuration space listed as `(x_1, y_1, ...)`:
    /// the coordinate of a leg is its own, and a trivalent vertex gives its
    /// `k`-th spatial axis to the half-edge in slot `k`.
    fn coordinate_order(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .map(|e| if e.vertex < self.legs { (e.vertex, 0) } else { (e.vertex, e.slot) })
            .collect()
    }
}

fn permutation_parity_between(a: &[(usize, usize)], b: &[(usize, usize)]) -> i32 {
    let pos: HashMap<_, _> = b.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut p: Vec<usize> = a.iter().map(|x| pos[x]).collect();
    let mut sign = 1;
    for i in 0..p.len() {
        while p[i] != i {
            let j = p[i];
            p.swap(i, j);
            sign = -sign;
        }
    }
    sign
}

/// Sign by which a move changes the orientation of the configuration space,
/// read off from the permutation of the coordinate list.
pub fn orientation_sign(d: &JacobiDiagram, mv: OrientationMove) -> Result<i32> {
    let after = d.apply(mv)?;
    let before = d.coordinate_order();
    let now = after.coordinate_order();
    Ok(permutation_parity_between(&before, &now))
}

/// Degree of the induced map on the product of edge spheres: reversing an
/// edge composes its Gauss map with the antipodal map.
pub fn gauss_map_sign(mv: OrientationMove) -> i32 {
    match mv {
        OrientationMove::ReverseEdge(_) => -1,
        _ => 1,
    }
}

/// Sign relating the class of the moved diagram to the original one, so that
/// `W_Γ [Γ]` is unchanged.
pub fn class_sign(d: &JacobiDiagram, mv: OrientationMove) -> Result<i32> {
    Ok(orientation_sign(d, mv)? * gauss_map_sign(mv))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RelationKind {
    Antisymmetry,
    Stu,
    Ihx,
    /// Diagrams with an isolated chord are dropped.
    OneTerm,
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub kind: RelationKind,
    pub terms: Vec<(usize, Rational)>,
}

/// Relations as rows over the column basis of oriented diagram classes.
#[derive(Clone, Debug)]
pub struct RelationMatrix {
    pub columns: Vec<JacobiDiagram>,
    index: HashMap<DiagramCode, usize>,
    pub rows: Vec<Relation>,
}

impl RelationMatrix {
    fn column(&mut self, d: &JacobiDiagram) -> usize {
        let code = d.code();
        if let Some(&i) = self.index.get(&code) {
            return i;
        }
        let i = self.columns.len();
        self.columns.push(JacobiDiagram::from_code(&code));
        self.index.insert(code, i);
        i
    }

    pub fn index_of(&self, d: &JacobiDiagram) -> Option<usize> {
        self.index.get(&d.code()).copied()
    }

    fn push(&mut self, kind: RelationKind, terms: Vec<(JacobiDiagram, i64)>) {
        let mut acc: HashMap<usize, Rational> = HashMap::new();
        for (d, c) in terms {
            let i = self.column(&d);
            *acc.entry(i).or_insert_with(Rational::zero) += rat(c);
        }
        let mut terms: Vec<(usize, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by_key(|t| t.0);
        if !terms.is_empty() {
            self.rows.push(Relation { kind, terms });
        }
    }

    pub fn dense(&self) -> Vec<Vec<Rational>> {
        self.rows
            .iter()
            .map(|r| {
                let mut row = vec![Rational::zero(); self.columns.len()];
                for (i, c) in &r.terms {
                    row[*i] = c.clone();
                }
                row
            })
            .collect()
    }

    pub fn count(&self, kind: RelationKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }
}

/// Rebuilds a diagram from loosely numbered pieces, renumbering legs by
/// circle order and trivalent vertices by first appearance.
fn assemble(circles: Vec<Vec<usize>>, trivalent: &[usize], edges: Vec<(End, End)>) -> JacobiDiagram {
    let mut map = HashMap::new();
    let mut next = 0;
    let mut new_circles = Vec::new();
    for c in circles {
        new_circles.push(
            c.into_iter()
                .map(|v| {
                    map.insert(v, next);
                    next += 1;
                    next - 1
                })
                .collect(),
        );
    }
    let legs = next;
    for &w in trivalent {
        map.insert(w, next);
        next += 1;
    }
    let edges = edges.into_iter().map(|(a, b)| (end(map[&a.vertex], a.slot), end(map[&b.vertex], b.slot))).collect();
    JacobiDiagram { circles: new_circles, legs, trivalent: trivalent.len(), edges }
}

fn stu_terms(d: &JacobiDiagram, w: usize, s0: usize) -> Option<(JacobiDiagram, JacobiDiagram)> {
    let leg = d.partner(end(w, s0));
    if !d.is_leg(leg.vertex) || leg.vertex == w {
        return None;
    }
    let (s1, s2) = ((s0 + 1) % 3, (s0 + 2) % 3);
    let (a, b) = (d.partner(end(w, s1)), d.partner(end(w, s2)));
    let (j, i) = d.leg_position(leg.vertex);
    let fresh = d.legs + d.trivalent;
    let (p, q) = (fresh, fresh + 1);
    let mut circles = d.circles.clone();
    circles[j].splice(i..=i, [p, q]);
    let rest: Vec<(End, End)> =
        d.edges.iter().copied().filter(|&(x, y)| x.vertex != w && y.vertex != w).collect();
    let trivalent: Vec<usize> = (d.legs..d.legs + d.trivalent).filter(|&v| v != w).collect();
    let build = |first: End, second: End| {
        let mut edges = rest.clone();
        if first.vertex == w {
            // looped edge at w: the two new legs are joined to each other
            edges.push((end(p, 0), end(q, 0)));
        } else {
            edges.push((end(p, 0), first));
            edges.push((end(q, 0), second));
        }
        assemble(circles.clone(), &trivalent, edges)
    };
    Some((build(a, b), build(b, a)))
}

fn ihx_terms(d: &JacobiDiagram, edge: usize) -> Option<[JacobiDiagram; 3]> {
    let (eu, ev) = d.edges[edge];
    let (u, v) = (eu.vertex, ev.vertex);
    if d.is_leg(u) || d.is_leg(v) || u == v {
        return None;
    }
    let (u1, u2) = (end(u, (eu.slot + 1) % 3), end(u, (eu.slot + 2) % 3));
    let (v1, v2) = (end(v, (ev.slot + 1) % 3), end(v, (ev.slot + 2) % 3));
    let far = [d.partner(u1), d.partner(u2), d.partner(v1), d.partner(v2)];
    if far.iter().any(|f| f.vertex == u || f.vertex == v) {
        return None;
    }
    let [a, b, c, dd] = far;
    let rest: Vec<(End, End)> = d
        .edges
        .iter()
        .copied()
        .filter(|&(x, y)| ![u1, u2, v1, v2].contains(&x) && ![u1, u2, v1, v2].contains(&y))
        .collect();
    let build = |x: End, y: End, z: End, t: End| {
        let mut edges = rest.clone();
        edges.extend([(u1, x), (u2, y), (v1, z), (v2, t)]);
        JacobiDiagram { edges, ..d.clone() }
    };
    Some([build(a, b, c, dd), build(b, c, a, dd), build(c, a, b, dd)])
}

/// Generates antisymmetry, STU and IHX relations (and optionally the
/// one-term relation) on all oriented diagrams of degree `n` on `m` circles.
pub fn relation_matrix(n: usize, m: usize, one_term: bool) -> Result<RelationMatrix> {
    let mut rm = RelationMatrix { columns: Vec::new(), index: HashMap::new(), rows: Vec::new() };
    for d in enumerate_oriented(n, m)? {
        rm.column(&d);
    }
    let mut k = 0;
    while k < rm.columns.len() {
        let d = rm.columns[k].clone();
        for w in d.legs..d.legs + d.trivalent {
            let rev = d.apply(OrientationMove::ReverseVertex(w))?;
            let s = class_sign(&d, OrientationMove::ReverseVertex(w))? as i64;
            rm.push(RelationKind::Antisymmetry, vec![(rev, 1), (d.clone(), -s)]);
            for s0 in 0..3 {
                if let Some((t, u)) = stu_terms(&d, w, s0) {
                    rm.push(RelationKind::Stu, vec![(d.clone(), 1), (t, -1), (u, 1)]);
                }
            }
        }
        for e in 0..d.edges.len() {
            if let Some(terms) = ihx_terms(&d, e) {
                rm.push(RelationKind::Ihx, terms.into_iter().map(|t| (t, 1)).collect());
            }
        }
        if one_term && d.has_isolated_chord() {
            rm.push(RelationKind::OneTerm, vec![(d.clone(), 1)]);
        }
        k += 1;
    }
    Ok(rm)
}

/// The quotient of the span of diagrams by a relation matrix.
#[derive(Clone, Debug)]
pub struct JacobiQuotient {
    pub degree: usize,
    pub circles: usize,
    pub one_term: bool,
    pub relations: RelationMatrix,
    reduced: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
    basis: Vec<usize>,
}

impl JacobiQuotient {
    pub fn new(n: usize, m: usize, one_term: bool) -> Result<Self> {
        let relations = relation_matrix(n, m, one_term)?;
        let (reduced, pivots) = rref(&relations.dense());
        let basis = (0..relations.columns.len()).filter(|c| !pivots.contains(c)).collect();
        Ok(JacobiQuotient { degree: n, circles: m, one_term, relations, reduced, pivots, basis })
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Diagrams whose classes form the basis of the quotient.
    pub fn basis(&self) -> Vec<&JacobiDiagram> {
        self.basis.iter().map(|&i| &self.relations.columns[i]).collect()
    }

    /// Coordinates of `[Γ]` in the quotient basis.
    pub fn class_of(&self, d: &JacobiDiagram) -> Result<Vec<Rational>> {
        if d.degree() != self.degree || d.circles.len() != self.circles {
            return Err(Error::DegreeTooHigh(d.degree()));
        }
        let Some(col) = self.relations.index_of(d) else {
            return Err(Error::InvalidGraph("diagram is not in the enumerated basis".into()));
        };
        let mut v = vec![Rational::zero(); self.relations.columns.len()];
        v[col] = Rational::one();
        for (row, &p) in self.reduced.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x -= &f * r;
            }
        }
        Ok(self.basis.iter().map(|&i| v[i].clone()).collect())
    }

    pub fn to_json(&self) -> Value {
        let rel = &self.relations;
        json!({
            "degree": self.degree,
            "circles": self.circles,
            "one_term": self.one_term,
            "diagrams": rel.columns.len(),
            "relations": {
                "antisymmetry": rel.count(RelationKind::Antisymmetry),
                "stu": rel.count(RelationKind::Stu),
                "ihx": rel.count(RelationKind::Ihx),
                "one_term": rel.count(RelationKind::OneTerm),
            },
            "dimension": self.dimension(),
            "basis": self.basis().iter().map(|d| d.to_json()).collect::<Vec<_>>(),
        })
    }
}

pub fn quotient_dimension(n: usize, m: usize, one_term: bool) -> Result<usize> {
    Ok(JacobiQuotient::new(n, m, one_term)?.dimension())
}

/// Rank of the relation rows taken in the given order.
pub fn relation_rank_in_order(rm: &RelationMatrix, order: &[usize]) -> usize {
    let dense = rm.dense();
    let rows: Vec<Vec<Rational>> = order.iter().map(|&i| dense[i].clone()).collect();
    rank(&rows)
}

pub fn class_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn zero_class(q: &JacobiQuotient, d: &JacobiDiagram) -> bool {
        q.class_of(d).unwrap().iter().all(Zero::is_zero)
    }

    #[test]
    fn degree_one_lists() {
        let one = enumerate_jacobi(1, 1).unwrap();
        assert_eq!(one.len(), 2);
        assert!(one.iter().any(|d| d.is_isomorphic(&chord())));
        assert!(one.iter().any(|d| d.has_tadpole()));
        let two = enumerate_jacobi(1, 2).unwrap();
        assert_eq!(two.len(), 1);
        assert!(two[0].is_isomorphic(&linking_chord()));
        assert!(matches!(enumerate_jacobi(3, 1), Err(Error::DegreeTooHigh(3))));
    }

    #[test]
    fn degree_two_knot_diagrams() {
        let list = enumerate_jacobi(2, 1).unwrap();
        let loopless: Vec<_> = list.iter().filter(|d| !d.has_tadpole()).collect();
        let named = [x(), parallel(), y(), double_edge()];
        for d in &named {
            assert_eq!(loopless.iter().filter(|e| e.underlying_code() == d.underlying_code()).count(), 1);
        }
        // the only other loopless diagram has a single leg, and its class vanishes
        let extra: Vec<_> =
            loopless.iter().filter(|e| named.iter().all(|d| d.underlying_code() != e.underlying_code())).collect();
        assert_eq!(extra.len(), 1);
        assert_eq!(extra[0].legs(), 1);
        let q = JacobiQuotient::new(2, 1, false).unwrap();
        assert!(zero_class(&q, extra[0]));
    }

    #[test]
    fn orientation_moves() {
        let d = y();
        assert_eq!(orientation_sign(&d, OrientationMove::RotateVertex(3)).unwrap(), 1);
        assert_eq!(orientation_sign(&d, OrientationMove::ReverseVertex(3)).unwrap(), -1);
        assert_eq!(orientation_sign(&d, OrientationMove::TransposeEdges(0, 2)).unwrap(), 1);
        assert_eq!(orientation_sign(&d, OrientationMove::ReverseEdge(1)).unwrap(), -1);
        // edge order and direction leave the class untouched
        assert_eq!(class_sign(&d, OrientationMove::TransposeEdges(0, 2)).unwrap(), 1);
        assert_eq!(class_sign(&d, OrientationMove::ReverseEdge(1)).unwrap(), 1);
        let twice = d.apply(OrientationMove::ReverseVertex(3)).unwrap().apply(OrientationMove::ReverseVertex(3)).unwrap();
        assert_eq!(twice, d);
        let s1 = orientation_sign(&d, OrientationMove::ReverseVertex(3)).unwrap();
        let s2 = orientation_sign(&d.apply(OrientationMove::ReverseVertex(3)).unwrap(), OrientationMove::ReverseVertex(3)).unwrap();
        assert_eq!(s1 * s2, 1);
        assert!(d.apply(OrientationMove::ReverseVertex(0)).is_err());
        assert!(d.apply(OrientationMove::ReverseEdge(7)).is_err());
    }

    #[test]
    fn tadpoles_vanish() {
        let q = JacobiQuotient::new(1, 1, false).unwrap();
        assert!(zero_class(&q, &tadpole()));
        assert!(!zero_class(&q, &chord()));
        let q2 = JacobiQuotient::new(2, 1, false).unwrap();
        for d in enumerate_oriented(2, 1).unwrap().iter().filter(|d| d.has_tadpole()) {
            assert!(zero_class(&q2, d), "{}", d.to_json());
        }
    }

    #[test]
    fn x_equals_y_for_zero_framing() {
        let q = JacobiQuotient::new(2, 1, false).unwrap();
        let (cx, cii, cy) = (q.class_of(&x()).unwrap(), q.class_of(&parallel()).unwrap(), q.class_of(&y()).unwrap());
        let diff: Vec<Rational> = cx.iter().zip(&cii).map(|(a, b)| a - b).collect();
        assert_eq!(cy, diff);
        let two_y: Vec<Rational> = cy.iter().map(|c| c * rat(2)).collect();
        assert_eq!(q.class_of(&double_edge()).unwrap(), two_y);
        let framed = JacobiQuotient::new(2, 1, true).unwrap();
        assert_eq!(framed.dimension(), 1);
        assert_eq!(framed.class_of(&x()).unwrap(), framed.class_of(&y()).unwrap());
        assert!(!zero_class(&framed, &x()));
    }

    #[test]
    fn pinned_dimensions() {
        assert_eq!(quotient_dimension(1, 1, false).unwrap(), 1);
        assert_eq!(quotient_dimension(1, 2, false).unwrap(), 1);
        assert_eq!(quotient_dimension(2, 1, false).unwrap(), 2);
        assert_eq!(quotient_dimension(2, 1, true).unwrap(), 1);
        assert_eq!(quotient_dimension(2, 2, false).unwrap(), 4);
        assert_eq!(quotient_dimension(2, 2, true).unwrap(), 1);
    }

    #[test]
    fn rank_ignores_relation_order() {
        let rm = relation_matrix(2, 1, false).unwrap();
        let base = rank(&rm.dense());
        let mut order: Vec<usize> = (0..rm.rows.len()).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            order.shuffle(&mut rng);
            assert_eq!(relation_rank_in_order(&rm, &order), base);
        }
    }

    #[test]
    fn classes_respect_isomorphism() {
        let q = JacobiQuotient::new(2, 1, false).unwrap();
        // the crossed chords with the circle rotated, edges swapped and reversed
        let moved = JacobiDiagram::new(vec![vec![3, 0, 1, 2]], 0, vec![(end(1, 0), end(3, 0)), (end(2, 0), end(0, 0))]).unwrap();
        assert!(moved.is_isomorphic(&x()));
        assert_eq!(q.class_of(&moved).unwrap(), q.class_of(&x()).unwrap());
        let y2 = y().apply(OrientationMove::RotateVertex(3)).unwrap().apply(OrientationMove::ReverseEdge(0)).unwrap();
        assert_eq!(q.class_of(&y2).unwrap(), q.class_of(&y()).unwrap());
        let y_rev = y().apply(OrientationMove::ReverseVertex(3)).unwrap();
        let neg: Vec<Rational> = q.class_of(&y()).unwrap().iter().map(|c| -c).collect();
        assert_eq!(q.class_of(&y_rev).unwrap(), neg);
        assert!(q.class_of(&chord()).is_err());
    }
}
