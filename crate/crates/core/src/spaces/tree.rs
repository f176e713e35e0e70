//! Finite metric trees: weighted acyclic graphs viewed as geodesic spaces.
//!
//! A point is either a vertex or a position strictly inside an edge, measured
//! from the edge's first endpoint. Offsets within [`SNAP`] of an endpoint are
//! canonicalized to the vertex so that point equality is exact.

use std::collections::HashMap;

use super::{mismatch, project_common, ConvexSet};
use crate::error::{Error, Result};
use crate::geometry::HadamardSpace;
use crate::prox::solver::golden_section;
use crate::tolerance::EPS_GEOM_TREE;

const SNAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeEdge {
    pub from: usize,
    pub to: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreePoint {
    Vertex(usize),
    /// Interior point of `edge`, `offset` from its `from` endpoint.
    Edge { edge: usize, offset: f64 },
}

/// A maximal piece of a path lying on one edge, in edge offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeSegment {
    pub edge: usize,
    pub start: f64,
    pub end: f64,
}

impl TreeSegment {
    pub fn length(&self) -> f64 {
        (self.end - self.start).abs()
    }
}

/// The unique path between two tree points.
#[derive(Debug, Clone, PartialEq)]
pub struct TreePath {
    /// Vertices crossed, in order.
    pub vertices: Vec<usize>,
    pub segments: Vec<TreeSegment>,
    pub length: f64,
}

/// Direction of travel out of a point: an edge and the sign of offset change.
type Germ = (usize, i8);

#[derive(Debug, Clone)]
pub struct MetricTree {
    labels: Vec<String>,
    lookup: HashMap<String, usize>,
    edges: Vec<TreeEdge>,
    incident: Vec<Vec<usize>>,
    parent: Vec<Option<(usize, usize)>>,
    level: Vec<usize>,
    root_distance: Vec<f64>,
}

/// Parses the `u v length` edge-list format. Blank lines and lines starting
/// with `#` are ignored.
pub fn parse_edge_list(text: &str) -> Result<Vec<(String, String, f64)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::domain(format!(
                "edge list line {}: expected `u v length`, got `{line}`",
                lineno + 1
            )));
        }
        let length: f64 = fields[2].parse().map_err(|_| {
            Error::domain(format!(
                "edge list line {}: `{}` is not a number",
                lineno + 1,
                fields[2]
            ))
        })?;
        out.push((fields[0].to_string(), fields[1].to_string(), length));
    }
    Ok(out)
}

impl MetricTree {
    pub fn from_edge_list(text: &str) -> Result<Self> {
        Self::from_edges(parse_edge_list(text)?)
    }

    pub fn from_edges<I, S>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = Vec::new();
        let mut lookup: HashMap<String, usize> = HashMap::new();
        let mut intern = |s: String| -> usize {
            if let Some(&i) = lookup.get(&s) {
                return i;
            }
            labels.push(s.clone());
            lookup.insert(s, labels.len() - 1);
            labels.len() - 1
        };
        let mut list = Vec::new();
        for (u, v, length) in edges {
            let (u, v) = (u.into(), v.into());
            if !(length.is_finite() && length > 0.0) {
                return Err(Error::domain(format!(
                    "edge {u}–{v} has non-positive length {length}"
                )));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop at vertex {u}")));
            }
            let (a, b) = (intern(u), intern(v));
            list.push(TreeEdge {
                from: a,
                to: b,
                length,
            });
        }
        if list.is_empty() {
            return Err(Error::domain("a metric tree needs at least one edge"));
        }
        let n = labels.len();
        if list.len() != n - 1 {
            return Err(Error::domain(format!(
                "{} edges on {n} vertices cannot form a tree",
                list.len()
            )));
        }
        let mut incident = vec![Vec::new(); n];
        for (i, e) in list.iter().enumerate() {
            incident[e.from].push(i);
            incident[e.to].push(i);
        }

        // Root at vertex 0 and record parents with a DFS.
        let mut parent = vec![None; n];
        let mut level = vec![0usize; n];
        let mut root_distance = vec![0.0; n];
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &e in &incident[v] {
                let w = other_end(&list[e], v);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, e));
                    level[w] = level[v] + 1;
                    root_distance[w] = root_distance[v] + list[e].length;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::domain("edge list is not connected"));
        }
        Ok(Self {
            labels,
            lookup,
            edges: list,
            incident,
            parent,
            level,
            root_distance,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn vertex_id(&self, label: &str) -> Option<usize> {
        self.lookup.get(label).copied()
    }

    pub fn vertex(&self, label: &str) -> Result<TreePoint> {
        self.vertex_id(label)
            .map(TreePoint::Vertex)
            .ok_or_else(|| Error::domain(format!("unknown vertex `{label}`")))
    }

    /// Edge joining two vertices, if any.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.incident[u]
            .iter()
            .copied()
            .find(|&e| other_end(&self.edges[e], u) == v)
    }

    /// Canonical point at `offset` from the `from` end of `edge`.
    pub fn point_on_edge(&self, edge: usize, offset: f64) -> Result<TreePoint> {
        let e = self
            .edges
            .get(edge)
            .ok_or_else(|| Error::domain(format!("edge id {edge} does not exist")))?;
        if !offset.is_finite() || offset < -SNAP || offset > e.length + SNAP {
            return Err(Error::domain(format!(
                "offset {offset} outside edge {edge} of length {}",
                e.length
            )));
        }
        Ok(self.canonical(edge, offset))
    }

    fn canonical(&self, edge: usize, offset: f64) -> TreePoint {
        let e = &self.edges[edge];
        let snap = SNAP * e.length.max(1.0);
        if offset <= snap {
            TreePoint::Vertex(e.from)
        } else if offset >= e.length - snap {
            TreePoint::Vertex(e.to)
        } else {
            TreePoint::Edge { edge, offset }
        }
    }

    /// Edge id and offset representing a point; vertices map to an incident
    /// edge.
    pub fn edge_coordinates(&self, p: &TreePoint) -> (usize, f64) {
        match *p {
            TreePoint::Edge { edge, offset } => (edge, offset),
            TreePoint::Vertex(v) => {
                let e = self.incident[v][0];
                (e, self.end_offset(e, v))
            }
        }
    }

    fn end_offset(&self, edge: usize, v: usize) -> f64 {
        if self.edges[edge].from == v {
            0.0
        } else {
            self.edges[edge].length
        }
    }

    fn lca(&self, mut u: usize, mut v: usize) -> usize {
        while self.level[u] > self.level[v] {
            u = self.parent[u].expect("non-root").0;
        }
        while self.level[v] > self.level[u] {
            v = self.parent[v].expect("non-root").0;
        }
        while u != v {
            u = self.parent[u].expect("non-root").0;
            v = self.parent[v].expect("non-root").0;
        }
        u
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        let w = self.lca(u, v);
        self.root_distance[u] + self.root_distance[v] - 2.0 * self.root_distance[w]
    }

    /// Vertices and edges on the path from `u` to `v`.
    fn vertex_path(&self, u: usize, v: usize) -> (Vec<usize>, Vec<usize>) {
        let w = self.lca(u, v);
        let mut up = vec![u];
        let mut up_edges = Vec::new();
        let mut x = u;
        while x != w {
            let (p, e) = self.parent[x].expect("non-root");
            up_edges.push(e);
            up.push(p);
            x = p;
        }
        let mut down = Vec::new();
        let mut down_edges = Vec::new();
        let mut y = v;
        while y != w {
            let (p, e) = self.parent[y].expect("non-root");
            down.push(y);
            down_edges.push(e);
            y = p;
        }
        down.reverse();
        down_edges.reverse();
        up.extend(down);
        up_edges.extend(down_edges);
        (up, up_edges)
    }

    /// Ways out of a point to a vertex, with their lengths.
    fn exits(&self, p: &TreePoint) -> Vec<(usize, f64)> {
        match *p {
            TreePoint::Vertex(v) => vec![(v, 0.0)],
            TreePoint::Edge { edge, offset } => {
                let e = &self.edges[edge];
                vec![(e.from, offset), (e.to, e.length - offset)]
            }
        }
    }

    fn check_point(&self, p: &TreePoint) -> Result<()> {
        match *p {
            TreePoint::Vertex(v) if v < self.labels.len() => Ok(()),
            TreePoint::Vertex(v) => Err(Error::domain(format!("vertex id {v} does not exist"))),
            TreePoint::Edge { edge, offset } => {
                let e = self
                    .edges
                    .get(edge)
                    .ok_or_else(|| Error::domain(format!("edge id {edge} does not exist")))?;
                if offset.is_finite() && offset > 0.0 && offset < e.length {
                    Ok(())
                } else {
                    Err(Error::domain(format!(
                        "offset {offset} is not interior to edge {edge} of length {}",
                        e.length
                    )))
                }
            }
        }
    }

    /// The unique path from `x` to `y`.
    pub fn locate(&self, x: &TreePoint, y: &TreePoint) -> Result<TreePath> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.path(x, y))
    }

    fn path(&self, x: &TreePoint, y: &TreePoint) -> TreePath {
        if x == y {
            return TreePath {
                vertices: Vec::new(),
                segments: Vec::new(),
                length: 0.0,
            };
        }
        if let (
            TreePoint::Edge { edge: ex, offset: ox },
            TreePoint::Edge { edge: ey, offset: oy },
        ) = (*x, *y)
        {
            if ex == ey {
                return TreePath {
                    vertices: Vec::new(),
                    segments: vec![TreeSegment {
                        edge: ex,
                        start: ox,
                        end: oy,
                    }],
                    length: (ox - oy).abs(),
                };
            }
        }
        let mut best = (f64::INFINITY, 0, 0);
        for &(u, cu) in &self.exits(x) {
            for &(w, cw) in &self.exits(y) {
                let total = cu + self.vertex_distance(u, w) + cw;
                if total < best.0 {
                    best = (total, u, w);
                }
            }
        }
        let (_, u, w) = best;
        let mut segments = Vec::new();
        if let TreePoint::Edge { edge, offset } = *x {
            segments.push(TreeSegment {
                edge,
                start: offset,
                end: self.end_offset(edge, u),
            });
        }
        let (vertices, path_edges) = self.vertex_path(u, w);
        for (i, &e) in path_edges.iter().enumerate() {
            segments.push(TreeSegment {
                edge: e,
                start: self.end_offset(e, vertices[i]),
                end: self.end_offset(e, vertices[i + 1]),
            });
        }
        if let TreePoint::Edge { edge, offset } = *y {
            segments.push(TreeSegment {
                edge,
                start: self.end_offset(edge, w),
                end: offset,
            });
        }
        let length = segments.iter().map(TreeSegment::length).sum();
        TreePath {
            vertices,
            segments,
            length,
        }
    }

    /// Initial direction of the path from `p` toward `x` (`p != x`).
    fn germ(&self, p: &TreePoint, x: &TreePoint) -> Option<Germ> {
        self.path(p, x)
            .segments
            .iter()
            .find(|s| s.length() > 0.0)
            .map(|s| (s.edge, if s.end > s.start { 1 } else { -1 }))
    }

    /// Point reached from `p` by moving `t` along `germ`, stopping at the far
    /// end of the edge.
    fn step_along(&self, p: &TreePoint, (edge, sign): Germ, t: f64) -> TreePoint {
        let start = match *p {
            TreePoint::Edge { offset, .. } => offset,
            TreePoint::Vertex(v) => self.end_offset(edge, v),
        };
        let len = self.edges[edge].length;
        let offset = (start + f64::from(sign) * t).clamp(0.0, len);
        self.canonical(edge, offset)
    }

    fn germs_at(&self, p: &TreePoint) -> Vec<Germ> {
        match *p {
            TreePoint::Edge { edge, .. } => vec![(edge, 1), (edge, -1)],
            TreePoint::Vertex(v) => self.incident[v]
                .iter()
                .map(|&e| (e, if self.edges[e].from == v { 1 } else { -1 }))
                .collect(),
        }
    }

    fn in_subtree(&self, p: &TreePoint, members: &[bool]) -> bool {
        match *p {
            TreePoint::Vertex(v) => members[v],
            TreePoint::Edge { edge, .. } => {
                members[self.edges[edge].from] && members[self.edges[edge].to]
            }
        }
    }

    fn subtree_members(&self, vertices: &[String]) -> Result<Vec<bool>> {
        if vertices.is_empty() {
            return Err(Error::domain("subtree needs at least one vertex"));
        }
        let mut members = vec![false; self.vertex_count()];
        for label in vertices {
            let v = self
                .vertex_id(label)
                .ok_or_else(|| Error::domain(format!("unknown vertex `{label}` in subtree")))?;
            members[v] = true;
        }
        // Connectivity of the induced subgraph.
        let start = members.iter().position(|&m| m).expect("nonempty");
        let mut seen = vec![false; members.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.incident[v] {
                let w = other_end(&self.edges[e], v);
                if members[w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if members.iter().zip(&seen).any(|(m, s)| *m && !s) {
            return Err(Error::domain("subtree vertices do not induce a connected subtree"));
        }
        Ok(members)
    }
}

fn other_end(e: &TreeEdge, v: usize) -> usize {
    if e.from == v {
        e.to
    } else {
        e.from
    }
}

impl HadamardSpace for MetricTree {
    type Point = TreePoint;

    fn name(&self) -> &'static str {
        "tree"
    }

    fn tolerance(&self) -> f64 {
        EPS_GEOM_TREE
    }

    fn validate(&self, p: &TreePoint) -> Result<()> {
        self.check_point(p)
    }

    fn distance(&self, x: &TreePoint, y: &TreePoint) -> f64 {
        if let (
            TreePoint::Edge { edge: ex, offset: ox },
            TreePoint::Edge { edge: ey, offset: oy },
        ) = (*x, *y)
        {
            if ex == ey {
                return (ox - oy).abs();
            }
        }
        let mut best = f64::INFINITY;
        for &(u, cu) in &self.exits(x) {
            for &(w, cw) in &self.exits(y) {
                best = best.min(cu + self.vertex_distance(u, w) + cw);
            }
        }
        best
    }

    fn geodesic_point(&self, x: &TreePoint, y: &TreePoint, s: f64) -> TreePoint {
        if s <= 0.0 {
            return *x;
        }
        let path = self.path(x, y);
        if s >= path.length {
            return *y;
        }
        let mut remaining = s;
        for seg in &path.segments {
            let len = seg.length();
            if remaining <= len {
                let dir = (seg.end - seg.start).signum();
                return self.canonical(seg.edge, seg.start + dir * remaining);
            }
            remaining -= len;
        }
        *y
    }

    fn extend_geodesic(&self, from: &TreePoint, through: &TreePoint, t: f64) -> Option<TreePoint> {
        if from == through {
            return None;
        }
        let back = self.germ(through, from)?;
        let forward = self
            .germs_at(through)
            .into_iter()
            .find(|g| *g != back)?;
        Some(self.step_along(through, forward, t))
    }

    /// Directions at a point either share their first edge (angle 0) or
    /// leave along different edges (angle π).
    fn exact_angle(&self, p: &TreePoint, x: &TreePoint, y: &TreePoint) -> Option<f64> {
        let gx = self.germ(p, x)?;
        let gy = self.germ(p, y)?;
        Some(if gx == gy { 0.0 } else { std::f64::consts::PI })
    }

    fn project(&self, set: &ConvexSet<TreePoint>, x: &TreePoint) -> Result<TreePoint> {
        if let Some(p) = project_common(self, set, x) {
            return p;
        }
        match set {
            ConvexSet::Segment(a, b) => {
                let dab = self.distance(a, b);
                let s = 0.5 * (self.distance(a, x) + dab - self.distance(b, x));
                Ok(self.geodesic_point(a, b, s.clamp(0.0, dab)))
            }
            ConvexSet::Subtree { vertices } => {
                let members = self.subtree_members(vertices)?;
                if self.in_subtree(x, &members) {
                    return Ok(*x);
                }
                // Outside the subtree the nearest point is the vertex where
                // the path from x first enters it.
                let (mut best, mut best_d) = (None, f64::INFINITY);
                for (v, _) in members.iter().enumerate().filter(|(_, m)| **m) {
                    let d = self.distance(x, &TreePoint::Vertex(v));
                    if d < best_d {
                        best_d = d;
                        best = Some(v);
                    }
                }
                Ok(TreePoint::Vertex(best.expect("nonempty subtree")))
            }
            other => Err(mismatch("tree", other)),
        }
    }

    /// Exact minimization edge by edge: a geodesically convex objective is
    /// convex along every edge, so golden-section search per edge followed
    /// by a global comparison finds the minimizer.
    fn minimize_convex(
        &self,
        objective: &dyn Fn(&TreePoint) -> f64,
        start: &TreePoint,
        _scale: f64,
        _hints: &[TreePoint],
    ) -> Result<TreePoint> {
        let mut best = *start;
        let mut best_f = objective(start);
        for (i, e) in self.edges.iter().enumerate() {
            let line = |t: f64| objective(&self.canonical(i, t));
            let (t, f) = golden_section(line, 0.0, e.length, 1e-13 * e.length.max(1.0));
            if f < best_f {
                best_f = f;
                best = self.canonical(i, t);
            }
            for (v, fv) in [(e.from, line(0.0)), (e.to, line(e.length))] {
                if fv < best_f {
                    best_f = fv;
                    best = TreePoint::Vertex(v);
                }
            }
        }
        if !best_f.is_finite() {
            return Err(Error::numeric(
                "objective is infinite everywhere on the tree",
                None,
            ));
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn star() -> MetricTree {
        MetricTree::from_edge_list("c a 2\nc b 3\nc d 1.5\n").unwrap()
    }

    /// Exhaustive path enumeration: DFS over simple vertex paths.
    fn brute_vertex_distance(t: &MetricTree, u: usize, v: usize) -> f64 {
        fn dfs(t: &MetricTree, cur: usize, goal: usize, seen: &mut Vec<bool>, acc: f64, best: &mut f64) {
            if cur == goal {
                *best = best.min(acc);
                return;
            }
            for &e in &t.incident[cur] {
                let w = other_end(&t.edges[e], cur);
                if !seen[w] {
                    seen[w] = true;
                    dfs(t, w, goal, seen, acc + t.edges[e].length, best);
                    seen[w] = false;
                }
            }
        }
        let mut seen = vec![false; t.vertex_count()];
        seen[u] = true;
        let mut best = f64::INFINITY;
        dfs(t, u, v, &mut seen, 0.0, &mut best);
        best
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(MetricTree::from_edge_list("a b").is_err());
        assert!(MetricTree::from_edge_list("a b x").is_err());
        assert!(MetricTree::from_edge_list("a b -1").is_err());
        assert!(MetricTree::from_edge_list("a b 1\nb c 1\nc a 1").is_err());
        assert!(MetricTree::from_edge_list("a b 1\nc d 1").is_err());
        assert!(MetricTree::from_edge_list("# only a comment\n").is_err());
        assert!(MetricTree::from_edge_list("# comment\na b 1\n\nb c 2\n").is_ok());
    }

    #[test]
    fn locate_examples() {
        let t = star();
        let a = t.vertex_id("a").unwrap();
        let b = t.vertex("b").unwrap();
        let ca = t.edge_between(t.vertex_id("c").unwrap(), a).unwrap();
        let mid = t.point_on_edge(ca, 1.0).unwrap();
        let path = t.locate(&mid, &b).unwrap();
        assert_abs_diff_eq!(path.length, 4.0);
        assert_abs_diff_eq!(t.distance(&mid, &b), 4.0);

        let same = t.locate(&b, &b).unwrap();
        assert!(same.segments.is_empty() && same.length == 0.0);

        let p = t.point_on_edge(ca, 0.5).unwrap();
        let q = t.point_on_edge(ca, 1.5).unwrap();
        assert_abs_diff_eq!(t.locate(&p, &q).unwrap().length, 1.0);

        assert!(t.locate(&TreePoint::Edge { edge: 9, offset: 0.1 }, &b).is_err());
        assert!(t.point_on_edge(ca, 7.0).is_err());
    }

    #[test]
    fn distances_match_path_enumeration() {
        let t = MetricTree::from_edge_list(
            "r a 1.0\nr b 2.5\na c 0.7\na d 1.1\nb e 0.4\nb f 3.0\nf g 0.9\n",
        )
        .unwrap();
        for u in 0..t.vertex_count() {
            for v in 0..t.vertex_count() {
                assert_abs_diff_eq!(
                    t.vertex_distance(u, v),
                    brute_vertex_distance(&t, u, v),
                    epsilon = 1e-12
                );
                let path = t.locate(&TreePoint::Vertex(u), &TreePoint::Vertex(v)).unwrap();
                assert_abs_diff_eq!(path.length, t.vertex_distance(u, v), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn canonical_points_snap_to_vertices() {
        let t = star();
        let e = 0;
        assert_eq!(t.point_on_edge(e, 0.0).unwrap(), TreePoint::Vertex(t.edges[e].from));
        assert_eq!(
            t.point_on_edge(e, t.edges[e].length).unwrap(),
            TreePoint::Vertex(t.edges[e].to)
        );
    }

    #[test]
    fn branch_angles() {
        let t = star();
        let c = t.vertex("c").unwrap();
        let a = t.vertex("a").unwrap();
        let b = t.vertex("b").unwrap();
        assert_eq!(t.exact_angle(&c, &a, &b), Some(std::f64::consts::PI));
        let ca = t.edge_between(0, t.vertex_id("a").unwrap()).unwrap();
        let half = t.point_on_edge(ca, 1.0).unwrap();
        assert_eq!(t.exact_angle(&c, &a, &half), Some(0.0));
    }

    #[test]
    fn extension_stops_at_leaves() {
        let t = star();
        let a = t.vertex("a").unwrap();
        let c = t.vertex("c").unwrap();
        assert!(t.extend_geodesic(&c, &a, 1.0).is_none());
        let beyond = t.extend_geodesic(&a, &c, 0.5).unwrap();
        assert_abs_diff_eq!(t.distance(&a, &beyond), 2.5);
    }

    #[test]
    fn subtree_projection() {
        let t = MetricTree::from_edge_list("r a 1\nr b 2\nb e 1\nb f 3\n").unwrap();
        let set = ConvexSet::Subtree {
            vertices: vec!["r".into(), "b".into(), "f".into()],
        };
        let a = t.vertex("a").unwrap();
        assert_eq!(t.project(&set, &a).unwrap(), t.vertex("r").unwrap());
        let e = t.vertex("e").unwrap();
        assert_eq!(t.project(&set, &e).unwrap(), t.vertex("b").unwrap());
        let bf = t.edge_between(t.vertex_id("b").unwrap(), t.vertex_id("f").unwrap()).unwrap();
        let inside = t.point_on_edge(bf, 1.0).unwrap();
        assert_eq!(t.project(&set, &inside).unwrap(), inside);
        let single = ConvexSet::Subtree {
            vertices: vec!["e".into()],
        };
        for p in [a, inside, t.vertex("f").unwrap()] {
            assert_eq!(t.project(&single, &p).unwrap(), e);
        }
        let disconnected = ConvexSet::Subtree {
            vertices: vec!["a".into(), "e".into()],
        };
        assert!(t.project(&disconnected, &a).is_err());
    }
}
