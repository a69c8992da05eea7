//! Weighted undirected graphs, Laplacians, the topology catalog and graph I/O.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Display, Write as _};

/// Simple undirected graph with nonnegative edge weights and an orbit (weight-class) label
/// per edge. Edges are stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedGraph<T> {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<T>,
    orbits: Vec<i32>,
}

#[derive(Deserialize)]
struct RawGraph<T> {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<T>,
    orbits: Vec<i32>,
}

impl<T: Scalar> WeightedGraph<T> {
    pub fn new(
        n_vertices: usize,
        edges: Vec<(usize, usize)>,
        weights: Vec<T>,
        orbits: Vec<i32>,
    ) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::Domain(
                "n_vertices: graph needs at least one vertex".into(),
            ));
        }
        if weights.len() != edges.len() {
            return Err(Error::Domain(format!(
                "weights: {} entries for {} edges",
                weights.len(),
                edges.len()
            )));
        }
        if orbits.len() != edges.len() {
            return Err(Error::Domain(format!(
                "orbits: {} entries for {} edges",
                orbits.len(),
                edges.len()
            )));
        }
        let mut seen = HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (k, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(Error::Domain(format!(
                    "edges[{k}]: self-loop at vertex {u}"
                )));
            }
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::Domain(format!(
                    "edges[{k}]: ({u},{v}) outside 0..{n_vertices}"
                )));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::Domain(format!(
                    "edges[{k}]: duplicate edge ({u},{v})"
                )));
            }
            normalized.push(e);
        }
        for (k, w) in weights.iter().enumerate() {
            if *w < T::zero() {
                return Err(Error::Domain(format!(
                    "weights[{k}]: negative weight {w:?}"
                )));
            }
        }
        Ok(Self {
            n_vertices,
            edges: normalized,
            weights,
            orbits,
        })
    }

    /// All weights one.
    pub fn unit(n_vertices: usize, edges: Vec<(usize, usize)>, orbits: Vec<i32>) -> Result<Self> {
        let weights = vec![T::one(); edges.len()];
        Self::new(n_vertices, edges, weights, orbits)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn orbits(&self) -> &[i32] {
        &self.orbits
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_weight(&self) -> T {
        self.weights
            .iter()
            .copied()
            .fold(T::zero(), |m, w| if w > m { w } else { m })
    }

    /// Largest weighted degree.
    pub fn max_degree(&self) -> T {
        let mut deg = vec![T::zero(); self.n_vertices];
        for (&(u, v), &w) in self.edges.iter().zip(&self.weights) {
            deg[u] += w;
            deg[v] += w;
        }
        deg.into_iter()
            .fold(T::zero(), |m, d| if d > m { d } else { m })
    }

    /// Distinct orbit labels with their edge counts, ordered by label.
    pub fn orbit_sizes(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for &o in &self.orbits {
            *out.entry(o).or_insert(0) += 1;
        }
        out
    }

    /// Copy with new per-edge weights.
    pub fn with_weights(&self, weights: Vec<T>) -> Result<Self> {
        Self::new(
            self.n_vertices,
            self.edges.clone(),
            weights,
            self.orbits.clone(),
        )
    }

    /// Copy with every edge weighted by the value of its orbit.
    pub fn with_orbit_weights(&self, by_orbit: &BTreeMap<i32, T>) -> Result<Self> {
        let weights = self
            .orbits
            .iter()
            .map(|o| {
                by_orbit
                    .get(o)
                    .copied()
                    .ok_or_else(|| Error::Domain(format!("no weight given for orbit {o}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_weights(weights)
    }

    /// Copy with new orbit labels.
    pub fn with_orbits(&self, orbits: Vec<i32>) -> Result<Self> {
        Self::new(
            self.n_vertices,
            self.edges.clone(),
            self.weights.clone(),
            orbits,
        )
    }

    /// Vertex `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_vertices {
            return Err(Error::Domain(
                "permutation length differs from vertex count".into(),
            ));
        }
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| (perm[u], perm[v]))
            .collect();
        Self::new(
            self.n_vertices,
            edges,
            self.weights.clone(),
            self.orbits.clone(),
        )
    }

    pub fn map_weights<U: Scalar>(&self, f: impl Fn(T) -> U) -> WeightedGraph<U> {
        WeightedGraph {
            n_vertices: self.n_vertices,
            edges: self.edges.clone(),
            weights: self.weights.iter().map(|&w| f(w)).collect(),
            orbits: self.orbits.clone(),
        }
    }

    /// Connectivity by traversal over positive-weight edges.
    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for (&(u, v), &w) in self.edges.iter().zip(&self.weights) {
            if w > T::zero() {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.n_vertices
    }

    /// `L = D - A`.
    pub fn laplacian(&self) -> DMatrix<T> {
        let n = self.n_vertices;
        let mut l = DMatrix::<T>::zeros(n, n);
        for (&(u, v), &w) in self.edges.iter().zip(&self.weights) {
            l[(u, u)] += w;
            l[(v, v)] += w;
            l[(u, v)] -= w;
            l[(v, u)] -= w;
        }
        l
    }

    /// Laplacian of the edges in one orbit with unit weights.
    pub fn orbit_laplacian(&self, orbit: i32) -> DMatrix<T> {
        let n = self.n_vertices;
        let mut l = DMatrix::<T>::zeros(n, n);
        for (&(u, v), &o) in self.edges.iter().zip(&self.orbits) {
            if o == orbit {
                l[(u, u)] += T::one();
                l[(v, v)] += T::one();
                l[(u, v)] -= T::one();
                l[(v, u)] -= T::one();
            }
        }
        l
    }
}

impl<T: Scalar + Display> WeightedGraph<T> {
    /// Graphviz text; one `u -- v` line per edge.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for v in 0..self.n_vertices {
            let _ = writeln!(s, "  {v};");
        }
        for ((&(u, v), w), o) in self.edges.iter().zip(&self.weights).zip(&self.orbits) {
            let _ = writeln!(s, "  {u} -- {v} [label=\"{w}\", orbit={o}];");
        }
        s.push_str("}\n");
        s
    }
}

impl<T: Scalar + Serialize> WeightedGraph<T> {
    /// JSON document `{n_vertices, edges, weights, orbits}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization cannot fail")
    }
}

impl<T: Scalar + DeserializeOwned> WeightedGraph<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawGraph<T> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
        Self::new(raw.n_vertices, raw.edges, raw.weights, raw.orbits)
            .map_err(|e| Error::Parse(format!("graph JSON: {e}")))
    }
}

/// Cartesian product. Vertex `(u1, u2)` is `u1 * n2 + u2`, so `L = L1 ⊗ I + I ⊗ L2`.
/// Orbit labels are copied from the factor each edge comes from.
pub fn cartesian_product<T: Scalar>(
    g1: &WeightedGraph<T>,
    g2: &WeightedGraph<T>,
) -> WeightedGraph<T> {
    let (n1, n2) = (g1.n_vertices, g2.n_vertices);
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut orbits = Vec::new();
    for ((&(a, b), &w), &o) in g1.edges.iter().zip(&g1.weights).zip(&g1.orbits) {
        for u2 in 0..n2 {
            edges.push((a * n2 + u2, b * n2 + u2));
            weights.push(w);
            orbits.push(o);
        }
    }
    for ((&(a, b), &w), &o) in g2.edges.iter().zip(&g2.weights).zip(&g2.orbits) {
        for u1 in 0..n1 {
            edges.push((u1 * n2 + a, u1 * n2 + b));
            weights.push(w);
            orbits.push(o);
        }
    }
    WeightedGraph::new(n1 * n2, edges, weights, orbits).expect("product of valid graphs")
}

/// Catalog topologies. Vertices are 0-based; the layout of each family is given on its
/// variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TopologySpec {
    /// `0 - 1 - ... - n-1`. Even `n`: the middle edge is orbit 0 and orbit `j` sits `j`
    /// edges away from it. Odd `n`: orbit `j` is the pair of edges at distance `j` from the
    /// middle vertex, counting from 1.
    Path { n: usize },
    /// Ring `i - (i+1) mod n`, single orbit 0.
    Cycle { n: usize },
    /// Center 0, leaves `1..n`, orbit 0.
    Star { n: usize },
    /// `K_n`, orbit 0.
    Complete { n: usize },
    /// Four vertices: rim `0-1-2-3-0` (orbit 1) plus the chord `0-2` (orbit 0).
    Paw,
    /// Clique on `0..p` plus bridging vertex `p` (clique edges orbit -1, edges to `p`
    /// orbit 0), tail `p+1..=p+q` with orbit `j` on the `j`-th tail edge.
    Lollipop { p: usize, q: usize },
    /// Core `K_p` on `0..p` (orbit 0); branch of core vertex `c` is
    /// `p + c*q .. p + (c+1)*q`, orbit `j` on its `j`-th edge.
    CcsStar { p: usize, q: usize },
    /// Core `K_p` (orbit 0) with two branches per core vertex: lengths `q1` (orbits
    /// `-1..=-q1`, vertices `p + c*q1 ..`) and `q2` (orbits `1..=q2`, vertices
    /// `p + p*q1 + c*q2 ..`).
    CcsTwoBranch { p: usize, q1: usize, q2: usize },
    /// Center 0 and `p` paths of `q` vertices; branch `b` is `1 + b*q .. 1 + (b+1)*q`,
    /// orbit `j` on the `j`-th edge from the center.
    SymmetricStar { p: usize, q: usize },
    /// Center 0, leaves `1..=p` (orbit 0) and tail `p+1..=p+q` (orbit `j` on the `j`-th
    /// tail edge).
    Palm { p: usize, q: usize },
    /// `K_{n1+n2}` and `K_{n2+n3}` sharing the middle block. Blocks A = `0..n1`,
    /// B = next `n2`, C = last `n3`; orbits -2 (A-A), -1 (A-B), 0 (B-B), 1 (B-C), 2 (C-C).
    CoupledComplete { n1: usize, n2: usize, n3: usize },
    /// Product of the factors; edges from factor `i` carry orbit `i + 1`.
    CartesianProduct { factors: Vec<TopologySpec> },
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(msg()))
    }
}

impl TopologySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TopologySpec::Path { .. } => "path",
            TopologySpec::Cycle { .. } => "cycle",
            TopologySpec::Star { .. } => "star",
            TopologySpec::Complete { .. } => "complete",
            TopologySpec::Paw => "paw",
            TopologySpec::Lollipop { .. } => "lollipop",
            TopologySpec::CcsStar { .. } => "ccs_star",
            TopologySpec::CcsTwoBranch { .. } => "ccs_two_branch",
            TopologySpec::SymmetricStar { .. } => "symmetric_star",
            TopologySpec::Palm { .. } => "palm",
            TopologySpec::CoupledComplete { .. } => "coupled_complete",
            TopologySpec::CartesianProduct { .. } => "cartesian_product",
        }
    }

    pub fn build<T: Scalar>(&self) -> Result<WeightedGraph<T>> {
        build_topology(self)
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Path { n } => write!(f, "path(n={n})"),
            TopologySpec::Cycle { n } => write!(f, "cycle(n={n})"),
            TopologySpec::Star { n } => write!(f, "star(n={n})"),
            TopologySpec::Complete { n } => write!(f, "complete(n={n})"),
            TopologySpec::Paw => write!(f, "paw"),
            TopologySpec::Lollipop { p, q } => write!(f, "lollipop(p={p},q={q})"),
            TopologySpec::CcsStar { p, q } => write!(f, "ccs_star(p={p},q={q})"),
            TopologySpec::CcsTwoBranch { p, q1, q2 } => {
                write!(f, "ccs_two_branch(p={p},q1={q1},q2={q2})")
            }
            TopologySpec::SymmetricStar { p, q } => write!(f, "symmetric_star(p={p},q={q})"),
            TopologySpec::Palm { p, q } => write!(f, "palm(p={p},q={q})"),
            TopologySpec::CoupledComplete { n1, n2, n3 } => {
                write!(f, "coupled_complete(n1={n1},n2={n2},n3={n3})")
            }
            TopologySpec::CartesianProduct { factors } => {
                let inner: Vec<String> = factors.iter().map(|x| x.to_string()).collect();
                write!(f, "cartesian_product[{}]", inner.join(" x "))
            }
        }
    }
}

struct Builder {
    edges: Vec<(usize, usize)>,
    orbits: Vec<i32>,
}

impl Builder {
    fn new() -> Self {
        Self {
            edges: Vec::new(),
            orbits: Vec::new(),
        }
    }
    fn add(&mut self, u: usize, v: usize, orbit: i32) {
        self.edges.push((u, v));
        self.orbits.push(orbit);
    }
    fn clique(&mut self, vertices: &[usize], orbit: i32) {
        for (i, &a) in vertices.iter().enumerate() {
            for &b in &vertices[i + 1..] {
                self.add(a, b, orbit);
            }
        }
    }
    /// Path hanging off `root` through `first..first+len`, orbit `sign * j` on edge `j`.
    fn tail(&mut self, root: usize, first: usize, len: usize, sign: i32) {
        let mut prev = root;
        for j in 1..=len {
            let v = first + j - 1;
            self.add(prev, v, sign * j as i32);
            prev = v;
        }
    }
    fn finish<T: Scalar>(self, n: usize) -> Result<WeightedGraph<T>> {
        WeightedGraph::unit(n, self.edges, self.orbits)
    }
}

/// Builds a catalog topology with unit weights.
pub fn build_topology<T: Scalar>(spec: &TopologySpec) -> Result<WeightedGraph<T>> {
    let mut b = Builder::new();
    match *spec {
        TopologySpec::Path { n } => {
            need(n >= 2, || format!("path needs n >= 2, got {n}"))?;
            for i in 0..n - 1 {
                let orbit = if n % 2 == 0 {
                    let c = n / 2 - 1;
                    i.abs_diff(c)
                } else {
                    let c = n / 2;
                    if i < c {
                        c - i
                    } else {
                        i - c + 1
                    }
                };
                b.add(i, i + 1, orbit as i32);
            }
            b.finish(n)
        }
        TopologySpec::Cycle { n } => {
            need(n >= 3, || format!("cycle needs n >= 3, got {n}"))?;
            for i in 0..n {
                b.add(i, (i + 1) % n, 0);
            }
            b.finish(n)
        }
        TopologySpec::Star { n } => {
            need(n >= 2, || format!("star needs n >= 2, got {n}"))?;
            for i in 1..n {
                b.add(0, i, 0);
            }
            b.finish(n)
        }
        TopologySpec::Complete { n } => {
            need(n >= 1, || "complete graph needs n >= 1".to_string())?;
            b.clique(&(0..n).collect::<Vec<_>>(), 0);
            b.finish(n)
        }
        TopologySpec::Paw => {
            for i in 0..4 {
                b.add(i, (i + 1) % 4, 1);
            }
            b.add(0, 2, 0);
            b.finish(4)
        }
        TopologySpec::Lollipop { p, q } => {
            need(p >= 2 && q >= 1, || {
                format!("lollipop needs p >= 2, q >= 1, got p={p}, q={q}")
            })?;
            b.clique(&(0..p).collect::<Vec<_>>(), -1);
            for i in 0..p {
                b.add(i, p, 0);
            }
            b.tail(p, p + 1, q, 1);
            b.finish(p + 1 + q)
        }
        TopologySpec::CcsStar { p, q } => {
            need(p >= 2 && q >= 1, || {
                format!("ccs_star needs p >= 2, q >= 1, got p={p}, q={q}")
            })?;
            b.clique(&(0..p).collect::<Vec<_>>(), 0);
            for c in 0..p {
                b.tail(c, p + c * q, q, 1);
            }
            b.finish(p * (q + 1))
        }
        TopologySpec::CcsTwoBranch { p, q1, q2 } => {
            need(p >= 2 && q1 >= 1 && q2 >= 1, || {
                format!(
                    "ccs_two_branch needs p >= 2, q1 >= 1, q2 >= 1, got p={p}, q1={q1}, q2={q2}"
                )
            })?;
            b.clique(&(0..p).collect::<Vec<_>>(), 0);
            for c in 0..p {
                b.tail(c, p + c * q1, q1, -1);
            }
            for c in 0..p {
                b.tail(c, p + p * q1 + c * q2, q2, 1);
            }
            b.finish(p * (1 + q1 + q2))
        }
        TopologySpec::SymmetricStar { p, q } => {
            need(p >= 2 && q >= 1, || {
                format!("symmetric_star needs p >= 2, q >= 1, got p={p}, q={q}")
            })?;
            for br in 0..p {
                b.tail(0, 1 + br * q, q, 1);
            }
            b.finish(1 + p * q)
        }
        TopologySpec::Palm { p, q } => {
            need(p >= 1 && q >= 1, || {
                format!("palm needs p >= 1, q >= 1, got p={p}, q={q}")
            })?;
            for i in 1..=p {
                b.add(0, i, 0);
            }
            b.tail(0, p + 1, q, 1);
            b.finish(1 + p + q)
        }
        TopologySpec::CoupledComplete { n1, n2, n3 } => {
            need(n1 >= 1 && n2 >= 1 && n3 >= 1, || {
                format!("coupled_complete needs positive blocks, got ({n1},{n2},{n3})")
            })?;
            let a: Vec<usize> = (0..n1).collect();
            let bb: Vec<usize> = (n1..n1 + n2).collect();
            let c: Vec<usize> = (n1 + n2..n1 + n2 + n3).collect();
            b.clique(&a, -2);
            for &x in &a {
                for &y in &bb {
                    b.add(x, y, -1);
                }
            }
            b.clique(&bb, 0);
            for &x in &bb {
                for &y in &c {
                    b.add(x, y, 1);
                }
            }
            b.clique(&c, 2);
            b.finish(n1 + n2 + n3)
        }
        TopologySpec::CartesianProduct { ref factors } => {
            need(!factors.is_empty(), || {
                "cartesian product needs at least one factor".into()
            })?;
            let mut acc: Option<WeightedGraph<T>> = None;
            for (i, f) in factors.iter().enumerate() {
                let g: WeightedGraph<T> = build_topology(f)?;
                let g = g.with_orbits(vec![i as i32 + 1; g.edge_count()])?;
                acc = Some(match acc {
                    None => g,
                    Some(prev) => cartesian_product(&prev, &g),
                });
            }
            Ok(acc.expect("non-empty factor list"))
        }
    }
}

/// Catalog members with at most `max_vertices` vertices; used by sweeps and tests.
pub fn catalog_up_to(max_vertices: usize) -> Vec<TopologySpec> {
    let mut out = Vec::new();
    for n in 2..=max_vertices {
        out.push(TopologySpec::Path { n });
        out.push(TopologySpec::Star { n });
        out.push(TopologySpec::Complete { n });
        if n >= 3 {
            out.push(TopologySpec::Cycle { n });
        }
    }
    if max_vertices >= 4 {
        out.push(TopologySpec::Paw);
    }
    for p in 1..=max_vertices {
        for q in 1..=max_vertices {
            if p >= 2 && p + 1 + q <= max_vertices {
                out.push(TopologySpec::Lollipop { p, q });
            }
            if p >= 2 && p * (q + 1) <= max_vertices {
                out.push(TopologySpec::CcsStar { p, q });
            }
            if p >= 2 && p * q < max_vertices {
                out.push(TopologySpec::SymmetricStar { p, q });
            }
            if 1 + p + q <= max_vertices {
                out.push(TopologySpec::Palm { p, q });
            }
            for q2 in 1..=max_vertices {
                if p >= 2 && p * (1 + q + q2) <= max_vertices {
                    out.push(TopologySpec::CcsTwoBranch { p, q1: q, q2 });
                }
            }
        }
    }
    for n1 in 1..=max_vertices {
        for n2 in 1..=max_vertices {
            if 2 * n1 + n2 <= max_vertices {
                out.push(TopologySpec::CoupledComplete { n1, n2, n3: n1 });
            }
        }
    }
    out
}
