//! Schreier induced graphs on tabloids, projection matrices between covering partitions,
//! and the block structure of the coefficient-space dynamics.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::partition::{
    cover_move, enumerate_partitions, enumerate_tabloids, Category, CoverMove, Partition, Tabloid,
};
use crate::scalar::{self, Scalar};
use nalgebra::DMatrix;
use std::collections::{BTreeMap, HashMap};

/// Induced graph of a partition: vertices are tabloids (lexicographic order), and base edge
/// `{j,l}` joins `t` to the tabloid with symbols `j` and `l` exchanged whenever
/// `r_j != r_l`. Induced edges inherit the weight and orbit label of their base edge.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedGraph<T> {
    partition: Partition,
    vertices: Vec<Tabloid>,
    graph: WeightedGraph<T>,
    generators: Vec<usize>,
}

impl<T: Scalar> InducedGraph<T> {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn vertices(&self) -> &[Tabloid] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn graph(&self) -> &WeightedGraph<T> {
        &self.graph
    }

    /// Base edge index that generated each induced edge.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn laplacian(&self) -> DMatrix<T> {
        self.graph.laplacian()
    }
}

fn index_words(tabloids: &[Tabloid]) -> HashMap<&[usize], usize> {
    tabloids
        .iter()
        .enumerate()
        .map(|(i, t)| (t.yamanouchi.as_slice(), i))
        .collect()
}

pub fn induced_graph<T: Scalar>(g: &WeightedGraph<T>, n: &Partition) -> Result<InducedGraph<T>> {
    if n.n_total() != g.n_vertices() {
        return Err(Error::Domain(format!(
            "partition {n} sums to {} but the graph has {} vertices",
            n.n_total(),
            g.n_vertices()
        )));
    }
    let vertices = enumerate_tabloids(n);
    let index = index_words(&vertices);
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut orbits = Vec::new();
    let mut generators = Vec::new();
    for (k, (&(j, l), (&w, &o))) in g
        .edges()
        .iter()
        .zip(g.weights().iter().zip(g.orbits()))
        .enumerate()
    {
        for (a, t) in vertices.iter().enumerate() {
            let word = &t.yamanouchi;
            if word[j] == word[l] {
                continue;
            }
            let mut swapped = word.clone();
            swapped.swap(j, l);
            let b = index[swapped.as_slice()];
            if a < b {
                edges.push((a, b));
                weights.push(w);
                orbits.push(o);
                generators.push(k);
            }
        }
    }
    let graph = WeightedGraph::new(vertices.len(), edges, weights, orbits)?;
    Ok(InducedGraph {
        partition: n.clone(),
        vertices,
        graph,
        generators,
    })
}

/// Zero/one map from the tabloids of a dominated partition `n'` onto those of its cover
/// `n`: entry `(a,b)` is one iff relabeling one row-`r` symbol of `b` as row `m` gives `a`,
/// where the cover moves a box from row `m` of `n` to row `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionMatrix {
    pub from_partition: Partition,
    pub to_partition: Partition,
    pub cover: CoverMove,
    rows: usize,
    cols: usize,
    ones: Vec<(usize, usize)>,
}

impl ProjectionMatrix {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn category(&self) -> Category {
        self.cover.category
    }

    /// Positions of the nonzero entries, row-major.
    pub fn ones(&self) -> &[(usize, usize)] {
        &self.ones
    }

    pub fn to_matrix<T: Scalar>(&self) -> DMatrix<T> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(a, b) in &self.ones {
            m[(a, b)] = T::one();
        }
        m
    }

    pub fn row_sums(&self) -> Vec<usize> {
        let mut s = vec![0; self.rows];
        for &(a, _) in &self.ones {
            s[a] += 1;
        }
        s
    }

    pub fn col_sums(&self) -> Vec<usize> {
        let mut s = vec![0; self.cols];
        for &(_, b) in &self.ones {
            s[b] += 1;
        }
        s
    }
}

pub fn projection_matrix(n: &Partition, n_prime: &Partition) -> Result<ProjectionMatrix> {
    let cover = cover_move(n, n_prime)?.ok_or_else(|| {
        Error::Domain(format!(
            "{n} does not cover {n_prime} in the dominance order"
        ))
    })?;
    let rows_t = enumerate_tabloids(n);
    let cols_t = enumerate_tabloids(n_prime);
    let index = index_words(&rows_t);
    let mut ones = Vec::new();
    for (b, t) in cols_t.iter().enumerate() {
        for (i, &row) in t.yamanouchi.iter().enumerate() {
            if row == cover.to_row {
                let mut merged = t.yamanouchi.clone();
                merged[i] = cover.from_row;
                ones.push((index[merged.as_slice()], b));
            }
        }
    }
    ones.sort_unstable();
    Ok(ProjectionMatrix {
        from_partition: n.clone(),
        to_partition: n_prime.clone(),
        cover,
        rows: rows_t.len(),
        cols: cols_t.len(),
        ones,
    })
}

/// Max-norm of `L_n P - P L_{n'}`.
pub fn verify_intertwining<T: Scalar>(
    g: &WeightedGraph<T>,
    n: &Partition,
    n_prime: &Partition,
) -> Result<T> {
    let p = projection_matrix(n, n_prime)?;
    let ln = induced_graph(g, n)?.laplacian();
    let lp = induced_graph(g, n_prime)?.laplacian();
    let pm = p.to_matrix::<T>();
    let diff = &ln * &pm - &pm * &lp;
    Ok(diff
        .iter()
        .map(|&x| scalar::abs(x))
        .fold(T::zero(), |m, x| if x > m { x } else { m }))
}

/// One block of the coefficient-space Laplacian: `multiplicity` identical components, each a
/// copy of `induced`.
#[derive(Debug, Clone)]
pub struct Block<T> {
    pub partition: Partition,
    pub multiplicity: u128,
    pub induced: InducedGraph<T>,
}

/// Largest coefficient space enumerated explicitly when counting components.
pub const BRUTE_FORCE_LIMIT: usize = 4096;

/// Blocks for every partition of `N` with at most `d²` rows.
pub fn quantum_block_structure<T: Scalar>(g: &WeightedGraph<T>, d: usize) -> Result<Vec<Block<T>>> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "qudit dimension must be >= 2, got {d}"
        )));
    }
    let n = g.n_vertices();
    let symbols = d * d;
    let size = symbols.checked_pow(n as u32);
    let brute = match size {
        Some(s) if s <= BRUTE_FORCE_LIMIT => Some(multiplicity_brute_force(n, d)),
        _ => None,
    };
    let mut out = Vec::new();
    for part in enumerate_partitions(n)? {
        if part.len() > symbols {
            continue;
        }
        let multiplicity = match &brute {
            Some(table) => table.get(&part).copied().unwrap_or(0),
            None => multiplicity_formula(&part, d),
        };
        out.push(Block {
            induced: induced_graph(g, &part)?,
            partition: part,
            multiplicity,
        });
    }
    Ok(out)
}

/// Number of `S_N`-orbits of coefficient words in `[d²]^N`, grouped by the partition formed
/// by their symbol multiplicities.
pub fn multiplicity_brute_force(n_sites: usize, d: usize) -> BTreeMap<Partition, u128> {
    let symbols = d * d;
    let mut out = BTreeMap::new();
    let total = symbols.pow(n_sites as u32);
    let mut word = vec![0usize; n_sites];
    for code in 0..total {
        let mut c = code;
        for slot in word.iter_mut().rev() {
            *slot = c % symbols;
            c /= symbols;
        }
        // One representative per orbit: the non-decreasing word.
        if word.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let part = word_shape(&word);
        *out.entry(part).or_insert(0) += 1;
    }
    out
}

/// Shape of a coefficient word: its symbol multiplicities sorted decreasingly.
pub fn word_shape(word: &[usize]) -> Partition {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &s in word {
        *counts.entry(s).or_insert(0) += 1;
    }
    let mut parts: Vec<usize> = counts.into_values().collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Partition::new(parts).expect("non-empty word")
}

/// `(d²)! / ((d²-K)! · Π_ℓ m_ℓ!)`, with `m_ℓ` the number of rows of length `ℓ`.
pub fn multiplicity_formula(n: &Partition, d: usize) -> u128 {
    let symbols = (d * d) as u128;
    let k = n.len() as u128;
    if k > symbols {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc *= symbols - i;
    }
    let mut same: BTreeMap<usize, u128> = BTreeMap::new();
    for &p in n.parts() {
        *same.entry(p).or_insert(0) += 1;
    }
    for m in same.values() {
        for i in 2..=*m {
            acc /= i;
        }
    }
    acc
}
