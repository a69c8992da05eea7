//! Integer partitions, dominance order, Hasse covers and tabloids (Yamanouchi words).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A partition of `N`: non-increasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::EmptyInput("partition has no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::Domain(format!(
                "partition {parts:?} has a zero part"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!(
                "partition {parts:?} is not non-increasing"
            )));
        }
        Ok(Self { parts })
    }

    /// The single-row partition `(n)`.
    pub fn trivial(n: usize) -> Self {
        Self { parts: vec![n] }
    }

    /// `(n-1, 1)`, whose induced graph is the base graph.
    pub fn standard(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("(N-1,1) needs N >= 2, got {n}")));
        }
        Ok(Self {
            parts: vec![n - 1, 1],
        })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of rows `K`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn n_total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Part `i` (0-based), zero past the last row.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.len() == 1
    }

    /// Number of tabloids `N!/(n_1!...n_K!)`.
    pub fn tabloid_count(&self) -> u128 {
        let mut remaining = self.n_total() as u128;
        let mut acc: u128 = 1;
        for &p in &self.parts {
            acc *= binomial(remaining, p as u128);
            remaining -= p as u128;
        }
        acc
    }

    fn prefix_sums(&self, len: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(len);
        let mut s = 0;
        for i in 0..len {
            s += self.part(i);
            out.push(s);
        }
        out
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", body.join(","))
    }
}

/// Accepts `3,1`, `(3,1)` or `3 1`.
impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad partition part '{t}' in '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// All partitions of `n`, dominant first (reverse lexicographic).
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    if n == 0 {
        return Err(Error::EmptyInput("cannot partition 0".into()));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(n, n, &mut current, &mut out);
    Ok(out)
}

fn fill(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for p in (1..=remaining.min(max_part)).rev() {
        current.push(p);
        fill(remaining - p, p, current, out);
        current.pop();
    }
}

fn check_same_total(a: &Partition, b: &Partition) -> Result<()> {
    if a.n_total() != b.n_total() {
        return Err(Error::Domain(format!(
            "partitions {a} and {b} have different totals ({} vs {})",
            a.n_total(),
            b.n_total()
        )));
    }
    Ok(())
}

/// `a ⊵ b`: every prefix sum of `a` is at least the matching prefix sum of `b`.
pub fn dominates(a: &Partition, b: &Partition) -> Result<bool> {
    check_same_total(a, b)?;
    let len = a.len().max(b.len());
    let (pa, pb) = (a.prefix_sums(len), b.prefix_sums(len));
    Ok(pa.iter().zip(&pb).all(|(x, y)| x >= y))
}

/// How a covered partition is obtained from its cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    /// A box moves down to a row that already exists.
    ExistingRow,
    /// A box moves into a new bottom row of length one.
    NewRow,
}

impl Category {
    pub fn number(self) -> u8 {
        match self {
            Category::ExistingRow => 1,
            Category::NewRow => 2,
        }
    }
}

/// A single-box move `from_row -> to_row` (1-based rows) taking the dominant
/// partition to the dominated one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverMove {
    pub from_row: usize,
    pub to_row: usize,
    pub category: Category,
}

/// Returns the box move when `a` covers `b` in the dominance order, `None` otherwise.
///
/// `a` covers `b` iff `b` is `a` with one box moved from row `m` to a later row `r`
/// where either `r = m + 1` or `a_m = a_r + 2`.
pub fn cover_move(a: &Partition, b: &Partition) -> Result<Option<CoverMove>> {
    check_same_total(a, b)?;
    let len = a.len().max(b.len());
    let mut from = None;
    let mut to = None;
    for i in 0..len {
        let diff = b.part(i) as i64 - a.part(i) as i64;
        match diff {
            0 => {}
            -1 if from.is_none() => from = Some(i),
            1 if to.is_none() => to = Some(i),
            _ => return Ok(None),
        }
    }
    let (m, r) = match (from, to) {
        (Some(m), Some(r)) if m < r => (m, r),
        _ => return Ok(None),
    };
    if r == m + 1 || a.part(m) == a.part(r) + 2 {
        let category = if r < a.len() {
            Category::ExistingRow
        } else {
            Category::NewRow
        };
        Ok(Some(CoverMove {
            from_row: m + 1,
            to_row: r + 1,
            category,
        }))
    } else {
        Ok(None)
    }
}

/// A cover edge between node indices of a [`HasseDiagram`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverEdge {
    pub dominant: usize,
    pub dominated: usize,
    pub category: Category,
    pub from_row: usize,
    pub to_row: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseDiagram {
    pub nodes: Vec<Partition>,
    pub cover_edges: Vec<CoverEdge>,
}

impl HasseDiagram {
    pub fn edge_between(&self, dominant: &Partition, dominated: &Partition) -> Option<&CoverEdge> {
        self.cover_edges
            .iter()
            .find(|e| &self.nodes[e.dominant] == dominant && &self.nodes[e.dominated] == dominated)
    }
}

pub fn hasse_diagram(n: usize) -> Result<HasseDiagram> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "Hasse diagram needs N >= 2, got {n}"
        )));
    }
    let nodes = enumerate_partitions(n)?;
    let mut cover_edges = Vec::new();
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if let Some(mv) = cover_move(a, b)? {
                cover_edges.push(CoverEdge {
                    dominant: i,
                    dominated: j,
                    category: mv.category,
                    from_row: mv.from_row,
                    to_row: mv.to_row,
                });
            }
        }
    }
    Ok(HasseDiagram { nodes, cover_edges })
}

/// A row-equivalence class of fillings, stored as its Yamanouchi word: entry `i` is the
/// 1-based row holding symbol `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tabloid {
    pub shape: Partition,
    pub yamanouchi: Vec<usize>,
}

impl Tabloid {
    pub fn new(shape: Partition, yamanouchi: Vec<usize>) -> Result<Self> {
        if yamanouchi.len() != shape.n_total() {
            return Err(Error::Domain(format!(
                "word of length {} for shape {shape}",
                yamanouchi.len()
            )));
        }
        let mut counts = vec![0usize; shape.len()];
        for &r in &yamanouchi {
            if r == 0 || r > shape.len() {
                return Err(Error::Domain(format!(
                    "row index {r} outside shape {shape}"
                )));
            }
            counts[r - 1] += 1;
        }
        if counts != shape.parts() {
            return Err(Error::Domain(format!(
                "word {yamanouchi:?} does not fill shape {shape}"
            )));
        }
        Ok(Self { shape, yamanouchi })
    }

    pub fn word_string(&self) -> String {
        self.yamanouchi.iter().map(|r| r.to_string()).collect()
    }
}

/// All tabloids of shape `n`, lexicographic in the word; index 0 is the sorted word.
pub fn enumerate_tabloids(n: &Partition) -> Vec<Tabloid> {
    enumerate_words(n)
        .into_iter()
        .map(|w| Tabloid {
            shape: n.clone(),
            yamanouchi: w,
        })
        .collect()
}

/// The bare Yamanouchi words of [`enumerate_tabloids`].
pub fn enumerate_words(n: &Partition) -> Vec<Vec<usize>> {
    let mut word: Vec<usize> = n
        .parts()
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| std::iter::repeat_n(i + 1, p))
        .collect();
    let mut out = vec![word.clone()];
    while next_permutation(&mut word) {
        out.push(word.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    // p(n) by the pentagonal-number recurrence, independent of the enumerator.
    fn partition_count(n: usize) -> usize {
        let mut table = vec![0i64; n + 1];
        table[0] = 1;
        for m in 1..=n {
            let mut k: i64 = 1;
            let mut acc = 0i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                acc += sign * table[m - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= m {
                    acc += sign * table[m - g2];
                }
                k += 1;
            }
            table[m] = acc;
        }
        table[n] as usize
    }

    #[test]
    fn partitions_of_four_in_dominant_first_order() {
        let got = enumerate_partitions(4).unwrap();
        let want = vec![
            p(&[4]),
            p(&[3, 1]),
            p(&[2, 2]),
            p(&[2, 1, 1]),
            p(&[1, 1, 1, 1]),
        ];
        assert_eq!(got, want);
        assert_eq!(enumerate_partitions(1).unwrap(), vec![p(&[1])]);
        assert_eq!(enumerate_partitions(6).unwrap().len(), 11);
        assert!(matches!(enumerate_partitions(0), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn counts_follow_recurrence() {
        for n in 1..=8 {
            assert_eq!(
                enumerate_partitions(n).unwrap().len(),
                partition_count(n),
                "n={n}"
            );
        }
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&p(&[3, 3]), &p(&[2, 2, 1, 1])).unwrap());
        assert!(!dominates(&p(&[4, 1, 1]), &p(&[3, 3])).unwrap());
        assert!(!dominates(&p(&[3, 3]), &p(&[4, 1, 1])).unwrap());
        assert!(dominates(&p(&[2, 1]), &p(&[2, 1])).unwrap());
        assert!(matches!(
            dominates(&p(&[2]), &p(&[2, 1])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn dominance_is_partial_order() {
        for n in 1..=7 {
            let all = enumerate_partitions(n).unwrap();
            for a in &all {
                assert!(dominates(a, a).unwrap());
                for b in &all {
                    let ab = dominates(a, b).unwrap();
                    if ab && dominates(b, a).unwrap() {
                        assert_eq!(a, b);
                    }
                    for c in &all {
                        if ab && dominates(b, c).unwrap() {
                            assert!(dominates(a, c).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hasse_examples() {
        let h = hasse_diagram(6).unwrap();
        let e = h.edge_between(&p(&[4, 2]), &p(&[3, 3])).unwrap();
        assert_eq!(e.category, Category::ExistingRow);
        let e = h.edge_between(&p(&[4, 2]), &p(&[4, 1, 1])).unwrap();
        assert_eq!(e.category, Category::NewRow);
        let h2 = hasse_diagram(2).unwrap();
        assert_eq!(h2.cover_edges.len(), 1);
        assert_eq!(h2.nodes[h2.cover_edges[0].dominant], p(&[2]));
        assert_eq!(h2.nodes[h2.cover_edges[0].dominated], p(&[1, 1]));
        assert!(hasse_diagram(1).is_err());
    }

    #[test]
    fn covers_match_exhaustive_definition() {
        for n in 2..=8 {
            let h = hasse_diagram(n).unwrap();
            let all = &h.nodes;
            let strict = |a: &Partition, b: &Partition| a != b && dominates(a, b).unwrap();
            let mut brute = HashSet::new();
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    if strict(a, b) && !all.iter().any(|c| strict(a, c) && strict(c, b)) {
                        brute.insert((i, j));
                    }
                }
            }
            let got: HashSet<_> = h
                .cover_edges
                .iter()
                .map(|e| (e.dominant, e.dominated))
                .collect();
            assert_eq!(got, brute, "n={n}");
            // Transitive reduction: no edge is the composite of two others.
            for e in &h.cover_edges {
                for f in &h.cover_edges {
                    if f.dominant == e.dominant {
                        assert!(!got.contains(&(f.dominated, e.dominated)));
                    }
                }
            }
            for e in &h.cover_edges {
                let a = &all[e.dominant];
                let b = &all[e.dominated];
                let is_new = b.len() > a.len();
                assert_eq!(is_new, e.category == Category::NewRow);
                assert_eq!(a.part(e.from_row - 1), b.part(e.from_row - 1) + 1);
                assert_eq!(a.part(e.to_row - 1) + 1, b.part(e.to_row - 1));
            }
        }
    }

    #[test]
    fn tabloid_examples() {
        let words: Vec<_> = enumerate_tabloids(&p(&[2, 1]))
            .into_iter()
            .map(|t| t.yamanouchi)
            .collect();
        assert_eq!(words, vec![vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]]);
        assert_eq!(enumerate_tabloids(&p(&[4])).len(), 1);
        assert_eq!(enumerate_tabloids(&p(&[2, 2])).len(), 6);
    }

    #[test]
    fn tabloid_counts_are_multinomial() {
        for n in 1..=7 {
            for part in enumerate_partitions(n).unwrap() {
                let tabs = enumerate_tabloids(&part);
                assert_eq!(tabs.len() as u128, part.tabloid_count());
                let mut fact = vec![1u128; n + 1];
                for i in 1..=n {
                    fact[i] = fact[i - 1] * i as u128;
                }
                let denom: u128 = part.parts().iter().map(|&x| fact[x]).product();
                assert_eq!(tabs.len() as u128, fact[n] / denom);
                let set: HashSet<_> = tabs.iter().map(|t| t.yamanouchi.clone()).collect();
                assert_eq!(set.len(), tabs.len());
                for t in &tabs {
                    Tabloid::new(part.clone(), t.yamanouchi.clone()).unwrap();
                }
                assert!(tabs.windows(2).all(|w| w[0].yamanouchi < w[1].yamanouchi));
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("(3,1)".parse::<Partition>().unwrap(), p(&[3, 1]));
        assert_eq!("2 2".parse::<Partition>().unwrap(), p(&[2, 2]));
        assert_eq!(p(&[2, 1, 1]).to_string(), "(2,1,1)");
        assert!("1,2".parse::<Partition>().is_err());
        assert!("".parse::<Partition>().is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    proptest! {
        #[test]
        fn enumerated_partitions_are_valid(n in 1usize..12) {
            let all = enumerate_partitions(n).unwrap();
            for (i, a) in all.iter().enumerate() {
                prop_assert_eq!(a.n_total(), n);
                prop_assert!(a.parts().windows(2).all(|w| w[0] >= w[1]));
                if i > 0 {
                    prop_assert!(all[i - 1] > *a);
                }
            }
        }

        #[test]
        fn serde_round_trip(parts in proptest::collection::vec(1usize..6, 1..6)) {
            let mut parts = parts;
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let part = Partition::new(parts).unwrap();
            let text = serde_json::to_string(&part).unwrap();
            let back: Partition = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, part);
        }
    }
}
