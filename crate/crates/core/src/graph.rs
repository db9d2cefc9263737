//! Immutable simple graphs in compressed sorted-adjacency form, triangle
//! counting and the degree-resolved clustering curve.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::degree_sequences::DegreeSequence;
use crate::error::{Error, Result};
use crate::par::Exec;

/// Largest graph the brute-force triangle counter accepts.
pub const BRUTEFORCE_MAX_N: usize = 512;

const CHUNK: usize = 256;

/// Simple undirected graph. Every edge is stored in both endpoint lists;
/// each list is strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting loops, repeated pairs and
    /// out-of-range endpoints.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::BadArgs(format!("n = {n} exceeds u32 vertex ids")));
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::BadVertex { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            neighbors[fill[u]] = v as u32;
            fill[u] += 1;
            neighbors[fill[v]] = u as u32;
            fill[v] += 1;
        }
        for v in 0..n {
            let list = &mut neighbors[offsets[v]..offsets[v + 1]];
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (v.min(w[0] as usize), v.max(w[0] as usize));
                return Err(Error::MultiEdge(a, b));
            }
        }
        Ok(Self { offsets, neighbors })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<u32> {
        (0..self.n()).map(|v| self.degree(v) as u32).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order. This is also the
    /// canonical encoding used for dictionary keys.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn canonical_edges(&self) -> Vec<(usize, usize)> {
        self.edges().collect()
    }

    /// Applies `perm` (old id -> new id) to every vertex.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::BadArgs("permutation length differs from n".into()));
        }
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Self::from_edge_list(self.n(), &edges)
    }

    /// Reads the edge-list format: `# n=<n> m=<m>` header followed by one
    /// `u v` pair per line.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if header.is_none() && edges.is_empty() {
                    header = parse_header(rest);
                }
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected `u v`, got {line:?}", lineno + 1));
            let mut it = line.split_whitespace();
            let u: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let v: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            edges.push((u, v));
        }
        let (n, m) = header
            .ok_or_else(|| Error::Parse("missing `# n=<n> m=<m>` header".into()))?;
        if m != edges.len() {
            return Err(Error::Parse(format!(
                "header declares m={m} but {} edges follow",
                edges.len()
            )));
        }
        Self::from_edge_list(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.m() * 12 + 32);
        let _ = writeln!(out, "# n={} m={}", self.n(), self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_edge_list(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }

    /// Out-lists of the (degree, index) orientation: `u -> v` iff
    /// `(d_u, u) < (d_v, v)`. Lists stay sorted by vertex id.
    fn oriented(&self) -> (Vec<usize>, Vec<u32>) {
        let key = |v: usize| (self.degree(v), v);
        let mut offsets = Vec::with_capacity(self.n() + 1);
        let mut out = Vec::with_capacity(self.m());
        offsets.push(0);
        for u in 0..self.n() {
            let ku = key(u);
            out.extend(
                self.neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&v| key(v as usize) > ku),
            );
            offsets.push(out.len());
        }
        (offsets, out)
    }
}

fn parse_header(rest: &str) -> Option<(usize, usize)> {
    let mut n = None;
    let mut m = None;
    for tok in rest.split_whitespace() {
        if let Some(x) = tok.strip_prefix("n=") {
            n = x.parse().ok();
        } else if let Some(x) = tok.strip_prefix("m=") {
            m = x.parse().ok();
        }
    }
    Some((n?, m?))
}

fn merge_count(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// `|a ∩ b|` for sorted slices; gallops through the longer one when the
/// sizes are lopsided.
fn intersect_count(a: &[u32], b: &[u32]) -> u64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if small.len() * 16 < large.len() {
        let mut rest = large;
        let mut c = 0u64;
        for &x in small {
            match rest.binary_search(&x) {
                Ok(i) => {
                    c += 1;
                    rest = &rest[i + 1..];
                }
                Err(i) => rest = &rest[i..],
            }
            if rest.is_empty() {
                break;
            }
        }
        c
    } else {
        merge_count(small, large)
    }
}

/// Exact triangle count by forward counting over the (degree, index)
/// orientation. Integer-only, so the parallel and sequential paths agree
/// bit for bit.
pub fn count_triangles(g: &Graph, exec: Exec) -> u64 {
    let (off, out) = g.oriented();
    let out_of = |v: usize| &out[off[v]..off[v + 1]];
    exec.sum_u64(g.n(), CHUNK, |u| {
        let ou = out_of(u);
        ou.iter()
            .map(|&v| intersect_count(ou, out_of(v as usize)))
            .sum()
    })
}

/// Lists every triangle once as `[a, b, c]` in orientation order.
pub fn list_triangles(g: &Graph, exec: Exec) -> Vec<[u32; 3]> {
    let (off, out) = g.oriented();
    let out_of = |v: usize| &out[off[v]..off[v + 1]];
    let chunks = g.n().div_ceil(CHUNK);
    exec.map_range(chunks, |c| {
        let mut found = Vec::new();
        for u in c * CHUNK..((c + 1) * CHUNK).min(g.n()) {
            let ou = out_of(u);
            for &v in ou {
                let ov = out_of(v as usize);
                let (mut i, mut j) = (0, 0);
                while i < ou.len() && j < ov.len() {
                    match ou[i].cmp(&ov[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            found.push([u as u32, v, ou[i]]);
                            i += 1;
                            j += 1;
                        }
                    }
                }
            }
        }
        found
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Scans all `C(n, 3)` vertex triples. Test oracle; refuses `n > 512`.
pub fn count_triangles_bruteforce(g: &Graph) -> Result<u64> {
    let n = g.n();
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::OracleSize(format!(
            "brute-force triangle scan limited to n <= {BRUTEFORCE_MAX_N}, got {n}"
        )));
    }
    let mut adj = vec![false; n * n];
    for (u, v) in g.edges() {
        adj[u * n + v] = true;
        adj[v * n + u] = true;
    }
    let mut count = 0u64;
    for a in 0..n {
        for b in a + 1..n {
            if !adj[a * n + b] {
                continue;
            }
            for c in b + 1..n {
                if adj[a * n + c] && adj[b * n + c] {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Number of triangles through each vertex.
pub fn vertex_triangles(g: &Graph, exec: Exec) -> Vec<u64> {
    exec.map_range(g.n(), |v| {
        let nv = g.neighbors(v);
        let twice: u64 = nv
            .iter()
            .map(|&u| intersect_count(nv, g.neighbors(u as usize)))
            .sum();
        twice / 2
    })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CkEntry {
    /// `N_k`, vertices of degree `k`.
    pub n_k: u64,
    /// `Δ_k`: triangle-corner incidences at degree-`k` vertices.
    pub triangles_k: u64,
    pub c_k: f64,
}

/// `k -> (N_k, Δ_k, c(k))` for every degree `k >= 2` present in the graph.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClusteringCurve {
    pub entries: BTreeMap<u32, CkEntry>,
}

impl ClusteringCurve {
    pub fn get(&self, k: u32) -> Option<&CkEntry> {
        self.entries.get(&k)
    }

    pub fn c(&self, k: u32) -> Option<f64> {
        self.entries.get(&k).map(|e| e.c_k)
    }

    pub fn total_corners(&self) -> u64 {
        self.entries.values().map(|e| e.triangles_k).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,N_k,triangles_k,c_k\n");
        for (k, e) in &self.entries {
            let _ = writeln!(out, "{k},{},{},{:.16e}", e.n_k, e.triangles_k, e.c_k);
        }
        out
    }
}

/// Local clustering per degree: `c(k) = 2 Δ_k / (N_k k (k - 1))`.
/// Degrees 0 and 1 are omitted.
pub fn clustering_curve(g: &Graph, exec: Exec) -> ClusteringCurve {
    let tri = vertex_triangles(g, exec);
    let mut acc: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for (v, &t) in tri.iter().enumerate() {
        let k = g.degree(v) as u32;
        if k < 2 {
            continue;
        }
        let e = acc.entry(k).or_default();
        e.0 += 1;
        e.1 += t;
    }
    let entries = acc
        .into_iter()
        .map(|(k, (n_k, triangles_k))| {
            let kk = f64::from(k);
            let c_k = 2.0 * triangles_k as f64 / (n_k as f64 * kk * (kk - 1.0));
            (
                k,
                CkEntry {
                    n_k,
                    triangles_k,
                    c_k,
                },
            )
        })
        .collect();
    ClusteringCurve { entries }
}

/// Paths `v - u - w` with `w != v`: `Σ_{u ∈ N(v)} (d_u - 1)`.
pub fn two_paths_from(g: &Graph, v: usize) -> u64 {
    g.neighbors(v)
        .iter()
        .map(|&u| g.degree(u as usize) as u64 - 1)
        .sum()
}

/// Degrees of `g` as a [`DegreeSequence`]; fails on isolated vertices.
pub fn degree_sequence_of(g: &Graph) -> Result<DegreeSequence> {
    DegreeSequence::new(g.degrees())
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn build_and_validate() {
        let g = Graph::from_edge_list(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(g.m(), 3);
        assert!(g.has_edge(2, 0));
        assert_eq!(Graph::from_edge_list(2, &[(0, 0)]).unwrap_err().code(), "self-loop");
        assert_eq!(
            Graph::from_edge_list(3, &[(0, 1), (1, 0)]).unwrap_err().code(),
            "multi-edge"
        );
        assert_eq!(Graph::from_edge_list(3, &[(0, 3)]).unwrap_err().code(), "bad-vertex");
    }

    #[test]
    fn triangle_counts_on_fixtures() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(count_triangles(&complete(4), exec), 4);
            assert_eq!(count_triangles(&cycle(5), exec), 0);
            assert_eq!(count_triangles(&petersen(), exec), 0);
            assert_eq!(count_triangles(&complete(7), exec), 35);
        }
        assert_eq!(count_triangles_bruteforce(&complete(4)).unwrap(), 4);
        assert_eq!(count_triangles_bruteforce(&Graph::empty(5)).unwrap(), 0);
        assert_eq!(count_triangles_bruteforce(&petersen()).unwrap(), 0);
        assert_eq!(
            count_triangles_bruteforce(&Graph::empty(513)).unwrap_err().code(),
            "oracle-size"
        );
        assert_eq!(list_triangles(&complete(5), Exec::Parallel).len(), 10);
    }

    #[test]
    fn clustering_examples() {
        let c = clustering_curve(&complete(4), Exec::Sequential);
        assert_eq!(c.entries.len(), 1);
        let e = c.get(3).unwrap();
        assert_eq!((e.n_k, e.triangles_k), (4, 12));
        assert_eq!(e.c_k, 1.0);

        let c = clustering_curve(&star(5), Exec::Sequential);
        assert_eq!(c.entries.keys().copied().collect::<Vec<_>>(), vec![5]);
        assert_eq!(c.c(5), Some(0.0));

        let c = clustering_curve(&paw(), Exec::Parallel);
        assert_eq!(c.c(2), Some(1.0));
        assert!((c.c(3).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.c(1), None);
        assert_eq!(c.total_corners(), 3 * count_triangles(&paw(), Exec::Sequential));
    }

    #[test]
    fn two_path_examples() {
        let s = star(3);
        assert_eq!(two_paths_from(&s, 0), 0);
        assert_eq!(two_paths_from(&s, 1), 2);
        assert_eq!(two_paths_from(&complete(3), 0), 2);
    }

    #[test]
    fn degree_sequences_of_fixtures() {
        assert_eq!(degree_sequence_of(&complete(4)).unwrap().degrees(), &[3, 3, 3, 3]);
        assert_eq!(degree_sequence_of(&cycle(5)).unwrap().degrees(), &[2; 5]);
        assert_eq!(
            degree_sequence_of(&Graph::empty(3)).unwrap_err().code(),
            "zero-degree"
        );
    }

    #[test]
    fn edge_list_text() {
        let g = petersen();
        let back = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(back, g);
        assert!(Graph::parse_edge_list("0 1\n").is_err());
        assert!(Graph::parse_edge_list("# n=3 m=2\n0 1\n").is_err());
        assert_eq!(
            Graph::parse_edge_list("# n=2 m=1\n1 1\n").unwrap_err().code(),
            "self-loop"
        );
        assert!(g.to_edge_list().starts_with("# n=10 m=15\n"));
    }

    #[test]
    fn csv_export() {
        let csv = clustering_curve(&complete(4), Exec::Sequential).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,N_k,triangles_k,c_k"));
        assert!(lines.next().unwrap().starts_with("3,4,12,"));
    }

    #[test]
    fn intersect_paths_agree() {
        let a: Vec<u32> = (0..1000).step_by(3).collect();
        let b: Vec<u32> = vec![3, 4, 9, 500, 501, 999];
        assert_eq!(intersect_count(&a, &b), merge_count(&a, &b));
        assert_eq!(intersect_count(&b, &a), 4);
    }
}
