//! Nearest-neighbour reduction of a term-document matrix.
//!
//! Rows of the input matrix are the items to cluster. Two items are
//! neighbours when they co-occur in at least one column; the co-occurrence
//! counts `TD = M' M'^T` are then thinned with a per-row threshold scaled by
//! `beta`, so that only the strongest (binary branch) or the typical
//! (real branch) links survive.
//!
//! Two variants exist. [`Variant::Fr`] filters rows on raw row sums and takes
//! the per-row mean from the filtered matrix. [`Variant::Drl`] filters on row
//! sums of the matrix clipped at 1, clips the co-occurrence matrix at 1 and
//! takes the per-row mean from that clipped product.
//!
//! The real branch keeps entries inside `[-beta * mean, beta * mean]`, which
//! prunes the strongest co-occurrences rather than the weakest ones.

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::TermDocumentMatrix;
use crate::tsv;

/// Sparse real matrix whose rows are the items to cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    names: Vec<String>,
    n_cols: usize,
    /// `(column, value)` sorted by column, zeros not stored.
    rows: Vec<Vec<(u32, f64)>>,
}

impl DataMatrix {
    pub fn new(names: Vec<String>, n_cols: usize, rows: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        if names.len() != rows.len() {
            return Err(Error::InvalidParameter(format!(
                "{} row names for {} rows",
                names.len(),
                rows.len()
            )));
        }
        let mut clean = Vec::with_capacity(rows.len());
        for mut row in rows {
            row.retain(|&(_, v)| v != 0.0);
            row.sort_by_key(|&(c, _)| c);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidParameter("duplicate column in a row".into()));
            }
            if row.iter().any(|&(c, v)| c as usize >= n_cols || !v.is_finite()) {
                return Err(Error::InvalidParameter("entry outside the matrix or not finite".into()));
            }
            clean.push(row);
        }
        Ok(DataMatrix { names, n_cols, rows: clean })
    }

    /// Builds a matrix from dense rows.
    pub fn from_dense(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.iter().map(Vec::len).max().unwrap_or(0);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidParameter("ragged dense rows".into()));
        }
        let sparse = rows
            .iter()
            .map(|r| r.iter().enumerate().map(|(j, &v)| (j as u32, v)).collect())
            .collect();
        DataMatrix::new(names, n_cols, sparse)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, v)| v).sum()
    }

    /// Copy with every entry above 1 lowered to 1. Count matrices become
    /// document-presence matrices.
    pub fn clipped(&self) -> DataMatrix {
        DataMatrix {
            names: self.names.clone(),
            n_cols: self.n_cols,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(c, v)| (c, v.min(1.0))).collect())
                .collect(),
        }
    }

    /// Copy with each row scaled to unit Euclidean length.
    pub fn row_normalized(&self) -> DataMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let norm = r.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
                r.iter().map(|&(c, v)| (c, v / norm)).collect()
            })
            .collect();
        DataMatrix {
            names: self.names.clone(),
            n_cols: self.n_cols,
            rows,
        }
    }

    fn select(&self, keep: &[usize]) -> DataMatrix {
        DataMatrix {
            names: keep.iter().map(|&i| self.names[i].clone()).collect(),
            n_cols: self.n_cols,
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Column-major copy: for each column, `(row, value)` sorted by row.
    fn columns(&self) -> Vec<Vec<(u32, f64)>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                cols[c as usize].push((i as u32, v));
            }
        }
        cols
    }
}

impl From<&TermDocumentMatrix> for DataMatrix {
    fn from(tdm: &TermDocumentMatrix) -> Self {
        DataMatrix {
            names: tdm.terms().to_vec(),
            n_cols: tdm.n_docs(),
            rows: tdm
                .rows()
                .map(|(_, r)| r.iter().map(|&(c, n)| (c, n as f64)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Fr,
    Drl,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Fr => "fr",
            Variant::Drl => "drl",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fr" | "fruchterman" => Ok(Variant::Fr),
            "drl" => Ok(Variant::Drl),
            _ => Err(Error::InvalidParameter(format!("unknown variant `{s}`"))),
        }
    }
}

/// How the row-wise keep mask becomes an undirected graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetrize {
    /// Link i and k when either row keeps the other.
    #[default]
    Or,
    /// Link i and k only when both rows keep each other.
    And,
}

impl FromStr for Symmetrize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "or" => Ok(Symmetrize::Or),
            "and" | "mutual" => Ok(Symmetrize::And),
            _ => Err(Error::InvalidParameter(format!("unknown symmetrization `{s}`"))),
        }
    }
}

impl fmt::Display for Symmetrize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetrize::Or => "or",
            Symmetrize::And => "and",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub beta: f64,
    pub min_freq: f64,
    /// May be infinite.
    pub max_freq: f64,
    /// Binary branch (threshold `TD - beta * mean > 0`) when true, real
    /// branch (keep `|TD| <= beta * mean`) otherwise.
    pub binary: bool,
    pub variant: Variant,
    pub symmetrize: Symmetrize,
}

impl Default for ReductionParams {
    fn default() -> Self {
        ReductionParams {
            beta: 5.0,
            min_freq: 2.0,
            max_freq: 20.0,
            binary: false,
            variant: Variant::Fr,
            symmetrize: Symmetrize::Or,
        }
    }
}

impl ReductionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be a finite value >= 0, got {}", self.beta)));
        }
        if !(self.min_freq >= 1.0 && self.min_freq.is_finite()) {
            return Err(Error::InvalidParameter(format!("min must be >= 1, got {}", self.min_freq)));
        }
        if !(self.max_freq >= self.min_freq) {
            return Err(Error::InvalidParameter(format!(
                "max ({}) must not be below min ({})",
                tsv::bound(self.max_freq),
                tsv::bound(self.min_freq)
            )));
        }
        Ok(())
    }

    pub fn band_label(&self) -> String {
        format!("[{}-{}]", tsv::bound(self.min_freq), tsv::bound(self.max_freq))
    }
}

/// Keeps the rows whose sum lies inside the band. The DRL variant measures
/// sums on the matrix clipped at 1 but returns the original rows.
pub fn band_filter(m: &DataMatrix, params: &ReductionParams) -> Result<DataMatrix> {
    params.validate()?;
    let measured = match params.variant {
        Variant::Fr => m.clone(),
        Variant::Drl => m.clipped(),
    };
    let keep: Vec<usize> = (0..m.n_rows())
        .filter(|&i| {
            let s = measured.row_sum(i);
            params.min_freq <= s && s <= params.max_freq
        })
        .collect();
    if keep.is_empty() {
        return Err(Error::EmptyBand {
            min: params.min_freq,
            max: params.max_freq,
        });
    }
    Ok(m.select(&keep))
}

/// Sparse square matrix indexed like the rows of the matrix it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    pub names: Vec<String>,
    /// Nonzero `(column, value)` pairs per row, sorted by column.
    pub rows: Vec<Vec<(u32, f64)>>,
}

impl SquareMatrix {
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&(k as u32), |&(c, _)| c)
            .map(|p| self.rows[i][p].1)
            .unwrap_or(0.0)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }
}

/// Row `i` of `M M^T`. Per entry, products are summed in increasing column
/// order, which is the order a dense triple loop would use.
fn product_row(
    m: &DataMatrix,
    cols: &[Vec<(u32, f64)>],
    i: usize,
    acc: &mut [f64],
    mark: &mut [bool],
    touched: &mut Vec<u32>,
) -> Vec<(u32, f64)> {
    for &(j, v) in m.row(i) {
        for &(k, w) in &cols[j as usize] {
            if !mark[k as usize] {
                mark[k as usize] = true;
                touched.push(k);
            }
            acc[k as usize] += v * w;
        }
    }
    touched.sort_unstable();
    let out = touched
        .iter()
        .map(|&k| (k, acc[k as usize]))
        .filter(|&(_, x)| x != 0.0)
        .collect();
    for &k in touched.iter() {
        acc[k as usize] = 0.0;
        mark[k as usize] = false;
    }
    touched.clear();
    out
}

/// Computes every row of the co-occurrence product in parallel and hands
/// each one to `f`. Results come back in row order.
fn map_product_rows<T, F>(m: &DataMatrix, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, Vec<(u32, f64)>) -> T + Sync,
{
    let cols = m.columns();
    let n = m.n_rows();
    (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0; n], vec![false; n], Vec::new()),
            |(acc, mark, touched), i| f(i, product_row(m, &cols, i, acc, mark, touched)),
        )
        .collect()
}

/// The raw product `TD = M' M'^T`, or for the DRL variant its clip at 1.
pub fn cooccurrence(filtered: &DataMatrix, variant: Variant) -> SquareMatrix {
    let rows = map_product_rows(filtered, |_, row| match variant {
        Variant::Fr => row,
        Variant::Drl => clip_row(row),
    });
    SquareMatrix {
        names: filtered.names().to_vec(),
        rows,
    }
}

fn clip_row(row: Vec<(u32, f64)>) -> Vec<(u32, f64)> {
    row.into_iter().map(|(k, x)| (k, x.min(1.0))).collect()
}

fn nonzero_mean(name: &str, row: &[(u32, f64)]) -> Result<f64> {
    if row.is_empty() {
        return Err(Error::ZeroRow(name.to_string()));
    }
    Ok(row.iter().map(|&(_, v)| v).sum::<f64>() / row.len() as f64)
}

/// Mean of the nonzero entries of each row.
pub fn mean_vector(names: &[String], rows: &[Vec<(u32, f64)>]) -> Result<Vec<f64>> {
    names
        .iter()
        .zip(rows)
        .map(|(name, row)| nonzero_mean(name, row))
        .collect()
}

/// Columns `k != i` that row `i` keeps. `td` holds the values compared with
/// the threshold; `vm` is the row mean.
fn kept_columns(i: usize, td: &[(u32, f64)], vm: f64, params: &ReductionParams) -> Vec<u32> {
    let cut = params.beta * vm;
    td.iter()
        .filter(|&&(k, _)| k as usize != i)
        .filter(|&&(_, t)| {
            if params.binary {
                t - cut > 0.0
            } else {
                -cut <= t && t <= cut && t > 0.0
            }
        })
        .map(|&(k, _)| k)
        .collect()
}

/// Thresholds a co-occurrence matrix row by row and builds the undirected
/// graph. `td` must already be clipped for the DRL variant.
pub fn reduce(td: &SquareMatrix, vm: &[f64], params: &ReductionParams) -> Result<CooccurrenceGraph> {
    if vm.len() != td.n() {
        return Err(Error::InvalidParameter(format!(
            "mean vector has {} entries for {} rows",
            vm.len(),
            td.n()
        )));
    }
    let keep: Vec<Vec<u32>> = td
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| kept_columns(i, row, vm[i], params))
        .collect();
    CooccurrenceGraph::from_keep_mask(&td.names, &keep, params)
}

/// Band filter, co-occurrence, mean vector and reduction in one pass. The
/// full co-occurrence matrix is never held in memory.
pub fn knn_graph(m: &DataMatrix, params: &ReductionParams) -> Result<CooccurrenceGraph> {
    let filtered = band_filter(m, params)?;
    let keep: Vec<Result<Vec<u32>>> = match params.variant {
        Variant::Fr => {
            let vm = mean_vector(filtered.names(), &filtered.rows)?;
            map_product_rows(&filtered, |i, row| Ok(kept_columns(i, &row, vm[i], params)))
        }
        Variant::Drl => map_product_rows(&filtered, |i, row| {
            let clipped = clip_row(row.clone());
            let vm = nonzero_mean(&filtered.names[i], &clipped)?;
            // the real branch thresholds the unclipped product
            let td = if params.binary { &clipped } else { &row };
            Ok(kept_columns(i, td, vm, params))
        }),
    };
    let keep = keep.into_iter().collect::<Result<Vec<_>>>()?;
    CooccurrenceGraph::from_keep_mask(filtered.names(), &keep, params)
}

/// Undirected graph without self-loops. Every node has at least one link.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CooccurrenceGraph {
    nodes: Vec<String>,
    adjacency: Vec<Vec<u32>>,
    mean_links: f64,
    params: ReductionParams,
}

impl CooccurrenceGraph {
    fn from_keep_mask(names: &[String], keep: &[Vec<u32>], params: &ReductionParams) -> Result<Self> {
        let mut edges = Vec::new();
        for (i, row) in keep.iter().enumerate() {
            for &k in row {
                let (a, b) = (i as u32, k);
                match params.symmetrize {
                    Symmetrize::Or => edges.push((a.min(b), a.max(b))),
                    Symmetrize::And => {
                        if a < b && keep[b as usize].binary_search(&a).is_ok() {
                            edges.push((a, b));
                        }
                    }
                }
            }
        }
        Self::build(names, edges, *params)
    }

    /// Builds a graph from index pairs into `names`, dropping self-loops,
    /// duplicates and isolated names.
    pub fn from_edges(names: &[String], edges: &[(usize, usize)], params: ReductionParams) -> Result<Self> {
        let n = names.len();
        if edges.iter().any(|&(a, b)| a >= n || b >= n) {
            return Err(Error::InvalidParameter("edge refers to a missing node".into()));
        }
        let edges = edges
            .iter()
            .map(|&(a, b)| ((a.min(b)) as u32, (a.max(b)) as u32))
            .collect();
        Self::build(names, edges, params)
    }

    fn build(names: &[String], mut edges: Vec<(u32, u32)>, params: ReductionParams) -> Result<Self> {
        edges.retain(|&(a, b)| a != b);
        edges.sort_unstable();
        edges.dedup();
        let mut degree = vec![0usize; names.len()];
        for &(a, b) in &edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut new_index = vec![u32::MAX; names.len()];
        let mut nodes = Vec::new();
        for (i, &d) in degree.iter().enumerate() {
            if d > 0 {
                new_index[i] = nodes.len() as u32;
                nodes.push(names[i].clone());
            }
        }
        if nodes.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for &(a, b) in &edges {
            let (a, b) = (new_index[a as usize], new_index[b as usize]);
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }
        let mean_links = 2.0 * edges.len() as f64 / nodes.len() as f64;
        Ok(CooccurrenceGraph {
            nodes,
            adjacency,
            mean_links,
            params,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&(b as u32)).is_ok()
    }

    /// Average number of links per node.
    pub fn mean_links(&self) -> f64 {
        self.mean_links
    }

    pub fn params(&self) -> &ReductionParams {
        &self.params
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    /// Edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_edges());
        for (a, row) in self.adjacency.iter().enumerate() {
            for &b in row {
                if a < b as usize {
                    out.push((a, b as usize));
                }
            }
        }
        out
    }

    /// Connected components as node index lists, largest first.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n_nodes()];
        let mut out = Vec::new();
        for start in 0..self.n_nodes() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for &k in &self.adjacency[i] {
                    if !seen[k as usize] {
                        seen[k as usize] = true;
                        comp.push(k as usize);
                        queue.push_back(k as usize);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        out
    }

    /// Subgraph induced by the nodes of degree `>= k`, isolated nodes removed.
    pub fn filter_min_degree(&self, k: usize) -> Result<CooccurrenceGraph> {
        let keep: Vec<bool> = (0..self.n_nodes()).map(|i| self.degree(i) >= k).collect();
        let edges: Vec<(u32, u32)> = self
            .edges()
            .into_iter()
            .filter(|&(a, b)| keep[a] && keep[b])
            .map(|(a, b)| (a as u32, b as u32))
            .collect();
        Self::build(&self.nodes, edges, self.params)
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            n_nodes: self.n_nodes(),
            n_edges: self.n_edges(),
            mean_links: self.mean_links,
            beta: self.params.beta,
            band: self.params.band_label(),
            variant: self.params.variant,
        }
    }

    /// `term_a \t term_b` per edge with `term_a < term_b`, sorted.
    pub fn write_edges_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut pairs: Vec<(&str, &str)> = self
            .edges()
            .into_iter()
            .map(|(a, b)| {
                let (x, y) = (self.nodes[a].as_str(), self.nodes[b].as_str());
                if x < y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        pairs.sort_unstable();
        for (a, b) in pairs {
            writeln!(out, "{}\t{}", tsv::field(a), tsv::field(b))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub mean_links: f64,
    pub beta: f64,
    pub band: String,
    pub variant: Variant,
}

impl GraphStats {
    pub const TSV_HEADER: &'static str = "n_nodes\tn_edges\tmean_links\tbeta\tband\tvariant";

    /// Statistics of a graph with no nodes, used when a band is empty.
    pub fn empty(params: &ReductionParams) -> Self {
        GraphStats {
            n_nodes: 0,
            n_edges: 0,
            mean_links: 0.0,
            beta: params.beta,
            band: params.band_label(),
            variant: params.variant,
        }
    }

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.n_nodes,
            self.n_edges,
            tsv::real(self.mean_links),
            tsv::bound(self.beta),
            self.band,
            self.variant
        )
    }
}
