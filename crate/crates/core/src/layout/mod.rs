//! Seeded Fruchterman-Reingold layout in the unit square.
//!
//! Adjacent nodes attract with `d^2 / k`, every pair repels with `k^2 / d`,
//! where `k = sqrt(1 / n)`. Each iteration moves a node by at most the
//! current temperature, which cools linearly to zero. Above
//! [`FrParams::exact_limit`] nodes, repulsion only acts between nodes whose
//! grid cells (of side `k`) touch.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::neighbors::CooccurrenceGraph;
use crate::tsv;

const MIN_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrParams {
    pub seed: u64,
    pub iterations: usize,
    /// Largest step in the first iteration, as a fraction of the frame width.
    pub initial_temperature: f64,
    /// Node count above which repulsion uses the grid approximation.
    pub exact_limit: usize,
}

impl Default for FrParams {
    fn default() -> Self {
        FrParams {
            seed: 0,
            iterations: 500,
            initial_temperature: 0.1,
            exact_limit: 5000,
        }
    }
}

impl FrParams {
    pub fn seeded(seed: u64) -> Self {
        FrParams {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Layout2D {
    pub names: Vec<String>,
    /// Positions in `[0, 1] x [0, 1]`, indexed like `names`.
    pub coords: Vec<(f64, f64)>,
    pub seed: u64,
    pub iterations: usize,
    pub initial_temperature: f64,
}

impl Layout2D {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<(f64, f64)> {
        self.names.iter().position(|n| n == name).map(|i| self.coords[i])
    }

    /// `term \t x \t y` per node, in node order.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "term\tx\ty")?;
        for (name, &(x, y)) in self.names.iter().zip(&self.coords) {
            writeln!(out, "{}\t{}\t{}", tsv::field(name), tsv::real(x), tsv::real(y))?;
        }
        Ok(())
    }
}

/// Iterative layout state, exposed so callers can observe the energy as
/// the layout converges.
pub struct FrLayout {
    edges: Vec<(usize, usize)>,
    pos: Vec<(f64, f64)>,
    k: f64,
    params: FrParams,
    done: usize,
}

impl FrLayout {
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize)>, params: FrParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let pos = if n_nodes == 1 {
            vec![(0.5, 0.5)]
        } else {
            (0..n_nodes).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect()
        };
        let k = if n_nodes == 0 { 1.0 } else { (1.0 / n_nodes as f64).sqrt() };
        FrLayout {
            edges,
            pos,
            k,
            params,
            done: 0,
        }
    }

    pub fn for_graph(graph: &CooccurrenceGraph, params: FrParams) -> Self {
        Self::new(graph.n_nodes(), graph.edges(), params)
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.pos
    }

    pub fn iterations_done(&self) -> usize {
        self.done
    }

    fn temperature(&self) -> f64 {
        let total = self.params.iterations.max(1) as f64;
        self.params.initial_temperature * (1.0 - self.done as f64 / total).max(0.0)
    }

    /// Separation vector from `j` to `i` and its length, with coincident
    /// points pushed apart along a fixed direction.
    fn separation(&self, i: usize, j: usize) -> (f64, f64, f64) {
        let (dx, dy) = (self.pos[i].0 - self.pos[j].0, self.pos[i].1 - self.pos[j].1);
        let d = (dx * dx + dy * dy).sqrt();
        if d < MIN_DISTANCE {
            let angle = (i * 7919 + j * 104_729) as f64;
            (angle.cos() * MIN_DISTANCE, angle.sin() * MIN_DISTANCE, MIN_DISTANCE)
        } else {
            (dx, dy, d)
        }
    }

    fn repulsion(&self, disp: &mut [(f64, f64)]) {
        let n = self.pos.len();
        let k2 = self.k * self.k;
        if n <= self.params.exact_limit {
            for i in 0..n {
                for j in i + 1..n {
                    let (dx, dy, d) = self.separation(i, j);
                    let f = k2 / (d * d);
                    disp[i].0 += dx * f;
                    disp[i].1 += dy * f;
                    disp[j].0 -= dx * f;
                    disp[j].1 -= dy * f;
                }
            }
            return;
        }
        let side = (1.0 / self.k).ceil() as usize;
        let cell_of = |p: (f64, f64)| {
            let cx = ((p.0 / self.k) as usize).min(side - 1);
            let cy = ((p.1 / self.k) as usize).min(side - 1);
            (cx, cy)
        };
        let mut grid: Vec<Vec<usize>> = vec![Vec::new(); side * side];
        for (i, &p) in self.pos.iter().enumerate() {
            let (cx, cy) = cell_of(p);
            grid[cy * side + cx].push(i);
        }
        for i in 0..n {
            let (cx, cy) = cell_of(self.pos[i]);
            for ny in cy.saturating_sub(1)..=(cy + 1).min(side - 1) {
                for nx in cx.saturating_sub(1)..=(cx + 1).min(side - 1) {
                    for &j in &grid[ny * side + nx] {
                        if j == i {
                            continue;
                        }
                        let (dx, dy, d) = self.separation(i, j);
                        let f = k2 / (d * d);
                        disp[i].0 += dx * f;
                        disp[i].1 += dy * f;
                    }
                }
            }
        }
    }

    /// One force evaluation and move.
    pub fn step(&mut self) {
        let n = self.pos.len();
        if n <= 1 {
            self.done += 1;
            return;
        }
        let mut disp = vec![(0.0, 0.0); n];
        self.repulsion(&mut disp);
        for &(a, b) in &self.edges {
            let (dx, dy, d) = self.separation(a, b);
            let f = d / self.k;
            disp[a].0 -= dx * f;
            disp[a].1 -= dy * f;
            disp[b].0 += dx * f;
            disp[b].1 += dy * f;
        }
        let t = self.temperature();
        for (p, &(dx, dy)) in self.pos.iter_mut().zip(&disp) {
            let len = (dx * dx + dy * dy).sqrt();
            if len > 0.0 {
                let s = len.min(t) / len;
                p.0 = (p.0 + dx * s).clamp(0.0, 1.0);
                p.1 = (p.1 + dy * s).clamp(0.0, 1.0);
            }
        }
        self.done += 1;
    }

    pub fn run(&mut self) {
        while self.done < self.params.iterations {
            self.step();
        }
    }

    /// Potential whose negative gradient gives the layout forces:
    /// `sum over edges of d^3 / (3k)` minus `sum over pairs of k^2 ln d`.
    pub fn energy(&self) -> f64 {
        let n = self.pos.len();
        let k2 = self.k * self.k;
        let mut e = 0.0;
        for &(a, b) in &self.edges {
            let (_, _, d) = self.separation(a, b);
            e += d * d * d / (3.0 * self.k);
        }
        for i in 0..n {
            for j in i + 1..n {
                let (_, _, d) = self.separation(i, j);
                e -= k2 * d.ln();
            }
        }
        e
    }
}

/// Lays out `graph` deterministically for the given seed.
pub fn fruchterman_reingold(graph: &CooccurrenceGraph, params: &FrParams) -> Result<Layout2D> {
    if graph.n_nodes() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut state = FrLayout::for_graph(graph, *params);
    state.run();
    Ok(Layout2D {
        names: graph.nodes().to_vec(),
        coords: state.pos,
        seed: params.seed,
        iterations: params.iterations,
        initial_temperature: params.initial_temperature,
    })
}

/// Terms drawn in a distinct colour.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HighlightSet {
    pub terms: BTreeSet<String>,
    pub color_tag: String,
}

impl HighlightSet {
    pub fn new<I, S>(terms: I, color_tag: &str) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        HighlightSet {
            terms: terms.into_iter().map(Into::into).collect(),
            color_tag: color_tag.to_string(),
        }
    }

    /// Reads one term per line; blank lines are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let tag = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Self::new(
            text.lines().map(str::trim).filter(|l| !l.is_empty()),
            &tag,
        ))
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighbors::ReductionParams;

    fn graph(n: usize, edges: &[(usize, usize)]) -> CooccurrenceGraph {
        let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
        CooccurrenceGraph::from_edges(&names, edges, ReductionParams::default()).unwrap()
    }

    #[test]
    fn single_node_sits_in_the_centre() {
        let mut s = FrLayout::new(1, vec![], FrParams::default());
        s.run();
        assert_eq!(s.positions(), [(0.5, 0.5)]);
    }

    #[test]
    fn same_seed_same_coordinates() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let a = fruchterman_reingold(&g, &FrParams::seeded(3)).unwrap();
        let b = fruchterman_reingold(&g, &FrParams::seeded(3)).unwrap();
        assert_eq!(a, b);
        let c = fruchterman_reingold(&g, &FrParams::seeded(4)).unwrap();
        assert_ne!(a.coords, c.coords);
    }

    #[test]
    fn coordinates_stay_in_the_frame() {
        let edges: Vec<_> = (0..30).map(|i| (i, (i * 7 + 3) % 31)).collect();
        let l = fruchterman_reingold(&graph(31, &edges), &FrParams::seeded(1)).unwrap();
        assert!(l.coords.iter().all(|&(x, y)| (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)));
    }

    #[test]
    fn grid_repulsion_agrees_roughly_with_exact() {
        let edges: Vec<_> = (0..199).map(|i| (i, i + 1)).collect();
        let g = graph(200, &edges);
        let exact = fruchterman_reingold(&g, &FrParams::seeded(2)).unwrap();
        let grid = fruchterman_reingold(&g, &FrParams { exact_limit: 10, ..FrParams::seeded(2) }).unwrap();
        assert!(grid.coords.iter().all(|&(x, y)| x.is_finite() && y.is_finite()));
        assert_eq!(exact.names, grid.names);
    }

    #[test]
    fn energy_falls() {
        let edges: Vec<_> = (0..40).flat_map(|i| [(i, (i + 1) % 40), (i, (i * 3) % 40)]).collect();
        let mut s = FrLayout::for_graph(&graph(40, &edges), FrParams::seeded(9));
        while s.iterations_done() < 10 {
            s.step();
        }
        let early = s.energy();
        s.run();
        assert!(s.energy() < early);
    }

    #[test]
    fn coordinate_tsv() {
        let l = Layout2D {
            names: vec!["a".into()],
            coords: vec![(0.5, 0.25)],
            seed: 0,
            iterations: 0,
            initial_temperature: 0.1,
        };
        let mut out = Vec::new();
        l.write_tsv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "term\tx\ty\na\t0.500000\t0.250000\n");
    }

    #[test]
    fn highlight_file_is_one_term_per_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("verbs.txt");
        std::fs::write(&path, "argue\n\n  claim \n").unwrap();
        let h = HighlightSet::from_file(&path).unwrap();
        assert!(h.contains("argue") && h.contains("claim"));
        assert_eq!(h.terms.len(), 2);
        assert_eq!(h.color_tag, "verbs");
    }
}
