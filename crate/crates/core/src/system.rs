//! The graph directed Markov system: multigraph, vertex spaces, maps and
//! incidence in one validated value.

use std::collections::HashMap;

use crate::error::{GdmsError, Result};
use crate::graph::{EdgeGraph, EdgeRecord, IncidenceSpec, MultiGraph};
use crate::maps::{ContractionFamily, DerivativeNorm, Similarity, VertexSpace};

/// Whether the edge list is the whole alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    Finite,
    /// Continued-fraction family on all positive integers; the graph holds no
    /// edges until truncated.
    Infinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdmsSystem {
    name: String,
    graph: MultiGraph,
    spaces: Vec<VertexSpace>,
    family: ContractionFamily,
    incidence: IncidenceSpec,
    alphabet: Alphabet,
}

const CONTAINMENT_SLACK: f64 = 1e-12;

impl GdmsSystem {
    /// A finite system of similarities, one per edge of `graph`.
    pub fn similarity(
        name: impl Into<String>,
        graph: MultiGraph,
        spaces: Vec<VertexSpace>,
        maps: Vec<Similarity>,
        incidence: IncidenceSpec,
    ) -> Result<Self> {
        if spaces.len() != graph.vertices().len() {
            return Err(GdmsError::validation(None, "one vertex space per vertex is required"));
        }
        if maps.len() != graph.edges().len() {
            return Err(GdmsError::validation(None, "one similarity per edge is required"));
        }
        for (e, m) in graph.edges().iter().zip(&maps) {
            let (a, b) = m.image(&spaces[e.terminal]);
            let target = &spaces[e.initial];
            if a < target.lo - CONTAINMENT_SLACK || b > target.hi + CONTAINMENT_SLACK {
                return Err(GdmsError::validation(
                    None,
                    format!(
                        "edge `{}` maps X_{} onto [{a}, {b}], outside X_{} = [{}, {}]",
                        e.id,
                        graph.vertices()[e.terminal],
                        graph.vertices()[e.initial],
                        target.lo,
                        target.hi
                    ),
                ));
            }
        }
        let system = GdmsSystem {
            name: name.into(),
            graph,
            spaces,
            family: ContractionFamily::Similarity(maps),
            incidence,
            alphabet: Alphabet::Finite,
        };
        system.validate_incidence()?;
        Ok(system)
    }

    /// The continued-fraction system on `[0, 1]`, with edges `1..=n` when
    /// truncated and all positive integers otherwise.
    pub fn continued_fraction(
        name: impl Into<String>,
        vertex: impl Into<String>,
        truncate: Option<u64>,
        incidence: IncidenceSpec,
    ) -> Result<Self> {
        let vertex = vertex.into();
        let (edges, alphabet) = match truncate {
            Some(n) => (
                (1..=n)
                    .map(|e| EdgeRecord {
                        id: e.to_string(),
                        initial: 0,
                        terminal: 0,
                    })
                    .collect(),
                Alphabet::Finite,
            ),
            None => (Vec::new(), Alphabet::Infinite),
        };
        if alphabet == Alphabet::Infinite && matches!(incidence, IncidenceSpec::Explicit(_)) {
            return Err(GdmsError::validation(
                None,
                "an explicit incidence matrix needs a finite alphabet (use `truncate`)",
            ));
        }
        let system = GdmsSystem {
            name: name.into(),
            graph: MultiGraph::new(vec![vertex], edges)?,
            spaces: vec![VertexSpace::unit()],
            family: ContractionFamily::ContinuedFraction,
            incidence,
            alphabet,
        };
        system.validate_incidence()?;
        Ok(system)
    }

    fn validate_incidence(&self) -> Result<()> {
        let edges = self.graph.edges();
        if let IncidenceSpec::Explicit(m) = &self.incidence {
            if m.size() != edges.len() {
                return Err(GdmsError::validation(
                    None,
                    "incidence matrix size differs from the edge count",
                ));
            }
        }
        if self.incidence.needs_labels() {
            if let Some(e) = edges.iter().find(|e| e.label().is_none()) {
                return Err(GdmsError::validation(
                    None,
                    format!(
                        "incidence rule `{}` needs positive integer edge ids, found `{}`",
                        self.incidence.keyword(),
                        e.id
                    ),
                ));
            }
        }
        if self.graph.vertices().len() == 1 {
            return Ok(());
        }
        for a in 0..edges.len() {
            for b in 0..edges.len() {
                if self.allows(a, b) && edges[a].terminal != edges[b].initial {
                    return Err(GdmsError::validation(
                        None,
                        format!(
                            "A({}, {}) = 1 but t({}) = {} differs from i({}) = {}",
                            edges[a].id,
                            edges[b].id,
                            edges[a].id,
                            self.graph.vertices()[edges[a].terminal],
                            edges[b].id,
                            self.graph.vertices()[edges[b].initial]
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn spaces(&self) -> &[VertexSpace] {
        &self.spaces
    }

    pub fn family(&self) -> &ContractionFamily {
        &self.family
    }

    pub fn incidence(&self) -> &IncidenceSpec {
        &self.incidence
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn is_similarity(&self) -> bool {
        matches!(self.family, ContractionFamily::Similarity(_))
    }

    pub fn num_edges(&self) -> usize {
        self.graph.edges().len()
    }

    pub(crate) fn require_finite(&self, what: &str) -> Result<()> {
        match self.alphabet {
            Alphabet::Finite => Ok(()),
            Alphabet::Infinite => Err(GdmsError::Unsupported(format!(
                "{what} needs a finite alphabet; truncate the system first"
            ))),
        }
    }

    /// `A_ab` for edge positions of the finite head.
    pub fn allows(&self, a: usize, b: usize) -> bool {
        match &self.incidence {
            IncidenceSpec::Explicit(m) => m.get(a, b),
            IncidenceSpec::Full => true,
            rule => {
                let edges = self.graph.edges();
                match (edges[a].label(), edges[b].label()) {
                    (Some(x), Some(y)) => rule.allows_labels(x, y).unwrap_or(false),
                    _ => false,
                }
            }
        }
    }

    /// The edge graph `G_{E,A}` over the declared edges.
    pub fn edge_graph(&self) -> Result<EdgeGraph> {
        self.require_finite("the edge graph")?;
        let n = self.num_edges();
        let edges = self.graph.edges();
        let succ = match &self.incidence {
            IncidenceSpec::Full => vec![(0..n).collect(); n],
            IncidenceSpec::Explicit(_) => (0..n)
                .map(|a| (0..n).filter(|&b| self.allows(a, b)).collect())
                .collect(),
            rule => {
                // rules are local in the labels, so look successors up by label
                let by_label: HashMap<u64, usize> = edges
                    .iter()
                    .enumerate()
                    .filter_map(|(i, e)| e.label().map(|l| (l, i)))
                    .collect();
                let max_label = by_label.keys().copied().max().unwrap_or(0);
                (0..n)
                    .map(|a| {
                        let x = edges[a].label().expect("rules need labels");
                        let range = match rule {
                            IncidenceSpec::Banded(w) => x.saturating_sub(*w)..=x.saturating_add(*w).min(max_label),
                            _ => x + 1..=max_label,
                        };
                        range.filter_map(|y| by_label.get(&y).copied()).collect()
                    })
                    .collect()
            }
        };
        Ok(EdgeGraph::from_successors(succ))
    }

    /// Sub-system on the listed edge positions (sorted, deduplicated).
    pub fn restrict(&self, keep: &[usize]) -> GdmsSystem {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let family = match &self.family {
            ContractionFamily::Similarity(maps) => {
                ContractionFamily::Similarity(keep.iter().map(|&i| maps[i]).collect())
            }
            ContractionFamily::ContinuedFraction => ContractionFamily::ContinuedFraction,
        };
        GdmsSystem {
            name: self.name.clone(),
            graph: self.graph.restrict(&keep),
            spaces: self.spaces.clone(),
            family,
            incidence: self.incidence.restrict(&keep),
            alphabet: Alphabet::Finite,
        }
    }

    /// Edge positions that survive iterated removal of edges with no allowed
    /// successor. The limit set is unchanged by the removal.
    pub fn surviving_edges(&self) -> Result<Vec<usize>> {
        Ok(self.edge_graph()?.prune())
    }

    /// The system restricted to [`surviving_edges`](Self::surviving_edges).
    pub fn pruned(&self) -> Result<GdmsSystem> {
        let keep = self.surviving_edges()?;
        Ok(if keep.len() == self.num_edges() {
            self.clone()
        } else {
            self.restrict(&keep)
        })
    }

    /// Continued-fraction system restricted to labels `1..=n`.
    pub fn truncated(&self, n: u64) -> Result<GdmsSystem> {
        if self.is_similarity() {
            return Err(GdmsError::Unsupported(
                "only continued-fraction systems can be truncated".into(),
            ));
        }
        match self.alphabet {
            Alphabet::Infinite => {
                GdmsSystem::continued_fraction(&self.name, &self.graph.vertices()[0], Some(n), self.incidence.clone())
            }
            Alphabet::Finite => {
                let keep: Vec<usize> = self
                    .graph
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.label().is_some_and(|l| l <= n))
                    .map(|(i, _)| i)
                    .collect();
                Ok(self.restrict(&keep))
            }
        }
    }

    /// Map keys of a word of edge positions (see [`ContractionFamily`]).
    pub(crate) fn key(&self, edge: usize) -> u64 {
        match self.family {
            ContractionFamily::Similarity(_) => edge as u64,
            ContractionFamily::ContinuedFraction => self.graph.edges()[edge]
                .label()
                .expect("continued-fraction edges carry integer labels"),
        }
    }

    pub(crate) fn keys(&self, word: &[usize]) -> Vec<u64> {
        word.iter().map(|&e| self.key(e)).collect()
    }

    fn check_word(&self, word: &[usize]) -> Result<()> {
        self.require_finite("word evaluation")?;
        if word.is_empty() {
            return Err(GdmsError::Input("words have length at least 1".into()));
        }
        if let Some(&bad) = word.iter().find(|&&e| e >= self.num_edges()) {
            return Err(GdmsError::Input(format!("unknown edge position {bad}")));
        }
        if !word.windows(2).all(|p| self.allows(p[0], p[1])) {
            return Err(GdmsError::Input("word is not admissible".into()));
        }
        Ok(())
    }

    /// `phi_omega(x)` for `x` in the terminal vertex space of the word.
    pub fn evaluate(&self, word: &[usize], x: f64) -> Result<f64> {
        self.check_word(word)?;
        let space = self.terminal_space(word);
        if !space.contains(x) {
            return Err(GdmsError::Domain(format!(
                "{x} is outside the terminal space [{}, {}]",
                space.lo, space.hi
            )));
        }
        Ok(self.family.evaluate(&self.keys(word), x))
    }

    pub fn derivative_norm(&self, word: &[usize]) -> Result<DerivativeNorm> {
        self.check_word(word)?;
        Ok(self.family.derivative_norm(&self.keys(word)))
    }

    /// `X_{t(omega_n)}`.
    pub fn terminal_space(&self, word: &[usize]) -> &VertexSpace {
        &self.spaces[self.graph.edges()[*word.last().expect("nonempty word")].terminal]
    }

    /// `phi_omega(X_{t(omega_n)})`.
    pub fn image(&self, word: &[usize]) -> (f64, f64) {
        self.family.image(&self.keys(word), self.terminal_space(word))
    }

    /// Pairs of distinct edges with the same initial vertex whose first-level
    /// images overlap in their interiors.
    pub fn level_one_overlaps(&self) -> Vec<(usize, usize)> {
        let edges = self.graph.edges();
        let images: Vec<(f64, f64)> = (0..edges.len()).map(|e| self.image(&[e])).collect();
        let mut out = Vec::new();
        for a in 0..edges.len() {
            for b in a + 1..edges.len() {
                if edges[a].initial != edges[b].initial {
                    continue;
                }
                let (lo, hi) = (images[a].0.max(images[b].0), images[a].1.min(images[b].1));
                if hi - lo > CONTAINMENT_SLACK {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Two-step contraction bound: the supremum of `||phi'_{ab}||` over
    /// admissible pairs. Diameters of depth-`n` images shrink at least like
    /// this bound to the power `floor(n / 2)`.
    pub fn two_step_contraction(&self) -> f64 {
        match self.alphabet {
            Alphabet::Infinite => {
                // smallest admissible pair of labels gives the largest norm
                let (a, b) = match self.incidence {
                    IncidenceSpec::UpperTriangular => (1, 2),
                    _ => (1, 1),
                };
                self.family.derivative_norm(&[a, b]).value()
            }
            Alphabet::Finite => {
                let n = self.num_edges();
                let mut best: f64 = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        if self.allows(a, b) {
                            best = best.max(self.family.derivative_norm(&[self.key(a), self.key(b)]).value());
                        }
                    }
                }
                best
            }
        }
    }

    /// Largest vertex-space diameter.
    pub fn max_diameter(&self) -> f64 {
        self.spaces.iter().map(VertexSpace::diameter).fold(0.0, f64::max)
    }

    /// Single vertex and every pair of edges allowed.
    pub fn is_full_shift(&self) -> bool {
        self.alphabet == Alphabet::Finite
            && self.graph.vertices().len() == 1
            && (0..self.num_edges()).all(|a| (0..self.num_edges()).all(|b| self.allows(a, b)))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::graph::IncidenceMatrix;

    pub fn edges_on(vertex: usize, ids: &[&str]) -> Vec<EdgeRecord> {
        ids.iter()
            .map(|id| EdgeRecord {
                id: id.to_string(),
                initial: vertex,
                terminal: vertex,
            })
            .collect()
    }

    /// Single-vertex full-shift similarity system on `[0, 1]`, maps packed
    /// left to right.
    pub fn full_shift(ratios: &[f64]) -> GdmsSystem {
        let ids: Vec<String> = (0..ratios.len()).map(|i| format!("e{i}")).collect();
        let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let mut offset = 0.0;
        let maps = ratios
            .iter()
            .map(|&r| {
                let m = Similarity::new(r, offset, 1).unwrap();
                offset += r;
                m
            })
            .collect();
        GdmsSystem::similarity(
            "full",
            MultiGraph::new(vec!["v".into()], edges_on(0, &id_refs)).unwrap(),
            vec![VertexSpace::unit()],
            maps,
            IncidenceSpec::Full,
        )
        .unwrap()
    }

    /// Single vertex on `[0, 1]`, given ratios and explicit allowed pairs.
    /// Offsets are arbitrary (images may overlap).
    pub fn explicit(ratios: &[f64], pairs: &[(usize, usize)]) -> GdmsSystem {
        let ids: Vec<String> = (0..ratios.len())
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let maps = ratios.iter().map(|&r| Similarity::new(r, 0.0, 1).unwrap()).collect();
        GdmsSystem::similarity(
            "explicit",
            MultiGraph::new(vec!["v".into()], edges_on(0, &id_refs)).unwrap(),
            vec![VertexSpace::unit()],
            maps,
            IncidenceSpec::Explicit(IncidenceMatrix::from_pairs(ratios.len(), pairs.iter().copied()).unwrap()),
        )
        .unwrap()
    }

    /// Two intra-full components {a, b} and {c, d}, optionally linked by (b, c).
    pub fn two_cantor(r1: f64, r2: f64, linked: bool) -> GdmsSystem {
        let mut pairs = vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)];
        if linked {
            pairs.push((1, 2));
        }
        explicit(&[r1, r1, r2, r2], &pairs)
    }

    pub fn cf(truncate: Option<u64>, incidence: IncidenceSpec) -> GdmsSystem {
        GdmsSystem::continued_fraction("cf", "v", truncate, incidence).unwrap()
    }
}
