//! Random limit-set points through the coding map, and box counting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GdmsError, Result};
use crate::linalg::least_squares;
use crate::system::GdmsSystem;

/// Name of the generator recorded alongside samples.
pub const GENERATOR: &str = "ChaCha8 (stream = point index)";

const RETRY_CAP: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    /// Edge positions in the sampled system.
    pub word: Vec<usize>,
    /// `phi_word(X_{t(last)})`.
    pub interval: (f64, f64),
    pub midpoint: f64,
    /// Initial vertex of the word, whose space contains the point.
    pub vertex: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitPointSample {
    pub seed: u64,
    pub depth: usize,
    pub points: Vec<SamplePoint>,
}

impl LimitPointSample {
    /// Largest interval diameter, which bounds the distance from each
    /// midpoint to the limit set.
    pub fn error_bound(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.interval.1 - p.interval.0)
            .fold(0.0, f64::max)
    }
}

/// Draws `count` admissible words of length `depth` (uniform first edge,
/// then uniform allowed successors, both among edges that survive pruning) and maps them into the limit set.
///
/// Point `i` uses its own ChaCha8 stream `i` under `seed`, so the output is
/// reproducible and independent of evaluation order.
pub fn sample_points(system: &GdmsSystem, count: usize, depth: usize, seed: u64) -> Result<LimitPointSample> {
    if depth == 0 {
        return Err(GdmsError::Input("depth must be at least 1".into()));
    }
    let graph = system.edge_graph()?;
    let surviving = system.surviving_edges()?;
    if surviving.is_empty() {
        return Err(GdmsError::NotApplicable("the limit set is empty".into()));
    }
    // successors restricted to edges that begin arbitrarily long words
    let mut alive = vec![false; graph.len()];
    surviving.iter().for_each(|&e| alive[e] = true);
    let live: Vec<Vec<usize>> = (0..graph.len())
        .map(|a| graph.successors(a).iter().copied().filter(|&b| alive[b]).collect())
        .collect();
    let mut points = Vec::with_capacity(count);
    for index in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let word = (0..RETRY_CAP)
            .find_map(|_| {
                let mut word = vec![surviving[rng.gen_range(0..surviving.len())]];
                while word.len() < depth {
                    let succ = &live[*word.last().unwrap()];
                    if succ.is_empty() {
                        return None;
                    }
                    word.push(succ[rng.gen_range(0..succ.len())]);
                }
                Some(word)
            })
            .ok_or_else(|| GdmsError::ResourceLimit {
                what: format!("dead-end retries for point {index}"),
                bound: RETRY_CAP as u128,
            })?;
        let interval = system.image(&word);
        points.push(SamplePoint {
            vertex: system.graph().edges()[word[0]].initial,
            midpoint: 0.5 * (interval.0 + interval.1),
            interval,
            word,
        });
    }
    Ok(LimitPointSample { seed, depth, points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCount {
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Least-squares slope of `ln N(eps)` against `ln(1 / eps)`.
    pub slope: f64,
    pub residual: f64,
}

pub const MIN_BOX_POINTS: usize = 1000;

/// Box counts of `(vertex, x)` points on grids anchored at `anchors[vertex]`.
///
/// Scales must be strictly decreasing and at least ten times `error_bound`.
pub fn box_dimension(points: &[(usize, f64)], anchors: &[f64], error_bound: f64, scales: &[f64]) -> Result<BoxCount> {
    if points.len() < MIN_BOX_POINTS {
        return Err(GdmsError::Input(format!(
            "box counting needs at least {MIN_BOX_POINTS} points, got {}",
            points.len()
        )));
    }
    if scales.len() < 2 || scales.windows(2).any(|w| w[1] >= w[0]) || scales.iter().any(|&s| !(s > 0.0)) {
        return Err(GdmsError::Input(
            "scales must be positive and strictly decreasing".into(),
        ));
    }
    if let Some(&s) = scales.iter().find(|&&s| s < 10.0 * error_bound) {
        return Err(GdmsError::Input(format!(
            "scale {s} is finer than ten times the point error bound {error_bound}"
        )));
    }
    let mut counts = Vec::with_capacity(scales.len());
    for &eps in scales {
        let mut boxes: Vec<(usize, i64)> = points
            .iter()
            .map(|&(v, x)| (v, ((x - anchors[v]) / eps).floor() as i64))
            .collect();
        boxes.sort_unstable();
        boxes.dedup();
        counts.push(boxes.len());
    }
    let xs: Vec<f64> = scales.iter().map(|s| -s.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, _, residual) = least_squares(&xs, &ys);
    Ok(BoxCount {
        scales: scales.to_vec(),
        counts,
        slope,
        residual,
    })
}

impl LimitPointSample {
    /// Box counts of the sample, anchored at the vertex-space lower ends.
    pub fn box_dimension(&self, system: &GdmsSystem, scales: &[f64]) -> Result<BoxCount> {
        let anchors: Vec<f64> = system.spaces().iter().map(|s| s.lo).collect();
        let points: Vec<(usize, f64)> = self.points.iter().map(|p| (p.vertex, p.midpoint)).collect();
        box_dimension(&points, &anchors, self.error_bound(), scales)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::IncidenceSpec;
    use crate::system::fixtures::*;
    use proptest::prelude::*;

    fn in_cantor_set(x: f64, depth: u32) -> bool {
        // every ternary digit of the level-depth interval is 0 or 2
        let mut y = x;
        for _ in 0..depth {
            y *= 3.0;
            let d = y.floor();
            if d == 1.0 {
                return false;
            }
            y -= d;
        }
        true
    }

    fn cantor() -> GdmsSystem {
        let text = "system cantor\nspace v 0 1\nedge a v v similarity 1/3 0 1\nedge b v v similarity 1/3 2/3 1\nincidence full\n";
        crate::specfile::parse_spec(text).unwrap().system
    }

    #[test]
    fn cantor_points_lie_near_the_cantor_set() {
        let s = cantor();
        let sample = sample_points(&s, 200, 20, 7).unwrap();
        for p in &sample.points {
            assert!(p.interval.1 - p.interval.0 <= 3f64.powi(-20) + 1e-15);
            // the midpoint sits strictly inside a level-12 construction interval
            assert!(in_cantor_set(p.midpoint, 12), "{}", p.midpoint);
        }
    }

    #[test]
    fn golden_point() {
        let s = cf(Some(1), IncidenceSpec::Full);
        let sample = sample_points(&s, 5, 40, 1).unwrap();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!(sample.points.iter().all(|p| (p.midpoint - g).abs() < 1e-12));
    }

    #[test]
    fn same_seed_same_points() {
        let s = cf(Some(3), IncidenceSpec::Banded(1));
        assert_eq!(
            sample_points(&s, 50, 10, 3).unwrap(),
            sample_points(&s, 50, 10, 3).unwrap()
        );
        assert_ne!(
            sample_points(&s, 50, 10, 3).unwrap(),
            sample_points(&s, 50, 10, 4).unwrap()
        );
        // a prefix of the sample does not depend on the count
        let short = sample_points(&s, 10, 10, 3).unwrap();
        assert_eq!(short.points[..], sample_points(&s, 50, 10, 3).unwrap().points[..10]);
    }

    #[test]
    fn empty_limit_set_cannot_be_sampled() {
        let up = cf(Some(5), IncidenceSpec::UpperTriangular);
        assert!(matches!(sample_points(&up, 10, 3, 0), Err(GdmsError::NotApplicable(_))));
    }

    #[test]
    fn box_slopes() {
        let s = cantor();
        let sample = sample_points(&s, 10_000, 25, 11).unwrap();
        let scales: Vec<f64> = (3..=8).map(|k| 3f64.powi(-k)).collect();
        let b = sample.box_dimension(&s, &scales).unwrap();
        assert_eq!(b.counts, (3..=8).map(|k| 1usize << k).collect::<Vec<_>>());
        assert!((b.slope - 2f64.ln() / 3f64.ln()).abs() < 0.05);

        let half = crate::specfile::parse_spec(
            "system halves\nspace v 0 1\nedge a v v similarity 1/2 0 1\nedge b v v similarity 1/2 1/2 1\nincidence full\n",
        )
        .unwrap()
        .system;
        let sample = sample_points(&half, 10_000, 30, 5).unwrap();
        let scales: Vec<f64> = (3..=8).map(|k| 2f64.powi(-k)).collect();
        assert!((sample.box_dimension(&half, &scales).unwrap().slope - 1.0).abs() < 0.05);

        let point = cf(Some(1), IncidenceSpec::Full);
        let sample = sample_points(&point, 1000, 60, 5).unwrap();
        let scales: Vec<f64> = (2..=6).map(|k| 10f64.powi(-k)).collect();
        assert!(sample.box_dimension(&point, &scales).unwrap().slope.abs() < 0.05);
    }

    #[test]
    fn box_preconditions() {
        let pts = vec![(0, 0.5); 999];
        assert!(box_dimension(&pts, &[0.0], 0.0, &[0.1, 0.01]).is_err());
        let pts = vec![(0, 0.5); 1000];
        assert!(box_dimension(&pts, &[0.0], 0.01, &[0.1, 0.05]).is_err());
        assert!(box_dimension(&pts, &[0.0], 0.0, &[0.01, 0.1]).is_err());
        assert!(box_dimension(&pts, &[0.0], 0.001, &[0.1, 0.01]).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn prefixes_nest(seed in any::<u64>(), n in 2u64..6) {
            let s = cf(Some(n), IncidenceSpec::Banded(1));
            let sample = sample_points(&s, 20, 12, seed).unwrap();
            for p in &sample.points {
                for k in 1..p.word.len() {
                    let outer = s.image(&p.word[..k]);
                    let inner = s.image(&p.word[..k + 1]);
                    prop_assert!(outer.0 <= inner.0 + 1e-15 && inner.1 <= outer.1 + 1e-15);
                }
                // the coding map does not care where in the terminal space we start
                let space = s.terminal_space(&p.word);
                let a = s.evaluate(&p.word, space.lo).unwrap();
                let b = s.evaluate(&p.word, space.hi).unwrap();
                let d = p.interval.1 - p.interval.0;
                prop_assert!((a - p.midpoint).abs() <= d && (b - p.midpoint).abs() <= d);
                let bound = s.two_step_contraction().powi((p.word.len() / 2) as i32) * s.max_diameter();
                prop_assert!(d <= bound * (1.0 + 1e-12));
            }
        }
    }
}
