//! Bowen dimension, component structure theorems, the Hausdorff-measure
//! dichotomy and truncation sweeps.

use std::fmt;

use crate::error::{GdmsError, Result};
use crate::graph::{matrix_properties, scc_of_graph, IncidenceSpec, SccReport};
use crate::linalg::{compensated_sum, least_squares};
use crate::maps::ContractionFamily;
use crate::system::{Alphabet, GdmsSystem};
use crate::thermo::{partition_sum, ratios, theta, Fraction, PressureEngine, PressureValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionMethod {
    /// Root of `sum_e r_e^t = 1` for full shifts of similarities.
    MoranExact,
    SpectralBisection,
    BracketBisection,
    EmptyLimitSet,
}

impl fmt::Display for DimensionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DimensionMethod::MoranExact => "moran-exact",
            DimensionMethod::SpectralBisection => "spectral-bisection",
            DimensionMethod::BracketBisection => "bracket-bisection",
            DimensionMethod::EmptyLimitSet => "empty-limit-set",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionEstimate {
    pub lo: f64,
    pub hi: f64,
    pub method: DimensionMethod,
    pub iterations: usize,
    /// False when the pressure bracket is too wide to reach the tolerance.
    pub resolved: bool,
    /// Word length behind continued-fraction brackets, 0 otherwise.
    pub n_used: usize,
    /// For full shifts: distance between the Moran root and the spectral
    /// bisection result.
    pub cross_check: Option<f64>,
}

impl DimensionEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn empty() -> Self {
        DimensionEstimate {
            lo: 0.0,
            hi: 0.0,
            method: DimensionMethod::EmptyLimitSet,
            iterations: 0,
            resolved: true,
            n_used: 0,
            cross_check: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BowenOptions {
    pub tolerance: f64,
    /// Longest words used for continued-fraction pressure brackets.
    pub n_max: Option<usize>,
}

impl Default for BowenOptions {
    fn default() -> Self {
        BowenOptions {
            tolerance: 1e-10,
            n_max: None,
        }
    }
}

/// `P(1)` above this on a similarity system means the maps cannot be packed
/// into their spaces without overlap.
const PACKING_SLACK: f64 = 1e-12;

/// Bisection on `[lo, hi]` for the last point where `positive` holds,
/// assuming it is monotone (true then false). Returns the final pair and the
/// number of halvings.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, positive: impl Fn(f64) -> bool) -> (f64, f64, usize) {
    let mut steps = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    (lo, hi, steps)
}

/// `HD(J) = inf { t >= 0 : P(t) < 0 }` enclosed in an interval.
pub fn bowen_dimension(system: &GdmsSystem, options: &BowenOptions) -> Result<DimensionEstimate> {
    let tol = options.tolerance;
    if !(tol > 0.0) {
        return Err(GdmsError::Input(format!("tolerance {tol} must be positive")));
    }
    system.require_finite("Bowen dimension")?;
    if limit_set_is_empty(system)? {
        return Ok(DimensionEstimate::empty());
    }
    match system.family() {
        ContractionFamily::Similarity(_) => similarity_dimension(system, tol),
        ContractionFamily::ContinuedFraction => bracket_dimension(system, options),
    }
}

/// No admissible word of length `|E| + 1` means no infinite word either.
pub fn limit_set_is_empty(system: &GdmsSystem) -> Result<bool> {
    let graph = system.edge_graph()?;
    Ok(graph.is_empty() || graph.word_counts(graph.len() + 1).last() == Some(&0))
}

fn similarity_dimension(system: &GdmsSystem, tol: f64) -> Result<DimensionEstimate> {
    let engine = PressureEngine::new(system, None)?;
    let sign = |t: f64| match engine.at(t) {
        PressureValue::Bracket { lower, upper } => 0.5 * (lower + upper) > 0.0,
        PressureValue::Infinite => true,
    };
    if let PressureValue::Bracket { lower, .. } = engine.at(1.0) {
        if lower > PACKING_SLACK {
            return Err(GdmsError::validation(
                None,
                format!("P(1) = {lower} > 0: the maps are not packable into their vertex spaces"),
            ));
        }
    }
    let (lo, hi, iterations) = bisect(0.0, 1.0, tol, sign);
    let mut estimate = DimensionEstimate {
        lo,
        hi,
        method: DimensionMethod::SpectralBisection,
        iterations,
        resolved: true,
        n_used: 0,
        cross_check: None,
    };
    if system.is_full_shift() {
        let r = ratios(system);
        let moran = |t: f64| compensated_sum(r.iter().map(|x| x.powf(t))) > 1.0;
        let (mlo, mhi, miter) = bisect(0.0, 1.0, tol, moran);
        estimate.cross_check = Some((0.5 * (mlo + mhi) - estimate.midpoint()).abs());
        estimate.lo = mlo;
        estimate.hi = mhi;
        estimate.iterations = miter;
        estimate.method = DimensionMethod::MoranExact;
    }
    Ok(estimate)
}

fn bracket_dimension(system: &GdmsSystem, options: &BowenOptions) -> Result<DimensionEstimate> {
    let engine = PressureEngine::new(system, options.n_max)?;
    let bounds = |t: f64| match engine.at(t) {
        PressureValue::Bracket { lower, upper } => (lower, upper),
        PressureValue::Infinite => (f64::INFINITY, f64::INFINITY),
    };
    let tol = options.tolerance;
    // h_lo: last t with P_lower(t) > 0; h_hi: first t with P_upper(t) < 0
    let (h_lo, it_lo) = if bounds(0.0).0 > 0.0 {
        let (lo, _, it) = bisect(0.0, 1.0, tol, |t| bounds(t).0 > 0.0);
        (lo, it)
    } else {
        (0.0, 0)
    };
    let (h_hi, it_hi) = if bounds(1.0).1 >= 0.0 {
        (1.0, 0)
    } else {
        let (_, hi, it) = bisect(0.0, 1.0, tol, |t| bounds(t).1 >= 0.0);
        (hi, it)
    };
    Ok(DimensionEstimate {
        lo: h_lo,
        hi: h_hi.max(h_lo),
        method: DimensionMethod::BracketBisection,
        iterations: it_lo + it_hi,
        resolved: h_hi - h_lo <= tol,
        n_used: engine.n_used(),
        cross_check: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentDimension {
    pub edges: Vec<usize>,
    pub estimate: DimensionEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentDimensions {
    pub components: Vec<ComponentDimension>,
    pub overall: DimensionEstimate,
    /// Largest component midpoint (0 without components).
    pub max_component: f64,
    /// `|overall midpoint - max_component|`.
    pub difference: f64,
}

/// Dimension of every strongly connected component and of the whole system.
pub fn component_dimensions(system: &GdmsSystem, options: &BowenOptions) -> Result<ComponentDimensions> {
    let scc = scc_of_graph(&system.edge_graph()?);
    component_dimensions_with(system, &scc, options)
}

fn component_dimensions_with(
    system: &GdmsSystem,
    scc: &SccReport,
    options: &BowenOptions,
) -> Result<ComponentDimensions> {
    let overall = bowen_dimension(system, options)?;
    let components = scc
        .components
        .iter()
        .map(|c| {
            Ok(ComponentDimension {
                edges: c.clone(),
                estimate: bowen_dimension(&system.restrict(c), options)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_component = components.iter().map(|c| c.estimate.midpoint()).fold(0.0, f64::max);
    Ok(ComponentDimensions {
        difference: (overall.midpoint() - max_component).abs(),
        components,
        overall,
        max_component,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HMeasureVerdict {
    FiniteHMeasure,
    InfiniteHMeasure,
    NotApplicable,
}

impl fmt::Display for HMeasureVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HMeasureVerdict::FiniteHMeasure => "FiniteHMeasure",
            HMeasureVerdict::InfiniteHMeasure => "InfiniteHMeasure",
            HMeasureVerdict::NotApplicable => "NotApplicable",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    pub tolerance: f64,
    pub n_min: usize,
    pub n_max: usize,
    /// Word length for continued-fraction pressure brackets.
    pub pressure_n_max: Option<usize>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tolerance: 1e-13,
            n_min: 1,
            n_max: 30,
            pressure_n_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureClassification {
    pub verdict: HMeasureVerdict,
    pub dimension: DimensionEstimate,
    pub components: Vec<ComponentDimension>,
    /// Indices into `components` whose interval meets the overall one.
    pub maximal: Vec<usize>,
    /// Ordered pairs of distinct maximal components joined by an admissible word.
    pub communicating_pairs: Vec<(usize, usize)>,
    /// `(n, Z_n(h))` at the midpoint `h` of `dimension`.
    pub evidence: Vec<(usize, f64)>,
    pub slope: f64,
    pub residual: f64,
    /// Per component `i`: sums of `||phi'_omega||^h` over words of length `n`
    /// with at least one letter in `C_i`, over the evidence range.
    pub component_sums: Vec<Vec<f64>>,
    /// The same over words made only of isolated edges.
    pub isolated_sums: Vec<f64>,
}

/// Finite versus infinite `h`-dimensional Hausdorff measure of the limit set,
/// decided by communication between maximal components, with `Z_n(h)` as
/// evidence.
pub fn classify_hausdorff_measure(system: &GdmsSystem, options: &ClassifyOptions) -> Result<MeasureClassification> {
    if options.n_min == 0 || options.n_min > options.n_max {
        return Err(GdmsError::Input(format!(
            "evidence range {}..={} is empty or starts at 0",
            options.n_min, options.n_max
        )));
    }
    system.require_finite("classification")?;
    if limit_set_is_empty(system)? {
        return Err(GdmsError::NotApplicable("the limit set is empty".into()));
    }
    let bowen = BowenOptions {
        tolerance: options.tolerance,
        n_max: options.pressure_n_max,
    };
    let scc = scc_of_graph(&system.edge_graph()?);
    let dims = component_dimensions_with(system, &scc, &bowen)?;
    let tol = options.tolerance;
    let overall = dims.overall;
    let maximal: Vec<usize> = dims
        .components
        .iter()
        .enumerate()
        .filter(|(_, c)| c.estimate.hi >= overall.lo - tol && c.estimate.lo <= overall.hi + tol)
        .map(|(i, _)| i)
        .collect();
    let communicating_pairs: Vec<(usize, usize)> = scc
        .communication
        .iter()
        .copied()
        .filter(|(i, j)| maximal.contains(i) && maximal.contains(j))
        .collect();
    let verdict = if communicating_pairs.is_empty() {
        HMeasureVerdict::FiniteHMeasure
    } else {
        HMeasureVerdict::InfiniteHMeasure
    };

    let h = overall.midpoint();
    let range: Vec<usize> = (options.n_min..=options.n_max).collect();
    let sums_over = |s: &GdmsSystem| -> Result<Vec<f64>> {
        if s.num_edges() == 0 {
            return Ok(vec![0.0; range.len()]);
        }
        range.iter().map(|&n| Ok(partition_sum(s, n, h)?.midpoint())).collect()
    };
    let z = sums_over(system)?;
    let evidence: Vec<(usize, f64)> = range.iter().copied().zip(z.iter().copied()).collect();
    let xs: Vec<f64> = range.iter().map(|&n| n as f64).collect();
    let (slope, _, residual) = least_squares(&xs, &z);

    let mut component_sums = Vec::new();
    for comp in &scc.components {
        let rest: Vec<usize> = (0..system.num_edges()).filter(|e| !comp.contains(e)).collect();
        let without = sums_over(&system.restrict(&rest))?;
        component_sums.push(z.iter().zip(&without).map(|(a, b)| a - b).collect());
    }
    let isolated_sums = sums_over(&system.restrict(&scc.isolated))?;

    Ok(MeasureClassification {
        verdict,
        dimension: overall,
        components: dims.components,
        maximal,
        communicating_pairs,
        evidence,
        slope,
        residual,
        component_sums,
        isolated_sums,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub size: u64,
    pub estimate: DimensionEstimate,
    pub irreducible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSweep {
    pub entries: Vec<SweepEntry>,
    /// `lo_i <= hi_{i+1} + 2 tol` along the sweep.
    pub monotone: bool,
    /// Enclosure of the supremum over finite subsystems.
    pub sup: (f64, f64),
    pub theta: Fraction,
    /// Every ordered pair of vertices of the largest truncation is joined by
    /// an edge.
    pub vertex_hypothesis: bool,
    pub warnings: Vec<String>,
}

/// Dimensions of the continued-fraction subsystems on labels `1..=N` for
/// each `N` in `sizes`.
pub fn truncation_sweep(system: &GdmsSystem, sizes: &[u64], options: &BowenOptions) -> Result<TruncationSweep> {
    if system.is_similarity() {
        return Err(GdmsError::Unsupported(
            "truncation sweeps need the continued-fraction family".into(),
        ));
    }
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GdmsError::Input(
            "sizes must be positive and strictly increasing".into(),
        ));
    }
    let mut entries = Vec::new();
    let mut vertex_hypothesis = false;
    for &size in sizes {
        let head = system.truncated(size)?;
        let estimate = bowen_dimension(&head, options)?;
        let irreducible = head.num_edges() > 0 && matrix_properties(&head)?.irreducible.value;
        vertex_hypothesis = head.graph().has_all_vertex_connections();
        entries.push(SweepEntry {
            size,
            estimate,
            irreducible,
        });
    }
    let slack = 2.0 * options.tolerance;
    let monotone = entries.windows(2).all(|w| w[0].estimate.lo <= w[1].estimate.hi + slack);
    let theta = theta(system)?;
    // no finite subsystem of a strictly increasing rule carries a cycle
    let sup = match (system.incidence(), system.alphabet()) {
        (IncidenceSpec::UpperTriangular, _) => (0.0, 0.0),
        _ => (entries.iter().map(|e| e.estimate.lo).fold(0.0, f64::max), 1.0),
    };
    let mut warnings = Vec::new();
    if !monotone {
        warnings.push("dimensions decrease along the sweep beyond tolerance".to_string());
    }
    if system.alphabet() == Alphabet::Infinite && sup.1 < theta.to_f64() {
        warnings.push(format!(
            "sup over finite subsystems = {} < theta = {}",
            sup.1,
            theta.to_f64()
        ));
    }
    if entries.iter().any(|e| !e.irreducible) {
        warnings.push("some truncations are not irreducible".to_string());
    }
    Ok(TruncationSweep {
        entries,
        monotone,
        sup,
        theta,
        vertex_hypothesis,
        warnings,
    })
}
