//! Partition sums, pressure brackets, finiteness parameters and conformal
//! cylinder measures.

use std::fmt;

use crate::error::{GdmsError, Result};
use crate::graph::{scc_of_graph, word_limit, EdgeGraph, IncidenceSpec};
use crate::linalg::{
    compensated_sum, perron_irreducible, spectral_radius_blocks, CompensatedSum, Matrix, SpectralBracket,
};
use crate::maps::{ContractionFamily, NormState};
use crate::system::{Alphabet, GdmsSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMethod {
    Enumeration,
    TransferMatrix,
    RuleAnalytic,
}

impl fmt::Display for SumMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SumMethod::Enumeration => "enumeration",
            SumMethod::TransferMatrix => "transfer-matrix",
            SumMethod::RuleAnalytic => "rule-analytic",
        })
    }
}

/// `Z_n(t)` enclosed in `[lower, upper]`, also kept as logarithms so that
/// very large or very small sums stay representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSum {
    pub n: usize,
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
    pub method: SumMethod,
}

impl PartitionSum {
    fn exact(n: usize, t: f64, ln: f64, method: SumMethod) -> Self {
        PartitionSum {
            n,
            t,
            lower: ln.exp(),
            upper: ln.exp(),
            ln_lower: ln,
            ln_upper: ln,
            method,
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(GdmsError::Input(format!("t = {t} must be nonnegative")));
    }
    Ok(())
}

/// `Z_n(t)` over the declared edges, by the preferred method for the system:
/// transfer matrix for similarities, enumeration for finite continued-fraction
/// systems, closed-form bounds for infinite alphabets.
pub fn partition_sum(system: &GdmsSystem, n: usize, t: f64) -> Result<PartitionSum> {
    let method = match (system.alphabet(), system.is_similarity()) {
        (Alphabet::Infinite, _) => SumMethod::RuleAnalytic,
        (Alphabet::Finite, true) => SumMethod::TransferMatrix,
        (Alphabet::Finite, false) => SumMethod::Enumeration,
    };
    partition_sum_with(system, n, t, method)
}

pub fn partition_sum_with(system: &GdmsSystem, n: usize, t: f64, method: SumMethod) -> Result<PartitionSum> {
    check_t(t)?;
    if n == 0 {
        return Err(GdmsError::Input("n must be at least 1".into()));
    }
    match method {
        SumMethod::Enumeration => {
            let graph = system.edge_graph()?;
            let table = LogNormTable::build(system, &graph, n, word_limit())?;
            Ok(PartitionSum::exact(n, t, table.ln_z(n, t), method))
        }
        SumMethod::TransferMatrix => {
            if !system.is_similarity() {
                return Err(GdmsError::Unsupported(
                    "transfer-matrix sums need a similarity family".into(),
                ));
            }
            let graph = system.edge_graph()?;
            Ok(PartitionSum::exact(n, t, ln_transfer_sum(system, &graph, n, t), method))
        }
        SumMethod::RuleAnalytic => {
            if system.alphabet() != Alphabet::Infinite {
                return Err(GdmsError::Unsupported(
                    "closed-form sums apply to infinite alphabets".into(),
                ));
            }
            let (ln_lower, ln_upper) = rule_partition_bounds(system.incidence(), n, t)?;
            Ok(PartitionSum {
                n,
                t,
                lower: ln_lower.exp(),
                upper: ln_upper.exp(),
                ln_lower,
                ln_upper,
                method,
            })
        }
    }
}

/// Similarity ratios `r_e`.
pub(crate) fn ratios(system: &GdmsSystem) -> Vec<f64> {
    match system.family() {
        ContractionFamily::Similarity(maps) => maps.iter().map(|m| m.ratio).collect(),
        ContractionFamily::ContinuedFraction => unreachable!("similarity family expected"),
    }
}

/// `B(t)_{ab} = A_{ab} r_b^t`.
pub fn transfer_matrix(system: &GdmsSystem, t: f64) -> Result<Matrix> {
    if !system.is_similarity() {
        return Err(GdmsError::Unsupported(
            "transfer matrices need a similarity family".into(),
        ));
    }
    let graph = system.edge_graph()?;
    let w: Vec<f64> = ratios(system).iter().map(|r| r.powf(t)).collect();
    Ok(Matrix::from_fn(graph.len(), |a, b| {
        if graph.allows(a, b) {
            w[b]
        } else {
            0.0
        }
    }))
}

/// `ln sum_a r_a^t (B(t)^{n-1} 1)_a`, rescaling the iterate every step.
fn ln_transfer_sum(system: &GdmsSystem, graph: &EdgeGraph, n: usize, t: f64) -> f64 {
    let w: Vec<f64> = ratios(system).iter().map(|r| r.powf(t)).collect();
    let mut v = vec![1.0; graph.len()];
    let mut ln_scale = 0.0;
    for _ in 1..n {
        v = (0..graph.len())
            .map(|a| compensated_sum(graph.successors(a).iter().map(|&b| w[b] * v[b])))
            .collect();
        let m = v.iter().cloned().fold(0.0, f64::max);
        if m == 0.0 {
            return f64::NEG_INFINITY;
        }
        v.iter_mut().for_each(|x| *x /= m);
        ln_scale += m.ln();
    }
    let total = compensated_sum(w.iter().zip(&v).map(|(a, b)| a * b));
    ln_scale + total.ln()
}

/// `ln ||phi'_omega||` for every admissible word of each length `1..=n_max`,
/// in lexicographic order.
pub(crate) struct LogNormTable {
    levels: Vec<Vec<f64>>,
}

impl LogNormTable {
    pub(crate) fn build(system: &GdmsSystem, graph: &EdgeGraph, n_max: usize, limit: u128) -> Result<Self> {
        let counts = graph.word_counts(n_max);
        let total = counts.iter().fold(0u128, |a, &c| a.saturating_add(c));
        if total > limit {
            return Err(GdmsError::ResourceLimit {
                what: format!("{total} admissible words of length at most {n_max}"),
                bound: limit,
            });
        }
        let mut levels: Vec<Vec<f64>> = counts.iter().map(|&c| Vec::with_capacity(c as usize)).collect();
        let family = system.family();
        let keys: Vec<u64> = (0..graph.len()).map(|e| system.key(e)).collect();
        // Depth-first, so each level comes out in lexicographic order.
        let mut stack: Vec<(usize, usize, NormState)> = Vec::new();
        for root in 0..graph.len() {
            let state = family.extend(family.empty_state(), keys[root]);
            levels[0].push(state.ln_norm());
            if n_max > 1 {
                stack.push((root, 0, state));
            }
            while let Some(&mut (edge, ref mut pos, state)) = stack.last_mut() {
                let succ = graph.successors(edge);
                if *pos == succ.len() {
                    stack.pop();
                    continue;
                }
                let b = succ[*pos];
                *pos += 1;
                let next = family.extend(state, keys[b]);
                let depth = stack.len() + 1;
                levels[depth - 1].push(next.ln_norm());
                if depth < n_max {
                    stack.push((b, 0, next));
                }
            }
        }
        Ok(LogNormTable { levels })
    }

    pub(crate) fn n_max(&self) -> usize {
        self.levels.len()
    }

    /// `ln Z_n(t)`; `-inf` when there are no words of length `n`.
    pub(crate) fn ln_z(&self, n: usize, t: f64) -> f64 {
        let level = &self.levels[n - 1];
        if level.is_empty() {
            return f64::NEG_INFINITY;
        }
        let top = level.iter().map(|&l| t * l).fold(f64::NEG_INFINITY, f64::max);
        let mut acc = CompensatedSum::new();
        level.iter().for_each(|&l| acc.add((t * l - top).exp()));
        top + acc.value().ln()
    }
}

/// Lower and upper bounds for the Riemann zeta function at `s > 1`.
pub(crate) fn zeta_bracket(s: f64) -> (f64, f64) {
    const N: usize = 1000;
    let head = compensated_sum((1..=N).rev().map(|k| (k as f64).powf(-s)));
    let lo = head + ((N + 1) as f64).powf(1.0 - s) / (s - 1.0);
    let hi = head + (N as f64).powf(1.0 - s) / (s - 1.0);
    (lo, hi)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Closed-form bounds on `ln Z_n(t)` for the continued-fraction family on
/// all positive integers. Derivative norms satisfy
/// `prod a_i <= q_n <= prod (a_i + 1)`.
fn rule_partition_bounds(rule: &IncidenceSpec, n: usize, t: f64) -> Result<(f64, f64)> {
    let theta_n = rule_theta_n(rule, n)?;
    if t <= theta_n.to_f64() {
        return Err(GdmsError::Divergent(format!(
            "Z_{n}({t}) is infinite: t does not exceed theta_{n} = {theta_n}"
        )));
    }
    let nf = n as f64;
    Ok(match rule {
        IncidenceSpec::Full => {
            let (zl, zh) = zeta_bracket(2.0 * t);
            (nf * (zl - 1.0).ln(), nf * zh.ln())
        }
        IncidenceSpec::Banded(w) => {
            let w = *w as f64;
            let (zl, zh) = zeta_bracket(2.0 * nf * t);
            // constant words k^n from below; grouping by first letter from above
            (
                (zl - 1.0).ln(),
                (nf - 1.0) * (2.0 * w + 1.0).ln() + ((nf - 1.0) * w + zh).ln(),
            )
        }
        IncidenceSpec::UpperTriangular => {
            let (zl, zh) = zeta_bracket(2.0 * t);
            let head: f64 = (1..=n).map(|j| (j as f64).powf(-2.0 * t)).sum();
            // words (1, 2, .., n-1, k) with k >= n
            let tail = -2.0 * t * ln_factorial(n) + (zl - head).max(f64::MIN_POSITIVE).ln();
            let single = -2.0 * t * ln_factorial(n + 1);
            (tail.max(single), nf * zh.ln() - ln_factorial(n))
        }
        IncidenceSpec::Explicit(_) => unreachable!("explicit incidence needs a finite alphabet"),
    })
}

/// Exact nonnegative rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        let g = gcd(num, den).max(1);
        Fraction {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn rule_theta_n(rule: &IncidenceSpec, n: usize) -> Result<Fraction> {
    match rule {
        IncidenceSpec::Full | IncidenceSpec::UpperTriangular => Ok(Fraction::new(1, 2)),
        IncidenceSpec::Banded(_) => Ok(Fraction::new(1, 2 * n as u64)),
        IncidenceSpec::Explicit(_) => Err(GdmsError::Unsupported(
            "finiteness parameters of explicit infinite matrices".into(),
        )),
    }
}

fn rule_theta(rule: &IncidenceSpec) -> Result<Fraction> {
    match rule {
        IncidenceSpec::Full | IncidenceSpec::UpperTriangular => Ok(Fraction::new(1, 2)),
        IncidenceSpec::Banded(_) => Ok(Fraction::new(0, 1)),
        IncidenceSpec::Explicit(_) => rule_theta_n(rule, 1),
    }
}

/// `theta` of a system as a float (0 for finite alphabets).
pub fn theta(system: &GdmsSystem) -> Result<Fraction> {
    match system.alphabet() {
        Alphabet::Finite => Ok(Fraction::new(0, 1)),
        Alphabet::Infinite => rule_theta(system.incidence()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessSide {
    /// `t > theta_n`: partial sums stay below a finite bound.
    Convergent,
    /// `t < theta_n`: partial sums exceed a lower bound that grows without
    /// limit in the number of labels.
    Divergent,
}

/// Numeric check of one side of a `theta_n` verdict using the partial sum of
/// `Z_n(t)` over labels `1..=labels`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaWitness {
    pub n: usize,
    pub t: f64,
    pub labels: u64,
    pub partial_sum: f64,
    pub bound: f64,
    pub side: WitnessSide,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinitenessReport {
    pub theta: Fraction,
    pub per_n: Vec<(usize, Fraction)>,
    pub justification: String,
    pub witnesses: Vec<ThetaWitness>,
}

const WITNESS_WORDS: f64 = 2e5;
const WITNESS_OFFSET: f64 = 0.05;

/// `theta` and `theta_n` for the requested `n`, with numeric witnesses for
/// infinite alphabets.
pub fn finiteness_parameters(system: &GdmsSystem, n_list: &[usize]) -> Result<FinitenessReport> {
    if n_list.contains(&0) {
        return Err(GdmsError::Input("n must be at least 1".into()));
    }
    if system.alphabet() == Alphabet::Finite {
        return Ok(FinitenessReport {
            theta: Fraction::new(0, 1),
            per_n: n_list.iter().map(|&n| (n, Fraction::new(0, 1))).collect(),
            justification: "finite sums: every Z_n(t) is finite for t >= 0".into(),
            witnesses: Vec::new(),
        });
    }
    let rule = system.incidence();
    let justification = match rule {
        IncidenceSpec::Full => "sum over e of e^(-2t) converges iff t > 1/2; Z_n is comparable to its n-th power".into(),
        IncidenceSpec::Banded(w) => format!(
            "band |i-j| <= {w} forces all letters of a word within {w}(n-1) of each other, so Z_n(t) is comparable to sum_k k^(-2nt): theta_n = 1/(2n), theta = 0"
        ),
        IncidenceSpec::UpperTriangular => {
            "strictly increasing words: Z_n(t) lies between multiples of sum_k k^(-2t) and zeta(2t)^n / n!, so theta_n = theta = 1/2".into()
        }
        IncidenceSpec::Explicit(_) => unreachable!("explicit incidence needs a finite alphabet"),
    };
    let mut per_n = Vec::new();
    let mut witnesses = Vec::new();
    for &n in n_list {
        let theta_n = rule_theta_n(rule, n)?;
        per_n.push((n, theta_n));
        let labels = witness_labels(rule, n);
        let th = theta_n.to_f64();
        for (side, t) in [
            (WitnessSide::Convergent, th + WITNESS_OFFSET),
            (WitnessSide::Divergent, th - WITNESS_OFFSET),
        ] {
            if t < 0.0 {
                continue;
            }
            let partial_sum = rule_partial_sum(rule, n, t, labels);
            let bound = witness_bound(rule, n, t, labels, side);
            let holds = match side {
                WitnessSide::Convergent => partial_sum <= bound,
                WitnessSide::Divergent => partial_sum >= bound,
            };
            witnesses.push(ThetaWitness {
                n,
                t,
                labels,
                partial_sum,
                bound,
                side,
                holds,
            });
        }
    }
    Ok(FinitenessReport {
        theta: rule_theta(rule)?,
        per_n,
        justification,
        witnesses,
    })
}

/// Labels allowed to follow `x` among `1..=labels`.
fn rule_successors(rule: &IncidenceSpec, x: u64, labels: u64) -> std::ops::RangeInclusive<u64> {
    match rule {
        IncidenceSpec::Full => 1..=labels,
        IncidenceSpec::Banded(w) => x.saturating_sub(*w).max(1)..=(x + w).min(labels),
        IncidenceSpec::UpperTriangular => x + 1..=labels,
        IncidenceSpec::Explicit(_) => unreachable!("explicit incidence always has a finite alphabet"),
    }
}

/// `Z_n(t)` restricted to words with letters in `1..=labels`.
fn rule_partial_sum(rule: &IncidenceSpec, n: usize, t: f64, labels: u64) -> f64 {
    fn walk(
        rule: &IncidenceSpec,
        n: usize,
        t: f64,
        labels: u64,
        state: NormState,
        last: u64,
        depth: usize,
        acc: &mut CompensatedSum,
    ) {
        let cf = ContractionFamily::ContinuedFraction;
        for b in rule_successors(rule, last, labels) {
            let next = cf.extend(state, b);
            if depth + 1 == n {
                acc.add((t * next.ln_norm()).exp());
            } else {
                walk(rule, n, t, labels, next, b, depth + 1, acc);
            }
        }
    }
    let cf = ContractionFamily::ContinuedFraction;
    let mut acc = CompensatedSum::new();
    for a in 1..=labels {
        let state = cf.extend(cf.empty_state(), a);
        if n == 1 {
            acc.add((t * state.ln_norm()).exp());
        } else {
            walk(rule, n, t, labels, state, a, 1, &mut acc);
        }
    }
    acc.value()
}

/// Label cutoff giving roughly [`WITNESS_WORDS`] words of length `n`.
fn witness_labels(rule: &IncidenceSpec, n: usize) -> u64 {
    let labels = match rule {
        IncidenceSpec::Full => WITNESS_WORDS.powf(1.0 / n as f64).floor() as u64,
        IncidenceSpec::Banded(w) => (WITNESS_WORDS / ((2 * w + 1) as f64).powi(n as i32 - 1)).floor() as u64,
        IncidenceSpec::UpperTriangular => {
            let mut l = n as u64;
            while binomial(l + 1, n as u64) <= WITNESS_WORDS {
                l += 1;
            }
            l
        }
        IncidenceSpec::Explicit(_) => 1,
    };
    labels.max(n as u64 + 1)
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `int_a^b x^(-s) dx`.
fn power_integral(a: f64, b: f64, s: f64) -> f64 {
    if (s - 1.0).abs() < 1e-15 {
        (b / a).ln()
    } else {
        (b.powf(1.0 - s) - a.powf(1.0 - s)) / (1.0 - s)
    }
}

fn witness_bound(rule: &IncidenceSpec, n: usize, t: f64, labels: u64, side: WitnessSide) -> f64 {
    let nf = n as f64;
    let top = labels as f64 + 2.0;
    match (rule, side) {
        (IncidenceSpec::Full, WitnessSide::Convergent) => zeta_bracket(2.0 * t).1.powf(nf),
        (IncidenceSpec::Full, WitnessSide::Divergent) => power_integral(2.0, top, 2.0 * t).powf(nf),
        (IncidenceSpec::Banded(w), WitnessSide::Convergent) => {
            let w = *w as f64;
            (2.0 * w + 1.0).powf(nf - 1.0) * ((nf - 1.0) * w + zeta_bracket(2.0 * nf * t).1)
        }
        (IncidenceSpec::Banded(_), WitnessSide::Divergent) => power_integral(2.0, top, 2.0 * nf * t),
        (IncidenceSpec::UpperTriangular, WitnessSide::Convergent) => {
            (nf * zeta_bracket(2.0 * t).1.ln() - ln_factorial(n)).exp()
        }
        (IncidenceSpec::UpperTriangular, WitnessSide::Divergent) => {
            (-2.0 * t * ln_factorial(n)).exp() * power_integral(nf + 1.0, top, 2.0 * t)
        }
        (IncidenceSpec::Explicit(_), _) => f64::NAN,
    }
}

/// Pressure value: an enclosing interval, or the `P(t) = +inf` marker.
/// Interval ends may be `-inf` when no long words exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PressureValue {
    Bracket { lower: f64, upper: f64 },
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureMethod {
    /// `ln` of the spectral radius of `B(t)`.
    Spectral,
    /// Subadditive upper and bounded-distortion lower bounds from `Z_n`.
    Subadditive,
    RuleAnalytic,
}

impl fmt::Display for PressureMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PressureMethod::Spectral => "spectral",
            PressureMethod::Subadditive => "subadditive-bracket",
            PressureMethod::RuleAnalytic => "rule-analytic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureEstimate {
    pub t: f64,
    pub value: PressureValue,
    /// Largest word length used; 0 for spectral and closed-form values.
    pub n_used: usize,
    pub method: PressureMethod,
}

impl PressureEstimate {
    /// `(lower, upper)`, with `+inf` for the infinite marker.
    pub fn bounds(&self) -> (f64, f64) {
        match self.value {
            PressureValue::Bracket { lower, upper } => (lower, upper),
            PressureValue::Infinite => (f64::INFINITY, f64::INFINITY),
        }
    }
}

/// Default cap on the number of words tabulated for continued-fraction
/// pressure when no `n_max` is given.
const AUTO_WORD_BUDGET: u128 = 1 << 21;
const AUTO_N_CAP: usize = 24;

/// Precomputed state for evaluating `P(t)` at many `t`.
pub(crate) enum PressureEngine {
    Spectral {
        system: GdmsSystem,
        blocks: Vec<Vec<usize>>,
    },
    Subadditive {
        table: LogNormTable,
        clique: LogNormTable,
        ln_k: f64,
    },
    Empty,
    Rule {
        rule: IncidenceSpec,
        theta: f64,
    },
}

impl PressureEngine {
    pub(crate) fn new(system: &GdmsSystem, n_max: Option<usize>) -> Result<Self> {
        if system.alphabet() == Alphabet::Infinite {
            return Ok(PressureEngine::Rule {
                rule: system.incidence().clone(),
                theta: rule_theta(system.incidence())?.to_f64(),
            });
        }
        if n_max == Some(0) {
            return Err(GdmsError::Input("n_max must be at least 1".into()));
        }
        if system.is_similarity() {
            let blocks = system.edge_graph()?.cyclic_components();
            return Ok(PressureEngine::Spectral {
                system: system.clone(),
                blocks,
            });
        }
        let pruned = system.pruned()?;
        if pruned.num_edges() == 0 {
            return Ok(PressureEngine::Empty);
        }
        let graph = pruned.edge_graph()?;
        let n_max = match n_max {
            Some(n) => n,
            None => auto_n_max(&graph),
        };
        let table = LogNormTable::build(&pruned, &graph, n_max, word_limit())?;
        let clique = full_clique(&pruned, &graph);
        let clique_sys = pruned.restrict(&clique);
        let clique_graph = clique_sys.edge_graph()?;
        let clique_table = LogNormTable::build(&clique_sys, &clique_graph, n_max, word_limit())?;
        Ok(PressureEngine::Subadditive {
            table,
            clique: clique_table,
            ln_k: system.family().distortion_constant().ln(),
        })
    }

    pub(crate) fn n_used(&self) -> usize {
        match self {
            PressureEngine::Subadditive { table, .. } => table.n_max(),
            _ => 0,
        }
    }

    pub(crate) fn method(&self) -> PressureMethod {
        match self {
            PressureEngine::Spectral { .. } | PressureEngine::Empty => PressureMethod::Spectral,
            PressureEngine::Subadditive { .. } => PressureMethod::Subadditive,
            PressureEngine::Rule { .. } => PressureMethod::RuleAnalytic,
        }
    }

    pub(crate) fn spectral_bracket(&self, t: f64) -> Option<SpectralBracket> {
        match self {
            PressureEngine::Spectral { system, blocks } => {
                let b = transfer_matrix(system, t).expect("similarity system");
                Some(spectral_radius_blocks(&b, blocks))
            }
            _ => None,
        }
    }

    pub(crate) fn at(&self, t: f64) -> PressureValue {
        match self {
            PressureEngine::Spectral { .. } => {
                let s = self.spectral_bracket(t).expect("spectral engine");
                PressureValue::Bracket {
                    lower: s.lower.ln(),
                    upper: s.upper.ln(),
                }
            }
            PressureEngine::Empty => PressureValue::Bracket {
                lower: f64::NEG_INFINITY,
                upper: f64::NEG_INFINITY,
            },
            PressureEngine::Subadditive { table, clique, ln_k } => {
                let mut upper = f64::INFINITY;
                let mut lower = f64::NEG_INFINITY;
                for n in 1..=table.n_max() {
                    let nf = n as f64;
                    upper = upper.min(table.ln_z(n, t) / nf);
                    lower = lower.max((clique.ln_z(n, t) - t * ln_k) / nf);
                }
                PressureValue::Bracket { lower, upper }
            }
            PressureEngine::Rule { rule, theta } => {
                if t <= *theta {
                    return PressureValue::Infinite;
                }
                let (lower, upper) = match rule {
                    IncidenceSpec::Full => {
                        let (zl, zh) = zeta_bracket(2.0 * t);
                        ((zl - 1.0).ln(), zh.ln())
                    }
                    IncidenceSpec::Banded(w) => {
                        let golden = (1.0 + 5f64.sqrt()) / 2.0;
                        (-2.0 * t * golden.ln(), ((2 * w + 1) as f64).ln())
                    }
                    // zeta(2t)^n / n! decays faster than any exponential
                    IncidenceSpec::UpperTriangular => (f64::NEG_INFINITY, f64::NEG_INFINITY),
                    IncidenceSpec::Explicit(_) => unreachable!("explicit incidence needs a finite alphabet"),
                };
                PressureValue::Bracket { lower, upper }
            }
        }
    }
}

/// Largest `n <= 24` whose tabulation stays within the automatic budget.
fn auto_n_max(graph: &EdgeGraph) -> usize {
    let counts = graph.word_counts(AUTO_N_CAP);
    let mut total = 0u128;
    let mut best = 1;
    for (i, &c) in counts.iter().enumerate() {
        total = total.saturating_add(c);
        if total > AUTO_WORD_BUDGET {
            break;
        }
        best = i + 1;
    }
    best
}

/// Greedy set of edges, in edge order, in which every ordered pair
/// (including each edge with itself) is allowed.
fn full_clique(system: &GdmsSystem, graph: &EdgeGraph) -> Vec<usize> {
    let mut clique: Vec<usize> = Vec::new();
    for e in 0..system.num_edges() {
        if graph.allows(e, e) && clique.iter().all(|&c| graph.allows(c, e) && graph.allows(e, c)) {
            clique.push(e);
        }
    }
    clique
}

/// Enclosure of `P(t)`.
///
/// Similarity systems get `ln` of a Collatz-Wielandt enclosure of the
/// spectral radius of `B(t)`. Finite continued-fraction systems get
/// `min_n (1/n) ln Z_n(t)` from above and, on a full sub-alphabet,
/// `max_n (ln Z_n(t) - t ln K) / n` from below, for `n <= n_max` (automatic
/// when `None`). Infinite alphabets get closed-form bounds, or the infinite
/// marker when `t <= theta`.
pub fn pressure(system: &GdmsSystem, t: f64, n_max: Option<usize>) -> Result<PressureEstimate> {
    check_t(t)?;
    let engine = PressureEngine::new(system, n_max)?;
    Ok(PressureEstimate {
        t,
        value: engine.at(t),
        n_used: engine.n_used(),
        method: engine.method(),
    })
}

/// `P(t)` on a grid of `t` values sharing one precomputation.
pub fn pressure_curve(system: &GdmsSystem, ts: &[f64], n_max: Option<usize>) -> Result<Vec<PressureEstimate>> {
    for &t in ts {
        check_t(t)?;
    }
    let engine = PressureEngine::new(system, n_max)?;
    Ok(ts
        .iter()
        .map(|&t| PressureEstimate {
            t,
            value: engine.at(t),
            n_used: engine.n_used(),
            method: engine.method(),
        })
        .collect())
}

/// Conformal measure at the zero `h` of the pressure of a finite irreducible
/// similarity system.
///
/// With `v` the right Perron vector of `B(h)` and `rho` its Perron root,
/// `m([omega]) = r_omega^h v_{omega_n} / rho^(n-1)`, normalized so that the
/// first-level masses sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderMeasure {
    pub h: f64,
    pub rho: f64,
    /// `m([e])`.
    pub edge_masses: Vec<f64>,
    /// `v_e`, the mass of `[omega]` relative to `r_omega^h` for words ending in `e`.
    pub follower: Vec<f64>,
    /// `m(X_v)`.
    pub vertex_masses: Vec<f64>,
    weights: Vec<f64>,
    graph: EdgeGraph,
}

impl CylinderMeasure {
    /// `m([omega])`; zero for inadmissible words.
    pub fn word_mass(&self, word: &[usize]) -> f64 {
        if word.is_empty() || word.iter().any(|&e| e >= self.weights.len()) || !self.graph.is_admissible(word) {
            return 0.0;
        }
        let n = word.len();
        let head: f64 = word[..n - 1].iter().map(|&e| self.weights[e]).product();
        head * self.edge_masses[word[n - 1]] / self.rho.powi(n as i32 - 1)
    }

    /// `min_v m(X_v)`.
    pub fn min_vertex_mass(&self) -> f64 {
        self.vertex_masses.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Bounds on `Z_n(h)` forced by `sum_{|omega| = n} m([omega]) = 1`.
    pub fn partition_bounds(&self, n: usize) -> (f64, f64) {
        let scale = self.rho.powi(n as i32 - 1);
        let max_v = self.follower.iter().cloned().fold(0.0, f64::max);
        let min_v = self.follower.iter().cloned().fold(f64::INFINITY, f64::min);
        (scale / max_v, scale / min_v)
    }
}

/// Largest allowed `|ln rho(B(h))|` for [`conformal_cylinder_measure`].
pub const PRESSURE_ZERO_TOLERANCE: f64 = 1e-9;

pub fn conformal_cylinder_measure(system: &GdmsSystem, h: f64) -> Result<CylinderMeasure> {
    check_t(h)?;
    if !system.is_similarity() {
        return Err(GdmsError::Unsupported(
            "conformal measures are built for similarity families only".into(),
        ));
    }
    let graph = system.edge_graph()?;
    let scc = scc_of_graph(&graph);
    if graph.is_empty() || scc.components.len() != 1 || !scc.isolated.is_empty() {
        return Err(GdmsError::Unsupported(
            "conformal measures need an irreducible incidence matrix".into(),
        ));
    }
    let b = transfer_matrix(system, h)?;
    let (bracket, v) = perron_irreducible(&b);
    let rho = bracket.midpoint();
    if rho.ln().abs() > PRESSURE_ZERO_TOLERANCE {
        return Err(GdmsError::Input(format!(
            "h = {h} is not a pressure zero: ln rho(B(h)) = {}",
            rho.ln()
        )));
    }
    let weights: Vec<f64> = ratios(system).iter().map(|r| r.powf(h)).collect();
    let norm = compensated_sum(weights.iter().zip(&v).map(|(w, x)| w * x));
    let follower: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let edge_masses: Vec<f64> = weights.iter().zip(&follower).map(|(w, x)| w * x).collect();
    let mut vertex_masses = vec![0.0; system.graph().vertices().len()];
    for (e, rec) in system.graph().edges().iter().enumerate() {
        vertex_masses[rec.initial] += edge_masses[e];
    }
    Ok(CylinderMeasure {
        h,
        rho,
        edge_masses,
        follower,
        vertex_masses,
        weights,
        graph,
    })
}
