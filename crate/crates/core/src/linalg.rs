//! Compensated summation and Perron-Frobenius bounds for small dense
//! nonnegative matrices.

use crate::graph::EdgeGraph;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    values.into_iter().for_each(|v| acc.add(v));
    acc.value()
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                compensated_sum(row.iter().zip(x).map(|(a, b)| a * b))
            })
            .collect()
    }

    pub fn submatrix(&self, keep: &[usize]) -> Matrix {
        Matrix::from_fn(keep.len(), |i, j| self.get(keep[i], keep[j]))
    }

    /// Positive entries as a successor graph.
    pub fn pattern(&self) -> EdgeGraph {
        EdgeGraph::from_successors(
            (0..self.n)
                .map(|i| (0..self.n).filter(|&j| self.get(i, j) > 0.0).collect())
                .collect(),
        )
    }
}

/// Rigorous (up to rounding) enclosure `[lower, upper]` of a spectral radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBracket {
    pub lower: f64,
    pub upper: f64,
}

impl SpectralBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

const MAX_ITERATIONS: usize = 100_000;
const RELATIVE_WIDTH: f64 = 1e-14;
const STAGNATION_WINDOW: usize = 200;

/// Perron root and right Perron vector of an irreducible nonnegative matrix.
///
/// Power iteration runs on `B + cI` with `c` the mean row sum, which is
/// primitive even when `B` is periodic. After each step the Collatz-Wielandt
/// quotients `(Bx)_i / x_i` of the current positive iterate enclose the root.
pub fn perron_irreducible(b: &Matrix) -> (SpectralBracket, Vec<f64>) {
    let n = b.size();
    if n == 1 {
        let r = b.get(0, 0);
        return (SpectralBracket { lower: r, upper: r }, vec![1.0]);
    }
    let shift = (0..n).map(|i| (0..n).map(|j| b.get(i, j)).sum::<f64>()).sum::<f64>() / n as f64;
    let mut x = vec![1.0; n];
    let mut best = SpectralBracket {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    let mut best_x = x.clone();
    let mut since_improvement = 0;
    for _ in 0..MAX_ITERATIONS {
        let bx = b.mul_vec(&x);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let q = bx[i] / x[i];
            lo = lo.min(q);
            hi = hi.max(q);
        }
        let improved = hi - lo < best.upper - best.lower;
        best.lower = best.lower.max(lo);
        best.upper = best.upper.min(hi);
        if improved {
            best_x.clone_from(&x);
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if best.upper - best.lower <= RELATIVE_WIDTH * best.upper || since_improvement > STAGNATION_WINDOW {
            break;
        }
        let mut next: Vec<f64> = bx.iter().zip(&x).map(|(y, xi)| y + shift * xi).collect();
        let scale = next.iter().cloned().fold(0.0, f64::max);
        next.iter_mut().for_each(|v| *v /= scale);
        x = next;
    }
    (best, best_x)
}

/// Spectral radius of a nonnegative matrix: the largest Perron root over its
/// cyclic strongly connected blocks, or `[0, 0]` when there are none.
pub fn spectral_radius(b: &Matrix) -> SpectralBracket {
    spectral_radius_blocks(b, &b.pattern().cyclic_components())
}

/// As [`spectral_radius`] with the cyclic blocks supplied by the caller.
pub fn spectral_radius_blocks(b: &Matrix, blocks: &[Vec<usize>]) -> SpectralBracket {
    blocks
        .iter()
        .map(|block| perron_irreducible(&b.submatrix(block)).0)
        .fold(SpectralBracket { lower: 0.0, upper: 0.0 }, |acc, s| SpectralBracket {
            lower: acc.lower.max(s.lower),
            upper: acc.upper.max(s.upper),
        })
}

/// Least-squares line `y = slope x + intercept` and RMS residual.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}
