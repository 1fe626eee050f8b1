//! Shared domain types: problem instances, planted ground truth, solutions,
//! and the run configuration consumed by every solver in the crate.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// A dense regression problem `y = A x + noise` with `M` observations and
/// `N` predictors.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    a: Array2<f64>,
    y: Array1<f64>,
    m: usize,
    n: usize,
    alpha: f64,
}

impl ProblemInstance {
    /// Builds an instance, rejecting dimension mismatches, empty data and
    /// non-finite entries. `alpha >= 1` is allowed (see [`validate_instance`]
    /// which reports it as a warning).
    pub fn new(a: Array2<f64>, y: Array1<f64>) -> Result<Self> {
        let diags = validate_instance(&a.view(), &y.view());
        if let Some(d) = diags.iter().find(|d| d.severity == Severity::Error) {
            return Err(Error::InvalidConfig(d.message.clone()));
        }
        let (m, n) = a.dim();
        Ok(Self {
            a,
            y,
            m,
            n,
            alpha: m as f64 / n as f64,
        })
    }

    pub fn a(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Aspect ratio `alpha = M / N`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Re-checks the construction invariants; at most the overdetermined
    /// warning can appear on an instance built through [`Self::new`].
    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_instance(&self.a.view(), &self.y.view())
    }

    /// The instance with observation `mu` removed (used by leave-one-out).
    pub fn without_row(&self, mu: usize) -> ProblemInstance {
        let mut a = Array2::zeros((self.m - 1, self.n));
        let mut y = Array1::zeros(self.m - 1);
        let mut r = 0;
        for i in 0..self.m {
            if i == mu {
                continue;
            }
            a.row_mut(r).assign(&self.a.row(i));
            y[r] = self.y[i];
            r += 1;
        }
        ProblemInstance {
            a,
            y,
            m: self.m - 1,
            n: self.n,
            alpha: (self.m - 1) as f64 / self.n as f64,
        }
    }

    /// The instance restricted to the given observation rows.
    pub fn with_rows(&self, rows: &[usize]) -> ProblemInstance {
        let mut a = Array2::zeros((rows.len(), self.n));
        let mut y = Array1::zeros(rows.len());
        for (r, &i) in rows.iter().enumerate() {
            a.row_mut(r).assign(&self.a.row(i));
            y[r] = self.y[i];
        }
        ProblemInstance {
            a,
            y,
            m: rows.len(),
            n: self.n,
            alpha: rows.len() as f64 / self.n as f64,
        }
    }
}

/// Planted signal and noise behind a synthetic instance, together with the
/// generative parameters (not empirical estimates).
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub x_hat: Array1<f64>,
    pub xi: Array1<f64>,
    pub rho_hat: f64,
    pub sigma_x2: f64,
    pub sigma_xi2: f64,
}

impl GroundTruth {
    /// Max-abs residual of `y - (A x_hat + xi)`; zero to machine precision
    /// for instances produced by `datagen`.
    pub fn consistency_residual(&self, inst: &ProblemInstance) -> f64 {
        let pred = inst.a().dot(&self.x_hat) + &self.xi;
        inst.y()
            .iter()
            .zip(pred.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A LASSO solution at one penalty value, optionally carrying the debiased
/// least-squares refit `x2` on the active set.
#[derive(Debug, Clone)]
pub struct LassoSolution {
    pub lambda: f64,
    /// The l1-penalized estimate.
    pub x1: Array1<f64>,
    /// Indices with `|x1_i| >= active_threshold`, ascending. Components
    /// exactly at the threshold count as active.
    pub active_set: Vec<usize>,
    /// Debiased estimate, zero off the active set; `None` until `debias` runs.
    pub x2: Option<Array1<f64>>,
    /// Sparsity of the inferred signal, `|active_set| / N`.
    pub rho: f64,
    /// Set when the debiasing least-squares problem was rank-deficient and
    /// the minimum-norm fallback was used.
    pub x2_rank_deficient: bool,
}

impl LassoSolution {
    pub fn from_estimate(lambda: f64, x1: Array1<f64>, active_threshold: f64) -> Self {
        let active_set: Vec<usize> = x1
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() >= active_threshold)
            .map(|(i, _)| i)
            .collect();
        let rho = active_set.len() as f64 / x1.len() as f64;
        Self {
            lambda,
            x1,
            active_set,
            x2: None,
            rho,
            x2_rank_deficient: false,
        }
    }
}

/// Configuration shared by the path solvers.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Strictly descending penalty grid (warm-starting contract).
    pub lambda_grid: Vec<f64>,
    /// Classification threshold for active components (default 1e-6).
    pub active_threshold: f64,
    /// KKT residual tolerance (default 1e-10).
    pub solver_tol: f64,
    pub max_iter: usize,
    /// Damping in (0, 1] for fixed-point iterations (default 0.5).
    pub damping: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lambda_grid: Vec::new(),
            active_threshold: 1e-6,
            solver_tol: 1e-10,
            max_iter: 100_000,
            damping: 0.5,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Normalizes and installs a penalty grid; ascending input is reversed.
    /// Returns whether the grid was reversed so callers can note it.
    pub fn with_grid(mut self, grid: Vec<f64>) -> Result<(Self, bool)> {
        let (grid, reversed) = normalize_grid(grid)?;
        self.lambda_grid = grid;
        Ok((self, reversed))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.active_threshold > 0.0 && self.active_threshold.is_finite()) {
            return Err(Error::InvalidConfig("active_threshold must be positive".into()));
        }
        if !(self.solver_tol > 0.0 && self.solver_tol.is_finite()) {
            return Err(Error::InvalidConfig("solver_tol must be positive".into()));
        }
        if self.active_threshold <= self.solver_tol {
            return Err(Error::InvalidConfig(
                "active_threshold must exceed solver_tol".into(),
            ));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidConfig("damping must lie in (0, 1]".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Returns a strictly descending copy of `grid` plus a flag telling whether
/// the input had to be reversed.
pub fn normalize_grid(mut grid: Vec<f64>) -> Result<(Vec<f64>, bool)> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("lambda grid".into()));
    }
    if grid.iter().any(|l| !l.is_finite() || *l <= 0.0) {
        return Err(Error::InvalidConfig(
            "lambda grid entries must be positive and finite".into(),
        ));
    }
    let descending = grid.windows(2).all(|w| w[0] > w[1]);
    if descending {
        return Ok((grid, false));
    }
    let ascending = grid.windows(2).all(|w| w[0] < w[1]);
    if ascending {
        grid.reverse();
        return Ok((grid, true));
    }
    Err(Error::InvalidConfig(
        "lambda grid must be strictly monotone".into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding; warnings do not block construction.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    fn error(message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn warning(message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

/// Checks the instance invariants, returning one diagnostic per violation.
/// `alpha >= 1` yields a warning, not an error: the fast leave-one-out
/// formulas stay evaluable for overdetermined data even though the random
/// ensemble analysis assumes `M < N`.
pub fn validate_instance(a: &ArrayView2<f64>, y: &ArrayView1<f64>) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        diags.push(Diagnostic::error(format!(
            "design matrix must be non-empty, got {m}x{n}"
        )));
    }
    if y.len() != m {
        diags.push(Diagnostic::error(format!(
            "dimension mismatch: A has {m} rows but y has {} entries",
            y.len()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        diags.push(Diagnostic::error("design matrix contains a non-finite entry"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        diags.push(Diagnostic::error("response vector contains a non-finite entry"));
    }
    if m > 0 && n > 0 && m >= n {
        diags.push(Diagnostic::warning(format!(
            "alpha = M/N = {:.3} >= 1: formulas remain valid but the random-matrix analysis assumes M < N",
            m as f64 / n as f64
        )));
    }
    diags
}
