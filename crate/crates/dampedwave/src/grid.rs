//! Discretized domains and sampled coefficient functions.
//!
//! Domains are 1D intervals or 2D rectangles with homogeneous Dirichlet
//! boundaries; boundary nodes are excluded from the unknowns, so an axis with
//! `points` interior nodes has spacing `h = (upper - lower) / (points + 1)`.
//! An unbounded direction is approximated by truncation to `[-R, R]` with a
//! Dirichlet condition at the artificial boundary; the axis records the
//! radius so convergence studies can enlarge it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;

/// One axis of the computational box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    /// Interior point count (Dirichlet rows eliminated).
    pub points: usize,
    pub h: f64,
    /// Whether this axis approximates an unbounded direction.
    pub truncated: bool,
    /// Truncation radius R for truncated axes (the interval is [-R, R]).
    pub radius: Option<f64>,
}

impl Axis {
    /// Coordinate of interior node `i` (zero-based).
    pub fn coord(&self, i: usize) -> f64 {
        self.lower + (i as f64 + 1.0) * self.h
    }
}

/// Descriptor for one axis, before validation.
#[derive(Debug, Clone, Copy)]
pub enum AxisSpec {
    /// Bounded interval (lower, upper) with the given interior resolution.
    Bounded {
        lower: f64,
        upper: f64,
        points: usize,
    },
    /// Truncated unbounded direction: interval [-radius, radius].
    Truncated { radius: f64, points: usize },
}

/// Discretized domain: 1D interval or 2D rectangle, Dirichlet boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Total number of interior points (unknowns).
    pub fn interior_count(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    /// True if any axis approximates an unbounded direction.
    pub fn is_truncated(&self) -> bool {
        self.axes.iter().any(|a| a.truncated)
    }

    /// Smallest truncation radius among truncated axes.
    pub fn truncation_radius(&self) -> Option<f64> {
        self.axes
            .iter()
            .filter_map(|a| a.radius)
            .min_by(|p, q| p.total_cmp(q))
    }

    /// Coordinates of interior node with flat index `idx`.
    ///
    /// In 2D the first axis varies fastest: `idx = j * nx + i`.
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        match self.axes.len() {
            1 => (self.axes[0].coord(idx), 0.0),
            _ => {
                let nx = self.axes[0].points;
                let (i, j) = (idx % nx, idx / nx);
                (self.axes[0].coord(i), self.axes[1].coord(j))
            }
        }
    }

    /// Volume element (h in 1D, hx*hy in 2D) for discrete L2 inner products.
    pub fn volume_element(&self) -> f64 {
        self.axes.iter().map(|a| a.h).product()
    }

    /// Indices of interior points in the exterior zone at exclusion radius
    /// `rho`: points whose coordinate along at least one truncated axis
    /// exceeds `rho` in absolute value.
    pub fn exterior_indices(&self, rho: f64) -> Vec<usize> {
        let n = self.interior_count();
        (0..n)
            .filter(|&idx| {
                let (x, y) = self.coords(idx);
                self.axes.iter().enumerate().any(|(d, a)| {
                    a.truncated && {
                        let c = if d == 0 { x } else { y };
                        c.abs() > rho
                    }
                })
            })
            .collect()
    }

    /// Indices in the boundary zone used to validate declared asymptotic
    /// values: the outermost `fraction` of the range of each truncated axis.
    pub fn boundary_zone_indices(&self, fraction: f64) -> Vec<usize> {
        let n = self.interior_count();
        (0..n)
            .filter(|&idx| {
                let (x, y) = self.coords(idx);
                self.axes.iter().enumerate().any(|(d, a)| {
                    a.truncated && {
                        let c = if d == 0 { x } else { y };
                        let r = a.radius.unwrap_or(a.upper);
                        c.abs() >= (1.0 - fraction) * r
                    }
                })
            })
            .collect()
    }
}

/// Build a grid from per-axis descriptors.
///
/// Errors on non-positive extents or resolutions; interior point count must
/// be at least 3 per axis.
pub fn build_grid(spec: &[AxisSpec]) -> Result<Grid> {
    if spec.is_empty() || spec.len() > 2 {
        return Err(Error::Config(format!(
            "domain dimension must be 1 or 2, got {}",
            spec.len()
        )));
    }
    let mut axes = Vec::with_capacity(spec.len());
    for (d, s) in spec.iter().enumerate() {
        let (lower, upper, points, truncated, radius) = match *s {
            AxisSpec::Bounded {
                lower,
                upper,
                points,
            } => (lower, upper, points, false, None),
            AxisSpec::Truncated { radius, points } => {
                if !(radius > 0.0) {
                    return Err(Error::Config(format!(
                        "axis {d}: truncation radius must be positive, got {radius}"
                    )));
                }
                (-radius, radius, points, true, Some(radius))
            }
        };
        if !(upper > lower) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::Config(format!(
                "axis {d}: invalid extent ({lower}, {upper})"
            )));
        }
        if points < 3 {
            return Err(Error::Config(format!(
                "axis {d}: need at least 3 interior points, got {points}"
            )));
        }
        let h = (upper - lower) / (points as f64 + 1.0);
        axes.push(Axis {
            lower,
            upper,
            points,
            h,
            truncated,
            radius,
        });
    }
    Ok(Grid { axes })
}

/// Optional declared asymptotics and the validation policy for them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfDeclarations {
    pub a_inf: Option<f64>,
    pub b_inf: Option<f64>,
    /// Declared infimum of the essential spectrum of the undamped operator.
    pub gamma_inf_0: Option<f64>,
    /// Outermost fraction of each truncated axis used as the boundary zone.
    pub boundary_zone_fraction: f64,
    /// Maximum deviation of boundary-zone samples from a declared value.
    pub inf_tolerance: f64,
}

impl Default for InfDeclarations {
    fn default() -> Self {
        InfDeclarations {
            a_inf: None,
            b_inf: None,
            gamma_inf_0: None,
            boundary_zone_fraction: 0.1,
            inf_tolerance: 0.05,
        }
    }
}

/// Sampled damping and potential with summary statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub a_inf: Option<f64>,
    pub b_inf: Option<f64>,
    pub gamma_inf_0: Option<f64>,
}

impl CoefficientSet {
    /// L-infinity norm of the damping over the sampled points.
    pub fn a_sup_norm(&self) -> f64 {
        self.a_min.abs().max(self.a_max.abs())
    }

    /// Build directly from sampled values, computing the summary statistics
    /// and validating declared asymptotics against the boundary zone.
    pub fn from_samples(
        grid: &Grid,
        a: Vec<f64>,
        b: Vec<f64>,
        decls: &InfDeclarations,
    ) -> Result<CoefficientSet> {
        let n = grid.interior_count();
        if a.len() != n || b.len() != n {
            return Err(Error::Coefficient(format!(
                "expected {n} samples, got a: {}, b: {}",
                a.len(),
                b.len()
            )));
        }
        for (name, vals) in [("a", &a), ("b", &b)] {
            if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
                let (x, y) = grid.coords(i);
                return Err(Error::Coefficient(format!(
                    "{name} is not finite at ({x:.6}, {y:.6})"
                )));
            }
        }
        let a_min = a.iter().copied().fold(f64::INFINITY, f64::min);
        let a_max = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let b_min = b.iter().copied().fold(f64::INFINITY, f64::min);

        if decls.a_inf.is_some() || decls.b_inf.is_some() {
            if !grid.is_truncated() {
                return Err(Error::Coefficient(
                    "asymptotic values declared but the domain has no truncated axis".into(),
                ));
            }
            let zone = grid.boundary_zone_indices(decls.boundary_zone_fraction);
            for (name, declared, vals) in
                [("a_inf", decls.a_inf, &a), ("b_inf", decls.b_inf, &b)]
            {
                if let Some(v_inf) = declared {
                    let worst = zone
                        .iter()
                        .map(|&i| (vals[i] - v_inf).abs())
                        .fold(0.0, f64::max);
                    if worst >= decls.inf_tolerance {
                        return Err(Error::Coefficient(format!(
                            "declared {name} = {v_inf} deviates from boundary-zone samples \
                             by {worst:.3e} (tolerance {:.3e})",
                            decls.inf_tolerance
                        )));
                    }
                }
            }
        }

        Ok(CoefficientSet {
            a,
            b,
            a_min,
            a_max,
            b_min,
            a_inf: decls.a_inf,
            b_inf: decls.b_inf,
            gamma_inf_0: decls.gamma_inf_0,
        })
    }

    /// Estimate the asymptotic value of the damping from boundary-zone
    /// samples; returns (mean, spread).
    pub fn estimate_a_inf(&self, grid: &Grid, fraction: f64) -> Option<(f64, f64)> {
        if !grid.is_truncated() {
            return None;
        }
        let zone = grid.boundary_zone_indices(fraction);
        if zone.is_empty() {
            return None;
        }
        let mean = zone.iter().map(|&i| self.a[i]).sum::<f64>() / zone.len() as f64;
        let spread = zone
            .iter()
            .map(|&i| (self.a[i] - mean).abs())
            .fold(0.0, f64::max);
        Some((mean, spread))
    }
}

/// Sample coefficient expressions on the grid.
pub fn sample_coefficients(
    grid: &Grid,
    a_expr: &Expr,
    b_expr: &Expr,
    decls: &InfDeclarations,
) -> Result<CoefficientSet> {
    if grid.dimension() == 1 && (a_expr.uses_y() || b_expr.uses_y()) {
        return Err(Error::Coefficient(
            "expression references y on a one-dimensional domain".into(),
        ));
    }
    let n = grid.interior_count();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for idx in 0..n {
        let (x, y) = grid.coords(idx);
        a.push(a_expr.eval(x, y));
        b.push(b_expr.eval(x, y));
    }
    CoefficientSet::from_samples(grid, a, b, decls)
}
