//! Eigencurve sampling and the parabola criterion.
//!
//! The curves `mu -> gamma_n(mu)` are Lipschitz with constant `||a||_inf`,
//! which lets interval absence of roots of `f_n(mu) = gamma_n(mu) +
//! (mu/alpha)^2` be certified from endpoint values. Sign changes are
//! bisected with fresh eigensolves; intervals that can be certified
//! root-free are skipped; the rest are probed recursively, which is also how
//! tangencies (first touches) are detected.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CoefficientSet, Grid};
use crate::operator::assemble_schrodinger;
use crate::spectra::{
    essential_threshold_estimate, lowest_eigenpairs, lowest_eigenvalues_only, nth_eigenvalue,
    EssentialEstimate, SolverOptions, SpectrumSlice,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

/// Classification of a curve value against the essential-threshold estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralClass {
    /// Strictly below the essential threshold: a genuine discrete eigenvalue.
    Discrete,
    /// Within the estimate's uncertainty of the threshold; not decided.
    Ambiguous,
    /// At or above the threshold: a discretized essential cluster.
    Essential,
}

/// Sampled eigencurves with the essential row and classification masks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigencurveTable {
    pub mu_samples: Vec<f64>,
    /// `curves[n-1][i] = gamma_n(mu_i)`.
    pub curves: Vec<Vec<f64>>,
    /// Essential-threshold estimates per sample (truncated domains only).
    pub essential_row: Option<Vec<f64>>,
    /// Uncertainty of the essential row per sample.
    pub essential_spread: Option<Vec<f64>>,
    /// `discrete_mask[n-1][i]`: classification of gamma_n(mu_i).
    pub discrete_mask: Vec<Vec<SpectralClass>>,
    /// Lipschitz constant of every curve: max(|a_min|, |a_max|).
    pub lipschitz_bound: f64,
    /// Eigenvalue accuracy the table was built with.
    pub solver_tol: f64,
}

impl EigencurveTable {
    pub fn curve_count(&self) -> usize {
        self.curves.len()
    }

    pub fn mu_range(&self) -> (f64, f64) {
        (
            *self.mu_samples.first().unwrap(),
            *self.mu_samples.last().unwrap(),
        )
    }

    pub fn covers(&self, mu: f64) -> bool {
        let (lo, hi) = self.mu_range();
        mu >= lo && mu <= hi
    }

    /// Index of the sample at mu = 0, if present.
    pub fn zero_index(&self) -> Option<usize> {
        self.mu_samples.iter().position(|&m| m.abs() < 1e-12)
    }

    /// Verify the Lipschitz certificate on every adjacent sample pair.
    pub fn check_lipschitz(&self) -> Result<()> {
        let slack = 2.0 * self.solver_tol;
        for (n, row) in self.curves.iter().enumerate() {
            for i in 0..row.len() - 1 {
                let dmu = self.mu_samples[i + 1] - self.mu_samples[i];
                let dg = (row[i + 1] - row[i]).abs();
                if dg > self.lipschitz_bound * dmu + slack {
                    return Err(Error::solver(
                        format!(
                            "Lipschitz violation on curve {} over [{}, {}]: |dgamma| = {dg:.6e}",
                            n + 1,
                            self.mu_samples[i],
                            self.mu_samples[i + 1]
                        ),
                        dg,
                    ));
                }
            }
        }
        Ok(())
    }

    /// Finite-difference slope at the extreme samples of one side, with the
    /// previous slope and their difference as an error proxy.
    pub fn asymptotic_slope(&self, n: usize, side: Side, onset: f64) -> Result<SlopeEstimate> {
        if n == 0 || n > self.curves.len() {
            return Err(Error::Range(format!("curve {n} not sampled")));
        }
        let row = &self.curves[n - 1];
        let m = self.mu_samples.len();
        let idx: Vec<usize> = match side {
            Side::Positive => (0..m).rev().collect(),
            Side::Negative => (0..m).collect(),
        };
        let extreme = idx[0];
        if self.mu_samples[extreme].abs() < onset {
            return Err(Error::Range(format!(
                "table extends to |mu| = {:.3e}, below the asymptotic onset {onset:.3e}",
                self.mu_samples[extreme].abs()
            )));
        }
        if m < 3 {
            return Err(Error::Range("need at least 3 samples for a slope".into()));
        }
        let (i0, i1, i2) = (idx[0], idx[1], idx[2]);
        let last = (row[i0] - row[i1]) / (self.mu_samples[i0] - self.mu_samples[i1]);
        let prev = (row[i1] - row[i2]) / (self.mu_samples[i1] - self.mu_samples[i2]);
        Ok(SlopeEstimate {
            slope: last,
            last,
            prev,
            error_proxy: (last - prev).abs(),
        })
    }

    /// CSV emission: `mu, gamma_1..gamma_k, gamma_inf`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let k = self.curve_count();
        let mut header = vec!["mu".to_string()];
        header.extend((1..=k).map(|n| format!("gamma_{n}")));
        header.push("gamma_inf".into());
        wtr.write_record(&header).map_err(|e| Error::Serialize(e.to_string()))?;
        for (i, &mu) in self.mu_samples.iter().enumerate() {
            let mut rec = vec![format!("{mu:.17e}")];
            rec.extend(self.curves.iter().map(|row| format!("{:.17e}", row[i])));
            rec.push(match &self.essential_row {
                Some(row) if row[i].is_finite() => format!("{:.17e}", row[i]),
                _ => "inf".into(),
            });
            wtr.write_record(&rec).map_err(|e| Error::Serialize(e.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub last: f64,
    pub prev: f64,
    pub error_proxy: f64,
}

/// Which object intersected the parabola.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveId {
    /// 1-based eigencurve index.
    Curve(usize),
    /// The essential-threshold row.
    Essential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntersectionKind {
    Transversal,
    Tangency,
    EssentialIntervalEndpoint,
}

/// One intersection of a curve with the parabola `mu -> -(mu/alpha)^2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntersectionRecord {
    pub curve: CurveId,
    pub alpha: f64,
    pub mu_star: f64,
    /// Predicted real spectral point of the damped operator.
    pub lambda: f64,
    pub kind: IntersectionKind,
    pub bracket: (f64, f64),
    /// |gamma(mu_star) + (mu_star/alpha)^2| at the reported root.
    pub residual: f64,
    pub classification: SpectralClass,
}

/// A possible crossing beyond the sampled range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangeWarning {
    pub curve: CurveId,
    pub side: Side,
    pub mu_bound: f64,
    pub f_at_bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntersectionScan {
    pub alpha: f64,
    pub records: Vec<IntersectionRecord>,
    pub warnings: Vec<RangeWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mechanism {
    /// The curve is already a negative discrete eigenvalue at mu = 0; a real
    /// spectral point exists for every positive alpha.
    CrossingIntoNegativity,
    /// First touch of the parabola with a curve positive at mu = 0.
    Tangency,
}

/// Instability threshold for one curve and one side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub curve: usize,
    pub side: Side,
    pub alpha_threshold: f64,
    pub witness_mu: f64,
    pub mechanism: Mechanism,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ThresholdOutcome {
    Found(ThresholdRecord),
    /// The curve never dips below min(0, gamma_inf) on the sampled side;
    /// carries how close it came.
    NotFound { min_gamma: f64, mu_at_min: f64 },
}

impl ThresholdOutcome {
    pub fn found(&self) -> Option<&ThresholdRecord> {
        match self {
            ThresholdOutcome::Found(r) => Some(r),
            ThresholdOutcome::NotFound { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct SideCounts {
    pub discrete: usize,
    pub ambiguous: usize,
    pub essential: usize,
}

impl SideCounts {
    pub fn total(&self) -> usize {
        self.discrete + self.ambiguous + self.essential
    }
}

/// A lower-bound guarantee evaluated against the predicted counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountGuarantee {
    pub side: Side,
    pub basis: String,
    pub guaranteed_min: usize,
    pub predicted: usize,
    pub satisfied: bool,
}

/// Real-spectral-point bookkeeping for one alpha.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealPointCounts {
    pub alpha: f64,
    /// Number of eigenvalues at mu = 0 below min(0, gamma_inf(0)).
    pub n0: usize,
    pub positive: SideCounts,
    pub negative: SideCounts,
    /// gamma_inf(0) < 0: real essential spectrum on both sides at any alpha.
    pub essential_both_sides: bool,
    pub guarantees: Vec<CountGuarantee>,
}

/// Prop.-4.2-style essential interval: real part of the essential spectrum
/// of the damped operator when the essential row is the line
/// `gamma_inf_0 + a_inf mu`.
pub fn essential_interval(gamma_inf_0: f64, a_inf: f64, alpha: f64) -> Option<(f64, f64)> {
    debug_assert!(alpha > 0.0);
    let delta = alpha * alpha * a_inf * a_inf - 4.0 * gamma_inf_0;
    if delta < 0.0 {
        return None;
    }
    let s = delta.sqrt();
    Some((0.5 * (-alpha * a_inf - s), 0.5 * (-alpha * a_inf + s)))
}

/// Evaluator for the Schrodinger family over one grid/coefficient pair.
pub struct CurveEngine<'a> {
    grid: &'a Grid,
    coeffs: &'a CoefficientSet,
    opts: SolverOptions,
    /// Root tolerance for |f_n| at reported intersections.
    pub root_tol: f64,
    /// |f_n| below this at a local minimum without sign change is a tangency.
    pub tangency_tol: f64,
    /// Base margin for discrete-vs-essential classification.
    pub class_tol: f64,
    /// Exclusion radii as fractions of the truncation radius.
    pub persson_fractions: Vec<f64>,
    /// Minimum |mu| for asymptotic slope extraction.
    pub asymptotic_onset: f64,
    gamma1_at_zero: f64,
}

impl<'a> CurveEngine<'a> {
    pub fn new(grid: &'a Grid, coeffs: &'a CoefficientSet, opts: SolverOptions) -> Self {
        let s0 = assemble_schrodinger(grid, coeffs, 0.0);
        let gamma1_at_zero = nth_eigenvalue(&s0, 1);
        let la = coeffs.a_sup_norm();
        CurveEngine {
            grid,
            coeffs,
            opts,
            root_tol: 1e-10,
            tangency_tol: 1e-6,
            class_tol: 1e-6,
            persson_fractions: vec![0.5, 0.6, 0.7, 0.8],
            asymptotic_onset: 100.0 * la,
            gamma1_at_zero,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &CoefficientSet {
        self.coeffs
    }

    pub fn solver_options(&self) -> &SolverOptions {
        &self.opts
    }

    pub fn gamma1_at_zero(&self) -> f64 {
        self.gamma1_at_zero
    }

    /// n-th eigencurve value (1-based) by a fresh eigensolve.
    pub fn curve_value(&self, mu: f64, n: usize) -> f64 {
        let op = assemble_schrodinger(self.grid, self.coeffs, mu);
        nth_eigenvalue(&op, n)
    }

    /// Lowest-k curve values at one mu.
    pub fn curve_values(&self, mu: f64, k: usize) -> Vec<f64> {
        let op = assemble_schrodinger(self.grid, self.coeffs, mu);
        lowest_eigenvalues_only(&op, k)
    }

    /// Residual-controlled spectrum slice at one mu.
    pub fn slice(&self, mu: f64, k: usize) -> Result<SpectrumSlice> {
        let op = assemble_schrodinger(self.grid, self.coeffs, mu);
        lowest_eigenpairs(&op, k, &self.opts)
            .map(|p| p.into_slice(mu))
            .map_err(|e| match e {
                Error::Solver {
                    message,
                    best_residual,
                } => Error::Solver {
                    message: format!("{message} (at mu = {mu:.6e})"),
                    best_residual,
                },
                other => other,
            })
    }

    /// Declared linear essential law (gamma_inf_0, a_inf), when available.
    pub fn essential_law(&self) -> Option<(f64, f64)> {
        match (self.coeffs.gamma_inf_0, self.coeffs.a_inf) {
            (Some(g0), Some(ai)) => Some((g0, ai)),
            _ => None,
        }
    }

    /// Essential-threshold value and uncertainty at one mu. Uses the declared
    /// linear law when both gamma_inf_0 and a_inf are declared, otherwise a
    /// Persson exterior estimate. Infinite on bounded domains.
    pub fn essential_value(&self, mu: f64) -> Result<(f64, f64)> {
        if !self.grid.is_truncated() {
            return Ok((f64::INFINITY, 0.0));
        }
        if let Some((g0, ai)) = self.essential_law() {
            return Ok((g0 + ai * mu, self.class_tol));
        }
        let est = self.persson_estimate(mu)?;
        Ok((est.gamma_inf, est.spread))
    }

    /// Full Persson estimate at the engine's exclusion radii.
    pub fn persson_estimate(&self, mu: f64) -> Result<EssentialEstimate> {
        let radii: Vec<f64> = match self.grid.truncation_radius() {
            Some(r) => self.persson_fractions.iter().map(|f| f * r).collect(),
            None => Vec::new(),
        };
        essential_threshold_estimate(self.grid, self.coeffs, mu, &radii, &self.opts)
    }

    fn classify(&self, gamma: f64, essential: f64, spread: f64) -> SpectralClass {
        if essential.is_infinite() {
            return SpectralClass::Discrete;
        }
        let margin = self.class_tol.max(spread);
        if gamma < essential - margin {
            SpectralClass::Discrete
        } else if gamma > essential + margin {
            SpectralClass::Essential
        } else {
            SpectralClass::Ambiguous
        }
    }

    /// Default mu-range for a given alpha, wide enough that every curve (and
    /// the essential row) certifiably lies above the parabola at the ends:
    /// beyond M the quadratic dominates any curve with slope in
    /// [a_min, a_max] starting from gamma_1(0).
    pub fn default_mu_range(&self, alpha: f64) -> (f64, f64) {
        let la = self.coeffs.a_sup_norm();
        let g1 = self.gamma1_at_zero;
        let gamma_cap = 1.0_f64.max(g1.abs()).max(la * la);
        let policy = alpha * alpha * gamma_cap;
        let certified = alpha * alpha * la + alpha * g1.abs().sqrt() + 1.0;
        let m = policy.max(certified);
        (-m, m)
    }

    /// Sample eigencurves over [mu_range.0, mu_range.1].
    ///
    /// The essential row is attached on truncated domains. The sample count
    /// is rounded up to an odd number so mu = 0 is included when the range
    /// is symmetric. Fails if the sampled table violates the Lipschitz
    /// certificate (which would indicate a solver fault).
    pub fn sample(
        &self,
        mu_range: (f64, f64),
        samples: usize,
        k: usize,
    ) -> Result<EigencurveTable> {
        let (lo, hi) = mu_range;
        if !(hi > lo) {
            return Err(Error::Config(format!("empty mu range [{lo}, {hi}]")));
        }
        if samples < 2 {
            return Err(Error::Config("need at least 2 mu samples".into()));
        }
        if k < 1 {
            return Err(Error::Config("need at least one curve".into()));
        }
        let m = if samples % 2 == 0 { samples + 1 } else { samples };
        let mut mu_samples: Vec<f64> = (0..m)
            .map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64)
            .collect();
        // snap the middle sample to exactly zero on symmetric ranges
        if let Some(mid) = mu_samples
            .iter()
            .position(|&mu| mu.abs() < 1e-9 * (hi - lo).max(1.0))
        {
            mu_samples[mid] = 0.0;
        }

        let columns: Vec<Vec<f64>> = mu_samples
            .par_iter()
            .map(|&mu| self.curve_values(mu, k))
            .collect();

        let mut curves = vec![vec![0.0; m]; k];
        for (i, col) in columns.iter().enumerate() {
            for n in 0..k {
                curves[n][i] = col[n];
            }
        }

        let (essential_row, essential_spread) = if self.grid.is_truncated() {
            let vals: Result<Vec<(f64, f64)>> = mu_samples
                .iter()
                .map(|&mu| self.essential_value(mu))
                .collect();
            let vals = vals?;
            (
                Some(vals.iter().map(|v| v.0).collect::<Vec<f64>>()),
                Some(vals.iter().map(|v| v.1).collect::<Vec<f64>>()),
            )
        } else {
            (None, None)
        };

        let discrete_mask = curves
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(i, &g)| match (&essential_row, &essential_spread) {
                        (Some(e), Some(s)) => self.classify(g, e[i], s[i]),
                        _ => SpectralClass::Discrete,
                    })
                    .collect()
            })
            .collect();

        let table = EigencurveTable {
            mu_samples,
            curves,
            essential_row,
            essential_spread,
            discrete_mask,
            lipschitz_bound: self.coeffs.a_sup_norm(),
            solver_tol: self.opts.eigen_tol,
        };
        table.check_lipschitz()?;
        Ok(table)
    }

    /// Table over the certified default range for one alpha.
    pub fn sample_for_alpha(&self, alpha: f64, samples: usize, k: usize) -> Result<EigencurveTable> {
        self.sample(self.default_mu_range(alpha), samples, k)
    }

    fn f_value(&self, mu: f64, n: usize, alpha: f64) -> f64 {
        self.curve_value(mu, n) + (mu / alpha).powi(2)
    }

    /// Locate all intersections of the sampled curves (and essential row)
    /// with the parabola.
    pub fn intersect_all(&self, table: &EigencurveTable, alpha: f64) -> Result<IntersectionScan> {
        if !(alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        let mut records = Vec::new();
        let mut warnings = Vec::new();
        for n in 1..=table.curve_count() {
            self.scan_curve(table, n, alpha, &mut records, &mut warnings)?;
        }
        self.scan_essential_row(table, alpha, &mut records, &mut warnings)?;
        records.sort_by(|p, q| p.mu_star.total_cmp(&q.mu_star));
        Ok(IntersectionScan {
            alpha,
            records,
            warnings,
        })
    }

    fn scan_curve(
        &self,
        table: &EigencurveTable,
        n: usize,
        alpha: f64,
        records: &mut Vec<IntersectionRecord>,
        warnings: &mut Vec<RangeWarning>,
    ) -> Result<()> {
        let row = &table.curves[n - 1];
        let mus = &table.mu_samples;
        let m = mus.len();
        let f: Vec<f64> = (0..m)
            .map(|i| row[i] + (mus[i] / alpha).powi(2))
            .collect();

        // crossings possibly beyond the sampled range
        if f[0] < 0.0 {
            warnings.push(RangeWarning {
                curve: CurveId::Curve(n),
                side: Side::Negative,
                mu_bound: mus[0],
                f_at_bound: f[0],
            });
        }
        if f[m - 1] < 0.0 {
            warnings.push(RangeWarning {
                curve: CurveId::Curve(n),
                side: Side::Positive,
                mu_bound: mus[m - 1],
                f_at_bound: f[m - 1],
            });
        }

        let la = table.lipschitz_bound;
        let slack = 4.0 * table.solver_tol;
        let mut found: Vec<(f64, f64, (f64, f64), IntersectionKind)> = Vec::new();

        let mut stack: Vec<(f64, f64, f64, f64, u32)> = (0..m - 1)
            .map(|i| (mus[i], f[i], mus[i + 1], f[i + 1], 0))
            .collect();
        // probe down to the width where a quadratic touch of depth
        // tangency_tol becomes visible at the interval midpoint
        let min_width = (self.tangency_tol.sqrt() * alpha).max(1e-9);

        while let Some((lo, flo, hi, fhi, depth)) = stack.pop() {
            if flo == 0.0 {
                found.push((lo, 0.0, (lo, lo), IntersectionKind::Transversal));
                continue;
            }
            if flo * fhi < 0.0 {
                let (mu_star, res, bracket) = self.bisect_root(n, alpha, lo, flo, hi, fhi);
                found.push((mu_star, res, bracket, IntersectionKind::Transversal));
                continue;
            }
            let lf = la + 2.0 * lo.abs().max(hi.abs()) / (alpha * alpha);
            if flo.abs() + fhi.abs() > lf * (hi - lo) + slack {
                continue; // certified root-free
            }
            if hi - lo < min_width || depth > 48 {
                let mid = 0.5 * (lo + hi);
                let fmid = self.f_value(mid, n, alpha);
                if fmid.abs() < self.tangency_tol {
                    found.push((mid, fmid.abs(), (lo, hi), IntersectionKind::Tangency));
                }
                continue;
            }
            let mid = 0.5 * (lo + hi);
            let fmid = self.f_value(mid, n, alpha);
            stack.push((lo, flo, mid, fmid, depth + 1));
            stack.push((mid, fmid, hi, fhi, depth + 1));
        }

        found.sort_by(|p, q| p.0.total_cmp(&q.0));
        // merge duplicates from roots landing exactly on sample points and
        // tangency candidates detected in adjacent probe cells
        let scale = mus[m - 1].abs().max(mus[0].abs()).max(1.0);
        let mut merged: Vec<(f64, f64, (f64, f64), IntersectionKind)> = Vec::new();
        for item in found {
            match merged.last_mut() {
                Some(prev)
                    if (item.0 - prev.0).abs()
                        < (2.0 * min_width).max(1e-9 * scale) && item.3 == prev.3 =>
                {
                    if item.1 < prev.1 {
                        *prev = item;
                    }
                }
                _ => merged.push(item),
            }
        }

        for (mu_star, residual, bracket, kind) in merged {
            let gamma = self.curve_value(mu_star, n);
            let (ess, spread) = self.essential_value(mu_star)?;
            records.push(IntersectionRecord {
                curve: CurveId::Curve(n),
                alpha,
                mu_star,
                lambda: mu_star / alpha,
                kind,
                bracket,
                residual,
                classification: self.classify(gamma, ess, spread),
            });
        }
        Ok(())
    }

    fn bisect_root(
        &self,
        n: usize,
        alpha: f64,
        mut lo: f64,
        mut flo: f64,
        mut hi: f64,
        mut fhi: f64,
    ) -> (f64, f64, (f64, f64)) {
        debug_assert!(flo * fhi < 0.0);
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..80 {
            mid = 0.5 * (lo + hi);
            let fmid = self.f_value(mid, n, alpha);
            if fmid == 0.0 {
                return (mid, 0.0, (lo, hi));
            }
            if fmid.signum() == flo.signum() {
                lo = mid;
                flo = fmid;
            } else {
                hi = mid;
                fhi = fmid;
            }
            if hi - lo < 1e-13 * mid.abs().max(1.0) {
                break;
            }
        }
        let _ = (flo, fhi);
        let res = self.f_value(mid, n, alpha).abs();
        (mid, res, (lo, hi))
    }

    fn scan_essential_row(
        &self,
        table: &EigencurveTable,
        alpha: f64,
        records: &mut Vec<IntersectionRecord>,
        warnings: &mut Vec<RangeWarning>,
    ) -> Result<()> {
        let row = match &table.essential_row {
            Some(r) if r.iter().all(|v| v.is_finite()) => r,
            _ => return Ok(()),
        };
        let mus = &table.mu_samples;
        let m = mus.len();

        // declared law, or a least-squares line through the estimates
        let (intercept, slope, linear) = match self.essential_law() {
            Some((g0, ai)) => (g0, ai, true),
            None => {
                let mean_mu = mus.iter().sum::<f64>() / m as f64;
                let mean_g = row.iter().sum::<f64>() / m as f64;
                let mut sxx = 0.0;
                let mut sxy = 0.0;
                for i in 0..m {
                    sxx += (mus[i] - mean_mu).powi(2);
                    sxy += (mus[i] - mean_mu) * (row[i] - mean_g);
                }
                let s = sxy / sxx;
                let c = mean_g - s * mean_mu;
                let dev = (0..m)
                    .map(|i| (row[i] - c - s * mus[i]).abs())
                    .fold(0.0, f64::max);
                let spread_cap = table
                    .essential_spread
                    .as_ref()
                    .map(|sp| sp.iter().copied().fold(0.0, f64::max))
                    .unwrap_or(0.0);
                (c, s, dev <= (0.05 * spread_cap).max(1e-8))
            }
        };

        if linear {
            // gamma_inf(mu) + (mu/alpha)^2 = 0 with linear essential row:
            // mu^2 + slope alpha^2 mu + intercept alpha^2 = 0
            let a2 = alpha * alpha;
            let disc = slope * slope * a2 * a2 - 4.0 * intercept * a2;
            if disc >= 0.0 {
                let s = disc.sqrt();
                for mu_star in [0.5 * (-slope * a2 - s), 0.5 * (-slope * a2 + s)] {
                    if mu_star >= mus[0] && mu_star <= mus[m - 1] {
                        let residual =
                            (intercept + slope * mu_star + (mu_star / alpha).powi(2)).abs();
                        records.push(IntersectionRecord {
                            curve: CurveId::Essential,
                            alpha,
                            mu_star,
                            lambda: mu_star / alpha,
                            kind: IntersectionKind::EssentialIntervalEndpoint,
                            bracket: (mu_star, mu_star),
                            residual,
                            classification: SpectralClass::Essential,
                        });
                    } else {
                        warnings.push(RangeWarning {
                            curve: CurveId::Essential,
                            side: if mu_star < mus[0] {
                                Side::Negative
                            } else {
                                Side::Positive
                            },
                            mu_bound: if mu_star < mus[0] { mus[0] } else { mus[m - 1] },
                            f_at_bound: intercept
                                + slope * mu_star
                                + (mu_star / alpha).powi(2),
                        });
                    }
                }
            }
            return Ok(());
        }

        // nonlinear estimates: bracket on the sampled row, bisect with fresh
        // Persson estimates
        for i in 0..m - 1 {
            let fi = row[i] + (mus[i] / alpha).powi(2);
            let fj = row[i + 1] + (mus[i + 1] / alpha).powi(2);
            if fi * fj < 0.0 {
                let mut lo = mus[i];
                let mut hi = mus[i + 1];
                let mut flo = fi;
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    let fmid = self.essential_value(mid)?.0 + (mid / alpha).powi(2);
                    if fmid.signum() == flo.signum() {
                        lo = mid;
                        flo = fmid;
                    } else {
                        hi = mid;
                    }
                }
                let mu_star = 0.5 * (lo + hi);
                let residual =
                    (self.essential_value(mu_star)?.0 + (mu_star / alpha).powi(2)).abs();
                records.push(IntersectionRecord {
                    curve: CurveId::Essential,
                    alpha,
                    mu_star,
                    lambda: mu_star / alpha,
                    kind: IntersectionKind::EssentialIntervalEndpoint,
                    bracket: (lo, hi),
                    residual,
                    classification: SpectralClass::Essential,
                });
            }
        }
        Ok(())
    }

    /// Instability threshold of curve n on one side: the smallest alpha at
    /// which the parabola reaches the curve.
    ///
    /// The objective is alpha(mu) = |mu| / sqrt(-gamma_n(mu)) over the region
    /// where gamma_n is a negative discrete eigenvalue; its infimum over the
    /// side is the threshold. When the curve is already negative at mu = 0
    /// the infimum is approached as mu -> 0 (threshold 0+), reported at the
    /// sampled witness.
    pub fn thresholds(
        &self,
        table: &EigencurveTable,
        n: usize,
        side: Side,
    ) -> Result<ThresholdOutcome> {
        if n == 0 || n > table.curve_count() {
            return Err(Error::Range(format!("curve {n} not sampled")));
        }
        let on_side = |mu: f64| match side {
            Side::Positive => mu > 0.0,
            Side::Negative => mu < 0.0,
        };
        let side_samples: Vec<usize> = (0..table.mu_samples.len())
            .filter(|&i| on_side(table.mu_samples[i]))
            .collect();
        if side_samples.is_empty() {
            return Err(Error::Range(format!("curve {n} not sampled on {side:?} side")));
        }

        let gamma0 = self.curve_value(0.0, n);
        let (ess0, spread0) = self.essential_value(0.0)?;
        let negative_at_zero =
            self.classify(gamma0, ess0, spread0) == SpectralClass::Discrete && gamma0 < 0.0;

        // region where the curve is a negative discrete eigenvalue
        let qualifies = |i: usize| -> bool {
            let g = table.curves[n - 1][i];
            g < 0.0 && table.discrete_mask[n - 1][i] == SpectralClass::Discrete
        };
        let region: Vec<usize> = side_samples.iter().copied().filter(|&i| qualifies(i)).collect();

        let objective = |mu: f64| -> f64 {
            let g = self.curve_value(mu, n);
            if g >= 0.0 {
                f64::INFINITY
            } else {
                mu.abs() / (-g).sqrt()
            }
        };

        if !region.is_empty() {
            let (best_idx, _) = region
                .iter()
                .map(|&i| {
                    let mu = table.mu_samples[i];
                    (i, mu.abs() / (-table.curves[n - 1][i]).sqrt())
                })
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();

            if negative_at_zero {
                // threshold tends to 0+ as the witness approaches mu = 0;
                // report at the sampled witness nearest zero
                let witness = region
                    .iter()
                    .map(|&i| table.mu_samples[i])
                    .min_by(|p, q| p.abs().total_cmp(&q.abs()))
                    .unwrap();
                return Ok(ThresholdOutcome::Found(ThresholdRecord {
                    curve: n,
                    side,
                    alpha_threshold: objective(witness),
                    witness_mu: witness,
                    mechanism: Mechanism::CrossingIntoNegativity,
                }));
            }

            // refine the sampled minimizer by golden-section inside its
            // neighbouring samples
            let pos = table
                .mu_samples
                .iter()
                .position(|&mu| mu == table.mu_samples[best_idx])
                .unwrap();
            let lo = table.mu_samples[pos.saturating_sub(1)];
            let hi = table.mu_samples[(pos + 1).min(table.mu_samples.len() - 1)];
            let (witness, alpha_threshold) = golden_min(lo, hi, &objective);
            return Ok(ThresholdOutcome::Found(ThresholdRecord {
                curve: n,
                side,
                alpha_threshold,
                witness_mu: witness,
                mechanism: Mechanism::Tangency,
            }));
        }

        // the sampled table never sees the dip; it can still exist beyond
        // the range if the damping has the right sign for this side
        let dip_possible = match side {
            Side::Positive => self.coeffs.a_min < 0.0,
            Side::Negative => self.coeffs.a_max > 0.0,
        };
        let min_sample = side_samples
            .iter()
            .map(|&i| (table.curves[n - 1][i], table.mu_samples[i]))
            .min_by(|p, q| p.0.total_cmp(&q.0))
            .unwrap();
        if !dip_possible {
            return Ok(ThresholdOutcome::NotFound {
                min_gamma: min_sample.0,
                mu_at_min: min_sample.1,
            });
        }

        // bisection in alpha: min_mu f_alpha is non-increasing in alpha
        let reaches = |alpha: f64| -> Option<(f64, f64)> {
            let (lo, hi) = self.default_mu_range(alpha);
            let (lo, hi) = match side {
                Side::Positive => (0.0, hi),
                Side::Negative => (lo, 0.0),
            };
            let scan = 129;
            let mut best = (f64::INFINITY, lo);
            for i in 0..=scan {
                let mu = lo + (hi - lo) * i as f64 / scan as f64;
                if mu == 0.0 {
                    continue;
                }
                let fv = self.f_value(mu, n, alpha);
                if fv < best.0 {
                    best = (fv, mu);
                }
            }
            let step = (hi - lo) / scan as f64;
            let (mu_min, f_min) = golden_min(best.1 - step, best.1 + step, &|mu| {
                self.f_value(mu, n, alpha)
            });
            (f_min <= 0.0).then_some((mu_min, f_min))
        };

        let mut alpha_hi = 1.0;
        let mut witness = None;
        for _ in 0..60 {
            if let Some(w) = reaches(alpha_hi) {
                witness = Some(w);
                break;
            }
            alpha_hi *= 2.0;
        }
        let Some(mut witness) = witness else {
            return Ok(ThresholdOutcome::NotFound {
                min_gamma: min_sample.0,
                mu_at_min: min_sample.1,
            });
        };
        let mut alpha_lo = alpha_hi / 2.0;
        while reaches(alpha_lo).is_some() && alpha_lo > 1e-9 {
            alpha_hi = alpha_lo;
            alpha_lo /= 2.0;
        }
        for _ in 0..40 {
            let mid = 0.5 * (alpha_lo + alpha_hi);
            match reaches(mid) {
                Some(w) => {
                    witness = w;
                    alpha_hi = mid;
                }
                None => alpha_lo = mid,
            }
            if alpha_hi - alpha_lo < 1e-8 * alpha_hi {
                break;
            }
        }
        Ok(ThresholdOutcome::Found(ThresholdRecord {
            curve: n,
            side,
            alpha_threshold: alpha_hi,
            witness_mu: witness.0,
            mechanism: Mechanism::Tangency,
        }))
    }

    /// Predicted counts of real spectral points at one alpha, with the
    /// theorem-backed lower-bound guarantees evaluated against them.
    pub fn count_real_points(
        &self,
        table: &EigencurveTable,
        alpha: f64,
    ) -> Result<RealPointCounts> {
        let zero = table
            .zero_index()
            .ok_or_else(|| Error::Range("table must include a mu = 0 sample".into()))?;

        let ess0 = table
            .essential_row
            .as_ref()
            .map(|r| r[zero])
            .unwrap_or(f64::INFINITY);
        let floor0 = ess0.min(0.0);
        let n0 = (0..table.curve_count())
            .filter(|&n| {
                table.curves[n][zero] < floor0
                    && table.discrete_mask[n][zero] != SpectralClass::Essential
            })
            .count();

        let scan = self.intersect_all(table, alpha)?;
        let mut positive = SideCounts::default();
        let mut negative = SideCounts::default();
        for rec in &scan.records {
            let bucket = if rec.lambda > 0.0 {
                &mut positive
            } else {
                &mut negative
            };
            match rec.classification {
                SpectralClass::Discrete => bucket.discrete += 1,
                SpectralClass::Ambiguous => bucket.ambiguous += 1,
                SpectralClass::Essential => bucket.essential += 1,
            }
        }

        let essential_both_sides = ess0.is_finite() && ess0 < -self.class_tol;

        let mut guarantees = Vec::new();
        for side in [Side::Positive, Side::Negative] {
            let on_side = |mu: f64| match side {
                Side::Positive => mu >= 0.0,
                Side::Negative => mu <= 0.0,
            };
            let ess_nonneg = match &table.essential_row {
                None => true,
                Some(row) => (0..row.len())
                    .filter(|&i| on_side(table.mu_samples[i]))
                    .all(|i| row[i] >= -self.class_tol),
            };
            let counts = match side {
                Side::Positive => &positive,
                Side::Negative => &negative,
            };
            if ess_nonneg && n0 > 0 {
                // persistence: the N0 negative eigenvalues of S_0 cross the
                // parabola on this side for every alpha
                guarantees.push(CountGuarantee {
                    side,
                    basis: format!("persistence of {n0} negative eigenvalues at mu = 0"),
                    guaranteed_min: n0,
                    predicted: counts.discrete,
                    satisfied: counts.discrete >= n0,
                });
            }
            let ess_positive = match &table.essential_row {
                None => true,
                Some(row) => (0..row.len())
                    .filter(|&i| on_side(table.mu_samples[i]))
                    .all(|i| row[i] > self.class_tol),
            };
            if ess_positive {
                // threshold sequence: each curve positive at 0 whose first
                // touch lies below alpha contributes two intersections
                let mut j = 0usize;
                for n in 1..=table.curve_count() {
                    if table.curves[n - 1][zero] <= 0.0 {
                        continue;
                    }
                    match self.thresholds(table, n, side)? {
                        ThresholdOutcome::Found(rec)
                            if rec.mechanism == Mechanism::Tangency
                                && rec.alpha_threshold < alpha =>
                        {
                            j += 1;
                        }
                        _ => {}
                    }
                }
                if j > 0 {
                    guarantees.push(CountGuarantee {
                        side,
                        basis: format!("{j} first-touch thresholds below alpha = {alpha}"),
                        guaranteed_min: 2 * j + n0,
                        predicted: counts.discrete,
                        satisfied: counts.discrete >= 2 * j + n0,
                    });
                }
            }
        }

        Ok(RealPointCounts {
            alpha,
            n0,
            positive,
            negative,
            essential_both_sides,
            guarantees,
        })
    }
}

/// Golden-section minimization on [lo, hi]; returns (argmin, min).
fn golden_min(lo: f64, hi: f64, f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if b - a < 1e-12 * b.abs().max(1.0) {
            break;
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, AxisSpec, InfDeclarations};
    use std::f64::consts::PI;

    fn interval_grid(points: usize) -> Grid {
        build_grid(&[AxisSpec::Bounded {
            lower: 0.0,
            upper: PI,
            points,
        }])
        .unwrap()
    }

    fn const_coeffs(grid: &Grid, a: f64, b: f64) -> CoefficientSet {
        let n = grid.interior_count();
        CoefficientSet::from_samples(grid, vec![a; n], vec![b; n], &InfDeclarations::default())
            .unwrap()
    }

    #[test]
    fn constant_damping_curves_are_exact_lines() {
        let g = interval_grid(99);
        let c = const_coeffs(&g, 1.0, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let table = engine.sample((-10.0, 10.0), 11, 3).unwrap();
        assert_eq!(table.lipschitz_bound, 1.0);
        for n in 0..3 {
            let g0 = table.curves[n][table.zero_index().unwrap()];
            for (i, &mu) in table.mu_samples.iter().enumerate() {
                assert!((table.curves[n][i] - (g0 + mu)).abs() < 1e-8);
            }
        }
        table.check_lipschitz().unwrap();
    }

    #[test]
    fn intersections_match_closed_form_quadratic() {
        let g = interval_grid(199);
        let c = const_coeffs(&g, 1.0, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let alpha = 3.0;
        let table = engine.sample_for_alpha(alpha, 33, 1).unwrap();
        let scan = engine.intersect_all(&table, alpha).unwrap();
        let g1 = engine.curve_value(0.0, 1);
        // curve gamma_1(mu) = g1 + mu; roots of mu^2/9 + mu + g1 = 0
        let disc = (81.0 - 36.0 * g1).sqrt();
        let expected = [(-9.0 - disc) / 2.0, (-9.0 + disc) / 2.0];
        let roots: Vec<f64> = scan
            .records
            .iter()
            .filter(|r| r.curve == CurveId::Curve(1))
            .map(|r| r.mu_star)
            .collect();
        assert_eq!(roots.len(), 2, "records: {:?}", scan.records);
        for (found, exp) in roots.iter().zip(expected) {
            assert!(
                (found - exp).abs() < 1e-8,
                "root {found} vs closed-form {exp}"
            );
        }
        for r in &scan.records {
            assert!(r.lambda < 0.0);
            assert_eq!(r.lambda, r.mu_star / alpha);
            assert!(r.residual < 1e-9);
        }
        // continuum oracle: mu^2 + 9 mu + 9 = 0 gives -1.1459, -7.8541
        assert!((roots[1] - (-1.1459)).abs() < 2e-3);
        assert!((roots[0] - (-7.8541)).abs() < 2e-3);
    }

    #[test]
    fn no_real_intersection_below_threshold() {
        let g = interval_grid(99);
        let c = const_coeffs(&g, 1.0, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let table = engine.sample_for_alpha(1.0, 33, 1).unwrap();
        let scan = engine.intersect_all(&table, 1.0).unwrap();
        assert!(
            scan.records.iter().all(|r| r.curve != CurveId::Curve(1)),
            "discriminant of mu^2 + mu + 1 is negative: no real intersection"
        );
        assert!(scan.warnings.is_empty());
    }

    #[test]
    fn discrete_tangency_detected_at_critical_alpha() {
        let g = interval_grid(99);
        let c = const_coeffs(&g, 1.0, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let g1 = engine.curve_value(0.0, 1);
        // with gamma_1(mu) = g1 + mu the discriminant vanishes at
        // alpha = 2 sqrt(g1) (discrete-corrected tangency)
        let alpha = 2.0 * g1.sqrt();
        let table = engine.sample_for_alpha(alpha, 33, 1).unwrap();
        let scan = engine.intersect_all(&table, alpha).unwrap();
        let tangencies: Vec<_> = scan
            .records
            .iter()
            .filter(|r| r.kind == IntersectionKind::Tangency)
            .collect();
        assert_eq!(tangencies.len(), 1, "records: {:?}", scan.records);
        let t = tangencies[0];
        assert!((t.mu_star - (-alpha * alpha / 2.0)).abs() < 1e-3);
        assert!((t.lambda - (-alpha / 2.0)).abs() < 1e-3);
    }

    #[test]
    fn thresholds_constant_negative_damping() {
        let g = interval_grid(199);
        let c = const_coeffs(&g, -1.0, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let table = engine.sample((-30.0, 30.0), 61, 3).unwrap();
        for n in 1..=3 {
            let rec = engine
                .thresholds(&table, n, Side::Positive)
                .unwrap();
            let rec = rec.found().expect("threshold exists");
            let gn0 = engine.curve_value(0.0, n);
            let expected = 2.0 * gn0.sqrt(); // discrete-corrected 2n
            assert!(
                (rec.alpha_threshold - expected).abs() < 1e-4 * expected,
                "curve {n}: threshold {} vs {expected}",
                rec.alpha_threshold
            );
            assert!((rec.alpha_threshold - 2.0 * n as f64).abs() < 0.01 * 2.0 * n as f64);
            assert_eq!(rec.mechanism, Mechanism::Tangency);
            // witness at the tangency point mu = 2 gamma_n(0)
            assert!((rec.witness_mu - 2.0 * gn0).abs() < 1e-2 * (1.0 + 2.0 * gn0));
        }
        // non-decreasing in n
        let t: Vec<f64> = (1..=3)
            .map(|n| {
                engine
                    .thresholds(&table, n, Side::Positive)
                    .unwrap()
                    .found()
                    .unwrap()
                    .alpha_threshold
            })
            .collect();
        assert!(t[0] < t[1] && t[1] < t[2]);
    }

    #[test]
    fn threshold_alpha_bisection_when_table_misses_the_dip() {
        // same scenario, but the table range stops before the curve turns
        // negative; the alpha-bisection fallback must still find 2 sqrt(g1)
        let g = interval_grid(199);
        let c = const_coeffs(&g, -1.0, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let table = engine.sample((-0.5, 0.5), 11, 1).unwrap();
        let rec = engine.thresholds(&table, 1, Side::Positive).unwrap();
        let rec = rec.found().expect("threshold exists");
        let expected = 2.0 * engine.curve_value(0.0, 1).sqrt();
        assert!(
            (rec.alpha_threshold - expected).abs() < 1e-4 * expected,
            "threshold {} vs {expected}",
            rec.alpha_threshold
        );
    }

    #[test]
    fn threshold_zero_plus_for_negative_ground_state() {
        let g = interval_grid(99);
        let c = const_coeffs(&g, -1.0, -2.0); // gamma_1(0) ~ 1 - 2 < 0
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let table = engine.sample((-5.0, 5.0), 41, 1).unwrap();
        let rec = engine.thresholds(&table, 1, Side::Positive).unwrap();
        let rec = rec.found().expect("mechanism (i) applies");
        assert_eq!(rec.mechanism, Mechanism::CrossingIntoNegativity);
        let g_w = engine.curve_value(rec.witness_mu, 1);
        assert!(g_w < 0.0);
        assert!((rec.alpha_threshold - rec.witness_mu.abs() / (-g_w).sqrt()).abs() < 1e-12);
        // threshold is an upper bound tending to zero with the witness
        assert!(rec.alpha_threshold < 0.3);
    }

    #[test]
    fn threshold_not_found_for_nonnegative_damping() {
        let g = interval_grid(99);
        let c = const_coeffs(&g, 0.5, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let table = engine.sample((-10.0, 10.0), 21, 1).unwrap();
        match engine.thresholds(&table, 1, Side::Positive).unwrap() {
            ThresholdOutcome::NotFound { min_gamma, .. } => assert!(min_gamma > 0.0),
            ThresholdOutcome::Found(rec) => panic!("unexpected threshold {rec:?}"),
        }
    }

    #[test]
    fn count_real_points_constant_negative_damping() {
        let g = interval_grid(199);
        let c = const_coeffs(&g, -1.0, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let alpha = 3.0; // above alpha_1 = 2, below alpha_2 = 4
        let table = engine.sample_for_alpha(alpha, 41, 3).unwrap();
        let counts = engine.count_real_points(&table, alpha).unwrap();
        assert_eq!(counts.n0, 0);
        assert_eq!(counts.positive.discrete, 2);
        assert_eq!(counts.negative.total(), 0);
        assert!(!counts.essential_both_sides);
        let guar: Vec<_> = counts
            .guarantees
            .iter()
            .filter(|g| g.side == Side::Positive)
            .collect();
        assert!(!guar.is_empty());
        assert!(guar.iter().all(|g| g.satisfied));
        assert_eq!(guar[0].guaranteed_min, 2);
    }

    #[test]
    fn count_real_points_single_bound_state() {
        // one negative eigenvalue of S_0 on the truncated line, damping with
        // a_min < 0 and a_inf = 0: at least one positive real point for all
        // alpha by persistence
        let g = build_grid(&[AxisSpec::Truncated {
            radius: 12.0,
            points: 599,
        }])
        .unwrap();
        let n = g.interior_count();
        let b: Vec<f64> = (0..n)
            .map(|i| if g.coords(i).0.abs() < 1.0 { -1.2 } else { 0.0 })
            .collect();
        let a: Vec<f64> = (0..n)
            .map(|i| if g.coords(i).0.abs() < 1.0 { -1.0 } else { 0.0 })
            .collect();
        let decls = InfDeclarations {
            a_inf: Some(0.0),
            gamma_inf_0: Some(0.0),
            inf_tolerance: 0.01,
            ..Default::default()
        };
        let c = CoefficientSet::from_samples(&g, a, b, &decls).unwrap();
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        for alpha in [0.1, 1.0, 10.0] {
            let table = engine.sample_for_alpha(alpha, 33, 2).unwrap();
            let counts = engine.count_real_points(&table, alpha).unwrap();
            assert_eq!(counts.n0, 1, "alpha = {alpha}");
            assert!(
                counts.positive.discrete >= 1,
                "alpha = {alpha}: {counts:?}"
            );
        }
    }

    #[test]
    fn essential_interval_closed_form() {
        let (lo, hi) = essential_interval(0.0, 1.0, 2.0).unwrap();
        assert_eq!((lo, hi), (-2.0, 0.0));
        let (lo, hi) = essential_interval(0.0, -1.0, 2.0).unwrap();
        assert_eq!((lo, hi), (0.0, 2.0));
        assert!(essential_interval(1.0, 0.0, 5.0).is_none());
        // endpoints solve x^2 + alpha a_inf x + gamma_inf_0 = 0
        let (g0, ai, alpha) = (-0.7, 0.4, 1.3);
        let (lo, hi) = essential_interval(g0, ai, alpha).unwrap();
        for x in [lo, hi] {
            assert!((x * x + alpha * ai * x + g0).abs() < 1e-12);
        }
    }

    #[test]
    fn essential_row_intersections_from_declared_law() {
        let g = build_grid(&[AxisSpec::Truncated {
            radius: 20.0,
            points: 399,
        }])
        .unwrap();
        let n = g.interior_count();
        let a: Vec<f64> = (0..n)
            .map(|i| {
                let x = g.coords(i).0;
                -x * x / (1.0 + x * x)
            })
            .collect();
        let decls = InfDeclarations {
            a_inf: Some(-1.0),
            gamma_inf_0: Some(0.0),
            inf_tolerance: 0.01,
            ..Default::default()
        };
        let c = CoefficientSet::from_samples(&g, a, vec![0.0; n], &decls).unwrap();
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let alpha = 2.0;
        let table = engine.sample_for_alpha(alpha, 21, 1).unwrap();
        let scan = engine.intersect_all(&table, alpha).unwrap();
        let ess: Vec<f64> = scan
            .records
            .iter()
            .filter(|r| r.curve == CurveId::Essential)
            .map(|r| r.lambda)
            .collect();
        // essential row -mu meets the parabola at mu = 0 and mu = alpha^2:
        // lambda endpoints 0 and alpha, the Prop.-4.2 interval [0, 2]
        assert_eq!(ess.len(), 2, "records: {:?}", scan.records);
        assert!(ess[0].abs() < 1e-9);
        assert!((ess[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_slope_constant_damping() {
        let g = interval_grid(99);
        let c = const_coeffs(&g, 2.0, 0.0);
        let mut engine = CurveEngine::new(&g, &c, SolverOptions::default());
        engine.asymptotic_onset = 5.0;
        let table = engine.sample((-10.0, 10.0), 11, 2).unwrap();
        for n in 1..=2 {
            let s_pos = table.asymptotic_slope(n, Side::Positive, 5.0).unwrap();
            let s_neg = table.asymptotic_slope(n, Side::Negative, 5.0).unwrap();
            assert!((s_pos.slope - 2.0).abs() < 1e-8);
            assert!((s_neg.slope - 2.0).abs() < 1e-8);
            assert!(s_pos.error_proxy < 1e-8);
        }
        // onset not reached
        assert!(table.asymptotic_slope(1, Side::Positive, 50.0).is_err());
    }

    #[test]
    fn asymptotic_slope_sign_changing_damping() {
        let g = interval_grid(399);
        let n = g.interior_count();
        let a: Vec<f64> = (0..n)
            .map(|i| if g.coords(i).0 < PI / 2.0 { -1.0 } else { 1.0 })
            .collect();
        let c = CoefficientSet::from_samples(&g, a, vec![0.0; n], &Default::default()).unwrap();
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let table = engine.sample((-400.0, 400.0), 17, 1).unwrap();
        let s_pos = table.asymptotic_slope(1, Side::Positive, 100.0).unwrap();
        let s_neg = table.asymptotic_slope(1, Side::Negative, 100.0).unwrap();
        // slope -> a_min = -1 for mu -> +inf, a_max = +1 for mu -> -inf
        assert!((s_pos.slope - (-1.0)).abs() < 0.05, "slope {}", s_pos.slope);
        assert!((s_neg.slope - 1.0).abs() < 0.05, "slope {}", s_neg.slope);
    }

    #[test]
    fn rejects_bad_intersect_input() {
        let g = interval_grid(19);
        let c = const_coeffs(&g, 1.0, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        let table = engine.sample((-1.0, 1.0), 5, 1).unwrap();
        assert!(engine.intersect_all(&table, 0.0).is_err());
        assert!(engine.intersect_all(&table, -1.0).is_err());
    }

    #[test]
    fn warning_when_range_cut_short() {
        let g = interval_grid(99);
        let c = const_coeffs(&g, -1.0, 0.0);
        let engine = CurveEngine::new(&g, &c, SolverOptions::default());
        // curve 1 - mu crosses the alpha = 3 parabola near mu = 1.15 and
        // 7.85; a range stopping at 5 sees one crossing and warns about the
        // second
        let table = engine.sample((-5.0, 5.0), 21, 1).unwrap();
        let scan = engine.intersect_all(&table, 3.0).unwrap();
        let crossings = scan
            .records
            .iter()
            .filter(|r| r.curve == CurveId::Curve(1))
            .count();
        assert_eq!(crossings, 1);
        assert_eq!(scan.warnings.len(), 1);
        assert_eq!(scan.warnings[0].side, Side::Positive);
    }
}
