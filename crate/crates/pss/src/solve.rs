//! Numerical solutions: a pseudo-spectral method-of-lines integrator for the
//! short-pulse family on a periodic domain, the exact sine-Gordon kink on a
//! rectangle, finite-difference jet access into sampled fields, and the
//! field CSV format.
//!
//! The mixed-derivative equation
//! `z_xt = m₁[z + (1/6)(z³)_xx] − (m₂/2m₁) z_xx`
//! is integrated in the nonlocal evolution form
//! `z_t = m₁ ∂ₓ⁻¹z + (m₁/6)(z³)_x − (m₂/2m₁) z_x`,
//! with `∂ₓ` and `∂ₓ⁻¹` computed by discrete Fourier transform (zero mode of
//! the antiderivative set to zero) and the cubic term dealiased by the 2/3
//! rule. Periodic solvability forces `∫z dx = 0`; the mean is projected out
//! after every step and the pre-projection drift is recorded.

use crate::jet::{EvalError, JetPoint, JetVariable};
use crate::system::PssSystem;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

/// Magnitude threshold for the wave-breaking detector.
pub const BLOWUP_THRESHOLD: f64 = 1e3;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("initial data has non-zero spatial mean {mean:e} (periodic solvability needs mean zero)")]
    NonZeroMean { mean: f64 },
    #[error("initial data is rough at grid resolution: relative spectral tail {tail:e} exceeds 1e-10")]
    RoughInitialData { tail: f64 },
    #[error("blow-up detected at t = {time}: |z| or |z_x| exceeded {BLOWUP_THRESHOLD} (wave breaking)")]
    BlowUp { time: f64 },
    #[error("jet order {i}+{j} exceeds 2")]
    JetOrder { i: u8, j: u8 },
    #[error("node ({ix}, {it}) lacks the stencil for a ({i},{j}) derivative")]
    Stencil { ix: usize, it: usize, i: u8, j: u8 },
    #[error("field needs at least {needed} stored rows, has {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("expression evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed field CSV: {0}")]
    Csv(String),
    #[error("malformed metadata: {0}")]
    Meta(#[from] serde_json::Error),
}

/// Discretization of a periodic x-interval and a time span.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid {
    /// Spatial nodes; must be a power of two, at least 16.
    pub n: usize,
    /// Spatial period.
    pub length: f64,
    /// Left endpoint.
    pub x0: f64,
    /// Time step.
    pub dt: f64,
    /// Final time.
    pub t_final: f64,
    /// Keep every k-th step (the initial and final states are always kept).
    pub store_every: usize,
}

impl Grid {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.n < 16 || !self.n.is_power_of_two() {
            return Err(SolveError::InvalidGrid(format!(
                "n = {} must be a power of two >= 16",
                self.n
            )));
        }
        // NaN fails all of these on purpose
        if self.dt.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(SolveError::InvalidGrid(format!("dt = {} must be > 0", self.dt)));
        }
        if self.length.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(SolveError::InvalidGrid(format!(
                "period L = {} must be > 0",
                self.length
            )));
        }
        if self.t_final.is_nan() || self.t_final < 0.0 {
            return Err(SolveError::InvalidGrid("t_final must be >= 0".into()));
        }
        if self.store_every == 0 {
            return Err(SolveError::InvalidGrid("store_every must be >= 1".into()));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        let dx = self.length / self.n as f64;
        (0..self.n).map(|i| self.x0 + i as f64 * dx).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldMetadata {
    pub equation: String,
    pub parameters: BTreeMap<String, f64>,
    pub periodic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    /// Largest pre-projection mean drift per step seen during the solve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_mean_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
}

/// A sampled solution z(x, t).
#[derive(Debug, Clone)]
pub struct SolutionField {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// values[it][ix]
    pub values: Vec<Vec<f64>>,
    pub metadata: FieldMetadata,
}

impl SolutionField {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn nt(&self) -> usize {
        self.ts.len()
    }

    pub fn dx(&self) -> f64 {
        if self.metadata.periodic {
            self.metadata.period.unwrap_or(0.0) / self.nx() as f64
        } else {
            self.xs[1] - self.xs[0]
        }
    }

    pub fn dt_stored(&self) -> f64 {
        self.ts[1] - self.ts[0]
    }

    pub fn periodic(&self) -> bool {
        self.metadata.periodic
    }
}

// ---------------------------------------------------------------------------
// Spectral helpers
// ---------------------------------------------------------------------------

struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// signed wavenumbers 2π j / L
    k: Vec<f64>,
    /// 2/3-rule dealiasing mask
    keep: Vec<bool>,
}

impl Spectral {
    fn new(n: usize, length: f64) -> Spectral {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let base = 2.0 * std::f64::consts::PI / length;
        let k: Vec<f64> = (0..n)
            .map(|j| {
                let signed = if j <= n / 2 { j as isize } else { j as isize - n as isize };
                base * signed as f64
            })
            .collect();
        let keep: Vec<bool> = (0..n)
            .map(|j| {
                let signed = if j <= n / 2 { j as isize } else { j as isize - n as isize };
                signed.unsigned_abs() <= n / 3
            })
            .collect();
        Spectral {
            n,
            forward,
            inverse,
            k,
            keep,
        }
    }

    fn fft(&self, u: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn ifft_real(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Spectral ∂ₓ (Nyquist mode dropped to keep the result real).
    fn derivative(&self, u: &[f64]) -> Vec<f64> {
        let mut hat = self.fft(u);
        let nyquist = self.n / 2;
        for (j, h) in hat.iter_mut().enumerate() {
            if j == nyquist {
                *h = Complex64::new(0.0, 0.0);
            } else {
                *h *= Complex64::new(0.0, self.k[j]);
            }
        }
        self.ifft_real(hat)
    }

    /// Spectral ∂ₓ⁻¹ with the zero mode set to zero.
    fn antiderivative(&self, u: &[f64]) -> Vec<f64> {
        let mut hat = self.fft(u);
        let nyquist = self.n / 2;
        for (j, h) in hat.iter_mut().enumerate() {
            if j == 0 || j == nyquist {
                *h = Complex64::new(0.0, 0.0);
            } else {
                *h /= Complex64::new(0.0, self.k[j]);
            }
        }
        self.ifft_real(hat)
    }

    fn truncate(&self, hat: &mut [Complex64]) {
        for (h, keep) in hat.iter_mut().zip(&self.keep) {
            if !keep {
                *h = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Dealiased cube: truncate, cube in physical space, truncate again.
    fn dealiased_cube(&self, u: &[f64]) -> Vec<f64> {
        let mut hat = self.fft(u);
        self.truncate(&mut hat);
        let filtered = self.ifft_real(hat);
        let cubed: Vec<f64> = filtered.iter().map(|&v| v * v * v).collect();
        let mut hat3 = self.fft(&cubed);
        self.truncate(&mut hat3);
        self.ifft_real(hat3)
    }

    /// Relative magnitude of the top-third spectral tail.
    fn tail(&self, u: &[f64]) -> f64 {
        let hat = self.fft(u);
        let peak = hat.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let tail = hat
            .iter()
            .zip(&self.keep)
            .filter(|(_, keep)| !**keep)
            .map(|(h, _)| h.norm())
            .fold(0.0, f64::max);
        tail / peak
    }
}

// ---------------------------------------------------------------------------
// Short-pulse family solver
// ---------------------------------------------------------------------------

/// Integrates `z_xt = m₁[z + (1/6)(z³)_xx] − (m₂/2m₁) z_xx` from nodal
/// initial data with classical fixed-step RK4.
pub fn solve_family_sp(
    m1: f64,
    m2: f64,
    z0: &[f64],
    grid: &Grid,
) -> Result<SolutionField, SolveError> {
    grid.validate()?;
    if m1 == 0.0 {
        return Err(SolveError::InvalidParameter {
            name: "m1",
            value: m1,
            reason: "must be nonzero",
        });
    }
    if z0.len() != grid.n {
        return Err(SolveError::InvalidGrid(format!(
            "initial data has {} nodes, grid has {}",
            z0.len(),
            grid.n
        )));
    }
    let n = grid.n;
    let mean0 = z0.iter().sum::<f64>() / n as f64;
    if mean0.abs() > 1e-12 {
        return Err(SolveError::NonZeroMean { mean: mean0 });
    }
    let spectral = Spectral::new(n, grid.length);
    let tail = spectral.tail(z0);
    if tail > 1e-10 {
        return Err(SolveError::RoughInitialData { tail });
    }

    let rhs = |u: &[f64]| -> Vec<f64> {
        let anti = spectral.antiderivative(u);
        let cubed = spectral.dealiased_cube(u);
        let cubed_x = spectral.derivative(&cubed);
        let u_x = spectral.derivative(u);
        (0..n)
            .map(|i| m1 * anti[i] + m1 / 6.0 * cubed_x[i] - m2 / (2.0 * m1) * u_x[i])
            .collect()
    };

    let steps = (grid.t_final / grid.dt).round() as usize;
    let mut u: Vec<f64> = z0.to_vec();
    let mut ts = vec![0.0];
    let mut values = vec![u.clone()];
    let mut max_drift: f64 = 0.0;

    for step in 1..=steps {
        let k1 = rhs(&u);
        let mid1: Vec<f64> = (0..n).map(|i| u[i] + 0.5 * grid.dt * k1[i]).collect();
        let k2 = rhs(&mid1);
        let mid2: Vec<f64> = (0..n).map(|i| u[i] + 0.5 * grid.dt * k2[i]).collect();
        let k3 = rhs(&mid2);
        let end: Vec<f64> = (0..n).map(|i| u[i] + grid.dt * k3[i]).collect();
        let k4 = rhs(&end);
        for i in 0..n {
            u[i] += grid.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        // project out the mean, recording the pre-projection drift
        let mean = u.iter().sum::<f64>() / n as f64;
        max_drift = max_drift.max(mean.abs());
        for v in u.iter_mut() {
            *v -= mean;
        }

        let t = step as f64 * grid.dt;
        let amp = u.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let slope = spectral
            .derivative(&u)
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        if amp > BLOWUP_THRESHOLD || slope > BLOWUP_THRESHOLD {
            return Err(SolveError::BlowUp { time: t });
        }
        if step % grid.store_every == 0 || step == steps {
            ts.push(t);
            values.push(u.clone());
        }
    }

    Ok(SolutionField {
        xs: grid.xs(),
        ts,
        values,
        metadata: FieldMetadata {
            equation: "family_sp".to_string(),
            parameters: [("m1".to_string(), m1), ("m2".to_string(), m2)]
                .into_iter()
                .collect(),
            periodic: true,
            period: Some(grid.length),
            max_mean_drift: Some(max_drift),
            grid: Some(grid.clone()),
        },
    })
}

/// Evaluates an initial profile at the grid nodes.
pub fn sample_profile(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    grid.xs().into_iter().map(f).collect()
}

// ---------------------------------------------------------------------------
// Exact kink field
// ---------------------------------------------------------------------------

/// Samples the exact kink `z(x,t) = 4 arctan(exp(ηx + t/η))` of
/// `z_xt = sin z` on a rectangle.
pub fn sine_gordon_kink(
    eta: f64,
    x_range: (f64, f64),
    t_range: (f64, f64),
    nx: usize,
    nt: usize,
) -> Result<SolutionField, SolveError> {
    if eta == 0.0 {
        return Err(SolveError::InvalidParameter {
            name: "eta",
            value: eta,
            reason: "must be nonzero",
        });
    }
    if nx < 3 || nt < 3 {
        return Err(SolveError::InvalidGrid(
            "kink sampling needs at least 3 nodes per direction".into(),
        ));
    }
    let (x0, x1) = x_range;
    let (t0, t1) = t_range;
    if x1.partial_cmp(&x0) != Some(std::cmp::Ordering::Greater)
        || t1.partial_cmp(&t0) != Some(std::cmp::Ordering::Greater)
    {
        return Err(SolveError::InvalidGrid("empty rectangle".into()));
    }
    let dx = (x1 - x0) / (nx - 1) as f64;
    let dt = (t1 - t0) / (nt - 1) as f64;
    let xs: Vec<f64> = (0..nx).map(|i| x0 + i as f64 * dx).collect();
    let ts: Vec<f64> = (0..nt).map(|j| t0 + j as f64 * dt).collect();
    let values: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| {
            xs.iter()
                .map(|&x| 4.0 * (eta * x + t / eta).exp().atan())
                .collect()
        })
        .collect();
    Ok(SolutionField {
        xs,
        ts,
        values,
        metadata: FieldMetadata {
            equation: "sine_gordon_kink".to_string(),
            parameters: [("eta".to_string(), eta)].into_iter().collect(),
            periodic: false,
            period: None,
            max_mean_drift: None,
            grid: None,
        },
    })
}

// ---------------------------------------------------------------------------
// Finite-difference jets
// ---------------------------------------------------------------------------

/// Central finite-difference jet `∂^{i+j} z / ∂x^i ∂t^j` at a node, O(h²).
/// Periodic fields wrap in x; in t (and in x for non-periodic fields) the
/// node must be interior.
pub fn numerical_jet(
    field: &SolutionField,
    i: u8,
    j: u8,
    ix: usize,
    it: usize,
) -> Result<f64, SolveError> {
    if i + j > 2 {
        return Err(SolveError::JetOrder { i, j });
    }
    let nx = field.nx();
    let nt = field.nt();
    if nt < 3 && j > 0 {
        return Err(SolveError::TooFewRows { needed: 3, got: nt });
    }
    let hx = field.dx();
    let ht = if nt >= 2 { field.dt_stored() } else { 1.0 };
    let wrap = |ix: isize| -> usize { ix.rem_euclid(nx as isize) as usize };
    let at = |dxs: isize, dts: isize| -> Result<f64, SolveError> {
        let x_index = if field.periodic() {
            wrap(ix as isize + dxs)
        } else {
            let raw = ix as isize + dxs;
            if raw < 0 || raw >= nx as isize {
                return Err(SolveError::Stencil { ix, it, i, j });
            }
            raw as usize
        };
        let t_raw = it as isize + dts;
        if t_raw < 0 || t_raw >= nt as isize {
            return Err(SolveError::Stencil { ix, it, i, j });
        }
        Ok(field.values[t_raw as usize][x_index])
    };
    let v = match (i, j) {
        (0, 0) => at(0, 0)?,
        (1, 0) => (at(1, 0)? - at(-1, 0)?) / (2.0 * hx),
        (0, 1) => (at(0, 1)? - at(0, -1)?) / (2.0 * ht),
        (2, 0) => (at(1, 0)? - 2.0 * at(0, 0)? + at(-1, 0)?) / (hx * hx),
        (0, 2) => (at(0, 1)? - 2.0 * at(0, 0)? + at(0, -1)?) / (ht * ht),
        (1, 1) => (at(1, 1)? - at(-1, 1)? - at(1, -1)? + at(-1, -1)?) / (4.0 * hx * ht),
        _ => unreachable!("order filtered above"),
    };
    Ok(v)
}

/// Builds a jet point with all derivatives up to order 2 at a node, plus the
/// system's pinned parameters.
pub fn jet_point_at(
    field: &SolutionField,
    sys: &PssSystem,
    ix: usize,
    it: usize,
) -> Result<JetPoint, SolveError> {
    let mut p = JetPoint::new();
    p.set_var(JetVariable::X, field.xs[ix]);
    p.set_var(JetVariable::T, field.ts[it]);
    for (i, j) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
        p.set_var(
            JetVariable::z(i, j).expect("order 2 fits the cap"),
            numerical_jet(field, i, j, ix, it)?,
        );
    }
    for (name, value) in &sys.parameters {
        if let Some(v) = value {
            p.set_param(name, *v);
        }
    }
    Ok(p)
}

/// Residual of `z_xt − rhs` over the interior nodes of a field.
#[derive(Debug, Clone)]
pub struct PdeResidual {
    /// entries[k] = (ix, it, residual)
    pub entries: Vec<(usize, usize, f64)>,
    pub max_abs: f64,
}

/// Evaluates the equation residual on a sampled field using finite
/// difference jets at every interior node.
pub fn pde_residual(field: &SolutionField, sys: &PssSystem) -> Result<PdeResidual, SolveError> {
    let nx = field.nx();
    let nt = field.nt();
    if nt < 3 {
        return Err(SolveError::TooFewRows { needed: 3, got: nt });
    }
    let x_interior: Vec<usize> = if field.periodic() {
        (0..nx).collect()
    } else {
        (1..nx - 1).collect()
    };
    let mut entries = Vec::new();
    let mut max_abs: f64 = 0.0;
    for it in 1..nt - 1 {
        for &ix in &x_interior {
            let p = jet_point_at(field, sys, ix, it)?;
            let lhs = p.var(JetVariable::ZXT).expect("jet point carries z_xt");
            let r = lhs - sys.rule.rhs.evaluate(&p)?;
            max_abs = max_abs.max(r.abs());
            entries.push((ix, it, r));
        }
    }
    Ok(PdeResidual { entries, max_abs })
}

/// The functional `∫ √(1 + z_x²) dx` over a stored row of a periodic field,
/// with the derivative taken spectrally.
pub fn arc_length(field: &SolutionField, it: usize) -> f64 {
    let n = field.nx();
    let spectral = Spectral::new(
        n,
        field
            .metadata
            .period
            .unwrap_or(field.xs[n - 1] - field.xs[0]),
    );
    let zx = spectral.derivative(&field.values[it]);
    let dx = field.dx();
    zx.iter().map(|&v| (1.0 + v * v).sqrt()).sum::<f64>() * dx
}

// ---------------------------------------------------------------------------
// Field CSV + metadata sidecar
// ---------------------------------------------------------------------------

/// Writes the field as CSV: a header row `t,x0,x1,...` followed by one row
/// `t_i,z(x0,t_i),...` per stored time.
pub fn write_field_csv(field: &SolutionField, path: &Path) -> Result<(), SolveError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(out, "t")?;
    for x in &field.xs {
        write!(out, ",{x}")?;
    }
    writeln!(out)?;
    for (it, t) in field.ts.iter().enumerate() {
        write!(out, "{t}")?;
        for v in &field.values[it] {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes the metadata sidecar JSON next to the CSV.
pub fn write_field_metadata(field: &SolutionField, path: &Path) -> Result<(), SolveError> {
    let json = serde_json::to_string_pretty(&field.metadata)?;
    std::fs::write(path, json)?;
    Ok(())
}

/// Reads a field back from CSV plus its metadata sidecar.
pub fn read_field_csv(csv_path: &Path, meta_path: &Path) -> Result<SolutionField, SolveError> {
    let metadata: FieldMetadata = serde_json::from_str(&std::fs::read_to_string(meta_path)?)?;
    let file = std::fs::File::open(csv_path)?;
    let mut lines = std::io::BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| SolveError::Csv("empty file".into()))??;
    let mut cells = header.split(',');
    if cells.next() != Some("t") {
        return Err(SolveError::Csv("header must start with `t`".into()));
    }
    let xs: Vec<f64> = cells
        .map(|c| c.parse::<f64>().map_err(|e| SolveError::Csv(e.to_string())))
        .collect::<Result<_, _>>()?;
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let t: f64 = cells
            .next()
            .ok_or_else(|| SolveError::Csv("missing time cell".into()))?
            .parse()
            .map_err(|e: std::num::ParseFloatError| SolveError::Csv(e.to_string()))?;
        let row: Vec<f64> = cells
            .map(|c| c.parse::<f64>().map_err(|e| SolveError::Csv(e.to_string())))
            .collect::<Result<_, _>>()?;
        if row.len() != xs.len() {
            return Err(SolveError::Csv(format!(
                "row at t = {t} has {} cells, expected {}",
                row.len(),
                xs.len()
            )));
        }
        ts.push(t);
        values.push(row);
    }
    if ts.is_empty() {
        return Err(SolveError::Csv("no data rows".into()));
    }
    Ok(SolutionField {
        xs,
        ts,
        values,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{builtin, Builtin};

    fn small_grid() -> Grid {
        Grid {
            n: 128,
            length: 2.0 * std::f64::consts::PI,
            x0: 0.0,
            dt: 1e-3,
            t_final: 0.1,
            store_every: 10,
        }
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let grid = small_grid();
        let z0 = vec![0.0; grid.n];
        let field = solve_family_sp(1.0, 0.0, &z0, &grid).unwrap();
        for row in &field.values {
            for &v in row {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn non_zero_mean_is_rejected() {
        let grid = small_grid();
        let z0 = sample_profile(&grid, |x| 0.1 + 0.1 * x.sin());
        assert!(matches!(
            solve_family_sp(1.0, 0.0, &z0, &grid),
            Err(SolveError::NonZeroMean { .. })
        ));
    }

    #[test]
    fn rough_initial_data_is_rejected() {
        let grid = small_grid();
        // alternating-sign data has all its energy at the Nyquist mode
        let z0: Vec<f64> = (0..grid.n)
            .map(|i| if i % 2 == 0 { 0.1 } else { -0.1 })
            .collect();
        assert!(matches!(
            solve_family_sp(1.0, 0.0, &z0, &grid),
            Err(SolveError::RoughInitialData { .. })
        ));
    }

    #[test]
    fn invalid_grids_are_rejected() {
        let mut grid = small_grid();
        grid.n = 100; // not a power of two
        assert!(matches!(
            solve_family_sp(1.0, 0.0, &vec![0.0; 100], &grid),
            Err(SolveError::InvalidGrid(_))
        ));
        assert!(matches!(
            solve_family_sp(0.0, 0.0, &vec![0.0; 128], &small_grid()),
            Err(SolveError::InvalidParameter { name: "m1", .. })
        ));
    }

    #[test]
    fn blow_up_detector_reports_the_time() {
        let grid = small_grid();
        // smooth, zero-mean, but over the amplitude threshold
        let z0 = sample_profile(&grid, |x| 1100.0 * x.sin());
        match solve_family_sp(1.0, 0.0, &z0, &grid) {
            Err(SolveError::BlowUp { time }) => assert_eq!(time, grid.dt),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn mean_stays_projected_out() {
        let grid = small_grid();
        let z0 = sample_profile(&grid, |x| 0.1 * x.sin());
        let field = solve_family_sp(1.0, 0.0, &z0, &grid).unwrap();
        for row in &field.values {
            let mean = row.iter().sum::<f64>() / row.len() as f64;
            assert!(mean.abs() <= 1e-12);
        }
        assert!(field.metadata.max_mean_drift.unwrap() <= 1e-10);
    }

    fn kink_substitution_error(n: usize) -> f64 {
        let field = sine_gordon_kink(1.0, (-3.0, 3.0), (-3.0, 3.0), n, n).unwrap();
        let mut max_err: f64 = 0.0;
        for it in 1..field.nt() - 1 {
            for ix in 1..field.nx() - 1 {
                let zxt = numerical_jet(&field, 1, 1, ix, it).unwrap();
                let err = (zxt - field.values[it][ix].sin()).abs();
                max_err = max_err.max(err);
            }
        }
        max_err
    }

    #[test]
    fn kink_satisfies_its_equation_to_second_order() {
        // h = 1e-2: finite-difference z_xt matches sin z below 1e-3
        assert!(kink_substitution_error(601) < 1e-3);
        // and halving h quarters the error
        let coarse = kink_substitution_error(61);
        let fine = kink_substitution_error(121);
        let order = (coarse / fine).log2();
        assert!(order > 1.7, "order {order} ({coarse} -> {fine})");
    }

    #[test]
    fn kink_limits_and_center_value() {
        let field = sine_gordon_kink(1.0, (-30.0, 30.0), (-0.5, 0.5), 61, 3).unwrap();
        let mid_t = 1; // t = 0
        assert!(field.values[mid_t][0].abs() < 1e-10); // argument → −∞
        assert!((field.values[mid_t][60] - 2.0 * std::f64::consts::PI).abs() < 1e-10);
        assert!((field.values[mid_t][30] - std::f64::consts::PI).abs() < 1e-12); // 4·arctan(1)
    }

    #[test]
    fn numerical_jet_basics() {
        let field = sine_gordon_kink(1.0, (-1.0, 1.0), (-1.0, 1.0), 21, 21).unwrap();
        // (0,0) returns the stored value exactly
        assert_eq!(
            numerical_jet(&field, 0, 0, 5, 5).unwrap(),
            field.values[5][5]
        );
        // order cap
        assert!(matches!(
            numerical_jet(&field, 2, 1, 5, 5),
            Err(SolveError::JetOrder { .. })
        ));
        // boundary stencil on a non-periodic field
        assert!(matches!(
            numerical_jet(&field, 1, 0, 0, 5),
            Err(SolveError::Stencil { .. })
        ));
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let mut field = sine_gordon_kink(1.0, (-1.0, 1.0), (-1.0, 1.0), 11, 11).unwrap();
        for row in field.values.iter_mut() {
            for v in row.iter_mut() {
                *v = 3.5;
            }
        }
        for (i, j) in [(1, 0), (0, 1), (2, 0), (0, 2), (1, 1)] {
            let d = numerical_jet(&field, i, j, 5, 5).unwrap();
            assert!(d.abs() < 1e-12, "({i},{j}) gave {d}");
        }
    }

    #[test]
    fn zero_field_residual_against_short_pulse_is_zero() {
        // rhs(0) = 0 because every term carries z
        let grid = small_grid();
        let z0 = vec![0.0; grid.n];
        let field = solve_family_sp(1.0, 0.0, &z0, &grid).unwrap();
        let (sys, _) = builtin(Builtin::ShortPulse { lambda: 1.0 }).unwrap();
        let residual = pde_residual(&field, &sys).unwrap();
        assert_eq!(residual.max_abs, 0.0);
    }

    #[test]
    fn solver_output_satisfies_the_equation() {
        let grid = Grid {
            n: 256,
            length: 2.0 * std::f64::consts::PI,
            x0: 0.0,
            dt: 1e-3,
            t_final: 0.2,
            store_every: 1,
        };
        let z0 = sample_profile(&grid, |x| 0.1 * x.sin());
        let field = solve_family_sp(1.0, 0.0, &z0, &grid).unwrap();
        let (sys, _) = builtin(Builtin::ShortPulse { lambda: 1.0 }).unwrap();
        let residual = pde_residual(&field, &sys).unwrap();
        assert!(residual.max_abs < 1e-4, "residual {}", residual.max_abs);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let grid = small_grid();
        let z0 = sample_profile(&grid, |x| 0.1 * x.sin());
        let field = solve_family_sp(1.0, 0.5, &z0, &grid).unwrap();
        let csv = dir.path().join("field.csv");
        let meta = dir.path().join("field.meta.json");
        write_field_csv(&field, &csv).unwrap();
        write_field_metadata(&field, &meta).unwrap();
        let back = read_field_csv(&csv, &meta).unwrap();
        assert_eq!(back.xs, field.xs);
        assert_eq!(back.ts, field.ts);
        assert_eq!(back.values, field.values);
        assert_eq!(back.metadata.equation, "family_sp");
    }
}
