//! Truncated-line discretization: grids, unitary Fourier transforms, the
//! Cauchy-Szego projector and weighted norms.
//!
//! Functions on the real line are sampled at `x_i = -L + i*dx` and treated as
//! 2L-periodic. The matching frequency lattice is `xi_m = pi*m/L` for
//! `m = -N/2 .. N/2-1`; spectral data is stored in DFT order (nonnegative
//! modes first). The projector `C_+` zeroes the strictly negative modes and
//! keeps `xi = 0`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Default relative L2 energy allowed in negative-frequency modes.
pub const HARDY_TOL: f64 = 1e-10;
/// Default boundary-magnitude fraction below which a function counts as
/// negligible at the ends of the grid.
pub const BOUNDARY_TOL: f64 = 1e-8;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Uniform symmetric grid on `[-L, L)` with a power-of-two point count.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    point_count: usize,
}

/// Construct a grid, validating the preconditions.
pub fn make_grid(half_width: f64, point_count: usize) -> Result<GridSpec> {
    GridSpec::new(half_width, point_count)
}

impl GridSpec {
    pub fn new(half_width: f64, point_count: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Config(format!(
                "grid half-width must be positive and finite, got {half_width}"
            )));
        }
        if point_count < 16 || !point_count.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid point count must be a power of two >= 16, got {point_count}"
            )));
        }
        Ok(GridSpec {
            half_width,
            point_count,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.point_count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.point_count as f64
    }

    /// Frequency-lattice spacing pi/L.
    pub fn dxi(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Largest represented frequency (one-sided Nyquist is at -nyquist).
    pub fn nyquist(&self) -> f64 {
        self.dxi() * (self.point_count / 2) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.point_count).map(move |i| self.x(i))
    }

    /// Signed lattice frequency of DFT slot `k`.
    pub fn xi(&self, k: usize) -> f64 {
        let n = self.point_count;
        let m = if k < n / 2 {
            k as isize
        } else {
            k as isize - n as isize
        };
        self.dxi() * m as f64
    }

    /// DFT slot of the nonnegative lattice frequency `pi*m/L`.
    pub fn mode_slot(&self, m: usize) -> usize {
        debug_assert!(m < self.point_count / 2);
        m
    }

    pub fn zeros(&self) -> GridFunction {
        GridFunction {
            grid: self.clone(),
            values: vec![Complex64::new(0.0, 0.0); self.point_count],
        }
    }

    /// Sample a function of x on the grid.
    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> GridFunction {
        GridFunction {
            grid: self.clone(),
            values: self.xs().map(f).collect(),
        }
    }
}

/// Complex samples on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "sample count {} does not match grid point count {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid inner product `dx * sum f conj(g)`, linear in `self`.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        s * self.grid.dx()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn norm_sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn norm_l1(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() * self.grid.dx()
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridFunction) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Pointwise product with the conjugate of `other`.
    pub fn mul_conj(&self, other: &GridFunction) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b.conj())
                .collect(),
        }
    }

    pub fn conj(&self) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Magnitudes of the first and last sample relative to the sup norm.
    pub fn boundary_fractions(&self) -> (f64, f64) {
        let sup = self.norm_sup();
        if sup == 0.0 {
            return (0.0, 0.0);
        }
        (
            self.values[0].norm() / sup,
            self.values[self.len() - 1].norm() / sup,
        )
    }
}

/// Unitary forward transform sampled on the frequency lattice, DFT slot order.
pub fn fourier_forward(f: &GridFunction) -> GridFunction {
    let n = f.len();
    let mut buf = f.values.clone();
    plan(n, false).process(&mut buf);
    let scale = f.grid.dx() / TWO_PI.sqrt();
    for (k, v) in buf.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *v *= scale * sign;
    }
    GridFunction {
        grid: f.grid.clone(),
        values: buf,
    }
}

/// Unitary inverse transform from DFT-slot-ordered spectral samples.
pub fn fourier_inverse(spec: &GridFunction) -> GridFunction {
    let n = spec.len();
    let mut buf: Vec<Complex64> = spec
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { *v } else { -*v })
        .collect();
    plan(n, true).process(&mut buf);
    let scale = spec.grid.dxi() / TWO_PI.sqrt();
    for v in buf.iter_mut() {
        *v *= scale;
    }
    GridFunction {
        grid: spec.grid.clone(),
        values: buf,
    }
}

/// Relative L2 energy carried by strictly negative frequency modes.
pub fn negative_energy_fraction(f: &GridFunction) -> f64 {
    let spec = fourier_forward(f);
    let n = spec.len();
    let total: f64 = spec.values.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let neg: f64 = spec.values[n / 2..].iter().map(|v| v.norm_sqr()).sum();
    neg / total
}

/// Complex samples whose Fourier content lives on nonnegative frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyFunction {
    f: GridFunction,
    hardy_residual: f64,
}

impl HardyFunction {
    /// Accept existing samples, verifying the Hardy residual against `tol`.
    pub fn try_new(f: GridFunction, tol: f64) -> Result<Self> {
        let hardy_residual = negative_energy_fraction(&f);
        if hardy_residual > tol {
            return Err(Error::Contract(format!(
                "negative-frequency energy fraction {hardy_residual:.3e} exceeds tolerance {tol:.3e}"
            )));
        }
        Ok(HardyFunction { f, hardy_residual })
    }

    pub fn zero(grid: &GridSpec) -> Self {
        HardyFunction {
            f: grid.zeros(),
            hardy_residual: 0.0,
        }
    }

    pub fn as_grid(&self) -> &GridFunction {
        &self.f
    }

    pub fn into_grid(self) -> GridFunction {
        self.f
    }

    pub fn grid(&self) -> &GridSpec {
        &self.f.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.f.values
    }

    pub fn hardy_residual(&self) -> f64 {
        self.hardy_residual
    }

    pub fn scale(&self, c: Complex64) -> HardyFunction {
        HardyFunction {
            f: self.f.scale(c),
            hardy_residual: self.hardy_residual,
        }
    }
}

/// Orthogonal projection onto the grid Hardy space: zero strictly negative
/// modes, keep `xi >= 0` content unchanged. Total on all inputs.
pub fn cauchy_szego(f: &GridFunction) -> HardyFunction {
    let mut spec = fourier_forward(f);
    let n = spec.len();
    for v in spec.values[n / 2..].iter_mut() {
        *v = Complex64::new(0.0, 0.0);
    }
    let projected = fourier_inverse(&spec);
    HardyFunction {
        f: projected,
        hardy_residual: 0.0,
    }
}

/// Complementary projector: keep strictly negative modes only.
pub fn cauchy_szego_minus(f: &GridFunction) -> GridFunction {
    let mut spec = fourier_forward(f);
    let n = spec.len();
    for v in spec.values[..n / 2].iter_mut() {
        *v = Complex64::new(0.0, 0.0);
    }
    fourier_inverse(&spec)
}

/// Apply a spectral multiplier `g(xi)`.
pub fn spectral_multiplier(f: &GridFunction, g: impl Fn(f64) -> Complex64) -> GridFunction {
    let mut spec = fourier_forward(f);
    for k in 0..spec.len() {
        let m = g(spec.grid.xi(k));
        spec.values[k] *= m;
    }
    fourier_inverse(&spec)
}

/// Spectral derivative d/dx.
pub fn derivative(f: &GridFunction) -> GridFunction {
    spectral_multiplier(f, |xi| Complex64::new(0.0, xi))
}

/// Trapezoid approximation of the weighted norm `|| <x>^s f ||_2`.
pub fn weighted_norm(f: &GridFunction, s: f64) -> f64 {
    assert!(s >= 0.0, "weight exponent must be nonnegative");
    let dx = f.grid.dx();
    let sum: f64 = f
        .grid
        .xs()
        .zip(&f.values)
        .map(|(x, v)| (1.0 + x * x).powf(s) * v.norm_sqr())
        .sum();
    (dx * sum).sqrt()
}

/// Cumulative trapezoid integral of `f` from the left grid end.
pub fn cumulative_trapezoid(f: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out
}
