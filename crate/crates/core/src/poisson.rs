//! Free-space potential `Φ = G * ρ`, `G(x) = -(1/2π) log|x|`, and its gradient.
//!
//! Both solvers use the same kernel samples: the log kernel at cell-centre offsets,
//! with the self cell replaced by the exact average of the kernel over a square cell,
//! and the gradient kernel `-z / (2π|z|²)` with a zero self contribution. The FFT
//! route zero-pads to `(2n)²`, so it reproduces the direct sum up to round-off.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, Sum, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fft,
    Direct,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Fft => "fft",
            Method::Direct => "direct",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fft" => Ok(Method::Fft),
            "direct" => Ok(Method::Direct),
            other => Err(Error::Config(format!("unknown solver method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    pub phi: ScalarField,
    pub grad_phi: VectorField,
    pub method: Method,
}

/// Mean of `ln|y|` over the unit square centred at the origin.
///
/// From `∫₀^a∫₀^a ln(x²+y²) = a²(ln 2a² − 3 + π/2)` with `a = 1/2`.
pub fn unit_square_log_mean() -> f64 {
    0.5 * (0.5f64.ln() - 3.0 + 0.5 * PI)
}

/// Kernel `G` at the integer cell offset `(di, dj)` on a grid of spacing `dx`.
#[inline]
pub fn log_kernel(dx: f64, di: i64, dj: i64) -> f64 {
    let r2 = (di * di + dj * dj) as f64;
    if r2 == 0.0 {
        -(dx.ln() + unit_square_log_mean()) / (2.0 * PI)
    } else {
        -(dx.ln() + 0.5 * r2.ln()) / (2.0 * PI)
    }
}

/// Kernel `∇G` at the integer cell offset `(di, dj)`; zero on the self cell.
#[inline]
pub fn grad_kernel(dx: f64, di: i64, dj: i64) -> [f64; 2] {
    let r2 = (di * di + dj * dj) as f64;
    if r2 == 0.0 {
        return [0.0, 0.0];
    }
    let c = -1.0 / (2.0 * PI * dx * r2);
    [c * di as f64, c * dj as f64]
}

pub trait PoissonSolver {
    fn solve(&self, rho: &ScalarField) -> Result<PoissonSolution>;
}

/// O(n⁴) direct summation with tabulated kernels.
#[derive(Debug, Clone)]
pub struct DirectSolver {
    grid: GridSpec,
    // indexed by (|di|, |dj|); signs applied on the fly
    g: Vec<f64>,
    k: Vec<f64>,
}

impl DirectSolver {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n();
        let dx = grid.dx();
        let mut g = vec![0.0; n * n];
        let mut k = vec![0.0; n * n];
        for b in 0..n {
            for a in 0..n {
                g[b * n + a] = log_kernel(dx, a as i64, b as i64);
                let r2 = (a * a + b * b) as f64;
                k[b * n + a] = if r2 == 0.0 { 0.0 } else { -1.0 / (2.0 * PI * dx * r2) };
            }
        }
        Self { grid, g, k }
    }
}

impl PoissonSolver for DirectSolver {
    fn solve(&self, rho: &ScalarField) -> Result<PoissonSolution> {
        check_input(&self.grid, rho)?;
        let n = self.grid.n();
        let area = self.grid.cell_area();
        let r = rho.values();
        let mut phi = vec![0.0; n * n];
        let mut gx = vec![0.0; n * n];
        let mut gy = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let (mut p, mut fx, mut fy) = (Sum::default(), Sum::default(), Sum::default());
                for jj in 0..n {
                    let dj = j as i64 - jj as i64;
                    let row = dj.unsigned_abs() as usize * n;
                    for ii in 0..n {
                        let di = i as i64 - ii as i64;
                        let w = r[jj * n + ii];
                        let t = row + di.unsigned_abs() as usize;
                        p.add(self.g[t] * w);
                        let kw = self.k[t] * w;
                        fx.add(kw * di as f64);
                        fy.add(kw * dj as f64);
                    }
                }
                let k = j * n + i;
                phi[k] = p.value() * area;
                gx[k] = fx.value() * area;
                gy[k] = fy.value() * area;
            }
        }
        Ok(PoissonSolution {
            phi: ScalarField::from_vec(self.grid, phi)?,
            grad_phi: VectorField::from_components(self.grid, gx, gy)?,
            method: Method::Direct,
        })
    }
}

/// Zero-padded FFT convolution with precomputed kernel spectra.
#[derive(Clone)]
pub struct FftSolver {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// spectrum of `G + i ∂ₓG`
    spec_phi_x: Vec<Complex<f64>>,
    /// spectrum of `∂ᵧG`
    spec_y: Vec<Complex<f64>>,
}

impl fmt::Debug for FftSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftSolver").field("grid", &self.grid).finish()
    }
}

impl FftSolver {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n();
        let p = 2 * n;
        let dx = grid.dx();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(p);
        let inverse = planner.plan_fft_inverse(p);
        let offset = |a: usize| -> Option<i64> {
            match a.cmp(&n) {
                std::cmp::Ordering::Less => Some(a as i64),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(a as i64 - p as i64),
            }
        };
        let mut a_buf = vec![Complex::new(0.0, 0.0); p * p];
        let mut b_buf = vec![Complex::new(0.0, 0.0); p * p];
        for b in 0..p {
            for a in 0..p {
                if let (Some(di), Some(dj)) = (offset(a), offset(b)) {
                    let g = log_kernel(dx, di, dj);
                    let k = grad_kernel(dx, di, dj);
                    a_buf[b * p + a] = Complex::new(g, k[0]);
                    b_buf[b * p + a] = Complex::new(k[1], 0.0);
                }
            }
        }
        let mut scratch = vec![Complex::new(0.0, 0.0); p * p];
        fft2(&*forward, &mut a_buf, &mut scratch, p, p);
        fft2(&*forward, &mut b_buf, &mut scratch, p, p);
        Self { grid, forward, inverse, spec_phi_x: a_buf, spec_y: b_buf }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
}

impl PoissonSolver for FftSolver {
    fn solve(&self, rho: &ScalarField) -> Result<PoissonSolution> {
        check_input(&self.grid, rho)?;
        let n = self.grid.n();
        let p = 2 * n;
        let area = self.grid.cell_area();
        let mut src = vec![Complex::new(0.0, 0.0); p * p];
        for j in 0..n {
            for i in 0..n {
                src[j * p + i] = Complex::new(rho.values()[j * n + i], 0.0);
            }
        }
        let mut scratch = vec![Complex::new(0.0, 0.0); p * p];
        // rows beyond n are zero before the row pass
        fft2(&*self.forward, &mut src, &mut scratch, p, n);
        let mut other: Vec<Complex<f64>> =
            src.iter().zip(&self.spec_y).map(|(s, k)| s * k).collect();
        for (s, k) in src.iter_mut().zip(&self.spec_phi_x) {
            *s *= k;
        }
        ifft2(&*self.inverse, &mut src, &mut scratch, p, n);
        ifft2(&*self.inverse, &mut other, &mut scratch, p, n);
        let scale = area / (p * p) as f64;
        let mut phi = vec![0.0; n * n];
        let mut gx = vec![0.0; n * n];
        let mut gy = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let a = src[j * p + i];
                phi[j * n + i] = a.re * scale;
                gx[j * n + i] = a.im * scale;
                gy[j * n + i] = other[j * p + i].re * scale;
            }
        }
        Ok(PoissonSolution {
            phi: ScalarField::from_vec(self.grid, phi)?,
            grad_phi: VectorField::from_components(self.grid, gx, gy)?,
            method: Method::Fft,
        })
    }
}

/// Forward 2D transform of a `p × p` buffer whose rows at index `>= live_rows` are zero.
fn fft2(fft: &dyn Fft<f64>, buf: &mut [Complex<f64>], scratch: &mut [Complex<f64>], p: usize, live_rows: usize) {
    fft.process(&mut buf[..live_rows * p]);
    transpose(buf, scratch, p);
    fft.process(scratch);
    transpose(scratch, buf, p);
}

/// Inverse 2D transform; only the first `live_rows` rows of the result are valid.
fn ifft2(fft: &dyn Fft<f64>, buf: &mut [Complex<f64>], scratch: &mut [Complex<f64>], p: usize, live_rows: usize) {
    transpose(buf, scratch, p);
    fft.process(scratch);
    transpose(scratch, buf, p);
    fft.process(&mut buf[..live_rows * p]);
}

fn transpose(src: &[Complex<f64>], dst: &mut [Complex<f64>], p: usize) {
    const B: usize = 32;
    for jb in (0..p).step_by(B) {
        for ib in (0..p).step_by(B) {
            for j in jb..(jb + B).min(p) {
                for i in ib..(ib + B).min(p) {
                    dst[i * p + j] = src[j * p + i];
                }
            }
        }
    }
}

fn check_input(grid: &GridSpec, rho: &ScalarField) -> Result<()> {
    if !grid.same_as(rho.grid()) {
        return Err(Error::GridMismatch("density grid does not match solver grid".into()));
    }
    rho.check_finite("rho")
}

/// Solver chosen at run time.
#[derive(Debug, Clone)]
pub enum AnySolver {
    Fft(FftSolver),
    Direct(DirectSolver),
}

impl AnySolver {
    pub fn new(method: Method, grid: GridSpec) -> Self {
        match method {
            Method::Fft => AnySolver::Fft(FftSolver::new(grid)),
            Method::Direct => AnySolver::Direct(DirectSolver::new(grid)),
        }
    }
}

impl PoissonSolver for AnySolver {
    fn solve(&self, rho: &ScalarField) -> Result<PoissonSolution> {
        match self {
            AnySolver::Fft(s) => s.solve(rho),
            AnySolver::Direct(s) => s.solve(rho),
        }
    }
}

pub fn solve_direct(rho: &ScalarField) -> Result<PoissonSolution> {
    DirectSolver::new(*rho.grid()).solve(rho)
}

pub fn solve_fft(rho: &ScalarField) -> Result<PoissonSolution> {
    FftSolver::new(*rho.grid()).solve(rho)
}

/// `W(ρ) = ∫ ρ Φ = -(1/2π) ∬ ρ(x) ρ(y) log|x - y|`, evaluated as `Σ ρΦ dx²`.
pub fn interaction_energy(rho: &ScalarField, solution: &PoissonSolution) -> f64 {
    let mut acc = Sum::default();
    for (r, p) in rho.values().iter().zip(solution.phi.values()) {
        acc.add(r * p);
    }
    acc.value() * rho.grid().cell_area()
}

/// Five-point Laplacian residual `Δₕ Φ + ρ` on interior cells at least `ring` cells
/// from the edge; returns the max abs residual.
pub fn laplacian_residual(rho: &ScalarField, phi: &ScalarField, ring: usize) -> f64 {
    let g = *rho.grid();
    let n = g.n();
    let h2 = g.cell_area();
    let mut worst = 0.0f64;
    for j in ring.max(1)..n - ring.max(1) {
        for i in ring.max(1)..n - ring.max(1) {
            let lap = (phi.at(i + 1, j) + phi.at(i - 1, j) + phi.at(i, j + 1) + phi.at(i, j - 1)
                - 4.0 * phi.at(i, j))
                / h2;
            worst = worst.max((lap + rho.at(i, j)).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn unit_square_log_mean_matches_quadrature() {
        // tensor midpoint rule on a fine grid, staggered away from the singularity
        let m = 2000;
        let h = 1.0 / m as f64;
        let mut acc = 0.0;
        for b in 0..m {
            for a in 0..m {
                let x = -0.5 + (a as f64 + 0.5) * h;
                let y = -0.5 + (b as f64 + 0.5) * h;
                acc += 0.5 * (x * x + y * y).ln();
            }
        }
        let quad = acc * h * h;
        assert!((quad - unit_square_log_mean()).abs() < 1e-5, "{quad} vs {}", unit_square_log_mean());
    }

    #[test]
    fn kernel_symmetry() {
        for &(a, b) in &[(1, 0), (3, -2), (-5, 7)] {
            assert_eq!(log_kernel(0.1, a, b), log_kernel(0.1, -a, -b));
            let k1 = grad_kernel(0.1, a, b);
            let k2 = grad_kernel(0.1, -a, -b);
            assert_eq!(k1[0], -k2[0]);
            assert_eq!(k1[1], -k2[1]);
        }
        assert_eq!(grad_kernel(0.1, 0, 0), [0.0, 0.0]);
    }

    #[test]
    fn zero_source_has_tiny_gradient() {
        let g = make_grid(8.0, 16).unwrap();
        let floor = 1e-12;
        let rho = ScalarField::constant(g, floor);
        let sol = solve_fft(&rho).unwrap();
        let worst = sol.grad_phi.x().iter().chain(sol.grad_phi.y()).fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(worst < 10.0 * floor * 64.0, "{worst}");
    }

    #[test]
    fn rejects_nan_and_mismatched_grid() {
        let g = make_grid(1.0, 8).unwrap();
        let mut rho = ScalarField::constant(g, 1.0);
        rho.values_mut()[3] = f64::NAN;
        assert!(solve_direct(&rho).is_err());
        assert!(solve_fft(&rho).is_err());
        let other = FftSolver::new(make_grid(2.0, 8).unwrap());
        assert!(other.solve(&ScalarField::constant(g, 1.0)).is_err());
    }

    #[test]
    fn method_parses() {
        assert_eq!("fft".parse::<Method>().unwrap(), Method::Fft);
        assert_eq!("direct".parse::<Method>().unwrap(), Method::Direct);
        assert!("multigrid".parse::<Method>().is_err());
    }
}
