//! Finite-difference Dirac operator `H = -iσ3 d/dx + V + Mσ1 - Pσ2` in a hard box
//! and the search for its localised, real eigenvalues.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::arnoldi;
use super::banded::{BandLu, BandMatrix};
use super::dense::DenseEigen;
use crate::couplings::CouplingFamily;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::mapping::constrained_vector_jet;
use crate::spectrum::{BoundState, Branch, Provenance, Spectrum};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// Second-order centred differences; produces doublers that are filtered.
    Centered,
    /// Forward differences on `ψ+`, backward on `ψ-`; first order, no doublers.
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorPotential {
    /// `V = (i/2) A+'/A+ + Ṽ`.
    Constrained,
    /// `V = Ṽ`, with no constraint imposed.
    Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Dense below [`DENSE_LIMIT`] unknowns, shift-invert Arnoldi above.
    Auto,
    Dense,
    ShiftInvert,
}

/// Largest operator dimension handled densely by [`Solver::Auto`].
pub const DENSE_LIMIT: usize = 1200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiracOptions {
    pub stencil: Stencil,
    pub vector: VectorPotential,
    /// Constant shift of the sampling line into the complex plane.
    pub contour_offset: Complex64,
    /// Absolute bound on `|Im E|`; `None` means `1e-6 (1 + |E|)`.
    pub im_tol: Option<f64>,
    /// Largest share of the norm allowed in the outer 5% of the box.
    pub localization: f64,
    /// Sign-alternation fraction above which a mode counts as a doubler.
    pub doubler_threshold: f64,
    pub solver: Solver,
    pub krylov_dim: usize,
    pub seed: u64,
}

impl Default for DiracOptions {
    fn default() -> Self {
        Self {
            stencil: Stencil::Centered,
            vector: VectorPotential::Constrained,
            contour_offset: ZERO,
            im_tol: None,
            localization: 1e-4,
            doubler_threshold: 0.5,
            solver: Solver::Auto,
            krylov_dim: 50,
            seed: 0x5eed,
        }
    }
}

impl DiracOptions {
    pub fn im_tol_at(&self, e: f64) -> f64 {
        self.im_tol.unwrap_or(1e-6 * (1.0 + e.abs()))
    }
}

/// Discretised Dirac operator on the interior points of a grid, with
/// `ψ+` and `ψ-` interleaved.
#[derive(Debug, Clone)]
pub struct DiracOperator {
    pub grid: GridSpec,
    pub contour_offset: Complex64,
    pub stencil: Stencil,
    pub v: Vec<Complex64>,
    pub a_plus: Vec<Complex64>,
    pub a_minus: Vec<Complex64>,
    matrix: BandMatrix,
}

impl DiracOperator {
    /// Assembles the operator from coupling arrays sampled on every grid point.
    pub fn from_arrays(
        grid: GridSpec,
        contour_offset: Complex64,
        stencil: Stencil,
        v: Vec<Complex64>,
        a_plus: Vec<Complex64>,
        a_minus: Vec<Complex64>,
    ) -> Result<Self> {
        let n = grid.n;
        if v.len() != n || a_plus.len() != n || a_minus.len() != n {
            return Err(Error::Parameter(format!("coupling arrays must have {n} entries")));
        }
        if v.iter().chain(&a_plus).chain(&a_minus).any(|z| !z.is_finite()) {
            return Err(Error::NonFinite("Dirac operator couplings".into()));
        }
        let k = n - 2;
        let dim = 2 * k;
        let h = grid.h();
        let mut m = BandMatrix::zeros(dim, 2, 2);
        for p in 0..k {
            let i = p + 1;
            let (rp, rm) = (2 * p, 2 * p + 1);
            m.set(rp, rp, v[i]);
            m.set(rm, rm, v[i]);
            m.set(rp, rm, a_plus[i]);
            m.set(rm, rp, a_minus[i]);
            match stencil {
                Stencil::Centered => {
                    let c = 1.0 / (2.0 * h);
                    if p + 1 < k {
                        m.add(rp, rp + 2, -I * c);
                        m.add(rm, rm + 2, I * c);
                    }
                    if p > 0 {
                        m.add(rp, rp - 2, I * c);
                        m.add(rm, rm - 2, -I * c);
                    }
                }
                Stencil::OneSided => {
                    let c = 1.0 / h;
                    m.add(rp, rp, I * c);
                    if p + 1 < k {
                        m.add(rp, rp + 2, -I * c);
                    }
                    m.add(rm, rm, I * c);
                    if p > 0 {
                        m.add(rm, rm - 2, -I * c);
                    }
                }
            }
        }
        Ok(Self { grid, contour_offset, stencil, v, a_plus, a_minus, matrix: m })
    }

    pub fn assemble(fam: &CouplingFamily, grid: &GridSpec, opts: &DiracOptions) -> Result<Self> {
        fam.validate()?;
        let jets = fam.jets_on(grid, opts.contour_offset)?;
        let mut v = Vec::with_capacity(grid.n);
        for (i, j) in jets.iter().enumerate() {
            let z = Complex64::new(grid.x(i), 0.0) + opts.contour_offset;
            v.push(match opts.vector {
                VectorPotential::Constrained => constrained_vector_jet(j, z)?,
                VectorPotential::Tilde => j.vt,
            });
        }
        let a_plus = jets.iter().map(|j| j.a_plus()).collect();
        let a_minus = jets.iter().map(|j| j.a_minus()).collect();
        Self::from_arrays(*grid, opts.contour_offset, opts.stencil, v, a_plus, a_minus)
    }

    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    pub fn matrix(&self) -> &BandMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.matrix.matvec(x)
    }

    /// `max |H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                worst = worst.max((self.matrix.get(i, j) - self.matrix.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Full-grid components (zero at the walls) of an interleaved vector.
    pub fn split(&self, x: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.grid.n;
        let mut plus = vec![ZERO; n];
        let mut minus = vec![ZERO; n];
        for p in 0..n - 2 {
            plus[p + 1] = x[2 * p];
            minus[p + 1] = x[2 * p + 1];
        }
        (plus, minus)
    }

    /// `‖Hx - λx‖ / ‖x‖`.
    pub fn residual(&self, lambda: Complex64, x: &[Complex64]) -> f64 {
        let hx = self.apply(x);
        let r: f64 = hx.iter().zip(x).map(|(a, b)| (a - lambda * b).norm_sqr()).sum();
        let nx: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        (r / nx).sqrt()
    }

    fn dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.matrix.get(i, j))
    }

    fn shift_lu(&self, sigma: Complex64) -> Result<BandLu> {
        self.matrix.shifted(sigma).lu()
    }
}

/// Weighted share of nearest-neighbour pairs with opposite sign, over both
/// components: `Σ_{Re(a_j* a_{j+1}) < 0} |a_j a_{j+1}| / Σ |a_j a_{j+1}|`.
/// Smooth modes score near 0, grid-scale doublers near 1.
pub fn alternation(x: &[Complex64]) -> f64 {
    let mut flip = 0.0;
    let mut total = 0.0;
    for comp in 0..2 {
        let vals: Vec<Complex64> = x.iter().skip(comp).step_by(2).copied().collect();
        for w in vals.windows(2) {
            let p = w[0].conj() * w[1];
            let mag = p.norm();
            total += mag;
            if p.re < 0.0 {
                flip += mag;
            }
        }
    }
    if total > 0.0 {
        flip / total
    } else {
        0.0
    }
}

fn smooth(x: &[Complex64]) -> Vec<Complex64> {
    let mut out = x.to_vec();
    for _ in 0..3 {
        let prev = out.clone();
        let n = prev.len();
        for i in 0..n {
            // neighbours two entries apart belong to the same component
            let l = if i >= 2 { prev[i - 2] } else { ZERO };
            let r = if i + 2 < n { prev[i + 2] } else { ZERO };
            out[i] = 0.25 * l + 0.5 * prev[i] + 0.25 * r;
        }
    }
    out
}

fn edge_weight(x: &[Complex64], grid_points: usize) -> f64 {
    let k = grid_points - 2;
    let m = ((grid_points as f64 * 0.05).ceil() as usize).max(1);
    let mut edge = 0.0;
    let mut total = 0.0;
    for p in 0..k {
        let w = x[2 * p].norm_sqr() + x[2 * p + 1].norm_sqr();
        total += w;
        let i = p + 1;
        if i < m || i >= grid_points - m {
            edge += w;
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenStatus {
    Accepted,
    Doubler,
    Complex,
    Delocalized,
}

/// One eigenpair found in the search window, with its classification.
#[derive(Debug, Clone)]
pub struct DiracEigen {
    pub energy: Complex64,
    pub residual: f64,
    pub alternation: f64,
    pub edge_weight: f64,
    pub status: EigenStatus,
    /// True when the smooth mode was separated from a degenerate doubler.
    pub purified: bool,
    pub vector: Vec<Complex64>,
}

fn normalize(x: &mut [Complex64]) {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|z| *z /= n);
    }
}

struct Pair {
    lambda: Complex64,
    vector: Vec<Complex64>,
    residual: f64,
}

fn converged(op: &DiracOperator, lambda: Complex64, res: f64) -> bool {
    res <= 1e-9 * (1.0 + lambda.norm()) * op.matrix.norm_inf().max(1.0).sqrt()
}

fn dense_pairs(op: &DiracOperator, lo: f64, hi: f64, im_band: f64) -> Result<Vec<Pair>> {
    let eig = DenseEigen::new(op.dense())?;
    let mut out = Vec::new();
    for (k, lambda) in eig.eigenvalues().into_iter().enumerate() {
        if lambda.re < lo || lambda.re > hi || lambda.im.abs() > im_band {
            continue;
        }
        let vector = eig.eigenvector(k);
        let residual = op.residual(lambda, &vector);
        out.push(Pair { lambda, vector, residual });
    }
    Ok(out)
}

fn shift_invert_pairs(
    op: &DiracOperator,
    lo: f64,
    hi: f64,
    im_band: f64,
    opts: &DiracOptions,
) -> Result<Vec<Pair>> {
    let min_half = 1e-6 * (1.0 + lo.abs().max(hi.abs()));
    let mut cells = vec![(0.5 * (lo + hi), 0.5 * (hi - lo))];
    let mut out = Vec::new();
    let mut seed = opts.seed;
    while let Some((c, half)) = cells.pop() {
        let sigma = Complex64::new(c, 0.0137 * half);
        let radius = (half * half + im_band * im_band).sqrt() + sigma.im;
        let lu = op.shift_lu(sigma)?;
        seed = seed.wrapping_add(0x9e37_79b9);
        let ritz = arnoldi::ritz_pairs(|x| lu.solve(x), op.dim(), opts.krylov_dim, seed)?;
        let mut complete = ritz.len() == op.dim();
        let mut local = Vec::new();
        let mut pending = false;
        for r in ritz {
            if r.theta.norm() == 0.0 {
                complete = true;
                continue;
            }
            let lambda = sigma + 1.0 / r.theta;
            if (lambda - sigma).norm() > radius {
                complete = true;
                continue;
            }
            let residual = op.residual(lambda, &r.vector);
            if converged(op, lambda, residual) {
                local.push(Pair { lambda, vector: r.vector, residual });
            } else {
                pending = true;
            }
        }
        if complete && !pending {
            out.extend(local);
        } else if half > min_half {
            cells.push((c - 0.5 * half, 0.5 * half));
            cells.push((c + 0.5 * half, 0.5 * half));
        } else {
            return Err(Error::Convergence(format!(
                "shift-invert Arnoldi could not resolve eigenvalues near {c}"
            )));
        }
    }
    out.retain(|p| p.lambda.re >= lo && p.lambda.re <= hi && p.lambda.im.abs() <= im_band);
    Ok(out)
}

/// Keeps one pair per cluster of numerically equal eigenvalues.
fn dedupe(mut pairs: Vec<Pair>) -> Vec<Pair> {
    pairs.sort_by(|a, b| a.lambda.re.partial_cmp(&b.lambda.re).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<Pair> = Vec::new();
    for p in pairs {
        if let Some(q) = out
            .iter_mut()
            .find(|q| (q.lambda - p.lambda).norm() <= 1e-8 * (1.0 + p.lambda.norm()))
        {
            if p.residual < q.residual {
                *q = p;
            }
        } else {
            out.push(p);
        }
    }
    out
}

/// Separates a smooth eigenvector from a degenerate doubler: damps the
/// grid-scale part, then lets inverse iteration restore the eigenspace.
fn purify(op: &DiracOperator, p: &Pair) -> Result<Option<(Vec<Complex64>, Complex64, f64)>> {
    let shift = p.lambda + 1e-10 * (1.0 + p.lambda.norm());
    let lu = match op.shift_lu(shift) {
        Ok(lu) => lu,
        Err(_) => return Ok(None),
    };
    let mut x = smooth(&p.vector);
    normalize(&mut x);
    for _ in 0..2 {
        x = lu.solve(&x);
        normalize(&mut x);
    }
    let hx = op.apply(&x);
    let rq: Complex64 = x.iter().zip(&hx).map(|(a, b)| a.conj() * b).sum();
    let res = op.residual(rq, &x);
    Ok(Some((x, rq, res)))
}

/// All eigenpairs with real part in `window` near the real axis, classified.
pub fn dirac_eigenpairs(
    fam: &CouplingFamily,
    grid: &GridSpec,
    window: (f64, f64),
    opts: &DiracOptions,
) -> Result<Vec<DiracEigen>> {
    let op = DiracOperator::assemble(fam, grid, opts)?;
    eigenpairs_of(&op, window, opts)
}

pub fn eigenpairs_of(
    op: &DiracOperator,
    window: (f64, f64),
    opts: &DiracOptions,
) -> Result<Vec<DiracEigen>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::NonFinite("energy window".into()));
    }
    if lo >= hi {
        return Ok(Vec::new());
    }
    let im_band = (0.05 * (hi - lo)).max(opts.im_tol_at(lo.abs().max(hi.abs())) * 10.0);
    let dense = match opts.solver {
        Solver::Dense => true,
        Solver::ShiftInvert => false,
        Solver::Auto => op.dim() <= DENSE_LIMIT,
    };
    let pairs = if dense {
        dense_pairs(op, lo, hi, im_band)?
    } else {
        shift_invert_pairs(op, lo, hi, im_band, opts)?
    };
    let mut out = Vec::new();
    for p in dedupe(pairs) {
        let mut vector = p.vector.clone();
        let mut energy = p.lambda;
        let mut residual = p.residual;
        let mut alt = alternation(&vector);
        let mut purified = false;
        if alt > opts.doubler_threshold {
            if let Some((x, rq, res)) = purify(op, &p)? {
                let a = alternation(&x);
                if a <= opts.doubler_threshold
                    && (rq - p.lambda).norm() <= 1e-8 * (1.0 + p.lambda.norm())
                    && converged(op, rq, res)
                {
                    vector = x;
                    energy = rq;
                    residual = res;
                    alt = a;
                    purified = true;
                }
            }
        }
        let ew = edge_weight(&vector, op.grid.n);
        let status = if alt > opts.doubler_threshold {
            EigenStatus::Doubler
        } else if energy.im.abs() >= opts.im_tol_at(energy.re) {
            EigenStatus::Complex
        } else if ew >= opts.localization {
            EigenStatus::Delocalized
        } else {
            EigenStatus::Accepted
        };
        out.push(DiracEigen {
            energy,
            residual,
            alternation: alt,
            edge_weight: ew,
            status,
            purified,
            vector,
        });
    }
    Ok(out)
}

/// Localised real eigenvalues of the discretised Dirac operator in `window`.
pub fn dirac_spectrum(
    fam: &CouplingFamily,
    grid: &GridSpec,
    window: (f64, f64),
    opts: &DiracOptions,
) -> Result<Spectrum> {
    let pairs = dirac_eigenpairs(fam, grid, window, opts)?;
    Ok(spectrum_from_pairs(fam, &pairs))
}

pub fn spectrum_from_pairs(fam: &CouplingFamily, pairs: &[DiracEigen]) -> Spectrum {
    let v0 = fam.v0();
    let mut accepted: Vec<&DiracEigen> =
        pairs.iter().filter(|p| p.status == EigenStatus::Accepted).collect();
    accepted.sort_by(|a, b| {
        (a.energy.re - v0)
            .abs()
            .partial_cmp(&(b.energy.re - v0).abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut counts = [0usize; 2];
    let states = accepted
        .into_iter()
        .map(|p| {
            let branch = Branch::of(p.energy.re - v0);
            let slot = &mut counts[(branch == Branch::Minus) as usize];
            let n = *slot;
            *slot += 1;
            BoundState {
                n,
                energy: p.energy.re,
                imag: p.energy.im,
                branch,
                valid: true,
                residual: p.residual,
                provenance: Provenance::Oracle,
                note: p.purified.then(|| "separated from a degenerate doubler".to_string()),
            }
        })
        .collect();
    Spectrum::new(fam.clone(), states)
}

/// Every eigenvalue of the discretised operator (dense; small grids only).
pub fn all_eigenvalues(
    fam: &CouplingFamily,
    grid: &GridSpec,
    opts: &DiracOptions,
) -> Result<Vec<Complex64>> {
    let op = DiracOperator::assemble(fam, grid, opts)?;
    if op.dim() > 4 * DENSE_LIMIT {
        return Err(Error::Parameter(format!(
            "dense eigenvalue computation limited to {} unknowns, got {}",
            4 * DENSE_LIMIT,
            op.dim()
        )));
    }
    Ok(DenseEigen::new(op.dense())?.eigenvalues())
}
