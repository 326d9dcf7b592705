//! Run configuration: a flat TOML file with a `family` discriminator and
//! namespaced keys such as `osc.omega2` or `grid.n`.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use ptdirac::couplings::{
    CouplingFamily, OscillatorParams, QuadraticParams, RosenMorseParams, SampledCouplings,
};
use ptdirac::oracle::VectorPotential;
use ptdirac::spectrum::Branch;
use ptdirac::GridSpec;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct QuadSection {
    a1: f64,
    b1: f64,
    a2: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct OscSection {
    omega1: f64,
    m1: f64,
    omega2: f64,
    m2: f64,
    #[serde(default)]
    v0: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RmSection {
    m0: f64,
    m1: f64,
    p0: f64,
    p1: f64,
    mu: f64,
    #[serde(default)]
    v0: f64,
}

/// Tabulated couplings: a CSV file with columns
/// `x, re_m, im_m, re_p, im_p, re_vt, im_vt` on a uniform grid.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SampledSection {
    table: PathBuf,
    #[serde(default)]
    v0: f64,
    /// `constrained` (default) or `tilde`, the vector potential of the Dirac oracle.
    vector: Option<VectorPotential>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub n: Option<usize>,
    /// Imaginary shift of the sampling line used by the Dirac oracle.
    pub contour_im: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub n_max: Option<usize>,
    /// Energy window for the Dirac oracle; required for tabulated couplings.
    pub window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpinorSection {
    pub n: Option<usize>,
    pub branch: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Closed form against shooting or the fixed-point iteration.
    pub oracle: f64,
    /// Closed form against the discretised Dirac operator.
    pub dirac: f64,
    pub pt: f64,
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { oracle: 1e-6, dirac: 1e-3, pt: 1e-10, norm: 1e-6 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    family: String,
    quad: Option<QuadSection>,
    osc: Option<OscSection>,
    rm: Option<RmSection>,
    sampled: Option<SampledSection>,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    spectrum: SpectrumSection,
    #[serde(default)]
    spinor: SpinorSection,
    #[serde(default)]
    tol: Tolerances,
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub half_width: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: CouplingFamily,
    /// Path of the coupling table for tabulated families.
    pub table: Option<PathBuf>,
    pub vector: VectorPotential,
    pub grid: GridSection,
    pub n_max: usize,
    pub window: Option<(f64, f64)>,
    pub spinor_n: Option<usize>,
    pub branch: Branch,
    pub tol: Tolerances,
}

fn parse_branch(s: &str) -> anyhow::Result<Branch> {
    match s {
        "+" | "plus" | "positive" => Ok(Branch::Plus),
        "-" | "minus" | "negative" => Ok(Branch::Minus),
        other => bail!("spinor.branch must be \"+\" or \"-\", got {other:?}"),
    }
}

fn read_table(path: &Path, v0: f64) -> anyhow::Result<SampledCouplings> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading coupling table {}", path.display()))?;
    let mut xs = Vec::new();
    let (mut m, mut p, mut vt) = (Vec::new(), Vec::new(), Vec::new());
    for (line, rec) in rdr.deserialize::<[f64; 7]>().enumerate() {
        let r = rec.with_context(|| format!("row {} of {}", line + 1, path.display()))?;
        xs.push(r[0]);
        m.push(Complex64::new(r[1], r[2]));
        p.push(Complex64::new(r[3], r[4]));
        vt.push(Complex64::new(r[5] + v0, r[6]));
    }
    if xs.len() < 8 {
        bail!("coupling table needs at least 8 rows, got {}", xs.len());
    }
    let grid = GridSpec::new(xs[0], xs[xs.len() - 1], xs.len())?;
    for (i, x) in xs.iter().enumerate() {
        if (x - grid.x(i)).abs() > 1e-9 * (1.0 + x.abs()) {
            bail!("coupling table is not uniformly spaced at row {} (x = {x})", i + 1);
        }
    }
    Ok(SampledCouplings::new(grid, m, p, vt)?)
}

impl RunConfig {
    pub fn load(path: &Path, ov: Overrides) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, ov)
    }

    /// Parses config text; relative table paths resolve against `base`.
    pub fn parse(text: &str, base: &Path, ov: Overrides) -> anyhow::Result<Self> {
        let raw: RawConfig = toml::from_str(text).context("invalid config")?;
        let missing = |s: &str| anyhow!("family {:?} needs a [{s}] section", raw.family);
        let mut table = None;
        let mut vector = VectorPotential::Constrained;
        let family = match raw.family.as_str() {
            "quadratic" => {
                let q = raw.quad.clone().ok_or_else(|| missing("quad"))?;
                CouplingFamily::Quadratic(QuadraticParams { a1: q.a1, b1: q.b1, a2: q.a2 })
            }
            "oscillator" => {
                let o = raw.osc.clone().ok_or_else(|| missing("osc"))?;
                CouplingFamily::Oscillator(OscillatorParams {
                    omega1: o.omega1,
                    m1: o.m1,
                    omega2: o.omega2,
                    m2: o.m2,
                    v0: o.v0,
                })
            }
            "rosen_morse" => {
                let r = raw.rm.clone().ok_or_else(|| missing("rm"))?;
                CouplingFamily::RosenMorse(RosenMorseParams {
                    m0: r.m0,
                    m1: r.m1,
                    p0: r.p0,
                    p1: r.p1,
                    mu: r.mu,
                    v0: r.v0,
                })
            }
            "sampled" => {
                let s = raw.sampled.clone().ok_or_else(|| missing("sampled"))?;
                let path = base.join(&s.table);
                let fam = CouplingFamily::Sampled(read_table(&path, s.v0)?);
                table = Some(path);
                vector = s.vector.unwrap_or(VectorPotential::Constrained);
                fam
            }
            other => bail!(
                "unknown family {other:?} (expected quadratic, oscillator, rosen_morse or sampled)"
            ),
        };
        family.validate()?;

        let mut grid = raw.grid.clone();
        if let Some(n) = ov.grid_n {
            grid.n = Some(n);
        }
        if let Some(l) = ov.half_width {
            if !(l > 0.0) {
                bail!("--box must be positive, got {l}");
            }
            grid.x_min = Some(-l);
            grid.x_max = Some(l);
        }
        if table.is_some() && (grid.n.is_some() || grid.x_min.is_some() || grid.x_max.is_some()) {
            bail!("the grid of tabulated couplings is fixed by the table");
        }
        let mut tol = raw.tol;
        if let Some(t) = ov.tol {
            tol.oracle = t;
        }
        let window = match raw.spectrum.window {
            Some([lo, hi]) if lo < hi => Some((lo, hi)),
            Some([lo, hi]) => bail!("spectrum.window must satisfy lo < hi, got [{lo}, {hi}]"),
            None => None,
        };
        let branch = match &raw.spinor.branch {
            Some(b) => parse_branch(b)?,
            None => Branch::Plus,
        };
        Ok(Self {
            family,
            table,
            vector,
            grid,
            n_max: raw.spectrum.n_max.unwrap_or(0),
            window,
            spinor_n: raw.spinor.n,
            branch,
            tol,
        })
    }

    pub fn spinor_level(&self) -> anyhow::Result<usize> {
        self.spinor_n.ok_or_else(|| anyhow!("config must set spinor.n"))
    }
}
