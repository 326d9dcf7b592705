//! The subcommands.

use std::fmt;

use anyhow::bail;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use ptdirac::closedform::rosen_morse::{converging, RefinementStep};
use ptdirac::closedform::{
    closed_form_spectrum, oscillator_norm, oscillator_spinor, rosen_morse_reality_check,
    rosen_morse_spinor, RosenMorseSpinorReport,
};
use ptdirac::couplings::{pt_check, CouplingFamily};
use ptdirac::mapping::{effective_potential, EffectiveProblem, SpinorOnGrid};
use ptdirac::oracle::dirac::{eigenpairs_of, spectrum_from_pairs};
use ptdirac::oracle::{
    fixed_point_energy, quadrature_norm, residual_check, shoot_effective_with, DiracOperator,
    DiracOptions, ShootOptions,
};
use ptdirac::spectrum::{BoundState, Branch, Provenance, Spectrum};
use ptdirac::GridSpec;

use crate::config::RunConfig;
use crate::output::g12;

/// A failure of the numerics rather than of the input (exit code 3).
#[derive(Debug)]
pub struct Numerical(pub String);

impl fmt::Display for Numerical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "numerical failure: {}", self.0)
    }
}

impl std::error::Error for Numerical {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Records,
}

/// Text to write plus the names of failed checks (empty on success).
pub struct Outcome {
    pub text: String,
    pub failed: Vec<String>,
}

fn records(v: &impl Serialize) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn branch_sign(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "+",
        Branch::Minus => "-",
    }
}

/// The family as written to output files; tabulated couplings are summarised.
fn family_value(cfg: &RunConfig) -> Value {
    match &cfg.family {
        CouplingFamily::Sampled(s) => json!({
            "family": "sampled",
            "table": cfg.table.as_ref().map(|p| p.display().to_string()),
            "points": s.grid.n,
        }),
        f => serde_json::to_value(f).unwrap_or(Value::Null),
    }
}

fn closed_spectrum(cfg: &RunConfig) -> anyhow::Result<Option<Spectrum>> {
    if matches!(cfg.family, CouplingFamily::Sampled(_)) {
        return Ok(None);
    }
    Ok(Some(closed_form_spectrum(&cfg.family, cfg.n_max)?))
}

/// Imaginary shift of the Dirac sampling line when `A+` vanishes on the real axis.
fn auto_contour(fam: &CouplingFamily) -> f64 {
    match fam {
        CouplingFamily::Quadratic(q) => {
            // A+ = (a0 - a1) x² - b1
            let d = q.a0() - q.a1;
            let real_zero = if d > 0.0 { q.b1 / d >= 0.0 } else { q.b1 == 0.0 };
            if real_zero {
                0.5
            } else {
                0.0
            }
        }
        CouplingFamily::Oscillator(p) => {
            let at = p.lambda_signed() - p.drive() / p.omega_sq();
            if at.abs() < 1e-9 {
                0.5
            } else {
                0.0
            }
        }
        CouplingFamily::RosenMorse(p) => {
            if (p.m0 - p.p0).abs() < 1e-12 {
                0.5 / p.mu
            } else {
                0.0
            }
        }
        CouplingFamily::Sampled(_) => 0.0,
    }
}

fn contour(cfg: &RunConfig) -> Complex64 {
    Complex64::new(0.0, cfg.grid.contour_im.unwrap_or_else(|| auto_contour(&cfg.family)))
}

/// Largest energy magnitude that the default grids must resolve.
fn default_half_width(cfg: &RunConfig, closed: Option<&Spectrum>) -> f64 {
    let n = cfg.n_max.max(cfg.spinor_n.unwrap_or(0)) as f64;
    match &cfg.family {
        CouplingFamily::Oscillator(p) => ((60.0 + 4.0 * n) / p.omega()).sqrt().max(8.0),
        CouplingFamily::Quadratic(q) => {
            let e = closed
                .and_then(|s| s.valid().map(|b| b.energy).reduce(f64::max))
                .unwrap_or(1.0);
            let om2 = q.omega_sq(e);
            if om2 > 0.0 {
                ((60.0 + 4.0 * n) / om2.sqrt()).sqrt().max(6.0)
            } else {
                8.0
            }
        }
        CouplingFamily::RosenMorse(_) => {
            let mut kappa = f64::INFINITY;
            if let Some(s) = closed {
                for b in s.valid() {
                    for x in [-60.0, 60.0] {
                        if let Ok(v) = effective_potential(&cfg.family, b.energy, x) {
                            kappa = kappa.min((v - b.energy * b.energy).sqrt().re);
                        }
                    }
                }
            }
            if kappa.is_finite() && kappa > 0.0 {
                (28.0 / kappa).clamp(10.0, 80.0)
            } else {
                20.0
            }
        }
        CouplingFamily::Sampled(s) => s.grid.x_max,
    }
}

fn grid_for(cfg: &RunConfig, closed: Option<&Spectrum>) -> anyhow::Result<GridSpec> {
    if let CouplingFamily::Sampled(s) = &cfg.family {
        return Ok(s.grid);
    }
    let l = default_half_width(cfg, closed);
    let default_n = match cfg.family {
        // wide boxes for weakly bound levels keep the spacing near 0.014
        CouplingFamily::RosenMorse(_) => ((l / 0.007).ceil() as usize + 1).max(4001) | 1,
        _ => 2001,
    };
    let g = GridSpec::new(
        cfg.grid.x_min.unwrap_or(-l),
        cfg.grid.x_max.unwrap_or(l),
        cfg.grid.n.unwrap_or(default_n),
    )?;
    Ok(g)
}

fn dirac_options(cfg: &RunConfig) -> DiracOptions {
    DiracOptions { contour_offset: contour(cfg), vector: cfg.vector, ..Default::default() }
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub n: usize,
    pub branch: &'static str,
    pub closed_form: f64,
    pub method: &'static str,
    pub oracle: Option<f64>,
    pub abs_diff: Option<f64>,
    pub rel_diff: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn compare(b: &BoundState, method: &'static str, found: Result<f64, String>, tol: f64) -> Comparison {
    let (oracle, note) = match found {
        Ok(e) => (Some(e), None),
        Err(msg) => (None, Some(msg)),
    };
    let abs_diff = oracle.map(|e| (e - b.energy).abs());
    Comparison {
        n: b.n,
        branch: branch_sign(b.branch),
        closed_form: b.energy,
        method,
        oracle,
        abs_diff,
        rel_diff: abs_diff.map(|d| d / b.energy.abs().max(f64::MIN_POSITIVE)),
        tol,
        pass: abs_diff.is_some_and(|d| d < tol),
        note,
    }
}

fn oracle_state(b: &BoundState, energy: f64, residual: f64, method: &str) -> BoundState {
    BoundState {
        n: b.n,
        energy,
        imag: 0.0,
        branch: b.branch,
        valid: true,
        residual,
        provenance: Provenance::Oracle,
        note: Some(method.to_string()),
    }
}

/// Closed-form levels against shooting (or the fixed-point iteration for
/// energy-dependent problems) and against the Dirac operator.
fn oracle_checks(
    cfg: &RunConfig,
    closed: &Spectrum,
    grid: &GridSpec,
) -> anyhow::Result<(Vec<BoundState>, Vec<Comparison>)> {
    let valid: Vec<&BoundState> = closed.valid().collect();
    let mut states = Vec::new();
    let mut comps = Vec::new();
    if valid.is_empty() {
        return Ok((states, comps));
    }

    if let CouplingFamily::Quadratic(q) = &cfg.family {
        for b in &valid {
            let found = fixed_point_energy(q, b.n, b.energy, 2000).map_err(|e| e.to_string());
            if let Ok(fp) = &found {
                states.push(oracle_state(b, fp.energy, 0.0, "fixed_point"));
            }
            comps.push(compare(b, "fixed_point", found.map(|f| f.energy), cfg.tol.oracle));
        }
    } else {
        let prob = EffectiveProblem::from_family(&cfg.family)?;
        let opts = ShootOptions { scan_points: 41, ..Default::default() };
        for b in &valid {
            let gap = valid
                .iter()
                .filter(|o| !std::ptr::eq(**o, *b))
                .map(|o| (o.energy - b.energy).abs())
                .fold(f64::INFINITY, f64::min);
            let half = (0.45 * gap).min(0.1 * (1.0 + b.energy.abs()));
            let found = shoot_effective_with(&prob, grid, (b.energy - half, b.energy + half), &opts)
                .map_err(|e| e.to_string());
            if let Ok(r) = &found {
                states.push(oracle_state(b, r.energy, r.mismatch, "shooting"));
            }
            comps.push(compare(b, "shooting", found.map(|r| r.energy), cfg.tol.oracle));
        }
    }

    // one small window per level keeps continuum states out of the eigensolver
    let opts = dirac_options(cfg);
    let op = DiracOperator::assemble(&cfg.family, grid, &opts)?;
    for b in &valid {
        let gap = valid
            .iter()
            .filter(|o| !std::ptr::eq(**o, *b))
            .map(|o| (o.energy - b.energy).abs())
            .fold(f64::INFINITY, f64::min);
        let half = (0.45 * gap).min(0.3);
        let window = match cfg.window {
            Some((lo, hi)) => (lo.max(b.energy - half), hi.min(b.energy + half)),
            None => (b.energy - half, b.energy + half),
        };
        let found = eigenpairs_of(&op, window, &opts).map_err(|e| e.to_string()).and_then(|pairs| {
            let dirac = spectrum_from_pairs(&cfg.family, &pairs);
            let best = dirac
                .valid()
                .min_by(|x, y| (x.energy - b.energy).abs().total_cmp(&(y.energy - b.energy).abs()))
                .cloned();
            best.ok_or_else(|| format!("no localized eigenvalue in [{}, {}]", g12(window.0), g12(window.1)))
        });
        let found = found.map(|d| {
            let e = d.energy;
            states.push(BoundState { note: Some("dirac".into()), n: b.n, ..d });
            e
        });
        comps.push(compare(b, "dirac", found, cfg.tol.dirac));
    }
    Ok((states, comps))
}

#[derive(Serialize)]
struct SpectrumRecord {
    family: Value,
    grid: Option<GridSpec>,
    states: Vec<BoundState>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    comparisons: Vec<Comparison>,
}

fn dirac_only(cfg: &RunConfig, grid: &GridSpec) -> anyhow::Result<Spectrum> {
    let Some(window) = cfg.window else {
        bail!("tabulated couplings need spectrum.window for the Dirac oracle");
    };
    let opts = dirac_options(cfg);
    let op = DiracOperator::assemble(&cfg.family, grid, &opts)?;
    Ok(spectrum_from_pairs(&cfg.family, &eigenpairs_of(&op, window, &opts)?))
}

pub fn spectrum(cfg: &RunConfig, verify: bool, format: Format) -> anyhow::Result<Outcome> {
    let closed = closed_spectrum(cfg)?;
    let mut rec = SpectrumRecord {
        family: family_value(cfg),
        grid: None,
        states: Vec::new(),
        diagnostics: Vec::new(),
        comparisons: Vec::new(),
    };
    match &closed {
        Some(s) => {
            rec.states = s.states.clone();
            rec.diagnostics = s.diagnostics.clone();
            if verify {
                let grid = grid_for(cfg, Some(s))?;
                let (states, comps) = oracle_checks(cfg, s, &grid)?;
                rec.grid = Some(grid);
                rec.states.extend(states);
                rec.comparisons = comps;
            }
        }
        None => {
            let grid = grid_for(cfg, None)?;
            rec.states = dirac_only(cfg, &grid)?.states;
            rec.grid = Some(grid);
        }
    }
    let failed: Vec<String> = rec
        .comparisons
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} n={} {}", c.method, c.n, c.branch))
        .collect();
    let text = match format {
        Format::Records => records(&rec)?,
        Format::Csv => {
            let mut t = format!("# ptdirac {} spectrum {}\n", env!("CARGO_PKG_VERSION"), rec.family);
            t += "n,branch,energy,imag,valid,residual,provenance,note\n";
            for s in &rec.states {
                t += &format!(
                    "{},{},{},{},{},{},{},{}\n",
                    s.n,
                    branch_sign(s.branch),
                    g12(s.energy),
                    g12(s.imag),
                    s.valid,
                    g12(s.residual),
                    match s.provenance {
                        Provenance::ClosedForm => "closed_form",
                        Provenance::Oracle => "oracle",
                    },
                    csv_field(s.note.as_deref().unwrap_or(""))
                );
            }
            for c in &rec.comparisons {
                t += &format!(
                    "# compare n={} {} {}: closed {} oracle {} abs_diff {} tol {} {}\n",
                    c.n,
                    c.branch,
                    c.method,
                    g12(c.closed_form),
                    c.oracle.map_or("none".into(), g12),
                    c.abs_diff.map_or("none".into(), g12),
                    g12(c.tol),
                    if c.pass { "pass" } else { "FAIL" }
                );
            }
            t
        }
    };
    Ok(Outcome { text, failed })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The spinor for level `spinor.n` on `spinor.branch`, with a description of its source.
fn build_spinor(cfg: &RunConfig) -> anyhow::Result<(SpinorOnGrid, String)> {
    let n = cfg.spinor_level()?;
    let closed = closed_spectrum(cfg)?;
    let grid = grid_for(cfg, closed.as_ref())?;
    match &cfg.family {
        CouplingFamily::Oscillator(p) => {
            let s = oscillator_spinor(p, n, cfg.branch, &grid)?;
            let src = if p.lambda_sq() == 0.0 {
                "closed_form (unnormalisable lower component, N = 1)"
            } else {
                "closed_form"
            };
            Ok((s, src.into()))
        }
        CouplingFamily::RosenMorse(p) => {
            let r = rosen_morse_spinor(p, n, cfg.branch, &grid)?;
            if !r.form_suspect {
                return Ok((r.printed, "closed_form".into()));
            }
            match r.oracle {
                Some(s) => Ok((s, "shooting (printed form flagged, see verify)".into())),
                None => Err(Numerical("printed form flagged and no oracle eigenfunction".into()).into()),
            }
        }
        CouplingFamily::Quadratic(_) | CouplingFamily::Sampled(_) => {
            let window = match &closed {
                Some(s) => {
                    let b = s
                        .find(n, cfg.branch)
                        .ok_or_else(|| anyhow::anyhow!("no valid level n = {n} on that branch"))?;
                    (b.energy - 0.1, b.energy + 0.1)
                }
                None => cfg.window.ok_or_else(|| {
                    anyhow::anyhow!("tabulated couplings need spectrum.window")
                })?,
            };
            let opts = dirac_options(cfg);
            let op = DiracOperator::assemble(&cfg.family, &grid, &opts)?;
            let pairs = eigenpairs_of(&op, window, &opts)?;
            let spec = spectrum_from_pairs(&cfg.family, &pairs);
            let target = if closed.is_some() {
                spec.nearest(0.5 * (window.0 + window.1)).cloned()
            } else {
                spec.find(n, cfg.branch).cloned()
            };
            let Some(t) = target else {
                return Err(Numerical(format!(
                    "no localized Dirac eigenvalue for n = {n} in [{}, {}]",
                    window.0, window.1
                ))
                .into());
            };
            let pair = pairs
                .iter()
                .find(|p| p.energy.re == t.energy)
                .expect("state comes from these pairs");
            let (plus, minus) = op.split(&pair.vector);
            let s = SpinorOnGrid::new(grid, opts.contour_offset, plus, minus, t.energy)?.normalized()?;
            Ok((s, "dirac".into()))
        }
    }
}

pub fn spinor(cfg: &RunConfig, format: Format) -> anyhow::Result<Outcome> {
    let (s, source) = build_spinor(cfg)?;
    let n = cfg.spinor_level()?;
    let header = format!(
        "# ptdirac {} spinor family={} n={n} branch={} energy={} source={source} contour_offset={}i norm={}",
        env!("CARGO_PKG_VERSION"),
        cfg.family.name(),
        branch_sign(cfg.branch),
        g12(s.energy),
        g12(s.contour_offset.im),
        g12(s.norm)
    );
    let text = match format {
        Format::Csv => {
            let mut t = header + "\nx,re_psi_plus,im_psi_plus,re_psi_minus,im_psi_minus,abs2_total\n";
            for (i, x) in s.grid.points().into_iter().enumerate() {
                let (a, b) = (s.psi_plus[i], s.psi_minus[i]);
                t += &format!(
                    "{},{},{},{},{},{}\n",
                    g12(x),
                    g12(a.re),
                    g12(a.im),
                    g12(b.re),
                    g12(b.im),
                    g12(a.norm_sqr() + b.norm_sqr())
                );
            }
            t
        }
        Format::Records => records(&json!({
            "family": family_value(cfg),
            "n": n,
            "branch": branch_sign(cfg.branch),
            "source": source,
            "spinor": s,
        }))?,
    };
    Ok(Outcome { text, failed: Vec::new() })
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    /// `pass`, `fail` or `info`.
    pub status: &'static str,
    pub detail: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub values: Value,
}

fn check(name: &str, pass: bool, detail: String, values: Value) -> Check {
    Check { name: name.into(), status: if pass { "pass" } else { "fail" }, detail, values }
}

fn info(name: &str, detail: String, values: Value) -> Check {
    Check { name: name.into(), status: "info", detail, values }
}

/// Real energy at which energy-dependent effective potentials are evaluated.
fn probe_energy(closed: Option<&Spectrum>) -> f64 {
    closed.and_then(|s| s.valid().next().map(|b| b.energy)).unwrap_or(1.0)
}

fn pt_checks(cfg: &RunConfig, closed: Option<&Spectrum>) -> anyhow::Result<Vec<Check>> {
    let grid = match &cfg.family {
        CouplingFamily::Sampled(s) => s.grid,
        _ => {
            let l = default_half_width(cfg, closed);
            GridSpec::symmetric(l, 2001)?
        }
    };
    if !grid.is_symmetric() {
        return Ok(vec![check(
            "pt_check",
            false,
            format!("grid [{}, {}] is not symmetric", grid.x_min, grid.x_max),
            Value::Null,
        )]);
    }
    let r = pt_check(&cfg.family, &grid, cfg.tol.pt)?;
    let failing = r.failing();
    let mut out = vec![check(
        "pt_check",
        r.pass,
        if failing.is_empty() {
            "coupling parities hold".into()
        } else {
            format!("parity violated: {}", failing.join(", "))
        },
        serde_json::to_value(r)?,
    )];
    let e = probe_energy(closed);
    let prob = EffectiveProblem::from_family(&cfg.family)?;
    let v = prob.pt_violation(&grid, e)?;
    out.push(check(
        "pt_effective",
        v < cfg.tol.pt,
        format!("max |V_eff(-x) - conj V_eff(x)| = {} at E = {}", g12(v), g12(e)),
        json!({ "violation": v, "energy": e, "points": grid.n }),
    ));
    Ok(out)
}

fn steps_value(steps: &[RefinementStep]) -> Value {
    serde_json::to_value(steps).unwrap_or(Value::Null)
}

fn residual_table(steps: &[RefinementStep]) -> String {
    steps.iter().map(|s| format!("N={} {}", s.points, g12(s.residual))).collect::<Vec<_>>().join(", ")
}

fn adjudication(r: &RosenMorseSpinorReport) -> Check {
    let values = json!({
        "n": r.n,
        "branch": branch_sign(r.branch),
        "energy": r.energy,
        "form_suspect": r.form_suspect,
        "printed_z_norm": r.printed_z_norm,
        "printed_residuals": steps_value(&r.printed_residuals),
        "chi_residuals": steps_value(&r.chi_residuals),
        "oracle_energy": r.oracle_energy,
        "oracle_residuals": steps_value(&r.oracle_residuals),
        "discrepancy": r.discrepancy,
        "notes": r.notes,
    });
    if !r.form_suspect {
        return check(
            "spinor_adjudication",
            converging(&r.printed_residuals),
            format!("printed form confirmed, residuals {}", residual_table(&r.printed_residuals)),
            values,
        );
    }
    let definitive = r.oracle.is_some() && converging(&r.oracle_residuals);
    check(
        "spinor_adjudication",
        definitive,
        format!(
            "printed form flagged (residuals {}); oracle eigenfunction at E = {} with residuals {}; discrepancy {}",
            residual_table(&r.printed_residuals),
            r.oracle_energy.map_or("none".into(), g12),
            residual_table(&r.oracle_residuals),
            r.discrepancy.map_or("none".into(), g12)
        ),
        values,
    )
}

fn comparison_checks(comps: &[Comparison]) -> Vec<Check> {
    let mut out = Vec::new();
    for method in ["shooting", "fixed_point", "dirac"] {
        let group: Vec<&Comparison> = comps.iter().filter(|c| c.method == method).collect();
        if group.is_empty() {
            continue;
        }
        let worst = group.iter().filter_map(|c| c.abs_diff).fold(0.0, f64::max);
        let bad: Vec<String> = group
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("n={} {}", c.n, c.branch))
            .collect();
        let detail = if bad.is_empty() {
            format!("{} levels, max |ΔE| = {} (tol {})", group.len(), g12(worst), g12(group[0].tol))
        } else {
            format!("failed for {}; max |ΔE| = {}", bad.join(", "), g12(worst))
        };
        out.push(check(
            &format!("closed_vs_{method}"),
            bad.is_empty(),
            detail,
            serde_json::to_value(&group).unwrap_or(Value::Null),
        ));
    }
    out
}

fn oscillator_checks(cfg: &RunConfig, grid: &GridSpec) -> anyhow::Result<Vec<Check>> {
    let CouplingFamily::Oscillator(p) = &cfg.family else { unreachable!() };
    let mut out = Vec::new();
    if p.lambda_sq() == 0.0 {
        out.push(info(
            "norm",
            "λ = 0: the lower component is not square integrable".into(),
            Value::Null,
        ));
        return Ok(out);
    }
    let fine = grid.refined();
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 0..=cfg.n_max.min(2) {
        let a = oscillator_spinor(p, n, Branch::Plus, grid)?;
        let b = oscillator_spinor(p, n, Branch::Plus, &fine)?;
        let ra = residual_check(&a, &cfg.family, a.energy)?;
        let rb = residual_check(&b, &cfg.family, b.energy)?;
        ok &= (3.5..=4.5).contains(&(ra / rb));
        rows.push(json!({ "n": n, "coarse": ra, "fine": rb, "ratio": ra / rb }));
    }
    out.push(check(
        "residual_convergence",
        ok,
        format!("residual ratio under h -> h/2 in [3.5, 4.5] for n ≤ {}", cfg.n_max.min(2)),
        Value::Array(rows),
    ));

    let mut rows = Vec::new();
    let mut ok = true;
    let mut printed = Vec::new();
    for n in 0..=cfg.n_max {
        let norm = oscillator_norm(p, n)?;
        let s = oscillator_spinor(p, n, Branch::Plus, grid)?;
        let q = quadrature_norm(&s)?;
        ok &= (q - 1.0).abs() < cfg.tol.norm;
        if let Some(d) = norm.closed_form_agreement() {
            ok &= d < 1e-8;
        }
        if let Some(pr) = norm.printed {
            printed.push(format!(
                "N{n}: printed {} vs closed form {} (ratio {})",
                g12(pr),
                g12(norm.textbook_closed_form.unwrap_or(f64::NAN)),
                g12(pr / norm.textbook_closed_form.unwrap_or(f64::NAN))
            ));
        }
        rows.push(json!({ "n": n, "quadrature_norm": q, "constants": norm }));
    }
    out.push(check(
        "norm",
        ok,
        format!("spinors integrate to 1 within {}; closed forms match quadrature", g12(cfg.tol.norm)),
        Value::Array(rows),
    ));
    if !printed.is_empty() {
        out.push(info("printed_constants", printed.join("; "), Value::Null));
    }
    Ok(out)
}

pub fn verify(cfg: &RunConfig, format: Format) -> anyhow::Result<Outcome> {
    let closed = closed_spectrum(cfg)?;
    let mut checks = pt_checks(cfg, closed.as_ref())?;
    let grid = grid_for(cfg, closed.as_ref())?;
    match &closed {
        Some(s) => {
            let valid = s.valid().count();
            checks.push(info(
                "closed_form",
                format!("{valid} valid and {} rejected states", s.states.len() - valid),
                serde_json::to_value(&s.states)?,
            ));
            if !s.diagnostics.is_empty() {
                checks.push(info("diagnostics", s.diagnostics.join("; "), Value::Null));
            }
            let (_, comps) = oracle_checks(cfg, s, &grid)?;
            checks.extend(comparison_checks(&comps));
        }
        None => {
            if cfg.window.is_some() {
                let d = dirac_only(cfg, &grid)?;
                let es: Vec<String> = d.valid().map(|b| g12(b.energy)).collect();
                checks.push(info(
                    "dirac_spectrum",
                    format!("localized eigenvalues: [{}]", es.join(", ")),
                    serde_json::to_value(&d.states)?,
                ));
            }
        }
    }
    match &cfg.family {
        CouplingFamily::Oscillator(_) => checks.extend(oscillator_checks(cfg, &grid)?),
        CouplingFamily::Quadratic(q) => {
            if let Some(s) = &closed {
                if q.b1 == 0.0 {
                    let per_level = (0..=cfg.n_max).all(|n| {
                        s.states.iter().filter(|b| b.n == n && b.valid).count() == 1
                            && s.states.iter().filter(|b| b.n == n && !b.valid).count() == 1
                    });
                    checks.push(check(
                        "spurious_filter",
                        per_level,
                        "each level keeps one root of the squared equation and rejects the other".into(),
                        Value::Null,
                    ));
                }
            }
        }
        CouplingFamily::RosenMorse(p) => {
            let r = rosen_morse_reality_check(p)?;
            let values = serde_json::to_value(&r)?;
            checks.push(if r.satisfied {
                check("reality_conditions", true, r.message.clone(), values)
            } else {
                // the conditions are sufficient, not necessary
                info("reality_conditions", r.message.clone(), values)
            });
            for b in closed.iter().flat_map(|s| s.valid()).filter(|b| b.branch == Branch::Plus) {
                let rep = rosen_morse_spinor(p, b.n, Branch::Plus, &grid)?;
                let mut c = adjudication(&rep);
                c.name = format!("spinor_adjudication n={}", b.n);
                checks.push(c);
            }
        }
        CouplingFamily::Sampled(_) => {}
    }
    let failed: Vec<String> =
        checks.iter().filter(|c| c.status == "fail").map(|c| c.name.clone()).collect();
    let text = match format {
        Format::Records => records(&json!({
            "family": family_value(cfg),
            "grid": grid,
            "pass": failed.is_empty(),
            "checks": checks,
        }))?,
        Format::Csv => {
            let mut t = format!("# ptdirac {} verify {}\ncheck,status,detail\n", env!("CARGO_PKG_VERSION"), family_value(cfg));
            for c in &checks {
                t += &format!("{},{},{}\n", csv_field(&c.name), c.status, csv_field(&c.detail));
            }
            t
        }
    };
    Ok(Outcome { text, failed })
}

pub fn ptcheck(cfg: &RunConfig, format: Format) -> anyhow::Result<Outcome> {
    let closed = closed_spectrum(cfg).ok().flatten();
    let checks = pt_checks(cfg, closed.as_ref())?;
    let failed: Vec<String> =
        checks.iter().filter(|c| c.status == "fail").map(|c| c.name.clone()).collect();
    let text = match format {
        Format::Records => records(&json!({ "family": family_value(cfg), "checks": checks }))?,
        Format::Csv => {
            let mut t = format!("# ptdirac {} ptcheck {}\ncheck,status,detail\n", env!("CARGO_PKG_VERSION"), family_value(cfg));
            for c in &checks {
                t += &format!("{},{},{}\n", c.name, c.status, csv_field(&c.detail));
            }
            t
        }
    };
    Ok(Outcome { text, failed })
}

pub fn norm(cfg: &RunConfig, format: Format) -> anyhow::Result<Outcome> {
    let levels: Vec<usize> = match cfg.spinor_n {
        Some(n) => vec![n],
        None => (0..=cfg.n_max).collect(),
    };
    let closed = closed_spectrum(cfg)?;
    let grid = grid_for(cfg, closed.as_ref())?;
    let mut rows = Vec::new();
    match &cfg.family {
        CouplingFamily::Oscillator(p) => {
            for &n in &levels {
                let c = oscillator_norm(p, n)?;
                let q = quadrature_norm(&oscillator_spinor(p, n, cfg.branch, &grid)?)?;
                rows.push(json!({
                    "n": n,
                    "value": c.value,
                    "closed_form": c.closed_form,
                    "textbook_quadrature": c.textbook_quadrature,
                    "textbook_closed_form": c.textbook_closed_form,
                    "printed": c.printed,
                    "kappa": c.kappa,
                    "c": c.c,
                    "spinor_quadrature": q,
                }));
            }
        }
        CouplingFamily::RosenMorse(p) => {
            for &n in &levels {
                let r = rosen_morse_spinor(p, n, cfg.branch, &grid)?;
                rows.push(json!({
                    "n": n,
                    "printed_z_norm": r.printed_z_norm,
                    "form_suspect": r.form_suspect,
                    "oracle_norm": r.oracle.as_ref().map(|s| s.norm),
                }));
            }
        }
        _ => bail!("norm constants are defined for the oscillator and hyperbolic families"),
    }
    let text = match format {
        Format::Records => records(&json!({ "family": family_value(cfg), "levels": rows }))?,
        Format::Csv => {
            let mut t = format!("# ptdirac {} norm {}\n", env!("CARGO_PKG_VERSION"), family_value(cfg));
            let mut keys: Vec<String> =
                rows[0].as_object().map(|o| o.keys().filter(|k| *k != "n").cloned().collect()).unwrap_or_default();
            keys.insert(0, "n".into());
            t += &keys.join(",");
            t.push('\n');
            for r in &rows {
                let vals: Vec<String> = keys
                    .iter()
                    .map(|k| match &r[k] {
                        Value::Number(x) => x.as_f64().map_or(x.to_string(), |v| if x.is_f64() { g12(v) } else { x.to_string() }),
                        Value::Null => String::new(),
                        other => other.to_string(),
                    })
                    .collect();
                t += &vals.join(",");
                t.push('\n');
            }
            t
        }
    };
    Ok(Outcome { text, failed: Vec::new() })
}
