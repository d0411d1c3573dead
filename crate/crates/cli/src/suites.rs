use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use hardy_core::grid::{conjugate, lp_norm};
use hardy_core::hardy::{
    a1_maximal_bound, b2_majorant, cazenave_check, classical_hardy_check_with_constant,
    classical_sharpness_sweep, duality_check, empirical_constant, endpoint_blowup,
    fractional_hardy_quotient, split_operator, t_maximal_bound, SWEEP_CELLS_PER_DECADE,
};
use hardy_core::maximal::{
    corollary_op, level_grid, maximal_centered, strong_pp_ratio, weak11_constant,
};
use hardy_core::spectral::direct_sum_cap;
use hardy_core::{
    Exponents, GridFunction, GridSpec, HalfLineFunction, HalfLineGrid, MaximalConfig, SplitConfig,
    TestFunction,
};

use crate::config::Settings;
use crate::report::{ReportRow, RowParams};

/// Highest mode of the seeded band-limited family members.
const BANDLIMITED_MODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Classical,
    Sharpness,
    Cazenave,
    Fractional,
    Endpoint,
    Maximal,
    ProofSteps,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::Classical,
        Kind::Sharpness,
        Kind::Cazenave,
        Kind::Fractional,
        Kind::Endpoint,
        Kind::Maximal,
        Kind::ProofSteps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Classical => "verify-classical",
            Kind::Sharpness => "sharpness-sweep",
            Kind::Cazenave => "verify-cazenave",
            Kind::Fractional => "verify-fractional",
            Kind::Endpoint => "endpoint-blowup",
            Kind::Maximal => "maximal-suite",
            Kind::ProofSteps => "proof-steps",
        }
    }
}

/// A fully validated suite, ready to run.
pub enum Plan {
    Classical(ClassicalPlan),
    Sharpness(SharpnessPlan),
    Cazenave(CazenavePlan),
    Fractional(FractionalPlan),
    Endpoint(EndpointPlan),
    Maximal(MaximalPlan),
    ProofSteps(ProofPlan),
}

pub fn plan(kind: Kind, settings: &Settings) -> Result<Plan> {
    let plan = match kind {
        Kind::Classical => Plan::Classical(ClassicalPlan::new(settings)?),
        Kind::Sharpness => Plan::Sharpness(SharpnessPlan::new(settings)?),
        Kind::Cazenave => Plan::Cazenave(CazenavePlan::new(settings)?),
        Kind::Fractional => Plan::Fractional(FractionalPlan::new(settings)?),
        Kind::Endpoint => Plan::Endpoint(EndpointPlan::new(settings)?),
        Kind::Maximal => Plan::Maximal(MaximalPlan::new(settings)?),
        Kind::ProofSteps => Plan::ProofSteps(ProofPlan::new(settings)?),
    };
    Ok(plan)
}

impl Plan {
    pub fn run(&self) -> Result<Vec<ReportRow>> {
        match self {
            Plan::Classical(p) => p.run(),
            Plan::Sharpness(p) => p.run(),
            Plan::Cazenave(p) => p.run(),
            Plan::Fractional(p) => p.run(),
            Plan::Endpoint(p) => p.run(),
            Plan::Maximal(p) => p.run(),
            Plan::ProofSteps(p) => p.run(),
        }
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let value = f()?;
    Ok((value, start.elapsed().as_secs_f64()))
}

fn grid(settings: &Settings, dim: usize, points: usize, half_width: f64) -> Result<GridSpec> {
    let dim = settings.usize_or("n", dim)?;
    let points = settings.usize_or("N", points)?;
    let half_width = settings.f64_or("L", half_width)?;
    Ok(GridSpec::new(dim, half_width, points)?)
}

fn refined(spec: &GridSpec) -> Result<GridSpec> {
    Ok(GridSpec::new(
        spec.dim(),
        spec.half_width(),
        2 * spec.points(),
    )?)
}

fn params(spec: &GridSpec, p: f64, s: f64, q: Option<f64>, kappa: Option<f64>) -> RowParams {
    RowParams {
        n: spec.dim(),
        p,
        s,
        q,
        kappa,
        points: spec.points(),
        half_width: spec.half_width(),
    }
}

fn parse_args(token: &str, args: &[&str], expected: usize) -> Result<Vec<f64>> {
    if args.len() != expected {
        bail!("family member `{token}` takes {expected} parameter(s)");
    }
    args.iter()
        .map(|a| {
            a.parse::<f64>()
                .map_err(|_| anyhow!("bad number `{a}` in family member `{token}`"))
        })
        .collect()
}

/// Parses `gaussian[:w]`, `bump[:c:r]`, `plateau[:r_in:r_out]`,
/// `bandlimited[:seed]` and `power` into labelled test functions.
fn family(
    settings: &Settings,
    dim: usize,
    default: &str,
    p: f64,
    t_max: f64,
) -> Result<Vec<(String, TestFunction)>> {
    let seed = settings.u64_or("seed", 1)?;
    let list = settings.str_or("family", default);
    let mut out = Vec::new();
    for token in list.split(',').map(str::trim) {
        let mut parts = token.split(':');
        let head = parts.next().unwrap_or("");
        let args: Vec<&str> = parts.collect();
        let tf = match head {
            "gaussian" if args.is_empty() => TestFunction::standard_gaussian(dim),
            "gaussian" => TestFunction::gaussian(vec![0.0; dim], parse_args(token, &args, 1)?[0]),
            "bump" if args.is_empty() => TestFunction::unit_bump(dim),
            "bump" => {
                let a = parse_args(token, &args, 2)?;
                let mut center = vec![0.0; dim];
                center[0] = a[0];
                TestFunction::bump(center, a[1])
            }
            "plateau" if args.is_empty() => TestFunction::unit_plateau(),
            "plateau" => {
                let a = parse_args(token, &args, 2)?;
                TestFunction::plateau(a[0], a[1])
            }
            "bandlimited" if args.is_empty() => {
                TestFunction::random_bandlimited(seed, BANDLIMITED_MODES)
            }
            "bandlimited" => {
                if args.len() != 1 {
                    bail!("family member `{token}` takes 1 parameter(s)");
                }
                let s = args[0]
                    .parse()
                    .map_err(|_| anyhow!("bad seed in family member `{token}`"))?;
                TestFunction::random_bandlimited(s, BANDLIMITED_MODES)
            }
            "power" if args.is_empty() => TestFunction::power_cutoff(p, t_max),
            _ => bail!("unknown family member `{token}`"),
        };
        out.push((token.to_string(), tf));
    }
    Ok(out)
}

fn generate(
    members: &[(String, TestFunction)],
    spec: &GridSpec,
) -> Result<Vec<(String, GridFunction)>> {
    members
        .iter()
        .map(|(label, tf)| {
            let f = tf
                .generate(spec)
                .with_context(|| format!("family member `{label}`"))?;
            if f.values().iter().all(|&v| v == 0.0) {
                bail!("family member `{label}` vanishes on the grid");
            }
            Ok((label.clone(), f))
        })
        .collect()
}

pub struct ClassicalPlan {
    p: f64,
    constant: f64,
    members: Vec<(String, HalfLineFunction)>,
}

impl ClassicalPlan {
    fn new(settings: &Settings) -> Result<Self> {
        let p = settings.f64_or("p", 2.0)?;
        if !(p > 1.0) {
            bail!("`p` must exceed 1, got {p}");
        }
        let cells = settings.usize_or("N", 4096)?;
        let x_max = settings.f64_or("L", 8.0)?;
        let constant = settings.f64_or("hardy-constant", (p / (p - 1.0)).powf(p))?;
        if !(constant > 0.0) {
            bail!("`hardy-constant` must be positive, got {constant}");
        }
        let grid = HalfLineGrid::uniform(x_max, cells)?;
        let members = family(settings, 1, "plateau,power", p, x_max)?
            .into_iter()
            .map(|(label, tf)| {
                let f = tf
                    .generate_half_line(&grid)
                    .with_context(|| format!("family member `{label}`"))?;
                Ok((label, f))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            p,
            constant,
            members,
        })
    }

    fn run(&self) -> Result<Vec<ReportRow>> {
        self.members
            .iter()
            .map(|(label, f)| {
                let (r, secs) = timed(|| {
                    Ok(classical_hardy_check_with_constant(
                        f,
                        self.p,
                        self.constant,
                    )?)
                })?;
                let prm = RowParams {
                    n: 1,
                    p: self.p,
                    s: 0.0,
                    q: None,
                    kappa: None,
                    points: f.grid().len(),
                    half_width: f.grid().x_max(),
                };
                Ok(ReportRow::new(
                    format!("verify-classical/{label}"),
                    &prm,
                    r.lhs,
                    r.rhs,
                    r.pass,
                    secs,
                ))
            })
            .collect()
    }
}

pub struct SharpnessPlan {
    p: f64,
    cutoffs: Vec<f64>,
}

impl SharpnessPlan {
    fn new(settings: &Settings) -> Result<Self> {
        let p = settings.f64_or("p", 2.0)?;
        if !(p > 1.0) {
            bail!("`p` must exceed 1, got {p}");
        }
        let cutoffs = settings.list_or("T", &[1e2, 1e4, 1e6])?;
        if cutoffs.iter().any(|&t| !(t >= 10.0)) {
            bail!("every cutoff in `T` must be at least 10");
        }
        if cutoffs.windows(2).any(|w| !(w[1] > w[0])) {
            bail!("cutoffs in `T` must increase");
        }
        Ok(Self { p, cutoffs })
    }

    fn run(&self) -> Result<Vec<ReportRow>> {
        let mut rows = Vec::new();
        let mut previous = f64::NEG_INFINITY;
        for &t in &self.cutoffs {
            let (r, secs) = timed(|| Ok(classical_sharpness_sweep(self.p, &[t])?.remove(0)))?;
            let cells = HalfLineGrid::graded(1.0, t, 4, SWEEP_CELLS_PER_DECADE)?.len();
            let prm = RowParams {
                n: 1,
                p: self.p,
                s: 0.0,
                q: None,
                kappa: None,
                points: cells,
                half_width: t,
            };
            let pass = r.pass && r.ratio > previous;
            previous = r.ratio;
            rows.push(ReportRow::new(
                format!("sharpness-sweep/T={t:e}"),
                &prm,
                r.lhs,
                r.rhs,
                pass,
                secs,
            ));
        }
        Ok(rows)
    }
}

pub struct CazenavePlan {
    p: f64,
    q: f64,
    members: Vec<(String, GridFunction)>,
}

impl CazenavePlan {
    fn new(settings: &Settings) -> Result<Self> {
        let spec = grid(settings, 2, 256, 8.0)?;
        let p = settings.f64_or("p", 2.0)?;
        let q = settings.f64_or("q", 1.0)?;
        let n = spec.dim() as f64;
        if !(p >= 1.0) {
            bail!("`p` must be at least 1, got {p}");
        }
        if !(q >= 0.0 && q <= p && q < n) {
            bail!("`q` must satisfy 0 <= q <= p and q < n (got q = {q}, p = {p}, n = {n})");
        }
        let members = generate(
            &family(settings, spec.dim(), "gaussian", p, spec.half_width())?,
            &spec,
        )?;
        Ok(Self { p, q, members })
    }

    fn run(&self) -> Result<Vec<ReportRow>> {
        self.members
            .iter()
            .map(|(label, u)| {
                let (r, secs) = timed(|| Ok(cazenave_check(u, self.p, self.q)?))?;
                let prm = params(u.spec(), self.p, self.q / self.p, Some(self.q), None);
                Ok(ReportRow::new(
                    format!("verify-cazenave/{label}"),
                    &prm,
                    r.lhs,
                    r.rhs,
                    r.pass,
                    secs,
                ))
            })
            .collect()
    }
}

pub struct FractionalPlan {
    s: f64,
    p: f64,
    tol_refine: f64,
    coarse: Vec<(String, GridFunction)>,
    fine: Vec<(String, GridFunction)>,
}

impl FractionalPlan {
    fn new(settings: &Settings) -> Result<Self> {
        let spec = grid(settings, 1, 1024, 8.0)?;
        let s = settings.f64_or("s", 0.3)?;
        let p = settings.f64_or("p", 2.0)?;
        Exponents::new(spec.dim(), s, p)?;
        let members = family(
            settings,
            spec.dim(),
            "gaussian,bump,plateau,bandlimited:1,bandlimited:2,bandlimited:3",
            p,
            spec.half_width(),
        )?;
        Ok(Self {
            s,
            p,
            tol_refine: settings.tolerance("tol-refine")?,
            coarse: generate(&members, &spec)?,
            fine: generate(&members, &refined(&spec)?)?,
        })
    }

    fn run(&self) -> Result<Vec<ReportRow>> {
        let mut rows = Vec::new();
        let mut quotients = Vec::new();
        for (label, u) in &self.coarse {
            let (r, secs) = timed(|| Ok(fractional_hardy_quotient(u, self.s, self.p)?))?;
            quotients.push(r.ratio);
            let prm = params(u.spec(), self.p, self.s, None, None);
            rows.push(ReportRow::new(
                format!("verify-fractional/{label}"),
                &prm,
                r.lhs,
                r.rhs,
                r.pass,
                secs,
            ));
        }
        let coarse: Vec<GridFunction> = self.coarse.iter().map(|(_, u)| u.clone()).collect();
        let fine: Vec<GridFunction> = self.fine.iter().map(|(_, u)| u.clone()).collect();
        let ((c, c_fine), secs) = timed(|| {
            Ok((
                empirical_constant(&coarse, self.s, self.p)?,
                empirical_constant(&fine, self.s, self.p)?,
            ))
        })?;
        let pass = quotients.iter().all(|&q| q <= c) && (c / c_fine - 1.0).abs() <= self.tol_refine;
        let prm = params(coarse[0].spec(), self.p, self.s, None, None);
        rows.push(ReportRow::new(
            "verify-fractional/constant-refinement",
            &prm,
            c,
            c_fine,
            pass,
            secs,
        ));
        Ok(rows)
    }
}

pub struct EndpointPlan {
    exps: Exponents,
    eps: Vec<f64>,
    tol_blowup: f64,
    members: Vec<(String, GridFunction)>,
}

fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI,
    }
}

impl EndpointPlan {
    fn new(settings: &Settings) -> Result<Self> {
        let spec = grid(settings, 1, 16384, 4.0)?;
        let p = settings.f64_or("p", 2.0)?;
        let s = settings.f64_or("s", spec.dim() as f64 / p)?;
        let exps = Exponents::endpoint(spec.dim(), s, p)?;
        let eps = settings.list_or("eps", &[0.1, 0.05, 0.025, 0.0125])?;
        let h = spec.spacing();
        if let Some(e) = eps.iter().find(|&&e| !(e > h)) {
            bail!("cutoff ε = {e} must exceed the grid spacing {h}");
        }
        if eps.windows(2).any(|w| !(w[1] < w[0])) {
            bail!("cutoffs in `eps` must decrease");
        }
        let members = generate(
            &family(settings, spec.dim(), "plateau", p, spec.half_width())?,
            &spec,
        )?;
        Ok(Self {
            exps,
            eps,
            tol_blowup: settings.tolerance("tol-blowup")?,
            members,
        })
    }

    /// Increment expected between consecutive cutoffs when `u` is flat near 0.
    fn expected_increment(&self, u: &GridFunction, from: f64, to: f64) -> f64 {
        let spec = u.spec();
        let origin = u.values()[spec.nearest_node(&vec![0.0; spec.dim()])].abs();
        sphere_area(spec.dim()) * origin.powf(self.exps.p) * (from / to).ln()
    }

    fn run(&self) -> Result<Vec<ReportRow>> {
        let mut rows = Vec::new();
        for (label, u) in &self.members {
            let (blowup, secs) = timed(|| Ok(endpoint_blowup(u, &self.exps, &self.eps)?))?;
            let per_row = secs / blowup.len() as f64;
            let prm = params(u.spec(), self.exps.p, self.exps.s, None, None);
            for (i, r) in blowup.iter().enumerate() {
                let pass = if i == 0 {
                    r.lhs.is_finite()
                } else {
                    let prev = &blowup[i - 1];
                    let expected = self.expected_increment(u, prev.eps, r.eps);
                    let step = r.lhs - prev.lhs;
                    step > 0.0 && ((step - expected) / expected).abs() <= self.tol_blowup
                };
                rows.push(ReportRow::new(
                    format!("endpoint-blowup/{label}/eps={}", r.eps),
                    &prm,
                    r.lhs,
                    r.rhs,
                    pass,
                    per_row,
                ));
            }
        }
        Ok(rows)
    }
}

pub struct MaximalPlan {
    p: f64,
    q: f64,
    tol_point: f64,
    tol_refine: f64,
    coarse: GridSpec,
    fine: GridSpec,
    members: Vec<(String, GridFunction, GridFunction)>,
}

fn indicator(spec: &GridSpec) -> Result<GridFunction> {
    Ok(GridFunction::from_fn(*spec, |x| {
        if x.iter().all(|v| (0.0..=1.0).contains(v)) {
            1.0
        } else {
            0.0
        }
    })?)
}

impl MaximalPlan {
    fn new(settings: &Settings) -> Result<Self> {
        let coarse = grid(settings, 1, 2048, 8.0)?;
        let fine = refined(&coarse)?;
        let p = settings.f64_or("p", 2.0)?;
        let q = settings.f64_or("q", 1.5)?;
        if !(p > 1.0) {
            bail!("`p` must exceed 1, got {p}");
        }
        if !(q >= 1.0 && q < conjugate(p)) {
            bail!("`q` must satisfy 1 <= q < p' = {}, got {q}", conjugate(p));
        }
        if coarse.half_width() <= 2.0 {
            bail!("`L` must exceed 2 so the point x = 2 lies inside the box");
        }
        let fam = family(
            settings,
            coarse.dim(),
            "gaussian,bump,plateau",
            p,
            coarse.half_width(),
        )?;
        let members = generate(&fam, &coarse)?
            .into_iter()
            .zip(generate(&fam, &fine)?)
            .map(|((label, c), (_, f))| (label, c, f))
            .collect();
        Ok(Self {
            p,
            q,
            tol_point: settings.tolerance("tol-point")?,
            tol_refine: settings.tolerance("tol-refine")?,
            coarse,
            fine,
            members,
        })
    }

    fn weak(&self, spec: &GridSpec, cfg: &MaximalConfig) -> Result<f64> {
        let f = indicator(spec)?;
        let mf = cfg.apply(&f);
        Ok(weak11_constant(&mf, &f, &level_grid(&mf, 64))?)
    }

    fn run(&self) -> Result<Vec<ReportRow>> {
        let mut rows = Vec::new();
        let prm = params(&self.coarse, self.p, 0.0, None, None);
        let modes = [
            ("centered", MaximalConfig::centered()),
            ("uncentered", MaximalConfig::uncentered()),
        ];
        if self.coarse.dim() == 1 {
            let f = indicator(&self.coarse)?;
            let node = self.coarse.nearest_node(&[2.0]);
            let tol = self.tol_point * self.coarse.spacing();
            for ((name, cfg), expected) in modes.iter().zip([0.25, 0.5]) {
                let (mf, secs) = timed(|| Ok(cfg.apply(&f)))?;
                let value = mf.values()[node];
                let pass = (value - expected).abs() <= tol;
                rows.push(ReportRow::new(
                    format!("maximal-suite/{name}-point"),
                    &prm,
                    value,
                    expected,
                    pass,
                    secs,
                ));
            }
        }
        for (name, cfg) in &modes {
            let ((c, c_fine), secs) =
                timed(|| Ok((self.weak(&self.coarse, cfg)?, self.weak(&self.fine, cfg)?)))?;
            let pass = (c / c_fine - 1.0).abs() <= self.tol_refine;
            rows.push(ReportRow::new(
                format!("maximal-suite/{name}-weak11"),
                &prm,
                c,
                c_fine,
                pass,
                secs,
            ));
        }
        for (label, coarse, fine) in &self.members {
            for (name, cfg) in &modes {
                let ((c, c_fine), secs) = timed(|| {
                    Ok((
                        strong_pp_ratio(coarse, self.p, cfg)?,
                        strong_pp_ratio(fine, self.p, cfg)?,
                    ))
                })?;
                let pass = c >= 1.0 - 1e-12 && (c / c_fine - 1.0).abs() <= self.tol_refine;
                rows.push(ReportRow::new(
                    format!("maximal-suite/{name}-strong/{label}"),
                    &prm,
                    c,
                    c_fine,
                    pass,
                    secs,
                ));
            }
            let pc = conjugate(self.p);
            let ((lhs, rhs), secs) = timed(|| {
                let g = corollary_op(coarse, self.q, &MaximalConfig::centered())?;
                Ok((lp_norm(&g, pc), lp_norm(coarse, pc)))
            })?;
            let cprm = params(&self.coarse, self.p, 0.0, Some(self.q), None);
            rows.push(ReportRow::new(
                format!("maximal-suite/corollary/{label}"),
                &cprm,
                lhs,
                rhs,
                lhs.is_finite(),
                secs,
            ));
        }
        Ok(rows)
    }
}

pub struct ProofPlan {
    s: f64,
    p: f64,
    q: f64,
    cfg: SplitConfig,
    tol_partition: f64,
    tol_duality: f64,
    tol_refine: f64,
    partner: GridFunction,
    members: Vec<(String, GridFunction, GridFunction)>,
}

impl ProofPlan {
    fn new(settings: &Settings) -> Result<Self> {
        let coarse = grid(settings, 1, 512, 4.0)?;
        let fine = refined(&coarse)?;
        let s = settings.f64_or("s", 0.3)?;
        let p = settings.f64_or("p", 2.0)?;
        let q = settings.f64_or("q", 2.0)?;
        Exponents::new(coarse.dim(), s, p)?.with_holder(q)?;
        let cfg = SplitConfig::new(settings.f64_or("kappa", 100.0)?)?;
        let seed = settings.u64_or("seed", 1)?;
        let partner =
            TestFunction::random_bandlimited(seed, BANDLIMITED_MODES).generate(&coarse)?;
        let fam = family(
            settings,
            coarse.dim(),
            "bump,bump:0.5:1,bump:0:2",
            p,
            coarse.half_width(),
        )?;
        let members: Vec<_> = generate(&fam, &coarse)?
            .into_iter()
            .zip(generate(&fam, &fine)?)
            .map(|((label, c), (_, f))| (label, c, f))
            .collect();
        for (label, c, _) in &members {
            if c.values().iter().any(|&v| v < 0.0) {
                bail!("family member `{label}` must be nonnegative for the majorization step");
            }
        }
        let cap = direct_sum_cap(fine.dim());
        if fine.points() > cap {
            bail!(
                "`N` = {} is refined to {}, above the direct-sum cap {cap}",
                coarse.points(),
                fine.points()
            );
        }
        Ok(Self {
            s,
            p,
            q,
            cfg,
            tol_partition: settings.tolerance("tol-partition")?,
            tol_duality: settings.tolerance("tol-duality")?,
            tol_refine: settings.tolerance("tol-refine")?,
            partner,
            members,
        })
    }

    fn run(&self) -> Result<Vec<ReportRow>> {
        let mut rows = Vec::new();
        let kappa = Some(self.cfg.kappa());
        for (label, f, f_fine) in &self.members {
            let prm = params(f.spec(), self.p, self.s, None, kappa);
            let qprm = params(f.spec(), self.p, self.s, Some(self.q), kappa);

            let (parts, secs) = timed(|| Ok(split_operator(f, self.s, &self.cfg)?))?;
            let sum = parts.near.add(&parts.far)?;
            let residual = sum.sub(&parts.full)?.max_abs() / parts.full.max_abs();
            rows.push(ReportRow::new(
                format!("proof-steps/partition/{label}"),
                &prm,
                residual,
                self.tol_partition,
                residual <= self.tol_partition,
                secs,
            ));

            let (gap, secs) = timed(|| Ok(duality_check(f, &self.partner, self.s, &self.cfg)?))?;
            rows.push(ReportRow::new(
                format!("proof-steps/duality/{label}"),
                &prm,
                gap,
                self.tol_duality,
                gap <= self.tol_duality,
                secs,
            ));

            let ((a1, a1_fine), secs) = timed(|| {
                let coarse = a1_maximal_bound(f, self.s, &self.cfg, &maximal_centered(&f.abs()))?;
                let fine =
                    a1_maximal_bound(f_fine, self.s, &self.cfg, &maximal_centered(&f_fine.abs()))?;
                Ok((coarse.sup_ratio, fine.sup_ratio))
            })?;
            let stable = |a: f64, b: f64| {
                a.is_finite() && b.is_finite() && a > 0.0 && (a / b - 1.0).abs() <= self.tol_refine
            };
            rows.push(ReportRow::new(
                format!("proof-steps/a1-bound/{label}"),
                &prm,
                a1,
                a1_fine,
                stable(a1, a1_fine),
                secs,
            ));

            let ((t, t_fine), secs) = timed(|| {
                Ok((
                    t_maximal_bound(f, self.s, self.q, &self.cfg)?,
                    t_maximal_bound(f_fine, self.s, self.q, &self.cfg)?,
                ))
            })?;
            rows.push(ReportRow::new(
                format!("proof-steps/t-bound/{label}"),
                &qprm,
                t,
                t_fine,
                stable(t, t_fine),
                secs,
            ));

            let ((worst, holds), secs) = timed(|| {
                let b2 = b2_majorant(f, self.s, &self.cfg)?;
                let pairs = parts.far.values().iter().zip(b2.values.values());
                let holds = pairs.clone().all(|(a, b)| a <= b);
                let worst = pairs
                    .filter(|(_, &b)| b > 0.0)
                    .map(|(a, b)| a / b)
                    .fold(0.0, f64::max);
                Ok((worst, holds))
            })?;
            rows.push(ReportRow::new(
                format!("proof-steps/majorization/{label}"),
                &prm,
                worst,
                1.0,
                holds,
                secs,
            ));
        }
        Ok(rows)
    }
}
