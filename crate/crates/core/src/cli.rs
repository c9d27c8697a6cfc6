//! Command-line front end: argument parsing, the worker pool and file output.
//!
//! Exit codes: 0 on success, 2 when the tool ran but a certificate or check
//! failed, 1 on usage or runtime errors. Every emitted file carries a
//! metadata block with the map, the seed and the tool version; none records
//! the worker count, so outputs are byte-identical across `--workers`.

use crate::error::{HenonError, Result};
use crate::io::{forward_map_from_json, load_map, poly_from_json, write_csv, write_json, write_ppm, Meta};
use crate::linalg::{Point2C, C64};
use crate::manifolds::{local_stable_disk, local_unstable_disk_with, DiskSample};
use crate::map::HenonMap;
use crate::onedim::{critical_distance, julia_sample_1d, periodic_cycles_1d, verify_1d_hyperbolicity, Poly1D};
use crate::periodic::{find_periodic_orbits, harvest_saddles, hausdorff_distance, OrbitSearch, OrbitType, PointCloud};
use crate::potential::{parse_complex_literal, render_rgb, GreenOptions, Potential, SliceSpec};
use crate::splitting::{
    build_julia_cover, estimate_rates, recheck, sampling_oracle, verify_dominated_splitting, verify_hyperbolicity,
    ConeParams, CoverOptions, OracleOptions, SplittingCertificate, DEFAULT_ALPHA, DEFAULT_R,
};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "henonlab", version, about = "Computation and certification for complex Hénon maps")]
pub struct Cli {
    /// Seed for every pseudo-random and quasi-random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Green functions and membership on a complex line, as PPM and CSV.
    Render(RenderArgs),
    /// Cone-field certificate of dominated splitting on a box cover of J.
    VerifySplitting(SplitArgs),
    /// Dominated splitting plus uniform expansion and contraction.
    VerifyHyperbolicity(HyperArgs),
    /// Periodic orbits with multipliers and types.
    Periodic(PeriodicArgs),
    /// Contraction and expansion rates along an orbit.
    Rates(RatesArgs),
    /// Hausdorff distance between the saddle cloud and a cover of J.
    JstarCompare(JstarArgs),
    /// Local strong stable (or unstable) disk through a point.
    Manifold(ManifoldArgs),
    /// Upper bounds for the area of J⁺ on a slice at increasing depth.
    AreaTrend(AreaArgs),
    /// Hyperbolicity and cycles of a one-variable polynomial.
    Oned(OnedArgs),
    /// Re-verifies every Verified box of a stored certificate.
    Recheck(RecheckArgs),
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value = "y=0")]
    pub slice: String,
    #[arg(long, default_value_t = 256)]
    pub res: usize,
    /// Half-width of the square window; defaults to the filtration radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Iteration depth for the membership tags.
    #[arg(long, default_value_t = 200)]
    pub depth: usize,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Dyadic level of the box cover.
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long = "cone-r", default_value_t = DEFAULT_R)]
    pub cone_r: f64,
    /// Orbit segments for the sampling oracle; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub oracle: usize,
    /// Saddle periods used to anchor oracle segments.
    #[arg(long, default_value_t = 4)]
    pub max_period: usize,
}

#[derive(Args, Debug)]
pub struct HyperArgs {
    #[command(flatten)]
    pub split: SplitArgs,
    /// Required expansion rate λ_u > 1.
    #[arg(long, default_value_t = 1.0 + 1e-9)]
    pub lambda: f64,
}

#[derive(Args, Debug)]
pub struct PeriodicArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub max_period: usize,
    #[arg(long, default_value_t = 400)]
    pub seeds: usize,
}

#[derive(Args, Debug)]
pub struct RatesArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Base point `x,y` with complex literals; defaults to a saddle fixed point.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long = "N", default_value_t = 20)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct JstarArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub max_period: usize,
    #[arg(long, default_value_t = 9)]
    pub depth: usize,
    /// Newton seeds for period n are this times n².
    #[arg(long, default_value_t = 400)]
    pub seeds: usize,
}

#[derive(Args, Debug)]
pub struct ManifoldArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Base point `x,y`; defaults to a saddle fixed point.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub radius: f64,
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    #[arg(long, default_value_t = 40)]
    pub iters: usize,
    /// Compute the local unstable disk instead, following N backward steps.
    #[arg(long)]
    pub unstable: bool,
    #[arg(long = "N", default_value_t = 40)]
    pub n: usize,
    /// Transversal height y₀ for the unstable disk.
    #[arg(long, default_value = "0")]
    pub y0: String,
}

#[derive(Args, Debug)]
pub struct AreaArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value = "y=0")]
    pub slice: String,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "6,7,8,9,10")]
    pub depth: Vec<usize>,
    /// Attracting cycles up to this period get trap boxes.
    #[arg(long, default_value_t = 2)]
    pub max_period: usize,
    #[arg(long, default_value_t = 200)]
    pub seeds: usize,
}

#[derive(Args, Debug)]
pub struct OnedArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long = "N", default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 4)]
    pub max_period: usize,
    #[arg(long, default_value_t = 64)]
    pub seeds: usize,
}

#[derive(Args, Debug)]
pub struct RecheckArgs {
    pub certificate: PathBuf,
}

/// Result of a command: exit code and the files written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn push(&mut self, p: PathBuf) {
        self.files.push(p);
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match run(&cli) {
        Ok(o) => {
            for f in &o.files {
                println!("{}", f.display());
            }
            o.code
        }
        Err(e) => {
            eprintln!("henonlab: {e}");
            1
        }
    }
}

/// Runs one command on a pool of `cli.workers` threads.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| HenonError::InvalidArgument(format!("worker pool: {e}")))?;
    std::fs::create_dir_all(&cli.out)?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Render(a) => render(a, out, cli.seed),
        Command::VerifySplitting(a) => verify(a, None, out, cli.seed),
        Command::VerifyHyperbolicity(a) => verify(&a.split, Some(a.lambda), out, cli.seed),
        Command::Periodic(a) => periodic(a, out, cli.seed),
        Command::Rates(a) => rates(a, out, cli.seed),
        Command::JstarCompare(a) => jstar(a, out, cli.seed),
        Command::Manifold(a) => manifold(a, out, cli.seed),
        Command::AreaTrend(a) => area(a, out, cli.seed),
        Command::Oned(a) => oned(a, out, cli.seed),
        Command::Recheck(a) => recheck_file(&a.certificate, out, cli.seed),
    }
}

fn load_forward(path: &Path) -> Result<HenonMap> {
    forward_map_from_json(&std::fs::read_to_string(path)?)
}

fn parse_point(text: &str) -> Result<Point2C> {
    let bad = || HenonError::InvalidArgument(format!("bad point {text:?}; expected x,y"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    let x = parse_complex_literal(x.trim()).ok_or_else(bad)?;
    let y = parse_complex_literal(y.trim()).ok_or_else(bad)?;
    Ok(Point2C::new(x, y))
}

/// First saddle point of the lowest period up to 4 that has one.
fn default_saddle(map: &HenonMap, seed: u64) -> Result<Point2C> {
    let mut search = OrbitSearch::new(map, 200)?;
    search.seed = seed;
    for n in 1..=4 {
        if let Some(o) = find_periodic_orbits(map, n, &search)?
            .into_iter()
            .find(|o| o.kind == OrbitType::Saddle)
        {
            return Ok(o.points[0]);
        }
    }
    Err(HenonError::NotFound("no saddle cycle of period ≤ 4 found; pass --point".into()))
}

fn base_point(map: &HenonMap, point: &Option<String>, seed: u64) -> Result<Point2C> {
    match point {
        Some(p) => parse_point(p),
        None => default_saddle(map, seed),
    }
}

fn complex_value(c: C64) -> Value {
    json!([c.re, c.im])
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

fn slice_for(text: &str, half: f64) -> Result<SliceSpec> {
    if !(half > 0.0 && half.is_finite()) {
        return Err(HenonError::InvalidArgument("window radius must be positive".into()));
    }
    SliceSpec::parse(text, (-half, half), (-half, half))
}

fn render(a: &RenderArgs, out: &Path, seed: u64) -> Result<Outcome> {
    let map = load_forward(&a.map)?;
    let pot = Potential::new(&map)?;
    let slice = slice_for(&a.slice, a.radius.unwrap_or(pot.radius()))?;
    let s = pot.sample_slice(&slice, a.res, a.depth, &GreenOptions::default())?;
    let meta = Meta::new("render", seed, Some(&map));
    let mut o = Outcome::default();
    let ppm = out.join("render.ppm");
    write_ppm(&ppm, &meta, a.res, a.res, &render_rgb(&s))?;
    o.push(ppm);
    let mut rows = Vec::with_capacity(a.res * a.res);
    for j in 0..a.res {
        for i in 0..a.res {
            let k = j * a.res + i;
            let u = slice.at((i as f64 + 0.5) / a.res as f64, (j as f64 + 0.5) / a.res as f64);
            let gm = s.minus.as_ref().map(|m| m.values[k]).unwrap_or(f64::NAN);
            rows.push(vec![
                i.to_string(),
                j.to_string(),
                fmt(u.re),
                fmt(u.im),
                fmt(s.plus.values[k]),
                fmt(gm),
                s.tags[k].code().to_string(),
            ]);
        }
    }
    let csv = out.join("render.csv");
    write_csv(&csv, &meta, &["i", "j", "re", "im", "g_plus", "g_minus", "tag"], &rows)?;
    o.push(csv);
    Ok(o)
}

fn certificate_value(cert: &SplittingCertificate, truncated: bool) -> Result<Value> {
    let mut v = serde_json::to_value(cert)?;
    v["cover_truncated"] = json!(truncated);
    Ok(v)
}

fn verify(a: &SplitArgs, lambda: Option<f64>, out: &Path, seed: u64) -> Result<Outcome> {
    let map = load_map(&a.map)?;
    let radius = map.filtration_radius()?.radius;
    let cover = build_julia_cover(&map, radius, &CoverOptions::new(a.depth))?;
    let cone = ConeParams::for_cover(&map, &cover, a.alpha, a.cone_r)?;
    let (name, cert) = match lambda {
        None => ("verify-splitting", verify_dominated_splitting(&map, &cover, &cone)?),
        Some(l) => ("verify-hyperbolicity", verify_hyperbolicity(&map, &cover, &cone, l)?),
    };
    let meta = Meta::new(name, seed, Some(&map));
    let mut o = Outcome::default();
    let path = out.join("certificate.json");
    write_json(&path, &meta, certificate_value(&cert, cover.truncated)?)?;
    o.push(path);
    let mut failed = !cert.all_verified();
    if a.oracle > 0 {
        let mut search = OrbitSearch::new(&map, 200)?;
        search.seed = seed;
        let mut opts = OracleOptions::new(a.oracle, seed);
        opts.anchors = harvest_saddles(&map, a.max_period, &search)?.points;
        let rep = sampling_oracle(&map, &cert, &opts);
        failed |= !rep.passed();
        let path = out.join("oracle.json");
        write_json(&path, &meta, serde_json::to_value(&rep)?)?;
        o.push(path);
    }
    log::info!("{} of {} boxes verified at N = {}", cert.verified_count(), cert.boxes.len(), cert.n);
    o.code = if failed { 2 } else { 0 };
    Ok(o)
}

fn periodic(a: &PeriodicArgs, out: &Path, seed: u64) -> Result<Outcome> {
    let map = load_map(&a.map)?;
    let mut search = OrbitSearch::new(&map, a.seeds)?;
    search.seed = seed;
    let mut orbits = Vec::new();
    let mut counts = Vec::new();
    for n in 1..=a.max_period {
        let found = find_periodic_orbits(&map, n, &search)?;
        counts.push(json!({"period": n, "orbits": found.len()}));
        orbits.extend(found);
    }
    let meta = Meta::new("periodic", seed, Some(&map));
    let path = out.join("orbits.json");
    write_json(&path, &meta, json!({"search": search, "counts": counts, "orbits": orbits}))?;
    Ok(Outcome {
        code: 0,
        files: vec![path],
    })
}

fn rates(a: &RatesArgs, out: &Path, seed: u64) -> Result<Outcome> {
    let map = load_map(&a.map)?;
    let z = base_point(&map, &a.point, seed)?;
    let radius = map.filtration_radius()?.radius;
    let rep = estimate_rates(&map, z, a.n, radius)?;
    let meta = Meta::new("rates", seed, Some(&map));
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt(r.stable_norm),
                fmt(r.central_norm),
                fmt(r.sigma_min),
                fmt(r.det_residual),
            ]
        })
        .collect();
    let csv = out.join("rates.csv");
    write_csv(&csv, &meta, &["n", "stable_norm", "central_norm", "sigma_min", "det_residual"], &rows)?;
    let js = out.join("rates.json");
    write_json(&js, &meta, serde_json::to_value(&rep)?)?;
    Ok(Outcome {
        code: 0,
        files: vec![csv, js],
    })
}

fn jstar(a: &JstarArgs, out: &Path, seed: u64) -> Result<Outcome> {
    let map = load_map(&a.map)?;
    let radius = map.filtration_radius()?.radius;
    let mut search = OrbitSearch::new(&map, a.seeds)?;
    search.seed = seed;
    let mut saddles = Vec::new();
    for n in 1..=a.max_period {
        search.seed_count = a.seeds * n * n;
        for o in find_periodic_orbits(&map, n, &search)? {
            if o.kind == OrbitType::Saddle {
                saddles.extend(o.points);
            }
        }
    }
    let cloud = PointCloud::new(format!("saddles(period<={})", a.max_period), saddles);
    let cover = build_julia_cover(&map, radius, &CoverOptions::new(a.depth))?;
    let centres = PointCloud::new(format!("cover(level={})", cover.level), cover.boxes.iter().map(|b| b.bx.center()));
    let h = hausdorff_distance(&cloud, &centres)?;
    let diagonal = cover.boxes.first().map(|b| b.bx.diagonal()).unwrap_or(f64::NAN);
    let meta = Meta::new("jstar-compare", seed, Some(&map));
    let path = out.join("jstar.json");
    write_json(
        &path,
        &meta,
        json!({
            "saddle_points": cloud.len(),
            "cover_boxes": centres.len(),
            "cover_level": cover.level,
            "cover_truncated": cover.truncated,
            "hausdorff": h,
            "box_diagonal": diagonal,
            "ratio": h / diagonal,
        }),
    )?;
    Ok(Outcome {
        code: 0,
        files: vec![path],
    })
}

fn sample_rows(base: Point2C, samples: &[DiskSample]) -> Vec<Vec<String>> {
    samples
        .iter()
        .map(|s| {
            [base.x.re, base.x.im, base.y.re, base.y.im, s.u.re, s.u.im, s.point.x.re, s.point.x.im, s.point.y.re, s.point.y.im]
                .iter()
                .map(|&v| fmt(v))
                .collect()
        })
        .collect()
}

const MANIFOLD_COLUMNS: [&str; 10] = [
    "base_x_re", "base_x_im", "base_y_re", "base_y_im", "u_re", "u_im", "x_re", "x_im", "y_re", "y_im",
];

fn manifold(a: &ManifoldArgs, out: &Path, seed: u64) -> Result<Outcome> {
    let map = load_map(&a.map)?;
    let z = base_point(&map, &a.point, seed)?;
    let meta = Meta::new("manifold", seed, Some(&map));
    let (rows, summary) = if a.unstable {
        let y0 = parse_complex_literal(&a.y0)
            .ok_or_else(|| HenonError::InvalidArgument(format!("bad height {:?}", a.y0)))?;
        let d = local_unstable_disk_with(&map, z, a.n, y0, a.radius, a.grid)?;
        let summary = json!({
            "kind": "unstable",
            "base": d.base,
            "tangent": d.tangent,
            "radius": d.radius,
            "transversal_height": complex_value(d.transversal_height),
            "backward_diameters": d.backward_diameters,
        });
        (sample_rows(z, &d.samples), summary)
    } else {
        let d = local_stable_disk(&map, z, a.radius, a.grid, a.iters)?;
        let summary = json!({
            "kind": "stable",
            "base": d.base,
            "tangent": d.tangent,
            "radius": d.radius,
            "grid": d.grid,
            "depth": d.depth,
            "invariance_residual": d.invariance_residual,
        });
        (sample_rows(z, &d.samples), summary)
    };
    let csv = out.join("manifold.csv");
    write_csv(&csv, &meta, &MANIFOLD_COLUMNS, &rows)?;
    let js = out.join("manifold.json");
    write_json(&js, &meta, summary)?;
    Ok(Outcome {
        code: 0,
        files: vec![csv, js],
    })
}

fn area(a: &AreaArgs, out: &Path, seed: u64) -> Result<Outcome> {
    let map = load_forward(&a.map)?;
    let mut pot = Potential::new(&map)?;
    if a.max_period > 0 {
        pot = pot.detect_attractors(a.max_period, a.seeds)?;
    }
    let slice = slice_for(&a.slice, a.radius.unwrap_or(pot.radius()))?;
    let areas = pot.area_estimate(&slice, &a.depth, &GreenOptions::default())?;
    let rows: Vec<Vec<String>> = a
        .depth
        .iter()
        .zip(&areas)
        .enumerate()
        .map(|(k, (d, ar))| {
            let ratio = if k == 0 { f64::NAN } else { areas[k - 1] / ar };
            vec![d.to_string(), fmt(*ar), fmt(ratio)]
        })
        .collect();
    let meta = Meta::new("area-trend", seed, Some(&map));
    let csv = out.join("area.csv");
    write_csv(&csv, &meta, &["depth", "area_bound", "ratio"], &rows)?;
    Ok(Outcome {
        code: 0,
        files: vec![csv],
    })
}

fn oned(a: &OnedArgs, out: &Path, seed: u64) -> Result<Outcome> {
    let p = Poly1D::from_poly(poly_from_json(&std::fs::read_to_string(&a.map)?)?)?;
    let julia = julia_sample_1d(&p, a.samples, 20, seed)?;
    let hyp = verify_1d_hyperbolicity(&p, &julia, a.n);
    let mut cycles = Vec::new();
    for n in 1..=a.max_period {
        let c = periodic_cycles_1d(&p, n, a.seeds, seed)?;
        cycles.push(json!({
            "period": n,
            "cycles": c.iter().map(|cy| cy.iter().map(|&z| complex_value(z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }));
    }
    let meta = Meta {
        map: json!({"p": p.poly().coeffs().iter().map(|&c| complex_value(c)).collect::<Vec<_>>()}),
        ..Meta::new("oned", seed, None)
    };
    let path = out.join("oned.json");
    write_json(
        &path,
        &meta,
        json!({
            "samples": julia.len(),
            "critical_distance": critical_distance(&p, &julia),
            "hyperbolic": hyp.map(|(n, m)| json!({"N": n, "min_derivative": m})),
            "cycles": cycles,
        }),
    )?;
    Ok(Outcome {
        code: if hyp.is_some() { 0 } else { 2 },
        files: vec![path],
    })
}

fn recheck_file(path: &Path, out: &Path, seed: u64) -> Result<Outcome> {
    let cert = SplittingCertificate::from_json(&std::fs::read_to_string(path)?)?;
    let rep = recheck(&cert)?;
    let map = crate::io::map_from_value(&cert.params.map)?;
    let meta = Meta::new("recheck", seed, Some(&map));
    let dest = out.join("recheck.json");
    write_json(&dest, &meta, serde_json::to_value(&rep)?)?;
    Ok(Outcome {
        code: if rep.passed() { 0 } else { 2 },
        files: vec![dest],
    })
}
