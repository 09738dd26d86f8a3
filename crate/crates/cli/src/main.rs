mod config;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gaussamp::annihilator::{alternating_theta_on, build_annihilator_1d, critical_counterexamples, lift_to_2d, AnnihilatorOptions};
use gaussamp::experiments::manifest_text;
use gaussamp::frame::{bound_trend, csv_float, reconstruct, PointSource, SamplingMatrix};
use gaussamp::gabor::{build_delta_lattice, frame_verdict_trend, translate_sweep, GaborLatticeSpec};
use gaussamp::geometry::{IndexBox, Interval, Rect, Window};
use gaussamp::points::{Direction, LineFamily, SlantedConfig};
use gaussamp::series::{CoeffGrid, GaussSeriesFunction};
use gaussamp::trajectory::{annihilator_on_trajectory, st_bound_trend};

use config::{Config, ConfigError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Density,
    Lattice,
    FrameTrend,
    Reconstruct,
    Annihilator,
    Theta,
    TrajectoryTrend,
    TrajectoryAnnihilate,
    GaborSweep,
    GaborTrend,
    Experiments,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::Lattice => "lattice",
            Command::FrameTrend => "frame-trend",
            Command::Reconstruct => "reconstruct",
            Command::Annihilator => "annihilator",
            Command::Theta => "theta",
            Command::TrajectoryTrend => "trajectory-trend",
            Command::TrajectoryAnnihilate => "trajectory-annihilate",
            Command::GaborSweep => "gabor-sweep",
            Command::GaborTrend => "gabor-trend",
            Command::Experiments => "experiments",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::Density => &["set", "radii", "step", "span"],
            Command::Lattice => &["p", "q", "gamma1", "gamma2", "radius"],
            Command::FrameTrend => &["source", "set", "p", "q", "gamma1", "gamma2", "a", "n_list", "margin"],
            Command::Reconstruct => &["source", "set", "p", "q", "gamma1", "gamma2", "a", "n", "margin"],
            Command::Annihilator => &["kind", "set", "a", "scale", "eps", "k_lo", "k_hi", "p", "q", "radius", "gamma1", "points", "draws", "grid"],
            Command::Theta => &["a", "scale", "radius", "k_max"],
            Command::TrajectoryTrend => &["slope", "offsets", "a", "windows", "delta", "margin"],
            Command::TrajectoryAnnihilate => &["slope", "offsets", "a", "window"],
            Command::GaborSweep => &["p", "q", "a_lat", "b_lat", "c", "d", "alpha", "n", "margin", "step"],
            Command::GaborTrend => &["p", "q", "a_lat", "b_lat", "c", "d", "alpha", "n_list", "margin", "step"],
            Command::Experiments => &[],
        }
    }

    fn explain(self) -> &'static str {
        match self {
            Command::Density => "Lower and upper Beurling densities from windowed counts; the density thresholds decide sampling for slanted configurations and trajectories.",
            Command::Lattice => "Slanted configuration R(Gamma_1/sigma x sigma Gamma_2) with R = [[p,-q],[q,p]]/sigma and sigma = sqrt(p^2+q^2).",
            Command::FrameTrend => "Finite-section frame bounds A_est, B_est of a sampling set for V^2_a over growing windows; a sampling set keeps A_est bounded below, a uniqueness set that does not sample (such as Z minus {0}) shows A_est decaying.",
            Command::Reconstruct => "Least-squares recovery of random coefficients from samples; stable whenever the set samples.",
            Command::Annihilator => "Nonzero functions of the space vanishing on a set: the product construction for counting slope below 1, lifts to two variables, and the critical counterexamples built from the alternating theta series.",
            Command::Theta => "The alternating theta series sum (-1)^n exp(-a s^2 (x-n)^2) vanishes on Z + 1/2.",
            Command::TrajectoryTrend => "Bounds of a slanted-cube discretization of a line family: irrational slopes sample when D-(Gamma) > 0, rational slopes need D-(Gamma) > 1/sigma.",
            Command::TrajectoryAnnihilate => "For a rational slope with D+(Gamma) sigma < 1 a lifted product construction vanishes on every line of the family.",
            Command::GaborSweep => "A Gaussian Gabor system on Lambda x Z^2 is a frame iff every translate -Lambda + (u,v) samples V^2_a; the sweep checks a grid of translates.",
            Command::GaborTrend => "Minimum translate bound across windows for the lattices with time plane M (c/sigma Z x d sigma Z); frames when c<1 and d<1 or c<sigma^2 and d<sigma^-2.",
            Command::Experiments => "Manifest of the reference runs with their expected qualitative outcomes.",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gaussamp", version, about = "Sampling diagnostics for Gaussian shift-invariant spaces")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// key = value file with [section] headers
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// Print what the command computes and exit
    #[arg(long)]
    explain: bool,
    /// Override a config key, e.g. --set a=pi
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

enum CliError {
    Config(ConfigError),
    Op(gaussamp::Error),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<gaussamp::Error> for CliError {
    fn from(e: gaussamp::Error) -> Self {
        CliError::Op(e)
    }
}

type Res<T> = Result<T, CliError>;

struct Ctx {
    cfg: Config,
    out: PathBuf,
    seed: u64,
    cmd: Command,
}

impl Ctx {
    fn view(&self) -> config::View<'_> {
        self.cfg.view(self.cmd.name())
    }

    fn write(&self, name: &str, body: &str) -> Res<()> {
        let p = self.out.join(name);
        std::fs::write(&p, body).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        println!("wrote {}", p.display());
        Ok(())
    }
}

fn slanted(ctx: &Ctx) -> Res<SlantedConfig> {
    let v = ctx.view();
    let p = v.i64_or("p", 1)?;
    let q = v.i64_or("q", 1)?;
    let g1 = v.set_or("gamma1", "prog 0.9 0")?;
    let g2 = v.set_or("gamma2", "prog 0.9 0")?;
    Ok(SlantedConfig::new(p, q, g1, g2)?)
}

fn point_source(ctx: &Ctx) -> Res<PointSource> {
    let v = ctx.view();
    match v.str_or("source", "line").as_str() {
        "line" => Ok(PointSource::Line(v.set_or("set", "prog 1 0")?)),
        "slanted" => Ok(PointSource::Slanted(slanted(ctx)?)),
        other => {
            let e = v.entry("source").unwrap();
            Err(ConfigError { line: e.line, column: e.column, message: format!("source must be line or slanted, got '{other}'") }.into())
        }
    }
}

fn family(ctx: &Ctx) -> Res<LineFamily> {
    let v = ctx.view();
    let text = v.str_or("slope", "rational 1 1");
    let toks: Vec<&str> = text.split_whitespace().collect();
    let bad = |m: &str| {
        let (line, column) = v.entry("slope").map(|e| (e.line, e.column)).unwrap_or((0, 0));
        CliError::Config(ConfigError { line, column, message: m.to_string() })
    };
    let dir = match toks.as_slice() {
        ["rational", p, q] => Direction::Rational { p: p.parse().map_err(|_| bad("p is not an integer"))?, q: q.parse().map_err(|_| bad("q is not an integer"))? },
        ["irrational", r] => {
            let ratio = if *r == "golden" { (1.0 + 5f64.sqrt()) / 2.0 } else { r.parse().map_err(|_| bad("ratio is not a number"))? };
            Direction::Irrational { ratio }
        }
        _ => return Err(bad("slope must be 'rational p q' or 'irrational value'")),
    };
    Ok(LineFamily::new(dir, v.set_or("offsets", "prog 4 0")?)?)
}

fn gabor_spec(ctx: &Ctx) -> Res<GaborLatticeSpec> {
    let v = ctx.view();
    Ok(GaborLatticeSpec::delta_abcd(
        v.i64_or("p", 1)?,
        v.i64_or("q", 1)?,
        v.f64_or("a_lat", 1.0)?,
        v.f64_or("b_lat", 1.0)?,
        v.f64_or("c", 0.9)?,
        v.f64_or("d", 0.9)?,
        v.f64_or("alpha", std::f64::consts::PI)?,
    )?)
}

fn run_density(ctx: &Ctx) -> Res<()> {
    let v = ctx.view();
    let set = v.set_or("set", "prog 1 0")?;
    let radii = v.f64_list_or("radii", &[10.0, 50.0, 200.0])?;
    let rep = set.beurling_density(&radii, v.opt_f64("step")?, v.opt_f64("span")?)?;
    let mut s = String::from("R,lower,upper,exact\n");
    for r in &rep.table {
        let _ = writeln!(s, "{},{},{},{}", r.r, csv_float(r.lower), csv_float(r.upper), rep.exact);
    }
    let _ = writeln!(s, "D,{},{},{}", csv_float(rep.lower), csv_float(rep.upper), rep.exact);
    ctx.write("density.csv", &s)?;
    println!("set {set}: D- = {}, D+ = {}, exact = {}", rep.lower, rep.upper, rep.exact);
    Ok(())
}

fn run_lattice(ctx: &Ctx) -> Res<()> {
    let cfg = slanted(ctx)?;
    let r = ctx.view().f64_or("radius", 5.0)?;
    let mut s = String::from("x,y,gamma1,gamma2\n");
    let pts = cfg.build(&Rect::square(r));
    for p in &pts {
        let g = cfg.invert(*p);
        let _ = writeln!(s, "{},{},{},{}", csv_float(p[0]), csv_float(p[1]), csv_float(g[0]), csv_float(g[1]));
    }
    ctx.write("lattice.csv", &s)?;
    println!("{} points, sigma = {}", pts.len(), cfg.sigma());
    Ok(())
}

fn run_frame_trend(ctx: &Ctx) -> Res<()> {
    let v = ctx.view();
    let src = point_source(ctx)?;
    let a = v.f64_or("a", std::f64::consts::PI)?;
    let ns = v.i64_list_or("n_list", &[10, 20, 40])?;
    let margin = v.i64_or("margin", 5)?;
    let t = bound_trend(&src, a, &ns, margin)?;
    ctx.write("trend.csv", &t.to_csv())?;
    let mut rep = String::new();
    for r in &t.rows {
        let e = &r.estimate;
        let _ = writeln!(rep, "N={} method={} resolved={} resolution={:e} rows={}", r.n, e.method, e.resolved, e.resolution, e.rows);
    }
    let _ = writeln!(rep, "max_consecutive_ratio={}", csv_float(t.max_consecutive_ratio()));
    let _ = writeln!(rep, "decay_factor={}", csv_float(t.decay_factor()));
    ctx.write("trend_report.txt", &rep)?;
    Ok(())
}

fn run_reconstruct(ctx: &Ctx) -> Res<()> {
    let v = ctx.view();
    let src = point_source(ctx)?;
    let a = v.f64_or("a", std::f64::consts::PI)?;
    let n = v.i64_or("n", 10)?;
    let margin = v.i64_or("margin", 5)?;
    let dim = src.dim();
    let window = IndexBox::centered(dim, n);
    let pts = src.points((n + margin) as f64);
    let m = SamplingMatrix::assemble(a, 1.0, dim, &pts, window)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let truth: Vec<f64> = (0..m.cols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut vals = vec![0.0; m.rows()];
    m.matvec(&truth, &mut vals);
    let rec = reconstruct(&m, &vals)?;
    let err = window.indices().iter().zip(&truth).map(|(i, t)| (rec.coeffs.get(*i).re - t).abs()).fold(0.0, f64::max);
    let rep = format!("seed={}\nrows={}\ncols={}\nresidual={:e}\nmax_coefficient_error={:e}\n", ctx.seed, m.rows(), m.cols(), rec.residual, err);
    ctx.write("reconstruct.txt", &rep)?;
    Ok(())
}

fn run_annihilator(ctx: &Ctx) -> Res<()> {
    let v = ctx.view();
    let kind = v.str_or("kind", "product");
    match kind.as_str() {
        "product" => {
            let set = v.set_or("set", "prog 2 0.3")?;
            let a = v.f64_or("a", 1.0)?;
            let opts = AnnihilatorOptions { scale: v.f64_or("scale", 1.0)?, eps: v.opt_f64("eps")?, window: None };
            let k = (v.i64_or("k_lo", -12)?, v.i64_or("k_hi", 12)?);
            let an = build_annihilator_1d(&set, a, k, opts)?;
            ctx.write("annihilator.txt", &an.report.to_text())?;
            ctx.write("coefficients.txt", &an.function.to_text())?;
            let mut s = String::from("k,b_re,b_im,log_radius,nodes,quad_error\n");
            for (i, k) in an.table.k_values().enumerate() {
                let b = an.table.b[i];
                let _ = writeln!(s, "{k},{},{},{},{},{}", csv_float(b.re), csv_float(b.im), an.table.log_radius[i], an.table.nodes[i], csv_float(an.table.quad_error[i]));
            }
            ctx.write("laurent.csv", &s)?;
            println!("residual_relative = {:e}", an.report.residual_relative());
        }
        "lift" => {
            let p = v.i64_or("p", 1)?;
            let q = v.i64_or("q", 2)?;
            let a = v.f64_or("a", 1.0)?;
            let draws = v.i64_or("draws", 20)?;
            let grid = v.i64_or("grid", 41)?.max(2);
            let r = v.f64_or("radius", 3.0)?;
            let sigma = ((p * p + q * q) as f64).sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let mut s = String::from("draw,max_discrepancy\n");
            let mut worst = 0.0f64;
            for d in 0..draws {
                let vals: Vec<f64> = (0..21).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let g = GaussSeriesFunction::new(a, sigma, CoeffGrid::from_real_1d(-10, &vals)?)?;
                let l = lift_to_2d(&g, p, q, a)?;
                let mut m = 0.0f64;
                for i in 0..grid {
                    for j in 0..grid {
                        let z = -r + 2.0 * r * i as f64 / (grid - 1) as f64;
                        let w = -r + 2.0 * r * j as f64 / (grid - 1) as f64;
                        m = m.max((l.series.at2(z, w) - l.closed.at(z, w)).norm());
                    }
                }
                worst = worst.max(m);
                let _ = writeln!(s, "{d},{}", csv_float(m));
            }
            let _ = writeln!(s, "max,{}", csv_float(worst));
            ctx.write("lift.csv", &s)?;
            println!("seed {} max discrepancy {worst:e}", ctx.seed);
        }
        "critical" => {
            let p = v.i64_or("p", 1)?;
            let q = v.i64_or("q", 1)?;
            let a = v.f64_or("a", std::f64::consts::PI)?;
            let r = v.f64_or("radius", 7.0)?;
            let g1 = v.set_or("gamma1", "prog 0.7 0")?;
            let count = v.i64_or("points", 200)?.max(1) as usize;
            let (f1, f2) = critical_counterexamples(p, q, a, r)?;
            let sigma = ((p * p + q * q) as f64).sqrt();
            let half = gaussamp::points::PointSet1D::progression(1.0, 0.5)?;
            let l2 = SlantedConfig::new(p, q, g1.clone(), half)?;
            let l1 = SlantedConfig::new(p, q, gaussamp::points::PointSet1D::progression(sigma * sigma, sigma * sigma / 2.0)?, g1)?;
            let w = Window::D2(Rect::square(r.min(4.0)));
            let mut s = String::new();
            for (name, f, cfg) in [("f1", &f1, &l1), ("f2", &f2, &l2)] {
                let sup = f.series.sup_norm_estimate(&w, 0.02)?;
                let pts = cfg.build(&Rect::square(r));
                let res = pts.iter().take(count).map(|x| f.series.at2(x[0], x[1]).norm()).fold(0.0, f64::max);
                let _ = writeln!(s, "{name}: sup={sup:e} points={} residual={res:e} relative={:e}", pts.len().min(count), res / sup);
            }
            ctx.write("critical.txt", &s)?;
        }
        other => {
            let e = v.entry("kind").unwrap();
            return Err(ConfigError { line: e.line, column: e.column, message: format!("kind must be product, lift or critical, got '{other}'") }.into());
        }
    }
    Ok(())
}

fn run_theta(ctx: &Ctx) -> Res<()> {
    let v = ctx.view();
    let a = v.f64_or("a", std::f64::consts::PI)?;
    let scale = v.f64_or("scale", 1.0)?;
    let r = v.f64_or("radius", 3.0)?;
    let kmax = v.i64_or("k_max", 5)?;
    let g = alternating_theta_on(a, scale, (kmax as f64 + 1.0).max(r))?;
    let sup = g.sup_norm_estimate(&Window::D1(Interval::symmetric(r)), 0.01)?;
    let mut s = String::from("x,value\n");
    let mut worst = 0.0f64;
    for k in -kmax..=kmax {
        let x = k as f64 + 0.5;
        let val = g.at(x).re;
        worst = worst.max(val.abs());
        let _ = writeln!(s, "{x},{}", csv_float(val));
    }
    let _ = writeln!(s, "sup,{}", csv_float(sup));
    ctx.write("theta.csv", &s)?;
    println!("max |g(k+1/2)| / sup = {:e}", worst / sup);
    Ok(())
}

fn run_trajectory_trend(ctx: &Ctx) -> Res<()> {
    let v = ctx.view();
    let fam = family(ctx)?;
    if let (Some(s), Ok(rep)) = (fam.sigma(), fam.offsets().beurling_density(&[200.0], None, None)) {
        if (rep.lower * s - 1.0).abs() < 1e-9 {
            println!("critical case D-(Gamma) = 1/sigma: undetermined, no verdict claimed");
        }
    }
    let t = st_bound_trend(&fam, v.f64_or("a", std::f64::consts::PI)?, &v.i64_list_or("windows", &[10, 20, 40])?, v.opt_f64("delta")?, v.i64_or("margin", 5)?)?;
    ctx.write("trajectory_trend.csv", &t.to_csv())?;
    Ok(())
}

fn run_trajectory_annihilate(ctx: &Ctx) -> Res<()> {
    let v = ctx.view();
    let fam = family(ctx)?;
    let r = v.f64_or("window", 5.0)?;
    let t = annihilator_on_trajectory(&fam, v.f64_or("a", 1.0)?, Rect::square(r))?;
    let mut s = t.base.report.to_text();
    let _ = writeln!(s, "sigma: {}", t.sigma);
    let _ = writeln!(s, "upper_density: {}", t.d_plus);
    let _ = writeln!(s, "plane_sup_norm: {:e}", t.sup);
    let _ = writeln!(s, "line_samples: {}", t.samples);
    let _ = writeln!(s, "line_residual_max: {:e}", t.residual_max);
    let _ = writeln!(s, "line_residual_relative: {:e}", t.residual_relative());
    ctx.write("trajectory_annihilator.txt", &s)?;
    Ok(())
}

fn run_gabor_sweep(ctx: &Ctx) -> Res<()> {
    let v = ctx.view();
    let spec = gabor_spec(ctx)?;
    let (cfg, shape) = spec.isotropic_reduction()?;
    let rep = translate_sweep(&cfg, shape, v.f64_or("step", 0.1)?, v.i64_or("n", 10)?, v.i64_or("margin", 5)?)?;
    ctx.write("gabor_sweep.csv", &rep.to_csv())?;
    ctx.write("generator.txt", &spec.generator_text())?;
    println!("{}", rep.verdict());
    Ok(())
}

fn run_gabor_trend(ctx: &Ctx) -> Res<()> {
    let v = ctx.view();
    let spec = gabor_spec(ctx)?;
    let t = frame_verdict_trend(&spec, &v.i64_list_or("n_list", &[10, 20])?, v.f64_or("step", 0.1)?, v.i64_or("margin", 5)?)?;
    ctx.write("gabor_trend.csv", &t.to_csv())?;
    ctx.write("generator.txt", &spec.generator_text())?;
    let lat = build_delta_lattice(&spec, 1.0)?;
    println!("volume {}; {}", lat.volume, t.rows.last().map(|r| r.sweep.verdict()).unwrap_or_default());
    Ok(())
}

fn dispatch(ctx: &Ctx) -> Res<()> {
    match ctx.cmd {
        Command::Density => run_density(ctx),
        Command::Lattice => run_lattice(ctx),
        Command::FrameTrend => run_frame_trend(ctx),
        Command::Reconstruct => run_reconstruct(ctx),
        Command::Annihilator => run_annihilator(ctx),
        Command::Theta => run_theta(ctx),
        Command::TrajectoryTrend => run_trajectory_trend(ctx),
        Command::TrajectoryAnnihilate => run_trajectory_annihilate(ctx),
        Command::GaborSweep => run_gabor_sweep(ctx),
        Command::GaborTrend => run_gabor_trend(ctx),
        Command::Experiments => {
            let text = manifest_text();
            print!("{text}");
            ctx.write("experiments.txt", &text)
        }
    }
}

fn setup(cli: &Cli) -> Res<Ctx> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    for kv in &cli.overrides {
        cfg.set(kv)?;
    }
    cfg.check_keys(cli.command.name(), cli.command.keys())?;
    for kv in &cli.overrides {
        let k = kv.split('=').next().unwrap_or("").trim();
        if !cli.command.keys().contains(&k) {
            return Err(ConfigError { line: 0, column: 0, message: format!("unknown key '{k}' for {}", cli.command.name()) }.into());
        }
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().map_err(|e| ConfigError { line: 0, column: 0, message: e.to_string() })?;
    }
    std::fs::create_dir_all(&cli.out).map_err(|e| ConfigError { line: 0, column: 0, message: format!("cannot create {}: {e}", cli.out.display()) })?;
    Ok(Ctx { cfg, out: cli.out.clone(), seed: cli.seed, cmd: cli.command })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.explain {
        println!("{}: {}", cli.command.name(), cli.command.explain());
        return ExitCode::SUCCESS;
    }
    let res = setup(&cli).and_then(|ctx| dispatch(&ctx));
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(CliError::Op(gaussamp::Error::Parse { line, column, message })) => {
            eprintln!("config error at line {line}, column {column}: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Op(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
