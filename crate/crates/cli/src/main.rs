use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use markov_surface::flows::{complex_from_json, complex_to_json, orbit, Automorphism, Axis, ShearFlow};
use markov_surface::liegen::{certify_monomial, close_span, normal_monomials, Certified, CloseOptions};
use markov_surface::markov::{enumerate_ordered, first_markov_numbers, lagrange_value, zagier_fit_window};
use markov_surface::poisson::bracket;
use markov_surface::singular::germ::{germ_pairings, model_fields, GermKind};
use markov_surface::singular::{classify_numeric, classify_surface, find_singular_points_numeric};
use markov_surface::surface::{on_surface, Pt};
use markov_surface::tame::{build_tame_automorphism, verify_solution_json, TameProblem};
use markov_surface::{BigComplex, Error, ParamsSpec, Poly, SurfaceParams};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "markov-surface", version, about = "Poisson brackets, flows, singularities and tame maps on Markov-type cubic surfaces")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Working precision in bits (at least 53); defaults to $MARKOV_SURFACE_PRECISION.
    #[arg(long, global = true)]
    precision: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `markov` or an inline parameter object such as '{"A":"4","D":"-4","E":"1"}'.
    #[arg(long, global = true)]
    surface: Option<String>,
    /// Parameter JSON file.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// TOML file with keys precision, seed, tol, threads, output and a [surface] table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Acceptance tolerance for residual checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Singular points and their ADE types.
    Classify {
        /// Half-width of the search box for numeric parameters.
        #[arg(long, default_value_t = 40.0)]
        search_box: f64,
    },
    /// Image of a point under an axis flow or an automorphism file; optional orbit CSV.
    Flow {
        /// JSON array of three coordinates, e.g. '["1","1","1"]' or '[[re,im],…]'.
        #[arg(long)]
        point: String,
        /// Automorphism JSON (array of shears), inline or as a file path.
        #[arg(long, conflicts_with = "axis")]
        automorphism: Option<String>,
        #[arg(long)]
        axis: Option<String>,
        /// Flow time, real or `[re, im]`.
        #[arg(long, default_value = "1")]
        time: String,
        /// Emit CSV of this many orbit samples (axis flows only).
        #[arg(long, requires = "axis")]
        orbit: Option<usize>,
    },
    /// Normal form of `{f, g}`.
    Bracket { f: String, g: String },
    /// Closure certificate bundle for the normal-form monomials up to `max_deg`.
    Certify {
        #[arg(long, default_value_t = 6)]
        max_gen_deg: u32,
        #[arg(long, default_value_t = 6)]
        max_deg: u32,
        #[arg(long)]
        full_pairing: bool,
        /// Certify only this monomial, e.g. "x^2*y*z".
        #[arg(long)]
        monomial: Option<String>,
    },
    #[command(subcommand)]
    Markov(MarkovCmd),
    #[command(subcommand)]
    Tame(TameCmd),
    /// Model fields and numeric pairing checks for an A_k or D_k germ.
    Germ {
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 3)]
        points: usize,
    },
    /// Quick invariant checks over every module.
    Selftest,
}

#[derive(Subcommand, Debug)]
enum MarkovCmd {
    /// Ordered triples with maximum at most `bound`, one JSON array per line.
    Enumerate {
        #[arg(long)]
        bound: BigInt,
    },
    /// Growth fit of the first `count` Markov numbers.
    Fit {
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Window `lo:hi`, 1-based; defaults to the whole range.
        #[arg(long)]
        window: Option<String>,
    },
    /// `sqrt(9 z^2 - 4) / z` for a Markov number `z`.
    Lagrange {
        #[arg(long)]
        z: BigInt,
    },
}

#[derive(Subcommand, Debug)]
enum TameCmd {
    /// Build F with F(p_j) = p_eta(j) on the first `n` ordered triples.
    Build {
        #[arg(long)]
        n: usize,
        /// 1-based pairs "source:target", comma separated; unlisted sources are fixed.
        #[arg(long, default_value = "")]
        map: String,
    },
    /// Replay a solution file.
    Verify { file: PathBuf },
}

/// Effective settings after merging flags, config file and defaults.
struct RunConfig {
    precision: Option<usize>,
    seed: u64,
    surface: Option<Value>,
    tol: Option<f64>,
    threads: Option<usize>,
    output: Option<PathBuf>,
}

struct Failure {
    err: Error,
    input: String,
}

type Outcome = std::result::Result<Output, Failure>;

enum Output {
    Json(Value),
    Lines(Vec<Value>),
    Text(String),
}

fn fail(err: Error, input: impl Into<String>) -> Failure {
    Failure { err, input: input.into() }
}

fn parse_json(s: &str, what: &str) -> std::result::Result<Value, Failure> {
    let text = if !s.trim_start().starts_with(['{', '[', '"']) && std::path::Path::new(s).exists() {
        std::fs::read_to_string(s).map_err(|e| fail(Error::Parse(format!("{what}: {e}")), s))?
    } else {
        s.to_string()
    };
    serde_json::from_str(&text).map_err(|e| fail(Error::Parse(format!("{what}: {e}")), s))
}

impl RunConfig {
    fn load(a: &RunArgs) -> std::result::Result<Self, Failure> {
        let mut cfg = RunConfig { precision: None, seed: 0, surface: None, tol: None, threads: None, output: None };
        if let Some(path) = &a.config {
            let input = path.display().to_string();
            let text = std::fs::read_to_string(path).map_err(|e| fail(Error::Parse(e.to_string()), &input))?;
            let t: toml::Table = text.parse().map_err(|e: toml::de::Error| fail(Error::Parse(e.to_string()), &input))?;
            let v: Value = serde_json::to_value(&t).map_err(|e| fail(Error::Parse(e.to_string()), &input))?;
            cfg.precision = v.get("precision").and_then(|p| p.as_u64()).map(|p| p as usize);
            cfg.seed = v.get("seed").and_then(|p| p.as_u64()).unwrap_or(0);
            cfg.tol = v.get("tol").and_then(|p| p.as_f64());
            cfg.threads = v.get("threads").and_then(|p| p.as_u64()).map(|p| p as usize);
            cfg.output = v.get("output").and_then(|p| p.as_str()).map(PathBuf::from);
            cfg.surface = match v.get("surface") {
                Some(Value::String(s)) => Some(Value::String(s.clone())),
                Some(obj @ Value::Object(_)) => Some(obj.clone()),
                _ => None,
            };
        }
        if a.precision.is_some() {
            cfg.precision = a.precision;
        } else if cfg.precision.is_none() {
            if let Ok(v) = std::env::var("MARKOV_SURFACE_PRECISION") {
                let p = v.trim().parse().map_err(|_| fail(Error::Parse("MARKOV_SURFACE_PRECISION must be an integer".into()), &v))?;
                cfg.precision = Some(p);
            }
        }
        if let Some(s) = a.seed {
            cfg.seed = s;
        }
        if let Some(p) = &a.params {
            cfg.surface = Some(parse_json(&p.display().to_string(), "params")?);
        }
        if let Some(s) = &a.surface {
            cfg.surface = Some(if s == "markov" { Value::String(s.clone()) } else { parse_json(s, "surface")? });
        }
        cfg.tol = a.tol.or(cfg.tol);
        cfg.threads = a.threads.or(cfg.threads);
        cfg.output = a.output.clone().or(cfg.output.take());
        if let Some(p) = cfg.precision {
            if p < 53 {
                return Err(fail(Error::InvalidParams("precision must be at least 53 bits".into()), p.to_string()));
            }
        }
        Ok(cfg)
    }

    fn prec(&self, default: usize) -> usize {
        self.precision.unwrap_or(default)
    }

    fn params(&self, prec: usize) -> std::result::Result<ParamsSpec, Failure> {
        match &self.surface {
            None => Ok(ParamsSpec::Exact(SurfaceParams::markov())),
            Some(Value::String(s)) if s == "markov" => Ok(ParamsSpec::Exact(SurfaceParams::markov())),
            Some(Value::String(s)) => Err(fail(Error::InvalidParams(format!("unknown surface {s:?}")), s)),
            Some(v) => ParamsSpec::from_json(v, prec).map_err(|e| fail(e, v.to_string())),
        }
    }

    fn exact_params(&self) -> std::result::Result<SurfaceParams, Failure> {
        match self.params(64)? {
            ParamsSpec::Exact(sp) => Ok(sp),
            ParamsSpec::Numeric(_) => {
                Err(fail(Error::InvalidParams("this command needs rational parameters".into()), format!("{:?}", self.surface)))
            }
        }
    }
}

fn parse_point(s: &str, prec: usize) -> std::result::Result<Pt, Failure> {
    let v = parse_json(s, "point")?;
    let arr = v.as_array().filter(|a| a.len() == 3).ok_or_else(|| fail(Error::Parse("point must have three coordinates".into()), s))?;
    let c = |i: usize| complex_from_json(&arr[i], prec).map_err(|e| fail(e, s));
    Ok([c(0)?, c(1)?, c(2)?])
}

fn point_json(p: &Pt) -> Value {
    Value::Array(p.iter().map(complex_to_json).collect())
}

fn cmd_classify(cfg: &RunConfig, search_box: f64) -> Outcome {
    let prec = cfg.prec(256);
    let reports = match cfg.params(prec)? {
        ParamsSpec::Exact(sp) => classify_surface(&sp, search_box, prec).map_err(|e| fail(e, sp.to_json().to_string()))?.0,
        ParamsSpec::Numeric(np) => find_singular_points_numeric(&np, search_box, prec, cfg.seed)
            .iter()
            .map(|p| classify_numeric(&np, p, prec))
            .collect::<markov_surface::Result<Vec<_>>>()
            .map_err(|e| fail(e, np.to_json().to_string()))?,
    };
    Ok(Output::Json(Value::Array(reports.iter().map(|r| r.to_json()).collect())))
}

fn cmd_flow(cfg: &RunConfig, point: &str, automorphism: Option<&str>, axis: Option<&str>, time: &str, orbit_steps: Option<usize>) -> Outcome {
    let prec = cfg.prec(256);
    let np = cfg.params(prec)?.numeric(prec);
    let p = parse_point(point, prec)?;
    let tol = cfg.tol.unwrap_or(1e-20);
    let (ok, res) = on_surface(&np, &p, tol);
    if !ok {
        return Err(fail(Error::InvalidParams(format!("point is off the surface: |P| = {}", res.to_sci(6))), point));
    }
    let t = complex_from_json(&parse_json(time, "time").unwrap_or(Value::String(time.into())), prec).map_err(|e| fail(e, time))?;
    if let Some(steps) = orbit_steps {
        let ax = Axis::parse(axis.unwrap_or("z")).map_err(|e| fail(e, axis.unwrap_or_default()))?;
        let dt = &t / &BigComplex::from_i64(steps.max(1) as i64, prec);
        let samples = orbit(&np, ax, &p, &dt, steps).map_err(|e| fail(e, point))?;
        let mut csv = String::from("k,x_re,x_im,y_re,y_im,z_re,z_im\n");
        for (k, s) in samples.iter().enumerate() {
            let cols: Vec<String> = s.iter().flat_map(|c| [c.re.to_sci(17), c.im.to_sci(17)]).collect();
            csv.push_str(&format!("{k},{}\n", cols.join(",")));
        }
        return Ok(Output::Text(csv));
    }
    let auto = match (automorphism, axis) {
        (Some(a), _) => Automorphism::from_json(&parse_json(a, "automorphism")?, prec).map_err(|e| fail(e, a))?,
        (None, Some(ax)) => Automorphism::new(vec![ShearFlow::axis_flow(Axis::parse(ax).map_err(|e| fail(e, ax))?, t)]),
        (None, None) => return Err(fail(Error::InvalidParams("give --axis or --automorphism".into()), point)),
    };
    let img = auto.apply(&np, &p).map_err(|e| fail(e, point))?;
    Ok(Output::Json(json!({"point": point_json(&p), "image": point_json(&img.coords())})))
}

fn cmd_bracket(cfg: &RunConfig, f: &str, g: &str) -> Outcome {
    let sp = cfg.exact_params()?;
    let pf = Poly::parse(f).map_err(|e| fail(e, f))?;
    let pg = Poly::parse(g).map_err(|e| fail(e, g))?;
    Ok(Output::Json(Value::String(bracket(&pf, &pg, &sp).to_string())))
}

fn cmd_certify(cfg: &RunConfig, max_gen_deg: u32, max_deg: u32, full_pairing: bool, monomial: Option<&str>) -> Outcome {
    let sp = cfg.exact_params()?;
    let input = format!("max_gen_deg={max_gen_deg} max_deg={max_deg}");
    let basis = close_span(&sp, max_gen_deg, max_deg, &CloseOptions { full_pairing, shuffle_seed: None }).map_err(|e| fail(e, &input))?;
    let targets = match monomial {
        Some(m) => {
            let p = Poly::parse(m).map_err(|e| fail(e, m))?;
            match p.leading() {
                Some((mono, _)) if p.len() == 1 => vec![*mono],
                _ => return Err(fail(Error::Parse("expected a single monomial".into()), m)),
            }
        }
        None => normal_monomials(max_deg),
    };
    let mut certs = Vec::new();
    let mut missing = Vec::new();
    for m in targets {
        let name = Poly::mono(m.0[0], m.0[1], m.0[2]).to_string();
        match certify_monomial(&basis, m).map_err(|e| fail(e, &name))? {
            Certified::Certificate(c) => certs.push(c.to_json()),
            Certified::NotInSpan => missing.push(name),
        }
    }
    Ok(Output::Json(json!({
        "params": sp.to_json(),
        "max_gen_deg": max_gen_deg,
        "max_deg": max_deg,
        "full_pairing": full_pairing,
        "rank": basis.rank(),
        "dimension": normal_monomials(max_deg).len(),
        "certificates": certs,
        "not_in_span": missing,
    })))
}

fn cmd_markov(cfg: &RunConfig, cmd: &MarkovCmd) -> Outcome {
    match cmd {
        MarkovCmd::Enumerate { bound } => Ok(Output::Lines(enumerate_ordered(bound).iter().map(|t| t.to_json()).collect())),
        MarkovCmd::Fit { count, window } => {
            let (lo, hi) = match window {
                Some(w) => {
                    let bad = || fail(Error::Parse("window must be lo:hi".into()), w);
                    let (a, b) = w.split_once(':').ok_or_else(bad)?;
                    (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
                }
                None => (1, *count),
            };
            let m = first_markov_numbers((*count).max(hi));
            let fit = zagier_fit_window(&m, lo, hi).map_err(|e| fail(e, format!("{lo}:{hi}")))?;
            Ok(Output::Json(fit.to_json()))
        }
        MarkovCmd::Lagrange { z } => {
            let prec = cfg.prec(256);
            let l = lagrange_value(z, prec).map_err(|e| fail(e, z.to_string()))?;
            Ok(Output::Json(json!({"z": z.to_string(), "lagrange": l.to_dec_string()})))
        }
    }
}

fn cmd_tame(cfg: &RunConfig, cmd: &TameCmd) -> Outcome {
    match cmd {
        TameCmd::Build { n, map } => {
            let pairs = TameProblem::parse_map(map).map_err(|e| fail(e, map))?;
            let mut pb = TameProblem::first_n(*n, &pairs, cfg.prec(512), cfg.seed).map_err(|e| fail(e, map))?;
            if let Some(t) = cfg.tol {
                pb.tolerance = t;
            }
            let sol = build_tame_automorphism(&pb).map_err(|e| fail(e, format!("n={n} map={map}")))?;
            Ok(Output::Json(sol.to_json()))
        }
        TameCmd::Verify { file } => {
            let input = file.display().to_string();
            let v = parse_json(&input, "solution")?;
            let res = verify_solution_json(&v).map_err(|e| fail(e, &input))?;
            let max = res.iter().cloned().fold(0.0, f64::max);
            let tol = cfg.tol.unwrap_or(1e-15);
            if !(max < tol) {
                let table = res.iter().map(|r| format!("{r:e}")).collect();
                return Err(fail(Error::VerificationFailure { max_residual: format!("{max:e}"), table }, input));
            }
            Ok(Output::Json(json!({
                "residuals": res.iter().map(|r| format!("{r:e}")).collect::<Vec<_>>(),
                "max_residual": format!("{max:e}"),
                "verified": true,
            })))
        }
    }
}

fn cmd_germ(cfg: &RunConfig, kind: &str, points: usize) -> Outcome {
    let k = GermKind::parse(kind).map_err(|e| fail(e, kind))?;
    let germ = model_fields(k).map_err(|e| fail(e, kind))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let rep = germ_pairings(k, &mut rng, points, cfg.prec(256)).map_err(|e| fail(e, kind))?;
    Ok(Output::Json(json!({"germ": germ.to_json(), "pairings": rep.to_json(), "pass": rep.all_pass()})))
}

fn cmd_selftest(cfg: &RunConfig) -> Outcome {
    let mut checks: Vec<(String, bool)> = Vec::new();
    let sp = SurfaceParams::markov();
    let xy = bracket(&Poly::x(), &Poly::y(), &sp).to_string();
    checks.push(("bracket {x,y} = 2z - 3xy".into(), xy == Poly::parse("2*z-3*x*y").map(|p| p.to_string()).unwrap_or_default()));
    let casimir = markov_surface::poisson::casimir_check(&Poly::parse("x^3*y - z^2 + 2*x").unwrap(), &sp).is_zero();
    checks.push(("{P, f} = 0".into(), casimir));
    let basis = close_span(&sp, 3, 3, &CloseOptions::default());
    checks.push(("closure rank at degree 3".into(), basis.map(|b| b.rank() == normal_monomials(3).len()).unwrap_or(false)));
    let prec = cfg.prec(128);
    let np = sp.to_numeric(prec);
    let p: Pt = [1, 1, 1].map(|c| BigComplex::from_i64(c, prec));
    let auto = Automorphism::new(vec![
        ShearFlow::exact(Axis::Z, Poly::parse("1/3 + z/10").unwrap()).unwrap(),
        ShearFlow::axis_flow(Axis::X, BigComplex::from_f64(0.25, prec)),
    ]);
    let back = auto.inverse().apply_raw(&np, &auto.apply_raw(&np, &p));
    checks.push(("shear composition inverts".into(), (0..3).all(|k| (&back[k] - &p[k]).abs_f64() < 1e-25)));
    let sing = classify_surface(&SurfaceParams::from_ints(4, 0, 0, -4, 1).unwrap(), 40.0, prec);
    checks.push(("A3 at (2,0,0)".into(), sing.map(|(r, _)| r.len() == 1 && r[0].ade_type.to_string() == "A3").unwrap_or(false)));
    let triples = enumerate_ordered(&BigInt::from(30));
    checks.push(("five triples up to 30".into(), triples.len() == 5 && triples.iter().all(|t| t.is_solution())));
    let tame = TameProblem::first_n(2, &[(1, 2), (2, 1)], prec.max(256), cfg.seed).and_then(|pb| build_tame_automorphism(&pb));
    checks.push(("tame swap of two triples".into(), tame.map(|s| s.max_residual() < 1e-15).unwrap_or(false)));
    let all = checks.iter().all(|c| c.1);
    let v = json!({
        "checks": checks.iter().map(|(l, ok)| json!({"check": l, "pass": ok})).collect::<Vec<_>>(),
        "pass": all,
    });
    if !all {
        let failed: Vec<String> = checks.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect();
        return Err(fail(Error::IdentityMismatch { label: "selftest".into(), diff: failed.join("; ") }, "selftest"));
    }
    Ok(Output::Json(v))
}

fn run(cli: &Cli, cfg: &RunConfig) -> Outcome {
    match &cli.cmd {
        Cmd::Classify { search_box } => cmd_classify(cfg, *search_box),
        Cmd::Flow { point, automorphism, axis, time, orbit } => cmd_flow(cfg, point, automorphism.as_deref(), axis.as_deref(), time, *orbit),
        Cmd::Bracket { f, g } => cmd_bracket(cfg, f, g),
        Cmd::Certify { max_gen_deg, max_deg, full_pairing, monomial } => cmd_certify(cfg, *max_gen_deg, *max_deg, *full_pairing, monomial.as_deref()),
        Cmd::Markov(m) => cmd_markov(cfg, m),
        Cmd::Tame(t) => cmd_tame(cfg, t),
        Cmd::Germ { kind, points } => cmd_germ(cfg, kind, *points),
        Cmd::Selftest => cmd_selftest(cfg),
    }
}

fn emit(out: &Output, path: Option<&PathBuf>) -> std::io::Result<()> {
    let text = match out {
        Output::Json(v) => format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")),
        Output::Lines(vs) => vs.iter().map(|v| format!("{v}\n")).collect(),
        Output::Text(s) => s.clone(),
    };
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::load(&cli.run).and_then(|cfg| {
        if let Some(n) = cfg.threads {
            // only fails if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        let out = run(&cli, &cfg)?;
        emit(&out, cfg.output.as_ref()).map_err(|e| fail(Error::Parse(format!("cannot write output: {e}")), format!("{:?}", cfg.output)))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let v = json!({"error": {"code": f.err.code(), "message": f.err.to_string(), "input": f.input}});
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            ExitCode::from(1)
        }
    }
}
