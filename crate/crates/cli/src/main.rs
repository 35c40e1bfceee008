//! `gdms`: batch analyses of graph directed Markov systems read from spec files.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gdms::{
    bowen_dimension, classify_hausdorff_measure, finiteness_parameters, matrix_properties, parse_spec, pressure,
    pressure_curve, sample_points, scc_decompose, truncation_sweep, BowenOptions, ClassifyOptions, GdmsError,
    GdmsSystem, HMeasureVerdict, PressureValue, Witness, WitnessSide, GENERATOR,
};

use report::{digest, real, rounded, Csv, Report};

#[derive(Parser)]
#[command(
    name = "gdms",
    version,
    about = "Pressure, dimension and measure analyses of graph directed Markov systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Strongly connected components of the incidence matrix.
    Scc { file: PathBuf },
    /// Irreducibility, primitivity and finite irreducibility.
    Props { file: PathBuf },
    /// Pressure bracket at one parameter value.
    Pressure {
        file: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Pressure brackets on an evenly spaced grid, written as CSV.
    Curve {
        file: PathBuf,
        #[arg(long)]
        tmin: f64,
        #[arg(long)]
        tmax: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hausdorff dimension of the limit set.
    Dim {
        file: PathBuf,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Finite versus infinite Hausdorff measure in the critical dimension.
    Classify {
        file: PathBuf,
        #[arg(long)]
        nmin: Option<usize>,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finiteness parameters theta and theta_n.
    Theta {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        n: Vec<usize>,
    },
    /// Dimensions of the truncated continued-fraction subsystems.
    Sweep {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random limit-set points, written as CSV.
    Sample {
        file: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Box-counting slope of a point CSV produced by `sample`.
    Boxdim {
        csv: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<f64>,
        /// Grid origin.
        #[arg(long, default_value_t = 0.0)]
        anchor: f64,
        /// Distance bound between each listed point and the limit set.
        #[arg(long, default_value_t = 0.0)]
        error_bound: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of one run, mapped onto the process exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Analysis(GdmsError),
}

impl From<GdmsError> for Failure {
    fn from(e: GdmsError) -> Self {
        Failure::Analysis(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Analysis(e) => match e {
                GdmsError::Syntax { .. }
                | GdmsError::Validation { .. }
                | GdmsError::Input(_)
                | GdmsError::Domain(_) => 2,
                GdmsError::NotApplicable(_) | GdmsError::Unsupported(_) | GdmsError::Divergent(_) => 3,
                GdmsError::ResourceLimit { .. } => 4,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Analysis(e) => e.to_string(),
        }
    }
}

type Outcome = Result<(Report, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok((report, code)) => {
            print!("{}", report.render());
            ExitCode::from(code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

struct Loaded {
    system: GdmsSystem,
    report: Report,
}

fn load(command: &str, file: &Path) -> Result<Loaded, Failure> {
    let bytes = fs::read(file).map_err(|e| Failure::Usage(format!("{}: {e}", file.display())))?;
    let text =
        String::from_utf8(bytes.clone()).map_err(|_| Failure::Usage(format!("{}: not UTF-8", file.display())))?;
    let parsed = parse_spec(&text)?;
    let mut report = Report::new(command);
    report
        .field("spec", file.display())
        .field("spec_sha256", digest(&bytes))
        .field("system", parsed.system.name())
        .field("edges", describe_edges(&parsed.system));
    report.warn_all(parsed.warnings);
    Ok(Loaded {
        system: parsed.system,
        report,
    })
}

fn describe_edges(system: &GdmsSystem) -> String {
    match system.alphabet() {
        gdms::Alphabet::Finite => system.num_edges().to_string(),
        gdms::Alphabet::Infinite => "infinite".into(),
    }
}

fn write_csv(csv: &Csv, path: &Path, report: &mut Report) -> Result<(), Failure> {
    csv.write(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    report.field("csv", path.display());
    Ok(())
}

fn edge_list(system: &GdmsSystem, edges: &[usize]) -> String {
    let ids: Vec<&str> = edges.iter().map(|&e| system.graph().edges()[e].id.as_str()).collect();
    format!("{{{}}}", ids.join(","))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Scc { file } => scc(&file),
        Command::Props { file } => props(&file),
        Command::Pressure { file, t, nmax } => pressure_at(&file, t, nmax),
        Command::Curve {
            file,
            tmin,
            tmax,
            steps,
            nmax,
            out,
        } => curve(&file, tmin, tmax, steps, nmax, &out),
        Command::Dim { file, tol, nmax } => dim(&file, tol, nmax),
        Command::Classify {
            file,
            nmin,
            nmax,
            tol,
            out,
        } => classify(&file, nmin, nmax, tol, out.as_deref()),
        Command::Theta { file, n } => theta(&file, &n),
        Command::Sweep {
            file,
            sizes,
            tol,
            nmax,
            out,
        } => sweep(&file, &sizes, tol, nmax, out.as_deref()),
        Command::Sample {
            file,
            count,
            depth,
            seed,
            out,
        } => sample(&file, count, depth, seed, &out),
        Command::Boxdim {
            csv,
            scales,
            anchor,
            error_bound,
            out,
        } => boxdim(&csv, &scales, anchor, error_bound, out.as_deref()),
    }
}

fn scc(file: &Path) -> Outcome {
    let Loaded { system, mut report } = load("scc", file)?;
    let scc = scc_decompose(&system)?;
    report.field("components", scc.components.len());
    for (i, c) in scc.components.iter().enumerate() {
        report.field(&format!("component.{i}"), edge_list(&system, c));
    }
    report.field("isolated", edge_list(&system, &scc.isolated));
    let pairs = |v: &[(usize, usize)]| v.iter().map(|(i, j)| format!("{i}->{j}")).collect::<Vec<_>>().join(" ");
    report.field("condensation", pairs(&scc.condensation));
    report.field("communication", pairs(&scc.communication));
    Ok((report, 0))
}

fn props(file: &Path) -> Outcome {
    let Loaded { system, mut report } = load("props", file)?;
    let p = matrix_properties(&system)?;
    for (key, v) in [
        ("irreducible", &p.irreducible),
        ("primitive", &p.primitive),
        ("finitely_irreducible", &p.finitely_irreducible),
    ] {
        report.field(key, v.value);
        report.field(&format!("{key}.why"), &v.justification);
    }
    if let Some(period) = p.period {
        report.field("period", period);
    }
    if let Some(e) = p.primitivity_exponent {
        report.field("primitivity_exponent", e);
    }
    match &p.witness {
        Witness::Words(words) => {
            let longest = words.iter().map(|w| w.word.len()).max().unwrap_or(0);
            report
                .field("witness_words", words.len())
                .field("witness_longest", longest);
        }
        Witness::Absent(why) => {
            report.field("witness", format!("absent ({why})"));
        }
    }
    Ok((report, 0))
}

fn put_pressure(report: &mut Report, prefix: &str, est: &gdms::PressureEstimate) {
    match est.value {
        PressureValue::Bracket { lower, upper } => {
            report
                .real(&format!("{prefix}P_lower"), lower)
                .real(&format!("{prefix}P_upper"), upper)
                .real(&format!("{prefix}P_width"), upper - lower);
        }
        PressureValue::Infinite => {
            report.field(&format!("{prefix}P"), "inf");
        }
    }
}

fn pressure_at(file: &Path, t: f64, nmax: Option<usize>) -> Outcome {
    let Loaded { system, mut report } = load("pressure", file)?;
    report.real("param.t", t);
    let est = pressure(&system, t, nmax)?;
    put_pressure(&mut report, "", &est);
    report
        .field("method", est.method)
        .field("n_used", est.n_used)
        .theorem("P(t) = lim (1/n) ln Z_n(t), bracketed by subadditivity and bounded distortion");
    Ok((report, 0))
}

fn curve(file: &Path, tmin: f64, tmax: f64, steps: usize, nmax: Option<usize>, out: &Path) -> Outcome {
    let Loaded { system, mut report } = load("curve", file)?;
    if steps < 2 || !(tmin < tmax) {
        return Err(Failure::Usage("curve needs tmin < tmax and at least 2 steps".into()));
    }
    let ts: Vec<f64> = (0..steps)
        .map(|i| tmin + (tmax - tmin) * i as f64 / (steps - 1) as f64)
        .collect();
    let values = pressure_curve(&system, &ts, nmax)?;
    let mut csv = Csv::new(&["t", "P_lower", "P_upper", "n_used"]);
    for v in &values {
        let (lo, hi) = v.bounds();
        csv.row(&[real(v.t), real(lo), real(hi), v.n_used.to_string()]);
    }
    report
        .real("param.tmin", tmin)
        .real("param.tmax", tmax)
        .field("param.steps", steps)
        .field("method", values[0].method)
        .real(
            "max_width",
            values.iter().map(|v| v.bounds().1 - v.bounds().0).fold(0.0, f64::max),
        );
    write_csv(&csv, out, &mut report)?;
    Ok((report, 0))
}

fn bowen_options(tol: Option<f64>, nmax: Option<usize>) -> Result<BowenOptions, Failure> {
    let mut options = BowenOptions::default();
    if let Some(tol) = tol {
        if !(tol > 0.0) {
            return Err(Failure::Usage("--tol must be positive".into()));
        }
        options.tolerance = tol;
    }
    options.n_max = nmax;
    Ok(options)
}

fn dim(file: &Path, tol: Option<f64>, nmax: Option<usize>) -> Outcome {
    let Loaded { system, mut report } = load("dim", file)?;
    let options = bowen_options(tol, nmax)?;
    let est = bowen_dimension(&system, &options)?;
    report
        .real("param.tol", options.tolerance)
        .field("h_lo", rounded(est.lo, 10, false))
        .field("h_hi", rounded(est.hi, 10, true))
        .real("h_lo_exact", est.lo)
        .real("h_hi_exact", est.hi)
        .real("width", est.width())
        .field("method", est.method)
        .field("iterations", est.iterations)
        .field("resolved", est.resolved)
        .field("n_used", est.n_used);
    if let Some(c) = est.cross_check {
        report.real("cross_check", c);
    }
    report.theorem("Bowen formula: HD(J) = inf{t >= 0 : P(t) <= 0}");
    if !est.resolved {
        report.warn("pressure brackets too wide to reach the requested tolerance; raise --nmax");
    }
    Ok((report, 0))
}

fn classify(file: &Path, nmin: Option<usize>, nmax: Option<usize>, tol: Option<f64>, out: Option<&Path>) -> Outcome {
    let Loaded { system, mut report } = load("classify", file)?;
    let mut options = ClassifyOptions::default();
    options.n_min = nmin.unwrap_or(options.n_min);
    options.n_max = nmax.unwrap_or(options.n_max);
    options.tolerance = tol.unwrap_or(options.tolerance);
    let c = classify_hausdorff_measure(&system, &options)?;
    report
        .field("param.nmin", options.n_min)
        .field("param.nmax", options.n_max)
        .real("param.tol", options.tolerance)
        .field("verdict", c.verdict)
        .real("h_lo", c.dimension.lo)
        .real("h_hi", c.dimension.hi)
        .field("h_method", c.dimension.method);
    for (i, comp) in c.components.iter().enumerate() {
        report.field(
            &format!("component.{i}"),
            format!(
                "{} h_lo={} h_hi={}",
                edge_list(&system, &comp.edges),
                real(comp.estimate.lo),
                real(comp.estimate.hi)
            ),
        );
    }
    let maximal: Vec<String> = c.maximal.iter().map(|i| i.to_string()).collect();
    let pairs: Vec<String> = c.communicating_pairs.iter().map(|(i, j)| format!("{i}->{j}")).collect();
    report
        .field("maximal", maximal.join(","))
        .field("communicating_pairs", pairs.join(" "))
        .real("slope", c.slope)
        .real("residual", c.residual);
    let code = match c.verdict {
        HMeasureVerdict::InfiniteHMeasure => {
            report.theorem("communicating maximal components => infinite h-measure (Z_n(h) grows linearly)");
            0
        }
        HMeasureVerdict::FiniteHMeasure => {
            report
                .theorem("pairwise non-communicating maximal components => finite positive h-measure (Z_n(h) bounded)");
            0
        }
        HMeasureVerdict::NotApplicable => {
            report.warn("limit set is empty; no critical measure to classify");
            3
        }
    };
    if let Some(path) = out {
        let mut csv = Csv::new(&["n", "Z_n"]);
        for &(n, z) in &c.evidence {
            csv.row(&[n.to_string(), real(z)]);
        }
        write_csv(&csv, path, &mut report)?;
    }
    Ok((report, code))
}

fn theta(file: &Path, ns: &[usize]) -> Outcome {
    let Loaded { system, mut report } = load("theta", file)?;
    let f = finiteness_parameters(&system, ns)?;
    report.field("theta", f.theta).real("theta_value", f.theta.to_f64());
    for (n, th) in &f.per_n {
        report.field(&format!("theta_n.{n}"), th);
    }
    report
        .field(
            "method",
            match system.alphabet() {
                gdms::Alphabet::Finite => "finite-alphabet",
                gdms::Alphabet::Infinite => "rule-analytic",
            },
        )
        .field("justification", &f.justification)
        .theorem("theta = inf{t : Z_1(t) < inf}, theta_n = inf{t : Z_n(t) < inf}");
    for w in &f.witnesses {
        let side = match w.side {
            WitnessSide::Convergent => "convergent",
            WitnessSide::Divergent => "divergent",
        };
        report.field(
            "witness",
            format!(
                "n={} t={} side={side} labels={} partial_sum={} bound={} holds={}",
                w.n,
                real(w.t),
                w.labels,
                real(w.partial_sum),
                real(w.bound),
                w.holds
            ),
        );
        if !w.holds {
            report.warn(format!("theta witness failed at n={} t={}", w.n, w.t));
        }
    }
    Ok((report, 0))
}

fn sweep(file: &Path, sizes: &[u64], tol: Option<f64>, nmax: Option<usize>, out: Option<&Path>) -> Outcome {
    let Loaded { system, mut report } = load("sweep", file)?;
    let options = bowen_options(tol, nmax)?;
    let s = truncation_sweep(&system, sizes, &options)?;
    let mut csv = Csv::new(&["size", "h_lo", "h_hi"]);
    for e in &s.entries {
        report.field(
            &format!("size.{}", e.size),
            format!(
                "h_lo={} h_hi={} method={} irreducible={}",
                real(e.estimate.lo),
                real(e.estimate.hi),
                e.estimate.method,
                e.irreducible
            ),
        );
        csv.row(&[e.size.to_string(), real(e.estimate.lo), real(e.estimate.hi)]);
    }
    report
        .field("monotone", s.monotone)
        .real("sup_lo", s.sup.0)
        .real("sup_hi", s.sup.1)
        .field("theta", s.theta)
        .field("vertex_hypothesis", s.vertex_hypothesis)
        .theorem("finitely irreducible systems: HD(J) = sup HD(J_F) over finite subsystems F");
    report.warn_all(s.warnings);
    if let Some(path) = out {
        write_csv(&csv, path, &mut report)?;
    }
    Ok((report, 0))
}

fn sample(file: &Path, count: usize, depth: usize, seed: u64, out: &Path) -> Outcome {
    let Loaded { system, mut report } = load("sample", file)?;
    let s = sample_points(&system, count, depth, seed)?;
    let mut csv = Csv::new(&["point"]);
    for p in &s.points {
        csv.row(&[real(p.midpoint)]);
    }
    report
        .field("param.count", count)
        .field("param.depth", depth)
        .field("param.seed", seed)
        .field("generator", GENERATOR)
        .real("error_bound", s.error_bound());
    write_csv(&csv, out, &mut report)?;
    Ok((report, 0))
}

fn boxdim(path: &Path, scales: &[f64], anchor: f64, error_bound: f64, out: Option<&Path>) -> Outcome {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("point") {
        return Err(Failure::Usage(format!("{}: expected header `point`", path.display())));
    }
    let points = lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .map(|x| (0usize, x))
                .map_err(|_| Failure::Usage(format!("{}: line {}: not a number", path.display(), i + 2)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let b = gdms::box_dimension(&points, &[anchor], error_bound, scales)?;
    let mut report = Report::new("boxdim");
    report
        .field("input", path.display())
        .field("input_sha256", digest(text.as_bytes()))
        .field("points", points.len())
        .real("param.anchor", anchor)
        .real("param.error_bound", error_bound)
        .real("slope", b.slope)
        .real("residual", b.residual)
        .field("method", "least-squares box count");
    if error_bound == 0.0 {
        report.warn("no --error-bound given; scales were not checked against the sample precision");
    }
    let mut csv = Csv::new(&["scale", "count"]);
    for (s, c) in b.scales.iter().zip(&b.counts) {
        csv.row(&[real(*s), c.to_string()]);
    }
    if let Some(path) = out {
        write_csv(&csv, path, &mut report)?;
    }
    Ok((report, 0))
}
