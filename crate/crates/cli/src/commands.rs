use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{self, BufWriter, Write};

use infoclone::fock_oracle::disentanglement_states;
use infoclone::gaussian_cloner::{
    comparison_table, fidelity_exponent_exact, gauss_mean_exact, noise_pdf, run_gauss_trials, DEFAULT_CASES,
};
use infoclone::measurement::{
    fidelities, info_mean_exact, info_pdf, run_info_trials, summarize_with_bins, write_samples_csv,
    DistributionSummary, FidelityLaw, FidelityRun, GaussianNoise, Scheme,
};
use infoclone::phase_space::{
    build_transfer, info_overlap_fidelity, information_clone, symmetric_clone_config, CloneNetworkConfig,
    CoherentParams,
};
use num_rational::Ratio;
use serde_json::json;

use crate::args::{
    CloneArgs, FockArgs, Format, McArgs, NetworkArgs, NoiseArg, OutputArgs, PdfArgs, SchemeArg, TableArgs,
};
use crate::render::{complex, json as to_json, pair, ratio, ratio_value, sig, write_file, Sink, SCHEMA_VERSION};

pub const UNITARITY_TOL: f64 = 1e-12;
pub const CROSS_CHECK_TOL: f64 = 1e-12;
pub const INFIDELITY_TOL: f64 = 1e-6;
pub const NORMALISATION_TOL: f64 = 1e-4;
/// Monte Carlo means must lie within this many standard errors of the closed form.
pub const MEAN_GATE_SE: f64 = 5.0;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Gate(String),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Gate(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "{msg}"),
            Failure::Gate(msg) => write!(f, "check failed: {msg}"),
            Failure::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl From<infoclone::Error> for Failure {
    fn from(e: infoclone::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn gate(pass: bool, msg: impl FnOnce() -> String) -> Outcome {
    if pass {
        Ok(())
    } else {
        Err(Failure::Gate(msg()))
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn network_config(args: &NetworkArgs) -> Result<CloneNetworkConfig, Failure> {
    if let Some(copies) = args.copies {
        let config = symmetric_clone_config(copies)?;
        return Ok(match args.time {
            Some(t) => config.with_time(t)?,
            None => config,
        });
    }
    if args.r.is_empty() {
        return Err(Failure::Usage("give either --copies or --r".into()));
    }
    let config = CloneNetworkConfig::from_parts(&args.r, &args.delta, 0.0)?;
    let time = args.time.unwrap_or(1.5 * PI / config.total_strength());
    Ok(config.with_time(time)?)
}

pub fn transfer(out: &OutputArgs, args: &NetworkArgs) -> Outcome {
    let config = network_config(args)?;
    let u = build_transfer(&config);
    let deviation = u.unitarity_deviation();
    let pass = deviation <= UNITARITY_TOL;
    let strengths: Vec<f64> = config.couplings().iter().map(|c| c.strength).collect();
    let body = match out.format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "transfer matrix {0}x{0}, t = {1}, r = [{2}], delta = [{3}]",
                u.dim(),
                sig(config.time()),
                join(strengths.iter().map(|&x| sig(x))),
                join(config.phases().into_iter().map(sig)),
            );
            for row in u.entries().rows() {
                let _ = writeln!(s, "{}", row.iter().map(|&z| complex(z)).collect::<Vec<_>>().join("  "));
            }
            let _ = writeln!(s, "unitarity deviation: {} ({})", sig(deviation), verdict(pass));
            s
        }
        Format::Csv => {
            let mut s = String::from("row,col,re,im\n");
            for ((i, j), z) in u.entries().indexed_iter() {
                let _ = writeln!(s, "{i},{j},{},{}", sig(z.re), sig(z.im));
            }
            s
        }
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "transfer",
            "strengths": strengths,
            "phases": config.phases(),
            "time": config.time(),
            "dim": u.dim(),
            "entries": u.entries().rows().into_iter().map(|row| row.iter().map(|&z| pair(z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "unitarity_deviation": deviation,
            "tolerance": UNITARITY_TOL,
            "pass": pass,
        })),
    };
    Sink::new(out, "transfer").write(&body)?;
    gate(pass, || {
        format!("unitarity deviation {} exceeds {UNITARITY_TOL:e}", sig(deviation))
    })
}

pub fn clone(out: &OutputArgs, args: &CloneArgs) -> Outcome {
    let clones = information_clone(args.alpha, args.copies)?;
    let fidelity = info_overlap_fidelity(args.alpha, args.copies)?;
    let shrink = 1.0 - 1.0 / (args.copies as f64).sqrt();
    let direct = (-args.alpha.norm_sqr() * shrink * shrink).exp();
    let difference = (fidelity - direct).abs();
    let pass = difference <= CROSS_CHECK_TOL;
    let body = match out.format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "alpha {} -> {} copies", complex(args.alpha), args.copies);
            let _ = writeln!(s, "source: {}", complex(clones.source()));
            for (k, &z) in clones.targets().iter().enumerate() {
                let _ = writeln!(s, "target {}: {}", k + 1, complex(z));
            }
            let _ = writeln!(s, "overlap fidelity: {}", sig(fidelity));
            let _ = writeln!(s, "direct evaluation: {} ({})", sig(direct), verdict(pass));
            s
        }
        Format::Csv => {
            let mut s = String::from("mode,re,im\n");
            for (k, z) in clones.entries().iter().enumerate() {
                let _ = writeln!(s, "{k},{},{}", sig(z.re), sig(z.im));
            }
            s
        }
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "clone",
            "alpha": pair(args.alpha),
            "copies": args.copies,
            "source": pair(clones.source()),
            "targets": clones.targets().iter().map(|&z| pair(z)).collect::<Vec<_>>(),
            "overlap_fidelity": fidelity,
            "overlap_direct": direct,
            "pass": pass,
        })),
    };
    Sink::new(out, "clone").write(&body)?;
    gate(pass, || {
        format!("overlap fidelity differs from direct evaluation by {}", sig(difference))
    })
}

pub fn fock_verify(out: &OutputArgs, args: &FockArgs) -> Outcome {
    let config = network_config(&args.network)?;
    let mut entries = vec![args.alpha];
    entries.resize(config.target_count() + 1, args.beta);
    let input = CoherentParams::new(entries)?;
    let check = disentanglement_states(&input, &config, args.truncation, args.budget)?;
    if let Some(path) = &args.dump {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = BufWriter::new(File::create(path)?);
        check.evolved.write_csv(&mut file)?;
        file.flush()?;
    }
    let pass = check.infidelity < INFIDELITY_TOL;
    let (modes, levels, dim) = (check.evolved.modes(), check.evolved.levels(), check.evolved.dim());
    let body = match out.format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "modes: {modes}, levels: {levels}, dimension: {dim}");
            let _ = writeln!(s, "input: {}", join(input.entries().iter().map(|&z| complex(z))));
            let _ = writeln!(
                s,
                "predicted: {}",
                join(check.predicted_params.entries().iter().map(|&z| complex(z)))
            );
            let _ = writeln!(s, "infidelity: {} ({})", sig(check.infidelity), verdict(pass));
            s
        }
        Format::Csv => format!(
            "modes,levels,dim,infidelity,pass\n{modes},{levels},{dim},{},{pass}\n",
            sig(check.infidelity)
        ),
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "fock-verify",
            "modes": modes,
            "levels": levels,
            "dim": dim,
            "time": config.time(),
            "input": input.entries().iter().map(|&z| pair(z)).collect::<Vec<_>>(),
            "predicted": check.predicted_params.entries().iter().map(|&z| pair(z)).collect::<Vec<_>>(),
            "infidelity": check.infidelity,
            "tolerance": INFIDELITY_TOL,
            "pass": pass,
        })),
    };
    Sink::new(out, "fock-verify").write(&body)?;
    gate(pass, || {
        format!("infidelity {} is not below {INFIDELITY_TOL:e}", sig(check.infidelity))
    })
}

fn noise_model(arg: NoiseArg) -> GaussianNoise {
    match arg {
        NoiseArg::Printed => GaussianNoise::PrintedLaw,
        NoiseArg::Mixture => GaussianNoise::Mixture,
    }
}

fn noise_name(noise: GaussianNoise) -> &'static str {
    match noise {
        GaussianNoise::PrintedLaw => "printed",
        GaussianNoise::Mixture => "mixture",
    }
}

/// Exponent c of the density c F^{c−1}, as an exact rational.
fn exact_exponent(scheme: Scheme, noise: GaussianNoise, sources: usize, copies: usize) -> Result<Ratio<i64>, Failure> {
    Ok(match (scheme, noise) {
        (Scheme::InfoCloning, _) => {
            info_pdf(sources)?;
            Ratio::from_integer(sources as i64)
        }
        (Scheme::Gaussian, GaussianNoise::PrintedLaw) => fidelity_exponent_exact(sources, copies)?,
        (Scheme::Gaussian, GaussianNoise::Mixture) => fidelity_exponent_exact(sources, copies)? * 2,
    })
}

fn law_for(scheme: Scheme, noise: GaussianNoise, sources: usize, copies: usize) -> Result<FidelityLaw, Failure> {
    Ok(match scheme {
        Scheme::InfoCloning => info_pdf(sources)?,
        Scheme::Gaussian => noise_pdf(noise, sources, copies)?,
    })
}

fn expected_mean(scheme: Scheme, noise: GaussianNoise, sources: usize, copies: usize) -> Result<Ratio<i64>, Failure> {
    Ok(match (scheme, noise) {
        (Scheme::InfoCloning, _) => info_mean_exact(sources)?,
        (Scheme::Gaussian, GaussianNoise::PrintedLaw) => gauss_mean_exact(sources, copies)?,
        (Scheme::Gaussian, GaussianNoise::Mixture) => {
            let c = exact_exponent(scheme, noise, sources, copies)?;
            c / (c + 1)
        }
    })
}

struct McReport {
    run: FidelityRun,
    summary: DistributionSummary,
    expected: Ratio<i64>,
    std_error: f64,
    mean_pass: bool,
}

impl McReport {
    fn pass(&self) -> bool {
        self.mean_pass && self.summary.ks_pass()
    }

    fn command(&self) -> &'static str {
        match self.run.scheme {
            Scheme::InfoCloning => "mc-info",
            Scheme::Gaussian => "mc-gauss",
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let run = &self.run;
        let noise = match run.scheme {
            Scheme::InfoCloning => serde_json::Value::Null,
            Scheme::Gaussian => noise_name(run.gaussian_noise).into(),
        };
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command(),
            "scheme": run.scheme,
            "noise": noise,
            "sources": run.sources,
            "copies": run.copies,
            "trials": run.trials,
            "seed": run.seed,
            "workers": run.workers,
            "alpha": pair(run.alpha_true),
            "mean": self.summary.mean,
            "variance": self.summary.variance,
            "std_error": self.std_error,
            "expected_mean": ratio_value(self.expected),
            "expected_mean_exact": ratio(self.expected),
            "mean_pass": self.mean_pass,
            "ks_statistic": self.summary.ks_statistic,
            "ks_critical": self.summary.ks_critical,
            "ks_pass": self.summary.ks_pass(),
            "pass": self.pass(),
            "histogram": self.summary.histogram,
        })
    }

    fn to_text(&self) -> String {
        let run = &self.run;
        let mut s = String::new();
        let scheme = match run.scheme {
            Scheme::InfoCloning => "information cloning".to_string(),
            Scheme::Gaussian => format!("Gaussian cloner ({} noise)", noise_name(run.gaussian_noise)),
        };
        let _ = writeln!(s, "{scheme}, M = {}, N = {}", run.sources, run.copies);
        let _ = writeln!(
            s,
            "trials: {}, seed: {}, workers: {}",
            run.trials, run.seed, run.workers
        );
        let _ = writeln!(
            s,
            "mean fidelity: {} (expected {} = {}, standard error {}) {}",
            sig(self.summary.mean),
            ratio(self.expected),
            sig(ratio_value(self.expected)),
            sig(self.std_error),
            verdict(self.mean_pass),
        );
        let _ = writeln!(s, "variance: {}", sig(self.summary.variance));
        let _ = writeln!(
            s,
            "KS statistic: {} (5% critical {}) {}",
            sig(self.summary.ks_statistic),
            sig(self.summary.ks_critical),
            verdict(self.summary.ks_pass()),
        );
        s
    }
}

pub fn mc(out: &OutputArgs, args: &McArgs, scheme: Scheme, noise: NoiseArg) -> Outcome {
    let noise = noise_model(noise);
    let run = FidelityRun::new(args.alpha, args.sources, args.copies, args.trials, args.seed, scheme)?
        .with_workers(args.workers)?
        .with_gaussian_noise(noise);
    let samples = match scheme {
        Scheme::InfoCloning => run_info_trials(&run)?,
        Scheme::Gaussian => run_gauss_trials(&run)?,
    };
    let law = law_for(scheme, noise, run.sources, run.copies)?;
    let summary = summarize_with_bins(&fidelities(&samples), |f| law.cdf(f), args.bins)?;
    let expected = expected_mean(scheme, noise, run.sources, run.copies)?;
    let std_error = (law.variance() / run.trials as f64).sqrt();
    let mean_pass = (summary.mean - ratio_value(expected)).abs() <= MEAN_GATE_SE * std_error;
    let report = McReport {
        run,
        summary,
        expected,
        std_error,
        mean_pass,
    };
    let command = report.command();
    let summary_json = to_json(&report.to_json());
    let sink = Sink::new(out, command);
    match out.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_samples_csv(&samples, &mut buf)?;
            sink.write(&String::from_utf8(buf).expect("CSV output is ASCII"))?;
            if args.summary.is_none() {
                if let Some(path) = sink.sibling(out, &format!("{command}-summary.json")) {
                    write_file(&path, &summary_json)?;
                }
            }
        }
        Format::Json => sink.write(&summary_json)?,
        Format::Text => sink.write(&report.to_text())?,
    }
    if let Some(path) = &args.summary {
        write_file(path, &summary_json)?;
    }
    let s = &report.summary;
    gate(report.mean_pass, || {
        format!(
            "mean {} is more than {MEAN_GATE_SE} standard errors from {}",
            sig(s.mean),
            ratio(report.expected)
        )
    })?;
    gate(s.ks_pass(), || {
        format!(
            "KS statistic {} exceeds critical value {}",
            sig(s.ks_statistic),
            sig(s.ks_critical)
        )
    })
}

/// Trapezoid rule on a uniform grid over [0, 1]. A density that diverges at
/// F = 0 gets its first panel from the exact CDF instead, and is not gated:
/// the remaining panels still converge only like h^c.
fn normalisation(law: &FidelityLaw, grid: &[f64], density: &[f64]) -> Normalisation {
    let h = grid[1] - grid[0];
    let trapezoid = |ps: &[f64]| ps.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum::<f64>();
    if density[0].is_finite() {
        let integral = trapezoid(density);
        Normalisation {
            integral,
            method: "trapezoid",
            gated: true,
            pass: (integral - 1.0).abs() < NORMALISATION_TOL,
        }
    } else {
        Normalisation {
            integral: law.cdf(grid[1]) + trapezoid(&density[1..]),
            method: "trapezoid, exact first panel",
            gated: false,
            pass: true,
        }
    }
}

struct Normalisation {
    integral: f64,
    method: &'static str,
    gated: bool,
    pass: bool,
}

impl Normalisation {
    fn status(&self) -> &'static str {
        if self.gated {
            verdict(self.pass)
        } else {
            "not gated, density unbounded at F = 0"
        }
    }
}

pub fn pdf(out: &OutputArgs, args: &PdfArgs) -> Outcome {
    if args.points < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    let (scheme, copies) = match args.scheme {
        SchemeArg::Info => (Scheme::InfoCloning, args.copies.unwrap_or(1)),
        SchemeArg::Gauss => (
            Scheme::Gaussian,
            args.copies
                .ok_or_else(|| Failure::Usage("--copies is required for the Gaussian scheme".into()))?,
        ),
    };
    let noise = noise_model(args.noise);
    let law = law_for(scheme, noise, args.sources, copies)?;
    let exponent = exact_exponent(scheme, noise, args.sources, copies)?;
    let last = (args.points - 1) as f64;
    let grid: Vec<f64> = (0..args.points).map(|i| i as f64 / last).collect();
    let density: Vec<f64> = grid.iter().map(|&f| law.pdf(f)).collect();
    let norm = normalisation(&law, &grid, &density);
    let body = match out.format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "# density c F^(c-1), c = {} = {}",
                ratio(exponent),
                sig(ratio_value(exponent))
            );
            let _ = writeln!(
                s,
                "# integral: {} ({}) {}",
                sig(norm.integral),
                norm.method,
                norm.status()
            );
            for (f, p) in grid.iter().zip(&density) {
                let _ = writeln!(s, "{} {}", sig(*f), sig(*p));
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("F,p\n");
            for (f, p) in grid.iter().zip(&density) {
                let _ = writeln!(s, "{},{}", sig(*f), sig(*p));
            }
            s
        }
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "pdf",
            "scheme": scheme,
            "noise": if scheme == Scheme::Gaussian { noise_name(noise).into() } else { serde_json::Value::Null },
            "sources": args.sources,
            "copies": copies,
            "exponent": ratio_value(exponent),
            "exponent_exact": ratio(exponent),
            "F": grid,
            "p": density.iter().map(|&p| p.is_finite().then_some(p)).collect::<Vec<_>>(),
            "integral": norm.integral,
            "integration": norm.method,
            "gated": norm.gated,
            "pass": norm.pass,
        })),
    };
    Sink::new(out, "pdf").write(&body)?;
    gate(norm.pass, || format!("density integrates to {}", sig(norm.integral)))
}

pub fn table(out: &OutputArgs, args: &TableArgs) -> Outcome {
    let cases = if args.cases.is_empty() {
        DEFAULT_CASES.to_vec()
    } else {
        args.cases.clone()
    };
    if let Some(&(m, _)) = cases.iter().find(|&&(_, n)| n == 1) {
        return Err(Failure::Usage(format!(
            "case M = {m}, N = 1 rejected: the Gaussian cloner amplification A = MN/(N-1) diverges at N = 1"
        )));
    }
    let rows = comparison_table(&cases)?;
    let body = match out.format {
        Format::Text => {
            let mut s = format!("{:>3} {:>3}  {:<24} {}\n", "M", "N", "Gaussian", "information");
            for r in &rows {
                let g = format!("{} = {}", ratio(r.gauss_exact), sig(r.gauss_mean));
                let i = format!("{} = {}", ratio(r.info_exact), sig(r.info_mean));
                let _ = writeln!(s, "{:>3} {:>3}  {g:<24} {i}", r.sources, r.copies);
            }
            s
        }
        Format::Csv => {
            let mut s = String::from("sources,copies,gauss_mean,gauss_exact,info_mean,info_exact\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.sources,
                    r.copies,
                    sig(r.gauss_mean),
                    ratio(r.gauss_exact),
                    sig(r.info_mean),
                    ratio(r.info_exact)
                );
            }
            s
        }
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "table",
            "rows": rows.iter().map(|r| json!({
                "sources": r.sources,
                "copies": r.copies,
                "gauss_mean": r.gauss_mean,
                "gauss_exact": ratio(r.gauss_exact),
                "info_mean": r.info_mean,
                "info_exact": ratio(r.info_exact),
            })).collect::<Vec<_>>(),
        })),
    };
    Sink::new(out, "table").write(&body)?;
    Ok(())
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(", ")
}
