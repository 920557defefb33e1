use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use expograph::render::{default_workers, trace_orbit, Status};
use expograph::roots::{find_all_roots, verify_root_claims, FamilyKind};
use expograph::scene::{Mode, Scene};
use expograph::service::{self, ServiceConfig};
use expograph::{imageio, render_image};

#[derive(Parser)]
#[command(name = "expograph", version, about = "Polynomiographs of exponential partial sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a scene file to an image.
    Render {
        scene: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Defaults to the output extension, else ppm.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, env = "EXPOGRAPH_WORKERS")]
        workers: Option<usize>,
    },
    /// Print the roots of P_n or S_n with the root-claims report.
    Roots {
        /// partial_sum or szego
        kind: String,
        #[arg(allow_hyphen_values = true)]
        n: i64,
    },
    /// Print the orbit of a seed as JSON lines `[k, re, im, |p(z_k)|]`.
    Orbit {
        scene: PathBuf,
        /// Seed as `re,im`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        z0: Complex64,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = service::DEFAULT_PORT)]
        port: u16,
        #[arg(long, env = "EXPOGRAPH_WORKERS")]
        workers: Option<usize>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Allowed CORS origin; repeatable. Any origin when omitted.
        #[arg(long = "allow-origin")]
        allow_origin: Vec<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Ppm,
    Png,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or("expected re,im")?;
    let re: f64 = re.trim().parse().map_err(|e| format!("bad real part: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("bad imaginary part: {e}"))?;
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err("seed must be finite".into())
    }
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn invalid_scene(message: impl ToString) -> Self {
        Failure { code: 2, kind: "invalid_scene", message: message.to_string() }
    }

    fn invalid_args(message: impl ToString) -> Self {
        Failure { code: 2, kind: "invalid_arguments", message: message.to_string() }
    }

    fn render(message: impl ToString) -> Self {
        Failure { code: 3, kind: "render_failure", message: message.to_string() }
    }

    fn io(message: impl ToString) -> Self {
        Failure { code: 1, kind: "io_error", message: message.to_string() }
    }
}

fn load_scene(path: &Path) -> Result<Scene, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::invalid_scene(format!("{}: {e}", path.display())))?;
    Scene::from_json(&text).map_err(Failure::invalid_scene)
}

fn workers_or_default(workers: Option<usize>) -> usize {
    workers.filter(|&w| w > 0).unwrap_or_else(default_workers)
}

fn cmd_render(scene: &Path, output: &Path, format: Option<Format>, workers: Option<usize>) -> Result<(), Failure> {
    let scene = load_scene(scene)?;
    let format = format.unwrap_or_else(|| match output.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("png") => Format::Png,
        _ => Format::Ppm,
    });
    let workers = workers_or_default(workers);
    let start = Instant::now();
    let (rendered, img) = render_image(&scene, workers).map_err(Failure::render)?;
    let elapsed = start.elapsed();
    let bytes = match format {
        Format::Ppm => imageio::ppm_bytes(&img),
        Format::Png => imageio::png_bytes(&img),
    };
    fs::write(output, bytes).map_err(|e| Failure::io(format!("{}: {e}", output.display())))?;
    let grid = &rendered.grid;
    eprintln!(
        "pixels={} converged={:.2}% singular={:.2}% workers={} time={:.3}s",
        grid.pixels.len(),
        100.0 * grid.fraction(Status::Converged),
        100.0 * grid.fraction(Status::Singular),
        workers,
        elapsed.as_secs_f64()
    );
    Ok(())
}

fn cmd_roots(kind: &str, n: i64) -> Result<(), Failure> {
    let kind: FamilyKind = kind.parse().map_err(Failure::invalid_args)?;
    if !(1..=expograph::complexpoly::MAX_FAMILY_N as i64).contains(&n) {
        return Err(Failure::invalid_args(format!(
            "n must be in [1, {}], got {n}",
            expograph::complexpoly::MAX_FAMILY_N
        )));
    }
    let n = n as usize;
    let rs = find_all_roots(&kind.polynomial(n)).map_err(Failure::render)?;
    let report = verify_root_claims(kind, n, &rs);
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    writeln!(io::stdout().lock(), "{text}").map_err(Failure::io)
}

fn cmd_orbit(scene: &Path, z0: Complex64, steps: Option<usize>) -> Result<(), Failure> {
    let scene = load_scene(scene)?;
    let steps = steps.unwrap_or(match scene.mode {
        Mode::Basins(_) => scene.tolerances.max_iter as usize,
        Mode::VoronoiSequence { m_max } => m_max,
    });
    let rs = find_all_roots(&scene.polynomial()).map_err(Failure::render)?;
    let orbit = trace_orbit(&scene, &rs, z0, steps);
    let mut out = io::stdout().lock();
    let mut emit = || -> io::Result<()> {
        for pt in &orbit.points {
            writeln!(out, "{}", serde_json::to_string(pt).expect("point serializes"))?;
        }
        let summary = json!({
            "status": orbit.status,
            "k": orbit.k,
            "root_index": orbit.root_index,
            "root": orbit.root,
        });
        writeln!(out, "{summary}")
    };
    emit().map_err(Failure::io)
}

fn cmd_serve(host: &str, port: u16, workers: Option<usize>, allow_origin: Vec<String>) -> Result<(), Failure> {
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| Failure::invalid_args(format!("bad address {host}:{port}: {e}")))?;
    let config = ServiceConfig {
        workers: workers_or_default(workers),
        allowed_origins: (!allow_origin.is_empty()).then_some(allow_origin),
    };
    let rt = tokio::runtime::Runtime::new().map_err(Failure::io)?;
    rt.block_on(service::serve(addr, config)).map_err(Failure::io)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let message: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with("For more information"))
                .collect();
            return report(Failure::invalid_args(message.join(" ").trim_start_matches("error: ")));
        }
    };
    let result = match cli.command {
        Command::Render { scene, output, format, workers } => cmd_render(&scene, &output, format, workers),
        Command::Roots { kind, n } => cmd_roots(&kind, n),
        Command::Orbit { scene, z0, steps } => cmd_orbit(&scene, z0, steps),
        Command::Serve { port, workers, host, allow_origin } => cmd_serve(&host, port, workers, allow_origin),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
    ExitCode::from(f.code)
}
