//! The `formation` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use formation_core::assessment::parse_correspondences;
use formation_core::persistence::{export_report, load, PersistError, ReportFormat};
use formation_core::Choreography;

use crate::analysis::{analyze, to_json_bytes, AnalysisRequest};
use crate::error::{ServiceError, ServiceResult};
use crate::pipeline::{parse_select, run_assessment, AssessmentInput};
use crate::store::Store;

#[derive(Debug, Parser)]
#[command(name = "formation", version, about = "Formation choreography tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a choreography document and list every violation.
    Validate { path: PathBuf },
    /// Path distances, collisions and floor utilization. Without section
    /// flags every section is computed with default parameters.
    Analyze {
        path: PathBuf,
        #[arg(long)]
        distances: bool,
        /// Flag pairs closer than THRESHOLD metres (default 0.5).
        #[arg(long, value_name = "THRESHOLD", num_args = 0..=1, require_equals = true, default_missing_value = "0.5")]
        collisions: Option<f64>,
        /// Count placements per CELL x CELL metre square (default 1.0).
        #[arg(long, value_name = "CELL", num_args = 0..=1, require_equals = true, default_missing_value = "1.0")]
        heatmap: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare tracked video positions with the plan.
    Assess {
        choreography: PathBuf,
        tracks: PathBuf,
        correspondences: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        stride: u32,
        /// Comma-separated entity ids or labels for the aggregate RMSD.
        #[arg(long)]
        select: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "FORMATION_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "FORMATION_DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
    },
}

fn read(path: &Path) -> ServiceResult<Vec<u8>> {
    fs::read(path).map_err(|e| ServiceError::io(path, e))
}

fn read_choreography(path: &Path) -> ServiceResult<Choreography> {
    Ok(load(&read(path)?)?)
}

fn emit(bytes: &[u8], out: Option<&Path>, stdout: &mut dyn Write) -> ServiceResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| ServiceError::io(path, e)),
        None => stdout
            .write_all(bytes)
            .map_err(|e| ServiceError::io("<stdout>", e)),
    }
}

fn report_error(err: &ServiceError, stderr: &mut dyn Write) {
    let _ = writeln!(stderr, "error[{}]: {err}", err.code());
    for issue in err.issues() {
        let _ = writeln!(stderr, "  {} {}: {}", issue.code, issue.location, issue.message);
    }
}

/// Exit 0 when clean, 1 with one `CODE location: message` line per problem,
/// 2 when the file cannot be read.
fn validate(path: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let bytes = match read(path) {
        Ok(b) => b,
        Err(e) => {
            report_error(&e, stderr);
            return 2;
        }
    };
    match load(&bytes) {
        Ok(_) => 0,
        Err(PersistError::ValidationFailed(issues)) => {
            for issue in issues {
                let _ = writeln!(stdout, "{} {}: {}", issue.code, issue.location, issue.message);
            }
            1
        }
        Err(e) => {
            let _ = writeln!(stdout, "{}: {e}", e.code());
            1
        }
    }
}

fn analyze_command(
    path: &Path,
    mut request: AnalysisRequest,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> ServiceResult<()> {
    let c = read_choreography(path)?;
    if request.is_empty() {
        request = AnalysisRequest::everything();
    }
    emit(&to_json_bytes(&analyze(&c, &request)?), out, stdout)
}

#[allow(clippy::too_many_arguments)]
fn assess_command(
    choreography: &Path,
    tracks: &Path,
    correspondences: &Path,
    stride: u32,
    select: Option<&str>,
    format: Format,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> ServiceResult<()> {
    let (c_bytes, t_bytes, k_bytes) = (read(choreography)?, read(tracks)?, read(correspondences)?);
    let c = load(&c_bytes)?;
    let tracks_xml = String::from_utf8(t_bytes)
        .map_err(|_| ServiceError::bad_request("MALFORMED_DOCUMENT", "track file is not UTF-8"))?;
    let correspondences = parse_correspondences(&k_bytes)?;
    let select = select.map(parse_select);
    let report = run_assessment(
        &c,
        &AssessmentInput {
            tracks_xml: &tracks_xml,
            correspondences: &correspondences,
            stride,
            select: select.as_deref(),
        },
    )?;
    emit(&export_report(&report, format.into())?, out, stdout)
}

fn serve(port: u16, data_dir: PathBuf) -> ServiceResult<()> {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .try_init();
    let store = Store::open(&data_dir)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| ServiceError::io("<runtime>", e))?;
    runtime.block_on(async move {
        let addr = SocketAddr::from(([0, 0, 0, 0], port));
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| ServiceError::io(format!("<bind {addr}>"), e))?;
        tracing::info!(%addr, data_dir = %data_dir.display(), "serving");
        axum::serve(listener, crate::http::router(store))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| ServiceError::io("<serve>", e))
    })
}

/// Runs the command line and returns the process exit status.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Validate { path } => return validate(&path, stdout, stderr),
        Command::Analyze {
            path,
            distances,
            collisions,
            heatmap,
            out,
        } => {
            let request = AnalysisRequest {
                distances,
                collisions,
                heatmap,
            };
            // any failure other than reading the file is invalid input
            analyze_command(&path, request, out.as_deref(), stdout).map_err(|e| {
                let code = if matches!(e, ServiceError::Io { .. }) { 2 } else { 1 };
                (e, code)
            })
        }
        Command::Assess {
            choreography,
            tracks,
            correspondences,
            stride,
            select,
            format,
            out,
        } => assess_command(
            &choreography,
            &tracks,
            &correspondences,
            stride,
            select.as_deref(),
            format,
            out.as_deref(),
            stdout,
        )
        .map_err(|e| {
            let code = e.exit_code();
            (e, code)
        }),
        Command::Serve { port, data_dir } => serve(port, data_dir).map_err(|e| {
            let code = e.exit_code();
            (e, code)
        }),
    };
    match result {
        Ok(()) => 0,
        Err((e, code)) => {
            report_error(&e, stderr);
            code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (stdout, stderr) = (std::io::stdout(), std::io::stderr());
    let code = run_with(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
