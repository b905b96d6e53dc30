use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperinv::audit::{audit, claims_experiment, AuditConfig, AuditReport, ClaimStudy, Group, Quantity};
use hyperinv::bloch::{represent, GroupTag, State};
use hyperinv::hyperdet::{
    charpoly_coeffs, det222, hdet_with, hyper_charpoly_with, HdetConfig, LambdaPolynomial, DEFAULT_BUDGET,
};
use hyperinv::hypermatrix::format_string;
use hyperinv::invariants::{compare_fingerprints, fingerprint, CompareScope, Comparison, InvariantFingerprint};
use hyperinv::io::{fingerprint_json, fmt_complex, fmt_g17, parse_fingerprint, StateFile};
use hyperinv::sampling::{random_chain, random_density, random_pure, rng_from_seed, DEFAULT_COND_CAP};
use hyperinv::HyperMatrix;

const BUDGET_VAR: &str = "HYPERINV_BUDGET";

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] hyperinv::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(hyperinv::Error::Budget { .. }) => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "hyperinv", version, about = "Hypermatrix invariants of multipartite quantum states")]
struct Cli {
    /// Worker threads for hyperdeterminants and audits (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Bloch hypermatrix of a state: format and nonzero entries.
    Repr { file: PathBuf },
    /// Invariant fingerprint of a state.
    Fingerprint {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
        /// Write the JSON fingerprint to this golden file instead of stdout.
        #[arg(long, value_name = "PATH")]
        bless: Option<PathBuf>,
    },
    /// First hyperdeterminant of the Bloch tensor (density) or amplitude tensor (pure).
    Hdet { file: PathBuf },
    /// 2×2×2 hyperdeterminant of a three-qubit pure state.
    Det222 { file: PathBuf },
    /// Coefficients of det(λI − A), ascending in λ, for the state's tensor.
    Charpoly { file: PathBuf },
    /// Compare the fingerprints of two states (or two fingerprint files).
    Compare {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Scope::All)]
        scope: Scope,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        out: TextOrJson,
    },
    /// Empirical invariance audit under random local operations.
    Audit {
        /// State to audit; not used with --claims.
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = GroupArg::Slocc)]
        group: GroupArg,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        seed: u64,
        /// Audit only these fingerprint entries.
        #[arg(long = "invariant", value_name = "NAME")]
        invariants: Vec<String>,
        /// Also audit one Bloch coefficient, e.g. `0,1`, as a non-invariant probe.
        #[arg(long, value_name = "INDEX", value_delimiter = ',')]
        probe: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_COND_CAP)]
        cond_cap: f64,
        /// Run the standing experiment on claimed coefficient invariance.
        #[arg(long, value_enum)]
        claims: Option<Claims>,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        out: TextOrJson,
    },
    /// Write a random state or local operator file.
    Sample {
        #[arg(long, value_enum)]
        kind: SampleKind,
        /// Local dimensions, e.g. `2,2,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_COND_CAP)]
        cond_cap: f64,
        /// Output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scope {
    /// Every shared entry, including claimed ones.
    All,
    /// Entries guaranteed invariant under local unitaries.
    Lu,
    /// Entries guaranteed invariant under SLOCC.
    Slocc,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Lu,
    Slocc,
    Basis,
}

#[derive(Clone, Copy, ValueEnum)]
enum Claims {
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleKind {
    Density,
    Pure,
    Unitary,
    Sl,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_state(path: &Path) -> CliResult<State> {
    Ok(StateFile::parse(&read(path)?)?.into_state()?)
}

fn hdet_config() -> CliResult<HdetConfig> {
    match std::env::var(BUDGET_VAR) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(b) if b > 0.0 => Ok(HdetConfig::with_budget(b)),
            _ => Err(CliError::Usage(format!("{BUDGET_VAR} must be a positive number, got {s:?}"))),
        },
        Err(_) => Ok(HdetConfig::with_budget(DEFAULT_BUDGET)),
    }
}

/// Bloch tensor for density states, amplitude tensor for pure states.
fn state_tensor(state: &State) -> CliResult<HyperMatrix> {
    match state {
        State::Density(rho) => Ok(represent(rho)?),
        State::Pure(phi) => Ok(phi.amplitudes().clone()),
    }
}

fn cmd_repr(file: &Path, out: &mut impl Write) -> CliResult<()> {
    let rho = match load_state(file)? {
        State::Density(rho) => rho,
        State::Pure(phi) => phi.to_density(),
    };
    let a = represent(&rho)?;
    writeln!(out, "format {}", format_string(a.format())).ok();
    for (idx, v) in a.nonzeros() {
        let idx = idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        writeln!(out, "{idx}\t{}", fmt_g17(v.re)).ok();
    }
    Ok(())
}

fn fingerprint_csv(fp: &InvariantFingerprint) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
    w.write_record(["name", "re", "im", "guarantee"]).map_err(io)?;
    for e in &fp.entries {
        let g = serde_json::to_value(e.guarantee).expect("guarantee serializes");
        w.write_record([e.name.as_str(), &fmt_g17(e.value.re), &fmt_g17(e.value.im), g.as_str().unwrap_or_default()])
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_fingerprint(file: &Path, format: Format, bless: Option<&Path>, out: &mut impl Write) -> CliResult<()> {
    let fp = fingerprint(&load_state(file)?, &hdet_config()?)?;
    match (bless, format) {
        (Some(path), _) => write_file(path, &(fingerprint_json(&fp) + "\n")),
        (None, Format::Json) => {
            writeln!(out, "{}", fingerprint_json(&fp)).ok();
            Ok(())
        }
        (None, Format::Csv) => {
            write!(out, "{}", fingerprint_csv(&fp)?).ok();
            Ok(())
        }
    }
}

fn cmd_hdet(file: &Path, out: &mut impl Write) -> CliResult<()> {
    let a = state_tensor(&load_state(file)?)?;
    writeln!(out, "{}", fmt_complex(hdet_with(&a, &hdet_config()?)?)).ok();
    Ok(())
}

fn cmd_det222(file: &Path, out: &mut impl Write) -> CliResult<()> {
    match load_state(file)? {
        State::Pure(phi) => {
            writeln!(out, "{}", fmt_complex(det222(phi.amplitudes())?)).ok();
            Ok(())
        }
        State::Density(_) => Err(CliError::Usage("det222 needs a 2×2×2 pure state".into())),
    }
}

fn cmd_charpoly(file: &Path, out: &mut impl Write) -> CliResult<()> {
    let a = state_tensor(&load_state(file)?)?;
    let p: LambdaPolynomial =
        if a.order() == 2 { charpoly_coeffs(&a.to_matrix()?)? } else { hyper_charpoly_with(&a, &hdet_config()?)? };
    for (k, c) in p.coeffs().iter().enumerate() {
        writeln!(out, "{k}\t{}", fmt_complex(*c)).ok();
    }
    Ok(())
}

/// A state file is fingerprinted; a file with an `entries` field is read as a fingerprint.
fn load_fingerprint(path: &Path, cfg: &HdetConfig) -> CliResult<InvariantFingerprint> {
    let text = read(path)?;
    let is_fingerprint =
        serde_json::from_str::<serde_json::Value>(&text).map(|v| v.get("entries").is_some()).unwrap_or(false);
    if is_fingerprint {
        Ok(parse_fingerprint(&text)?)
    } else {
        Ok(fingerprint(&StateFile::parse(&text)?.into_state()?, cfg)?)
    }
}

fn print_comparison(c: &Comparison, format: TextOrJson, out: &mut impl Write) {
    if format == TextOrJson::Json {
        writeln!(out, "{}", serde_json::to_string_pretty(c).expect("comparison serializes")).ok();
        return;
    }
    let verdict = serde_json::to_value(c.verdict).expect("verdict serializes");
    writeln!(out, "{}", verdict.as_str().unwrap_or_default()).ok();
    writeln!(out, "compared {} invariants, {} differ", c.compared, c.differences.len()).ok();
    for d in &c.differences {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            d.name,
            fmt_complex(d.left),
            fmt_complex(d.right),
            fmt_g17(d.relative_deviation)
        )
        .ok();
    }
}

fn cmd_compare(
    left: &Path,
    right: &Path,
    tol: f64,
    scope: Scope,
    format: TextOrJson,
    out: &mut impl Write,
) -> CliResult<()> {
    if tol.is_nan() || tol < 0.0 {
        return Err(CliError::Usage(format!("--tol must be non-negative, got {tol}")));
    }
    let cfg = hdet_config()?;
    let scope = match scope {
        Scope::All => CompareScope::All,
        Scope::Lu => CompareScope::GuaranteedUnder(Group::Lu),
        Scope::Slocc => CompareScope::GuaranteedUnder(Group::Slocc),
    };
    let c = compare_fingerprints(&load_fingerprint(left, &cfg)?, &load_fingerprint(right, &cfg)?, tol, scope)?;
    print_comparison(&c, format, out);
    Ok(())
}

fn report_table(reports: &[AuditReport], out: &mut impl Write) {
    writeln!(out, "invariant\tgroup\ttrials\tmax_rel_dev\tmedian_rel_dev\tverdict\tseed\tcond_cap\tresamples").ok();
    for r in reports {
        let group = serde_json::to_value(r.group).expect("group serializes");
        let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.invariant,
            group.as_str().unwrap_or_default(),
            r.trials,
            fmt_g17(r.max_relative_deviation),
            fmt_g17(r.median_relative_deviation),
            verdict.as_str().unwrap_or_default(),
            r.seed,
            r.cond_cap.map(fmt_g17).unwrap_or_else(|| "-".into()),
            r.resamples
        )
        .ok();
    }
}

fn print_claims(studies: &[ClaimStudy], tol: f64, format: TextOrJson, out: &mut impl Write) {
    if format == TextOrJson::Json {
        writeln!(out, "{}", serde_json::to_string_pretty(studies).expect("studies serialize")).ok();
        return;
    }
    for (k, s) in studies.iter().enumerate() {
        if k > 0 {
            writeln!(out).ok();
        }
        writeln!(out, "# {} ({}; tol {})", s.claim, s.state, fmt_g17(tol)).ok();
        report_table(&s.reports, out);
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_audit(
    file: Option<&Path>,
    group: GroupArg,
    trials: usize,
    tol: f64,
    seed: u64,
    invariants: &[String],
    probe: Option<&[usize]>,
    cond_cap: f64,
    claims: Option<Claims>,
    format: TextOrJson,
    out: &mut impl Write,
) -> CliResult<()> {
    let hdet = hdet_config()?;
    if let Some(Claims::Paper) = claims {
        if file.is_some() {
            return Err(CliError::Usage("--claims runs on its own generated states; drop the state file".into()));
        }
        let studies = claims_experiment(seed, trials, tol, &hdet)?;
        print_claims(&studies, tol, format, out);
        return Ok(());
    }
    let file = file.ok_or_else(|| CliError::Usage("audit needs a state file or --claims".into()))?;
    let state = load_state(file)?;
    let mut quantities: Vec<Quantity> = invariants.iter().cloned().map(Quantity::Entry).collect();
    if quantities.is_empty() {
        quantities.push(Quantity::Fingerprint);
    }
    if let Some(idx) = probe {
        quantities.push(Quantity::BlochEntry(idx.to_vec()));
    }
    let group = match group {
        GroupArg::Lu => Group::Lu,
        GroupArg::Slocc => Group::Slocc,
        GroupArg::Basis => Group::BasisRotation,
    };
    let cfg = AuditConfig { cond_cap, hdet, ..AuditConfig::new(group, trials, tol, seed) };
    let reports = audit(&state, &quantities, &cfg)?;
    match format {
        TextOrJson::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&reports).expect("reports serialize")).ok();
        }
        TextOrJson::Text => report_table(&reports, out),
    }
    Ok(())
}

fn cmd_sample(
    kind: SampleKind,
    dims: &[usize],
    rank: usize,
    seed: u64,
    cond_cap: f64,
    dest: Option<&Path>,
    out: &mut impl Write,
) -> CliResult<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(CliError::Usage("--dims must list positive dimensions".into()));
    }
    let mut rng = rng_from_seed(seed);
    let file = match kind {
        SampleKind::Density => StateFile::from_state(&State::Density(random_density(dims, rank, &mut rng)?)),
        SampleKind::Pure => StateFile::from_state(&State::Pure(random_pure(dims, &mut rng)?)),
        SampleKind::Unitary | SampleKind::Sl => {
            let tag = if matches!(kind, SampleKind::Unitary) { GroupTag::Unitary } else { GroupTag::SpecialLinear };
            let (chain, _) = random_chain(dims, tag, &mut rng, cond_cap)?;
            match StateFile::from_operator(&chain.kron(), tag) {
                StateFile::Operator { group, matrix, .. } => StateFile::Operator { group, dims: dims.to_vec(), matrix },
                other => other,
            }
        }
    };
    let text = file.to_json() + "\n";
    match dest {
        Some(path) => write_file(path, &text),
        None => {
            write!(out, "{text}").ok();
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Repr { file } => cmd_repr(&file, &mut out),
        Command::Fingerprint { file, out: format, bless } => cmd_fingerprint(&file, format, bless.as_deref(), &mut out),
        Command::Hdet { file } => cmd_hdet(&file, &mut out),
        Command::Det222 { file } => cmd_det222(&file, &mut out),
        Command::Charpoly { file } => cmd_charpoly(&file, &mut out),
        Command::Compare { left, right, tol, scope, out: format } => {
            cmd_compare(&left, &right, tol, scope, format, &mut out)
        }
        Command::Audit { file, group, trials, tol, seed, invariants, probe, cond_cap, claims, out: format } => {
            cmd_audit(
                file.as_deref(),
                group,
                trials,
                tol,
                seed,
                &invariants,
                probe.as_deref(),
                cond_cap,
                claims,
                format,
                &mut out,
            )
        }
        Command::Sample { kind, dims, rank, seed, cond_cap, out: dest } => {
            cmd_sample(kind, &dims, rank, seed, cond_cap, dest.as_deref(), &mut out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        let budget = CliError::Lib(hyperinv::Error::Budget { required: 1e12, budget: 1e9 });
        assert_eq!(budget.exit_code(), 3);
        assert_eq!(CliError::Lib(hyperinv::Error::Invalid("x".into())).exit_code(), 2);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
    }

    #[test]
    fn seed_is_mandatory() {
        assert!(Cli::try_parse_from(["hyperinv", "sample", "--kind", "pure", "--dims", "2,2"]).is_err());
        assert!(Cli::try_parse_from(["hyperinv", "audit", "x.json"]).is_err());
    }
}
