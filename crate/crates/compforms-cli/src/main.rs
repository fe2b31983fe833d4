//! `compforms`: build the registry's algebra/form pairs and run their
//! verification suites from the command line.
//!
//! Exit codes: 0 = all checks passed, 1 = a verification failed,
//! 2 = usage error (unknown entry, invalid parameters).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use compforms::fileio;
use compforms::registry::{
    self, custom_entry, CheckKind, EntrySpec, ParamScalar, RegistryEntry, RingSpec, SuiteResult,
};

#[derive(Parser)]
#[command(name = "compforms", version, about = "exact verification of algebras with multiplicative degree-d forms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the registry entries.
    List {
        #[arg(long)]
        json: bool,
        /// Filter, e.g. `degree=3`.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Build an entry and write its algebra definition file.
    Build {
        name: String,
        #[arg(long)]
        ring: Option<String>,
        /// Output directory for `<name>.alg`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Run checks for one entry against its expected properties.
    Verify {
        name: String,
        #[arg(long)]
        ring: Option<String>,
        /// Comma-separated subset of checks (default: all applicable).
        #[arg(long)]
        checks: Option<String>,
        #[command(flatten)]
        params: Params,
    },
    /// Run the full expected-property suite and emit a JSON report.
    Report {
        /// Run every registry entry.
        #[arg(long)]
        all: bool,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json_out: Option<PathBuf>,
        /// Include the sampling seed in the report metadata.
        #[arg(long)]
        seed_echo: bool,
    },
}

#[derive(Args, Default)]
struct Params {
    /// Ambient projective dimension for section entries.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    a: Option<u32>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// Scalar parameter (constant) for cubic_tits / cayley layers.
    #[arg(long)]
    mu: Option<i64>,
    /// Scalar parameter `mu*t` over a polynomial or Laurent ring.
    #[arg(long)]
    mu_t: Option<i64>,
    /// Matrix size for matrix_det.
    #[arg(long)]
    r: Option<usize>,
    /// Form degree for base_algebra.
    #[arg(long)]
    d: Option<u32>,
    /// Power for power forms.
    #[arg(long)]
    k: Option<u32>,
    /// Constant for quadratic_etale.
    #[arg(long)]
    c: Option<i64>,
    /// Comma-separated multiplicities for split_etale.
    #[arg(long)]
    mults: Option<String>,
}

impl Params {
    fn is_empty(&self) -> bool {
        self.n.is_none()
            && self.a.is_none()
            && self.b.is_none()
            && self.l.is_none()
            && self.m.is_none()
            && self.mu.is_none()
            && self.mu_t.is_none()
            && self.r.is_none()
            && self.d.is_none()
            && self.k.is_none()
            && self.c.is_none()
            && self.mults.is_none()
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

/// Default spec for bare constructor names not present in the registry.
fn template_spec(name: &str) -> Option<EntrySpec> {
    Some(match name {
        "base_algebra" => EntrySpec::Base { d: 3 },
        "split_etale" => EntrySpec::SplitEtale { mults: vec![1, 1, 1] },
        "quadratic_etale" => EntrySpec::QuadraticEtale { c: ParamScalar::Int(5) },
        "cubic_tits" => EntrySpec::CubicTits { mu: ParamScalar::Int(2) },
        "zorn" => EntrySpec::Zorn,
        "matrix_det" => EntrySpec::MatrixDet { r: 3 },
        "section_end" => EntrySpec::SectionEnd { n: 1, a: 1, b: 2 },
        "section_zorn" => EntrySpec::SectionZorn { n: 1, l: 1, m: 1 },
        _ => return None,
    })
}

fn apply_params(spec: EntrySpec, p: &Params) -> Result<EntrySpec, String> {
    if p.is_empty() {
        return Ok(spec);
    }
    let scalar_param = |int: Option<i64>, mu_t: Option<i64>, current: ParamScalar| {
        match (int, mu_t) {
            (Some(_), Some(_)) => Err("pass either --mu or --mu-t, not both".to_string()),
            (Some(v), None) => Ok(ParamScalar::Int(v)),
            (None, Some(v)) => Ok(ParamScalar::MuT(v)),
            (None, None) => Ok(current),
        }
    };
    Ok(match spec {
        EntrySpec::Base { d } => EntrySpec::Base { d: p.d.unwrap_or(d) },
        EntrySpec::SplitEtale { mults } => {
            let mults = match &p.mults {
                Some(text) => text
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| format!("bad multiplicity `{t}`")))
                    .collect::<Result<Vec<u32>, _>>()?,
                None => mults,
            };
            EntrySpec::SplitEtale { mults }
        }
        EntrySpec::QuadraticEtale { c } => EntrySpec::QuadraticEtale {
            c: scalar_param(p.c, p.mu_t, c)?,
        },
        EntrySpec::CubicTits { mu } => EntrySpec::CubicTits {
            mu: scalar_param(p.mu, p.mu_t, mu)?,
        },
        EntrySpec::SectionEnd { n, a, b } => EntrySpec::SectionEnd {
            n: p.n.unwrap_or(n),
            a: p.a.unwrap_or(a),
            b: p.b.unwrap_or(b),
        },
        EntrySpec::SectionZorn { n, l, m } => EntrySpec::SectionZorn {
            n: p.n.unwrap_or(n),
            l: p.l.unwrap_or(l),
            m: p.m.unwrap_or(m),
        },
        EntrySpec::MatrixDet { r } => EntrySpec::MatrixDet { r: p.r.unwrap_or(r) },
        EntrySpec::Power { base, k } => EntrySpec::Power {
            base,
            k: p.k.unwrap_or(k),
        },
        other => {
            return Err(format!(
                "entry `{}` does not take parameter overrides",
                serde_tag(&other)
            ))
        }
    })
}

fn serde_tag(spec: &EntrySpec) -> String {
    format!("{spec:?}")
        .split([' ', '{'])
        .next()
        .unwrap_or("entry")
        .to_string()
}

fn resolve_entry(name: &str, ring: &Option<String>, params: &Params) -> Result<RegistryEntry, String> {
    let base = match registry::find_entry(name) {
        Some(entry) => entry,
        None => {
            let spec = template_spec(name)
                .ok_or_else(|| format!("unknown entry `{name}` (see `compforms list`)"))?;
            custom_entry(name, RingSpec::Q, spec)
        }
    };
    let ring_spec = match ring {
        Some(text) => {
            RingSpec::parse(text).ok_or_else(|| format!("unsupported ring `{text}`"))?
        }
        None => base.ring,
    };
    let spec = apply_params(base.spec.clone(), params)?;
    if let RingSpec::Fp(p) = ring_spec {
        if (p as usize) <= spec.degree() {
            return Err(format!(
                "prime field F{p} rejected: need p > {} for a degree-{} form",
                spec.degree(),
                spec.degree()
            ));
        }
    }
    let mut entry = custom_entry(&base.name, ring_spec, spec);
    if params.is_empty() && ring.is_none() {
        entry.anchor = base.anchor;
    }
    Ok(entry)
}

fn cmd_list(json: bool, filter: Option<String>) -> ExitCode {
    let degree = match &filter {
        Some(f) => match f.strip_prefix("degree=").and_then(|v| v.parse().ok()) {
            Some(d) => Some(d),
            None => return usage_error(&format!("bad filter `{f}`, expected degree=N")),
        },
        None => None,
    };
    if json {
        println!("{}", registry::list_json(degree));
    } else {
        for line in registry::list_lines(degree) {
            println!("{line}");
        }
    }
    ExitCode::SUCCESS
}

fn cmd_build(name: &str, ring: &Option<String>, out: &PathBuf, params: &Params) -> ExitCode {
    let entry = match resolve_entry(name, ring, params) {
        Ok(e) => e,
        Err(msg) => return usage_error(&msg),
    };
    let fa = match entry.build() {
        Ok(f) => f,
        Err(e) => return usage_error(&format!("cannot build `{name}`: {e}")),
    };
    let text = fileio::write_formed_algebra(&fa);
    let path = out.join(format!("{name}.alg"));
    if let Err(e) = std::fs::write(&path, text) {
        eprintln!("error: cannot write {}: {e}", path.display());
        return ExitCode::from(2);
    }
    println!(
        "wrote {} (ring {}, rank {}, degree {})",
        path.display(),
        fa.ring(),
        fa.rank(),
        fa.degree
    );
    ExitCode::SUCCESS
}

fn cmd_verify(name: &str, ring: &Option<String>, checks: &Option<String>, params: &Params) -> ExitCode {
    let entry = match resolve_entry(name, ring, params) {
        Ok(e) => e,
        Err(msg) => return usage_error(&msg),
    };
    let kinds: Option<Vec<CheckKind>> = match checks {
        Some(list) => {
            let mut out = Vec::new();
            for part in list.split(',') {
                match CheckKind::parse(part.trim()) {
                    Some(k) => out.push(k),
                    None => return usage_error(&format!("unknown check `{part}`")),
                }
            }
            Some(out)
        }
        None => None,
    };
    if entry.build().is_err() {
        let err = entry.build().err().unwrap();
        return usage_error(&format!("cannot build `{name}`: {err}"));
    }
    let rows = match registry::run_entry(&entry, kinds.as_deref()) {
        Ok(rows) => rows,
        Err(e) => return usage_error(&format!("cannot verify `{name}`: {e}")),
    };
    let mut failed = false;
    for row in &rows {
        let status = if row.report.passed() { "PASS" } else { "FAIL" };
        println!(
            "{} {:<16} {status} ({:?})",
            row.entry,
            row.check,
            row.report.method
        );
        if !row.report.passed() && !failed {
            failed = true;
            if let Some(w) = &row.report.witness {
                eprintln!("witness: {} -> {}", w.inputs.join("; "), w.discrepancy);
            }
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_report(all: bool, json_out: &Option<PathBuf>, seed_echo: bool) -> ExitCode {
    if !all {
        return usage_error("report requires --all");
    }
    let result: SuiteResult = match registry::run_full_suite(seed_echo) {
        Ok(r) => r,
        Err(e) => return usage_error(&format!("suite aborted: {e}")),
    };
    let json = result.to_json();
    match json_out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{json}"),
    }
    eprintln!(
        "checks: {} total, {} passed, {} failed",
        result.summary.total, result.summary.passed, result.summary.failed
    );
    for row in result.rows.iter().filter(|r| !r.report.passed()) {
        eprintln!("FAIL {} {}", row.entry, row.check);
        if let Some(w) = &row.report.witness {
            eprintln!("  witness: {} -> {}", w.inputs.join("; "), w.discrepancy);
        }
    }
    if result.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::List { json, filter } => cmd_list(json, filter),
        Cmd::Build { name, ring, out, params } => cmd_build(&name, &ring, &out, &params),
        Cmd::Verify { name, ring, checks, params } => cmd_verify(&name, &ring, &checks, &params),
        Cmd::Report { all, json_out, seed_echo } => cmd_report(all, &json_out, seed_echo),
    }
}
