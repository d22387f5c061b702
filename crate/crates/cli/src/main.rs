//! Command-line front end: field inspection, hybrid-sum evaluation with
//! direct/closed cross-checks, codebook synthesis with spectrum files,
//! sequence cross-correlation, and the verification suites.
//!
//! Exit codes: 0 = pass, 1 = verification failure, 2 = invalid
//! configuration.

mod commands;
mod specbuild;
mod verify;

use clap::{Args, Parser, Subcommand};
use dualbent::Error;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "dualbent",
    about = "Hybrid character sums from vectorial dual-bent functions and \
             asymptotically optimal codebooks",
    version
)]
struct Cli {
    /// Worker threads for spectrum and Walsh sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// Parameters selecting a cataloged function.
#[derive(Args, Clone, Debug)]
pub struct FamilyOpts {
    /// Odd prime characteristic.
    #[arg(long)]
    pub p: Option<u64>,
    /// Family: ext-square, pair-monomial, diag-quadratic, unitary-form or
    /// composite-maiorana.
    #[arg(long)]
    pub family: Option<String>,
    /// Codomain degree m (F maps into F_{p^m}).
    #[arg(long)]
    pub m: Option<u32>,
    /// Scalar subfield degree t (divides m; defaults to m).
    #[arg(long)]
    pub t: Option<u32>,
    /// Domain degree: total n for ext-square/unitary-form, the component
    /// degree n' for pair-monomial.
    #[arg(long)]
    pub n: Option<u32>,
    /// Component degrees n', n'' for composite-maiorana.
    #[arg(long, value_delimiter = ',')]
    pub degrees: Option<Vec<u32>>,
    /// Element code e (field named by the family).
    #[arg(long)]
    pub e: Option<u32>,
    /// Monomial exponent u (pair-monomial).
    #[arg(long)]
    pub u: Option<u64>,
    /// Coefficient codes α₁,α₂,… (diag-quadratic: the form; composite: the
    /// three selector coefficients).
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<u32>>,
    /// β code (composite-maiorana).
    #[arg(long)]
    pub beta: Option<u32>,
    /// γ code (composite-maiorana).
    #[arg(long)]
    pub gamma: Option<u32>,
    /// L coefficients a₀,a₁,… (composite-maiorana).
    #[arg(long, value_delimiter = ',')]
    pub l_coeffs: Option<Vec<u32>>,
}

#[derive(Subcommand)]
enum Command {
    /// Describe the pinned GF(p^k) representation.
    Field {
        #[arg(long)]
        p: u64,
        /// Extension degree.
        #[arg(long, visible_alias = "n")]
        k: u32,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a hybrid sum (s1, s-hat1, s2, s-hat2 or t) directly and in
    /// closed form, with residuals.
    Sum {
        /// One of: s1, s-hat1, s2, s-hat2, t.
        kind: String,
        #[command(flatten)]
        family: FamilyOpts,
        /// Point index a (decimal code).
        #[arg(long)]
        a: Option<u64>,
        /// Sweep every a ≠ 0 and report the value multiset.
        #[arg(long)]
        all: bool,
        /// Multiplicative-character index j for the hat sums.
        #[arg(long)]
        psi_index: Option<u64>,
        /// Write the rows as a JSON array.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Build a codebook (cd, cd1 or hadamard), print N K I_max I_W ratio,
    /// and optionally write codebook/spectrum files.
    Codebook {
        /// One of: cd, cd1, hadamard.
        construction: String,
        #[command(flatten)]
        family: FamilyOpts,
        /// Spectrum mode: pairwise or translate (default: translate for the
        /// character-restriction codebooks, pairwise for hadamard).
        #[arg(long)]
        mode: Option<String>,
        /// Directory for codebook.json and spectrum.json.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Compute a spectrum from a codebook file or from construction flags.
    Spectrum {
        /// Codebook JSON file (pairwise mode only).
        #[arg(long = "in", value_name = "FILE")]
        input: Option<std::path::PathBuf>,
        /// Construction (cd, cd1, hadamard) when building from flags.
        #[arg(long)]
        construction: Option<String>,
        #[command(flatten)]
        family: FamilyOpts,
        #[arg(long)]
        mode: Option<String>,
        /// Write the spectrum JSON here.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Cross-correlation distribution of the m-sequence against the
    /// quadratic-residue sequence of F.
    SeqXcorr {
        #[command(flatten)]
        family: FamilyOpts,
    },
    /// Run a verification suite: characters, bent, sums, codebooks or
    /// tables.
    Verify {
        /// Suite name.
        suite: String,
        /// Restrict the tables suite to one row (e.g. tab1-row1).
        #[arg(long)]
        which: Option<String>,
        #[command(flatten)]
        family: FamilyOpts,
        /// Character index for the sums suite (default: all admissible).
        #[arg(long)]
        psi_index: Option<u64>,
    },
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        // config-shaped problems
        Error::NotPrime(_)
        | Error::EvenCharacteristic
        | Error::TableTooLarge { .. }
        | Error::FieldMismatch
        | Error::SpaceMismatch
        | Error::ZeroInverse
        | Error::NotSubfieldDegree { .. }
        | Error::CodeOutOfRange { .. }
        | Error::Constraint(_)
        | Error::Precondition(_)
        | Error::Invalid(_) => ExitCode::from(2),
        // the function is not what it claims to be
        Error::NotBent(_) | Error::Unverified(_) => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .ok();
    }
    let outcome = match cli.command {
        Command::Field { p, k, json } => commands::cmd_field(p, k, json),
        Command::Sum {
            kind,
            family,
            a,
            all,
            psi_index,
            out,
        } => commands::cmd_sum(&kind, &family, a, all, psi_index, out.as_deref()),
        Command::Codebook {
            construction,
            family,
            mode,
            out,
        } => commands::cmd_codebook(&construction, &family, mode.as_deref(), out.as_deref()),
        Command::Spectrum {
            input,
            construction,
            family,
            mode,
            out,
        } => commands::cmd_spectrum(
            input.as_deref(),
            construction.as_deref(),
            &family,
            mode.as_deref(),
            out.as_deref(),
        ),
        Command::SeqXcorr { family } => commands::cmd_seq_xcorr(&family),
        Command::Verify {
            suite,
            which,
            family,
            psi_index,
        } => verify::cmd_verify(&suite, which.as_deref(), &family, psi_index),
    };
    match outcome {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
