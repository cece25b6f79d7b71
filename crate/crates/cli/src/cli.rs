use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "heegner-aj", version, about = "Abel-Jacobi images of explicit Heegner cycles")]
pub struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "HEEGNER_AJ_PREC", default_value_t = 128)]
    pub prec: usize,
    /// Target relative error of truncated series.
    #[arg(long, global = true, default_value = "1e-30")]
    pub eps: f64,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output layout; the primes listings are always plain rows.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Representative of the Abel-Jacobi image at one CM point.
    Aj(AjArgs),
    /// The q+1 CM points of cyclic q-isogenies and their conductors.
    Isog(IsogArgs),
    /// Relative error against the leading term along a family of primes p.
    Sweep(SweepArgs),
    /// Admissible prime pairs, or the q search for an auxiliary prime ell.
    Primes(PrimesArgs),
    /// Period functional of a polynomial between the cusps 0 and i infinity.
    Periods(PeriodsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// d_K, with K = Q(sqrt(-d_K)).
    #[arg(long = "dk", default_value_t = 11)]
    pub d_k: u64,
    /// Level-structure entry c of t = (c tau + d)/N.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub c: i64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub d: i64,
}

#[derive(Debug, Args)]
pub struct AjArgs {
    #[arg(long)]
    pub newform: PathBuf,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Omit for the q-isogeny point.
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub q: u64,
    /// A residue mod q, or `inf`.
    #[arg(long, default_value = "inf")]
    pub beta: String,
}

#[derive(Debug, Args)]
pub struct IsogArgs {
    #[arg(long = "dk", default_value_t = 11)]
    pub d_k: u64,
    #[arg(long)]
    pub q: u64,
    /// Level structure `(c, d, N)` used for the `beta'` column.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub c: i64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub d: i64,
    #[arg(long, default_value_t = 5)]
    pub level: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub newform: PathBuf,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Defaults to the least admissible inert q.
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, default_value = "1")]
    pub beta: String,
    /// Range of gamma = pq or p/q.
    #[arg(long, default_value_t = 10.0)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 200.0)]
    pub gamma_max: f64,
    /// Keep at most this many rows.
    #[arg(long)]
    pub max_rows: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PrimesArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[arg(long, default_value_t = 5)]
    pub level: u64,
    /// List pairs with p up to this bound.
    #[arg(long, default_value_t = 500, conflicts_with = "ell")]
    pub limit: u64,
    /// Search q = -1 mod ell instead of listing pairs.
    #[arg(long)]
    pub ell: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct PeriodsArgs {
    #[arg(long)]
    pub newform: PathBuf,
    /// Integer coefficients `c0,c1,...` of P.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
}
