//! Command-line flags. Every knob is optional here so that a config file
//! can supply it; defaults are applied after merging.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "wannier-stark", version, about = "Wannier-Stark spectra and Bloch-oscillation dynamics of double-periodic lattices")]
pub struct Cli {
    /// Plain-text `key = value` file; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path [default: standard output]
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for sweeps [default: available parallelism]
    #[arg(long, global = true, env = "WANNIER_STARK_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Bloch bands over the reduced zone: kappa,e_minus,e_plus
    Bands {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Number of quasimomenta in [-pi/2, pi/2) [default: 256]
        #[arg(long)]
        n_points: Option<usize>,
    },
    /// Wannier-Stark levels: inv_f,energy,scaled_energy,branch,n,method
    Spectrum {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        field: FieldArgs,
        /// truncated | floquet | wu-yang | expansion | expansion-first | bm | adiabatic [default: floquet]
        #[arg(long)]
        method: Option<String>,
        /// Keep only the levels in the fundamental interval -1 < E/F <= 1
        #[arg(long)]
        scaled: bool,
        /// Ladder indices `min:max` [default: -2:2]
        #[arg(long, allow_hyphen_values = true)]
        n_range: Option<String>,
        /// Chain length for the truncated method [default: automatic]
        #[arg(long)]
        n_sites: Option<usize>,
    },
    /// Avoided crossings in a 1/F range `min:max:resolution`: inv_f_star,gap,branch_pair
    Crossings {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Semiclassical gap estimate: inv_f,theta0,ratio,gap
    GapEstimate {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Time-averaged upper-band population: inv_f,p_upper_mean
    Resonances {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        field: FieldArgs,
        /// Bloch periods to average over [default: 20]
        #[arg(long)]
        periods: Option<usize>,
        /// Initial quasimomenta [default: 64]
        #[arg(long)]
        kappa_grid: Option<usize>,
    },
    /// Packet transfer by a 1/F ramp: time,site,density plus <stem>_kappa.csv with time,mean_kappa,p_upper
    Transfer {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Ramp of 1/F as `start:end` [default: 9.4:8.7]
        #[arg(long)]
        inv_f: Option<String>,
        /// Ramp duration in Bloch periods [default: 120]
        #[arg(long)]
        periods: Option<f64>,
        /// Chain length [default: 512]
        #[arg(long)]
        n_sites: Option<usize>,
        /// Packet width in unit cells [default: 10]
        #[arg(long)]
        sigma: Option<f64>,
        /// Initial quasimomentum [default: 0]
        #[arg(long, allow_hyphen_values = true)]
        kappa0: Option<f64>,
        /// Recorded samples per Bloch period [default: 8]
        #[arg(long)]
        samples_per_period: Option<usize>,
    },
    /// Continuum Bloch bands: k,band_index,energy
    ContinuumBands {
        #[command(flatten)]
        potential: PotentialArgs,
        /// Number of bands [default: 2]
        #[arg(long)]
        n_bands: Option<usize>,
    },
    /// Tight-binding fit of the two lowest continuum bands: j1,j2,delta,offset,residual
    TbFit {
        #[command(flatten)]
        potential: PotentialArgs,
    },
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Intracell hopping
    #[arg(long)]
    pub j1: Option<f64>,
    /// Intercell hopping
    #[arg(long)]
    pub j2: Option<f64>,
    /// On-site offset (sites carry -delta, +delta)
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Single field strength
    #[arg(long)]
    pub f: Option<f64>,
    /// Sweep of 1/F as `min:max:count`
    #[arg(long)]
    pub inv_f: Option<String>,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    /// Constant shift V0 [default: -0.117]
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<f64>,
    /// Amplitude V1 of cos(2 pi x + phi1) [default: -0.15]
    #[arg(long, allow_hyphen_values = true)]
    pub v1: Option<f64>,
    /// Amplitude V2 of cos(4 pi x + phi2) [default: 0.3]
    #[arg(long, allow_hyphen_values = true)]
    pub v2: Option<f64>,
    /// Phase phi1 [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<f64>,
    /// Phase phi2 [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<f64>,
    /// Plane waves 2M+1, odd and at least 21 [default: 41]
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Number of k points in [-pi, pi) [default: 128]
    #[arg(long)]
    pub n_k: Option<usize>,
}
