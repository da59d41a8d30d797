use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use escatter_entropy::{
    render, run, summary_line, write_atomic, RunConfig, Settings, EXIT_CONFIG, EXIT_NUMERIC,
};

/// Entropies of electron-electron Coulomb scattering.
///
/// Commands and their columns (every table ends with a `status` column):
///
///   spinless-sweep    energy_ev packet_nm k_scale channel geometry epsilon delta_theta
///                     cells entropy modified_entropy jaynes_entropy
///   sphere-sweep      same columns, sphere pixels
///   vn-compare        energy_ev packet_nm k_scale n_grid s_ring s_vn s_diagonal abs_diff
///                     trace max_eigenvalue
///   spin-sweep        energy_ev packet_nm k_scale s_spinless s_par s_par_modified s_ap
///                     s_ap_modified par_minus_spinless ap_minus_par
///   postselect-range  energy_ev theta_r cells s_spinless s_par s_ap delta_s par_zero_weight
///   equator           energy_ev delta_theta cells s_par s_par_modified s_ap s_ap_modified
///
/// Entropies are in bits, angles in radians. Lists take `a,b,c` or `start:stop:count`
/// (geometric).
#[derive(Debug, Parser)]
#[command(name = "escatter-entropy", version, verbatim_doc_comment)]
struct Cli {
    /// spinless-sweep | sphere-sweep | vn-compare | spin-sweep | postselect-range | equator
    command: Option<String>,
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Total CM kinetic energy in eV.
    #[arg(long)]
    energy_ev: Option<String>,
    /// Energies in eV, `1,10,100` or `1:50000:20`.
    #[arg(long)]
    energy_list: Option<String>,
    /// Packet extension L in nm [default: 100].
    #[arg(long)]
    packet_nm: Option<String>,
    /// Multiplier on the wave number K = sqrt(E) [default: 1].
    #[arg(long)]
    k_scale: Option<String>,
    /// Largest meridian grid accepted [default: 4096].
    #[arg(long)]
    grid_cap: Option<String>,
    /// Meridian nodes for vn-compare [default: 512].
    #[arg(long)]
    n_grid: Option<String>,
    /// spinless | parallel | antiparallel | distinguishable
    #[arg(long)]
    channel: Option<String>,
    /// rings | sphere | meridian | equator
    #[arg(long)]
    geometry: Option<String>,
    /// Post-selected ranges [pi/2 - theta_r, pi/2], comma separated.
    #[arg(long)]
    theta_r: Option<String>,
    /// Post-select this many cells next to pi/2 instead of a range.
    #[arg(long)]
    cells: Option<String>,
    /// Equator pixel widths in mrad, instead of deriving them from energy and packet.
    #[arg(long)]
    delta_theta_mrad: Option<String>,
    /// Output file; the table goes to stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// csv | json [default: csv, or json for a .json output]
    #[arg(long)]
    format: Option<String>,
    /// Worker threads, 0 = all cores. Falls back to ESCATTER_THREADS.
    #[arg(long)]
    threads: Option<String>,
}

impl Cli {
    fn settings(self) -> Settings {
        Settings {
            command: self.command,
            energy_ev: self.energy_ev,
            energy_list: self.energy_list,
            packet_nm: self.packet_nm,
            k_scale: self.k_scale,
            grid_cap: self.grid_cap,
            n_grid: self.n_grid,
            channel: self.channel,
            geometry: self.geometry,
            theta_r: self.theta_r,
            cells: self.cells,
            delta_theta_mrad: self.delta_theta_mrad,
            out: self.out,
            format: self.format,
            threads: self.threads,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(p) => match Settings::load(p) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        },
        None => Settings::default(),
    };
    let cfg = match RunConfig::from_settings(&file.overridden_by(cli.settings())) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let table = match run(&cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let text = render(&cfg, &table);
    match &cfg.out {
        Some(path) => {
            for i in 0..table.rows.len() {
                println!("{}", summary_line(&table, i));
            }
            if let Err(e) = write_atomic(path, text.as_bytes()) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
        None => {
            for i in 0..table.rows.len() {
                eprintln!("{}", summary_line(&table, i));
            }
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
    }
    if let Some((i, row)) = table.first_failure() {
        eprintln!("row {i} failed: {}", row.status);
        return ExitCode::from(EXIT_NUMERIC as u8);
    }
    ExitCode::SUCCESS
}
