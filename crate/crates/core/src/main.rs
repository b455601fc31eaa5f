use clap::Parser;

fn main() -> std::process::ExitCode {
    pdm_spectra::cli::run(pdm_spectra::cli::Cli::parse())
}
