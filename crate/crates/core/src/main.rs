use clap::Parser;
use fsbp::cli::{run, Cli, EXIT_OK, EXIT_PARSE};

fn main() {
    fsbp::solvers::configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own code for usage errors is 2, which we reserve for construction
            let _ = e.print();
            std::process::exit(if e.use_stderr() { EXIT_PARSE } else { EXIT_OK });
        }
    };
    std::process::exit(run(cli));
}
