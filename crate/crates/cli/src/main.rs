use benfordnet_cli::{run, Cli, RunConfig};
use clap::Parser;

fn main() {
    let cli = Cli::parse();
    let (kind, flags) = cli.command.split();
    let code = match RunConfig::resolve(kind, flags).and_then(|cfg| run(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("benfordnet: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
