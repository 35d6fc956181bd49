use std::process::ExitCode;

use contact_mech::cli;

fn main() -> ExitCode {
    let env = |k: &str| std::env::var(k).ok();
    let code = cli::run(std::env::args_os(), &env, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code as u8)
}
