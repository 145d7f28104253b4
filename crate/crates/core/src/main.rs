use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    vcshare::cli::init_thread_pool();
    let code = vcshare::cli::run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
