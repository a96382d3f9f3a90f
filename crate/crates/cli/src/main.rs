use std::process::ExitCode;

fn main() -> ExitCode {
    if let Some(n) = std::env::var("QDESIGN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let args: Vec<std::ffi::OsString> = std::env::args_os().collect();
    let code = qdesign_cli::run_with_args(args, &mut std::io::stdout(), &mut std::io::stderr());
    ExitCode::from(code)
}
