use clap::Parser;

fn main() {
    // Die quietly when stdout is closed early (e.g. piped into `head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = tsentinel::cli::Cli::parse();
    if let Err(err) = tsentinel::cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
