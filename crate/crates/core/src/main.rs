use std::io;

fn main() {
    env_logger::init();
    let code = geoinv::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
