use std::process::ExitCode;

use gperim::experiment::{emit, parse_args, run, ArgsError};

fn main() -> ExitCode {
    let config = match parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(ArgsError::Usage(e)) => {
            // help and version requests print and succeed
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
        Err(ArgsError::Invalid(e)) => {
            eprintln!("gperim: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("gperim: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&report) {
        eprintln!("gperim: {e}");
        return ExitCode::from(1);
    }
    if config.out_path.is_some() {
        print!("{}", report.summary_text());
    } else {
        eprint!("{}", report.summary_text());
    }
    ExitCode::SUCCESS
}
