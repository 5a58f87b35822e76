use std::io::{Read, Write};
use std::process::ExitCode;

use clap::Parser;

use purity_lab_cli::commands::{needs_session, COMMANDS};
use purity_lab_cli::run_text;

#[derive(Parser)]
#[command(name = "purity-lab", version, about = "Exact computations with pp formulas, lattices and Ziegler spectra")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Run everything on one thread.
    #[arg(long)]
    sequential: bool,
    /// One of the listed commands.
    command: String,
    /// Session file (`-` for standard input) followed by command arguments.
    #[arg(allow_hyphen_values = true, trailing_var_arg = true)]
    args: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.sequential {
        purity_lab::par::set_sequential(true);
    }
    if !COMMANDS.contains(&cli.command.as_str()) {
        eprintln!("unknown command '{}'; available: {}", cli.command, COMMANDS.join(", "));
        return ExitCode::from(2);
    }
    let (session, rest) = if needs_session(&cli.command) {
        let Some(path) = cli.args.first() else {
            eprintln!("{} needs a session file", cli.command);
            return ExitCode::from(2);
        };
        let text = if path == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map(|_| s)
        } else {
            std::fs::read_to_string(path)
        };
        match text {
            Ok(t) => (Some(t), &cli.args[1..]),
            Err(e) => {
                eprintln!("error: cannot read {path}: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        (None, &cli.args[..])
    };
    let out = run_text(&cli.command, session.as_deref(), rest);
    if cli.json {
        let mut j = out.json.clone();
        if let Some(obj) = j.as_object_mut() {
            obj.insert("exit".into(), out.code.into());
        }
        emit(&serde_json::to_string_pretty(&j).expect("json"));
    } else if out.code >= 2 {
        eprintln!("{}", out.text);
    } else {
        emit(&out.text);
    }
    ExitCode::from(out.code as u8)
}

/// A closed pipe on stdout is not an error.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}
