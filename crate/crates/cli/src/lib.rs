//! Session files and commands for the `purity-lab` executable.

pub mod commands;
pub mod fixtures;
pub mod session;

pub use commands::{run, Outcome};
pub use session::Session;

/// Parse a session and run one command against it.
pub fn run_text(cmd: &str, session: Option<&str>, args: &[String]) -> Outcome {
    let sess = match session.map(Session::parse).transpose() {
        Ok(s) => s,
        Err(e) => return Outcome::from_error(&e),
    };
    run(cmd, sess.as_ref(), args).unwrap_or_else(|e| Outcome::from_error(&e))
}
