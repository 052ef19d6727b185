use std::io::{self, BufRead, Write};
use std::sync::Arc;

use negotia_core::session::{DomainBundle, Session};

const HELP: &str = "Type an utterance, or /state, /help, /quit.";

/// Runs an interactive dialogue over `input` and `output`. System turns are
/// printed as `S: <text>`; the prompt is `U: `.
pub fn run<R: BufRead, W: Write>(bundle: Arc<DomainBundle>, mut input: R, mut output: W) -> io::Result<()> {
    let mut session = match Session::new("repl", bundle) {
        Ok(s) => s,
        Err(e) => return writeln!(output, "error: {e}"),
    };
    writeln!(output, "S: {}", session.greeting())?;
    let mut line = String::new();
    loop {
        write!(output, "U: ")?;
        output.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            writeln!(output)?;
            return Ok(());
        }
        match line.trim() {
            "" => continue,
            "/quit" => return Ok(()),
            "/help" => writeln!(output, "{HELP}")?,
            "/state" => {
                let json = serde_json::to_string_pretty(&session.summary()).map_err(io::Error::other)?;
                writeln!(output, "{json}")?;
            }
            text if text.starts_with('/') => writeln!(output, "unknown command `{text}`. {HELP}")?,
            text => match session.post_utterance(text) {
                Ok(reply) => {
                    writeln!(output, "S: {}", reply.system_text)?;
                    if reply.state.ended {
                        return Ok(());
                    }
                }
                Err(e) => writeln!(output, "error: {e}")?,
            },
        }
    }
}

/// System turns from a REPL transcript, in order.
pub fn system_turns(transcript: &str) -> Vec<String> {
    transcript.lines().flat_map(|l| l.split("U: ")).filter_map(|l| l.strip_prefix("S: ")).map(str::to_owned).collect()
}
