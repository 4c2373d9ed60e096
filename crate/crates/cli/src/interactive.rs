//! Terminal walk through the staged question flow.
//!
//! Prompts go to the `prompts` stream (stderr for the binary) so that stdout
//! carries only the results table, identical to `score`.

use std::io::{BufRead, Write};

use fuzzydx_core::session::{NO, YES};
use fuzzydx_core::{
    DiagnosisResult, EngineConfig, KnowledgeBase, Prompt, PromptKind, Session, SessionError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InteractiveError {
    #[error("input ended before the session was complete")]
    Eof,
    #[error("terminal i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// Maps one input line to option ids, or explains why it cannot.
fn parse_choice(prompt: &Prompt, line: &str) -> Result<Vec<String>, String> {
    let line = line.trim();
    if prompt.kind == PromptKind::History {
        match line.to_ascii_lowercase().as_str() {
            "y" | "yes" | "1" => return Ok(vec![YES.to_string()]),
            "n" | "no" | "2" => return Ok(vec![NO.to_string()]),
            _ => return Err("answer y or n".to_string()),
        }
    }
    let tokens: Vec<&str> = line
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect();
    let multi = prompt.kind == PromptKind::SymptomMulti;
    if !multi && tokens.len() != 1 {
        return Err("enter exactly one number".to_string());
    }
    tokens
        .iter()
        .map(|t| {
            let n: usize = t.parse().map_err(|_| format!("'{t}' is not a number"))?;
            prompt
                .options
                .get(n.wrapping_sub(1))
                .map(|o| o.option_id.clone())
                .ok_or_else(|| format!("{n} is not between 1 and {}", prompt.options.len()))
        })
        .collect()
}

fn ask(prompt: &Prompt, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "\n{}", prompt.text)?;
    if prompt.kind == PromptKind::History {
        write!(out, "[y/n] ")?;
    } else {
        for (i, o) in prompt.options.iter().enumerate() {
            writeln!(out, "  {}) {}", i + 1, o.label)?;
        }
        if prompt.kind == PromptKind::SymptomMulti {
            write!(out, "numbers separated by spaces (empty line for none): ")?;
        } else {
            write!(out, "number: ")?;
        }
    }
    out.flush()
}

/// Runs a session to completion, answering the first pending prompt each
/// turn. Invalid lines are re-asked; end of input aborts.
pub fn run_session(
    kb: &KnowledgeBase,
    config: &EngineConfig,
    input: &mut dyn BufRead,
    prompts: &mut dyn Write,
) -> Result<Vec<DiagnosisResult>, InteractiveError> {
    let mut session = Session::start(kb);
    while !session.is_complete() {
        let pending = session.pending_prompts(kb)?;
        let prompt = &pending[0];
        ask(prompt, prompts)?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Err(InteractiveError::Eof);
        }
        let selection = match parse_choice(prompt, &line) {
            Ok(selection) => selection,
            Err(msg) => {
                writeln!(prompts, "  {msg}")?;
                continue;
            }
        };
        match session.submit(kb, config, &prompt.prompt_id, &selection) {
            Ok(next) => session = next,
            Err(SessionError::InvalidOption { reason, .. }) => {
                writeln!(prompts, "  {reason}")?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    writeln!(prompts)?;
    Ok(session.results.unwrap_or_default())
}
