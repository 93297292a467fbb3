use std::io::Read;

use delsarte::{Error, Result};
use serde_json::Value;

/// Inline JSON, a file path, or `-` for stdin.
pub fn json_arg(arg: &str) -> Result<Value> {
    if arg == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        return parse(&text, "stdin");
    }
    let trimmed = arg.trim_start();
    if trimmed.starts_with(['{', '[', '"']) || trimmed.parse::<f64>().is_ok() {
        return parse(arg, "argument");
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?;
    parse(&text, arg)
}

fn parse(text: &str, origin: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {e}")))
}
