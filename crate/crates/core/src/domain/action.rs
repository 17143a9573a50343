use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::literal::{self, Cursor, LiteralError};

/// Argument map of a tool call. Insertion order is preserved and is part of
/// the canonical rendering.
pub type Args = Map<String, Value>;

/// A parsed planner output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    ApiCall { tool: String, args: Args },
    Finish { reason: String },
}

impl Action {
    pub fn call(tool: impl Into<String>, args: Args) -> Self {
        Action::ApiCall {
            tool: tool.into(),
            args,
        }
    }

    pub fn finish(reason: impl Into<String>) -> Self {
        Action::Finish {
            reason: reason.into(),
        }
    }

    pub fn is_finish(&self) -> bool {
        matches!(self, Action::Finish { .. })
    }

    pub fn tool(&self) -> Option<&str> {
        match self {
            Action::ApiCall { tool, .. } => Some(tool),
            Action::Finish { .. } => None,
        }
    }

    pub fn args(&self) -> Option<&Args> {
        match self {
            Action::ApiCall { args, .. } => Some(args),
            Action::Finish { .. } => None,
        }
    }

    /// Canonical single-line form: `api_call("name", {...})` or
    /// `finish(reason="...")`.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        match self {
            Action::ApiCall { tool, args } => {
                out.push_str("api_call(");
                literal::render_string(tool, &mut out);
                out.push_str(", ");
                literal::render_object(args, &mut out);
                out.push(')');
            }
            Action::Finish { reason } => {
                out.push_str("finish(reason=");
                literal::render_string(reason, &mut out);
                out.push(')');
            }
        }
        out
    }

    /// Whether the action only uses literals the line grammar can express.
    pub fn is_representable(&self) -> bool {
        match self {
            Action::ApiCall { args, .. } => {
                literal::check_value(&Value::Object(args.clone()), 0).is_ok()
            }
            Action::Finish { .. } => true,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionParseError {
    /// No `api_call(` / `finish(` line was found.
    #[error("no api_call(...) or finish(...) found in {raw:?}")]
    UnknownForm { raw: String },
    /// A call was found but its body does not follow the grammar.
    #[error("malformed {form} at byte {offset}: {message} (line {line:?})")]
    Malformed {
        form: &'static str,
        line: String,
        offset: usize,
        message: String,
    },
}

impl ActionParseError {
    pub fn raw(&self) -> &str {
        match self {
            ActionParseError::UnknownForm { raw } => raw,
            ActionParseError::Malformed { line, .. } => line,
        }
    }
}

/// Removes markdown code fences, keeping the body of the first fenced block
/// when one exists.
pub(crate) fn strip_fences(text: &str) -> &str {
    let trimmed = text.trim();
    let Some(start) = trimmed.find("```") else {
        return trimmed;
    };
    let after = &trimmed[start + 3..];
    // drop an info string such as ```python
    let body = match after.find('\n') {
        Some(nl) if !after[..nl].trim_start().starts_with("api_call") && !after[..nl].trim_start().starts_with("finish") => &after[nl + 1..],
        _ => after,
    };
    match body.find("```") {
        Some(end) => body[..end].trim(),
        None => body.trim(),
    }
}

fn call_form(line: &str) -> Option<&'static str> {
    let head = line.trim_start();
    for form in ["api_call", "finish"] {
        if let Some(rest) = head.strip_prefix(form) {
            if rest.trim_start().starts_with('(') {
                return Some(form);
            }
        }
    }
    None
}

/// Parses a planner reply into an [`Action`].
///
/// Leading chatter and code fences are ignored; the first line that starts
/// with `api_call(` or `finish(` is parsed. A trailing `//` or `#` comment on
/// that line is allowed.
pub fn parse_action(text: &str) -> Result<Action, ActionParseError> {
    let body = strip_fences(text);
    let Some((line, form)) = body
        .lines()
        .find_map(|l| call_form(l).map(|f| (l.trim(), f)))
    else {
        return Err(ActionParseError::UnknownForm {
            raw: text.to_string(),
        });
    };
    let malformed = |e: LiteralError| ActionParseError::Malformed {
        form,
        line: line.to_string(),
        offset: e.offset,
        message: e.message,
    };
    let mut cur = Cursor::new(line);
    let action = match form {
        "api_call" => parse_api_call(&mut cur),
        _ => parse_finish(&mut cur),
    }
    .map_err(malformed)?;
    cur.skip_ws();
    let trailing = cur.rest();
    if !(trailing.is_empty() || trailing.starts_with("//") || trailing.starts_with('#')) {
        return Err(malformed(cur.error("unexpected trailing text")));
    }
    Ok(action)
}

fn parse_api_call(cur: &mut Cursor<'_>) -> Result<Action, LiteralError> {
    cur.expect("api_call")?;
    cur.expect("(")?;
    let tool = cur.string()?;
    if tool.trim().is_empty() {
        return Err(cur.error("empty tool name"));
    }
    cur.expect(",")?;
    let args = cur.object(0)?;
    cur.skip_ws();
    // tolerate a trailing comma before the closing paren
    cur.eat(",");
    cur.expect(")")?;
    Ok(Action::ApiCall { tool, args })
}

fn parse_finish(cur: &mut Cursor<'_>) -> Result<Action, LiteralError> {
    cur.expect("finish")?;
    cur.expect("(")?;
    cur.expect("reason")?;
    cur.expect("=")?;
    let reason = cur.string()?;
    cur.expect(")")?;
    Ok(Action::Finish { reason })
}
