//! Lexer/parser for the literal subset that appears inside agent action lines:
//! quoted strings (either quote style), numbers, booleans, flat arrays of
//! scalars, and objects nested at most one level below the argument map.

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LiteralError {
    pub offset: usize,
    pub message: String,
}

impl LiteralError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    pub fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, token: &str) -> Result<(), LiteralError> {
        self.skip_ws();
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    pub fn error(&self, message: impl Into<String>) -> LiteralError {
        LiteralError::new(self.pos, message)
    }

    pub fn string(&mut self) -> Result<String, LiteralError> {
        self.skip_ws();
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected a quoted string")),
        };
        self.bump();
        let mut out = String::new();
        loop {
            let c = self
                .bump()
                .ok_or_else(|| self.error("unterminated string"))?;
            match c {
                c if c == quote => return Ok(out),
                '\\' => {
                    let esc = self
                        .bump()
                        .ok_or_else(|| self.error("unterminated escape"))?;
                    match esc {
                        '"' => out.push('"'),
                        '\'' => out.push('\''),
                        '\\' => out.push('\\'),
                        '/' => out.push('/'),
                        'n' => out.push('\n'),
                        't' => out.push('\t'),
                        'r' => out.push('\r'),
                        'b' => out.push('\u{8}'),
                        'f' => out.push('\u{c}'),
                        'u' => out.push(self.unicode_escape()?),
                        other => return Err(self.error(format!("unknown escape `\\{other}`"))),
                    }
                }
                '\n' => return Err(self.error("newline inside string")),
                c => out.push(c),
            }
        }
    }

    fn hex4(&mut self) -> Result<u32, LiteralError> {
        let digits = self.rest().get(..4).ok_or_else(|| self.error("short \\u escape"))?;
        let v = u32::from_str_radix(digits, 16).map_err(|_| self.error("bad \\u escape"))?;
        self.pos += 4;
        Ok(v)
    }

    fn unicode_escape(&mut self) -> Result<char, LiteralError> {
        let hi = self.hex4()?;
        if (0xD800..0xDC00).contains(&hi) {
            if !self.eat("\\u") {
                return Err(self.error("unpaired surrogate"));
            }
            let lo = self.hex4()?;
            if !(0xDC00..0xE000).contains(&lo) {
                return Err(self.error("unpaired surrogate"));
            }
            let code = 0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00);
            return char::from_u32(code).ok_or_else(|| self.error("bad code point"));
        }
        char::from_u32(hi).ok_or_else(|| self.error("bad code point"))
    }

    fn number(&mut self) -> Result<Number, LiteralError> {
        let start = self.pos;
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_ascii_digit() || matches!(c, '-' | '+' | '.' | 'e' | 'E')))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let text = &rest[..len];
        self.pos += len;
        let integral = !text.contains(['.', 'e', 'E']);
        if integral {
            if let Ok(i) = text.parse::<i64>() {
                return Ok(Number::from(i));
            }
            if let Ok(u) = text.parse::<u64>() {
                return Ok(Number::from(u));
            }
        }
        text.parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .ok_or_else(|| LiteralError::new(start, format!("invalid number `{text}`")))
    }

    fn ident(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn scalar(&mut self) -> Result<Value, LiteralError> {
        self.skip_ws();
        match self.peek() {
            Some('"' | '\'') => Ok(Value::String(self.string()?)),
            Some(c) if c == '-' || c.is_ascii_digit() => Ok(Value::Number(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let at = self.pos;
                match self.ident() {
                    "true" | "True" => Ok(Value::Bool(true)),
                    "false" | "False" => Ok(Value::Bool(false)),
                    other => Err(LiteralError::new(at, format!("unexpected bare word `{other}`"))),
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn array(&mut self) -> Result<Value, LiteralError> {
        self.expect("[")?;
        let mut items = Vec::new();
        self.skip_ws();
        if self.eat("]") {
            return Ok(Value::Array(items));
        }
        loop {
            self.skip_ws();
            if matches!(self.peek(), Some('[' | '{')) {
                return Err(self.error("arrays may only hold scalar values"));
            }
            items.push(self.scalar()?);
            self.skip_ws();
            if self.eat(",") {
                continue;
            }
            self.expect("]")?;
            return Ok(Value::Array(items));
        }
    }

    /// An object literal. `depth` 0 is the argument map itself, 1 is a nested
    /// object value; anything deeper is rejected.
    pub fn object(&mut self, depth: usize) -> Result<Map<String, Value>, LiteralError> {
        self.expect("{")?;
        let mut map = Map::new();
        self.skip_ws();
        if self.eat("}") {
            return Ok(map);
        }
        loop {
            self.skip_ws();
            let key_at = self.pos;
            let key = self.string()?;
            if map.contains_key(&key) {
                return Err(LiteralError::new(key_at, format!("duplicate key `{key}`")));
            }
            self.expect(":")?;
            self.skip_ws();
            let value = match self.peek() {
                Some('{') if depth == 0 => Value::Object(self.object(depth + 1)?),
                Some('{') => return Err(self.error("objects nest at most one level")),
                Some('[') => self.array()?,
                _ => self.scalar()?,
            };
            map.insert(key, value);
            self.skip_ws();
            if self.eat(",") {
                continue;
            }
            self.expect("}")?;
            return Ok(map);
        }
    }
}

/// Renders a value in the canonical action-line form: double quotes,
/// `", "` and `": "` separators, insertion order preserved.
pub(crate) fn render_value(value: &Value, out: &mut String) {
    match value {
        Value::String(s) => render_string(s, out),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => render_object(map, out),
        other => out.push_str(&other.to_string()),
    }
}

pub(crate) fn render_object(map: &Map<String, Value>, out: &mut String) {
    out.push('{');
    for (i, (k, v)) in map.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        render_string(k, out);
        out.push_str(": ");
        render_value(v, out);
    }
    out.push('}');
}

pub(crate) fn render_string(s: &str, out: &mut String) {
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}

/// Checks that a value fits the literal subset the parser accepts. `depth`
/// counts enclosing objects, so the argument map itself is checked at 0.
pub(crate) fn check_value(value: &Value, depth: usize) -> Result<(), String> {
    match value {
        Value::String(_) | Value::Bool(_) => Ok(()),
        Value::Number(n) if n.as_f64().is_some_and(f64::is_finite) => Ok(()),
        Value::Number(_) => Err("non-finite number".into()),
        Value::Null => Err("null is not an argument literal".into()),
        Value::Array(items) => items.iter().try_for_each(|v| match v {
            Value::Array(_) | Value::Object(_) => Err("arrays may only hold scalar values".into()),
            v => check_value(v, depth),
        }),
        Value::Object(_) if depth > 1 => Err("objects nest at most one level".into()),
        Value::Object(map) => map.values().try_for_each(|v| check_value(v, depth + 1)),
    }
}
