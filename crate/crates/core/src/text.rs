//! Helpers shared by the text forms.

use crate::{Error, Result};

/// Splits `s` at every `sep` that is not nested inside `[]`, `{}` or `()`.
pub(crate) fn split_top(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '{' | '(' => depth += 1,
            ']' | '}' | ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced `{c}` in `{s}`")));
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in `{s}`")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

/// Splits a bracketed list body, dropping a single empty entry.
pub(crate) fn split_list(body: &str) -> Result<Vec<&str>> {
    let body = body.trim();
    if body.is_empty() {
        return Ok(vec![]);
    }
    Ok(split_top(body, ';')?.into_iter().map(str::trim).collect())
}

pub(crate) fn strip_delimited(s: &str, open: char, close: char) -> Result<&str> {
    let s = s.trim();
    s.strip_prefix(open)
        .and_then(|r| r.strip_suffix(close))
        .ok_or_else(|| Error::Parse(format!("expected `{open}…{close}`, got `{s}`")))
}

/// Parses `key=value` pairs separated by top-level `;`.
pub(crate) fn fields(s: &str) -> Result<Vec<(&str, &str)>> {
    split_top(s.trim(), ';')?
        .into_iter()
        .map(|f| {
            f.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{f}`")))
        })
        .collect()
}
