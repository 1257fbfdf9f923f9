//! Plain-text monoid spec files.
//!
//! ```text
//! # comments and blank lines are ignored
//! kind = finite            generators = 1/2, 1/3
//! kind = geometric         base = 2/3
//! kind = multicyclic       bases = 2/3, 3/2
//! kind = prime_family      terms = 3 + 1/p(2*k), 3 - 1/p(2*k+1)
//! kind = union             followed by one `[part]` block per member spec
//! ```
//!
//! Each key sits on its own line as `key = value`. A union file holds
//! `kind = union` and then `[part]` headers, each followed by the lines of a
//! non-union spec.

use crate::error::{Error, Result};
use crate::numeric::PositiveRational;
use crate::spec::{AffineIndex, GeneratorSpec, PrimeTerm, Sign};

struct Line<'a> {
    number: usize,
    key: &'a str,
    value: &'a str,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_spec(text: &str) -> Result<GeneratorSpec> {
    let mut head: Vec<Line> = Vec::new();
    let mut parts: Vec<(usize, Vec<Line>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content == "[part]" {
            parts.push((number, Vec::new()));
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(number, format!("expected `key = value`, found `{content}`")))?;
        let line = Line { number, key: key.trim(), value: value.trim() };
        match parts.last_mut() {
            Some((_, lines)) => lines.push(line),
            None => head.push(line),
        }
    }

    let spec = build(&head, 1, true)?;
    match spec {
        Some(spec) => {
            if let Some((n, _)) = parts.first() {
                return Err(err(*n, "`[part]` is only allowed in union specs"));
            }
            Ok(spec)
        }
        None => {
            if parts.is_empty() {
                let n = head.first().map_or(1, |l| l.number);
                return Err(err(n, "union spec has no `[part]` blocks"));
            }
            let members = parts
                .iter()
                .map(|(n, lines)| build(lines, *n, false).map(|s| s.expect("non-union part")))
                .collect::<Result<Vec<_>>>()?;
            Ok(GeneratorSpec::Union(members))
        }
    }
}

/// `Ok(None)` signals a union header whose members follow.
fn build(lines: &[Line], header_line: usize, allow_union: bool) -> Result<Option<GeneratorSpec>> {
    let mut kind: Option<&Line> = None;
    for l in lines {
        if l.key == "kind" {
            if kind.is_some() {
                return Err(err(l.number, "duplicate `kind` line"));
            }
            kind = Some(l);
        }
    }
    let kind = kind.ok_or_else(|| err(header_line, "missing `kind` line"))?;
    let allowed: &[&str] = match kind.value {
        "finite" => &["generators"],
        "geometric" => &["base"],
        "multicyclic" => &["bases"],
        "prime_family" => &["terms"],
        "union" if allow_union => &[],
        "union" => return Err(err(kind.number, "nested unions are not supported")),
        other => return Err(err(kind.number, format!("unknown kind `{other}`"))),
    };
    let mut value: Option<&Line> = None;
    for l in lines.iter().filter(|l| l.key != "kind") {
        if !allowed.contains(&l.key) {
            return Err(err(l.number, format!("unexpected key `{}` for kind `{}`", l.key, kind.value)));
        }
        if value.is_some() {
            return Err(err(l.number, format!("duplicate `{}` line", l.key)));
        }
        value = Some(l);
    }
    if allowed.is_empty() {
        return Ok(None);
    }
    let v = value.ok_or_else(|| err(kind.number, format!("kind `{}` requires `{}`", kind.value, allowed[0])))?;
    let spec = match kind.value {
        "finite" => GeneratorSpec::Finite(positive_list(v)?),
        "geometric" => {
            let mut b = positive_list(v)?;
            if b.len() != 1 {
                return Err(err(v.number, "`base` takes a single rational"));
            }
            GeneratorSpec::Geometric(b.remove(0))
        }
        "multicyclic" => GeneratorSpec::MultiCyclic(positive_list(v)?),
        "prime_family" => {
            let terms = split_list(v)?
                .into_iter()
                .map(|t| parse_term(t).map_err(|m| err(v.number, m)))
                .collect::<Result<Vec<_>>>()?;
            let spec = GeneratorSpec::PrimeFamily(terms);
            spec.validate().map_err(|e| err(v.number, e.to_string()))?;
            spec
        }
        _ => unreachable!(),
    };
    Ok(Some(spec))
}

fn split_list<'a>(l: &Line<'a>) -> Result<Vec<&'a str>> {
    let items: Vec<&str> = l.value.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(err(l.number, "empty list entry"));
    }
    Ok(items)
}

fn positive_list(l: &Line) -> Result<Vec<PositiveRational>> {
    split_list(l)?
        .into_iter()
        .map(|s| {
            let q: PositiveRational = s.parse().map_err(|e: Error| err(l.number, e.to_string()))?;
            if q.is_zero() {
                return Err(err(l.number, format!("generator `{s}` is not positive")));
            }
            Ok(q)
        })
        .collect()
}

/// `c + 1/p(a*k+b)` or `c - 1/p(...)`.
fn parse_term(t: &str) -> std::result::Result<PrimeTerm, String> {
    let t: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    let (pos, sign) = t
        .char_indices()
        .find_map(|(i, c)| match c {
            '+' => Some((i, Sign::Plus)),
            '-' => Some((i, Sign::Minus)),
            _ => None,
        })
        .ok_or_else(|| format!("term `{t}` lacks `+` or `-`"))?;
    let offset: PositiveRational = t[..pos].parse().map_err(|e: Error| e.to_string())?;
    let rest = &t[pos + 1..];
    let inner = rest
        .strip_prefix("1/p(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| format!("term `{t}`: expected `1/p(<index>)` after the sign"))?;
    Ok(PrimeTerm::new(offset, sign, parse_index(inner).ok_or_else(|| format!("bad index `{inner}`"))?))
}

/// `k`, `a*k`, `k+b`, or `a*k+b`.
fn parse_index(s: &str) -> Option<AffineIndex> {
    let (lin, intercept) = match s.split_once('+') {
        Some((l, b)) => (l, b.parse().ok()?),
        None => (s, 0),
    };
    let slope = match lin {
        "k" => 1,
        _ => lin.strip_suffix("*k")?.parse().ok()?,
    };
    (slope >= 1).then(|| AffineIndex::new(slope, intercept))
}

/// Renders `spec` in the file format; `parse_spec` reads it back.
pub fn render_spec(spec: &GeneratorSpec) -> String {
    fn body(spec: &GeneratorSpec) -> String {
        let list = |qs: &[PositiveRational]| qs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        match spec {
            GeneratorSpec::Finite(g) => format!("kind = finite\ngenerators = {}\n", list(g)),
            GeneratorSpec::Geometric(b) => format!("kind = geometric\nbase = {b}\n"),
            GeneratorSpec::MultiCyclic(b) => format!("kind = multicyclic\nbases = {}\n", list(b)),
            GeneratorSpec::PrimeFamily(terms) => {
                let t: Vec<String> = terms.iter().map(ToString::to_string).collect();
                format!("kind = prime_family\nterms = {}\n", t.join(", "))
            }
            GeneratorSpec::Union(_) => unreachable!("nested union"),
        }
    }
    match spec {
        GeneratorSpec::Union(parts) => {
            let mut out = String::from("kind = union\n");
            for p in parts {
                out.push_str("[part]\n");
                out.push_str(&body(p));
            }
            out
        }
        other => body(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> PositiveRational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_every_kind() {
        assert_eq!(
            parse_spec("kind = finite\ngenerators = 1/2, 1/3\n").unwrap(),
            GeneratorSpec::Finite(vec![q("1/2"), q("1/3")])
        );
        assert_eq!(parse_spec("# c\nkind=geometric\nbase=2/3").unwrap(), GeneratorSpec::Geometric(q("2/3")));
        assert_eq!(
            parse_spec("kind = prime_family\nterms = 3 + 1/p(2*k), 3 - 1/p(2*k+1)").unwrap(),
            GeneratorSpec::prime_offset_three()
        );
        let u = parse_spec(
            "kind = union\n[part]\nkind = prime_family\nterms = 3 + 1/p(2*k)\n[part]\nkind = finite\ngenerators = 3\n",
        )
        .unwrap();
        assert!(matches!(u, GeneratorSpec::Union(ref p) if p.len() == 2));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_spec("kind = finite\n\ngenerators = 1, 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_spec("kind = geometric\nbase = -2/3").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_spec("kind = blob\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_spec("\n\nbase = 2").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        let e = parse_spec("kind = prime_family\nterms = 1/5 - 1/p(k)").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_spec("kind = finite\ngenerators = 1\nbase = 2").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn render_round_trips() {
        let specs = [
            GeneratorSpec::prime_offset_three(),
            GeneratorSpec::MultiCyclic(vec![q("2/3"), q("3/2")]),
            GeneratorSpec::Union(vec![GeneratorSpec::Geometric(q("5/7")), GeneratorSpec::Finite(vec![q("4")])]),
        ];
        for s in specs {
            assert_eq!(parse_spec(&render_spec(&s)).unwrap(), s);
        }
    }
}
