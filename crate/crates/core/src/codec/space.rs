use std::collections::HashMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Probability};

/// A finite set of distinct messages with a probability for each.
#[derive(Clone, Debug)]
pub struct MessageSpace<P> {
    messages: Vec<Vec<u8>>,
    probs: Vec<P>,
    index: HashMap<Vec<u8>, usize>,
}

impl<P: Probability> MessageSpace<P> {
    pub fn new(messages: Vec<Vec<u8>>, probs: Vec<P>) -> Result<Self> {
        if messages.is_empty() {
            return Err(Error::InvalidSpace("no messages".into()));
        }
        if messages.len() != probs.len() {
            return Err(Error::InvalidSpace(format!(
                "{} messages but {} probabilities",
                messages.len(),
                probs.len()
            )));
        }
        let mut index = HashMap::with_capacity(messages.len());
        for (i, m) in messages.iter().enumerate() {
            if index.insert(m.clone(), i).is_some() {
                return Err(Error::InvalidSpace(format!(
                    "duplicate message {}",
                    hex::encode(m)
                )));
            }
        }
        let mut total = P::zero();
        for (i, p) in probs.iter().enumerate() {
            if p.is_negative() || p.to_f64().is_nan() {
                return Err(Error::InvalidSpace(format!(
                    "probability of message {i} is {p:?}"
                )));
            }
            total = total + p.clone();
        }
        if !P::is_unit_mass(&total) {
            return Err(Error::InvalidSpace(format!(
                "probabilities sum to {total:?}, not 1"
            )));
        }
        Ok(MessageSpace {
            messages,
            probs,
            index,
        })
    }

    /// Equiprobable messages.
    pub fn uniform(messages: Vec<Vec<u8>>) -> Result<Self> {
        let n = messages.len();
        if n == 0 {
            return Err(Error::InvalidSpace("no messages".into()));
        }
        let p = P::one() / P::from_usize(n).expect("message count fits the scalar");
        MessageSpace::new(messages, vec![p; n])
    }

    /// Messages are the single bytes `0, 1, ..` in order.
    pub fn indexed(probs: Vec<P>) -> Result<Self> {
        let messages = (0..probs.len()).map(index_message).collect::<Result<_>>()?;
        MessageSpace::new(messages, probs)
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn messages(&self) -> &[Vec<u8>] {
        &self.messages
    }

    pub fn probs(&self) -> &[P] {
        &self.probs
    }

    pub fn message(&self, i: usize) -> &[u8] {
        &self.messages[i]
    }

    pub fn prob(&self, i: usize) -> &P {
        &self.probs[i]
    }

    pub fn index_of(&self, message: &[u8]) -> Option<usize> {
        self.index.get(message).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], &P)> {
        self.messages.iter().map(Vec::as_slice).zip(&self.probs)
    }

    /// Same messages with probabilities converted to another scalar.
    pub fn convert<Q: Probability>(&self) -> Result<MessageSpace<Q>> {
        let probs = self
            .probs
            .iter()
            .map(|p| {
                p.to_rational()
                    .map(|r| Q::from_rational(&r))
                    .ok_or_else(|| Error::InvalidSpace(format!("non-finite probability {p:?}")))
            })
            .collect::<Result<_>>()?;
        MessageSpace::new(self.messages.clone(), probs)
    }

    /// Exact view of the distribution; always succeeds for a validated space.
    pub fn to_exact(&self) -> MessageSpace<BigRational> {
        let probs: Vec<BigRational> = self
            .probs
            .iter()
            .map(|p| p.to_rational().expect("validated probabilities are finite"))
            .collect();
        // float spaces may be off unit mass by the tolerance; keep them as given
        MessageSpace {
            messages: self.messages.clone(),
            probs,
            index: self.index.clone(),
        }
    }
}

fn index_message(i: usize) -> Result<Vec<u8>> {
    u8::from_usize(i)
        .map(|b| vec![b])
        .ok_or_else(|| Error::InvalidSpace("indexed spaces hold at most 256 messages".into()))
}

/// Reads a message-space definition.
///
/// One message per line: a probability (`num/den`, integer or decimal), then
/// whitespace, then the message either as `0x` followed by hex digits or as
/// a double-quoted UTF-8 string with `\"`, `\\`, `\n`, `\t` and `\xHH`
/// escapes. Blank lines and lines starting with `#` are ignored.
///
/// ```text
/// # weather
/// 1/2 "sunny"
/// 1/4 "rain"
/// 1/4 0x736e6f77
/// ```
pub fn parse_space<P: Probability>(text: &str) -> Result<MessageSpace<P>> {
    let mut messages = Vec::new();
    let mut probs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |what: &str| Error::SpaceFormat(format!("line {}: {what}", n + 1));
        let (prob, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| err("expected `<probability> <message>`"))?;
        let prob = parse_rational(prob).ok_or_else(|| err("bad probability"))?;
        if prob < BigRational::zero() {
            return Err(err("negative probability"));
        }
        let message = parse_message(rest.trim()).map_err(|e| err(&e))?;
        messages.push(message);
        probs.push(P::from_rational(&prob));
    }
    MessageSpace::new(messages, probs)
}

/// Serializes a space in the format read by [`parse_space`].
pub fn write_space(space: &MessageSpace<BigRational>) -> String {
    let mut out = String::from("# message space\n");
    for (m, p) in space.iter() {
        let _ = writeln!(out, "{} {}", format_rational(p), quote_message(m));
    }
    out
}

fn parse_message(field: &str) -> std::result::Result<Vec<u8>, String> {
    if let Some(hex_digits) = field.strip_prefix("0x") {
        return hex::decode(hex_digits).map_err(|e| format!("bad hex message: {e}"));
    }
    let inner = field
        .strip_prefix('"')
        .and_then(|f| f.strip_suffix('"'))
        .ok_or("message must be 0x-hex or a quoted string")?;
    let mut out = Vec::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            if c == '"' {
                return Err("unescaped quote in message".into());
            }
            let mut buf = [0u8; 4];
            out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
            continue;
        }
        match chars.next() {
            Some('"') => out.push(b'"'),
            Some('\\') => out.push(b'\\'),
            Some('n') => out.push(b'\n'),
            Some('t') => out.push(b'\t'),
            Some('x') => {
                let hi = chars.next().ok_or("truncated \\x escape")?;
                let lo = chars.next().ok_or("truncated \\x escape")?;
                let byte = u8::from_str_radix(&format!("{hi}{lo}"), 16)
                    .map_err(|_| "bad \\x escape".to_string())?;
                out.push(byte);
            }
            other => return Err(format!("unknown escape {other:?}")),
        }
    }
    Ok(out)
}

fn quote_message(m: &[u8]) -> String {
    match std::str::from_utf8(m) {
        Ok(s) if s.chars().all(|c| !c.is_control()) => {
            let mut out = String::from("\"");
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    c => out.push(c),
                }
            }
            out.push('"');
            out
        }
        _ => format!("0x{}", hex::encode(m)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rejects_empty_duplicate_and_bad_mass() {
        assert!(matches!(
            MessageSpace::<f64>::new(vec![], vec![]),
            Err(Error::InvalidSpace(_))
        ));
        assert!(MessageSpace::new(vec![b"a".to_vec(), b"a".to_vec()], vec![0.5, 0.5]).is_err());
        assert!(MessageSpace::new(vec![b"a".to_vec(), b"b".to_vec()], vec![0.5, 0.6]).is_err());
        assert!(MessageSpace::new(vec![b"a".to_vec(), b"b".to_vec()], vec![1.5, -0.5]).is_err());
        assert!(MessageSpace::new(vec![b"a".to_vec(), b"b".to_vec()], vec![q(1, 3), q(1, 3)]).is_err());
    }

    #[test]
    fn float_mass_tolerance() {
        let ok = MessageSpace::indexed(vec![0.1f64, 0.2, 0.7 + 5e-10]);
        assert!(ok.is_ok());
        assert!(MessageSpace::indexed(vec![0.1f64, 0.2, 0.7 + 1e-7]).is_err());
    }

    #[test]
    fn uniform_rational_is_exact() {
        let s = MessageSpace::<BigRational>::uniform(vec![vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(s.prob(2), &q(1, 3));
    }

    #[test]
    fn parses_definition_file() {
        let text = "# demo\n1/2 \"sunny\"\n\n1/4 \"r\\x61in\"\n1/4 0x736e6f77\n";
        let s: MessageSpace<BigRational> = parse_space(text).unwrap();
        assert_eq!(s.messages(), &[b"sunny".to_vec(), b"rain".to_vec(), b"snow".to_vec()]);
        assert_eq!(s.probs(), &[q(1, 2), q(1, 4), q(1, 4)]);
        let again: MessageSpace<BigRational> = parse_space(&write_space(&s)).unwrap();
        assert_eq!(again.messages(), s.messages());
        assert_eq!(again.probs(), s.probs());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_space::<f64>("1/2 \"a\"\nnope\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_space::<f64>("1/2 a\n1/2 \"b\"").is_err());
        assert!(parse_space::<f64>("-1/2 \"a\"\n3/2 \"b\"").is_err());
    }

    #[test]
    fn empty_message_is_allowed_once() {
        // `0x` and `""` both denote the empty message
        assert!(parse_space::<f64>("1/2 0x\n1/2 \"\"\n").is_err());
        let s: MessageSpace<f64> = parse_space("1 0x\n").unwrap();
        assert_eq!(s.message(0), b"");
    }
}
