//! Canonical text form for family descriptors: `tag:param=value,...`.
//!
//! Parameters keep their written order. Numbers are printed with Rust's
//! shortest round-trip formatting so that `parse(format(x)) == x`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub tag: String,
    params: Vec<(String, String)>,
}

impl Descriptor {
    pub fn new(tag: impl Into<String>) -> Self {
        Descriptor {
            tag: tag.into(),
            params: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, value: impl ToString) -> Self {
        self.params.push((name.to_string(), value.to_string()));
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (tag, rest) = match text.split_once(':') {
            Some((tag, rest)) => (tag.trim(), rest.trim()),
            None => (text, ""),
        };
        if tag.is_empty() || !tag.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(Error::descriptor(text, "missing or invalid family tag"));
        }
        let mut params = Vec::new();
        if !rest.is_empty() {
            for item in rest.split(',') {
                let (name, value) = item
                    .split_once('=')
                    .ok_or_else(|| Error::descriptor(item, "expected `name=value`"))?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::descriptor(item, "empty parameter name"));
                }
                if params.iter().any(|(n, _): &(String, String)| n == name) {
                    return Err(Error::descriptor(item, "duplicate parameter"));
                }
                params.push((name.to_string(), value.trim().to_string()));
            }
        }
        Ok(Descriptor {
            tag: tag.to_ascii_lowercase(),
            params,
        })
    }

    fn raw(&self, name: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn has(&self, name: &str) -> bool {
        self.raw(name).is_some()
    }

    pub fn f64(&self, name: &str) -> Result<f64> {
        let raw = self
            .raw(name)
            .ok_or_else(|| Error::descriptor(self.to_string(), format!("missing parameter `{name}`")))?;
        parse_number(raw).ok_or_else(|| Error::descriptor(raw, format!("`{name}` is not a number")))
    }

    pub fn f64_or(&self, name: &str, default: f64) -> Result<f64> {
        if self.has(name) {
            self.f64(name)
        } else {
            Ok(default)
        }
    }

    pub fn u32(&self, name: &str) -> Result<u32> {
        let raw = self
            .raw(name)
            .ok_or_else(|| Error::descriptor(self.to_string(), format!("missing parameter `{name}`")))?;
        raw.parse::<u32>()
            .map_err(|_| Error::descriptor(raw, format!("`{name}` must be a positive integer")))
    }

    /// Rejects parameters outside `allowed`, naming the first offender.
    pub fn expect_only(&self, allowed: &[&str]) -> Result<()> {
        match self.params.iter().find(|(n, _)| !allowed.contains(&n.as_str())) {
            Some((n, _)) => Err(Error::descriptor(
                n.clone(),
                format!("unknown parameter for `{}`", self.tag),
            )),
            None => Ok(()),
        }
    }
}

impl std::fmt::Display for Descriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.tag)?;
        for (i, (n, v)) in self.params.iter().enumerate() {
            f.write_str(if i == 0 { ":" } else { "," })?;
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

/// Accepts plain floats plus the constants `e` and `pi`, and simple
/// reciprocals such as `1/3`.
fn parse_number(raw: &str) -> Option<f64> {
    let raw = raw.trim();
    if let Some((num, den)) = raw.split_once('/') {
        let (n, d) = (parse_number(num)?, parse_number(den)?);
        return (d != 0.0).then(|| n / d);
    }
    match raw {
        "e" => Some(std::f64::consts::E),
        "pi" => Some(std::f64::consts::PI),
        _ => raw.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let d = Descriptor::parse("harris:a=2,k=2").unwrap();
        assert_eq!(d.tag, "harris");
        assert_eq!(d.f64("a").unwrap(), 2.0);
        assert_eq!(d.u32("k").unwrap(), 2);
        assert_eq!(d.to_string(), "harris:a=2,k=2");
    }

    #[test]
    fn fractions_and_constants() {
        let d = Descriptor::parse("gamma:beta=1/3").unwrap();
        assert!((d.f64("beta").unwrap() - 1.0 / 3.0).abs() < 1e-16);
        let d = Descriptor::parse("harris:a=e,k=1").unwrap();
        assert_eq!(d.f64("a").unwrap(), std::f64::consts::E);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Descriptor::parse(":a=1").is_err());
        assert!(Descriptor::parse("harris:a").is_err());
        assert!(Descriptor::parse("harris:a=1,a=2").is_err());
        let d = Descriptor::parse("harris:a=x").unwrap();
        match d.f64("a") {
            Err(Error::Descriptor { token, .. }) => assert_eq!(token, "x"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
