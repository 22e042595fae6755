//! Plain-text system definition files.
//!
//! ```text
//! [system]
//! kind = symplectic
//! n = 4
//!
//! [lagrangian]
//! (1/2)*((q1 + v2 + v3)^2 + (v4 - v2)^2 - 2*q2*q4)
//!
//! [options]
//! engine = both
//! multiplier.lambda1 = 0
//! init.q4 = 1
//! t_end = 1
//! dt = 0.001
//! ```

use std::fmt;
use std::str::FromStr;

use constraint_forge_core::mechanics::{LagrangianSystem, PhaseSpace, SpaceKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FileError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, FileError> {
    Err(FileError {
        line,
        message: message.into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Algebraic,
    Geometric,
    Both,
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "algebraic" => Ok(Engine::Algebraic),
            "geometric" => Ok(Engine::Geometric),
            "both" => Ok(Engine::Both),
            _ => Err(format!("unknown engine `{s}` (expected algebraic, geometric or both)")),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Algebraic => "algebraic",
            Engine::Geometric => "geometric",
            Engine::Both => "both",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    Stage,
    Primary,
}

impl FromStr for Ambient {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stage" => Ok(Ambient::Stage),
            "primary" => Ok(Ambient::Primary),
            _ => Err(format!("unknown ambient `{s}` (expected stage or primary)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FileOptions {
    pub engine: Option<Engine>,
    pub ambient: Option<Ambient>,
    /// `(multiplier name, expression text)` in file order.
    pub multipliers: Vec<(String, String)>,
    pub init: Vec<(String, f64)>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub kind: SpaceKind,
    pub n: usize,
    pub lagrangian: String,
    /// Line on which the Lagrangian text starts.
    pub lagrangian_line: usize,
    pub options: FileOptions,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    System,
    Lagrangian,
    Options,
}

pub fn parse_system_file(text: &str) -> Result<SystemFile, FileError> {
    let mut section = None;
    let mut kind = None;
    let mut n = None;
    let mut lagrangian: Vec<(usize, String)> = Vec::new();
    let mut options = FileOptions::default();
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = Some(match name.trim() {
                "system" => Section::System,
                "lagrangian" => Section::Lagrangian,
                "options" => Section::Options,
                other => return err(line, format!("unknown section [{other}]")),
            });
            continue;
        }
        let Some(current) = section else {
            return err(line, "content outside of a section");
        };
        if current == Section::Lagrangian {
            lagrangian.push((line, content.to_string()));
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return err(line, format!("expected `key = value`, found `{content}`"));
        };
        let (key, value) = (key.trim(), value.trim());
        let qualified = format!("{}.{key}", if current == Section::System { "system" } else { "options" });
        if seen.contains(&qualified) {
            return err(line, format!("duplicate key `{key}`"));
        }
        seen.push(qualified);
        match (current, key) {
            (Section::System, "kind") => {
                kind = Some(match value {
                    "symplectic" => SpaceKind::Symplectic,
                    "contact" => SpaceKind::Contact,
                    _ => return err(line, format!("kind must be symplectic or contact, found `{value}`")),
                })
            }
            (Section::System, "n") => match value.parse::<usize>() {
                Ok(v) if v >= 1 => n = Some(v),
                _ => return err(line, format!("n must be a positive integer, found `{value}`")),
            },
            (Section::Options, "engine") => options.engine = Some(value.parse().or_else(|m: String| err(line, m))?),
            (Section::Options, "ambient") => options.ambient = Some(value.parse().or_else(|m: String| err(line, m))?),
            (Section::Options, "t_end") => options.t_end = Some(parse_float(line, value)?),
            (Section::Options, "dt") => options.dt = Some(parse_float(line, value)?),
            (Section::Options, k) if k.starts_with("multiplier.") => {
                options.multipliers.push((k["multiplier.".len()..].to_string(), value.to_string()))
            }
            (Section::Options, k) if k.starts_with("init.") => {
                options.init.push((k["init.".len()..].to_string(), parse_float(line, value)?))
            }
            _ => return err(line, format!("unknown key `{key}`")),
        }
    }

    let Some(kind) = kind else {
        return err(text.lines().count().max(1), "missing `kind` in [system]");
    };
    let Some(n) = n else {
        return err(text.lines().count().max(1), "missing `n` in [system]");
    };
    let Some(&(lagrangian_line, _)) = lagrangian.first() else {
        return err(text.lines().count().max(1), "missing [lagrangian] section");
    };
    let file = SystemFile {
        kind,
        n,
        lagrangian: lagrangian.iter().map(|(_, l)| l.as_str()).collect::<Vec<_>>().join("\n"),
        lagrangian_line,
        options,
    };
    file.system()?;
    Ok(file)
}

fn parse_float(line: usize, value: &str) -> Result<f64, FileError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(line, format!("expected a number, found `{value}`")),
    }
}

impl SystemFile {
    pub fn space(&self) -> PhaseSpace {
        PhaseSpace::new(self.kind, self.n)
    }

    /// Parses and validates the Lagrangian. Errors point at the offending line.
    pub fn system(&self) -> Result<LagrangianSystem, FileError> {
        let space = self.space();
        let line_of = |offset: usize| self.lagrangian_line + self.lagrangian[..offset.min(self.lagrangian.len())].matches('\n').count();
        let l = space.parse(&self.lagrangian).map_err(|e| FileError {
            line: line_of(e.offset().unwrap_or(0)),
            message: format!("lagrangian: {e}"),
        })?;
        LagrangianSystem::new(space, l).map_err(|e| FileError {
            line: self.lagrangian_line,
            message: format!("lagrangian: {e}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "# two constraints\n[system]\nkind = symplectic\nn = 4\n\n[lagrangian]\n(1/2)*((q1 + v2 + v3)^2\n + (v4 - v2)^2 - 2*q2*q4)\n\n[options]\nengine = both\nmultiplier.lambda1 = 0\ninit.q4 = 1\ndt = 0.001\n";

    #[test]
    fn parses_sections() {
        let f = parse_system_file(EXAMPLE).unwrap();
        assert_eq!(f.kind, SpaceKind::Symplectic);
        assert_eq!(f.n, 4);
        assert_eq!(f.lagrangian_line, 7);
        assert_eq!(f.options.engine, Some(Engine::Both));
        assert_eq!(f.options.multipliers, vec![("lambda1".to_string(), "0".to_string())]);
        assert_eq!(f.options.init, vec![("q4".to_string(), 1.0)]);
        assert_eq!(f.options.dt, Some(0.001));
        assert!(f.system().is_ok());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_key = "[system]\nkind = contact\nn = 1\ncolor = red\n[lagrangian]\nv1^2";
        assert_eq!(parse_system_file(bad_key).unwrap_err().line, 4);
        let bad_var = "[system]\nkind = symplectic\nn = 1\n[lagrangian]\nv1^2\n+ z";
        let e = parse_system_file(bad_var).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(e.message.contains('z'));
        let outside = "kind = contact";
        assert_eq!(parse_system_file(outside).unwrap_err().line, 1);
        let missing = "[system]\nkind = contact\n[lagrangian]\nv1";
        assert!(parse_system_file(missing).unwrap_err().message.contains("`n`"));
        let dup = "[system]\nkind = contact\nkind = contact\n";
        assert_eq!(parse_system_file(dup).unwrap_err().line, 3);
        let cubic = "[system]\nkind = symplectic\nn = 1\n[lagrangian]\nv1^3";
        assert!(parse_system_file(cubic).unwrap_err().message.contains("degree 3"));
    }

    #[test]
    fn contact_without_z_is_valid() {
        let f = parse_system_file("[system]\nkind = contact\nn = 1\n[lagrangian]\n(1/2)*v1^2 - q1").unwrap();
        assert_eq!(f.kind, SpaceKind::Contact);
    }
}
