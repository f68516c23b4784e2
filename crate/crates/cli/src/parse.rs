//! Value parsers for angles, complex amplitudes and constraint lists.

use std::f64::consts::PI;

use seqmeas::search::Constraint;

fn finite(x: f64, what: &str) -> Result<f64, String> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{what} must be finite"))
    }
}

/// Radians, or a multiple/fraction of π such as `pi/4`, `-3pi/4`, `2*pi`,
/// `π/3`.
pub fn parse_theta(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace('π', "pi");
    let Some(at) = t.find("pi") else {
        let x: f64 = t.parse().map_err(|_| format!("cannot parse angle {s:?}"))?;
        return finite(x, "theta");
    };
    let (head, tail) = (t[..at].trim_end_matches('*').trim(), t[at + 2..].trim());
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse().map_err(|_| format!("cannot parse angle {s:?}"))?,
    };
    let denom = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .and_then(|d| d.trim().parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(|| format!("cannot parse angle {s:?}"))?,
    };
    finite(coeff * PI / denom, "theta")
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| -> Result<f64, String> {
        let x: f64 = p
            .parse()
            .map_err(|_| format!("cannot parse number {p:?} in {s:?}"))?;
        finite(x, "amplitude")
    };
    match parts.as_slice() {
        [re] => Ok((num(re)?, 0.0)),
        [re, im] => Ok((num(re)?, num(im)?)),
        _ => Err(format!("expected re or re,im, got {s:?}")),
    }
}

/// Parsed `--constraints` value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintList(pub Vec<Constraint>);

/// Comma-separated constraint names; `none` or an empty string selects no
/// constraint.
pub fn parse_constraints(s: &str) -> Result<ConstraintList, String> {
    let t = s.trim();
    if t.is_empty() || t.eq_ignore_ascii_case("none") {
        return Ok(ConstraintList(Vec::new()));
    }
    let mut out: Vec<Constraint> = Vec::new();
    for part in t.split(',') {
        let c: Constraint = part
            .trim()
            .parse()
            .map_err(|e: seqmeas::Error| e.to_string())?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(ConstraintList(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_theta("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_theta("π/2").unwrap(), PI / 2.0);
        assert_eq!(parse_theta("-3pi/4").unwrap(), -3.0 * PI / 4.0);
        assert_eq!(parse_theta("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_theta("0.5").unwrap(), 0.5);
        assert!(parse_theta("pi/0").is_err());
        assert!(parse_theta("nan").is_err());
        assert!(parse_theta("quarter").is_err());
    }

    #[test]
    fn amplitudes() {
        assert_eq!(parse_complex("0.5").unwrap(), (0.5, 0.0));
        assert_eq!(parse_complex("0.3, -0.4").unwrap(), (0.3, -0.4));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("inf").is_err());
    }

    #[test]
    fn constraint_lists() {
        assert_eq!(
            parse_constraints("aa-a,aa-b,aba").unwrap().0,
            vec![Constraint::AaA, Constraint::AaB, Constraint::Aba]
        );
        assert!(parse_constraints("none").unwrap().0.is_empty());
        assert_eq!(
            parse_constraints("bab,BAB").unwrap().0,
            vec![Constraint::Bab]
        );
        assert!(parse_constraints("aa-c").is_err());
    }
}
