//! Parsers for flag values: angle expressions, state specs, side
//! policies, and pair names.

use qcorr::states::{load_state, named_state, StateError};
use qcorr::tripartite::{SideChoice, SidePolicy};
use qcorr::QState;
use std::f64::consts::PI;
use std::path::Path;

/// Angle or number literal. Accepts plain decimals, fractions, and pi
/// expressions: "0.7", "3/4", "pi", "2pi", "3pi/10", "-pi/5". The pi
/// forms evaluate as coefficient * pi / divisor in that order, so "3pi/10"
/// is bit-identical to writing 3.0 * PI / 10.0.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let bad = |_| format!("cannot parse '{s}' as a number or pi expression");
    if let Some(idx) = s.find("pi") {
        let (pre, post) = (&s[..idx], &s[idx + 2..]);
        let coef = match pre {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => pre.parse::<f64>().map_err(bad)?,
        };
        let value = match post.strip_prefix('/') {
            None if post.is_empty() => coef * PI,
            None => return Err(format!("unexpected '{post}' after pi in '{s}'")),
            Some(d) => coef * PI / d.parse::<f64>().map_err(bad)?,
        };
        Ok(value)
    } else if let Some((a, b)) = s.split_once('/') {
        Ok(a.parse::<f64>().map_err(bad)? / b.parse::<f64>().map_err(bad)?)
    } else {
        s.parse::<f64>().map_err(bad)
    }
}

pub fn parse_params(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_angle).collect()
}

/// A state flag value: anything that looks like a file path is loaded
/// from disk, otherwise name[:params] from the built-in registry. A bare
/// spec with a separator or a dot must be a path, since registry names
/// have neither; parameters always follow a colon, so "werner:0.5" still
/// reads as a name.
pub fn load_state_spec(spec: &str) -> Result<QState, StateError> {
    let pathlike = !spec.contains(':') && (spec.contains('/') || spec.contains('.'));
    if pathlike || Path::new(spec).exists() {
        return load_state(Path::new(spec));
    }
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n, parse_params(p).map_err(StateError::InvalidParams)?),
        None => (spec, Vec::new()),
    };
    named_state(name, &params)
}

/// A policy flag before label resolution. Explicit maps name pairs by
/// their labels, which only gain meaning next to a concrete state.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Named(SidePolicy),
    Explicit(Vec<(String, String)>),
}

pub fn parse_policy(s: &str) -> Result<PolicySpec, String> {
    match s {
        "measure-first" => return Ok(PolicySpec::Named(SidePolicy::MeasureFirst)),
        "measure-second" => return Ok(PolicySpec::Named(SidePolicy::MeasureSecond)),
        "min" | "min-over-sides" => return Ok(PolicySpec::Named(SidePolicy::MinOverSides)),
        "max" | "max-over-sides" => return Ok(PolicySpec::Named(SidePolicy::MaxOverSides)),
        "family" => return Ok(PolicySpec::Named(SidePolicy::family_default())),
        _ => {}
    }
    let body = s.strip_prefix("explicit:").unwrap_or(s);
    if !body.contains('=') {
        return Err(format!(
            "unknown policy '{s}' (use measure-first, measure-second, min, max, family, \
             or an explicit map like ab=b,ac=min,bc=b)"
        ));
    }
    let mut entries = Vec::new();
    for item in body.split(',') {
        let (pair, choice) = item
            .split_once('=')
            .ok_or_else(|| format!("explicit policy entry '{item}' is not pair=choice"))?;
        entries.push((pair.trim().to_string(), choice.trim().to_string()));
    }
    Ok(PolicySpec::Explicit(entries))
}

/// Attach an explicit map to a state's labels. Every pair must be named
/// exactly once, in position order; choices are first/second/min/max or
/// the label of the qubit to measure.
pub fn resolve_policy(spec: &PolicySpec, labels: &[String]) -> Result<SidePolicy, String> {
    let entries = match spec {
        PolicySpec::Named(p) => return Ok(*p),
        PolicySpec::Explicit(entries) => entries,
    };
    let mut choices = [None::<SideChoice>; 3];
    for (pair, choice) in entries {
        let mut matched = false;
        for (k, (i, j, _)) in qcorr::tripartite::PAIRS.iter().enumerate() {
            let forward = format!("{}{}", labels[*i], labels[*j]);
            if *pair == forward {
                if choices[k].is_some() {
                    return Err(format!("pair '{pair}' named twice in the explicit policy"));
                }
                choices[k] = Some(match choice.as_str() {
                    "first" => SideChoice::First,
                    "second" => SideChoice::Second,
                    "min" => SideChoice::Min,
                    "max" => SideChoice::Max,
                    c if c == labels[*i] => SideChoice::First,
                    c if c == labels[*j] => SideChoice::Second,
                    other => {
                        return Err(format!(
                            "choice '{other}' for pair '{pair}' is not first, second, min, \
                             max, or a label of that pair"
                        ))
                    }
                });
                matched = true;
                break;
            }
        }
        if !matched {
            return Err(format!(
                "pair '{pair}' does not name two subsystems of ({}) in position order",
                labels.join(", ")
            ));
        }
    }
    match choices {
        [Some(a), Some(b), Some(c)] => Ok(SidePolicy::Explicit([a, b, c])),
        _ => Err("an explicit policy must name a side for every pair".into()),
    }
}

/// A pair flag value: two labels of the state, as "ac" or "a,c".
pub fn parse_pair(s: &str, labels: &[String]) -> Result<(String, String), String> {
    let parts: Vec<String> = if let Some((a, b)) = s.split_once(',') {
        vec![a.trim().to_string(), b.trim().to_string()]
    } else {
        // try splitting a two-label concatenation like "ac" greedily
        let mut found = None;
        for a in labels {
            if let Some(rest) = s.strip_prefix(a.as_str()) {
                if labels.iter().any(|l| l == rest && l != a) {
                    found = Some(vec![a.clone(), rest.to_string()]);
                    break;
                }
            }
        }
        found.ok_or_else(|| {
            format!(
                "'{s}' does not name two distinct subsystems of ({})",
                labels.join(", ")
            )
        })?
    };
    let [a, b]: [String; 2] = parts
        .try_into()
        .map_err(|_| "expected two labels".to_string())?;
    for l in [&a, &b] {
        if !labels.iter().any(|x| x == l) {
            return Err(format!(
                "'{l}' is not a subsystem of ({})",
                labels.join(", ")
            ));
        }
    }
    if a == b {
        return Err("the two pair labels must differ".into());
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_expressions() {
        assert_eq!(parse_angle("0.7").unwrap(), 0.7);
        assert_eq!(parse_angle("3pi/10").unwrap(), 3.0 * PI / 10.0);
        assert_eq!(parse_angle("pi/5").unwrap(), PI / 5.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3/4").unwrap(), 0.75);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("pi/").is_err());
        assert!(parse_angle("").is_err());
    }

    #[test]
    fn policies_and_pairs() {
        let abc: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let family = parse_policy("family").unwrap();
        assert_eq!(
            resolve_policy(&family, &abc).unwrap(),
            SidePolicy::family_default()
        );
        let explicit = parse_policy("ab=b,ac=min,bc=b").unwrap();
        assert_eq!(
            resolve_policy(&explicit, &abc).unwrap(),
            SidePolicy::family_default()
        );
        let with_prefix = parse_policy("explicit:ab=first,ac=second,bc=max").unwrap();
        assert_eq!(
            resolve_policy(&with_prefix, &abc).unwrap(),
            SidePolicy::Explicit([SideChoice::First, SideChoice::Second, SideChoice::Max])
        );
        // missing pair, unknown pair, bad choice
        assert!(resolve_policy(&parse_policy("ab=b,ac=min").unwrap(), &abc).is_err());
        assert!(resolve_policy(&parse_policy("xy=first,ac=min,bc=b").unwrap(), &abc).is_err());
        assert!(resolve_policy(&parse_policy("ab=q,ac=min,bc=b").unwrap(), &abc).is_err());
        assert!(parse_policy("bogus").is_err());

        assert_eq!(
            parse_pair("ac", &abc).unwrap(),
            ("a".to_string(), "c".to_string())
        );
        assert_eq!(
            parse_pair("c,a", &abc).unwrap(),
            ("c".to_string(), "a".to_string())
        );
        assert!(parse_pair("aa", &abc).is_err());
        assert!(parse_pair("ax", &abc).is_err());
    }

    #[test]
    fn state_specs() {
        assert!(load_state_spec("bell").is_ok());
        assert!(load_state_spec("werner:0.5").is_ok());
        let family = load_state_spec("counterexample:0.1,3pi/10,0.7,pi/5").unwrap();
        assert_eq!(family.labels(), ["a", "b", "c"]);
        assert!(matches!(
            load_state_spec("nonsense"),
            Err(StateError::UnknownName(_))
        ));
        assert!(matches!(
            load_state_spec("werner:2.0"),
            Err(StateError::InvalidParams(_))
        ));
    }
}
