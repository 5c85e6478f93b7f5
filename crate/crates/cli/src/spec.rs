//! Function specs: `maj:n`, `parity:n`, `halfspace:c0,c1,…`, `hard:n,k,seed`,
//! `hard-sym:n,k,seed`, `conj:A,B`, `kp:A`, or a path to a JSON file.
//!
//! Specs nest, so `conj:maj:3,halfspace:1,2,-4` is the conjunction of
//! `maj:3` with `halfspace:1,2,-4`. A token containing `:` always starts a
//! new spec.

use num_bigint::BigInt;
use signdeg::boolfn::{conjunction, halfspace_to_function, majority, parity, BooleanFunction, Halfspace, PointSet};
use signdeg::hardhs::{build_hard_halfspace, hard_function_symmetrized, sample_weights, MAX_WEIGHT_K};
use signdeg::signrep::krause_pudlak;

use crate::error::{usage, CliError};

/// Largest cube built from a spec; bigger truth tables are refused up front.
pub const MAX_SPEC_DIM: usize = 20;

#[derive(Debug, Clone)]
pub struct NamedFunction {
    /// Canonical spec text.
    pub id: String,
    pub function: BooleanFunction,
}

pub fn parse_function(text: &str) -> Result<NamedFunction, CliError> {
    let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
    let mut pos = 0;
    let out = parse_at(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(usage(format!("trailing input in function spec `{text}`")));
    }
    Ok(out)
}

fn check_dim(n: usize) -> Result<(), CliError> {
    if n > MAX_SPEC_DIM {
        return Err(CliError::Limit(format!("{n} variables exceed the limit of {MAX_SPEC_DIM}")));
    }
    Ok(())
}

fn number<T: std::str::FromStr>(tok: Option<&&str>, what: &str) -> Result<T, CliError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| usage(format!("expected {what}, found `{}`", tok.copied().unwrap_or(""))))
}

fn parse_at<'a>(tokens: &[&'a str], pos: &mut usize) -> Result<NamedFunction, CliError> {
    let head = *tokens.get(*pos).ok_or_else(|| usage("function spec ended early"))?;
    let Some((name, first)) = head.split_once(':') else {
        *pos += 1;
        return load_file(head);
    };
    // The text after `name:` is the first argument token.
    let (name, first) = (name.trim(), first.trim());
    let mut args: Vec<&'a str> = vec![first];
    *pos += 1;
    let take_numbers = |count: Option<usize>, args: &mut Vec<&'a str>, pos: &mut usize| {
        while count.is_none_or(|c| args.len() < c) && *pos < tokens.len() && !tokens[*pos].contains(':') {
            args.push(tokens[*pos]);
            *pos += 1;
        }
    };
    match name {
        "maj" | "parity" => {
            let n: usize = number(args.first(), "a variable count")?;
            if n == 0 {
                return Err(usage("need at least one variable"));
            }
            check_dim(n)?;
            let function = if name == "maj" { majority(n) } else { parity(n) };
            Ok(NamedFunction {
                id: format!("{name}:{n}"),
                function,
            })
        }
        "halfspace" => {
            take_numbers(None, &mut args, pos);
            let coeffs = args
                .iter()
                .map(|t| t.parse::<BigInt>().map_err(|_| usage(format!("bad coefficient `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            if coeffs.len() < 2 {
                return Err(usage("a halfspace needs a constant and at least one weight"));
            }
            check_dim(coeffs.len() - 1)?;
            let h = Halfspace::new(coeffs.clone());
            let function = halfspace_to_function(&h, &PointSet::cube(coeffs.len() - 1))?;
            let text: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            Ok(NamedFunction {
                id: format!("halfspace:{}", text.join(",")),
                function,
            })
        }
        "hard" | "hard-sym" => {
            take_numbers(Some(3), &mut args, pos);
            let n: usize = number(args.first(), "n")?;
            let k: u32 = number(args.get(1), "k")?;
            let seed: u64 = number(args.get(2), "a seed")?;
            if n == 0 || k > MAX_WEIGHT_K {
                return Err(usage(format!("need n ≥ 1 and k ≤ {MAX_WEIGHT_K}")));
            }
            let id = format!("{name}:{n},{k},{seed}");
            let function = if name == "hard" {
                check_dim(2 * n)?;
                halfspace_to_function(&build_hard_halfspace(n, k, seed), &PointSet::cube(2 * n))?
            } else {
                hard_function_symmetrized(&sample_weights(n, k, seed)).0
            };
            Ok(NamedFunction { id, function })
        }
        "conj" => {
            let mut sub = vec![first];
            sub.extend(&tokens[*pos..]);
            let mut p = 0;
            let a = parse_at(&sub, &mut p)?;
            let b = parse_at(&sub, &mut p)?;
            *pos += p - 1;
            check_dim(a.function.domain().dim() + b.function.domain().dim())?;
            Ok(NamedFunction {
                id: format!("conj:{},{}", a.id, b.id),
                function: conjunction(&a.function, &b.function),
            })
        }
        "kp" => {
            let mut sub = vec![first];
            sub.extend(&tokens[*pos..]);
            let mut p = 0;
            let inner = parse_at(&sub, &mut p)?;
            *pos += p - 1;
            check_dim(3 * inner.function.domain().dim())?;
            Ok(NamedFunction {
                id: format!("kp:{}", inner.id),
                function: krause_pudlak(&inner.function)?,
            })
        }
        _ => Err(usage(format!("unknown function `{name}`"))),
    }
}

fn load_file(path: &str) -> Result<NamedFunction, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read `{path}`: {e}")))?;
    let function: BooleanFunction =
        serde_json::from_str(&text).map_err(|e| usage(format!("`{path}` is not a Boolean function: {e}")))?;
    Ok(NamedFunction {
        id: path.to_string(),
        function,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        assert_eq!(parse_function("maj:3").unwrap().function, majority(3));
        assert_eq!(parse_function("parity:2").unwrap().id, "parity:2");
        let h = parse_function("halfspace: 1, 2,-4").unwrap();
        assert_eq!(h.id, "halfspace:1,2,-4");
        assert_eq!(h.function.len(), 4);
    }

    #[test]
    fn nested() {
        let c = parse_function("conj:maj:3,halfspace:1,2,-4").unwrap();
        assert_eq!(c.id, "conj:maj:3,halfspace:1,2,-4");
        assert_eq!(c.function.domain().dim(), 5);
        let k = parse_function("kp:conj:maj:1,maj:1").unwrap();
        assert_eq!(k.function.domain().dim(), 6);
        let h = parse_function("conj:hard:2,1,7,parity:1").unwrap();
        assert_eq!(h.function.domain().dim(), 5);
    }

    #[test]
    fn errors() {
        assert_eq!(parse_function("halfspace:1,2,-1").unwrap_err().exit_code(), 2);
        assert_eq!(parse_function("maj:40").unwrap_err().exit_code(), 3);
        assert_eq!(parse_function("maj:3,4").unwrap_err().exit_code(), 2);
        assert_eq!(parse_function("nope:3").unwrap_err().exit_code(), 2);
        assert_eq!(parse_function("/does/not/exist.json").unwrap_err().exit_code(), 2);
    }
}
