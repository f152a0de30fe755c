//! Divisor expressions: linear combinations of tracked-curve and basis
//! names, e.g. `2*piL - 1/3*E1`. Names resolve against tracked curves
//! first, then basis vectors. The literal `0` denotes the zero class.

use bgeom::lattice::{DivisorClass, SurfaceModel};
use bgeom::rat::{parse_rat, rint, Rat};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Number(Rat),
    Name(String),
}

fn tokenize(input: &str) -> Result<Vec<Token>, CliError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '/' {
                    i += 1;
                    let digits_start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == digits_start {
                        return Err(CliError::Usage(format!(
                            "expected digits after `/` in `{input}`"
                        )));
                    }
                }
                let literal: String = chars[start..i].iter().collect();
                let value = parse_rat(&literal)
                    .map_err(|e| CliError::Usage(format!("bad rational in `{input}`: {e}")))?;
                tokens.push(Token::Number(value));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token::Name(chars[start..i].iter().collect()));
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unexpected character `{other}` in divisor expression `{input}`"
                )))
            }
        }
    }
    Ok(tokens)
}

/// Parses `expr := [sign] term (("+"|"-") term)*` with
/// `term := [rational "*"] name` against the model's names.
pub fn parse_divisor(model: &SurfaceModel, input: &str) -> Result<DivisorClass, CliError> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(CliError::Usage("empty divisor expression".to_string()));
    }
    // The zero class.
    if tokens == [Token::Number(Rat::from_integer(0.into()))] {
        return Ok(model.zero_divisor());
    }

    let mut acc = model.zero_divisor();
    let mut pos = 0;
    let mut first = true;
    while pos < tokens.len() {
        let mut sign = rint(1);
        match &tokens[pos] {
            Token::Plus => pos += 1,
            Token::Minus => {
                sign = rint(-1);
                pos += 1;
            }
            _ if first => {}
            other => {
                return Err(CliError::Usage(format!(
                    "expected `+` or `-` before {other:?} in `{input}`"
                )))
            }
        }
        first = false;

        let mut coeff = sign;
        if let Some(Token::Number(n)) = tokens.get(pos) {
            coeff = &coeff * n;
            pos += 1;
            match tokens.get(pos) {
                Some(Token::Star) => pos += 1,
                _ => {
                    return Err(CliError::Usage(format!(
                        "expected `*` between coefficient and name in `{input}`"
                    )))
                }
            }
        }
        match tokens.get(pos) {
            Some(Token::Name(name)) => {
                let class = model.resolve_name(name).ok_or_else(|| {
                    CliError::Usage(format!("unknown curve or basis name `{name}`"))
                })?;
                acc = &acc + &class.scale(&coeff);
                pos += 1;
            }
            other => {
                return Err(CliError::Usage(format!(
                    "expected a name, found {other:?} in `{input}`"
                )))
            }
        }
    }
    Ok(acc)
}
