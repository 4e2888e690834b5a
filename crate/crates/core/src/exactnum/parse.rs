use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{ExactReal, NumError};

/// Parses `INT`, `INT/INT`, `sqrt(INT)`, `RAT*sqrt(INT)` and sums or
/// differences of one rational term with one radical term, e.g.
/// `1/2+1/2*sqrt(5)` or `2-sqrt(3)`. Whitespace is ignored.
pub fn parse(text: &str) -> Result<ExactReal, NumError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(NumError::Parse("empty number".into()));
    }
    let mut rational: Option<BigRational> = None;
    let mut radical: Option<(BigRational, BigInt)> = None;
    for (negative, term) in split_terms(&s)? {
        match parse_term(term)? {
            Term::Rational(r) => {
                if rational.is_some() {
                    return Err(NumError::Parse(format!("two rational terms in {text:?}")));
                }
                rational = Some(if negative { -r } else { r });
            }
            Term::Radical(c, d) => {
                if radical.is_some() {
                    return Err(NumError::Parse(format!("two radical terms in {text:?}")));
                }
                radical = Some((if negative { -c } else { c }, d));
            }
        }
    }
    let a = rational.unwrap_or_else(BigRational::zero);
    match radical {
        None => Ok(ExactReal::Rational(a)),
        Some((c, d)) => ExactReal::surd(a, c, d),
    }
}

fn split_terms(s: &str) -> Result<Vec<(bool, &str)>, NumError> {
    let mut out = Vec::new();
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut negative = false;
    for (i, &ch) in bytes.iter().enumerate() {
        match ch {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                if i == start {
                    // sign prefix of the current term
                    negative ^= ch == b'-';
                } else {
                    out.push((negative, &s[start..i]));
                    negative = ch == b'-';
                }
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(NumError::Parse(format!("unbalanced parentheses in {s:?}")));
    }
    if start >= s.len() {
        return Err(NumError::Parse(format!("dangling sign in {s:?}")));
    }
    out.push((negative, &s[start..]));
    Ok(out)
}

enum Term {
    Rational(BigRational),
    Radical(BigRational, BigInt),
}

fn parse_term(t: &str) -> Result<Term, NumError> {
    if let Some(idx) = t.find("sqrt(") {
        let coeff = match &t[..idx] {
            "" => BigRational::one(),
            pre => {
                let pre = pre
                    .strip_suffix('*')
                    .ok_or_else(|| NumError::Parse(format!("expected '*' before sqrt in {t:?}")))?;
                parse_rational(pre)?
            }
        };
        let inner = t[idx + 5..]
            .strip_suffix(')')
            .ok_or_else(|| NumError::Parse(format!("unterminated sqrt in {t:?}")))?;
        let d = parse_int(inner)?;
        return Ok(Term::Radical(coeff, d));
    }
    parse_rational(t).map(Term::Rational)
}

fn parse_rational(t: &str) -> Result<BigRational, NumError> {
    match t.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(t)?)),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(NumError::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
    }
}

fn parse_int(t: &str) -> Result<BigInt, NumError> {
    let digits = t.strip_prefix('-').unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NumError::Parse(format!("not an integer: {t:?}")));
    }
    t.parse::<BigInt>()
        .map_err(|e| NumError::Parse(format!("{t:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        assert_eq!(parse("3/2").unwrap(), ExactReal::ratio(3, 2).unwrap());
        match parse("sqrt(8)").unwrap() {
            ExactReal::Surd(s) => {
                assert!(s.rational_part().is_zero());
                assert_eq!(s.irrational_coeff(), &BigRational::from_integer(2.into()));
                assert_eq!(s.radicand(), &BigInt::from(2));
            }
            other => panic!("expected surd, got {other:?}"),
        }
        assert_eq!(parse("1+2*sqrt(4)").unwrap(), ExactReal::integer(5));
        assert_eq!(parse(" -1 / 3 ").unwrap(), ExactReal::ratio(-1, 3).unwrap());
        assert!(
            parse("sqrt(5)/1").is_err(),
            "division after sqrt is outside the grammar"
        );
    }

    #[test]
    fn signs() {
        assert_eq!(parse("2-sqrt(3)").unwrap(), parse("2+-1*sqrt(3)").unwrap());
        assert_eq!(parse("-sqrt(2)").unwrap().to_string(), "-sqrt(2)");
        assert_eq!(parse("-1/2*sqrt(5)+1/2").unwrap(), parse("1/2-1/2*sqrt(5)").unwrap());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("sqrt(-2)"), Err(NumError::NonPositiveRadicand(_))));
        assert!(matches!(parse("sqrt(0)"), Err(NumError::NonPositiveRadicand(_))));
        assert!(matches!(parse("1/0"), Err(NumError::DivisionByZero)));
        assert!(matches!(parse("pi"), Err(NumError::Parse(_))));
        assert!(matches!(parse("1+2+3"), Err(NumError::Parse(_))));
        assert!(matches!(parse(""), Err(NumError::Parse(_))));
        assert!(matches!(parse("1.5"), Err(NumError::Parse(_))));
    }
}
