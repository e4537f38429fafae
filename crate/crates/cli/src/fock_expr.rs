//! Spectrum expressions for the `fock` command.
//!
//! ```text
//! sum     := product ('+' product)*
//! product := atom ('*' atom)*
//! atom    := INT | 'C' INT | '(' sum ')'
//!          | 'exp' '(' sum ',' ['D' '='] INT ')'
//!          | 'sym' '(' sum ',' ['d' '='] INT ')'
//! ```
//!
//! `+` is the direct sum and `*` the tensor product. An integer `k` stands
//! for `k` copies of the trivial spectrum, so `2*C5` is two copies of `C5`.

use selfsim_core::fock::{self, RotationMultiset};
use selfsim_core::BigUint;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(u64),
    Ident(String),
    Plus,
    Star,
    Comma,
    Equals,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, String> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let token = match c {
            ' ' | '\t' | '\n' => {
                i += 1;
                continue;
            }
            '+' => Token::Plus,
            '*' => Token::Star,
            ',' => Token::Comma,
            '=' => Token::Equals,
            '(' => Token::Open,
            ')' => Token::Close,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let value = text[start..i]
                    .parse()
                    .map_err(|_| format!("integer too large at {start}"))?;
                tokens.push((start, Token::Int(value)));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                // `C5` splits into the identifier `C` and the integer `5`
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                tokens.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            other => return Err(format!("unexpected `{other}` at {start}")),
        };
        tokens.push((start, token));
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(at, _)| *at)
    }

    fn next(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        token
    }

    fn expect(&mut self, want: Token) -> Result<(), String> {
        let at = self.offset();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(format!("expected {want:?} at {at}, found {t:?}")),
            None => Err(format!("expected {want:?} at {at}, found end of input")),
        }
    }

    fn int(&mut self) -> Result<u64, String> {
        let at = self.offset();
        match self.next() {
            Some(Token::Int(v)) => Ok(v),
            _ => Err(format!("expected an integer at {at}")),
        }
    }

    fn sum(&mut self) -> Result<RotationMultiset, String> {
        let mut acc = self.product()?;
        while self.peek() == Some(&Token::Plus) {
            self.next();
            acc = fock::direct_sum(&acc, &self.product()?);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<RotationMultiset, String> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Token::Star) {
            self.next();
            acc = fock::tensor(&acc, &self.atom()?);
        }
        Ok(acc)
    }

    /// `, [name =] INT )` closing an `exp` or `sym` call.
    fn degree(&mut self, name: &str) -> Result<u32, String> {
        self.expect(Token::Comma)?;
        if let Some(Token::Ident(id)) = self.peek() {
            if !id.eq_ignore_ascii_case(name) {
                return Err(format!("expected `{name}=` at {}", self.offset()));
            }
            self.next();
            self.expect(Token::Equals)?;
        }
        let at = self.offset();
        let value = u32::try_from(self.int()?).map_err(|_| format!("degree too large at {at}"))?;
        self.expect(Token::Close)?;
        Ok(value)
    }

    fn atom(&mut self) -> Result<RotationMultiset, String> {
        let at = self.offset();
        match self.next() {
            Some(Token::Int(k)) => Ok(fock::scale_copies(&RotationMultiset::trivial(), k)),
            Some(Token::Open) => {
                let inner = self.sum()?;
                self.expect(Token::Close)?;
                Ok(inner)
            }
            Some(Token::Ident(id)) if id == "C" => {
                let h = self.int()?;
                if h == 0 {
                    return Err(format!("C0 at {at}: cyclic order must be positive"));
                }
                Ok(fock::cyclic_spectrum(h))
            }
            Some(Token::Ident(id)) if id == "exp" || id == "sym" => {
                self.expect(Token::Open)?;
                let inner = self.sum()?;
                if id == "exp" {
                    Ok(fock::exp_truncated(&inner, self.degree("D")?))
                } else {
                    Ok(fock::sym_power(&inner, self.degree("d")?))
                }
            }
            Some(t) => Err(format!("unexpected {t:?} at {at}")),
            None => Err(format!("unexpected end of input at {at}")),
        }
    }
}

pub fn parse(text: &str) -> Result<RotationMultiset, String> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let value = parser.sum()?;
    if parser.pos < parser.tokens.len() {
        return Err(format!("trailing input at {}", parser.offset()));
    }
    Ok(value)
}

/// Multiplicity set as plain integers for display.
pub fn multiplicities(spectrum: &RotationMultiset, exclude_zero: bool) -> Vec<BigUint> {
    fock::multiplicity_set(spectrum, exclude_zero)
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(values: &[u64]) -> Vec<BigUint> {
        values.iter().map(|&v| BigUint::from(v)).collect()
    }

    #[test]
    fn sums_and_copies() {
        let spectrum = parse("2*C5 + 3*C7").unwrap();
        let expected = fock::direct_sum(
            &fock::scale_copies(&fock::cyclic_spectrum(5), 2),
            &fock::scale_copies(&fock::cyclic_spectrum(7), 3),
        );
        assert_eq!(spectrum, expected);
        assert_eq!(multiplicities(&spectrum, true), u(&[2, 3]));
        assert_eq!(multiplicities(&spectrum, false), u(&[2, 3, 5]));
    }

    #[test]
    fn calls() {
        let two = fock::cyclic_spectrum(2);
        assert_eq!(parse("exp(C2, D=2)").unwrap(), fock::exp_truncated(&two, 2));
        assert_eq!(parse("exp(C2, 2)").unwrap(), fock::exp_truncated(&two, 2));
        assert_eq!(parse("sym(C2, d=2)").unwrap(), fock::sym_power(&two, 2));
        assert_eq!(parse("C2 * C3").unwrap(), fock::cyclic_spectrum(6));
        assert_eq!(parse("(C2 + 1) * 2").unwrap().dim(), BigUint::from(6u32));
        assert_eq!(
            parse("exp(2*C5 + 3*C7, D=3)").unwrap().dim(),
            BigUint::from(1u32 + 31 + 496 + 5456)
        );
    }

    #[test]
    fn errors() {
        for bad in [
            "",
            "C",
            "C0",
            "2 +",
            "exp(C2)",
            "exp(C2, X=2)",
            "C2 )",
            "C2 $",
            "sym(C2, d=)",
        ] {
            assert!(parse(bad).is_err(), "{bad:?} should fail");
        }
    }
}
