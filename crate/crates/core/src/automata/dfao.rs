use num_bigint::BigInt;
use serde::Serialize;

use super::{Dfa, DfaTable};
use crate::numeration::to_word;

/// Automaton with a 0/1 output per state, computing the characteristic word
/// `X_S(n)` of a set `S` from the base-b digits of `n`.
///
/// Inputs may carry any number of leading zeros. Zero itself is in `S` iff
/// the underlying language contains the empty word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfao {
    inner: Dfa,
}

#[derive(Clone, Debug, Serialize)]
pub struct DfaoTable {
    pub base: u32,
    pub start: usize,
    pub outputs: Vec<u8>,
    pub transitions: Vec<Vec<usize>>,
}

/// Wraps an automaton of canonical expansions (no leading zeros) with a
/// padding state that absorbs leading zeros.
pub fn dfao_from_dfa(m: &Dfa) -> Dfao {
    let b = m.base();
    let pad = m.state_count();
    let mut trans: Vec<Vec<usize>> = (0..pad)
        .map(|s| (0..b).map(|d| m.step(s, d)).collect())
        .collect();
    let mut accepting: Vec<bool> = (0..pad).map(|s| m.is_accepting(s)).collect();
    trans.push((0..b).map(|d| if d == 0 { pad } else { m.step(m.start(), d) }).collect());
    accepting.push(m.is_accepting(m.start()));
    let inner = Dfa::new(b, trans, pad, accepting)
        .expect("total by construction")
        .minimize();
    Dfao { inner }
}

impl Dfao {
    pub fn base(&self) -> u32 {
        self.inner.base()
    }

    pub fn state_count(&self) -> usize {
        self.inner.state_count()
    }

    pub fn output(&self, state: usize) -> u8 {
        u8::from(self.inner.is_accepting(state))
    }

    /// Output after reading `digits`, most significant first.
    pub fn eval_digits(&self, digits: &[u32]) -> u8 {
        u8::from(self.inner.accepts(digits))
    }

    /// `X_S(n)` for `n ≥ 0`.
    pub fn eval(&self, n: &BigInt) -> u8 {
        let word = to_word(n, self.base()).expect("non-negative input");
        self.eval_digits(word.digits())
    }

    pub fn table(&self) -> DfaoTable {
        let DfaTable {
            base,
            start,
            transitions,
            ..
        } = self.inner.table();
        DfaoTable {
            base,
            start,
            outputs: (0..transitions.len()).map(|s| self.output(s)).collect(),
            transitions,
        }
    }

    pub fn to_dot(&self) -> String {
        self.inner
            .dot_with(|s| format!("q{s}/{}", self.output(s)), |s| self.output(s) == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::WordFamily;
    use crate::numeration::Word;

    #[test]
    fn powers_of_two() {
        let fam = WordFamily {
            prefix: Word::parse(2, "1").unwrap(),
            pump: Word::parse(2, "0").unwrap(),
            suffix: Word::empty(2),
        };
        let x = dfao_from_dfa(&Dfa::from_patterns(2, &[fam], &[]).unwrap());
        for n in 0u32..=1024 {
            assert_eq!(x.eval(&n.into()), u8::from(n.is_power_of_two()), "{n}");
        }
        // leading zeros do not matter
        assert_eq!(x.eval_digits(&[0, 0, 1, 0, 0]), 1);
        assert_eq!(x.eval_digits(&[0, 0, 1, 1]), 0);
    }

    #[test]
    fn empty_language_is_constant_zero() {
        let x = dfao_from_dfa(&Dfa::empty(3));
        assert_eq!(x.state_count(), 1);
        assert!((0u32..100).all(|n| x.eval(&n.into()) == 0));
        assert_eq!(x.table().outputs, vec![0]);
    }
}
