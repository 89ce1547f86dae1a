//! Words over the letters `{1..d}` indexing tensor coefficients.

use std::fmt;
use std::str::FromStr;

/// A word `(i_1, ..., i_n)` with letters in `{1..d}`.
///
/// The canonical text form concatenates the letters, e.g. `"112"`, which is
/// unambiguous for `d <= 9` (all domains in this crate). A word of length
/// `n` corresponds to the flat index `sum_j (i_j - 1) d^(n-j)` in the dense
/// level-`n` coefficient array: the first letter is most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    /// Builds a word from 1-based letters. Letters must be >= 1; whether
    /// they fit a particular dimension is checked at the point of use.
    pub fn new(letters: Vec<u8>) -> Self {
        assert!(
            letters.iter().all(|&l| l >= 1),
            "word letters are 1-based and must be >= 1"
        );
        Word { letters }
    }

    pub fn empty() -> Self {
        Word {
            letters: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    /// Flat index of this word within the dense level array of dimension `d`.
    pub fn index(&self, dim: usize) -> usize {
        self.letters
            .iter()
            .fold(0usize, |acc, &l| acc * dim + (l as usize - 1))
    }

    /// Inverse of [`Word::index`] for a word of length `len`.
    pub fn from_index(mut index: usize, len: usize, dim: usize) -> Self {
        let mut letters = vec![0u8; len];
        for slot in letters.iter_mut().rev() {
            *slot = (index % dim) as u8 + 1;
            index /= dim;
        }
        debug_assert_eq!(index, 0, "index out of range for word length");
        Word { letters }
    }

    /// Fits within dimension `d`?
    pub fn fits(&self, dim: usize) -> bool {
        self.letters.iter().all(|&l| (l as usize) <= dim)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c.to_digit(10) {
                Some(d) if d >= 1 => letters.push(d as u8),
                _ => return Err(format!("invalid letter `{c}` in word `{s}`")),
            }
        }
        Ok(Word { letters })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let d = 2usize;
        for len in 0..=4 {
            for idx in 0..d.pow(len as u32) {
                let w = Word::from_index(idx, len, d);
                assert_eq!(w.index(d), idx);
                assert_eq!(w.len(), len);
            }
        }
    }

    #[test]
    fn text_form() {
        let w: Word = "112".parse().unwrap();
        assert_eq!(w.letters(), &[1, 1, 2]);
        assert_eq!(w.to_string(), "112");
        // first letter most significant: "112" -> 0*4 + 0*2 + 1
        assert_eq!(w.index(2), 1);
        assert!("103".parse::<Word>().is_err());
    }

    #[test]
    fn concatenation_index_is_stride() {
        let d = 3;
        let u: Word = "21".parse().unwrap();
        let v: Word = "312".parse().unwrap();
        let mut cat = u.letters().to_vec();
        cat.extend_from_slice(v.letters());
        let w = Word::new(cat);
        assert_eq!(w.index(d), u.index(d) * d.pow(3) + v.index(d));
    }
}
