//! Alphabets, finite contexts standing for infinite histories, and
//! variation sequences.

mod alphabet;
mod context;
mod variation;

pub use alphabet::Alphabet;
pub use context::{agreement_length, Context, ContextSpec, Extension, DEFAULT_AGREEMENT_CAP};
pub use variation::{seminorm, seminorm_ratio, Tail, VariationSequence};

/// Index of a word (oldest first) in base-`|A|` order, oldest symbol most
/// significant.
pub fn word_index(word: &[usize], alphabet_size: usize) -> usize {
    word.iter().fold(0, |acc, &s| acc * alphabet_size + s)
}

/// Inverse of [`word_index`] for words of length `len`.
pub fn index_word(mut index: usize, len: usize, alphabet_size: usize) -> Vec<usize> {
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = index % alphabet_size;
        index /= alphabet_size;
    }
    w
}

/// `|A|^len`, or `None` on overflow.
pub fn word_count(alphabet_size: usize, len: usize) -> Option<usize> {
    alphabet_size.checked_pow(u32::try_from(len).ok()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_indexing_round_trip() {
        for i in 0..27 {
            let w = index_word(i, 3, 3);
            assert_eq!(word_index(&w, 3), i);
        }
        assert_eq!(index_word(5, 3, 2), vec![1, 0, 1]);
        assert_eq!(word_count(2, 10), Some(1024));
        assert_eq!(word_count(10, 40), None);
    }
}
