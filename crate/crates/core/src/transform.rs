//! The polar encoder: bit reversal followed by `log2 N` XOR butterfly
//! stages, realizing `x = u · B_N · F^{⊗n}` over GF(2) in `O(N log N)`.
//!
//! Indexing is 0-based throughout: input position `i` of the paper-style
//! `u_1..u_N` block is index `i−1` here. The bit-reversal permutation is
//! applied before the butterfly; the two orders are equivalent by the
//! symmetry of the kernel network, and the choice is fixed and tested so
//! every module agrees on channel indices.

use crate::error::{Error, Result};

/// Reverses the lowest `levels` bits of `index`.
#[inline]
pub fn bit_reverse(index: usize, levels: u32) -> usize {
    if levels == 0 {
        return 0;
    }
    index.reverse_bits() >> (usize::BITS - levels)
}

/// The index permutation realizing `B_N`; an involution.
pub fn bit_reversal_permutation(n: usize) -> Result<Vec<usize>> {
    let levels = block_levels(n)?;
    Ok((0..n).map(|i| bit_reverse(i, levels)).collect())
}

/// Number of butterfly stages for a block of length `n`; rejects lengths
/// that are not powers of two.
pub fn block_levels(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid(format!(
            "block length must be a power of two, got {n}"
        )));
    }
    Ok(n.trailing_zeros())
}

/// Encodes `u` into the codeword `x = u · B_N · F^{⊗n}` over GF(2).
pub fn encode(u: &[u8]) -> Result<Vec<u8>> {
    let mut x = u.to_vec();
    encode_in_place(&mut x)?;
    Ok(x)
}

/// In-place variant of [`encode`].
pub fn encode_in_place(bits: &mut [u8]) -> Result<()> {
    let levels = block_levels(bits.len())?;
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::invalid(format!("block value {b} is not a bit")));
    }
    // bit reversal: swap each index with its reversal once
    for i in 0..bits.len() {
        let j = bit_reverse(i, levels);
        if i < j {
            bits.swap(i, j);
        }
    }
    // butterfly: at stage k, position j with bit k clear absorbs j + 2^k
    for k in 0..levels {
        let dist = 1usize << k;
        for j in 0..bits.len() {
            if j & dist == 0 {
                bits[j] ^= bits[j + dist];
            }
        }
    }
    Ok(())
}
