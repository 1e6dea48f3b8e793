//! Packed bit-vector helpers shared by the concept matrix and the column index.
//!
//! Bit `i` lives in word `i / 64` at position `i % 64`. Bits past the logical
//! length are always zero; every mutating helper preserves that.

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
pub(crate) fn get(words: &[u64], i: usize) -> bool {
    (words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
}

#[inline]
pub(crate) fn set(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
}

#[inline]
pub(crate) fn flip(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
}

/// Sets bits `lo..hi`.
pub(crate) fn set_range(words: &mut [u64], lo: usize, hi: usize) {
    if lo >= hi {
        return;
    }
    let (first, last) = (lo / WORD_BITS, (hi - 1) / WORD_BITS);
    let lo_mask = u64::MAX << (lo % WORD_BITS);
    let hi_mask = u64::MAX >> (WORD_BITS - 1 - (hi - 1) % WORD_BITS);
    if first == last {
        words[first] |= lo_mask & hi_mask;
        return;
    }
    words[first] |= lo_mask;
    for w in &mut words[first + 1..last] {
        *w = u64::MAX;
    }
    words[last] |= hi_mask;
}

/// Mask of the valid bits in the final word of a `len`-bit vector.
#[inline]
pub(crate) fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

pub(crate) fn count_ones(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Iterates the indices of set bits in ascending order.
pub(crate) fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let tz = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(wi * WORD_BITS + tz)
        })
    })
}

/// Lowercase hex of the little-endian byte image, `ceil(len / 8)` bytes.
pub(crate) fn to_hex(words: &[u64], len: usize) -> String {
    let nbytes = len.div_ceil(8);
    let mut out = String::with_capacity(nbytes * 2);
    for byte in words.iter().flat_map(|w| w.to_le_bytes()).take(nbytes) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub(crate) fn from_hex(hex: &str, len: usize) -> Result<Vec<u64>, String> {
    let nbytes = len.div_ceil(8);
    if hex.len() != nbytes * 2 {
        return Err(format!("expected {} hex digits, found {}", nbytes * 2, hex.len()));
    }
    let mut words = vec![0u64; words_for(len)];
    for (bi, chunk) in hex.as_bytes().chunks(2).enumerate() {
        let s = std::str::from_utf8(chunk).map_err(|e| e.to_string())?;
        let byte = u8::from_str_radix(s, 16).map_err(|e| format!("bad hex {s:?}: {e}"))?;
        words[bi / 8] |= (byte as u64) << ((bi % 8) * 8);
    }
    if let Some(last) = words.last() {
        if last & !tail_mask(len) != 0 {
            return Err("bits set beyond the domain size".into());
        }
    }
    Ok(words)
}
