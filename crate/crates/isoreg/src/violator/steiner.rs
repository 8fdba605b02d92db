//! Fixed-width bit-prefix coordinates used by the rendezvous construction.
//!
//! A coordinate is a `width`-bit value whose low `width − prefix_len` bits
//! are wildcards: it stands for the set of completions of its prefix. Helper
//! vertices take such coordinates; real points use fully exact ones. The key
//! property (see [`down_choices`]/[`up_choices`]): two exact values `x ≥ y`
//! share exactly one coordinate that `x` reaches going down and `y` going
//! up — their rendezvous — and values `x < y` share none.

/// A dyadic prefix coordinate: the completions of `bits` (a `prefix_len`-bit
/// prefix) to `width` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SteinerCoordinate {
    width: u8,
    prefix_len: u8,
    bits: u32,
}

/// How the completion sets of two prefix coordinates relate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteinerOrder {
    /// Identical prefixes.
    Equal,
    /// The first coordinate's completions are a strict subset of the
    /// second's: its prefix strictly extends the other.
    Less,
    /// The second's completions are a strict subset of the first's.
    Greater,
    /// Disjoint completion sets.
    Incomparable,
}

impl SteinerCoordinate {
    /// An exact value: all `width` bits fixed.
    pub fn exact(value: u32, width: u8) -> SteinerCoordinate {
        debug_assert!(width as u32 == 32 || value < (1u32 << width));
        SteinerCoordinate {
            width,
            prefix_len: width,
            bits: value,
        }
    }

    /// The first `prefix_len` bits of `value`, rest wildcard.
    pub fn prefix_of(value: u32, width: u8, prefix_len: u8) -> SteinerCoordinate {
        debug_assert!(prefix_len <= width && width <= 32);
        SteinerCoordinate {
            width,
            prefix_len,
            bits: ((value as u64) >> (width - prefix_len)) as u32,
        }
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn prefix_len(&self) -> u8 {
        self.prefix_len
    }

    pub fn is_exact(&self) -> bool {
        self.prefix_len == self.width
    }

    /// Unique id among all prefixes of this width: heap numbering of the
    /// prefix tree, in `[1, 2^(width+1))`, so `width + 1` bits suffice.
    pub fn heap_code(&self) -> u64 {
        (1u64 << self.prefix_len) + self.bits as u64
    }
}

/// Compares completion sets: equal, strict containment either way, or
/// disjoint. Coordinates of different widths never relate.
pub fn steiner_relation(a: &SteinerCoordinate, b: &SteinerCoordinate) -> SteinerOrder {
    if a.width != b.width {
        return SteinerOrder::Incomparable;
    }
    if a.prefix_len == b.prefix_len {
        return if a.bits == b.bits {
            SteinerOrder::Equal
        } else {
            SteinerOrder::Incomparable
        };
    }
    if a.prefix_len > b.prefix_len {
        if (a.bits >> (a.prefix_len - b.prefix_len)) == b.bits {
            SteinerOrder::Less
        } else {
            SteinerOrder::Incomparable
        }
    } else if (b.bits >> (b.prefix_len - a.prefix_len)) == a.bits {
        SteinerOrder::Greater
    } else {
        SteinerOrder::Incomparable
    }
}

/// Coordinates an exact value `x` reaches moving down: itself, plus every
/// prefix whose next bit in `x` is 1 (truncating there rounds `x` down).
pub fn down_choices(x: u32, width: u8) -> Vec<SteinerCoordinate> {
    let mut out = vec![SteinerCoordinate::exact(x, width)];
    for j in 0..width {
        if (x >> (width - 1 - j)) & 1 == 1 {
            out.push(SteinerCoordinate::prefix_of(x, width, j));
        }
    }
    out
}

/// Coordinates that reach an exact value `x` moving down to it: itself, plus
/// every prefix whose next bit in `x` is 0 (`x` rounds the prefix's range up
/// from below).
pub fn up_choices(x: u32, width: u8) -> Vec<SteinerCoordinate> {
    let mut out = vec![SteinerCoordinate::exact(x, width)];
    for j in 0..width {
        if (x >> (width - 1 - j)) & 1 == 0 {
            out.push(SteinerCoordinate::prefix_of(x, width, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// All `width`-bit completions of a coordinate.
    fn completions(c: &SteinerCoordinate) -> Vec<u32> {
        let free = c.width - c.prefix_len;
        (0..(1u32 << free)).map(|low| (c.bits << free) | low).collect()
    }

    #[test]
    fn relation_basic_cases() {
        let w = 3;
        let root = SteinerCoordinate::prefix_of(0, w, 0);
        let five = SteinerCoordinate::exact(5, w);
        let ten_prefix = SteinerCoordinate::prefix_of(5, w, 2); // "10"
        assert_eq!(steiner_relation(&five, &five), SteinerOrder::Equal);
        assert_eq!(steiner_relation(&five, &root), SteinerOrder::Less);
        assert_eq!(steiner_relation(&root, &five), SteinerOrder::Greater);
        assert_eq!(steiner_relation(&five, &ten_prefix), SteinerOrder::Less);
        let other = SteinerCoordinate::exact(2, w);
        assert_eq!(steiner_relation(&five, &other), SteinerOrder::Incomparable);
        let narrow = SteinerCoordinate::exact(1, 2);
        assert_eq!(steiner_relation(&five, &narrow), SteinerOrder::Incomparable);
    }

    #[test]
    fn heap_codes_unique_per_width() {
        let w = 4u8;
        let mut seen = std::collections::HashSet::new();
        for j in 0..=w {
            for p in 0..(1u32 << j) {
                let c = SteinerCoordinate {
                    width: w,
                    prefix_len: j,
                    bits: p,
                };
                assert!(seen.insert(c.heap_code()));
                assert!(c.heap_code() < (1u64 << (w + 1)));
            }
        }
    }

    #[test]
    fn rendezvous_choice_counts() {
        // x = 0b101: down = exact + 2 one-bits, up = exact + 1 zero-bit.
        assert_eq!(down_choices(5, 3).len(), 3);
        assert_eq!(up_choices(5, 3).len(), 2);
        assert_eq!(down_choices(0, 3).len(), 1);
        assert_eq!(up_choices(0, 3).len(), 4);
    }

    proptest! {
        #[test]
        fn relation_matches_completion_sets(
            w in 1u8..=6,
            ja in 0u8..=6,
            jb in 0u8..=6,
            x in 0u32..64,
            y in 0u32..64,
        ) {
            let (ja, jb) = (ja.min(w), jb.min(w));
            let a = SteinerCoordinate::prefix_of(x % (1 << w), w, ja);
            let b = SteinerCoordinate::prefix_of(y % (1 << w), w, jb);
            let sa: std::collections::BTreeSet<u32> = completions(&a).into_iter().collect();
            let sb: std::collections::BTreeSet<u32> = completions(&b).into_iter().collect();
            let expected = if sa == sb {
                SteinerOrder::Equal
            } else if sa.is_subset(&sb) {
                SteinerOrder::Less
            } else if sb.is_subset(&sa) {
                SteinerOrder::Greater
            } else {
                prop_assert!(sa.intersection(&sb).next().is_none());
                SteinerOrder::Incomparable
            };
            prop_assert_eq!(steiner_relation(&a, &b), expected);
        }

        #[test]
        fn exact_values_meet_exactly_when_ordered(
            w in 1u8..=6,
            x in 0u32..64,
            y in 0u32..64,
        ) {
            let (x, y) = (x % (1 << w), y % (1 << w));
            let down: std::collections::HashSet<_> =
                down_choices(x, w).into_iter().collect();
            let meet: Vec<_> = up_choices(y, w)
                .into_iter()
                .filter(|c| down.contains(c))
                .collect();
            if x >= y {
                // Exactly one rendezvous coordinate for ordered values.
                prop_assert_eq!(meet.len(), 1);
                if x == y {
                    prop_assert!(meet[0].is_exact());
                }
            } else {
                prop_assert!(meet.is_empty());
            }
        }
    }
}
