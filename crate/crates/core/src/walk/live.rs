//! Bit set over interval sites with nearest-set-bit queries in both directions.

#[derive(Clone, Debug, Default)]
pub(crate) struct LiveSet {
    words: Vec<u64>,
    summary: Vec<u64>,
}

impl LiveSet {
    /// Sizes the set for `n` sites and makes it empty.
    pub(crate) fn reset(&mut self, n: usize) {
        let w = n.div_ceil(64);
        self.words.clear();
        self.words.resize(w, 0);
        self.summary.clear();
        self.summary.resize(w.div_ceil(64), 0);
    }

    /// Sets every bit in `lo..hi`.
    pub(crate) fn insert_range(&mut self, lo: usize, hi: usize) {
        if lo >= hi {
            return;
        }
        let (wl, wh) = (lo >> 6, (hi - 1) >> 6);
        for w in wl..=wh {
            let mut m = !0u64;
            if w == wl {
                m &= !0u64 << (lo & 63);
            }
            if w == wh {
                m &= !0u64 >> (63 - ((hi - 1) & 63));
            }
            self.words[w] |= m;
            self.summary[w >> 6] |= 1 << (w & 63);
        }
    }

    /// Clears every bit in `lo..hi`.
    pub(crate) fn remove_range(&mut self, lo: usize, hi: usize) {
        if lo >= hi {
            return;
        }
        let (wl, wh) = (lo >> 6, (hi - 1) >> 6);
        for w in wl..=wh {
            let mut m = !0u64;
            if w == wl {
                m &= !0u64 << (lo & 63);
            }
            if w == wh {
                m &= !0u64 >> (63 - ((hi - 1) & 63));
            }
            self.words[w] &= !m;
            if self.words[w] == 0 {
                self.summary[w >> 6] &= !(1 << (w & 63));
            }
        }
    }

    #[inline]
    pub(crate) fn insert(&mut self, i: usize) {
        let w = i >> 6;
        self.words[w] |= 1 << (i & 63);
        self.summary[w >> 6] |= 1 << (w & 63);
    }

    #[inline]
    pub(crate) fn remove(&mut self, i: usize) {
        let w = i >> 6;
        self.words[w] &= !(1 << (i & 63));
        if self.words[w] == 0 {
            self.summary[w >> 6] &= !(1 << (w & 63));
        }
    }

    #[inline]
    #[cfg(test)]
    pub(crate) fn contains(&self, i: usize) -> bool {
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Smallest member strictly greater than `i`. A member above `i` must exist.
    #[inline]
    pub(crate) fn next_after(&self, i: usize) -> usize {
        let j = i + 1;
        let w = j >> 6;
        if w < self.words.len() {
            let m = self.words[w] & (!0u64 << (j & 63));
            if m != 0 {
                return (w << 6) | m.trailing_zeros() as usize;
            }
        }
        let mut s = (w + 1) >> 6;
        let mut m = if (w + 1) & 63 == 0 {
            self.summary[s]
        } else {
            self.summary[s] & (!0u64 << ((w + 1) & 63))
        };
        while m == 0 {
            s += 1;
            m = self.summary[s];
        }
        let w = (s << 6) | m.trailing_zeros() as usize;
        (w << 6) | self.words[w].trailing_zeros() as usize
    }

    /// Largest member strictly smaller than `i`. A member below `i` must exist.
    #[inline]
    pub(crate) fn prev_before(&self, i: usize) -> usize {
        let w = i >> 6;
        let m = self.words[w] & ((1u64 << (i & 63)) - 1);
        if m != 0 {
            return (w << 6) | (63 - m.leading_zeros() as usize);
        }
        let mut s = w >> 6;
        let mut m = self.summary[s] & ((1u64 << (w & 63)) - 1);
        while m == 0 {
            s -= 1;
            m = self.summary[s];
        }
        let w = (s << 6) | (63 - m.leading_zeros() as usize);
        (w << 6) | (63 - self.words[w].leading_zeros() as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn queries_match_a_vector_of_bools(n in 2usize..9000, ops in prop::collection::vec((0usize..9000, 0usize..9000, 0u8..4), 1..40)) {
            let mut set = LiveSet::default();
            set.reset(n);
            let mut model = vec![false; n];
            set.insert(0);
            set.insert(n - 1);
            model[0] = true;
            model[n - 1] = true;
            for (a, b, op) in ops {
                let (a, b) = (a % n, b % n);
                let (lo, hi) = (a.min(b), a.max(b));
                match op {
                    0 => { set.insert_range(lo, hi); model[lo..hi].iter_mut().for_each(|x| *x = true); }
                    1 => { set.remove_range(lo.max(1), hi.min(n - 1)); for x in model.iter_mut().take(hi.min(n - 1)).skip(lo.max(1)) { *x = false; } }
                    2 => { set.insert(a); model[a] = true; }
                    _ => if a != 0 && a != n - 1 { set.remove(a); model[a] = false; },
                }
                for i in [lo, hi, a, b] {
                    prop_assert_eq!(set.contains(i), model[i]);
                    if i + 1 < n {
                        let expect = (i + 1..n).find(|&j| model[j]).unwrap();
                        prop_assert_eq!(set.next_after(i), expect);
                    }
                    if i > 0 {
                        let expect = (0..i).rev().find(|&j| model[j]).unwrap();
                        prop_assert_eq!(set.prev_before(i), expect);
                    }
                }
            }
        }
    }
}
