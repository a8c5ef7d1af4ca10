//! Free-group words and Whitehead's primitivity algorithm.
//!
//! Words in the free group F_g are letter lists of signed generator
//! indices: `1` is x1, `-1` is its inverse.  Curves map to words through
//! their portal transits, and a curve is accepted as primitive exactly
//! when its word is a primitive element of F_g.

use serde::{Deserialize, Serialize};

/// A freely reduced word over the generators x1..xg.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    /// Builds a word from raw letters, applying free reduction.
    pub fn new(letters: &[i32]) -> Word {
        let mut buf: Vec<i32> = Vec::with_capacity(letters.len());
        for &x in letters {
            if x == 0 {
                continue;
            }
            if buf.last().is_some_and(|&y| y == -x) {
                buf.pop();
            } else {
                buf.push(x);
            }
        }
        Word { letters: buf }
    }

    pub fn empty() -> Word {
        Word { letters: Vec::new() }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&x| -x).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::new(&letters)
    }

    /// Cyclically reduces the word (drops conjugating prefixes/suffixes).
    pub fn cyclic_reduce(&self) -> Word {
        let mut v = self.letters.clone();
        while v.len() >= 2 && *v.first().unwrap() == -*v.last().unwrap() {
            v.pop();
            v.remove(0);
        }
        Word { letters: v }
    }

    /// Lexicographically least cyclic rotation of the cyclically reduced word.
    pub fn canonical_rotation(&self) -> Word {
        let w = self.cyclic_reduce();
        if w.letters.is_empty() {
            return w;
        }
        let n = w.letters.len();
        let mut best = w.letters.clone();
        for k in 1..n {
            let rot: Vec<i32> = (0..n).map(|i| w.letters[(i + k) % n]).collect();
            if rot < best {
                best = rot;
            }
        }
        Word { letters: best }
    }

    /// Canonical comparison key: minimum of the canonical rotation of the
    /// word and of its inverse.  Stable under rotation and global inversion.
    pub fn canonical_key(&self) -> Word {
        let a = self.canonical_rotation();
        let b = self.inverse().canonical_rotation();
        if a.letters <= b.letters {
            a
        } else {
            b
        }
    }

    /// Exponent-sum vector of length `genus`.
    pub fn abelianize(&self, genus: usize) -> Vec<i64> {
        let mut v = vec![0i64; genus];
        for &x in &self.letters {
            let i = (x.unsigned_abs() as usize) - 1;
            if i < genus {
                v[i] += x.signum() as i64;
            }
        }
        v
    }

    fn max_generator(&self) -> u32 {
        self.letters.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }
}

/// Reduces a letter list; with `cyclic` the result is cyclically reduced
/// and canonical-rotation-normalized.
pub fn reduce(letters: &[i32], cyclic: bool) -> Word {
    let w = Word::new(letters);
    if cyclic {
        w.canonical_rotation()
    } else {
        w
    }
}

/// A Whitehead automorphism of the second kind, given by a multiplier
/// letter `a` and a letter set `cut` with `a` in the set and `a^-1` not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhiteheadMove {
    pub multiplier: i32,
    pub cut: Vec<i32>,
}

impl WhiteheadMove {
    fn contains(&self, x: i32) -> bool {
        self.cut.contains(&x)
    }

    /// Image of a single positive or negative generator letter.
    fn image(&self, x: i32) -> Vec<i32> {
        let a = self.multiplier;
        if x == a || x == -a {
            return vec![x];
        }
        // Apply to the positive generator, invert if needed.
        let pos = x.abs();
        let in_pos = self.contains(pos);
        let in_neg = self.contains(-pos);
        let img_pos: Vec<i32> = match (in_pos, in_neg) {
            (true, false) => vec![pos, a],
            (false, true) => vec![-a, pos],
            (true, true) => vec![-a, pos, a],
            (false, false) => vec![pos],
        };
        if x > 0 {
            img_pos
        } else {
            img_pos.iter().rev().map(|&y| -y).collect()
        }
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Vec::with_capacity(w.len() * 3);
        for &x in w.letters() {
            out.extend(self.image(x));
        }
        Word::new(&out)
    }
}

/// All Whitehead moves over the letters of F_g, in a fixed lexicographic
/// order over (multiplier, cut set).
pub fn whitehead_moves(genus: u32) -> Vec<WhiteheadMove> {
    let letters: Vec<i32> = (1..=genus as i32).flat_map(|i| [i, -i]).collect();
    let mut moves = Vec::new();
    for &a in &letters {
        let rest: Vec<i32> = letters.iter().copied().filter(|&x| x != a && x != -a).collect();
        let m = rest.len();
        for mask in 0..(1u32 << m) {
            let mut cut = vec![a];
            for (bit, &x) in rest.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    cut.push(x);
                }
            }
            moves.push(WhiteheadMove { multiplier: a, cut });
        }
    }
    moves
}

/// Minimizes the cyclic length of `w` by greedily applying any strictly
/// length-reducing Whitehead move, in deterministic move order.
pub fn whitehead_minimize(w: &Word, genus: u32) -> Word {
    let moves = whitehead_moves(genus);
    let mut cur = w.cyclic_reduce();
    'outer: loop {
        for mv in &moves {
            let img = mv.apply(&cur).cyclic_reduce();
            if img.len() < cur.len() {
                cur = img;
                continue 'outer;
            }
        }
        return cur;
    }
}

/// Decides whether a cyclically reduced word is a primitive element of F_g.
///
/// A word is primitive iff its Whitehead-minimal cyclic length is 1.  The
/// abelianization gcd gives a fast necessary condition.
pub fn is_primitive_word(w: &Word, genus: u32) -> bool {
    let w = w.cyclic_reduce();
    if w.is_empty() || w.max_generator() > genus {
        return false;
    }
    let ab = w.abelianize(genus as usize);
    let g = ab.iter().fold(0i64, |acc, &x| gcd(acc, x.abs()));
    if g != 1 {
        return false;
    }
    whitehead_minimize(&w, genus).len() == 1
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        assert!(Word::new(&[1, -1]).is_empty());
        assert_eq!(reduce(&[-2, 1, 2], true).letters(), &[1]);
        assert_eq!(reduce(&[1, 2, -1], false).letters(), &[1, 2, -1]);
    }

    #[test]
    fn abelianization() {
        assert_eq!(Word::new(&[1, 2, 2]).abelianize(3), vec![1, 2, 0]);
        assert_eq!(Word::new(&[1, 2, -1, -2]).abelianize(2), vec![0, 0]);
        assert_eq!(Word::empty().abelianize(2), vec![0, 0]);
    }

    #[test]
    fn primitivity_basics() {
        assert!(is_primitive_word(&Word::new(&[1]), 2));
        assert!(!is_primitive_word(&Word::new(&[1, 1]), 2));
        // x1 x2^2 is the image of x1 under x1 -> x1 x2^2.
        assert!(is_primitive_word(&Word::new(&[1, 2, 2]), 2));
        // The commutator is not primitive (zero abelianization).
        assert!(!is_primitive_word(&Word::new(&[1, 2, -1, -2]), 2));
        assert!(!is_primitive_word(&Word::empty(), 2));
    }

    #[test]
    fn primitivity_invariances() {
        let w = Word::new(&[1, 2, 2]);
        assert!(is_primitive_word(&w.inverse(), 2));
        // Generator swap x1 <-> x2.
        let swapped = Word::new(&[2, 1, 1]);
        assert!(is_primitive_word(&swapped, 2));
        // Inverting one generator.
        let inv_gen = Word::new(&[-1, 2, 2]);
        assert!(is_primitive_word(&inv_gen, 2));
    }

    #[test]
    fn canonical_rotation_is_least() {
        let w = Word::new(&[2, 1, -2]);
        // Cyclic reduction leaves [2,1,-2] -> reduces to [1]? No: 2,1,-2 has
        // first=2, last=-2, so it cyclically reduces to [1].
        assert_eq!(w.canonical_rotation().letters(), &[1]);
        let w = Word::new(&[2, 1]);
        assert_eq!(w.canonical_rotation().letters(), &[1, 2]);
    }

    #[test]
    fn canonical_key_handles_inversion() {
        let w = Word::new(&[1, 2]);
        assert_eq!(w.canonical_key(), w.inverse().canonical_key());
    }
}
