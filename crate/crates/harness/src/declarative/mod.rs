//! Bounded declarative derivation search.
//!
//! The algorithmic checkers fold subsumption into elimination forms. The
//! oracles here instead follow the declarative rules literally, with a free
//! subsumption rule, and compute for a term the *set* of all types it can be
//! given. Subtyping never changes the shape of a type, only its labels, and
//! every subterm has a single shape, so the search space for a subterm is the
//! set of labelings of its shape. For the two-point lattice a labeling is a
//! bit mask over the label positions of the shape, and a set of types is a
//! bit set over masks.
//!
//! A term is declaratively typable iff its set is nonempty; the algorithmic
//! type is principal iff the set is exactly the upward closure of it.

pub mod cg;
pub mod fg;

/// Variance of one label position within a type shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pol {
    Co,
    Contra,
    Inv,
}

impl Pol {
    pub fn flip(self) -> Pol {
        match self {
            Pol::Co => Pol::Contra,
            Pol::Contra => Pol::Co,
            Pol::Inv => Pol::Inv,
        }
    }
}

/// Upper bound on label positions per shape; larger shapes are reported as
/// out of the search's bounds.
pub const MAX_POSITIONS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(bits: usize) -> Self {
        BitSet { words: vec![0; bits.div_ceil(64)] }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, w)| {
            let mut w = *w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn intersect(&self, other: &BitSet) -> BitSet {
        BitSet { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }
}

/// Close `set` (over masks of `pols.len()` positions, bit set = ⊤) upward
/// under the product order the polarities induce. Each position is closed
/// in turn; for a product of chains that yields the full closure.
pub fn close_up(set: &mut BitSet, pols: &[Pol]) {
    let n = 1usize << pols.len();
    for (i, pol) in pols.iter().enumerate() {
        let bit = 1usize << i;
        match pol {
            Pol::Co => {
                for m in 0..n {
                    if m & bit == 0 && set.contains(m) {
                        set.insert(m | bit);
                    }
                }
            }
            Pol::Contra => {
                for m in 0..n {
                    if m & bit != 0 && set.contains(m) {
                        set.insert(m & !bit);
                    }
                }
            }
            Pol::Inv => {}
        }
    }
}

/// Whether mask `a` is below mask `b` in the order the polarities induce.
pub fn mask_leq(a: usize, b: usize, pols: &[Pol]) -> bool {
    pols.iter().enumerate().all(|(i, pol)| {
        let (x, y) = (a >> i & 1, b >> i & 1);
        match pol {
            Pol::Co => x <= y,
            Pol::Contra => x >= y,
            Pol::Inv => x == y,
        }
    })
}

/// Result of comparing the two checkers on one term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Agreement {
    /// Both reject.
    BothReject,
    /// Both accept and the algorithmic type is the least declarative type.
    Principal,
    /// Both accept and the algorithmic type is derivable with nothing
    /// derivable strictly below it, yet some derivable type is incomparable
    /// to it: the term has no least type.
    Minimal(String),
    /// The term's shapes exceed [`MAX_POSITIONS`].
    OutOfBounds,
    Disagree(String),
}

impl Agreement {
    pub fn is_failure(&self) -> bool {
        matches!(self, Agreement::Disagree(_))
    }
}

/// Where the algorithmic type `t` sits within a derivable set.
pub(crate) enum Standing {
    Least,
    /// Minimal; carries a derivable mask incomparable to `t`.
    Minimal(usize),
    NotDerivable,
    /// Carries a derivable mask strictly below `t`.
    NotMinimal(usize),
}

pub(crate) fn standing(set: &BitSet, pols: &[Pol], t: usize) -> Standing {
    if !set.contains(t) {
        return Standing::NotDerivable;
    }
    if let Some(m) = set.iter().find(|m| *m != t && mask_leq(*m, t, pols)) {
        return Standing::NotMinimal(m);
    }
    match set.iter().find(|m| !mask_leq(t, *m, pols)) {
        None => Standing::Least,
        Some(m) => Standing::Minimal(m),
    }
}
