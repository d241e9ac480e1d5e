//! Finite security lattices.
//!
//! A [`Lattice`] is an immutable description of one lattice instance. Labels
//! are small `Copy` handles that remember which instance they came from, so
//! mixing labels of different instances is detected instead of silently
//! producing garbage.
//!
//! Three instances are provided: the two-point lattice `L ⊑ H`, the powerset
//! of a finite atom set ordered by inclusion, and the product of two lattices
//! ordered componentwise.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("label belongs to a different lattice instance")]
    InstanceMismatch,
    #[error("unknown label `{0}` for lattice {1}")]
    UnknownLabel(String, String),
    #[error("invalid lattice: {0}")]
    Invalid(String),
}

/// Carrier of a lattice instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    TwoPoint,
    Powerset(Vec<String>),
    Product(Box<Lattice>, Box<Lattice>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    kind: LatticeKind,
    id: u64,
    size: u32,
}

/// An element of a particular lattice instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    lattice: u64,
    index: u32,
}

impl Label {
    pub fn index(self) -> u32 {
        self.index
    }

    /// The least element of the lattice this label belongs to. Every
    /// instance numbers its bottom element 0.
    pub fn bottom_like(self) -> Label {
        Label { lattice: self.lattice, index: 0 }
    }
}

/// Label syntax independent of any instance; resolved against a lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LabelTerm {
    /// `L`, `H`, `bot`, `top`.
    Named(String),
    /// `{a,b}`.
    Set(Vec<String>),
    /// `(l1,l2)`.
    Pair(Box<LabelTerm>, Box<LabelTerm>),
}

impl fmt::Display for LabelTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelTerm::Named(n) => f.write_str(n),
            LabelTerm::Set(atoms) => write!(f, "{{{}}}", atoms.join(",")),
            LabelTerm::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

const MAX_ATOMS: usize = 16;

fn fingerprint(kind: &LatticeKind) -> u64 {
    // FNV-1a over the canonical description; equal descriptions share an id.
    let text = describe_kind(kind);
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

fn describe_kind(kind: &LatticeKind) -> String {
    match kind {
        LatticeKind::TwoPoint => "2pt".to_string(),
        LatticeKind::Powerset(atoms) => format!("(powerset {})", atoms.join(" ")),
        LatticeKind::Product(a, b) => format!("(product {} {})", a.describe(), b.describe()),
    }
}

impl Lattice {
    fn from_kind(kind: LatticeKind) -> Result<Lattice, LatticeError> {
        let size = match &kind {
            LatticeKind::TwoPoint => 2,
            LatticeKind::Powerset(atoms) => {
                if atoms.len() > MAX_ATOMS {
                    return Err(LatticeError::Invalid(format!("at most {MAX_ATOMS} atoms are supported")));
                }
                for (i, atom) in atoms.iter().enumerate() {
                    if atoms[..i].contains(atom) {
                        return Err(LatticeError::Invalid(format!("duplicate atom `{atom}`")));
                    }
                }
                1u32 << atoms.len()
            }
            LatticeKind::Product(a, b) => a
                .size
                .checked_mul(b.size)
                .filter(|n| *n <= 1 << 20)
                .ok_or_else(|| LatticeError::Invalid("product lattice too large".into()))?,
        };
        let id = fingerprint(&kind);
        Ok(Lattice { kind, id, size })
    }

    pub fn two_point() -> Lattice {
        Lattice::from_kind(LatticeKind::TwoPoint).expect("two-point lattice is valid")
    }

    pub fn powerset<S: Into<String>>(atoms: impl IntoIterator<Item = S>) -> Result<Lattice, LatticeError> {
        Lattice::from_kind(LatticeKind::Powerset(atoms.into_iter().map(Into::into).collect()))
    }

    pub fn product(a: Lattice, b: Lattice) -> Result<Lattice, LatticeError> {
        Lattice::from_kind(LatticeKind::Product(Box::new(a), Box::new(b)))
    }

    pub fn kind(&self) -> &LatticeKind {
        &self.kind
    }

    /// Canonical textual description, as accepted in `(lattice ...)` headers.
    pub fn describe(&self) -> String {
        describe_kind(&self.kind)
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    fn label(&self, index: u32) -> Label {
        debug_assert!(index < self.size);
        Label { lattice: self.id, index }
    }

    pub fn contains(&self, l: Label) -> bool {
        l.lattice == self.id && l.index < self.size
    }

    fn check(&self, l: Label) -> Result<(), LatticeError> {
        if self.contains(l) {
            Ok(())
        } else {
            Err(LatticeError::InstanceMismatch)
        }
    }

    pub fn bot(&self) -> Label {
        self.label(0)
    }

    pub fn top(&self) -> Label {
        self.label(self.top_index())
    }

    fn top_index(&self) -> u32 {
        match &self.kind {
            LatticeKind::TwoPoint => 1,
            LatticeKind::Powerset(_) => self.size - 1,
            LatticeKind::Product(a, b) => a.top_index() * b.size + b.top_index(),
        }
    }

    /// All elements, in index order (bottom first).
    pub fn elements(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.size).map(|i| self.label(i))
    }

    pub fn leq(&self, a: Label, b: Label) -> Result<bool, LatticeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.flows(a, b))
    }

    pub fn join(&self, a: Label, b: Label) -> Result<Label, LatticeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.lub(a, b))
    }

    pub fn meet(&self, a: Label, b: Label) -> Result<Label, LatticeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.glb(a, b))
    }

    /// `a ⊑ b` for labels already known to belong to this instance.
    pub fn flows(&self, a: Label, b: Label) -> bool {
        debug_assert!(self.contains(a) && self.contains(b));
        self.leq_index(a.index, b.index)
    }

    /// Join for labels already known to belong to this instance.
    pub fn lub(&self, a: Label, b: Label) -> Label {
        debug_assert!(self.contains(a) && self.contains(b));
        self.label(self.join_index(a.index, b.index))
    }

    /// Meet for labels already known to belong to this instance.
    pub fn glb(&self, a: Label, b: Label) -> Label {
        debug_assert!(self.contains(a) && self.contains(b));
        self.label(self.meet_index(a.index, b.index))
    }

    fn leq_index(&self, a: u32, b: u32) -> bool {
        match &self.kind {
            LatticeKind::TwoPoint => a <= b,
            LatticeKind::Powerset(_) => a & !b == 0,
            LatticeKind::Product(la, lb) => {
                la.leq_index(a / lb.size, b / lb.size) && lb.leq_index(a % lb.size, b % lb.size)
            }
        }
    }

    fn join_index(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            LatticeKind::TwoPoint => a.max(b),
            LatticeKind::Powerset(_) => a | b,
            LatticeKind::Product(la, lb) => {
                la.join_index(a / lb.size, b / lb.size) * lb.size + lb.join_index(a % lb.size, b % lb.size)
            }
        }
    }

    fn meet_index(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            LatticeKind::TwoPoint => a.min(b),
            LatticeKind::Powerset(_) => a & b,
            LatticeKind::Product(la, lb) => {
                la.meet_index(a / lb.size, b / lb.size) * lb.size + lb.meet_index(a % lb.size, b % lb.size)
            }
        }
    }

    /// Resolve label syntax against this instance.
    pub fn resolve(&self, term: &LabelTerm) -> Result<Label, LatticeError> {
        self.resolve_index(term).map(|i| self.label(i))
    }

    fn resolve_index(&self, term: &LabelTerm) -> Result<u32, LatticeError> {
        let unknown = || LatticeError::UnknownLabel(term.to_string(), self.describe());
        match term {
            LabelTerm::Named(n) if n == "bot" => Ok(0),
            LabelTerm::Named(n) if n == "top" => Ok(self.top_index()),
            LabelTerm::Named(n) => match (&self.kind, n.as_str()) {
                (LatticeKind::TwoPoint, "L") => Ok(0),
                (LatticeKind::TwoPoint, "H") => Ok(1),
                _ => Err(unknown()),
            },
            LabelTerm::Set(members) => match &self.kind {
                LatticeKind::Powerset(atoms) => {
                    let mut mask = 0u32;
                    for m in members {
                        let pos = atoms.iter().position(|a| a == m).ok_or_else(unknown)?;
                        mask |= 1 << pos;
                    }
                    Ok(mask)
                }
                _ => Err(unknown()),
            },
            LabelTerm::Pair(a, b) => match &self.kind {
                LatticeKind::Product(la, lb) => Ok(la.resolve_index(a)? * lb.size + lb.resolve_index(b)?),
                _ => Err(unknown()),
            },
        }
    }

    /// Canonical syntax for a label: `L`/`H`, `bot` or `{a,b}`, `(l1,l2)`.
    pub fn term(&self, l: Label) -> LabelTerm {
        debug_assert!(self.contains(l));
        self.term_index(l.index)
    }

    fn term_index(&self, index: u32) -> LabelTerm {
        match &self.kind {
            LatticeKind::TwoPoint => LabelTerm::Named(if index == 0 { "L" } else { "H" }.into()),
            LatticeKind::Powerset(_) if index == 0 => LabelTerm::Named("bot".into()),
            LatticeKind::Powerset(atoms) => LabelTerm::Set(
                atoms.iter().enumerate().filter(|(i, _)| index & (1 << i) != 0).map(|(_, a)| a.clone()).collect(),
            ),
            LatticeKind::Product(la, lb) => {
                LabelTerm::Pair(Box::new(la.term_index(index / lb.size)), Box::new(lb.term_index(index % lb.size)))
            }
        }
    }

    pub fn show(&self, l: Label) -> String {
        self.term(l).to_string()
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(n: &str) -> LabelTerm {
        LabelTerm::Named(n.into())
    }

    fn set(atoms: &[&str]) -> LabelTerm {
        LabelTerm::Set(atoms.iter().map(|s| s.to_string()).collect())
    }

    fn small_lattices() -> Vec<Lattice> {
        vec![
            Lattice::two_point(),
            Lattice::powerset(Vec::<String>::new()).unwrap(),
            Lattice::powerset(["a"]).unwrap(),
            Lattice::powerset(["a", "b"]).unwrap(),
            Lattice::powerset(["a", "b", "c"]).unwrap(),
            Lattice::product(Lattice::two_point(), Lattice::powerset(["a", "b"]).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn two_point_order() {
        let lat = Lattice::two_point();
        let l = lat.resolve(&named("L")).unwrap();
        let h = lat.resolve(&named("H")).unwrap();
        assert_eq!(lat.leq(l, h), Ok(true));
        assert_eq!(lat.leq(h, l), Ok(false));
        assert_eq!(lat.join(l, h), Ok(h));
        assert_eq!(lat.meet(l, h), Ok(l));
        assert_eq!(lat.bot(), l);
        assert_eq!(lat.top(), h);
    }

    #[test]
    fn powerset_order() {
        let lat = Lattice::powerset(["a", "b"]).unwrap();
        let a = lat.resolve(&set(&["a"])).unwrap();
        let b = lat.resolve(&set(&["b"])).unwrap();
        let ab = lat.resolve(&set(&["a", "b"])).unwrap();
        assert_eq!(lat.leq(a, ab), Ok(true));
        assert_eq!(lat.leq(a, b), Ok(false));
        assert_eq!(lat.join(a, b), Ok(ab));
        assert_eq!(lat.meet(ab, b), Ok(b));
        assert_eq!(lat.top(), ab);
        assert_eq!(lat.show(lat.bot()), "bot");
        assert_eq!(lat.show(ab), "{a,b}");
    }

    #[test]
    fn product_labels_round_trip() {
        let lat = Lattice::product(Lattice::two_point(), Lattice::powerset(["a", "b"]).unwrap()).unwrap();
        for l in lat.elements() {
            assert_eq!(lat.resolve(&lat.term(l)), Ok(l));
        }
        assert_eq!(lat.show(lat.top()), "(H,{a,b})");
        assert_eq!(lat.show(lat.bot()), "(L,bot)");
    }

    #[test]
    fn cross_instance_operations_are_rejected() {
        let two = Lattice::two_point();
        let pow = Lattice::powerset(["a"]).unwrap();
        assert_eq!(two.leq(two.bot(), pow.top()), Err(LatticeError::InstanceMismatch));
        assert_eq!(pow.join(two.top(), pow.top()), Err(LatticeError::InstanceMismatch));
        assert_eq!(pow.meet(pow.top(), two.top()), Err(LatticeError::InstanceMismatch));
    }

    #[test]
    fn unknown_labels_are_rejected() {
        let two = Lattice::two_point();
        assert!(two.resolve(&set(&["a"])).is_err());
        assert!(two.resolve(&named("M")).is_err());
        let pow = Lattice::powerset(["a"]).unwrap();
        assert!(pow.resolve(&set(&["z"])).is_err());
        assert!(Lattice::powerset(["a", "a"]).is_err());
    }

    #[test]
    fn lattice_laws_hold_exhaustively() {
        for lat in small_lattices() {
            let elems: Vec<Label> = lat.elements().collect();
            for &x in &elems {
                assert!(lat.flows(lat.bot(), x));
                assert!(lat.flows(x, lat.top()));
                assert_eq!(lat.lub(x, x), x);
                assert_eq!(lat.glb(x, x), x);
                assert_eq!(lat.lub(lat.bot(), x), x);
                assert_eq!(lat.glb(lat.top(), x), x);
                for &y in &elems {
                    let j = lat.lub(x, y);
                    let m = lat.glb(x, y);
                    assert_eq!(j, lat.lub(y, x));
                    assert_eq!(m, lat.glb(y, x));
                    assert_eq!(lat.lub(x, lat.glb(x, y)), x, "absorption");
                    assert_eq!(lat.glb(x, lat.lub(x, y)), x, "absorption");
                    assert_eq!(lat.flows(x, y), j == y);
                    assert_eq!(lat.flows(x, y), m == x);
                    if lat.flows(x, y) && lat.flows(y, x) {
                        assert_eq!(x, y, "antisymmetry");
                    }
                    for &z in &elems {
                        assert_eq!(lat.lub(lat.lub(x, y), z), lat.lub(x, lat.lub(y, z)));
                        assert_eq!(lat.glb(lat.glb(x, y), z), lat.glb(x, lat.glb(y, z)));
                        if lat.flows(x, y) && lat.flows(y, z) {
                            assert!(lat.flows(x, z), "transitivity");
                        }
                        // least upper bound / greatest lower bound
                        if lat.flows(x, z) && lat.flows(y, z) {
                            assert!(lat.flows(j, z));
                        }
                        if lat.flows(z, x) && lat.flows(z, y) {
                            assert!(lat.flows(z, m));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn equal_descriptions_share_an_instance() {
        let a = Lattice::powerset(["a", "b"]).unwrap();
        let b = Lattice::powerset(["a", "b"]).unwrap();
        assert!(b.contains(a.top()));
        assert_ne!(Lattice::two_point().bot(), Lattice::powerset(["a"]).unwrap().bot());
    }
}
