//! The mutable store threaded through evaluation.

/// A location: an index into the heap. Locations are never freed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Loc(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Heap<V> {
    cells: Vec<V>,
}

impl<V> Default for Heap<V> {
    fn default() -> Self {
        Heap { cells: Vec::new() }
    }
}

impl<V> Heap<V> {
    pub fn new() -> Self {
        Heap::default()
    }

    pub fn alloc(&mut self, value: V) -> Loc {
        self.cells.push(value);
        Loc(self.cells.len() - 1)
    }

    pub fn get(&self, loc: Loc) -> Option<&V> {
        self.cells.get(loc.0)
    }

    /// Overwrite an allocated cell; returns `false` for dangling locations.
    pub fn set(&mut self, loc: Loc, value: V) -> bool {
        match self.cells.get_mut(loc.0) {
            Some(cell) => {
                *cell = value;
                true
            }
            None => false,
        }
    }

    /// Number of allocated cells; also the next fresh location.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Loc, &V)> {
        self.cells.iter().enumerate().map(|(i, v)| (Loc(i), v))
    }
}

/// Step accounting shared by the evaluators: every rule instance except
/// literals and variables costs one step.
#[derive(Debug, Clone)]
pub struct Fuel {
    limit: u64,
    used: u64,
}

pub const DEFAULT_FUEL: u64 = 100_000;

impl Fuel {
    pub fn new(limit: u64) -> Self {
        Fuel { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn tick(&mut self) -> Result<(), crate::EvalError> {
        self.used += 1;
        if self.used > self.limit {
            Err(crate::EvalError::Timeout(self.limit))
        } else {
            Ok(())
        }
    }
}
