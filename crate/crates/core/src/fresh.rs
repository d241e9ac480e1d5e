use std::collections::BTreeSet;

/// Deterministic supply of variable names that avoids a fixed set of names.
#[derive(Debug, Clone)]
pub struct Fresh {
    taken: BTreeSet<String>,
    counter: usize,
}

impl Fresh {
    pub fn avoiding(taken: BTreeSet<String>) -> Self {
        Fresh { taken, counter: 0 }
    }

    /// `{base}{n}` for the next counter value not already taken.
    pub fn name(&mut self, base: &str) -> String {
        loop {
            self.counter += 1;
            let candidate = format!("{base}{}", self.counter);
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}
