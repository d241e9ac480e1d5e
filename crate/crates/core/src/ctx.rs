//! Typing contexts.

/// A typing context: a stack of bindings, innermost last.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ctx<T> {
    entries: Vec<(String, T)>,
}

impl<T> Default for Ctx<T> {
    fn default() -> Self {
        Ctx { entries: Vec::new() }
    }
}

impl<T> Ctx<T> {
    pub fn new() -> Self {
        Ctx::default()
    }

    pub fn push(&mut self, name: impl Into<String>, ty: T) {
        self.entries.push((name.into(), ty));
    }

    pub fn pop(&mut self) -> Option<(String, T)> {
        self.entries.pop()
    }

    pub fn lookup(&self, name: &str) -> Option<&T> {
        self.entries.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &T)> {
        self.entries.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Run `f` with `name : ty` in scope.
    pub fn with<R>(&mut self, name: &str, ty: T, f: impl FnOnce(&mut Self) -> R) -> R {
        self.entries.push((name.to_string(), ty));
        let out = f(self);
        self.entries.pop();
        out
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Ctx<U> {
        Ctx { entries: self.entries.iter().map(|(n, t)| (n.clone(), f(t))).collect() }
    }
}

impl<T, S: Into<String>> FromIterator<(S, T)> for Ctx<T> {
    fn from_iter<I: IntoIterator<Item = (S, T)>>(iter: I) -> Self {
        Ctx { entries: iter.into_iter().map(|(n, t)| (n.into(), t)).collect() }
    }
}
