//! Persistent environments shared by both evaluators.

use std::sync::Arc;

struct Node<'a, V> {
    name: &'a str,
    value: V,
    next: Env<'a, V>,
}

/// An immutable association list; extending is O(1) and clones are cheap.
pub struct Env<'a, V> {
    head: Option<Arc<Node<'a, V>>>,
}

impl<V> Clone for Env<'_, V> {
    fn clone(&self) -> Self {
        Env { head: self.head.clone() }
    }
}

impl<V> Default for Env<'_, V> {
    fn default() -> Self {
        Env { head: None }
    }
}

impl<'a, V> Env<'a, V> {
    pub fn new() -> Self {
        Env { head: None }
    }

    pub fn extend(&self, name: &'a str, value: V) -> Self {
        Env { head: Some(Arc::new(Node { name, value, next: self.clone() })) }
    }

    pub fn lookup(&self, name: &str) -> Option<&V> {
        let mut cur = self.head.as_deref();
        while let Some(node) = cur {
            if node.name == name {
                return Some(&node.value);
            }
            cur = node.next.head.as_deref();
        }
        None
    }
}

impl<V> Drop for Env<'_, V> {
    fn drop(&mut self) {
        // Unlink iteratively so long chains do not overflow the stack.
        let mut cur = self.head.take();
        while let Some(node) = cur {
            match Arc::try_unwrap(node) {
                Ok(mut node) => cur = node.next.head.take(),
                Err(_) => break,
            }
        }
    }
}
