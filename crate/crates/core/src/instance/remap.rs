use std::collections::HashMap;
use std::hash::Hash;

/// Assigns dense `0..len` ids to sparse external keys in first-seen order.
#[derive(Debug, Clone)]
pub struct IdRemapper<K> {
    ids: HashMap<K, u32>,
    keys: Vec<K>,
}

impl<K: Eq + Hash + Clone> Default for IdRemapper<K> {
    fn default() -> Self {
        Self {
            ids: HashMap::new(),
            keys: Vec::new(),
        }
    }
}

impl<K: Eq + Hash + Clone> IdRemapper<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn id(&mut self, key: K) -> u32 {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.keys.len() as u32;
        self.ids.insert(key.clone(), id);
        self.keys.push(key);
        id
    }

    pub fn get(&self, key: &K) -> Option<u32> {
        self.ids.get(key).copied()
    }

    pub fn key(&self, id: u32) -> Option<&K> {
        self.keys.get(id as usize)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_first_seen() {
        let mut r = IdRemapper::new();
        assert_eq!(r.id(900u64), 0);
        assert_eq!(r.id(5), 1);
        assert_eq!(r.id(900), 0);
        assert_eq!(r.key(1), Some(&5));
        assert_eq!(r.len(), 2);
    }
}
