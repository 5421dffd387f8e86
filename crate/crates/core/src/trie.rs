//! Character trie shared by the moral and valence lexicons.
//!
//! Every node can carry two payloads: an exact-term id (accepted only when
//! the input ends on this node) and a stem id (accepted for any
//! continuation). Children are kept sorted so lookups are a binary search.

#[derive(Debug, Clone, Default)]
struct Node {
    children: Vec<(char, u32)>,
    exact: Option<u32>,
    stem: Option<u32>,
}

#[derive(Debug, Clone)]
pub(crate) struct Trie {
    nodes: Vec<Node>,
}

impl Default for Trie {
    fn default() -> Self {
        Self {
            nodes: vec![Node::default()],
        }
    }
}

impl Trie {
    pub(crate) fn insert(&mut self, key: &str, is_stem: bool, id: u32) {
        let mut cur = 0usize;
        for ch in key.chars() {
            cur = match self.nodes[cur].children.binary_search_by_key(&ch, |&(c, _)| c) {
                Ok(pos) => self.nodes[cur].children[pos].1 as usize,
                Err(pos) => {
                    let next = self.nodes.len() as u32;
                    self.nodes.push(Node::default());
                    self.nodes[cur].children.insert(pos, (ch, next));
                    next as usize
                }
            };
        }
        let node = &mut self.nodes[cur];
        if is_stem {
            node.stem = Some(id);
        } else {
            node.exact = Some(id);
        }
    }

    #[inline]
    fn child(&self, node: usize, ch: char) -> Option<usize> {
        let children = &self.nodes[node].children;
        children
            .binary_search_by_key(&ch, |&(c, _)| c)
            .ok()
            .map(|pos| children[pos].1 as usize)
    }

    /// Longest entry matching a whole token: a stem matches any token it
    /// prefixes, an exact entry only the identical token. On equal length
    /// the exact entry wins.
    pub(crate) fn match_token(&self, token: &str) -> Option<u32> {
        let mut cur = 0usize;
        let mut best = self.nodes[0].stem;
        for ch in token.chars() {
            match self.child(cur, ch) {
                Some(next) => cur = next,
                None => return best,
            }
            if let Some(id) = self.nodes[cur].stem {
                best = Some(id);
            }
        }
        self.nodes[cur].exact.or(best)
    }

    /// Longest entry that is a prefix of `text`, as (byte length, id).
    /// Stem and exact entries are treated alike here.
    pub(crate) fn longest_prefix(&self, text: &str) -> Option<(usize, u32)> {
        let mut cur = 0usize;
        let mut best = None;
        for (offset, ch) in text.char_indices() {
            match self.child(cur, ch) {
                Some(next) => cur = next,
                None => break,
            }
            let node = &self.nodes[cur];
            if let Some(id) = node.exact.or(node.stem) {
                best = Some((offset + ch.len_utf8(), id));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_beats_stem_of_equal_length() {
        let mut t = Trie::default();
        t.insert("kill", true, 0);
        t.insert("kill", false, 1);
        assert_eq!(t.match_token("kill"), Some(1));
        assert_eq!(t.match_token("kills"), Some(0));
        assert_eq!(t.match_token("kil"), None);
    }

    #[test]
    fn longest_stem_wins() {
        let mut t = Trie::default();
        t.insert("kill", true, 0);
        t.insert("killer", true, 1);
        assert_eq!(t.match_token("killers"), Some(1));
        assert_eq!(t.match_token("killing"), Some(0));
    }

    #[test]
    fn longest_prefix_reports_bytes() {
        let mut t = Trie::default();
        t.insert("道徳", false, 0);
        t.insert("不道徳", false, 1);
        assert_eq!(t.longest_prefix("不道徳だ"), Some(("不道徳".len(), 1)));
        assert_eq!(t.longest_prefix("道徳と"), Some(("道徳".len(), 0)));
        assert_eq!(t.longest_prefix("だ"), None);
    }
}
