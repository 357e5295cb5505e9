//! Index families of infinitary joins and meets.
//!
//! A family is either a finite list or a deterministic, restartable stream
//! addressed by position. Streams may leave gaps (`None`) at positions that a
//! filter rejected; enumeration treats a gap as a step that produced nothing.

use crate::coding::unpair;
use std::fmt;
use std::sync::Arc;

pub type MemberFn<T> = Arc<dyn Fn(usize) -> Option<T> + Send + Sync>;
pub type BlockFn<T> = Arc<dyn Fn(usize) -> Family<T> + Send + Sync>;

/// Block structure of a stream: the union over `k` of `block(k)`, where block
/// `k` quantifies `k` fresh variables beyond a tuple of `base_arity`.
///
/// On a finite universe of size `n` only blocks `k <= n - base_arity` carry
/// injective tuples, so evaluators may stop there.
#[derive(Clone)]
pub struct Blocks<T> {
    pub base_arity: usize,
    pub block: BlockFn<T>,
}

#[derive(Clone)]
pub struct Stream<T> {
    label: Arc<str>,
    member: MemberFn<T>,
    blocks: Option<Blocks<T>>,
    dual: Option<Arc<Stream<T>>>,
}

impl<T> Stream<T> {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn get(&self, pos: usize) -> Option<T> {
        (self.member)(pos)
    }

    pub fn blocks(&self) -> Option<&Blocks<T>> {
        self.blocks.as_ref()
    }
}

impl<T: Clone + Send + Sync + 'static> Stream<T> {
    pub fn new(
        label: impl Into<String>,
        member: impl Fn(usize) -> Option<T> + Send + Sync + 'static,
    ) -> Self {
        Stream {
            label: label.into().into(),
            member: Arc::new(member),
            blocks: None,
            dual: None,
        }
    }

    /// Stream whose position `p` addresses member `j` of block `k` with
    /// `(k, j) = unpair(p)`.
    pub fn from_blocks(
        label: impl Into<String>,
        base_arity: usize,
        block: impl Fn(usize) -> Family<T> + Send + Sync + 'static,
    ) -> Self {
        let block: BlockFn<T> = Arc::new(block);
        let b = block.clone();
        let member = move |p: usize| {
            let (k, j) = unpair(p as u64);
            b(k as usize).get(j as usize)
        };
        Stream {
            label: label.into().into(),
            member: Arc::new(member),
            blocks: Some(Blocks { base_arity, block }),
            dual: None,
        }
    }

    pub fn map<U: Clone + Send + Sync + 'static>(
        &self,
        label: impl Into<String>,
        f: impl Fn(T) -> U + Send + Sync + 'static,
    ) -> Stream<U> {
        let f = Arc::new(f);
        self.filter_map_arc(label.into(), Arc::new(move |t| Some(f(t))))
    }

    pub fn filter_map<U: Clone + Send + Sync + 'static>(
        &self,
        label: impl Into<String>,
        f: impl Fn(T) -> Option<U> + Send + Sync + 'static,
    ) -> Stream<U> {
        self.filter_map_arc(label.into(), Arc::new(f))
    }

    fn filter_map_arc<U: Clone + Send + Sync + 'static>(
        &self,
        label: String,
        f: Arc<dyn Fn(T) -> Option<U> + Send + Sync>,
    ) -> Stream<U> {
        let src = self.member.clone();
        let g = f.clone();
        let member: MemberFn<U> = Arc::new(move |p| src(p).and_then(|t| g(t)));
        let blocks = self.blocks.as_ref().map(|b| {
            let inner = b.block.clone();
            let lbl = label.clone();
            let h = f.clone();
            let block: BlockFn<U> = Arc::new(move |k| {
                let h = h.clone();
                inner(k).filter_map_arc(format!("{lbl}#{k}"), Arc::new(move |t| h(t)))
            });
            Blocks {
                base_arity: b.base_arity,
                block,
            }
        });
        Stream {
            label: label.into(),
            member,
            blocks,
            dual: None,
        }
    }

    /// Map by an involution `f`. Dualizing the result returns `self`
    /// unchanged, so `dual(dual(s))` is the original stream.
    pub fn dualize(&self, f: impl Fn(T) -> T + Send + Sync + 'static) -> Stream<T> {
        if let Some(orig) = &self.dual {
            return (**orig).clone();
        }
        let label = match self.label.strip_prefix('~') {
            Some(rest) => rest.to_string(),
            None => format!("~{}", self.label),
        };
        let mut out = self.filter_map_arc(label, Arc::new(move |t| Some(f(t))));
        out.dual = Some(Arc::new(self.clone()));
        out
    }
}

impl<T> fmt::Debug for Stream<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gen:{}", self.label)
    }
}

/// Streams are compared by label; labels are derived deterministically from
/// the construction that produced the stream.
impl<T> PartialEq for Stream<T> {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family<T> {
    Finite(Vec<T>),
    Stream(Stream<T>),
}

impl<T: Clone + Send + Sync + 'static> Family<T> {
    pub fn get(&self, pos: usize) -> Option<T> {
        match self {
            Family::Finite(v) => v.get(pos).cloned(),
            Family::Stream(s) => s.get(pos),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Family::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&[T]> {
        match self {
            Family::Finite(v) => Some(v),
            Family::Stream(_) => None,
        }
    }

    pub fn map<U: Clone + Send + Sync + 'static>(
        &self,
        label: impl Into<String>,
        f: impl Fn(T) -> U + Send + Sync + 'static,
    ) -> Family<U> {
        match self {
            Family::Finite(v) => Family::Finite(v.iter().cloned().map(f).collect()),
            Family::Stream(s) => Family::Stream(s.map(label, f)),
        }
    }

    pub fn filter_map<U: Clone + Send + Sync + 'static>(
        &self,
        label: impl Into<String>,
        f: impl Fn(T) -> Option<U> + Send + Sync + 'static,
    ) -> Family<U> {
        self.filter_map_arc(label.into(), Arc::new(f))
    }

    fn filter_map_arc<U: Clone + Send + Sync + 'static>(
        &self,
        label: String,
        f: Arc<dyn Fn(T) -> Option<U> + Send + Sync>,
    ) -> Family<U> {
        match self {
            Family::Finite(v) => Family::Finite(v.iter().cloned().filter_map(|t| f(t)).collect()),
            Family::Stream(s) => Family::Stream(s.filter_map_arc(label, f)),
        }
    }

    pub fn dualize(&self, f: impl Fn(T) -> T + Send + Sync + 'static) -> Family<T> {
        match self {
            Family::Finite(v) => Family::Finite(v.iter().cloned().map(f).collect()),
            Family::Stream(s) => Family::Stream(s.dualize(f)),
        }
    }

    /// Enumerates up to `limit` positions (all members for finite families).
    pub fn prefix(&self, limit: usize) -> Vec<T> {
        match self {
            Family::Finite(v) => v.clone(),
            Family::Stream(s) => (0..limit).filter_map(|p| s.get(p)).collect(),
        }
    }
}

/// Step counter shared across a whole recursive evaluation. Every stream
/// position visited costs one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    remaining: u64,
}

impl Budget {
    pub fn new(steps: u64) -> Self {
        Budget { remaining: steps }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    /// Charges one step; `false` once exhausted.
    pub fn charge(&mut self) -> bool {
        if self.remaining == 0 {
            false
        } else {
            self.remaining -= 1;
            true
        }
    }
}

/// Three-valued outcome of semi-decisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn not(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }

    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn is_decided(self) -> bool {
        self != Tri::Unknown
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Tri::True => Some(true),
            Tri::False => Some(false),
            Tri::Unknown => None,
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::True => "true",
            Tri::False => "false",
            Tri::Unknown => "unknown",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_dual_is_original() {
        let s = Stream::new("evens", |p| Some(2 * p as u64));
        let d = s.dualize(|x| x + 1);
        assert_eq!(d.label(), "~evens");
        assert_eq!(d.get(3), Some(7));
        let dd = d.dualize(|x| x + 1);
        assert_eq!(dd.label(), "evens");
        assert_eq!(dd.get(3), Some(6));
    }

    #[test]
    fn enumeration_is_deterministic() {
        let s = Family::Stream(Stream::new("sq", |p| (p % 3 != 0).then(|| p * p)));
        assert_eq!(s.prefix(10), s.prefix(10));
        assert_eq!(s.prefix(5), vec![1, 4, 16]);
    }

    #[test]
    fn blocks_address_by_pairing() {
        let s = Stream::from_blocks("b", 0, |k| Family::Finite(vec![(k, 0usize), (k, 1)]));
        // position 0 = (0,0); position 2 = (0,1); position 1 = (1,0)
        assert_eq!(s.get(0), Some((0, 0)));
        assert_eq!(s.get(2), Some((0, 1)));
        assert_eq!(s.get(1), Some((1, 0)));
        assert_eq!(s.get(5), None); // (0,2)
    }

    #[test]
    fn budget_exhausts() {
        let mut b = Budget::new(2);
        assert!(b.charge());
        assert!(b.charge());
        assert!(!b.charge());
    }
}
