//! Lazy, memoized signed-digit streams.
//!
//! A [`DigitStream`] is a handle to a node `C d v`. Nodes are call-by-need:
//! the first [`destruct`](DigitStream::destruct) runs the node's thunk once,
//! caches `(d, v)`, and every later destruct returns the cached pair. The
//! tail `v` is itself an unforced node, so a consumer that examines `n`
//! digits forces exactly `n` nodes of the stream.
//!
//! Every node belongs to a chain that shares a [`ReadCounter`]. A node is
//! counted the first time it is destructed. Streams built by [`cons`] or by a
//! corecursion that splices in an existing stream link their counter to the
//! spliced stream's counter, so reads through the tail propagate.
//!
//! [`cons`]: DigitStream::cons

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::digit::{self, DigitList, SignedDigit};
use crate::Rational;

type Thunk = Box<dyn FnOnce() -> (SignedDigit, DigitStream) + Send>;

/// Number of distinct nodes destructed through a stream's chain.
#[derive(Default)]
pub struct ReadCounter {
    own: AtomicUsize,
    linked: OnceLock<Arc<ReadCounter>>,
}

impl ReadCounter {
    fn new() -> Arc<Self> {
        Arc::new(ReadCounter::default())
    }

    fn bump(&self) {
        self.own.fetch_add(1, Ordering::Relaxed);
    }

    fn link(&self, other: &Arc<ReadCounter>) {
        // A chain ends in at most one splice; a second link is ignored.
        let _ = self.linked.set(Arc::clone(other));
    }

    /// Reads counted in this chain plus the chains it was spliced onto.
    pub fn reads(&self) -> usize {
        let mut total = self.own.load(Ordering::Relaxed);
        let mut next = self.linked.get();
        while let Some(c) = next {
            total += c.own.load(Ordering::Relaxed);
            next = c.linked.get();
        }
        total
    }

    /// Reads counted in this chain only.
    pub fn own_reads(&self) -> usize {
        self.own.load(Ordering::Relaxed)
    }
}

impl fmt::Debug for ReadCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReadCounter")
            .field("own", &self.own_reads())
            .field("total", &self.reads())
            .finish()
    }
}

struct Node {
    forced: OnceLock<(SignedDigit, DigitStream)>,
    thunk: Mutex<Option<Thunk>>,
    read: AtomicBool,
    counter: Arc<ReadCounter>,
}

impl Node {
    fn pending(counter: Arc<ReadCounter>, thunk: Thunk) -> Self {
        Node {
            forced: OnceLock::new(),
            thunk: Mutex::new(Some(thunk)),
            read: AtomicBool::new(false),
            counter,
        }
    }

    fn ready(counter: Arc<ReadCounter>, head: SignedDigit, tail: DigitStream) -> Self {
        Node {
            forced: OnceLock::from((head, tail)),
            thunk: Mutex::new(None),
            read: AtomicBool::new(false),
            counter,
        }
    }

    fn force(&self) -> &(SignedDigit, DigitStream) {
        self.forced.get_or_init(|| {
            let thunk = self
                .thunk
                .lock()
                .unwrap_or_else(|e| e.into_inner())
                .take()
                .expect("stream node forced re-entrantly");
            thunk()
        })
    }
}

impl Drop for Node {
    // Unlink long forced spines iteratively.
    fn drop(&mut self) {
        let mut next = self.forced.take().map(|(_, tail)| tail.node);
        while let Some(arc) = next {
            match Arc::try_unwrap(arc) {
                Ok(mut node) => next = node.forced.take().map(|(_, tail)| tail.node),
                Err(_) => break,
            }
        }
    }
}

/// The outcome of one corecursion step: continue from a new state, or stop
/// and use an existing stream as the tail.
pub enum Next<S> {
    Continue(S),
    Splice(DigitStream),
}

/// An infinite stream of signed digits denoting `sum d_i 2^-i` in `[-1, 1]`.
#[derive(Clone)]
pub struct DigitStream {
    node: Arc<Node>,
    exact: Option<Arc<Rational>>,
}

impl DigitStream {
    fn from_node(node: Node) -> Self {
        DigitStream {
            node: Arc::new(node),
            exact: None,
        }
    }

    /// `C d u`: denotes `(d + u) / 2`. The tail is `u` itself.
    pub fn cons(d: SignedDigit, u: DigitStream) -> Self {
        let counter = ReadCounter::new();
        counter.link(&u.node.counter);
        DigitStream::from_node(Node::ready(counter, d, u))
    }

    /// Prepends a finite list of digits to `tail`.
    pub fn prepend(digits: &[SignedDigit], tail: DigitStream) -> Self {
        digits
            .iter()
            .rev()
            .fold(tail, |acc, &d| DigitStream::cons(d, acc))
    }

    /// Stream corecursion: each step yields one digit and either a new state
    /// or a finished tail. Nothing is computed until the first destruct.
    pub fn corec<S, F>(seed: S, step: F) -> Self
    where
        S: Send + 'static,
        F: Fn(S) -> (SignedDigit, Next<S>) + Send + Sync + 'static,
    {
        corec_node(ReadCounter::new(), seed, Arc::new(step))
    }

    /// A stream whose definition is evaluated on first destruct.
    pub fn defer<F>(make: F) -> Self
    where
        F: FnOnce() -> DigitStream + Send + 'static,
    {
        let counter = ReadCounter::new();
        let link = Arc::clone(&counter);
        DigitStream::from_node(Node::pending(
            counter,
            Box::new(move || {
                let u = make();
                link.link(&u.node.counter);
                u.destruct()
            }),
        ))
    }

    /// `(head, tail)`; counts this node the first time it is destructed.
    pub fn destruct(&self) -> (SignedDigit, DigitStream) {
        let (d, tail) = self.node.force();
        if !self.node.read.swap(true, Ordering::Relaxed) {
            self.node.counter.bump();
        }
        (*d, tail.clone())
    }

    pub fn head(&self) -> SignedDigit {
        self.destruct().0
    }

    pub fn tail(&self) -> DigitStream {
        self.destruct().1
    }

    /// Drops the first `n` digits.
    pub fn skip(&self, n: usize) -> DigitStream {
        let mut u = self.clone();
        for _ in 0..n {
            u = u.tail();
        }
        u
    }

    /// The first `n` digits, in order.
    pub fn prefix(&self, n: usize) -> DigitList {
        let mut out = Vec::with_capacity(n);
        let mut u = self.clone();
        for _ in 0..n {
            let (d, t) = u.destruct();
            out.push(d);
            u = t;
        }
        out
    }

    /// `sum_{i=1}^{n} d_i 2^-i`, within `2^-n` of the denoted value.
    pub fn approx(&self, n: usize) -> Rational {
        digit::sum_digits(&self.prefix(n))
    }

    /// The first `n` digits over `{+, 0, -}`.
    pub fn render(&self, n: usize) -> String {
        digit::render(&self.prefix(n))
    }

    /// Digits destructed through this stream's chain so far.
    pub fn reads(&self) -> usize {
        self.node.counter.reads()
    }

    pub fn read_counter(&self) -> Arc<ReadCounter> {
        Arc::clone(&self.node.counter)
    }

    /// Whether two handles point at the same node.
    pub fn same_node(&self, other: &DigitStream) -> bool {
        Arc::ptr_eq(&self.node, &other.node)
    }

    /// Exact value, if the stream was built from a known rational.
    pub fn exact_value(&self) -> Option<&Rational> {
        self.exact.as_deref()
    }

    pub(crate) fn with_exact(mut self, q: Rational) -> Self {
        self.exact = Some(Arc::new(q));
        self
    }

    /// The same stream without its exact-value tag.
    pub fn untagged(&self) -> Self {
        DigitStream {
            node: Arc::clone(&self.node),
            exact: None,
        }
    }
}

fn corec_node<S, F>(counter: Arc<ReadCounter>, seed: S, step: Arc<F>) -> DigitStream
where
    S: Send + 'static,
    F: Fn(S) -> (SignedDigit, Next<S>) + Send + Sync + 'static,
{
    let chain = Arc::clone(&counter);
    DigitStream::from_node(Node::pending(
        counter,
        Box::new(move || {
            let (d, next) = step(seed);
            let tail = match next {
                Next::Continue(s) => corec_node(chain, s, step),
                Next::Splice(u) => {
                    chain.link(&u.node.counter);
                    u
                }
            };
            (d, tail)
        }),
    ))
}

impl fmt::Debug for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut forced = String::new();
        let mut node = Arc::clone(&self.node);
        while let Some((d, t)) = node.forced.get() {
            if forced.len() >= 32 {
                forced.push_str("...");
                break;
            }
            forced.push(d.to_char());
            let next = Arc::clone(&t.node);
            node = next;
        }
        f.debug_struct("DigitStream")
            .field("forced", &forced)
            .field("reads", &self.reads())
            .finish()
    }
}

/// `C d u`.
pub fn cons_digit(d: SignedDigit, u: DigitStream) -> DigitStream {
    DigitStream::cons(d, u)
}

/// `(head, tail)` of `u`.
pub fn destruct(u: &DigitStream) -> (SignedDigit, DigitStream) {
    u.destruct()
}

/// The constant stream `d d d ...`, denoting `d`. Every position is its own
/// node so reads are counted per digit.
pub fn const_stream(d: SignedDigit) -> DigitStream {
    DigitStream::corec((), move |()| (d, Next::Continue(())))
}

pub fn zeros() -> DigitStream {
    const_stream(SignedDigit::Zero)
}

pub fn ones() -> DigitStream {
    const_stream(SignedDigit::Plus)
}

pub fn minus_ones() -> DigitStream {
    const_stream(SignedDigit::Minus)
}

/// `d * u` for a signed digit `d`.
pub fn sd_times(d: SignedDigit, u: &DigitStream) -> DigitStream {
    match d {
        SignedDigit::Plus => u.clone(),
        SignedDigit::Zero => zeros(),
        SignedDigit::Minus => negate(u),
    }
}

/// Digit-wise sign flip, denoting `-u`.
pub fn negate(u: &DigitStream) -> DigitStream {
    let out = DigitStream::corec(u.clone(), |v: DigitStream| {
        let (d, t) = v.destruct();
        (d.negate(), Next::Continue(t))
    });
    match u.exact_value() {
        Some(q) => out.with_exact(-q),
        None => out,
    }
}

/// The first `n` digits of `u`.
pub fn prefix(u: &DigitStream, n: usize) -> DigitList {
    u.prefix(n)
}

/// `sum_{i<=n} d_i 2^-i`.
pub fn approx(u: &DigitStream, n: usize) -> Rational {
    u.approx(n)
}
