use crate::sample::Sample;

/// Fixed-capacity ring of samples, oldest first. Storage is allocated
/// once at construction; push and pop never reallocate, which is what
/// keeps the filter's steady state allocation-free.
#[derive(Debug, Clone)]
pub(crate) struct SampleRing {
    buf: Vec<Sample>,
    head: usize,
    len: usize,
}

impl SampleRing {
    pub fn with_capacity(cap: usize) -> Self {
        assert!(cap > 0, "ring capacity must be positive");
        SampleRing {
            buf: vec![Sample::new(0.0, 0.0); cap],
            head: 0,
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// i = 0 is the oldest sample.
    pub fn get(&self, i: usize) -> Sample {
        debug_assert!(i < self.len);
        self.buf[(self.head + i) % self.buf.len()]
    }

    /// Newest sample, if any.
    pub fn back(&self) -> Option<Sample> {
        if self.len == 0 {
            None
        } else {
            Some(self.get(self.len - 1))
        }
    }

    pub fn push_back(&mut self, s: Sample) {
        assert!(self.len < self.buf.len(), "ring overflow");
        let idx = (self.head + self.len) % self.buf.len();
        self.buf[idx] = s;
        self.len += 1;
    }

    pub fn pop_front(&mut self) {
        debug_assert!(self.len > 0);
        self.head = (self.head + 1) % self.buf.len();
        self.len -= 1;
    }

    /// Oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = Sample> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Newest to oldest.
    pub fn iter_rev(&self) -> impl Iterator<Item = Sample> + '_ {
        (0..self.len).rev().map(move |i| self.get(i))
    }
}
