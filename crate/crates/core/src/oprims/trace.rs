use serde::{Deserialize, Serialize};

/// Indexed element storage used by the primitives.
///
/// `read` takes `&mut self` so that tracing implementations can log it.
pub trait Slots<T: Copy> {
    fn len(&self) -> usize;
    fn read(&mut self, i: usize) -> T;
    fn write(&mut self, i: usize, v: T);
    /// Grow (filling with `fill`) or shrink to `n` slots.
    fn resize(&mut self, n: usize, fill: T);

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<T: Copy> Slots<T> for Vec<T> {
    #[inline]
    fn len(&self) -> usize {
        Vec::len(self)
    }
    #[inline]
    fn read(&mut self, i: usize) -> T {
        self[i]
    }
    #[inline]
    fn write(&mut self, i: usize, v: T) {
        self[i] = v;
    }
    fn resize(&mut self, n: usize, fill: T) {
        Vec::resize(self, n, fill);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessKind {
    Read,
    Write,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Access {
    pub kind: AccessKind,
    pub index: usize,
}

/// A buffer that logs every element access.
///
/// Growing the buffer logs one write per new slot; shrinking is free.
#[derive(Clone, Debug, Default)]
pub struct TracedBuffer<T> {
    storage: Vec<T>,
    trace: Vec<Access>,
}

impl<T: Copy> TracedBuffer<T> {
    pub fn new(storage: Vec<T>) -> Self {
        TracedBuffer {
            storage,
            trace: Vec::new(),
        }
    }

    pub fn trace(&self) -> &[Access] {
        &self.trace
    }

    pub fn as_slice(&self) -> &[T] {
        &self.storage
    }

    pub fn into_parts(self) -> (Vec<T>, Vec<Access>) {
        (self.storage, self.trace)
    }
}

impl<T: Copy> Slots<T> for TracedBuffer<T> {
    fn len(&self) -> usize {
        self.storage.len()
    }

    fn read(&mut self, i: usize) -> T {
        self.trace.push(Access {
            kind: AccessKind::Read,
            index: i,
        });
        self.storage[i]
    }

    fn write(&mut self, i: usize, v: T) {
        self.trace.push(Access {
            kind: AccessKind::Write,
            index: i,
        });
        self.storage[i] = v;
    }

    fn resize(&mut self, n: usize, fill: T) {
        let old = self.storage.len();
        self.storage.resize(n, fill);
        for i in old..n {
            self.trace.push(Access {
                kind: AccessKind::Write,
                index: i,
            });
        }
    }
}
