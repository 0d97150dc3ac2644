use crate::real::Real;

/// A mutable track: explicit cells over a periodic background.
///
/// `cell(i)` is `cells[i]` inside the explicit region, otherwise
/// `tail[(i - base) % tail.len()]`. Writing past the explicit region
/// materializes the background up to that cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Tape {
    cells: Vec<bool>,
    base: usize,
    tail: Vec<bool>,
}

impl Tape {
    pub fn from_real(r: &Real) -> Self {
        Tape {
            cells: r.prefix().to_vec(),
            base: r.prefix().len(),
            tail: r.tail().to_vec(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        match self.cells.get(i) {
            Some(&b) => b,
            None => self.tail[(i - self.base) % self.tail.len()],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        if i >= self.cells.len() {
            let from = self.cells.len();
            self.cells.extend((from..=i).map(|k| self.tail[(k - self.base) % self.tail.len()]));
        }
        self.cells[i] = b;
    }

    pub fn explicit_len(&self) -> usize {
        self.cells.len()
    }

    pub fn period(&self) -> usize {
        self.tail.len()
    }

    pub fn to_real(&self) -> Real {
        let n = self.cells.len();
        let p = self.tail.len();
        let tail = (0..p).map(|k| self.get(n + k)).collect();
        Real::new(self.cells.clone(), tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn background_is_preserved_when_materializing() {
        let r: Real = "1(01)*".parse().unwrap();
        let mut t = Tape::from_real(&r);
        t.set(6, true);
        for i in 0..12 {
            let expect = if i == 6 { true } else { r.bit(i) };
            assert_eq!(t.get(i), expect, "cell {i}");
        }
        assert_eq!(t.to_real().bits(12), (0..12).map(|i| t.get(i)).collect::<Vec<_>>());
    }
}
