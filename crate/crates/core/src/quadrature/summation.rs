//! Error-compensated accumulators.

/// Neumaier's variant of Kahan summation.
///
/// The running compensation captures the low-order bits lost by each
/// addition, including the case where the incoming term is larger than the
/// running sum. Every grid sum in this crate goes through this type.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    terms: u64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.terms += 1;
    }

    /// Compensated value of the sum.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Correctly rounded floating-point summation (Shewchuk's partials).
///
/// Slower than [`CompensatedSum`] and shares no code with it, which makes it
/// the accumulator of choice for re-checking brackets.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        let mut kept = 0;
        for k in 0..self.partials.len() {
            let mut y = self.partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    pub fn value(&self) -> f64 {
        let mut iter = self.partials.iter().rev();
        let Some(&first) = iter.next() else {
            return 0.0;
        };
        let mut hi = first;
        let mut rest = iter.peekable();
        while let Some(&y) = rest.next() {
            let x = hi;
            hi = x + y;
            let yr = hi - x;
            let lo = y - yr;
            if lo != 0.0 {
                // Round-half-even correction, as in CPython's math.fsum.
                if let Some(&&next) = rest.peek() {
                    if (lo < 0.0 && next < 0.0) || (lo > 0.0 && next > 0.0) {
                        let y2 = lo * 2.0;
                        let x2 = hi + y2;
                        if y2 == x2 - hi {
                            hi = x2;
                        }
                    }
                }
                break;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Bound on the rounding accumulated by a compensated sum of `n` positive
/// terms totalling `total`, including the rounding of each `h * p` product.
pub fn compensated_error_bound(total: f64, n: u64) -> f64 {
    let u = f64::EPSILON / 2.0;
    let n = n as f64;
    total.abs() * (3.0 * u + 4.0 * n * u * u)
}
