//! Compensated summation for long series of small positive terms.

/// Kahan accumulator. The equilibrium energy series and the
/// hypergeometric mass walks sum up to a few hundred million terms;
/// plain accumulation would lose several digits there.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, term: f64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}
