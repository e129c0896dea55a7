/// A bijection `x ↔ (s, x_s)` over the b-absorbing interval `I = [l, bl)`.
///
/// Implementors must guarantee that for every symbol with `l_s > 0` the
/// substates `I_s = [l_s, b·l_s)` are exactly the preimage of `I` under
/// `encode(s, ·)`.
pub trait SymbolCoder {
    fn symbols(&self) -> usize;
    fn l(&self) -> u64;
    fn b(&self) -> u64;
    fn l_s(&self, s: usize) -> u64;
    /// `x ∈ I` to `(s, x_s)` with `x_s ∈ I_s`.
    fn decode(&self, x: u64) -> (usize, u64);
    /// `x_s ∈ I_s` to `x ∈ I`.
    fn encode(&self, s: usize, xs: u64) -> u64;

    /// Probability implied by the quantized interval sizes, `l_s / l`.
    fn prob(&self, s: usize) -> f64 {
        self.l_s(s) as f64 / self.l() as f64
    }
}

impl<C: SymbolCoder + ?Sized> SymbolCoder for &C {
    fn symbols(&self) -> usize {
        (**self).symbols()
    }
    fn l(&self) -> u64 {
        (**self).l()
    }
    fn b(&self) -> u64 {
        (**self).b()
    }
    fn l_s(&self, s: usize) -> u64 {
        (**self).l_s(s)
    }
    fn decode(&self, x: u64) -> (usize, u64) {
        (**self).decode(x)
    }
    fn encode(&self, s: usize, xs: u64) -> u64 {
        (**self).encode(s, xs)
    }
}
