use num_complex::Complex64;

use super::problem::ProblemSpec;
use crate::coeffield::{Jet, Sign};

/// Taylor jets of s_α⁽⁰⁾ … s_α⁽ᴷ⁾ at `x`, computed in floating point.
///
/// `root` is the value of √D₀(x) on the working branch; jet k has `K + 1 + extra − k` terms.
pub fn numeric_root_jets(
    spec: &ProblemSpec,
    x: Complex64,
    root: Complex64,
    alpha: Sign,
    order: usize,
    extra: usize,
) -> Vec<Jet> {
    let n = order + 1 + extra;
    let eps = Complex64::new(alpha.value(), 0.0);
    let sq = spec.d0_jet(x, n).sqrt_with(root).scale(eps);
    let lambda = (&spec.p_jet(0, x, n) + &sq).scale(Complex64::new(0.5, 0.0));
    let inv = sq.recip();
    let mut s = vec![lambda];
    for k in 1..=order {
        let m = n - k;
        let mut acc = s[k - 1].derivative();
        for i in 1..k {
            acc = &acc - &(&s[i] * &s[k - i]);
        }
        for i in 1..=k {
            if i < spec.p_coeffs().len() {
                acc = &acc + &(&spec.p_jet(i, x, m) * &s[k - i]);
            }
        }
        acc = &acc - &spec.q_jet(k, x, m);
        s.push(&acc * &inv.truncate(m));
    }
    s
}

/// Values s_α⁽ᵏ⁾(x), k = 0 … K.
pub fn numeric_roots(spec: &ProblemSpec, x: Complex64, root: Complex64, alpha: Sign, order: usize) -> Vec<Complex64> {
    numeric_root_jets(spec, x, root, alpha, order, 0).iter().map(|j| j.value()).collect()
}
