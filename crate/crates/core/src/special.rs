//! Hurwitz zeta function, used for closed-form tails of polynomially
//! decaying sequences.

/// Even-index Bernoulli numbers B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Minimum offset before switching to the Euler–Maclaurin remainder.
const DIRECT_TERMS: f64 = 16.0;

/// ζ(s, q) = Σ_{k≥0} (k + q)^{-s} for s > 1, q > 0.
///
/// Returns `f64::INFINITY` when s ≤ 1.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(q > 0.0, "hurwitz_zeta requires q > 0, got {q}");
    if s <= 1.0 {
        return f64::INFINITY;
    }
    let mut sum = 0.0;
    let mut a = q;
    while a < DIRECT_TERMS {
        sum += a.powf(-s);
        a += 1.0;
    }
    // Euler–Maclaurin at a: ∫_a^∞ x^{-s} dx + a^{-s}/2 + Σ_j B_2j/(2j)! s(s+1)..(s+2j-2) a^{-s-2j+1}
    let mut tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    let mut rising = s; // s (s+1) ... (s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut power = a.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * power;
        tail += term;
        if term.abs() < 1e-18 * tail.abs() {
            break;
        }
        let j2 = 2.0 * (j as f64 + 1.0);
        rising *= (s + j2 - 1.0) * (s + j2);
        fact *= (j2 + 1.0) * (j2 + 2.0);
        power /= a * a;
    }
    sum + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_values() {
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((hurwitz_zeta(2.0, 1.0) - z2).abs() < 1e-14);
        assert!((hurwitz_zeta(3.0, 1.0) - 1.202_056_903_159_594_3).abs() < 1e-14);
        let z4 = std::f64::consts::PI.powi(4) / 90.0;
        assert!((hurwitz_zeta(4.0, 1.0) - z4).abs() < 1e-14);
    }

    #[test]
    fn shift_identity() {
        // ζ(s, q) = q^{-s} + ζ(s, q + 1)
        for &(s, q) in &[(1.5, 0.3), (2.5, 7.0), (3.0, 123.4), (1.1, 2.0)] {
            let lhs = hurwitz_zeta(s, q);
            let rhs = q.powf(-s) + hurwitz_zeta(s, q + 1.0);
            assert!((lhs - rhs).abs() < 1e-12 * lhs, "s={s} q={q}");
        }
    }

    #[test]
    fn matches_direct_summation() {
        let s = 4.0;
        let q = 3.0;
        let direct: f64 = (0..200_000).map(|k| (k as f64 + q).powf(-s)).sum();
        assert!((hurwitz_zeta(s, q) - direct).abs() < 1e-13);
    }

    #[test]
    fn divergent_below_one() {
        assert!(hurwitz_zeta(1.0, 1.0).is_infinite());
        assert!(hurwitz_zeta(0.5, 2.0).is_infinite());
    }
}
