//! Triangle quadrature.

/// Area coordinates (L1, L2, L3) and weight; weights sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriPoint {
    pub l: [f64; 3],
    pub w: f64,
}

/// Thirteen-point rule exact for polynomials of total degree seven.
pub fn cowper_13() -> [TriPoint; 13] {
    const W0: f64 = -0.149_570_044_467_682;
    const A: (f64, f64, f64) = (0.479_308_067_841_920, 0.260_345_966_079_040, 0.175_615_257_433_208);
    const B: (f64, f64, f64) = (0.869_739_794_195_568, 0.065_130_102_902_216, 0.053_347_235_608_838);
    const C: [f64; 4] = [
        0.638_444_188_569_810,
        0.312_865_496_004_874,
        0.048_690_315_425_316,
        0.077_113_760_890_257,
    ];
    let third = 1.0 / 3.0;
    let p = |l: [f64; 3], w: f64| TriPoint { l, w };
    let (a, b, c) = (A, B, C);
    [
        p([third, third, third], W0),
        p([a.0, a.1, a.1], a.2),
        p([a.1, a.0, a.1], a.2),
        p([a.1, a.1, a.0], a.2),
        p([b.0, b.1, b.1], b.2),
        p([b.1, b.0, b.1], b.2),
        p([b.1, b.1, b.0], b.2),
        p([c[0], c[1], c[2]], c[3]),
        p([c[0], c[2], c[1]], c[3]),
        p([c[1], c[0], c[2]], c[3]),
        p([c[1], c[2], c[0]], c[3]),
        p([c[2], c[0], c[1]], c[3]),
        p([c[2], c[1], c[0]], c[3]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Exact ∫x^p y^q over the unit right triangle.
    fn exact(p: u32, q: u32) -> f64 {
        factorial(p) * factorial(q) / factorial(p + q + 2)
    }

    #[test]
    fn weights_sum_to_one() {
        let s: f64 = cowper_13().iter().map(|p| p.w).sum();
        assert!((s - 1.0).abs() < 1e-14);
        for p in cowper_13() {
            assert!((p.l.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn degree_seven_monomials_are_exact() {
        for p in 0..=7u32 {
            for q in 0..=(7 - p) {
                // Unit right triangle: x = L2, y = L3, area 1/2.
                let num: f64 = cowper_13()
                    .iter()
                    .map(|g| 0.5 * g.w * g.l[1].powi(p as i32) * g.l[2].powi(q as i32))
                    .sum();
                let ex = exact(p, q);
                assert!(((num - ex) / ex).abs() < 1e-12, "x^{p} y^{q}: {num} vs {ex}");
            }
        }
    }

    #[test]
    fn degree_eight_is_not_exact() {
        let num: f64 = cowper_13().iter().map(|g| 0.5 * g.w * g.l[1].powi(8)).sum();
        assert!(((num - exact(8, 0)) / exact(8, 0)).abs() > 1e-8);
    }
}
