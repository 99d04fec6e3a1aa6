use approx::assert_relative_eq;
use delam_cli::compare::{compare, XyCurve};
use proptest::prelude::*;

/// Linear rise to a peak at δ = 1, then a softening tail.
fn reference() -> XyCurve {
    let pairs: Vec<(f64, f64)> = (0..=60)
        .map(|i| {
            let d = i as f64 * 0.05;
            (d, if d <= 1.0 { 100.0 * d } else { 100.0 / d.powf(1.5) })
        })
        .collect();
    XyCurve::from_pairs(&pairs)
}

fn scaled(c: &XyCurve, s: f64) -> XyCurve {
    let mut out = c.clone();
    for p in &mut out.points {
        p.load *= s;
    }
    out
}

#[test]
fn identical_curves_have_no_error() {
    let r = compare(&reference(), &reference()).unwrap();
    assert_eq!(r.peak_load_error_pct, 0.0);
    assert_eq!(r.initial_stiffness_error_pct, 0.0);
    assert_eq!(r.area_error_pct, 0.0);
    assert_eq!(r.post_peak_mean_error_pct, Some(0.0));
    assert_relative_eq!(r.ref_stiffness_n_per_mm, 100.0, max_relative = 1e-12);
}

#[test]
fn uniformly_higher_load_reads_as_that_percentage() {
    let r = compare(&scaled(&reference(), 1.1), &reference()).unwrap();
    assert_relative_eq!(r.peak_load_error_pct, 10.0, max_relative = 1e-9);
    assert_relative_eq!(r.initial_stiffness_error_pct, 10.0, max_relative = 1e-9);
    assert_relative_eq!(r.area_error_pct, 10.0, max_relative = 1e-9);
    assert_relative_eq!(r.post_peak_mean_error_pct.unwrap(), 10.0, max_relative = 1e-9);
    let low = compare(&scaled(&reference(), 0.9), &reference()).unwrap();
    assert_relative_eq!(low.peak_load_error_pct, -10.0, max_relative = 1e-9);
}

#[test]
fn comparison_is_restricted_to_the_common_range() {
    let mut short = reference();
    short.points.retain(|p| p.delta <= 2.0);
    let r = compare(&short, &reference()).unwrap();
    assert_eq!(r.common_range_mm, [0.0, 2.0]);
    assert!(r.area_error_pct.abs() < 1e-12);
}

#[test]
fn ineligible_points_do_not_set_the_peak() {
    let mut stiffening = reference();
    stiffening.points.last_mut().unwrap().load = 500.0;
    stiffening.points.last_mut().unwrap().peak_eligible = false;
    let r = compare(&reference(), &stiffening).unwrap();
    assert_eq!(r.ref_peak_n, 100.0);
}

#[test]
fn disjoint_ranges_are_an_error() {
    let far = XyCurve::from_pairs(&[(5.0, 1.0), (6.0, 2.0)]);
    assert!(compare(&far, &reference()).is_err());
    assert!(compare(&XyCurve::default(), &reference()).is_err());
}

proptest! {
    #[test]
    fn flipping_the_load_sign_changes_nothing(s in 0.5f64..1.5, flip_sim: bool, flip_ref: bool) {
        let base = compare(&scaled(&reference(), s), &reference()).unwrap();
        let sim = scaled(&reference(), if flip_sim { -s } else { s });
        let rf = scaled(&reference(), if flip_ref { -1.0 } else { 1.0 });
        prop_assert_eq!(compare(&sim, &rf).unwrap(), base);
    }
}
