use rectwalk::hitting::ratio_closed_rw;
use rectwalk::lattice::{discrete_harmonic_ratio, refine_extrapolate, GridSpec};
use rectwalk::scmap::{alpha_from_aspect, AspectRatio};

fn continuum(r: f64) -> f64 {
    ratio_closed_rw(alpha_from_aspect(AspectRatio::new(r).unwrap()).unwrap()).value
}

#[test]
fn aspect_two_extrapolates_to_continuum() {
    let sizes: Vec<_> = [19, 39, 79]
        .iter()
        .map(|&h| GridSpec::for_aspect(2.0, h).unwrap())
        .collect();
    let ex = refine_extrapolate(2.0, &sizes, 1e-12).unwrap();
    let exact = continuum(2.0);
    let order = ex.order.unwrap();
    println!(
        "aspect 2: extrapolated {:.12e}, continuum {exact:.12e}, order {order:.4}",
        ex.ratio
    );
    assert!(((ex.ratio - exact) / exact).abs() < 3e-3);
    assert!((1.5..=2.5).contains(&order));
    // raw grids approach the continuum from one side
    for row in &ex.rows {
        assert!(row.residual <= 1e-12);
    }
}

#[test]
fn aspect_ten_coarse_grid() {
    let spec = GridSpec::for_aspect(10.0, 79).unwrap();
    let g = discrete_harmonic_ratio(spec, 1e-12).unwrap();
    let exact = continuum(10.0);
    println!("aspect 10, height 79: {:.6e} vs {exact:.6e}", g.ratio);
    assert!(((g.ratio - exact) / exact).abs() < 0.25);
}

#[test]
fn aspect_ten_height_nineteen() {
    let spec = GridSpec::new(199, 19).unwrap();
    let g = discrete_harmonic_ratio(spec, 1e-12).unwrap();
    let exact = continuum(10.0);
    assert!(((g.ratio - exact) / exact).abs() < 0.25, "{:e}", g.ratio);
}

#[test]
fn end_probability_falls_with_aspect() {
    let mut prev = 1.0;
    for w in [9, 19, 29, 49, 99] {
        let g = discrete_harmonic_ratio(GridSpec::new(w, 9).unwrap(), 1e-12).unwrap();
        assert!(g.p_end < prev);
        prev = g.p_end;
    }
}
