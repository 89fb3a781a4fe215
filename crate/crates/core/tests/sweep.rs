use qfilter::dynamics::SimConfig;
use qfilter::goalprog::{crossing_locus, linspace, surfaces, Surfaces};

fn grid(steps_per_period: usize) -> Surfaces {
    let template = SimConfig::for_periods(1.0, 0.005, 15.0, steps_per_period, 1, 0).unwrap();
    surfaces(&linspace(0.0, 15.0, 16), &linspace(0.0005, 0.02, 5), &template, None).unwrap()
}

fn max_gap(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .filter(|(x, y)| x.is_finite() || y.is_finite())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn surfaces_are_converged_at_the_sweep_step() {
    let (coarse, fine) = (grid(2000), grid(4000));
    let gap = [
        max_gap(&coarse.c_re, &fine.c_re),
        max_gap(&coarse.b_re, &fine.b_re),
        max_gap(&coarse.e_re, &fine.e_re),
    ];
    eprintln!("surface change on halving the step: {gap:?}");
    assert!(gap.iter().all(|&g| g < 1e-6), "{gap:?}");
}

#[test]
fn surfaces_start_from_the_initial_distances() {
    let s = grid(2000);
    for k in 0..s.kappa_grid.len() {
        // rho_R = rho_I = |L><L|, rho_E = I/2 at t = 0
        assert!((s.c_re[k][0] - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(s.b_re[k][0], 0.0);
    }
    assert_eq!(crossing_locus(&s).len(), 5);
}
