use rand::{Rng, SeedableRng};
use tumorfront::freeboundary::*;
use tumorfront::model::ModelParams;
use tumorfront::Dim;

fn mismatch(dim: Dim, geom: &LayerGeometry, p: &ModelParams, at: f64) -> f64 {
    let h = 1e-6;
    let w = |x: f64| w_at(dim, geom, p, 0.0, x).unwrap();
    let inner = (3.0 * w(at) - 4.0 * w(at - h) + w(at - 2.0 * h)) / (2.0 * h);
    let outer = (-3.0 * w(at) + 4.0 * w(at + h) - w(at + 2.0 * h)) / (2.0 * h);
    (inner - outer).abs()
}

fn main() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut tested = 0;
    let mut worst = (0.0f64, Dim::One, 0.0, 0.0, 0.0, 0.0, false);
    while tested < 50 {
        let c_s: f64 = rng.random_range(0.5..2.0);
        let c_z: f64 = rng.random_range(0.02..1.5);
        let c_p: f64 = rng.random_range(0.5..5.0);
        if c_p * c_s <= 2.0 * c_z { continue; }
        let r1: f64 = rng.random_range(0.1..20.0);
        let p = ModelParams::new(c_s, c_z, c_p, 100.0, 1e-3).unwrap();
        for dim in [Dim::One, Dim::Two, Dim::Three] {
            let r2 = solve_r2_given_r1(dim, r1, &p).unwrap();
            let geom = LayerGeometry::new(r1, r1 + r2).unwrap();
            let m1 = mismatch(dim, &geom, &p, r1);
            let m2 = mismatch(dim, &geom, &p, geom.r);
            for (m, at_outer) in [(m1, false), (m2, true)] {
                if m > worst.0 { worst = (m, dim, c_s, c_z, c_p, r1, at_outer); }
            }
        }
        tested += 1;
    }
    let (m, dim, c_s, c_z, c_p, r1, at_outer) = worst;
    println!("worst mismatch {m:.3e} at dim={dim:?} c_s={c_s:.4} c_z={c_z:.4} c_p={c_p:.4} r1={r1:.4} outer={at_outer}");
    let p = ModelParams::new(c_s, c_z, c_p, 100.0, 1e-3).unwrap();
    let r2 = solve_r2_given_r1(dim, r1, &p).unwrap();
    println!("r2 = {r2}, residual = {:.3e}", boundary_relation_residual(dim, r1, r1 + r2, &p));

    // criterion 6 3D part
    let p = ModelParams::new(1.0, 0.02, 2.0, 100.0, 1e-4).unwrap();
    let r_min3 = solve_r2_given_r1(Dim::Three, 0.0, &p).unwrap();
    println!("3D r_min = {r_min3}");
    match integrate_front(Dim::Three, r_min3 + 0.3, &p, 53.0, 0.02) {
        Ok(s) => println!("3D DAE ok, final r = {}", s.r.last().unwrap()),
        Err(e) => println!("3D DAE failed: {e}"),
    }
    match integrate_front(Dim::Two, 3.0, &p, 53.0, 0.02) {
        Ok(s) => println!("2D DAE ok, final r = {}", s.r.last().unwrap()),
        Err(e) => println!("2D DAE failed: {e}"),
    }
}
