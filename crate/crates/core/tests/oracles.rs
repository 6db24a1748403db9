use std::f64::consts::{PI, SQRT_2};

use latdisc::arith::ArithTables;
use latdisc::body::{BodyGeometry, RevolutionProfile};
use latdisc::lemma::{build_m, select_lambda};
use latdisc::spectrum::{borel_mean, build_series, build_series_with_cutoff, CoeffModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

/// `#{m in Z^3 : |m|^2 <= n}` for `n = 0..=n_max`, by direct enumeration.
fn ball_counts(n_max: usize) -> Vec<u64> {
    let r = (n_max as f64).sqrt() as i64 + 1;
    let mut hist = vec![0u64; n_max + 1];
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let n = (a * a + b * b + c * c) as usize;
                if n <= n_max {
                    hist[n] += 1;
                }
            }
        }
    }
    let mut acc = 0;
    hist.iter()
        .map(|h| {
            acc += h;
            acc
        })
        .collect()
}

#[test]
fn borel_mean_agrees_with_monte_carlo() {
    let g = BodyGeometry::new(RevolutionProfile::Sphere).unwrap();
    let t: f64 = 10.0;
    let (k, x) = (t * t * t.ln(), 1.0 / t.ln());
    let quad = borel_mean(&g, t).unwrap();

    let counts = ball_counts(400);
    let vol = 4.0 * PI / 3.0;
    let gamma = Gamma::new(k + 1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let n = 100_000;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..n {
        let xu = x * gamma.sample(&mut rng);
        let p = counts[xu.floor() as usize] as f64 - vol * xu.powf(1.5);
        sum += p;
        sum2 += p * p;
    }
    let mean = sum / n as f64;
    let se = ((sum2 / n as f64 - mean * mean) / (n as f64 - 1.0)).sqrt();
    assert!((quad.value - mean).abs() <= 3.0 * se, "quadrature {} vs Monte Carlo {mean} ± {se}", quad.value);
}

#[test]
fn borel_mean_of_spheroid_is_finite_and_normalized() {
    let g = BodyGeometry::new(RevolutionProfile::spheroid(2.0, 1.0)).unwrap();
    let b = borel_mean(&g, 8.0).unwrap();
    assert!(b.value.is_finite());
    assert!((b.mass - 1.0).abs() < 1e-6);
    assert!(b.nodes >= 257);
}

#[test]
fn resonating_set_has_product_structure() {
    let tables = ArithTables::build(40_000).unwrap();
    for profile in [RevolutionProfile::Sphere, RevolutionProfile::spheroid(1.5, 0.8), RevolutionProfile::fourier([1.0, 0.05])] {
        let g = BodyGeometry::new(profile).unwrap();
        let series = build_series_with_cutoff(&g, &tables, 100.0, CoeffModel::Unit, 30_000.0).unwrap();
        for lam in [3.0, 8.0, 20.0, 45.0, 90.0] {
            let sel = build_m(&g, &tables, &series, lam, SQRT_2, 3).unwrap();
            // cross-count directly from the definition of the set
            let r = g.rect;
            let mut direct = 0usize;
            for c in &series.classes {
                let (ell, m3) = (c.ell as f64, c.m3 as f64);
                let in_rect = (r.a1 * lam).powi(2) <= ell
                    && ell <= (r.a2 * lam).powi(2)
                    && r.a3 * lam <= m3
                    && m3 <= r.a4 * lam
                    && c.ell > 0
                    && c.m3 > 0;
                if in_rect && tables.is_a1(c.ell).unwrap() && tables.omega(c.ell).unwrap() as u32 == sel.k {
                    direct += 1;
                    assert!((0.5 * lam..=1.5 * lam).contains(&c.lambda));
                }
            }
            assert_eq!(sel.card(), direct, "Lambda={lam}");
            assert_eq!(sel.card(), sel.s_set.len() * sel.m3_count());
        }
    }
}

#[test]
fn unit_series_on_sphere_sums_r3_over_shells() {
    let g = BodyGeometry::new(RevolutionProfile::Sphere).unwrap();
    let tables = ArithTables::build(1000).unwrap();
    let s = build_series(&g, &tables, 30.0, CoeffModel::Unit, 0.3).unwrap();
    let counts = ball_counts(s.cutoff.floor() as usize);
    let total_g: f64 = s.classes.iter().map(|c| c.g).sum();
    assert_eq!(total_g as u64, counts[s.cutoff.floor() as usize] - 1);
}

#[test]
fn lambda_choice_at_ten_thousand() {
    let lt = 1e4f64.ln();
    let e = (1.0 - SQRT_2 + SQRT_2 * (2.0 * SQRT_2).ln()) / 3.0;
    let direct = 0.5 * lt.cbrt() * lt.ln().powf(e) * lt.ln().ln().powf(-1.0 / 6.0);
    assert!((select_lambda(1e4, SQRT_2, 0.5).lambda - direct).abs() < 1e-12);
}
