mod common;

use common::*;
use gzk_core::field::{dealias, forward, inverse, Field, Repr};
use gzk_core::grid::make_grid;
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

#[test]
fn constant_field_concentrates_at_zero_mode() {
    let g = make_grid(16, 16, TAU, TAU).unwrap();
    let f = Field::from_real_fn(&g, |_, _| 1.0);
    let hat = forward(&f).unwrap();
    for ix in 0..16 {
        for iy in 0..16 {
            let v = hat.data[ix * 16 + iy];
            if ix == 0 && iy == 0 {
                assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-13);
            } else {
                assert!(v.norm() < 1e-13);
            }
        }
    }
}

#[test]
fn pure_mode_has_single_coefficient() {
    let g = make_grid(16, 16, TAU, TAU).unwrap();
    let f = Field::from_fn(&g, |x, y| Complex64::from_polar(1.0, x + y));
    let hat = forward(&f).unwrap();
    for ix in 0..16 {
        for iy in 0..16 {
            let v = hat.data[ix * 16 + iy];
            if ix == 1 && iy == 1 {
                assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            } else {
                assert!(v.norm() < 1e-12, "stray energy at ({ix},{iy}): {v}");
            }
        }
    }
}

#[test]
fn forward_matches_naive_dft_oracle() {
    let g = make_grid(16, 16, 40.0, 40.0).unwrap();
    let f = Field::gaussian(&g, 2.0, 1.0, (0.0, 0.0));
    let fast = forward(&f).unwrap();
    let slow = naive_forward(&f);
    assert!(rel_l2(&fast, &slow) < 1e-12);

    let mut r = rng(7);
    let f = random_complex_field(&g, &mut r);
    let fast = forward(&f).unwrap();
    let slow = naive_forward(&f);
    assert!(rel_l2(&fast, &slow) < 1e-12);
}

#[test]
fn roundtrip_and_delta_spectrum() {
    let g = make_grid(32, 16, 11.0, 7.0).unwrap();
    let mut r = rng(3);
    let f = random_complex_field(&g, &mut r);
    let back = inverse(&forward(&f).unwrap()).unwrap();
    assert!(rel_l2(&back, &f) < 1e-13);

    let mut delta = Field::zeros(&g, Repr::Spectral);
    delta.data[0] = Complex64::new(2.5, 0.0);
    let phys = inverse(&delta).unwrap();
    for v in &phys.data {
        assert!((v - Complex64::new(2.5, 0.0)).norm() < 1e-13);
    }
}

#[test]
fn hermitian_spectrum_gives_real_field() {
    let g = make_grid(16, 16, 9.0, 9.0).unwrap();
    let mut r = rng(11);
    let mut hat = forward(&random_complex_field(&g, &mut r)).unwrap();
    hat.hermitian_symmetrize();
    let phys = inverse(&hat).unwrap();
    let max_im = phys.data.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    assert!(max_im < 1e-12);
}

#[test]
fn real_field_has_hermitian_spectrum() {
    let g = make_grid(16, 16, 9.0, 9.0).unwrap();
    let mut r = rng(13);
    let hat = forward(&random_real_field(&g, &mut r)).unwrap();
    for ix in 0..16 {
        for iy in 0..16 {
            let a = hat.data[ix * 16 + iy];
            let b = hat.data[((16 - ix) % 16) * 16 + ((16 - iy) % 16)].conj();
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn plancherel_and_linearity_on_random_fields() {
    let g = make_grid(16, 16, 5.0, 13.0).unwrap();
    let mut r = rng(17);
    for _ in 0..100 {
        let f = random_complex_field(&g, &mut r);
        let hat = forward(&f).unwrap();
        assert!((f.l2() - hat.l2()).abs() < 1e-12 * f.l2());
    }
    for _ in 0..20 {
        let f = random_complex_field(&g, &mut r);
        let h = random_complex_field(&g, &mut r);
        let a = Complex64::new(0.3, -1.2);
        let b = Complex64::new(-0.7, 0.4);
        let mut combo = f.scaled(a);
        combo.add_scaled(b, &h);
        let lhs = forward(&combo).unwrap();
        let mut rhs = forward(&f).unwrap().scaled(a);
        rhs.add_scaled(b, &forward(&h).unwrap());
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }
}

#[test]
fn dealias_cutoffs_and_projection() {
    // p = 2 on nx = 96 would zero |j| >= 32; sizes here are powers of two,
    // so check the same arithmetic at nx = 64: p = 3 zeroes |j| >= 16.
    let g = make_grid(64, 64, TAU, TAU).unwrap();
    let mut r = rng(23);
    let hat = forward(&random_complex_field(&g, &mut r)).unwrap();
    assert!(dealias(&hat, 1).is_err());

    let cut = dealias(&hat, 3).unwrap();
    for ix in 0..64 {
        let jx = if ix < 32 { ix as i64 } else { ix as i64 - 64 };
        for iy in 0..64 {
            let jy = if iy < 32 { iy as i64 } else { iy as i64 - 64 };
            let v = cut.data[ix * 64 + iy];
            if jx.abs() >= 16 || jy.abs() >= 16 {
                assert_eq!(v, Complex64::default());
            } else {
                assert_eq!(v, hat.data[ix * 64 + iy]);
            }
        }
    }
    // projection property, exact
    let twice = dealias(&cut, 3).unwrap();
    assert_eq!(twice.data, cut.data);
}

#[test]
fn dealiased_product_of_retained_modes_is_exact_convolution() {
    // modes 3 and 5 on a 32-grid: product lives at modes 2 and 8, both inside
    // the p = 2 retained band |j| < 10
    let g = make_grid(32, 32, TAU, TAU).unwrap();
    let f = Field::from_real_fn(&g, |x, _| (3.0 * x).cos());
    let h = Field::from_real_fn(&g, |x, _| (5.0 * x).cos());
    let mut prod = f.clone();
    for (p, q) in prod.data.iter_mut().zip(&h.data) {
        *p *= q;
    }
    let cut = dealias(&forward(&prod).unwrap(), 2).unwrap();
    // cos3x cos5x = (cos 2x + cos 8x)/2
    let expect = forward(&Field::from_real_fn(&g, |x, _| {
        0.5 * ((2.0 * x).cos() + (8.0 * x).cos())
    }))
    .unwrap();
    assert!(max_abs_diff(&cut, &expect) < 1e-13);
}

#[test]
fn plancherel_constant_is_the_documented_one() {
    // sqrt(dA sum |f|^2) = sqrt(lx ly sum |fhat|^2) on a non-square box
    let g = make_grid(16, 32, 3.0, 17.0).unwrap();
    let mut r = rng(29);
    let f = random_complex_field(&g, &mut r);
    let hat = forward(&f).unwrap();
    let phys: f64 = f.data.iter().map(|c| c.norm_sqr()).sum::<f64>() * g.da();
    let spec: f64 = hat.data.iter().map(|c| c.norm_sqr()).sum::<f64>() * g.lx * g.ly;
    assert!((phys.sqrt() - spec.sqrt()).abs() < 1e-12 * phys.sqrt());
}

#[test]
fn serialization_roundtrip_is_exact() {
    let g = make_grid(16, 8, 4.0, 2.0).unwrap();
    let mut r = rng(31);
    let f = random_complex_field(&g, &mut r);
    let mut buf = Vec::new();
    f.write_to(&mut buf).unwrap();
    let back = Field::read_from(&mut buf.as_slice()).unwrap();
    assert_eq!(back.grid, f.grid);
    assert_eq!(back.repr, f.repr);
    assert_eq!(back.data, f.data);
}

#[test]
fn gaussian_on_40_box_passes_tail_monitor() {
    let g = make_grid(128, 128, 40.0, 40.0).unwrap();
    let f = Field::gaussian(&g, 2.0, 1.0, (0.0, 0.0));
    assert!(f.boundary_tail_fraction() <= 1e-6);
    f.check_boundary_tail().unwrap();
    // a wide Gaussian does not
    let wide = Field::gaussian(&g, 8.0, 1.0, (0.0, 0.0));
    assert!(wide.check_boundary_tail().is_err());
}

#[test]
fn mode_frequencies_scale_with_box() {
    let g = make_grid(16, 16, 4.0 * PI, TAU).unwrap();
    assert!((g.xi(1) - 0.5).abs() < 1e-15);
    assert!((g.eta(1) - 1.0).abs() < 1e-15);
}
