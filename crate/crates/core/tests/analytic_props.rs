use proptest::prelude::*;
use scarf_core::analytic::{f_factor, scattering_coefficients, transmission_amplitude, Side};
use scarf_core::{Complex64, ScarfParams};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #[test]
    fn transmission_is_reciprocal(
        ar in -3.0f64..3.0, ai in -3.0f64..3.0,
        br in -3.0f64..3.0, bi in -3.0f64..3.0,
        k in 0.05f64..5.0,
    ) {
        let p = ScarfParams::new(cx(ar, ai), cx(br, bi)).unwrap();
        let (Ok(a), Ok(b)) = (transmission_amplitude(&p, cx(k, 0.0)), transmission_amplitude(&p.mirrored(), cx(k, 0.0))) else {
            return Ok(());
        };
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn hermitian_unitarity(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0.1f64..5.0) {
        let res = scattering_coefficients(&ScarfParams::real(a, b), k).unwrap();
        let t = res.transmission.finite().unwrap();
        let rl = res.reflection_left.finite().unwrap();
        let rr = res.reflection_right.finite().unwrap();
        prop_assert!((t + rl - 1.0).abs() < 1e-10);
        prop_assert!((t + rr - 1.0).abs() < 1e-10);
        prop_assert!((res.det_s_abs.finite().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn det_s_matches_amplitude_product(
        ar in -3.0f64..3.0, ai in -3.0f64..3.0,
        br in -3.0f64..3.0, bi in -3.0f64..3.0,
        k in prop::sample::select(vec![-2.7, -1.3, -0.4, 0.35, 0.9, 1.6, 3.1]),
    ) {
        let p = ScarfParams::new(cx(ar, ai), cx(br, bi)).unwrap();
        let Ok(res) = scattering_coefficients(&p, k) else { return Ok(()) };
        let (Some(t), Some(rl), Some(rr)) = (res.t.finite(), res.r_left.finite(), res.r_right.finite()) else {
            return Ok(());
        };
        // Only where the direct difference is itself well conditioned. With
        // f_l = a + b and f_r = b - a, the product hides the cancellation of
        // a² against b².
        let (a, b) = ((rl - rr) / 2.0, (rl + rr) / 2.0);
        let scale = t.norm_sqr() + a.norm_sqr() + b.norm_sqr();
        prop_assume!(scale < 1e4);
        let direct = (t * t - rl * rr).norm();
        let ratio = res.det_s_abs.finite().unwrap();
        prop_assert!((direct - ratio).abs() <= 1e-11 * scale.max(1.0), "{} vs {}", direct, ratio);
    }

    #[test]
    fn imaginary_parameters_reflect_reciprocally(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0.05f64..5.0) {
        let p = ScarfParams::new(cx(0.0, a), cx(0.0, b)).unwrap();
        let l = f_factor(&p, k, Side::Left).unwrap().norm();
        let r = f_factor(&p, k, Side::Right).unwrap().norm();
        prop_assert!((l - r).abs() <= 1e-12 * l.max(1.0));
    }
}

#[test]
fn hermitian_unitarity_on_listed_grid() {
    for (a, b) in [(2.0, 1.0), (0.5, -1.5), (-0.3, 2.2), (3.0, 0.0)] {
        for i in 1..=50 {
            let k = 0.1 * i as f64;
            let res = scattering_coefficients(&ScarfParams::real(a, b), k).unwrap();
            let t = res.transmission.finite().unwrap();
            assert!(
                (t + res.reflection_left.finite().unwrap() - 1.0).abs() < 1e-10,
                "A={a} B={b} k={k}"
            );
            assert!((res.det_s_abs.finite().unwrap() - 1.0).abs() < 1e-10);
        }
    }
}
