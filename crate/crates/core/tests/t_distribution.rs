//! The t-distribution CDF against an independent quadrature of its density.
//!
//! With `x = sqrt(ν) tan θ` the density integral becomes
//! `∫ cos^(ν-1) θ dθ`, a smooth integrand on a finite interval, so
//! `P(T <= t) = 1/2 + sign(t)/2 * ∫_0^φ cos^(ν-1) / ∫_0^{π/2} cos^(ν-1)`
//! with `φ = atan(|t| / sqrt(ν))`. The integrals are evaluated by adaptive
//! Simpson quadrature, which shares no code with the incomplete beta path.

use cbpp_core::stats::student_t_cdf;

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
}

impl Panel {
    fn simpson(&self) -> f64 {
        (self.b - self.a) / 6.0 * (self.fa + 4.0 * self.fm + self.fb)
    }
}

fn adaptive(f: &dyn Fn(f64) -> f64, p: Panel, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (p.a + p.b);
    let left = Panel { a: p.a, b: m, fa: p.fa, fm: f(0.5 * (p.a + m)), fb: p.fm };
    let right = Panel { a: m, b: p.b, fa: p.fm, fm: f(0.5 * (m + p.b)), fb: p.fb };
    let (sl, sr) = (left.simpson(), right.simpson());
    let delta = sl + sr - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return sl + sr + delta / 15.0;
    }
    adaptive(f, left, sl, tol / 2.0, depth - 1) + adaptive(f, right, sr, tol / 2.0, depth - 1)
}

fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let p = Panel { a, b, fa: f(a), fm: f(0.5 * (a + b)), fb: f(b) };
    adaptive(f, p, p.simpson(), 1e-14, 50)
}

fn quadrature_cdf(t: f64, dof: f64) -> f64 {
    let f = move |theta: f64| theta.cos().powf(dof - 1.0);
    let phi = (t.abs() / dof.sqrt()).atan();
    let part = integrate(&f, 0.0, phi);
    let total = integrate(&f, 0.0, std::f64::consts::FRAC_PI_2);
    0.5 + t.signum() * 0.5 * part / total
}

#[test]
fn cdf_matches_quadrature() {
    for &dof in &[1.0, 5.0, 12.0, 30.0] {
        let mut worst = 0.0f64;
        for k in 0..=400 {
            let t = -10.0 + k as f64 * 0.05;
            let diff = (student_t_cdf(t, dof) - quadrature_cdf(t, dof)).abs();
            worst = worst.max(diff);
        }
        assert!(worst < 1e-8, "dof {dof}: worst difference {worst:e}");
    }
}

#[test]
fn cdf_is_symmetric_and_monotone() {
    for &dof in &[1.0, 5.0, 12.0, 30.0] {
        let mut last = 0.0;
        for k in 0..=200 {
            let t = -10.0 + k as f64 * 0.1;
            let c = student_t_cdf(t, dof);
            assert!(c >= last);
            assert!((c + student_t_cdf(-t, dof) - 1.0).abs() < 1e-13);
            last = c;
        }
        assert_eq!(student_t_cdf(0.0, dof), 0.5);
    }
}
