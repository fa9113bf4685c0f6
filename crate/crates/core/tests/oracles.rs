//! Comparisons against values that do not come from this crate: the mpmath
//! fixtures written by `tools/generate_fixtures.py`, and small brute-force
//! routines defined here.

use std::fs;
use std::path::PathBuf;

use mahler_core::verify::{f_closed_form, z_closed_form};
use mahler_core::{
    build_table, eta_complement, eta_int, gamma_real, mahler_integral, z_series_eval, zeta_int,
    HpReal, PrecisionContext, UnitCirclePoint,
};
use rug::ops::Pow;
use rug::Float;

fn fixture(name: &str) -> Vec<Vec<String>> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    let text = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn ctx(digits: u32) -> PrecisionContext {
    PrecisionContext::with_digits(digits).unwrap()
}

fn rel_err(x: &HpReal, reference: &HpReal) -> f64 {
    let d = Float::with_val(x.prec().max(reference.prec()), x - reference).abs();
    if reference.is_zero() {
        d.to_f64()
    } else {
        (d / reference.clone().abs()).to_f64()
    }
}

fn abs_err(x: &HpReal, reference: &HpReal) -> f64 {
    Float::with_val(x.prec().max(reference.prec()), x - reference)
        .abs()
        .to_f64()
}

#[test]
fn eta_zeta_and_complement_match_fixture() {
    let c = ctx(40);
    for row in fixture("eta.csv") {
        let k: u32 = row[0].parse().unwrap();
        let eta = eta_int(k, &c).unwrap();
        let comp = eta_complement(k, &c).unwrap();
        let zeta = zeta_int(k, &c).unwrap();
        assert!(
            rel_err(&eta, &c.parse(&row[1]).unwrap()) < 1e-40,
            "eta({k})"
        );
        assert!(
            rel_err(&comp, &c.parse(&row[2]).unwrap()) < 1e-40,
            "1 - eta({k})"
        );
        assert!(
            rel_err(&zeta, &c.parse(&row[3]).unwrap()) < 1e-40,
            "zeta({k})"
        );
    }
}

/// Plain alternating partial sums followed by repeated pairwise averaging.
fn brute_eta(k: u32, terms: u32, prec: u32) -> Float {
    let mut partial = Vec::new();
    let mut acc = Float::new(prec);
    for n in 1..=terms {
        let term = Float::with_val(prec, n).pow(k).recip();
        if n % 2 == 1 {
            acc += &term;
        } else {
            acc -= &term;
        }
        if n + 40 > terms {
            partial.push(acc.clone());
        }
    }
    while partial.len() > 1 {
        partial = partial
            .windows(2)
            .map(|w| Float::with_val(prec, &w[0] + &w[1]) / 2u32)
            .collect();
    }
    partial.pop().unwrap()
}

#[test]
fn eta_matches_brute_force_sum() {
    let c = ctx(30);
    for k in [2u32, 3, 4, 7, 12, 25] {
        let reference = brute_eta(k, 20_000, 256);
        assert!(
            rel_err(&eta_int(k, &c).unwrap(), &reference) < 1e-30,
            "eta({k})"
        );
    }
}

#[test]
fn gamma_matches_fixture() {
    let c = ctx(40);
    for row in fixture("gamma.csv") {
        let x = c.parse(&row[0]).unwrap();
        let g = gamma_real(&x, &c).unwrap();
        assert!(
            rel_err(&g, &c.parse(&row[1]).unwrap()) < 1e-38,
            "gamma({})",
            row[0]
        );
    }
}

#[test]
fn coefficients_match_fixture() {
    let c = ctx(40);
    let t = build_table(1001, &c).unwrap();
    for row in fixture("coefficients.csv").iter().take(1002) {
        let k: usize = row[0].parse().unwrap();
        if k > 1001 {
            break;
        }
        let a_ref = c.parse(&row[1]).unwrap();
        let m_ref = c.parse(&row[2]).unwrap();
        if k == 1 {
            assert!(t.a_values()[1].is_zero());
            continue;
        }
        assert!(rel_err(&t.a_values()[k], &a_ref) < 1e-36, "a_{k}");
        assert!(rel_err(&t.m_values()[k], &m_ref) < 1e-36, "m_{k}");
        if !row[3].is_empty() {
            let b_ref = c.parse(&row[3]).unwrap();
            assert!(abs_err(t.eta_shifted(k).unwrap(), &b_ref) < 1e-45, "B_{k}");
        }
    }
}

#[test]
fn derived_sequences_match_fixture_where_resolved() {
    let c = ctx(60);
    let t = build_table(1001, &c).unwrap();
    let a = t.a_values();
    let inv_pi = c.inv_pi();
    for row in fixture("coefficients.csv") {
        let k: usize = row[0].parse().unwrap();
        if k < 2 || k > 1000 {
            continue;
        }
        let dev = Float::with_val(c.prec(), a[k].abs_ref()) - &inv_pi;
        let dev_ref = c.parse(&row[4]).unwrap();
        // written with 20 significant digits
        assert!(
            abs_err(&dev.abs(), &dev_ref) <= 1e-19 * dev_ref.to_f64() + 1e-50,
            "dev {k}"
        );
        let ksum = Float::with_val(c.prec(), &a[k + 1] + &a[k]).abs() * k as u32;
        let ksum_ref = c.parse(&row[5]).unwrap();
        if ksum_ref > 1e-40 {
            assert!(rel_err(&ksum, &ksum_ref) < 1e-15, "k sum {k}");
        } else {
            assert!(ksum.to_f64() < 1e-40, "k sum {k}");
        }
        let ratio = Float::with_val(c.prec(), &a[k + 1] / &a[k]) + 1u32;
        let ratio_ref = c.parse(&row[6]).unwrap();
        assert!(abs_err(&ratio, &ratio_ref) < 1e-50, "ratio {k}");
    }
}

#[test]
fn recurrence_matches_naive_double_precision_recurrence() {
    let c = ctx(30);
    let t = build_table(60, &c).unwrap();
    let eta = |k: u32| brute_eta(k, 4_000, 128).to_f64();
    let b: Vec<f64> = (0..60)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                (-1f64).powi(k as i32 + 1) * eta(k + 1)
            }
        })
        .collect();
    let mut a = vec![1.0, 0.0, std::f64::consts::PI.powi(2) / 24.0];
    for k in 3..=60 {
        let s: f64 = (0..=k - 2).map(|j| a[j] * b[k - 1 - j]).sum();
        a.push(s / k as f64);
    }
    for (k, naive) in a.iter().enumerate() {
        let ours = t.a_values()[k].to_f64();
        assert!((ours - naive).abs() < 1e-13, "a_{k}: {ours} vs {naive}");
    }
}

#[test]
fn quadrature_matches_fixture() {
    let c = ctx(30);
    let tol = c.from_f64(1e-25);
    let one = UnitCirclePoint::one(&c);
    for row in fixture("quadrature.csv") {
        let k: u32 = row[0].parse().unwrap();
        let q = mahler_integral(k, &one, &tol, &c).unwrap();
        let reference = c.parse(&row[1]).unwrap();
        assert!(
            abs_err(&q.value, &reference) < 1e-25 * reference.to_f64().abs().max(1.0),
            "m_{k}"
        );
    }
}

#[test]
fn closed_forms_match_fixture() {
    let c = ctx(40);
    let t = build_table(1001, &c).unwrap();
    for row in fixture("closed_forms.csv") {
        let s = c.parse(&row[0]).unwrap();
        let f_ref = c.parse(&row[1]).unwrap();
        let big_f_ref = c.parse(&row[2]).unwrap();
        if s < 1 {
            assert!(
                rel_err(&z_closed_form(&s, &c).unwrap(), &f_ref) < 1e-38,
                "Z({})",
                row[0]
            );
        }
        assert!(
            rel_err(&f_closed_form(&s, &c).unwrap(), &big_f_ref) < 1e-38,
            "F({})",
            row[0]
        );
        if s.clone().abs() <= 0.5 {
            let series = z_series_eval(&s, &t, &c.pow10(-38)).unwrap();
            assert!(
                rel_err(&series.value, &f_ref) < 1e-38,
                "series Z({})",
                row[0]
            );
        }
    }
}
