//! Built-in consistency checks, sized to finish in a few seconds.

use crate::commands::{check_threads, with_threads};
use crate::{CheckGroup, CliError, Fault, VerifyArgs};
use clap::ValueEnum;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rootdyn::operator::{
    behl_step, eval_ank, eval_b, moebius_h, reparam_a_of_b, reparam_b_of_a,
};
use rootdyn::orbit::{behl_stepper, classify_critical_orbit, empirical_order, unit_circle_drift, EscapeConfig, Outcome};
use rootdyn::precision::{Real, Wide1536};
use rootdyn::roots::{fixed_points_ank, multiplier_and_class, strange_fixed_zpm_a, PolynomialRootConfig};
use rootdyn::stability::{antenna_intervals, region_z1_ank, region_zm1_ank, region_zpm_a, Region};
use rootdyn::{BehlParams, ExtendedComplex, Family, GeneralParams, QuadraticTarget, SphereMap, C64};

type Check = (bool, String);

fn sample(r: &mut ChaCha8Rng, half: f64) -> C64 {
    C64::new(r.gen_range(-half..half), r.gen_range(-half..half))
}

fn fin(z: C64) -> ExtendedComplex {
    ExtendedComplex::finite(z)
}

/// Relative error read in the chart where `y` lies in the closed unit disk.
fn chart_rel(x: ExtendedComplex, y: ExtendedComplex) -> f64 {
    let (x, y) = if y.modulus() <= 1.0 { (x, y) } else { (x.recip(), y.recip()) };
    match (x.to_complex(), y.to_complex()) {
        (Some(u), Some(v)) if v.norm() > 0.0 => (u - v).norm() / v.norm(),
        (Some(u), Some(_)) => u.norm(),
        _ => f64::INFINITY,
    }
}

fn generic_behl(r: &mut ChaCha8Rng, half: f64) -> BehlParams {
    loop {
        if let Ok(p) = BehlParams::new(sample(r, half)) {
            if p.reduced().is_none() && !p.is_order_five() {
                return p;
            }
        }
    }
}

/// `a(b) = −A/B`, optionally with a perturbed `A`.
fn a_of_b(b: C64, fault: bool) -> C64 {
    if !fault {
        return reparam_a_of_b(b).unwrap_or(C64::new(f64::NAN, f64::NAN));
    }
    let a = (b * b - 6.0 * b - 11.0) * 1.001;
    -a / (b * b + 2.0 * b - 3.0)
}

fn reparam(r: &mut ChaCha8Rng, fault: bool) -> Check {
    let (mut round_trip, mut mismatch) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let a = sample(r, 3.0);
        let Ok((b1, b2)) = reparam_b_of_a(a) else { continue };
        let g = GeneralParams::new(a, 4, 1).expect("degrees are valid");
        for b in [b1, b2] {
            round_trip = round_trip.max((a_of_b(b, fault) - a).norm());
            let Ok(p) = BehlParams::new(b) else { continue };
            let Ok(g_b) = GeneralParams::new(a_of_b(b, fault), 4, 1) else { continue };
            for _ in 0..5 {
                let z = fin(sample(r, 2.0));
                mismatch = mismatch.max(chart_rel(eval_b(&p, z), eval_ank(&g_b, z)));
                mismatch = mismatch.max(chart_rel(eval_ank(&g_b, z), eval_ank(&g, z)));
            }
        }
    }
    (
        round_trip < 1e-10 && mismatch < 1e-9,
        format!("max |a(b±(a)) − a| {round_trip:.2e}, max O_b vs O_(a(b),4,1) {mismatch:.2e}"),
    )
}

fn conjugacy(r: &mut ChaCha8Rng) -> Check {
    let (mut worst, mut failures) = (0.0f64, 0);
    for _ in 0..10 {
        let target = QuadraticTarget::new(sample(r, 2.0)).expect("random c is nonzero");
        let p = generic_behl(r, 5.0);
        for _ in 0..40 {
            let x = sample(r, 3.0);
            match behl_step(&p, &target, x) {
                Ok(y) => worst = worst.max(chart_rel(moebius_h(&target, fin(y)), eval_b(&p, moebius_h(&target, fin(x))))),
                Err(_) => failures += 1,
            }
        }
    }
    (
        worst < 1e-9 && failures == 0,
        format!("max |h∘step − O_b∘h| rel {worst:.2e}, {failures} step failure(s)"),
    )
}

fn symmetry(r: &mut ChaCha8Rng) -> Check {
    let (mut inversion, mut sign) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let (n, k) = (r.gen_range(2..8), r.gen_range(1..5));
        let a = sample(r, 3.0);
        let (Ok(p), Ok(q)) = (GeneralParams::new(a, n, k), GeneralParams::new(-a, n, k)) else { continue };
        let b = Family::Behl(generic_behl(r, 5.0));
        let z = fin(sample(r, 2.0));
        inversion = inversion.max(chart_rel(p.eval(z.recip()), p.eval(z).recip()));
        inversion = inversion.max(chart_rel(b.eval(z.recip()), b.eval(z).recip()));
        let flipped = q.eval(z.neg());
        let expected = if (n + k) % 2 == 0 { p.eval(z) } else { p.eval(z).neg() };
        sign = sign.max(chart_rel(flipped, expected));
    }
    (
        inversion < 1e-9 && sign < 1e-9,
        format!("max inversion mismatch {inversion:.2e}, max a ↦ −a mismatch {sign:.2e}"),
    )
}

fn circle() -> Check {
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for a in [0.3, -1.4] {
        for (n, k) in [(4, 1), (3, 2)] {
            match unit_circle_drift(C64::new(a, 0.0), n, k, 256, 30) {
                Ok(d) => worst = worst.max(d),
                Err(e) => errors.push(format!("a={a} ({n},{k}): {e}")),
            }
        }
    }
    (
        worst < 1e-8 && errors.is_empty(),
        format!("max ||O^j(z)| − 1| {worst:.2e} over 4 cases{}", errors.iter().map(|e| format!("; {e}")).collect::<String>()),
    )
}

fn predicates(r: &mut ChaCha8Rng) -> Check {
    let (mut agree, mut total) = (0usize, 0usize);
    for (n, k) in [(4u32, 1u32), (3, 2)] {
        for _ in 0..1000 {
            let a = sample(r, 4.0);
            let Ok(p) = GeneralParams::new(a, n, k) else { continue };
            if p.reduced().is_some() {
                continue;
            }
            let fam = Family::General(p);
            let mut checks = vec![
                (region_z1_ank(a, n, k, 0.0), fin(C64::new(1.0, 0.0))),
                (region_zm1_ank(a, n, k, 0.0), fin(C64::new(-1.0, 0.0))),
            ];
            if (n, k) == (4, 1) {
                let (zp, zm) = strange_fixed_zpm_a(a);
                checks.push((region_zpm_a(a, 0.0), fin(zp)));
                checks.push((region_zpm_a(a, 0.0), fin(zm)));
            }
            for (region, z) in checks {
                match multiplier_and_class(&fam, z, 0.0) {
                    Ok(rep) => {
                        let m = rep.multiplier.norm();
                        if (m - 1.0).abs() < 1e-6 {
                            continue;
                        }
                        total += 1;
                        agree += ((region == Region::Attracting) == (m < 1.0)) as usize;
                    }
                    Err(_) => {
                        total += 1;
                        agree += (region == Region::NotFixed) as usize;
                    }
                }
            }
        }
    }
    (
        agree as f64 >= 0.999 * total as f64 && total > 0,
        format!("closed-form regions agree with multipliers at {agree}/{total} fixed points"),
    )
}

fn fixed_points(r: &mut ChaCha8Rng, seed: u64) -> Check {
    let cfg = PolynomialRootConfig {
        seed,
        ..PolynomialRootConfig::default()
    };
    let (mut residual, mut count_errors) = (0.0f64, Vec::new());
    for _ in 0..50 {
        let (n, k) = (r.gen_range(2..7), r.gen_range(1..4));
        let Ok(p) = GeneralParams::new(sample(r, 3.0), n, k) else { continue };
        match fixed_points_ank(&p, &cfg) {
            Ok(fps) => {
                let total: u32 = fps.iter().map(|f| f.multiplicity).sum();
                if total != p.degree() + 1 {
                    count_errors.push(format!("a={} ({n},{k}): {total} fixed points", p.a));
                }
                for f in &fps {
                    residual = residual.max(chart_rel(p.eval(f.location), f.location).min(1.0));
                }
            }
            Err(e) => count_errors.push(e.to_string()),
        }
    }
    let superattracting = [(5.0 / 3.0, C64::new(1.0, 0.0)), (5f64.sqrt(), strange_fixed_zpm_a(C64::new(5f64.sqrt(), 0.0)).0)]
        .into_iter()
        .all(|(a, z)| {
            let fam = Family::General(GeneralParams::new(C64::new(a, 0.0), 4, 1).expect("valid"));
            multiplier_and_class(&fam, fin(z), 0.0).is_ok_and(|rep| rep.multiplier.norm() < 1e-9)
        });
    (
        residual < 1e-8 && count_errors.is_empty() && superattracting,
        format!(
            "max |O(z*) − z*| rel {residual:.2e}, superattracting fixtures {}{}",
            if superattracting { "ok" } else { "wrong" },
            count_errors.iter().map(|e| format!("; {e}")).collect::<String>()
        ),
    )
}

fn antenna() -> Check {
    let cfg = EscapeConfig::default();
    let (mut worst, mut decided, mut samples) = (0.0f64, 0, 0);
    for (n, k) in [(4, 1), (6, 2)] {
        let Ok(ant) = antenna_intervals(n, k) else { return (false, format!("no antenna for ({n},{k})")) };
        for &(lo, hi) in &ant.intervals {
            for j in 0..10 {
                let a = lo + (hi - lo) * (j as f64 + 0.5) / 10.0;
                let p = GeneralParams::new(C64::new(a, 0.0), n, k).expect("valid");
                let Some((cp, cm)) = p.free_critical_pair() else { continue };
                worst = worst.max((cp.norm() - 1.0).abs()).max((cm.norm() - 1.0).abs());
                samples += 1;
                decided += (classify_critical_orbit(&p, &cfg).outcome != Outcome::Undecided) as usize;
            }
        }
    }
    (
        worst < 1e-10 && decided == 0 && samples > 0,
        format!("{samples} antenna parameters, max ||c±| − 1| {worst:.2e}, {decided} decided"),
    )
}

fn order() -> Check {
    type W = Wide1536;
    let w = W::from_f64;
    let root = Complex::new(w(0.0), w(1.0));
    let c = Complex::new(w(1.0), w(0.0));
    let b5 = w(3.0) + w(2.0) * w(5.0).sqrt();
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, b, expected) in [
        ("b=2", Complex::new(w(2.0), w(0.0)), 4.0),
        ("b=3+2√5", Complex::new(b5, w(0.0)), 5.0),
    ] {
        let seed = Complex::new(w(0.06), w(1.0));
        match empirical_order(behl_stepper(b, c.clone()), &root, &seed, 20) {
            Ok(q) => {
                ok &= (q - expected).abs() <= 0.3;
                parts.push(format!("{label}: {q:.3}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{label}: {e}"));
            }
        }
    }
    (ok, format!("convergence order {}", parts.join(", ")))
}

fn run_group(group: CheckGroup, args: &VerifyArgs) -> Check {
    let mut r = ChaCha8Rng::seed_from_u64(args.seed ^ (group as u64) << 32);
    let fault = args.inject_fault == Some(Fault::Reparam);
    match group {
        CheckGroup::Reparam => reparam(&mut r, fault),
        CheckGroup::Conjugacy => conjugacy(&mut r),
        CheckGroup::Symmetry => symmetry(&mut r),
        CheckGroup::Circle => circle(),
        CheckGroup::Predicates => predicates(&mut r),
        CheckGroup::FixedPoints => fixed_points(&mut r, args.seed),
        CheckGroup::Antenna => antenna(),
        CheckGroup::Order => order(),
    }
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    let threads = check_threads(&args.common)?;
    let groups: Vec<CheckGroup> = match args.only {
        Some(g) => vec![g],
        None => CheckGroup::value_variants().to_vec(),
    };
    let results = with_threads(threads, || groups.iter().map(|&g| (g, run_group(g, args))).collect::<Vec<_>>())?;
    let mut failed = 0;
    for (g, (ok, detail)) in results {
        let name = g.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        println!("{} {name}: {detail}", if ok { "ok  " } else { "FAIL" });
        failed += (!ok) as usize;
    }
    if failed > 0 {
        return Err(CliError::Verify(failed));
    }
    println!("all checks passed");
    Ok(())
}
