use crate::commands::{chosen_family, escape_config, usage};
use crate::config::write_sidecar;
use crate::{CliError, ReportArgs};
use rootdyn::orbit::{classify_family, classify_seed, known_attractors, Outcome};
use rootdyn::roots::{critical_set_ank, fixed_points_ank, PolynomialRootConfig, Stability};
use rootdyn::stability::{
    antenna_b_image, antenna_intervals, BoundaryQuery, Parametrization, Region, StabilityRegionQuery, WhichPoint,
};
use rootdyn::{format_complex, BehlParams, ExtendedComplex, Family, GeneralParams, SphereMap, C64};
use serde_json::{json, Value};
use std::fmt::Write as _;

fn point(z: &ExtendedComplex) -> String {
    z.to_complex().map_or_else(|| "∞".to_string(), format_complex)
}

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Superattracting => "superattracting",
        Stability::Attracting => "attracting",
        Stability::Indifferent => "indifferent",
        Stability::Repelling => "repelling",
    }
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::Attracting => "attracting",
        Region::Indifferent => "indifferent",
        Region::Repelling => "repelling",
        Region::NotFixed => "not fixed",
    }
}

fn outcome_name(o: Outcome) -> String {
    match o {
        Outcome::ToZero => "to_zero".into(),
        Outcome::ToInfinity => "to_infinity".into(),
        Outcome::ToStrange(id) => format!("to_strange({id})"),
        Outcome::Undecided => "undecided".into(),
    }
}

fn which_name(w: WhichPoint) -> &'static str {
    match w {
        WhichPoint::Z1 => "z=1",
        WhichPoint::Zm1 => "z=-1",
        WhichPoint::Zpm => "z±",
    }
}

/// A general-family operator with the same fixed and critical points as
/// the Behl map; degenerate `b` give the matching monomial.
fn behl_as_general(p: &BehlParams) -> Result<GeneralParams, CliError> {
    let g = match p.reduced() {
        Some(r) if r.sign > 0.0 => GeneralParams::new(C64::new(0.0, 0.0), r.degree - 1, 1),
        Some(r) => GeneralParams::new(C64::new(1.0, 0.0), r.degree, 1),
        None => p.to_general(),
    };
    g.map_err(|e| usage(format!("--b: {e}")))
}

pub fn build(args: &ReportArgs) -> Result<Value, CliError> {
    let cfg = escape_config(&args.escape)?;
    let family = chosen_family(args.a, args.b, args.n, args.k)?;
    if !(args.tol >= 0.0) {
        return Err(usage("--tol must be non-negative"));
    }
    let (general, parametrization, parameter, operator) = match &family {
        Family::General(p) => (
            *p,
            Parametrization::General { n: p.n, k: p.k },
            p.a,
            json!({
                "family": "general",
                "a": format_complex(p.a),
                "n": p.n,
                "k": p.k,
                "degree": p.degree(),
            }),
        ),
        Family::Behl(p) => {
            let g = behl_as_general(p)?;
            (
                g,
                Parametrization::Behl,
                p.b,
                json!({
                    "family": "behl",
                    "b": format_complex(p.b),
                    "a_of_b": rootdyn::operator::reparam_a_of_b(p.b).ok().map(format_complex),
                    "order_five": p.is_order_five(),
                    "degree": g.degree(),
                }),
            )
        }
    };
    let reduced = match &family {
        Family::General(p) => p.reduced(),
        Family::Behl(p) => p.reduced(),
    };
    let order_five = matches!(&family, Family::Behl(p) if p.is_order_five());
    let degenerate = match reduced {
        Some(r) => Some(format!("{}z^{}", if r.sign < 0.0 { "-" } else { "" }, r.degree)),
        None if order_five => Some("z^5".to_string()),
        None => None,
    };

    let roots_cfg = PolynomialRootConfig {
        seed: args.seed,
        ..PolynomialRootConfig::default()
    };
    let fixed: Vec<Value> = fixed_points_ank(&general, &roots_cfg)?
        .iter()
        .map(|f| {
            let stability = Stability::from_multiplier(f.multiplier, args.tol);
            json!({
                "location": point(&f.location),
                "multiplier": format_complex(f.multiplier),
                "multiplier_modulus": f.multiplier.norm(),
                "class": stability_name(stability),
                "strange": f.strange,
                "multiplicity": f.multiplicity,
            })
        })
        .collect();

    let crit = critical_set_ank(&general);
    let critical = json!({
        "fixed": crit.fixed_critical.iter().map(|(z, m)| json!({"point": point(z), "multiplicity": m})).collect::<Vec<_>>(),
        "preimages_of_roots": crit.preimage_critical.iter().map(|(z, m)| json!({"point": point(z), "multiplicity": m})).collect::<Vec<_>>(),
        "free": crit.free.map(|(p, m)| json!({
            "c_plus": format_complex(p),
            "c_minus": format_complex(m),
            "moduli": [p.norm(), m.norm()],
        })),
    });
    // unlike the parameter plane, capture by a strange attractor is named
    let attractors = known_attractors(&family);
    let orbit = match family.free_critical_point() {
        Some(c) if !family.is_degenerate() => classify_seed(&family, ExtendedComplex::finite(c), &cfg, &attractors),
        _ => classify_family(&family, &cfg),
    };
    let critical_orbit = json!({
        "outcome": outcome_name(orbit.outcome),
        "iterations": orbit.iterations,
        "degenerate": orbit.degenerate,
        "attractors": attractors.iter().map(|a| json!({
            "id": a.id,
            "points": a.points.iter().map(point).collect::<Vec<_>>(),
            "multiplier_modulus": a.multiplier.norm(),
        })).collect::<Vec<_>>(),
    });

    let mut regions = serde_json::Map::new();
    let mut nearest = serde_json::Map::new();
    for which in [WhichPoint::Z1, WhichPoint::Zm1, WhichPoint::Zpm] {
        let q = StabilityRegionQuery {
            which_point: which,
            parametrization,
            parameter,
        };
        let v = match q.classify(args.tol) {
            Ok(r) => json!(region_name(r)),
            Err(e) => json!(format!("unavailable: {e}")),
        };
        regions.insert(which_name(which).into(), v);
        let has_closed_form = !(which == WhichPoint::Zpm
            && matches!(parametrization, Parametrization::General { n, k } if (n, k) != (4, 1)));
        let centers = BoundaryQuery {
            which_point: which,
            parametrization,
        }
        .centers();
        if let Some(c) = centers
            .iter()
            .filter(|_| has_closed_form)
            .min_by(|x, y| (*x - parameter).norm().total_cmp(&(*y - parameter).norm()))
        {
            nearest.insert(
                which_name(which).into(),
                json!({"parameter": format_complex(*c), "distance": (c - parameter).norm()}),
            );
        }
    }

    let antenna = if parameter.im != 0.0 {
        json!({"real": false, "inside": false})
    } else {
        let intervals = match parametrization {
            Parametrization::Behl => Ok(antenna_b_image()),
            Parametrization::General { n, k } => antenna_intervals(n, k),
        };
        match intervals {
            Ok(iv) => json!({
                "real": true,
                "inside": iv.contains(parameter.re),
                "intervals": iv.intervals.iter().map(|(lo, hi)| [lo.to_string(), hi.to_string()]).collect::<Vec<_>>(),
            }),
            Err(e) => json!({"real": true, "inside": false, "note": e.to_string()}),
        }
    };

    Ok(json!({
        "operator": operator,
        "degenerate": degenerate,
        "fixed_points": fixed,
        "critical_points": critical,
        "critical_orbit": critical_orbit,
        "stability_regions": Value::Object(regions),
        "antenna": antenna,
        "nearest_superattracting_parameters": Value::Object(nearest),
    }))
}

fn text(r: &Value) -> String {
    let mut s = String::new();
    let op = &r["operator"];
    let str_of = |v: &Value| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
    if op["family"] == "behl" {
        let _ = writeln!(s, "operator: Behl, b = {}", str_of(&op["b"]));
        match op["a_of_b"].as_str() {
            Some(a) => {
                let _ = writeln!(s, "  a(b) = {a}  (same map as O_(a,4,1))");
            }
            None => {
                let _ = writeln!(s, "  a(b) undefined");
            }
        }
    } else {
        let _ = writeln!(
            s,
            "operator: O_(a,n,k), a = {}, n = {}, k = {} (degree {})",
            str_of(&op["a"]),
            op["n"],
            op["k"],
            op["degree"]
        );
    }
    if let Some(d) = r["degenerate"].as_str() {
        let _ = writeln!(s, "*** degenerate parameter: the operator reduces to {d} ***");
    }
    let _ = writeln!(s, "fixed points:");
    for f in r["fixed_points"].as_array().into_iter().flatten() {
        let _ = writeln!(
            s,
            "  {:<44} multiplier {:<44} |λ| = {:.3e}  {}{}{}",
            str_of(&f["location"]),
            str_of(&f["multiplier"]),
            f["multiplier_modulus"].as_f64().unwrap_or(f64::NAN),
            str_of(&f["class"]),
            if f["strange"] == true { ", strange" } else { "" },
            match f["multiplicity"].as_u64() {
                Some(m) if m > 1 => format!(", multiplicity {m}"),
                _ => String::new(),
            }
        );
    }
    let cp = &r["critical_points"];
    let _ = writeln!(s, "critical points:");
    for group in ["fixed", "preimages_of_roots"] {
        for c in cp[group].as_array().into_iter().flatten() {
            let _ = writeln!(s, "  {} (multiplicity {})", str_of(&c["point"]), c["multiplicity"]);
        }
    }
    match cp["free"].as_object() {
        Some(f) => {
            let _ = writeln!(
                s,
                "  free: c+ = {}, c- = {}, |c±| = {}, {}",
                str_of(&f["c_plus"]),
                str_of(&f["c_minus"]),
                f["moduli"][0],
                f["moduli"][1]
            );
        }
        None => {
            let _ = writeln!(s, "  no free critical points");
        }
    }
    let orbit = &r["critical_orbit"];
    let _ = writeln!(
        s,
        "critical orbit: {} after {} iteration(s)",
        str_of(&orbit["outcome"]),
        orbit["iterations"]
    );
    for a in orbit["attractors"].as_array().into_iter().flatten() {
        let pts: Vec<String> = a["points"].as_array().into_iter().flatten().map(str_of).collect();
        let _ = writeln!(
            s,
            "  attractor {}: period {} at {} (|multiplier| {:.3e})",
            a["id"],
            pts.len(),
            pts.join(", "),
            a["multiplier_modulus"].as_f64().unwrap_or(f64::NAN)
        );
    }
    let _ = writeln!(s, "stability regions:");
    for (k, v) in r["stability_regions"].as_object().into_iter().flatten() {
        let _ = writeln!(s, "  {k}: {}", str_of(v));
    }
    let ant = &r["antenna"];
    let _ = writeln!(
        s,
        "antenna: {}",
        if ant["real"] == false {
            "parameter is not real".to_string()
        } else if ant["inside"] == true {
            "inside".to_string()
        } else {
            "outside".to_string()
        }
    );
    let _ = writeln!(s, "nearest superattracting parameters:");
    for (k, v) in r["nearest_superattracting_parameters"].as_object().into_iter().flatten() {
        let _ = writeln!(s, "  {k}: {} (distance {:.3e})", str_of(&v["parameter"]), v["distance"].as_f64().unwrap_or(f64::NAN));
    }
    s
}

pub fn run(args: &ReportArgs) -> Result<(), CliError> {
    let report = build(args)?;
    let body = if args.json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        text(&report)
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let side = write_sidecar(path, "report", args)?;
            println!("wrote {} (config {})", path.display(), side.display());
        }
        None => print!("{body}"),
    }
    Ok(())
}
