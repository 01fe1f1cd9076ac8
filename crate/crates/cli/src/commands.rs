use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use rlk::amalgam::{self, AmalgamError};
use rlk::good::{self, GoodError, GoodGraph, Goodness};
use rlk::graph::{bowtie_certificate, Graph};
use rlk::lifting::{self, LiftedStructure, OrderedGoodGraph, ReducedStructure};
use rlk::membership::{self, build_catalogue, check_small, Membership, MembershipError, TypeCatalogue};
use rlk::ramsey::{self, Budget, ConstructionOutcome, PartiteSystem, RamseyError};

use crate::io::{parse_json, read_json, Failure, Outcome, Report};

fn ramsey_failure(e: RamseyError) -> Failure {
    match e {
        RamseyError::Refused(m) => Failure::budget(m),
        RamseyError::Inconsistent(_) => Failure {
            code: 1,
            message: e.to_string(),
        },
        _ => Failure::usage(e),
    }
}

fn membership_failure(e: MembershipError) -> Failure {
    Failure::usage(e)
}

fn good_graph(path: &Path) -> Result<GoodGraph, Failure> {
    let g: Graph = read_json(path)?;
    good::decompose(&g).map_err(|e| Failure::usage(format!("input is not good: {e}")))
}

fn ordered_good(path: &Path) -> Result<OrderedGoodGraph, Failure> {
    let g: Graph = read_json(path)?;
    let order = g
        .order()
        .ok_or_else(|| Failure::usage("input graph carries no order"))?
        .to_vec();
    let good = good::decompose(&g).map_err(|e| Failure::usage(format!("input is not good: {e}")))?;
    OrderedGoodGraph::new(good, order).map_err(|e| Failure::usage(format!("order is not admissible: {e}")))
}

fn load_catalogue(path: Option<&Path>) -> Result<TypeCatalogue, Failure> {
    match path {
        Some(p) => read_json(p),
        None => Ok(build_catalogue(membership::DEFAULT_MAX_CENTRE_E1)),
    }
}

pub fn bowtie_check(input: &Path) -> Outcome {
    let g: Graph = read_json(input)?;
    Ok(match bowtie_certificate(&g) {
        None => Report::ok(json!({ "bowtie_free": true })),
        Some(cert) => Report::negative(json!({ "bowtie_free": false, "certificate": cert })),
    })
}

pub fn good_complete(input: &Path) -> Outcome {
    let g: Graph = read_json(input)?;
    Ok(match good::complete_to_good(&g) {
        Ok(out) => Report::ok(out),
        Err(GoodError::Bowtie(cert)) => Report::negative(json!({ "bowtie": cert })),
        Err(e) => return Err(Failure::usage(e)),
    })
}

pub fn good_check(input: &Path) -> Outcome {
    let g: Graph = read_json(input)?;
    Ok(match good::is_good(&g) {
        Ok(Goodness::Good) => Report::ok(json!({ "good": true })),
        Ok(Goodness::Violation { vertex }) => Report::negative(json!({ "good": false, "vertex": vertex })),
        Err(GoodError::Bowtie(cert)) => Report::negative(json!({ "good": false, "bowtie": cert })),
        Err(e) => return Err(Failure::usage(e)),
    })
}

pub fn good_decompose(input: &Path) -> Outcome {
    let g: Graph = read_json(input)?;
    Ok(match good::decompose(&g) {
        Ok(d) => Report::ok(json!({ "components": d.components, "e0": d.e0, "e1": d.e1 })),
        Err(e) => Report::negative(json!({ "error": e.to_string(), "detail": e_detail(&e) })),
    })
}

fn e_detail(e: &GoodError) -> serde_json::Value {
    match e {
        GoodError::Bowtie(cert) => json!({ "bowtie": cert }),
        GoodError::NotGood { vertex } => json!({ "vertex": vertex }),
        GoodError::UnclassifiedComponent { vertices } => json!({ "component": vertices }),
    }
}

pub fn order_check(input: &Path) -> Outcome {
    let g: Graph = read_json(input)?;
    let order = g
        .order()
        .ok_or_else(|| Failure::usage("input graph carries no order"))?
        .to_vec();
    let good = good::decompose(&g).map_err(|e| Failure::usage(format!("input is not good: {e}")))?;
    Ok(match lifting::is_admissible(&good, &order) {
        Ok(()) => Report::ok(json!({ "admissible": true })),
        Err(v) => Report::negative(json!({ "admissible": false, "violation": v, "reason": v.to_string() })),
    })
}

pub fn order_make(input: &Path, seed: Option<u64>) -> Outcome {
    let good = good_graph(input)?;
    let og = match seed {
        Some(s) => lifting::random_admissible_order(&good, &mut ChaCha8Rng::seed_from_u64(s)),
        None => lifting::some_admissible_order(&good),
    };
    Ok(Report::ok(og.ordered_graph()))
}

pub fn lift(input: &Path, full: bool) -> Outcome {
    let og = ordered_good(input)?;
    Ok(Report::ok(if full { lifting::lift_l2(&og) } else { lifting::lift_l1(&og) }))
}

pub fn shadow(input: &Path) -> Outcome {
    let a: LiftedStructure = read_json(input)?;
    Ok(Report::ok(lifting::shadow(&a)))
}

pub fn reduce(input: &Path) -> Outcome {
    let a: LiftedStructure = read_json(input)?;
    Ok(Report::ok(lifting::reduce(&a)))
}

pub fn unreduce(input: &Path) -> Outcome {
    let r: ReducedStructure = read_json(input)?;
    match lifting::unreduce(&r) {
        Ok(a) => Ok(Report::ok(a)),
        Err(lifting::UnreduceError::NotReduced(m)) => Ok(Report::negative(json!({ "error": m }))),
        Err(lifting::UnreduceError::Membership(e)) => Err(membership_failure(e)),
    }
}

pub fn catalogue_build(max_centre_e1: usize, out: Option<&Path>) -> Outcome {
    let cat = build_catalogue(max_centre_e1);
    let Some(path) = out else {
        return Ok(Report::ok(cat));
    };
    let text = serde_json::to_string(&cat).expect("catalogue serialises");
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("writing {}: {e}", path.display())))?;
    Ok(Report::ok(json!({
        "path": path.display().to_string(),
        "max_centre_e1": cat.max_centre_e1,
        "types": cat.types.len(),
        "realizable": cat.realizable.iter().map(|s| s.len()).collect::<Vec<_>>(),
    })))
}

pub fn member_check(input: &Path, catalogue: Option<&Path>) -> Outcome {
    let a: LiftedStructure = read_json(input)?;
    let cat = load_catalogue(catalogue)?;
    let verdict = membership::is_member(&a).map_err(membership_failure)?;
    let forbidden = check_small(&a, &cat).map_err(membership_failure)?;
    let agree = verdict.is_member() == forbidden.is_none();
    let body = json!({
        "member": verdict.is_member(),
        "certificate": match &verdict {
            Membership::Member(w) => serde_json::to_value(w).expect("witness serialises"),
            Membership::NonMember(o) => serde_json::to_value(o).expect("obstruction serialises"),
        },
        "catalogue": { "forbidden": forbidden, "agrees": agree },
    });
    if !agree {
        return Err(Failure::usage(format!("deciders disagree: {body}")));
    }
    Ok(if verdict.is_member() { Report::ok(body) } else { Report::negative(body) })
}

fn amalgam_failure(e: AmalgamError) -> Result<Report, Failure> {
    match e {
        AmalgamError::NotMember(o) => Ok(Report::negative(json!({ "error": "input is not a member", "obstruction": o }))),
        e => Err(Failure::usage(e)),
    }
}

pub fn amalgamate_centres(g1: &Path, g2: &Path, map: &str) -> Outcome {
    let (g1, g2) = (good_graph(g1)?, good_graph(g2)?);
    let f: Vec<(usize, usize)> = parse_json("map", map)?;
    match amalgam::amalgamate_centres(&g1, &g2, &f) {
        Ok(out) => Ok(Report::ok(json!({ "graph": out.graph.graph, "right": out.right }))),
        Err(e) => amalgam_failure(e),
    }
}

pub fn amalgamate_lifts(a: &Path, b1: &Path, b2: &Path, e1: &str, e2: &str) -> Outcome {
    let a: LiftedStructure = read_json(a)?;
    let b1: LiftedStructure = read_json(b1)?;
    let b2: LiftedStructure = read_json(b2)?;
    let e1: Vec<usize> = parse_json("e1", e1)?;
    let e2: Vec<usize> = parse_json("e2", e2)?;
    match amalgam::amalgamate_lifts(&a, &b1, &b2, &e1, &e2) {
        Ok(out) => Ok(Report::ok(out)),
        Err(e) => amalgam_failure(e),
    }
}

pub fn generic(steps: usize, seed: u64, size_cap: usize, max_centre_e1: usize) -> Outcome {
    amalgam::generic_sample_with(steps, seed, size_cap, max_centre_e1)
        .map(Report::ok)
        .map_err(membership_failure)
}

pub fn partite_build(a: &Path, b: &Path, n: usize) -> Outcome {
    let a: ReducedStructure = read_json(a)?;
    let b: PartiteSystem = read_json(b)?;
    let a = ReducedStructure(a.normalized());
    ramsey::partite_lemma_construct(&a, &b, n).map(Report::ok).map_err(ramsey_failure)
}

pub fn partite_construct(a: &Path, b: &Path, c0: &Path, budget: Budget, catalogue: Option<&Path>) -> Outcome {
    let a: ReducedStructure = read_json(a)?;
    let b: ReducedStructure = read_json(b)?;
    let c0: ReducedStructure = read_json(c0)?;
    let cat = load_catalogue(catalogue)?;
    let out = ramsey::partite_construction(&a, &b, &c0, budget, &cat).map_err(ramsey_failure)?;
    Ok(match out {
        ConstructionOutcome::Complete { .. } => Report::ok(out),
        ConstructionOutcome::BudgetExceeded { .. } => Report::with(3, out),
    })
}

/// A partite system, or a plain structure when the input is not one.
fn system_or_structure(path: &Path) -> Result<Result<PartiteSystem, LiftedStructure>, Failure> {
    let v: serde_json::Value = read_json(path)?;
    if v.get("parts").is_some() {
        return serde_json::from_value(v)
            .map(Ok)
            .map_err(|e| Failure::usage(format!("malformed partite system {}: {e}", path.display())));
    }
    serde_json::from_value(v)
        .map(Err)
        .map_err(|e| Failure::usage(format!("malformed structure {}: {e}", path.display())))
}

pub fn arrow_verify(c: &Path, b: &Path, a: &Path, cap: u64) -> Outcome {
    let a: ReducedStructure = read_json(a)?;
    let out = match (system_or_structure(c)?, system_or_structure(b)?) {
        (Ok(c), Ok(b)) => ramsey::verify_arrow(&c, &b, &a, cap),
        (c, b) => {
            let c = c.map_or_else(|s| s, |p| p.body.0);
            let b = b.map_or_else(|s| s, |p| p.body.0);
            ramsey::verify_arrow_plain(&c, &b, &a, cap)
        }
    }
    .map_err(ramsey_failure)?;
    Ok(if out.holds { Report::ok(out) } else { Report::negative(out) })
}

pub fn hj(t: usize, r: usize, cap: usize) -> Outcome {
    if t == 0 || r == 0 || r > u8::MAX as usize {
        return Err(Failure::usage("need t >= 1 and 1 <= r <= 255"));
    }
    match ramsey::hales_jewett_number(t, r, cap) {
        Some(n) => {
            let below = (n > 1).then(|| ramsey::line_free_colouring(t, r, n - 1)).flatten();
            Ok(Report::ok(json!({ "t": t, "r": r, "n": n, "line_free_below": below })))
        }
        None => Ok(Report::with(3, json!({ "t": t, "r": r, "n": null, "exceeds": cap }))),
    }
}

pub fn complete(input: &Path, a: Option<&Path>) -> Outcome {
    let d: ReducedStructure = read_json(input)?;
    let a: Option<ReducedStructure> = a.map(read_json).transpose()?;
    ramsey::complete_reduced(&d, a.as_ref()).map(Report::ok).map_err(ramsey_failure)
}

pub fn gadgets(input: &Path) -> Outcome {
    let g: Graph = read_json(input)?;
    ramsey::expansion_gadget(&g).map(Report::ok).map_err(ramsey_failure)
}
