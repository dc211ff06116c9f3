//! JSON renderings of library values.

use combmetric::enumerator::IdentityWitness;
use combmetric::mep::MepWitness;
use combmetric::{LinearCode, Matrix, MepVerdict, Vector};
use serde_json::{json, Value};

pub fn vector(v: &Vector) -> Value {
    json!(v.entries())
}

pub fn matrix(m: &Matrix) -> Value {
    json!((0..m.rows()).map(|r| m.row(r).to_vec()).collect::<Vec<_>>())
}

pub fn code(c: &LinearCode) -> Value {
    json!({
        "q": c.field().q(),
        "n": c.n(),
        "generators": c.basis().iter().map(vector).collect::<Vec<_>>(),
    })
}

pub fn identity_witness(w: &IdentityWitness) -> Value {
    json!({
        "first": code(&w.first),
        "second": code(&w.second),
        "distribution": w.distribution.coeffs(),
        "first_dual": w.first_dual.coeffs(),
        "second_dual": w.second_dual.coeffs(),
        "source": w.source,
    })
}

pub fn mep_witness(w: &MepWitness) -> Value {
    let t = &w.equivalence;
    json!({
        "kind": w.kind,
        "source": code(t.source()),
        "images": t.images().iter().map(vector).collect::<Vec<_>>(),
        "target": code(t.target()),
        "extension_refuted": w.extension_refuted,
    })
}

pub fn mep_verdict(v: &MepVerdict) -> Value {
    json!({
        "satisfies": v.satisfies,
        "reason": v.reason,
        "witness": v.witness.as_ref().map(mep_witness),
        "note": v.note,
    })
}

pub fn print_mep_witness(w: &MepWitness) {
    let t = &w.equivalence;
    println!("witness ({:?}):", w.kind);
    for (x, y) in t.source().basis().iter().zip(t.images()) {
        println!("  {x} -> {y}");
    }
    if w.extension_refuted {
        println!("  no isometry extends this map");
    }
}
