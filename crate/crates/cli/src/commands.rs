//! One function per subcommand. Each returns `Ok(true)` for success or an
//! affirmative verdict and `Ok(false)` for a refutation.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use combmetric::covering::all_normalized_coverings;
use combmetric::enumerator::{distribution, identity_verdict_exhaustive, identity_verdict_structural};
use combmetric::isometry::{
    covering_permutations, decompose as split, full_isometry_group, k_m_order, preserves_weight,
};
use combmetric::mep::{conjecture_prediction, exhaustive_mep_scan, mep_verdict};
use combmetric::metric::check_axioms as axiom_report;
use combmetric::{
    CodeFile, Covering, CoveringFile, FactoredGroup, Field, LinearCode, MatrixFile, MepMode,
    MetricSpace, Vector, WeightTable,
};
use serde_json::json;

use crate::report;
use crate::RunConfig;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_covering(cfg: &RunConfig) -> Result<Covering> {
    let path = cfg.covering.as_deref().context("--covering is required")?;
    let file: CoveringFile = read_json(path)?;
    Ok(file.to_covering()?)
}

fn load_code(cfg: &RunConfig) -> Result<LinearCode> {
    let path = cfg.code.as_deref().context("--code is required")?;
    let file: CodeFile = read_json(path)?;
    Ok(file.to_code()?)
}

fn field(cfg: &RunConfig) -> Result<Field> {
    Ok(Field::new(cfg.q)?)
}

fn space(cfg: &RunConfig) -> Result<MetricSpace> {
    Ok(MetricSpace::new(load_covering(cfg)?, field(cfg)?, &cfg.limits())?)
}

fn parse_vector(field: Field, n: usize, text: &str) -> Result<Vector> {
    let entries = text
        .split(',')
        .map(|t| {
            let v: u32 = t.trim().parse().with_context(|| format!("bad residue {t:?}"))?;
            if v >= field.q() as u32 {
                bail!("residue {v} is not below q = {}", field.q());
            }
            Ok(v as u8)
        })
        .collect::<Result<Vec<u8>>>()?;
    if entries.len() != n {
        bail!("vector has length {}, covering has n = {n}", entries.len());
    }
    Ok(Vector::new(field, entries)?)
}

fn emit(cfg: &RunConfig, value: serde_json::Value, text: impl FnOnce()) {
    if cfg.json {
        println!("{value}");
    } else {
        text();
    }
}

pub fn normalize(cfg: &RunConfig) -> Result<bool> {
    let f = load_covering(cfg)?;
    let file = CoveringFile::from_covering(&f);
    emit(cfg, serde_json::to_value(&file)?, || {
        println!("{f}");
        if !file.dropped.is_empty() {
            println!("dropped as redundant: {:?}", file.dropped);
        }
    });
    Ok(true)
}

pub fn weight(cfg: &RunConfig, vector: &str) -> Result<bool> {
    let s = space(cfg)?;
    let x = parse_vector(s.field(), s.n(), vector)?;
    let w = s.weight(&x);
    emit(cfg, json!({ "vector": report::vector(&x), "weight": w }), || println!("{w}"));
    Ok(true)
}

pub fn distance(cfg: &RunConfig, vectors: &[String]) -> Result<bool> {
    let [x, y] = vectors else {
        bail!("distance takes exactly two --vector arguments");
    };
    let s = space(cfg)?;
    let x = parse_vector(s.field(), s.n(), x)?;
    let y = parse_vector(s.field(), s.n(), y)?;
    let d = s.table().distance(&x, &y);
    emit(cfg, json!({ "distance": d }), || println!("{d}"));
    Ok(true)
}

pub fn enumerator(cfg: &RunConfig) -> Result<bool> {
    let f = load_covering(cfg)?;
    let c = load_code(cfg)?;
    if c.n() != f.n() {
        bail!("code length {} differs from covering n = {}", c.n(), f.n());
    }
    let table = WeightTable::new(&f, &cfg.limits())?;
    let dist = distribution(&table, &c, &cfg.limits())?;
    emit(
        cfg,
        json!({ "coefficients": dist.coeffs(), "polynomial": dist.polynomial() }),
        || {
            println!("A = {:?}", dist.coeffs());
            println!("W(x, y) = {}", dist.polynomial());
        },
    );
    Ok(true)
}

pub fn dual(cfg: &RunConfig) -> Result<bool> {
    let d = load_code(cfg)?.dual();
    emit(cfg, serde_json::to_value(CodeFile::from_code(&d))?, || println!("{d}"));
    Ok(true)
}

pub fn identity_check(cfg: &RunConfig, exhaustive: bool) -> Result<bool> {
    let f = load_covering(cfg)?;
    let field = field(cfg)?;
    let limits = cfg.limits();
    let max_dim = cfg.max_dim.unwrap_or(f.n());
    let structural = identity_verdict_structural(&f, field, &limits)?;
    let scanned = if exhaustive {
        Some(identity_verdict_exhaustive(&f, field, max_dim, &limits)?)
    } else {
        None
    };
    let agree = scanned.as_ref().is_none_or(|s| s.admits == structural.admits);
    emit(
        cfg,
        json!({
            "admits": structural.admits,
            "k": structural.k,
            "witness": structural.witness.as_ref().map(report::identity_witness),
            "exhaustive": scanned.as_ref().map(|s| json!({
                "admits": s.admits,
                "max_dim": max_dim,
                "witness": s.witness.as_ref().map(report::identity_witness),
            })),
            "agree": agree,
        }),
        || {
            match structural.k {
                Some(k) if structural.admits => println!("admits, k={k}"),
                _ => println!("refuted"),
            }
            if let Some(w) = &structural.witness {
                println!("  {} and {} share {}", w.first, w.second, w.distribution);
                println!("  duals: {} vs {}", w.first_dual, w.second_dual);
            }
            if let Some(s) = &scanned {
                let verdict = if s.admits { "admits" } else { "refuted" };
                println!("exhaustive (dim <= {max_dim}): {verdict}");
            }
        },
    );
    if !agree {
        bail!("structural and exhaustive verdicts disagree");
    }
    Ok(structural.admits)
}

pub fn isometry_group(cfg: &RunConfig, dump: bool) -> Result<bool> {
    let s = space(cfg)?;
    let limits = cfg.limits();
    let perms = covering_permutations(s.covering(), &limits)?;
    let k_m = k_m_order(s.classes(), s.field());
    let factored = FactoredGroup::new(&s, &limits)?;
    let order = factored.group_order();
    let fits = order.is_some_and(|o| o <= limits.max_group as u128)
        && k_m.is_some_and(|k| k <= limits.max_enum);
    let group = if fits || dump {
        Some(full_isometry_group(&s, &limits)?)
    } else {
        None
    };
    if let (Some(g), Some(o)) = (&group, order) {
        if g.len() as u128 != o {
            bail!("closure has {} elements, factored order is {o}", g.len());
        }
    }
    let fmt = |x: Option<u128>| x.map_or("overflow".to_string(), |v| v.to_string());
    emit(
        cfg,
        json!({
            "order": order.map(|o| o.to_string()),
            "g": perms.len(),
            "k_m": k_m.map(|k| k.to_string()),
            "materialized": group.is_some(),
            "elements": group.as_ref().filter(|_| dump).map(|g| {
                g.elements().iter().map(report::matrix).collect::<Vec<_>>()
            }),
        }),
        || {
            println!("|G| = {}", perms.len());
            println!("|K_M| = {}", fmt(k_m));
            println!("|GL(n,F)_q| = {}", fmt(order));
            if let Some(g) = group.as_ref().filter(|_| dump) {
                for m in g.elements() {
                    println!("{m}");
                }
            }
        },
    );
    Ok(true)
}

pub fn decompose(cfg: &RunConfig, matrix: &Path) -> Result<bool> {
    let s = space(cfg)?;
    let limits = cfg.limits();
    let file: MatrixFile = read_json(matrix)?;
    let t = file.to_matrix(cfg.q)?;
    if t.field() != s.field() {
        bail!("matrix is over F_{}, covering over F_{}", t.field().q(), cfg.q);
    }
    if t.rows() != s.n() || t.cols() != s.n() {
        bail!("matrix is {}x{}, expected {n}x{n}", t.rows(), t.cols(), n = s.n());
    }
    if !preserves_weight(s.table(), &t, &limits)? {
        emit(cfg, json!({ "isometry": false }), || println!("not an isometry"));
        return Ok(false);
    }
    let perms = covering_permutations(s.covering(), &limits)?;
    let (phi, b) = split(&s, &perms, &t)?;
    emit(
        cfg,
        json!({
            "isometry": true,
            "phi": phi.to_one_based(),
            "b": report::matrix(&b),
        }),
        || {
            println!("phi = {phi}");
            println!("B = {b}");
        },
    );
    Ok(true)
}

pub fn mep_check(cfg: &RunConfig, exhaustive: bool) -> Result<bool> {
    let s = space(cfg)?;
    let limits = cfg.limits();
    let mode = if exhaustive {
        MepMode::Exhaustive {
            max_dim: cfg.mep_dim(),
        }
    } else {
        MepMode::Conjecture
    };
    let verdict = mep_verdict(&s, mode, &limits)?;
    // unconnected coverings also get the scan when asked for
    let scanned = if exhaustive && !s.covering().is_connected() {
        Some(exhaustive_mep_scan(&s, cfg.mep_dim(), &limits)?)
    } else {
        None
    };
    emit(
        cfg,
        json!({
            "verdict": report::mep_verdict(&verdict),
            "exhaustive": scanned.as_ref().map(report::mep_verdict),
        }),
        || {
            let word = if verdict.satisfies { "satisfies MEP" } else { "fails MEP" };
            println!("{word} ({:?})", verdict.reason);
            if let Some(w) = &verdict.witness {
                report::print_mep_witness(w);
            }
            if let Some(note) = &verdict.note {
                println!("note: {note}");
            }
            if let Some(v) = &scanned {
                let word = if v.satisfies { "no witness" } else { "witness found" };
                println!("exhaustive (dim <= {}): {word}", cfg.mep_dim());
                if let Some(w) = &v.witness {
                    report::print_mep_witness(w);
                }
            }
        },
    );
    Ok(verdict.satisfies)
}

/// Prints one JSON line per connected covering; fails only on internal errors.
pub fn conjecture_scan(cfg: &RunConfig, n: usize, all: bool) -> Result<bool> {
    let field = field(cfg)?;
    let limits = cfg.limits();
    let mut scanned = 0usize;
    let mut disagreements = 0usize;
    let mut errors = 0usize;
    for f in all_normalized_coverings(n)? {
        if !f.is_connected() || (!all && f.uniform_size().is_none()) {
            continue;
        }
        scanned += 1;
        let prediction = conjecture_prediction(&f);
        let sets = f.to_one_based();
        let outcome = MetricSpace::new(f, field, &limits)
            .and_then(|s| exhaustive_mep_scan(&s, cfg.mep_dim(), &limits));
        let line = match outcome {
            Ok(v) => {
                let agrees = v.satisfies == prediction;
                if !agrees {
                    disagreements += 1;
                }
                json!({
                    "covering": sets,
                    "prediction": prediction,
                    "scan": v.satisfies,
                    "agrees": agrees,
                    "witness": v.witness.as_ref().map(report::mep_witness),
                })
            }
            Err(e) => {
                errors += 1;
                json!({ "covering": sets, "prediction": prediction, "error": e.to_string() })
            }
        };
        println!("{line}");
    }
    eprintln!(
        "scanned {scanned} coverings of [{n}] over F_{}: {disagreements} disagreements, {errors} errors",
        cfg.q
    );
    if errors > 0 {
        bail!("{errors} coverings could not be scanned");
    }
    Ok(true)
}

pub fn check_axioms(cfg: &RunConfig, triple_cap: u128, samples: u64) -> Result<bool> {
    let s = space(cfg)?;
    let report = axiom_report(s.table(), s.field(), triple_cap, samples, cfg.seed, &cfg.limits())?;
    emit(
        cfg,
        json!({
            "holds": report.holds(),
            "pairs": report.pairs_checked,
            "triples": report.triples_checked,
            "sampled": report.triples_sampled,
            "violations": report.violations,
        }),
        || {
            let how = if report.triples_sampled { "sampled" } else { "all" };
            println!(
                "{} pairs, {} triples ({how}): {}",
                report.pairs_checked,
                report.triples_checked,
                if report.holds() { "metric" } else { "NOT a metric" }
            );
            for v in &report.violations {
                println!("  {v}");
            }
        },
    );
    Ok(report.holds())
}
