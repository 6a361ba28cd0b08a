use blc_core::gaussian::{d_value_from_solution, leaf_constant, solve_euler_lagrange, GaussianError};
use blc_core::linalg::MirrorKind;
use blc_core::optimizers::{
    canonical_indices, decide_boundary_optimizers, describe_optimizers, polynomial_relations, OptimizerError,
};
use blc_core::polytope::{decompose, membership, vertices, DecompositionNode, PolytopeError};
use blc_core::scalar::format_rational;
use blc_core::{Configuration, ExponentVector, IndexSet, TolerancePolicy};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::problem::Problem;
use crate::{CliError, Outcome};

/// Largest `N − M` for which the phase-relation basis is attempted by `analyze`.
const PHASE_MAX_CODIMENSION: usize = 4;
/// Vertices of `K_A` are listed only up to this many vectors.
const MAX_VERTEX_N: usize = 20;

pub fn tolerances_json(t: &TolerancePolicy) -> Value {
    serde_json::to_value(t).expect("tolerances serialize")
}

fn mirror_name(c: &Configuration) -> &'static str {
    match c.mirror().map(|m| &m.kind) {
        None => "float",
        Some(MirrorKind::Entrywise) => "rational",
        Some(MirrorKind::ColumnScaled(_)) => "rational directions",
        Some(MirrorKind::Coordinates) => "rational coordinates",
    }
}

pub fn configuration_json(c: &Configuration) -> Value {
    json!({
        "M": c.dim(),
        "N": c.len(),
        "rank": c.rank,
        "spans": c.spans,
        "arithmetic": mirror_name(c),
        "essential": c.essential().to_vec(),
        "proportional_pairs": c.proportional_pairs,
        "properly_redundant": c.properly_redundant(),
        "defects": c.defects(),
    })
}

pub fn exponents_json(z: &ExponentVector) -> Value {
    json!({
        "p": z.p_strings(),
        "z": z.exact().iter().map(format_rational).collect::<Vec<_>>(),
        "snapped": z.was_snapped(),
    })
}

fn polytope_error(e: PolytopeError) -> CliError {
    match e {
        PolytopeError::DefectiveConfiguration(d) => CliError::Defective(vec![d]),
        PolytopeError::LengthMismatch { .. } | PolytopeError::InvalidExponent { .. } => CliError::Parse(e.to_string()),
        other => CliError::Numerical(other.to_string()),
    }
}

fn gaussian_error(e: GaussianError) -> CliError {
    CliError::Numerical(e.to_string())
}

fn require_clean(c: &Configuration, report: &mut Value) -> Result<(), Outcome> {
    let defects = c.defects();
    if defects.is_empty() {
        return Ok(());
    }
    report["error"] = json!("defective configuration");
    Err(Outcome { report: report.clone(), exit: 2, message: Some(format!("defective configuration: {}", defects.join("; "))) })
}

pub fn analyze(problem: &Problem) -> Result<Outcome, CliError> {
    let c = &problem.configuration;
    let mut report = json!({
        "command": "analyze",
        "exact_input": problem.exact_input,
        "configuration": configuration_json(c),
        "tolerances": tolerances_json(&problem.tolerances),
    });
    if let Err(o) = require_clean(c, &mut report) {
        return Ok(o);
    }
    let mut warnings = Vec::new();
    let ess = c.essential();
    if ess == IndexSet::full(c.len()) {
        warnings.push("every vector is essential: N = M and p = (1, .., 1) is the only admissible exponent".to_string());
    } else if !ess.is_empty() {
        warnings.push(format!("vectors {:?} are essential", ess.to_vec()));
    }
    if c.len() <= MAX_VERTEX_N {
        let vs = vertices(c).map_err(polytope_error)?;
        let bases: Vec<Vec<usize>> =
            vs.iter().map(|v| (0..v.len()).filter(|&j| !v.exact()[j].is_zero()).collect()).collect();
        report["polytope"] = json!({ "vertex_count": vs.len(), "vertices": bases });
    } else {
        warnings.push(format!("vertices not enumerated for N = {} > {MAX_VERTEX_N}", c.len()));
    }
    let can = canonical_indices(c, &problem.tolerances).map_err(|e| CliError::Numerical(e.to_string()))?;
    report["canonical"] = json!({
        "exponents": exponents_json(&can.z_circ),
        "p_float": can.p_circ,
        "exact": can.exact,
        "interior": can.interior,
        "best_best_constant": can.d_best_best,
    });
    if c.properly_redundant() && c.len() - c.dim() <= PHASE_MAX_CODIMENSION {
        match polynomial_relations(c, c.len() - c.dim()) {
            Ok(basis) => report["phase_relations"] = serde_json::to_value(&basis).expect("phase basis serializes"),
            Err(OptimizerError::DegreeTooLarge { .. }) => warnings.push("phase relations skipped: basis too large".into()),
            Err(e) => return Err(CliError::Numerical(e.to_string())),
        }
    }
    report["warnings"] = json!(warnings);
    Ok(Outcome::ok(report))
}

fn exponents_of(problem: &Problem) -> Result<&ExponentVector, CliError> {
    problem.exponents.as_ref().ok_or_else(|| CliError::Parse("this command needs \"exponents\" in the problem file".into()))
}

/// Common gate for `solve` and `decompose`: scaling and the subset test.
/// Returns the membership section, or the exit-3 outcome.
fn gate(c: &Configuration, z: &ExponentVector, report: &mut Value) -> Result<Result<bool, Outcome>, CliError> {
    match membership(c, z) {
        Ok(rep) => {
            report["polytope"] = json!({
                "member": rep.member,
                "interior": rep.interior,
                "critical_sets": rep.critical_sets.iter().map(|s| s.to_vec()).collect::<Vec<_>>(),
            });
            if let Some(w) = rep.supercritical_witness {
                let sum = format_rational(&z.subset_sum(w));
                let rank = c.subset_rank(w).map_err(|e| CliError::Numerical(e.to_string()))?;
                report["d_value"] = json!("inf");
                report["witness"] = json!({ "subset": w.to_vec(), "sum": sum, "rank": rank });
                let msg = format!("exponents outside K_A: subset {w} has sum {sum} > rank {rank}, so the integral diverges");
                return Ok(Err(Outcome { report: report.clone(), exit: 3, message: Some(msg) }));
            }
            Ok(Ok(rep.interior))
        }
        Err(PolytopeError::ScalingViolated { sum, m }) => {
            report["d_value"] = json!("inf");
            report["witness"] = json!({ "subset": "scaling", "sum": sum, "required": m });
            let msg = format!("reciprocal exponents sum to {sum}, but the scaling condition requires {m}");
            Ok(Err(Outcome { report: report.clone(), exit: 3, message: Some(msg) }))
        }
        Err(e) => Err(polytope_error(e)),
    }
}

pub fn tree_json(node: &DecompositionNode, tol: &TolerancePolicy) -> Result<Value, CliError> {
    let mut v = json!({
        "indices": node.indices,
        "M": node.configuration.dim(),
        "exponents": exponents_json(&node.exponents),
    });
    match &node.split {
        None => {
            v["leaf"] = json!(true);
            v["constant"] = json!(leaf_constant(node, tol).map_err(gaussian_error)?);
        }
        Some(split) => {
            v["leaf"] = json!(false);
            v["split"] = json!({
                "subset": split.subset.iter().map(|j| node.indices[j]).collect::<Vec<_>>(),
                "rank": split.factorization.r,
                "left": tree_json(&split.left, tol)?,
                "right": tree_json(&split.right, tol)?,
            });
        }
    }
    Ok(v)
}

fn boundary_product(node: &DecompositionNode, tol: &TolerancePolicy) -> Result<f64, CliError> {
    node.fold_product(&mut |leaf| leaf_constant(leaf, tol)).map_err(gaussian_error)
}

pub fn solve(problem: &Problem) -> Result<Outcome, CliError> {
    let c = &problem.configuration;
    let z = exponents_of(problem)?;
    let tol = &problem.tolerances;
    let mut report = json!({
        "command": "solve",
        "exact_input": problem.exact_input,
        "configuration": configuration_json(c),
        "exponents": exponents_json(z),
        "tolerances": tolerances_json(tol),
    });
    if let Err(o) = require_clean(c, &mut report) {
        return Ok(o);
    }
    let interior = match gate(c, z, &mut report)? {
        Ok(i) => i,
        Err(o) => return Ok(o),
    };
    if interior {
        let sol = solve_euler_lagrange(c, z, tol).map_err(gaussian_error)?;
        let product = d_value_from_solution(c, z, &sol.s).map_err(gaussian_error)?;
        let entropy: f64 = z.values().iter().filter(|v| **v > 0.0).map(|v| v * v.ln()).sum();
        report["route"] = json!("interior");
        report["d_value"] = json!(sol.d_value);
        report["solution"] = json!({
            "s": sol.s,
            "t": sol.t,
            "d_value": sol.d_value,
            "product_formula": product,
            "legendre_value": sol.legendre_value,
            "dual_gap": (2.0 * sol.d_value.ln() - (sol.legendre_value - entropy)).abs(),
            "residual": sol.residual,
            "iterations": sol.iterations,
        });
        let opt = describe_optimizers(c, z, &sol).map_err(|e| CliError::Numerical(e.to_string()))?;
        report["optimizers"] = json!({ "exists": opt.exists, "gaussian": opt.gaussian, "scale": "any c > 0" });
    } else {
        let tree = decompose(c, z).map_err(polytope_error)?;
        let d = boundary_product(&tree, tol)?;
        report["route"] = json!("boundary");
        report["d_value"] = json!(d);
        report["decomposition"] = tree_json(&tree, tol)?;
        report["optimizers"] = match decide_boundary_optimizers(c, z) {
            Ok(rep) => json!({
                "exists": rep.exists,
                "splits": rep.splits,
                "failure_split": rep.failure_split,
            }),
            Err(OptimizerError::VertexPoint(idx)) => json!({
                "exists": null,
                "note": format!("p_j = inf at {idx:?}: optimizers are far from unique and are not classified"),
            }),
            Err(e) => return Err(CliError::Numerical(e.to_string())),
        };
    }
    Ok(Outcome::ok(report))
}

pub fn decompose_cmd(problem: &Problem) -> Result<Outcome, CliError> {
    let c = &problem.configuration;
    let z = exponents_of(problem)?;
    let tol = &problem.tolerances;
    let mut report = json!({
        "command": "decompose",
        "configuration": configuration_json(c),
        "exponents": exponents_json(z),
        "tolerances": tolerances_json(tol),
    });
    if let Err(o) = require_clean(c, &mut report) {
        return Ok(o);
    }
    if let Err(o) = gate(c, z, &mut report)? {
        return Ok(o);
    }
    let tree = decompose(c, z).map_err(polytope_error)?;
    report["depth"] = json!(tree.depth());
    report["leaves"] = json!(tree.leaves().len());
    report["d_value"] = json!(boundary_product(&tree, tol)?);
    report["tree"] = tree_json(&tree, tol)?;
    Ok(Outcome::ok(report))
}
