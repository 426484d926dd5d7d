//! Commutator-based diagnostics: pairwise non-commutativity degrees over an
//! action set, finite matrix-group closure, the commutator subgroup, and an
//! order-sensitivity probe that ties operator non-commutativity to reward
//! values.
//!
//! Group elements are matched up to Frobenius distance 1e-8 and global
//! phases are **not** modded out: `−I` and `I` count as distinct elements.

use serde::Serialize;

use crate::bellman::sequence_q;
use crate::environment::{ActionUnitary, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, UNITARY_TOL};
use crate::statevector::StateVector;

/// Pairs at or below this normalized degree count as commuting.
pub const COMMUTING_TOL: f64 = 1e-10;
/// Frobenius-distance tolerance for group-element identity.
pub const ELEMENT_MATCH_TOL: f64 = 1e-8;
/// Default cap on closure size.
pub const DEFAULT_CLOSURE_CAP: usize = 512;

/// `[a, b] = ab − ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::ShapeMismatch {
            context: "commutator",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// Raw degree `‖[a,b]‖_F` and normalized degree `raw/(‖a‖_F·‖b‖_F)`.
///
/// The normalized value lies in [0, 2] and is zero exactly when the pair
/// commutes within tolerance. Zero-norm operands are rejected (the
/// normalization is undefined there).
pub fn degree(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(f64, f64)> {
    let na = a.frobenius_norm();
    let nb = b.frobenius_norm();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::invalid(
            "degree",
            "zero-norm operand leaves the normalized degree undefined",
        ));
    }
    let raw = commutator(a, b)?.frobenius_norm();
    Ok((raw, raw / (na * nb)))
}

/// Pairwise non-commutativity report over an action set.
#[derive(Debug, Clone, Serialize)]
pub struct NoncommReport {
    pub names: Vec<String>,
    /// Raw Frobenius commutator norms, symmetric with zero diagonal.
    pub raw: Vec<Vec<f64>>,
    /// Normalized degrees, symmetric with zero diagonal.
    pub pairwise: Vec<Vec<f64>>,
    pub max_degree: f64,
    /// Index pairs `(i, j)`, `i < j`, with normalized degree ≤ 1e-10.
    pub commuting_pairs: Vec<(usize, usize)>,
}

/// Computes all pairwise degrees of the action set.
pub fn pairwise_report(actions: &[ActionUnitary]) -> Result<NoncommReport> {
    if actions.is_empty() {
        return Err(Error::invalid("pairwise report", "at least one action required"));
    }
    let n = actions.len();
    let mut raw = vec![vec![0.0; n]; n];
    let mut normalized = vec![vec![0.0; n]; n];
    let mut max_degree = 0.0f64;
    let mut commuting_pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (r, d) = degree(actions[i].matrix(), actions[j].matrix())?;
            raw[i][j] = r;
            raw[j][i] = r;
            normalized[i][j] = d;
            normalized[j][i] = d;
            max_degree = max_degree.max(d);
            if d <= COMMUTING_TOL {
                commuting_pairs.push((i, j));
            }
        }
    }
    Ok(NoncommReport {
        names: actions.iter().map(|a| a.name().to_string()).collect(),
        raw,
        pairwise: normalized,
        max_degree,
        commuting_pairs,
    })
}

/// A finite set of unitaries generated from named generators.
#[derive(Debug, Clone)]
pub struct FiniteGroupClosure {
    pub elements: Vec<ComplexMatrix>,
    pub generated_from: Vec<String>,
    pub is_closed: bool,
    pub cap: usize,
}

impl FiniteGroupClosure {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Whether some element is within match tolerance of `m`.
    pub fn contains(&self, m: &ComplexMatrix) -> bool {
        min_distance(&self.elements, m)
            .map(|d| d <= ELEMENT_MATCH_TOL)
            .unwrap_or(false)
    }
}

fn min_distance(elements: &[ComplexMatrix], candidate: &ComplexMatrix) -> Option<f64> {
    elements
        .iter()
        .map(|e| e.sub(candidate).expect("equal shapes").frobenius_norm())
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))))
}

/// Breadth-first closure of the generators under matrix multiplication,
/// deduplicated at Frobenius distance 1e-8. Starts from the identity and
/// halts either closed or at `cap` with `is_closed = false`.
pub fn group_closure(generators: &[ComplexMatrix], cap: usize) -> Result<FiniteGroupClosure> {
    group_closure_named(
        &generators
            .iter()
            .enumerate()
            .map(|(i, g)| (format!("g{i}"), g.clone()))
            .collect::<Vec<_>>(),
        cap,
    )
}

/// [`group_closure`] with caller-supplied generator names.
pub fn group_closure_named(
    generators: &[(String, ComplexMatrix)],
    cap: usize,
) -> Result<FiniteGroupClosure> {
    if cap == 0 {
        return Err(Error::invalid("group closure", "cap must be positive"));
    }
    let mut dim = None;
    for (name, g) in generators {
        g.ensure_unitary(UNITARY_TOL).map_err(|_| {
            Error::invalid("group closure", format!("generator '{name}' is not unitary"))
        })?;
        match dim {
            None => dim = Some(g.rows()),
            Some(d) if d == g.rows() => {}
            Some(d) => {
                return Err(Error::invalid(
                    "group closure",
                    format!("generator '{name}' is {}x{}, expected {d}x{d}", g.rows(), g.cols()),
                ))
            }
        }
    }
    let dim = dim.unwrap_or(1);

    let mut elements = vec![ComplexMatrix::identity(dim)];
    let mut is_closed = true;
    let mut i = 0;
    'expand: while i < elements.len() {
        for (_, g) in generators {
            let product = elements[i].matmul(g)?;
            let fresh = min_distance(&elements, &product)
                .map(|d| d > ELEMENT_MATCH_TOL)
                .unwrap_or(true);
            if fresh {
                if elements.len() >= cap {
                    is_closed = false;
                    break 'expand;
                }
                elements.push(product);
            }
        }
        i += 1;
    }
    Ok(FiniteGroupClosure {
        elements,
        generated_from: generators.iter().map(|(n, _)| n.clone()).collect(),
        is_closed,
        cap,
    })
}

/// Closure of all group commutators `g h g⁻¹ h⁻¹` of a closed group;
/// inverses are adjoints since every element is unitary. The result is the
/// trivial group `{I}` exactly when the input group is abelian.
pub fn commutator_subgroup(closure: &FiniteGroupClosure) -> Result<FiniteGroupClosure> {
    if !closure.is_closed {
        return Err(Error::invalid(
            "commutator subgroup",
            "input closure hit its cap and is not a complete group",
        ));
    }
    let mut generators: Vec<ComplexMatrix> = Vec::new();
    for g in &closure.elements {
        for h in &closure.elements {
            let c = g.matmul(h)?.matmul(&g.dagger())?.matmul(&h.dagger())?;
            let fresh = min_distance(&generators, &c)
                .map(|d| d > ELEMENT_MATCH_TOL)
                .unwrap_or(true);
            if fresh {
                generators.push(c);
            }
        }
    }
    let named: Vec<(String, ComplexMatrix)> = generators
        .into_iter()
        .enumerate()
        .map(|(i, c)| (format!("c{i}"), c))
        .collect();
    let mut out = group_closure_named(&named, closure.cap)?;
    out.generated_from = vec![format!(
        "commutators of <{}>",
        closure.generated_from.join(", ")
    )];
    Ok(out)
}

/// `|Q(ψ,[U_a,U_b]) − Q(ψ,[U_b,U_a])|` with `Q` the sequence expectation of
/// the environment reward: how much the reward value notices the action
/// order. Zero for commuting pairs; it can also vanish for non-commuting
/// pairs at particular (ψ, reward) combinations, so a nonzero witness needs
/// a suitable evaluation state.
pub fn order_sensitivity(
    env: &EnvironmentSpec,
    psi: &StateVector,
    a: usize,
    b: usize,
) -> Result<f64> {
    if !env.is_noiseless() {
        return Err(Error::invalid(
            "order sensitivity",
            format!("requires noise_p = 0, environment has {}", env.noise_p()),
        ));
    }
    let ua = env.action(a)?;
    let ub = env.action(b)?;
    let forward = sequence_q(psi, &[ua, ub], env.reward())?;
    let backward = sequence_q(psi, &[ub, ua], env.reward())?;
    Ok((forward - backward).abs())
}
