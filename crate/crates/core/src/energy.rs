//! Binary pairwise energies and their s-t graph constructions.
//!
//! A labeling assigns 0/1 to each variable; the energy is a sum of unary
//! terms and pairwise terms given as lookup tables. Submodular problems map
//! to a plain s-t graph whose minimum cut value (plus a constant offset)
//! equals the minimum energy. Arbitrary problems map to the doubled
//! construction with one node for each variable and one for its complement;
//! variables whose two nodes disagree after the cut stay unlabeled.
//!
//! Conventions: node on the source side <=> label 1; unary terms enter the
//! terminal capacities as `c_si = E_i(0)`, `c_it = E_i(1)`.

use crate::graph::{BuildError, CutResult, Graph, GraphBuilder, NodeId, Side};
use crate::Flow;

/// Pairwise term over the ordered variable pair `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseTerm<F> {
    pub i: u32,
    pub j: u32,
    /// energies for (x_i, x_j) = (0,0), (0,1), (1,0), (1,1)
    pub e: [F; 4],
}

/// Whether the table favors equal labels: `E(0,0) + E(1,1) <= E(0,1) + E(1,0)`.
pub fn is_submodular<F: Flow>(e: &[F; 4]) -> bool {
    e[0] + e[3] <= e[1] + e[2]
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EnergyError {
    #[error("pairwise term on ({i}, {j}) violates submodularity")]
    NonSubmodularTerm { i: u32, j: u32 },
    #[error("duplicate pairwise term on ({i}, {j})")]
    DuplicatePair { i: u32, j: u32 },
    #[error("pairwise term connects variable {0} to itself")]
    SelfPair(u32),
    #[error("variable {0} out of range ({1} variables)")]
    VarRange(u32, usize),
    #[error("labeling or cut has the wrong number of entries")]
    DimensionMismatch,
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Unary and pairwise term tables over binary variables.
#[derive(Debug, Clone)]
pub struct EnergyProblem<F> {
    unary: Vec<(F, F)>,
    pairwise: Vec<PairwiseTerm<F>>,
    pair_seen: std::collections::HashSet<(u32, u32)>,
}

impl<F: Flow> EnergyProblem<F> {
    pub fn new(var_count: usize) -> Self {
        EnergyProblem {
            unary: vec![(F::zero(), F::zero()); var_count],
            pairwise: Vec::new(),
            pair_seen: std::collections::HashSet::new(),
        }
    }

    pub fn var_count(&self) -> usize {
        self.unary.len()
    }

    pub fn pairwise_terms(&self) -> &[PairwiseTerm<F>] {
        &self.pairwise
    }

    pub fn unary(&self, i: u32) -> (F, F) {
        self.unary[i as usize]
    }

    /// Adds `(e0, e1)` to variable `i`'s unary term.
    pub fn add_unary(&mut self, i: u32, e0: F, e1: F) -> Result<(), EnergyError> {
        let n = self.var_count();
        let u = self
            .unary
            .get_mut(i as usize)
            .ok_or(EnergyError::VarRange(i, n))?;
        u.0 += e0;
        u.1 += e1;
        Ok(())
    }

    /// Adds a pairwise table for `(i, j)`, normalizing the pair to `i < j`
    /// (transposing the table when needed). Each pair may appear once.
    pub fn add_pairwise(&mut self, i: u32, j: u32, e: [F; 4]) -> Result<(), EnergyError> {
        if i == j {
            return Err(EnergyError::SelfPair(i));
        }
        let n = self.var_count();
        if i as usize >= n || j as usize >= n {
            return Err(EnergyError::VarRange(i.max(j), n));
        }
        let (i, j, e) = if i < j {
            (i, j, e)
        } else {
            (j, i, [e[0], e[2], e[1], e[3]])
        };
        if !self.pair_seen.insert((i, j)) {
            return Err(EnergyError::DuplicatePair { i, j });
        }
        self.pairwise.push(PairwiseTerm { i, j, e });
        Ok(())
    }

    /// Energy of a complete labeling; this is the brute-force oracle.
    pub fn energy_of(&self, labeling: &[bool]) -> F {
        assert_eq!(labeling.len(), self.var_count());
        let mut total = F::zero();
        for (k, &(e0, e1)) in self.unary.iter().enumerate() {
            total += if labeling[k] { e1 } else { e0 };
        }
        for t in &self.pairwise {
            let idx = (labeling[t.i as usize] as usize) * 2 + labeling[t.j as usize] as usize;
            total += t.e[idx];
        }
        total
    }
}

/// Elements of one pairwise-table decomposition: a constant, additions to
/// the endpoint unaries, and a nonnegative arc pair.
struct Decomposed<F> {
    constant: F,
    /// added to E_i(1) / E_j(1)
    alpha_i: F,
    alpha_j: F,
    /// capacities for the arcs (i -> j) and (j -> i)
    cap_ij: F,
    cap_ji: F,
}

/// Splits a submodular table into unary shifts and a symmetric-as-possible
/// arc pair. A Potts table `(0, b, b, 0)` becomes `c_ij = c_ji = b` exactly.
fn decompose<F: Flow>(e: &[F; 4]) -> Decomposed<F> {
    let (a, b, c, d) = (e[0], e[1], e[2], e[3]);
    debug_assert!(a + d <= b + c);
    let theta = b + c - a - d;
    let two = F::one() + F::one();
    let cap_ij = (theta + F::one()) / two;
    let cap_ji = theta - cap_ij;
    Decomposed {
        constant: a,
        alpha_i: c - a - cap_ij,
        alpha_j: b - a - cap_ji,
        cap_ij,
        cap_ji,
    }
}

/// Builds the s-t graph of a fully submodular problem.
///
/// The minimum of the energy over all labelings equals the graph's max-flow
/// value plus the returned offset, exactly. The minimum cut induces an
/// optimal labeling via source side <=> 1.
pub fn build_submodular<F: Flow>(e: &EnergyProblem<F>) -> Result<(Graph<F>, F), EnergyError> {
    let n = e.var_count();
    let mut u1 = vec![F::zero(); n]; // additions to E_i(1)
    let mut offset = F::zero();
    let mut b = GraphBuilder::new(n.max(1), e.pairwise.len())?;
    for t in &e.pairwise {
        if !is_submodular(&t.e) {
            return Err(EnergyError::NonSubmodularTerm { i: t.i, j: t.j });
        }
        let d = decompose(&t.e);
        offset += d.constant;
        u1[t.i as usize] += d.alpha_i;
        u1[t.j as usize] += d.alpha_j;
        if d.cap_ij > F::zero() || d.cap_ji > F::zero() {
            b.add_edge(NodeId(t.i), NodeId(t.j), d.cap_ij, d.cap_ji, false)?;
        }
    }
    for k in 0..n {
        let (e0, e1) = e.unary[k];
        let (c_si, c_it) = (e0, e1 + u1[k]);
        let shift = c_si.min(c_it);
        offset += shift;
        b.add_terminal(NodeId(k as u32), c_si - shift, c_it - shift)?;
    }
    Ok((b.build(false), offset))
}

/// Builds the doubled graph handling arbitrary pairwise terms.
///
/// Nodes `0..n` represent the variables and nodes `n..2n` their complements;
/// every term is emitted twice (once directly, once mirrored with the roles
/// of source and sink exchanged), which realizes the standard half-weighting
/// as an integer doubling of all energies.
pub fn build_qpbo<F: Flow>(e: &EnergyProblem<F>) -> Result<Graph<F>, EnergyError> {
    let n = e.var_count();
    let mut u0 = vec![F::zero(); 2 * n];
    let mut u1 = vec![F::zero(); 2 * n];
    let mut b = GraphBuilder::new((2 * n).max(1), 2 * e.pairwise.len())?;
    let comp = |v: u32| v + n as u32;

    for k in 0..n {
        let (e0, e1) = e.unary[k];
        u0[k] += e0;
        u1[k] += e1;
        // mirrored copy on the complement node
        u0[k + n] += e1;
        u1[k + n] += e0;
    }

    for t in &e.pairwise {
        if is_submodular(&t.e) {
            let d = decompose(&t.e);
            // direct copy on (i, j)
            u1[t.i as usize] += d.alpha_i;
            u1[t.j as usize] += d.alpha_j;
            if d.cap_ij > F::zero() || d.cap_ji > F::zero() {
                b.add_edge(NodeId(t.i), NodeId(t.j), d.cap_ij, d.cap_ji, false)?;
            }
            // mirrored copy on (j', i')
            u0[comp(t.i) as usize] += d.alpha_i;
            u0[comp(t.j) as usize] += d.alpha_j;
            if d.cap_ij > F::zero() || d.cap_ji > F::zero() {
                b.add_edge(NodeId(comp(t.j)), NodeId(comp(t.i)), d.cap_ij, d.cap_ji, false)?;
            }
        } else {
            // split across the halves: the table over (x_i, complement of
            // x_j) is submodular exactly when the original is not
            let g = [t.e[1], t.e[0], t.e[3], t.e[2]];
            let d = decompose(&g);
            // copy on (i, j')
            u1[t.i as usize] += d.alpha_i;
            u1[comp(t.j) as usize] += d.alpha_j;
            if d.cap_ij > F::zero() || d.cap_ji > F::zero() {
                b.add_edge(NodeId(t.i), NodeId(comp(t.j)), d.cap_ij, d.cap_ji, false)?;
            }
            // mirrored copy on (j, i')
            u0[comp(t.i) as usize] += d.alpha_i;
            u0[t.j as usize] += d.alpha_j;
            if d.cap_ij > F::zero() || d.cap_ji > F::zero() {
                b.add_edge(NodeId(t.j), NodeId(comp(t.i)), d.cap_ij, d.cap_ji, false)?;
            }
        }
    }

    for k in 0..2 * n {
        let (c_si, c_it) = (u0[k], u1[k]);
        let shift = c_si.min(c_it);
        b.add_terminal(NodeId(k as u32), c_si - shift, c_it - shift)?;
    }
    Ok(b.build(false))
}

/// Label of one variable after a QPBO solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpboLabel {
    Zero,
    One,
    Unlabeled,
}

/// Per-variable labels; `Unlabeled` marks variables whose two nodes
/// disagreed in the cut.
#[derive(Debug, Clone)]
pub struct QpboLabeling {
    pub label: Vec<QpboLabel>,
}

impl QpboLabeling {
    pub fn unlabeled_count(&self) -> usize {
        self.label
            .iter()
            .filter(|l| **l == QpboLabel::Unlabeled)
            .count()
    }
}

/// Reads variable labels off a cut of the doubled graph. A variable is
/// labeled only when its node and complement node land on opposite sides.
pub fn extract_qpbo_labels<F: Flow>(
    e: &EnergyProblem<F>,
    cut: &CutResult<F>,
) -> Result<QpboLabeling, EnergyError> {
    let n = e.var_count();
    if cut.side.len() != 2 * n {
        return Err(EnergyError::DimensionMismatch);
    }
    let label = (0..n)
        .map(|k| match (cut.side[k], cut.side[k + n]) {
            (Side::Source, Side::Sink) => QpboLabel::One,
            (Side::Sink, Side::Source) => QpboLabel::Zero,
            _ => QpboLabel::Unlabeled,
        })
        .collect();
    Ok(QpboLabeling { label })
}
