//! Min-cut/max-flow toolkit for computer-vision style graphs.
//!
//! The crate provides a compact index-addressed graph with folded terminal
//! capacities, three serial solver families (augmenting paths, preflow
//! push-relabel, pseudoflow), three block-based parallel solvers, builders
//! that turn binary pairwise energies into s-t graphs, a benchmark harness,
//! and a decision-tree based algorithm selector.
//!
//! All core math is generic over the capacity scalar via [`Flow`]; the
//! concrete alias [`Cap`] (`i64`) is what the file formats and the CLI use.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};

use num_traits::{PrimInt, Signed};

pub mod bench;
pub mod bk;
pub mod energy;
pub mod graph;
pub mod hpf;
pub mod io;
pub mod mem;
pub mod parallel;
pub mod ppr;
pub mod selector;

pub use bk::{bk_solve, BkSolver};
pub use graph::{ArcId, CutResult, Graph, GraphBuilder, NodeId, Side};

/// Signed integer scalar used for capacities and flows.
///
/// Implemented for the primitive signed integers; `f32`/`f64` are
/// deliberately excluded (non-termination risk with inexact arithmetic).
pub trait Flow:
    PrimInt + Signed + AddAssign + SubAssign + Sum<Self> + Send + Sync + Debug + 'static
{
    /// Capacity treated as infinite: one quarter of the type's range
    /// (`2^62` for `i64`). Builders reject anything larger and also bound
    /// the total capacity of a problem by this constant, so that no sum
    /// computed by a solver or by `cut_capacity` can overflow.
    fn huge() -> Self {
        Self::one() << (Self::zero().count_zeros() as usize - 2)
    }
}

impl<T> Flow for T where
    T: PrimInt + Signed + AddAssign + SubAssign + Sum<Self> + Send + Sync + Debug + 'static
{
}

/// Default capacity scalar: 64-bit signed flow units.
pub type Cap = i64;
