//! Graph feature extraction.
//!
//! Produces the fixed 31-entry vector: four global scalars, then
//! {mean, std, std of nonzero} for four arc-capacity properties and three
//! node-capacity properties, then {mean, std} for the three degree
//! properties. Capacity statistics are normalized by the mean over all arc
//! capacities; the normalized entries are computed from exact integer sums
//! reduced to lowest terms, so scaling every capacity by a constant leaves
//! them bit-identical.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::graph::Graph;
use crate::Flow;

/// Number of entries in a feature vector.
pub const FEATURE_COUNT: usize = 31;

/// Column names, in vector order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "nodes",
    "terminal_arcs",
    "neighbor_arcs",
    "is_grid",
    "src_cap_mean",
    "src_cap_std",
    "src_cap_std_nz",
    "sink_cap_mean",
    "sink_cap_std",
    "sink_cap_std_nz",
    "term_cap_mean",
    "term_cap_std",
    "term_cap_std_nz",
    "nbr_cap_mean",
    "nbr_cap_std",
    "nbr_cap_std_nz",
    "in_cap_sum_mean",
    "in_cap_sum_std",
    "in_cap_sum_std_nz",
    "out_cap_sum_mean",
    "out_cap_sum_std",
    "out_cap_sum_std_nz",
    "total_cap_sum_mean",
    "total_cap_sum_std",
    "total_cap_sum_std_nz",
    "degree_mean",
    "degree_std",
    "out_degree_mean",
    "out_degree_std",
    "in_degree_mean",
    "in_degree_std",
];

/// The 31 named entries describing one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.0[i])
    }

    pub fn csv_header() -> String {
        FEATURE_NAMES.join(",")
    }

    pub fn csv_row(&self) -> String {
        self.0
            .iter()
            .map(|v| format!("{v}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Exact sums over one population of integer values.
#[derive(Default, Clone)]
struct Sums {
    count: u64,
    nz_count: u64,
    total: BigInt,
    squares: BigInt,
    nz_squares: BigInt,
    nz_total: BigInt,
}

impl Sums {
    fn push(&mut self, v: BigInt) {
        self.count += 1;
        if !v.is_zero() {
            self.nz_count += 1;
            self.nz_total += &v;
            self.nz_squares += &v * &v;
        }
        self.squares += &v * &v;
        self.total += v;
    }

    /// `mean / normalizer` as an exactly reduced fraction, then to f64.
    fn norm_mean(&self, norm: &Frac) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        // (total / count) / (norm.num / norm.den)
        Frac::new(&self.total * &norm.den, BigInt::from(self.count) * &norm.num).to_f64()
    }

    fn norm_std(&self, norm: &Frac) -> f64 {
        Self::std_of(&self.total, &self.squares, self.count, norm)
    }

    fn norm_std_nz(&self, norm: &Frac) -> f64 {
        Self::std_of(&self.nz_total, &self.nz_squares, self.nz_count, norm)
    }

    /// Population standard deviation over the normalizer, as
    /// `sqrt((m*sq - tot^2) / m^2 / norm^2)` with the radicand reduced
    /// exactly before the square root.
    fn std_of(total: &BigInt, squares: &BigInt, count: u64, norm: &Frac) -> f64 {
        if count == 0 {
            return 0.0;
        }
        let m = BigInt::from(count);
        let var_num = &m * squares - total * total;
        if var_num.is_negative() || var_num.is_zero() {
            return 0.0;
        }
        let num = var_num * &norm.den * &norm.den;
        let den = &m * &m * &norm.num * &norm.num;
        Frac::new(num, den).to_f64().sqrt()
    }

    // unnormalized moments, for the count-valued properties
    fn mean(&self) -> f64 {
        self.norm_mean(&Frac::one())
    }

    fn std(&self) -> f64 {
        self.norm_std(&Frac::one())
    }
}

/// Nonnegative fraction kept in lowest terms so equal rationals convert to
/// identical floats.
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn new(mut num: BigInt, mut den: BigInt) -> Self {
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_zero() {
            num /= &g;
            den /= &g;
        }
        Frac { num, den }
    }

    fn one() -> Self {
        Frac {
            num: BigInt::from(1),
            den: BigInt::from(1),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn to_f64(&self) -> f64 {
        if self.den.is_zero() {
            return 0.0;
        }
        // the reduced pair is identical for proportionally scaled inputs,
        // so the rounding below is identical too
        self.num.to_f64().unwrap_or(0.0) / self.den.to_f64().unwrap_or(1.0)
    }
}

/// Extracts the 31-entry feature vector from a graph's original capacities.
///
/// Terminal statistics run over the per-node original source and sink
/// capacity sums (the combined terminal capacity is their sum). Neighbor
/// statistics run over all directed half-arcs. Degree counts include only
/// nonzero-capacity arcs. All capacity statistics are normalized by the
/// mean over all arc capacities; when that mean is zero, every normalized
/// statistic is zero.
pub fn extract_features<F: Flow>(g: &Graph<F>, is_grid: bool) -> FeatureVector {
    let n = g.node_count();
    let big = |f: F| BigInt::from(f.to_i128().unwrap());

    let mut src = Sums::default();
    let mut sink = Sums::default();
    let mut term = Sums::default();
    let mut nbr = Sums::default();
    let mut in_sum = Sums::default();
    let mut out_sum = Sums::default();
    let mut tot_sum = Sums::default();
    let mut deg = Sums::default();
    let mut out_deg = Sums::default();
    let mut in_deg = Sums::default();

    for u in g.nodes() {
        src.push(big(g.orig_src(u)));
        sink.push(big(g.orig_snk(u)));
        term.push(big(g.orig_src(u) + g.orig_snk(u)));

        let mut cap_out = BigInt::zero();
        let mut cap_in = BigInt::zero();
        let mut d_out = 0u64;
        let mut d_in = 0u64;
        for a in g.out_arcs(u) {
            let c_out = g.orig_cap(a);
            let c_in = g.orig_cap(g.rev(a));
            cap_out += big(c_out);
            cap_in += big(c_in);
            if !c_out.is_zero() {
                d_out += 1;
            }
            if !c_in.is_zero() {
                d_in += 1;
            }
        }
        in_sum.push(cap_in.clone());
        out_sum.push(cap_out.clone());
        tot_sum.push(cap_in + cap_out);
        deg.push(BigInt::from(d_out + d_in));
        out_deg.push(BigInt::from(d_out));
        in_deg.push(BigInt::from(d_in));
    }
    for u in g.nodes() {
        for a in g.out_arcs(u) {
            nbr.push(big(g.orig_cap(a)));
        }
    }

    // mean over all arc capacities: folded terminal arcs plus all half-arcs
    let m_t = g.terminal_arc_count() as u64;
    let m_half = g.half_arc_count() as u64;
    let norm_total = term.total.clone() + nbr.total.clone();
    let norm = Frac::new(norm_total, BigInt::from(m_t + m_half));
    let guard_zero = norm.is_zero();
    let norm = if guard_zero { Frac::one() } else { norm };

    let mut v = [0.0f64; FEATURE_COUNT];
    v[0] = n as f64;
    v[1] = m_t as f64;
    v[2] = g.pair_count() as f64;
    v[3] = if is_grid { 1.0 } else { 0.0 };
    let mut k = 4;
    for s in [&src, &sink, &term, &nbr, &in_sum, &out_sum, &tot_sum] {
        v[k] = s.norm_mean(&norm);
        v[k + 1] = s.norm_std(&norm);
        v[k + 2] = s.norm_std_nz(&norm);
        k += 3;
    }
    for s in [&deg, &out_deg, &in_deg] {
        v[k] = s.mean();
        v[k + 1] = s.std();
        k += 2;
    }
    debug_assert_eq!(k, FEATURE_COUNT);
    if guard_zero {
        // no capacity anywhere: normalized statistics are defined as zero
        for x in v[4..25].iter_mut() {
            *x = 0.0;
        }
    }
    FeatureVector(v)
}
