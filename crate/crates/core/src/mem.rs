//! Reference-model memory footprints.
//!
//! Linear formulas in the node count `n`, terminal-arc count `m_T`, and
//! undirected neighbor-arc count `m_N`, for the well-known solver
//! implementations assuming 32-bit capacities and 32-bit indices. These
//! describe the reference implementations, not this crate's own structures
//! (see [`crate::graph::Graph::memory_bytes`] for those).

use std::fmt;
use std::str::FromStr;

/// Implementation model whose footprint formula is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemModel {
    HiPr,
    Hpf,
    Eibfs,
    EibfsI,
    EibfsINr,
    Bk,
    Mbk,
    MbkR,
    PPpr,
    LiuSun,
    StrandmarkKahl,
    PArd,
}

impl MemModel {
    pub const ALL: [MemModel; 12] = [
        MemModel::HiPr,
        MemModel::Hpf,
        MemModel::Eibfs,
        MemModel::EibfsI,
        MemModel::EibfsINr,
        MemModel::Bk,
        MemModel::Mbk,
        MemModel::MbkR,
        MemModel::PPpr,
        MemModel::LiuSun,
        MemModel::StrandmarkKahl,
        MemModel::PArd,
    ];

    /// Per-n, per-m_T, per-m_N byte coefficients.
    fn coefficients(self) -> (u64, u64, u64) {
        match self {
            MemModel::HiPr => (40, 40, 40),
            MemModel::Hpf => (104, 48, 48),
            MemModel::Eibfs => (72, 0, 72),
            MemModel::EibfsI => (29, 0, 50),
            MemModel::EibfsINr => (49, 0, 24),
            MemModel::Bk => (48, 0, 64),
            MemModel::Mbk => (23, 0, 24),
            MemModel::MbkR => (23, 0, 48),
            MemModel::PPpr => (48, 68, 68),
            MemModel::LiuSun => (25, 0, 24),
            MemModel::StrandmarkKahl => (29, 0, 24),
            MemModel::PArd => (40, 0, 32),
        }
    }
}

impl fmt::Display for MemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MemModel::HiPr => "HI-PR",
            MemModel::Hpf => "HPF",
            MemModel::Eibfs => "EIBFS",
            MemModel::EibfsI => "EIBFS-I",
            MemModel::EibfsINr => "EIBFS-I-NR",
            MemModel::Bk => "BK",
            MemModel::Mbk => "MBK",
            MemModel::MbkR => "MBK-R",
            MemModel::PPpr => "P-PPR",
            MemModel::LiuSun => "Liu-Sun",
            MemModel::StrandmarkKahl => "Strandmark-Kahl",
            MemModel::PArd => "P-ARD",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown implementation model `{0}`")]
pub struct UnknownModel(String);

impl FromStr for MemModel {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "HI-PR" | "HIPR" => Ok(MemModel::HiPr),
            "HPF" => Ok(MemModel::Hpf),
            "EIBFS" => Ok(MemModel::Eibfs),
            "EIBFS-I" => Ok(MemModel::EibfsI),
            "EIBFS-I-NR" => Ok(MemModel::EibfsINr),
            "BK" => Ok(MemModel::Bk),
            "MBK" => Ok(MemModel::Mbk),
            "MBK-R" => Ok(MemModel::MbkR),
            "P-PPR" | "PPPR" => Ok(MemModel::PPpr),
            "LIU-SUN" | "LIUSUN" => Ok(MemModel::LiuSun),
            "STRANDMARK-KAHL" | "SK" => Ok(MemModel::StrandmarkKahl),
            "P-ARD" | "PARD" => Ok(MemModel::PArd),
            _ => Err(UnknownModel(s.to_string())),
        }
    }
}

/// Bytes required by `model` for a graph with `n` nodes, `m_t` terminal arcs,
/// and `m_n` undirected neighbor arcs (directed storage is already folded
/// into the per-arc coefficients).
pub fn mem_footprint(model: MemModel, n: u64, m_t: u64, m_n: u64) -> u64 {
    let (cn, ct, cm) = model.coefficients();
    cn * n + ct * m_t + cm * m_n
}
