//! Classical and quantum correlation measures.
//!
//! Every optimised quantity minimises over rank-1 projective product
//! measurements, so discord-type values are upper bounds on their POVM
//! counterparts. Bases are parameterised per site by [`SiteBasis::from_angles`].

mod discord;
mod entanglement;
mod genuine;
mod global;
mod minimize;
mod report;
mod witness;

pub use crate::qmat::{MeasurementBasis, SiteBasis};
pub use discord::{
    classical_correlations, measured_conditional_entropy, mutual_information, quantum_discord,
    quantum_discord_with, two_way_discord, DiscordResult, CONDITIONAL_PROBABILITY_FLOOR,
};
pub use entanglement::{concurrence, eof_two_qubits, partial_transpose, ppt_separable, PPT_TOLERANCE};
pub use genuine::{genuine_correlations, genuine_correlations_with, genuine_total, GenuineCorrelations};
pub use global::{analytic_gd_max, global_discord, symmetric_discord, GlobalDiscord};
pub use minimize::{minimize, MinimizerOptions, Minimum};
pub use report::{correlation_report, CorrelationReport, ReportOptions};
pub use witness::{discord_witness, Witness, WITNESS_THRESHOLD};

use nalgebra::DMatrix;

use crate::qmat::C64;
use crate::{Error, Result};

/// Values in `[-NEGATIVE_ROUND_OFF, 0)` are reported as zero.
pub const NEGATIVE_ROUND_OFF: f64 = 1e-9;

pub(crate) fn clamp_bits(x: f64) -> f64 {
    if (-NEGATIVE_ROUND_OFF..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// One of the two sides of a [`Bipartition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// How measurement bases are shared between the measured sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ansatz {
    /// An independent basis for every site.
    #[default]
    PerSite,
    /// One basis applied on every measured site; suited to permutation-symmetric states.
    Shared,
}

/// Split of the sites `0..n` into two nonempty disjoint sets, each kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    /// `side_a` as given, `side_b` its complement in `0..n_sites`.
    pub fn new(side_a: Vec<usize>, n_sites: usize) -> Result<Self> {
        let mut a = side_a;
        a.sort_unstable();
        let before = a.len();
        a.dedup();
        if a.len() != before {
            return Err(Error::Shape("repeated site in bipartition".into()));
        }
        if a.iter().any(|&s| s >= n_sites) {
            return Err(Error::Shape(format!("site out of range for {n_sites} sites: {a:?}")));
        }
        if a.is_empty() || a.len() == n_sites {
            return Err(Error::Shape("both sides of a bipartition must be nonempty".into()));
        }
        let b = (0..n_sites).filter(|s| a.binary_search(s).is_err()).collect();
        Ok(Self { side_a: a, side_b: b })
    }

    /// All sites but the last on side A, the last site on side B.
    pub fn rest_last(n_sites: usize) -> Result<Self> {
        Self::new((0..n_sites.saturating_sub(1)).collect(), n_sites)
    }

    /// Every bipartition once, written with the smaller side as side A
    /// (the side holding site 0 for equal halves), in lexicographic order of side A.
    pub fn all(n_sites: usize) -> Vec<Self> {
        if n_sites < 2 {
            return Vec::new();
        }
        let mut cuts: Vec<Self> = (1..(1usize << n_sites) - 1)
            .filter_map(|mask| {
                let a: Vec<usize> = (0..n_sites).filter(|s| mask >> s & 1 == 1).collect();
                let keep = 2 * a.len() < n_sites || (2 * a.len() == n_sites && a[0] == 0);
                keep.then(|| Self::new(a, n_sites).expect("mask is a proper subset"))
            })
            .collect();
        cuts.sort();
        cuts
    }

    /// One representative cut `{0..k} | rest` per size `k <= n/2`.
    pub fn by_size(n_sites: usize) -> Vec<Self> {
        (1..=n_sites / 2)
            .map(|k| Self::new((0..k).collect(), n_sites).expect("proper subset"))
            .collect()
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn side(&self, side: Side) -> &[usize] {
        match side {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    /// The side with fewer sites; side A on ties.
    pub fn smaller_side(&self) -> Side {
        if self.side_b.len() < self.side_a.len() {
            Side::B
        } else {
            Side::A
        }
    }

    pub(crate) fn check(&self, n_sites: usize) -> Result<()> {
        if self.n_sites() != n_sites {
            return Err(Error::Shape(format!(
                "bipartition covers {} sites, state has {n_sites}",
                self.n_sites()
            )));
        }
        Ok(())
    }
}

/// Angle parameterisation of product bases over a list of sites.
#[derive(Debug, Clone)]
pub(crate) struct BasisFamily {
    dims: Vec<usize>,
    ansatz: Ansatz,
    counts: Vec<usize>,
}

impl BasisFamily {
    pub fn new(dims: &[usize], ansatz: Ansatz) -> Result<Self> {
        let counts = dims.iter().map(|&d| SiteBasis::param_count(d)).collect::<Result<Vec<_>>>()?;
        if ansatz == Ansatz::Shared && dims.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Domain(format!(
                "a shared basis needs equal site dimensions, got {dims:?}"
            )));
        }
        Ok(Self {
            dims: dims.to_vec(),
            ansatz,
            counts,
        })
    }

    pub fn ranges(&self) -> Vec<f64> {
        match self.ansatz {
            Ansatz::Shared => SiteBasis::param_ranges(self.dims[0]).expect("checked in new"),
            Ansatz::PerSite => self
                .dims
                .iter()
                .flat_map(|&d| SiteBasis::param_ranges(d).expect("checked in new"))
                .collect(),
        }
    }

    pub fn sites(&self, params: &[f64]) -> Vec<SiteBasis> {
        match self.ansatz {
            Ansatz::Shared => {
                let b = SiteBasis::from_angles(self.dims[0], params).expect("parameter count matches");
                vec![b; self.dims.len()]
            }
            Ansatz::PerSite => {
                let mut offset = 0;
                self.dims
                    .iter()
                    .zip(&self.counts)
                    .map(|(&d, &c)| {
                        let b = SiteBasis::from_angles(d, &params[offset..offset + c])
                            .expect("parameter count matches");
                        offset += c;
                        b
                    })
                    .collect()
            }
        }
    }

    pub fn basis(&self, params: &[f64]) -> MeasurementBasis {
        MeasurementBasis::new(self.sites(params))
    }

    pub fn product_unitary(&self, params: &[f64]) -> DMatrix<C64> {
        self.basis(params).product_unitary()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::new(vec![], 3).is_err());
        assert!(Bipartition::new(vec![0, 1, 2], 3).is_err());
        assert!(Bipartition::new(vec![3], 3).is_err());
        assert!(Bipartition::new(vec![1, 1], 3).is_err());
        let c = Bipartition::new(vec![2, 0], 4).unwrap();
        assert_eq!(c.side_a(), &[0, 2]);
        assert_eq!(c.side_b(), &[1, 3]);
        assert_eq!(Bipartition::rest_last(3).unwrap().side_b(), &[2]);
    }

    #[test]
    fn cut_enumeration() {
        let three: Vec<Vec<usize>> = Bipartition::all(3).iter().map(|c| c.side_a().to_vec()).collect();
        assert_eq!(three, vec![vec![0], vec![1], vec![2]]);
        let four = Bipartition::all(4);
        assert_eq!(four.len(), 7);
        assert!(four.iter().all(|c| c.side_a().len() <= c.side_b().len()));
        assert_eq!(four[0].side_a(), &[0]);
        assert_eq!(four[1].side_a(), &[0, 1]);
        for n in 2..=8 {
            assert_eq!(Bipartition::all(n).len(), (1 << (n - 1)) - 1);
        }
        assert_eq!(Bipartition::by_size(5).len(), 2);
    }

    #[test]
    fn basis_family_layout() {
        let f = BasisFamily::new(&[2, 3], Ansatz::PerSite).unwrap();
        assert_eq!(f.ranges().len(), 10);
        let u = f.product_unitary(&[0.0; 10]);
        assert_eq!(u, DMatrix::identity(6, 6));
        assert!(BasisFamily::new(&[2, 3], Ansatz::Shared).is_err());
        assert!(BasisFamily::new(&[4], Ansatz::PerSite).is_err());
        assert_eq!(BasisFamily::new(&[2, 2, 2], Ansatz::Shared).unwrap().ranges().len(), 2);
    }
}
