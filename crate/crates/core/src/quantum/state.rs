use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, QuantumError, NORM_TOL};

/// Superselection charge attached to a basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// No conserved quantity; the whole space is one sector.
    Trivial,
    /// Local particle number.
    Number(u32),
    /// Local total angular momentum `twice_j / 2`.
    Spin { twice_j: u32 },
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Trivial => write!(f, "trivial"),
            Sector::Number(n) => write!(f, "n={n}"),
            Sector::Spin { twice_j } => write!(f, "2j={twice_j}"),
        }
    }
}

/// A basis vector: its sector and its position inside that sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub sector: Sector,
    pub index: u32,
}

impl Label {
    pub fn new(sector: Sector, index: u32) -> Self {
        Self { sector, index }
    }
}

/// Checks that within each sector the indices are exactly `0..d`.
fn validate_basis(labels: &[Label]) -> Result<(), QuantumError> {
    let mut seen: BTreeMap<Sector, Vec<bool>> = BTreeMap::new();
    for l in labels {
        let v = seen.entry(l.sector).or_default();
        let i = l.index as usize;
        if v.len() <= i {
            v.resize(i + 1, false);
        }
        if v[i] {
            return Err(QuantumError::BadBasis(format!("duplicate label {l:?}")));
        }
        v[i] = true;
    }
    for (s, v) in &seen {
        if v.iter().any(|x| !x) {
            return Err(QuantumError::BadBasis(format!("sector {s} has gaps")));
        }
    }
    Ok(())
}

/// Positions of the rows belonging to `sector`, ordered by in-sector index.
pub(crate) fn sector_positions(labels: &[Label], sector: Sector) -> Vec<usize> {
    let mut pos: Vec<(u32, usize)> =
        labels.iter().enumerate().filter(|(_, l)| l.sector == sector).map(|(i, l)| (l.index, i)).collect();
    pos.sort_unstable();
    pos.into_iter().map(|(_, i)| i).collect()
}

pub(crate) fn distinct_sectors(labels: &[Label]) -> Vec<Sector> {
    let mut s: Vec<Sector> = labels.iter().map(|l| l.sector).collect();
    s.sort_unstable();
    s.dedup();
    s
}

/// Pure state on proof ⊗ token, stored as a `d_proof x d_token` amplitude matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    proof: Vec<Label>,
    token: Vec<Label>,
    amps: CMatrix,
}

impl StateVector {
    /// Builds a state, rejecting it unless `|norm^2 - 1| <= 1e-12`.
    pub fn new(proof: Vec<Label>, token: Vec<Label>, amps: CMatrix) -> Result<Self, QuantumError> {
        let s = Self::unnormalized(proof, token, amps)?;
        let n2 = s.norm_squared();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized(n2));
        }
        Ok(s)
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(proof: Vec<Label>, token: Vec<Label>, amps: CMatrix) -> Result<Self, QuantumError> {
        let mut s = Self::unnormalized(proof, token, amps)?;
        let n = s.norm_squared().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(QuantumError::NotNormalized(n * n));
        }
        s.amps /= Complex64::from(n);
        Ok(s)
    }

    fn unnormalized(proof: Vec<Label>, token: Vec<Label>, amps: CMatrix) -> Result<Self, QuantumError> {
        if amps.nrows() != proof.len() || amps.ncols() != token.len() {
            return Err(QuantumError::Dimension(format!(
                "amplitudes are {}x{}, labels {}x{}",
                amps.nrows(),
                amps.ncols(),
                proof.len(),
                token.len()
            )));
        }
        validate_basis(&proof)?;
        validate_basis(&token)?;
        Ok(Self { proof, token, amps })
    }

    pub fn proof_basis(&self) -> &[Label] {
        &self.proof
    }

    pub fn token_basis(&self) -> &[Label] {
        &self.token
    }

    /// Amplitude matrix indexed `[proof, token]`.
    pub fn amplitudes(&self) -> &CMatrix {
        &self.amps
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn same_spaces(&self, other: &Self) -> bool {
        self.proof == other.proof && self.token == other.token
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64, QuantumError> {
        if !self.same_spaces(other) {
            return Err(QuantumError::SectorMismatch);
        }
        Ok(self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    /// Token reduced density operator `tr_proof |psi><psi|`.
    pub fn partial_trace_proof(&self) -> Result<DensityMatrix, QuantumError> {
        let n2 = self.norm_squared();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized(n2));
        }
        // rho[t, t'] = sum_p psi[p, t] conj(psi[p, t'])
        let mat = self.amps.transpose() * self.amps.conjugate();
        Ok(DensityMatrix { basis: self.token.clone(), mat })
    }

    pub(crate) fn with_amplitudes(&self, amps: CMatrix) -> Self {
        Self { proof: self.proof.clone(), token: self.token.clone(), amps }
    }
}

/// Dense operator on a sector-tagged basis; coherences between sectors are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: Vec<Label>,
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(basis: Vec<Label>, mat: CMatrix) -> Result<Self, QuantumError> {
        if !mat.is_square() || mat.nrows() != basis.len() {
            return Err(QuantumError::Dimension(format!(
                "matrix {}x{} for {} labels",
                mat.nrows(),
                mat.ncols(),
                basis.len()
            )));
        }
        validate_basis(&basis)?;
        Ok(Self { basis, mat })
    }

    /// `|psi><psi|` on a tagged basis.
    pub fn pure(basis: Vec<Label>, psi: &[Complex64]) -> Result<Self, QuantumError> {
        let v = nalgebra::DVector::from_column_slice(psi);
        Self::new(basis, &v * v.adjoint())
    }

    pub fn basis(&self) -> &[Label] {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn sectors(&self) -> Vec<Sector> {
        distinct_sectors(&self.basis)
    }

    pub fn block(&self, sector: Sector) -> CMatrix {
        let pos = sector_positions(&self.basis, sector);
        self.mat.select_rows(&pos).select_columns(&pos)
    }

    /// Largest modulus among elements connecting two different sectors.
    pub fn off_sector_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (i, li) in self.basis.iter().enumerate() {
            for (k, lk) in self.basis.iter().enumerate() {
                if li.sector != lk.sector {
                    m = m.max(self.mat[(i, k)].norm());
                }
            }
        }
        m
    }

    pub fn same_basis(&self, other: &Self) -> bool {
        self.basis == other.basis
    }

    /// Writes `sector,row,col,re,im` rows; `row`/`col` are in-sector indices and
    /// the sector column names the pair `row_sector|col_sector`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "sector,row,col,re,im")?;
        for (i, li) in self.basis.iter().enumerate() {
            for (k, lk) in self.basis.iter().enumerate() {
                let z = self.mat[(i, k)];
                let sector =
                    if li.sector == lk.sector { li.sector.to_string() } else { format!("{}|{}", li.sector, lk.sector) };
                writeln!(w, "{sector},{},{},{:e},{:e}", li.index, lk.index, z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Block-diagonal operator: one dense block per sector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlockMatrix {
    blocks: BTreeMap<Sector, CMatrix>,
}

impl BlockMatrix {
    pub fn new(blocks: BTreeMap<Sector, CMatrix>) -> Result<Self, QuantumError> {
        if let Some((s, _)) = blocks.iter().find(|(_, b)| !b.is_square()) {
            return Err(QuantumError::Dimension(format!("block {s} is not square")));
        }
        Ok(Self { blocks })
    }

    /// Splits a density matrix whose off-sector elements are at most `tol`.
    pub fn from_dense(rho: &DensityMatrix, tol: f64) -> Result<Self, QuantumError> {
        let off = rho.off_sector_max();
        if off > tol {
            return Err(QuantumError::BadBasis(format!("off-sector coherence {off:e} exceeds {tol:e}")));
        }
        Ok(Self::project(rho))
    }

    /// Keeps the diagonal blocks of `rho` and drops everything else.
    pub(crate) fn project(rho: &DensityMatrix) -> Self {
        let blocks = rho.sectors().into_iter().map(|s| (s, rho.block(s))).collect();
        Self { blocks }
    }

    pub fn blocks(&self) -> &BTreeMap<Sector, CMatrix> {
        &self.blocks
    }

    pub fn block(&self, sector: Sector) -> Option<&CMatrix> {
        self.blocks.get(&sector)
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.values().map(|b| b.trace()).sum()
    }

    /// Per-sector weights `p_s = tr(block_s)`.
    pub fn probabilities(&self) -> BTreeMap<Sector, f64> {
        self.blocks.iter().map(|(s, b)| (*s, b.trace().re)).collect()
    }

    /// Per-sector unit-trace states `block_s / p_s`; sectors with zero weight are omitted.
    pub fn normalized_blocks(&self) -> BTreeMap<Sector, CMatrix> {
        self.blocks
            .iter()
            .filter_map(|(s, b)| {
                let p = b.trace().re;
                (p > 0.0).then(|| (*s, b / Complex64::from(p)))
            })
            .collect()
    }

    pub fn same_structure(&self, other: &Self) -> bool {
        self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(other.blocks.iter()).all(|((s, a), (t, b))| s == t && a.shape() == b.shape())
    }

    /// Reassembles a dense operator; labels are grouped by sector in ascending order.
    pub fn to_dense(&self) -> DensityMatrix {
        let dim: usize = self.blocks.values().map(|b| b.nrows()).sum();
        let mut mat = CMatrix::zeros(dim, dim);
        let mut basis = Vec::with_capacity(dim);
        let mut off = 0;
        for (s, b) in &self.blocks {
            let d = b.nrows();
            mat.view_mut((off, off), (d, d)).copy_from(b);
            basis.extend((0..d as u32).map(|i| Label::new(*s, i)));
            off += d;
        }
        DensityMatrix { basis, mat }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "sector,row,col,re,im")?;
        for (s, b) in &self.blocks {
            for i in 0..b.nrows() {
                for k in 0..b.ncols() {
                    let z = b[(i, k)];
                    writeln!(w, "{s},{i},{k},{:e},{:e}", z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}
