//! Open-boundary matrix-product state with two-site gate updates.
//!
//! Site tensors are stored as one χ_l×χ_r matrix per physical index. The
//! state is kept in mixed-canonical form around a movable center; gate
//! application on bond (k, k+1) expects the center on k or k+1.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Sparse real operator on one site: (row, column, value).
pub(crate) type SparseOp = Vec<(usize, usize, f64)>;

pub(crate) fn sparse(op: &DMatrix<f64>) -> SparseOp {
    let mut v = Vec::new();
    for j in 0..op.ncols() {
        for i in 0..op.nrows() {
            if op[(i, j)] != 0.0 {
                v.push((i, j, op[(i, j)]));
            }
        }
    }
    v
}

/// exp(−i·h·τ) for a real symmetric h.
pub(crate) fn gate(h: &DMatrix<f64>, tau: f64) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(h.clone());
    let n = h.nrows();
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let mut scaled = v.clone();
    for (k, &e) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -e * tau);
        for i in 0..n {
            scaled[(i, k)] *= phase;
        }
    }
    scaled * v.transpose()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Truncation {
    pub chi_max: usize,
    pub cutoff: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct BondUpdate {
    /// Relative Schmidt weight dropped.
    pub discarded: f64,
    /// Squared norm of the two-site block before renormalization.
    pub norm_sq: f64,
    pub kept: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Mps {
    sites: Vec<Vec<DMatrix<Complex64>>>,
}

impl Mps {
    /// Product state from normalized local vectors.
    pub fn product(states: &[Vec<Complex64>]) -> Self {
        let sites = states
            .iter()
            .map(|v| v.iter().map(|&c| DMatrix::from_element(1, 1, c)).collect())
            .collect();
        Mps { sites }
    }

    pub fn phys(&self, k: usize) -> usize {
        self.sites[k].len()
    }

    /// Dimension of the bond between sites k and k+1.
    #[cfg(test)]
    pub fn bond_dim(&self, k: usize) -> usize {
        self.sites[k][0].ncols()
    }

    /// Squared norm, assuming the orthogonality center is site 0.
    pub fn norm_sq_at_origin(&self) -> f64 {
        self.sites[0].iter().map(|m| m.norm_squared()).sum()
    }

    /// True when site k is a product-state vacuum factor: unit bonds and
    /// negligible weight outside the Fock ground state.
    pub fn is_vacuum(&self, k: usize, weight_floor: f64) -> bool {
        let s = &self.sites[k];
        if s[0].nrows() != 1 || s[0].ncols() != 1 {
            return false;
        }
        let excited: f64 = s[1..].iter().map(|m| m[(0, 0)].norm_sqr()).sum();
        let total = excited + s[0][(0, 0)].norm_sqr();
        excited <= weight_floor * total
    }

    /// Applies a two-site gate on bond (k, k+1) and splits by SVD. The
    /// center ends on k+1 when `move_right`, otherwise on k.
    pub fn apply_gate(
        &mut self,
        k: usize,
        gate: &DMatrix<Complex64>,
        trunc: Truncation,
        move_right: bool,
    ) -> BondUpdate {
        let dl = self.phys(k);
        let dr = self.phys(k + 1);
        let chil = self.sites[k][0].nrows();
        let chir = self.sites[k + 1][0].ncols();

        let mut theta = DMatrix::<Complex64>::zeros(dl * dr, chil * chir);
        for s1 in 0..dl {
            for s2 in 0..dr {
                let blk = &self.sites[k][s1] * &self.sites[k + 1][s2];
                let mut row = theta.row_mut(s1 * dr + s2);
                for (idx, v) in blk.iter().enumerate() {
                    row[idx] = *v;
                }
            }
        }
        let theta = gate * theta;

        let m = faer::Mat::<Complex64>::from_fn(chil * dl, dr * chir, |r, c| {
            let (s1, a) = (r / chil, r % chil);
            let (s2, c) = (c / chir, c % chir);
            theta[(s1 * dr + s2, a + chil * c)]
        });
        // nalgebra's complex SVD is unreliable on badly scaled blocks;
        // faer's is accurate there. Singular values come sorted.
        let svd = m.thin_svd().expect("SVD of a finite matrix converges");
        let (u, v, sv) = (svd.U(), svd.V(), svd.S().column_vector());
        let weights: Vec<f64> = (0..sv.nrows()).map(|i| sv[i].re.powi(2)).collect();
        let total: f64 = weights.iter().sum();

        let mut kept = weights.len().min(trunc.chi_max).max(1);
        let mut tail: f64 = weights[kept..].iter().sum();
        while kept > 1 && tail + weights[kept - 1] <= trunc.cutoff * total {
            kept -= 1;
            tail += weights[kept];
        }
        let kept_weight = total - tail;
        let scale = if kept_weight > 0.0 { kept_weight.sqrt().recip() } else { 1.0 };

        let mut left: Vec<DMatrix<Complex64>> = vec![DMatrix::zeros(chil, kept); dl];
        let mut right: Vec<DMatrix<Complex64>> = vec![DMatrix::zeros(kept, chir); dr];
        for j in 0..kept {
            let w = sv[j].re * scale;
            let (ls, rs) = if move_right { (1.0, w) } else { (w, 1.0) };
            for s1 in 0..dl {
                for a in 0..chil {
                    left[s1][(a, j)] = u[(s1 * chil + a, j)] * ls;
                }
            }
            for s2 in 0..dr {
                for c in 0..chir {
                    right[s2][(j, c)] = v[(s2 * chir + c, j)].conj() * rs;
                }
            }
        }
        self.sites[k] = left;
        self.sites[k + 1] = right;

        BondUpdate {
            discarded: if total > 0.0 { tail / total } else { 0.0 },
            norm_sq: total,
            kept,
        }
    }

    /// Left environments E_0 = 1, E_{k+1} = Σ_s A_k[s]† E_k A_k[s], for
    /// sites 0..upto. Valid for local expectations when every site right
    /// of the one measured is right-canonical.
    pub fn left_environments(&self, upto: usize) -> Vec<DMatrix<Complex64>> {
        let mut envs = Vec::with_capacity(upto + 1);
        envs.push(DMatrix::from_element(1, 1, ONE));
        for k in 0..upto {
            let e = &envs[k];
            let chi = self.sites[k][0].ncols();
            let mut next = DMatrix::zeros(chi, chi);
            for a in &self.sites[k] {
                next += a.adjoint() * (e * a);
            }
            envs.push(next);
        }
        envs
    }

    /// ⟨O⟩ for a single-site operator at site k.
    #[cfg(test)]
    pub fn local_expect(&self, env: &DMatrix<Complex64>, k: usize, op: &SparseOp) -> Complex64 {
        let a = &self.sites[k];
        let mut acc = ZERO;
        for &(s, sp, v) in op {
            let ea = env * &a[sp];
            acc += a[s].dotc(&ea) * v;
        }
        acc
    }

    /// ⟨O1 ⊗ O2⟩ on sites (k, k+1).
    pub fn bond_expect(
        &self,
        env: &DMatrix<Complex64>,
        k: usize,
        o1: &SparseOp,
        o2: &SparseOp,
    ) -> Complex64 {
        let a = &self.sites[k];
        let b = &self.sites[k + 1];
        let chi = a[0].ncols();
        let mut x = DMatrix::<Complex64>::zeros(chi, chi);
        for &(s, sp, v) in o1 {
            x += (a[s].adjoint() * (env * &a[sp])) * Complex64::new(v, 0.0);
        }
        let mut acc = ZERO;
        for &(t, tp, v) in o2 {
            let xb = &x * &b[tp];
            acc += b[t].dotc(&xb) * v;
        }
        acc
    }

    /// Reduced density matrix of site 0 with the center on site 0.
    pub fn reduced_origin(&self) -> DMatrix<Complex64> {
        let a = &self.sites[0];
        let d = a.len();
        DMatrix::from_fn(d, d, |i, j| a[j].dotc(&a[i]))
    }

    /// Populations of the Fock states on site k (diagonal of its reduced
    /// state), given its left environment.
    pub fn local_populations(&self, env: &DMatrix<Complex64>, k: usize) -> Vec<f64> {
        self.sites[k]
            .iter()
            .map(|a| a.dotc(&(env * a)).re)
            .collect()
    }
}
