use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AlgebraSpan, Config, Mat, MatalgError, C64};

/// Sorted multiset of matrix-block sizes `{n_1, …, n_k}` with `A ≅ ⊕ M_{n_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature(pub Vec<usize>);

impl Signature {
    pub fn new(mut blocks: Vec<usize>) -> Self {
        blocks.sort_unstable();
        Signature(blocks)
    }

    /// `Σ n_i²`.
    pub fn algebra_dim(&self) -> usize {
        self.0.iter().map(|n| n * n).sum()
    }

    pub fn blocks(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

const ATTEMPTS: u64 = 6;

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = i;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Block sizes of a `*`-closed matrix algebra.
///
/// A random self-adjoint `h ∈ A` has, generically, simple spectrum inside
/// each simple summand, so its spectral projections are minimal
/// projections of `A`. Two of them lie in the same summand exactly when a
/// random `r ∈ A` links them (`E_i r E_j ≠ 0`); the sums over linked
/// classes are the minimal central projections, and the class sizes are the
/// block sizes. A result is accepted only if `Σ n_i² = dim A`, the linked
/// projections have equal rank, and the central projections commute with
/// the algebra; otherwise fresh randomness is drawn.
pub fn wedderburn_signature(a: &AlgebraSpan, cfg: &Config) -> Result<Signature, MatalgError> {
    if a.dim() == 0 {
        return Ok(Signature(Vec::new()));
    }
    let mut last_reason = String::new();
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(attempt).wrapping_mul(0x9e37_79b9));
        match attempt_signature(a, &mut rng) {
            Ok(sig) => return Ok(sig),
            Err(reason) => last_reason = reason,
        }
    }
    Err(MatalgError::NotSemisimple { reason: last_reason })
}

fn attempt_signature(a: &AlgebraSpan, rng: &mut ChaCha8Rng) -> Result<Signature, String> {
    let n = a.ambient();
    let x = a.random_element(rng);
    let h = (&x + &x.adjoint()).to_dense();
    let r = a.random_element(rng).to_dense();

    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let cluster_tol = 1e-7 * scale;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut prev: Option<f64> = None;
    for &i in &order {
        let lam = eig.eigenvalues[i];
        match prev {
            Some(p) if lam - p <= cluster_tol => clusters.last_mut().unwrap().push(i),
            _ => clusters.push(vec![i]),
        }
        prev = Some(lam);
    }

    let v = &eig.eigenvectors;
    // r and r* written in the eigenbasis of h.
    let w = v.adjoint() * &r * v;
    let block_norm = |ci: &[usize], cj: &[usize], m: &DMatrix<C64>| -> f64 {
        let mut s = 0.0;
        for &i in ci {
            for &j in cj {
                s += m[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    };

    // Drop the common kernel of A (A need not contain the identity of M_n).
    let link_tol = 1e-6 * scale.max(1.0);
    let wa = w.adjoint();
    let all: Vec<usize> = (0..n).collect();
    let live: Vec<usize> = (0..clusters.len())
        .filter(|&c| block_norm(&all, &clusters[c], &w) > link_tol || block_norm(&all, &clusters[c], &wa) > link_tol)
        .collect();

    let mut uf = UnionFind((0..clusters.len()).collect());
    for (ai, &ci) in live.iter().enumerate() {
        for &cj in &live[ai + 1..] {
            if block_norm(&clusters[ci], &clusters[cj], &w) > link_tol
                || block_norm(&clusters[cj], &clusters[ci], &w) > link_tol
            {
                uf.union(ci, cj);
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &c in &live {
        comps.entry(uf.find(c)).or_default().push(c);
    }

    let mut blocks = Vec::new();
    let mut central = Vec::new();
    for members in comps.values() {
        let rank = clusters[members[0]].len();
        if members.iter().any(|&c| clusters[c].len() != rank) {
            return Err("linked minimal projections have unequal ranks".into());
        }
        blocks.push(members.len());
        let cols: Vec<usize> = members.iter().flat_map(|&c| clusters[c].iter().copied()).collect();
        let sub = v.select_columns(cols.iter());
        central.push(Mat::from_dense(&(&sub * sub.adjoint())));
    }
    let sig = Signature::new(blocks);
    if sig.algebra_dim() != a.dim() {
        return Err(format!(
            "block sizes {sig} give dimension {} but the algebra has dimension {}",
            sig.algebra_dim(),
            a.dim()
        ));
    }
    let probe = a.random_element(rng);
    for z in &central {
        let comm = &z.matmul(&probe) - &probe.matmul(z);
        if comm.max_abs() > 1e-6 * probe.max_abs().max(1.0) {
            return Err("a block projection fails to be central".into());
        }
    }
    Ok(sig)
}
