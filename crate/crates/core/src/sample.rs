//! Seedable random generators for marginals, tables, and equivalent pairs.
//!
//! Marginals are sampled on a dyadic grid (multiples of 2⁻²⁰) so that the
//! float masses are exact and sum to exactly 1; the exact-arithmetic layer
//! then sees precisely the same polytope the float layer iterates on.
//! Tables inside a polytope are Dirichlet-weighted convex combinations of
//! its exact vertices. No global random state: every function takes the
//! generator.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng;

use crate::dist::Distribution;
use crate::error::Error;
use crate::polytope::{Polytope, SizeCaps};
use crate::scalar::{ln, pow2_neg};
use crate::table::JointTable;

/// Mass grid: marginal masses are positive multiples of `1/SCALE`.
const SCALE: u64 = 1 << 20;

/// Uniform Dirichlet weights over `len` atoms (all concentration 1),
/// via normalized exponentials.
pub fn dirichlet_weights<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    assert!(len >= 1, "dirichlet over an empty atom set");
    let mut weights: Vec<f64> = (0..len)
        .map(|_| {
            let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
            -ln(u)
        })
        .collect();
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return alloc::vec![1.0 / len as f64; len];
    }
    for w in &mut weights {
        *w /= sum;
    }
    weights
}

/// A random full-support marginal of the given length: a uniform
/// composition of `SCALE` into `len` positive parts, divided by `SCALE`.
/// Masses are at least `1/SCALE` and sum to 1 exactly in `f64`.
pub fn random_marginal<R: Rng>(len: usize, rng: &mut R) -> Distribution<f64> {
    assert!(len >= 1 && (len as u64) <= SCALE);
    let mut cuts: BTreeSet<u64> = BTreeSet::new();
    while cuts.len() < len - 1 {
        cuts.insert(rng.gen_range(1..SCALE));
    }
    let mut masses = Vec::with_capacity(len);
    let mut prev = 0u64;
    for &c in &cuts {
        masses.push((c - prev) as f64 / SCALE as f64);
        prev = c;
    }
    masses.push((SCALE - prev) as f64 / SCALE as f64);
    Distribution::new(masses).expect("dyadic composition is a distribution")
}

/// A random point of `C(P,Q)`: a Dirichlet-weighted convex combination of
/// all its vertices, blended half-and-half with their barycenter. Every
/// vertex weight is at least `1/(2k)`, so the sample sits in the relative
/// interior with its support equal to the polytope's full support and its
/// positive entries bounded away from zero.
pub fn random_interior_table<R: Rng>(
    polytope: &Polytope<f64>,
    caps: &SizeCaps,
    rng: &mut R,
) -> Result<JointTable<f64>, Error> {
    let vertices = polytope.to_exact().enumerate_vertices(caps)?;
    let k = vertices.len() as f64;
    let weights = dirichlet_weights(vertices.len(), rng);
    let (n, m) = (polytope.rows(), polytope.cols());
    let mut entries = alloc::vec![0.0f64; n * m];
    for (w, v) in weights.iter().zip(vertices.iter()) {
        let w = 0.5 * w + 0.5 / k;
        for (e, x) in entries.iter_mut().zip(v.table().to_f64().entries()) {
            *e += w * x;
        }
    }
    Ok(JointTable::from_raw(n, m, entries))
}

/// A geometrically equivalent pair built by perturbation: draw `(P, Q)`,
/// move a dyadic `ε` between two column masses, and verify exact
/// equivalence, shrinking `ε` until the vertex supports match. How small
/// `ε` must be is not known a priori; equivalence is checked, not assumed.
pub fn random_equivalent_pair<R: Rng>(
    rows: usize,
    cols: usize,
    caps: &SizeCaps,
    rng: &mut R,
) -> Result<(Polytope<f64>, Polytope<f64>), Error> {
    for _ in 0..16 {
        let p = random_marginal(rows, rng);
        let q = random_marginal(cols, rng);
        let c1 = Polytope::new(p.clone(), q.clone())?;

        let a = rng.gen_range(0..cols);
        let b = (a + 1 + rng.gen_range(0..cols - 1)) % cols;
        for exp in [24, 28, 32, 36, 40] {
            let eps = pow2_neg(exp);
            if *q.mass(b) <= eps {
                continue;
            }
            let mut masses = q.masses().to_vec();
            masses[a] += eps;
            masses[b] -= eps;
            let c2 = Polytope::new(p.clone(), Distribution::new(masses)?)?;
            let check = c1
                .to_exact()
                .geometrically_equivalent(&c2.to_exact(), caps)?;
            if check.equivalent {
                return Ok((c1, c2));
            }
        }
    }
    Err(Error::PerturbationFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dirichlet_weights_are_a_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = dirichlet_weights(5, &mut rng);
        assert_eq!(w.len(), 5);
        assert!(w.iter().all(|&x| x >= 0.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_marginal_is_exactly_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for len in [1, 2, 5, 9] {
            let d = random_marginal(len, &mut rng);
            assert_eq!(d.masses().iter().sum::<f64>(), 1.0);
            assert!(d.masses().iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn interior_table_has_valid_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = Polytope::new(
            random_marginal(3, &mut rng),
            random_marginal(3, &mut rng),
        )
        .unwrap();
        let t = random_interior_table(&c, &SizeCaps::default(), &mut rng).unwrap();
        let (p, q) = t.marginals();
        for (got, want) in p.masses().iter().zip(c.row_marginal().masses()) {
            assert!((got - want).abs() < 1e-12);
        }
        for (got, want) in q.masses().iter().zip(c.col_marginal().masses()) {
            assert!((got - want).abs() < 1e-12);
        }
        // interior: full support for full-support marginals
        assert_eq!(t.support(0.0).len(), 9);
    }

    #[test]
    fn equivalent_pair_is_equivalent_and_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let caps = SizeCaps::default();
        let (c1, c2) = random_equivalent_pair(3, 2, &caps, &mut rng).unwrap();
        assert_ne!(c1.col_marginal(), c2.col_marginal());
        assert!(c1
            .to_exact()
            .geometrically_equivalent(&c2.to_exact(), &caps)
            .unwrap()
            .equivalent);
    }
}
