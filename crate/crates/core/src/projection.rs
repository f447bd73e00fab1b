//! The I-projection map between transportation polytopes.
//!
//! `project` computes `arginf { D(T‖S) : T ∈ C(P,Q) }` by iterative
//! proportional fitting. `C(P,Q)` is the intersection of two linear
//! families (fixed row sums, fixed column sums), and alternating the
//! single-family projections — row rescale, column rescale — converges to
//! the joint I-projection of the starting table.
//!
//! Existence is gated exactly before any floating iteration: the projection
//! is defined iff some member of the target fits inside the source support,
//! decided by rational max-flow. The same flow computation yields the exact
//! support of the limit, and IPF runs restricted to that support; entries
//! off it are identically zero for all iterations, so the support inclusion
//! `supp(result) ⊆ supp(source)` holds structurally and the iteration
//! converges geometrically even when the limit lies on the boundary of the
//! target.
//!
//! The rest of the module certifies the identities the projection obeys:
//! the Pythagorean identity over sampled tables, the round-trip inverse
//! between geometrically equivalent polytopes, step-shrinking continuity
//! profiles, and the Fréchet–Hoeffding vertex mapping.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::Error;
use crate::polytope::{Polytope, SizeCaps, Vertex};
use crate::sample::dirichlet_weights;
use crate::scalar::{pow2_neg, Rational};
use crate::table::JointTable;

/// Convergence controls for iterative proportional fitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IpfOptions {
    /// Both marginal L1 residuals must fall to this after a full sweep.
    pub tol: f64,
    /// Full row+column sweeps before giving up.
    pub max_iter: u64,
}

impl Default for IpfOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 1_000_000,
        }
    }
}

/// Result of an I-projection, plus convergence and certification metadata.
///
/// `result` is `None` exactly when the projection is undefined
/// (`feasibility == false`) — a theorem-level outcome, not an error.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionReport {
    pub result: Option<JointTable<f64>>,
    pub iterations: u64,
    /// Max of the two marginal L1 residuals of `result`; `+∞` if undefined.
    pub marginal_residual: f64,
    /// `D(result‖source)`; `+∞` if undefined (the divergence is infinite on
    /// the whole target).
    pub divergence_value: f64,
    pub feasibility: bool,
    /// Filled by [`certify_pythagorean`]; `None` until certified.
    pub pythagorean_residual: Option<f64>,
}

impl ProjectionReport {
    fn undefined() -> Self {
        Self {
            result: None,
            iterations: 0,
            marginal_residual: f64::INFINITY,
            divergence_value: f64::INFINITY,
            feasibility: false,
            pythagorean_residual: None,
        }
    }
}

/// I-projection of `source` onto `target` via iterative proportional
/// fitting, with the existence check and limit support decided exactly
/// first.
pub fn project(
    source: &JointTable<f64>,
    target: &Polytope<f64>,
    opts: &IpfOptions,
) -> Result<ProjectionReport, Error> {
    project_impl(source, target, opts, &mut |_| {})
}

/// Marginal L1 residual after each full row+column sweep; empty when the
/// source already meets the target marginals. The sequence is nonincreasing
/// sweep over sweep. Errs on undefined projections.
pub fn marginal_residual_trace(
    source: &JointTable<f64>,
    target: &Polytope<f64>,
    opts: &IpfOptions,
) -> Result<Vec<f64>, Error> {
    let mut trace = Vec::new();
    let report = project_impl(source, target, opts, &mut |r| trace.push(r))?;
    if !report.feasibility {
        return Err(Error::Undefined);
    }
    Ok(trace)
}

fn project_impl(
    source: &JointTable<f64>,
    target: &Polytope<f64>,
    opts: &IpfOptions,
    on_sweep: &mut dyn FnMut(f64),
) -> Result<ProjectionReport, Error> {
    let (n, m) = (source.rows(), source.cols());
    if n != target.rows() || m != target.cols() {
        return Err(Error::ShapeMismatch(n, m, target.rows(), target.cols()));
    }

    let exact = target.to_exact();
    let mask = source.support(0.0);
    let Some(limit) = exact.limit_support(&mask)? else {
        return Ok(ProjectionReport::undefined());
    };

    let p = target.row_marginal().masses();
    let q = target.col_marginal().masses();
    let mut entries: Vec<f64> = (0..n * m)
        .map(|k| {
            let (i, j) = (k / m, k % m);
            if limit.contains(i, j) {
                source.entries()[k]
            } else {
                0.0
            }
        })
        .collect();

    let residual = |e: &[f64]| -> f64 {
        let mut row = 0.0;
        for i in 0..n {
            let s: f64 = e[i * m..(i + 1) * m].iter().sum();
            row += (s - p[i]).abs();
        }
        let mut col = 0.0;
        for j in 0..m {
            let s: f64 = (0..n).map(|i| e[i * m + j]).sum();
            col += (s - q[j]).abs();
        }
        row.max(col)
    };

    let mut res = residual(&entries);
    let mut iterations = 0u64;
    while res > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: res,
                last: JointTable::from_raw(n, m, entries),
            });
        }
        for i in 0..n {
            let row = &mut entries[i * m..(i + 1) * m];
            let s: f64 = row.iter().sum();
            if p[i] == 0.0 || s == 0.0 {
                // zero target mass forces a zero row; a vanished positive row
                // cannot be rescaled
                if p[i] == 0.0 {
                    row.fill(0.0);
                    continue;
                }
                return Err(Error::NonConvergence {
                    iterations,
                    residual: res,
                    last: JointTable::from_raw(n, m, entries),
                });
            }
            let factor = p[i] / s;
            for x in row.iter_mut() {
                *x *= factor;
            }
        }
        for j in 0..m {
            let s: f64 = (0..n).map(|i| entries[i * m + j]).sum();
            if q[j] == 0.0 || s == 0.0 {
                if q[j] == 0.0 {
                    for i in 0..n {
                        entries[i * m + j] = 0.0;
                    }
                    continue;
                }
                return Err(Error::NonConvergence {
                    iterations,
                    residual: res,
                    last: JointTable::from_raw(n, m, entries),
                });
            }
            let factor = q[j] / s;
            for i in 0..n {
                entries[i * m + j] *= factor;
            }
        }
        iterations += 1;
        res = residual(&entries);
        on_sweep(res);
    }

    let fitted = JointTable::from_raw(n, m, entries);
    let divergence = fitted.kl_divergence(source)?;
    Ok(ProjectionReport {
        result: Some(fitted),
        iterations,
        marginal_residual: res,
        divergence_value: divergence,
        feasibility: true,
        pythagorean_residual: None,
    })
}

/// Max residual of `|D(T‖source) − D(S*‖source) − D(T‖S*)|` over `samples`
/// random tables `T` drawn from the target with `supp(T) ⊆ supp(source)` —
/// Dirichlet-weighted convex combinations of the target vertices that fit
/// inside the source support.
pub fn certify_pythagorean<R: Rng>(
    source: &JointTable<f64>,
    report: &ProjectionReport,
    target: &Polytope<f64>,
    samples: u32,
    caps: &SizeCaps,
    rng: &mut R,
) -> Result<f64, Error> {
    let s_star = report.result.as_ref().ok_or(Error::Undefined)?;
    let vertices = feasible_vertices(source, target, caps)?;

    let d_star = s_star.kl_divergence(source)?;
    let (n, m) = (source.rows(), source.cols());
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let weights = dirichlet_weights(vertices.len(), rng);
        let mut entries = alloc::vec![0.0f64; n * m];
        for (w, v) in weights.iter().zip(vertices.iter()) {
            for (e, x) in entries.iter_mut().zip(v.entries()) {
                *e += w * x;
            }
        }
        let t = JointTable::from_raw(n, m, entries);
        let lhs = t.kl_divergence(source)?;
        let rhs = d_star + t.kl_divergence(s_star)?;
        max_residual = max_residual.max((lhs - rhs).abs());
    }
    Ok(max_residual)
}

/// Target vertices whose support fits inside the source support, as float
/// tables.
fn feasible_vertices(
    source: &JointTable<f64>,
    target: &Polytope<f64>,
    caps: &SizeCaps,
) -> Result<Vec<JointTable<f64>>, Error> {
    let mask = source.support(0.0);
    let vertices: Vec<JointTable<f64>> = target
        .to_exact()
        .enumerate_vertices(caps)?
        .iter()
        .filter(|v| v.support().is_subset_of(&mask))
        .map(|v| v.table().to_f64())
        .collect();
    if vertices.is_empty() {
        return Err(Error::NoFeasibleVertex);
    }
    Ok(vertices)
}

/// `‖ project(project(source, c2), c1) − source ‖₁`. Between geometrically
/// equivalent polytopes the two projections are mutually inverse, so the
/// error is a float-tolerance artifact; an undefined projection on either
/// leg signals non-equivalence.
pub fn roundtrip(
    source: &JointTable<f64>,
    c1: &Polytope<f64>,
    c2: &Polytope<f64>,
    opts: &IpfOptions,
) -> Result<f64, Error> {
    let forward = project(source, c2, opts)?;
    let image = forward.result.ok_or(Error::Undefined)?;
    let back = project(&image, c1, opts)?;
    let restored = back.result.ok_or(Error::Undefined)?;
    restored.l1_distance(source)
}

/// L1 gaps `‖project(pt + 2⁻ᵏ·direction) − project(pt)‖₁` for `k = 1..=steps`.
///
/// `direction` is a row-major table difference (zero row and column sums);
/// the shifted points must remain valid tables of the domain polytope.
/// Continuity of the projection makes the profile tend to zero.
pub fn continuity_probe(
    target_pt: &JointTable<f64>,
    direction: &[f64],
    target: &Polytope<f64>,
    steps: u32,
    opts: &IpfOptions,
) -> Result<Vec<f64>, Error> {
    let (n, m) = (target_pt.rows(), target_pt.cols());
    if direction.len() != n * m {
        return Err(Error::LengthMismatch(direction.len(), n * m));
    }
    let base = project(target_pt, target, opts)?
        .result
        .ok_or(Error::Undefined)?;

    let mut profile = Vec::with_capacity(steps as usize);
    for k in 1..=steps {
        let h = pow2_neg(k);
        let entries: Vec<f64> = target_pt
            .entries()
            .iter()
            .zip(direction)
            .map(|(x, d)| x + h * d)
            .collect();
        let shifted = JointTable::new(n, m, entries)?;
        let moved = project(&shifted, target, opts)?
            .result
            .ok_or(Error::Undefined)?;
        profile.push(moved.l1_distance(&base)?);
    }
    Ok(profile)
}

/// Outcome of the Fréchet–Hoeffding mapping test. A leg whose projection is
/// undefined passes vacuously and is flagged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FhMappingOutcome {
    pub passed: bool,
    pub upper_vacuous: bool,
    pub lower_vacuous: bool,
}

/// Checks that the F-H bounds of `c1` project onto the F-H bounds of `c2`
/// (within `tol` in L1), whenever those projections exist.
pub fn fh_mapping_check(
    c1: &Polytope<Rational>,
    c2: &Polytope<Rational>,
    tol: f64,
    opts: &IpfOptions,
) -> Result<FhMappingOutcome, Error> {
    let target = c2.to_f64();
    let map_leg = |from: &Vertex, to: &Vertex| -> Result<Option<f64>, Error> {
        let report = project(&from.table().to_f64(), &target, opts)?;
        match report.result {
            Some(image) => Ok(Some(image.l1_distance(&to.table().to_f64())?)),
            None => Ok(None),
        }
    };

    let upper = map_leg(&c1.fh_upper(), &c2.fh_upper())?;
    let lower = map_leg(&c1.fh_lower(), &c2.fh_lower())?;
    let upper_ok = upper.map(|d| d <= tol).unwrap_or(true);
    let lower_ok = lower.map(|d| d <= tol).unwrap_or(true);
    Ok(FhMappingOutcome {
        passed: upper_ok && lower_ok,
        upper_vacuous: upper.is_none(),
        lower_vacuous: lower.is_none(),
    })
}

/// Equality threshold for float tables produced by composed projections.
pub fn table_equality_tol(opts: &IpfOptions) -> f64 {
    10.0 * opts.tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::support::SupportPattern;
    use crate::table::product_table;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dist(masses: &[f64]) -> Distribution<f64> {
        Distribution::new(masses.to_vec()).unwrap()
    }

    fn poly(p: &[f64], q: &[f64]) -> Polytope<f64> {
        Polytope::new(dist(p), dist(q)).unwrap()
    }

    fn u1() -> JointTable<f64> {
        JointTable::new(2, 2, vec![1.0 / 3.0, 1.0 / 6.0, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn example2_u1_maps_to_v1() {
        let report = project(&u1(), &poly(&[0.5, 0.5], &[0.5, 0.5]), &IpfOptions::default())
            .unwrap();
        assert!(report.feasibility);
        let v1 = JointTable::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(report.result.unwrap().l1_distance(&v1).unwrap() <= 1e-10);
        // the limit support is found exactly, so the off-diagonal is 0.0
    }

    #[test]
    fn example2_v1_projection_is_undefined() {
        let v1 = JointTable::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let report = project(
            &v1,
            &poly(&[0.5, 0.5], &[1.0 / 3.0, 2.0 / 3.0]),
            &IpfOptions::default(),
        )
        .unwrap();
        assert!(!report.feasibility);
        assert!(report.result.is_none());
        assert_eq!(report.divergence_value, f64::INFINITY);
    }

    #[test]
    fn projecting_a_member_is_the_identity() {
        let c = poly(&[0.5, 0.5], &[1.0 / 3.0, 2.0 / 3.0]);
        let report = project(&u1(), &c, &IpfOptions::default()).unwrap();
        assert_eq!(report.iterations, 0);
        assert_eq!(report.result.unwrap(), u1());
        assert_eq!(report.divergence_value, 0.0);
    }

    #[test]
    fn product_projects_to_product() {
        let source = product_table(&dist(&[0.5, 0.5]), &dist(&[1.0 / 3.0, 2.0 / 3.0]));
        let target = poly(&[0.25, 0.75], &[0.5, 0.5]);
        let report = project(&source, &target, &IpfOptions::default()).unwrap();
        let expected =
            JointTable::new(2, 2, vec![0.125, 0.125, 0.375, 0.375]).unwrap();
        assert!(report.result.unwrap().l1_distance(&expected).unwrap() <= 1e-12);
    }

    #[test]
    fn support_shrinks_to_limit_support() {
        // U1 → C((1/2,1/2),(1/2,1/2)): cell (0,1) leaves the support exactly
        let report = project(&u1(), &poly(&[0.5, 0.5], &[0.5, 0.5]), &IpfOptions::default())
            .unwrap();
        let support = report.result.unwrap().support(1e-12);
        assert_eq!(
            support,
            SupportPattern::from_cells(2, 2, [(0, 0), (1, 1)]).unwrap()
        );
    }

    #[test]
    fn shape_mismatch_rejected() {
        let c = poly(&[0.5, 0.5], &[0.5, 0.5]);
        let t = JointTable::new(1, 2, vec![0.5, 0.5]).unwrap();
        assert!(project(&t, &c, &IpfOptions::default()).is_err());
    }

    #[test]
    fn pythagorean_residual_zero_at_projection() {
        let c = poly(&[0.5, 0.5], &[0.5, 0.5]);
        let report = project(&u1(), &c, &IpfOptions::default()).unwrap();
        // T = S* is among the sampled combinations when only one vertex fits
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = certify_pythagorean(&u1(), &report, &c, 16, &SizeCaps::default(), &mut rng)
            .unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn certify_requires_a_defined_projection() {
        let v1 = JointTable::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let c1 = poly(&[0.5, 0.5], &[1.0 / 3.0, 2.0 / 3.0]);
        let report = project(&v1, &c1, &IpfOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(matches!(
            certify_pythagorean(&v1, &report, &c1, 4, &SizeCaps::default(), &mut rng),
            Err(Error::Undefined)
        ));
    }

    #[test]
    fn roundtrip_identity_on_same_polytope() {
        let c = poly(&[0.5, 0.5], &[1.0 / 3.0, 2.0 / 3.0]);
        let err = roundtrip(&u1(), &c, &c, &IpfOptions::default()).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn roundtrip_undefined_signals_nonequivalence() {
        // V1 ∈ C(P2,Q2) cannot return from C(P1,Q1)
        let v1 = JointTable::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let c2 = poly(&[0.5, 0.5], &[0.5, 0.5]);
        let c1 = poly(&[0.5, 0.5], &[1.0 / 3.0, 2.0 / 3.0]);
        assert!(matches!(
            roundtrip(&v1, &c2, &c1, &IpfOptions::default()),
            Err(Error::Undefined)
        ));
    }

    #[test]
    fn zero_direction_probe_is_flat() {
        let c2 = poly(&[0.5, 0.5], &[0.5, 0.5]);
        let profile =
            continuity_probe(&u1(), &[0.0; 4], &c2, 8, &IpfOptions::default()).unwrap();
        assert!(profile.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn probe_along_example2_segment() {
        // path inside C(P1,Q1) approaching its midpoint, target C(P2,Q2)
        let c2 = poly(&[0.5, 0.5], &[0.5, 0.5]);
        // direction from U1 towards U2 keeps full-rank marginals: row/col sums 0
        let direction = [-1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, -1.0 / 6.0];
        let mid = JointTable::new(2, 2, vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0])
            .unwrap();
        let profile =
            continuity_probe(&mid, &direction, &c2, 20, &IpfOptions::default()).unwrap();
        assert!(profile.last().unwrap() < &1e-6);
        assert!(profile.first().unwrap() > profile.last().unwrap());
    }

    #[test]
    fn fh_mapping_on_example2() {
        let c1 = Polytope::new(
            Distribution::new(vec![
                Rational::new(1.into(), 2.into()),
                Rational::new(1.into(), 2.into()),
            ])
            .unwrap(),
            Distribution::new(vec![
                Rational::new(1.into(), 3.into()),
                Rational::new(2.into(), 3.into()),
            ])
            .unwrap(),
        )
        .unwrap();
        let c2 = Polytope::new(
            Distribution::new(vec![
                Rational::new(1.into(), 2.into()),
                Rational::new(1.into(), 2.into()),
            ])
            .unwrap(),
            Distribution::new(vec![
                Rational::new(1.into(), 2.into()),
                Rational::new(1.into(), 2.into()),
            ])
            .unwrap(),
        )
        .unwrap();
        let out = fh_mapping_check(&c1, &c2, 1e-9, &IpfOptions::default()).unwrap();
        assert!(out.passed);
        assert!(!out.upper_vacuous && !out.lower_vacuous);

        // identity case
        let same = fh_mapping_check(&c1, &c1, 1e-9, &IpfOptions::default()).unwrap();
        assert!(same.passed);
    }
}
