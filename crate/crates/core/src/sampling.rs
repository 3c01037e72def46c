//! Lattices in `S = AN` and their images in the ball.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{pairing, s_dim, s_from_coords, BallPoint, GroupElement, TAU_PT};

/// Default cap on the number of lattice points.
pub const DEFAULT_MAX_POINTS: usize = 200_000;

/// One sampling point: coordinates in `S`, the group element and its image.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyEntry {
    pub tvec: Vec<f64>,
    pub x: GroupElement,
    pub w: BallPoint,
    pub one_minus_w2: f64,
}

/// A finite family of points `x_i ∈ S` with images `w_i = x_i·o`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFamily {
    n: usize,
    entries: Vec<FamilyEntry>,
    pub epsilon: f64,
    pub box_radius: f64,
}

impl PointFamily {
    /// Builds a family from explicit `S`-coordinates.
    pub fn from_coords(
        n: usize,
        tvecs: Vec<Vec<f64>>,
        epsilon: f64,
        box_radius: f64,
    ) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut entries = Vec::with_capacity(tvecs.len());
        for tvec in tvecs {
            if tvec.len() != s_dim(n) {
                return Err(Error::DimensionMismatch {
                    expected: s_dim(n),
                    got: tvec.len(),
                });
            }
            let key: Vec<u64> = tvec.iter().map(|v| v.to_bits()).collect();
            if !seen.insert(key) {
                return Err(Error::Domain(format!(
                    "duplicate lattice coordinates {tvec:?}"
                )));
            }
            let x = s_from_coords(&tvec)?;
            let w = x.origin_image();
            if w.norm_sqr() >= 1.0 {
                return Err(Error::OutsideBall(w.norm()));
            }
            entries.push(FamilyEntry {
                one_minus_w2: w.one_minus_norm_sqr(),
                tvec,
                x,
                w,
            });
        }
        Ok(Self {
            n,
            entries,
            epsilon,
            box_radius,
        })
    }

    /// A family given directly by group elements of `S`.
    pub fn from_elements(n: usize, xs: Vec<GroupElement>) -> Result<Self> {
        let entries = xs
            .into_iter()
            .map(|x| {
                if x.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: x.dim(),
                    });
                }
                let w = x.origin_image();
                let s = crate::group::s_coordinates_of_point(&w);
                // the ordered product of real and imaginary N-steps picks up
                // Σ Re ζ_j Im ζ_j in the central direction
                let shift: f64 = s.zeta.iter().map(|z| z.re * z.im).sum();
                let mut tvec = vec![s.t, s.u - shift];
                for z in &s.zeta {
                    tvec.push(z.re);
                    tvec.push(z.im);
                }
                Ok(FamilyEntry {
                    one_minus_w2: w.one_minus_norm_sqr(),
                    tvec,
                    x,
                    w,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            n,
            entries,
            epsilon: f64::NAN,
            box_radius: f64::NAN,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FamilyEntry] {
        &self.entries
    }

    pub fn points(&self) -> impl Iterator<Item = &BallPoint> {
        self.entries.iter().map(|e| &e.w)
    }

    /// Largest `|w_i − x_i·o|`; zero up to rounding by construction.
    pub fn consistency_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.x.origin_image().distance(&e.w))
            .fold(0.0, f64::max)
    }

    /// Whether every entry satisfies the family invariants.
    pub fn validate(&self) -> bool {
        self.consistency_residual() <= TAU_PT
            && self
                .entries
                .iter()
                .all(|e| e.w.norm_sqr() < 1.0 && e.one_minus_w2 > 0.0)
    }
}

/// `(2ε)·Z^{2n}` intersected with the box `|t_k| ≤ box_radius`, mapped into `S`.
pub fn generate_lattice(epsilon: f64, box_radius: f64, n: usize) -> Result<PointFamily> {
    generate_lattice_with_capacity(epsilon, box_radius, n, DEFAULT_MAX_POINTS)
}

pub fn generate_lattice_with_capacity(
    epsilon: f64,
    box_radius: f64,
    n: usize,
    max_points: usize,
) -> Result<PointFamily> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(box_radius >= 0.0) {
        return Err(Error::Domain(format!(
            "box radius must be non-negative, got {box_radius}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let step = 2.0 * epsilon;
    let k_max = (box_radius / step * (1.0 + 1e-12)).floor() as i64;
    let per_axis = (2 * k_max + 1) as u128;
    let dim = s_dim(n);
    let count = per_axis.checked_pow(dim as u32).unwrap_or(u128::MAX);
    if count > max_points as u128 {
        return Err(Error::CapacityExceeded {
            count: count.min(usize::MAX as u128) as usize,
            max: max_points,
        });
    }
    let mut tvecs = Vec::with_capacity(count as usize);
    let mut idx = vec![-k_max; dim];
    loop {
        tvecs.push(idx.iter().map(|&k| k as f64 * step).collect());
        // odometer over the grid, last coordinate fastest
        let mut j = dim;
        loop {
            if j == 0 {
                return PointFamily::from_coords(n, tvecs, epsilon, box_radius);
            }
            j -= 1;
            if idx[j] < k_max {
                idx[j] += 1;
                break;
            }
            idx[j] = -k_max;
        }
    }
}

/// Pseudo-hyperbolic distance
/// `ρ(z, w)² = 1 − (1 − |z|²)(1 − |w|²) / |1 − ⟨z, w⟩|²`,
/// evaluated through `|1 − ⟨z,w⟩|² − (1−|z|²)(1−|w|²) = |z − w|² − (|z|²|w|² − |⟨z,w⟩|²)`.
pub fn pseudo_hyperbolic_distance(z: &BallPoint, w: &BallPoint) -> f64 {
    let (a, b) = (z.coords(), w.coords());
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    // Lagrange identity: |z|²|w|² − |⟨z,w⟩|² = Σ_{j<k} |z_j w_k − z_k w_j|²
    let mut wedge = 0.0;
    for j in 0..a.len() {
        for k in j + 1..a.len() {
            wedge += (a[j] * b[k] - a[k] * b[j]).norm_sqr();
        }
    }
    let den = (Complex64::new(1.0, 0.0) - pairing(a, b)).norm_sqr();
    ((diff - wedge).max(0.0) / den)
        .sqrt()
        .min(1.0 - f64::EPSILON)
}

/// Smallest pseudo-hyperbolic distance between distinct members.
pub fn min_separation(family: &PointFamily) -> f64 {
    let pts: Vec<&BallPoint> = family.points().collect();
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(pseudo_hyperbolic_distance(pts[i], pts[j]));
        }
    }
    best
}

/// Whether all pairwise distances are at least `delta`.
pub fn separation_check(family: &PointFamily, delta: f64) -> bool {
    min_separation(family) >= delta
}

/// Probe points: the images of a uniform grid with `per_axis` midpoints per
/// coordinate of the box `|t_k| ≤ box_radius`.
pub fn probe_grid(n: usize, box_radius: f64, per_axis: usize) -> Result<Vec<BallPoint>> {
    let dim = s_dim(n);
    let h = 2.0 * box_radius / per_axis as f64;
    let axis: Vec<f64> = (0..per_axis)
        .map(|k| -box_radius + (k as f64 + 0.5) * h)
        .collect();
    let total = per_axis.pow(dim as u32);
    (0..total)
        .map(|mut p| {
            let t: Vec<f64> = (0..dim)
                .map(|_| {
                    let v = axis[p % per_axis];
                    p /= per_axis;
                    v
                })
                .collect();
            Ok(s_from_coords(&t)?.origin_image())
        })
        .collect()
}

/// Fraction of probes within pseudo-hyperbolic distance `eps_metric` of the family.
pub fn density_check(family: &PointFamily, eps_metric: f64, probes: &[BallPoint]) -> f64 {
    if probes.is_empty() {
        return 1.0;
    }
    let covered = probes
        .iter()
        .filter(|q| {
            family
                .points()
                .any(|w| pseudo_hyperbolic_distance(q, w) <= eps_metric)
        })
        .count();
    covered as f64 / probes.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{a_element, n_element};

    #[test]
    fn explicit_elements_round_trip() {
        let x = s_from_coords(&[0.3, -0.2, 0.5, 0.4]).unwrap();
        let f = PointFamily::from_elements(2, vec![x.clone()]).unwrap();
        let back = s_from_coords(&f.entries()[0].tvec).unwrap();
        assert!((back.matrix() - x.matrix())
            .iter()
            .all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn huge_epsilon_gives_identity() {
        let f = generate_lattice(10.0, 0.5, 2).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.entries()[0].w, BallPoint::origin(2));
        assert_eq!(f.entries()[0].one_minus_w2, 1.0);
    }

    #[test]
    fn five_by_five_grid() {
        let f = generate_lattice(0.2, 1.0, 1).unwrap();
        assert_eq!(f.len(), 25);
        assert!(f.validate());
        assert!(f
            .entries()
            .iter()
            .all(|e| e.x.residuals().max() < 1e-12 && e.x.is_in_s(1e-10)));
        assert_eq!(f, generate_lattice(0.2, 1.0, 1).unwrap());
    }

    #[test]
    fn image_radius_grows_with_box() {
        let radii: Vec<f64> = [0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|&b| {
                generate_lattice(0.25, b, 1)
                    .unwrap()
                    .points()
                    .map(BallPoint::norm)
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(radii.windows(2).all(|w| w[1] > w[0]) && radii[3] < 1.0);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            generate_lattice(0.01, 2.0, 2),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!(matches!(
            generate_lattice_with_capacity(0.2, 1.0, 1, 10),
            Err(Error::CapacityExceeded { count: 25, max: 10 })
        ));
    }

    #[test]
    fn distance_examples_and_invariance() {
        let o = BallPoint::origin(1);
        let h = BallPoint::from_real(&[0.5]).unwrap();
        assert_eq!(pseudo_hyperbolic_distance(&h, &h), 0.0);
        assert!((pseudo_hyperbolic_distance(&o, &h) - 0.5).abs() < 1e-15);
        let x =
            a_element(2, 0.7).multiply(&n_element(2, &[Complex64::new(0.4, -0.3)], 0.6).unwrap());
        let z = BallPoint::new(vec![Complex64::new(0.2, 0.3), Complex64::new(-0.5, 0.1)]).unwrap();
        let w = BallPoint::new(vec![Complex64::new(-0.4, 0.0), Complex64::new(0.1, 0.6)]).unwrap();
        let before = pseudo_hyperbolic_distance(&z, &w);
        let after = pseudo_hyperbolic_distance(&x.act(&z).unwrap(), &x.act(&w).unwrap());
        assert!((before - after).abs() < 1e-12);
        assert!((before - pseudo_hyperbolic_distance(&w, &z)).abs() < 1e-15);
    }

    #[test]
    fn separation_and_coverage() {
        let f = generate_lattice(0.2, 1.0, 1).unwrap();
        assert!(min_separation(&f) > 0.0);
        assert!(separation_check(
            &generate_lattice(5.0, 0.1, 1).unwrap(),
            0.99
        ));
        let probes = probe_grid(1, 1.0, 24).unwrap();
        let cov: Vec<f64> = [0.4, 0.2, 0.1]
            .iter()
            .map(|&e| density_check(&generate_lattice(e, 1.0, 1).unwrap(), 0.15, &probes))
            .collect();
        assert!(cov.windows(2).all(|w| w[1] >= w[0]), "{cov:?}");
        assert!(cov[2] > cov[0]);
    }
}
