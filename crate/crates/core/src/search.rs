//! Direction search on the unit sphere.
//!
//! Provides deterministic seed grids (uniform circle in the plane, Fibonacci
//! lattice on the 2-sphere, seeded uniform directions in higher dimension),
//! a derivative-free local refinement that walks on the sphere, and a snap
//! step that lands candidates exactly on activity boundaries of the form
//! `|<y, z>| = t`.

use nalgebra::{DMatrix, DVector};

use crate::rng::CounterRng;

/// Fixed internal stream for the `dim >= 4` seed directions, so results are
/// reproducible without threading a seed through every caller.
const DIRECTION_STREAM: u64 = 0x5EED_D1EC_7104_5EED;

/// Evenly spaced unit vectors on the circle.
pub fn circle_grid(n: usize) -> Vec<DVector<f64>> {
    (0..n)
        .map(|i| {
            let theta = (i as f64) * std::f64::consts::TAU / (n as f64);
            DVector::from_vec(vec![theta.cos(), theta.sin()])
        })
        .collect()
}

/// Fibonacci lattice on the 2-sphere: `n` nearly uniform unit vectors.
pub fn fibonacci_sphere(n: usize) -> Vec<DVector<f64>> {
    let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            // Offsetting by 1/2 avoids the poles and keeps the lattice balanced.
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / (n as f64);
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = std::f64::consts::TAU * (i as f64) / golden;
            DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Deterministic uniform directions for dimension >= 4 (Gaussian normalize).
pub fn seeded_directions(dim: usize, n: usize) -> Vec<DVector<f64>> {
    let mut rng = CounterRng::new(DIRECTION_STREAM ^ (dim as u64));
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = DVector::from_fn(dim, |_, _| crate::rng::sample_standard_normal(&mut rng));
        let norm = v.norm();
        if norm > 1e-6 {
            out.push(v / norm);
        }
    }
    out
}

/// Default seed grid for a given dimension.
pub fn seed_grid(dim: usize, n: usize) -> Vec<DVector<f64>> {
    match dim {
        1 => vec![DVector::from_vec(vec![1.0])],
        2 => circle_grid(n),
        3 => fibonacci_sphere(n),
        _ => seeded_directions(dim, n),
    }
}

/// An orthonormal basis of the tangent space at `z` (any dimension).
pub fn tangent_basis(z: &DVector<f64>) -> Vec<DVector<f64>> {
    let dim = z.len();
    // Gram–Schmidt of the coordinate basis against z.
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim - 1);
    for k in 0..dim {
        let mut e = DVector::zeros(dim);
        e[k] = 1.0;
        let mut v = &e - z * z.dot(&e);
        for b in &basis {
            let proj = b.dot(&v);
            v -= b * proj;
        }
        let norm = v.norm();
        if norm > 1e-9 {
            basis.push(v / norm);
            if basis.len() == dim - 1 {
                break;
            }
        }
    }
    basis
}

/// Derivative-free maximization of `f` over the unit sphere, starting at `z0`.
///
/// Pattern search over the tangent basis with a geometrically shrinking step;
/// each probe renormalizes back onto the sphere. Deterministic.
pub fn pattern_search_sphere<F>(f: &F, z0: &DVector<f64>, init_step: f64, rounds: usize) -> (DVector<f64>, f64)
where
    F: Fn(&DVector<f64>) -> f64,
{
    let mut z = z0.normalize();
    let mut best = f(&z);
    let mut step = init_step;
    for _ in 0..rounds {
        let basis = tangent_basis(&z);
        let mut improved = false;
        for b in &basis {
            for sign in [1.0, -1.0] {
                let cand = (&z + b * (sign * step)).normalize();
                let v = f(&cand);
                if v > best {
                    best = v;
                    z = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    (z, best)
}

/// Candidates obtained by rotating `z` in the plane `span(z, y)` so that
/// `<y, z'> = ±t` exactly (activity boundary of the truncation at level `t`).
///
/// Returns up to two unit vectors; empty when `|y| <= t` (no boundary) or the
/// geometry is degenerate (`z` parallel to `y`).
pub fn snap_to_boundary(z: &DVector<f64>, y: &DVector<f64>, t: f64) -> Vec<DVector<f64>> {
    let ny = y.norm();
    if !(ny > t) {
        return Vec::new();
    }
    let yhat = y / ny;
    let a = yhat.dot(z);
    let mut w = z - &yhat * a;
    let wn = w.norm();
    if wn < 1e-12 {
        return Vec::new();
    }
    w /= wn;
    let c = t / ny; // target |cos| between y-hat and z'
    let s = (1.0 - c * c).max(0.0).sqrt();
    // Keep the tangential sign of z, try both signs of the projection.
    vec![&yhat * c + &w * s, &yhat * (-c) + &w * s]
}

/// Largest eigenvalue and a corresponding unit eigenvector of a symmetric
/// matrix (dense, small dimension).
pub fn top_eigenpair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let mut best = 0usize;
    for i in 1..sym.eigenvalues.len() {
        if sym.eigenvalues[i] > sym.eigenvalues[best] {
            best = i;
        }
    }
    let v = sym.eigenvectors.column(best).into_owned();
    (sym.eigenvalues[best], v.normalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grids_are_unit_norm() {
        for z in circle_grid(17) {
            assert_relative_eq!(z.norm(), 1.0, epsilon = 1e-12);
        }
        for z in fibonacci_sphere(101) {
            assert_relative_eq!(z.norm(), 1.0, epsilon = 1e-12);
        }
        for z in seeded_directions(5, 40) {
            assert_relative_eq!(z.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn fibonacci_sphere_covers_caps() {
        // No point should be farther than ~3/sqrt(n) from its nearest
        // neighbor direction; check coverage via max pairwise gap to poles.
        let pts = fibonacci_sphere(1000);
        let north = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let best = pts.iter().map(|p| p.dot(&north)).fold(f64::MIN, f64::max);
        assert!(best > 0.99, "cap coverage too sparse: {best}");
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let z = DVector::from_vec(vec![0.6, 0.0, 0.8]);
        let basis = tangent_basis(&z);
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert_relative_eq!(b.norm(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(b.dot(&z), 0.0, epsilon = 1e-12);
        }
        assert_relative_eq!(basis[0].dot(&basis[1]), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pattern_search_finds_linear_functional_max() {
        // max over sphere of <a, z> is |a| at z = a/|a|.
        let a = DVector::from_vec(vec![1.0, -2.0, 2.0]);
        let f = |z: &DVector<f64>| a.dot(z);
        let start = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let (z, v) = pattern_search_sphere(&f, &start, 0.5, 200);
        assert_relative_eq!(v, 3.0, epsilon = 1e-6);
        assert_relative_eq!(z.dot(&(a.normalize())), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn snap_lands_exactly_on_boundary() {
        let y = DVector::from_vec(vec![0.8, 0.0]);
        let z = DVector::from_vec(vec![0.5, 0.8660254037844386]);
        for cand in snap_to_boundary(&z, &y, 0.5) {
            assert_relative_eq!(cand.norm(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(y.dot(&cand).abs(), 0.5, epsilon = 1e-12);
        }
        assert!(snap_to_boundary(&z, &y, 0.9).is_empty());
    }

    #[test]
    fn top_eigenpair_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.3, 1.7, 0.9]));
        let (lam, v) = top_eigenpair(&m);
        assert_relative_eq!(lam, 1.7, epsilon = 1e-12);
        assert_relative_eq!(v[1].abs(), 1.0, epsilon = 1e-10);
    }
}
