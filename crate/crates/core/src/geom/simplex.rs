use nalgebra::{Complex, Matrix5};

use crate::{Tolerances, Vec3};

/// The six edge lengths of a tetrahedron with vertices `0..4`.
///
/// Lengths are stored in pair order `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexLengths {
    lengths: [f64; 6],
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&p| p == (a, b)).unwrap_or_else(|| panic!("invalid vertex pair ({i}, {j})"))
}

impl SimplexLengths {
    /// Builds and validates a simplex; the error string explains which
    /// realizability condition failed.
    pub fn new(lengths: [f64; 6], tol: &Tolerances) -> Result<Self, String> {
        let s = Self { lengths };
        s.check(tol)?;
        Ok(s)
    }

    pub fn from_points(p: &[Vec3; 4]) -> Self {
        let mut lengths = [0.0; 6];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            lengths[k] = (p[i] - p[j]).norm();
        }
        Self { lengths }
    }

    pub fn lengths(&self) -> &[f64; 6] {
        &self.lengths
    }

    pub fn length(&self, i: usize, j: usize) -> f64 {
        self.lengths[pair_index(i, j)]
    }

    pub fn with_length(mut self, i: usize, j: usize, value: f64) -> Self {
        self.lengths[pair_index(i, j)] = value;
        self
    }

    fn max_length(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    /// `288 V²` from the Cayley–Menger determinant.
    pub fn cayley_menger(&self) -> f64 {
        let mut cm = Matrix5::<f64>::zeros();
        for i in 1..5 {
            cm[(0, i)] = 1.0;
            cm[(i, 0)] = 1.0;
        }
        for &(i, j) in PAIRS.iter() {
            let d2 = self.length(i, j).powi(2);
            cm[(i + 1, j + 1)] = d2;
            cm[(j + 1, i + 1)] = d2;
        }
        cm.determinant()
    }

    pub fn volume(&self) -> f64 {
        (self.cayley_menger().max(0.0) / 288.0).sqrt()
    }

    /// Area of the face opposite vertex `v`, by Heron's formula.
    pub fn face_area(&self, v: usize) -> f64 {
        let f: Vec<usize> = (0..4).filter(|&k| k != v).collect();
        let (a, b, c) = (self.length(f[0], f[1]), self.length(f[1], f[2]), self.length(f[0], f[2]));
        let s = 0.5 * (a + b + c);
        (s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt()
    }

    /// Smallest altitude over longest edge; `sqrt(2/3)` for a regular
    /// tetrahedron, zero when flat.
    pub fn aspect(&self) -> f64 {
        let area = (0..4).map(|v| self.face_area(v)).fold(0.0, f64::max);
        if area == 0.0 {
            return 0.0;
        }
        3.0 * self.volume() / area / self.max_length()
    }

    pub fn check(&self, tol: &Tolerances) -> Result<(), String> {
        if self.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err("non-positive edge length".into());
        }
        for face in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            let a = self.length(face[0], face[1]);
            let b = self.length(face[1], face[2]);
            let c = self.length(face[0], face[2]);
            if a + b <= c || b + c <= a || a + c <= b {
                return Err(format!("triangle inequality fails on face {face:?}"));
            }
        }
        let scale = self.max_length();
        let cm = self.cayley_menger();
        if cm <= 0.0 || (cm / 288.0).sqrt() <= tol.vol * scale.powi(3) {
            return Err(format!("Cayley-Menger volume too small (288V^2 = {cm:e})"));
        }
        Ok(())
    }

    /// Coordinates realizing the lengths, with vertex `i` at the origin, `j` on
    /// the positive x-axis, the third vertex in the half-plane `y > 0, z = 0`
    /// and the fourth in `z >= 0`.
    pub fn realize_on_edge(&self, i: usize, j: usize) -> [Vec3; 4] {
        let others: Vec<usize> = (0..4).filter(|&v| v != i && v != j).collect();
        let (k, l) = (others[0], others[1]);
        let d = self.length(i, j);
        let foot = |v: usize| {
            let x = (self.length(i, v).powi(2) + d * d - self.length(j, v).powi(2)) / (2.0 * d);
            let r2 = self.length(i, v).powi(2) - x * x;
            (x, r2.max(0.0).sqrt())
        };
        let (xk, rk) = foot(k);
        let (xl, rl) = foot(l);
        let yl = (rk * rk + rl * rl + (xk - xl).powi(2) - self.length(k, l).powi(2)) / (2.0 * rk);
        let zl = ((rl - yl) * (rl + yl)).max(0.0).sqrt();
        let mut p = [Vec3::zeros(); 4];
        p[j] = Vec3::new(d, 0.0, 0.0);
        p[k] = Vec3::new(xk, rk, 0.0);
        p[l] = Vec3::new(xl, yl, zl);
        p
    }

    /// Interior dihedral angle along edge `(i, j)`, in `(0, π)`.
    ///
    /// The edge is laid on an axis and the two remaining vertices are placed by
    /// their feet and distances to it; the angle between their half-planes
    /// follows from the distance between them. The formula is symmetric in the
    /// two off-edge vertices.
    pub fn dihedral_angle(&self, i: usize, j: usize) -> f64 {
        let others: Vec<usize> = (0..4).filter(|&v| v != i && v != j).collect();
        let (k, l) = (others[0], others[1]);
        let d = self.length(i, j);
        let foot = |v: usize| {
            let x = (self.length(i, v).powi(2) + d * d - self.length(j, v).powi(2)) / (2.0 * d);
            let r2 = (self.length(i, v) - x) * (self.length(i, v) + x);
            (x, r2.max(0.0))
        };
        let (xk, rk2) = foot(k);
        let (xl, rl2) = foot(l);
        // 2 r_k r_l cos(angle)
        let num = (xk - xl).powi(2) + (rk2 + rl2) - self.length(k, l).powi(2);
        let den = 2.0 * (rk2 * rl2).sqrt();
        let sin = ((den - num) * (den + num)).max(0.0).sqrt();
        sin.atan2(num)
    }
}

/// [`SimplexLengths::dihedral_angle`] at complex lengths in pair order, for
/// complex-step derivatives: exact in the real part and to first order in
/// the imaginary part.
pub fn dihedral_angle_complex(lengths: &[Complex<f64>; 6], i: usize, j: usize) -> Complex<f64> {
    let len = |a: usize, b: usize| lengths[pair_index(a, b)];
    let others: Vec<usize> = (0..4).filter(|&v| v != i && v != j).collect();
    let (k, l) = (others[0], others[1]);
    let d = len(i, j);
    let foot = |v: usize| {
        let x = (len(i, v).powi(2) + d * d - len(j, v).powi(2)) / (d * 2.0);
        (x, (len(i, v) - x) * (len(i, v) + x))
    };
    let (xk, rk2) = foot(k);
    let (xl, rl2) = foot(l);
    let num = (xk - xl).powi(2) + (rk2 + rl2) - len(k, l).powi(2);
    let den = (rk2 * rl2).sqrt() * 2.0;
    let sin = ((den - num) * (den + num)).sqrt();
    if num.re > 0.0 {
        atan_first_order(sin / num)
    } else {
        Complex::new(std::f64::consts::FRAC_PI_2, 0.0) - atan_first_order(num / sin)
    }
}

/// `atan` to first order in the imaginary part; the library version goes
/// through `ln` and drops imaginary parts far below the real one.
fn atan_first_order(z: Complex<f64>) -> Complex<f64> {
    Complex::new(z.re.atan(), z.im / (1.0 + z.re * z.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn aspect_of_regular_and_flattened() {
        let reg = SimplexLengths::new([1.0; 6], &Tolerances::default()).unwrap();
        assert!((reg.aspect() - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let pts =
            [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.3, 0.3, 1e-3)];
        let thin = SimplexLengths::from_points(&pts).aspect();
        assert!(thin > 0.0 && thin < 1e-3);
    }

    #[test]
    fn complex_angle_matches_real_and_its_derivative() {
        let t = SimplexLengths::new([1.1, 0.9, 1.3, 1.0, 1.2, 0.8], &Tolerances::default()).unwrap();
        let h = 1e-6;
        for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            let z = t.lengths().map(|x| Complex::new(x, 0.0));
            assert!((dihedral_angle_complex(&z, i, j).re - t.dihedral_angle(i, j)).abs() < 1e-14);
            let mut w = z;
            w[4].im = 1e-30;
            let cs = dihedral_angle_complex(&w, i, j).im / 1e-30;
            let fd = (t.with_length(1, 3, 1.2 + h).dihedral_angle(i, j)
                - t.with_length(1, 3, 1.2 - h).dihedral_angle(i, j))
                / (2.0 * h);
            assert!((cs - fd).abs() < 1e-8, "{cs} {fd}");
        }
    }

    fn regular() -> SimplexLengths {
        SimplexLengths::new([1.0; 6], &Tolerances::default()).unwrap()
    }

    /// Dihedral angle from explicit coordinates via face normals.
    fn dihedral_from_points(p: &[Vec3; 4], i: usize, j: usize) -> f64 {
        let others: Vec<usize> = (0..4).filter(|&v| v != i && v != j).collect();
        let e = (p[j] - p[i]).normalize();
        let perp = |v: Vec3| {
            let w = v - p[i];
            w - e * w.dot(&e)
        };
        let u = perp(p[others[0]]);
        let v = perp(p[others[1]]);
        (u.dot(&v) / (u.norm() * v.norm())).acos()
    }

    #[test]
    fn regular_tetrahedron_dihedral() {
        let s = regular();
        for &(i, j) in PAIRS.iter() {
            assert!((s.dihedral_angle(i, j) - (1.0f64 / 3.0).acos()).abs() < 1e-14);
        }
        assert!((s.dihedral_angle(0, 1) - 1.230959417).abs() < 1e-9);
    }

    #[test]
    fn octahedron_cone_simplex() {
        let p =
            [Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        let s = SimplexLengths::from_points(&p);
        assert!((s.dihedral_angle(0, 1) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn random_simplices_match_embedding() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let tol = Tolerances::default();
        let mut tested = 0;
        while tested < 200 {
            let p: [Vec3; 4] = std::array::from_fn(|_| {
                Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let s = SimplexLengths::from_points(&p);
            if s.volume() < 0.02 {
                continue;
            }
            s.check(&tol).unwrap();
            for &(i, j) in PAIRS.iter() {
                let expected = dihedral_from_points(&p, i, j);
                assert!((s.dihedral_angle(i, j) - expected).abs() < 1e-10);
            }
            tested += 1;
        }
    }

    #[test]
    fn cayley_menger_matches_coordinates() {
        let p =
            [Vec3::new(0.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 3.0, 0.0), Vec3::new(0.0, 0.0, 4.0)];
        assert!((SimplexLengths::from_points(&p).volume() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_flat_and_impossible() {
        let tol = Tolerances::default();
        let flat =
            [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(1.0, 1.0, 0.0)];
        assert!(SimplexLengths::from_points(&flat).check(&tol).is_err());
        assert!(SimplexLengths::new([1.0, 1.0, 1.0, 1.0, 1.0, 2.5], &tol).is_err());
        // each face fine, but no 3D realization
        assert!(SimplexLengths::new([1.0, 1.0, 1.0, 1.0, 1.0, 1.99], &tol).is_err());
    }

    #[test]
    fn relabeling_fixing_edge_is_exact() {
        let p =
            [Vec3::new(0.1, 0.2, -0.3), Vec3::new(1.3, 0.1, 0.2), Vec3::new(0.4, 1.1, 0.1), Vec3::new(0.5, 0.3, 0.9)];
        let s = SimplexLengths::from_points(&p);
        let swapped = SimplexLengths::from_points(&[p[0], p[1], p[3], p[2]]);
        assert_eq!(s.dihedral_angle(0, 1), swapped.dihedral_angle(0, 1));
        let reversed = SimplexLengths::from_points(&[p[1], p[0], p[2], p[3]]);
        assert!((s.dihedral_angle(0, 1) - reversed.dihedral_angle(0, 1)).abs() < 1e-13);
    }

    #[test]
    fn vertex_links_are_spherical_triangles() {
        let p =
            [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.2, 0.1), Vec3::new(0.3, 0.8, -0.2), Vec3::new(0.2, 0.4, 1.3)];
        let s = SimplexLengths::from_points(&p);
        for v in 0..4 {
            let a: Vec<f64> = (0..4).filter(|&w| w != v).map(|w| s.dihedral_angle(v, w)).collect();
            assert!(a.iter().sum::<f64>() > PI);
            for k in 0..3 {
                assert!(a[k] + PI > a[(k + 1) % 3] + a[(k + 2) % 3]);
            }
        }
    }
}
