//! Exterior algebra at a point of a tetrahedron, in reference coordinates
//! with the cell's constant metric.

use serde::{Deserialize, Serialize};

use super::metric::{mat_vec, Mat3, TetGeometry};
use super::whitney::{cross, dot3, Vec3};
use super::DecError;

/// A form at a point, by degree. 2-forms use `(ω₂₃, ω₃₁, ω₁₂)`; 3-forms the
/// coefficient of `dξ₁∧dξ₂∧dξ₃`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PointForm {
    Zero(f64),
    One(Vec3),
    Two(Vec3),
    Three(f64),
}

impl PointForm {
    pub fn degree(&self) -> usize {
        match self {
            PointForm::Zero(_) => 0,
            PointForm::One(_) => 1,
            PointForm::Two(_) => 2,
            PointForm::Three(_) => 3,
        }
    }

    pub fn scale(&self, s: f64) -> PointForm {
        match *self {
            PointForm::Zero(f) => PointForm::Zero(s * f),
            PointForm::One(a) => PointForm::One(a.map(|x| s * x)),
            PointForm::Two(w) => PointForm::Two(w.map(|x| s * x)),
            PointForm::Three(h) => PointForm::Three(s * h),
        }
    }

    /// Component distance, for comparisons in tests.
    pub fn distance(&self, other: &PointForm) -> Option<f64> {
        match (self, other) {
            (PointForm::Zero(a), PointForm::Zero(b)) | (PointForm::Three(a), PointForm::Three(b)) => {
                Some((a - b).abs())
            }
            (PointForm::One(a), PointForm::One(b)) | (PointForm::Two(a), PointForm::Two(b)) => {
                Some((0..3).map(|k| (a[k] - b[k]).abs()).fold(0.0, f64::max))
            }
            _ => None,
        }
    }
}

/// A point inside a tetrahedron together with the metric there.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointFrame {
    pub tet: usize,
    pub bary: [f64; 4],
    pub gram: Mat3,
    pub gram_inv: Mat3,
    pub det: f64,
    /// Orientation of the reference coordinates relative to the manifold.
    pub orientation: f64,
}

impl PointFrame {
    pub fn new(tet: usize, bary: [f64; 4], geom: &TetGeometry) -> Self {
        Self {
            tet,
            bary,
            gram: geom.gram,
            gram_inv: geom.gram_inv,
            det: geom.det,
            orientation: geom.orientation,
        }
    }

    /// Frame with an arbitrary SPD metric, outside any mesh.
    pub fn from_metric(gram: Mat3, orientation: f64) -> Result<Self, DecError> {
        let g = TetGeometry::from_gram(gram, orientation).ok_or(DecError::NotPositiveDefinite)?;
        Ok(Self::new(0, [0.25; 4], &g))
    }

    pub fn euclidean() -> Self {
        Self::from_metric([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 1.0)
            .expect("identity is SPD")
    }

    fn sqrt_det(&self) -> f64 {
        self.det.sqrt()
    }

    /// Hodge star.
    pub fn star(&self, form: PointForm) -> PointForm {
        let o = self.orientation;
        let s = self.sqrt_det();
        match form {
            PointForm::Zero(f) => PointForm::Three(o * s * f),
            PointForm::One(a) => PointForm::Two(mat_vec(&self.gram_inv, a).map(|x| o * s * x)),
            PointForm::Two(w) => PointForm::One(mat_vec(&self.gram, w).map(|x| o * x / s)),
            PointForm::Three(h) => PointForm::Zero(o * h / s),
        }
    }

    /// Exterior product; degree above three is an error.
    pub fn wedge(&self, a: PointForm, b: PointForm) -> Result<PointForm, DecError> {
        use PointForm::*;
        let out = match (a, b) {
            (Zero(f), x) | (x, Zero(f)) => x.scale(f),
            (One(u), One(v)) => Two(cross(u, v)),
            (One(u), Two(w)) | (Two(w), One(u)) => Three(dot3(u, w)),
            _ => return Err(DecError::DegreeOverflow(a.degree() + b.degree())),
        };
        Ok(out)
    }

    /// Metric dual of a covector.
    pub fn sharp(&self, a: Vec3) -> Vec3 {
        mat_vec(&self.gram_inv, a)
    }

    /// Metric dual of a vector.
    pub fn flat(&self, v: Vec3) -> Vec3 {
        mat_vec(&self.gram, v)
    }

    /// Interior product `i_Y`.
    pub fn interior(&self, y: Vec3, form: PointForm) -> Result<PointForm, DecError> {
        match form {
            PointForm::Zero(_) => Err(DecError::DegreeUnderflow),
            PointForm::One(a) => Ok(PointForm::Zero(dot3(a, y))),
            PointForm::Two(w) => Ok(PointForm::One(cross(w, y))),
            PointForm::Three(h) => Ok(PointForm::Two(y.map(|x| h * x))),
        }
    }

    /// Pointwise norm.
    pub fn norm(&self, form: PointForm) -> f64 {
        match form {
            PointForm::Zero(f) => f.abs(),
            PointForm::One(a) => dot3(a, mat_vec(&self.gram_inv, a)).max(0.0).sqrt(),
            PointForm::Two(w) => (dot3(w, mat_vec(&self.gram, w)) / self.det).max(0.0).sqrt(),
            PointForm::Three(h) => h.abs() / self.sqrt_det(),
        }
    }

    /// Orthonormal frame: columns `Fᵢ` with `FᵀGF = I`, positively oriented
    /// with respect to the reference coordinates.
    pub fn orthonormal_frame(&self) -> [Vec3; 3] {
        // Gram–Schmidt of the coordinate vectors in the metric G.
        let mut f: [Vec3; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..i {
                let c = dot3(f[i], mat_vec(&self.gram, f[j]));
                for k in 0..3 {
                    f[i][k] -= c * f[j][k];
                }
            }
            let n = dot3(f[i], mat_vec(&self.gram, f[i])).sqrt();
            f[i] = f[i].map(|x| x / n);
        }
        f
    }

    /// Comass: supremum of the form over orthonormal
    /// argument tuples, computed from the orthonormal-frame components.
    pub fn comass(&self, form: PointForm) -> f64 {
        let f = self.orthonormal_frame();
        match form {
            PointForm::Zero(v) => v.abs(),
            PointForm::One(a) => {
                let c = f.map(|fi| dot3(a, fi));
                dot3(c, c).sqrt()
            }
            PointForm::Two(w) => {
                // Skew matrix Ωᵢⱼ = ω(Fᵢ, Fⱼ); its singular values are (s, s, 0)
                // with s the length of its axial vector.
                let axial = [
                    dot3(w, cross(f[1], f[2])),
                    dot3(w, cross(f[2], f[0])),
                    dot3(w, cross(f[0], f[1])),
                ];
                dot3(axial, axial).sqrt()
            }
            PointForm::Three(h) => (h * dot3(cross(f[0], f[1]), f[2])).abs(),
        }
    }

    /// Evaluates a 2-form on two vectors.
    pub fn eval2(w: Vec3, u: Vec3, v: Vec3) -> f64 {
        dot3(w, cross(u, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_of_first_coframe_vector() {
        let p = PointFrame::euclidean();
        assert_eq!(p.star(PointForm::One([1.0, 0.0, 0.0])), PointForm::Two([1.0, 0.0, 0.0]));
        let e23 = p.wedge(PointForm::One([0.0, 1.0, 0.0]), PointForm::One([0.0, 0.0, 1.0])).unwrap();
        assert_eq!(e23, PointForm::Two([1.0, 0.0, 0.0]));
    }

    #[test]
    fn interior_matches_star_formula() {
        let p = PointFrame::euclidean();
        let y = [1.0, 0.0, 0.0];
        let beta = PointForm::One([1.0, 2.0, 0.0]);
        assert_eq!(p.interior(y, beta).unwrap(), PointForm::Zero(1.0));
        let rhs = p.star(p.wedge(PointForm::One(p.flat(y)), p.star(beta)).unwrap());
        assert!(rhs.distance(&PointForm::Zero(1.0)).unwrap() < 1e-15);
    }

    #[test]
    fn wedge_beyond_dimension_fails() {
        let p = PointFrame::euclidean();
        let r = p.wedge(PointForm::Two([1.0, 0.0, 0.0]), PointForm::Two([0.0, 1.0, 0.0]));
        assert!(matches!(r, Err(DecError::DegreeOverflow(4))));
    }

    #[test]
    fn decomposable_two_form_has_unit_mass() {
        let p = PointFrame::euclidean();
        assert!((p.comass(PointForm::Two([0.0, 0.0, 1.0])) - 1.0).abs() < 1e-15);
    }
}
