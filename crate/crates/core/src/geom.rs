//! Small geometry helpers shared by docking, validity checks and the model.

use nalgebra::{Rotation3, Unit, Vector3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};

pub type Vec3 = Vector3<f64>;

pub fn centroid(points: &[Vec3]) -> Vec3 {
    if points.is_empty() {
        return Vec3::zeros();
    }
    points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / points.len() as f64
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let v: [f64; 3] = UnitSphere.sample(rng);
    Vec3::new(v[0], v[1], v[2])
}

/// Uniform point in a ball of the given radius.
pub fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vec3 {
    let dir = random_unit_vector(rng);
    let u: f64 = rng.random();
    dir * radius * u.cbrt()
}

/// Uniformly distributed random rotation (Haar measure).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation3<f64> {
    let q = nalgebra::Quaternion::new(
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
    );
    nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix()
}

/// Rotates `p` by `angle` radians about the axis through `origin` along `axis`.
pub fn rotate_about_axis(p: &Vec3, origin: &Vec3, axis: &Vec3, angle: f64) -> Vec3 {
    let rot = Rotation3::from_axis_angle(&Unit::new_normalize(*axis), angle);
    origin + rot * (p - origin)
}

/// Angle in radians at `b` in the triple a-b-c.
pub fn bond_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let u = a - b;
    let v = c - b;
    let cos = u.dot(&v) / (u.norm() * v.norm());
    cos.clamp(-1.0, 1.0).acos()
}

/// Dihedral angle a-b-c-d in radians, in (-pi, pi].
pub fn dihedral(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    let b0 = a - b;
    let b1 = c - b;
    let b2 = d - c;
    let b1n = b1.normalize();
    let v = b0 - b1n * b0.dot(&b1n);
    let w = b2 - b1n * b2.dot(&b1n);
    let x = v.dot(&w);
    let y = b1n.cross(&v).dot(&w);
    y.atan2(x)
}

/// Maximum distance of any point from the least-squares plane through them.
pub fn max_plane_deviation(points: &[Vec3]) -> f64 {
    if points.len() < 4 {
        return 0.0;
    }
    let c = centroid(points);
    let mut cov = nalgebra::Matrix3::<f64>::zeros();
    for p in points {
        let d = p - c;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let (imin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("3x3 eigenvalues");
    let normal: Vec3 = eig.eigenvectors.column(imin).into();
    points.iter().map(|p| (p - c).dot(&normal).abs()).fold(0.0, f64::max)
}

/// Fibonacci lattice of `n` near-uniform unit directions.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - y * y).sqrt();
            let theta = golden * i as f64;
            Vec3::new(r * theta.cos(), y, r * theta.sin())
        })
        .collect()
}
