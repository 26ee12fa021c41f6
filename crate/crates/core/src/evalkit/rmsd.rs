use crate::geom::Vec3;
use crate::molio::Pose;
use crate::{Error, Result};

/// Plain RMSD between two coordinate lists in a shared frame (no
/// superposition).
pub fn rmsd_coords(a: &[Vec3], b: &[Vec3]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!("rmsd over {} vs {} atoms", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::Contract("rmsd over zero atoms".into()));
    }
    let sum: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_squared()).sum();
    Ok((sum / a.len() as f64).sqrt())
}

/// Heavy-atom RMSD; poses share atom order and receptor frame.
pub fn rmsd(reference: &Pose, predicted: &Pose) -> Result<f64> {
    rmsd_coords(&reference.coordinates, &predicted.coordinates)
}
