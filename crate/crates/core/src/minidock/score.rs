use crate::geom::Vec3;
use crate::molio::{Element, Molecule, Pocket, Pose, Receptor};
use serde::{Deserialize, Serialize};

pub const VDW_EPSILON: f64 = 0.2;
pub const VDW_CUTOFF: f64 = 8.0;
pub const ELEC_CUTOFF: f64 = 12.0;
pub const COULOMB_CONSTANT: f64 = 332.0;
pub const HBOND_MIN: f64 = 2.6;
pub const HBOND_MAX: f64 = 3.4;
pub const HBOND_WELL: f64 = -1.0;

/// Per-term energies of one pose. `total` is the plain sum of the four
/// terms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreTerms {
    pub vdw: f64,
    pub electrostatic: f64,
    pub hbond: f64,
    pub pocket_confinement: f64,
    pub total: f64,
}

impl ScoreTerms {
    fn finish(mut self) -> Self {
        self.total = self.vdw + self.electrostatic + self.hbond + self.pocket_confinement;
        self
    }
}

/// Lennard-Jones sigma for an element pair; the well minimum sits at the
/// summed van der Waals radii.
pub(crate) fn lj_sigma(a: Element, b: Element) -> f64 {
    (a.vdw_radius() + b.vdw_radius()) * 2f64.powf(-1.0 / 6.0)
}

pub(crate) fn lj_pair(sigma: f64, r: f64) -> f64 {
    let s6 = (sigma / r).powi(6);
    4.0 * VDW_EPSILON * (s6 * s6 - s6)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SiteType {
    pub element: Element,
    pub charge: f64,
    pub donor: bool,
    pub acceptor: bool,
}

impl SiteType {
    fn of(atom: &crate::molio::Atom) -> Self {
        Self {
            element: atom.element,
            charge: atom.formal_charge as f64,
            donor: atom.is_hbond_donor,
            acceptor: atom.is_hbond_acceptor,
        }
    }
}

/// Uniform cubic cell grid over receptor heavy atoms, cell edge equal to
/// the largest cutoff.
#[derive(Debug, Clone)]
struct CellGrid {
    origin: Vec3,
    cell: f64,
    dims: [usize; 3],
    cells: Vec<Vec<u32>>,
}

impl CellGrid {
    fn new(points: &[Vec3], cell: f64) -> Self {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        if points.is_empty() {
            lo = Vec3::zeros();
            hi = Vec3::zeros();
        }
        let dims = [0, 1, 2].map(|k| (((hi[k] - lo[k]) / cell).floor() as usize) + 1);
        let mut cells = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        let mut grid = Self {
            origin: lo,
            cell,
            dims,
            cells: Vec::new(),
        };
        for (i, p) in points.iter().enumerate() {
            let c = grid.cell_of(p);
            cells[grid.flat(c)].push(i as u32);
        }
        grid.cells = cells;
        grid
    }

    fn cell_of(&self, p: &Vec3) -> [i64; 3] {
        [0, 1, 2].map(|k| ((p[k] - self.origin[k]) / self.cell).floor() as i64)
    }

    fn flat(&self, c: [i64; 3]) -> usize {
        (c[0] as usize * self.dims[1] + c[1] as usize) * self.dims[2] + c[2] as usize
    }

    fn for_each_near(&self, p: &Vec3, mut f: impl FnMut(usize)) {
        let c = self.cell_of(p);
        for dx in -1..=1 {
            let x = c[0] + dx;
            if x < 0 || x >= self.dims[0] as i64 {
                continue;
            }
            for dy in -1..=1 {
                let y = c[1] + dy;
                if y < 0 || y >= self.dims[1] as i64 {
                    continue;
                }
                for dz in -1..=1 {
                    let z = c[2] + dz;
                    if z < 0 || z >= self.dims[2] as i64 {
                        continue;
                    }
                    for &i in &self.cells[self.flat([x, y, z])] {
                        f(i as usize);
                    }
                }
            }
        }
    }
}

/// Precomputed scoring context for one (receptor, pocket, ligand) triple.
#[derive(Debug, Clone)]
pub struct Scorer {
    rec_pos: Vec<Vec3>,
    rec_type: Vec<SiteType>,
    lig_type: Vec<SiteType>,
    grid: CellGrid,
    center: Vec3,
    radius: f64,
}

impl Scorer {
    pub fn new(receptor: &Receptor, pocket: &Pocket, mol: &Molecule) -> Self {
        let heavy: Vec<_> = receptor.atoms.iter().filter(|a| a.atom.is_heavy()).collect();
        let rec_pos: Vec<Vec3> = heavy.iter().map(|a| a.atom.position).collect();
        let rec_type = heavy.iter().map(|a| SiteType::of(&a.atom)).collect();
        let lig_type = mol.heavy_atoms().into_iter().map(SiteType::of).collect();
        let grid = CellGrid::new(&rec_pos, ELEC_CUTOFF);
        Self {
            rec_pos,
            rec_type,
            lig_type,
            grid,
            center: pocket.center,
            radius: pocket.radius,
        }
    }

    pub fn ligand_len(&self) -> usize {
        self.lig_type.len()
    }

    pub fn score_coords(&self, coords: &[Vec3]) -> ScoreTerms {
        debug_assert_eq!(coords.len(), self.lig_type.len());
        let mut t = ScoreTerms::default();
        for (x, lt) in coords.iter().zip(&self.lig_type) {
            self.grid.for_each_near(x, |j| {
                let r = (x - self.rec_pos[j]).norm();
                if r >= ELEC_CUTOFF {
                    return;
                }
                let rt = &self.rec_type[j];
                if r < VDW_CUTOFF {
                    t.vdw += lj_pair(lj_sigma(lt.element, rt.element), r);
                }
                if lt.charge != 0.0 && rt.charge != 0.0 {
                    t.electrostatic += COULOMB_CONSTANT * lt.charge * rt.charge / (4.0 * r * r);
                }
                if (HBOND_MIN..=HBOND_MAX).contains(&r) && ((lt.donor && rt.acceptor) || (lt.acceptor && rt.donor)) {
                    t.hbond += HBOND_WELL;
                }
            });
            let excess = ((x - self.center).norm() - self.radius).max(0.0);
            t.pocket_confinement += excess * excess;
        }
        t.finish()
    }

    pub fn score(&self, pose: &Pose) -> ScoreTerms {
        self.score_coords(&pose.coordinates)
    }
}

/// Scores a pose against a receptor pocket.
///
/// vdw: 12-6 Lennard-Jones with epsilon 0.2 and sigma from summed vdW
/// radii, 8 Å cutoff. electrostatic: 332 qi qj / (4 r · r), 12 Å cutoff.
/// hbond: -1 per ligand/receptor donor-acceptor pair at 2.6-3.4 Å.
/// pocket_confinement: squared excursion of each ligand atom beyond the
/// pocket sphere. Hydrogens are ignored on both sides.
pub fn score_pose(receptor: &Receptor, pocket: &Pocket, mol: &Molecule, pose: &Pose) -> ScoreTerms {
    Scorer::new(receptor, pocket, mol).score(pose)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lj_root_is_exactly_zero() {
        let s = lj_sigma(Element::C, Element::N);
        assert_eq!(lj_pair(s, s), 0.0);
    }

    #[test]
    fn lj_minimum_at_summed_radii() {
        let s = lj_sigma(Element::C, Element::C);
        let rmin = 3.4;
        let e = lj_pair(s, rmin);
        assert!((e + VDW_EPSILON).abs() < 1e-12);
        assert!(lj_pair(s, rmin - 0.01) > e && lj_pair(s, rmin + 0.01) > e);
    }
}
