//! Molecular data types, file formats and ligand topology.

mod element;
mod ligand;
mod receptor;
mod topology;

pub use element::Element;
pub use ligand::{parse_ligand, write_ligand, write_pose};
pub use receptor::{parse_receptor, three_to_one, write_receptor};
pub use topology::{perceive_topology, HeavyGraph};

use crate::geom::Vec3;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub element: Element,
    pub position: Vec3,
    pub formal_charge: i32,
    pub is_hbond_donor: bool,
    pub is_hbond_acceptor: bool,
}

impl Atom {
    pub fn new(element: Element, position: Vec3) -> Self {
        Self {
            element,
            position,
            formal_charge: 0,
            is_hbond_donor: false,
            is_hbond_acceptor: element.is_polar(),
        }
    }

    pub fn is_heavy(&self) -> bool {
        self.element.is_heavy()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            1 => Some(BondOrder::Single),
            2 => Some(BondOrder::Double),
            3 => Some(BondOrder::Triple),
            4 => Some(BondOrder::Aromatic),
            _ => None,
        }
    }

    pub fn code(self) -> u32 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

/// A ligand: atoms, bonds and perceived topology.
///
/// `rings` and `rotatable_bonds` are empty until [`perceive_topology`] runs.
/// Rings hold atom indices in cyclic order; rotatable bonds are indices into
/// `bonds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    pub name: String,
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    pub rings: Vec<Vec<usize>>,
    pub rotatable_bonds: Vec<usize>,
}

impl Molecule {
    /// Atom indices of heavy atoms in file order. Pose coordinates follow
    /// this order.
    pub fn heavy_indices(&self) -> Vec<usize> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_heavy())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn heavy_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.is_heavy()).count()
    }

    pub fn heavy_atoms(&self) -> Vec<&Atom> {
        self.atoms.iter().filter(|a| a.is_heavy()).collect()
    }

    pub fn heavy_positions(&self) -> Vec<Vec3> {
        self.atoms.iter().filter(|a| a.is_heavy()).map(|a| a.position).collect()
    }

    /// The molecule's own heavy-atom coordinates as a pose.
    pub fn to_pose(&self, provenance: Provenance) -> Pose {
        Pose::new(self.heavy_positions(), provenance)
    }

    /// Returns a copy with heavy atoms moved to `coords`. Each hydrogen
    /// follows the displacement of the heavy atom it is bonded to.
    pub fn with_heavy_coordinates(&self, coords: &[Vec3]) -> Result<Molecule> {
        let heavy = self.heavy_indices();
        if heavy.len() != coords.len() {
            return Err(Error::Contract(format!(
                "pose has {} coordinates, molecule '{}' has {} heavy atoms",
                coords.len(),
                self.name,
                heavy.len()
            )));
        }
        let mut out = self.clone();
        let mut shift = vec![Vec3::zeros(); self.atoms.len()];
        for (k, &i) in heavy.iter().enumerate() {
            shift[i] = coords[k] - self.atoms[i].position;
            out.atoms[i].position = coords[k];
        }
        for bond in &self.bonds {
            for (h, p) in [(bond.a, bond.b), (bond.b, bond.a)] {
                if !self.atoms[h].is_heavy() && self.atoms[p].is_heavy() {
                    out.atoms[h].position = self.atoms[h].position + shift[p];
                }
            }
        }
        Ok(out)
    }

    /// Recomputes donor/acceptor flags: N/O with a bonded hydrogen are
    /// donors, every N/O is an acceptor.
    pub fn assign_hbond_roles(&mut self) {
        let mut has_h = vec![false; self.atoms.len()];
        for bond in &self.bonds {
            if self.atoms[bond.a].element == Element::H {
                has_h[bond.b] = true;
            }
            if self.atoms[bond.b].element == Element::H {
                has_h[bond.a] = true;
            }
        }
        for (atom, h) in self.atoms.iter_mut().zip(has_h) {
            let polar = atom.element.is_polar();
            atom.is_hbond_acceptor = polar;
            atom.is_hbond_donor = polar && h;
        }
    }

    /// Checks index validity, self bonds and duplicate bonds.
    pub fn validate_bonds(&self) -> Result<()> {
        let n = self.atoms.len();
        let mut seen = std::collections::HashSet::new();
        for (k, bond) in self.bonds.iter().enumerate() {
            if bond.a >= n || bond.b >= n {
                return Err(Error::Contract(format!("bond {k} references a missing atom")));
            }
            if bond.a == bond.b {
                return Err(Error::Contract(format!("bond {k} is a self bond")));
            }
            let key = (bond.a.min(bond.b), bond.a.max(bond.b));
            if !seen.insert(key) {
                return Err(Error::Contract(format!("bond {k} duplicates an earlier bond")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceptorAtom {
    pub atom: Atom,
    pub serial: u32,
    pub name: String,
    pub residue_name: String,
    pub chain: char,
    pub residue_seq: i32,
}

impl ReceptorAtom {
    /// Backbone-class atoms are N, CA, C, O and OXT.
    pub fn is_backbone(&self) -> bool {
        matches!(self.name.as_str(), "N" | "CA" | "C" | "O" | "OXT")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pocket {
    pub center: Vec3,
    pub radius: f64,
    pub member_atoms: Vec<usize>,
    pub buriedness_score: f64,
}

impl Pocket {
    pub const MIN_RADIUS: f64 = 4.0;
    pub const MAX_RADIUS: f64 = 20.0;

    /// Builds a pocket whose members are the receptor heavy atoms within
    /// `radius + 2` Å of `center`.
    pub fn around(receptor: &Receptor, center: Vec3, radius: f64, buriedness_score: f64) -> Self {
        let radius = radius.clamp(Self::MIN_RADIUS, Self::MAX_RADIUS);
        let member_atoms = receptor
            .atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.atom.is_heavy() && (a.atom.position - center).norm() <= radius + 2.0)
            .map(|(i, _)| i)
            .collect();
        Pocket {
            center,
            radius,
            member_atoms,
            buriedness_score,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSequence {
    pub chain: char,
    pub sequence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Receptor {
    pub name: String,
    pub atoms: Vec<ReceptorAtom>,
    pub sequences: Vec<ChainSequence>,
    pub pockets: Vec<Pocket>,
    pub family_label: Option<String>,
}

impl Receptor {
    pub fn heavy_indices(&self) -> Vec<usize> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.atom.is_heavy())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn heavy_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.atom.is_heavy()).count()
    }

    /// All chain sequences concatenated in chain order; used for identity.
    pub fn full_sequence(&self) -> String {
        self.sequences.iter().map(|c| c.sequence.as_str()).collect()
    }

    /// Recomputes the per-chain sequences from residue names.
    pub fn rebuild_sequences(&mut self) {
        self.sequences = receptor::derive_sequences(&self.atoms);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Generated,
    Crystal,
    Predicted,
}

/// A ligand conformation: one coordinate per heavy atom, in the order of
/// [`Molecule::heavy_indices`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub coordinates: Vec<Vec3>,
    pub score: f64,
    pub provenance: Provenance,
}

impl Pose {
    pub fn new(coordinates: Vec<Vec3>, provenance: Provenance) -> Self {
        Self {
            coordinates,
            score: 0.0,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coordinates.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.coordinates.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    pub fn centroid(&self) -> Vec3 {
        crate::geom::centroid(&self.coordinates)
    }

    pub fn translated(&self, shift: Vec3) -> Pose {
        Pose {
            coordinates: self.coordinates.iter().map(|c| c + shift).collect(),
            ..self.clone()
        }
    }

    /// Enforces the pose invariants against `mol`.
    pub fn check_against(&self, mol: &Molecule) -> Result<()> {
        let n = mol.heavy_count();
        if self.coordinates.len() != n {
            return Err(Error::Contract(format!(
                "pose has {} coordinates but '{}' has {} heavy atoms",
                self.coordinates.len(),
                mol.name,
                n
            )));
        }
        if !self.is_finite() {
            return Err(Error::Contract("pose has non-finite coordinates".into()));
        }
        Ok(())
    }
}

/// Three-letter residue name for a one-letter code (`UNK` if unknown).
pub fn receptor_residue_name(code: char) -> &'static str {
    receptor::one_to_three(code)
}
