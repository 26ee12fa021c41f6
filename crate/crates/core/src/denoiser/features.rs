use crate::geom::Vec3;
use crate::molio::{BondOrder, Element, Molecule, Pocket, Receptor};
use crate::{Error, Result};

/// Per-atom input features: heavy-element one-hot, donor, acceptor,
/// formal charge.
pub const N_FEATURES: usize = 12;
/// Ligand pair types: unbonded, single, double, triple, aromatic.
pub const N_BOND_TYPES: usize = 5;
/// Receptor atoms kept as pocket context, nearest to the pocket center.
pub const POCKET_CONTEXT: usize = 128;

pub type Features = [f64; N_FEATURES];

pub fn atom_features(element: Element, donor: bool, acceptor: bool, charge: i32) -> Features {
    let mut f = [0.0; N_FEATURES];
    if let Some(k) = element.heavy_index() {
        f[k] = 1.0;
    }
    f[9] = donor as u8 as f64;
    f[10] = acceptor as u8 as f64;
    f[11] = charge as f64;
    f
}

/// Coordinate-independent model input for one complex. Positions are
/// stored relative to `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexInput {
    pub center: Vec3,
    pub ligand: Vec<Features>,
    /// Row-major n×n pair types.
    pub pair_types: Vec<u8>,
    pub pocket: Vec<Features>,
    pub pocket_positions: Vec<Vec3>,
}

impl ComplexInput {
    pub fn new(receptor: &Receptor, pocket: &Pocket, mol: &Molecule) -> Result<Self> {
        let heavy = mol.heavy_indices();
        if heavy.is_empty() {
            return Err(Error::Contract(format!("'{}' has no heavy atoms", mol.name)));
        }
        let n = heavy.len();
        let mut slot = vec![usize::MAX; mol.atoms.len()];
        for (k, &i) in heavy.iter().enumerate() {
            slot[i] = k;
        }
        let mut pair_types = vec![0u8; n * n];
        for b in &mol.bonds {
            let (i, j) = (slot[b.a], slot[b.b]);
            if i == usize::MAX || j == usize::MAX {
                continue;
            }
            let code = match b.order {
                BondOrder::Single => 1,
                BondOrder::Double => 2,
                BondOrder::Triple => 3,
                BondOrder::Aromatic => 4,
            };
            pair_types[i * n + j] = code;
            pair_types[j * n + i] = code;
        }
        let ligand = heavy
            .iter()
            .map(|&i| {
                let a = &mol.atoms[i];
                atom_features(a.element, a.is_hbond_donor, a.is_hbond_acceptor, a.formal_charge)
            })
            .collect();

        let mut context: Vec<(f64, usize)> = receptor
            .atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.atom.is_heavy())
            .map(|(i, a)| ((a.atom.position - pocket.center).norm(), i))
            .collect();
        context.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        context.truncate(POCKET_CONTEXT);
        let pocket_feats = context
            .iter()
            .map(|&(_, i)| {
                let a = &receptor.atoms[i].atom;
                atom_features(a.element, a.is_hbond_donor, a.is_hbond_acceptor, a.formal_charge)
            })
            .collect();
        let pocket_positions = context
            .iter()
            .map(|&(_, i)| receptor.atoms[i].atom.position - pocket.center)
            .collect();
        Ok(Self {
            center: pocket.center,
            ligand,
            pair_types,
            pocket: pocket_feats,
            pocket_positions,
        })
    }

    pub fn n_ligand(&self) -> usize {
        self.ligand.len()
    }

    pub fn n_pocket(&self) -> usize {
        self.pocket.len()
    }

    pub fn pair_type(&self, i: usize, j: usize) -> usize {
        self.pair_types[i * self.ligand.len() + j] as usize
    }
}
