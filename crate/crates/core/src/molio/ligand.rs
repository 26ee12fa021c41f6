//! V2000 connection-table reader and writer.

use super::{Atom, Bond, BondOrder, Element, Molecule, Pose};
use crate::{Error, Result};
use nalgebra::Vector3;
use std::fmt::Write as _;

fn field(line: &str, start: usize, end: usize) -> Option<&str> {
    let end = end.min(line.len());
    line.get(start..end).map(str::trim)
}

fn charge_from_code(code: i32) -> i32 {
    match code {
        1 => 3,
        2 => 2,
        3 => 1,
        5 => -1,
        6 => -2,
        7 => -3,
        _ => 0,
    }
}

fn code_from_charge(charge: i32) -> i32 {
    match charge {
        3 => 1,
        2 => 2,
        1 => 3,
        -1 => 5,
        -2 => 6,
        -3 => 7,
        _ => 0,
    }
}

/// Parses a V2000 connection table (the first record of an SD file).
///
/// Atoms and bonds are returned exactly as listed. Hydrogens are kept;
/// donor/acceptor roles are assigned, topology is left empty.
pub fn parse_ligand(text: &str) -> Result<Molecule> {
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    if lines.len() < 4 {
        return Err(Error::parse(lines.len().max(1), "truncated header block"));
    }
    let name = lines[0].trim().to_string();
    let counts = lines[3];
    let line_no = 4;
    if !counts.contains("V2000") {
        return Err(Error::parse(line_no, "counts line lacks V2000 tag"));
    }
    let n_atoms: usize = field(counts, 0, 3)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(line_no, "malformed atom count"))?;
    let n_bonds: usize = field(counts, 3, 6)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(line_no, "malformed bond count"))?;
    if lines.len() < 4 + n_atoms + n_bonds {
        return Err(Error::parse(lines.len(), "file ends before atom/bond blocks"));
    }

    let mut atoms = Vec::with_capacity(n_atoms);
    for k in 0..n_atoms {
        let ln = 4 + k;
        let line = lines[ln];
        let coord = |s: usize, e: usize, axis: &str| -> Result<f64> {
            let v: f64 = field(line, s, e)
                .filter(|t| !t.is_empty())
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(ln + 1, format!("bad {axis} coordinate")))?;
            if !v.is_finite() {
                return Err(Error::parse(ln + 1, format!("non-finite {axis} coordinate")));
            }
            Ok(v)
        };
        let x = coord(0, 10, "x")?;
        let y = coord(10, 20, "y")?;
        let z = coord(20, 30, "z")?;
        let symbol = field(line, 31, 34)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::parse(ln + 1, "missing element symbol"))?;
        let element: Element = symbol.parse().map_err(|e: String| Error::parse(ln + 1, e))?;
        let charge_code: i32 = match field(line, 36, 39) {
            Some(t) if !t.is_empty() => t.parse().map_err(|_| Error::parse(ln + 1, "bad charge field"))?,
            _ => 0,
        };
        let mut atom = Atom::new(element, Vector3::new(x, y, z));
        atom.formal_charge = charge_from_code(charge_code);
        atoms.push(atom);
    }

    let mut bonds = Vec::with_capacity(n_bonds);
    for k in 0..n_bonds {
        let ln = 4 + n_atoms + k;
        let line = lines[ln];
        let idx = |s: usize, e: usize| -> Result<usize> {
            field(line, s, e)
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| Error::parse(ln + 1, "malformed bond line"))
        };
        let a = idx(0, 3)?;
        let b = idx(3, 6)?;
        let code = idx(6, 9)?;
        if a == 0 || b == 0 || a > n_atoms || b > n_atoms {
            return Err(Error::parse(
                ln + 1,
                format!("bond references atom outside 1..={n_atoms}"),
            ));
        }
        if a == b {
            return Err(Error::parse(ln + 1, "self bond"));
        }
        let order = BondOrder::from_code(code as u32)
            .ok_or_else(|| Error::parse(ln + 1, format!("unsupported bond type {code}")))?;
        let (a, b) = (a - 1, b - 1);
        if bonds
            .iter()
            .any(|x: &Bond| (x.a == a && x.b == b) || (x.a == b && x.b == a))
        {
            return Err(Error::parse(ln + 1, "duplicate bond"));
        }
        bonds.push(Bond { a, b, order });
    }

    // Property block: only charges are interpreted.
    for (k, line) in lines.iter().enumerate().skip(4 + n_atoms + n_bonds) {
        if line.starts_with("M  END") {
            break;
        }
        if let Some(rest) = line.strip_prefix("M  CHG") {
            let nums: Vec<i64> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::parse(k + 1, "bad M  CHG entry")))
                .collect::<Result<_>>()?;
            let count = *nums.first().ok_or_else(|| Error::parse(k + 1, "empty M  CHG"))? as usize;
            if nums.len() != 1 + 2 * count {
                return Err(Error::parse(k + 1, "M  CHG entry count mismatch"));
            }
            for pair in nums[1..].chunks(2) {
                let idx = pair[0] as usize;
                if idx == 0 || idx > n_atoms {
                    return Err(Error::parse(k + 1, "M  CHG atom index out of range"));
                }
                atoms[idx - 1].formal_charge = pair[1] as i32;
            }
        }
    }

    let mut mol = Molecule {
        name,
        atoms,
        bonds,
        rings: Vec::new(),
        rotatable_bonds: Vec::new(),
    };
    mol.assign_hbond_roles();
    Ok(mol)
}

/// Serialises `mol` with its current coordinates.
pub fn write_ligand(mol: &Molecule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", mol.name);
    let _ = writeln!(out, "  {:<8}3D", "dockforg");
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>3}{:>3}  0  0  0  0  0  0  0  0999 V2000",
        mol.atoms.len(),
        mol.bonds.len()
    );
    for atom in &mol.atoms {
        let p = atom.position;
        let _ = writeln!(
            out,
            "{:>10.4}{:>10.4}{:>10.4} {:<3} 0{:>3}  0  0  0  0  0  0  0  0  0  0",
            clean_zero(p.x),
            clean_zero(p.y),
            clean_zero(p.z),
            atom.element.symbol(),
            code_from_charge(atom.formal_charge)
        );
    }
    for bond in &mol.bonds {
        let _ = writeln!(
            out,
            "{:>3}{:>3}{:>3}  0  0  0  0",
            bond.a + 1,
            bond.b + 1,
            bond.order.code()
        );
    }
    let charged: Vec<(usize, i32)> = mol
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.formal_charge != 0)
        .map(|(i, a)| (i + 1, a.formal_charge))
        .collect();
    for chunk in charged.chunks(8) {
        let _ = write!(out, "M  CHG{:>3}", chunk.len());
        for (i, c) in chunk {
            let _ = write!(out, " {:>3} {:>3}", i, c);
        }
        let _ = writeln!(out);
    }
    out.push_str("M  END\n");
    out
}

// Avoids emitting "-0.0000", which would break byte-level determinism
// between runs that differ only in the sign of a zero.
fn clean_zero(v: f64) -> f64 {
    if v.abs() < 5e-5 {
        0.0
    } else {
        v
    }
}

/// Writes `mol` with heavy-atom coordinates replaced by `pose`.
pub fn write_pose(mol: &Molecule, pose: &Pose) -> Result<String> {
    pose.check_against(mol)?;
    let moved = mol.with_heavy_coordinates(&pose.coordinates)?;
    Ok(write_ligand(&moved))
}
