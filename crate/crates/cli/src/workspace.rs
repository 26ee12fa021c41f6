//! On-disk layout shared by the subcommands.
//!
//! A complex directory (written by `gen-toy`, read by `finetune`,
//! `predict` and `eval`) holds
//!
//! ```text
//! receptors/<id>.pdb   fixed-column receptor
//! ligands/<id>.mol     ligand at its reference pose
//! pockets.json         id -> pocket
//! families.json        id -> family label
//! sequences.fasta      receptor sequences
//! ```

use crate::error::CliError;
use dockforge::molio::{
    parse_ligand, parse_receptor, perceive_topology, write_ligand, write_receptor, Molecule, Pocket, Pose, Provenance,
    Receptor,
};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub struct Complex {
    pub id: String,
    pub receptor: Receptor,
    pub pocket: Pocket,
    pub molecule: Molecule,
    pub reference: Pose,
}

pub fn require_dir(path: &Path, flag: &str) -> Result<(), CliError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{flag}: directory {} not found",
            path.display()
        )))
    }
}

pub fn require_file(path: &Path, flag: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{flag}: file {} not found", path.display())))
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Files in `dir` with extension `ext`, sorted by name.
pub fn files_with_ext(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == ext))
        .collect();
    paths.sort();
    Ok(paths)
}

fn with_path<T>(path: &Path, r: dockforge::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

/// Reads a receptor; its name is the file stem.
pub fn read_receptor(path: &Path) -> Result<Receptor, CliError> {
    let mut r = with_path(path, parse_receptor(&std::fs::read_to_string(path)?))?;
    r.name = stem(path);
    Ok(r)
}

/// Reads a ligand with perceived topology; its name is the file stem.
pub fn read_ligand(path: &Path) -> Result<Molecule, CliError> {
    let parsed = with_path(path, parse_ligand(&std::fs::read_to_string(path)?))?;
    let mut mol = with_path(path, perceive_topology(&parsed))?;
    mol.name = stem(path);
    Ok(mol)
}

pub fn read_receptors(dir: &Path) -> Result<Vec<Receptor>, CliError> {
    files_with_ext(dir, "pdb")?.iter().map(|p| read_receptor(p)).collect()
}

pub fn read_ligands(dir: &Path) -> Result<Vec<Molecule>, CliError> {
    files_with_ext(dir, "mol")?.iter().map(|p| read_ligand(p)).collect()
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// FASTA text; `>` lines name records, other lines are concatenated.
pub fn parse_fasta(text: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(name) = line.strip_prefix('>') {
            out.push((name.trim().to_string(), String::new()));
        } else {
            if out.is_empty() {
                out.push((format!("seq{}", out.len()), String::new()));
            }
            out.last_mut().unwrap().1.push_str(line);
        }
    }
    out
}

pub fn write_complex_dir(dir: &Path, complexes: &[Complex]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir.join("receptors"))?;
    std::fs::create_dir_all(dir.join("ligands"))?;
    let mut pockets = BTreeMap::new();
    let mut families = BTreeMap::new();
    let mut fasta = String::new();
    for c in complexes {
        std::fs::write(
            dir.join("receptors").join(format!("{}.pdb", c.id)),
            write_receptor(&c.receptor),
        )?;
        let placed = c.molecule.with_heavy_coordinates(&c.reference.coordinates)?;
        std::fs::write(dir.join("ligands").join(format!("{}.mol", c.id)), write_ligand(&placed))?;
        pockets.insert(c.id.clone(), c.pocket.clone());
        if let Some(f) = &c.receptor.family_label {
            families.insert(c.id.clone(), f.clone());
        }
        let _ = writeln!(fasta, ">{}\n{}", c.id, c.receptor.full_sequence());
    }
    write_json(&dir.join("pockets.json"), &pockets)?;
    write_json(&dir.join("families.json"), &families)?;
    std::fs::write(dir.join("sequences.fasta"), fasta)?;
    Ok(())
}

/// Loads every complex listed in `pockets.json`, in id order.
pub fn read_complex_dir(dir: &Path) -> Result<Vec<Complex>, CliError> {
    let pockets: BTreeMap<String, Pocket> = read_json(&dir.join("pockets.json"))?;
    let families: BTreeMap<String, String> = if dir.join("families.json").is_file() {
        read_json(&dir.join("families.json"))?
    } else {
        BTreeMap::new()
    };
    pockets
        .into_iter()
        .map(|(id, pocket)| {
            let mut receptor = read_receptor(&dir.join("receptors").join(format!("{id}.pdb")))?;
            receptor.family_label = families.get(&id).cloned();
            receptor.pockets = vec![pocket.clone()];
            let molecule = read_ligand(&dir.join("ligands").join(format!("{id}.mol")))?;
            let reference = molecule.to_pose(Provenance::Crystal);
            Ok(Complex {
                id,
                receptor,
                pocket,
                molecule,
                reference,
            })
        })
        .collect()
}
