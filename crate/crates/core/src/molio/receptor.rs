//! Fixed-column receptor records (PDB-style ATOM/HETATM lines).
//!
//! Columns (1-based, inclusive): record 1-6, serial 7-11, atom name 13-16,
//! residue name 18-20, chain 22, residue number 23-26, x 31-38, y 39-46,
//! z 47-54, element 77-78.

use super::{Atom, ChainSequence, Element, Receptor, ReceptorAtom};
use crate::{Error, Result};
use nalgebra::Vector3;
use std::fmt::Write as _;

pub fn three_to_one(residue: &str) -> char {
    match residue {
        "ALA" => 'A',
        "ARG" => 'R',
        "ASN" => 'N',
        "ASP" => 'D',
        "CYS" => 'C',
        "GLN" => 'Q',
        "GLU" => 'E',
        "GLY" => 'G',
        "HIS" => 'H',
        "ILE" => 'I',
        "LEU" => 'L',
        "LYS" => 'K',
        "MET" => 'M',
        "PHE" => 'F',
        "PRO" => 'P',
        "SER" => 'S',
        "THR" => 'T',
        "TRP" => 'W',
        "TYR" => 'Y',
        "VAL" => 'V',
        _ => 'X',
    }
}

pub(crate) fn one_to_three(code: char) -> &'static str {
    match code {
        'A' => "ALA",
        'R' => "ARG",
        'N' => "ASN",
        'D' => "ASP",
        'C' => "CYS",
        'Q' => "GLN",
        'E' => "GLU",
        'G' => "GLY",
        'H' => "HIS",
        'I' => "ILE",
        'L' => "LEU",
        'K' => "LYS",
        'M' => "MET",
        'F' => "PHE",
        'P' => "PRO",
        'S' => "SER",
        'T' => "THR",
        'W' => "TRP",
        'Y' => "TYR",
        'V' => "VAL",
        _ => "UNK",
    }
}

/// Side-chain atoms carrying a polar hydrogen in the standard residues.
fn is_named_donor(residue: &str, atom: &str) -> bool {
    matches!(
        (residue, atom),
        ("SER", "OG")
            | ("THR", "OG1")
            | ("TYR", "OH")
            | ("LYS", "NZ")
            | ("ARG", "NE")
            | ("ARG", "NH1")
            | ("ARG", "NH2")
            | ("ASN", "ND2")
            | ("GLN", "NE2")
            | ("TRP", "NE1")
            | ("HIS", "ND1")
            | ("HIS", "NE2")
            | ("CYS", "SG")
    ) || (atom == "N" && residue != "PRO")
}

pub(crate) fn derive_sequences(atoms: &[ReceptorAtom]) -> Vec<ChainSequence> {
    let mut chains: Vec<ChainSequence> = Vec::new();
    let mut last: Option<(char, i32)> = None;
    let mut seen = std::collections::HashSet::new();
    for a in atoms {
        let key = (a.chain, a.residue_seq);
        if last == Some(key) || seen.contains(&key) {
            last = Some(key);
            continue;
        }
        seen.insert(key);
        last = Some(key);
        let code = three_to_one(&a.residue_name);
        match chains.iter_mut().find(|c| c.chain == a.chain) {
            Some(c) => c.sequence.push(code),
            None => chains.push(ChainSequence {
                chain: a.chain,
                sequence: code.to_string(),
            }),
        }
    }
    chains
}

fn assign_receptor_roles(atoms: &mut [ReceptorAtom]) {
    let hydrogens: Vec<Vector3<f64>> = atoms
        .iter()
        .filter(|a| a.atom.element == Element::H)
        .map(|a| a.atom.position)
        .collect();
    for a in atoms.iter_mut() {
        let polar = a.atom.element.is_polar();
        let bound_h = hydrogens.iter().any(|h| (h - a.atom.position).norm() <= 1.2);
        a.atom.is_hbond_acceptor = polar;
        a.atom.is_hbond_donor = polar && (bound_h || is_named_donor(&a.residue_name, &a.name));
    }
}

pub fn parse_receptor(text: &str) -> Result<Receptor> {
    let mut atoms = Vec::new();
    let mut name = String::new();
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let record = line.get(0..6.min(line.len())).unwrap_or("").trim_end();
        match record {
            "ATOM" | "HETATM" => {}
            "TER" | "END" | "ENDMDL" | "MODEL" | "REMARK" => continue,
            "HEADER" => {
                name = line.get(10..).unwrap_or("").trim().to_string();
                continue;
            }
            other => {
                return Err(Error::parse(ln, format!("unsupported record '{other}'")));
            }
        }
        if line.len() < 78 {
            return Err(Error::parse(ln, "atom record shorter than 78 columns"));
        }
        let col = |s: usize, e: usize| -> Result<&str> {
            line.get(s..e)
                .ok_or_else(|| Error::parse(ln, "column boundary inside a multibyte character"))
        };
        if !col(27, 30)?.trim().is_empty() {
            return Err(Error::parse(ln, "unexpected text in columns 28-30"));
        }
        let serial: u32 = col(6, 11)?
            .trim()
            .parse()
            .map_err(|_| Error::parse(ln, "non-numeric atom serial"))?;
        let atom_name = col(12, 16)?.trim().to_string();
        let residue_name = col(17, 20)?.trim().to_string();
        let chain = col(21, 22)?.chars().next().unwrap_or(' ');
        let residue_seq: i32 = col(22, 26)?
            .trim()
            .parse()
            .map_err(|_| Error::parse(ln, "non-numeric residue number"))?;
        let coord = |s: usize, e: usize, axis: &str| -> Result<f64> {
            let v: f64 = col(s, e)?
                .trim()
                .parse()
                .map_err(|_| Error::parse(ln, format!("non-numeric {axis} coordinate")))?;
            if !v.is_finite() {
                return Err(Error::parse(ln, format!("non-finite {axis} coordinate")));
            }
            Ok(v)
        };
        let x = coord(30, 38, "x")?;
        let y = coord(38, 46, "y")?;
        let z = coord(46, 54, "z")?;
        let element: Element = col(76, 78)?.trim().parse().map_err(|e: String| Error::parse(ln, e))?;
        if atom_name.is_empty() || residue_name.is_empty() {
            return Err(Error::parse(ln, "blank atom or residue name"));
        }
        atoms.push(ReceptorAtom {
            atom: Atom::new(element, Vector3::new(x, y, z)),
            serial,
            name: atom_name,
            residue_name,
            chain,
            residue_seq,
        });
    }
    if atoms.is_empty() {
        return Err(Error::parse(1, "no atom records"));
    }
    assign_receptor_roles(&mut atoms);
    let sequences = derive_sequences(&atoms);
    Ok(Receptor {
        name,
        atoms,
        sequences,
        pockets: Vec::new(),
        family_label: None,
    })
}

pub fn write_receptor(receptor: &Receptor) -> String {
    let mut out = String::new();
    if !receptor.name.is_empty() {
        let _ = writeln!(out, "HEADER    {}", receptor.name);
    }
    for a in &receptor.atoms {
        let name = if a.name.len() < 4 {
            format!(" {:<3}", a.name)
        } else {
            a.name.clone()
        };
        let p = a.atom.position;
        let z = |v: f64| if v.abs() < 5e-4 { 0.0 } else { v };
        let _ = writeln!(
            out,
            "ATOM  {:>5} {:<4} {:>3} {}{:>4}    {:>8.3}{:>8.3}{:>8.3}  1.00  0.00          {:>2}",
            a.serial % 100_000,
            name,
            a.residue_name,
            a.chain,
            a.residue_seq,
            z(p.x),
            z(p.y),
            z(p.z),
            a.atom.element.symbol().to_uppercase()
        );
    }
    out.push_str("END\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(serial: u32, name: &str, res: &str, chain: char, seq: i32, el: &str) -> String {
        format!(
            "ATOM  {:>5} {:<4} {:>3} {}{:>4}    {:>8.3}{:>8.3}{:>8.3}  1.00  0.00          {:>2}\n",
            serial, name, res, chain, seq, serial as f64, 0.0, 0.0, el
        )
    }

    #[test]
    fn three_residue_sequence() {
        let text = [
            line(1, " CA", "GLY", 'A', 1, "C"),
            line(2, " CA", "ALA", 'A', 2, "C"),
            line(3, " CB", "ALA", 'A', 2, "C"),
            line(4, " CA", "GLY", 'A', 3, "C"),
        ]
        .concat();
        let rec = parse_receptor(&text).unwrap();
        assert_eq!(rec.full_sequence(), "GAG");
        assert_eq!(rec.atoms.len(), 4);
    }

    #[test]
    fn unknown_residue_maps_to_x() {
        let text = [line(1, " CA", "GLY", 'A', 1, "C"), line(2, " CA", "XYZ", 'A', 2, "C")].concat();
        assert_eq!(parse_receptor(&text).unwrap().full_sequence(), "GX");
    }

    #[test]
    fn two_chains_counted_separately() {
        let mut text = String::new();
        let mut serial = 1;
        for r in 1..=5 {
            text.push_str(&line(serial, " CA", "LEU", 'A', r, "C"));
            serial += 1;
        }
        for r in 1..=3 {
            text.push_str(&line(serial, " CA", "SER", 'B', r, "C"));
            serial += 1;
            text.push_str(&line(serial, " OG", "SER", 'B', r, "O"));
            serial += 1;
        }
        let rec = parse_receptor(&text).unwrap();
        assert_eq!(rec.sequences.len(), 2);
        assert_eq!(rec.sequences[0].sequence.len(), 5);
        assert_eq!(rec.sequences[1].sequence, "SSS");
        let og = rec.atoms.iter().find(|a| a.name == "OG").unwrap();
        assert!(og.atom.is_hbond_donor && og.atom.is_hbond_acceptor);
    }

    #[test]
    fn bad_coordinate_reports_line() {
        let mut text = line(1, " CA", "GLY", 'A', 1, "C");
        let mut bad = line(2, " CA", "GLY", 'A', 2, "C");
        bad.replace_range(31..38, " abc.de");
        text.push_str(&bad);
        match parse_receptor(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_line_is_misaligned() {
        let text = "ATOM      1  CA  GLY A   1       1.000   0.000   0.000\n";
        assert!(matches!(parse_receptor(text), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn write_parse_round_trip() {
        let text = [
            line(1, " N", "SER", 'A', 1, "N"),
            line(2, " CA", "SER", 'A', 1, "C"),
            line(3, " OG", "SER", 'A', 1, "O"),
        ]
        .concat();
        let rec = parse_receptor(&text).unwrap();
        let again = parse_receptor(&write_receptor(&rec)).unwrap();
        assert_eq!(rec.atoms, again.atoms);
    }
}
