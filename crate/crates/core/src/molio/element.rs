use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Supported chemical elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    H,
    C,
    N,
    O,
    S,
    P,
    F,
    Cl,
    Br,
    I,
}

impl Element {
    pub const ALL: [Element; 10] = [
        Element::H,
        Element::C,
        Element::N,
        Element::O,
        Element::S,
        Element::P,
        Element::F,
        Element::Cl,
        Element::Br,
        Element::I,
    ];

    /// Heavy elements in feature order (used for one-hot encodings).
    pub const HEAVY: [Element; 9] = [
        Element::C,
        Element::N,
        Element::O,
        Element::S,
        Element::P,
        Element::F,
        Element::Cl,
        Element::Br,
        Element::I,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Element::H => "H",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::S => "S",
            Element::P => "P",
            Element::F => "F",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    pub fn is_heavy(self) -> bool {
        self != Element::H
    }

    pub fn is_polar(self) -> bool {
        matches!(self, Element::N | Element::O)
    }

    /// Bondi van der Waals radius in Å.
    pub fn vdw_radius(self) -> f64 {
        match self {
            Element::H => 1.20,
            Element::C => 1.70,
            Element::N => 1.55,
            Element::O => 1.52,
            Element::S => 1.80,
            Element::P => 1.80,
            Element::F => 1.47,
            Element::Cl => 1.75,
            Element::Br => 1.85,
            Element::I => 1.98,
        }
    }

    /// Single-bond covalent radius in Å.
    pub fn covalent_radius(self) -> f64 {
        match self {
            Element::H => 0.31,
            Element::C => 0.76,
            Element::N => 0.71,
            Element::O => 0.66,
            Element::S => 1.05,
            Element::P => 1.07,
            Element::F => 0.57,
            Element::Cl => 1.02,
            Element::Br => 1.20,
            Element::I => 1.39,
        }
    }

    /// Index into [`Element::HEAVY`], `None` for hydrogen.
    pub fn heavy_index(self) -> Option<usize> {
        Element::HEAVY.iter().position(|&e| e == self)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Element {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let mut chars = t.chars();
        let normalized = match (chars.next(), chars.next(), chars.next()) {
            (Some(a), None, None) => a.to_ascii_uppercase().to_string(),
            (Some(a), Some(b), None) => {
                format!("{}{}", a.to_ascii_uppercase(), b.to_ascii_lowercase())
            }
            _ => return Err(format!("unsupported element '{t}'")),
        };
        Element::ALL
            .iter()
            .copied()
            .find(|e| e.symbol() == normalized)
            .ok_or_else(|| format!("unsupported element '{t}'"))
    }
}
