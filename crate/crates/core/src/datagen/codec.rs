//! Little-endian binary encoding of dataset records.

use crate::geom::Vec3;
use crate::molio::{Atom, Bond, BondOrder, Element, Molecule, Pose, Provenance};
use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Default)]
pub(crate) struct Writer {
    pub buf: Vec<u8>,
}

impl Writer {
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn i32(&mut self, v: i32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn str(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
    }
    pub fn vec3(&mut self, v: &Vec3) {
        self.f64(v.x);
        self.f64(v.y);
        self.f64(v.z);
    }
    pub fn len_of(&mut self, n: usize) {
        self.u32(n as u32);
    }
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format(format!(
                "record truncated at byte {} (need {n})",
                self.pos
            )));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    pub fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn str(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Format("invalid UTF-8".into()))
    }
    pub fn vec3(&mut self) -> Result<Vec3> {
        Ok(Vec3::new(self.f64()?, self.f64()?, self.f64()?))
    }
    pub fn done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

fn element_code(e: Element) -> u8 {
    Element::ALL.iter().position(|&x| x == e).unwrap() as u8
}

fn element_from(code: u8) -> Result<Element> {
    Element::ALL
        .get(code as usize)
        .copied()
        .ok_or_else(|| Error::Format(format!("bad element code {code}")))
}

fn provenance_code(p: Provenance) -> u8 {
    match p {
        Provenance::Generated => 0,
        Provenance::Crystal => 1,
        Provenance::Predicted => 2,
    }
}

fn provenance_from(code: u8) -> Result<Provenance> {
    Ok(match code {
        0 => Provenance::Generated,
        1 => Provenance::Crystal,
        2 => Provenance::Predicted,
        _ => return Err(Error::Format(format!("bad provenance code {code}"))),
    })
}

pub(crate) fn put_molecule(w: &mut Writer, mol: &Molecule) {
    w.str(&mol.name);
    w.len_of(mol.atoms.len());
    for a in &mol.atoms {
        w.u8(element_code(a.element));
        w.vec3(&a.position);
        w.i32(a.formal_charge);
        w.u8(a.is_hbond_donor as u8 | ((a.is_hbond_acceptor as u8) << 1));
    }
    w.len_of(mol.bonds.len());
    for b in &mol.bonds {
        w.u32(b.a as u32);
        w.u32(b.b as u32);
        w.u8(b.order.code() as u8);
    }
    w.len_of(mol.rings.len());
    for r in &mol.rings {
        w.len_of(r.len());
        for &i in r {
            w.u32(i as u32);
        }
    }
    w.len_of(mol.rotatable_bonds.len());
    for &i in &mol.rotatable_bonds {
        w.u32(i as u32);
    }
}

pub(crate) fn get_molecule(r: &mut Reader) -> Result<Molecule> {
    let name = r.str()?;
    let n = r.u32()? as usize;
    let mut atoms = Vec::with_capacity(n);
    for _ in 0..n {
        let element = element_from(r.u8()?)?;
        let position = r.vec3()?;
        let formal_charge = r.i32()?;
        let flags = r.u8()?;
        atoms.push(Atom {
            element,
            position,
            formal_charge,
            is_hbond_donor: flags & 1 != 0,
            is_hbond_acceptor: flags & 2 != 0,
        });
    }
    let nb = r.u32()? as usize;
    let mut bonds = Vec::with_capacity(nb);
    for _ in 0..nb {
        let a = r.u32()? as usize;
        let b = r.u32()? as usize;
        let order = BondOrder::from_code(r.u8()? as u32).ok_or_else(|| Error::Format("bad bond order".into()))?;
        bonds.push(Bond { a, b, order });
    }
    let nr = r.u32()? as usize;
    let mut rings = Vec::with_capacity(nr);
    for _ in 0..nr {
        let len = r.u32()? as usize;
        rings.push((0..len).map(|_| r.u32().map(|v| v as usize)).collect::<Result<_>>()?);
    }
    let nrot = r.u32()? as usize;
    let rotatable_bonds = (0..nrot).map(|_| r.u32().map(|v| v as usize)).collect::<Result<_>>()?;
    let mol = Molecule {
        name,
        atoms,
        bonds,
        rings,
        rotatable_bonds,
    };
    mol.validate_bonds()?;
    Ok(mol)
}

pub(crate) fn put_pose(w: &mut Writer, p: &Pose) {
    w.len_of(p.coordinates.len());
    for c in &p.coordinates {
        w.vec3(c);
    }
    w.f64(p.score);
    w.u8(provenance_code(p.provenance));
}

pub(crate) fn get_pose(r: &mut Reader) -> Result<Pose> {
    let n = r.u32()? as usize;
    let coordinates = (0..n).map(|_| r.vec3()).collect::<Result<_>>()?;
    let score = r.f64()?;
    let provenance = provenance_from(r.u8()?)?;
    Ok(Pose {
        coordinates,
        score,
        provenance,
    })
}

pub(crate) fn put_map(w: &mut Writer, m: &BTreeMap<String, String>) {
    w.len_of(m.len());
    for (k, v) in m {
        w.str(k);
        w.str(v);
    }
}

pub(crate) fn get_map(r: &mut Reader) -> Result<BTreeMap<String, String>> {
    let n = r.u32()? as usize;
    let mut m = BTreeMap::new();
    for _ in 0..n {
        let k = r.str()?;
        let v = r.str()?;
        m.insert(k, v);
    }
    Ok(m)
}
