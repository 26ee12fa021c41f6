//! Pair sampling, docking campaign and shard files.
//!
//! Shard layout: magic `DFSHARD1`, shard id (u32), record count (u32),
//! then per record a u32 byte length followed by the record payload, and
//! finally the 32-byte SHA-256 of all record bytes (length prefixes
//! included). All integers are little-endian. Each shard has a JSON
//! sidecar `<stem>.meta.json`.

use super::cluster::{cluster_sequences, sample_index, sampling_weights, ClusterAssignment};
use super::codec::{self, Reader, Writer};
use crate::minidock::{dock, SearchConfig};
use crate::molio::{Molecule, Pose, Receptor};
use crate::rng::{child_rng, derive_seed};
use crate::{Error, Result};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

pub const SHARD_MAGIC: &[u8; 8] = b"DFSHARD1";
pub const SHARD_CAPACITY: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub receptor_ref: String,
    pub pocket_index: u32,
    pub molecule: Molecule,
    pub poses: Vec<Pose>,
    pub metadata: BTreeMap<String, String>,
}

impl DatasetRecord {
    fn encode(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.str(&self.receptor_ref);
        w.u32(self.pocket_index);
        codec::put_molecule(&mut w, &self.molecule);
        w.len_of(self.poses.len());
        for p in &self.poses {
            codec::put_pose(&mut w, p);
        }
        codec::put_map(&mut w, &self.metadata);
        w.buf
    }

    fn decode(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let receptor_ref = r.str()?;
        let pocket_index = r.u32()?;
        let molecule = codec::get_molecule(&mut r)?;
        let n = r.u32()? as usize;
        let poses: Vec<Pose> = (0..n).map(|_| codec::get_pose(&mut r)).collect::<Result<_>>()?;
        let metadata = codec::get_map(&mut r)?;
        if !r.done() {
            return Err(Error::Format("trailing bytes in record".into()));
        }
        for p in &poses {
            p.check_against(&molecule)?;
        }
        Ok(Self {
            receptor_ref,
            pocket_index,
            molecule,
            poses,
            metadata,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetShard {
    pub shard_id: u32,
    pub records: Vec<DatasetRecord>,
    /// Hex SHA-256 of the length-prefixed record bytes.
    pub checksum: String,
}

impl DatasetShard {
    pub fn new(shard_id: u32, records: Vec<DatasetRecord>) -> Self {
        let mut shard = Self {
            shard_id,
            records,
            checksum: String::new(),
        };
        shard.checksum = hex::encode(shard.record_digest());
        shard
    }

    fn record_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for r in &self.records {
            let bytes = r.encode();
            out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
            out.extend_from_slice(&bytes);
        }
        out
    }

    fn record_digest(&self) -> Vec<u8> {
        Sha256::digest(self.record_bytes()).to_vec()
    }

    pub fn verify(&self) -> bool {
        hex::encode(self.record_digest()) == self.checksum
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let body = self.record_bytes();
        let mut out = Vec::with_capacity(body.len() + 48);
        out.extend_from_slice(SHARD_MAGIC);
        out.extend_from_slice(&self.shard_id.to_le_bytes());
        out.extend_from_slice(&(self.records.len() as u32).to_le_bytes());
        out.extend_from_slice(&body);
        out.extend_from_slice(&Sha256::digest(&body));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let reader = ShardReader::new(std::io::Cursor::new(bytes))?;
        let shard_id = reader.shard_id;
        let records = reader.collect::<Result<Vec<_>>>()?;
        Ok(Self::new(shard_id, records))
    }
}

/// Streams records from a shard, verifying the trailing checksum once the
/// last record has been read.
pub struct ShardReader<R: Read> {
    inner: R,
    pub shard_id: u32,
    remaining: u32,
    hasher: Sha256,
    failed: bool,
}

impl<R: Read> ShardReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        inner.read_exact(&mut magic)?;
        if &magic != SHARD_MAGIC {
            return Err(Error::Format("not a shard file".into()));
        }
        let mut word = [0u8; 4];
        inner.read_exact(&mut word)?;
        let shard_id = u32::from_le_bytes(word);
        inner.read_exact(&mut word)?;
        let remaining = u32::from_le_bytes(word);
        Ok(Self {
            inner,
            shard_id,
            remaining,
            hasher: Sha256::new(),
            failed: false,
        })
    }

    fn next_record(&mut self) -> Result<DatasetRecord> {
        let mut word = [0u8; 4];
        self.inner.read_exact(&mut word)?;
        let len = u32::from_le_bytes(word) as usize;
        let mut buf = vec![0u8; len];
        self.inner.read_exact(&mut buf)?;
        self.hasher.update(word);
        self.hasher.update(&buf);
        self.remaining -= 1;
        if self.remaining == 0 {
            let mut stored = [0u8; 32];
            self.inner.read_exact(&mut stored)?;
            let computed = std::mem::take(&mut self.hasher).finalize();
            if computed.as_slice() != stored {
                return Err(Error::Format("shard checksum mismatch".into()));
            }
        }
        DatasetRecord::decode(&buf)
    }
}

impl<R: Read> Iterator for ShardReader<R> {
    type Item = Result<DatasetRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.remaining == 0 {
            return None;
        }
        let out = self.next_record();
        if out.is_err() {
            self.failed = true;
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFailure {
    pub pair_index: usize,
    pub receptor: String,
    pub ligand: String,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct GeneratedDataset {
    pub shards: Vec<DatasetShard>,
    pub failures: Vec<PairFailure>,
    pub requested_pairs: usize,
    pub clusters: Option<ClusterAssignment>,
}

impl GeneratedDataset {
    pub fn n_records(&self) -> usize {
        self.shards.iter().map(|s| s.records.len()).sum()
    }

    pub fn records(&self) -> impl Iterator<Item = &DatasetRecord> {
        self.shards.iter().flat_map(|s| s.records.iter())
    }
}

/// Samples `n_pairs` receptor-ligand pairs and docks each one.
///
/// Receptors with pockets are drawn with inverse-cluster-size weights, the
/// pocket uniformly among the receptor's pockets, the ligand uniformly.
/// Pair `k` uses generators seeded from `(rng_seed, k)` only, so the
/// output does not depend on worker count. Failed dockings are reported in
/// `failures` and excluded from the shards.
pub fn generate_dataset(
    receptors: &[Receptor],
    ligands: &[Molecule],
    n_pairs: usize,
    search_cfg: &SearchConfig,
    rng_seed: u64,
) -> Result<GeneratedDataset> {
    if n_pairs == 0 {
        return Ok(GeneratedDataset {
            shards: Vec::new(),
            failures: Vec::new(),
            requested_pairs: 0,
            clusters: None,
        });
    }
    search_cfg.validate()?;
    let usable: Vec<&Receptor> = receptors.iter().filter(|r| !r.pockets.is_empty()).collect();
    if usable.is_empty() || ligands.is_empty() {
        return Err(Error::Pipeline("no receptors with pockets or no ligands".into()));
    }
    let owned: Vec<Receptor> = usable.iter().map(|r| (*r).clone()).collect();
    let clusters = cluster_sequences(&owned, 0.3);
    let weights = sampling_weights(&clusters);

    let outcomes: Vec<std::result::Result<DatasetRecord, PairFailure>> = (0..n_pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = child_rng(rng_seed, k as u64);
            let ri = sample_index(&weights, rng.random());
            let receptor = usable[ri];
            let pocket_index = rng.random_range(0..receptor.pockets.len());
            let li = rng.random_range(0..ligands.len());
            let ligand = &ligands[li];
            let cfg = SearchConfig {
                rng_seed: derive_seed(search_cfg.rng_seed ^ rng_seed, k as u64),
                ..search_cfg.clone()
            };
            let fail = |e: Error| PairFailure {
                pair_index: k,
                receptor: receptor.name.clone(),
                ligand: ligand.name.clone(),
                error: e.to_string(),
            };
            let poses = dock(receptor, &receptor.pockets[pocket_index], ligand, &cfg).map_err(fail)?;
            let mut metadata = BTreeMap::new();
            metadata.insert("pair_index".into(), k.to_string());
            metadata.insert("ligand".into(), ligand.name.clone());
            metadata.insert("cluster".into(), clusters.cluster_of[ri].to_string());
            metadata.insert("dock_seed".into(), cfg.rng_seed.to_string());
            Ok(DatasetRecord {
                receptor_ref: receptor.name.clone(),
                pocket_index: pocket_index as u32,
                molecule: ligand.clone(),
                poses,
                metadata,
            })
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(f) => {
                log::warn!(
                    "pair {} ({} x {}) failed: {}",
                    f.pair_index,
                    f.receptor,
                    f.ligand,
                    f.error
                );
                failures.push(f);
            }
        }
    }
    if records.is_empty() {
        return Err(Error::Pipeline(format!(
            "all {n_pairs} pairs failed; first error: {}",
            failures[0].error
        )));
    }
    let shards = records
        .chunks(SHARD_CAPACITY)
        .enumerate()
        .map(|(i, chunk)| DatasetShard::new(i as u32, chunk.to_vec()))
        .collect();
    Ok(GeneratedDataset {
        shards,
        failures,
        requested_pairs: n_pairs,
        clusters: Some(clusters),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShardCounts {
    pub requested_pairs: usize,
    pub records_in_dataset: usize,
    pub records_in_shard: usize,
    pub failed_pairs: usize,
    pub shards: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShardMeta {
    pub shard_id: u32,
    pub checksum: String,
    pub seed: u64,
    pub search_config: SearchConfig,
    pub tool_version: String,
    pub counts: ShardCounts,
    pub poses_per_pair: usize,
    pub ligand_sampling: String,
    pub failures: Vec<PairFailure>,
}

/// Writes `shard_NNNN.shard` and `shard_NNNN.meta.json` files into `dir`.
pub fn write_dataset(
    dir: &Path,
    data: &GeneratedDataset,
    seed: u64,
    search_cfg: &SearchConfig,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for shard in &data.shards {
        let stem = format!("shard_{:04}", shard.shard_id);
        let path = dir.join(format!("{stem}.shard"));
        std::fs::File::create(&path)?.write_all(&shard.to_bytes())?;
        let meta = ShardMeta {
            shard_id: shard.shard_id,
            checksum: shard.checksum.clone(),
            seed,
            search_config: search_cfg.clone(),
            tool_version: crate::TOOL_VERSION.into(),
            counts: ShardCounts {
                requested_pairs: data.requested_pairs,
                records_in_dataset: data.n_records(),
                records_in_shard: shard.records.len(),
                failed_pairs: data.failures.len(),
                shards: data.shards.len(),
            },
            poses_per_pair: search_cfg.top_k,
            ligand_sampling: "uniform".into(),
            failures: if shard.shard_id == 0 {
                data.failures.clone()
            } else {
                Vec::new()
            },
        };
        let meta_path = dir.join(format!("{stem}.meta.json"));
        std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
        written.push(path);
        written.push(meta_path);
    }
    Ok(written)
}

pub fn read_shard(path: &Path) -> Result<DatasetShard> {
    let bytes = std::fs::read(path)?;
    DatasetShard::from_bytes(&bytes)
}

/// Reads every `*.shard` in `dir`, in file-name order.
pub fn read_dataset_dir(dir: &Path) -> Result<Vec<DatasetShard>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "shard"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_shard(p)).collect()
}
