//! On-disk cache of enumeration results.
//!
//! For each `(n, predicate)` the cache directory holds `<predicate>-n<n>.txt`
//! with one block per isomorphism class:
//!
//! ```text
//! @ aut=4 f5free=0 k4mfree=1 cancellative=0 tripartite=0
//! 5 3
//! 1 2 3
//! 1 2 4
//! 3 4 5
//! ```
//!
//! and a JSON manifest `<predicate>-n<n>.manifest.json` carrying the tool
//! version, class count, labeled total and the SHA-256 of the records file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumerate::{labeled_total, EnumRecord, Flags, Predicate};
use crate::error::{Error, Result};
use crate::report::TOOL_VERSION;
use crate::system::TripleSystem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub predicate: String,
    pub n: usize,
    pub classes: u64,
    /// Decimal string.
    pub labeled_total: String,
    /// Hex SHA-256 of the records file.
    pub checksum: String,
}

pub fn records_path(dir: &Path, n: usize, predicate: Predicate) -> PathBuf {
    dir.join(format!("{predicate}-n{n}.txt"))
}

pub fn manifest_path(dir: &Path, n: usize, predicate: Predicate) -> PathBuf {
    dir.join(format!("{predicate}-n{n}.manifest.json"))
}

fn flag(b: bool) -> u8 {
    b as u8
}

pub fn encode_records(records: &[EnumRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "@ aut={} f5free={} k4mfree={} cancellative={} tripartite={}\n",
            r.aut_order,
            flag(r.flags.f5free),
            flag(r.flags.k4mfree),
            flag(r.flags.cancellative),
            flag(r.flags.tripartite),
        ));
        out.push_str(&r.key.serialize());
    }
    out
}

pub fn decode_records(text: &str) -> Result<Vec<EnumRecord>> {
    let mut records = Vec::new();
    let mut blocks = text.split("@ ").filter(|b| !b.trim().is_empty());
    for block in blocks.by_ref() {
        let (annotation, body) = block
            .split_once('\n')
            .ok_or_else(|| Error::Cache("record block without a system".into()))?;
        let mut aut = None;
        let mut bits = [None; 4];
        for field in annotation.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Cache(format!("bad annotation `{field}`")))?;
            let parse_flag = || match v {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(Error::Cache(format!("bad flag `{field}`"))),
            };
            match k {
                "aut" => {
                    aut = Some(
                        v.parse::<u64>()
                            .map_err(|_| Error::Cache(format!("bad aut `{v}`")))?,
                    )
                }
                "f5free" => bits[0] = Some(parse_flag()?),
                "k4mfree" => bits[1] = Some(parse_flag()?),
                "cancellative" => bits[2] = Some(parse_flag()?),
                "tripartite" => bits[3] = Some(parse_flag()?),
                _ => return Err(Error::Cache(format!("unknown annotation `{k}`"))),
            }
        }
        let missing = || Error::Cache(format!("incomplete annotation `{annotation}`"));
        let key = TripleSystem::parse(body)?;
        let flags = Flags {
            f5free: bits[0].ok_or_else(missing)?,
            k4mfree: bits[1].ok_or_else(missing)?,
            cancellative: bits[2].ok_or_else(missing)?,
            tripartite: bits[3].ok_or_else(missing)?,
        };
        records.push(EnumRecord {
            edge_count: key.edge_count(),
            key,
            aut_order: aut.ok_or_else(missing)?,
            flags,
        });
    }
    Ok(records)
}

fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn cache_write(dir: &Path, n: usize, predicate: Predicate, records: &[EnumRecord]) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let body = encode_records(records);
    let manifest = Manifest {
        tool_version: TOOL_VERSION.to_string(),
        predicate: predicate.to_string(),
        n,
        classes: records.len() as u64,
        labeled_total: labeled_total(records).to_string(),
        checksum: checksum(body.as_bytes()),
    };
    fs::write(records_path(dir, n, predicate), body)?;
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(manifest_path(dir, n, predicate), json + "\n")?;
    Ok(manifest)
}

/// Loads cached records, refusing anything whose checksum or totals disagree
/// with the manifest.
pub fn cache_read(dir: &Path, n: usize, predicate: Predicate) -> Result<(Manifest, Vec<EnumRecord>)> {
    let mpath = manifest_path(dir, n, predicate);
    let rpath = records_path(dir, n, predicate);
    if !mpath.exists() || !rpath.exists() {
        return Err(Error::Cache(format!(
            "no cache for n={n} predicate={predicate} in {}; run `triplesys enumerate --n {n} --predicate {predicate}` first",
            dir.display()
        )));
    }
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&mpath)?)
        .map_err(|e| Error::Cache(format!("unreadable manifest {}: {e}", mpath.display())))?;
    let body = fs::read(&rpath)?;
    let actual = checksum(&body);
    if actual != manifest.checksum {
        return Err(Error::Cache(format!(
            "checksum mismatch for {} (manifest {}, file {actual}); delete it and re-run enumerate",
            rpath.display(),
            manifest.checksum
        )));
    }
    if manifest.n != n || manifest.predicate != predicate.as_str() {
        return Err(Error::Cache(
            "manifest does not describe the requested enumeration".into(),
        ));
    }
    let text = String::from_utf8(body).map_err(|_| Error::Cache("records file is not UTF-8".into()))?;
    let records = decode_records(&text)?;
    if records.len() as u64 != manifest.classes
        || labeled_total(&records).to_string() != manifest.labeled_total
    {
        return Err(Error::Cache("record totals disagree with the manifest".into()));
    }
    Ok((manifest, records))
}
