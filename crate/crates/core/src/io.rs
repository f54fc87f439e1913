//! Line-delimited JSON persistence: world snapshots and run logs.
//!
//! A world snapshot is one `header` record followed by `account`, `edge`,
//! `item`, `user`, `interaction` and `latent` records, each on its own line
//! and tagged by a `record` field. Latent records carry hidden state and are
//! only read back into [`GroundTruth`].

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::Catalog;
use crate::coldstart::DemographicPrior;
use crate::domain::{
    Account, AccountId, ContentItem, Interaction, SocialGraph, UserId, UserProfile,
};
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::simulator::{GroundTruth, Observables, ScenarioConfig, World};

pub const SNAPSHOT_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: u32,
    pub config: ScenarioConfig,
    pub space: EmbeddingSpace,
    pub prior: DemographicPrior,
    pub thresholds: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum WorldRecord {
    Header(Box<SnapshotHeader>),
    Account(Account),
    Edge { from: AccountId, to: AccountId },
    Item(ContentItem),
    User(UserProfile),
    Interaction(Interaction),
    Latent { user_id: UserId, vector: Vec<f64> },
}

/// Records of a world in canonical order.
pub fn world_records(world: &World) -> Vec<WorldRecord> {
    let obs = &world.observables;
    let mut out = vec![WorldRecord::Header(Box::new(SnapshotHeader {
        format: SNAPSHOT_FORMAT,
        config: world.config.clone(),
        space: obs.space.clone(),
        prior: obs.prior.clone(),
        thresholds: world.truth.thresholds,
    }))];
    out.extend(
        obs.graph
            .accounts()
            .iter()
            .cloned()
            .map(WorldRecord::Account),
    );
    out.extend(
        obs.graph
            .edges()
            .map(|(from, to)| WorldRecord::Edge { from, to }),
    );
    out.extend(obs.catalog.items().iter().cloned().map(WorldRecord::Item));
    out.extend(obs.users.iter().cloned().map(WorldRecord::User));
    out.extend(obs.history.iter().cloned().map(WorldRecord::Interaction));
    out.extend(
        obs.users
            .iter()
            .zip(&world.truth.latents)
            .map(|(u, v)| WorldRecord::Latent {
                user_id: u.user_id,
                vector: v.clone(),
            }),
    );
    out
}

/// Rebuilds a world from its records. The header must come first.
pub fn world_from_records(records: impl IntoIterator<Item = WorldRecord>) -> Result<World> {
    let mut records = records.into_iter();
    let header = match records.next() {
        Some(WorldRecord::Header(h)) => *h,
        Some(_) => {
            return Err(Error::Data(
                "snapshot does not start with a header record".into(),
            ))
        }
        None => return Err(Error::Data("empty snapshot".into())),
    };
    if header.format != SNAPSHOT_FORMAT {
        return Err(Error::Data(format!(
            "snapshot format {} (expected {SNAPSHOT_FORMAT})",
            header.format
        )));
    }
    let (mut accounts, mut edges, mut items, mut users, mut history, mut latents) = (
        Vec::new(),
        Vec::new(),
        Vec::new(),
        Vec::new(),
        Vec::new(),
        Vec::new(),
    );
    for r in records {
        match r {
            WorldRecord::Header(_) => return Err(Error::Data("second header record".into())),
            WorldRecord::Account(a) => accounts.push(a),
            WorldRecord::Edge { from, to } => edges.push((from, to)),
            WorldRecord::Item(it) => items.push(it),
            WorldRecord::User(u) => users.push(u),
            WorldRecord::Interaction(ev) => history.push(ev),
            WorldRecord::Latent { user_id, vector } => latents.push((user_id, vector)),
        }
    }
    if latents.len() != users.len()
        || latents
            .iter()
            .zip(&users)
            .any(|((id, _), u)| *id != u.user_id)
    {
        return Err(Error::Data(
            "latent records do not match user records".into(),
        ));
    }
    let catalog = Catalog::new(items, &header.space, &header.config.embedding)?;
    let graph = SocialGraph::new(accounts, &edges)?;
    Ok(World {
        observables: Observables {
            space: header.space,
            prior: header.prior,
            catalog,
            graph,
            users,
            history,
        },
        truth: GroundTruth {
            latents: latents.into_iter().map(|(_, v)| v).collect(),
            thresholds: header.thresholds,
        },
        config: header.config,
    })
}

/// One JSON document per line.
pub fn write_jsonl<T: Serialize>(
    mut w: impl Write,
    records: impl IntoIterator<Item = T>,
) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, &r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Parses every non-blank line; errors carry the line number.
pub fn read_jsonl<T: DeserializeOwned>(r: impl BufRead) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| Error::Data(format!("line {}: {e}", n + 1)))?,
        );
    }
    Ok(out)
}

pub fn save_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    write_jsonl(BufWriter::new(File::create(path)?), records)
}

pub fn load_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read_jsonl(BufReader::new(File::open(path)?))
}

pub fn save_world(world: &World, path: &Path) -> Result<()> {
    save_jsonl(path, world_records(world))
}

pub fn load_world(path: &Path) -> Result<World> {
    world_from_records(load_jsonl::<WorldRecord>(path)?)
}

/// Hex SHA-256 of a file's bytes.
pub fn file_sha256(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::generate_world;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            users: 12,
            items_per_category: 30,
            followed: 20,
            world: crate::simulator::WorldConfig {
                accounts: 60,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn snapshot_round_trips() {
        let world = generate_world(&small()).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, world_records(&world)).unwrap();
        let back = world_from_records(read_jsonl::<WorldRecord>(buf.as_slice()).unwrap()).unwrap();
        assert_eq!(world_records(&back), world_records(&world));
        assert_eq!(back.truth, world.truth);
        let mut again = Vec::new();
        write_jsonl(&mut again, world_records(&back)).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn records_are_tagged() {
        let line = serde_json::to_string(&WorldRecord::Edge {
            from: AccountId(1),
            to: AccountId(2),
        })
        .unwrap();
        assert_eq!(line, r#"{"record":"edge","from":1,"to":2}"#);
    }

    #[test]
    fn missing_header_is_a_data_error() {
        let err = world_from_records(vec![WorldRecord::Edge {
            from: AccountId(1),
            to: AccountId(2),
        }])
        .unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn bad_line_reports_its_number() {
        let text = "{\"record\":\"edge\",\"from\":1,\"to\":2}\n\nnot json\n";
        let err = read_jsonl::<WorldRecord>(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
