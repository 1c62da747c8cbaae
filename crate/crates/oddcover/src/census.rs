//! Multi-threaded census with checkpoint and resume.
//!
//! Blocks (first-entry indices) are handed out to workers from a shared
//! counter. Results are merged in block order so the checkpoint cursor always
//! marks a prefix of finished blocks.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use thiserror::Error;

use oddcover_core::enumeration::{ClassCensus, EnumerationError, EnumerationTask, SearchSpace};

use crate::formats::{CensusJson, CheckpointJson};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error("checkpoint belongs to a different task (expected {expected}, found {found})")]
    TaskMismatch { expected: String, found: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

/// SHA-256 of a canonical description of everything that affects the result.
pub fn task_hash(task: &EnumerationTask) -> String {
    let profile = match &task.profile {
        Some(n) => n.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
        None => "*".into(),
    };
    let text = format!(
        "oddcover-census-v1;g={};profile={};transitive={};shard={}/{}",
        task.g, profile, task.require_transitive, task.shard.index, task.shard.total
    );
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_checkpoint(path: &Path) -> Result<CheckpointJson, CensusError> {
    let text = fs::read_to_string(path).map_err(|source| CensusError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| CensusError::Json { path: path.into(), source })
}

/// Writes through a temporary file and renames, so a crash never leaves a
/// truncated checkpoint.
pub fn save_checkpoint(path: &Path, checkpoint: &CheckpointJson) -> Result<(), CensusError> {
    let tmp = path.with_extension("tmp");
    let text =
        serde_json::to_string_pretty(checkpoint).map_err(|source| CensusError::Json { path: path.into(), source })?;
    fs::write(&tmp, text + "\n").map_err(|source| CensusError::Io { path: tmp.clone(), source })?;
    fs::rename(&tmp, path).map_err(|source| CensusError::Io { path: path.into(), source })
}

#[derive(Debug, Clone, Default)]
pub struct CensusOptions {
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    pub resume: Option<PathBuf>,
    /// Stop after this many blocks (counted from the resume point).
    pub max_blocks: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CensusRun {
    pub census: ClassCensus,
    /// Next unfinished block, or the block count when the shard is done.
    pub cursor: u32,
    pub complete: bool,
    pub wall_time: Duration,
}

pub fn run_census(task: &EnumerationTask, options: &CensusOptions) -> Result<CensusRun, CensusError> {
    let start = Instant::now();
    let space = SearchSpace::new(task)?;
    let hash = task_hash(task);
    let (mut census, cursor) = match &options.resume {
        Some(path) => {
            let cp = load_checkpoint(path)?;
            if cp.task_hash != hash {
                return Err(CensusError::TaskMismatch { expected: hash, found: cp.task_hash });
            }
            log::info!("resuming at block {}", cp.cursor);
            (cp.partial.to_census(), cp.cursor)
        }
        None => (ClassCensus::empty(task.g), space.blocks().next().unwrap_or(space.num_blocks())),
    };
    let mut pending: Vec<u32> = space.blocks_from(cursor)?.collect();
    if let Some(limit) = options.max_blocks {
        pending.truncate(limit);
    }
    let total_remaining = space.blocks_from(cursor)?.count();
    let complete = pending.len() == total_remaining;
    let jobs = options.jobs.max(1).min(pending.len().max(1));
    log::info!(
        "census g={} shard {}/{}: {} blocks on {} threads",
        task.g,
        task.shard.index,
        task.shard.total,
        pending.len(),
        jobs
    );

    let next = AtomicUsize::new(0);
    let mut cursor = cursor;
    let checkpoint = |census: &ClassCensus, cursor: u32| -> Result<(), CensusError> {
        if let Some(path) = &options.checkpoint {
            save_checkpoint(
                path,
                &CheckpointJson { task_hash: hash.clone(), cursor, partial: CensusJson::from(census) },
            )?;
        }
        Ok(())
    };
    thread::scope(|scope| -> Result<(), CensusError> {
        let (tx, rx) = mpsc::channel::<(usize, ClassCensus)>();
        for _ in 0..jobs {
            let tx = tx.clone();
            let (space, pending, next) = (&space, &pending, &next);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&block) = pending.get(i) else { break };
                let mut part = ClassCensus::empty(space.task().g);
                space.count_block(block, &mut part);
                if tx.send((i, part)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut ready: BTreeMap<usize, ClassCensus> = BTreeMap::new();
        let mut merged = 0usize;
        for (i, part) in rx {
            ready.insert(i, part);
            let before = merged;
            while let Some(part) = ready.remove(&merged) {
                census.merge(&part);
                merged += 1;
            }
            if merged > before {
                cursor = pending.get(merged).copied().unwrap_or_else(|| {
                    if complete {
                        space.num_blocks()
                    } else {
                        next_owned(&space, pending[merged - 1])
                    }
                });
                log::debug!("merged {merged}/{} blocks", pending.len());
                checkpoint(&census, cursor)?;
            }
        }
        Ok(())
    })?;
    if pending.is_empty() {
        checkpoint(&census, cursor)?;
    }
    let wall_time = start.elapsed();
    log::info!("census finished in {:.3}s", wall_time.as_secs_f64());
    Ok(CensusRun { census, cursor, complete, wall_time })
}

fn next_owned(space: &SearchSpace, after: u32) -> u32 {
    space.blocks().find(|&b| b > after).unwrap_or(space.num_blocks())
}

#[cfg(test)]
mod tests {
    use super::*;
    use oddcover_core::enumeration::{count_classes, Shard};

    #[test]
    fn hash_depends_on_every_field() {
        let base = EnumerationTask::new(1);
        let variants = [
            EnumerationTask::new(2),
            base.clone().with_profile(vec![0, 0, 0, 0]),
            base.clone().with_transitivity(false),
            base.clone().with_shard(Shard::new(0, 2).unwrap()),
        ];
        let h = task_hash(&base);
        assert_eq!(h.len(), 64);
        assert_eq!(h, task_hash(&base.clone()));
        for v in &variants {
            assert_ne!(task_hash(v), h);
        }
    }

    #[test]
    fn threads_match_sequential() {
        let task = EnumerationTask::new(1);
        let run = run_census(&task, &CensusOptions { jobs: 3, ..Default::default() }).unwrap();
        assert!(run.complete);
        assert_eq!(run.census, count_classes(&task).unwrap());
        assert_eq!(run.cursor, 8);
    }

    #[test]
    fn interrupted_run_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let task = EnumerationTask::new(1);
        let first = run_census(
            &task,
            &CensusOptions { jobs: 2, checkpoint: Some(path.clone()), max_blocks: Some(3), ..Default::default() },
        )
        .unwrap();
        assert!(!first.complete);
        assert_eq!(first.cursor, 3);
        assert_eq!(load_checkpoint(&path).unwrap().cursor, 3);
        let second =
            run_census(&task, &CensusOptions { jobs: 2, resume: Some(path.clone()), ..Default::default() }).unwrap();
        assert!(second.complete);
        assert_eq!(second.census, count_classes(&task).unwrap());
    }

    #[test]
    fn later_shards_start_at_their_first_block() {
        let task = EnumerationTask::new(1);
        let mut merged = ClassCensus::empty(1);
        for i in 0..4 {
            let part = EnumerationTask::new(1).with_shard(Shard::new(i, 4).unwrap());
            let run = run_census(&part, &CensusOptions { jobs: 2, ..Default::default() }).unwrap();
            assert!(run.complete);
            merged.merge(&run.census);
        }
        assert_eq!(merged, count_classes(&task).unwrap());
    }

    #[test]
    fn resume_refuses_other_task() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        run_census(
            &EnumerationTask::new(1),
            &CensusOptions { checkpoint: Some(path.clone()), max_blocks: Some(1), ..Default::default() },
        )
        .unwrap();
        let other = EnumerationTask::new(1).with_transitivity(false);
        let err = run_census(&other, &CensusOptions { resume: Some(path), ..Default::default() }).unwrap_err();
        assert!(matches!(err, CensusError::TaskMismatch { .. }));
    }
}
