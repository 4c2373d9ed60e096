//! In-memory session store with an optional newline-delimited JSON journal.
//!
//! Every accepted write appends the full session snapshot as one line, so
//! replaying the journal front to back and keeping the last line per id
//! rebuilds the map exactly.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use fuzzydx_core::Session;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("journal i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("journal line {line} is corrupt: {source}")]
    Corrupt {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("session '{0}' already exists")]
    Duplicate(String),
}

#[derive(Debug, Error)]
pub enum UpdateError<E> {
    #[error("session not found")]
    NotFound,
    #[error(transparent)]
    Rejected(E),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// One session: writers queue on `write`, readers clone the current `Arc`.
#[derive(Debug)]
struct Slot {
    write: Mutex<()>,
    current: RwLock<Arc<Session>>,
}

impl Slot {
    fn new(session: Session) -> Self {
        Slot {
            write: Mutex::new(()),
            current: RwLock::new(Arc::new(session)),
        }
    }

    fn snapshot(&self) -> Arc<Session> {
        self.current.read().expect("slot lock poisoned").clone()
    }
}

#[derive(Debug)]
struct Journal {
    path: PathBuf,
    file: File,
}

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Slot>>>,
    journal: Option<Mutex<Journal>>,
}

impl SessionStore {
    pub fn in_memory() -> Self {
        SessionStore::default()
    }

    /// Opens (or creates) a journal and replays it.
    pub fn with_journal(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let mut sessions = HashMap::new();
        if path.exists() {
            let (replayed, valid_len) = replay(&path)?;
            for (id, session) in replayed {
                sessions.insert(id, Arc::new(Slot::new(session)));
            }
            let mut file = OpenOptions::new().read(true).write(true).open(&path)?;
            if file.metadata()?.len() != valid_len {
                file.set_len(valid_len)?;
            }
            if valid_len > 0 && !ends_with_newline(&mut file)? {
                file.seek(SeekFrom::End(0))?;
                file.write_all(b"\n")?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(SessionStore {
            sessions: RwLock::new(sessions),
            journal: Some(Mutex::new(Journal { path, file })),
        })
    }

    pub fn journal_path(&self) -> Option<PathBuf> {
        self.journal
            .as_ref()
            .map(|j| j.lock().expect("journal lock poisoned").path.clone())
    }

    fn append(&self, session: &Session) -> Result<(), StoreError> {
        if let Some(journal) = &self.journal {
            let mut line = serde_json::to_vec(session).expect("session serializes");
            line.push(b'\n');
            let mut journal = journal.lock().expect("journal lock poisoned");
            journal.file.write_all(&line)?;
        }
        Ok(())
    }

    pub fn insert(&self, session: Session) -> Result<Arc<Session>, StoreError> {
        let mut sessions = self.sessions.write().expect("store lock poisoned");
        if sessions.contains_key(&session.session_id) {
            return Err(StoreError::Duplicate(session.session_id));
        }
        self.append(&session)?;
        let slot = Arc::new(Slot::new(session));
        let snapshot = slot.snapshot();
        sessions.insert(snapshot.session_id.clone(), slot);
        Ok(snapshot)
    }

    pub fn get(&self, session_id: &str) -> Option<Arc<Session>> {
        let sessions = self.sessions.read().expect("store lock poisoned");
        sessions.get(session_id).map(|slot| slot.snapshot())
    }

    /// Applies `f` to the current state of one session. Updates to the same
    /// session are serialized; if `f` rejects, nothing is stored.
    pub fn update<E, F>(&self, session_id: &str, f: F) -> Result<Arc<Session>, UpdateError<E>>
    where
        F: FnOnce(&Session) -> Result<Session, E>,
    {
        let slot = {
            let sessions = self.sessions.read().expect("store lock poisoned");
            sessions
                .get(session_id)
                .cloned()
                .ok_or(UpdateError::NotFound)?
        };
        let _writer = slot.write.lock().expect("slot lock poisoned");
        let current = slot.snapshot();
        let next = f(&current).map_err(UpdateError::Rejected)?;
        self.append(&next)?;
        let next = Arc::new(next);
        *slot.current.write().expect("slot lock poisoned") = next.clone();
        Ok(next)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("store lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All sessions, sorted by id.
    pub fn snapshot_all(&self) -> Vec<Arc<Session>> {
        let sessions = self.sessions.read().expect("store lock poisoned");
        let mut all: Vec<_> = sessions.values().map(|s| s.snapshot()).collect();
        all.sort_by(|a, b| a.session_id.cmp(&b.session_id));
        all
    }

    /// Forces journal contents to disk.
    pub fn flush(&self) -> Result<(), StoreError> {
        if let Some(journal) = &self.journal {
            let mut journal = journal.lock().expect("journal lock poisoned");
            journal.file.flush()?;
            journal.file.sync_data()?;
        }
        Ok(())
    }
}

fn ends_with_newline(file: &mut File) -> std::io::Result<bool> {
    let mut last = [0u8; 1];
    file.seek(SeekFrom::End(-1))?;
    file.read_exact(&mut last)?;
    Ok(last[0] == b'\n')
}

/// Reads a journal. A torn final line (crash mid-write) is ignored and the
/// returned length stops before it.
fn replay(path: &Path) -> Result<(HashMap<String, Session>, u64), StoreError> {
    let text = std::fs::read_to_string(path)?;
    let mut sessions = HashMap::new();
    let mut valid_len = 0usize;
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    for (no, raw) in lines.iter().enumerate() {
        let line = raw.trim();
        if !line.is_empty() {
            match serde_json::from_str::<Session>(line) {
                Ok(session) => {
                    sessions.insert(session.session_id.clone(), session);
                }
                Err(_) if no + 1 == lines.len() => {
                    tracing::warn!(line = no + 1, "ignoring torn journal tail");
                    break;
                }
                Err(source) => {
                    return Err(StoreError::Corrupt {
                        line: no + 1,
                        source,
                    })
                }
            }
        }
        valid_len += raw.len();
    }
    Ok((sessions, valid_len as u64))
}
