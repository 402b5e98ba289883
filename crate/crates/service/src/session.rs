use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use dnabrick::Project;

use crate::error::ApiError;

#[derive(Debug, Clone)]
pub struct Session {
    pub project: Project,
    /// Bumped on every committed mutation.
    pub revision: u64,
}

/// In-memory sessions. Each session has its own lock, so writers to one
/// project serialize while other projects proceed independently.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<RwLock<Session>>>>,
}

impl SessionStore {
    pub fn insert(&self, session: Session) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        self.sessions
            .write()
            .expect("store lock")
            .insert(id.clone(), Arc::new(RwLock::new(session)));
        id
    }

    pub fn get(&self, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("store lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("unknown project {id}")))
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
