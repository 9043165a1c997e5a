//! In-memory sessions with optional snapshot persistence.
//!
//! Snapshots hold each model's canonical text and each instance's event
//! log; instance state is rebuilt by replaying the log on load.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, PoisonError, RwLock};

use dpm_core::dsl::{parse_model, serialize_model, SourceDocument};
use dpm_core::{Command, CompiledDocument, EngineError, Event, ProcessInstance};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::views::{instance_view, CommandView, InstanceView};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("model is not valid:\n{}", .diagnostics.join("\n"))]
    InvalidModel { diagnostics: Vec<String> },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    /// Canonical model texts; a model's id is `m` followed by its position
    /// plus one.
    pub models: Vec<String>,
    pub instances: Vec<SnapshotInstance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotInstance {
    pub id: String,
    /// Position in [`Snapshot::models`].
    pub model: usize,
    pub events: Vec<Event>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelInfo {
    pub id: String,
    pub root: String,
    pub processes: Vec<String>,
    pub text: String,
    pub warnings: Vec<String>,
}

struct StoredModel {
    text: String,
    doc: Arc<CompiledDocument>,
    warnings: Vec<String>,
}

struct Slot {
    model: usize,
    /// Held for the whole of a command, so commands on one instance never
    /// interleave.
    writer: Mutex<()>,
    committed: RwLock<Arc<ProcessInstance>>,
}

#[derive(Default)]
struct Registry {
    models: Vec<StoredModel>,
    instances: BTreeMap<String, Arc<Slot>>,
    next_instance: u64,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(PoisonError::into_inner)
}

fn model_id(index: usize) -> String {
    format!("m{}", index + 1)
}

fn model_index(id: &str) -> Option<usize> {
    id.strip_prefix('m')?.parse::<usize>().ok()?.checked_sub(1)
}

fn compile(text: &str) -> Result<StoredModel, StoreError> {
    let parsed = parse_model(&SourceDocument::inline(text));
    let warnings = parsed.diagnostics.iter().filter(|d| !d.is_error()).map(|d| d.to_string()).collect();
    let diagnostics: Vec<String> = parsed.diagnostics.iter().map(|d| d.to_string()).collect();
    let doc = parsed.document.ok_or(StoreError::InvalidModel { diagnostics })?;
    let text = serialize_model(&doc);
    let doc = CompiledDocument::new(doc).map_err(|e| StoreError::InvalidModel { diagnostics: vec![e.to_string()] })?;
    Ok(StoredModel { text, doc: Arc::new(doc), warnings })
}

pub struct SessionStore {
    registry: RwLock<Registry>,
    snapshot_path: Option<PathBuf>,
    persist_lock: Mutex<()>,
}

impl Default for SessionStore {
    fn default() -> Self {
        Self::in_memory()
    }
}

impl SessionStore {
    pub fn in_memory() -> Self {
        SessionStore { registry: RwLock::default(), snapshot_path: None, persist_lock: Mutex::new(()) }
    }

    /// A store persisted to `path`, restored from it if the file exists.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let mut store = SessionStore::in_memory();
        if path.exists() {
            let err = |message: String| StoreError::Snapshot { path: path.clone(), message };
            let text = fs::read_to_string(&path).map_err(|e| err(e.to_string()))?;
            let snapshot: Snapshot = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
            store.restore(&snapshot).map_err(|e| err(e.to_string()))?;
        }
        store.snapshot_path = Some(path);
        Ok(store)
    }

    pub fn snapshot_path(&self) -> Option<&Path> {
        self.snapshot_path.as_deref()
    }

    fn restore(&mut self, snapshot: &Snapshot) -> Result<(), StoreError> {
        let registry = self.registry.get_mut().unwrap_or_else(PoisonError::into_inner);
        for text in &snapshot.models {
            registry.models.push(compile(text)?);
        }
        for inst in &snapshot.instances {
            let model = registry.models.get(inst.model).ok_or_else(|| StoreError::UnknownModel(model_id(inst.model)))?;
            let instance = ProcessInstance::from_log(Arc::clone(&model.doc), &inst.events)?;
            if let Some(n) = inst.id.strip_prefix('i').and_then(|n| n.parse::<u64>().ok()) {
                registry.next_instance = registry.next_instance.max(n);
            }
            registry.instances.insert(
                inst.id.clone(),
                Arc::new(Slot { model: inst.model, writer: Mutex::new(()), committed: RwLock::new(Arc::new(instance)) }),
            );
        }
        Ok(())
    }

    /// The current state of every model and instance.
    pub fn snapshot(&self) -> Snapshot {
        let registry = self.registry.read().unwrap_or_else(PoisonError::into_inner);
        Snapshot {
            models: registry.models.iter().map(|m| m.text.clone()).collect(),
            instances: registry
                .instances
                .iter()
                .map(|(id, slot)| SnapshotInstance {
                    id: id.clone(),
                    model: slot.model,
                    events: slot.committed.read().unwrap_or_else(PoisonError::into_inner).log().to_vec(),
                })
                .collect(),
        }
    }

    fn persist(&self) -> Result<(), StoreError> {
        let Some(path) = &self.snapshot_path else { return Ok(()) };
        let _guard = lock(&self.persist_lock);
        let err = |e: std::io::Error| StoreError::Snapshot { path: path.clone(), message: e.to_string() };
        let json = serde_json::to_string_pretty(&self.snapshot()).expect("snapshot serializes");
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, json).map_err(err)?;
        fs::rename(&tmp, path).map_err(err)
    }

    fn info(index: usize, m: &StoredModel) -> ModelInfo {
        let doc = m.doc.document();
        ModelInfo {
            id: model_id(index),
            root: doc.root().map(|r| r.name.clone()).unwrap_or_default(),
            processes: doc.models.iter().map(|p| p.name.clone()).collect(),
            text: m.text.clone(),
            warnings: m.warnings.clone(),
        }
    }

    pub fn add_model(&self, text: &str) -> Result<ModelInfo, StoreError> {
        let stored = compile(text)?;
        let info = {
            let mut registry = self.registry.write().unwrap_or_else(PoisonError::into_inner);
            registry.models.push(stored);
            let i = registry.models.len() - 1;
            Self::info(i, &registry.models[i])
        };
        self.persist()?;
        Ok(info)
    }

    pub fn model(&self, id: &str) -> Result<ModelInfo, StoreError> {
        let registry = self.registry.read().unwrap_or_else(PoisonError::into_inner);
        model_index(id)
            .and_then(|i| registry.models.get(i).map(|m| Self::info(i, m)))
            .ok_or_else(|| StoreError::UnknownModel(id.to_string()))
    }

    pub fn create_instance(&self, model: &str) -> Result<InstanceView, StoreError> {
        let view = {
            let mut registry = self.registry.write().unwrap_or_else(PoisonError::into_inner);
            let index = model_index(model)
                .filter(|&i| i < registry.models.len())
                .ok_or_else(|| StoreError::UnknownModel(model.to_string()))?;
            let instance = ProcessInstance::instantiate(Arc::clone(&registry.models[index].doc));
            registry.next_instance += 1;
            let id = format!("i{}", registry.next_instance);
            let view = instance_view(&id, model, &instance);
            let slot = Slot { model: index, writer: Mutex::new(()), committed: RwLock::new(Arc::new(instance)) };
            registry.instances.insert(id, Arc::new(slot));
            view
        };
        self.persist()?;
        Ok(view)
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, StoreError> {
        let registry = self.registry.read().unwrap_or_else(PoisonError::into_inner);
        registry.instances.get(id).cloned().ok_or_else(|| StoreError::UnknownInstance(id.to_string()))
    }

    pub fn instance_ids(&self) -> Vec<String> {
        self.registry.read().unwrap_or_else(PoisonError::into_inner).instances.keys().cloned().collect()
    }

    /// The latest committed state; never waits for a running command.
    pub fn instance(&self, id: &str) -> Result<Arc<ProcessInstance>, StoreError> {
        let slot = self.slot(id)?;
        let committed = slot.committed.read().unwrap_or_else(PoisonError::into_inner);
        Ok(Arc::clone(&committed))
    }

    pub fn view(&self, id: &str) -> Result<InstanceView, StoreError> {
        let slot = self.slot(id)?;
        let instance = Arc::clone(&slot.committed.read().unwrap_or_else(PoisonError::into_inner));
        Ok(instance_view(id, &model_id(slot.model), &instance))
    }

    /// Applies `command` to instance `id`. Commands on one instance are
    /// serialized; a rejected command changes nothing.
    pub fn apply(&self, id: &str, command: &Command) -> Result<CommandView, StoreError> {
        let slot = self.slot(id)?;
        let _writer = lock(&slot.writer);
        let current = Arc::clone(&slot.committed.read().unwrap_or_else(PoisonError::into_inner));
        let mut next = (*current).clone();
        let event = next.apply(command)?;
        let view = instance_view(id, &model_id(slot.model), &next);
        *slot.committed.write().unwrap_or_else(PoisonError::into_inner) = Arc::new(next);
        self.persist()?;
        Ok(CommandView { event, instance: view })
    }
}
