use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{GoldStep, Task, TaskError, ToolSpec};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// A dataset that does not match the expected shape, located by a dotted
/// field path such as `tasks[3].gold_plan[0].tool`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl SchemaError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// On-disk task record. The catalog is shared at the dataset level; a task
/// may narrow it to a named subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskRecord {
    pub id: String,
    pub instruction: String,
    pub gold_plan: Vec<GoldStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gold_edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tools: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub tools: Vec<ToolSpec>,
    pub tasks: Vec<TaskRecord>,
}

/// A validated dataset: the shared catalog and the tasks built from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub catalog: Vec<ToolSpec>,
    pub tasks: Vec<Task>,
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_dataset(&text)?)
}

pub fn parse_dataset(text: &str) -> Result<Dataset, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: DatasetFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        SchemaError::new(if path == "." { "$".into() } else { path }, e.into_inner().to_string())
    })?;
    Dataset::from_file(file)
}

pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(&dataset.to_file()).expect("dataset serializes");
    text.push('\n');
    fs::write(path, text).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl Dataset {
    pub fn from_file(file: DatasetFile) -> Result<Self, SchemaError> {
        crate::domain::validate_catalog(&file.tools).map_err(|e| SchemaError::new("tools", e.to_string()))?;
        let mut tasks = Vec::with_capacity(file.tasks.len());
        let mut ids = std::collections::HashSet::new();
        for (i, rec) in file.tasks.into_iter().enumerate() {
            let at = |field: &str| format!("tasks[{i}].{field}");
            if !ids.insert(rec.id.clone()) {
                return Err(SchemaError::new(at("id"), format!("duplicate task id `{}`", rec.id)));
            }
            let catalog = match &rec.tools {
                None => file.tools.clone(),
                Some(names) => {
                    let mut subset = Vec::with_capacity(names.len());
                    for (j, name) in names.iter().enumerate() {
                        let tool = file.tools.iter().find(|t| &t.name == name).ok_or_else(|| {
                            SchemaError::new(at(&format!("tools[{j}]")), format!("unknown tool `{name}`"))
                        })?;
                        subset.push(tool.clone());
                    }
                    subset
                }
            };
            let task = Task {
                id: rec.id,
                instruction: rec.instruction,
                catalog,
                gold_plan: rec.gold_plan,
                gold_edges: rec.gold_edges,
            };
            task.validate().map_err(|e| {
                let field = match &e {
                    TaskError::EmptyId => "id".to_string(),
                    TaskError::UnknownTool { step, .. } => format!("gold_plan[{step}].tool"),
                    TaskError::BadArgs { step, .. } => format!("gold_plan[{step}].args"),
                    TaskError::EdgeOutOfRange { .. } | TaskError::Cycle => "gold_edges".to_string(),
                    _ => "tools".to_string(),
                };
                SchemaError::new(at(&field), e.to_string())
            })?;
            tasks.push(task);
        }
        Ok(Self {
            name: file.name,
            catalog: file.tools,
            tasks,
        })
    }

    /// The on-disk form. Tasks whose catalog differs from the shared one
    /// list their tools by name.
    pub fn to_file(&self) -> DatasetFile {
        let tasks = self
            .tasks
            .iter()
            .map(|t| TaskRecord {
                id: t.id.clone(),
                instruction: t.instruction.clone(),
                gold_plan: t.gold_plan.clone(),
                gold_edges: t.gold_edges.clone(),
                tools: (t.catalog != self.catalog).then(|| t.catalog.iter().map(|c| c.name.clone()).collect()),
            })
            .collect();
        DatasetFile {
            name: self.name.clone(),
            tools: self.catalog.clone(),
            tasks,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "tools": [{"name": "a", "description": "", "params": [{"name": "x", "type": "string"}]},
                  {"name": "b", "description": "", "params": []}],
        "tasks": [{"id": "t1", "instruction": "do a", "gold_plan": [{"tool": "a", "args": {"x": "1"}}]},
                  {"id": "t2", "instruction": "do b", "gold_plan": [{"tool": "b"}], "tools": ["b"]}]
    }"#;

    #[test]
    fn loads_and_narrows_catalogs() {
        let d = parse_dataset(SMALL).unwrap();
        assert_eq!(d.tasks.len(), 2);
        assert_eq!(d.tasks[0].catalog.len(), 2);
        assert_eq!(d.tasks[1].catalog.len(), 1);
        assert_eq!(Dataset::from_file(d.to_file()).unwrap(), d);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let bad_tool = SMALL.replace(r#""tool": "b""#, r#""tool": "zz""#);
        let e = parse_dataset(&bad_tool).unwrap_err();
        assert_eq!(e.path, "tasks[1].gold_plan[0].tool");
        let missing = SMALL.replace(r#""instruction": "do a", "#, "");
        let e = parse_dataset(&missing).unwrap_err();
        assert_eq!(e.path, "tasks[0]");
        assert!(e.message.contains("instruction"), "{e}");
        let bad_type = SMALL.replace(r#""type": "string""#, r#""type": "text""#);
        let e = parse_dataset(&bad_type).unwrap_err();
        assert_eq!(e.path, "tools[0].params[0].type");
        let e = parse_dataset(&SMALL.replace(r#""tools": ["b"]"#, r#""tools": ["c"]"#)).unwrap_err();
        assert_eq!(e.path, "tasks[1].tools[0]");
    }
}
