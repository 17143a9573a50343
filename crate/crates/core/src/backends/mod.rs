//! Concrete [`AgentBackend`](crate::protocol::AgentBackend)s: a scripted
//! oracle for tests and benchmarks, a FIFO replay double, and an HTTP
//! chat-completion client.

mod http;
mod oracle;
mod replay;

pub use http::{parse_completion, HttpBackend, HttpBackendConfig};
pub use oracle::{OracleConfig, OracleError, ScriptedOracle, ORACLE_FINISH_REASON};
pub use replay::{ReplayBackend, ReplayCall};
