//! IO companion to `trip-core`: task file format, retrieval transcripts,
//! the chat-endpoint HTTP client, and the benchmark harness.

pub mod harness;
pub mod http;
pub mod taskfile;
pub mod transcript;
