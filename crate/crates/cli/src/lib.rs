//! Library surface of the batch runner, exposed so integration tests can
//! drive scans and replays in-process.

pub mod cache;
pub mod config;
pub mod replay_cmd;
pub mod report;
pub mod scan;
