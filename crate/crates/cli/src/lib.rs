//! Library side of the `sosfit` command-line tool: subcommand logic and the
//! structured report with its text renderer.

pub mod commands;
pub mod report;
