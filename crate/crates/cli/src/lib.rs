// SPDX-License-Identifier: Apache-2.0

//! Library half of the `tlss` binary: scenario files, the worked examples
//! and subcommand bodies.

pub mod commands;
pub mod config;
pub mod examples;
