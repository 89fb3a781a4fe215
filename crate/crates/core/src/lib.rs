//! Continuous weak measurement of a two-level system.
//!
//! A double quantum dot monitored by a point contact is simulated at the level
//! of single measurement records and of ensemble averages. From the record the
//! quantum filter reconstructs an estimate of the state, and the toolkit
//! quantifies how far the estimate is from the real (measured) state
//! (*confidence*), how far the real state is from the unmeasured one
//! (*backaction*), and how far the estimate is from the unmeasured state
//! (*epitome*). A goal program trades confidence against backaction over
//! measurement scenarios, and a projective-measurement module checks the
//! discord lower bound on the entropic confidence.
//!
//! Modules, bottom-up: [`qstate`], [`detector`], [`dynamics`], [`metrics`],
//! [`ensemble`], [`goalprog`], [`discord`], [`cli`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod detector;
pub mod discord;
pub mod dynamics;
pub mod ensemble;
mod error;
pub mod goalprog;
pub mod metrics;
pub mod qstate;

pub use error::{Error, Result};
