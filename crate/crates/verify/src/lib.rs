//! Shared helpers for the acceptance checks.
