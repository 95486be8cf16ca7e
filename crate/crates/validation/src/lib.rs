//! Holds the acceptance suite in `tests/acceptance.rs`; run it with
//! `cargo test -p welfare-validation --test acceptance`.
