//! HTTP+JSON front end for the staged diagnosis flow.
//!
//! Routes (all under `/api/v1`):
//!
//! | method | path                       | purpose                        |
//! |--------|----------------------------|--------------------------------|
//! | GET    | `/areas`                   | problem areas in KB order      |
//! | POST   | `/sessions`                | start a session                |
//! | GET    | `/sessions/{id}`           | current phase and prompts      |
//! | POST   | `/sessions/{id}/answers`   | answer one pending prompt      |
//! | GET    | `/sessions/{id}/results`   | ranked results once complete   |

pub mod api;
pub mod store;

pub use api::{router, serve, ApiError, AppState, ErrorCode};
pub use store::{SessionStore, StoreError, UpdateError};
