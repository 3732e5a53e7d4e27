//! Line-based TCP command protocol for scene inspection, transformation,
//! camera control and image retrieval. The wire format is specified in
//! `PROTOCOL.md` at the repository root.

mod executor;
mod response;
mod server;

pub use executor::{Executor, MAX_LINE_BYTES};
pub use response::{fmt_num, Response};
pub use server::{Server, DEFAULT_PORT};
