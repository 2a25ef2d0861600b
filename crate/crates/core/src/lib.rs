//! Security type inference, normalisation and a reference interpreter for
//! Lustre and its normalised sub-language NLustre.

pub mod ast;
pub mod interp;
pub mod normalise;
pub mod parser;
pub mod sectype;
pub mod typing;
pub mod verify;
