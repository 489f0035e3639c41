//! Process equivalence two ways: an operational bisimulation oracle and
//! seed algebras over layered abstract data types.

pub mod adt;
pub mod corpus;
pub mod library;
pub mod lts;
pub mod oracle;
pub mod process;
pub mod report;
pub mod rewrite;
pub mod seed;
