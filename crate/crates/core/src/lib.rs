//! Bowtie-free graphs, their ordered homogenising lift, and the partite
//! machinery used to build Ramsey witnesses for the lifted class.

pub mod amalgam;
pub mod canon;
pub mod gen;
pub mod good;
pub mod graph;
pub mod lifting;
pub mod membership;
pub mod ramsey;
