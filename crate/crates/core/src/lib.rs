//! Multicast addressing codecs and a hierarchical tree network-on-chip
//! simulator for spike traffic between neural cores.

pub mod addressing;
pub mod scaling;
pub mod noc;
pub mod traffic;
pub mod experiment;
pub mod cli;
