pub mod geometry;
pub mod specfun;
pub mod modes;
pub mod states;
pub mod oracle;
pub mod entanglement;
pub mod cli;
