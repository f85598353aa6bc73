pub mod cli;
pub mod coherent_hinf;
pub mod ni;
pub mod ni_synth;
pub mod numlin;
pub mod qlin;
