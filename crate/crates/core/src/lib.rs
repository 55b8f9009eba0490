pub mod cbset;
pub mod constructions;
pub mod gpl;
pub mod grouplab;
pub mod plcore;
pub mod rational;
pub mod sample;
