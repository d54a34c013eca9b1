pub mod catalog;
pub mod oracle;
pub mod orthopoly;
pub mod polyrat;
pub mod qhj;
pub mod qmfprobe;
pub mod quadrature;
