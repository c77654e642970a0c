pub mod numcore;
pub mod specfun;
pub mod equilibrium;
pub mod orthopoly;
pub mod painleve;
pub mod limitkernel;
pub mod fredholm;
pub mod experiment;
pub mod acceptance;
