

#![allow(dead_code)]
pub mod bigln;
pub mod fixtures;
pub mod lev;
pub mod micro;
pub mod naive;
