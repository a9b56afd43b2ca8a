pub mod accuracy;
pub mod bench;
pub mod report;
pub mod sampling;
pub mod selftest;
