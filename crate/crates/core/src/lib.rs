pub mod criteria;
pub mod data;
pub mod field;
pub mod hyperplane;
pub mod numtheory;
pub mod omega;
pub mod selfcheck;
mod text;
