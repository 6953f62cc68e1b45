pub mod constants;
pub mod curves;
pub mod goemc;
pub mod verify;
