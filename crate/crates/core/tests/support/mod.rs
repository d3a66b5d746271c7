#![allow(dead_code)]

pub mod checks;
pub mod codec_oracle;
pub mod data;
pub mod glasso_oracle;
pub mod kkt;
