#![allow(dead_code)]

pub mod instances;
pub mod lp_oracle;
pub mod plan_oracle;
