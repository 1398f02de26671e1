//! PIR array code constructions, each returned with an explicit witness.

mod be;
mod intro;
mod layout;
mod modified;
mod small_s;

pub use be::{be_multiplicities, be_server_counts, construct_be, BeMultiplicities};
pub use intro::intro_example;
pub use modified::{construct_modified, modified_server_counts};
pub use small_s::{construct_small_s, small_s_item_graph, small_s_params, ItemGraph, SmallSParams};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::gf::PrimeField;

/// Default cap on the number of columns a construction may materialize.
pub const DEFAULT_MAX_COLUMNS: u64 = 1_000_000;

/// Knobs shared by every construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub field: PrimeField,
    pub max_columns: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            field: PrimeField::BINARY,
            max_columns: DEFAULT_MAX_COLUMNS,
        }
    }
}

impl BuildOptions {
    pub fn with_field(mut self, field: PrimeField) -> Self {
        self.field = field;
        self
    }

    pub fn with_max_columns(mut self, max_columns: u64) -> Self {
        self.max_columns = max_columns;
        self
    }

    pub(crate) fn guard(&self, required: &BigUint) -> Result<()> {
        if *required > BigUint::from(self.max_columns) {
            return Err(Error::SizeGuard {
                required: required.clone(),
                limit: self.max_columns,
            });
        }
        Ok(())
    }
}
