// Copyright 2026 The nonadditive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact construction and verification of two infinite families of
//! nonadditive 1-error-correcting quantum codes, built by pasting
//! stabilizer codes of length `2^(2r+3)` onto the `((9,12,3))` and
//! `((10,24,3))` graph-state codes, together with the exact restricted
//! linear-programming bound that separates them from stabilizer codes.

pub mod dense;
pub mod error;
pub mod gottesman;
pub mod graph;
pub mod lp_bound;
pub mod pasting;
pub mod pauli;
pub mod small_codes;

pub use error::{Error, Result};
