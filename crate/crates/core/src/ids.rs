//! Dense per-level handles for cells.
//!
//! Each level of a tower numbers its vertices, edges and tiles independently
//! from zero, so a handle is only meaningful together with a level. Vertex
//! ids are stable across levels: a vertex created at level `n` keeps the same
//! numeric id in every deeper level (deeper levels append new vertices after
//! the persisted ones). Edge and tile ids are fresh at every level.

use serde::{Deserialize, Serialize};
use std::fmt;

macro_rules! id_type {
    ($name:ident, $tag:literal) => {
        #[derive(
            Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($tag, "{}"), self.0)
            }
        }

        impl From<u32> for $name {
            fn from(raw: u32) -> Self {
                $name(raw)
            }
        }
    };
}

id_type!(VertexId, "v");
id_type!(EdgeId, "e");
id_type!(TileId, "t");

/// Level index of a cell decomposition. Level -1 is the base decomposition
/// whose single tile is the whole sphere.
pub type Level = i32;

/// The level of the base decomposition.
pub const BASE_LEVEL: Level = -1;

/// The id of the unique tile at level -1.
pub const SPHERE_TILE: TileId = TileId(0);
