use std::sync::{Arc, Mutex, PoisonError};

use arc_swap::ArcSwap;

use crate::store::CatalogView;

use super::{Index, IndexError};

/// The serving index. Queries load the current index without locking;
/// rebuilds are built aside and swapped in whole.
pub struct IndexHandle {
    current: ArcSwap<Index>,
    rebuild: Mutex<()>,
}

impl IndexHandle {
    pub fn new(index: Index) -> Self {
        IndexHandle {
            current: ArcSwap::from_pointee(index),
            rebuild: Mutex::new(()),
        }
    }

    pub fn from_view(view: &CatalogView) -> Result<Self, IndexError> {
        Ok(Self::new(Index::build(view.public_views(), view.generation())?))
    }

    pub fn current(&self) -> Arc<Index> {
        self.current.load_full()
    }

    /// Builds an index of `view` and makes it current, unless an index of
    /// a newer catalog state is already serving. On error the old index
    /// keeps serving.
    pub fn rebuild_and_swap(&self, view: &CatalogView) -> Result<Arc<Index>, IndexError> {
        let _one_at_a_time = self.rebuild.lock().unwrap_or_else(PoisonError::into_inner);
        let serving = self.current.load_full();
        if serving.generation() > view.generation() {
            return Ok(serving);
        }
        let fresh = Arc::new(Index::build(view.public_views(), view.generation())?);
        self.current.store(fresh.clone());
        Ok(fresh)
    }
}
