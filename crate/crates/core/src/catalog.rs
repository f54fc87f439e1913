//! Item store with precomputed content embeddings.

use std::collections::HashMap;

use crate::domain::{Category, ContentItem, ItemId};
use crate::embedding::{embed_content, EmbeddingConfig, EmbeddingSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Catalog {
    items: Vec<ContentItem>,
    embeddings: Vec<Vec<f64>>,
    topics: Vec<Option<String>>,
    by_id: HashMap<ItemId, usize>,
}

impl Catalog {
    /// Embeds every item once. Duplicate ids and wrong feature dimensions are faults.
    pub fn new(
        items: Vec<ContentItem>,
        space: &EmbeddingSpace,
        cfg: &EmbeddingConfig,
    ) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(items.len());
        let mut embeddings = Vec::with_capacity(items.len());
        let mut topics = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            if by_id.insert(item.item_id, i).is_some() {
                return Err(Error::Data(format!("duplicate item {}", item.item_id)));
            }
            embeddings.push(embed_content(item, space, cfg)?);
            topics.push(space.dominant_topic(&item.features).map(str::to_owned));
        }
        Ok(Catalog {
            items,
            embeddings,
            topics,
            by_id,
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[ContentItem] {
        &self.items
    }

    pub fn get(&self, id: ItemId) -> Option<&ContentItem> {
        self.by_id.get(&id).map(|&i| &self.items[i])
    }

    pub fn embedding(&self, id: ItemId) -> Option<&[f64]> {
        self.by_id.get(&id).map(|&i| self.embeddings[i].as_slice())
    }

    /// Dominant topic label of the item's feature vector.
    pub fn topic(&self, id: ItemId) -> Option<&str> {
        self.by_id.get(&id).and_then(|&i| self.topics[i].as_deref())
    }

    pub fn in_category(&self, category: Category) -> impl Iterator<Item = &ContentItem> {
        self.items.iter().filter(move |it| it.category == category)
    }

    /// `(item, embedding)` pairs, in catalog order.
    pub fn embedded(&self) -> impl Iterator<Item = (&ContentItem, &[f64])> {
        self.items
            .iter()
            .zip(self.embeddings.iter().map(Vec::as_slice))
    }
}
