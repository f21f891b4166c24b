//! Folksonomy data model: interned users/resources/tags, bookmarks, and the
//! occurrence-count matrices derived from them.

mod sparse;

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use sparse::SparseCountMatrix;

/// Errors raised while building or validating a dataset.
#[derive(Debug, Error)]
pub enum ModelError {
    /// A triple carried an empty label. `index` is the 1-based position of
    /// the offending triple in the input stream.
    #[error("triple {index}: empty {field} label")]
    EmptyLabel { index: u64, field: &'static str },
    /// A bookmark referenced an id missing from its table.
    #[error("bookmark {bookmark} references unknown {kind} id {id}")]
    UnknownId {
        bookmark: usize,
        kind: &'static str,
        id: u32,
    },
    /// Two bookmarks share the same (user, resource) pair.
    #[error("duplicate bookmark for user {user:?} and resource {resource:?}")]
    DuplicateBookmark { user: UserId, resource: ResourceId },
    /// A bookmark with no tags.
    #[error("bookmark {bookmark} has an empty tag set")]
    EmptyTagSet { bookmark: usize },
}

macro_rules! id_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            /// The id as a matrix index.
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_newtype!(
    /// Dense 0-based user id, assigned in first-seen order.
    UserId
);
id_newtype!(
    /// Dense 0-based resource id, assigned in first-seen order.
    ResourceId
);
id_newtype!(
    /// Dense 0-based tag id, assigned in first-seen order.
    TagId
);

/// One raw tag assignment: user labelled resource with tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub user: String,
    pub resource: String,
    pub tag: String,
}

impl Triple {
    pub fn new(
        user: impl Into<String>,
        resource: impl Into<String>,
        tag: impl Into<String>,
    ) -> Self {
        Triple {
            user: user.into(),
            resource: resource.into(),
            tag: tag.into(),
        }
    }
}

/// Bidirectional label <-> dense id table. Ids are assigned in first-seen
/// order, so a fixed input order yields a fixed numbering.
#[derive(Debug, Default, Clone)]
pub struct IdTable {
    labels: Vec<String>,
    index: HashMap<String, u32>,
}

impl IdTable {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Intern `label`, returning its id (existing or freshly assigned).
    pub fn intern(&mut self, label: &str) -> u32 {
        match self.index.entry(label.to_owned()) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                let id = self.labels.len() as u32;
                self.labels.push(label.to_owned());
                e.insert(id);
                id
            }
        }
    }

    pub fn id(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: u32) -> Option<&str> {
        self.labels.get(id as usize).map(String::as_str)
    }

    /// Labels in id order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl PartialEq for IdTable {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for IdTable {}

/// The set of tags one user attached to one resource. Tags are stored as a
/// sorted, duplicate-free id list and are never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bookmark {
    pub user: UserId,
    pub resource: ResourceId,
    tags: Vec<TagId>,
}

impl Bookmark {
    /// Sorted tag ids; non-empty by construction.
    pub fn tags(&self) -> &[TagId] {
        &self.tags
    }
}

/// An interned folksonomy: user/resource/tag tables plus the bookmark list.
///
/// Tables are shared (`Arc`) so that subsets produced by train/test splitting
/// keep the same id space as the full dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FolksonomyDataset {
    users: Arc<IdTable>,
    resources: Arc<IdTable>,
    tags: Arc<IdTable>,
    bookmarks: Vec<Bookmark>,
}

/// Groups a stream of raw triples into an interned dataset.
///
/// Labels are interned to dense 0-based ids in first-seen order; triples are
/// grouped into bookmarks by (user, resource) in first-seen order, and
/// repeated identical triples collapse into a single tag-set membership.
/// A triple with an empty label is rejected with its 1-based stream position.
pub fn build_dataset(
    triples: impl IntoIterator<Item = Triple>,
) -> Result<FolksonomyDataset, ModelError> {
    let mut users = IdTable::default();
    let mut resources = IdTable::default();
    let mut tags = IdTable::default();
    let mut bookmarks: Vec<(UserId, ResourceId, Vec<TagId>)> = Vec::new();
    let mut by_pair: HashMap<(u32, u32), usize> = HashMap::new();

    for (pos, triple) in triples.into_iter().enumerate() {
        let index = pos as u64 + 1;
        for (field, label) in [
            ("user", &triple.user),
            ("resource", &triple.resource),
            ("tag", &triple.tag),
        ] {
            if label.is_empty() {
                return Err(ModelError::EmptyLabel { index, field });
            }
        }
        let user = users.intern(&triple.user);
        let resource = resources.intern(&triple.resource);
        let tag = TagId(tags.intern(&triple.tag));

        let slot = *by_pair.entry((user, resource)).or_insert_with(|| {
            bookmarks.push((UserId(user), ResourceId(resource), Vec::new()));
            bookmarks.len() - 1
        });
        let tag_set = &mut bookmarks[slot].2;
        if !tag_set.contains(&tag) {
            tag_set.push(tag);
        }
    }

    let bookmarks = bookmarks
        .into_iter()
        .map(|(user, resource, mut tags)| {
            tags.sort_unstable();
            Bookmark {
                user,
                resource,
                tags,
            }
        })
        .collect();

    Ok(FolksonomyDataset {
        users: Arc::new(users),
        resources: Arc::new(resources),
        tags: Arc::new(tags),
        bookmarks,
    })
}

impl FolksonomyDataset {
    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_resources(&self) -> usize {
        self.resources.len()
    }

    pub fn n_tags(&self) -> usize {
        self.tags.len()
    }

    pub fn bookmarks(&self) -> &[Bookmark] {
        &self.bookmarks
    }

    pub fn users(&self) -> &IdTable {
        &self.users
    }

    pub fn resources(&self) -> &IdTable {
        &self.resources
    }

    pub fn tags(&self) -> &IdTable {
        &self.tags
    }

    pub fn tag_id(&self, label: &str) -> Option<TagId> {
        self.tags.id(label).map(TagId)
    }

    pub fn tag_label(&self, tag: TagId) -> Option<&str> {
        self.tags.label(tag.0)
    }

    /// Total number of (bookmark, tag) memberships.
    pub fn n_assignments(&self) -> u64 {
        self.bookmarks.iter().map(|b| b.tags.len() as u64).sum()
    }

    /// A dataset with the same id tables but only the selected bookmarks.
    /// `keep` must be a strictly increasing list of bookmark indices.
    pub fn with_bookmarks(&self, keep: &[usize]) -> FolksonomyDataset {
        FolksonomyDataset {
            users: Arc::clone(&self.users),
            resources: Arc::clone(&self.resources),
            tags: Arc::clone(&self.tags),
            bookmarks: keep.iter().map(|&i| self.bookmarks[i].clone()).collect(),
        }
    }

    /// Checks the structural invariants: ids resolve, (user, resource) pairs
    /// are unique, tag sets are non-empty, sorted and duplicate-free.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = HashMap::new();
        for (i, b) in self.bookmarks.iter().enumerate() {
            if self.users.label(b.user.0).is_none() {
                return Err(ModelError::UnknownId {
                    bookmark: i,
                    kind: "user",
                    id: b.user.0,
                });
            }
            if self.resources.label(b.resource.0).is_none() {
                return Err(ModelError::UnknownId {
                    bookmark: i,
                    kind: "resource",
                    id: b.resource.0,
                });
            }
            if b.tags.is_empty() {
                return Err(ModelError::EmptyTagSet { bookmark: i });
            }
            for pair in b.tags.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(ModelError::EmptyTagSet { bookmark: i });
                }
            }
            for &t in &b.tags {
                if self.tags.label(t.0).is_none() {
                    return Err(ModelError::UnknownId {
                        bookmark: i,
                        kind: "tag",
                        id: t.0,
                    });
                }
            }
            if seen.insert((b.user, b.resource), i).is_some() {
                return Err(ModelError::DuplicateBookmark {
                    user: b.user,
                    resource: b.resource,
                });
            }
        }
        Ok(())
    }

    /// Tag-resource count matrix: entry (i, j) is the number of bookmarks
    /// whose tag set contains tag i and whose resource is j.
    pub fn tr_matrix(&self) -> SparseCountMatrix {
        let mut counts: HashMap<(u32, u32), u32> = HashMap::new();
        for b in &self.bookmarks {
            for &t in &b.tags {
                *counts.entry((t.0, b.resource.0)).or_insert(0) += 1;
            }
        }
        SparseCountMatrix::from_counts(self.n_tags(), self.n_resources(), counts)
    }

    /// Tag-user count matrix: entry (i, j) is the number of bookmarks by
    /// user j whose tag set contains tag i.
    pub fn tu_matrix(&self) -> SparseCountMatrix {
        let mut counts: HashMap<(u32, u32), u32> = HashMap::new();
        for b in &self.bookmarks {
            for &t in &b.tags {
                *counts.entry((t.0, b.user.0)).or_insert(0) += 1;
            }
        }
        SparseCountMatrix::from_counts(self.n_tags(), self.n_users(), counts)
    }

    /// Resource-user count matrix: entry (i, j) is the number of bookmarks
    /// pairing resource i with user j. With bookmarks collapsed per
    /// (user, resource) every stored entry is 1.
    pub fn ru_matrix(&self) -> SparseCountMatrix {
        let mut counts: HashMap<(u32, u32), u32> = HashMap::new();
        for b in &self.bookmarks {
            *counts.entry((b.resource.0, b.user.0)).or_insert(0) += 1;
        }
        SparseCountMatrix::from_counts(self.n_resources(), self.n_users(), counts)
    }

    /// Histogram of per-tag assignment counts: usage count -> number of tags
    /// with that count. Tags present in the table but absent from every
    /// bookmark (possible in split subsets) land in the 0 bucket.
    pub fn tag_frequency_histogram(&self) -> BTreeMap<u64, u64> {
        let mut usage = vec![0u64; self.n_tags()];
        for b in &self.bookmarks {
            for &t in &b.tags {
                usage[t.index()] += 1;
            }
        }
        let mut histogram = BTreeMap::new();
        for count in usage {
            *histogram.entry(count).or_insert(0) += 1;
        }
        histogram
    }
}
