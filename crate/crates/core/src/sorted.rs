//! Helpers for strictly increasing id lists.

/// Returns true if every element of `small` occurs in `large`.
///
/// Both inputs must be sorted in increasing order. Runs a single merge scan,
/// linear in the length of the longer list.
pub fn is_subset<T: Ord>(small: &[T], large: &[T]) -> bool {
    if small.len() > large.len() {
        return false;
    }
    let mut it = large.iter();
    'outer: for x in small {
        for y in it.by_ref() {
            match y.cmp(x) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Removes `x` from a sorted vector if present.
pub(crate) fn remove_sorted<T: Ord>(list: &mut Vec<T>, x: &T) {
    if let Ok(pos) = list.binary_search(x) {
        list.remove(pos);
    }
}

/// Sorted symmetric difference, used for GF(2) column addition.
pub(crate) fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
