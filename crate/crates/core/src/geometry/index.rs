//! Strictly increasing index sets stored as bitmasks, with the shuffle signs
//! that exterior algebra needs.

pub type Mask = u32;

pub fn bits(mask: Mask) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

pub fn size(mask: Mask) -> usize {
    mask.count_ones() as usize
}

pub fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

fn parity(n: u32) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `e_a ∧ e_b` as `(sign, a ∪ b)`, or `None` when they overlap.
pub fn merge(a: Mask, b: Mask) -> Option<(i64, Mask)> {
    if a & b != 0 {
        return None;
    }
    // count pairs (i in a, j in b) with i > j
    let inversions: u32 = bits(b).map(|j| (a >> (j + 1)).count_ones()).sum();
    Some((parity(inversions), a | b))
}

/// Interior product of the dual basis element `k` into `e_mask`:
/// `(sign, mask \ {k})`, or `None` if `k` is absent.
pub fn remove(mask: Mask, k: usize) -> Option<(i64, Mask)> {
    if mask & (1 << k) == 0 {
        return None;
    }
    let before = (mask & ((1 << k) - 1)).count_ones();
    Some((parity(before), mask & !(1 << k)))
}

/// All subsets of `{0..n}` of size `k`, in lexicographic order of their
/// increasing index lists.
pub fn subsets(n: usize, k: usize) -> Vec<Mask> {
    fn go(start: usize, n: usize, k: usize, acc: Mask, out: &mut Vec<Mask>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            go(i + 1, n, k - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, 0, &mut out);
    }
    out
}

/// Signs and images of all permutations of `0..k`.
pub fn permutations(k: usize) -> Vec<(i64, Vec<usize>)> {
    fn go(prefix: &mut Vec<usize>, left: &mut Vec<usize>, sign: i64, out: &mut Vec<(i64, Vec<usize>)>) {
        if left.is_empty() {
            out.push((sign, prefix.clone()));
            return;
        }
        for pos in 0..left.len() {
            let v = left.remove(pos);
            prefix.push(v);
            go(prefix, left, if pos % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            left.insert(pos, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..k).collect(), 1, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_signs() {
        assert_eq!(merge(mask_of(&[0]), mask_of(&[1])), Some((1, 0b11)));
        assert_eq!(merge(mask_of(&[1]), mask_of(&[0])), Some((-1, 0b11)));
        assert_eq!(merge(mask_of(&[1]), mask_of(&[0, 2])), Some((-1, 0b111)));
        assert_eq!(merge(mask_of(&[0, 2]), mask_of(&[1])), Some((-1, 0b111)));
        assert_eq!(merge(1, 1), None);
    }

    #[test]
    fn permutation_signs_sum_to_zero() {
        let ps = permutations(4);
        assert_eq!(ps.len(), 24);
        assert_eq!(ps.iter().map(|p| p.0).sum::<i64>(), 0);
        let swap = ps.iter().find(|p| p.1 == vec![1, 0, 2, 3]).unwrap();
        assert_eq!(swap.0, -1);
    }

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(2, 3).len(), 0);
        assert_eq!(subsets(3, 0), vec![0]);
    }
}
