//! 0/1 knapsack over quantized sizes: dynamic programming and branch and bound.

/// Default size unit in bytes.
pub const SIZE_QUANTUM: u64 = 1024;

/// Sizes in whole units, rounded up, and the capacity in units, rounded down,
/// so any selection that fits in units also fits in bytes.
pub fn quantize(sizes: &[u64], budget: u64, quantum: u64) -> (Vec<usize>, usize) {
    let q = quantum.max(1);
    let units = sizes.iter().map(|&s| s.div_ceil(q) as usize).collect();
    (units, (budget / q) as usize)
}

/// Maximum-benefit subset by the classic table recurrence. Items with
/// nonpositive benefit are never taken. Returns ascending item indices.
pub fn knapsack_dp(benefits: &[f64], sizes: &[u64], budget: u64, quantum: u64) -> Vec<usize> {
    let (units, cap) = quantize(sizes, budget, quantum);
    let n = benefits.len();
    let mut table = vec![vec![0.0f64; cap + 1]; n + 1];
    for i in 1..=n {
        let (b, w) = (benefits[i - 1], units[i - 1]);
        for j in 0..=cap {
            let skip = table[i - 1][j];
            table[i][j] = if b > 0.0 && w <= j && table[i - 1][j - w] + b > skip {
                table[i - 1][j - w] + b
            } else {
                skip
            };
        }
    }
    let mut chosen = Vec::new();
    let mut j = cap;
    for i in (1..=n).rev() {
        if table[i][j] != table[i - 1][j] {
            chosen.push(i - 1);
            j -= units[i - 1];
        }
    }
    chosen.reverse();
    chosen
}

struct Bnb {
    items: Vec<(usize, f64, usize)>,
    cap: usize,
    best: f64,
    best_set: Vec<usize>,
    current: Vec<usize>,
}

impl Bnb {
    /// Fractional relaxation over items `k..` with `room` units left.
    fn bound(&self, k: usize, room: usize) -> f64 {
        let mut room = room as f64;
        let mut total = 0.0;
        for &(_, b, w) in &self.items[k..] {
            if (w as f64) <= room {
                room -= w as f64;
                total += b;
            } else {
                total += b * room / w as f64;
                break;
            }
        }
        total
    }

    fn search(&mut self, k: usize, room: usize, value: f64) {
        if value > self.best {
            self.best = value;
            self.best_set = self.current.clone();
        }
        if k == self.items.len() || value + self.bound(k, room) <= self.best {
            return;
        }
        let (idx, b, w) = self.items[k];
        if w <= room {
            self.current.push(idx);
            self.search(k + 1, room - w, value + b);
            self.current.pop();
        }
        self.search(k + 1, room, value);
    }
}

/// Exact branch and bound with the fractional relaxation as upper bound, on
/// the same quantized inputs as [`knapsack_dp`].
pub fn knapsack_bnb(benefits: &[f64], sizes: &[u64], budget: u64, quantum: u64) -> Vec<usize> {
    let (units, cap) = quantize(sizes, budget, quantum);
    let mut items: Vec<(usize, f64, usize)> = (0..benefits.len())
        .filter(|&i| benefits[i] > 0.0 && units[i] <= cap)
        .map(|i| (i, benefits[i], units[i]))
        .collect();
    // density descending; zero-size items first
    items.sort_by(|a, b| {
        let da = if a.2 == 0 { f64::INFINITY } else { a.1 / a.2 as f64 };
        let db = if b.2 == 0 { f64::INFINITY } else { b.1 / b.2 as f64 };
        db.total_cmp(&da).then(a.0.cmp(&b.0))
    });
    let mut s = Bnb {
        items,
        cap,
        best: 0.0,
        best_set: Vec::new(),
        current: Vec::new(),
    };
    s.search(0, s.cap, 0.0);
    let mut out = s.best_set;
    out.sort_unstable();
    out
}

pub fn total(benefits: &[f64], chosen: &[usize]) -> f64 {
    chosen.iter().map(|&i| benefits[i]).sum()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn brute(benefits: &[f64], sizes: &[u64], budget: u64, quantum: u64) -> f64 {
        let (units, cap) = quantize(sizes, budget, quantum);
        let n = benefits.len();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let (mut w, mut b) = (0usize, 0.0);
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    w += units[i];
                    b += benefits[i];
                }
            }
            if w <= cap && b > best {
                best = b;
            }
        }
        best
    }

    #[test]
    fn zero_budget() {
        assert!(knapsack_dp(&[5.0], &[10], 0, 1024).is_empty());
        assert!(knapsack_bnb(&[5.0], &[10], 0, 1024).is_empty());
    }

    #[test]
    fn one_item_fits() {
        assert_eq!(knapsack_dp(&[5.0], &[1000], 1024, 1024), vec![0]);
        assert_eq!(knapsack_dp(&[5.0], &[1025], 1024, 1024), Vec::<usize>::new());
    }

    #[test]
    fn rounding_keeps_byte_budget() {
        let sizes = [1500, 1500, 1500];
        let chosen = knapsack_dp(&[1.0, 1.0, 1.0], &sizes, 4096, 1024);
        assert_eq!(chosen.len(), 2);
        assert!(chosen.iter().map(|&i| sizes[i]).sum::<u64>() <= 4096);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn dp_and_bnb_are_optimal(
            items in proptest::collection::vec((0u32..50, 1u64..20_000), 0..=12),
            budget in 0u64..60_000,
        ) {
            let benefits: Vec<f64> = items.iter().map(|&(b, _)| b as f64).collect();
            let sizes: Vec<u64> = items.iter().map(|&(_, s)| s).collect();
            let best = brute(&benefits, &sizes, budget, SIZE_QUANTUM);
            let dp = knapsack_dp(&benefits, &sizes, budget, SIZE_QUANTUM);
            let bb = knapsack_bnb(&benefits, &sizes, budget, SIZE_QUANTUM);
            prop_assert_eq!(total(&benefits, &dp), best);
            prop_assert_eq!(total(&benefits, &bb), best);
            prop_assert!(dp.iter().map(|&i| sizes[i]).sum::<u64>() <= budget);
            prop_assert!(bb.iter().map(|&i| sizes[i]).sum::<u64>() <= budget);
        }
    }
}
