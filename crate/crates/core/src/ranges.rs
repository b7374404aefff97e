//! Contiguous frequency ranges carrying roughly equal numbers of contexts.
//!
//! A context is one occurrence site of an item, so the context count of a
//! set of items is the sum of their frequencies. A partition starts from
//! two user-chosen seed ranges `[2, a]` and `[a + 1, b]`; their mean
//! context count becomes the target for every following range.

use std::collections::BTreeMap;
use std::io::{self, Write};

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::FrequencyTable;
use crate::tsv;

/// Items below this frequency never enter a partition.
pub const MIN_PARTITION_FREQUENCY: u64 = 2;

pub fn context_count<I: IntoIterator<Item = u64>>(freqs: I) -> u64 {
    freqs.into_iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrequencyRange {
    pub lo: u64,
    pub hi: u64,
    pub n_items: u64,
    pub contexts: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangePartition {
    pub ranges: Vec<FrequencyRange>,
    /// Mean context count of the two seed ranges.
    pub target: f64,
}

/// Index of the first range built by the greedy pass (the two seeds come first).
pub const FIRST_GREEDY_RANGE: usize = 2;

impl RangePartition {
    pub fn k(&self) -> usize {
        self.ranges.len()
    }

    pub fn total_contexts(&self) -> u64 {
        self.ranges.iter().map(|r| r.contexts).sum()
    }

    /// Mean contexts per range as an exact fraction.
    pub fn n_c_exact(&self) -> Ratio<u64> {
        Ratio::new(self.total_contexts(), self.k() as u64)
    }

    pub fn n_c(&self) -> f64 {
        self.total_contexts() as f64 / self.k() as f64
    }

    /// `lo \t hi \t n_items \t contexts` per range, then a summary line.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "lo\thi\tn_items\tcontexts")?;
        for r in &self.ranges {
            writeln!(out, "{}\t{}\t{}\t{}", r.lo, r.hi, r.n_items, r.contexts)?;
        }
        let check = partition_invariant(self);
        writeln!(
            out,
            "# k\t{}\tn_c\t{}\trel_error\t{}",
            self.k(),
            tsv::real(self.n_c()),
            tsv::real(check.rel_error)
        )
    }
}

/// Items and contexts per exact frequency value, for frequencies >= 2.
fn frequency_histogram(freqs: &FrequencyTable) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for (_, f) in freqs.iter() {
        if f >= MIN_PARTITION_FREQUENCY {
            *h.entry(f).or_insert(0) += 1;
        }
    }
    h
}

fn summarize(hist: &BTreeMap<u64, u64>, lo: u64, hi: u64) -> FrequencyRange {
    let (mut n_items, mut contexts) = (0, 0);
    for (&f, &n) in hist.range(lo..=hi) {
        n_items += n;
        contexts += f * n;
    }
    FrequencyRange { lo, hi, n_items, contexts }
}

/// Splits the frequency axis into contiguous ranges of near-equal context mass.
///
/// After the seeds, each range grows upward one frequency value at a time
/// and closes at the first value where its contexts reach the seed mean.
/// Whatever remains short of the target at the top of the axis is merged
/// into the last greedy range, or forms a range of its own when the seeds
/// are the only other ranges.
pub fn equipartition(freqs: &FrequencyTable, first: (u64, u64), second: (u64, u64)) -> Result<RangePartition> {
    let (a_lo, a_hi) = first;
    let (b_lo, b_hi) = second;
    if a_lo != MIN_PARTITION_FREQUENCY {
        return Err(Error::InvalidParameter(format!(
            "first seed range must start at {MIN_PARTITION_FREQUENCY}, got {a_lo}"
        )));
    }
    if a_hi < a_lo {
        return Err(Error::InvalidRange { lo: a_lo, hi: a_hi });
    }
    if b_hi < b_lo {
        return Err(Error::InvalidRange { lo: b_lo, hi: b_hi });
    }
    if b_lo != a_hi + 1 {
        return Err(Error::InvalidParameter(format!(
            "second seed range must start at {}, got {b_lo}",
            a_hi + 1
        )));
    }

    let hist = frequency_histogram(freqs);
    let seeds = [summarize(&hist, a_lo, a_hi), summarize(&hist, b_lo, b_hi)];
    for s in &seeds {
        if s.n_items == 0 {
            return Err(Error::EmptySeedRange { lo: s.lo, hi: s.hi });
        }
    }
    let target = (seeds[0].contexts + seeds[1].contexts) as f64 / 2.0;
    let mut ranges = seeds.to_vec();

    let max_f = hist.keys().next_back().copied().unwrap_or(0);
    let mut lo = b_hi + 1;
    while lo <= max_f {
        let mut acc = 0u64;
        let mut n_items = 0u64;
        let mut closed_at = None;
        for (&f, &n) in hist.range(lo..) {
            acc += f * n;
            n_items += n;
            if acc as f64 >= target {
                closed_at = Some(f);
                break;
            }
        }
        match closed_at {
            Some(hi) => {
                ranges.push(FrequencyRange { lo, hi, n_items, contexts: acc });
                lo = hi + 1;
            }
            None => {
                if ranges.len() > FIRST_GREEDY_RANGE {
                    let last = ranges.last_mut().expect("non-empty");
                    last.hi = max_f;
                    last.n_items += n_items;
                    last.contexts += acc;
                } else {
                    ranges.push(FrequencyRange { lo, hi: max_f, n_items, contexts: acc });
                }
                break;
            }
        }
    }
    Ok(RangePartition { ranges, target })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantCheck {
    /// `k * n_c`.
    pub product: f64,
    pub total_contexts: u64,
    /// `|product - total| / total`.
    pub rel_error: f64,
}

/// Checks `k * n_c` against the total context count, with `n_c` kept as an
/// exact fraction so the product is computed without rounding.
pub fn partition_invariant(p: &RangePartition) -> InvariantCheck {
    let product = p.n_c_exact() * Ratio::from_integer(p.k() as u64);
    check(ratio_to_f64(product), p.total_contexts())
}

/// Same check with `n_c` first rounded to `digits` significant digits, as a
/// printed table would report it.
pub fn partition_invariant_rounded(p: &RangePartition, digits: u32) -> InvariantCheck {
    let n_c = round_significant(p.n_c(), digits);
    check(n_c * p.k() as f64, p.total_contexts())
}

fn check(product: f64, total: u64) -> InvariantCheck {
    let rel_error = if total == 0 {
        0.0
    } else {
        (product - total as f64).abs() / total as f64
    };
    InvariantCheck {
        product,
        total_contexts: total,
        rel_error,
    }
}

fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn round_significant(x: f64, digits: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits as i32 - 1 - magnitude);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `(frequency, item count)` pairs to a table with synthetic item names.
    fn table(spec: &[(u64, usize)]) -> FrequencyTable {
        FrequencyTable::from_pairs(
            spec.iter()
                .flat_map(|&(f, n)| (0..n).map(move |i| (format!("f{f}_{i}"), f))),
        )
    }

    /// Brute-force oracle: walk every frequency value and close a range as
    /// soon as its running total reaches the target.
    fn oracle(spec: &[(u64, usize)], seeds: [(u64, u64); 2]) -> Vec<u64> {
        let ctx = |lo: u64, hi: u64| -> u64 {
            spec.iter()
                .filter(|&&(f, _)| f >= lo && f <= hi)
                .map(|&(f, n)| f * n as u64)
                .sum()
        };
        let mut out = vec![ctx(seeds[0].0, seeds[0].1), ctx(seeds[1].0, seeds[1].1)];
        let target = (out[0] + out[1]) as f64 / 2.0;
        let max_f = spec.iter().map(|&(f, _)| f).max().unwrap();
        let mut acc = 0;
        let mut greedy = 0;
        for f in seeds[1].1 + 1..=max_f {
            acc += ctx(f, f);
            if acc as f64 >= target {
                out.push(acc);
                acc = 0;
                greedy += 1;
            }
        }
        if acc > 0 {
            if greedy > 0 {
                *out.last_mut().unwrap() += acc;
            } else {
                out.push(acc);
            }
        }
        out
    }

    #[test]
    fn context_counts() {
        assert_eq!(context_count([2, 2, 2]), 6);
        assert_eq!(context_count([5, 3]), 8);
        assert_eq!(context_count([]), 0);
    }

    #[test]
    fn four_equal_ranges() {
        let spec = [(2, 6), (3, 4), (4, 3), (6, 2)];
        assert_eq!(oracle(&spec, [(2, 2), (3, 3)]), [12, 12, 12, 12]);

        let p = equipartition(&table(&spec), (2, 2), (3, 3)).unwrap();
        let bounds: Vec<_> = p.ranges.iter().map(|r| (r.lo, r.hi)).collect();
        assert_eq!(bounds, [(2, 2), (3, 3), (4, 4), (5, 6)]);
        assert_eq!(p.ranges.iter().map(|r| r.contexts).collect::<Vec<_>>(), [12, 12, 12, 12]);
        assert_eq!(p.k(), 4);
        assert_eq!(p.n_c(), 12.0);

        let c = partition_invariant(&p);
        assert_eq!((c.product, c.total_contexts, c.rel_error), (48.0, 48, 0.0));
    }

    #[test]
    fn empty_second_seed_is_an_error() {
        let all_two = table(&[(2, 10)]);
        assert!(matches!(
            equipartition(&all_two, (2, 2), (3, 3)),
            Err(Error::EmptySeedRange { lo: 3, hi: 3 })
        ));
    }

    #[test]
    fn seed_shape_is_validated() {
        let t = table(&[(2, 3), (3, 3), (5, 1)]);
        assert!(equipartition(&t, (3, 3), (4, 4)).is_err());
        assert!(equipartition(&t, (2, 2), (4, 5)).is_err());
        assert!(equipartition(&t, (2, 2), (3, 2)).is_err());
    }

    #[test]
    fn hapaxes_are_ignored() {
        let with = table(&[(1, 50), (2, 6), (3, 4), (4, 3), (6, 2)]);
        let without = table(&[(2, 6), (3, 4), (4, 3), (6, 2)]);
        assert_eq!(
            equipartition(&with, (2, 2), (3, 3)).unwrap(),
            equipartition(&without, (2, 2), (3, 3)).unwrap()
        );
    }

    #[test]
    fn short_tail_after_seeds_stands_alone() {
        // target (20 + 30) / 2 = 25, the tail above the seeds holds only 7
        let p = equipartition(&table(&[(2, 10), (3, 10), (7, 1)]), (2, 2), (3, 3)).unwrap();
        let bounds: Vec<_> = p.ranges.iter().map(|r| (r.lo, r.hi, r.contexts)).collect();
        assert_eq!(bounds, [(2, 2, 20), (3, 3, 30), (4, 7, 7)]);
    }

    #[test]
    fn rounded_mean_stays_within_a_thousandth() {
        let p = equipartition(&table(&[(2, 37), (3, 29), (5, 11), (8, 13), (13, 7), (21, 5), (34, 3)]), (2, 2), (3, 3))
            .unwrap();
        let c = partition_invariant_rounded(&p, 4);
        assert!(c.rel_error <= 0.001, "{c:?}");
    }

    fn spec_strategy() -> impl Strategy<Value = Vec<(u64, usize)>> {
        prop::collection::btree_map(2u64..200, 1usize..40, 2..40)
            .prop_map(|m| m.into_iter().collect::<Vec<_>>())
            .prop_filter("seeds must be populated", |v| {
                v.iter().any(|&(f, _)| f == 2) && v.iter().any(|&(f, _)| f == 3)
            })
    }

    proptest! {
        #[test]
        fn matches_brute_force(spec in spec_strategy()) {
            let p = equipartition(&table(&spec), (2, 2), (3, 3)).unwrap();
            prop_assert_eq!(p.ranges.iter().map(|r| r.contexts).collect::<Vec<_>>(), oracle(&spec, [(2, 2), (3, 3)]));
        }

        #[test]
        fn invariants_hold(spec in spec_strategy(), split in 0u64..3) {
            let t = table(&spec);
            let first = (2, 2 + split);
            let second = (3 + split, 3 + 2 * split + 1);
            let Ok(p) = equipartition(&t, first, second) else { return Ok(()); };

            // contiguous, starting at 2
            prop_assert_eq!(p.ranges[0].lo, 2);
            for w in p.ranges.windows(2) {
                prop_assert_eq!(w[0].hi + 1, w[1].lo);
            }
            // every context of frequency >= 2 lands in exactly one range
            let expected: u64 = t.iter().filter(|&(_, f)| f >= 2).map(|(_, f)| f).sum();
            prop_assert_eq!(p.total_contexts(), expected);
            prop_assert_eq!(partition_invariant(&p).rel_error, 0.0);

            // greedy ranges other than the last close at the first value reaching the target
            let hist = frequency_histogram(&t);
            let greedy_end = p.k().saturating_sub(1);
            for r in p.ranges.iter().take(greedy_end).skip(FIRST_GREEDY_RANGE) {
                prop_assert!(r.contexts as f64 >= p.target);
                let last_block = hist.get(&r.hi).map(|n| n * r.hi).unwrap_or(0);
                prop_assert!(last_block > 0);
                prop_assert!(((r.contexts - last_block) as f64) < p.target);
            }
        }
    }
}
