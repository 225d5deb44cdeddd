//! Ground sets, subset masks, set functions and feasible families.
//!
//! Elements of the ground set are indexed from `0` to `n - 1`. A
//! [`SubsetMask`] stores membership as a little-endian bit vector; masks of
//! width `n <= 64` live in a single machine word.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Largest ground set for which a family can be enumerated exhaustively.
pub const ENUMERATION_LIMIT: usize = 24;

/// The base set `V = {0, ..., n-1}` with optional element names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain(
                "ground set must have at least one element".into(),
            ));
        }
        Ok(Self { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut ground = Self::new(labels.len())?;
        let mut sorted: Vec<&String> = labels.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("ground-set labels must be distinct".into()));
        }
        ground.labels = Some(labels);
        Ok(ground)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn check(&self, mask: &SubsetMask) -> Result<()> {
        if mask.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: mask.n(),
            });
        }
        Ok(())
    }
}

/// A subset `S` of the ground set stored as a fixed-width bit mask.
///
/// Masks are totally ordered as unsigned integers, which is the tie-break
/// used by every argmin in the crate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    n: usize,
    words: SmallVec<[u64; 1]>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl SubsetMask {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: smallvec![0; word_count(n)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut mask = Self::empty(n);
        for (w, word) in mask.words.iter_mut().enumerate() {
            let lo = w * 64;
            let bits = n.saturating_sub(lo).min(64);
            *word = if bits == 64 {
                u64::MAX
            } else {
                (1u64 << bits) - 1
            };
        }
        mask
    }

    /// Builds a mask of width `n <= 64` from raw bits.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n > 64 {
            return Err(Error::Domain(format!(
                "from_bits supports n <= 64, got {n}"
            )));
        }
        if n < 64 && bits >> n != 0 {
            return Err(Error::Domain(format!(
                "bit set at position >= n = {n} (bits = {bits:#x})"
            )));
        }
        let mut mask = Self::empty(n);
        mask.words[0] = bits;
        Ok(mask)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elements: I) -> Result<Self> {
        let mut mask = Self::empty(n);
        for i in elements {
            if i >= n {
                return Err(Error::Domain(format!(
                    "element {i} outside ground set of size {n}"
                )));
            }
            mask.insert(i);
        }
        Ok(mask)
    }

    /// Inverse of [`SubsetMask::characteristic`]: every coordinate must be
    /// exactly `0` or `1`.
    pub fn from_characteristic(chi: &[f64]) -> Result<Self> {
        let mut mask = Self::empty(chi.len());
        for (i, &v) in chi.iter().enumerate() {
            if v == 1.0 {
                mask.insert(i);
            } else if v != 0.0 {
                return Err(Error::Domain(format!("coordinate {i} = {v} is not binary")));
            }
        }
        Ok(mask)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The mask as a single word, when it fits.
    pub fn as_u64(&self) -> Option<u64> {
        (self.words.len() == 1).then(|| self.words[0])
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(
            i < self.n,
            "element {i} outside ground set of size {}",
            self.n
        );
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(
            i < self.n,
            "element {i} outside ground set of size {}",
            self.n
        );
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn with(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.insert(i);
        m
    }

    pub fn without(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.remove(i);
        m
    }

    pub fn card(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }

    fn zip_words(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self { n: self.n, words })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a ^ b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(&a, &b)| a & !b == 0)
    }

    /// The characteristic vector `chi_S` in `{0,1}^n`.
    pub fn characteristic(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| if self.contains(i) { 1.0 } else { 0.0 })
            .collect()
    }

    /// Zero-padded hexadecimal rendering, most significant digit first.
    pub fn to_hex(&self) -> String {
        let digits = self.n.div_ceil(4).max(1);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let nibble = (self.words[bit / 64] >> (bit % 64)) & 0xf;
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    /// Parses the output of [`SubsetMask::to_hex`].
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let mut mask = Self::empty(n);
        for (d, c) in hex.chars().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Domain(format!("invalid hex digit {c:?}")))?
                as u64;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let i = d * 4 + b;
                    if i >= n {
                        return Err(Error::Domain(format!(
                            "bit {i} outside ground set of size {n}"
                        )));
                    }
                    mask.insert(i);
                }
            }
        }
        Ok(mask)
    }
}

impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// All `2^n` masks in increasing integer order.
pub fn all_masks(n: usize) -> Result<impl Iterator<Item = SubsetMask>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "power-set enumeration",
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok((0u64..1 << n).map(move |b| SubsetMask::from_bits(n, b).expect("in range")))
}

/// `card(a ⊖ b)`.
pub fn symmetric_difference_card(a: &SubsetMask, b: &SubsetMask) -> Result<usize> {
    Ok(a.symmetric_difference(b)?.card())
}

type EvalFn = dyn Fn(&SubsetMask) -> f64 + Send + Sync;

/// An evaluatable set function `f: 2^V -> R` with its bound `M`.
///
/// Every call to [`SetFunction::eval`] checks `|f(S)| <= M`; a violation is
/// an error rather than a silently wrong regret bound.
#[derive(Clone)]
pub struct SetFunction {
    ground: GroundSet,
    eval: Arc<EvalFn>,
    bound: f64,
    normalized: bool,
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetFunction")
            .field("n", &self.ground.n())
            .field("bound", &self.bound)
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl SetFunction {
    /// Wraps `eval`. `bound` is a bound `M ≥ |f(S)|`; pass `f64::INFINITY`
    /// to disable the bound check.
    pub fn new<F>(ground: GroundSet, bound: f64, eval: F) -> Result<Self>
    where
        F: Fn(&SubsetMask) -> f64 + Send + Sync + 'static,
    {
        if !(bound > 0.0) {
            return Err(Error::Domain(format!(
                "bound M must be positive, got {bound}"
            )));
        }
        let empty = eval(&SubsetMask::empty(ground.n()));
        Ok(Self {
            normalized: empty == 0.0,
            ground,
            eval: Arc::new(eval),
            bound,
        })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.n()
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// True when `f(∅) = 0` exactly.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn eval(&self, s: &SubsetMask) -> Result<f64> {
        self.ground.check(s)?;
        let value = (self.eval)(s);
        if !value.is_finite() || value.abs() > self.bound {
            return Err(Error::BoundExceeded {
                value,
                bound: self.bound,
            });
        }
        Ok(value)
    }

    /// Replaces the declared bound.
    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound > 0.0) {
            return Err(Error::Domain(format!(
                "bound M must be positive, got {bound}"
            )));
        }
        self.bound = bound;
        Ok(self)
    }

    /// `S ↦ f(S) − f(∅)`. The bound doubles unless `f` was already normalized.
    pub fn normalize(&self) -> Result<Self> {
        if self.normalized {
            return Ok(self.clone());
        }
        let offset = self.eval(&SubsetMask::empty(self.n()))?;
        let inner = Arc::clone(&self.eval);
        Ok(Self {
            ground: self.ground.clone(),
            eval: Arc::new(move |s| inner(s) - offset),
            bound: 2.0 * self.bound,
            normalized: true,
        })
    }

    /// Opt-in cache keyed by mask bits.
    pub fn memoized(&self) -> Self {
        let inner = Arc::clone(&self.eval);
        let cache: Mutex<HashMap<SubsetMask, f64>> = Mutex::new(HashMap::new());
        Self {
            ground: self.ground.clone(),
            eval: Arc::new(move |s| {
                if let Some(&v) = cache.lock().unwrap().get(s) {
                    return v;
                }
                let v = inner(s);
                cache.lock().unwrap().insert(s.clone(), v);
                v
            }),
            bound: self.bound,
            normalized: self.normalized,
        }
    }

    /// Values on all `2^n` masks, indexed by mask bits.
    pub fn table(&self) -> Result<Vec<f64>> {
        all_masks(self.n())?.map(|s| self.eval(&s)).collect()
    }
}

/// Modular function `S ↦ Σ_{i∈S} w_i`, summed in ascending index order.
pub fn modular(weights: &[f64]) -> Result<SetFunction> {
    let ground = GroundSet::new(weights.len())?;
    let bound = weights
        .iter()
        .map(|w| w.abs())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let w = weights.to_vec();
    SetFunction::new(ground, bound, move |s| {
        s.iter().map(|i| w[i]).fold(0.0, |a, x| a + x)
    })
}

type ContainsFn = dyn Fn(&SubsetMask) -> bool + Send + Sync;
type EnumerateFn = dyn Fn() -> Box<dyn Iterator<Item = SubsetMask> + Send> + Send + Sync;
type LinearMinFn = dyn Fn(&[f64]) -> Result<SubsetMask> + Send + Sync;

/// A feasible family `𝒮 ⊆ 2^V`.
#[derive(Clone)]
pub struct FeasibleFamily {
    ground: GroundSet,
    label: String,
    contains: Arc<ContainsFn>,
    enumerate: Option<Arc<EnumerateFn>>,
    linear_min: Option<Arc<LinearMinFn>>,
    power_set: bool,
}

impl fmt::Debug for FeasibleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeasibleFamily")
            .field("label", &self.label)
            .field("n", &self.ground.n())
            .field("enumerable", &self.enumerate.is_some())
            .field("linear_min", &self.linear_min.is_some())
            .finish()
    }
}

/// Picks the `k` cheapest elements; ties by index.
fn cheapest_k(weights: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

impl FeasibleFamily {
    /// A family given only by its membership predicate. Enumeration (by
    /// filtering `2^V`) is available when `n <= 24`.
    pub fn from_predicate<P>(ground: GroundSet, label: impl Into<String>, contains: P) -> Self
    where
        P: Fn(&SubsetMask) -> bool + Send + Sync + 'static,
    {
        let contains: Arc<ContainsFn> = Arc::new(contains);
        let n = ground.n();
        let enumerate: Option<Arc<EnumerateFn>> = (n <= ENUMERATION_LIMIT).then(|| {
            let pred = Arc::clone(&contains);
            Arc::new(move || {
                let pred = Arc::clone(&pred);
                Box::new(all_masks(n).expect("checked").filter(move |s| pred(s)))
                    as Box<dyn Iterator<Item = SubsetMask> + Send>
            }) as Arc<EnumerateFn>
        });
        Self {
            ground,
            label: label.into(),
            contains,
            enumerate,
            linear_min: None,
            power_set: false,
        }
    }

    /// The unconstrained family `2^V`.
    pub fn power_set(ground: GroundSet) -> Self {
        let n = ground.n();
        let mut fam = Self::from_predicate(ground, "power set", |_| true);
        fam.power_set = true;
        fam.linear_min = Some(Arc::new(move |w: &[f64]| {
            check_weights(n, w)?;
            SubsetMask::from_elements(n, (0..n).filter(|&i| w[i] < 0.0))
        }));
        fam
    }

    pub fn cardinality_at_most(ground: GroundSet, k: usize) -> Self {
        let n = ground.n();
        let mut fam = Self::from_predicate(ground, format!("card <= {k}"), move |s| s.card() <= k);
        fam.linear_min = Some(Arc::new(move |w: &[f64]| {
            check_weights(n, w)?;
            SubsetMask::from_elements(n, cheapest_k(w, k).into_iter().filter(|&i| w[i] < 0.0))
        }));
        fam
    }

    pub fn cardinality_exactly(ground: GroundSet, k: usize) -> Result<Self> {
        let n = ground.n();
        if k > n {
            return Err(Error::Domain(format!(
                "no subset of {n} elements has {k} elements"
            )));
        }
        let mut fam = Self::from_predicate(ground, format!("card = {k}"), move |s| s.card() == k);
        fam.linear_min = Some(Arc::new(move |w: &[f64]| {
            check_weights(n, w)?;
            SubsetMask::from_elements(n, cheapest_k(w, k))
        }));
        Ok(fam)
    }

    /// Attaches a minimizer of modular objectives over the family.
    pub fn with_linear_min<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<SubsetMask> + Send + Sync + 'static,
    {
        self.linear_min = Some(Arc::new(f));
        self
    }

    pub fn without_enumeration(mut self) -> Self {
        self.enumerate = None;
        self
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.n()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_power_set(&self) -> bool {
        self.power_set
    }

    pub fn contains(&self, s: &SubsetMask) -> bool {
        s.n() == self.n() && (self.contains)(s)
    }

    pub fn can_enumerate(&self) -> bool {
        self.enumerate.is_some()
    }

    pub fn enumerate(&self) -> Option<Box<dyn Iterator<Item = SubsetMask> + Send>> {
        self.enumerate.as_ref().map(|e| e())
    }

    pub fn has_linear_min(&self) -> bool {
        self.linear_min.is_some()
    }

    /// Minimizes `Σ_{i∈S} w_i` over the family, if an oracle is attached.
    pub fn linear_min(&self, weights: &[f64]) -> Option<Result<SubsetMask>> {
        self.linear_min.as_ref().map(|m| {
            let s = m(weights)?;
            if !self.contains(&s) {
                return Err(Error::Invariant(format!(
                    "linear oracle of family '{}' returned infeasible mask {s}",
                    self.label
                )));
            }
            Ok(s)
        })
    }
}

fn check_weights(n: usize, w: &[f64]) -> Result<()> {
    if w.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: w.len(),
        });
    }
    Ok(())
}

/// Cumulative variation `Σ_{t≥2} sqrt(card(S_t ⊖ S_{t−1}))` of a comparator
/// sequence.
#[derive(Clone, Debug, Default)]
pub struct VariationLedger {
    history: Vec<SubsetMask>,
    cumulative: f64,
}

impl VariationLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, next: SubsetMask) -> Result<()> {
        if let Some(last) = self.history.last() {
            let d = symmetric_difference_card(last, &next)?;
            self.cumulative += (d as f64).sqrt();
        }
        self.history.push(next);
        Ok(())
    }

    pub fn append(mut self, next: SubsetMask) -> Result<Self> {
        self.push(next)?;
        Ok(self)
    }

    pub fn cumulative(&self) -> f64 {
        self.cumulative
    }

    pub fn history(&self) -> &[SubsetMask] {
        &self.history
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(n: usize, elems: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(n, elems.iter().copied()).unwrap()
    }

    #[test]
    fn symmetric_difference_examples() {
        // {1,2} vs {2,3} in 1-based labels.
        assert_eq!(
            symmetric_difference_card(&m(3, &[0, 1]), &m(3, &[1, 2])).unwrap(),
            2
        );
        assert_eq!(
            symmetric_difference_card(&m(3, &[]), &m(3, &[])).unwrap(),
            0
        );
        assert_eq!(
            symmetric_difference_card(&SubsetMask::full(7), &SubsetMask::empty(7)).unwrap(),
            7
        );
        assert!(matches!(
            symmetric_difference_card(&m(3, &[0]), &m(4, &[0])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn variation_ledger_examples() {
        let ledger = VariationLedger::new().append(m(3, &[0, 1])).unwrap();
        assert_eq!(ledger.cumulative(), 0.0);
        let ledger = ledger.append(m(3, &[1, 2])).unwrap();
        assert_eq!(ledger.cumulative(), 2f64.sqrt());

        let mut l = VariationLedger::new();
        for s in [m(2, &[]), m(2, &[0]), m(2, &[0, 1]), m(2, &[0])] {
            l.push(s).unwrap();
        }
        assert_eq!(l.cumulative(), 3.0);
    }

    #[test]
    fn masks_wider_than_a_word() {
        let mut a = SubsetMask::empty(130);
        a.insert(0);
        a.insert(64);
        a.insert(129);
        assert_eq!(a.card(), 3);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(SubsetMask::full(130).card(), 130);
        let b = SubsetMask::from_elements(130, [64]).unwrap();
        assert_eq!(symmetric_difference_card(&a, &b).unwrap(), 2);
        assert!(b < a);
        assert_eq!(SubsetMask::from_hex(130, &a.to_hex()).unwrap(), a);
        assert_eq!(a.to_hex().len(), 33);
    }

    #[test]
    fn from_bits_rejects_out_of_range() {
        assert!(SubsetMask::from_bits(3, 0b1000).is_err());
        assert_eq!(SubsetMask::from_bits(64, u64::MAX).unwrap().card(), 64);
        assert_eq!(SubsetMask::from_bits(8, 0xa5).unwrap().to_hex(), "a5");
    }

    #[test]
    fn labels_must_be_distinct() {
        assert!(GroundSet::with_labels(vec!["a".into(), "a".into()]).is_err());
        assert!(GroundSet::new(0).is_err());
        let g = GroundSet::with_labels(vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(g.label(1), "y");
    }

    #[test]
    fn normalize_examples() {
        let g = GroundSet::new(3).unwrap();
        let f = SetFunction::new(g, 100.0, |s| s.card() as f64 + 5.0).unwrap();
        assert!(!f.is_normalized());
        let nf = f.normalize().unwrap();
        assert!(nf.is_normalized());
        assert_eq!(nf.eval(&SubsetMask::empty(3)).unwrap(), 0.0);
        assert_eq!(nf.eval(&m(3, &[0])).unwrap(), 1.0);
        let nnf = nf.normalize().unwrap();
        for s in all_masks(3).unwrap() {
            assert_eq!(nnf.eval(&s).unwrap(), nf.eval(&s).unwrap());
        }

        // Cut of the path 0-1-2.
        let cut = SetFunction::new(GroundSet::new(3).unwrap(), 10.0, |s| {
            [(0, 1), (1, 2)]
                .iter()
                .filter(|&&(a, b)| s.contains(a) != s.contains(b))
                .count() as f64
        })
        .unwrap();
        let ncut = cut.normalize().unwrap();
        for s in all_masks(3).unwrap() {
            assert_eq!(ncut.eval(&s).unwrap(), cut.eval(&s).unwrap());
        }
    }

    #[test]
    fn bound_violation_is_an_error() {
        let f = SetFunction::new(GroundSet::new(2).unwrap(), 1.5, |s| s.card() as f64).unwrap();
        assert_eq!(f.eval(&m(2, &[0])).unwrap(), 1.0);
        assert!(matches!(
            f.eval(&m(2, &[0, 1])),
            Err(Error::BoundExceeded { .. })
        ));
        assert!(matches!(f.eval(&m(3, &[0])), Err(Error::Dimension { .. })));
    }

    #[test]
    fn memoized_matches_inner() {
        let f = modular(&[1.0, -2.0, 0.5]).unwrap();
        let mf = f.memoized();
        for _ in 0..2 {
            for s in all_masks(3).unwrap() {
                assert_eq!(mf.eval(&s).unwrap(), f.eval(&s).unwrap());
            }
        }
    }

    #[test]
    fn family_linear_oracles_return_members() {
        let g = GroundSet::new(4).unwrap();
        let w = [3.0, -1.0, 0.0, -2.0];
        let all = FeasibleFamily::power_set(g.clone());
        assert_eq!(all.linear_min(&w).unwrap().unwrap(), m(4, &[1, 3]));
        let le1 = FeasibleFamily::cardinality_at_most(g.clone(), 1);
        assert_eq!(le1.linear_min(&w).unwrap().unwrap(), m(4, &[3]));
        let eq3 = FeasibleFamily::cardinality_exactly(g, 3).unwrap();
        assert_eq!(eq3.linear_min(&w).unwrap().unwrap(), m(4, &[1, 2, 3]));
        assert_eq!(eq3.enumerate().unwrap().count(), 4);
    }

    fn arb_mask(n: usize) -> impl Strategy<Value = SubsetMask> {
        (0u64..1 << n).prop_map(move |b| SubsetMask::from_bits(n, b).unwrap())
    }

    proptest! {
        #[test]
        fn characteristic_roundtrip(s in arb_mask(10)) {
            prop_assert_eq!(SubsetMask::from_characteristic(&s.characteristic()).unwrap(), s.clone());
            prop_assert_eq!(SubsetMask::from_hex(10, &s.to_hex()).unwrap(), s);
        }

        #[test]
        fn ledger_matches_euclidean_path_length(seq in proptest::collection::vec(arb_mask(9), 1..20)) {
            let mut ledger = VariationLedger::new();
            let mut prev = ledger.cumulative();
            for s in &seq {
                ledger.push(s.clone()).unwrap();
                prop_assert!(ledger.cumulative() >= prev);
                prev = ledger.cumulative();
            }
            let euclid: f64 = seq.windows(2).map(|w| {
                let (a, b) = (w[0].characteristic(), w[1].characteristic());
                a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }).sum();
            prop_assert!((ledger.cumulative() - euclid).abs() <= 1e-12);
        }
    }

    #[test]
    fn symmetric_difference_is_a_metric_exhaustively() {
        // n = 6 keeps the triple loop at 2^18 combinations.
        let n = 6;
        let masks: Vec<_> = all_masks(n).unwrap().collect();
        for a in &masks {
            for b in &masks {
                let ab = symmetric_difference_card(a, b).unwrap();
                assert_eq!(ab, symmetric_difference_card(b, a).unwrap());
                assert_eq!(ab == 0, a == b);
                for c in &masks {
                    let bc = symmetric_difference_card(b, c).unwrap();
                    let ac = symmetric_difference_card(a, c).unwrap();
                    assert!(ac <= ab + bc);
                }
            }
        }
    }
}
