//! Double description: extreme rays of `{y : A y >= 0}` by incremental
//! insertion of constraint rows, with exact integer rays.
//!
//! Rows are inserted in lexicographic order. Two rays are combined only if
//! they are adjacent: their common zero set has rank `D - 2`.

use alloc::vec::Vec;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Ray coordinates: checked `i128` first, `BigInt` on overflow.
pub trait DdInt: Clone + Ord + Debug + Signed + Send + Sync {
    fn cmul(&self, o: &Self) -> Option<Self>;
    fn csub(&self, o: &Self) -> Option<Self>;
    fn cadd(&self, o: &Self) -> Option<Self>;
    fn gcd_with(&self, o: &Self) -> Self;
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl DdInt for i128 {
    fn cmul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn csub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn cadd(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn gcd_with(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl DdInt for BigInt {
    fn cmul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn csub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn cadd(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn gcd_with(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

fn overflow() -> Error {
    Error::Overflow("double description ray arithmetic".into())
}

fn dot<I: DdInt>(a: &[I], b: &[I]) -> Result<I> {
    let mut acc = I::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc.cadd(&x.cmul(y).ok_or_else(overflow)?).ok_or_else(overflow)?;
    }
    Ok(acc)
}

/// Divides by the gcd of the entries.
fn primitive<I: DdInt>(v: &mut [I]) {
    let g = v.iter().fold(I::zero(), |g, x| g.gcd_with(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = x.clone() / g.clone();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bitset(Vec<u64>);

impl Bitset {
    fn new(len: usize) -> Self {
        Self(alloc::vec![0; len.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| k * 64 + b)
        })
    }
}

/// Rank of the given integer rows (fraction-free elimination), stopping early
/// once it exceeds `cap`.
fn rank<I: DdInt>(rows: &[&[I]], cols: usize, cap: usize) -> Result<usize> {
    let mut m: Vec<Vec<I>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for r in m.iter_mut().skip(rank + 1) {
            if r[c].is_zero() {
                continue;
            }
            let f = r[c].clone();
            for k in c..cols {
                let v = pivot_row[c].cmul(&r[k]).ok_or_else(overflow)?.csub(&f.cmul(&pivot_row[k]).ok_or_else(overflow)?);
                r[k] = v.ok_or_else(overflow)?;
            }
            primitive(&mut r[c..]);
        }
        rank += 1;
        if rank > cap {
            return Ok(rank);
        }
    }
    Ok(rank)
}

/// Snapshot of a run between insertions, for checkpoint and resume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdState {
    /// Row insertion order.
    pub order: Vec<usize>,
    /// Number of rows of `order` already processed.
    pub inserted: usize,
    pub rays: Vec<Vec<BigInt>>,
    /// Rays generated so far (for checkpoint spacing).
    pub generated: u64,
}

/// Receives snapshots every `interval()` generated rays.
pub trait DdObserver {
    fn checkpoint(&mut self, state: &DdState);

    fn interval(&self) -> u64 {
        CHECKPOINT_INTERVAL
    }
}

impl DdObserver for () {
    fn checkpoint(&mut self, _: &DdState) {}
}

pub const CHECKPOINT_INTERVAL: u64 = 10_000;

/// Lexicographic order of rational rows.
pub fn lexicographic_order(rows: &[Vec<Rational>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[a].cmp(&rows[b]).then(a.cmp(&b)));
    order
}

/// Integer rows from rational rows (each scaled by its denominators' lcm).
pub fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let mut v: Vec<BigInt> = r.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
            primitive(&mut v);
            v
        })
        .collect()
}

/// Extreme rays of the pointed cone `{y : rows·y >= 0}`; `rows` must have
/// full column rank.
pub fn extreme_rays(
    rows: &[Vec<BigInt>],
    resume: Option<DdState>,
    observer: &mut dyn DdObserver,
) -> Result<Vec<Vec<BigInt>>> {
    let as_i128: Option<Vec<Vec<i128>>> =
        rows.iter().map(|r| r.iter().map(|x| x.to_i128().filter(|v| v.unsigned_abs() < 1 << 40)).collect()).collect();
    if let Some(small) = as_i128 {
        match run::<i128>(&small, resume.clone(), observer) {
            Ok(rays) => return Ok(rays.into_iter().map(|r| r.iter().map(DdInt::to_big).collect()).collect()),
            Err(Error::Overflow(_)) => {}
            Err(e) => return Err(e),
        }
    }
    run::<BigInt>(rows, resume, observer).map(|rays| rays.into_iter().collect())
}

struct Ray<I> {
    v: Vec<I>,
    zeros: Bitset,
}

fn run<I: DdInt>(rows: &[Vec<I>], resume: Option<DdState>, observer: &mut dyn DdObserver) -> Result<Vec<Vec<I>>> {
    let m = rows.len();
    let d = rows.first().map(|r| r.len()).ok_or(Error::EmptyPointSet)?;
    let zeros_of = |v: &[I], inserted: &[usize]| -> Result<Bitset> {
        let mut z = Bitset::new(m);
        for &i in inserted {
            if dot(&rows[i], v)?.is_zero() {
                z.set(i);
            }
        }
        Ok(z)
    };

    let (order, mut inserted_count, mut rays, mut generated) = match resume {
        Some(state) => {
            let inserted = &state.order[..state.inserted];
            let rays = state
                .rays
                .iter()
                .map(|r| {
                    let v: Vec<I> = r.iter().map(|x| I::from_big(x).ok_or_else(overflow)).collect::<Result<_>>()?;
                    let zeros = zeros_of(&v, inserted)?;
                    Ok(Ray { v, zeros })
                })
                .collect::<Result<Vec<_>>>()?;
            (state.order, state.inserted, rays, state.generated)
        }
        None => {
            let big: Vec<Vec<Rational>> =
                rows.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.to_big())).collect()).collect();
            let lex = lexicographic_order(&big);
            // initial basis: first rows (in lexicographic order) raising the rank
            let mut basis: Vec<usize> = Vec::new();
            for &i in &lex {
                let mut cand: Vec<&[I]> = basis.iter().map(|&b| rows[b].as_slice()).collect();
                cand.push(&rows[i]);
                if rank(&cand, d, d)? == cand.len() {
                    basis.push(i);
                    if basis.len() == d {
                        break;
                    }
                }
            }
            if basis.len() < d {
                return Err(Error::Unsupported("constraint rows do not have full column rank".into()));
            }
            let inverse = invert(&basis.iter().map(|&b| big[b].clone()).collect::<Vec<_>>())
                .ok_or_else(|| Error::Unsupported("singular initial basis".into()))?;
            let mut rays = Vec::with_capacity(d);
            for j in 0..d {
                let col: Vec<Rational> = (0..d).map(|i| inverse[i][j].clone()).collect();
                let l = col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let mut v: Vec<BigInt> = col.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
                primitive(&mut v);
                let v: Vec<I> = v.iter().map(|x| I::from_big(x).ok_or_else(overflow)).collect::<Result<_>>()?;
                let zeros = zeros_of(&v, &basis)?;
                rays.push(Ray { v, zeros });
            }
            let mut order = basis.clone();
            order.extend(lex.into_iter().filter(|i| !basis.contains(i)));
            (order, d, rays, d as u64)
        }
    };

    while inserted_count < order.len() {
        let row = &rows[order[inserted_count]];
        let row_index = order[inserted_count];
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next: Vec<Ray<I>> = Vec::new();
        let values: Vec<I> = rays.iter().map(|r| dot(row, &r.v)).collect::<Result<_>>()?;
        for (k, s) in values.iter().enumerate() {
            if s.is_positive() {
                pos.push(k);
            } else if s.is_negative() {
                neg.push(k);
            }
        }
        if neg.is_empty() {
            // redundant row: only zero sets change
            for (k, r) in rays.iter_mut().enumerate() {
                if values[k].is_zero() {
                    r.zeros.set(row_index);
                }
            }
            inserted_count += 1;
            continue;
        }
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.count() + 2 < d {
                    continue;
                }
                let members: Vec<&[I]> = common.iter().map(|i| rows[i].as_slice()).collect();
                if rank(&members, d, d - 2)? != d - 2 {
                    continue;
                }
                let (sp, sn) = (&values[p], &values[n]);
                let mut v: Vec<I> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(a, b)| sp.cmul(a).and_then(|x| sn.cmul(b).and_then(|y| x.csub(&y))).ok_or_else(overflow))
                    .collect::<Result<_>>()?;
                primitive(&mut v);
                let mut zeros = common;
                zeros.set(row_index);
                next.push(Ray { v, zeros });
            }
        }
        let created = next.len() as u64;
        for (k, mut r) in rays.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            if values[k].is_zero() {
                r.zeros.set(row_index);
            }
            next.push(r);
        }
        rays = next;
        inserted_count += 1;
        let interval = observer.interval().max(1);
        let before = generated / interval;
        generated += created;
        if generated / interval > before {
            observer.checkpoint(&DdState {
                order: order.clone(),
                inserted: inserted_count,
                rays: rays.iter().map(|r| r.v.iter().map(DdInt::to_big).collect()).collect(),
                generated,
            });
        }
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

/// Inverse of a square rational matrix by Gauss–Jordan.
pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= inv.clone();
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(pivot) {
                    *x -= f.clone() * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(mut a: Vec<Vec<Rational>>, cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= inv.clone();
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(pivot) {
                    *x -= f.clone() * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}
