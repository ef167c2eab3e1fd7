use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::subset::{check_n, SubsetMask};

/// Largest ground set for which a set function is materialized densely.
pub const MAX_DENSE_N: usize = 24;

/// A map `2^N → T`, stored densely and indexed by subset bits.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunction<T> {
    n: usize,
    values: Vec<T>,
}

fn check_dense(n: usize) -> Result<()> {
    check_n(n)?;
    if n > MAX_DENSE_N {
        return Err(Error::invalid(format!(
            "dense set functions are limited to n <= {MAX_DENSE_N}, got {n}"
        )));
    }
    Ok(())
}

impl<T: Scalar> SetFunction<T> {
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        check_dense(n)?;
        if values.len() != 1 << n {
            return Err(Error::invalid(format!(
                "set function on n = {n} needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        Ok(SetFunction { n, values })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_dense(n)?;
        Ok(SetFunction {
            n,
            values: vec![T::zero(); 1 << n],
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(SubsetMask) -> T) -> Result<Self> {
        check_dense(n)?;
        let values = (0..1u64 << n)
            .map(|b| f(SubsetMask::from_bits(b, n)))
            .collect();
        Ok(SetFunction { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: SubsetMask) -> &T {
        &self.values[s.bits() as usize]
    }

    pub fn set(&mut self, s: SubsetMask, value: T) {
        self.values[s.bits() as usize] = value;
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubsetMask, &T)> + '_ {
        let n = self.n;
        self.values
            .iter()
            .enumerate()
            .map(move |(b, v)| (SubsetMask::from_bits(b as u64, n), v))
    }

    /// Entries with a nonzero value.
    pub fn support(&self) -> impl Iterator<Item = (SubsetMask, &T)> + '_ {
        self.iter().filter(|(_, v)| !v.is_zero())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SetFunction<U> {
        SetFunction {
            n: self.n,
            values: self.values.iter().map(f).collect(),
        }
    }
}
