//! Finitely supported probability distributions over `{0, .., n-1}`.
//!
//! A [`Dist`] is a list of `(weight, outcome)` pairs. Duplicate outcomes are
//! allowed in the raw form; [`Dist::compact`] produces the canonical form
//! (duplicates merged, zero weights dropped, sorted by outcome). Monadic
//! structure is given by [`Dist::ret`] and [`Dist::bind`], and stochastic
//! kernels compose through Kleisli composition, which is the
//! Chapman-Kolmogorov product of the corresponding row-stochastic matrices.

use crate::error::{Error, Result};

/// Allowed absolute deviation of the total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A finitely supported probability distribution over `n` outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    n: usize,
    entries: Vec<(f64, usize)>,
}

impl Dist {
    /// Builds a distribution from raw `(weight, outcome)` pairs.
    ///
    /// Weights must be finite and non-negative, outcomes below `n`, and the
    /// total mass within [`MASS_TOLERANCE`] of 1.
    pub fn new(n: usize, entries: Vec<(f64, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if entries.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let mut sum = 0.0;
        for &(weight, outcome) in &entries {
            if outcome >= n {
                return Err(Error::OutcomeOutOfRange { outcome, n });
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidWeight { outcome, weight });
            }
            sum += weight;
        }
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { n, entries })
    }

    /// Dense constructor: `weights[i]` is the probability of outcome `i`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let entries = weights.iter().copied().zip(0..).collect();
        Self::new(weights.len(), entries)
    }

    /// The point mass at `outcome`.
    pub fn ret(outcome: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if outcome >= n {
            return Err(Error::OutcomeOutOfRange { outcome, n });
        }
        Ok(Self {
            n,
            entries: vec![(1.0, outcome)],
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let w = 1.0 / n as f64;
        Ok(Self {
            n,
            entries: (0..n).map(|i| (w, i)).collect(),
        })
    }

    /// Cardinality of the underlying outcome set.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw `(weight, outcome)` entries, duplicates included.
    pub fn entries(&self) -> &[(f64, usize)] {
        &self.entries
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|&(w, _)| w).sum()
    }

    /// Probability of `outcome` (sum over duplicate entries).
    pub fn prob(&self, outcome: usize) -> f64 {
        self.entries
            .iter()
            .filter(|&&(_, o)| o == outcome)
            .map(|&(w, _)| w)
            .sum()
    }

    /// Dense probability vector of length `n`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for &(w, o) in &self.entries {
            out[o] += w;
        }
        out
    }

    /// Monadic bind: `result(b) = sum_a f(a)(b) * p(a)`.
    ///
    /// The kernel is evaluated once per positive-weight entry. Every returned
    /// distribution must share the same cardinality. The result is raw: one
    /// entry per pair of input and kernel entries.
    pub fn bind<F>(&self, mut f: F) -> Result<Dist>
    where
        F: FnMut(usize) -> Dist,
    {
        let mut codomain = None;
        let mut entries = Vec::new();
        for &(w, a) in &self.entries {
            if w == 0.0 {
                continue;
            }
            let inner = f(a);
            match codomain {
                None => codomain = Some(inner.n),
                Some(m) if m != inner.n => {
                    return Err(Error::CardinalityMismatch {
                        expected: m,
                        found: inner.n,
                    })
                }
                Some(_) => {}
            }
            entries.extend(inner.entries.iter().map(|&(v, b)| (v * w, b)));
        }
        // A valid distribution always carries some positive weight.
        let n = codomain.ok_or(Error::EmptyDistribution)?;
        Ok(Dist { n, entries })
    }

    /// Pushes the distribution through a tabulated kernel, returning the
    /// compacted result.
    pub fn bind_kernel(&self, kernel: &Kernel) -> Result<Dist> {
        if kernel.domain() != self.n {
            return Err(Error::CardinalityMismatch {
                expected: kernel.domain(),
                found: self.n,
            });
        }
        Ok(self.bind(|a| kernel.rows[a].clone())?.compact())
    }

    /// `E_p[f] = sum_s p(s) f(s)`.
    pub fn expectation<F>(&self, f: F) -> f64
    where
        F: Fn(usize) -> f64,
    {
        self.entries.iter().map(|&(w, o)| w * f(o)).sum()
    }

    /// Canonical form: duplicates merged, zero weights dropped, sorted by
    /// outcome.
    pub fn compact(&self) -> Dist {
        let mut sorted = self.entries.clone();
        // stable, so duplicates are summed in their original order
        sorted.sort_by_key(|&(_, o)| o);
        let mut entries: Vec<(f64, usize)> = Vec::with_capacity(sorted.len());
        for (w, o) in sorted {
            match entries.last_mut() {
                Some(last) if last.1 == o => last.0 += w,
                _ => entries.push((w, o)),
            }
        }
        entries.retain(|&(w, _)| w != 0.0);
        Dist { n: self.n, entries }
    }

    pub fn is_compact(&self) -> bool {
        self.entries.iter().all(|&(w, _)| w != 0.0) && self.entries.windows(2).all(|p| p[0].1 < p[1].1)
    }

    /// Equality of canonical forms up to `tol` per outcome.
    pub fn approx_eq(&self, other: &Dist, tol: f64) -> bool {
        self.n == other.n
            && self
                .to_dense()
                .iter()
                .zip(other.to_dense())
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// A stochastic kernel from `{0, .., domain-1}` to distributions over
/// `{0, .., codomain-1}`, stored as one distribution per input.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    codomain: usize,
    rows: Vec<Dist>,
}

impl Kernel {
    pub fn new(codomain: usize, rows: Vec<Dist>) -> Result<Self> {
        if rows.is_empty() || codomain == 0 {
            return Err(Error::EmptySet);
        }
        if let Some(row) = rows.iter().find(|r| r.n != codomain) {
            return Err(Error::CardinalityMismatch {
                expected: codomain,
                found: row.n,
            });
        }
        Ok(Self { codomain, rows })
    }

    /// Tabulates `f` over `{0, .., domain-1}`.
    pub fn from_fn<F>(domain: usize, codomain: usize, f: F) -> Result<Self>
    where
        F: FnMut(usize) -> Dist,
    {
        Self::new(codomain, (0..domain).map(f).collect())
    }

    /// Builds a kernel from the rows of a row-stochastic matrix.
    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let codomain = rows.first().map_or(0, Vec::len);
        let rows = rows.iter().map(|r| Dist::from_weights(r)).collect::<Result<Vec<_>>>()?;
        Self::new(codomain, rows)
    }

    /// The unit kernel `x -> ret(x)`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |x| Dist::ret(x, n).expect("x < n"))
    }

    pub fn domain(&self) -> usize {
        self.rows.len()
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn apply(&self, x: usize) -> &Dist {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Dist] {
        &self.rows
    }

    /// Dense row-stochastic matrix.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(Dist::to_dense).collect()
    }

    /// Kleisli composition `x -> bind(self(x), next)`; rows are compacted.
    pub fn then(&self, next: &Kernel) -> Result<Kernel> {
        kleisli_compose(self, next)
    }
}

/// Kleisli composition of kernels, `(f >=> g)(x)(c) = sum_b f(x)(b) g(b)(c)`.
pub fn kleisli_compose(f: &Kernel, g: &Kernel) -> Result<Kernel> {
    if f.codomain != g.domain() {
        return Err(Error::CardinalityMismatch {
            expected: f.codomain,
            found: g.domain(),
        });
    }
    let rows = f
        .rows
        .iter()
        .map(|row| row.bind_kernel(g))
        .collect::<Result<Vec<_>>>()?;
    Kernel::new(g.codomain, rows)
}

/// The `k`-fold Kleisli iterate `p0 >=> T >=> .. >=> T`; `k = 0` gives `p0`.
pub fn kleisli_iterate(p0: &Dist, kernel: &Kernel, k: usize) -> Result<Dist> {
    if kernel.domain() != kernel.codomain {
        return Err(Error::CardinalityMismatch {
            expected: kernel.domain(),
            found: kernel.codomain,
        });
    }
    let mut p = p0.clone();
    for _ in 0..k {
        p = p.bind_kernel(kernel)?;
    }
    Ok(p)
}
