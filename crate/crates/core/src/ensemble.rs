//! Ensemble constructions: band base matrices for the coupled code families,
//! design rates, densities and multi-edge degree distribution pairs.
//!
//! Conventions used throughout:
//!
//! * `coupling` is the half-width `L`; a coupled chain always has
//!   `lhat = 2L + 1` sections.
//! * LDPC-side families (`regular`, `ha`, `sc-ldpc`, `sc-ha`) require
//!   `r = k * l` with integer `k`; MN-side families (`mn`, `sc-mn`,
//!   `rsc-mn`) require `l = k * r`.
//! * Design rates come from protograph node counts
//!   `(punctured + transmitted - checks) / transmitted`, which is the rule
//!   that reproduces the published rate tables exactly.

use crate::base_matrix::BaseMatrix;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub type Rational = Ratio<i64>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EnsembleError {
    #[error("parameter {name} must be >= {min} (got {got})")]
    TooSmall { name: &'static str, min: u32, got: u32 },
    #[error("{num} = {num_val} must be an integer multiple of {den} = {den_val}")]
    NonIntegerRatio { num: &'static str, den: &'static str, num_val: u32, den_val: u32 },
    #[error("{num}/{den} = {k} but this band construction needs a ratio of at least 2")]
    BandTooNarrow { num: &'static str, den: &'static str, k: u32 },
    #[error("parity block width kL\u{0302}+l-g-1 = {width} must be >= 1")]
    EmptyParityBlock { width: i64 },
    #[error("operation `{op}` is not defined for the {family} family")]
    UnsupportedFamily { op: &'static str, family: &'static str },
}

fn require_min(name: &'static str, got: u32, min: u32) -> Result<(), EnsembleError> {
    if got < min {
        Err(EnsembleError::TooSmall { name, min, got })
    } else {
        Ok(())
    }
}

fn integer_ratio(
    num: &'static str,
    num_val: u32,
    den: &'static str,
    den_val: u32,
) -> Result<u32, EnsembleError> {
    if den_val == 0 || num_val % den_val != 0 {
        return Err(EnsembleError::NonIntegerRatio { num, den, num_val, den_val });
    }
    Ok(num_val / den_val)
}

/// Band matrix `H`: `(lhat + l - 1) x (k * lhat)`, column weight `l`.
///
/// Columns are grouped into `lhat` sections of `k` consecutive columns;
/// every column in (0-based) section `s` has ones exactly in rows
/// `s .. s + l`.
pub fn build_h(l: u32, r: u32, lhat: u32, k: u32) -> Result<BaseMatrix, EnsembleError> {
    require_min("l", l, 1)?;
    require_min("lhat", lhat, 1)?;
    require_min("k", k, 1)?;
    if r != k * l {
        return Err(EnsembleError::NonIntegerRatio { num: "r", den: "l", num_val: r, den_val: l });
    }
    let rows = (lhat + l - 1) as usize;
    let cols = (k * lhat) as usize;
    let mut m = BaseMatrix::zeros(rows, cols);
    for s in 0..lhat as usize {
        for c in s * k as usize..(s + 1) * k as usize {
            for row in s..s + l as usize {
                m.set(row, c, 1);
            }
        }
    }
    Ok(m)
}

/// Band matrix `S`: `(width + g - 1) x width`, column weight `g`;
/// (0-based) column `t` has ones in rows `t .. t + g`.
pub fn build_s(g: u32, width: u32) -> Result<BaseMatrix, EnsembleError> {
    require_min("g", g, 1)?;
    require_min("width", width, 1)?;
    let rows = (width + g - 1) as usize;
    let mut m = BaseMatrix::zeros(rows, width as usize);
    for t in 0..width as usize {
        for row in t..t + g as usize {
            m.set(row, t, 1);
        }
    }
    Ok(m)
}

/// Band matrix `V`: `(k * lhat + l - 2) x lhat`, column weight `l`;
/// (0-based) column `t` has ones in rows `k*t .. k*t + l`.
///
/// The row count only accommodates the full column weight when
/// `k = l / r >= 2`, so narrower ratios are rejected.
pub fn build_v(l: u32, r: u32, lhat: u32, k: u32) -> Result<BaseMatrix, EnsembleError> {
    require_min("lhat", lhat, 1)?;
    require_min("r", r, 1)?;
    if l != k * r {
        return Err(EnsembleError::NonIntegerRatio { num: "l", den: "r", num_val: l, den_val: r });
    }
    if k < 2 {
        return Err(EnsembleError::BandTooNarrow { num: "l", den: "r", k });
    }
    let rows = (k * lhat + l - 2) as usize;
    let mut m = BaseMatrix::zeros(rows, lhat as usize);
    for t in 0..lhat as usize {
        for row in t * k as usize..t * k as usize + l as usize {
            m.set(row, t, 1);
        }
    }
    Ok(m)
}

/// Coupled LDPC base matrix: `build_h(l, r, 2L+1, r/l)` with nothing punctured.
pub fn sc_ldpc_base(l: u32, r: u32, coupling: u32) -> Result<BaseMatrix, EnsembleError> {
    require_min("L", coupling, 1)?;
    let k = integer_ratio("r", r, "l", l)?;
    build_h(l, r, 2 * coupling + 1, k)
}

/// Coupled MN base matrix `[V | S]` with the `V` columns punctured.
pub fn sc_mn_base(l: u32, r: u32, g: u32, coupling: u32) -> Result<BaseMatrix, EnsembleError> {
    require_min("L", coupling, 1)?;
    require_min("g", g, 1)?;
    let k = integer_ratio("l", l, "r", r)?;
    let lhat = 2 * coupling + 1;
    let width = k as i64 * lhat as i64 + l as i64 - g as i64 - 1;
    if width < 1 {
        return Err(EnsembleError::EmptyParityBlock { width });
    }
    let v = build_v(l, r, lhat, k)?;
    let s = build_s(g, width as u32)?;
    debug_assert_eq!(v.rows(), s.rows());
    let mut base = v.hconcat(&s);
    base.puncture_prefix(lhat as usize);
    Ok(base)
}

/// Coupled HA base matrix `[H 0; S I]` with the left block punctured.
pub fn sc_ha_base(l: u32, r: u32, g: u32, coupling: u32) -> Result<BaseMatrix, EnsembleError> {
    require_min("L", coupling, 1)?;
    require_min("g", g, 1)?;
    require_min("l", l, 1)?;
    let k = integer_ratio("r", r, "l", l)?;
    let lhat = 2 * coupling + 1;
    let h = build_h(l, r, lhat, k)?;
    let s = build_s(g, k * lhat)?;
    let info_cols = (k * lhat) as usize;
    let ident = s.rows();
    let rows = h.rows() + s.rows();
    let cols = info_cols + ident;
    let mut base = BaseMatrix::zeros(rows, cols);
    for row in 0..h.rows() {
        for col in 0..info_cols {
            base.set(row, col, h.get(row, col));
        }
    }
    for row in 0..s.rows() {
        for col in 0..info_cols {
            base.set(h.rows() + row, col, s.get(row, col));
        }
        base.set(h.rows() + row, info_cols + row, 1);
    }
    base.puncture_prefix(info_cols);
    Ok(base)
}

/// Uncoupled `(l, r)`-regular ensemble as a `1 x k` base row of `l`-fold
/// parallel edges, so one DE engine serves the uncoupled case too.
pub fn regular_base(l: u32, r: u32) -> Result<BaseMatrix, EnsembleError> {
    require_min("l", l, 1)?;
    let k = integer_ratio("r", r, "l", l)?;
    let mut m = BaseMatrix::zeros(1, k as usize);
    for col in 0..k as usize {
        m.set(0, col, l);
    }
    Ok(m)
}

/// Uncoupled MN protograph: one punctured information node of degree
/// `l = k*r` feeding `k` checks, each check also owning one degree-`g`
/// parity node.
pub fn mn_base(l: u32, r: u32, g: u32) -> Result<BaseMatrix, EnsembleError> {
    require_min("g", g, 1)?;
    require_min("r", r, 1)?;
    let k = integer_ratio("l", l, "r", r)? as usize;
    let mut m = BaseMatrix::zeros(k, 1 + k);
    for row in 0..k {
        m.set(row, 0, r);
        m.set(row, 1 + row, g);
    }
    m.puncture_prefix(1);
    Ok(m)
}

/// Uncoupled HA protograph: `k = r/l` punctured information nodes of degree
/// `l + g`, one LDPC check of degree `r`, and `k` degree-`(g+1)` LDGM checks
/// each with a transmitted degree-1 parity node.
pub fn ha_base(l: u32, r: u32, g: u32) -> Result<BaseMatrix, EnsembleError> {
    require_min("g", g, 1)?;
    require_min("l", l, 1)?;
    let k = integer_ratio("r", r, "l", l)? as usize;
    let mut m = BaseMatrix::zeros(1 + k, 2 * k);
    for col in 0..k {
        m.set(0, col, l);
        m.set(1 + col, col, g);
        m.set(1 + col, k + col, 1);
    }
    m.puncture_prefix(k);
    Ok(m)
}

/// Tagged ensemble parameter record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum EnsembleSpec {
    Regular { l: u32, r: u32 },
    Mn { l: u32, r: u32, g: u32 },
    Ha { l: u32, r: u32, g: u32 },
    ScLdpc { l: u32, r: u32, coupling: u32 },
    ScMn { l: u32, r: u32, g: u32, coupling: u32 },
    ScHa { l: u32, r: u32, g: u32, coupling: u32 },
    RscMn { l: u32, r: u32, g: u32, coupling: u32, window: u32 },
}

impl EnsembleSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            EnsembleSpec::Regular { .. } => "regular",
            EnsembleSpec::Mn { .. } => "mn",
            EnsembleSpec::Ha { .. } => "ha",
            EnsembleSpec::ScLdpc { .. } => "sc-ldpc",
            EnsembleSpec::ScMn { .. } => "sc-mn",
            EnsembleSpec::ScHa { .. } => "sc-ha",
            EnsembleSpec::RscMn { .. } => "rsc-mn",
        }
    }

    pub fn l(&self) -> u32 {
        match *self {
            EnsembleSpec::Regular { l, .. }
            | EnsembleSpec::Mn { l, .. }
            | EnsembleSpec::Ha { l, .. }
            | EnsembleSpec::ScLdpc { l, .. }
            | EnsembleSpec::ScMn { l, .. }
            | EnsembleSpec::ScHa { l, .. }
            | EnsembleSpec::RscMn { l, .. } => l,
        }
    }

    pub fn r(&self) -> u32 {
        match *self {
            EnsembleSpec::Regular { r, .. }
            | EnsembleSpec::Mn { r, .. }
            | EnsembleSpec::Ha { r, .. }
            | EnsembleSpec::ScLdpc { r, .. }
            | EnsembleSpec::ScMn { r, .. }
            | EnsembleSpec::ScHa { r, .. }
            | EnsembleSpec::RscMn { r, .. } => r,
        }
    }

    pub fn g(&self) -> Option<u32> {
        match *self {
            EnsembleSpec::Mn { g, .. }
            | EnsembleSpec::Ha { g, .. }
            | EnsembleSpec::ScMn { g, .. }
            | EnsembleSpec::ScHa { g, .. }
            | EnsembleSpec::RscMn { g, .. } => Some(g),
            _ => None,
        }
    }

    /// Coupling half-width `L`.
    pub fn coupling(&self) -> Option<u32> {
        match *self {
            EnsembleSpec::ScLdpc { coupling, .. }
            | EnsembleSpec::ScMn { coupling, .. }
            | EnsembleSpec::ScHa { coupling, .. }
            | EnsembleSpec::RscMn { coupling, .. } => Some(coupling),
            _ => None,
        }
    }

    /// Section count `2L + 1` of the coupled families.
    pub fn lhat(&self) -> Option<u32> {
        self.coupling().map(|big_l| 2 * big_l + 1)
    }

    pub fn window(&self) -> Option<u32> {
        match *self {
            EnsembleSpec::RscMn { window, .. } => Some(window),
            _ => None,
        }
    }

    /// The protograph base matrix of the ensemble. The randomized family has
    /// no finite base matrix; it is analyzed by the chain engine instead.
    pub fn base_matrix(&self) -> Result<BaseMatrix, EnsembleError> {
        match *self {
            EnsembleSpec::Regular { l, r } => regular_base(l, r),
            EnsembleSpec::Mn { l, r, g } => mn_base(l, r, g),
            EnsembleSpec::Ha { l, r, g } => ha_base(l, r, g),
            EnsembleSpec::ScLdpc { l, r, coupling } => sc_ldpc_base(l, r, coupling),
            EnsembleSpec::ScMn { l, r, g, coupling } => sc_mn_base(l, r, g, coupling),
            EnsembleSpec::ScHa { l, r, g, coupling } => sc_ha_base(l, r, g, coupling),
            EnsembleSpec::RscMn { .. } => Err(EnsembleError::UnsupportedFamily {
                op: "base_matrix",
                family: self.family_name(),
            }),
        }
    }

    /// Design rate from protograph node counts:
    /// `(punctured + transmitted - checks) / transmitted`.
    pub fn design_rate(&self) -> Result<Rational, EnsembleError> {
        match self {
            EnsembleSpec::Regular { .. } | EnsembleSpec::RscMn { .. } => {
                Err(EnsembleError::UnsupportedFamily {
                    op: "design_rate",
                    family: self.family_name(),
                })
            }
            _ => {
                let base = self.base_matrix()?;
                let punctured = base.punctured_count() as i64;
                let transmitted = base.transmitted_count() as i64;
                let checks = base.rows() as i64;
                Ok(Rational::new(punctured + transmitted - checks, transmitted))
            }
        }
    }

    /// Parity-check density (nonzero entries per information bit), exact at
    /// the given `L` together with its large-`L` limit.
    pub fn density(&self) -> Result<DensityReport, EnsembleError> {
        match *self {
            EnsembleSpec::ScMn { l, r, g, .. } => {
                let k = integer_ratio("l", l, "r", r)? as i64;
                let base = self.base_matrix()?;
                let punctured = base.punctured_count() as i64;
                let transmitted = base.transmitted_count() as i64;
                let checks = base.rows() as i64;
                let edges = l as i64 * punctured + g as i64 * transmitted;
                Ok(DensityReport {
                    finite: Rational::new(edges, punctured + transmitted - checks),
                    limit: Rational::from_integer(l as i64 + g as i64 * k),
                })
            }
            EnsembleSpec::ScHa { l, r, g, .. } => {
                let k = integer_ratio("r", r, "l", l)? as i64;
                let base = self.base_matrix()?;
                let punctured = base.punctured_count() as i64;
                let transmitted = base.transmitted_count() as i64;
                let checks = base.rows() as i64;
                let edges = (l as i64 + g as i64) * punctured + transmitted;
                Ok(DensityReport {
                    finite: Rational::new(edges, punctured + transmitted - checks),
                    limit: Rational::new(k * (1 + g as i64 + l as i64), k - 1),
                })
            }
            _ => Err(EnsembleError::UnsupportedFamily {
                op: "density",
                family: self.family_name(),
            }),
        }
    }

    /// Multi-edge degree distribution pair of the uncoupled MN / HA families.
    pub fn degree_distribution(&self) -> Result<DegreeDistributionPair, EnsembleError> {
        match *self {
            EnsembleSpec::Mn { l, r, g } => {
                require_min("l", l, 1)?;
                require_min("r", r, 1)?;
                let mut nu = BTreeMap::new();
                nu.insert(Monomial::new(&[l, 0]), Rational::new(r as i64, l as i64));
                nu.insert(Monomial::with_channel(&[0, g]), Rational::from_integer(1));
                let mut mu = BTreeMap::new();
                mu.insert(Monomial::new(&[r, g]), Rational::from_integer(1));
                Ok(DegreeDistributionPair { nu, mu })
            }
            EnsembleSpec::Ha { l, r, g } => {
                require_min("l", l, 1)?;
                require_min("r", r, 1)?;
                let mut nu = BTreeMap::new();
                nu.insert(Monomial::new(&[l, g, 0]), Rational::from_integer(1));
                nu.insert(Monomial::with_channel(&[0, 0, 1]), Rational::from_integer(1));
                let mut mu = BTreeMap::new();
                mu.insert(Monomial::new(&[r, 0, 0]), Rational::new(l as i64, r as i64));
                mu.insert(Monomial::new(&[0, g, 1]), Rational::from_integer(1));
                Ok(DegreeDistributionPair { nu, mu })
            }
            _ => Err(EnsembleError::UnsupportedFamily {
                op: "degree_distribution",
                family: self.family_name(),
            }),
        }
    }
}

/// Exact and limiting density values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityReport {
    pub finite: Rational,
    pub limit: Rational,
}

/// One monomial of a multi-edge generating function: an exponent per edge
/// type plus a flag for the channel factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub channel: bool,
}

impl Monomial {
    pub fn new(exponents: &[u32]) -> Self {
        Monomial { exponents: exponents.to_vec(), channel: false }
    }

    pub fn with_channel(exponents: &[u32]) -> Self {
        Monomial { exponents: exponents.to_vec(), channel: true }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.channel {
            write!(f, "eps")?;
        }
        for (i, &e) in self.exponents.iter().enumerate() {
            match e {
                0 => {}
                1 => write!(f, " x{}", i + 1)?,
                _ => write!(f, " x{}^{}", i + 1, e)?,
            }
        }
        Ok(())
    }
}

/// Degree distribution pair `(nu, mu)` as coefficient maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeDistributionPair {
    pub nu: BTreeMap<Monomial, Rational>,
    pub mu: BTreeMap<Monomial, Rational>,
}

/// Design rate of the randomized coupled MN ensemble,
/// `r/l + (1 + w - 2 * sum_{i=0..=w} (1 - (i/w)^r (i/w)^g)) / lhat`.
///
/// Converges to `r/l` as `lhat` grows; at `w = 1` the correction vanishes
/// exactly and the rate equals the uncoupled value.
pub fn randomized_rate(l: u32, r: u32, g: u32, coupling: u32, w: u32) -> f64 {
    assert!(w >= 1 && coupling >= 1 && l >= 1);
    let lhat = f64::from(2 * coupling + 1);
    let wf = f64::from(w);
    let sum: f64 = (0..=w)
        .map(|i| {
            let t = f64::from(i) / wf;
            1.0 - t.powi(r as i32) * t.powi(g as i32)
        })
        .sum();
    f64::from(r) / f64::from(l) + (1.0 + wf - 2.0 * sum) / lhat
}
