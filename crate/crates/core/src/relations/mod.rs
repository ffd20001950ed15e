//! Exact verification of the algebra's identities on truncated windows.
//!
//! Every verifier produces a [`VerificationReport`]; sweeps over basis
//! vectors and mode pairs run in parallel and are merged in canonical
//! order, so the first-failure witness does not depend on scheduling.

mod closure;
mod presets;
mod tower;
mod verify;

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{FockVector, Partition};
use crate::qseries::Truncation;
use crate::ring::{Monomial, Scalar};

pub use closure::{fusion_closure, ClosureBasis, ClosureMember};
pub use presets::{named_field, preset, FieldName, RelationSpec, PRESETS};
pub use tower::{
    classical_limit, fusion_tower, miura_product, verify_limits, FusionStep, FusionTower, LimitReport, TowerDirection,
};
pub use verify::{
    residue_prefactor, verify_exchange, verify_relation, verify_skao, verify_triple_residue, verify_ttilde,
    TestMonomial, TtildeSign, TTILDE_CONSTANT_NOTE,
};

/// Window sizes shared by all verifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub p_order: i32,
    pub buffer: i32,
    pub degree: u32,
    pub mode_window: i32,
    pub x_order: i32,
}

impl Params {
    pub fn new(p_order: i32, degree: u32, mode_window: i32) -> Self {
        Params { p_order, buffer: 4, degree, mode_window, x_order: (2 * (mode_window + degree as i32)).max(16) }
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::new(self.p_order, self.buffer)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::Failed => "failed",
        })
    }
}

/// Where a comparison first went wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub basis: String,
    pub modes: Vec<i32>,
    pub coordinate: String,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "basis {} modes {:?} at {}: lhs = {} vs rhs = {}", self.basis, self.modes, self.coordinate, self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub relation: String,
    pub params: Params,
    pub status: Status,
    pub checks: usize,
    pub witness: Option<Witness>,
    /// Discrepancies with displayed formulas that do not decide the status.
    pub flags: Vec<String>,
    pub wall_time_ms: u128,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub(crate) fn from_tally(relation: &str, params: Params, tally: Tally, start: Instant) -> Self {
        VerificationReport {
            relation: relation.to_string(),
            params,
            status: if tally.witness.is_some() { Status::Failed } else { Status::Verified },
            checks: tally.checks,
            witness: tally.witness,
            flags: tally.flags,
            wall_time_ms: start.elapsed().as_millis(),
        }
    }

    /// Fold several sub-reports into one.
    pub fn combine(relation: &str, params: Params, parts: Vec<VerificationReport>) -> Self {
        let mut tally = Tally::default();
        let mut ms = 0;
        for r in parts {
            ms += r.wall_time_ms;
            tally.checks += r.checks;
            if tally.witness.is_none() {
                tally.witness = r.witness;
            }
            tally.flags.extend(r.flags.into_iter().map(|f| format!("{}: {f}", r.relation)));
        }
        VerificationReport {
            relation: relation.to_string(),
            params,
            status: if tally.witness.is_some() { Status::Failed } else { Status::Verified },
            checks: tally.checks,
            witness: tally.witness,
            flags: tally.flags,
            wall_time_ms: ms,
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(
            f,
            "{}: {} ({} checks; K={} D={} M={} X={})",
            self.relation, self.status, self.checks, p.p_order, p.degree, p.mode_window, p.x_order
        )?;
        if let Some(w) = &self.witness {
            writeln!(f, "  witness: {w}")?;
        }
        for fl in &self.flags {
            writeln!(f, "  flag: {fl}")?;
        }
        Ok(())
    }
}

/// Running count of scalar equalities plus the first failure.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tally {
    pub checks: usize,
    pub witness: Option<Witness>,
    pub flags: Vec<String>,
}

impl Tally {
    pub fn absorb(&mut self, o: Tally) {
        self.checks += o.checks;
        if self.witness.is_none() {
            self.witness = o.witness;
        }
        self.flags.extend(o.flags);
    }

    /// Compare two scalars, requiring the comparison window to reach `need`.
    pub fn scalar(&mut self, lhs: &Scalar, rhs: &Scalar, need: i32, at: impl FnOnce() -> (String, Vec<i32>, String)) -> Result<()> {
        let (eq, prec) = lhs.compare(rhs);
        if prec < need {
            return Err(Error::InsufficientPrecision { got: prec, need });
        }
        self.checks += 1;
        if !eq && self.witness.is_none() {
            let (basis, modes, coordinate) = at();
            self.witness = Some(Witness { basis, modes, coordinate, lhs: lhs.truncate(prec), rhs: rhs.truncate(prec) });
        }
        Ok(())
    }

    /// Compare two Fock vectors coordinatewise.
    pub fn vectors(&mut self, lhs: &FockVector, rhs: &FockVector, need: i32, u: &Partition, modes: &[i32]) -> Result<()> {
        let keys: std::collections::BTreeSet<&Partition> = lhs.terms().chain(rhs.terms()).map(|(p, _)| p).collect();
        if keys.is_empty() {
            self.checks += 1;
            return Ok(());
        }
        for k in keys {
            self.scalar(&lhs.coeff(k), &rhs.coeff(k), need, || (u.to_string(), modes.to_vec(), k.to_string()))?;
        }
        Ok(())
    }

    /// Record a boolean structural check.
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(Witness {
                basis: String::new(),
                modes: Vec::new(),
                coordinate: what(),
                lhs: Scalar::exact_zero(),
                rhs: Scalar::exact_zero(),
            });
        }
    }
}

/// Run independent checks in parallel and merge them in input order.
pub(crate) fn sweep<T, F>(items: &[T], f: F) -> Result<Tally>
where
    T: Sync,
    F: Fn(&T) -> Result<Tally> + Sync,
{
    let parts: Vec<Tally> = items.par_iter().map(&f).collect::<Result<_>>()?;
    let mut t = Tally::default();
    for p in parts {
        t.absorb(p);
    }
    Ok(t)
}

/// Retry a computation with more precision until its comparisons are
/// decided. Mode products reach s-orders down to about `−2(D+M)`, which the
/// working precision and the buffer of the structure functions must absorb;
/// a shortfall grows both.
pub(crate) fn with_precision<R>(params: Params, mut f: impl FnMut(Truncation, i32) -> Result<R>) -> Result<R> {
    let (d, m) = (params.degree as i32, params.mode_window);
    let mut buffer = params.buffer.max(d + m + 1);
    let mut working = 2 * params.p_order + 2 * (d + m) + 6;
    for _ in 0..5 {
        match f(Truncation::new(params.p_order, buffer), working) {
            Err(Error::InsufficientPrecision { got, need }) => {
                buffer += d + m + 2;
                working += (need - got).max(0) + 2 * (d + m + 2);
            }
            r => return r,
        }
    }
    f(Truncation::new(params.p_order, buffer), working)
}

/// `1 − c·p^{a2/2} q^b`.
pub(crate) fn one_minus(a2: i32, b: i32) -> Scalar {
    Scalar::one().sub(&Monomial::pq(a2, b).to_scalar())
}

/// `Π num / Π den` of `(1 − p^{a2/2} q^b)` factors, inverted to `window`.
pub(crate) fn ratio(num: &[(i32, i32)], den: &[(i32, i32)], window: i32) -> Result<Scalar> {
    let n = num.iter().fold(Scalar::one(), |acc, &(a, b)| acc.mul(&one_minus(a, b)));
    let d = den.iter().fold(Scalar::one(), |acc, &(a, b)| acc.mul(&one_minus(a, b)));
    Ok(n.mul(&d.inv_to(window)?))
}
