use crate::error::{Error, Result};
use crate::psets::fit::{fit_description, FitShape};
use crate::psets::{desc_verify, ReturnSetDesc};

use super::obstruction::{frobenius_obstruction, Obstruction, DEFAULT_R_MAX, DEFAULT_S_MAX};
use super::{return_set, TorusInstance};

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub hits: Vec<u64>,
    pub desc: ReturnSetDesc,
    pub obstruction: Obstruction,
}

/// Return set on `[0, n_max]`, its fitted description (progressions plus
/// p-sets plus exceptions) verified against the hits, and the obstruction
/// verdict for the linear part.
pub fn full_pipeline(inst: &TorusInstance) -> Result<PipelineReport> {
    let p = inst.p();
    let hits = return_set(&inst.map, &inst.alpha, &inst.variety, inst.n_max)?;
    let obstruction = frobenius_obstruction(&inst.map.a, p, DEFAULT_R_MAX, DEFAULT_S_MAX);
    let mut desc = fit_description(&hits, inst.n_max, p, FitShape::ApAndPsets)?;
    let oracle = |n: u64| hits.binary_search(&n).is_ok();
    if !desc_verify(&mut desc, oracle, inst.n_max)? {
        // the fit only keeps structures whose members are hits, so this is a bug
        return Err(Error::Invariant("fitted description disagrees with the return set".into()));
    }
    Ok(PipelineReport { hits, desc, obstruction })
}
