//! Translate command-line family options into catalog specs.

use crate::FamilyOpts;
use dualbent::bent::{make_bent, BentInstance, BentSpec, FamilyParams};
use dualbent::{Error, Result};

fn need<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| Error::Invalid(format!("--{flag} is required for family {family}")))
}

/// True when the options actually name a function (used by commands whose
/// family block is optional and falls back to the whole battery).
pub fn family_given(opts: &FamilyOpts) -> bool {
    opts.family.is_some() || opts.n.is_some() || opts.degrees.is_some() || opts.alphas.is_some()
}

pub fn build_spec(opts: &FamilyOpts) -> Result<BentSpec> {
    let p = opts
        .p
        .ok_or_else(|| Error::Invalid("--p is required".into()))?;
    let m = opts
        .m
        .ok_or_else(|| Error::Invalid("--m is required".into()))?;
    // ext-square with e = 1 is the default instance shape
    let family = opts.family.as_deref().unwrap_or("ext-square");
    let t = opts.t.unwrap_or(m);
    let params = match family {
        "ext-square" | "ext_square" => FamilyParams::ExtSquare {
            n: need(opts.n, "n", family)?,
            e: opts.e.unwrap_or(1),
        },
        "pair-monomial" | "pair_monomial" => FamilyParams::PairMonomial {
            half_degree: need(opts.n, "n", family)?,
            u: need(opts.u, "u", family)?,
            e: opts.e.unwrap_or(1),
        },
        "diag-quadratic" | "diag_quadratic" => FamilyParams::DiagQuadratic {
            alphas: opts.alphas.clone().ok_or_else(|| {
                Error::Invalid("--alphas is required for the diagonal form".into())
            })?,
        },
        "unitary-form" | "unitary_form" => FamilyParams::UnitaryForm {
            n: need(opts.n, "n", family)?,
            e: opts.e.unwrap_or(1),
        },
        "composite-maiorana" | "composite_maiorana" => {
            let degrees = opts
                .degrees
                .clone()
                .ok_or_else(|| Error::Invalid("--degrees n',n'' is required".into()))?;
            if degrees.len() != 2 {
                return Err(Error::Invalid(
                    "--degrees must list exactly n',n'' for composite-maiorana".into(),
                ));
            }
            let alphas = opts
                .alphas
                .clone()
                .ok_or_else(|| Error::Invalid("--alphas α₁,α₂,α₃ is required".into()))?;
            if alphas.len() != 3 {
                return Err(Error::Invalid(
                    "--alphas must list exactly three codes".into(),
                ));
            }
            FamilyParams::CompositeMaiorana {
                n1: degrees[0],
                n2: degrees[1],
                alphas: [alphas[0], alphas[1], alphas[2]],
                beta: need(opts.beta, "beta", family)?,
                gamma: need(opts.gamma, "gamma", family)?,
                l_coeffs: opts
                    .l_coeffs
                    .clone()
                    .ok_or_else(|| Error::Invalid("--l-coeffs is required".into()))?,
            }
        }
        other => {
            return Err(Error::Invalid(format!(
                "unknown family '{other}' (expected ext-square, pair-monomial, \
                 diag-quadratic, unitary-form or composite-maiorana)"
            )))
        }
    };
    make_bent(p, m, t, params)
}

/// Build and fully verify the instance the options describe.
pub fn build_instance(opts: &FamilyOpts) -> Result<BentInstance> {
    build_spec(opts)?.build()
}
