//! Command implementations: each returns Ok(pass) where a false pass flag
//! maps to exit code 1.

use crate::specbuild::build_instance;
use crate::FamilyOpts;
use dualbent::codebook::{
    build_cd, build_cd1, build_partial_hadamard, seq_crosscorr, spectrum_to_json, Codebook,
    Construction, SpectrumMode,
};
use dualbent::field::ExtField;
use dualbent::sums::{agreement_tol, Method, SumContext, SumKind};
use dualbent::{round_sig, Error, Result};
use std::io::Write;
use std::path::Path;

/// Fixed-width value formatting used on result lines: five decimals with
/// trailing zeros trimmed, scientific form outside [1e-3, 1e6).
pub fn fmt_val(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-3..1e6).contains(&a) {
        let s = format!("{x:.5}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{x:.6e}")
    }
}

pub fn cmd_field(p: u64, k: u32, json: bool) -> Result<bool> {
    let f = ExtField::new(p, k)?;
    if json {
        let v = serde_json::json!({
            "p": p,
            "k": k,
            "size": f.size(),
            "modulus": f.modulus(),
            "alpha": f.alpha(),
            "group_order": f.group_order(),
        });
        println!("{}", serde_json::to_string_pretty(&v).unwrap());
    } else {
        let poly: Vec<String> = f
            .modulus()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => format!("{c}"),
                1 if c == 1 => "x".into(),
                1 => format!("{c}x"),
                _ if c == 1 => format!("x^{i}"),
                _ => format!("{c}x^{i}"),
            })
            .collect();
        println!(
            "GF({p}^{k}) = GF({}): modulus {}, primitive element code {}, group order {}",
            f.size(),
            poly.join(" + "),
            f.alpha(),
            f.group_order()
        );
    }
    Ok(true)
}

fn sum_row(
    ctx: &SumContext,
    kind: SumKind,
    j: Option<u64>,
    a: u64,
) -> Result<(serde_json::Value, f64)> {
    let direct = ctx.eval(kind, j, a, Method::Direct)?;
    let closed = ctx.eval(kind, j, a, Method::Closed)?;
    let residual = (direct.value - closed.value).norm();
    let row = serde_json::json!({
        "a_code": a,
        "value_re": round_sig(direct.value.re, 12),
        "value_im": round_sig(direct.value.im, 12),
        "classification": direct.classification.to_string(),
        "closed_re": round_sig(closed.value.re, 12),
        "closed_im": round_sig(closed.value.im, 12),
        "residual": round_sig(residual, 12),
    });
    Ok((row, residual))
}

pub fn cmd_sum(
    kind: &str,
    family: &FamilyOpts,
    a: Option<u64>,
    all: bool,
    psi_index: Option<u64>,
    out: Option<&Path>,
) -> Result<bool> {
    let kind: SumKind = kind.parse()?;
    let inst = build_instance(family)?;
    let ctx = SumContext::new(&inst);
    let tol = agreement_tol(inst.spec.space().size());

    let points: Vec<u64> = if all {
        (1..inst.spec.space().size()).collect()
    } else {
        let a = a.ok_or_else(|| Error::Invalid("pass --a CODE or --all".into()))?;
        if a == 0 {
            return Err(Error::Precondition(
                "a = 0 is excluded: the closed-form value set needs a ≠ 0 \
                 (at a = 0 the sum degenerates to an orthogonality count)"
                    .into(),
            ));
        }
        vec![a]
    };

    let mut rows = Vec::with_capacity(points.len());
    let mut worst = 0f64;
    let mut multiset: std::collections::BTreeMap<String, u64> = Default::default();
    for &a in &points {
        let (row, residual) = sum_row(&ctx, kind, psi_index, a)?;
        worst = worst.max(residual);
        *multiset
            .entry(format!(
                "{}+{}i",
                row["value_re"].as_f64().unwrap_or(0.0),
                row["value_im"].as_f64().unwrap_or(0.0)
            ))
            .or_insert(0) += 1;
        println!("{row}");
        rows.push(row);
    }
    if all {
        let summary: Vec<String> = multiset.iter().map(|(v, c)| format!("{v} ×{c}")).collect();
        eprintln!("value multiset: {}", summary.join(", "));
    }
    eprintln!("max residual {worst:.3e} (tolerance {tol:.3e})");
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(&rows).unwrap())
            .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(worst < tol)
}

fn build_codebook(construction: Construction, family: &FamilyOpts) -> Result<Codebook> {
    let inst = build_instance(family)?;
    match construction {
        Construction::Cd => build_cd(&inst),
        Construction::Cd1 => build_cd1(&inst),
        Construction::Hadamard => build_partial_hadamard(&inst),
    }
}

pub fn cmd_codebook(
    construction: &str,
    family: &FamilyOpts,
    mode: Option<&str>,
    out: Option<&Path>,
) -> Result<bool> {
    let construction: Construction = construction.parse()?;
    let cb = build_codebook(construction, family)?;
    let mode = match mode {
        Some(m) => m.parse()?,
        None => match construction {
            Construction::Hadamard => SpectrumMode::Pairwise,
            _ => SpectrumMode::Translate,
        },
    };
    if !cb.rows_distinct() {
        eprintln!(
            "warning: codewords are not pairwise distinct at (N, K) = ({}, {}); \
             the codebook definition requires N distinct vectors",
            cb.num_words, cb.length
        );
    }
    let spec = cb.spectrum(mode)?;
    println!(
        "{} {} {} {} {}",
        cb.num_words,
        cb.length,
        fmt_val(spec.imax),
        fmt_val(spec.welch),
        fmt_val(spec.ratio)
    );
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", dir.display())))?;
        write_json(&dir.join("codebook.json"), &cb.to_json())?;
        write_json(&dir.join("spectrum.json"), &spectrum_to_json(&spec))?;
        write_json(
            &dir.join("function.json"),
            &crate::specbuild::build_spec(family)?.to_json(),
        )?;
    }
    Ok(true)
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::Invalid(format!("cannot create {}: {e}", path.display())))?;
    let body = serde_json::to_string(v).unwrap();
    f.write_all(body.as_bytes())
        .and_then(|_| f.write_all(b"\n"))
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

pub fn cmd_spectrum(
    input: Option<&Path>,
    construction: Option<&str>,
    family: &FamilyOpts,
    mode: Option<&str>,
    out: Option<&Path>,
) -> Result<bool> {
    let spec = match (input, construction, crate::specbuild::family_given(family)) {
        (Some(path), _, _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Invalid(format!("bad JSON in {}: {e}", path.display())))?;
            let cb = Codebook::from_json(&v)?;
            let mode = match mode {
                Some(m) => m.parse()?,
                None => SpectrumMode::Pairwise,
            };
            cb.spectrum(mode)?
        }
        (None, Some(c), true) => {
            let construction: Construction = c.parse()?;
            let cb = build_codebook(construction, family)?;
            let mode = match mode {
                Some(m) => m.parse()?,
                None => match construction {
                    Construction::Hadamard => SpectrumMode::Pairwise,
                    _ => SpectrumMode::Translate,
                },
            };
            cb.spectrum(mode)?
        }
        _ => {
            return Err(Error::Invalid(
                "pass --in FILE, or --construction with family flags".into(),
            ))
        }
    };
    println!(
        "{} {} {} {} {}",
        spec.num_words,
        spec.length,
        fmt_val(spec.imax),
        fmt_val(spec.welch),
        fmt_val(spec.ratio)
    );
    for (mag, count) in &spec.entries {
        println!("  magnitude {} × {count}", fmt_val(*mag));
    }
    if let Some(path) = out {
        write_json(path, &spectrum_to_json(&spec))?;
    }
    Ok(true)
}

pub fn cmd_seq_xcorr(family: &FamilyOpts) -> Result<bool> {
    let inst = build_instance(family)?;
    let d = seq_crosscorr(&inst)?;
    for (v, c) in &d.observed {
        println!(
            "{}",
            serde_json::json!({
                "value_re": round_sig(v.re, 12),
                "value_im": round_sig(v.im, 12),
                "count": c,
            })
        );
    }
    let predicted: Vec<String> = d
        .predicted
        .iter()
        .map(|(v, c)| format!("{} ×{c}", fmt_val(*v)))
        .collect();
    eprintln!("predicted distribution: {}", predicted.join(", "));
    let tol = dualbent::sum_tol(inst.spec.space().size());
    let ok = d.matches(tol);
    eprintln!(
        "distribution {} the two-valued prediction",
        if ok { "matches" } else { "DOES NOT match" }
    );
    Ok(ok)
}
