//! Tier presets for `ffekr suite`.
//!
//! * `fast`: every claim at q <= 9, sampled Carlitz scan at q = 8, probes
//!   with 1000 trials. Well under two minutes.
//! * `full`: the acceptance matrix, including the exhaustive q = 8 Carlitz
//!   scan, the q = 25 square-value scan and 10^4-trial probes.
//! * `extended`: `full` plus larger fields (sampled Carlitz at q = 9 and 11,
//!   Weil sampling at q = 169, probes at q = 11 and 13, extra functional
//!   equation cases). May run long.

use std::time::Instant;

use clap::ValueEnum;

use ffekr_core::charsum::{mcconnel_report, quad_sum_scan, shortcut_scan, square_shape_scan, weil_sample_scan};
use ffekr_core::directions::{carlitz_scan, ScanMode, DEFAULT_EXHAUSTIVE_BUDGET, DEFAULT_SEED};
use ffekr_core::families::{
    common_point, extend_unique, hilton_milner, is_t_intersecting, pencil, tangent_family, top_coeff_injective,
    Extension, StabilityThreshold,
};
use ffekr_core::polyfun::{intersection_count, PolyK};
use ffekr_core::search::{ekr_oracle, rootable_scan, sam0_check, stability_probe, DEFAULT_NODE_BUDGET};
use ffekr_core::{Error, Fe, FieldCtx, PointAG, Report, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Tier {
    Fast,
    Full,
    Extended,
}

pub type Job = Box<dyn FnOnce() -> Result<Report, Error>>;

fn field(q: u32) -> FieldCtx {
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).expect("q >= 2");
    let n = (q as f64).log(p as f64).round() as u32;
    FieldCtx::with_order(p as u64, n).expect("prime power")
}

fn job(f: impl FnOnce() -> Result<Report, Error> + 'static) -> Job {
    Box::new(f)
}

pub fn pencil_report(q: u32, k: usize) -> Result<Report, Error> {
    let started = Instant::now();
    let ctx = field(q);
    let (a, b) = (Fe(1), ctx.from_int(2));
    let p = pencil(&ctx, a, b, k)?;
    let expected = (q as usize).pow(k as u32);
    let centre = common_point(&ctx, &p)?;
    let mut r = Report::new("pencil-size", ctx.spec_string())
        .param("k", k)
        .param("point", [a, b])
        .param("expected", expected)
        .counter("members", p.len() as u64);
    let ok = p.len() == expected && centre == Some(PointAG::new(a, b));
    if !ok {
        r = r.witness(serde_json::json!({ "size": p.len(), "commonPoint": centre }));
    }
    Ok(r.verdict(Verdict::from_bool(ok)).finish(started))
}

/// Size, intersection, absence of a common point, and top-coefficient
/// injectivity of the point-line family through (0, 1) and y = 0.
pub fn point_line_report(q: u32) -> Result<Report, Error> {
    let started = Instant::now();
    let ctx = field(q);
    let hm = hilton_milner(&ctx, PointAG::new(Fe(0), Fe(1)), Fe(0), Fe(0))?;
    let expected = (q * q + q) as usize / 2;
    let check = is_t_intersecting(&ctx, &hm, 1)?;
    let centre = common_point(&ctx, &hm)?;
    let mut r = Report::new("point-line-family", ctx.spec_string())
        .param("expected", expected)
        .param("intersecting", check.holds)
        .param("commonPoint", centre)
        .counter("members", hm.len() as u64);
    let mut ok = hm.len() == expected && check.holds && centre.is_none();
    if check.holds {
        let collision = top_coeff_injective(&ctx, &hm, 1)?;
        ok &= collision.is_none();
    }
    if q % 2 == 1 {
        let th = StabilityThreshold::new(q as u64, 2)?;
        r = r.param("exceedsStabilityThreshold", th.exceeded_by(hm.len() as u64));
    }
    if !ok {
        r = r.witness(serde_json::json!({ "size": hm.len(), "failingPair": check.failing_pair, "commonPoint": centre }));
    }
    Ok(r.verdict(Verdict::from_bool(ok)).finish(started))
}

/// Tangent family of `x^2 + ((q-1)/2) x + 1`: counted size and tangency.
pub fn tangent_report(q: u32) -> Result<Report, Error> {
    let started = Instant::now();
    let ctx = field(q);
    let (a, b, c) = (Fe(1), Fe(q / 2), Fe(1));
    let m = tangent_family(&ctx, a, b, c)?;
    let f = PolyK::new(vec![c, b, a]);
    let expected = (q * (q - 1) / 2 + 1) as usize;
    let not_tangent: Vec<&PolyK> = m
        .members()
        .iter()
        .filter(|g| **g != f && intersection_count(&ctx, &f, g).expect("same bound") != 1)
        .collect();
    let check = is_t_intersecting(&ctx, &m, 1)?;
    let mut r = Report::new("tangent-family", ctx.spec_string())
        .param("f", f.to_string())
        .param("expected", expected)
        .param("intersecting", check.holds)
        .counter("members", m.len() as u64)
        .note(format!(
            "counted size q(q-1)/2 + 1 = {expected}; the expression (q^2-q+1)/2 = {:.1} is not an integer",
            (q * q - q + 1) as f64 / 2.0
        ));
    let ok = m.len() == expected && not_tangent.is_empty() && check.holds;
    if !ok {
        r = r.witness(serde_json::json!({
            "size": m.len(),
            "notTangent": not_tangent.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "failingPair": check.failing_pair,
        }));
    }
    Ok(r.verdict(Verdict::from_bool(ok)).finish(started))
}

/// Point-line family sizes never exceed the stability threshold for odd q
/// in `lo..=hi`.
pub fn threshold_consistency_report(lo: u64, hi: u64) -> Result<Report, Error> {
    let started = Instant::now();
    let mut r = Report::new("point-line-below-threshold", format!("odd q in {lo}..={hi}"));
    let mut scanned = 0;
    let mut bad = Vec::new();
    for q in (lo..=hi).filter(|q| q % 2 == 1) {
        scanned += 1;
        if StabilityThreshold::new(q, 2)?.exceeded_by((q * q + q) / 2) {
            bad.push(q);
        }
    }
    for q in &bad {
        r = r.witness(serde_json::json!({ "q": q }));
    }
    r = r.counter("scanned", scanned).counter("violations", bad.len() as u64);
    Ok(r.verdict(Verdict::from_bool(bad.is_empty())).finish(started))
}

/// Remove each member of `pencils` random pencils and re-extend.
pub fn extension_report(q: u32, pencils: u64, seed: u64) -> Result<Report, Error> {
    use rand::{Rng, SeedableRng};
    let started = Instant::now();
    let ctx = field(q);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut r = Report::new("pencil-unique-extension", ctx.spec_string()).param("k", 2).param("pencils", pencils).seed(seed);
    let (mut scanned, mut failures) = (0u64, 0u64);
    for _ in 0..pencils {
        let (a, b) = (Fe(rng.gen_range(0..q)), Fe(rng.gen_range(0..q)));
        let full = pencil(&ctx, a, b, 2)?;
        for m in full.members() {
            scanned += 1;
            let ok = matches!(
                extend_unique(&ctx, &full.without(m))?,
                Extension::Unique { point, pencil } if point == PointAG::new(a, b) && pencil == full
            );
            if !ok {
                failures += 1;
                if failures <= 8 {
                    r = r.witness(serde_json::json!({ "point": [a, b], "removed": m.to_string() }));
                }
            }
        }
    }
    r = r.counter("scanned", scanned).counter("violations", failures);
    Ok(r.verdict(Verdict::from_bool(failures == 0)).finish(started))
}

pub fn jobs(tier: Tier) -> Vec<Job> {
    let full = tier != Tier::Fast;
    let extended = tier == Tier::Extended;
    let mut jobs: Vec<Job> = Vec::new();

    for q in [3, 4] {
        jobs.push(job(move || ekr_oracle(&field(q), 2, DEFAULT_NODE_BUDGET)));
    }
    if extended {
        jobs.push(job(|| ekr_oracle(&field(5), 2, DEFAULT_NODE_BUDGET)));
    }

    let mut pencils = vec![(5, 2), (7, 2), (3, 3)];
    if extended {
        pencils.extend([(9, 2), (4, 3)]);
    }
    for (q, k) in pencils {
        jobs.push(job(move || pencil_report(q, k)));
    }
    let hm_q: &[u32] = if full { &[3, 4, 5, 7, 8, 9, 11] } else { &[3, 4, 5, 7, 8, 9] };
    for &q in hm_q {
        jobs.push(job(move || point_line_report(q)));
    }
    let tangent_q: &[u32] = if full { &[5, 7, 9, 11, 13] } else { &[5, 7, 9] };
    for &q in tangent_q {
        jobs.push(job(move || tangent_report(q)));
    }
    jobs.push(job(|| threshold_consistency_report(11, 169)));

    let quad_q: &[u32] = if full { &[3, 5, 7, 9, 11, 13] } else { &[3, 5, 7, 9] };
    for &q in quad_q {
        jobs.push(job(move || quad_sum_scan(&field(q))));
    }

    let mut weil_q = vec![9];
    if full {
        weil_q.extend([25, 49, 121]);
    }
    if extended {
        weil_q.push(169);
    }
    for q in weil_q {
        jobs.push(job(move || weil_sample_scan(&field(q), 1000, 5, DEFAULT_SEED + q as u64)));
    }

    jobs.push(job(|| carlitz_scan(&field(4), ScanMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET)));
    if full {
        jobs.push(job(|| carlitz_scan(&field(8), ScanMode::Exhaustive, DEFAULT_EXHAUSTIVE_BUDGET)));
    } else {
        jobs.push(job(|| carlitz_scan(&field(8), ScanMode::Sample { count: 100_000, seed: DEFAULT_SEED }, 0)));
    }
    if extended {
        for q in [9, 11] {
            jobs.push(job(move || {
                carlitz_scan(&field(q), ScanMode::Sample { count: 1_000_000, seed: DEFAULT_SEED }, 0)
            }));
        }
    }

    if full {
        jobs.push(job(|| shortcut_scan(&field(25))));
    }
    if extended {
        jobs.push(job(|| shortcut_scan(&field(49))));
    }
    jobs.push(job(|| square_shape_scan(&field(9), 1)));

    let mut mcconnel = vec![(5, 2), (9, 2)];
    if extended {
        mcconnel.extend([(7, 2), (7, 3), (13, 3), (16, 3), (16, 5), (25, 2), (27, 2)]);
    }
    for (q, delta) in mcconnel {
        jobs.push(job(move || mcconnel_report(&field(q), delta)));
    }

    let sam0_q: &[u32] = if full { &[2, 3, 4, 5] } else { &[2, 3, 4] };
    for &q in sam0_q {
        for k in 1..=2 {
            for t in 1..=k {
                jobs.push(job(move || sam0_check(&field(q), k, t, DEFAULT_NODE_BUDGET)));
            }
        }
    }
    let rootable_q: &[u32] = if full { &[3, 4, 5, 7, 8, 9, 11, 13] } else { &[3, 4, 5, 7, 8, 9] };
    for &q in rootable_q {
        jobs.push(job(move || rootable_scan(&field(q))));
    }

    let (probe_q, trials): (Vec<u32>, u64) = match tier {
        Tier::Fast => (vec![4, 5, 7, 8, 9], 1000),
        Tier::Full => (vec![4, 5, 7, 8, 9], 10_000),
        Tier::Extended => (vec![4, 5, 7, 8, 9, 11, 13], 10_000),
    };
    for q in probe_q {
        jobs.push(job(move || stability_probe(&field(q), trials, DEFAULT_SEED)));
    }

    let ext_q: &[u32] = if full { &[5, 7] } else { &[5] };
    for &q in ext_q {
        jobs.push(job(move || extension_report(q, 20, DEFAULT_SEED)));
    }
    jobs
}
