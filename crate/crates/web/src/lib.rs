//! Browser bindings. Each export takes plain numbers or strings and
//! returns a JSON string (or throws a string), so the page needs no glue
//! beyond `JSON.parse`. The pure functions are what the native tests call.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use primsieve::criteria::{classify, hypersieve_margins, Criterion, SieveMargin, Verdict};
use primsieve::data::{factor_for, FactorFixtures, FactorSource};
use primsieve::hyperplane::{
    canonical_field, exhaustive_exception_search, make_g_a, ExceptionCertificate, HyperplaneSet, SearchBudget,
    SEARCH_CEILING,
};
use primsieve::numtheory::{prime_power, FactorBudget, PrimeTable};
use primsieve::omega::{check_omega_with, BoundProfile, CheckVerdict, OmegaError};

/// Largest omega the curve will tabulate, and the most points per call.
pub const CURVE_OMEGA_MAX: usize = 200_000;
pub const CURVE_POINTS_MAX: usize = 400;

#[derive(Debug, Serialize)]
pub struct MarginsView {
    pub q: u64,
    pub r: u32,
    pub verdict: Verdict,
    pub criterion: Option<Criterion>,
    pub omega_r: usize,
    pub factor_source: FactorSource,
    pub margins: Vec<SieveMargin>,
    pub certificate: Option<String>,
}

/// Verdict for (q, r) and the log margin of each sieve choice s.
pub fn margins(q: u64, r: u32) -> Result<MarginsView, String> {
    if prime_power(q).is_none() || r < 2 {
        return Err(format!("need a prime power q and r >= 2 (got q = {q}, r = {r})"));
    }
    let (fact, source) =
        factor_for(q, r, FactorFixtures::bundled(), FactorBudget::default()).map_err(|e| e.to_string())?;
    let mut rec = classify(q, r, &fact).map_err(|e| e.to_string())?;
    let margins = hypersieve_margins(q, r, &fact.radical()).map_err(|e| e.to_string())?;
    if rec.verdict == Verdict::PossibleException && (q as u128).pow(r) <= SEARCH_CEILING as u128 {
        let ctx = canonical_field(q as u32, r).map_err(|e| e.to_string())?;
        if let Ok(certs) = exhaustive_exception_search(&ctx, SearchBudget::default()) {
            if let Some(c) = certs.first() {
                rec = rec.with_certificate(c.to_line(&ctx));
            }
        }
    }
    Ok(MarginsView {
        q,
        r,
        verdict: rec.verdict,
        criterion: rec.criterion,
        omega_r: rec.omega_r,
        factor_source: source,
        margins,
        certificate: rec.certificate,
    })
}

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub omega: usize,
    /// (B o K o R)(omega), when defined.
    pub b_of_k: Option<f64>,
    pub k_of_r: f64,
    pub verdict: CheckVerdict,
}

#[derive(Debug, Serialize)]
pub struct CurveView {
    pub q: u64,
    pub t: usize,
    pub points: Vec<CurvePoint>,
    /// First sampled omega where delta is no longer positive; the curve
    /// stops there.
    pub delta_exhausted_at: Option<usize>,
}

/// The omega test with t sieved-out primes, sampled on [lo, hi].
pub fn omega_curve(q: u64, t: usize, lo: usize, hi: usize) -> Result<CurveView, String> {
    if lo > hi || hi > CURVE_OMEGA_MAX || lo <= t {
        return Err(format!("need t < lo <= hi <= {CURVE_OMEGA_MAX}"));
    }
    let profile = BoundProfile::for_q(q).map_err(|e| e.to_string())?;
    let table = PrimeTable::with_count(hi).map_err(|e| e.to_string())?;
    let step = (hi - lo).div_ceil(CURVE_POINTS_MAX).max(1);
    let mut omegas: Vec<usize> = (lo..=hi).step_by(step).collect();
    if omegas.last() != Some(&hi) {
        omegas.push(hi);
    }
    let mut view = CurveView {
        q,
        t,
        points: Vec::new(),
        delta_exhausted_at: None,
    };
    for omega in omegas {
        match check_omega_with(&profile, &table, omega, t) {
            Ok(c) => view.points.push(CurvePoint {
                omega,
                b_of_k: c.b_of_k,
                k_of_r: c.k_of_r,
                verdict: c.verdict,
            }),
            Err(OmegaError::DeltaNotPositive { .. }) => {
                view.delta_exhausted_at = Some(omega);
                break;
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(view)
}

#[derive(Debug, Serialize)]
pub struct ElementView {
    pub elem: String,
    pub dlog: Option<u32>,
    pub primitive: bool,
    /// 1-based hyperplane containing the element, if any.
    pub hyperplane: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct ExplorerView {
    pub q: u32,
    pub r: u32,
    pub modulus: Vec<u32>,
    pub generator: String,
    pub elements: Vec<ElementView>,
    pub g_a_size: usize,
    pub primitive_in_g_a: usize,
    /// max over nontrivial characters of |S(G_A, chi)|.
    pub true_k: f64,
    pub katz_bound: f64,
    pub even_bound: Option<f64>,
    pub certificate: Option<String>,
}

fn numbers(s: &str) -> Result<Vec<u32>, String> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("bad number {t:?}")))
        .collect()
}

/// The complement of r hyperplanes L_i(v) = b_i in F_{q^r}; `matrix` is
/// row-major over F_q, as in certificate lines.
pub fn explore(q: u32, r: u32, matrix: &str, offsets: &str) -> Result<ExplorerView, String> {
    if prime_power(q as u64).is_none() || r < 1 || (q as u64).pow(r) > SEARCH_CEILING as u64 {
        return Err(format!("need a prime power q with q^r <= {SEARCH_CEILING}"));
    }
    let ctx = canonical_field(q, r).map_err(|e| e.to_string())?;
    let entries = numbers(matrix)?;
    if entries.len() != (r * r) as usize {
        return Err(format!("matrix needs {} entries", r * r));
    }
    let rows = entries.chunks(r as usize).map(<[u32]>::to_vec).collect();
    let hset = HyperplaneSet::new(&ctx, rows, numbers(offsets)?).map_err(|e| e.to_string())?;
    let g_a = make_g_a(&ctx, &hset).map_err(|e| e.to_string())?;
    let elements = (0..ctx.order())
        .map(|a| ElementView {
            elem: ctx.format_elem(a),
            dlog: ctx.dlog(a).ok(),
            primitive: ctx.is_primitive(a),
            hyperplane: hset.first_cover(&ctx, a).map(|i| i + 1),
        })
        .collect();
    let (qf, rf) = (q as f64, r as f64);
    let katz_bound = (3.0 * (qf - 1.0).powf(rf) * qf.powf((3 * r).div_ceil(4) as f64)).sqrt();
    let even_bound = r
        .is_multiple_of(2)
        .then(|| 2.0 * (qf - 1.0).powf(0.75 * rf) * qf.powf(rf / 8.0));
    let certificate = ExceptionCertificate::from_hset(&ctx, hset)
        .map_err(|e| e.to_string())?
        .map(|c| c.to_line(&ctx));
    Ok(ExplorerView {
        q,
        r,
        modulus: ctx.ext_poly().to_vec(),
        generator: ctx.format_elem(ctx.generator()),
        primitive_in_g_a: g_a.iter().filter(|&&a| ctx.is_primitive(a)).count(),
        g_a_size: g_a.len(),
        true_k: ctx.true_k(&g_a),
        elements,
        katz_bound,
        even_bound,
        certificate,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = sieveMargins)]
pub fn sieve_margins_js(q: u32, r: u32) -> Result<String, JsValue> {
    to_js(margins(q as u64, r))
}

#[wasm_bindgen(js_name = omegaCurve)]
pub fn omega_curve_js(q: u32, t: u32, lo: u32, hi: u32) -> Result<String, JsValue> {
    to_js(omega_curve(q as u64, t as usize, lo as usize, hi as usize))
}

#[wasm_bindgen(js_name = exploreHyperplanes)]
pub fn explore_js(q: u32, r: u32, matrix: &str, offsets: &str) -> Result<String, JsValue> {
    to_js(explore(q, r, matrix, offsets))
}
