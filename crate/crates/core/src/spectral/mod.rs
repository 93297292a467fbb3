//! Fourier analysis on finite Abelian groups and on `Z^d`.
//!
//! On a finite group `f̂(y) = Σ_x f(x)·conj(χ_y(x))` with
//! `χ_y(x) = exp(2πi·⟨x, y⟩)`. In exact mode only the values `2cos(2πk/e)`
//! with `e ∈ {1,2,3,4,6}` are used, so transforms of even functions are exact
//! rationals. On `Z^d` the transform is the trigonometric polynomial with the
//! function values as coefficients; positivity is decided exactly for `d = 1`
//! (Sturm sequences in `t = cos θ`) and through certified grid bounds
//! otherwise.

pub mod poly;
pub mod torus;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::GroupFunction;
use crate::group::{Element, GroupSpec};
use crate::scalar::{Rational, Scalar, FLOAT_TOL};

pub use poly::Poly;
pub use torus::{TorusBound, TrigPolynomial};

/// Resolution used when a torus test is not given one explicitly.
pub const DEFAULT_RESOLUTION_1D: usize = 1 << 14;
pub const DEFAULT_RESOLUTION_2D: usize = 1 << 9;

/// Largest cosine degree decided through the exact polynomial route.
pub const EXACT_DEGREE_LIMIT: u64 = 96;

/// The transform of a function.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumFunction<S: Scalar> {
    /// Values on the dual group, indexed like the group elements. `im` is
    /// `None` when the function is even (so the spectrum is real).
    Finite {
        group: GroupSpec,
        re: Vec<S>,
        im: Option<Vec<S>>,
    },
    /// On `Z^d`: the coefficients of `θ ↦ Σ_x f(x) e^{-i x·θ}`.
    Torus { coefficients: GroupFunction<S> },
}

impl<S: Scalar> SpectrumFunction<S> {
    pub fn real_values(&self) -> Option<&[S]> {
        match self {
            SpectrumFunction::Finite { re, im: None, .. } => Some(re),
            _ => None,
        }
    }

    /// JSON-friendly export: for finite groups an array of values (pairs
    /// `[re, im]` when the spectrum is complex); for `Z^d` the coefficient
    /// atoms.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SpectrumFunction::Finite { re, im, .. } => match im {
                None => serde_json::Value::Array(
                    re.iter().map(|v| serde_json::Value::String(v.to_text())).collect(),
                ),
                Some(im) => serde_json::Value::Array(
                    re.iter()
                        .zip(im)
                        .map(|(a, b)| serde_json::json!([a.to_text(), b.to_text()]))
                        .collect(),
                ),
            },
            SpectrumFunction::Torus { coefficients } => serde_json::Value::Object(
                coefficients
                    .iter()
                    .map(|(x, v)| (x.to_string(), serde_json::Value::String(v.to_text())))
                    .collect(),
            ),
        }
    }
}

type PhaseTable = Arc<Vec<u32>>;

/// Character phases `⟨x, y⟩·e mod e` for all pairs, memoised per group.
fn phase_table(group: &GroupSpec) -> PhaseTable {
    static CACHE: OnceLock<RwLock<HashMap<Vec<u64>, PhaseTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = group.orders().expect("finite group").to_vec();
    if let Some(t) = cache.read().expect("phase cache").get(&key) {
        return t.clone();
    }
    let els = group.elements();
    let n = els.len();
    let mut table = vec![0u32; n * n];
    for (i, x) in els.iter().enumerate() {
        for (j, y) in els.iter().enumerate().skip(i) {
            let p = group.phase(x, y) as u32;
            table[i * n + j] = p;
            table[j * n + i] = p;
        }
    }
    let table = Arc::new(table);
    let mut w = cache.write().expect("phase cache");
    // bound memory: the cache only keeps small groups
    if n <= 1024 {
        w.insert(key, table.clone());
    }
    table
}

/// `[2cos(2πk/e)/2 for k in 0..e]`, i.e. the cosine table in mode `S`.
pub(crate) fn cos_table<S: Scalar>(e: u64) -> Result<Vec<S>> {
    let half = S::from_ratio(1, 2);
    (0..e)
        .map(|k| {
            S::two_cos(k, e)
                .map(|v| v * half.clone())
                .ok_or(Error::ExactUnavailable(e))
        })
        .collect()
}

fn sin_table<S: Scalar>(e: u64) -> Result<Vec<S>> {
    let half = S::from_ratio(1, 2);
    (0..e)
        .map(|k| {
            S::two_sin(k, e)
                .map(|v| v * half.clone())
                .ok_or(Error::ExactUnavailable(e))
        })
        .collect()
}

/// Real part of the character `χ_y(x)` in mode `S`.
pub(crate) struct CharacterTable<S: Scalar> {
    n: usize,
    phases: PhaseTable,
    cos: Vec<S>,
}

impl<S: Scalar> CharacterTable<S> {
    pub(crate) fn new(group: &GroupSpec) -> Result<Self> {
        let e = group.exponent().ok_or(Error::NeedFiniteGroup)?;
        Ok(CharacterTable {
            n: group.order().unwrap(),
            phases: phase_table(group),
            cos: cos_table(e)?,
        })
    }

    pub(crate) fn cos(&self, x: usize, y: usize) -> &S {
        &self.cos[self.phases[x * self.n + y] as usize]
    }
}

/// Fourier transform.
pub fn transform<S: Scalar>(f: &GroupFunction<S>) -> Result<SpectrumFunction<S>> {
    let group = f.group();
    if !group.is_finite() {
        return Ok(SpectrumFunction::Torus {
            coefficients: f.clone(),
        });
    }
    let n = group.order().unwrap();
    let e = group.exponent().unwrap();
    let phases = phase_table(group);
    let cos = cos_table::<S>(e)?;
    let support: Vec<(usize, S)> = f.iter().map(|(x, v)| (group.index_of(x), v.clone())).collect();
    let mut re = vec![S::zero(); n];
    for (y, out) in re.iter_mut().enumerate() {
        for (x, v) in &support {
            *out = out.clone() + v.clone() * cos[phases[x * n + y] as usize].clone();
        }
    }
    let even = S::MODE == crate::scalar::Mode::Exact && f.is_even();
    let im = if even {
        None
    } else {
        let sin = sin_table::<S>(e)?;
        let mut im = vec![S::zero(); n];
        for (y, out) in im.iter_mut().enumerate() {
            for (x, v) in &support {
                *out = out.clone() - v.clone() * sin[phases[x * n + y] as usize].clone();
            }
        }
        Some(im)
    };
    Ok(SpectrumFunction::Finite {
        group: group.clone(),
        re,
        im,
    })
}

/// Inverse transform; recovers `f` exactly in exact mode.
pub fn inverse_transform<S: Scalar>(spec: &SpectrumFunction<S>) -> Result<GroupFunction<S>> {
    match spec {
        SpectrumFunction::Torus { coefficients } => Ok(coefficients.clone()),
        SpectrumFunction::Finite { group, re, im } => {
            let n = group.order().unwrap();
            let e = group.exponent().unwrap();
            let phases = phase_table(group);
            let cos = cos_table::<S>(e)?;
            let sin = match im {
                Some(_) => Some(sin_table::<S>(e)?),
                None => None,
            };
            let scale = S::from_ratio(1, n as i64);
            let mut values = vec![S::zero(); n];
            for (x, out) in values.iter_mut().enumerate() {
                let mut acc = S::zero();
                for y in 0..n {
                    let p = phases[x * n + y] as usize;
                    acc = acc + re[y].clone() * cos[p].clone();
                    if let (Some(im), Some(sin)) = (im, &sin) {
                        acc = acc - im[y].clone() * sin[p].clone();
                    }
                }
                *out = acc * scale.clone();
            }
            GroupFunction::from_dense(group, &values)
        }
    }
}

/// Where positive definiteness fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `f(x) ≠ f(−x)`: a real positive definite function is even.
    NotEven { element: Element },
    /// A dual-group point with a negative (or non-real) transform value.
    DualPoint { point: Element, value: f64 },
    /// A point of the torus where the transform is (near-)minimal.
    TorusPoint { theta: Vec<f64>, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdVerdict<S: Scalar> {
    pub holds: bool,
    /// Decided in exact arithmetic.
    pub exact: bool,
    /// Minimum of the transform (finite groups) or a certified lower bound
    /// for it (torus, float route), as a float.
    pub margin: f64,
    /// Exact minimum of the transform, where available.
    pub min_value: Option<S>,
    pub witness: Option<Witness>,
    pub torus: Option<TorusBound>,
}

impl<S: Scalar> PdVerdict<S> {
    fn not_even(x: Element) -> Self {
        PdVerdict {
            holds: false,
            exact: S::MODE == crate::scalar::Mode::Exact,
            margin: f64::NEG_INFINITY,
            min_value: None,
            witness: Some(Witness::NotEven { element: x }),
            torus: None,
        }
    }
}

/// Minimum of a real spectrum with its location.
fn spectral_min<S: Scalar>(group: &GroupSpec, re: &[S]) -> (usize, S) {
    let mut best = 0;
    for (i, v) in re.iter().enumerate() {
        if *v < re[best] {
            best = i;
        }
    }
    let _ = group;
    (best, re[best].clone())
}

fn torus_verdict<S: Scalar>(f: &GroupFunction<S>, strict: bool, resolution: Option<usize>) -> Result<PdVerdict<S>> {
    let d = f.group().rank();
    if d > 2 {
        return Err(Error::UnsupportedRank(d));
    }
    let exact_route = S::MODE == crate::scalar::Mode::Exact && d == 1 && f.radius() <= EXACT_DEGREE_LIMIT;
    let trig = TrigPolynomial::from_function(f)?;
    if exact_route {
        let poly = cosine_poly(f);
        let holds = if strict {
            poly.positive_on_unit_interval()
        } else {
            poly.nonnegative_on_unit_interval()
        };
        let (grid_min, theta) = trig.grid_min(4096.max(8 * f.radius() as usize));
        return Ok(PdVerdict {
            holds,
            exact: true,
            margin: grid_min,
            min_value: None,
            witness: (!holds).then_some(Witness::TorusPoint {
                theta,
                value: grid_min,
            }),
            torus: None,
        });
    }
    let res = resolution.unwrap_or(if d == 1 {
        DEFAULT_RESOLUTION_1D
    } else {
        DEFAULT_RESOLUTION_2D
    });
    let b = trig.certified_min(res)?;
    let holds = if strict {
        b.bound > FLOAT_TOL
    } else {
        b.bound >= -FLOAT_TOL
    };
    Ok(PdVerdict {
        holds,
        exact: false,
        margin: b.bound,
        min_value: None,
        witness: (!holds).then(|| Witness::TorusPoint {
            theta: b.argmin.clone(),
            value: b.grid_min,
        }),
        torus: Some(b),
    })
}

/// Real part of the transform of a function on `Z` as a polynomial in
/// `t = cos θ`.
pub fn cosine_poly<S: Scalar>(f: &GroupFunction<S>) -> Poly {
    let mut by_degree: std::collections::BTreeMap<usize, Rational> = Default::default();
    for (x, v) in f.iter() {
        let k = x.coords()[0].unsigned_abs() as usize;
        *by_degree.entry(k).or_default() += v.to_rational();
    }
    let terms: Vec<(usize, Rational)> = by_degree.into_iter().collect();
    Poly::from_cosine_series(&terms)
}

fn pd_impl<S: Scalar>(f: &GroupFunction<S>, strict: bool, resolution: Option<usize>) -> Result<PdVerdict<S>> {
    // real positive definite functions are even
    if let Some(x) = f.evenness_defect() {
        return Ok(PdVerdict::not_even(x));
    }
    let group = f.group();
    if !group.is_finite() {
        return torus_verdict(f, strict, resolution);
    }
    let (even, _) = f.even_odd_split();
    let spec = transform(&even)?;
    let re = match &spec {
        SpectrumFunction::Finite { re, .. } => re,
        SpectrumFunction::Torus { .. } => unreachable!(),
    };
    let (at, min) = spectral_min(group, re);
    let holds = if strict {
        min.is_positive_tol()
    } else {
        !min.is_negative_tol()
    };
    Ok(PdVerdict {
        holds,
        exact: S::MODE == crate::scalar::Mode::Exact,
        margin: min.to_f64(),
        witness: (!holds).then(|| Witness::DualPoint {
            point: group.element_at(at),
            value: min.to_f64(),
        }),
        min_value: Some(min),
        torus: None,
    })
}

/// Positive definiteness: the transform is real and nonnegative. Float mode
/// accepts values down to `-1e-9`.
pub fn is_positive_definite<S: Scalar>(f: &GroupFunction<S>) -> Result<PdVerdict<S>> {
    pd_impl(f, false, None)
}

/// Same as [`is_positive_definite`] with an explicit torus resolution.
pub fn is_positive_definite_at<S: Scalar>(f: &GroupFunction<S>, resolution: usize) -> Result<PdVerdict<S>> {
    pd_impl(f, false, Some(resolution))
}

/// Wiener condition: the transform is strictly positive everywhere.
pub fn is_strictly_positive_definite<S: Scalar>(f: &GroupFunction<S>) -> Result<PdVerdict<S>> {
    pd_impl(f, true, None)
}

/// Positive definite in the real sense: `Σ c_j c_k f(x_j − x_k) ≥ 0` for real
/// coefficients, i.e. the even part is positive definite.
pub fn is_real_sense_pd<S: Scalar>(f: &GroupFunction<S>) -> Result<PdVerdict<S>> {
    let (even, _) = f.even_odd_split();
    is_positive_definite(&even)
}

pub fn even_odd_split<S: Scalar>(f: &GroupFunction<S>) -> (GroupFunction<S>, GroupFunction<S>) {
    f.even_odd_split()
}

/// Certified lower bound for the real part of the transform on the torus.
pub fn trig_poly_min_certified<S: Scalar>(f: &GroupFunction<S>, resolution: usize) -> Result<TorusBound> {
    if f.group().is_finite() {
        return Err(Error::NeedFreeGroup);
    }
    if f.group().rank() > 2 {
        return Err(Error::UnsupportedRank(f.group().rank()));
    }
    TrigPolynomial::from_function(f)?.certified_min(resolution)
}

/// `Σ_{j,k} c_j c_k f(x_j − x_k)`.
pub fn quadratic_form<S: Scalar>(f: &GroupFunction<S>, points: &[Element], coeffs: &[S]) -> S {
    let group = f.group();
    let mut acc = S::zero();
    for (xj, cj) in points.iter().zip(coeffs) {
        for (xk, ck) in points.iter().zip(coeffs) {
            acc = acc + cj.clone() * ck.clone() * f.get(&group.sub(xj, xk));
        }
    }
    acc
}
