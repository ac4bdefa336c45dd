//! JSON forms of jets, implicit systems, solutions and chart labels.
//!
//! Rationals are written as `"p/q"` strings so that every value round-trips exactly.

use serde::{Deserialize, Serialize};

use crate::blowup::Chart;
use crate::error::ParseError;
use crate::gaussian::GaussianRational;
use crate::implicit::{ExpPolynomial, ImplicitSolution, ImplicitSystem};
use crate::jet::{Jet, Point};
use crate::multi_index::MultiIndex;
use crate::poly::Polynomial;

#[derive(Serialize, Deserialize)]
struct CoeffDoc {
    alpha: Vec<u32>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct JetDoc {
    dim: usize,
    order: usize,
    base: Vec<[String; 2]>,
    coeffs: Vec<CoeffDoc>,
}

#[derive(Serialize, Deserialize)]
struct ValueDoc {
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct MonomialDoc {
    xexp: Vec<u32>,
    yexp: Vec<u32>,
    coeff: ValueDoc,
}

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    size: usize,
    vars: usize,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    coords: usize,
    components: Vec<Vec<MonomialDoc>>,
}

fn one() -> usize {
    1
}

fn is_one(n: &usize) -> bool {
    *n == 1
}

#[derive(Serialize, Deserialize)]
struct SolutionDoc {
    unknowns: Vec<JetDoc>,
}

#[derive(Serialize, Deserialize)]
struct ChartDoc {
    lambda: String,
}

fn doc_err(e: impl std::fmt::Display) -> ParseError {
    ParseError::Document(e.to_string())
}

fn rat(r: &num_rational::BigRational) -> String {
    GaussianRational::rational_to_string(r)
}

fn value(re: &str, im: &str) -> Result<GaussianRational, ParseError> {
    Ok(GaussianRational::new(
        GaussianRational::parse_rational(re)?,
        GaussianRational::parse_rational(im)?,
    ))
}

fn jet_doc(jet: &Jet) -> JetDoc {
    JetDoc {
        dim: jet.dim(),
        order: jet.order(),
        base: jet
            .base()
            .coords()
            .iter()
            .map(|c| [rat(c.re()), rat(c.im())])
            .collect(),
        coeffs: jet
            .coeffs()
            .iter()
            .map(|(a, c)| CoeffDoc {
                alpha: a.entries().to_vec(),
                re: rat(c.re()),
                im: rat(c.im()),
            })
            .collect(),
    }
}

fn jet_from_doc(doc: JetDoc) -> Result<Jet, ParseError> {
    if doc.base.len() != doc.dim {
        return Err(doc_err(format!(
            "base has {} coordinates, dim is {}",
            doc.base.len(),
            doc.dim
        )));
    }
    let base = Point(
        doc.base
            .iter()
            .map(|[re, im]| value(re, im))
            .collect::<Result<_, _>>()?,
    );
    let mut coeffs = Vec::with_capacity(doc.coeffs.len());
    for c in doc.coeffs {
        if c.alpha.iter().map(|&e| e as usize).sum::<usize>() > doc.order {
            return Err(doc_err(format!(
                "coefficient {:?} exceeds order {}",
                c.alpha, doc.order
            )));
        }
        coeffs.push((MultiIndex::new(c.alpha), value(&c.re, &c.im)?));
    }
    Jet::new(doc.dim, doc.order, base, coeffs).map_err(doc_err)
}

pub fn jet_to_json(jet: &Jet) -> String {
    serde_json::to_string_pretty(&jet_doc(jet)).expect("serializable")
}

pub fn jet_from_json(text: &str) -> Result<Jet, ParseError> {
    jet_from_doc(serde_json::from_str(text).map_err(doc_err)?)
}

pub fn system_to_json(system: &ImplicitSystem) -> String {
    let vars = system.vars();
    let components = system
        .components()
        .iter()
        .map(|c| {
            c.poly()
                .terms()
                .map(|(a, v)| MonomialDoc {
                    xexp: a.entries()[..vars].to_vec(),
                    yexp: a.entries()[vars..].to_vec(),
                    coeff: ValueDoc {
                        re: rat(v.re()),
                        im: rat(v.im()),
                    },
                })
                .collect()
        })
        .collect();
    let doc = SystemDoc {
        size: system.size(),
        vars,
        coords: system.coords(),
        components,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn system_from_json(text: &str) -> Result<ImplicitSystem, ParseError> {
    let doc: SystemDoc = serde_json::from_str(text).map_err(doc_err)?;
    if doc.components.len() != doc.size {
        return Err(doc_err(format!(
            "{} components for size {}",
            doc.components.len(),
            doc.size
        )));
    }
    if doc.vars != doc.coords + doc.size {
        return Err(doc_err(format!(
            "vars must be coords + size = {}",
            doc.coords + doc.size
        )));
    }
    let mut components = Vec::with_capacity(doc.size);
    for monomials in doc.components {
        let mut terms = Vec::with_capacity(monomials.len());
        for m in monomials {
            if m.xexp.len() != doc.vars || m.yexp.len() != doc.vars {
                return Err(doc_err(format!(
                    "exponent vectors need {} entries",
                    doc.vars
                )));
            }
            let mut e = m.xexp;
            e.extend(m.yexp);
            terms.push((MultiIndex::new(e), value(&m.coeff.re, &m.coeff.im)?));
        }
        let poly = Polynomial::from_terms(2 * doc.vars, terms).map_err(doc_err)?;
        components.push(ExpPolynomial::new(doc.vars, poly).map_err(doc_err)?);
    }
    ImplicitSystem::new(doc.coords, components).map_err(doc_err)
}

pub fn solution_to_json(solution: &ImplicitSolution) -> String {
    let doc = SolutionDoc {
        unknowns: solution.unknowns().iter().map(jet_doc).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn solution_from_json(text: &str) -> Result<ImplicitSolution, ParseError> {
    let doc: SolutionDoc = serde_json::from_str(text).map_err(doc_err)?;
    let jets = doc
        .unknowns
        .into_iter()
        .map(jet_from_doc)
        .collect::<Result<Vec<_>, _>>()?;
    ImplicitSolution::new(jets).map_err(doc_err)
}

pub fn chart_to_json(chart: &Chart) -> String {
    serde_json::to_string(&ChartDoc {
        lambda: chart.to_string(),
    })
    .expect("serializable")
}

pub fn chart_from_json(text: &str) -> Result<Chart, ParseError> {
    let doc: ChartDoc = serde_json::from_str(text).map_err(doc_err)?;
    doc.lambda.parse()
}
