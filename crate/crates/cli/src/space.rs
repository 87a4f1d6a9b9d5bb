//! Space specifications on the command line.
//!
//! | syntax            | space                                     |
//! |-------------------|-------------------------------------------|
//! | `proj:m,n`        | `P^{m|n}`                                 |
//! | `grass:a,b,m,n`   | `G(a|b,m|n)`                              |
//! | `pi:m`            | `P^m_Π`, the quotient of `P^{m|m+1}`      |
//! | `cy:n[,λ]`        | the CY truncation model over `Pⁿ`         |
//! | `A*B`             | product of two specs                      |
//! | `@name`           | an atlas stored in the workspace          |
//! | `path.json`       | an atlas document on disk                 |

use superatlas::atlas::{
    build_cy_truncation, product, product_fields, quotient_atlas, Atlas, AtlasDoc, GlobalField,
};
use superatlas::criteria::SpaceSpec;
use superatlas::rational::from_text;

use crate::workspace::{read_file, Workspace};
use crate::CliError;

pub struct Space {
    pub atlas: Atlas,
    /// The standard Π-field (or the sum of the factor fields on a product),
    /// when the space has one.
    pub field: Option<GlobalField>,
}

impl Space {
    pub fn field(&self) -> Result<&GlobalField, CliError> {
        self.field
            .as_ref()
            .ok_or_else(|| CliError::Input(format!("{} carries no standard homological field", self.atlas.name)))
    }
}

fn numbers(body: &str, count: std::ops::RangeInclusive<usize>, what: &str) -> Result<Vec<usize>, CliError> {
    let v: Vec<usize> = body
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("{what}: expected comma-separated naturals, got {body:?}")))?;
    if !count.contains(&v.len()) {
        return Err(CliError::Input(format!("{what}: wrong number of parameters in {body:?}")));
    }
    Ok(v)
}

/// Parses `proj:` and `grass:` specs.
pub fn parse_spec(s: &str) -> Result<SpaceSpec, CliError> {
    if let Some(body) = s.strip_prefix("proj:") {
        let v = numbers(body, 2..=2, "proj")?;
        return Ok(SpaceSpec::Projective { m: v[0], n: v[1] });
    }
    if let Some(body) = s.strip_prefix("grass:") {
        let v = numbers(body, 4..=4, "grass")?;
        return Ok(SpaceSpec::Grassmannian { a: v[0], b: v[1], m: v[2], n: v[3] });
    }
    Err(CliError::Input(format!("expected proj:m,n or grass:a,b,m,n, got {s:?}")))
}

pub fn resolve(s: &str, ws: &Workspace, bound: usize) -> Result<Space, CliError> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('*') {
        let (x, y) = (resolve(a, ws, bound)?, resolve(b, ws, bound)?);
        let xy = product(&x.atlas, &y.atlas)?;
        let field = match (&x.field, &y.field) {
            (Some(vx), Some(vy)) => {
                let a = product_fields(&x.atlas, &y.atlas, &xy, Some(vx), None)?;
                let b = product_fields(&x.atlas, &y.atlas, &xy, None, Some(vy))?;
                Some(a.add(&b)?)
            }
            _ => None,
        };
        return Ok(Space { atlas: xy, field });
    }
    if let Some(name) = s.strip_prefix('@') {
        let doc: AtlasDoc = ws.load(name, "atlas")?;
        return Ok(Space { atlas: doc.to_atlas()?, field: None });
    }
    if s.ends_with(".json") {
        let doc: AtlasDoc = read_file(s)?;
        return Ok(Space { atlas: doc.to_atlas()?, field: None });
    }
    if let Some(body) = s.strip_prefix("pi:") {
        let m = numbers(body, 1..=1, "pi")?[0];
        let up = SpaceSpec::Projective { m, n: m + 1 };
        let x = up.build()?;
        let v = up.pi_field(&x)?;
        let q = quotient_atlas(&x, &v, bound)?;
        return Ok(Space { atlas: q.concrete()?.clone(), field: None });
    }
    if let Some(body) = s.strip_prefix("cy:") {
        let (n, lambda) = match body.split_once(',') {
            Some((n, l)) => (n, from_text(l)?),
            None => (body, superatlas::rational::q(1)),
        };
        let n = numbers(n, 1..=1, "cy")?[0];
        return Ok(Space { atlas: build_cy_truncation(n, &lambda)?, field: None });
    }
    let spec = parse_spec(s)?;
    let atlas = spec.build()?;
    let field = spec.pi_field(&atlas).ok();
    Ok(Space { atlas, field })
}
