//! `superatlas` command-line front end.
//!
//! Exit codes: 0 success or verdict derived, 1 property violated or negative
//! verdict, 2 undecided at the stated bound, 3 input error.

mod space;
mod workspace;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use superatlas::atlas::{global_freeness, iso_check, quotient_atlas, truncate_atlas, AtlasDoc, GlobalFreeness, IsoResult};
use superatlas::cohomology::{
    bott_table, cech_cohomology, gr_pieces, h1_vanishing_report, CechWindow, DimTable, SheafKind,
};
use superatlas::criteria::{
    builtin_rules, catalog_closure, run_catalog, verdict, Citation, Fact, FactDb, Outcome, Predicate, Provenance,
};
use superatlas::homological::{freeness, invariant_generators, FieldDoc, Freeness, HomologicalField, OddDerivation};
use superatlas::linebundle::{
    connection_solve, curvature, exterior_product, flat_descend, gq1_cocycle, gq1_mul, gq1_project, standard_cocycles,
    CocycleDoc, ConnectionResult, Descent, Gq1Element, LineCocycle,
};
use superatlas::oracle::{run_query, OracleQuery};
use superatlas::rational::to_text;
use superatlas::superalgebra::{PolyDoc, RingDoc};
use superatlas::{Error, RingDescriptor, SuperPoly};

use space::{parse_spec, resolve, Space};
use workspace::{canonical_json, read_file, Workspace};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 3,
            CliError::Core(e) => match e {
                Error::Undecided { .. } => 2,
                Error::Parse(_)
                | Error::InvalidRing(_)
                | Error::Dimension(_)
                | Error::RingMismatch(_)
                | Error::Parity(_)
                | Error::Unsupported(_) => 3,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(s) => format!("input error: {s}"),
            CliError::Core(e) => e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "superatlas", version, about = "Exact computations on superschemes glued from charts")]
struct Cli {
    /// Directory holding saved objects.
    #[arg(long, global = true, default_value = ".superatlas")]
    workspace: PathBuf,
    /// Print the structured document instead of the text report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

/// A homological field given inline, from a file, or from a space.
#[derive(Args, Clone)]
struct FieldSource {
    /// Use the standard field of a space (see `atlas` for the syntax).
    #[arg(long, conflicts_with_all = ["field", "even", "odd"])]
    space: Option<String>,
    /// A field document: `@name` in the workspace or a JSON path.
    #[arg(long, conflicts_with_all = ["even", "odd"])]
    field: Option<String>,
    #[arg(long, value_delimiter = ',')]
    even: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    odd: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    invertible: Vec<String>,
    /// `gen=expression`, repeatable; unlisted generators map to 0.
    #[arg(long = "image")]
    images: Vec<String>,
}

#[derive(Args, Clone)]
struct BundleArgs {
    #[arg(long)]
    space: String,
    /// Twist degree; two comma-separated degrees on a product.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    degree: Vec<i64>,
    #[arg(long, default_value_t = 3)]
    bound: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Describe a ring and optionally save it.
    Ring {
        #[arg(long, value_delimiter = ',')]
        even: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        odd: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        invertible: Vec<String>,
        #[arg(long)]
        save: Option<String>,
    },
    /// Check that an odd derivation squares to zero.
    FieldCheck {
        #[command(flatten)]
        src: FieldSource,
        #[arg(long)]
        save: Option<String>,
    },
    /// Search for a witness `v(θ) = 1` or a fixed-point certificate.
    Freeness {
        #[command(flatten)]
        src: FieldSource,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Invariant generators of a free action.
    Quotient {
        #[command(flatten)]
        src: FieldSource,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long)]
        save: Option<String>,
    },
    /// Build, quotient, truncate or compare atlases.
    Atlas {
        #[command(subcommand)]
        cmd: AtlasCmd,
    },
    /// The standard line cocycle `O(k)` or `Ber^k`.
    Bundle {
        #[command(flatten)]
        args: BundleArgs,
        #[arg(long)]
        save: Option<String>,
    },
    /// Solve for a v-connection on a line bundle.
    Connection {
        #[command(flatten)]
        args: BundleArgs,
    },
    /// Curvature of a v-connection.
    Curvature {
        #[command(flatten)]
        args: BundleArgs,
    },
    /// Descend a line bundle along the quotient by a flat connection.
    Descend {
        #[command(flatten)]
        args: BundleArgs,
    },
    /// Multiply two elements of `GQ(1)`, given as `a0;a1`.
    Gq1 {
        #[arg(long, value_delimiter = ',')]
        even: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        odd: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        invertible: Vec<String>,
        x: String,
        y: String,
    },
    /// `dim H^q(Pⁿ, Ω^j(m))` from the Bott formula.
    Bott {
        n: usize,
        j: usize,
        #[arg(allow_hyphen_values = true)]
        m: i64,
    },
    /// Associated-graded pieces of `G(1|1,n|n)` in filtration degree `k`.
    Grpieces { n: usize, k: usize },
    /// `H¹` vanishing report for `G(1|1,n|n)` through its associated graded.
    H1report {
        n: usize,
        /// Twist `a,b` by `O(a) ⊠ O(b)`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        twist: Vec<i64>,
    },
    /// Windowed Čech cohomology. Sheaves: `O`, `O(k)`, `inv`.
    Cech {
        atlas: String,
        #[arg(default_value = "O")]
        sheaf: String,
        #[arg(default_value_t = 6)]
        window: i64,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Edit or close a facts database.
    Facts {
        #[command(subcommand)]
        cmd: FactsCmd,
    },
    /// Derive a claim about a space from the facts database.
    Verdict {
        space: String,
        claim: String,
        #[arg(long, default_value = "facts")]
        db: String,
    },
    /// Run or load the built-in catalog.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Brute-force cross-checks.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
}

#[derive(Subcommand)]
enum AtlasCmd {
    /// Projective superspace `P^{m|n}`.
    Proj {
        m: usize,
        n: usize,
        #[arg(long)]
        save: Option<String>,
    },
    /// Supergrassmannian `G(a|b,m|n)`.
    Grass {
        a: usize,
        b: usize,
        m: usize,
        n: usize,
        #[arg(long)]
        save: Option<String>,
    },
    /// Quotient by the standard Π-action of a space.
    Quotient {
        space: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long)]
        save: Option<String>,
    },
    /// Reduce every structure ring modulo `N^k`.
    Truncate {
        space: String,
        k: usize,
        #[arg(long)]
        save: Option<String>,
    },
    /// Load any space spec and print or re-save it.
    Show {
        space: String,
        #[arg(long)]
        save: Option<String>,
    },
    /// Search for an isomorphism level by level up to a degree bound.
    Iso {
        first: String,
        second: String,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// The truncation `X(Pⁿ, λ·c₁(O(1)))` modulo `N³`.
    Cy {
        n: usize,
        #[arg(long, default_value = "1")]
        lambda: String,
        #[arg(long)]
        save: Option<String>,
    },
}

#[derive(Subcommand)]
enum FactsCmd {
    /// Assert a cited fact.
    Add {
        space: String,
        predicate: String,
        #[arg(long)]
        cite: String,
        #[arg(long, default_value = "facts")]
        db: String,
    },
    /// Apply the rules until nothing changes.
    Close {
        #[arg(long, default_value = "facts")]
        db: String,
    },
    /// Print every fact with its provenance.
    Show {
        #[arg(long, default_value = "facts")]
        db: String,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Re-derive every verdict and recompute every computed premise.
    Run {
        #[arg(long)]
        stretch: bool,
    },
    /// Store the closed catalog facts as a database.
    Load {
        #[arg(long, default_value = "facts")]
        db: String,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// `h⁰(Pⁿ, O(m))` by counting monomials.
    MonomialH0 {
        n: usize,
        #[arg(allow_hyphen_values = true)]
        m: i64,
    },
    /// `(h⁰, h¹)` of `O(m)` on `P¹` from the two-chart complex.
    CechP1 {
        #[arg(allow_hyphen_values = true)]
        m: i64,
    },
    /// `h^q(Pⁿ, O(d))` from the full Čech complex, `n ≤ 3`.
    CechPn {
        n: usize,
        #[arg(allow_hyphen_values = true)]
        d: i64,
    },
    /// `h^q(P², Ω^j(m))`.
    P2Forms {
        j: usize,
        #[arg(allow_hyphen_values = true)]
        m: i64,
    },
    /// Every odd `θ` with `v(θ) = 1` of degree at most the bound.
    Witness {
        space: String,
        #[arg(long, default_value_t = 0)]
        chart: usize,
        #[arg(long, default_value_t = 1)]
        bound: usize,
    },
}

/// What a command produced: exit code, text report and structured form.
struct Report {
    code: u8,
    text: String,
    doc: Value,
}

impl Report {
    fn ok(text: String, doc: Value) -> Self {
        Report { code: 0, text, doc }
    }
}

fn ring_from(even: &[String], odd: &[String], invertible: &[String]) -> CliResult<superatlas::Ring> {
    Ok(RingDescriptor::new(even, odd, invertible)?)
}

fn load_field(src: &FieldSource, ws: &Workspace) -> CliResult<HomologicalField> {
    if let Some(f) = &src.field {
        let doc: FieldDoc = match f.strip_prefix('@') {
            Some(name) => ws.load(name, "field")?,
            None => read_file(f)?,
        };
        return Ok(doc.to_field()?);
    }
    let ring = ring_from(&src.even, &src.odd, &src.invertible)?;
    let mut images = vec![SuperPoly::zero(&ring); ring.n_gens()];
    for spec in &src.images {
        let (name, expr) =
            spec.split_once('=').ok_or_else(|| CliError::Input(format!("--image expects gen=expression, got {spec:?}")))?;
        let g = ring.find(name.trim()).ok_or_else(|| CliError::Input(format!("unknown generator {name:?}")))?;
        let idx = ring.gens().position(|h| h == g).expect("generator of its own ring");
        images[idx] = SuperPoly::parse(&ring, expr)?;
    }
    Ok(HomologicalField::new(OddDerivation::new(&ring, images)?)?)
}

fn poly_doc(p: &SuperPoly) -> Value {
    serde_json::to_value(PolyDoc::from_poly(p)).expect("polynomial documents serialize")
}

fn save_atlas(ws: &Workspace, save: &Option<String>, x: &superatlas::atlas::Atlas, text: &mut String) -> CliResult<()> {
    if let Some(name) = save {
        let h = ws.save(name, "atlas", &AtlasDoc::from_atlas(x))?;
        writeln!(text, "saved atlas {name} = {h}").unwrap();
    }
    Ok(())
}

fn atlas_summary(x: &superatlas::atlas::Atlas) -> CliResult<String> {
    let report = x.verify()?;
    let (e, o) = x.dimension();
    let mut s = format!("{}: dimension {e}|{o}, {} charts, {} overlaps\n", x.name, x.n_charts(), x.overlaps().len());
    for c in x.charts() {
        writeln!(s, "  chart {}: {}", c.label, c.ring).unwrap();
    }
    writeln!(s, "gluing verified on {} pairs and {} triples", report.pairs, report.triples).unwrap();
    Ok(s)
}

fn atlas_report(x: &superatlas::atlas::Atlas, ws: &Workspace, save: &Option<String>) -> CliResult<Report> {
    let mut text = atlas_summary(x)?;
    save_atlas(ws, save, x, &mut text)?;
    Ok(Report::ok(text, serde_json::to_value(AtlasDoc::from_atlas(x)).expect("atlas documents serialize")))
}

fn table_doc(t: &DimTable) -> Value {
    serde_json::to_value(t).expect("tables serialize")
}

fn run_ring(even: &[String], odd: &[String], invertible: &[String], save: &Option<String>, ws: &Workspace) -> CliResult<Report> {
    let r = ring_from(even, odd, invertible)?;
    let doc = RingDoc::from_ring(&r);
    let mut text = format!("{r}\n");
    if let Some(name) = save {
        let h = ws.save(name, "ring", &doc)?;
        writeln!(text, "saved ring {name} = {h}").unwrap();
    }
    Ok(Report::ok(text, serde_json::to_value(doc).expect("ring documents serialize")))
}

fn run_field_check(src: &FieldSource, save: &Option<String>, ws: &Workspace) -> CliResult<Report> {
    if let Some(s) = &src.space {
        let sp = resolve(s, ws, 3)?;
        let v = sp.field()?;
        let text = format!("standard field on {} is homological on all {} charts\n", sp.atlas.name, v.fields.len());
        return Ok(Report::ok(text, json!({"charts": v.fields.len(), "homological": true})));
    }
    let ring = ring_from(&src.even, &src.odd, &src.invertible)?;
    let v = match load_field(src, ws) {
        Ok(v) => v,
        Err(CliError::Core(Error::NotHomological(msg))) => {
            return Ok(Report { code: 1, text: format!("not homological: {msg}\n"), doc: json!({"homological": false, "reason": msg}) })
        }
        Err(e) => return Err(e),
    };
    let _ = ring;
    let doc = FieldDoc::from_field(&v);
    let mut text = String::from("v² = 0 on every generator\n");
    for g in v.ring().gens() {
        writeln!(text, "  v({}) = {}", v.ring().gen_name(g), v.image(g)).unwrap();
    }
    if let Some(name) = save {
        let h = ws.save(name, "field", &doc)?;
        writeln!(text, "saved field {name} = {h}").unwrap();
    }
    Ok(Report::ok(text, json!({"field": doc, "homological": true})))
}

fn point_text(point: &[superatlas::Q]) -> String {
    point.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

fn run_freeness(src: &FieldSource, bound: usize, ws: &Workspace) -> CliResult<Report> {
    if let Some(s) = &src.space {
        let sp = resolve(s, ws, bound)?;
        let v = sp.field()?;
        return Ok(match global_freeness(&sp.atlas, v, bound)? {
            GlobalFreeness::Free { witnesses } => {
                let mut text = format!("{}: Free\n", sp.atlas.name);
                for (c, w) in sp.atlas.charts().iter().zip(&witnesses) {
                    writeln!(text, "  chart {}: θ = {w}   (v(θ) = 1 checked)", c.label).unwrap();
                }
                Report::ok(text, json!({"verdict": "free", "witnesses": witnesses.iter().map(poly_doc).collect::<Vec<_>>()}))
            }
            GlobalFreeness::NotFree { chart, point } => Report {
                code: 1,
                text: format!(
                    "{}: NotFree\n  chart {}: every reduced v(g) vanishes at ({})\n",
                    sp.atlas.name,
                    sp.atlas.chart(chart).label,
                    point_text(&point)
                ),
                doc: json!({"verdict": "not-free", "chart": chart, "point": point.iter().map(to_text).collect::<Vec<_>>()}),
            },
            GlobalFreeness::Undecided { chart, bound } => Report {
                code: 2,
                text: format!("{}: Undecided on chart {} at degree bound {bound}\n", sp.atlas.name, sp.atlas.chart(chart).label),
                doc: json!({"verdict": "undecided", "chart": chart, "bound": bound}),
            },
        });
    }
    let v = load_field(src, ws)?;
    Ok(match freeness(&v, bound)? {
        Freeness::Free { witness } => {
            Report::ok(format!("Free\n  θ = {witness}   (v(θ) = 1 checked)\n"), json!({"verdict": "free", "witness": poly_doc(&witness)}))
        }
        Freeness::NotFree { point } => Report {
            code: 1,
            text: format!("NotFree\n  every reduced v(g) vanishes at ({})\n", point_text(&point)),
            doc: json!({"verdict": "not-free", "point": point.iter().map(to_text).collect::<Vec<_>>()}),
        },
        Freeness::Undecided { bound } => Report {
            code: 2,
            text: format!("Undecided at degree bound {bound}\n"),
            doc: json!({"verdict": "undecided", "bound": bound}),
        },
    })
}

fn run_quotient(src: &FieldSource, bound: usize, save: &Option<String>, ws: &Workspace) -> CliResult<Report> {
    if let Some(s) = &src.space {
        let sp = resolve(s, ws, bound)?;
        let q = quotient_atlas(&sp.atlas, sp.field()?, bound)?;
        let mut text = String::new();
        let mut charts = Vec::new();
        for (c, qc) in sp.atlas.charts().iter().zip(&q.charts) {
            writeln!(text, "chart {}: θ = {}", c.label, qc.witness).unwrap();
            for g in &qc.generators {
                writeln!(text, "  {} = {}", g.name, g.element).unwrap();
            }
            charts.push(json!({
                "generators": qc.generators.iter().map(|g| json!({"element": poly_doc(&g.element), "name": g.name})).collect::<Vec<_>>(),
                "witness": poly_doc(&qc.witness),
            }));
        }
        if let Ok(x) = q.concrete() {
            text.push_str(&atlas_summary(x)?);
            save_atlas(ws, save, x, &mut text)?;
        }
        return Ok(Report::ok(text, json!({"charts": charts})));
    }
    let v = load_field(src, ws)?;
    let theta = match freeness(&v, bound)? {
        Freeness::Free { witness } => witness,
        Freeness::NotFree { point } => {
            return Ok(Report {
                code: 1,
                text: format!("action is not free: fixed point ({})\n", point_text(&point)),
                doc: json!({"verdict": "not-free"}),
            })
        }
        Freeness::Undecided { bound } => {
            return Ok(Report { code: 2, text: format!("no witness up to degree {bound}\n"), doc: json!({"verdict": "undecided", "bound": bound}) })
        }
    };
    let gens = invariant_generators(&v, &theta)?;
    let mut text = format!("θ = {theta}\n");
    for g in &gens {
        writeln!(text, "  {} = {}", g.name, g.element).unwrap();
    }
    let doc = json!({
        "generators": gens.iter().map(|g| json!({"element": poly_doc(&g.element), "name": g.name})).collect::<Vec<_>>(),
        "witness": poly_doc(&theta),
    });
    Ok(Report::ok(text, doc))
}

fn run_atlas(cmd: &AtlasCmd, ws: &Workspace) -> CliResult<Report> {
    match cmd {
        AtlasCmd::Proj { m, n, save } => atlas_report(&superatlas::atlas::build_projective_superspace(*m, *n)?, ws, save),
        AtlasCmd::Grass { a, b, m, n, save } => {
            atlas_report(&superatlas::atlas::build_supergrassmannian(*a, *b, *m, *n)?, ws, save)
        }
        AtlasCmd::Quotient { space, bound, save } => {
            let sp = resolve(space, ws, *bound)?;
            let q = quotient_atlas(&sp.atlas, sp.field()?, *bound)?;
            atlas_report(q.concrete()?, ws, save)
        }
        AtlasCmd::Show { space, save } => atlas_report(&resolve(space, ws, 3)?.atlas, ws, save),
        AtlasCmd::Truncate { space, k, save } => {
            let sp = resolve(space, ws, 3)?;
            atlas_report(&truncate_atlas(&sp.atlas, *k)?, ws, save)
        }
        AtlasCmd::Cy { n, lambda, save } => {
            let l = superatlas::rational::from_text(lambda)?;
            atlas_report(&superatlas::atlas::build_cy_truncation(*n, &l)?, ws, save)
        }
        AtlasCmd::Iso { first, second, bound } => {
            let x = resolve(first, ws, *bound)?.atlas;
            let y = resolve(second, ws, *bound)?.atlas;
            Ok(match iso_check(&x, &y, *bound)? {
                IsoResult::Iso { perm, maps } => {
                    let mut text = format!("Iso: {} ≅ {}\n", x.name, y.name);
                    for (c, (p, m)) in perm.iter().zip(&maps).enumerate() {
                        writeln!(text, "  chart {} → chart {}", y.chart(c).label, x.chart(*p).label).unwrap();
                        for g in m.source().gens() {
                            writeln!(text, "    {} ↦ {}", m.source().gen_name(g), m.image(g)).unwrap();
                        }
                    }
                    Report::ok(text, json!({"iso": true, "perm": perm}))
                }
                IsoResult::NoneUpTo { bound, reason } => Report {
                    code: 2,
                    text: format!("no isomorphism found up to degree {bound}: {reason}\n"),
                    doc: json!({"bound": bound, "iso": false, "reason": reason}),
                },
            })
        }
    }
}

fn bundle_of(args: &BundleArgs, ws: &Workspace) -> CliResult<(Space, LineCocycle)> {
    let sp = resolve(&args.space, ws, args.bound)?;
    let l = match args.degree.as_slice() {
        [k] => standard_cocycles(&sp.atlas, *k)?,
        [k1, k2] => {
            let (a, b) = args
                .space
                .split_once('*')
                .ok_or_else(|| CliError::Input("two degrees need a product space A*B".into()))?;
            let (x, y) = (resolve(a, ws, args.bound)?.atlas, resolve(b, ws, args.bound)?.atlas);
            exterior_product(&x, &y, &sp.atlas, &standard_cocycles(&x, *k1)?, &standard_cocycles(&y, *k2)?)?
        }
        _ => return Err(CliError::Input("--degree takes one value, or two on a product".into())),
    };
    Ok((sp, l))
}

fn run_bundle(args: &BundleArgs, save: &Option<String>, ws: &Workspace) -> CliResult<Report> {
    let (sp, l) = bundle_of(args, ws)?;
    let mut text = format!("line cocycle on {}\n", sp.atlas.name);
    for (&(i, j), g) in &l.transitions {
        writeln!(text, "  g[{},{}] = {g}", sp.atlas.chart(i).label, sp.atlas.chart(j).label).unwrap();
    }
    let doc = CocycleDoc::from_cocycle(&l);
    if let Some(name) = save {
        let h = ws.save(name, "cocycle", &doc)?;
        writeln!(text, "saved cocycle {name} = {h}").unwrap();
    }
    Ok(Report::ok(text, serde_json::to_value(doc).expect("cocycle documents serialize")))
}

fn run_connection(args: &BundleArgs, ws: &Workspace, with_curvature: bool) -> CliResult<Report> {
    let (sp, l) = bundle_of(args, ws)?;
    let v = sp.field()?;
    let (conn, global_odd) = match connection_solve(&sp.atlas, &l, v, args.bound)? {
        ConnectionResult::Found { connection, global_odd } => (connection, global_odd),
        ConnectionResult::NoneUpTo { bound } => {
            return Ok(Report {
                code: 2,
                text: format!("no v-connection up to degree {bound}\n"),
                doc: json!({"bound": bound, "found": false}),
            })
        }
    };
    let mut text = String::new();
    for (c, phi) in sp.atlas.charts().iter().zip(&conn.forms) {
        writeln!(text, "  φ[{}] = {phi}", c.label).unwrap();
    }
    writeln!(text, "global odd functions at this bound: {}", global_odd.len()).unwrap();
    let mut doc = json!({"forms": conn.forms.iter().map(poly_doc).collect::<Vec<_>>(), "found": true});
    if with_curvature {
        let c = curvature(&sp.atlas, v, &conn)?;
        match c.constant() {
            Some(k) => writeln!(text, "curvature = {k} (constant)").unwrap(),
            None => {
                for (ch, ci) in sp.atlas.charts().iter().zip(&c.local) {
                    writeln!(text, "  c[{}] = {ci}", ch.label).unwrap();
                }
            }
        }
        doc["curvature"] = json!({
            "constant": c.constant().as_ref().map(to_text),
            "local": c.local.iter().map(poly_doc).collect::<Vec<_>>(),
        });
    }
    Ok(Report::ok(text, doc))
}

fn run_descend(args: &BundleArgs, ws: &Workspace) -> CliResult<Report> {
    let (sp, l) = bundle_of(args, ws)?;
    let v = sp.field()?;
    let q = quotient_atlas(&sp.atlas, v, args.bound)?;
    Ok(match flat_descend(&sp.atlas, &l, v, &q, args.bound)? {
        Descent::Descended { connection, cocycle } => {
            let mut text = String::from("Descended: flat v-connection found\n");
            for (c, phi) in sp.atlas.charts().iter().zip(&connection.forms) {
                writeln!(text, "  φ[{}] = {phi}", c.label).unwrap();
            }
            for (&(i, j), g) in &cocycle.transitions {
                writeln!(text, "  h[{i},{j}] = {g}").unwrap();
            }
            Report::ok(text, json!({"cocycle": CocycleDoc::from_cocycle(&cocycle), "verdict": "descended"}))
        }
        Descent::Flat { connection } => {
            let mut text = String::from("Flat: the bundle descends (the quotient has no concrete atlas to print it in)\n");
            for (c, phi) in sp.atlas.charts().iter().zip(&connection.forms) {
                writeln!(text, "  φ[{}] = {phi}", c.label).unwrap();
            }
            Report::ok(text, json!({"forms": connection.forms.iter().map(poly_doc).collect::<Vec<_>>(), "verdict": "flat"}))
        }
        Descent::Obstructed { curvature } => Report {
            code: 1,
            text: format!(
                "Obstructed: curvature is the nonzero constant {curvature} and no global odd function can cancel it\n"
            ),
            doc: json!({"curvature": to_text(&curvature), "verdict": "obstructed"}),
        },
        Descent::NoneUpTo { bound } => Report {
            code: 2,
            text: format!("no flat v-connection up to degree {bound}\n"),
            doc: json!({"bound": bound, "verdict": "undecided"}),
        },
    })
}

fn run_gq1(even: &[String], odd: &[String], invertible: &[String], x: &str, y: &str) -> CliResult<Report> {
    let ring = ring_from(even, odd, invertible)?;
    let elem = |s: &str| -> CliResult<Gq1Element> {
        let (a0, a1) = s.split_once(';').ok_or_else(|| CliError::Input(format!("GQ(1) elements are written a0;a1, got {s:?}")))?;
        Ok(Gq1Element::new(SuperPoly::parse(&ring, a0)?, SuperPoly::parse(&ring, a1)?)?)
    };
    let (gx, gy) = (elem(x)?, elem(y)?);
    let prod = gq1_mul(&gx, &gy)?;
    let (px, py, pp) = (gq1_project(&gx)?, gq1_project(&gy)?, gq1_project(&prod)?);
    let c = gq1_cocycle(&px, &py)?;
    let text = format!(
        "x·y = ({}; {})\np(x) = {px}\np(y) = {py}\np(x·y) = {pp}\nc(p(x), p(y)) = {c}\n",
        prod.a0, prod.a1
    );
    let doc = json!({
        "cocycle": poly_doc(&c),
        "product": [poly_doc(&prod.a0), poly_doc(&prod.a1)],
        "projection": poly_doc(&pp),
    });
    Ok(Report::ok(text, doc))
}

fn run_cech(atlas: &str, sheaf: &str, window: i64, bound: usize, ws: &Workspace) -> CliResult<Report> {
    let sp = resolve(atlas, ws, bound)?;
    let cocycle;
    let kind = match sheaf {
        "O" => SheafKind::Structure,
        "inv" | "O^v" => SheafKind::Invariant(sp.field()?),
        s => {
            let k: i64 = s
                .strip_prefix("O(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|k| k.trim().parse().ok())
                .ok_or_else(|| CliError::Input(format!("sheaf must be O, O(k) or inv, got {s:?}")))?;
            cocycle = standard_cocycles(&sp.atlas, k)?;
            SheafKind::Twisted(&cocycle)
        }
    };
    let t = cech_cohomology(&sp.atlas, kind, CechWindow::radius(window))?;
    let stable = t.is_stable();
    let mut text = format!("H^q({}, {sheaf}), window radius {window}\n{t}", sp.atlas.name);
    if !stable {
        writeln!(text, "entries marked ? changed between radius {window} and {}", window + 1).unwrap();
    }
    Ok(Report { code: if stable { 0 } else { 2 }, text, doc: json!({"stable": stable, "table": table_doc(&t), "window": window}) })
}

fn load_db(ws: &Workspace, name: &str) -> CliResult<FactDb> {
    if ws.contains(name)? {
        ws.load(name, "facts")
    } else {
        Ok(FactDb::new())
    }
}

fn db_text(db: &FactDb) -> String {
    db.facts().map(|f| format!("{f}\n")).collect()
}

fn run_facts(cmd: &FactsCmd, ws: &Workspace) -> CliResult<Report> {
    match cmd {
        FactsCmd::Add { space, predicate, cite, db } => {
            let p: Predicate = predicate.parse()?;
            let mut facts = load_db(ws, db)?;
            let fact = Fact::new(space, p, Provenance::Asserted { citation: Citation::new(cite) });
            let added = facts.add_fact(fact.clone())?;
            let h = ws.save(db, "facts", &facts)?;
            let text = format!("{}{fact}\nsaved facts {db} = {h}\n", if added { "added " } else { "already present: " });
            Ok(Report::ok(text, json!({"added": added, "hash": h})))
        }
        FactsCmd::Close { db } => {
            let mut facts = load_db(ws, db)?;
            let before = facts.len();
            let passes = facts.apply_rules(&builtin_rules())?;
            let h = ws.save(db, "facts", &facts)?;
            let text = format!("closed in {passes} passes: {before} → {} facts\nsaved facts {db} = {h}\n", facts.len());
            Ok(Report::ok(text, json!({"facts": facts.len(), "hash": h, "passes": passes})))
        }
        FactsCmd::Show { db } => {
            let facts = load_db(ws, db)?;
            let doc = serde_json::to_value(&facts).expect("fact databases serialize");
            Ok(Report::ok(db_text(&facts), doc))
        }
    }
}

fn run_verdict(space: &str, claim: &str, db: &str, ws: &Workspace) -> CliResult<Report> {
    let claim: Predicate = claim.parse()?;
    let mut facts = load_db(ws, db)?;
    facts.apply_rules(&builtin_rules())?;
    if let Outcome::Proved(v) = verdict(&facts, space, &claim)? {
        let label = if v.asserted_only() { " (rests on asserted facts only)" } else { "" };
        let text = format!("PROVED {claim}({space}){label}\n{v}");
        return Ok(Report::ok(text, serde_json::to_value(&v).expect("verdicts serialize")));
    }
    if let Some(neg) = claim.negation() {
        if let Outcome::Proved(v) = verdict(&facts, space, &neg)? {
            let text = format!("REFUTED {claim}({space}): the database proves {neg}\n{v}");
            return Ok(Report { code: 1, text, doc: serde_json::to_value(&v).expect("verdicts serialize") });
        }
    }
    Ok(Report { code: 2, text: format!("UNDETERMINED {claim}({space})\n"), doc: json!({"claim": claim.to_string(), "space": space, "verdict": null}) })
}

fn run_catalog_cmd(cmd: &CatalogCmd, ws: &Workspace) -> CliResult<Report> {
    match cmd {
        CatalogCmd::Run { stretch } => {
            let outcomes = run_catalog(*stretch)?;
            let mut text = String::new();
            let mut all = true;
            for o in &outcomes {
                all &= o.passed();
                let status = if o.passed() { "PASS" } else { "FAIL" };
                let audit = if o.asserted_only { "  [asserted premises only]" } else { "" };
                writeln!(text, "{status} {}({}){audit}", o.claim, o.space).unwrap();
                if let Some(v) = &o.verdict {
                    for line in v.to_string().lines() {
                        writeln!(text, "    {line}").unwrap();
                    }
                }
                for (what, r) in &o.recomputed {
                    let r = match r {
                        Some(true) => "recomputed ok",
                        Some(false) => "recomputed FALSE",
                        None => "skipped (stretch)",
                    };
                    writeln!(text, "    {r}: {what}").unwrap();
                }
            }
            writeln!(text, "{} of {} entries pass", outcomes.iter().filter(|o| o.passed()).count(), outcomes.len()).unwrap();
            let doc = json!(outcomes
                .iter()
                .map(|o| json!({
                    "asserted_only": o.asserted_only,
                    "claim": o.claim.to_string(),
                    "passed": o.passed(),
                    "recomputed": o.recomputed,
                    "space": o.space,
                }))
                .collect::<Vec<_>>());
            Ok(Report { code: if all { 0 } else { 1 }, text, doc })
        }
        CatalogCmd::Load { db } => {
            let facts = catalog_closure()?;
            let h = ws.save(db, "facts", &facts)?;
            Ok(Report::ok(format!("loaded {} catalog facts into {db} = {h}\n", facts.len()), json!({"facts": facts.len(), "hash": h})))
        }
    }
}

fn run_oracle(cmd: &OracleCmd) -> CliResult<Report> {
    let q = match cmd {
        OracleCmd::MonomialH0 { n, m } => OracleQuery::MonomialH0 { n: *n, m: *m },
        OracleCmd::CechP1 { m } => OracleQuery::CechP1 { m: *m },
        OracleCmd::CechPn { n, d } => OracleQuery::CechPnLine { n: *n, d: *d },
        OracleCmd::P2Forms { j, m } => OracleQuery::CechP2Forms { j: *j, m: *m },
        OracleCmd::Witness { space, chart, bound } => {
            OracleQuery::Witness { space: parse_spec(space)?, chart: *chart, bound: *bound }
        }
    };
    let r = run_query(&q)?;
    let text = format!("{} [{:?}, seed {}]\n{}\n", r.query, r.method, r.seed, r.value);
    Ok(Report::ok(text, serde_json::to_value(&r).expect("oracle reports serialize")))
}

fn run(cli: &Cli) -> CliResult<Report> {
    let ws = Workspace::new(&cli.workspace);
    match &cli.cmd {
        Cmd::Ring { even, odd, invertible, save } => run_ring(even, odd, invertible, save, &ws),
        Cmd::FieldCheck { src, save } => run_field_check(src, save, &ws),
        Cmd::Freeness { src, bound } => run_freeness(src, *bound, &ws),
        Cmd::Quotient { src, bound, save } => run_quotient(src, *bound, save, &ws),
        Cmd::Atlas { cmd } => run_atlas(cmd, &ws),
        Cmd::Bundle { args, save } => run_bundle(args, save, &ws),
        Cmd::Connection { args } => run_connection(args, &ws, false),
        Cmd::Curvature { args } => run_connection(args, &ws, true),
        Cmd::Descend { args } => run_descend(args, &ws),
        Cmd::Gq1 { even, odd, invertible, x, y } => run_gq1(even, odd, invertible, x, y),
        Cmd::Bott { n, j, m } => {
            let t = bott_table(*n, *j, *m);
            Ok(Report::ok(format!("H^q(P^{n}, Ω^{j}({m}))\n{t}"), table_doc(&t)))
        }
        Cmd::Grpieces { n, k } => {
            let mut text = String::new();
            let mut rows = Vec::new();
            for piece in gr_pieces(*n, *k) {
                let t = piece.table()?;
                writeln!(text, "{piece}\n{t}").unwrap();
                rows.push(json!({"piece": piece.to_string(), "table": table_doc(&t)}));
            }
            Ok(Report::ok(text, json!(rows)))
        }
        Cmd::H1report { n, twist } => {
            let tw = match twist.as_slice() {
                [] => (0, 0),
                [a, b] => (*a, *b),
                _ => return Err(CliError::Input("--twist takes a,b".into())),
            };
            let r = h1_vanishing_report(*n, tw);
            let mut text = format!("G(1|1,{n}|{n}) twisted by O({})⊠O({})\n", tw.0, tw.1);
            for row in &r.rows {
                writeln!(text, "  k={} {:<5} {}: h¹ = {}", row.k, row.parity.to_string(), row.piece, row.table.total(1)).unwrap();
            }
            writeln!(text, "H¹(O) vanishes: {}\nH¹(N) vanishes: {}", r.h1_o_vanishes, r.h1_n_vanishes).unwrap();
            let code = if r.h1_o_vanishes { 0 } else { 2 };
            Ok(Report { code, text, doc: serde_json::to_value(&r).expect("reports serialize") })
        }
        Cmd::Cech { atlas, sheaf, window, bound } => run_cech(atlas, sheaf, *window, *bound, &ws),
        Cmd::Facts { cmd } => run_facts(cmd, &ws),
        Cmd::Verdict { space, claim, db } => run_verdict(space, claim, db, &ws),
        Cmd::Catalog { cmd } => run_catalog_cmd(cmd, &ws),
        Cmd::Oracle { cmd } => run_oracle(cmd),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                match canonical_json(&r.doc) {
                    Ok(s) => print!("{s}"),
                    Err(e) => {
                        eprintln!("{}", e.message());
                        return ExitCode::from(3);
                    }
                }
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.code())
        }
    }
}
