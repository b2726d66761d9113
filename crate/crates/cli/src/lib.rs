//! `galrefl` command-line front end. Every verb prints one canonical JSON
//! document (sorted keys) on standard output.
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::One;
use serde_json::{json, Value};

use galrefl_core::automorphisms::{
    aut_group, central_factor, extend_assignment, from_words, inner_automorphisms, iota_verify, nbar_order,
    outer_classes, verify_structure, AutError, Automorphism, AUT_BOUND,
};
use galrefl_core::battery::{canonical_json, over_budget, run_battery, BatteryConfig};
use galrefl_core::characters::{
    character_table, galois_orbit, irr_table, natural_character, reflection_character_v, reflection_characters,
    CharError,
};
use galrefl_core::cyclotomic::{lcm, Cyclotomic};
use galrefl_core::data::{data_dir, load_named, DataError, ExplicitData, IotaEntry};
use galrefl_core::descent::{
    auto_tower, cocycle_from_model, descend_tower, fixed_field_basis, lift_assignment, nakayama_class, norm_search,
    subgroup_generated, verify_norm_witness, Acting, DescentError, Images, NormSearch, Step, DEFAULT_NORM_HEIGHT,
};
use galrefl_core::equivariant::{
    algorithm_l, build_by_level, eta_assignment, model_character, reflection_model, EquivariantError,
};
use galrefl_core::groups::{Group, GroupError, GroupSpec, TABLE_BOUND};
use galrefl_core::invariants::{
    discriminant_rational, galois_rationalize, reflection_degrees, reynolds_invariants, InvariantError,
};
use galrefl_core::tableau::{build_model, clifford_split, PartitionTuple, RepModel, TableauError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "galrefl", version, about = "Exact computations with complex reflection groups")]
pub struct Cli {
    /// Write the JSON document here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// G(M,E,R) where M = de is the order of the root-of-unity group.
    #[arg(long, num_args = 3, value_names = ["M", "E", "R"], conflicts_with = "group")]
    pub imprimitive: Option<Vec<u32>>,
    /// Explicit group: a JSON file, or a name such as G4 looked up in the data directory.
    #[arg(long)]
    pub group: Option<String>,
    /// Largest group order that will be enumerated.
    #[arg(long, default_value_t = TABLE_BOUND as u64)]
    pub bound: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Group structure.
    Group {
        #[command(subcommand)]
        what: GroupCmd,
    },
    /// Character table.
    Chartable(GroupArgs),
    /// Representation models.
    Rep {
        #[command(subcommand)]
        what: RepCmd,
    },
    /// Galois action on characters.
    Galois {
        #[command(subcommand)]
        what: GaloisCmd,
    },
    /// Automorphism groups.
    Aut {
        #[command(subcommand)]
        what: AutCmd,
    },
    /// Galois-to-automorphism assignments.
    Iota {
        #[command(subcommand)]
        what: IotaCmd,
    },
    /// Galois descent of models.
    Descent {
        #[command(subcommand)]
        what: DescentCmd,
    },
    /// Equivariant model bundles.
    Equivariant {
        #[command(subcommand)]
        what: EquivariantCmd,
    },
    /// Polynomial invariants.
    Invariants {
        #[command(subcommand)]
        what: InvariantsCmd,
    },
    /// Runs the acceptance battery.
    VerifyAll {
        #[arg(long, default_value_t = galrefl_core::groups::DEFAULT_ENUMERATION_BOUND)]
        enumeration_bound: u64,
        /// Leave out the S6 exception.
        #[arg(long)]
        no_s6: bool,
        /// Also fail when a criterion exceeds its time budget.
        #[arg(long)]
        budgets: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum GroupCmd {
    Info(GroupArgs),
    Elements(GroupArgs),
    Reflections(GroupArgs),
    Center(GroupArgs),
}

#[derive(Subcommand, Debug)]
pub enum RepCmd {
    /// Tableau model of a de-tuple of partitions, given as JSON, e.g. [[2],[1],[]].
    Model {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long)]
        tuple: String,
        /// Restrict to the θ^i-eigenspace of S (groups with e > 1).
        #[arg(long)]
        omega: Option<u32>,
    },
    /// Reflection characters against the Galois orbit of χ_V.
    ReflectionOrbit(GroupArgs),
}

#[derive(Subcommand, Debug)]
pub enum GaloisCmd {
    Orbit {
        #[command(flatten)]
        g: GroupArgs,
        /// Row of the character table.
        #[arg(long)]
        char: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum AutCmd {
    Search {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = AUT_BOUND)]
        aut_bound: usize,
    },
    VerifyStructure {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value_t = AUT_BOUND)]
        aut_bound: usize,
    },
    Nbar(GroupArgs),
    CentralFactor(GroupArgs),
}

#[derive(Subcommand, Debug)]
pub enum IotaCmd {
    Verify {
        #[command(flatten)]
        g: GroupArgs,
        /// JSON list of {"conductor", "exponent", "images": {generator: word}}.
        #[arg(long)]
        assignment: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum DescentCmd {
    /// The projective cocycle γ ↦ A_γ of the group's model.
    Cocycle(GroupArgs),
    /// Nakayama class of one cyclic step and a norm witness for it.
    Obstruction {
        #[command(flatten)]
        g: GroupArgs,
        /// Generator of the cyclic step; defaults to the first step of the automatic tower.
        #[arg(long)]
        step: Option<u32>,
        /// Exponents already acting equivariantly.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        lower: Vec<u32>,
        /// JSON file {"witness": Cyclotomic} used instead of searching.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NORM_HEIGHT)]
        height: i64,
    },
    /// Descends the model along a tower: "auto" or steps like "17;23,5".
    Solve {
        #[command(flatten)]
        g: GroupArgs,
        #[arg(long, default_value = "auto")]
        tower: String,
        #[arg(long, default_value_t = DEFAULT_NORM_HEIGHT)]
        height: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum EquivariantCmd {
    Build(GroupArgs),
    AlgorithmL {
        #[command(flatten)]
        g: GroupArgs,
        /// Rows of the character table left out of L.
        #[arg(long, value_delimiter = ',')]
        exceptional: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum InvariantsCmd {
    Compute {
        #[command(flatten)]
        g: GroupArgs,
        /// Defaults to the reflection degrees.
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<u32>,
    },
    Discriminant(GroupArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Resource(String),
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Failed(_) => EXIT_VERIFY,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Resource(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::TooLarge { .. } => CliError::Resource(e.to_string()),
            GroupError::BadSpec(_)
            | GroupError::MissingGenerator(_)
            | GroupError::UnknownGenerator(_)
            | GroupError::BadWord(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<AutError> for CliError {
    fn from(e: AutError) -> Self {
        match e {
            AutError::TooLarge { .. } => CliError::Resource(e.to_string()),
            AutError::Group(g) => g.into(),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<DescentError> for CliError {
    fn from(e: DescentError) -> Self {
        match e {
            DescentError::SweepExhausted(_) | DescentError::Obstruction { .. } => CliError::Resource(e.to_string()),
            DescentError::Group(g) => g.into(),
            DescentError::Aut(a) => a.into(),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<EquivariantError> for CliError {
    fn from(e: EquivariantError) -> Self {
        match e {
            EquivariantError::Descent(d) => d.into(),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::TooLarge(_) | InvariantError::SweepExhausted(_) => CliError::Resource(e.to_string()),
            InvariantError::Invalid(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<CharError> for CliError {
    fn from(e: CharError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<TableauError> for CliError {
    fn from(e: TableauError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// A JSON document and whether the checks it reports hold.
pub struct Output {
    pub value: Value,
    pub holds: bool,
}

impl Output {
    fn ok(value: Value) -> Self {
        Output { value, holds: true }
    }

    fn check(value: Value, holds: bool) -> Self {
        Output { value, holds }
    }
}

type Res = Result<Output, CliError>;

enum Selected {
    Imprimitive(GroupSpec),
    Explicit(Box<ExplicitData>),
}

struct Loaded {
    sel: Selected,
    group: Group,
}

impl Loaded {
    fn descriptor(&self) -> Value {
        match &self.sel {
            Selected::Imprimitive(s) => json!({ "kind": "imprimitive", "d": s.d, "e": s.e, "r": s.r }),
            Selected::Explicit(d) => json!({
                "kind": "explicit",
                "label": d.label,
                "generators": d.generator_list().into_iter().map(|(_, m)| m).collect::<Vec<_>>(),
            }),
        }
    }

    fn spec(&self) -> Result<GroupSpec, CliError> {
        match &self.sel {
            Selected::Imprimitive(s) => Ok(*s),
            Selected::Explicit(d) => Err(CliError::Usage(format!("{} is not an imprimitive group", d.label))),
        }
    }

    fn degrees(&self) -> Vec<u32> {
        match &self.sel {
            Selected::Imprimitive(s) => reflection_degrees(s),
            Selected::Explicit(d) => d.degrees.clone(),
        }
    }

    /// The model descent works on, its ι̃ and the conductor of its entries.
    fn model(&self) -> Result<(Images, BTreeMap<u32, Automorphism>, u32), CliError> {
        match &self.sel {
            Selected::Imprimitive(_) => {
                let rho = reflection_model(&self.group)?;
                let (n, iota) = eta_assignment(&self.group)?;
                let conductor = rho.values().fold(n, |a, m| lcm(a, m.conductor()));
                let iota = lift_assignment(&iota, n, conductor)?;
                Ok((rho, iota, conductor))
            }
            Selected::Explicit(d) => {
                let images: Images = d.generator_list().into_iter().collect();
                let conductor = images.values().fold(d.field_conductor.max(1), |a, m| lcm(a, m.conductor()));
                let iota = assignment_from_entries(&self.group, &d.iota, conductor)?;
                Ok((images, iota, conductor))
            }
        }
    }
}

fn assignment_from_entries(
    group: &Group,
    entries: &[IotaEntry],
    conductor: u32,
) -> Result<BTreeMap<u32, Automorphism>, CliError> {
    let Some(first) = entries.first() else {
        return Err(CliError::Usage("the group file has no ι̃ assignment".into()));
    };
    let n = first.conductor;
    if entries.iter().any(|e| e.conductor != n) {
        return Err(CliError::Usage("assignment entries have different conductors".into()));
    }
    let gens: Vec<(u32, Automorphism)> =
        entries.iter().map(|e| Ok((e.exponent, from_words(group, &e.images)?))).collect::<Result<_, AutError>>()?;
    let assign = extend_assignment(n, &gens, group.order())
        .map_err(|k| CliError::Failed(format!("assignment is not a homomorphism at σ_{k}")))?;
    Ok(lift_assignment(&assign, n, lcm(n, conductor))?)
}

fn load_group(a: &GroupArgs) -> Result<Loaded, CliError> {
    match (&a.imprimitive, &a.group) {
        (Some(v), None) => {
            let spec = GroupSpec::imprimitive(v[0], v[1], v[2])?;
            if spec.order() > a.bound {
                return Err(CliError::Resource(format!("{spec} has {} elements, above --bound {}", spec.order(), a.bound)));
            }
            let group = Group::imprimitive(spec)?;
            Ok(Loaded { sel: Selected::Imprimitive(spec), group })
        }
        (None, Some(name)) => {
            let path = Path::new(name);
            let data = if path.is_file() { ExplicitData::load(path)? } else { load_named(&data_dir(), name)? };
            if data.order as u64 > a.bound {
                return Err(CliError::Resource(format!("{} has {} elements, above --bound {}", data.label, data.order, a.bound)));
            }
            let group = data.group()?;
            Ok(Loaded { sel: Selected::Explicit(Box::new(data)), group })
        }
        _ => Err(CliError::Usage("select a group with --imprimitive M E R or --group NAME|FILE".into())),
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn group_info(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    Ok(Output::ok(json!({
        "group": l.descriptor(),
        "label": g.label,
        "dim": g.dim(),
        "order": g.order(),
        "center": g.center().len(),
        "reflections": g.reflections().len(),
        "classes": g.classes().len(),
        "conductor": g.conductor(),
        "degrees": l.degrees(),
    })))
}

fn element_json(g: &Group, x: u32) -> Value {
    json!({ "index": x, "word": g.word_string(x), "order": g.elt_order(x), "matrix": g.matrix(x) })
}

fn group_elements(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    let elements: Vec<Value> = (0..g.order() as u32).map(|x| element_json(g, x)).collect();
    Ok(Output::ok(json!({ "label": g.label, "order": g.order(), "elements": elements })))
}

fn group_reflections(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    let refl: Vec<Value> = g.reflections().into_iter().map(|x| element_json(g, x)).collect();
    Ok(Output::ok(json!({ "label": g.label, "count": refl.len(), "reflections": refl })))
}

fn group_center(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    let center: Vec<Value> = g
        .center()
        .into_iter()
        .map(|x| json!({ "word": g.word_string(x), "order": g.elt_order(x), "scalar": g.scalar(x) }))
        .collect();
    let mut value = json!({ "label": g.label, "order": center.len(), "elements": center });
    let mut holds = true;
    if let Selected::Imprimitive(s) = &l.sel {
        if s.center_formula_applies() {
            holds = s.center_order() == center.len() as u64;
            value["formula"] = json!(s.center_order());
        }
    }
    Ok(Output::check(value, holds))
}

fn chartable(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    Ok(Output::ok(to_value(&character_table(&l.group)?)))
}

fn parse_tuple(s: &str) -> Result<PartitionTuple, CliError> {
    let parts: Vec<Vec<u32>> =
        serde_json::from_str(s).map_err(|e| CliError::Usage(format!("--tuple expects JSON like [[2],[1],[]]: {e}")))?;
    for p in &parts {
        if p.windows(2).any(|w| w[0] < w[1]) || p.contains(&0) {
            return Err(CliError::Usage(format!("{p:?} is not a partition")));
        }
    }
    Ok(PartitionTuple::new(parts))
}

fn rep_model(a: &GroupArgs, tuple: &str, omega: Option<u32>) -> Res {
    let l = load_group(a)?;
    let spec = l.spec()?;
    let t = parse_tuple(tuple)?;
    if t.slots() != spec.de() as usize || t.size() != spec.r {
        return Err(CliError::Usage(format!("{spec} needs {} partitions of total size {}", spec.de(), spec.r)));
    }
    let model: RepModel = match (spec.e, omega) {
        (1, None) | (1, Some(0)) => build_model(&t),
        (1, Some(_)) => return Err(CliError::Usage("--omega needs e > 1".into())),
        (_, i) => clifford_split(&t, &spec)?.restricted_model(i.unwrap_or(0))?,
    };
    let character = model.character_values(&l.group)?;
    let chi = galrefl_core::characters::ClassFunction::new("model", character.clone());
    let irreducible = galrefl_core::characters::norm(&l.group, &chi)?.is_one();
    Ok(Output::check(
        json!({
            "group": l.descriptor(),
            "label": model.label,
            "basis": model.basis,
            "images": model.images,
            "character": character,
            "irreducible": irreducible,
        }),
        irreducible,
    ))
}

fn rep_reflection_orbit(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    let irr = irr_table(g)?;
    let refl = reflection_characters(g, &irr);
    let orbit = galois_orbit(&reflection_character_v(g), g.conductor());
    let index = |c: &galrefl_core::characters::ClassFunction| irr.iter().position(|x| x.same_values(c));
    let mut refl_idx: Vec<Option<usize>> = refl.iter().map(index).collect();
    let mut orbit_idx: Vec<Option<usize>> = orbit.iter().map(index).collect();
    refl_idx.sort();
    orbit_idx.sort();
    let equal = refl_idx == orbit_idx;
    Ok(Output::check(
        json!({ "label": g.label, "reflection_characters": refl_idx, "galois_orbit_of_v": orbit_idx, "equal": equal }),
        equal,
    ))
}

fn galois_orbit_cmd(a: &GroupArgs, row: usize) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    let irr = irr_table(g)?;
    let chi = irr.get(row).ok_or_else(|| CliError::Usage(format!("--char must be below {}", irr.len())))?;
    let orbit = galois_orbit(chi, g.conductor().max(chi.conductor()));
    let mut rows: Vec<Option<usize>> = orbit.iter().map(|c| irr.iter().position(|x| x.same_values(c))).collect();
    rows.sort();
    let closed = rows.iter().all(|r| r.is_some());
    Ok(Output::check(json!({ "label": g.label, "char": row, "orbit": rows, "values": orbit }), closed))
}

fn aut_search(a: &GroupArgs, bound: usize) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    let auts = aut_group(g, bound)?;
    let irr = irr_table(g)?;
    let classes = outer_classes(g, &auts, &irr);
    let outer: Vec<Value> = classes
        .iter()
        .map(|c| json!({ "size": c.size, "representative": c.representative.describe(g), "irr_permutation": c.signature }))
        .collect();
    Ok(Output::ok(json!({
        "label": g.label,
        "order": auts.len(),
        "inner": inner_automorphisms(g).len(),
        "outer_order": classes.len(),
        "outer_classes": outer,
    })))
}

fn aut_verify_structure(a: &GroupArgs, bound: usize) -> Res {
    let l = load_group(a)?;
    let rep = verify_structure(&l.group, bound)?;
    let holds = rep.holds;
    Ok(Output::check(to_value(&rep), holds))
}

fn aut_nbar(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    Ok(Output::ok(json!({ "order": nbar_order(&l.spec()?)? })))
}

fn aut_central_factor(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    let rep = central_factor(&l.spec()?)?;
    let holds = rep.direct_product && rep.max_kernel == rep.expected_kernel;
    Ok(Output::check(to_value(&rep), holds))
}

fn iota_verify_cmd(a: &GroupArgs, path: &Path) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    let entries: Vec<IotaEntry> = serde_json::from_value(read_json(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let Some(first) = entries.first() else {
        return Err(CliError::Usage("empty assignment".into()));
    };
    let conductor = first.conductor;
    let assignment: Vec<(u32, Automorphism)> = entries
        .iter()
        .map(|e| Ok((e.exponent, from_words(g, &e.images)?)))
        .collect::<Result<_, AutError>>()?;
    let mats: Vec<_> = (0..g.order() as u32).map(|x| g.matrix(x)).collect();
    let rep = iota_verify(g, conductor, &assignment, &[natural_character(g)], Some(&mats));
    let holds = rep.holds();
    Ok(Output::check(to_value(&rep), holds))
}

fn descent_cocycle(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    let (images, iota, conductor) = l.model()?;
    let acting = Acting::full(conductor);
    let c = cocycle_from_model(&l.group, &images, &iota, &acting)?;
    let verified = c.verify();
    Ok(Output::check(
        json!({ "label": l.group.label, "conductor": conductor, "cocycle": c, "projective": verified, "exact": c.is_exact() }),
        verified,
    ))
}

fn descent_obstruction(a: &GroupArgs, step: Option<u32>, lower: &[u32], witness: Option<&Path>, height: i64) -> Res {
    let l = load_group(a)?;
    let (images, iota, conductor) = l.model()?;
    let lower: Vec<u32> = subgroup_generated(conductor, lower);
    let gamma = match step {
        Some(k) => k % conductor,
        None => auto_tower(conductor)
            .first()
            .and_then(|s| s.generators.first().copied())
            .ok_or_else(|| CliError::Usage(format!("ℚ(ζ_{conductor}) has no nontrivial automorphisms")))?,
    };
    let mut gens = lower.clone();
    gens.push(gamma);
    let upper = subgroup_generated(conductor, &gens);
    let acting = Acting::new(conductor, &upper, &lower);
    let gamma = acting.reduce(gamma);
    let order = acting.order_of(gamma);
    let cocycle = cocycle_from_model(&l.group, &images, &iota, &acting)?;
    let class = nakayama_class(&cocycle, gamma, order)?;
    let target = class.scalar.inv().map_err(|e| CliError::Failed(e.to_string()))?;
    let mut value = json!({ "label": l.group.label, "obstruction": class, "norm_target": target });
    match witness {
        Some(p) => {
            let doc = read_json(p)?;
            let w: Cyclotomic = serde_json::from_value(doc["witness"].clone())
                .map_err(|e| CliError::Usage(format!("{}: field \"witness\": {e}", p.display())))?;
            let ok = verify_norm_witness(&target, &w, gamma, order);
            value["witness"] = json!(w);
            value["witness_verified"] = json!(ok);
            Ok(Output::check(value, ok))
        }
        None => {
            let field = fixed_field_basis(conductor, &lower);
            match norm_search(&target, gamma, order, height, &field) {
                NormSearch::Witness(w) => {
                    value["witness"] = json!(w);
                    value["witness_verified"] = json!(verify_norm_witness(&target, &w, gamma, order));
                    Ok(Output::ok(value))
                }
                NormSearch::Exhausted { candidates } => Err(CliError::Resource(format!(
                    "no norm witness for {} among {candidates} candidates up to height {height}",
                    class.scalar
                ))),
            }
        }
    }
}

fn parse_tower(s: &str, conductor: u32) -> Result<Vec<Step>, CliError> {
    if s == "auto" {
        return Ok(auto_tower(conductor));
    }
    s.split(';')
        .map(|step| {
            let generators = step
                .split(',')
                .map(|k| k.trim().parse::<u32>().map_err(|e| CliError::Usage(format!("--tower: {k:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Step { generators })
        })
        .collect()
}

fn descent_solve(a: &GroupArgs, tower: &str, height: i64) -> Res {
    let l = load_group(a)?;
    let (images, iota, conductor) = l.model()?;
    let steps = parse_tower(tower, conductor)?;
    let (model, report) = descend_tower(&l.group, &images, &iota, conductor, &steps, height)?;
    let character_matches = model_character(&l.group, &model)? == model_character(&l.group, &images)?;
    let holds = report.equivariant && character_matches;
    Ok(Output::check(
        json!({ "label": l.group.label, "model": model, "report": report, "character_matches": character_matches }),
        holds,
    ))
}

fn equivariant_build(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    let rho0 = reflection_model(g)?;
    let (n, iota) = eta_assignment(g)?;
    let bundle = build_by_level(g, &rho0, &iota, n)?;
    let holds = bundle.complete() && bundle.entries.iter().all(|e| e.equivariant && e.character_matches);
    Ok(Output::check(to_value(&bundle), holds))
}

fn equivariant_algorithm_l(a: &GroupArgs, exceptional: &[usize]) -> Res {
    let l = load_group(a)?;
    let res = algorithm_l(&l.group, exceptional)?;
    let mut v = to_value(&res);
    v["complete"] = json!(res.complete());
    Ok(Output::ok(v))
}

fn invariants_compute(a: &GroupArgs, degrees: &[u32]) -> Res {
    let l = load_group(a)?;
    let g = &l.group;
    let degrees = if degrees.is_empty() { l.degrees() } else { degrees.to_vec() };
    let rep = reynolds_invariants(g, &degrees)?;
    let rat = galois_rationalize(g, &rep.selected, g.conductor())?;
    Ok(Output::ok(json!({
        "label": g.label,
        "degrees": degrees,
        "bases": rep.bases,
        "selected": rep.selected,
        "reducible": rep.reducible,
        "rational": rat.polys,
        "lambda": rat.lambda,
        "lambda_candidates_tried": rat.tried,
        "jacobian": rat.jacobian,
    })))
}

fn invariants_discriminant(a: &GroupArgs) -> Res {
    let l = load_group(a)?;
    let rep = discriminant_rational(&l.group)?;
    let holds = rep.rational.is_rational();
    Ok(Output::check(to_value(&rep), holds))
}

fn verify_all(enumeration_bound: u64, no_s6: bool, budgets: bool) -> Res {
    let cfg = BatteryConfig { data_dir: data_dir(), enumeration_bound, include_s6: !no_s6 };
    let (report, timings) = run_battery(&cfg);
    let slow = over_budget(&timings);
    let mut holds = report.passed();
    if budgets && !slow.is_empty() {
        holds = false;
    }
    let mut v = to_value(&report);
    v["passed"] = json!(report.passed());
    v["summary"] = report.criteria.iter().map(|c| (c.id.to_string(), json!(c.status))).collect::<serde_json::Map<_, _>>().into();
    Ok(Output::check(v, holds))
}

pub fn dispatch(cmd: &Command) -> Res {
    match cmd {
        Command::Group { what } => match what {
            GroupCmd::Info(a) => group_info(a),
            GroupCmd::Elements(a) => group_elements(a),
            GroupCmd::Reflections(a) => group_reflections(a),
            GroupCmd::Center(a) => group_center(a),
        },
        Command::Chartable(a) => chartable(a),
        Command::Rep { what } => match what {
            RepCmd::Model { g, tuple, omega } => rep_model(g, tuple, *omega),
            RepCmd::ReflectionOrbit(a) => rep_reflection_orbit(a),
        },
        Command::Galois { what: GaloisCmd::Orbit { g, char } } => galois_orbit_cmd(g, *char),
        Command::Aut { what } => match what {
            AutCmd::Search { g, aut_bound } => aut_search(g, *aut_bound),
            AutCmd::VerifyStructure { g, aut_bound } => aut_verify_structure(g, *aut_bound),
            AutCmd::Nbar(a) => aut_nbar(a),
            AutCmd::CentralFactor(a) => aut_central_factor(a),
        },
        Command::Iota { what: IotaCmd::Verify { g, assignment } } => iota_verify_cmd(g, assignment),
        Command::Descent { what } => match what {
            DescentCmd::Cocycle(a) => descent_cocycle(a),
            DescentCmd::Obstruction { g, step, lower, witness, height } => {
                descent_obstruction(g, *step, lower, witness.as_deref(), *height)
            }
            DescentCmd::Solve { g, tower, height } => descent_solve(g, tower, *height),
        },
        Command::Equivariant { what } => match what {
            EquivariantCmd::Build(a) => equivariant_build(a),
            EquivariantCmd::AlgorithmL { g, exceptional } => equivariant_algorithm_l(g, exceptional),
        },
        Command::Invariants { what } => match what {
            InvariantsCmd::Compute { g, degrees } => invariants_compute(g, degrees),
            InvariantsCmd::Discriminant(a) => invariants_discriminant(a),
        },
        Command::VerifyAll { enumeration_bound, no_s6, budgets } => verify_all(*enumeration_bound, *no_s6, *budgets),
    }
}

/// Exit code, standard output and standard error for one invocation.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return if code == EXIT_OK { (code, e.to_string(), String::new()) } else { (code, String::new(), e.to_string()) };
        }
    };
    match dispatch(&cli.command) {
        Ok(out) => {
            let text = canonical_json(&out.value) + "\n";
            let code = if out.holds { EXIT_OK } else { EXIT_VERIFY };
            match &cli.output {
                Some(p) => match std::fs::write(p, &text) {
                    Ok(()) => (code, String::new(), String::new()),
                    Err(e) => (EXIT_USAGE, String::new(), format!("{}: {e}\n", p.display())),
                },
                None => (code, text, String::new()),
            }
        }
        Err(e) => (e.code(), String::new(), canonical_json(&json!({ "error": e.message(), "exit": e.code() })) + "\n"),
    }
}
