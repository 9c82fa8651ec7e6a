use std::path::Path;

use anyhow::Context;
use bisync::io::{from_json, ChoiJson, DensityJson, GameJson, GraphJson, MatrixJson, MixtureJson, QPermJson, VectJson};
use bisync::{
    compose, density_from_vectors, fix_equivalence_check, fixed_point_set, hom_game, iso_game, kraus_from_choi,
    local_bisync_membership, local_sync_membership, mixed_permutation_map, phi_from_density, verify_bisync_vect, Check,
    ChoiMap, Density, Game, Graph, Membership, PermutationMixture, ProjectiveSystem, QuantumPermutation,
    SeparatingFunctional, VectorStrategy,
};
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::report::Report;
use crate::{read_input, Cli, DensityClass, DensityCmd, GameClass, GameCmd, Group, MapCmd, QpermCmd, VectCmd};

fn parse<J, T>(text: &str, what: &str) -> anyhow::Result<T>
where
    J: DeserializeOwned,
    T: TryFrom<J, Error = bisync::Error>,
{
    let wire: J = from_json(text).with_context(|| format!("parsing {what}"))?;
    T::try_from(wire).with_context(|| format!("invalid {what}"))
}

fn load<J, T>(path: &str, what: &str) -> anyhow::Result<T>
where
    J: DeserializeOwned,
    T: TryFrom<J, Error = bisync::Error>,
{
    parse::<J, T>(&read_input(path)?, what)
}

fn load_path<J, T>(path: &Path, what: &str) -> anyhow::Result<T>
where
    J: DeserializeOwned,
    T: TryFrom<J, Error = bisync::Error>,
{
    load::<J, T>(&path.to_string_lossy(), what)
}

/// A map file holds either a Choi matrix or a density to build one from.
fn load_map(path: &str) -> anyhow::Result<ChoiMap> {
    let text = read_input(path)?;
    let value: serde_json::Value = from_json(&text).context("parsing map")?;
    if value.get("choi").is_some() {
        parse::<ChoiJson, ChoiMap>(&text, "Choi map")
    } else {
        let d = parse::<DensityJson, Density>(&text, "density")?;
        Ok(phi_from_density(&d)?)
    }
}

fn matrices(ms: &[bisync::CMatrix]) -> Vec<MatrixJson> {
    ms.iter().map(MatrixJson::from).collect()
}

fn functional_json(w: &SeparatingFunctional) -> serde_json::Value {
    json!({
        "coefficients": DensityJson::from(&w.coefficients),
        "offset": w.offset,
        "value_on_input": w.value_on_input,
        "max_on_atoms": w.max_on_atoms,
    })
}

fn synchronous_check(g: &Game) -> Check {
    let (na, nb, ka, kb) = g.shape();
    if na != nb || ka != kb {
        return Check::flag("synchronous", false, Some(format!("game has shape ({na},{nb},{ka},{kb})")));
    }
    let bad = (0..na).find_map(|v| {
        (0..ka)
            .flat_map(|a| (0..kb).map(move |b| (a, b)))
            .find(|&(a, b)| a != b && g.lambda(v, v, a, b))
            .map(|(a, b)| format!("lambda({v},{v},{a},{b}) = 1"))
    });
    Check::flag("synchronous", bad.is_none(), bad)
}

fn distinct_answers_check(g: &Game) -> Check {
    let (na, nb, ka, _) = g.shape();
    let bad = (0..na)
        .flat_map(|x| (0..nb).map(move |y| (x, y)))
        .filter(|&(x, y)| x != y)
        .find_map(|(x, y)| (0..ka).find(|&a| g.lambda(x, y, a, a)).map(|a| format!("lambda({x},{y},{a},{a}) = 1")));
    Check::flag("distinct_answers", bad.is_none(), bad)
}

fn game(cmd: &GameCmd, input: &str, r: &mut Report) -> anyhow::Result<()> {
    match cmd {
        GameCmd::Check { class } => {
            let g: Game = load::<GameJson, _>(input, "game")?;
            r.check(synchronous_check(&g));
            if *class == GameClass::Bisync {
                r.check(distinct_answers_check(&g));
            }
        }
        GameCmd::Flip => {
            let g: Game = load::<GameJson, _>(input, "game")?;
            r.artifact("game", GameJson::from(&g.flip()))?;
        }
        GameCmd::Hom { g, h } | GameCmd::Iso { g, h } => {
            let g: Graph = load_path::<GraphJson, _>(g, "graph G")?;
            let h: Graph = load_path::<GraphJson, _>(h, "graph H")?;
            let game = if matches!(cmd, GameCmd::Hom { .. }) { hom_game(&g, &h) } else { iso_game(&g, &h) };
            r.artifact("game", GameJson::from(&game))?;
        }
        GameCmd::Lift => {
            let g: Game = load::<GameJson, _>(input, "game")?;
            r.artifact("game", GameJson::from(&g.bisync_lift()?))?;
        }
    }
    Ok(())
}

fn density(cmd: &DensityCmd, input: &str, tol: f64, r: &mut Report) -> anyhow::Result<()> {
    if let DensityCmd::Z3 = cmd {
        r.artifact("density", DensityJson::from(&Density::z3_counterexample()))?;
        return Ok(());
    }
    let d: Density = load::<DensityJson, _>(input, "density")?;
    match cmd {
        DensityCmd::Check { class } => {
            r.checks(d.check_valid(tol));
            if *class >= DensityClass::Nonsignalling {
                r.checks(d.check_nonsignalling(tol)?);
            }
            if *class >= DensityClass::Sync {
                r.check(d.check_synchronous(tol)?);
            }
            if *class >= DensityClass::Bisync {
                r.check(d.check_distinct_answers(tol)?);
            }
            if *class == DensityClass::Local {
                if r.pass {
                    bisync_membership(&d, tol, r)?;
                } else {
                    r.check(Check::flag("local", false, Some("not a bisynchronous density".into())));
                }
            }
        }
        DensityCmd::Perfect { game } => {
            let g: Game = load_path::<GameJson, _>(game, "game")?;
            r.check(d.check_perfect_for(&g, tol)?);
        }
        DensityCmd::Flip => {
            let f = d.flip();
            r.checks(f.check_valid(tol));
            r.artifact("density", DensityJson::from(&f))?;
        }
        DensityCmd::Compose { then } => {
            let q: Density = load_path::<DensityJson, _>(then, "density")?;
            let c = compose(&q, &d)?;
            r.checks(c.check_valid(tol));
            r.artifact("density", DensityJson::from(&c))?;
        }
        DensityCmd::LocalDecompose { sync: false } => bisync_membership(&d, tol, r)?,
        DensityCmd::LocalDecompose { sync: true } => match local_sync_membership(&d, tol)? {
            Membership::Member(m) => {
                r.check(Check::flag("local", true, None));
                r.artifact("mixture", json!({ "k": m.k, "weights": m.weights, "functions": m.functions }))?;
            }
            Membership::Infeasible(w) => infeasible(&w, r)?,
        },
        DensityCmd::Z3 => unreachable!(),
    }
    Ok(())
}

fn bisync_membership(d: &Density, tol: f64, r: &mut Report) -> anyhow::Result<()> {
    match local_bisync_membership(d, tol)? {
        Membership::Member(m) => {
            r.check(Check::flag("local", true, None));
            r.artifact("mixture", MixtureJson::from(&m))?;
        }
        Membership::Infeasible(w) => infeasible(&w, r)?,
    }
    Ok(())
}

fn infeasible(w: &SeparatingFunctional, r: &mut Report) -> anyhow::Result<()> {
    let witness = format!("separating functional exceeds every atom by {:.3e}", w.violation());
    r.check(Check::flag("local", false, Some(witness)));
    r.artifact("separating_functional", functional_json(w))
}

fn vect(cmd: &VectCmd, input: &str, tol: f64, r: &mut Report) -> anyhow::Result<()> {
    let v: VectorStrategy = load::<VectJson, _>(input, "vector strategy")?;
    match cmd {
        VectCmd::Verify => r.checks(verify_bisync_vect(&v, tol)?),
        VectCmd::Density => r.artifact("density", DensityJson::from(&density_from_vectors(&v, tol)?))?,
    }
    Ok(())
}

fn qperm(cmd: &QpermCmd, input: &str, tol: f64, r: &mut Report) -> anyhow::Result<()> {
    let sys: ProjectiveSystem = load::<QPermJson, _>(input, "projective system")?;
    match cmd {
        QpermCmd::Verify => r.checks(sys.verify(tol)),
        QpermCmd::Density => r.artifact("density", DensityJson::from(&sys.induced_density(tol)?))?,
        QpermCmd::Apply { matrix } => {
            let u = QuantumPermutation::new(sys, tol)?;
            let x: bisync::CMatrix = load_path::<MatrixJson, _>(matrix, "matrix")?;
            r.artifact("matrix", MatrixJson::from(&u.factorizable_apply(&x)?))?;
        }
        QpermCmd::Intertwine { g, h } => {
            let u = QuantumPermutation::new(sys, tol)?;
            let g: Graph = load_path::<GraphJson, _>(g, "graph G")?;
            let h: Graph = load_path::<GraphJson, _>(h, "graph H")?;
            r.checks(u.intertwining_report(&g, &h, tol)?);
        }
        QpermCmd::Fixpoints { crosscheck } => {
            let u = QuantumPermutation::new(sys, tol)?;
            if *crosscheck {
                let rep = fix_equivalence_check(&u, &u.induced_density(), tol)?;
                let [commutation, fixed_points, kraus_commutant, pattern] = rep.dims();
                r.artifact(
                    "dimensions",
                    json!({
                        "commutation": commutation,
                        "fixed_points": fixed_points,
                        "kraus_commutant": kraus_commutant,
                        "pattern": pattern,
                    }),
                )?;
                r.artifact("pattern_labels", rep.pattern.labels())?;
                if !rep.pattern.warnings.is_empty() {
                    r.artifact("warnings", &rep.pattern.warnings)?;
                }
                r.checks(rep.checks);
            } else {
                let pattern = u.fixed_pattern_basis(tol);
                r.artifact("dimension", pattern.dim())?;
                r.artifact("pattern_labels", pattern.labels())?;
                r.artifact("basis", matrices(&pattern.basis))?;
                if !pattern.warnings.is_empty() {
                    r.artifact("warnings", &pattern.warnings)?;
                }
            }
        }
    }
    Ok(())
}

fn map(cmd: &MapCmd, input: &str, tol: f64, r: &mut Report) -> anyhow::Result<()> {
    match cmd {
        MapCmd::Build => {
            let d: Density = load::<DensityJson, _>(input, "density")?;
            r.artifact("map", ChoiJson::from(&phi_from_density(&d)?))?;
        }
        MapCmd::Check => {
            let m = load_map(input)?;
            r.checks(m.check_channel(tol));
            r.artifact("min_choi_eigenvalue", m.min_choi_eigenvalue())?;
        }
        MapCmd::Adjoint => {
            let m = load_map(input)?;
            r.artifact("map", ChoiJson::from(&m.adjoint()))?;
        }
        MapCmd::Kraus => {
            let m = load_map(input)?;
            let kraus = kraus_from_choi(&m, tol)?;
            let err = kraus.to_map().choi().max_abs_diff(m.choi());
            r.check(Check::within("reconstructs_choi", err, tol, Some(format!("max entry error {err:.3e}"))));
            r.artifact("kraus", matrices(kraus.operators()))?;
        }
        MapCmd::Fixpoints => {
            let m = load_map(input)?;
            let fixed = fixed_point_set(&m, tol)?;
            r.artifact("dimension", fixed.dim())?;
            r.artifact("basis", matrices(fixed.basis()))?;
        }
        MapCmd::Mixperm => {
            let mix: PermutationMixture = load::<MixtureJson, _>(input, "permutation mixture")?;
            r.artifact("map", ChoiJson::from(&mixed_permutation_map(&mix)))?;
        }
    }
    Ok(())
}

pub fn dispatch(cli: &Cli) -> anyhow::Result<Report> {
    let input = cli.global.input.as_str();
    let tol = cli.global.tol;
    let (name, sub) = match &cli.group {
        Group::Game { cmd } => ("game", format!("{cmd:?}")),
        Group::Density { cmd } => ("density", format!("{cmd:?}")),
        Group::Vect { cmd } => ("vect", format!("{cmd:?}")),
        Group::Qperm { cmd } => ("qperm", format!("{cmd:?}")),
        Group::Map { cmd } => ("map", format!("{cmd:?}")),
    };
    let mut r = Report::new(&format!("{name} {}", command_word(&sub)));
    match &cli.group {
        Group::Game { cmd } => game(cmd, input, &mut r)?,
        Group::Density { cmd } => density(cmd, input, tol, &mut r)?,
        Group::Vect { cmd } => vect(cmd, input, tol, &mut r)?,
        Group::Qperm { cmd } => qperm(cmd, input, tol, &mut r)?,
        Group::Map { cmd } => map(cmd, input, tol, &mut r)?,
    }
    Ok(r)
}

/// `LocalDecompose { sync: true }` -> `local-decompose`.
fn command_word(debug: &str) -> String {
    let head = debug.split([' ', '{']).next().unwrap_or(debug);
    let mut out = String::new();
    for (i, c) in head.chars().enumerate() {
        if c.is_ascii_uppercase() && i > 0 {
            out.push('-');
        }
        out.push(c.to_ascii_lowercase());
    }
    out
}
