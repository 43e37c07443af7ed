use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use hurwitz_core::classes::ConjugacyClassTable;
use hurwitz_core::counting::{
    affine_leading_monomial, equal_degree_generator_coefficient, estimate_h2c,
    projective_average_order, projective_stable_prediction, setup_inputs,
    symmetric_leading_monomial, Formula, H2Provenance, H2Value, LeadingMonomial, Prediction,
};
use hurwitz_core::decomposition::{hur_from_chur, SubgroupLattice};
use hurwitz_core::group::Provenance;
use hurwitz_core::orbit::{
    ComponentQuery, Connectedness, EngineConfig, OrbitEngine, Reduction, Space,
};
use hurwitz_core::quasipoly::fit;
use hurwitz_core::setup::SetupDoc;
use hurwitz_core::subgroup::{all_subgroups, Abelianization};
use hurwitz_core::verification::{
    run_factorization_suite, run_growth_suite, run_identity_suite, ScenarioReport,
};
use hurwitz_core::{ClassSetup, FiniteGroup, GroupSpec};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::args::{Cli, Command, GroupArgs, H2Source, ReductionArg, SetupArgs, SpaceArg, Suite};
use crate::{CliError, Report};

type Result<T> = std::result::Result<T, CliError>;

fn engine(cli: &Cli) -> Result<OrbitEngine> {
    if cli.budget.workers == 0 || cli.budget.max_states == 0 {
        return Err(CliError::Config("budgets must be positive".into()));
    }
    Ok(OrbitEngine::new(EngineConfig {
        workers: cli.budget.workers,
        max_states: cli.budget.max_states,
        max_memory_bytes: cli.budget.max_memory,
        reduction: match cli.budget.reduction {
            ReductionArg::Auto => Reduction::Auto,
            ReductionArg::Raw => Reduction::Raw,
            ReductionArg::Commutation => Reduction::Commutation,
        },
    })?)
}

fn space(s: SpaceArg) -> Space {
    match s {
        SpaceArg::Affine => Space::Affine,
        SpaceArg::Projective => Space::Projective,
    }
}

fn load_group(args: &GroupArgs) -> Result<Arc<FiniteGroup>> {
    let spec = args
        .group
        .as_deref()
        .ok_or_else(|| CliError::Config("--group is required".into()))?;
    let text = if Path::new(spec).is_file() {
        std::fs::read_to_string(spec)?
    } else {
        spec.to_string()
    };
    Ok(Arc::new(FiniteGroup::build(&GroupSpec::parse_short(
        &text,
    )?)?))
}

fn load_setup(args: &SetupArgs) -> Result<ClassSetup> {
    let g = load_group(&args.group)?;
    let doc = match &args.setup {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(hurwitz_core::Error::from)?,
        None => {
            if args.blocks.is_empty() {
                return Err(CliError::Config(
                    "give at least one --block or a --setup file".into(),
                ));
            }
            let xi = match &args.xi {
                Some(list) => list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<u32>()
                            .map_err(|_| CliError::Config(format!("bad multiplicity {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => vec![1; args.blocks.len()],
            };
            SetupDoc {
                blocks: args.blocks.iter().map(|b| vec![b.clone()]).collect(),
                xi,
            }
        }
    };
    Ok(ClassSetup::from_doc(g, &doc)?)
}

/// Built-in |H₂(G, c)| values, used only with `--h2 table`.
fn table_h2(s: &ClassSetup) -> Result<H2Value> {
    let g = s.group();
    if g.elements().any(|x| g.elem_order(x) as usize == g.order()) {
        return Ok(H2Value {
            value: 1,
            provenance: H2Provenance::Table {
                source: "cyclic group: trivial Schur multiplier".into(),
            },
        });
    }
    if let Provenance::Builtin { name } = g.source() {
        if name.starts_with("symmetric(") && s.dstar().len() == 1 {
            let rep = s.dstar_class(0)[0];
            if g.elem_order(rep) == 2 && g.label(rep).matches('(').count() == 1 {
                return Ok(H2Value {
                    value: 1,
                    provenance: H2Provenance::Table {
                        source: "symmetric group with transpositions".into(),
                    },
                });
            }
        }
    }
    Err(CliError::Config(
        "no built-in |H2| for this setup; pass an integer or \"estimate\"".into(),
    ))
}

fn resolve_h2(
    src: H2Source,
    s: &ClassSetup,
    e: &OrbitEngine,
    n_max: u64,
    window: usize,
) -> Result<H2Value> {
    match src {
        H2Source::Value(v) => Ok(H2Value::user(v)?),
        H2Source::Estimate => Ok(estimate_h2c(e, s, n_max, window)?),
        H2Source::Table => table_h2(s),
    }
}

fn require_h2(h2: Option<H2Source>) -> Result<H2Source> {
    h2.ok_or_else(|| {
        CliError::Config("this prediction needs --h2 (integer, estimate or table)".into())
    })
}

pub fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Count {
            setup,
            space: sp,
            connected,
            n,
        } => {
            let s = load_setup(setup)?;
            let e = engine(cli)?;
            let conn = if *connected {
                Connectedness::Connected
            } else {
                Connectedness::All
            };
            let mut rows = Vec::new();
            let mut out = Vec::new();
            for d in n.iter() {
                let c = e.count_components(&s, &ComponentQuery::new(d, space(*sp), conn))?;
                rows.push(vec![d.to_string(), c.total.to_string()]);
                out.push(json!({
                    "n": d,
                    "count": c.total.to_string(),
                    "states": c.states_visited,
                    "reduced": c.reduced,
                    "max_per_multidiscriminant": c.max_per_psi(),
                }));
            }
            Ok(Report::new(
                vec!["n", "count"],
                rows,
                json!({ "rows": out }),
            ))
        }

        Command::Predict {
            setup,
            space: sp,
            h2,
            symmetric_example,
            generator_degree,
            n_max,
            window,
        } => {
            if let Some(d) = symmetric_example {
                let m = symmetric_leading_monomial(*d)?;
                let p =
                    Prediction::new(&m, Formula::Symmetric, json!({ "d": d, "variable": "n/2" }));
                return Ok(predictions(vec![p], None));
            }
            let s = load_setup(setup)?;
            let e = engine(cli)?;
            match space(*sp) {
                Space::Affine => {
                    let h = resolve_h2(require_h2(*h2)?, &s, &e, *n_max, *window)?;
                    let m = affine_leading_monomial(&s, &h);
                    Ok(predictions(
                        vec![Prediction::new(
                            &m,
                            Formula::AffineLeading,
                            setup_inputs(&s, Some(&h)),
                        )],
                        None,
                    ))
                }
                Space::Projective if s.omega() == 0 => {
                    let h = resolve_h2(require_h2(*h2)?, &s, &e, *n_max, *window)?;
                    let p = projective_stable_prediction(&s, &h)?;
                    let m = LeadingMonomial::new(0, BigInt::from(p.stable_value).into());
                    let mut inputs = setup_inputs(&s, Some(&h));
                    inputs["k"] = json!(p.k);
                    inputs["average"] = json!(format!("{}/{}", p.average_num, p.average_den));
                    Ok(predictions(
                        vec![Prediction::new(&m, Formula::ProjectiveStable, inputs)],
                        None,
                    ))
                }
                Space::Projective if s.xi_total() == 1 => {
                    let h = resolve_h2(require_h2(*h2)?, &s, &e, *n_max, *window)?;
                    let m = projective_average_order(&s, &h)?;
                    let mut out = vec![Prediction::new(
                        &m,
                        Formula::ProjectiveAverage,
                        setup_inputs(&s, Some(&h)),
                    )];
                    if let Some(d) = generator_degree {
                        let (q0, along) = equal_degree_generator_coefficient(&s, &h, *d)?;
                        let mut inputs = setup_inputs(&s, Some(&h));
                        inputs["generator_degree"] = json!(d);
                        inputs["q0"] = json!(q0.to_string());
                        out.push(Prediction::new(
                            &LeadingMonomial::new(m.degree, along),
                            Formula::EqualDegree,
                            inputs,
                        ));
                    }
                    Ok(predictions(out, None))
                }
                Space::Projective => {
                    // No exact formula here: only the growth order is known.
                    let bounds = json!({
                        "kind": "bounds",
                        "upper": format!("O(n^{})", s.omega()),
                        "lower": format!("n^{} = O(count at degree {}·n)", s.omega(), s.group().exponent()),
                        "degree": s.omega(),
                        "exponent": s.group().exponent(),
                        "inputs": setup_inputs(&s, None),
                    });
                    Ok(predictions(Vec::new(), Some(bounds)))
                }
            }
        }

        Command::Decompose {
            setup,
            space: sp,
            n,
            lattice_bound,
        } => {
            let s = load_setup(setup)?;
            let e = engine(cli)?;
            let lat = SubgroupLattice::for_setup(&s, *lattice_bound)?;
            let mut rows = Vec::new();
            let mut tables = Vec::new();
            for d in n.iter() {
                let t = hur_from_chur(&e, &s, d, space(*sp), &lat)?;
                for r in &t.rows {
                    rows.push(vec![
                        d.to_string(),
                        r.subgroup.clone(),
                        r.order.to_string(),
                        r.omega.to_string(),
                        r.chur.to_string(),
                    ]);
                }
                rows.push(vec![
                    d.to_string(),
                    "all".into(),
                    s.group().order().to_string(),
                    String::new(),
                    t.hur_direct.to_string(),
                ]);
                tables.push(serde_json::to_value(&t).map_err(hurwitz_core::Error::from)?);
            }
            Ok(Report::new(
                vec!["n", "subgroup", "order", "omega", "components"],
                rows,
                json!({ "tables": tables }),
            ))
        }

        Command::Fit {
            series,
            column,
            max_period,
            max_degree,
        } => {
            let data = read_series(series, column.as_deref())?;
            let q = fit(&data, *max_period, *max_degree)?;
            let rows = q
                .polys
                .iter()
                .enumerate()
                .map(|(r, p)| {
                    vec![
                        r.to_string(),
                        hurwitz_core::quasipoly::degree(p).map_or("-".into(), |d| d.to_string()),
                        p.iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(" "),
                    ]
                })
                .collect();
            Ok(Report::new(
                vec!["residue", "degree", "coefficients"],
                rows,
                q.report(),
            ))
        }

        Command::Verify {
            suite,
            setup,
            samples,
            max_len,
            n_max,
            h2,
            tolerance,
            window,
        } => {
            let e = engine(cli)?;
            let report = match suite {
                Suite::Identities => {
                    let g = load_group(&setup.group)?;
                    let len = max_len.unwrap_or(if g.order() >= 24 { 4 } else { 5 });
                    run_identity_suite(&e, &g, *samples, cli.seed, len)?
                }
                Suite::Factorization => {
                    let s = load_setup(setup)?;
                    run_factorization_suite(&e, &s, *samples, cli.seed, max_len.unwrap_or(14))?
                }
                Suite::Growth => {
                    let s = load_setup(setup)?;
                    let h = match h2 {
                        Some(src) => Some(resolve_h2(*src, &s, &e, *n_max as u64, *window)?),
                        None => None,
                    };
                    run_growth_suite(&e, &s, *n_max, h.as_ref(), *tolerance)?
                }
            };
            Ok(verify_report(report))
        }

        Command::EstimateH2 {
            setup,
            n_max,
            window,
        } => {
            let s = load_setup(setup)?;
            let e = engine(cli)?;
            let h = estimate_h2c(&e, &s, *n_max, *window)?;
            let rows = vec![vec![h.value.to_string(), "empirical".into()]];
            Ok(Report::new(
                vec!["h2", "source"],
                rows,
                serde_json::to_value(&h).map_err(hurwitz_core::Error::from)?,
            ))
        }

        Command::GroupInfo {
            group,
            lattice_bound,
        } => {
            let g = load_group(group)?;
            group_info(&g, *lattice_bound)
        }
    }
}

fn predictions(list: Vec<Prediction>, bounds: Option<Value>) -> Report {
    let mut rows: Vec<Vec<String>> = list
        .iter()
        .map(|p| {
            let formula = serde_json::to_value(p.formula).unwrap_or(Value::Null);
            vec![
                formula.as_str().unwrap_or_default().to_string(),
                p.degree.to_string(),
                p.coefficient_num.clone(),
                p.coefficient_den.clone(),
            ]
        })
        .collect();
    if let Some(b) = &bounds {
        rows.push(vec![
            "bounds".into(),
            b["degree"].to_string(),
            String::new(),
            String::new(),
        ]);
    }
    let json = match bounds {
        Some(b) => json!({ "predictions": list, "bounds": b }),
        None => json!({ "predictions": list }),
    };
    Report::new(
        vec!["formula", "degree", "coefficient_num", "coefficient_den"],
        rows,
        json,
    )
}

fn verify_report(r: ScenarioReport) -> Report {
    let rows = r
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                serde_json::to_value(c.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                c.passed.to_string(),
                c.enumerated.to_string(),
                c.predicted.to_string(),
            ]
        })
        .collect();
    let mut rep = Report::new(
        vec!["check", "kind", "passed", "enumerated", "predicted"],
        rows,
        serde_json::to_value(&r).unwrap_or(Value::Null),
    );
    rep.text = Some(r.to_text());
    rep.failed = !r.passed();
    rep
}

fn read_series(path: &Path, column: Option<&str>) -> Result<BTreeMap<u64, BigInt>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let headers = rdr.headers()?.clone();
    let n_col = headers
        .iter()
        .position(|h| h == "n")
        .ok_or_else(|| CliError::Config("series needs an `n` column".into()))?;
    let v_col = match column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("no column {name:?}")))?,
        None => (0..headers.len())
            .find(|&i| i != n_col)
            .ok_or_else(|| CliError::Config("series needs a value column".into()))?,
    };
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse_err = |what: &str| {
            CliError::Config(format!(
                "bad {what} in row {:?}",
                rec.iter().collect::<Vec<_>>()
            ))
        };
        let n: u64 = rec
            .get(n_col)
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| parse_err("n"))?;
        let v: BigInt = rec
            .get(v_col)
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| parse_err("value"))?;
        out.insert(n, v);
    }
    Ok(out)
}

fn group_info(g: &FiniteGroup, bound: usize) -> Result<Report> {
    let classes = ConjugacyClassTable::new(g);
    let ab = Abelianization::new(g)?;
    let subgroups = all_subgroups(g, bound)?;
    let rows: Vec<Vec<String>> = (0..classes.len())
        .map(|k| {
            vec![
                k.to_string(),
                classes.class_size(k).to_string(),
                classes.class_order(k).to_string(),
                g.label(classes.class(k)[0]).to_string(),
            ]
        })
        .collect();
    let json = json!({
        "order": g.order(),
        "abelian": g.is_abelian(),
        "exponent": g.exponent(),
        "classes": classes.len(),
        "subgroups": subgroups.len(),
        "abelianization": ab.quotient().factors(),
        "commutator_order": ab.commutator_subgroup().order(),
        "source": g.source(),
        "class_table": rows.iter().map(|r| json!({
            "class": r[0], "size": r[1], "order": r[2], "representative": r[3],
        })).collect::<Vec<_>>(),
    });
    Ok(Report::new(
        vec!["class", "size", "order", "representative"],
        rows,
        json,
    ))
}
