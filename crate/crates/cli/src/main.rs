use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use deltagroup_core::algebra::dw::{build_dw, flat_labels, MultiplicativeCocycle};
use deltagroup_core::algebra::sixj::{build_sixj, SixJData};
use deltagroup_core::algebra::{
    derive_mtilde, format_scalar, int, parse_scalar, verify_orthogonal, verify_strong,
    verify_three_algebra, Report, Status, DEFAULT_MAX_DIM,
};
use deltagroup_core::cohomology::{Cohomology, FiniteAbelianGroupDescriptor};
use deltagroup_core::delta::{are_isomorphic, build_t_g_0, build_t_g_a_alpha, classify, Outcome};
use deltagroup_core::evaluator::{coherence_check, evaluate, EvaluationState, LabeledTriangulation, Triangulation, DEFAULT_BUDGET};
use deltagroup_core::format::{
    to_canonical_string, AlgebraDoc, AnyAlgebra, CochainDoc, DeltaDoc, GroupDoc, ModuleDoc, TriangulationDoc,
};
use deltagroup_core::{Cochain, FiniteGroup, GModule};

#[derive(Parser)]
#[command(name = "deltagroup", version, about = "Δ-groups, symmetric cohomology and 3-algebras")]
struct Cli {
    /// Worker threads for the verifiers (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// H^n, and with --symmetric also HS^n and the kernel of HS^n -> H^n.
    Cohomology {
        #[arg(long)]
        group: String,
        #[arg(long)]
        module: String,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        symmetric: bool,
    },
    /// Check the Δ-group axioms of a Δ-group document.
    VerifyDelta {
        #[arg(long)]
        input: PathBuf,
    },
    /// Check an algebra document (strong when it carries "u").
    VerifyAlgebra {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Valid twisting cochains and isomorphism classes of T(G,A,α); with two
    /// cochain inputs, decide whether their Δ-groups are isomorphic.
    Classify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        module: String,
        #[arg(long)]
        input: Vec<PathBuf>,
    },
    /// Evaluate a triangulation document (first input) in an algebra (second input).
    Evaluate {
        #[arg(long, num_args = 1)]
        input: Vec<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluate under this many consecutive seeds and compare.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Emit an input document.
    Generate {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        module: Option<String>,
        /// A cochain document for T_G_A_alpha.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// dw: α is -1 where bit (g*n+h)*n+k is set, 1 elsewhere.
        #[arg(long, default_value_t = 0)]
        alpha_mask: u64,
        /// sixj: size of the index set.
        #[arg(long, default_value_t = 1)]
        size: usize,
        /// sixj: comma separated weights, all 1 by default.
        #[arg(long)]
        weights: Option<String>,
        /// triangulation: number of subdivisions.
        #[arg(long, default_value_t = 3)]
        subdivisions: usize,
        /// triangulation: number of random flips after subdividing.
        #[arg(long, default_value_t = 0)]
        flips: usize,
        /// triangulation: labels are drawn from 0..dim (ignored with --group).
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "T_G_0")]
    TG0,
    #[value(name = "T_G_A_alpha")]
    TGAAlpha,
    #[value(name = "dw")]
    Dw,
    #[value(name = "sixj")]
    Sixj,
    #[value(name = "triangulation")]
    Triangulation,
}

type Failure = Box<dyn std::error::Error>;

enum Verdict {
    Ok(Value),
    Failed(Value),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (doc, code) = match run(cli.command) {
        Ok(Verdict::Ok(v)) => (v, 0),
        Ok(Verdict::Failed(v)) => (v, 1),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = match to_canonical_string(&doc) {
        Ok(t) => t + "\n",
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match cli.output {
        Some(path) => {
            if let Err(e) = fs::write(&path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn parse_group(spec: &str) -> Result<Arc<FiniteGroup>, Failure> {
    let (kind, arg) = spec.split_once(':').ok_or_else(|| format!("bad group {spec:?}"))?;
    let g = match kind {
        "cyclic" => FiniteGroup::cyclic(arg.parse()?)?,
        "symmetric" => {
            let n: usize = arg.parse()?;
            if n > 4 {
                return Err(format!("symmetric:{n} is larger than supported (n ≤ 4)").into());
            }
            FiniteGroup::symmetric(n)?
        }
        "file" => read_json::<GroupDoc>(Path::new(arg))?.to_group()?,
        _ => return Err(format!("unknown group kind {kind:?}").into()),
    };
    Ok(Arc::new(g))
}

fn parse_module(spec: &str, group: Arc<FiniteGroup>) -> Result<Arc<GModule>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let m = match parts[..] {
        ["trivial", m] => GModule::trivial(group, m.parse()?, 1)?,
        ["trivial", m, k] => GModule::trivial(group, m.parse()?, k.parse()?)?,
        ["sign", m] => {
            let chars = group.characters_to_z2();
            let parity = chars
                .get(1)
                .ok_or("the group has no nontrivial sign character")?;
            GModule::sign(group, m.parse()?, parity)?
        }
        ["file", path] => read_json::<ModuleDoc>(Path::new(path))?.to_module(group)?,
        _ => return Err(format!("bad module {spec:?}").into()),
    };
    Ok(Arc::new(m))
}

fn orders(d: &FiniteAbelianGroupDescriptor) -> Value {
    json!(d.invariant_factors())
}

fn report_json(r: &Report) -> Value {
    let checks: BTreeMap<&str, Value> = r
        .checks
        .iter()
        .map(|c| {
            let v = match &c.status {
                Status::Pass => json!("pass"),
                Status::Skipped => json!("skipped"),
                Status::Fail(w) => json!({ "fail": w }),
            };
            (c.name, v)
        })
        .collect();
    json!({
        "pass": r.all_pass(),
        "checks": checks,
        "first_failure": r.first_failure().map(|c| c.name),
    })
}

fn run(cmd: Command) -> Result<Verdict, Failure> {
    match cmd {
        Command::Cohomology {
            group,
            module,
            degree,
            symmetric,
        } => {
            let a = parse_module(&module, parse_group(&group)?)?;
            let coh = Cohomology::new(a);
            let h = coh.cohomology_group(degree)?;
            let mut doc = json!({ "degree": degree, "H": orders(&h) });
            eprintln!("H^{degree} has invariant factors {:?}", h.invariant_factors());
            if symmetric {
                let hs = coh.symmetric_cohomology_group(degree)?;
                let k = coh.natural_map_kernel(degree)?;
                eprintln!("HS^{degree} has invariant factors {:?}", hs.invariant_factors());
                doc["HS"] = orders(&hs);
                doc["kernel"] = orders(&k);
            }
            Ok(Verdict::Ok(doc))
        }
        Command::VerifyDelta { input } => {
            let t = read_json::<DeltaDoc>(&input)?.to_delta()?;
            let r = t.verify();
            let axioms: BTreeMap<&str, Value> = r
                .results
                .iter()
                .map(|a| {
                    let v = match &a.outcome {
                        Outcome::Pass => json!("pass"),
                        Outcome::Skipped => json!("skipped"),
                        Outcome::Fail(w) => json!({ "fail": w }),
                    };
                    (a.axiom.name(), v)
                })
                .collect();
            let first = r.first_failure().map(|a| a.axiom.name());
            let doc = json!({ "pass": r.all_pass(), "axioms": axioms, "first_failure": first, "size": t.len() });
            match first {
                None => {
                    eprintln!("Δ-group with {} elements: all axioms hold", t.len());
                    Ok(Verdict::Ok(doc))
                }
                Some(name) => {
                    eprintln!("axiom {name} fails");
                    Ok(Verdict::Failed(doc))
                }
            }
        }
        Command::VerifyAlgebra { input, max_dim } => {
            let doc = read_json::<AlgebraDoc>(&input)?;
            let (out, pass) = match doc.to_algebra()? {
                AnyAlgebra::Strong(s) => {
                    let strong = verify_strong(&s, max_dim)?;
                    let sys = derive_mtilde(&s);
                    let three = verify_three_algebra(&sys, max_dim)?;
                    let orth = verify_orthogonal(&sys);
                    let pass = strong.all_pass();
                    eprintln!("strong 3-algebra of dimension {}:\n{strong}", s.dim());
                    (
                        json!({
                            "kind": "strong",
                            "dim": s.dim(),
                            "pass": pass,
                            "strong": report_json(&strong),
                            "three_algebra": report_json(&three),
                            "orthogonal": report_json(&orth),
                            "equivalent": strong.all_pass() == three.all_pass(),
                        }),
                        pass,
                    )
                }
                AnyAlgebra::Plain(a) => {
                    let three = verify_three_algebra(&a, max_dim)?;
                    let orth = verify_orthogonal(&a);
                    let pass = three.all_pass();
                    eprintln!("3-algebra of dimension {}:\n{three}", a.dim());
                    (
                        json!({
                            "kind": "three-algebra",
                            "dim": a.dim(),
                            "pass": pass,
                            "three_algebra": report_json(&three),
                            "orthogonal": report_json(&orth),
                        }),
                        pass,
                    )
                }
            };
            Ok(if pass { Verdict::Ok(out) } else { Verdict::Failed(out) })
        }
        Command::Classify { group, module, input } => {
            let a = parse_module(&module, parse_group(&group)?)?;
            let coh = Cohomology::new(a.clone());
            match input.len() {
                0 => {
                    let c = classify(&coh)?;
                    eprintln!(
                        "valid α: {:?}, classes: {:?}",
                        c.valid.invariant_factors(),
                        c.classes.invariant_factors()
                    );
                    Ok(Verdict::Ok(json!({
                        "valid": orders(&c.valid),
                        "valid_count": c.valid.order().map(|n| n.to_string()),
                        "classes": orders(&c.classes),
                        "class_count": c.classes.order().map(|n| n.to_string()),
                        "d1_is_symmetry": c.d1_is_symmetry,
                    })))
                }
                2 => {
                    let alpha = read_json::<CochainDoc>(&input[0])?.to_cochain(a.clone())?;
                    let beta = read_json::<CochainDoc>(&input[1])?.to_cochain(a)?;
                    let d = are_isomorphic(&coh, &alpha, &beta)?;
                    eprintln!("isomorphic: {}", d.isomorphic);
                    Ok(Verdict::Ok(json!({
                        "isomorphic": d.isomorphic,
                        "sigma": d.sigma.as_ref().map(CochainDoc::from_cochain),
                    })))
                }
                n => Err(format!("classify takes zero or two --input cochains, got {n}").into()),
            }
        }
        Command::Evaluate { input, seed, trials } => {
            let [tri, alg] = &input[..] else {
                return Err("evaluate needs --input <triangulation> --input <algebra>".into());
            };
            let t = read_json::<TriangulationDoc>(tri)?.to_labeled()?;
            let names;
            let sys = match read_json::<AlgebraDoc>(alg)?.to_algebra()? {
                AnyAlgebra::Strong(s) => {
                    names = s.basis_names().to_vec();
                    derive_mtilde(&s)
                }
                AnyAlgebra::Plain(a) => {
                    names = a.basis_names().to_vec();
                    a
                }
            };
            let describe = |st: &EvaluationState| -> Value {
                let terms: Vec<Value> = st
                    .as_vector()
                    .unwrap_or_default()
                    .into_iter()
                    .map(|(i, c)| json!({ "index": i, "basis": names[i], "coefficient": format_scalar(&c) }))
                    .collect();
                json!(terms)
            };
            match trials {
                None => {
                    let st = evaluate(&t, &sys, seed, DEFAULT_BUDGET)?;
                    eprintln!("evaluated {} cells with seed {seed}", t.complex().cell_count());
                    Ok(Verdict::Ok(json!({ "seed": seed, "result": describe(&st) })))
                }
                Some(n) => {
                    let rep = coherence_check(&t, &sys, n, seed);
                    let results: Vec<Value> = rep
                        .seeds
                        .iter()
                        .zip(&rep.results)
                        .map(|(s, r)| match r {
                            Ok(st) => json!({ "seed": s, "result": describe(st) }),
                            Err(e) => json!({ "seed": s, "error": e.to_string() }),
                        })
                        .collect();
                    let pass = rep.passed();
                    eprintln!("{n} seeds: {}", if pass { "coherent" } else { "results differ" });
                    let doc = json!({
                        "coherent": pass,
                        "first_mismatch": rep.first_mismatch().map(|i| rep.seeds[i]),
                        "results": results,
                    });
                    Ok(if pass { Verdict::Ok(doc) } else { Verdict::Failed(doc) })
                }
            }
        }
        Command::Generate {
            kind,
            group,
            module,
            input,
            seed,
            alpha_mask,
            size,
            weights,
            subdivisions,
            flips,
            dim,
        } => {
            let need_group = || -> Result<Arc<FiniteGroup>, Failure> {
                parse_group(group.as_deref().ok_or("--group is required")?)
            };
            let doc = match kind {
                Kind::TG0 => serde_json::to_value(DeltaDoc::from_delta(&build_t_g_0(need_group()?)?))?,
                Kind::TGAAlpha => {
                    let a = parse_module(module.as_deref().ok_or("--module is required")?, need_group()?)?;
                    let alpha = match &input {
                        Some(p) => read_json::<CochainDoc>(p)?.to_cochain(a)?,
                        None => Cochain::zero(a, 3)?,
                    };
                    serde_json::to_value(DeltaDoc::from_delta(&build_t_g_a_alpha(&alpha)?))?
                }
                Kind::Dw => {
                    let alpha = MultiplicativeCocycle::from_sign_mask(need_group()?, alpha_mask)?;
                    serde_json::to_value(AlgebraDoc::from_strong(&build_dw(&alpha)))?
                }
                Kind::Sixj => {
                    let w = match &weights {
                        Some(s) => s.split(',').map(|x| parse_scalar(x.trim())).collect::<Result<Vec<_>, _>>()?,
                        None => vec![int(1); size],
                    };
                    let d = match seed {
                        Some(s) => SixJData::random(size, w, 1, &mut ChaCha8Rng::seed_from_u64(s))?,
                        None => SixJData::constant(size, int(1), w)?,
                    };
                    serde_json::to_value(AlgebraDoc::from_strong(&build_sixj(&d)?))?
                }
                Kind::Triangulation => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
                    let t = Triangulation::random(subdivisions, flips, &mut rng);
                    let labels = match &group {
                        Some(spec) => {
                            let g = parse_group(spec)?;
                            let phi: Vec<usize> = (0..t.vertex_count()).map(|_| rng.gen_range(0..g.order())).collect();
                            flat_labels(&g, t.cells(), &phi)
                        }
                        None => {
                            if dim == 0 {
                                return Err("--dim must be positive".into());
                            }
                            (0..t.cell_count()).map(|_| rng.gen_range(0..dim)).collect()
                        }
                    };
                    serde_json::to_value(TriangulationDoc::from_labeled(&LabeledTriangulation::new(t, labels)?))?
                }
            };
            Ok(Verdict::Ok(doc))
        }
    }
}
