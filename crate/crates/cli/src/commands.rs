use serde::Deserialize;
use serde_json::{json, Value};

use equimap::choi::{LinearMap, MapJson};
use equimap::detection::{detect, detect_with_family, parse_state_spec, sampled_detector, sn_certificate, DensityMatrix};
use equimap::diagram::{render_dot, render_text, verify_wiring, wiring};
use equimap::equivariant::{build_equivariant, check_ab_equivariance, decompose_equivariant, CoeffJson, EquivariantSpec};
use equimap::error::{Error, Result};
use equimap::io::{parse_json, read_json, write_json};
use equimap::matrix::{Matrix, MatrixJson};
use equimap::perm::{enumerate_sym, GramMatrix, Permutation};
use equimap::positivity::{k_positivity, k_positivity_falsify, positivity_profile, witness_value};
use equimap::scalar::Complex;
use equimap::zoo::{parse_map_spec, scan_collins, ParamRange};
use equimap::Seed;

use crate::{Command, Format, Output};

/// Relative cutoff for the numeric rank of the Gram matrix reported by `basis`.
const GRAM_RANK_TOL: f64 = 1e-10;

fn to<A: serde::Serialize>(args: &A) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

pub fn describe(cmd: &Command) -> (&'static str, Value) {
    match cmd {
        Command::Basis(a) => ("basis", to(a)),
        Command::Build(a) => ("build", to(a)),
        Command::Decompose(a) => ("decompose", to(a)),
        Command::Equiv(a) => ("equiv", to(a)),
        Command::Kpos(a) => ("kpos", to(a)),
        Command::Profile(a) => ("profile", to(a)),
        Command::Falsify(a) => ("falsify", to(a)),
        Command::Detect(a) => ("detect", to(a)),
        Command::Sn(a) => ("sn", to(a)),
        Command::Family(a) => ("family", to(a)),
        Command::Scan(a) => ("scan", to(a)),
        Command::Diagram(a) => ("diagram", to(a)),
    }
}

fn payload(results: Value) -> Result<Output> {
    Ok(Output::Json { results, seed: None })
}

fn seeded(results: Value, seed: u64) -> Result<Output> {
    Ok(Output::Json { results, seed: Some(seed) })
}

fn vector_json(v: &[Complex<f64>]) -> Value {
    json!({
        "re": v.iter().map(|z| z.re).collect::<Vec<_>>(),
        "im": v.iter().map(|z| z.im).collect::<Vec<_>>(),
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ChoiFile {
    Map(MapJson),
    Matrix(MatrixJson),
}

/// A Choi matrix from either a map file or a bare matrix file.
fn load_choi(path: &str) -> Result<Matrix<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: cannot read: {e}")))?;
    match parse_json::<ChoiFile>(&text, path)? {
        ChoiFile::Map(m) => Ok(LinearMap::<f64>::try_from(m)?.choi().clone()),
        ChoiFile::Matrix(m) => Matrix::try_from(m),
    }
}

fn load_map(spec: &str) -> Result<LinearMap<f64>> {
    Ok(parse_map_spec::<f64>(spec)?.map)
}

fn load_state(spec: &str) -> Result<DensityMatrix<f64>> {
    parse_state_spec::<f64>(spec)
}

fn parse_perm(text: &str, degree: usize) -> Result<Permutation> {
    let pi = Permutation::parse_cycles(text, degree)?;
    if pi.degree() != degree {
        return Err(Error::Parameter(format!("'{text}' is not a permutation of {degree} points")));
    }
    Ok(pi)
}

pub fn run(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Basis(args) => {
            let (n, a, b) = (args.sig.n, args.sig.a, args.sig.b);
            // Validates the signature and size limits.
            EquivariantSpec::<f64>::zeros(n, a, b)?;
            let perms = enumerate_sym(a + b + 1)?;
            let mut diagrams = Vec::with_capacity(perms.len());
            for pi in &perms {
                diagrams.push(wiring(pi, a, b)?);
            }
            match args.format {
                Format::Text => Ok(Output::Text(
                    perms
                        .iter()
                        .zip(&diagrams)
                        .map(|(pi, d)| render_text(d, pi))
                        .collect::<Vec<_>>()
                        .join("\n"),
                )),
                Format::Dot => Ok(Output::Text(
                    perms.iter().zip(&diagrams).map(|(pi, d)| render_dot(d, pi)).collect(),
                )),
                Format::Json => {
                    let gram = GramMatrix::new(a + b + 1, n)?;
                    let elements: Vec<Value> = perms
                        .iter()
                        .zip(&diagrams)
                        .enumerate()
                        .map(|(i, (pi, d))| {
                            json!({
                                "index": i,
                                "perm": pi.to_string(),
                                "cycleType": pi.cycle_type(),
                                "inverse": pi.inverse().to_string(),
                                "diagram": d,
                                "verified": verify_wiring(d, pi, n),
                            })
                        })
                        .collect();
                    payload(json!({
                        "size": perms.len(),
                        "gramRank": gram.numeric_rank(GRAM_RANK_TOL),
                        "elements": elements,
                    }))
                }
            }
        }
        Command::Build(args) => {
            let file: CoeffJson = read_json(&args.coeffs)?;
            let (n, a, b) = (args.sig.n, args.sig.a, args.sig.b);
            if (file.n, file.a, file.b) != (n, a, b) {
                return Err(Error::Parameter(format!(
                    "{} declares (n,a,b) = ({},{},{}) but ({n},{a},{b}) was requested",
                    args.coeffs, file.n, file.a, file.b
                )));
            }
            let spec = EquivariantSpec::<f64>::try_from(file)?;
            let phi = build_equivariant(&spec)?;
            let summary = json!({
                "label": phi.label(),
                "n": phi.in_dim(),
                "N": phi.out_dim(),
                "equivariance": phi.equivariance().to_string(),
                "terms": CoeffJson::from(&spec).coeffs,
            });
            match &args.out {
                Some(path) => {
                    write_json(path, &phi)?;
                    payload(json!({ "out": path, "map": summary }))
                }
                None => payload(json!({ "map": summary, "choi": MatrixJson::from(phi.choi().clone()) })),
            }
        }
        Command::Decompose(args) => {
            let c = load_choi(&args.choi)?;
            let dec = decompose_equivariant(&c, args.sig.n, args.sig.a, args.sig.b)?;
            payload(json!({
                "coeffs": CoeffJson::from(&dec.spec),
                "residual": dec.residual,
                "gramRank": dec.gram_rank,
                "basisSize": dec.spec.coeffs().len(),
            }))
        }
        Command::Equiv(args) => {
            let c = load_choi(&args.choi)?;
            let report = check_ab_equivariance(&c, args.sig.n, args.sig.a, args.sig.b, args.trials, Seed(args.seed), args.tol)?;
            seeded(json!(report), args.seed)
        }
        Command::Kpos(args) => {
            let phi = load_map(&args.map)?;
            let v = k_positivity(&phi, args.k, args.tol)?;
            payload(json!({
                "map": phi.label(),
                "equivariance": phi.equivariance().to_string(),
                "k": args.k,
                "pass": v.psd,
                "minEigenvalue": v.min_eigenvalue,
                "tolerance": args.tol,
            }))
        }
        Command::Profile(args) => {
            let phi = load_map(&args.map)?;
            payload(json!(positivity_profile(&phi, args.tol)?))
        }
        Command::Falsify(args) => {
            let phi = load_map(&args.map)?;
            let found = k_positivity_falsify(&phi, args.k, args.trials, Seed(args.seed))?;
            let results = match found {
                Some(w) => json!({
                    "map": phi.label(),
                    "k": args.k,
                    "falsified": true,
                    "trial": w.trial,
                    "value": w.value,
                    "recheck": witness_value(&phi, args.k, &w.input, &w.witness)?,
                    "input": vector_json(&w.input),
                    "witness": vector_json(&w.witness),
                }),
                None => json!({
                    "map": phi.label(),
                    "k": args.k,
                    "falsified": false,
                    "trials": args.trials,
                }),
            };
            seeded(results, args.seed)
        }
        Command::Detect(args) => {
            let rho = load_state(&args.state)?;
            let phi = load_map(&args.map)?;
            payload(json!(detect(&rho, &phi, args.tol)?))
        }
        Command::Sn(args) => {
            let rho = load_state(&args.state)?;
            let phi = load_map(&args.map)?;
            let outcome = sn_certificate(&rho, &phi, args.t, args.tol)?;
            payload(json!({ "map": phi.label(), "t": args.t, "certificate": outcome }))
        }
        Command::Family(args) => {
            let rho = load_state(&args.state)?;
            let phi = load_map(&args.map)?;
            let family = sampled_detector(&phi, args.samples, Seed(args.seed))?;
            let v = detect_with_family(&rho, &family, args.tol)?;
            let curve: Vec<Value> = v
                .curve()
                .into_iter()
                .enumerate()
                .map(|(i, m)| json!({ "a": i + 1, "minEigenvalue": m }))
                .collect();
            seeded(json!({ "verdict": v, "curve": curve }), args.seed)
        }
        Command::Scan(args) => {
            let gamma = match args.map.as_str() {
                "collins" if args.gamma == 0.0 => 0.0,
                "collins" => return Err(Error::Parameter("--gamma needs --map collins3".into())),
                "collins3" => args.gamma,
                other => return Err(Error::Parameter(format!("scan covers collins and collins3, not '{other}'"))),
            };
            let alpha: ParamRange = args.alpha.parse()?;
            let beta: ParamRange = args.beta.parse()?;
            let points = scan_collins(args.n, alpha, beta, gamma, args.tol)?;
            payload(json!({ "n": args.n, "gamma": gamma, "alpha": alpha, "beta": beta, "points": points }))
        }
        Command::Diagram(args) => {
            let pi = parse_perm(&args.pi, args.a + args.b + 1)?;
            let d = wiring(&pi, args.a, args.b)?;
            match args.format {
                Format::Text => Ok(Output::Text(render_text(&d, &pi))),
                Format::Dot => Ok(Output::Text(render_dot(&d, &pi))),
                Format::Json => payload(json!({ "perm": pi.to_string(), "diagram": d })),
            }
        }
    }
}
