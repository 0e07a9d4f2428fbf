//! `poset-ramsey`: validate structures, check partition arrows, build towers
//! and finish them into poset witnesses.
//!
//! Exit codes: 0 success or HOLDS, 1 FAILS or invalid input, 2 resource limit,
//! 3 internal invariant violation.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use poset_ramsey::arrow::ArrowError;
use poset_ramsey::document::{
    coloring_to_toml, digest, hom_to_toml, parse_hom, parse_structure, structure_to_toml, to_dot, DocumentError,
    Manifest, ManifestStage, ManifestStep, Structure,
};
use poset_ramsey::*;

#[derive(Parser)]
#[command(name = "poset-ramsey", version, about = "Ramsey witnesses for ordered posets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct ArrowArgs {
    /// Search nodes before giving up.
    #[arg(long, env = "POSET_RAMSEY_MAX_NODES", default_value_t = 50_000_000)]
    max_nodes: u64,
    /// Copies enumerated before giving up.
    #[arg(long, env = "POSET_RAMSEY_MAX_COPIES", default_value_t = 200_000)]
    max_copies: usize,
    /// Random colourings tried before the exact search.
    #[arg(long, default_value_t = 32)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock limit for the exact search.
    #[arg(long, env = "POSET_RAMSEY_TIMEOUT_SECS")]
    timeout_secs: Option<u64>,
}

impl ArrowArgs {
    fn limits(&self) -> ArrowLimits {
        ArrowLimits {
            max_nodes: self.max_nodes,
            max_copies: self.max_copies,
            samples: self.samples,
            seed: self.seed,
            max_duration: self.timeout_secs.map(Duration::from_secs),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Search,
    File,
    Assume,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Chain,
    Antichain,
}

#[derive(Subcommand)]
enum Command {
    /// Check a structure file and report its invariants.
    Validate { path: PathBuf },
    /// Decide TARGET -> (Q)^P_r.
    Arrow {
        target: PathBuf,
        q: PathBuf,
        p: PathBuf,
        #[arg(short, long, default_value_t = 2)]
        r: usize,
        /// Where to write the colouring when the arrow fails.
        #[arg(long, default_value = "counterexample.toml")]
        counterexample: PathBuf,
        #[command(flatten)]
        limits: ArrowArgs,
    },
    /// Build the tower C_2, ..., C_ell for posets A and B.
    Tower {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 3)]
        ell_max: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "search")]
        oracle: OracleArg,
        /// Witness for C_2 in file or assume mode.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Run the construction even when a stage already has the next RN property.
        #[arg(long)]
        force_construction: bool,
        /// Largest candidate tried by the witness search.
        #[arg(long, env = "POSET_RAMSEY_MAX_WITNESS", default_value_t = 12)]
        max_witness: usize,
        /// Candidates tried by the witness search.
        #[arg(long, env = "POSET_RAMSEY_MAX_CANDIDATES", default_value_t = 2_000_000)]
        max_candidates: u64,
        /// Largest picture built by one construction step.
        #[arg(long, env = "POSET_RAMSEY_MAX_PICTURE", default_value_t = 200_000)]
        max_picture: usize,
        #[command(flatten)]
        limits: ArrowArgs,
    },
    /// Turn a tower directory into a poset witness.
    Finish {
        dir: PathBuf,
        /// Output file; defaults to poset.toml inside the directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a structure file as Graphviz DOT.
    ExportDot {
        path: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print a chain or antichain document.
    Generate {
        #[arg(value_enum)]
        shape: Shape,
        k: usize,
        /// Emit the complete RN graph instead of the poset.
        #[arg(long)]
        rn: bool,
    },
}

/// An error with a fixed exit code.
#[derive(Debug)]
struct Exit {
    code: u8,
    message: String,
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

fn exit(code: u8, message: impl Into<String>) -> anyhow::Error {
    Exit {
        code,
        message: message.into(),
    }
    .into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Exit>() {
            return e.code;
        }
        if let Some(e) = cause.downcast_ref::<ConstructionError>() {
            return if e.is_internal() {
                3
            } else if e.is_resource() {
                2
            } else {
                1
            };
        }
        if let Some(ArrowError::ResourceExceeded(_)) = cause.downcast_ref::<ArrowError>() {
            return 2;
        }
        if let Some(arrow::OracleError::NotFoundWithinBounds { .. }) = cause.downcast_ref::<arrow::OracleError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { path } => validate(&path),
        Command::Arrow {
            target,
            q,
            p,
            r,
            counterexample,
            limits,
        } => arrow_cmd(&target, &q, &p, r, &counterexample, &limits.limits()),
        Command::Tower {
            a,
            b,
            ell_max,
            out,
            oracle,
            witness,
            force_construction,
            max_witness,
            max_candidates,
            max_picture,
            limits,
        } => {
            let oracle_limits = OracleLimits {
                max_vertices: max_witness,
                max_candidates,
                arrow: limits.limits(),
            };
            let base = match oracle {
                OracleArg::Search => BaseOracle::search(oracle_limits),
                OracleArg::File | OracleArg::Assume => {
                    let path = witness.context("--witness is required for file and assume modes")?;
                    let w = read_structure(&path)?.value.to_rn();
                    if matches!(oracle, OracleArg::File) {
                        BaseOracle::from_file(w, oracle_limits)
                    } else {
                        BaseOracle::assume(w, oracle_limits)
                    }
                }
            };
            let options = TowerOptions {
                ell_max,
                carry_forward: !force_construction,
                limits: ConstructionLimits {
                    max_vertices: max_picture,
                    max_copies: limits.max_copies,
                    ..ConstructionLimits::default()
                },
            };
            tower_cmd(&a, &b, &out, &base, &options)
        }
        Command::Finish { dir, out } => finish_cmd(&dir, out.as_deref()),
        Command::ExportDot { path, out } => {
            let doc = read_structure(&path)?;
            let name = doc.name.clone().unwrap_or_else(|| {
                path.file_stem()
                    .map_or("structure".into(), |s| s.to_string_lossy().into())
            });
            let dot = to_dot(&doc.value, &name);
            match out {
                Some(out) => write(&out, &dot)?,
                None => print!("{dot}"),
            }
            Ok(0)
        }
        Command::Generate { shape, k, rn } => {
            let poset = match shape {
                Shape::Chain => OrderedPoset::chain(k)?,
                Shape::Antichain => OrderedPoset::antichain(k)?,
            };
            let s = if rn {
                Structure::Rn(poset.to_complete_rn())
            } else {
                Structure::Poset(poset)
            };
            print!("{}", structure_to_toml(&s, None));
            Ok(0)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_structure(path: &Path) -> Result<document::Named<Structure>> {
    let text = read(path)?;
    parse_structure(&text).map_err(|e| exit(1, format!("{}: {e}", path.display())))
}

fn validate(path: &Path) -> Result<u8> {
    let text = read(path)?;
    let doc = match parse_structure(&text) {
        Ok(doc) => doc,
        Err(e) => {
            println!("INVALID {}: {e}", path.display());
            return Ok(1);
        }
    };
    let g = doc.value.to_rn();
    let good = is_good(&g);
    let ell = ell_rn_max(&g).map_or("none".to_string(), |m| m.to_string());
    let mut line = format!(
        "OK {} n={} |R|={} |N|={} good={} ell_rn_max={}",
        doc.value.kind().as_str(),
        g.vertex_count(),
        g.r().len(),
        g.n().len(),
        good,
        ell
    );
    if let Some(parts) = doc.value.parts() {
        line.push_str(&format!(" parts={}", parts.len()));
    }
    println!("{line}");
    if let Some(q) = find_bad_quasicycle(&g, None) {
        let vs: Vec<String> = q.vertices().iter().map(ToString::to_string).collect();
        println!("shortest bad quasicycle: {}", vs.join(" "));
    }
    Ok(0)
}

fn arrow_cmd(target: &Path, q: &Path, p: &Path, r: usize, out: &Path, limits: &ArrowLimits) -> Result<u8> {
    let target = read_structure(target)?.value.to_rn();
    let q = read_structure(q)?.value.to_rn();
    let p = read_structure(p)?.value.to_rn();
    match check_arrow(&target, &q, &p, r, limits)? {
        ArrowVerdict::Holds => {
            println!("HOLDS");
            Ok(0)
        }
        ArrowVerdict::Fails(coloring) => {
            if find_monochromatic(&target, &coloring, &q, &p)?.is_some() {
                bail!(exit(3, "counterexample colouring has a monochromatic copy"));
            }
            write(out, &coloring_to_toml(&coloring, None))?;
            println!(
                "FAILS counterexample with {} entries written to {}",
                coloring.len(),
                out.display()
            );
            Ok(1)
        }
    }
}

fn require_poset(s: &Structure, what: &str) -> Result<RnGraph> {
    let g = s.to_rn();
    if !g.is_complete() || !is_good(&g) {
        bail!(exit(1, format!("{what} must be a poset or a complete good RN graph")));
    }
    Ok(g)
}

fn tower_cmd(a_path: &Path, b_path: &Path, out: &Path, oracle: &BaseOracle, options: &TowerOptions) -> Result<u8> {
    let a_doc = read_structure(a_path)?;
    let b_doc = read_structure(b_path)?;
    let a = require_poset(&a_doc.value, "A")?;
    let b = require_poset(&b_doc.value, "B")?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let a_text = structure_to_toml(&a_doc.value, a_doc.name.as_deref());
    let b_text = structure_to_toml(&b_doc.value, b_doc.name.as_deref());
    write(&out.join("a.toml"), &a_text)?;
    write(&out.join("b.toml"), &b_text)?;

    let tower = build_tower(&a, &b, oracle, options, |ell, r| {
        eprintln!(
            "stage {ell} step {}: {} glued copies, picture has {} vertices",
            r.step, r.glued_copies, r.picture_vertices
        );
    })?;

    let mut certification = Certification::Certified;
    let mut stages = Vec::new();
    for stage in &tower.stages {
        let file = format!("stage-{}.toml", stage.ell);
        let text = structure_to_toml(&Structure::Rn(stage.graph.clone()), Some(&format!("C{}", stage.ell)));
        write(&out.join(&file), &text)?;
        let (hom_file, hom_digest) = match &stage.down {
            Some(h) => {
                let name = format!("hom-{}.toml", stage.ell);
                let text = hom_to_toml(h, Some(&format!("C{} -> C{}", stage.ell, stage.ell - 1)));
                write(&out.join(&name), &text)?;
                (Some(name), Some(digest(text.as_bytes())))
            }
            None => (None, None),
        };
        certification = certification.and(stage.certification.clone());
        stages.push(ManifestStage {
            ell: stage.ell,
            file,
            digest: digest(text.as_bytes()),
            vertices: stage.graph.vertex_count(),
            r_edges: stage.graph.r().len(),
            n_edges: stage.graph.n().len(),
            certified: stage.certification.is_certified(),
            condition: condition(&stage.certification),
            carried_forward: stage.carried_forward,
            hom_file,
            hom_digest,
            steps: stage
                .steps
                .iter()
                .map(|s| ManifestStep {
                    step: s.step,
                    a_copy: s.a_copy.clone(),
                    subsystem_vertices: s.subsystem_vertices,
                    witness_vertices: s.witness_vertices,
                    product_vertices: s.product_vertices,
                    glued_copies: s.glued_copies,
                    picture_vertices: s.picture_vertices,
                    certified: s.certification.is_certified(),
                    ell_rn: s.ell_rn,
                })
                .collect(),
        });
        let status = match &stage.certification {
            Certification::Certified => "certified".to_string(),
            Certification::Conditional(why) => format!("conditionally correct ({why})"),
        };
        let reuse = if stage.carried_forward { ", carried forward" } else { "" };
        println!(
            "C{}: {} vertices, |R|={} |N|={}, {}-RN, {status}{reuse}",
            stage.ell,
            stage.graph.vertex_count(),
            stage.graph.r().len(),
            stage.graph.n().len(),
            stage.ell
        );
    }
    let manifest = Manifest {
        a_file: "a.toml".into(),
        a_digest: digest(a_text.as_bytes()),
        b_file: "b.toml".into(),
        b_digest: digest(b_text.as_bytes()),
        oracle: oracle.mode.to_string(),
        ell_max: options.ell_max,
        lambda: tower.lambda(),
        carry_forward: options.carry_forward,
        certified: certification.is_certified(),
        condition: condition(&certification),
        truncated: tower.truncated.clone(),
        stages,
    };
    write(&out.join("manifest.toml"), &manifest.to_toml())?;
    if let Some(why) = &tower.truncated {
        println!("truncated: {why}");
        return Ok(2);
    }
    Ok(0)
}

fn condition(c: &Certification) -> Option<String> {
    match c {
        Certification::Certified => None,
        Certification::Conditional(why) => Some(why.clone()),
    }
}

fn checked_read(dir: &Path, file: &str, expected: &str) -> Result<String> {
    let text = read(&dir.join(file))?;
    if digest(text.as_bytes()) != expected {
        bail!(exit(1, format!("{file}: digest does not match the manifest")));
    }
    Ok(text)
}

fn parse_rn(text: &str, file: &str) -> Result<RnGraph> {
    let doc = parse_structure(text).map_err(|e: DocumentError| exit(1, format!("{file}: {e}")))?;
    Ok(doc.value.to_rn())
}

fn finish_cmd(dir: &Path, out: Option<&Path>) -> Result<u8> {
    let manifest =
        Manifest::parse(&read(&dir.join("manifest.toml"))?).map_err(|e| exit(1, format!("manifest: {e}")))?;
    let b_text = checked_read(dir, &manifest.b_file, &manifest.b_digest)?;
    let b = parse_rn(&b_text, &manifest.b_file)?;
    let mut stages: Vec<TowerStage> = Vec::new();
    for s in &manifest.stages {
        let graph = parse_rn(&checked_read(dir, &s.file, &s.digest)?, &s.file)?;
        let down = match (&s.hom_file, &s.hom_digest) {
            (Some(file), Some(d)) => {
                let h = parse_hom(&checked_read(dir, file, d)?).map_err(|e| exit(1, format!("{file}: {e}")))?;
                Some(h.value)
            }
            _ => None,
        };
        let to_first = match (&down, stages.last()) {
            (Some(h), Some(prev)) => h.then(&prev.to_first),
            _ => Homomorphism::identity(graph.vertex_count()),
        };
        if let (Some(h), Some(prev)) = (&down, stages.last()) {
            if !h.is_homomorphism(&graph, &prev.graph) {
                bail!(exit(3, format!("hom-{}: not a homomorphism", s.ell)));
            }
        }
        stages.push(TowerStage {
            ell: s.ell,
            graph,
            down,
            to_first,
            certification: match &s.condition {
                None => Certification::Certified,
                Some(why) => Certification::Conditional(why.clone()),
            },
            carried_forward: s.carried_forward,
            steps: Vec::new(),
        });
    }
    if stages.is_empty() {
        bail!(exit(1, "manifest lists no stages"));
    }
    let tower = Tower {
        stages,
        truncated: manifest.truncated.clone(),
    };
    let done = finish(&tower, &b)?;
    let out = out.map_or_else(|| dir.join("poset.toml"), Path::to_path_buf);
    write(
        &out,
        &structure_to_toml(&Structure::Poset(done.poset.clone()), Some("C")),
    )?;
    println!(
        "poset with {} vertices from C{} written to {}",
        done.poset.vertex_count(),
        done.ell,
        out.display()
    );
    if done.intact == done.copies_of_b {
        println!("copies of B intact: all ({})", done.copies_of_b);
    } else {
        println!("copies of B intact: {} of {}", done.intact, done.copies_of_b);
    }
    if let Certification::Conditional(why) = &done.certification {
        println!("conditionally correct: {why}");
    }
    Ok(0)
}
