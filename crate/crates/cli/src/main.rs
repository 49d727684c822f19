//! Command-line front end: every pipeline stage as a subcommand, with
//! `--json` for machine-readable output. Exit code 0 means the question
//! was decided (either way), 2 means a resource bound ran out before an
//! answer, 1 means the invocation or its inputs were bad.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use episolve::colgen::{decide_unimodular_point_1d, CgInstance, UnimodularAnswer};
use episolve::decide::{
    decide_epi_product, decide_epi_virtually_cyclic, Answer, Verdict, VzConfig,
};
use episolve::finite::{enumerate_epis, FiniteGroup};
use episolve::linalg::{
    max_free_quotient, smith_normal_form, torsion_coefficients, vec_to_strings, IntMatrix,
    ModulePresentation,
};
use episolve::rewriting::kernel_presentation;
use episolve::vab::{vab_structure, StructureSearch, WordProblemConfig};
use episolve::words::Presentation;

#[derive(Parser)]
#[command(
    name = "episolve",
    version,
    about = "Epimorphism decision procedures for finitely presented groups"
)]
struct Cli {
    /// Emit machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a presentation file and echo what was read.
    Parse { pres: PathBuf },
    /// Rewrite a presentation into symmetric form.
    Symmetrize { pres: PathBuf },
    /// Invariant factors and free rank of the abelianization.
    Abelianize { pres: PathBuf },
    /// Enumerate epimorphisms onto a finite group.
    Epis {
        pres: PathBuf,
        /// Cayley-table JSON file for the target group.
        #[arg(long)]
        finite: PathBuf,
    },
    /// Presentation of the kernel of one enumerated epimorphism.
    Kernel {
        pres: PathBuf,
        #[arg(long)]
        finite: PathBuf,
        /// Index into the epimorphism enumeration.
        #[arg(long)]
        epi: usize,
    },
    /// Smith normal form of an integer matrix.
    Snf { matrix: PathBuf },
    /// Does an affine lattice contain a point whose entries have gcd 1?
    Colgen1d { instance: PathBuf },
    /// Recover translation-by-finite structure from a presentation.
    VabStructure {
        pres: PathBuf,
        /// Largest finite-quotient order to try.
        #[arg(long, default_value_t = 24)]
        max_order: usize,
        /// Word-problem bounds as `relator_products,quotient_order`.
        #[arg(long, value_parser = parse_bounds)]
        wp_bounds: Option<(usize, usize)>,
    },
    /// Decide an epimorphism onto the product of Z^d with a finite group.
    DecideProd {
        pres: PathBuf,
        /// Rank of the free-abelian factor.
        #[arg(long)]
        d: usize,
        #[arg(long)]
        finite: PathBuf,
    },
    /// Decide an epimorphism onto a presented target that is
    /// infinite-cyclic-by-finite.
    DecideVz {
        pres: PathBuf,
        /// Presentation file for the target group.
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 24)]
        max_order: usize,
        /// Word-problem bounds as `relator_products,quotient_order`.
        #[arg(long, value_parser = parse_bounds)]
        wp_bounds: Option<(usize, usize)>,
    },
}

fn parse_bounds(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| "expected two comma-separated integers".to_string())?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad bound {t:?}: {e}"))
    };
    Ok((parse(a)?, parse(b)?))
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn load_presentation(path: &Path) -> Result<Presentation> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    Presentation::parse(&text)
        .with_context(|| format!("cannot parse presentation {}", path.display()))
}

fn load_group(path: &Path) -> Result<FiniteGroup> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("cannot parse group table {}", path.display()))
}

fn load_matrix(path: &Path) -> Result<IntMatrix> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("cannot parse matrix {}", path.display()))
}

fn load_instance(path: &Path) -> Result<CgInstance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("cannot parse lattice instance {}", path.display()))
}

fn pres_json(p: &Presentation) -> serde_json::Value {
    json!({
        "generators": p.generators().iter().map(|g| g.as_str()).collect::<Vec<_>>(),
        "relators": p.relators().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "symmetric": p.is_symmetric(),
    })
}

fn image_line(p: &Presentation, g: &FiniteGroup, images: &[usize]) -> String {
    p.generators()
        .iter()
        .zip(images)
        .map(|(s, &x)| format!("{} -> {}", s.as_str(), g.labels()[x]))
        .collect::<Vec<_>>()
        .join(", ")
}

fn matrix_line(m: &IntMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| format!("[{}]", vec_to_strings(&m.row(i)).join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn wp_config(bounds: Option<(usize, usize)>) -> WordProblemConfig {
    match bounds {
        Some((products, order)) => WordProblemConfig {
            max_relator_products: products,
            max_quotient_order: order,
        },
        None => WordProblemConfig::default(),
    }
}

fn print_answer(answer: &Answer, json_mode: bool) -> i32 {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(answer).unwrap());
    } else {
        let verdict = match answer.verdict {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Inconclusive => "inconclusive",
        };
        println!("verdict: {verdict}");
        if let Some(witness) = &answer.witness {
            println!("witness:");
            for (gen, t) in witness {
                let mut line = format!(
                    "  {gen} -> (translation [{}], finite part {})",
                    t.vec.join(", "),
                    t.label
                );
                if let Some(w) = &t.word {
                    line.push_str(&format!(" = {w}"));
                }
                println!("{line}");
            }
        }
        for line in &answer.trace {
            eprintln!("trace: {line}");
        }
    }
    match answer.verdict {
        Verdict::Yes | Verdict::No => 0,
        Verdict::Inconclusive => 2,
    }
}

fn run(cli: Cli) -> Result<i32> {
    let json_mode = cli.json;
    match cli.cmd {
        Cmd::Parse { pres } => {
            let p = load_presentation(&pres)?;
            if json_mode {
                println!("{}", serde_json::to_string_pretty(&pres_json(&p)).unwrap());
            } else {
                print!("{}", p.to_text());
                println!("symmetric: {}", p.is_symmetric());
            }
            Ok(0)
        }
        Cmd::Symmetrize { pres } => {
            let p = load_presentation(&pres)?.symmetrize();
            if json_mode {
                println!("{}", serde_json::to_string_pretty(&pres_json(&p)).unwrap());
            } else {
                print!("{}", p.to_text());
            }
            Ok(0)
        }
        Cmd::Abelianize { pres } => {
            let p = load_presentation(&pres)?;
            let module = ModulePresentation::new(p.abelianization_matrix());
            let (free_rank, _) = max_free_quotient(&module);
            let snf = smith_normal_form(&p.abelianization_matrix());
            let factors = vec_to_strings(&snf.invariant_factors);
            let torsion: Vec<String> = torsion_coefficients(&module)
                .iter()
                .map(|t| t.to_string())
                .collect();
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "invariant_factors": factors,
                        "free_rank": free_rank,
                        "torsion": torsion,
                    }))
                    .unwrap()
                );
            } else {
                println!("invariant factors: {}", factors.join(", "));
                println!("free rank: {free_rank}");
                println!("torsion: {}", if torsion.is_empty() {
                    "none".to_string()
                } else {
                    torsion.join(", ")
                });
            }
            Ok(0)
        }
        Cmd::Epis { pres, finite } => {
            let p = load_presentation(&pres)?;
            let g = load_group(&finite)?;
            let epis = enumerate_epis(&p, &g);
            if json_mode {
                let list: Vec<_> = epis
                    .iter()
                    .enumerate()
                    .map(|(i, e)| json!({"index": i, "images": e.images}))
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "count": epis.len(),
                        "epis": list,
                    }))
                    .unwrap()
                );
            } else {
                println!("{} epimorphisms", epis.len());
                for (i, e) in epis.iter().enumerate() {
                    println!("{i}: {}", image_line(&p, &g, &e.images));
                }
            }
            Ok(0)
        }
        Cmd::Kernel { pres, finite, epi } => {
            let p = load_presentation(&pres)?;
            let g = load_group(&finite)?;
            let epis = enumerate_epis(&p, &g);
            if epi >= epis.len() {
                bail!(
                    "epimorphism index {epi} out of range: {} enumerated",
                    epis.len()
                );
            }
            let kp = kernel_presentation(&p, &g, &epis[epi])
                .expect("enumerated epimorphisms are surjective");
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "epi": {"index": epi, "images": epis[epi].images},
                        "raw": pres_json(&kp.raw),
                        "symmetric": pres_json(&kp.symmetric),
                        "inclusion": kp.inclusion_json(),
                    }))
                    .unwrap()
                );
            } else {
                println!("epimorphism {epi}: {}", image_line(&p, &g, &epis[epi].images));
                println!("kernel generators:");
                for (sym, word) in &kp.inclusion {
                    println!("  {} = {}", sym.as_str(), word);
                }
                println!("kernel presentation:");
                print!("{}", kp.raw.to_text());
            }
            Ok(0)
        }
        Cmd::Snf { matrix } => {
            let a = load_matrix(&matrix)?;
            let snf = smith_normal_form(&a);
            if json_mode {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "d": snf.d,
                        "u": snf.u,
                        "v": snf.v,
                        "u_inv": snf.u_inv,
                        "v_inv": snf.v_inv,
                        "invariant_factors": vec_to_strings(&snf.invariant_factors),
                    }))
                    .unwrap()
                );
            } else {
                println!(
                    "invariant factors: {}",
                    vec_to_strings(&snf.invariant_factors).join(", ")
                );
                println!("rank: {}", snf.rank());
            }
            Ok(0)
        }
        Cmd::Colgen1d { instance } => {
            let inst = load_instance(&instance)?;
            match decide_unimodular_point_1d(&inst) {
                UnimodularAnswer::Yes { witness } => {
                    if json_mode {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({
                                "exists": true,
                                "witness": vec_to_strings(&witness),
                            }))
                            .unwrap()
                        );
                    } else {
                        println!("yes");
                        println!("witness: {}", vec_to_strings(&witness).join(", "));
                    }
                }
                UnimodularAnswer::No => {
                    if json_mode {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(
                                &json!({"exists": false, "witness": null})
                            )
                            .unwrap()
                        );
                    } else {
                        println!("no");
                    }
                }
            }
            Ok(0)
        }
        Cmd::VabStructure {
            pres,
            max_order,
            wp_bounds,
        } => {
            let p = load_presentation(&pres)?;
            match vab_structure(&p, max_order, &wp_config(wp_bounds)) {
                StructureSearch::Found(s) => {
                    if json_mode {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({
                                "found": true,
                                "data": s.data,
                                "hom": {"images": s.hom.images},
                                "basis_words": s.basis_words
                                    .iter()
                                    .map(|w| w.to_string())
                                    .collect::<Vec<_>>(),
                            }))
                            .unwrap()
                        );
                    } else {
                        let f = s.data.group();
                        println!("structure found");
                        println!("finite quotient order: {}", f.order());
                        println!("translation rank: {}", s.data.dim());
                        println!(
                            "epimorphism: {}",
                            image_line(&p, f, &s.hom.images)
                        );
                        for (i, w) in s.basis_words.iter().enumerate() {
                            println!("basis[{i}] = {w}");
                        }
                        for x in 0..f.order() {
                            println!(
                                "action[{}] = {}",
                                f.labels()[x],
                                matrix_line(s.data.action(x))
                            );
                        }
                        for x in 0..f.order() {
                            for y in 0..f.order() {
                                let c = vec_to_strings(s.data.cocycle(x, y));
                                if c.iter().any(|e| e != "0") {
                                    println!(
                                        "cocycle[{}][{}] = ({})",
                                        f.labels()[x],
                                        f.labels()[y],
                                        c.join(", ")
                                    );
                                }
                            }
                        }
                    }
                    Ok(0)
                }
                StructureSearch::NotFound { diagnostics } => {
                    if json_mode {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({
                                "found": false,
                                "diagnostics": diagnostics,
                            }))
                            .unwrap()
                        );
                    } else {
                        println!("no structure found within the given bounds");
                        for d in &diagnostics {
                            eprintln!("diagnostic: {d}");
                        }
                    }
                    Ok(2)
                }
            }
        }
        Cmd::DecideProd { pres, d, finite } => {
            let p = load_presentation(&pres)?;
            let g = load_group(&finite)?;
            let answer = decide_epi_product(&p, d, &g);
            Ok(print_answer(&answer, json_mode))
        }
        Cmd::DecideVz {
            pres,
            target,
            max_order,
            wp_bounds,
        } => {
            let p = load_presentation(&pres)?;
            let q = load_presentation(&target)?;
            let config = VzConfig {
                max_order,
                word_problem: wp_config(wp_bounds),
            };
            let answer = decide_epi_virtually_cyclic(&p, &q, &config)?;
            Ok(print_answer(&answer, json_mode))
        }
    }
}
