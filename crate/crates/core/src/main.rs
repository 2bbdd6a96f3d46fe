//! Command-line front end.  Every subcommand prints a deterministic report;
//! exit 0 = computed/verified, 1 = a verification failed, 2 = bad input.

use clap::{Parser, Subcommand};
use qpgraph::catalog::{basis_change_matrix, quotient_map, sphere_graph, splitting_map};
use qpgraph::graphfile::{parse_graph, serialize_graph};
use qpgraph::ideal::{enumerate_hereditary_saturated, quotient_graph, saturate, VertexSet};
use qpgraph::kk::{morita_compress, verify_kk_equivalence, MatrixNormalization};
use qpgraph::ktheory::k_groups;
use qpgraph::numerics::{
    check_rel_proj, cp_generator_check, relation_residuals, rep_pi, rep_psi, rep_rho, RelationSet,
    ResidualReport, Truncation,
};
use qpgraph::star::{compose_maps, is_identity, verify_star_hom};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

const SCHEMA: &str = "qpgraph-report/1";
const LABEL_BUDGET: u32 = 2;

#[derive(Parser)]
#[command(
    name = "qpgraph",
    about = "Graph-algebra toolkit: K-theory, ideal lattices, splitting maps, \
             formal KK round trips, and truncated-representation residuals."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// K-groups of the graph algebra described by a graph file
    Ktheory {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Lattice of hereditary saturated vertex sets of a graph file
    Ideals {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Quotient graph for the ideal generated by dropped vertices
    /// (the drop set is saturated first, with a warning if that changes it)
    Quotient {
        file: PathBuf,
        /// vertices generating the ideal, comma separated or repeated
        #[arg(long, value_delimiter = ',', required = true)]
        drop: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Check the level-n splitting and quotient maps are *-homomorphisms
    /// composing to the identity
    VerifySplitting {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check the level-n formal equivalence: both round trips rewrite to the
    /// identity, as does the Morita-compressed pair
    VerifyKk {
        #[arg(long)]
        n: u32,
        /// print the rewrite trace of every matrix entry
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Residuals of the defining relations on truncated representations,
    /// projection-formula cross-checks, and the K0 basis determinant
    Numerics {
        #[arg(long)]
        n: usize,
        /// deformation parameter, 0 < q < 1
        #[arg(long)]
        q: f64,
        /// mode cutoff N (box 0..=N per mode), N >= 4
        #[arg(long)]
        trunc: usize,
        /// winding cutoff M (box -M..=M), M >= 2
        #[arg(long)]
        winding: i64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
}

struct Report {
    command: &'static str,
    verdict: &'static str,
    human: String,
    /// suppress the trailing verdict line (output is a machine-readable document)
    bare: bool,
    payload: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = match &cli.cmd {
        Cmd::Ktheory { json, .. }
        | Cmd::Ideals { json, .. }
        | Cmd::Quotient { json, .. }
        | Cmd::VerifySplitting { json, .. }
        | Cmd::VerifyKk { json, .. }
        | Cmd::Numerics { json, .. } => *json,
    };
    let report = match run(cli.cmd) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if json {
        let mut doc = json!({
            "schema": SCHEMA,
            "command": report.command,
            "verdict": report.verdict,
        });
        if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, report.payload) {
            doc.extend(extra);
        }
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    } else {
        print!("{}", report.human);
        if !report.bare {
            println!("verdict: {}", report.verdict);
        }
    }
    if report.verdict == "failed" {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cmd: Cmd) -> Result<Report, String> {
    match cmd {
        Cmd::Ktheory { file, .. } => cmd_ktheory(&file),
        Cmd::Ideals { file, .. } => cmd_ideals(&file),
        Cmd::Quotient { file, drop, .. } => cmd_quotient(&file, &drop),
        Cmd::VerifySplitting { n, .. } => cmd_verify_splitting(n),
        Cmd::VerifyKk { n, trace, .. } => cmd_verify_kk(n, trace),
        Cmd::Numerics { n, q, trunc, winding, tol, .. } => {
            cmd_numerics(n, q, trunc, winding, tol)
        }
    }
}

fn load_graph(file: &PathBuf) -> Result<qpgraph::graph::Graph, String> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    parse_graph(&text).map_err(|e| format!("{}: {e}", file.display()))
}

fn cmd_ktheory(file: &PathBuf) -> Result<Report, String> {
    let g = load_graph(file)?;
    let (k0, k1) = k_groups(&g);
    let human = format!(
        "vertices: {}, edge classes: {}\nK0 = {k0}, K1 = {k1}\n",
        g.vertex_count(),
        g.class_count()
    );
    let group_json = |grp: &qpgraph::ktheory::AbelianGroup| {
        json!({
            "display": grp.to_string(),
            "free_rank": grp.free_rank,
            "torsion": grp.torsion.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        })
    };
    Ok(Report {
        command: "ktheory",
        verdict: "computed",
        human,
        bare: false,
        payload: json!({
            "inputs": { "file": file.display().to_string() },
            "k0": group_json(&k0),
            "k1": group_json(&k1),
        }),
    })
}

fn set_display(s: &VertexSet) -> String {
    let names: Vec<&str> = s.iter().map(|v| v.0.as_str()).collect();
    format!("{{{}}}", names.join(", "))
}

fn cmd_ideals(file: &PathBuf) -> Result<Report, String> {
    let g = load_graph(file)?;
    let lattice = enumerate_hereditary_saturated(&g).map_err(|e| e.to_string())?;
    let mut human = format!("hereditary saturated subsets: {}\n", lattice.len());
    for s in &lattice.subsets {
        let _ = writeln!(human, "  {}", set_display(s));
    }
    let _ = writeln!(
        human,
        "chain under inclusion: {}",
        if lattice.is_chain() { "yes" } else { "no" }
    );
    Ok(Report {
        command: "ideals",
        verdict: "computed",
        human,
        bare: false,
        payload: json!({
            "inputs": { "file": file.display().to_string() },
            "count": lattice.len(),
            "chain": lattice.is_chain(),
            "subsets": lattice
                .subsets
                .iter()
                .map(|s| s.iter().map(|v| v.0.clone()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
    })
}

fn cmd_quotient(file: &PathBuf, drop: &[String]) -> Result<Report, String> {
    let g = load_graph(file)?;
    let requested: VertexSet = drop.iter().map(qpgraph::graph::VertexId::new).collect();
    for v in &requested {
        if !g.contains_vertex(v) {
            return Err(format!("unknown vertex {} in --drop", v.0));
        }
    }
    let closed = saturate(&g, &requested).map_err(|e| e.to_string())?;
    if closed != requested {
        eprintln!(
            "warning: drop set {} is not hereditary and saturated; using its closure {}",
            set_display(&requested),
            set_display(&closed)
        );
    }
    let quotient = quotient_graph(&g, &closed).map_err(|e| e.to_string())?;
    let text = serialize_graph(&quotient);
    Ok(Report {
        command: "quotient",
        verdict: "computed",
        human: text.clone(),
        bare: true,
        payload: json!({
            "inputs": { "file": file.display().to_string(), "drop": drop },
            "saturated_drop": closed.iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
            "graph_file": text,
        }),
    })
}

fn cmd_verify_splitting(n: usize) -> Result<Report, String> {
    if n < 1 {
        return Err("level must be at least 1".to_string());
    }
    let sm = splitting_map(n).map_err(|e| e.to_string())?;
    let qm = quotient_map(n).map_err(|e| e.to_string())?;
    let s_rep = verify_star_hom(&sm, LABEL_BUDGET).map_err(|e| e.to_string())?;
    let q_rep = verify_star_hom(&qm, LABEL_BUDGET).map_err(|e| e.to_string())?;
    let composed = compose_maps(&qm, &sm).map_err(|e| e.to_string())?;
    let round_trip = is_identity(&composed, LABEL_BUDGET).map_err(|e| e.to_string())?;
    let ok = s_rep.passed() && q_rep.passed() && round_trip;
    let mut human = String::new();
    for (name, rep) in [(format!("splitting map into level {n}"), &s_rep),
                        (format!("quotient map onto level {}", n - 1), &q_rep)] {
        if rep.passed() {
            let _ = writeln!(human, "{name}: *-homomorphism ({} checks)", rep.checked);
        } else {
            let _ = writeln!(human, "{name}: FAILED ({} violations)", rep.violations.len());
            for v in &rep.violations {
                let _ = writeln!(human, "  {v}");
            }
        }
    }
    let _ = writeln!(
        human,
        "quotient o splitting on level {}: {}",
        n - 1,
        if round_trip { "identity" } else { "NOT the identity" }
    );
    Ok(Report {
        command: "verify-splitting",
        verdict: if ok { "verified" } else { "failed" },
        human,
        bare: false,
        payload: json!({
            "inputs": { "n": n },
            "splitting_checks": s_rep.checked,
            "splitting_violations": s_rep.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "quotient_checks": q_rep.checked,
            "quotient_violations": q_rep.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "round_trip_identity": round_trip,
        }),
    })
}

fn trace_lines(human: &mut String, title: &str, norm: &MatrixNormalization) {
    let _ = writeln!(human, "trace: {title}");
    for i in 0..norm.matrix.target().len() {
        for j in 0..norm.matrix.source().len() {
            let steps = norm
                .entry_steps
                .get(&(i, j))
                .map(|s| s.iter().map(|st| st.to_string()).collect::<Vec<_>>().join(", "))
                .unwrap_or_default();
            let entry = norm.matrix.entry(i, j);
            if steps.is_empty() {
                let _ = writeln!(human, "  ({i},{j}) {entry}");
            } else {
                let _ = writeln!(human, "  ({i},{j}) {entry}   via {steps}");
            }
        }
    }
}

fn norm_json(norm: &MatrixNormalization) -> Value {
    let entries: Vec<Value> = (0..norm.matrix.target().len())
        .flat_map(|i| {
            (0..norm.matrix.source().len()).map(move |j| (i, j))
        })
        .map(|(i, j)| {
            json!({
                "row": i,
                "col": j,
                "entry": norm.matrix.entry(i, j).to_string(),
                "steps": norm
                    .entry_steps
                    .get(&(i, j))
                    .map(|s| s.iter().map(|st| st.to_string()).collect::<Vec<_>>())
                    .unwrap_or_default(),
            })
        })
        .collect();
    json!({ "identity": norm.matrix.is_identity(), "entries": entries })
}

fn cmd_verify_kk(n: u32, trace: bool) -> Result<Report, String> {
    if n < 1 {
        return Err("level must be at least 1".to_string());
    }
    let kk = verify_kk_equivalence(n).map_err(|e| e.to_string())?;
    let morita = morita_compress(n).map_err(|e| e.to_string())?;
    let ok = kk.verified && morita.verified;
    let mut human = String::new();
    let sum_title = format!("round trip on {}", kk.round_trip_on_sum.matrix.source());
    let cp_title = format!("round trip on {}", kk.round_trip_on_cp.matrix.source());
    for (title, norm) in [(&sum_title, &kk.round_trip_on_sum), (&cp_title, &kk.round_trip_on_cp)] {
        let _ = writeln!(
            human,
            "{title}: {}",
            if norm.matrix.is_identity() { "identity" } else { "NOT the identity" }
        );
    }
    for (title, norm) in [
        (format!("Morita round trip on {}", morita.round_trip_on_scalars.matrix.source()),
         &morita.round_trip_on_scalars),
        (format!("Morita round trip on {}", morita.round_trip_on_cp.matrix.source()),
         &morita.round_trip_on_cp),
    ] {
        let _ = writeln!(
            human,
            "{title}: {}",
            if norm.matrix.is_identity() { "identity" } else { "NOT the identity" }
        );
    }
    if trace {
        trace_lines(&mut human, &sum_title, &kk.round_trip_on_sum);
        trace_lines(&mut human, &cp_title, &kk.round_trip_on_cp);
        trace_lines(&mut human, "Morita round trip (scalars)", &morita.round_trip_on_scalars);
        trace_lines(&mut human, "Morita round trip (total)", &morita.round_trip_on_cp);
    }
    Ok(Report {
        command: "verify-kk",
        verdict: if ok { "verified" } else { "failed" },
        human,
        bare: false,
        payload: json!({
            "inputs": { "n": n },
            "round_trip_on_sum": norm_json(&kk.round_trip_on_sum),
            "round_trip_on_cp": norm_json(&kk.round_trip_on_cp),
            "morita_on_scalars": norm_json(&morita.round_trip_on_scalars),
            "morita_on_cp": norm_json(&morita.round_trip_on_cp),
        }),
    })
}

fn residual_json(rep: &ResidualReport) -> Value {
    json!({
        "margin": rep.margin,
        "max": rep.max(),
        "relations": rep
            .entries
            .iter()
            .map(|(name, r)| json!({ "relation": name, "residual": r }))
            .collect::<Vec<_>>(),
    })
}

fn cmd_numerics(n: usize, q: f64, trunc: usize, winding: i64, tol: f64) -> Result<Report, String> {
    if n < 1 {
        return Err("need n >= 1".to_string());
    }
    if !(q.is_finite() && 0.0 < q && q < 1.0) {
        return Err(format!("need 0 < q < 1, got {q}"));
    }
    if trunc < 4 {
        return Err(format!("need mode cutoff >= 4, got {trunc}"));
    }
    if winding < 2 {
        return Err(format!("need winding cutoff >= 2, got {winding}"));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(format!("tolerance must be a finite non-negative number, got {tol}"));
    }
    let plain = Truncation::new(n, trunc);
    let wound = Truncation::with_winding(n, trunc, winding);

    let psi = rep_psi(n, q, plain).map_err(|e| e.to_string())?;
    let psi_rep =
        relation_residuals(&psi, &RelationSet::Sphere { n }, 2).map_err(|e| e.to_string())?;
    let pi = rep_pi(n, q, wound).map_err(|e| e.to_string())?;
    let pi_rep =
        relation_residuals(&pi, &RelationSet::Sphere { n }, 2).map_err(|e| e.to_string())?;
    let rho = rep_rho(n, wound).map_err(|e| e.to_string())?;
    let ck_rep = relation_residuals(&rho, &RelationSet::CuntzKrieger { graph: sphere_graph(n) }, 2)
        .map_err(|e| e.to_string())?;
    let cp_rep = cp_generator_check(n, q, plain, true).map_err(|e| e.to_string())?;
    let proj_rep = check_rel_proj(n, q, wound).map_err(|e| e.to_string())?;
    let det = basis_change_matrix(n).map_err(|e| e.to_string())?.det();
    let det_ok = det == 1.into() || det == (-1).into();

    let blocks = [
        ("sphere relations (sequence rep)", &psi_rep),
        ("sphere relations (winding rep)", &pi_rep),
        ("graph relations (shift rep)", &ck_rep),
        ("projective generator relations", &cp_rep),
        ("projection identities", &proj_rep),
    ];
    let residual_ok = blocks.iter().all(|(_, rep)| rep.passes(tol));
    let ok = residual_ok && det_ok;

    let mut human = format!(
        "truncation: n={n}, modes <= {trunc}, winding <= {winding} (dim {}), tol {tol:.1e}\n",
        wound.dim()
    );
    for (name, rep) in &blocks {
        let mark = if rep.passes(tol) { "" } else { "  EXCEEDS TOLERANCE" };
        match rep.worst() {
            Some((worst, r)) => {
                let _ = writeln!(
                    human,
                    "{name}: max residual {r:.2e} over {} relations (worst: {worst}){mark}",
                    rep.entries.len()
                );
            }
            None => {
                let _ = writeln!(human, "{name}: no relations measured{mark}");
            }
        }
    }
    for (name, r) in &proj_rep.entries {
        let _ = writeln!(human, "  {name}: {r:.2e}");
    }
    let _ = writeln!(
        human,
        "K0 basis determinant: {det}{}",
        if det_ok { "" } else { "  NOT a unit" }
    );

    Ok(Report {
        command: "numerics",
        verdict: if ok { "verified" } else { "failed" },
        human,
        bare: false,
        payload: json!({
            "inputs": { "n": n, "q": q, "trunc": trunc, "winding": winding, "tol": tol },
            "dim": wound.dim(),
            "sphere_sequence_rep": residual_json(&psi_rep),
            "sphere_winding_rep": residual_json(&pi_rep),
            "graph_shift_rep": residual_json(&ck_rep),
            "projective_generators": residual_json(&cp_rep),
            "projection_identities": residual_json(&proj_rep),
            "basis_determinant": det.to_string(),
        }),
    })
}
