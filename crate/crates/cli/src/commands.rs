use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use netroles::dynamic::{
    role_time_series, series_transition, transfer_memberships, TransferConfig,
};
use netroles::equivalence::{
    automorphic_orbits, regular_refinement, structural_classes, write_partition_json,
    RefinementMode, StructuralVariant,
};
use netroles::features::{read_descriptors_json, read_matrix_csv, FeatureMatrix, PrimitiveKind};
use netroles::nnls::NnlsMethod;
use netroles::roles::{
    fit_rank, hard_assignment, rank_search, soft_memberships, NmfConfig, RoleModel, SelectConfig,
};
use netroles::{learn_features, load_edge_list, Graph, LearnConfig, NodePartition};

use crate::args::*;

/// Files written by one subcommand, echoed into `run.json`.
struct Run {
    dir: PathBuf,
    outputs: Vec<String>,
}

impl Run {
    fn new(output: &OutputArgs) -> Result<Self> {
        fs::create_dir_all(&output.output_dir)
            .with_context(|| format!("--output-dir {}", output.output_dir.display()))?;
        Ok(Run {
            dir: output.output_dir.clone(),
            outputs: Vec::new(),
        })
    }

    fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> netroles::Result<()>,
    ) -> Result<()> {
        let path = self.dir.join(name);
        let file =
            File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = BufWriter::new(file);
        body(&mut out).with_context(|| format!("writing {}", path.display()))?;
        out.flush()?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn finish(
        mut self,
        command: &str,
        seed: u64,
        inputs: Value,
        parameters: Value,
        summary: Value,
    ) -> Result<()> {
        let record = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": seed,
            "inputs": inputs,
            "parameters": parameters,
            "outputs": self.outputs,
            "summary": summary,
        });
        self.outputs.push("run.json".into());
        let path = self.dir.join("run.json");
        let mut text = serde_json::to_string_pretty(&record)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn read_graph(path: &Path, directed: bool) -> Result<Graph> {
    load_edge_list(open(path)?, directed).with_context(|| path.display().to_string())
}

fn read_model(path: &Path) -> Result<RoleModel> {
    RoleModel::read_json(open(path)?).with_context(|| path.display().to_string())
}

fn shown(p: &Path) -> String {
    p.display().to_string()
}

fn write_assignment(
    run: &mut Run,
    w: &ndarray::Array2<f64>,
    nodes: &[u64],
    hard: bool,
) -> Result<()> {
    if hard {
        let a = hard_assignment(w);
        run.write("roles.csv", |out| a.write_csv(nodes, out))
    } else {
        let s = soft_memberships(w);
        run.write("memberships.csv", |out| s.write_csv(nodes, out))
    }
}

pub fn learn(args: &LearnArgs) -> Result<()> {
    let g = read_graph(&args.input.graph, args.input.directed)?;
    let config = LearnConfig {
        primitives: args.primitives.clone(),
        operators: args.operators.clone(),
        bin_fraction: args.bin_fraction,
        lambda: args.lambda,
        max_iterations: args.maxiter as usize,
        similarity: args.similarity.into(),
        prune_rule: args.keep.into(),
        attributes: Vec::new(),
    };
    let learned = learn_features(&g, &config)?;
    let mut run = Run::new(&args.output)?;
    run.write("features.csv", |out| learned.features.write_csv(out))?;
    run.write("descriptors.json", |out| {
        learned.features.write_descriptors_json(out)
    })?;

    let primitives = config
        .primitives
        .clone()
        .unwrap_or_else(|| PrimitiveKind::standard(g.is_directed()));
    run.finish(
        "learn",
        args.output.seed,
        json!({ "graph": shown(&args.input.graph), "directed": args.input.directed }),
        json!({
            "primitives": primitives.iter().map(|p| p.name()).collect::<Vec<_>>(),
            "operators": config.operators.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "bin_fraction": config.bin_fraction,
            "lambda": config.lambda,
            "maxiter": config.max_iterations,
            "similarity": format!("{:?}", args.similarity).to_lowercase(),
            "keep": format!("{:?}", args.keep).to_lowercase(),
        }),
        json!({
            "nodes": g.node_count(),
            "edges": g.edge_count(),
            "features": learned.features.feature_count(),
            "surviving_counts": learned.surviving_counts,
            "converged": learned.converged,
        }),
    )
}

pub fn select_rank(args: &SelectArgs) -> Result<()> {
    let (nodes, values) =
        read_matrix_csv(open(&args.features)?).with_context(|| shown(&args.features))?;
    let descriptors = match &args.descriptors {
        Some(p) => read_descriptors_json(open(p)?).with_context(|| shown(p))?,
        None => Vec::new(),
    };
    let config = SelectConfig {
        criterion: args.criterion,
        bits: args.bits,
        trials: args.trials as usize,
        seed: args.output.seed,
        nmf: NmfConfig {
            max_iter: args.nmf_maxiter as usize,
            tol: args.nmf_tol,
        },
        restarts: args.restarts as usize,
    };
    if let Some(r) = args.rank {
        let max = values.nrows().min(values.ncols()) as u64;
        if r > max {
            bail!("--rank {r} exceeds min(nodes, features) = {max}");
        }
    }
    let (mut model, costs) = match args.rank {
        Some(r) => {
            let m = fit_rank(&values, r as usize, &config)?;
            let cost = m.cost;
            (m, vec![(r as usize, cost)])
        }
        None => {
            let s = rank_search(&values, &config)?;
            (s.best, s.costs)
        }
    };
    if !descriptors.is_empty() {
        // checks that descriptors match the columns
        FeatureMatrix::new(nodes.clone(), values.clone(), descriptors.clone())?;
    }
    model.descriptors = descriptors;
    model.nodes = nodes;

    let mut run = Run::new(&args.output)?;
    run.write("model.json", |out| model.write_json(out))?;
    run.write("rank_costs.csv", |out| {
        writeln!(out, "rank,cost")?;
        for (r, c) in &costs {
            writeln!(out, "{r},{c}")?;
        }
        Ok(())
    })?;
    run.finish(
        "select-rank",
        args.output.seed,
        json!({
            "features": shown(&args.features),
            "descriptors": args.descriptors.as_deref().map(shown),
        }),
        json!({
            "criterion": config.criterion.to_string(),
            "bits": config.bits,
            "trials": config.trials,
            "rank": args.rank,
            "restarts": config.restarts,
            "nmf_maxiter": config.nmf.max_iter,
            "nmf_tol": config.nmf.tol,
        }),
        json!({ "rank": model.rank, "cost": model.cost, "evaluated": costs.len() }),
    )
}

pub fn assign(args: &AssignArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    let mut run = Run::new(&args.output)?;
    write_assignment(&mut run, &model.w, &model.nodes, args.mode.hard)?;
    run.finish(
        "assign",
        args.output.seed,
        json!({ "model": shown(&args.model) }),
        json!({ "mode": if args.mode.hard { "hard" } else { "soft" } }),
        json!({ "nodes": model.node_count(), "rank": model.rank }),
    )
}

pub fn transfer(args: &TransferArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    let g = read_graph(&args.input.graph, args.input.directed)?;
    let config = TransferConfig {
        clamp: args.clamp,
        method: NnlsMethod::default(),
    };
    let t = transfer_memberships(&g, &model, &config)?;
    let mut run = Run::new(&args.output)?;
    write_assignment(&mut run, &t.w, &t.nodes, args.mode.hard)?;
    run.finish(
        "transfer",
        args.output.seed,
        json!({
            "model": shown(&args.model),
            "graph": shown(&args.input.graph),
            "directed": args.input.directed,
        }),
        json!({ "clamp": config.clamp, "mode": if args.mode.hard { "hard" } else { "soft" } }),
        json!({ "nodes": g.node_count(), "objective": t.objective(&model) }),
    )
}

/// `(timestamp, path)` pairs from a directory or a manifest file.
fn snapshot_paths(source: &Path) -> Result<Vec<(String, PathBuf)>> {
    let stem = |p: &Path| {
        p.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    if source.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(source)
            .with_context(|| shown(source))?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| p.is_file());
        files.sort();
        return Ok(files.into_iter().map(|p| (stem(&p), p)).collect());
    }
    let text =
        fs::read_to_string(source).with_context(|| format!("cannot read {}", source.display()))?;
    let base = source.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (ts, rel) = match fields.as_slice() {
            [p] => (None, *p),
            [t, p] => (Some(t.to_string()), *p),
            _ => bail!(
                "{} line {}: expected `path` or `timestamp path`",
                source.display(),
                i + 1
            ),
        };
        let path = base.join(rel);
        out.push((ts.unwrap_or_else(|| stem(&path)), path));
    }
    Ok(out)
}

pub fn dynamic(args: &DynamicArgs) -> Result<()> {
    let model = read_model(&args.model)?;
    let paths = snapshot_paths(&args.snapshots)?;
    if paths.is_empty() {
        bail!("no snapshots found in {}", args.snapshots.display());
    }
    let snapshots: Vec<(String, Graph)> = paths
        .iter()
        .map(|(t, p)| Ok((t.clone(), read_graph(p, args.directed)?)))
        .collect::<Result<_>>()?;
    let config = TransferConfig {
        clamp: args.clamp,
        method: NnlsMethod::default(),
    };
    let series = role_time_series(&snapshots, &model, &config)?;
    let mut run = Run::new(&args.output)?;
    run.write("series.csv", |out| series.write_csv(out))?;
    if series.len() >= 2 {
        let t = series_transition(&series, config.method)?;
        run.write("transition.json", |out| t.write_json(out))?;
    }
    run.finish(
        "dynamic",
        args.output.seed,
        json!({
            "model": shown(&args.model),
            "snapshots": paths.iter().map(|(t, p)| json!({ "timestamp": t, "graph": shown(p) })).collect::<Vec<_>>(),
            "directed": args.directed,
        }),
        json!({ "clamp": config.clamp }),
        json!({ "snapshots": series.len(), "rank": model.rank }),
    )
}

pub fn oracle(args: &OracleArgs) -> Result<()> {
    let g = read_graph(&args.input.graph, args.input.directed)?;
    let n = g.node_count();
    let partition = match args.kind {
        OracleKind::Structural => structural_classes(
            &g,
            match args.variant {
                Variant::Strict => StructuralVariant::Strict,
                Variant::Weak => StructuralVariant::Weak,
            },
        ),
        OracleKind::Automorphic => automorphic_orbits(&g)?,
        OracleKind::Regular => {
            let p0 = match args.initial {
                Initial::Single => NodePartition::single_class(n),
                Initial::Degree => NodePartition::from_keys((0..n).map(|u| {
                    (
                        g.degree(u),
                        g.out_neighbors(u).len(),
                        g.in_neighbors(u).len(),
                    )
                })),
            };
            let mode = match args.refinement {
                Refinement::Set => RefinementMode::Set,
                Refinement::Multiset => RefinementMode::Multiset,
            };
            regular_refinement(&g, &p0, mode)?
        }
    };
    let mut text = Vec::new();
    write_partition_json(&partition, g.labels(), &mut text)?;
    std::io::stdout().write_all(&text)?;

    let mut run = Run::new(&args.output)?;
    run.write("partition.json", |out| Ok(out.write_all(&text)?))?;
    run.finish(
        "oracle",
        args.output.seed,
        json!({ "graph": shown(&args.input.graph), "directed": args.input.directed }),
        json!({
            "kind": format!("{:?}", args.kind).to_lowercase(),
            "variant": format!("{:?}", args.variant).to_lowercase(),
            "refinement": format!("{:?}", args.refinement).to_lowercase(),
            "initial": format!("{:?}", args.initial).to_lowercase(),
        }),
        json!({ "nodes": n, "classes": partition.class_count() }),
    )
}
