use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use usf_core::electrical::{effective_resistance, kirchhoff_marginal, Mode, ResistanceQuery};
use usf_core::experiments::{
    free_length_experiment, parabolic_experiment, robustness_warning, wired_experiment,
    write_fit_csv, write_reach_csv, write_samples_csv, ExperimentSpec, Observable, ParabolicSpec,
};
use usf_core::forest::format::{read_forest, write_forest};
use usf_core::forest::{
    check_spatial_markov, dual_law_discrepancy, enumerate_trees, Sampler, SpanningForest,
    WalkConfig,
};
use usf_core::generators::{self, TessellationSpec};
use usf_core::graph::format::{read_planenet, write_planenet};
use usf_core::graph::{
    geometry_bound, is_polyhedral, is_polyhedral_with_apex, wired_truncation, PlaneNetwork,
};
use usf_core::packing::format::{read_packing, write_packing};
use usf_core::packing::{
    mobius_normalize, render_svg, solve_double_packing, Model, PackingOptions, RenderOptions,
};

use crate::config::{pick, FileConfig, Settings};
use crate::manifest::Run;
use crate::{
    Cli, Command, ElecCommand, ExpArgs, Experiment, ForestKind, GenCommand, GraphCommand, ModeArg,
    ModelArg, PackArgs, RenderArgs, SampleArgs, UsageError,
};

pub fn run(cli: Cli, argv: Vec<String>) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let settings = Settings {
        seed: pick(cli.seed, file.seed, 0),
        threads: cli.threads.or(file.threads),
        out: cli.out.clone().or_else(|| file.out.clone()),
        config_file: cli.config.clone(),
    };
    if let Some(n) = settings.threads {
        if n == 0 {
            return Err(UsageError("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot start the worker pool")?;
    }
    let mut run = Run::new(settings);
    let mut manifest_dir = run.settings.out.clone();
    match cli.command {
        Command::Gen(cmd) => gen(&mut run, cmd)?,
        Command::Graph(cmd) => graph(&mut run, cmd)?,
        Command::Elec(cmd) => elec(&mut run, cmd)?,
        Command::Sample(args) => sample(&mut run, &file, args)?,
        Command::Pack(args) => pack(&mut run, &file, args)?,
        Command::Render(args) => render(&mut run, args)?,
        Command::Exp(args) => {
            let dir = exp(&mut run, &file, args)?;
            manifest_dir.get_or_insert(dir);
        }
        Command::Selftest => selftest(&mut run)?,
    }
    run.finish(argv, manifest_dir)
}

fn read_network(run: &mut Run, path: Option<&Path>) -> Result<PlaneNetwork> {
    let text = run.read(path)?;
    let name = path.map_or("-".into(), |p| p.display().to_string());
    read_planenet(&text).with_context(|| format!("in {name}"))
}

fn gen(run: &mut Run, cmd: GenCommand) -> Result<()> {
    let (net, output) = match cmd {
        GenCommand::Tess {
            p,
            q,
            depth,
            output,
        } => {
            run.option("generator", format!("tess p={p} q={q} depth={depth}"));
            (
                generators::tessellation_ball(&TessellationSpec::new(p, q, depth))?,
                output,
            )
        }
        GenCommand::Tube { rings, c, output } => {
            run.option("generator", format!("tube rings={rings} c={c}"));
            (generators::tube(rings, c)?, output)
        }
        GenCommand::Grid { n, output } => {
            run.option("generator", format!("grid n={n}"));
            (generators::grid_ball(n)?, output)
        }
        GenCommand::Layered {
            bands,
            depth,
            output,
        } => {
            let depth = depth.unwrap_or(bands.iter().sum::<usize>() + bands.len() + 1);
            run.option(
                "generator",
                format!("layered bands={bands:?} depth={depth}"),
            );
            (
                generators::layered_triangulation(&bands, depth)?.network,
                output,
            )
        }
    };
    run.write(output.as_deref(), write_planenet(&net).as_bytes())
}

fn graph(run: &mut Run, cmd: GraphCommand) -> Result<()> {
    match cmd {
        GraphCommand::Info { file } => {
            let net = read_network(run, Some(&file))?;
            let g = geometry_bound(&net);
            let mut out = String::new();
            writeln!(out, "vertices {}", net.vertex_count())?;
            writeln!(out, "edges {}", net.edge_count())?;
            writeln!(out, "faces {}", net.face_count())?;
            writeln!(out, "euler_characteristic {}", net.euler_characteristic())?;
            writeln!(
                out,
                "outer_face_degree {}",
                net.face_degree(net.outer_face())
            )?;
            match net.boundary_vertex() {
                Some(b) => writeln!(out, "boundary_vertex {b}")?,
                None => writeln!(out, "boundary_vertex none")?,
            }
            writeln!(out, "polyhedral {}", is_polyhedral(&net))?;
            writeln!(
                out,
                "polyhedral_with_apex {}",
                is_polyhedral_with_apex(&net)
            )?;
            writeln!(out, "max_degree {}", g.max_degree)?;
            writeln!(out, "max_codegree {}", g.max_codegree)?;
            writeln!(out, "max_conductance {}", g.max_conductance)?;
            writeln!(out, "max_resistance {}", g.max_resistance)?;
            writeln!(out, "geometry_bound {}", g.combined_m)?;
            run.write(None, out.as_bytes())
        }
        GraphCommand::Dual { file, output } => {
            let net = read_network(run, Some(&file))?;
            run.write(output.as_deref(), write_planenet(&net.dual()).as_bytes())
        }
        GraphCommand::Wire {
            file,
            depth,
            root,
            output,
        } => {
            let net = read_network(run, Some(&file))?;
            if root >= net.vertex_count() {
                bail!("root {root} is not a vertex");
            }
            let layer = net.bfs_layers(root);
            let kept: Vec<usize> = (0..net.vertex_count())
                .filter(|&v| layer[v] < depth)
                .collect();
            run.option("wire", format!("depth={depth} root={root}"));
            let t = wired_truncation(&net, &kept)?;
            run.write(output.as_deref(), write_planenet(&t.network).as_bytes())
        }
    }
}

fn elec(run: &mut Run, cmd: ElecCommand) -> Result<()> {
    let ElecCommand::Reff { file, a, b, mode } = cmd;
    let net = read_network(run, Some(&file))?;
    let mode = match mode {
        ModeArg::Plain => Mode::Plain,
        ModeArg::Free => Mode::Free,
        ModeArg::Wired => Mode::Wired,
        ModeArg::WiredToBoundary => Mode::WiredToBoundary,
    };
    run.option("mode", format!("{mode:?}"));
    let r = effective_resistance(&net, &ResistanceQuery::new(a, b, mode))?;
    run.write(None, format!("{r:.17e}\n").as_bytes())
}

fn sample(run: &mut Run, file: &FileConfig, args: SampleArgs) -> Result<()> {
    let net = read_network(run, Some(&args.file))?;
    let n = pick(args.n, file.sample.n, 1);
    if n == 0 {
        return Err(UsageError("--n must be positive".into()).into());
    }
    let root = match args.root.as_str() {
        "auto" => net.boundary_vertex().unwrap_or(0),
        s => s
            .parse()
            .map_err(|_| UsageError(format!("--root expects a vertex id or `auto`, got `{s}`")))?,
    };
    if args.kind == ForestKind::Ust && root >= net.vertex_count() {
        bail!("root {root} is not a vertex");
    }
    run.option("kind", format!("{:?}", args.kind));
    run.option("n", n);
    run.option("root", root);
    let seed = run.settings.seed;
    let sampler = Sampler::new(&net);
    let draw = |i: usize| -> usf_core::Result<SpanningForest> {
        let cfg = WalkConfig::new(seed, i as u64);
        match args.kind {
            ForestKind::Ust => sampler.ust(root, &cfg),
            ForestKind::Wusf => sampler.wusf(&cfg),
            ForestKind::Fusf => sampler.fusf(&cfg),
        }
    };
    let m = net.edge_count();
    let counts = (0..n)
        .into_par_iter()
        .map(|i| draw(i).map(|f| f.edges()))
        .try_fold(
            || vec![0u64; m],
            |mut acc, edges| -> usf_core::Result<Vec<u64>> {
                for e in edges? {
                    acc[e] += 1;
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![0u64; m],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let mut csv = String::from("edge,u,v,count,frequency\n");
    for (e, &k) in counts.iter().enumerate() {
        let (u, v) = net.endpoints(e);
        writeln!(csv, "{e},{u},{v},{k},{}", k as f64 / n as f64)?;
    }
    run.write(args.output.as_deref(), csv.as_bytes())?;
    if let Some(path) = &args.forest {
        let f = draw(0)?;
        run.write(Some(path), write_forest(&f.edges()).as_bytes())?;
    }
    Ok(())
}

fn pack(run: &mut Run, file: &FileConfig, args: PackArgs) -> Result<()> {
    let net = read_network(run, args.file.as_deref())?;
    let model = match (args.model, file.pack.model.as_deref()) {
        (Some(ModelArg::Disc), _) | (None, Some("disc")) | (None, None) => Model::UnitDisc,
        (Some(ModelArg::Euclidean), _) | (None, Some("euclidean")) => Model::EuclideanPlane,
        (None, Some(other)) => {
            return Err(UsageError(format!("unknown model `{other}` in config")).into())
        }
    };
    let mut opts = PackingOptions::new(model);
    opts.tolerance = pick(args.tolerance, file.pack.tolerance, opts.tolerance);
    opts.max_sweeps = pick(args.max_sweeps, file.pack.max_sweeps, opts.max_sweeps);
    run.option("model", model.name());
    run.option("tolerance", opts.tolerance);
    run.option("max_sweeps", opts.max_sweeps);
    let mut p = solve_double_packing(&net, &opts)?;
    if let Some((x, y)) = args.normalize {
        run.option("normalize", [x, y]);
        p = mobius_normalize(&p, &net, x, y)?;
    }
    eprintln!(
        "residuals: tangency {:.3e} orthogonality {:.3e} angle_sum {:.3e}",
        p.residuals.tangency, p.residuals.orthogonality, p.residuals.angle_sum
    );
    run.write(args.output.as_deref(), write_packing(&p).as_bytes())
}

fn render(run: &mut Run, args: RenderArgs) -> Result<()> {
    let text = run.read(Some(&args.file))?;
    let p = read_packing(&text).with_context(|| format!("in {}", args.file.display()))?;
    let mut opts = RenderOptions::new();
    opts.highlight = args.highlight;
    opts.show_dual = !args.no_dual;
    opts.size = args.size;
    if let (Some(forest), Some(graph)) = (&args.forest, &args.graph) {
        let net = read_network(run, Some(graph))?;
        if net.vertex_count() != p.primal.len() {
            bail!(
                "{} has {} vertices but the packing has {} circles",
                graph.display(),
                net.vertex_count(),
                p.primal.len()
            );
        }
        let text = run.read(Some(forest))?;
        let edges = read_forest(&text).with_context(|| format!("in {}", forest.display()))?;
        if let Some(&e) = edges.iter().find(|&&e| e >= net.edge_count()) {
            bail!("forest edge {e} is not an edge of {}", graph.display());
        }
        opts.forest = edges.iter().map(|&e| net.endpoints(e)).collect();
    }
    run.write(args.output.as_deref(), render_svg(&p, &opts).as_bytes())
}

fn exp(run: &mut Run, file: &FileConfig, args: ExpArgs) -> Result<PathBuf> {
    let c = &file.exp;
    let dir = args
        .output
        .clone()
        .or_else(|| run.settings.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let seed = run.settings.seed;
    let n = pick(args.n, c.n, 20_000);
    let bootstrap = pick(args.bootstrap, c.bootstrap, 200);
    run.option("experiment", format!("{:?}", args.experiment));
    run.option("n", n);
    run.option("bootstrap", bootstrap);

    if args.experiment == Experiment::Parabolic {
        let mut spec = ParabolicSpec::new(
            pick(args.c.clone(), c.c.clone(), vec![0.1, 1.0, 10.0]),
            n,
            seed,
        );
        spec.rings = pick(args.rings, c.rings, spec.rings);
        spec.fit.bootstrap = bootstrap;
        run.option("c", &spec.c_values);
        run.option("rings", spec.rings);
        let rows = parabolic_experiment(&spec)?;
        let mut reach = Vec::new();
        write_reach_csv(&rows, &mut reach)?;
        run.write(Some(&dir.join("reach.csv")), &reach)?;
        for row in &rows {
            write_observable(run, &dir, &format!("_c{}", row.c), &row.diameter)?;
        }
        let mut summary = String::new();
        for row in &rows {
            writeln!(
                summary,
                "c={} slope {:.4} [{:.4}, {:.4}] reach_bound_holds {}",
                row.c,
                row.diameter.fit.slope,
                row.diameter.fit.bootstrap_lo,
                row.diameter.fit.bootstrap_hi,
                row.reach.iter().all(|r| r.dominates(4.0))
            )?;
        }
        print!("{summary}");
        return Ok(dir);
    }

    let tess = |depth| TessellationSpec::new(pick(args.p, c.p, 3), pick(args.q, c.q, 7), depth);
    let depth = pick(args.depth, c.depth, 8);
    let make_spec = |depth| {
        let mut spec = ExperimentSpec::new(tess(depth), n, seed);
        spec.censor_layers = pick(args.censor_layers, c.censor_layers, spec.censor_layers);
        spec.fit.bootstrap = bootstrap;
        spec
    };
    let observe = |spec: &ExperimentSpec| -> Result<Observable> {
        Ok(match args.experiment {
            Experiment::WiredDiam => wired_experiment(spec)?.diameter,
            Experiment::WiredArea => wired_experiment(spec)?.area,
            _ => free_length_experiment(spec)?.length,
        })
    };
    let spec = make_spec(depth);
    run.option("tessellation", format!("{:?}", spec.tessellation));
    run.option("censor_layers", spec.censor_layers);
    let obs = observe(&spec)?;
    write_observable(run, &dir, "", &obs)?;
    let f = &obs.fit;
    println!(
        "{} slope {:.4} [{:.4}, {:.4}] censored {:.4}",
        obs.name, f.slope, f.bootstrap_lo, f.bootstrap_hi, f.censored_fraction
    );
    if let Some(other) = args.compare_depth {
        run.option("compare_depth", other);
        let second = observe(&make_spec(other))?;
        write_observable(run, &dir, &format!("_depth{other}"), &second)?;
        match robustness_warning(&second.fit, f) {
            Some(w) => println!("warning: {w}"),
            None => println!(
                "depth {other} slope {:.4} agrees with depth {depth}",
                second.fit.slope
            ),
        }
    }
    Ok(dir)
}

fn write_observable(run: &mut Run, dir: &Path, suffix: &str, obs: &Observable) -> Result<()> {
    let mut samples = Vec::new();
    write_samples_csv(&obs.samples, &mut samples)?;
    run.write(Some(&dir.join(format!("samples{suffix}.csv"))), &samples)?;
    let mut fit = Vec::new();
    write_fit_csv(&obs.fit, &mut fit)?;
    run.write(Some(&dir.join(format!("fit{suffix}.csv"))), &fit)
}

/// Exact checks on small networks; fails if any discrepancy is too large.
fn selftest(run: &mut Run) -> Result<()> {
    let mut report = String::new();
    let mut failed = 0;
    let mut check = |name: &str, value: f64, limit: f64| {
        let ok = value <= limit;
        failed += usize::from(!ok);
        let _ = writeln!(
            report,
            "{} {name}: {value:.3e} (limit {limit:.0e})",
            if ok { "ok  " } else { "FAIL" }
        );
    };
    let networks = [
        ("triangle", generators::triangle([1.0, 1.0, 1.0])),
        ("weighted triangle", generators::triangle([1.0, 1.0, 2.0])),
        ("4-cycle", generators::cycle(4)?),
        ("3x3 grid", generators::grid_rect(3, 3)?),
        ("cube", generators::cube()),
    ];
    for (name, net) in &networks {
        let law = enumerate_trees(net)?;
        let mut worst = 0f64;
        for e in 0..net.edge_count() {
            worst = worst.max((law.marginal(e) - kirchhoff_marginal(net, e)?).abs());
        }
        check(&format!("Kirchhoff marginals, {name}"), worst, 1e-10);

        let n = 20_000;
        let mut counts = std::collections::BTreeMap::new();
        let sampler = Sampler::new(net);
        for i in 0..n {
            let t = sampler.ust(0, &WalkConfig::new(run.settings.seed, i))?;
            *counts.entry(t.edges()).or_insert(0usize) += 1;
        }
        let tv = law
            .law()
            .iter()
            .map(|(t, p)| (counts.get(t).copied().unwrap_or(0) as f64 / n as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        // the expected TV of the empirical law is about sqrt(trees / n)
        let limit = 3.0 * (law.trees.len() as f64 / n as f64).sqrt();
        check(&format!("Wilson vs enumeration TV, {name}"), tv, limit);
    }
    for (r, c) in [(2, 3), (3, 3)] {
        let net = generators::grid_rect(r, c)?;
        check(
            &format!("dual complement law, {r}x{c} grid"),
            dual_law_discrepancy(&net)?,
            1e-12,
        );
        check(
            &format!("spatial Markov, {r}x{c} grid"),
            check_spatial_markov(&net, &[0], &[net.edge_count() - 1])?,
            1e-12,
        );
    }
    run.write(None, report.as_bytes())?;
    if failed > 0 {
        bail!("{failed} self-test checks failed");
    }
    Ok(())
}
