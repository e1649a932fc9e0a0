use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use relyroute_core::addressing::{default_bits, MAX_BITS};
use relyroute_core::format::fmt_sig;
use relyroute_core::reliability::enumerate_cut_counts_with;
use relyroute_core::routing::MAX_PATHS_PER_PAIR;
use relyroute_core::topology::{self, mean_degree};
use relyroute_core::*;

use crate::args::{
    CompareArgs, Fixture, GenArgs, GeometricArgs, OverlayArgs, PGrid, ReliabilityArgs, RoutingArgs,
};
use crate::error::CliError;

const DIGITS: usize = 12;

fn num(x: f64) -> String {
    fmt_sig(x, DIGITS)
}

/// Writes `text` to `path`, or to standard output when there is no path.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

/// Diagnostics go to stdout unless stdout already carries the main output.
fn note(main_on_stdout: bool, line: &str) {
    if main_on_stdout {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_adjacency_matrix(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn enum_config(budget_ms: u64) -> EnumConfig {
    EnumConfig {
        time_budget: (budget_ms > 0).then(|| Duration::from_millis(budget_ms)),
        ..EnumConfig::default()
    }
}

fn generate(
    geo: &GeometricArgs,
    n: usize,
) -> Result<(Graph, topology::GeometricScenario, u32), CliError> {
    Ok(connected_or_retry(n, geo.density, geo.range, geo.seed)?)
}

pub fn gen(args: GenArgs) -> Result<(), CliError> {
    if let Some(Fixture::Fig2) = args.fixture {
        let dir = args.out_dir.as_deref().expect("clap enforces --out-dir");
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let (physical, dart, atr) = fixture_fig2();
        for (name, g) in [("physical", &physical), ("dart", &dart), ("atr", &atr)] {
            let path = dir.join(format!("{name}.adj"));
            emit(Some(&path), &serialize_adjacency_matrix(g))?;
            println!(
                "{}: {} nodes, {} arcs",
                path.display(),
                g.n(),
                g.arc_count()
            );
        }
        return Ok(());
    }

    let on_stdout = args.out.is_none();
    if let Some(n) = args.mesh {
        let g = full_mesh(n)?;
        emit(args.out.as_deref(), &serialize_adjacency_matrix(&g))?;
        note(
            on_stdout,
            &format!("full mesh: {n} nodes, {} arcs", g.arc_count()),
        );
        return Ok(());
    }

    let Some(n) = args.geometric.nodes else {
        return Err(CliError::Usage(
            "gen needs one of --nodes, --mesh or --fixture".into(),
        ));
    };
    let (g, scenario, attempts) = generate(&args.geometric, n)?;
    emit(args.out.as_deref(), &serialize_adjacency_matrix(&g))?;
    if let Some(out) = &args.out {
        let mut sidecar = out.clone().into_os_string();
        sidecar.push(".scenario");
        emit(Some(Path::new(&sidecar)), &scenario.to_sidecar())?;
    }
    note(
        on_stdout,
        &format!(
            "nodes={n} arcs={} side_m={} mean_degree={} connected=yes attempts={attempts} seed_used={}",
            g.arc_count(),
            num(scenario.side_m),
            num(mean_degree(&g)),
            scenario.seed
        ),
    );
    Ok(())
}

fn allocate(g: &Graph, routing: &RoutingArgs) -> Result<AddressMap, CliError> {
    if routing.root >= g.n() {
        return Err(CliError::Usage(format!(
            "--root {} is out of range for {} nodes",
            routing.root,
            g.n()
        )));
    }
    let bits = routing.bits.unwrap_or_else(|| default_bits(g.n()));
    if bits == 0 || bits > MAX_BITS {
        return Err(CliError::Usage(format!("--bits must be in 1..={MAX_BITS}")));
    }
    Ok(allocate_addresses(g, routing.root, bits)?)
}

pub fn overlay(args: OverlayArgs) -> Result<(), CliError> {
    let g = read_graph(&args.topo)?;
    let addrs = allocate(&g, &args.routing)?;
    let tables = build_tables(&g, &addrs, args.mode)?;
    let overlay = overlay_graph(&tables, &g, &addrs)?;
    emit(args.out.as_deref(), &serialize_adjacency_matrix(&overlay))?;

    if let Some(path) = &args.addr_out {
        emit(Some(path), &addrs.to_text())?;
    }
    if let Some(path) = &args.dump_paths {
        let mut text = String::new();
        for s in 0..g.n() {
            for t in (0..g.n()).filter(|&t| t != s) {
                let set = discover_paths(&tables, &g, &addrs, s, t)?;
                if set.truncated {
                    eprintln!("warning: paths for ({s}, {t}) truncated at {MAX_PATHS_PER_PAIR}");
                }
                text.push_str(&set.to_text());
            }
        }
        emit(Some(path), &text)?;
    }
    note(
        args.out.is_none(),
        &format!(
            "mode={} bits={} root={} address_digest={:016x} physical_arcs={} overlay_arcs={}",
            args.mode,
            addrs.bits(),
            addrs.root(),
            addrs.digest(),
            g.arc_count(),
            overlay.arc_count()
        ),
    );
    Ok(())
}

fn budget_line(budget_ms: u64) -> String {
    format!("# time_budget_ms={budget_ms}\n")
}

fn aborted_line(report: &ReliabilityReport) -> String {
    if report.is_complete() {
        return String::new();
    }
    let pairs: Vec<String> = report
        .aborted
        .iter()
        .map(|(s, t)| format!("{s},{t}"))
        .collect();
    format!("# aborted_pairs={}\n", pairs.join(" "))
}

fn pairs_csv(report: &ReliabilityReport) -> String {
    let mut out = String::from("s,t,p,R_st\n");
    for pair in &report.per_pair {
        for (k, &p) in report.p_values.iter().enumerate() {
            let r = pair.values.as_ref().map_or(f64::NAN, |v| v[k]);
            let _ = writeln!(out, "{},{},{},{}", pair.s, pair.t, num(p), num(r));
        }
    }
    out
}

pub fn reliability(args: ReliabilityArgs, budget_ms: u64) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let cfg = enum_config(budget_ms);
    let mut meta = format!(
        "# relyroute reliability\n# graph={} n={} arcs={} directed={}\n# p_grid={}\n",
        args.graph.display(),
        g.n(),
        g.arc_count(),
        g.is_directed(),
        args.p_grid.spec
    );
    meta.push_str(&budget_line(budget_ms));

    if let Some(pair) = args.pair {
        let counts = enumerate_cut_counts_with(&g, pair.s, pair.t, &cfg)?;
        if args.symbolic {
            println!("{}", symbolic_polynomial(&counts));
            return Ok(());
        }
        let mut out = meta;
        out.push_str("s,t,p,R_st\n");
        for &p in &args.p_grid.values {
            let r = terminal_pair_reliability(&counts, p)?;
            let _ = writeln!(out, "{},{},{},{}", pair.s, pair.t, num(p), num(r));
        }
        return emit(args.out.as_deref(), &out);
    }

    let report = mean_reliability(&g, &args.p_grid.values, &FlowWeights::uniform(), &cfg)?;
    let mut out = meta;
    out.push_str(&aborted_line(&report));
    out.push_str("p,mean,std,pairs_connected,pairs_total\n");
    for (k, &p) in report.p_values.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(p),
            num(report.mean[k]),
            num(report.std[k]),
            report.pairs_connected,
            report.pairs_total
        );
    }
    emit(args.out.as_deref(), &out)?;
    if let Some(path) = &args.pairs_out {
        emit(Some(path), &pairs_csv(&report))?;
    }
    if report.is_complete() {
        Ok(())
    } else {
        Err(CliError::Budget(report.aborted.len()))
    }
}

enum Source {
    File(PathBuf),
    Mesh(usize),
    Geometric(usize),
}

pub fn compare(args: CompareArgs, budget_ms: u64) -> Result<(), CliError> {
    let source = match (&args.topo, args.mesh, args.geometric.nodes) {
        (Some(path), _, _) => Source::File(path.clone()),
        (None, Some(n), _) => Source::Mesh(n),
        (None, None, Some(n)) => Source::Geometric(n),
        (None, None, None) => {
            return Err(CliError::Usage(
                "compare needs one of --topo, --mesh or --nodes".into(),
            ))
        }
    };
    let geo = &args.geometric;
    let mut meta = String::from("# relyroute compare\n");
    let g = match &source {
        Source::File(path) => {
            let _ = writeln!(meta, "# topology=file path={}", path.display());
            read_graph(path)?
        }
        Source::Mesh(n) => {
            let _ = writeln!(meta, "# topology=mesh n={n}");
            full_mesh(*n)?
        }
        Source::Geometric(n) => {
            let (g, scenario, attempts) = generate(geo, *n)?;
            let _ = writeln!(
                meta,
                "# topology=geometric n={n} density={} range_m={} side_m={} attempts={attempts} seed_used={}",
                num(geo.density),
                num(geo.range),
                num(scenario.side_m),
                scenario.seed
            );
            g
        }
    };
    let _ = writeln!(meta, "# seed={}", geo.seed);

    let addrs = allocate(&g, &args.routing)?;
    let cfg = enum_config(budget_ms);
    let mut overlays = Vec::with_capacity(2);
    for mode in [Mode::Dart, Mode::Atr] {
        let tables = build_tables(&g, &addrs, mode)?;
        overlays.push(overlay_graph(&tables, &g, &addrs)?);
    }
    let _ = writeln!(
        meta,
        "# root={} bits={} address_digest={:016x}",
        addrs.root(),
        addrs.bits(),
        addrs.digest()
    );
    let _ = writeln!(
        meta,
        "# arcs physical={} dart={} atr={}",
        g.arc_count(),
        overlays[0].arc_count(),
        overlays[1].arc_count()
    );
    let _ = writeln!(meta, "# overlays=directed weights=uniform");
    let _ = writeln!(meta, "# p_grid={}", args.p_grid.spec);
    meta.push_str(&budget_line(budget_ms));

    let reports = overlays
        .iter()
        .map(|ov| mean_reliability(ov, &args.p_grid.values, &FlowWeights::uniform(), &cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let (dart, atr) = (&reports[0], &reports[1]);

    let mut out = meta;
    for (mode, report) in [("dart", dart), ("atr", atr)] {
        let line = aborted_line(report);
        if !line.is_empty() {
            let _ = write!(out, "# {mode}{}", &line[1..]);
        }
    }
    out.push_str("p,mean_dart,std_dart,mean_atr,std_atr\n");
    let PGrid { values, .. } = &args.p_grid;
    for (k, &p) in values.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            num(p),
            num(dart.mean[k]),
            num(dart.std[k]),
            num(atr.mean[k]),
            num(atr.std[k])
        );
    }
    emit(args.out.as_deref(), &out)?;
    let aborted = dart.aborted.len() + atr.aborted.len();
    if aborted == 0 {
        Ok(())
    } else {
        Err(CliError::Budget(aborted))
    }
}
