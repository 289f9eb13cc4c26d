use std::fmt::Write as _;
use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use zonosep::cubillage::{
    all_cubes, anti_standard_cubillage, bead_thread_graph, gamma_graph, graph_dot, is_acyclic,
    standard_cubillage, Cubillage,
};
use zonosep::flips::{
    apply_flip, neighbors, neighbors_down, neighbors_up, verify_flip_theorem_odd_sharded,
    verify_local_neighb_even, verify_refined_lemma, Direction, FlipSite, HarnessReport, Parity,
    Shard, WitnessMode,
};
use zonosep::geometry::{boundary_vertices, front_rear_vertices};
use zonosep::membranes::{
    enlarged_fragmentation, fragments, property_p_scan, Fragmentation, DEFAULT_IDEAL_LIMIT,
};
use zonosep::separation::verdict;
use zonosep::systems::{
    check_pairwise, enumerate_maximal, is_maximal, max_size, max_size_with_bound,
    maximal_size_histogram, nonpurity_witness, s_formula, PairwisePredicate, SetSystem,
    SystemExport,
};
use zonosep::{interval_cortege, Error, GroundSet, Subset};

const SCHEMA: &str = "zonosep/1";

#[derive(Parser)]
#[command(
    name = "zonosep",
    version,
    about = "Weak separation, cyclic zonotopes, cubillages and membranes"
)]
struct Cli {
    /// Worker threads for the parallel harnesses.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write machine-readable output here.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write a graphviz digraph here (commands that produce a graph).
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Separation predicates on a pair of sets.
    #[command(subcommand)]
    Sep(SepCmd),
    /// Maximum and maximal separated systems.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Vertices of cyclic zonotopes.
    #[command(subcommand)]
    Zono(ZonoCmd),
    /// Cubillages.
    #[command(subcommand)]
    Cub(CubCmd),
    /// Membranes of fragmented cubillages.
    #[command(subcommand)]
    Membrane(MembraneCmd),
    /// Flips of set systems.
    #[command(subcommand)]
    Flip(FlipCmd),
    /// Exhaustive verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Walkthroughs.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Subcommand)]
enum SepCmd {
    Check(SepCheck),
    Cortege {
        #[arg(long)]
        a: Subset,
        #[arg(long)]
        b: Subset,
    },
}

#[derive(Args)]
struct SepCheck {
    #[arg(long)]
    a: Subset,
    #[arg(long)]
    b: Subset,
    #[arg(long)]
    r: usize,
    /// Test weak separation (the default).
    #[arg(long, conflicts_with_all = ["strong", "comb"])]
    weak: bool,
    #[arg(long, conflicts_with = "comb")]
    strong: bool,
    /// Test for a double r-comb.
    #[arg(long)]
    comb: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredicateArg {
    Strong,
    /// Weak separation of the parity of r.
    Weak,
    WeakOdd,
    WeakEven,
    WeakEvenNoComb,
}

#[derive(Args)]
struct PredicateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long, value_enum, default_value = "weak")]
    predicate: PredicateArg,
}

impl PredicateArgs {
    fn predicate(&self) -> anyhow::Result<PairwisePredicate> {
        let p = match self.predicate {
            PredicateArg::Strong => PairwisePredicate::Strong(self.r),
            PredicateArg::Weak => PairwisePredicate::weak(self.r)?,
            PredicateArg::WeakOdd => PairwisePredicate::WeakOdd(self.r),
            PredicateArg::WeakEven => PairwisePredicate::WeakEven(self.r),
            PredicateArg::WeakEvenNoComb => PairwisePredicate::WeakEvenNoComb(self.r),
        };
        Ok(p.validated()?)
    }
}

#[derive(Subcommand)]
enum SearchCmd {
    Max {
        #[command(flatten)]
        p: PredicateArgs,
        /// Largest n accepted by the exhaustive search.
        #[arg(long)]
        bound: Option<usize>,
    },
    Maximal {
        #[command(flatten)]
        p: PredicateArgs,
        /// Stop after this many maximal systems.
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
    },
}

#[derive(Args)]
struct Dims {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
}

#[derive(Subcommand)]
enum ZonoCmd {
    Vertices(Dims),
    Sides(Dims),
}

#[derive(Args)]
struct CubArgs {
    #[command(flatten)]
    dims: Dims,
    /// Use the anti-standard cubillage.
    #[arg(long)]
    anti: bool,
}

impl CubArgs {
    fn build(&self) -> anyhow::Result<Cubillage> {
        let (n, d) = (self.dims.n, self.dims.d);
        Ok(if self.anti {
            anti_standard_cubillage(n, d)?
        } else {
            standard_cubillage(n, d)?
        })
    }
}

#[derive(Subcommand)]
enum CubCmd {
    Standard(Dims),
    Anti(Dims),
    Validate {
        /// A cubillage in JSON, bare or as written by `cub standard --json`.
        #[arg(long)]
        input: PathBuf,
    },
    Beads(CubArgs),
    Gamma {
        #[command(flatten)]
        cub: CubArgs,
        /// Use every cube of Z(n, d) instead of one cubillage.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    W,
    E,
}

#[derive(Args)]
struct MembraneArgs {
    #[command(flatten)]
    cub: CubArgs,
    #[arg(long, value_enum, default_value = "w")]
    flavor: FlavorArg,
    #[arg(long, default_value_t = DEFAULT_IDEAL_LIMIT)]
    limit: usize,
}

impl MembraneArgs {
    fn fragmentation(&self) -> anyhow::Result<(Cubillage, Fragmentation)> {
        let q = self.cub.build()?;
        let f = match self.flavor {
            FlavorArg::W => fragments(&q)?,
            FlavorArg::E => enlarged_fragmentation(&q)?,
        };
        Ok((q, f))
    }
}

#[derive(Subcommand)]
enum MembraneCmd {
    Enumerate {
        #[command(flatten)]
        m: MembraneArgs,
        /// Membranes written to the JSON output at most.
        #[arg(long, default_value_t = 1000)]
        export: usize,
    },
    Flipwalk(MembraneArgs),
    Scan(MembraneArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Raise,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Sharp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParityArg {
    Odd,
    Even,
}

#[derive(Args)]
struct SiteArgs {
    #[arg(long, default_value = "")]
    x: Subset,
    #[arg(long)]
    p: Subset,
    #[arg(long)]
    q: Subset,
}

impl SiteArgs {
    fn site(&self) -> anyhow::Result<FlipSite> {
        let k = self.p.len() + self.q.len();
        let parity = if k % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        };
        Ok(FlipSite::new(self.x, self.p, self.q, parity)?)
    }
}

#[derive(Subcommand)]
enum FlipCmd {
    Apply {
        /// A set system in JSON (`{"n": .., "members": [[..], ..]}`).
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        site: SiteArgs,
        #[arg(long, value_enum, default_value = "raise")]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value = "sharp")]
        mode: ModeArg,
    },
    Witnesses(SiteArgs),
}

#[derive(Args)]
struct HarnessArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r: usize,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Maximum strongly r-separated systems have C(n, <= r+1) members.
    Snr {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// The same for weak separation with odd r.
    Wnr {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 3])]
        r: Vec<usize>,
    },
    /// Flip theorem (odd r) or the even local neighborhood theorem.
    Flips {
        #[command(flatten)]
        h: HarnessArgs,
        #[arg(long, value_enum)]
        parity: Option<ParityArg>,
        /// Run only the sites with index k modulo m.
        #[arg(long, value_name = "K/M")]
        shard: Option<Shard>,
    },
    Refined(HarnessArgs),
    Even(HarnessArgs),
    Acyclicity {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        max_d: usize,
    },
    Membranes {
        #[arg(long, default_value_t = DEFAULT_IDEAL_LIMIT)]
        limit: usize,
    },
    Nonpurity,
}

#[derive(Subcommand)]
enum DemoCmd {
    Nonpurity,
}

/// What a command produced.
struct Output {
    text: String,
    result: Value,
    dot: Option<String>,
    pass: bool,
}

impl Output {
    fn new(text: String, result: Value) -> Self {
        Output {
            text,
            result,
            dot: None,
            pass: true,
        }
    }

    fn checked(text: String, result: Value, pass: bool) -> Self {
        Output {
            text,
            result,
            dot: None,
            pass,
        }
    }

    fn with_dot(mut self, dot: String) -> Self {
        self.dot = Some(dot);
        self
    }
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn members(s: &SetSystem) -> String {
    s.to_string()
}

fn sep(cmd: SepCmd) -> anyhow::Result<Output> {
    match cmd {
        SepCmd::Check(c) => {
            let v = verdict(c.a, c.b, c.r);
            let (name, answer) = if c.comb {
                ("double comb", v.double_comb)
            } else if c.strong {
                ("strongly separated", v.strongly_separated)
            } else {
                let w = zonosep::is_weakly_r_separated(c.a, c.b, c.r)?;
                ("weakly separated", w)
            };
            let text = format!(
                "{answer}\n{} and {} {} {name} for r = {}; interlacing degree {}\n",
                c.a,
                c.b,
                if answer { "are" } else { "are not" },
                c.r,
                v.degree
            );
            Ok(Output::new(text, json!({ "answer": answer, "verdict": v })))
        }
        SepCmd::Cortege { a, b } => {
            let c = interval_cortege(a, b);
            let text = format!("{c}\n{} intervals\n", c.len());
            Ok(Output::new(
                text,
                json!({ "a": a, "b": b, "cortege": c, "degree": c.len() }),
            ))
        }
    }
}

fn search(cmd: SearchCmd) -> anyhow::Result<Output> {
    match cmd {
        SearchCmd::Max { p, bound } => {
            let pred = p.predicate()?;
            let m = match bound {
                Some(b) => max_size_with_bound(p.n, pred, b)?,
                None => max_size(p.n, pred)?,
            };
            let formula = s_formula(p.n, p.r);
            let text = format!(
                "max size of a {pred} system on [{}]: {}\nC(n, <= r+1) = {formula}\nwitness: {}\n",
                p.n,
                m.size,
                members(&m.witness)
            );
            let result = json!({
                "n": p.n,
                "predicate": pred,
                "size": m.size,
                "formula": formula as u64,
                "witness": m.witness.export(Some(pred)),
            });
            Ok(Output::new(text, result))
        }
        SearchCmd::Maximal { p, limit } => {
            let pred = p.predicate()?;
            let e = enumerate_maximal(p.n, pred, limit)?;
            let mut hist = std::collections::BTreeMap::new();
            for s in &e.systems {
                *hist.entry(s.len()).or_insert(0u64) += 1;
            }
            let mut text = format!(
                "{} maximal {pred} systems on [{}]{}\n",
                e.systems.len(),
                p.n,
                if e.truncated { " (truncated)" } else { "" }
            );
            for (size, count) in &hist {
                let _ = writeln!(text, "  size {size}: {count}");
            }
            let result = json!({
                "n": p.n,
                "predicate": pred,
                "truncated": e.truncated,
                "histogram": hist,
                "systems": e.systems.iter().map(|s| s.members().to_vec()).collect::<Vec<_>>(),
            });
            Ok(Output::new(text, result))
        }
    }
}

fn zono(cmd: ZonoCmd) -> anyhow::Result<Output> {
    match cmd {
        ZonoCmd::Vertices(Dims { n, d }) => {
            let v = boundary_vertices(n, d)?;
            let text = format!("|V(Z({n},{d}))| = {}\n{}\n", v.len(), members(&v));
            Ok(Output::new(
                text,
                json!({ "n": n, "d": d, "vertices": v.members() }),
            ))
        }
        ZonoCmd::Sides(Dims { n, d }) => {
            let fr = front_rear_vertices(n, d)?;
            let text = format!(
                "front: {}\nrear: {}\nrim: {}\nfront {}\nrear {}\n",
                fr.front.len(),
                fr.rear.len(),
                fr.rim.len(),
                members(&fr.front),
                members(&fr.rear)
            );
            let result = json!({
                "n": n,
                "d": d,
                "front": fr.front.members(),
                "rear": fr.rear.members(),
                "rim": fr.rim.members(),
            });
            Ok(Output::new(text, result))
        }
    }
}

fn cubillage_output(q: &Cubillage) -> Output {
    let report = q.validate();
    let mut text = format!("{} cubes in Z({},{})\n", q.cubes.len(), q.n, q.d);
    for c in &q.cubes {
        let _ = writeln!(text, "  {c}");
    }
    for v in &report.violations {
        let _ = writeln!(text, "  violation: {v}");
    }
    let _ = writeln!(text, "validator {}", verdict_word(report.ok()));
    let result = json!({ "cubillage": q, "validation": report });
    Output::checked(text, result, report.ok()).with_dot(graph_dot("gamma", &q.gamma_graph()))
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))
}

fn cub(cmd: CubCmd) -> anyhow::Result<Output> {
    match cmd {
        CubCmd::Standard(Dims { n, d }) => Ok(cubillage_output(&standard_cubillage(n, d)?)),
        CubCmd::Anti(Dims { n, d }) => Ok(cubillage_output(&anti_standard_cubillage(n, d)?)),
        CubCmd::Validate { input } => {
            let v = read_json(&input)?;
            let v = v.pointer("/result/cubillage").cloned().unwrap_or(v);
            let q: Cubillage = serde_json::from_value(v).context("not a cubillage")?;
            Ok(cubillage_output(&q))
        }
        CubCmd::Beads(c) => {
            let q = c.build()?;
            let b = bead_thread_graph(&q)?;
            let mut text = format!(
                "{} threads, {} isolated vertices\n",
                b.threads.len(),
                b.isolated.len()
            );
            for t in &b.threads {
                let line: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(text, "  {}", line.join(" -> "));
            }
            for v in &b.violations {
                let _ = writeln!(text, "  violation: {v}");
            }
            let _ = writeln!(text, "{}", verdict_word(b.ok()));
            let dot = b.to_dot();
            let pass = b.ok();
            Ok(Output::checked(text, json!(b), pass).with_dot(dot))
        }
        CubCmd::Gamma { cub, all } => {
            let g = if all {
                gamma_graph(&all_cubes(cub.dims.n, cub.dims.d)?)
            } else {
                cub.build()?.gamma_graph()
            };
            let acyclic = is_acyclic(&g);
            let text = format!(
                "Gamma: {} cubes, {} arcs, {}\n{}\n",
                g.node_count(),
                g.edge_count(),
                if acyclic { "acyclic" } else { "has a cycle" },
                verdict_word(acyclic)
            );
            let result =
                json!({ "nodes": g.node_count(), "arcs": g.edge_count(), "acyclic": acyclic });
            Ok(Output::checked(text, result, acyclic).with_dot(graph_dot("gamma", &g)))
        }
    }
}

fn membrane(cmd: MembraneCmd) -> anyhow::Result<Output> {
    match cmd {
        MembraneCmd::Enumerate { m, export } => {
            let (_, f) = m.fragmentation()?;
            let mut exported = Vec::new();
            let mut distinct = std::collections::HashSet::new();
            let stats = f.for_each_membrane(m.limit, |view| {
                distinct.insert(view.vertex_hash());
                if exported.len() < export {
                    exported.push(view.to_membrane().export());
                }
                Ok(ControlFlow::Continue(()))
            })?;
            let text = format!(
                "{} pieces, {} membranes, {} distinct vertex sets\n",
                f.len(),
                stats.membranes,
                distinct.len()
            );
            let result = json!({
                "pieces": f.pieces(),
                "membranes": stats.membranes,
                "distinct_vertex_sets": distinct.len(),
                "exported": exported,
            });
            Ok(Output::new(text, result).with_dot(f.to_dot()))
        }
        MembraneCmd::Flipwalk(m) => {
            let (_, f) = m.fragmentation()?;
            let steps = f.flip_walk()?;
            let mut text = String::new();
            for s in &steps {
                if !s.removed.is_empty() || !s.added.is_empty() {
                    let _ = writeln!(text, "{}: -{:?} +{:?}", s.fragment, s.removed, s.added);
                }
            }
            let _ = writeln!(text, "{} raising flips", steps.len());
            Ok(Output::new(text, json!({ "steps": steps })).with_dot(f.to_dot()))
        }
        MembraneCmd::Scan(m) => {
            let (q, f) = m.fragmentation()?;
            let scan = f.scan(m.limit)?;
            let mut pass = scan.ok();
            let mut text = format!(
                "{} membranes, {} distinct vertex sets, sizes {:?} (expected {:?}), {} combinatorial flips\n",
                scan.membranes,
                scan.distinct_vertex_sets,
                scan.vertex_set_sizes,
                scan.expected_size,
                scan.combinatorial_flips
            );
            for v in &scan.violations {
                let _ = writeln!(text, "  violation: {v}");
            }
            let mut result = json!({ "scan": scan });
            if m.flavor == FlavorArg::E && q.d % 2 == 0 && q.d >= 4 {
                let p = property_p_scan(&q, m.limit)?;
                let _ = writeln!(text, "double combs on e-membranes: {}", p.combs.len());
                pass &= p.ok();
                result["property_p"] = json!(p);
            }
            let _ = writeln!(text, "{}", verdict_word(pass));
            Ok(Output::checked(text, result, pass).with_dot(f.to_dot()))
        }
    }
}

fn flip(cmd: FlipCmd) -> anyhow::Result<Output> {
    match cmd {
        FlipCmd::Apply {
            input,
            site,
            direction,
            mode,
        } => {
            let v = read_json(&input)?;
            let v = v.pointer("/result/system").cloned().unwrap_or(v);
            let w = serde_json::from_value::<SystemExport>(v)
                .context("not a set system")?
                .into_system()?;
            let site = site.site()?;
            let dir = match direction {
                DirectionArg::Raise => Direction::Raise,
                DirectionArg::Lower => Direction::Lower,
            };
            let mode = match mode {
                ModeArg::Full => WitnessMode::Full,
                ModeArg::Sharp => WitnessMode::Sharp,
            };
            let out = apply_flip(&w, &site, dir, mode)?;
            let pred = PairwisePredicate::weak(site.r())?;
            let text = format!(
                "{}\n{} members, weakly {}-separated\n",
                members(&out),
                out.len(),
                site.r()
            );
            Ok(Output::new(
                text,
                json!({ "site": site, "system": out.export(Some(pred)) }),
            ))
        }
        FlipCmd::Witnesses(s) => {
            let site = s.site()?;
            let full = if site.parity == Parity::Odd {
                Some(site.lift(&neighbors(&site)?))
            } else {
                None
            };
            let up = site.lift(&neighbors_up(&site));
            let down = site.lift(&neighbors_down(&site));
            let show = |v: &[Subset]| {
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let mut text = format!("{site}, r = {}\n", site.r());
            if let Some(f) = &full {
                let _ = writeln!(text, "N: {}", show(f));
            }
            let _ = writeln!(text, "N-up: {}\nN-down: {}", show(&up), show(&down));
            let result =
                json!({ "site": site, "r": site.r(), "neighbors": full, "up": up, "down": down });
            Ok(Output::new(text, result))
        }
    }
}

fn harness_output(reports: Vec<HarnessReport>) -> Output {
    let mut text = String::new();
    let mut pass = true;
    for rep in &reports {
        let _ = writeln!(
            text,
            "{} n={} r={} shard {}/{}: {} sites, {} pairs, {} triggered, {} counterexamples",
            rep.harness,
            rep.n,
            rep.r,
            rep.shard.index,
            rep.shard.count,
            rep.sites,
            rep.pairs,
            rep.triggered,
            rep.counterexamples.len()
        );
        for (label, count) in &rep.recorded {
            let _ = writeln!(text, "  {label}: {count}");
        }
        for c in rep.counterexamples.iter().take(10) {
            let _ = writeln!(
                text,
                "  {} Y={} {}: cortege {}",
                c.site, c.y, c.clause, c.cortege
            );
        }
        pass &= rep.ok();
    }
    let _ = writeln!(text, "{}", verdict_word(pass));
    Output::checked(text, json!({ "reports": reports }), pass)
}

fn bound_rows(
    max_n: usize,
    rs: &dyn Fn(usize) -> Vec<usize>,
    pred: fn(usize) -> PairwisePredicate,
) -> anyhow::Result<Output> {
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut pass = true;
    for n in 2..=max_n {
        for r in rs(n) {
            let p = pred(r);
            let got = max_size(n, p)?;
            let want = s_formula(n, r);
            let ok = got.size as u128 == want;
            pass &= ok;
            let _ = writeln!(
                text,
                "n={n} r={r} {p}: {} (expected {want}) {}",
                got.size,
                verdict_word(ok)
            );
            rows.push(
                json!({ "n": n, "r": r, "size": got.size, "expected": want as u64, "ok": ok }),
            );
        }
    }
    let _ = writeln!(text, "{}", verdict_word(pass));
    Ok(Output::checked(text, json!({ "rows": rows }), pass))
}

fn criterion_cubillages() -> anyhow::Result<Vec<Cubillage>> {
    let mut out = Vec::new();
    for (n, d) in [(4, 2), (4, 3), (5, 3), (6, 4), (5, 5)] {
        out.push(standard_cubillage(n, d)?);
        out.push(anti_standard_cubillage(n, d)?);
    }
    Ok(out)
}

fn verify(cmd: VerifyCmd) -> anyhow::Result<Output> {
    match cmd {
        VerifyCmd::Snr { max_n } => {
            bound_rows(max_n, &|n| (1..n).collect(), PairwisePredicate::Strong)
        }
        VerifyCmd::Wnr { max_n, r } => {
            if let Some(bad) = r.iter().find(|&&r| r % 2 == 0) {
                bail!(Error::Parity {
                    what: "verify wnr",
                    expected: "odd",
                    r: *bad
                });
            }
            bound_rows(
                max_n,
                &|n| r.iter().copied().filter(|&r| r < n).collect(),
                PairwisePredicate::WeakOdd,
            )
        }
        VerifyCmd::Flips { h, parity, shard } => {
            let natural = if h.r % 2 == 1 {
                ParityArg::Odd
            } else {
                ParityArg::Even
            };
            if parity.is_some_and(|p| p != natural) {
                bail!(Error::Parity {
                    what: "verify flips",
                    expected: if parity == Some(ParityArg::Odd) {
                        "odd"
                    } else {
                        "even"
                    },
                    r: h.r
                });
            }
            let shard = shard.unwrap_or(Shard::ALL);
            let rep = match natural {
                ParityArg::Odd => verify_flip_theorem_odd_sharded(h.n, h.r, shard)?,
                ParityArg::Even => {
                    if shard != Shard::ALL {
                        bail!(Error::Params("sharding applies to odd r".into()));
                    }
                    verify_local_neighb_even(h.n, h.r)?
                }
            };
            Ok(harness_output(vec![rep]))
        }
        VerifyCmd::Refined(h) => Ok(harness_output(vec![verify_refined_lemma(h.n, h.r)?])),
        VerifyCmd::Even(h) => Ok(harness_output(vec![verify_local_neighb_even(h.n, h.r)?])),
        VerifyCmd::Acyclicity { max_n, max_d } => {
            let mut text = String::new();
            let mut pass = true;
            let mut rows = Vec::new();
            for n in 1..=max_n {
                for d in 1..=max_d.min(n) {
                    let ok = is_acyclic(&gamma_graph(&all_cubes(n, d)?));
                    pass &= ok;
                    let _ = writeln!(
                        text,
                        "Gamma over all cubes of Z({n},{d}): {}",
                        verdict_word(ok)
                    );
                    rows.push(json!({ "graph": "gamma-all", "n": n, "d": d, "acyclic": ok }));
                }
            }
            for q in criterion_cubillages()? {
                let mut graphs = vec![(
                    "gamma",
                    q.gamma_graph().edge_count(),
                    is_acyclic(&q.gamma_graph()),
                )];
                let f = fragments(&q)?.precedence_graph();
                graphs.push(("fragments", f.edge_count(), is_acyclic(&f)));
                if q.d % 2 == 0 {
                    let e = enlarged_fragmentation(&q)?.precedence_graph();
                    graphs.push(("enlarged", e.edge_count(), is_acyclic(&e)));
                }
                for (name, arcs, ok) in graphs {
                    pass &= ok;
                    let _ = writeln!(
                        text,
                        "{name} of Q({},{}) with {arcs} arcs: {}",
                        q.n,
                        q.d,
                        verdict_word(ok)
                    );
                    rows.push(
                        json!({ "graph": name, "n": q.n, "d": q.d, "arcs": arcs, "acyclic": ok }),
                    );
                }
            }
            let _ = writeln!(text, "{}", verdict_word(pass));
            Ok(Output::checked(text, json!({ "rows": rows }), pass))
        }
        VerifyCmd::Membranes { limit } => {
            let mut text = String::new();
            let mut pass = true;
            let mut scans = Vec::new();
            let mut cases: Vec<(usize, usize)> = (3..=6).map(|n| (n, 3)).collect();
            cases.push((5, 5));
            for (n, d) in cases {
                for (label, q) in [
                    ("standard", standard_cubillage(n, d)?),
                    ("anti", anti_standard_cubillage(n, d)?),
                ] {
                    let scan = fragments(&q)?.scan(limit)?;
                    pass &= scan.ok();
                    let _ = writeln!(
                        text,
                        "w-membranes of {label} Z({n},{d}): {} membranes, sizes {:?} {}",
                        scan.membranes,
                        scan.vertex_set_sizes,
                        verdict_word(scan.ok())
                    );
                    scans.push(json!(scan));
                }
            }
            let mut props = Vec::new();
            for (n, d) in [(4, 4), (5, 4)] {
                for (label, q) in [
                    ("standard", standard_cubillage(n, d)?),
                    ("anti", anti_standard_cubillage(n, d)?),
                ] {
                    let p = property_p_scan(&q, limit)?;
                    pass &= p.ok();
                    let _ = writeln!(
                        text,
                        "e-membranes of {label} Z({n},{d}): {} membranes, {} double combs {}",
                        p.e_membranes,
                        p.combs.len(),
                        verdict_word(p.ok())
                    );
                    props.push(json!(p));
                }
            }
            let _ = writeln!(text, "{}", verdict_word(pass));
            Ok(Output::checked(
                text,
                json!({ "w": scans, "e": props }),
                pass,
            ))
        }
        VerifyCmd::Nonpurity => nonpurity(false),
    }
}

fn nonpurity(explain: bool) -> anyhow::Result<Output> {
    let pred = PairwisePredicate::WeakOdd(3);
    let v = boundary_vertices(6, 4)?;
    let all = SetSystem::power_set(GroundSet::new(6)?);
    let excluded = all.difference(&v);
    let a = nonpurity_witness();
    let weak = check_pairwise(&a, pred).ok;
    let maximal = is_maximal(&a, pred);
    let best = max_size(6, pred)?.size;
    let pass =
        v.len() == 52 && excluded.len() == 12 && a.len() == 55 && weak && maximal && best == 57;
    let mut text = String::new();
    if explain {
        let _ = writeln!(text, "The vertices of the cyclic zonotope Z(6,4) are the subsets of [6] with at most 3 sign changes.");
        let _ = writeln!(
            text,
            "They form a weakly 3-separated system. The 12 subsets left out are:\n  {}",
            members(&excluded)
        );
        let _ = writeln!(
            text,
            "Adding {{2,4}}, {{3,5}} and {{1,3,4,6}} keeps the system weakly 3-separated."
        );
        let _ = writeln!(
            text,
            "No other subset of [6] can then be added, yet larger systems exist."
        );
    }
    let _ = writeln!(text, "|V(Z(6,4))| = {}", v.len());
    let _ = writeln!(text, "excluded sets: {}", excluded.len());
    let _ = writeln!(
        text,
        "witness: {} members, weakly 3-separated: {weak}, maximal: {maximal}",
        a.len()
    );
    let _ = writeln!(text, "maximum size: {best} = s(6,3) = {}", s_formula(6, 3));
    let _ = writeln!(text, "{}", verdict_word(pass));
    let result = json!({
        "vertices": v.len(),
        "excluded": excluded.members(),
        "witness": a.export(Some(pred)),
        "witness_size": a.len(),
        "weakly_separated": weak,
        "maximal": maximal,
        "maximum": best,
        "histogram": if explain { Some(maximal_size_histogram(6, pred)?) } else { None },
    });
    Ok(Output::checked(text, result, pass))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Sep(_) => "sep",
        Command::Search(_) => "search",
        Command::Zono(_) => "zono",
        Command::Cub(_) => "cub",
        Command::Membrane(_) => "membrane",
        Command::Flip(_) => "flip",
        Command::Verify(_) => "verify",
        Command::Demo(_) => "demo",
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("thread pool")?;
    }
    let name = command_name(&cli.command);
    let out = match cli.command {
        Command::Sep(c) => sep(c)?,
        Command::Search(c) => search(c)?,
        Command::Zono(c) => zono(c)?,
        Command::Cub(c) => cub(c)?,
        Command::Membrane(c) => membrane(c)?,
        Command::Flip(c) => flip(c)?,
        Command::Verify(c) => verify(c)?,
        Command::Demo(DemoCmd::Nonpurity) => nonpurity(true)?,
    };
    print!("{}", out.text);
    let envelope =
        json!({ "schema": SCHEMA, "command": name, "pass": out.pass, "result": out.result });
    let report = match (&cli.json, out.pass) {
        (Some(path), _) => Some(path.clone()),
        (None, false) => Some(PathBuf::from("zonosep-report.json")),
        (None, true) => None,
    };
    if let Some(path) = &report {
        let body = serde_json::to_string_pretty(&envelope)?;
        fs::write(path, body + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &cli.dot {
        let Some(dot) = &out.dot else {
            bail!(Error::Params(format!("`{name}` produces no graph")))
        };
        fs::write(path, dot).with_context(|| format!("writing {}", path.display()))?;
    }
    if out.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        if let Some(path) = report {
            eprintln!("checks failed; report written to {}", path.display());
        }
        Ok(ExitCode::from(1))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(Error::Falsified(_)) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
