use crate::{BudgetArgs, CompressMode, Format, OutputArgs, Outcome, PairArgs, SpaceArgs, Verb};
use anyhow::{bail, Context as _, Result};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use xintseq::compression::{
    cascade_extent, cascade_order, compress_pair_to_fixpoint, gamma_family, is_cross_intersecting_labeled,
    MAX_UNIVERSE,
};
use xintseq::io::{self as xio, big_to_json, side_entries, Instance, SearchReport};
use xintseq::model::theorem_bound;
use xintseq::search::{k_fold_max_product, max_weighted_product, summarize};
use xintseq::suites::{self, cap_vectors, search_pair, PairInstance, SuiteOptions, SuiteRow};
use xintseq::{
    Budget, Context, Error, IpSequence, LabeledFamily, Space, SubsetFamily, Weight, WeightedFamily,
};

pub fn run(verb: Verb) -> Result<Outcome> {
    match verb {
        Verb::Enumerate { space, out } => enumerate(&space, &out),
        Verb::Bound { space, out } => bound(&space, &out),
        Verb::Search {
            space,
            budget,
            maximizers,
            out,
        } => search(&space, budget.budget(), maximizers, &out),
        Verb::Wsearch {
            left,
            right,
            budget,
            out,
        } => wsearch(&left, right.as_deref(), budget.budget(), &out),
        Verb::Compress {
            mode,
            left,
            right,
            universe,
            caps,
            caps2,
            out,
        } => match mode {
            CompressMode::Fixpoint => compress_fixpoint(&left, &right, universe, &out),
            CompressMode::Cascade => {
                let caps = caps.context("--mode cascade needs --caps")?;
                compress_cascade(&left, &right, caps, caps2, &out)
            }
        },
        Verb::Verify {
            suite,
            seed,
            budget,
            out,
        } => verify(&suite, seed, budget, &out),
        Verb::ExploreOpen {
            max_len,
            max_cap,
            budget,
            out,
        } => explore_open(max_len as usize, max_cap, budget.budget(), &out),
    }
}

fn ip(caps: &[u32]) -> Result<IpSequence> {
    Ok(IpSequence::new(caps.to_vec())?)
}

fn resolve(space: &SpaceArgs) -> Result<(IpSequence, usize)> {
    let caps = ip(&space.caps)?;
    let rank = space.rank.unwrap_or(caps.len());
    Ok((caps, rank))
}

/// The two sides of a pair instance; the second defaults to the first.
fn resolve_pair(args: &PairArgs) -> Result<((IpSequence, usize), (IpSequence, usize))> {
    let left = resolve(&args.left)?;
    let caps2 = match &args.caps2 {
        Some(d) => ip(d)?,
        None => left.0.clone(),
    };
    let rank2 = match (&args.rank2, &args.caps2) {
        (Some(s), _) => *s,
        (None, Some(_)) => caps2.len(),
        (None, None) => left.1,
    };
    Ok((left, (caps2, rank2)))
}

fn instance(args: &PairArgs, left: &(IpSequence, usize), right: &(IpSequence, usize)) -> Instance {
    let (caps2, rank2) = if args.caps2.is_some() || args.rank2.is_some() {
        (Some(right.0.caps().to_vec()), Some(right.1))
    } else {
        (None, None)
    };
    Instance {
        caps: left.0.caps().to_vec(),
        rank: left.1,
        caps2,
        rank2,
        k: (args.k != 2).then_some(args.k as usize),
    }
}

fn warn_hypotheses(caps: &IpSequence, name: &str) {
    if caps.first() < 3 {
        eprintln!(
            "warning: {name}_1 = {} < 3, so the star-product bound is not guaranteed for this instance",
            caps.first()
        );
    }
}

fn note_excess<T: PartialOrd + std::fmt::Display>(max: &T, bound: &T) {
    if max > bound {
        eprintln!("note: max {max} exceeds the star bound {bound}");
    }
}

fn write_json(out: &OutputArgs, v: &Value) -> Result<()> {
    let mut w = out.open()?;
    serde_json::to_writer(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_csv<const N: usize>(out: &OutputArgs, header: [&str; N], rows: impl IntoIterator<Item = [String; N]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out.open()?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn enumerate(args: &SpaceArgs, out: &OutputArgs) -> Result<Outcome> {
    let (caps, rank) = resolve(args)?;
    let space = Space::new(caps.clone(), rank)?;
    match out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut w = out.open()?;
            xio::write_sequences(&mut w, space.members())?;
            w.flush()?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out.open()?);
            w.write_record((1..=caps.len()).map(|p| format!("a{p}")))?;
            for a in space.members() {
                w.write_record(a.entries().iter().map(u32::to_string))?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Ok)
}

fn spaces_for_bound(args: &PairArgs) -> Result<Vec<(IpSequence, usize)>> {
    let (left, right) = resolve_pair(args)?;
    if args.k > 2 {
        if args.caps2.is_some() || args.rank2.is_some() {
            bail!(Error::Parse("--k above 2 uses k copies of one space; drop --caps2/--rank2".into()));
        }
        return Ok(vec![left; args.k as usize]);
    }
    if args.k < 2 {
        bail!(Error::InvalidK(args.k as usize));
    }
    Ok(vec![left, right])
}

fn bound(args: &PairArgs, out: &OutputArgs) -> Result<Outcome> {
    let spaces = spaces_for_bound(args)?;
    let b = theorem_bound(&spaces)?;
    match out.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &big_to_json(&b))?,
        Format::Csv => write_csv(out, ["bound"], [[b.to_string()]])?,
    }
    Ok(Outcome::Ok)
}

fn emit_report(out: &OutputArgs, report: &SearchReport) -> Result<()> {
    match out.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &serde_json::to_value(report)?),
        Format::Csv => write_csv(out, SearchReport::CSV_HEADER, [report.csv_row()]),
    }
}

fn search(args: &PairArgs, budget: Budget, with_maximizers: bool, out: &OutputArgs) -> Result<Outcome> {
    let spaces = spaces_for_bound(args)?;
    let (left, right) = resolve_pair(args)?;
    warn_hypotheses(&left.0, "c");
    if args.k == 2 && args.caps2.is_some() {
        warn_hypotheses(&right.0, "d");
    }
    let bound = theorem_bound(&spaces)?;
    let inst = instance(args, &left, &right);
    let report = if args.k == 2 {
        let o = search_pair(left.0.caps(), left.1, right.0.caps(), right.1, &budget)?;
        note_excess(&o.max, &bound);
        SearchReport {
            instance: inst,
            bound: big_to_json(&bound),
            max: big_to_json(&o.max),
            maximizer_count: o.maximizers.len(),
            maximizers: with_maximizers.then(|| {
                o.maximizers
                    .iter()
                    .map(|m| vec![side_entries(&o.left, &m.left), side_entries(&o.right, &m.right)])
                    .collect()
            }),
            classification_summary: Some(summarize(&o.classes)),
        }
    } else {
        let sp = Space::new(left.0.clone(), left.1)?;
        let ctx = Context::meets(&sp, &sp)?;
        let res = k_fold_max_product(&ctx, args.k as usize, &budget)?;
        note_excess(&res.value, &bound);
        SearchReport {
            instance: inst,
            bound: big_to_json(&bound),
            max: big_to_json(&res.value),
            maximizer_count: res.maximizers.len(),
            maximizers: with_maximizers.then(|| {
                res.maximizers
                    .iter()
                    .map(|t| t.iter().map(|s| side_entries(&sp, s)).collect())
                    .collect()
            }),
            classification_summary: None,
        }
    };
    emit_report(out, &report)?;
    Ok(Outcome::Ok)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn load_weighted(path: &Path) -> Result<WeightedFamily> {
    let wf = xio::read_weighted(&read_text(path)?).with_context(|| format!("in {}", path.display()))?;
    let report = wf.check_conditions();
    if !report.is_clean() {
        eprintln!(
            "warning: {} violates the weight conditions ({} halving, {} shifting violations)",
            path.display(),
            report.halving.len(),
            report.shifting.len()
        );
    }
    Ok(wf)
}

fn weight_json(w: &Weight) -> Value {
    json!([w.numer().to_string(), w.denom().to_string()])
}

fn members_of(wf: &WeightedFamily) -> Vec<Vec<usize>> {
    wf.family().iter().map(|s| s.elements().collect()).collect()
}

fn wsearch(left: &Path, right: Option<&Path>, budget: Budget, out: &OutputArgs) -> Result<Outcome> {
    let g = load_weighted(left)?;
    let h = match right {
        Some(p) => load_weighted(p)?,
        None => g.clone(),
    };
    let ctx = Context::intersection(g.family(), h.family())?;
    let res = max_weighted_product(&ctx, &g, &h, &budget)?;
    let (gm, hm) = (members_of(&g), members_of(&h));
    let pick = |all: &[Vec<usize>], set: &xintseq::BitSet| set.iter().map(|i| all[i].clone()).collect::<Vec<_>>();
    let maximizers: Vec<Value> = res
        .maximizers
        .iter()
        .map(|m| {
            json!({
                "left": pick(&gm, &m.pair.left),
                "right": pick(&hm, &m.pair.right),
                "star_centres": m.star_centres,
                "qualifying_centres": m.qualifying_centres,
            })
        })
        .collect();
    match out.format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &json!({
                "universe": [g.universe(), h.universe()],
                "bound": weight_json(&res.bound),
                "max": weight_json(&res.value),
                "attains_bound": res.attains_bound(),
                "maximizers_are_qualifying_stars": res.maximizers_are_qualifying_stars(),
                "maximizer_count": maximizers.len(),
                "maximizers": maximizers,
            }),
        )?,
        Format::Csv => write_csv(
            out,
            ["bound", "max", "attains_bound", "maximizers_are_qualifying_stars", "maximizer_count"],
            [[
                res.bound.to_string(),
                res.value.to_string(),
                res.attains_bound().to_string(),
                res.maximizers_are_qualifying_stars().to_string(),
                maximizers.len().to_string(),
            ]],
        )?,
    }
    Ok(Outcome::Ok)
}

fn compress_fixpoint(left: &Path, right: &Path, universe: Option<usize>, out: &OutputArgs) -> Result<Outcome> {
    let cap = universe.unwrap_or(MAX_UNIVERSE);
    let a = xio::read_subsets(open(left)?, cap).with_context(|| format!("in {}", left.display()))?;
    let b = xio::read_subsets(open(right)?, cap).with_context(|| format!("in {}", right.display()))?;
    let n = match universe {
        Some(n) => n,
        None => a.iter().chain(b.iter()).map(|s| s.max_element()).max().unwrap_or(0),
    };
    let (a, b) = (a.with_universe(n)?, b.with_universe(n)?);
    let fx = compress_pair_to_fixpoint(&a, &b)?;
    let sets = |f: &SubsetFamily| f.iter().map(|s| s.elements().collect::<Vec<_>>()).collect::<Vec<_>>();
    emit_compressed(
        out,
        json!({
            "mode": "fixpoint",
            "universe": n,
            "left": sets(&fx.left),
            "right": sets(&fx.right),
            "steps": fx.steps,
        }),
        fx.steps.iter().map(|&(i, j)| json!([i, j])).collect(),
    )
}

fn compress_cascade(left: &Path, right: &Path, caps: Vec<u32>, caps2: Option<Vec<u32>>, out: &OutputArgs) -> Result<Outcome> {
    let c = ip(&caps)?;
    let d = match caps2 {
        Some(d) => ip(&d)?,
        None => c.clone(),
    };
    let a = xio::read_labeled(open(left)?, &c).with_context(|| format!("in {}", left.display()))?;
    let b = xio::read_labeled(open(right)?, &d).with_context(|| format!("in {}", right.display()))?;
    if !is_cross_intersecting_labeled(&a, &b) {
        bail!(Error::NotCrossIntersecting);
    }
    let (l, h) = cascade_extent(&a, &b);
    let (mut fa, mut fb) = (a, b);
    let mut steps = Vec::new();
    for (x, y) in cascade_order(l, h) {
        let (na, nb) = (gamma_family(x, y, &fa), gamma_family(x, y, &fb));
        if na != fa || nb != fb {
            steps.push((x, y));
        }
        (fa, fb) = (na, nb);
    }
    let sets = |f: &LabeledFamily| f.iter().map(|l| l.pairs().to_vec()).collect::<Vec<_>>();
    emit_compressed(
        out,
        json!({
            "mode": "cascade",
            "left": sets(&fa),
            "right": sets(&fb),
            "steps": steps,
        }),
        steps.iter().map(|&(x, y)| json!([x, y])).collect(),
    )
}

/// CSV projection: one `(kind, value)` row per member and per step.
fn emit_compressed(out: &OutputArgs, doc: Value, steps: Vec<Value>) -> Result<Outcome> {
    match out.format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &doc)?,
        Format::Csv => {
            let side = |k: &str| -> Vec<[String; 2]> {
                doc[k]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .map(|m| [k.to_string(), m.to_string()])
                    .collect()
            };
            let rows = side("left")
                .into_iter()
                .chain(side("right"))
                .chain(steps.iter().map(|s| ["step".to_string(), s.to_string()]));
            write_csv(out, ["kind", "value"], rows)?;
        }
    }
    Ok(Outcome::Ok)
}

fn verify(suite: &str, seed: u64, budget: BudgetArgs, out: &OutputArgs) -> Result<Outcome> {
    let opts = SuiteOptions {
        budget: budget.budget(),
        seed,
    };
    let reports = suites::run(suite, &opts)?;
    let rows: Vec<&SuiteRow> = reports.iter().flat_map(|r| &r.rows).collect();
    match out.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(out, SuiteRow::CSV_HEADER, rows.iter().map(|r| r.csv_record()))?,
        Format::Json => {
            let mut w = out.open()?;
            for r in &rows {
                serde_json::to_writer(&mut w, r)?;
                writeln!(w)?;
            }
            w.flush()?;
        }
    }
    let mut failed = false;
    for r in rows.iter().filter(|r| !r.ok) {
        failed = true;
        eprintln!("{}", serde_json::to_string(r)?);
    }
    for rep in &reports {
        eprintln!(
            "{}: {} checks, {} failing",
            rep.name,
            rep.rows.len(),
            rep.failures().count()
        );
    }
    Ok(if failed { Outcome::Failed } else { Outcome::Ok })
}

/// Pairs `(c, r, d, s)` with `c_1 = 2` or `d_1 = 2`, caps in `[2, max_cap]`.
fn open_instances(max_len: usize, max_cap: u32) -> Vec<PairInstance> {
    let caps: Vec<Vec<u32>> = (1..=max_len).flat_map(|n| cap_vectors(n, 2, max_cap)).collect();
    let mut out = Vec::new();
    for c in &caps {
        for d in &caps {
            if c[0] != 2 && d[0] != 2 {
                continue;
            }
            for r in 1..=c.len() {
                for s in 1..=d.len() {
                    out.push((c.clone(), r, d.clone(), s));
                }
            }
        }
    }
    out
}

fn explore_open(max_len: usize, max_cap: u32, budget: Budget, out: &OutputArgs) -> Result<Outcome> {
    let grid = open_instances(max_len, max_cap);
    let rows: Vec<(SearchReport, bool)> = grid
        .par_iter()
        .map(|(c, r, d, s)| {
            let o = search_pair(c, *r, d, *s, &budget)?;
            let report = SearchReport {
                instance: Instance {
                    caps: c.clone(),
                    rank: *r,
                    caps2: Some(d.clone()),
                    rank2: Some(*s),
                    k: None,
                },
                bound: big_to_json(&o.bound),
                max: big_to_json(&o.max),
                maximizer_count: o.maximizers.len(),
                maximizers: None,
                classification_summary: Some(summarize(&o.classes)),
            };
            Ok((report, o.max > o.bound))
        })
        .collect::<xintseq::Result<_>>()?;
    let above = rows.iter().filter(|r| r.1).count();
    let reports: Vec<SearchReport> = rows.into_iter().map(|r| r.0).collect();
    match out.format.unwrap_or(Format::Json) {
        Format::Csv => write_csv(out, SearchReport::CSV_HEADER, reports.iter().map(SearchReport::csv_row))?,
        Format::Json => {
            let mut w = out.open()?;
            for r in &reports {
                serde_json::to_writer(&mut w, r)?;
                writeln!(w)?;
            }
            w.flush()?;
        }
    }
    eprintln!("{} instances scanned, {above} with max above the star bound", reports.len());
    Ok(Outcome::Ok)
}
