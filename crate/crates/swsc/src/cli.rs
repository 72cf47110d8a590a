//! The `swsc` command-line front end.
//!
//! Exit codes: 0 success, 1 property-suite failure, 2 configuration error,
//! 3 infeasible decoding order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::channels::{Channel, JointChannel};
use crate::error::{Error, Result};
use crate::mi::{Mi, MiCache};
use crate::regions::{
    hk_mac_region, region_rate_splitting, region_swsc, region_swsc_union, Conjunction, IcInfo, OrderFamily,
    OrderPair, PartOrder, RateRegion2,
};
use crate::simulator::{simulate, sweep_curve, BlockSchedule, SimConfig, SimRow};
use crate::splits::{compose_three_layer, erasure_split, unit_grid, LayerSplit, SenderSplit};
use crate::verify::{run_suite, Suite};

/// Boundary samples in region CSV output.
const BOUNDARY_SAMPLES: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "swsc", version, about = "Rate regions and link simulation for sliding-window superposition coding")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-letter mutual informations of a channel.
    Mi(MiArgs),
    /// Rate region of a scheme as a boundary CSV or constraint JSON.
    Region(RegionArgs),
    /// Theoretical symmetric rates over INR, optionally with simulated points.
    Curve(CurveArgs),
    /// Link-level BLER simulation of SWSC and IAN.
    Simulate(SimulateArgs),
    /// Block schedule tables of a layer split.
    Schedule(ScheduleArgs),
    /// Run a property suite (lemma1, prop1, prop2, thm2, thm3, eq5, fm or all).
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct MiArgs {
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// ian, scd, sd, mix, snd, rs, swsc, swsc-union or hk.
    #[arg(long)]
    pub scheme: String,
    /// Layer counts `K-L` of the two senders.
    #[arg(long)]
    pub split: Option<String>,
    /// Decoding orders: `d1=m1@-1>m2@0;d2=m1@-1>m2@-1` (swsc) or `d1=m1.1>m2>m1.2;d2=...` (rs).
    #[arg(long)]
    pub order: Option<String>,
    /// Points per split parameter.
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Simulation config JSON (defaults apply to missing fields).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated INR values in dB.
    #[arg(long, value_delimiter = ',')]
    pub inr: Vec<f64>,
    /// Comma-separated symmetric rates in bits per channel use.
    #[arg(long, value_delimiter = ',')]
    pub rates: Vec<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// SWSC decoding orders (default: automatic).
    #[arg(long)]
    pub order: Option<String>,
    /// Config overrides `key=value` (value parsed as JSON, else taken as a string).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(long, default_value = "2-1")]
    pub split: String,
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: String,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses the process arguments and runs; returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    run_cli(cli)
}

pub fn run_cli(cli: Cli) -> i32 {
    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::InvalidParameter(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli.command),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code of an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InfeasibleOrder(_) => 3,
        _ => 2,
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Mi(a) => cmd_mi(a),
        Command::Region(a) => cmd_region(a),
        Command::Curve(a) => cmd_curve(&a.sim),
        Command::Simulate(a) => cmd_simulate(&a.sim),
        Command::Schedule(a) => cmd_schedule(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn cmd_mi(a: &MiArgs) -> Result<i32> {
    let ch = Channel::load(&a.channel)?;
    let info = IcInfo::new(&MiCache::new(ch.to_joint()?))?;
    let mut rows: Vec<(String, f64)> = Vec::new();
    for (k, r) in info.rx.iter().enumerate() {
        let (own, other) = if k == 0 { ("X", "W") } else { ("W", "X") };
        let y = format!("Y{}", k + 1);
        rows.push((format!("I({own};{y})"), r.own));
        rows.push((format!("I({other};{y})"), r.other));
        rows.push((format!("I({own};{y}|{other})"), r.own_given));
        rows.push((format!("I({other};{y}|{own})"), r.other_given));
        rows.push((format!("I(X,W;{y})"), r.both));
    }
    let text = if a.out.as_deref().is_some_and(is_json) {
        let obj: serde_json::Map<String, Value> = rows.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        pretty(&Value::Object(obj))
    } else {
        let mut s = String::from("quantity,bits\n");
        for (k, v) in &rows {
            writeln!(s, "{k},{v:.12}").unwrap();
        }
        s
    };
    write_out(a.out.as_deref(), &text)?;
    Ok(0)
}

/// Parses `K-L`.
pub fn parse_split(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("split `{text}` is not of the form K-L"));
    let (k, l) = text.split_once('-').ok_or_else(bad)?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    let l: usize = l.trim().parse().map_err(|_| bad())?;
    if k == 0 || l == 0 {
        return Err(bad());
    }
    Ok((k, l))
}

/// Parameterized splits of one sender: unsplit, an erasure split, or a merged
/// three-layer split, swept over the grid.
fn sender_splits(joint: &JointChannel, input: usize, layers: usize, grid: usize) -> Result<Vec<(String, SenderSplit)>> {
    let p = joint.input_pmf(input);
    let g = unit_grid(grid);
    let name = ["a", "b"][input];
    match layers {
        1 => Ok(vec![(String::new(), SenderSplit::trivial(p.clone()))]),
        2 => g.iter().map(|&a| Ok((format!("{name}={a:.4}"), erasure_split(p, a)?))).collect(),
        3 => g
            .iter()
            .flat_map(|&a| g.iter().map(move |&b| (a, b)))
            .map(|(a, b)| Ok((format!("{name}'={a:.4},{name}''={b:.4}"), compose_three_layer(p, a, b)?.split)))
            .collect(),
        _ => Err(Error::InvalidParameter(format!(
            "discrete channels support up to 3 layers per sender, got {layers}"
        ))),
    }
}

/// Every split the region sweeps: the fixed symbol-map layering of a Gaussian channel,
/// or erasure-based splits over the grid otherwise.
fn splits_for(ch: &Channel, joint: &JointChannel, kl: (usize, usize), grid: usize) -> Result<Vec<(String, LayerSplit)>> {
    if let Some((xm, wm)) = ch.maps() {
        if kl != (xm.num_layers(), wm.num_layers()) {
            return Err(Error::InvalidParameter(format!(
                "the symbol maps have a {}-{} split, not {}-{}",
                xm.num_layers(),
                wm.num_layers(),
                kl.0,
                kl.1
            )));
        }
        let s = LayerSplit::new(vec![SenderSplit::uniform_symbol_map(xm)?, SenderSplit::uniform_symbol_map(wm)?]);
        return Ok(vec![(format!("{}/{}", xm.name(), wm.name()), s)]);
    }
    let xs = sender_splits(joint, 0, kl.0, grid)?;
    let ws = sender_splits(joint, 1, kl.1, grid)?;
    Ok(xs
        .iter()
        .flat_map(|(lx, x)| {
            ws.iter().map(move |(lw, w)| {
                let label = [lx.as_str(), lw.as_str()].iter().filter(|s| !s.is_empty()).copied().collect::<Vec<_>>();
                (label.join(","), LayerSplit::new(vec![x.clone(), w.clone()]))
            })
        })
        .collect())
}

fn default_split(ch: &Channel) -> (usize, usize) {
    ch.maps().map_or((2, 1), |(x, w)| (x.num_layers(), w.num_layers()))
}

fn labeled(base: &str, params: &str) -> String {
    if params.is_empty() {
        base.to_string()
    } else {
        format!("{base}({params})")
    }
}

/// Region of a named scheme.
pub fn scheme_region(ch: &Channel, scheme: &str, split: Option<&str>, order: Option<&str>, grid: usize) -> Result<RateRegion2> {
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    let joint = ch.to_joint()?;
    let cache = MiCache::new(joint.clone());
    let kl = split.map(parse_split).transpose()?;
    match scheme {
        "ian" | "scd" | "sd" | "mix" | "snd" => {
            let info = IcInfo::new(&cache)?;
            Ok(match scheme {
                "ian" => info.ian(),
                "scd" => info.scd(),
                "sd" => info.sd(0).intersect(&info.sd(1)),
                "mix" => info.mix_and_match(),
                _ => info.snd(),
            })
        }
        "swsc" => {
            let text = order.unwrap_or("d1=m1@-1>m2@0;d2=m1@-1>m2@-1");
            let orders: OrderPair = text.parse()?;
            let kl = kl.unwrap_or(default_split(ch));
            orders.d1.check_feasible(kl.0, kl.1)?;
            orders.d2.check_feasible(kl.0, kl.1)?;
            let splits = splits_for(ch, &joint, kl, grid)?;
            let rects: Vec<Conjunction> = splits
                .par_iter()
                .map(|(params, s)| {
                    let mi = Mi::new(&cache, s)?;
                    let r = region_swsc(&mi, &orders)?;
                    let (a, b) = r.conjunctions[0].as_rect().expect("swsc regions are rectangles");
                    Ok(Conjunction::rect(labeled(&orders.to_string(), params), a, b))
                })
                .collect::<Result<_>>()?;
            let mut r = RateRegion2::new(rects);
            r.prune_rectangles();
            Ok(r)
        }
        "swsc-union" => {
            if ch.maps().is_none() {
                return region_swsc_union(&cache, OrderFamily::Thm2, grid);
            }
            let kl = kl.unwrap_or(default_split(ch));
            let (params, s) = splits_for(ch, &joint, kl, grid)?.remove(0);
            let mi = Mi::new(&cache, &s)?;
            let mut rects = Vec::new();
            for pair in OrderPair::candidates(kl.0, kl.1) {
                let (a, b) = region_swsc(&mi, &pair)?.conjunctions[0].as_rect().expect("swsc regions are rectangles");
                rects.push(Conjunction::rect(labeled(&pair.to_string(), &params), a, b));
            }
            let mut r = RateRegion2::new(rects);
            r.prune_rectangles();
            Ok(r)
        }
        "rs" => {
            let text = order.unwrap_or("d1=m1.1>m2>m1.2;d2=m1.1>m1.2>m2");
            let (d1, d2) = PartOrder::parse_pair(text)?;
            let kl = kl.unwrap_or_else(|| {
                let count = |i: usize| {
                    d1.parts.iter().chain(&d2.parts).filter(|r| r.input == i).map(|r| r.layer + 1).max().unwrap_or(1)
                };
                (count(0), count(1))
            });
            let splits = splits_for(ch, &joint, kl, grid)?;
            let parts: Vec<Conjunction> = splits
                .par_iter()
                .map(|(params, s)| {
                    let mi = Mi::new(&cache, s)?;
                    let r = region_rate_splitting(&mi, &d1, &d2)?;
                    let mut c = r.conjunctions.into_iter().next().expect("projection yields one conjunction");
                    c.label = labeled("rs", params);
                    Ok(c)
                })
                .collect::<Result<_>>()?;
            Ok(RateRegion2::new(parts))
        }
        "hk" => {
            let g = unit_grid(grid);
            let params: Vec<(f64, f64)> = g.iter().flat_map(|&a| g.iter().map(move |&b| (a, b))).collect();
            let parts: Vec<Conjunction> = params
                .par_iter()
                .map(|&(a, b)| {
                    let sx = erasure_split(joint.input_pmf(0), a)?;
                    let sw = erasure_split(joint.input_pmf(1), b)?;
                    let four = joint.expand_inputs(&[
                        (sx.layers().to_vec(), sx.table().to_vec()),
                        (sw.layers().to_vec(), sw.table().to_vec()),
                    ])?;
                    let r = hk_mac_region(&MiCache::new(four))?.project_to_2()?;
                    let mut c = r.conjunctions.into_iter().next().expect("projection yields one conjunction");
                    c.label = format!("hk(a={a:.4},b={b:.4})");
                    Ok(c)
                })
                .collect::<Result<_>>()?;
            Ok(RateRegion2::new(parts))
        }
        _ => Err(Error::Unknown { kind: "scheme", name: scheme.to_string() }),
    }
}

fn cmd_region(a: &RegionArgs) -> Result<i32> {
    let ch = Channel::load(&a.channel)?;
    let region = scheme_region(&ch, &a.scheme, a.split.as_deref(), a.order.as_deref(), a.grid)?;
    let text = if a.out.as_deref().is_some_and(is_json) {
        pretty(&json!({ "scheme": a.scheme, "conjunctions": region.constraints_json() }))
    } else {
        region.boundary_csv(BOUNDARY_SAMPLES)
    };
    write_out(a.out.as_deref(), &text)?;
    Ok(0)
}

/// Loads the simulation config and applies the command-line overrides.
pub fn sim_config(a: &SimArgs) -> Result<SimConfig> {
    let mut v = match &a.config {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|source| Error::Io { path: p.display().to_string(), source })?;
            serde_json::from_str::<Value>(&text)?
        }
        None => json!({}),
    };
    let obj = v
        .as_object_mut()
        .ok_or_else(|| Error::InvalidConfig("the config must be a JSON object".into()))?;
    for o in &a.overrides {
        let (k, val) = o
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("override `{o}` is not key=value")))?;
        let parsed = serde_json::from_str(val).unwrap_or_else(|_| Value::String(val.to_string()));
        obj.insert(k.trim().to_string(), parsed);
    }
    if let Some(s) = a.seed {
        obj.insert("master_seed".into(), json!(s));
    }
    if let Some(o) = &a.order {
        obj.insert("orders".into(), json!(o));
    }
    let cfg: SimConfig = serde_json::from_value(v).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    if let Some(o) = &cfg.orders {
        o.parse::<OrderPair>()?;
    }
    Ok(cfg)
}

/// The sibling `.json` path of a `.csv` output.
fn report_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn cmd_simulate(a: &SimArgs) -> Result<i32> {
    let base = sim_config(a)?;
    let inrs = if a.inr.is_empty() { vec![base.inr_db] } else { a.inr.clone() };
    let rates: Vec<[f64; 2]> = if a.rates.is_empty() { vec![base.rates] } else { a.rates.iter().map(|&r| [r, r]).collect() };
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for &inr in &inrs {
        for &r in &rates {
            let cfg = SimConfig { inr_db: inr, rates: r, ..base.clone() };
            let res = simulate(&cfg)?;
            for rep in [&res.swsc, &res.ian] {
                rows.push(SimRow {
                    inr_db: inr,
                    rate_bits: r[0],
                    bler_stream1: rep.streams[0].bler,
                    bler_stream2: rep.streams[1].bler,
                    scheme: rep.scheme.clone(),
                });
            }
            runs.push(json!({ "inr_db": inr, "rates": r, "swsc": res.swsc, "ian": res.ian }));
        }
    }
    let report = pretty(&json!({ "config": base, "runs": runs }));
    let csv = SimRow::csv(&rows);
    match a.out.as_deref() {
        Some(p) if is_json(p) => write_out(Some(p), &report)?,
        Some(p) => {
            write_out(Some(p), &csv)?;
            write_out(Some(&report_path(p)), &report)?;
        }
        None => write_out(None, &csv)?,
    }
    Ok(0)
}

fn cmd_curve(a: &SimArgs) -> Result<i32> {
    let base = sim_config(a)?;
    let inrs = if a.inr.is_empty() { vec![6.0, 7.0, 8.0, 9.0, 10.0] } else { a.inr.clone() };
    let rep = sweep_curve(&base, &inrs, &a.rates)?;
    let mut csv = String::from("inr_db,ian_gaussian,ian_marginal,swcm,snd,swcm_over_ian,sim_swsc_rate,sim_ian_rate\n");
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for (t, s) in rep.theory.iter().zip(&rep.simulated) {
        writeln!(
            csv,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
            t.inr_db,
            t.ian_gaussian,
            t.ian_marginal,
            t.swcm,
            t.snd,
            t.swcm / t.ian_gaussian,
            opt(s.swsc_rate),
            opt(s.ian_rate)
        )
        .unwrap();
    }
    let report = pretty(&serde_json::to_value(&rep)?);
    match a.out.as_deref() {
        Some(p) if is_json(p) => write_out(Some(p), &report)?,
        Some(p) => {
            write_out(Some(p), &csv)?;
            write_out(Some(&report_path(p)), &report)?;
        }
        None => write_out(None, &csv)?,
    }
    Ok(0)
}

fn cmd_schedule(a: &ScheduleArgs) -> Result<i32> {
    let (k, l) = parse_split(&a.split)?;
    let x = BlockSchedule::new(k, a.blocks)?;
    let w = BlockSchedule::new(l, a.blocks)?;
    let text = if a.out.as_deref().is_some_and(is_json) {
        pretty(&json!({ "split": a.split, "blocks": a.blocks, "senders": [x, w] }))
    } else {
        format!("{}{}", x.table(1, "X"), w.table(2, "W").split_once('\n').map_or("", |(_, rows)| rows))
    };
    write_out(a.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let suites: Vec<Suite> = if a.suite == "all" { Suite::ALL.to_vec() } else { vec![a.suite.parse()?] };
    let mut ok = true;
    let mut reports = Vec::new();
    for s in suites {
        let r = run_suite(s)?;
        println!("{r}");
        ok &= r.passed();
        reports.push(r);
    }
    if let Some(p) = &a.out {
        write_out(Some(p), &pretty(&serde_json::to_value(&reports)?))?;
    }
    Ok(if ok { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_syntax() {
        assert_eq!(parse_split("3-1").unwrap(), (3, 1));
        assert!(parse_split("3").is_err());
        assert!(parse_split("0-1").is_err());
        assert!(parse_split("a-1").is_err());
    }

    #[test]
    fn infeasible_order_maps_to_three() {
        assert_eq!(exit_code(&Error::InfeasibleOrder("x".into())), 3);
        assert_eq!(exit_code(&Error::InvalidConfig("x".into())), 2);
    }
}
