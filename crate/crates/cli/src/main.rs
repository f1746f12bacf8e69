use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use sepfair_core::adversary::{min_window_value, pie_threshold_witnesses, FindSumRw, HasLowValue};
use sepfair_core::cake::{approx_mms, decide, mms_fair_allocation, ordinal_allocation_2n_minus_1};
use sepfair_core::exact::{exact_mms, exact_mms_allocation, pie_mms_enum};
use sepfair_core::fairness::{envy_free_pie, envy_free_sperner, equitable_bisection, equitable_pie, fairness_check};
use sepfair_core::oracle::transcript_jsonl;
use sepfair_core::pie::{
    pie_allocation_ordinal, pie_approx_mms, pie_decide_equals_one_over_k, pie_decide_positive, pie_via_cake_allocation,
    PieCakeMode,
};
use sepfair_core::rational::{fmt_q, mod1, one, parse_q, pow2_inv, q, to_f64};
use sepfair_core::{
    Allocation, Error, Instance, Interval, Partition, QueryRecord, QuerySession, Relation, RwOracle, Topology, Valuation,
    Q,
};

#[derive(Parser)]
#[command(name = "sepfair", version, about = "Fair division of a cake or pie with separated pieces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Print rationals as floating point numbers.
    #[arg(long, global = true)]
    float: bool,
    /// Write the query transcript as JSON lines.
    #[arg(long, global = true, value_name = "PATH")]
    transcript: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Exact maximin share of one agent.
    MmsExact {
        #[command(flatten)]
        inst: InstanceArg,
        /// Number of pieces (default: number of agents).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        agent: usize,
    },
    /// Maximin share within epsilon through queries.
    MmsApprox {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        agent: usize,
        #[arg(long, default_value = "1/1000000")]
        epsilon: String,
    },
    /// Compare a cake maximin share with a threshold.
    Decide {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long, value_enum)]
        rel: Rel,
        #[arg(long)]
        r: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        agent: usize,
    },
    /// Allocate one piece per agent.
    Allocate {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(long, value_enum)]
        criterion: Criterion,
        /// Tolerance for ef and eq; with mms, use approximate shares.
        #[arg(long)]
        epsilon: Option<String>,
        /// Pie mms: every agent gets its ell-out-of-(ell n + 1) share.
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// Pie mms: explicit comma-separated thresholds.
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<String>>,
    },
    /// Pie share tests for one agent.
    PieDecide {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(value_enum)]
        test: PieTest,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        agent: usize,
    },
    /// Envy, equitability, separation and share report.
    Check {
        #[command(flatten)]
        inst: InstanceArg,
        /// Allocation JSON as written by `allocate`.
        #[arg(long)]
        allocation: PathBuf,
    },
    /// Run a fixed-budget solver against an adversary and falsify it.
    Adversary {
        #[arg(value_enum)]
        kind: AdversaryKind,
        #[arg(long)]
        s: String,
        /// Threshold for haslowvalue.
        #[arg(long, default_value = "1/8")]
        q: String,
        /// Number of parts for pie-witness.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        budget: usize,
    },
}

#[derive(Args)]
struct InstanceArg {
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rel {
    Atleast,
    Greater,
    Equal,
}

#[derive(Clone, Copy, ValueEnum)]
enum Criterion {
    Mms,
    Ordinal,
    Ef,
    Eq,
}

#[derive(Clone, Copy, ValueEnum)]
enum PieTest {
    OneOverK,
    Positive,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryKind {
    Findsum,
    Haslowvalue,
    PieWitness,
}

enum Failure {
    Input(String),
    Protocol(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ProtocolFailure { .. } => Failure::Protocol(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Run = Result<Value, Failure>;

/// Transcripts gathered during a run, one list per agent.
#[derive(Default)]
struct Transcripts(Vec<Vec<QueryRecord>>);

impl Transcripts {
    fn push(&mut self, records: &[QueryRecord]) {
        self.0.push(records.to_vec());
    }

    fn sessions(&mut self, sessions: &[QuerySession]) {
        for s in sessions {
            self.push(s.transcript());
        }
    }

    fn total(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }

    fn write(&self, path: &Path) -> Result<(), Failure> {
        let mut out = String::new();
        for (agent, records) in self.0.iter().enumerate() {
            for line in transcript_jsonl(records).lines() {
                let mut v: Value = serde_json::from_str(line).expect("transcript line is JSON");
                v["agent"] = json!(agent);
                out.push_str(&v.to_string());
                out.push('\n');
            }
        }
        fs::write(path, out).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut transcripts = Transcripts::default();
    let result = run(&cli.command, &mut transcripts).and_then(|v| {
        if let Some(path) = &cli.transcript {
            transcripts.write(path)?;
        }
        Ok(v)
    });
    match result {
        Ok(mut v) => {
            if cli.float {
                floatify(&mut v);
            }
            match cli.output {
                Output::Json => println!("{}", serde_json::to_string_pretty(&v).unwrap()),
                Output::Table => print!("{}", table(&v)),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Protocol(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: &Command, tr: &mut Transcripts) -> Run {
    match cmd {
        Command::MmsExact { inst, n, agent } => {
            let inst = load(&inst.instance)?;
            let v = agent_of(&inst, *agent)?;
            let n = n.unwrap_or(inst.agents.len());
            let (mms, p) = match inst.topology {
                Topology::Cake => exact_mms(v, n, &inst.s)?,
                Topology::Pie => pie_mms_enum(v, n, &inst.s)?,
            };
            Ok(json!({
                "agent": agent,
                "n": n,
                "s": fmt_q(&inst.s),
                "mms": fmt_q(&mms),
                "partition": partition_json(&p, v)?,
            }))
        }
        Command::MmsApprox { inst, n, agent, epsilon } => {
            let inst = load(&inst.instance)?;
            let eps = rational(epsilon, "epsilon")?;
            let n = n.unwrap_or(inst.agents.len());
            let v = agent_of(&inst, *agent)?;
            let mut o = QuerySession::new(v.clone());
            let (r, p) = match inst.topology {
                Topology::Cake => approx_mms(&mut o, n, &inst.s, &eps)?,
                Topology::Pie => pie_approx_mms(&mut o, n, &inst.s, &eps)?,
            };
            tr.push(o.transcript());
            Ok(json!({
                "agent": agent,
                "n": n,
                "epsilon": fmt_q(&eps),
                "mms_lower": fmt_q(&r),
                "partition": partition_json(&p, v)?,
                "queries": o.query_count(),
            }))
        }
        Command::Decide { inst, rel, r, n, agent } => {
            let inst = load(&inst.instance)?;
            let r = rational(r, "r")?;
            let n = n.unwrap_or(inst.agents.len());
            let v = agent_of(&inst, *agent)?;
            let rel = match rel {
                Rel::Atleast => Relation::AtLeast,
                Rel::Greater => Relation::Greater,
                Rel::Equal => Relation::Equal,
            };
            let mut o = QuerySession::new(v.clone());
            let d = decide(&mut o, n, &inst.s, &r, rel)?;
            tr.push(o.transcript());
            let mut out = json!({ "answer": d.answer, "queries": o.query_count() });
            if let Some(w) = &d.witness {
                out["witness"] = partition_json(w, v)?;
            }
            Ok(out)
        }
        Command::Allocate { inst, criterion, epsilon, ell, thresholds } => {
            let inst = load(&inst.instance)?;
            let eps = epsilon.as_deref().map(|e| rational(e, "epsilon")).transpose()?;
            let (alloc, queries) = allocate(&inst, *criterion, eps, *ell, thresholds.as_deref(), tr)?;
            allocation_json(&alloc, &inst.agents, queries)
        }
        Command::PieDecide { inst, test, k, agent } => {
            let inst = load(&inst.instance)?;
            if inst.topology != Topology::Pie {
                return Err(Failure::Input("pie-decide needs a pie instance".into()));
            }
            let v = agent_of(&inst, *agent)?;
            let mut o = QuerySession::new(v.clone());
            let mut out = match test {
                PieTest::OneOverK => {
                    let (answer, w) = pie_decide_equals_one_over_k(&mut o, *k, &inst.s)?;
                    let mut out = json!({ "answer": answer });
                    if let Some(w) = &w {
                        out["witness"] = partition_json(w, v)?;
                    }
                    out
                }
                PieTest::Positive => json!({ "answer": pie_decide_positive(&mut o, *k, &inst.s)? }),
            };
            out["queries"] = json!(o.query_count());
            tr.push(o.transcript());
            Ok(out)
        }
        Command::Check { inst, allocation } => {
            let inst = load(&inst.instance)?;
            let text = read(allocation)?;
            let alloc = parse_allocation(&text)?;
            if alloc.topology != inst.topology {
                return Err(Failure::Input("allocation topology differs from the instance".into()));
            }
            let report = fairness_check(&alloc, &inst.agents)?;
            Ok(serde_json::to_value(report).unwrap())
        }
        Command::Adversary { kind, s, q: qv, k, budget } => {
            let s = rational(s, "s")?;
            match kind {
                AdversaryKind::Findsum => findsum_demo(&s, *budget, tr),
                AdversaryKind::Haslowvalue => haslowvalue_demo(&s, &rational(qv, "q")?, *budget, tr),
                AdversaryKind::PieWitness => pie_witness_demo(*k, &s, *budget, tr),
            }
        }
    }
}

fn allocate(
    inst: &Instance,
    criterion: Criterion,
    eps: Option<Q>,
    ell: usize,
    thresholds: Option<&[String]>,
    tr: &mut Transcripts,
) -> Result<(Allocation, Option<usize>), Failure> {
    let vs = &inst.agents;
    let s = &inst.s;
    let n = vs.len();
    let mut sessions: Vec<QuerySession> = vs.iter().cloned().map(QuerySession::new).collect();
    let tol = || eps.clone().unwrap_or_else(|| q(1, 1000));
    let alloc = match (criterion, inst.topology) {
        (Criterion::Mms, Topology::Cake) => match &eps {
            None => {
                let (alloc, _, queries) = exact_mms_allocation(vs, s)?;
                return Ok((alloc, Some(queries)));
            }
            Some(e) => {
                let mut shares = Vec::with_capacity(n);
                for o in sessions.iter_mut() {
                    shares.push(approx_mms(o, n, s, e)?.0);
                }
                mms_fair_allocation(&mut sessions, s, &shares)?
            }
        },
        (Criterion::Mms, Topology::Pie) => match (&eps, thresholds) {
            (Some(e), None) if ell == 1 => pie_via_cake_allocation(&mut sessions, s, &PieCakeMode::Approx(e.clone()))?,
            (_, Some(ts)) => {
                let ts = ts.iter().map(|t| rational(t, "threshold")).collect::<Result<Vec<_>, _>>()?;
                pie_allocation_ordinal(&mut sessions, s, &vec![ell; n], &ts)?
            }
            (None, None) if ell == 1 => {
                let ts = vs.iter().map(|v| Ok(pie_mms_enum(v, n + 1, s)?.0)).collect::<Result<Vec<_>, Error>>()?;
                pie_allocation_ordinal(&mut sessions, s, &vec![1; n], &ts)?
            }
            _ => return Err(Failure::Input("ell > 1 needs --thresholds".into())),
        },
        (Criterion::Ordinal, Topology::Cake) => ordinal_allocation_2n_minus_1(&mut sessions, s)?,
        (Criterion::Ordinal, Topology::Pie) => pie_via_cake_allocation(&mut sessions, s, &PieCakeMode::Ordinal2n)?,
        (Criterion::Ef, Topology::Cake) => return Ok((envy_free_sperner(vs, s, &tol())?, None)),
        (Criterion::Ef, Topology::Pie) => return Ok((envy_free_pie(vs, s, &tol())?, None)),
        (Criterion::Eq, topology) => {
            let order: Vec<usize> = (0..n).collect();
            let alloc = match topology {
                Topology::Cake => equitable_bisection(vs, s, &order, &tol())?,
                Topology::Pie => equitable_pie(vs, s, &order, &tol())?,
            };
            return Ok((alloc, None));
        }
    };
    tr.sessions(&sessions);
    Ok((alloc, Some(tr.total())))
}

fn findsum_demo(s: &Q, budget: usize, tr: &mut Transcripts) -> Run {
    let mut o = FindSumRw::new(s.clone())?;
    // Two agents ask 2(bits + 1) cake queries.
    let bits = (budget / 2).saturating_sub(1).max(1) as u32;
    let claimed = approx_mms(&mut o, 2, s, &pow2_inv(bits))?.0;
    let queries = o.query_count();
    let v = o.falsify(&claimed)?;
    let truth = exact_mms(&v, 2, s)?.0;
    tr.push(o.transcript());
    Ok(json!({
        "adversary": "findsum",
        "s": fmt_q(s),
        "queries": queries,
        "claimed_mms": fmt_q(&claimed),
        "actual_mms": fmt_q(&truth),
        "falsified": truth != claimed,
        "valuation": valuation_json(&v),
    }))
}

fn haslowvalue_demo(s: &Q, qv: &Q, budget: usize, tr: &mut Transcripts) -> Run {
    let mut o = HasLowValue::new(s.clone(), qv.clone())?;
    let mut yes = false;
    for i in 0..budget {
        let x = q(i as i64, budget as i64);
        if o.eval(&x, &mod1(&(&x + s)))? <= *qv {
            yes = true;
            break;
        }
    }
    let queries = o.query_count();
    let v = o.finalize(yes)?;
    let (low, at) = min_window_value(&v, s)?;
    tr.push(o.transcript());
    Ok(json!({
        "adversary": "haslowvalue",
        "s": fmt_q(s),
        "q": fmt_q(qv),
        "queries": queries,
        "answer": yes,
        "min_window_value": fmt_q(&low),
        "min_window_start": fmt_q(&at),
        "contradicted": (low <= *qv) != yes,
        "valuation": valuation_json(&v),
    }))
}

fn pie_witness_demo(k: usize, s: &Q, budget: usize, tr: &mut Transcripts) -> Run {
    let mut o = QuerySession::new(Valuation::uniform(Topology::Pie));
    // Marks at eps / 2 cost about 2 / eps cuts.
    let eps = q(2, budget.max(2) as i64);
    let (claimed, _) = pie_approx_mms(&mut o, k, s, &eps)?;
    let w = pie_threshold_witnesses(k, s, o.transcript())?;
    let low_share = one() / Q::from_integer(k.into()) - s;
    let high_min = w.partition.min_value(&w.high)?;
    tr.push(o.transcript());
    Ok(json!({
        "adversary": "pie-witness",
        "k": k,
        "s": fmt_q(s),
        "queries": o.query_count(),
        "claimed_mms": fmt_q(&claimed),
        "low_mms": fmt_q(&low_share),
        "high_partition": partition_json(&w.partition, &w.high)?,
        "high_partition_min": fmt_q(&high_min),
        "low": valuation_json(&w.low),
        "high": valuation_json(&w.high),
        "replays_low": o.replays_on(&w.low),
        "replays_high": o.replays_on(&w.high),
    }))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    Instance::from_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn agent_of(inst: &Instance, i: usize) -> Result<&Valuation, Failure> {
    inst.agents
        .get(i)
        .ok_or_else(|| Failure::Input(format!("agent {i} out of range ({} agents)", inst.agents.len())))
}

fn rational(text: &str, what: &str) -> Result<Q, Failure> {
    parse_q(text).map_err(|e| Failure::Input(format!("{what}: {e}")))
}

fn partition_json(p: &Partition, v: &Valuation) -> Result<Value, Failure> {
    p.pieces
        .iter()
        .map(|iv| Ok(json!({ "left": fmt_q(&iv.left), "right": fmt_q(&iv.right), "value": fmt_q(&v.value(iv)?) })))
        .collect::<Result<Vec<_>, Error>>()
        .map(Value::Array)
        .map_err(Failure::from)
}

fn valuation_json(v: &Valuation) -> Value {
    serde_json::to_value(v.to_file()).unwrap()
}

fn allocation_json(alloc: &Allocation, vs: &[Valuation], queries: Option<usize>) -> Run {
    let values = alloc.values(vs)?;
    let pieces: Vec<Value> = alloc
        .pieces
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(agent, (iv, val))| {
            json!({ "agent": agent, "left": fmt_q(&iv.left), "right": fmt_q(&iv.right), "value": fmt_q(val) })
        })
        .collect();
    let mut out = json!({
        "topology": alloc.topology,
        "s": fmt_q(&alloc.s),
        "pieces": pieces,
        "values": values.iter().map(fmt_q).collect::<Vec<_>>(),
    });
    if let Some(n) = queries {
        out["query_count_total"] = json!(n);
    }
    Ok(out)
}

fn parse_allocation(text: &str) -> Result<Allocation, Failure> {
    let bad = |m: &str| Failure::Input(format!("allocation: {m}"));
    let v: Value = serde_json::from_str(text)
        .map_err(|e| bad(&format!("line {} column {}: {e}", e.line(), e.column())))?;
    let topology: Topology =
        serde_json::from_value(v["topology"].clone()).map_err(|_| bad("missing or unknown topology"))?;
    let field = |obj: &Value, key: &str| -> Result<Q, Failure> {
        let t = obj[key].as_str().ok_or_else(|| bad(&format!("missing string field {key}")))?;
        rational(t, key)
    };
    let s = field(&v, "s")?;
    let mut pieces = v["pieces"].as_array().ok_or_else(|| bad("missing pieces"))?.clone();
    // Agent order, when given, wins over file order.
    pieces.sort_by_key(|p| p["agent"].as_u64());
    let pieces = pieces
        .iter()
        .map(|p| Ok(Interval::new(field(p, "left")?, field(p, "right")?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(Allocation::new(topology, s, pieces))
}

/// Replaces every rational string by its floating point value.
fn floatify(v: &mut Value) {
    match v {
        Value::String(t) => {
            if let Ok(x) = parse_q(t) {
                *v = json!(to_f64(&x));
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(floatify),
        Value::Object(m) => m.values_mut().for_each(floatify),
        _ => {}
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(t) => t.clone(),
        other => other.to_string(),
    }
}

/// Scalars as `key: value`; arrays of objects as tab-separated rows.
fn table(v: &Value) -> String {
    let mut out = String::new();
    let Value::Object(m) = v else {
        return format!("{}\n", scalar(v));
    };
    let mut blocks: Vec<(&String, &Vec<Value>)> = Vec::new();
    for (k, x) in m {
        match x {
            Value::Array(rows) if rows.iter().all(Value::is_object) && !rows.is_empty() => blocks.push((k, rows)),
            Value::Array(xs) => {
                out.push_str(&format!("{k}: {}\n", xs.iter().map(scalar).collect::<Vec<_>>().join(" ")))
            }
            Value::Object(_) => out.push_str(&format!("{k}: {x}\n")),
            _ => out.push_str(&format!("{k}: {}\n", scalar(x))),
        }
    }
    for (k, rows) in blocks {
        let cols: Vec<&String> = rows[0].as_object().map(Map::keys).into_iter().flatten().collect();
        out.push_str(&format!("\n{k}\n"));
        out.push_str(&cols.iter().map(|c| c.as_str()).collect::<Vec<_>>().join("\t"));
        out.push('\n');
        for r in rows {
            out.push_str(&cols.iter().map(|c| scalar(&r[c.as_str()])).collect::<Vec<_>>().join("\t"));
            out.push('\n');
        }
    }
    out
}

