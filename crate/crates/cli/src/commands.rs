use std::fmt::Write as _;
use std::path::Path;

use mitest_core::io::{parse_counts_csv, parse_pairs_csv, tabulate_pairs, HeaderMode};
use mitest_core::sim::{self, Coupling, Marginal, SimConfig};
use mitest_core::{
    chi_bar_weights, independence_test, mi_hessian, multinomial_cov, null_weights, BinRule, BinningSpec,
    JointTable, NullReference, PValueMethod, ProbTable, Statistic, TestOptions,
};
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::report::{cell, num, nums, Outcome};

/// Usage errors exit with 2, data and numeric errors with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

impl From<mitest_core::Error> for CliError {
    fn from(e: mitest_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Upper bound on `|T2 − χ²| / χ²` accepted by `verify-conjecture`.
pub const IDENTITY_TOL: f64 = 1e-8;

pub fn run(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Test(a) => test(a),
        Command::Weights(a) => weights(a),
        Command::Simulate(a) => simulate(a),
        Command::Power(a) => power(a),
        Command::Bin(a) => bin(a),
        Command::VerifyConjecture(a) => verify(a),
        Command::Curve(a) => curve(a),
    }
}

fn rule_name(r: BinRule) -> String {
    match r {
        BinRule::Sqrt => "sqrt".into(),
        BinRule::Rice => "rice".into(),
        BinRule::Fixed(kx, ky) => format!("fixed:{kx}:{ky}"),
    }
}

fn marginal_name(m: &Marginal) -> String {
    match m {
        Marginal::Uniform(k) => format!("uniform:{k}"),
        Marginal::Binomial(m, q) => format!("binom:{m}:{q}"),
        Marginal::Categorical(p) => format!("categorical:{}", p.len()),
    }
}

fn coupling_name(c: Coupling) -> String {
    match c {
        Coupling::Independent => "independent".into(),
        Coupling::Checkerboard(s) => format!("checkerboard:{s}"),
    }
}

fn strategy_name(s: StrategyArg) -> &'static str {
    match s {
        StrategyArg::Width => "width",
        StrategyArg::Freq => "freq",
    }
}

fn config(command: &str, common: &Common) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(common.seed));
    m
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read '{}': {e}", path.display())))
}

fn in_file<T>(path: &Path, r: mitest_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

struct Loaded {
    table: JointTable,
    edges: Option<(Vec<f64>, Vec<f64>)>,
    warnings: Vec<String>,
}

fn load(input: &InputArgs, cfg: &mut Map<String, Value>) -> CliResult<Loaded> {
    cfg.insert("input".into(), json!(input.input.display().to_string()));
    let text = read(&input.input)?;
    match input.format {
        InputFormat::Counts => {
            cfg.insert("format".into(), json!("counts"));
            let table = in_file(&input.input, parse_counts_csv(&text))?;
            Ok(Loaded { table, edges: None, warnings: Vec::new() })
        }
        InputFormat::Pairs => {
            cfg.insert("format".into(), json!("pairs"));
            cfg.insert("rule".into(), json!(rule_name(input.rule)));
            cfg.insert("strategy".into(), json!(strategy_name(input.strategy)));
            let d = pairs_table(&input.input, &text, input.header, input.rule, input.strategy)?;
            Ok(Loaded { table: d.table, edges: Some((d.x_edges, d.y_edges)), warnings: d.warnings })
        }
    }
}

fn pairs_table(
    path: &Path,
    text: &str,
    header: bool,
    rule: BinRule,
    strategy: StrategyArg,
) -> CliResult<mitest_core::Discretized> {
    let mode = if header { HeaderMode::Present } else { HeaderMode::Auto };
    let data = in_file(path, parse_pairs_csv(text, mode))?;
    in_file(path, tabulate_pairs(&data, &BinningSpec::new(rule, strategy.into())))
}

fn require_seed(common: &Common, what: &str) -> CliResult<u64> {
    common.seed.ok_or_else(|| CliError::Usage(format!("{what} requires --seed")))
}

fn table_json(t: &JointTable) -> Value {
    json!(t.to_rows())
}

fn test(a: &TestArgs) -> CliResult<Outcome> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    if a.pvalue == MethodArg::Mc {
        require_seed(&a.common, "--pvalue mc")?;
        if a.mc_draws < 1 {
            return Err(CliError::Usage("--mc-draws must be >= 1".into()));
        }
    }
    let stat: Statistic = a.stat.into();
    let method = a.pvalue.resolve(a.mc_draws);
    let mut cfg = config("test", &a.common);
    cfg.insert("stat".into(), json!(stat.name()));
    cfg.insert("alpha".into(), num(a.alpha));
    cfg.insert("pvalue".into(), json!(method.name()));
    cfg.insert("mc_draws".into(), json!(matches!(method, PValueMethod::MonteCarlo { .. }).then_some(a.mc_draws)));
    let loaded = load(&a.input, &mut cfg)?;

    let mut opts = TestOptions::new(stat, method).alpha(a.alpha);
    if let Some(s) = a.common.seed {
        opts = opts.seed(s);
    }
    let r = in_file(&a.input.input, independence_test::<f64>(&loaded.table, &opts))?;
    let null = match &r.null {
        NullReference::Weights(w) => json!({ "weights": nums(w.lambdas()) }),
        NullReference::Dof(k) => json!({ "dof": k }),
    };
    let mut result = Map::new();
    result.insert("statistic".into(), json!(r.statistic.name()));
    result.insert("value".into(), num(r.value));
    result.insert("p_value".into(), num(r.p_value));
    result.insert("alpha".into(), num(r.alpha));
    result.insert("reject".into(), json!(r.reject));
    result.insert("method".into(), json!(r.method.name()));
    result.insert("fallback".into(), json!(r.fallback));
    result.insert("n".into(), json!(r.n));
    result.insert("dims".into(), json!([r.dims.0, r.dims.1]));
    result.insert("null".into(), null);
    result.insert("table".into(), table_json(&loaded.table));
    if let Some((x, y)) = &loaded.edges {
        result.insert("x_edges".into(), nums(x));
        result.insert("y_edges".into(), nums(y));
    }

    let mut csv = String::from("field,value\n");
    let _ = writeln!(csv, "statistic,{}", r.statistic.name());
    let _ = writeln!(csv, "value,{}", cell(r.value));
    let _ = writeln!(csv, "p_value,{}", cell(r.p_value));
    let _ = writeln!(csv, "alpha,{}", cell(r.alpha));
    let _ = writeln!(csv, "reject,{}", r.reject);
    let _ = writeln!(csv, "method,{}", r.method.name());
    let _ = writeln!(csv, "n,{}", r.n);
    let _ = writeln!(csv, "dims,{}x{}", r.dims.0, r.dims.1);

    let mut warnings = loaded.warnings;
    for w in r.warnings {
        if !warnings.contains(&w) {
            warnings.push(w);
        }
    }
    Ok(Outcome { config: cfg, key: "result", payload: Value::Object(result), csv, warnings })
}

fn weights(a: &WeightsArgs) -> CliResult<Outcome> {
    let mut cfg = config("weights", &a.common);
    let at = match a.at {
        WeightsAt::Product => "product",
        WeightsAt::Empirical => "empirical",
    };
    cfg.insert("at".into(), json!(at));
    let loaded = load(&a.input, &mut cfg)?;
    let t = &loaded.table;
    let w = match a.at {
        WeightsAt::Product => in_file(&a.input.input, null_weights::<f64>(t, None))?,
        WeightsAt::Empirical => {
            let p = ProbTable::<f64>::empirical(t);
            let run = || chi_bar_weights(&mi_hessian(&p)?, &multinomial_cov(&p)?);
            in_file(&a.input.input, run())?
        }
    };
    let result = json!({
        "dims": [t.rows(), t.cols()],
        "n": t.n(),
        "weights": nums(w.lambdas()),
        "sum": num(w.sum()),
        "variance": num(w.variance()),
    });
    let mut csv = String::from("index,weight\n");
    for (k, l) in w.lambdas().iter().enumerate() {
        let _ = writeln!(csv, "{k},{}", cell(*l));
    }
    Ok(Outcome { config: cfg, key: "result", payload: result, csv, warnings: loaded.warnings })
}

fn sim_config(s: &SimArgs, seed: u64, cfg: &mut Map<String, Value>) -> CliResult<SimConfig> {
    if s.n < 1 || s.reps < 1 {
        return Err(CliError::Usage("--n and --reps must be >= 1".into()));
    }
    let stat: Statistic = s.stat.into();
    cfg.insert("dist_x".into(), json!(marginal_name(&s.dist_x)));
    cfg.insert("dist_y".into(), json!(marginal_name(&s.dist_y)));
    cfg.insert("n".into(), json!(s.n));
    cfg.insert("reps".into(), json!(s.reps));
    cfg.insert("stat".into(), json!(stat.name()));
    cfg.insert("coupling".into(), json!(coupling_name(s.coupling)));
    Ok(SimConfig::new(s.dist_x.clone(), s.dist_y.clone(), s.n, s.reps, stat, seed).coupling(s.coupling))
}

fn simulate(a: &SimulateArgs) -> CliResult<Outcome> {
    let seed = require_seed(&a.common, "simulate")?;
    if a.bins < 1 {
        return Err(CliError::Usage("--bins must be >= 1".into()));
    }
    let mut cfg = config("simulate", &a.common);
    let sc = sim_config(&a.sim, seed, &mut cfg)?;
    cfg.insert("bins".into(), json!(a.bins));
    let study = sim::replicate_study(&sc)?;
    let hist = sim::histogram(&study.values, a.bins)?;
    let mut warnings = Vec::new();
    let ks = if sc.coupling == Coupling::Independent && study.values.len() >= 100 {
        let w = sim::true_null_weights(&sc)?;
        num(sim::ks_distance(&study.values, &w, Some(seed))?)
    } else {
        warnings.push("KS distance needs independent coupling and at least 100 replicates".to_string());
        Value::Null
    };
    if study.resamples > 0 {
        warnings.push(format!("{} draw(s) with an empty category were resampled", study.resamples));
    }
    let results = json!({
        "reps": sc.reps,
        "resamples": study.resamples,
        "ks_distance": ks,
        "histogram": hist.iter().map(|(lo, hi, c)| json!({ "lower": num(*lo), "upper": num(*hi), "count": c })).collect::<Vec<_>>(),
        "values": nums(&study.values),
    });
    let mut csv = String::from("rep,value\n");
    for (r, v) in study.values.iter().enumerate() {
        let _ = writeln!(csv, "{r},{}", cell(*v));
    }
    Ok(Outcome { config: cfg, key: "results", payload: results, csv, warnings })
}

fn power(a: &PowerArgs) -> CliResult<Outcome> {
    let seed = require_seed(&a.common, "power")?;
    if !(a.alpha > 0.0 && a.alpha <= 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1], got {}", a.alpha)));
    }
    let method = a.pvalue.resolve(a.mc_draws);
    let mut cfg = config("power", &a.common);
    let mut sc = sim_config(&a.sim, seed, &mut cfg)?;
    sc.weights_from_truth = a.true_weights;
    cfg.insert("alpha".into(), num(a.alpha));
    cfg.insert("pvalue".into(), json!(method.name()));
    cfg.insert("mc_draws".into(), json!(matches!(method, PValueMethod::MonteCarlo { .. }).then_some(a.mc_draws)));
    cfg.insert("true_weights".into(), json!(a.true_weights));
    let r = sim::estimate_size_power(&sc, a.alpha, method)?;
    let mut warnings = Vec::new();
    if r.resamples > 0 {
        warnings.push(format!("{} draw(s) with an empty category were resampled", r.resamples));
    }
    let results = json!({
        "rate": num(r.rate),
        "rejections": r.rejections,
        "reps": r.reps,
        "resamples": r.resamples,
    });
    let csv = format!("rate,rejections,reps,resamples\n{},{},{},{}\n", cell(r.rate), r.rejections, r.reps, r.resamples);
    Ok(Outcome { config: cfg, key: "results", payload: results, csv, warnings })
}

fn bin(a: &BinArgs) -> CliResult<Outcome> {
    let mut cfg = config("bin", &a.common);
    cfg.insert("input".into(), json!(a.input.display().to_string()));
    cfg.insert("rule".into(), json!(rule_name(a.rule)));
    cfg.insert("strategy".into(), json!(strategy_name(a.strategy)));
    let text = read(&a.input)?;
    let d = pairs_table(&a.input, &text, a.header, a.rule, a.strategy)?;
    let t = &d.table;
    let mut result = Map::new();
    result.insert("dims".into(), json!([t.rows(), t.cols()]));
    result.insert("n".into(), json!(t.n()));
    result.insert("x_edges".into(), nums(&d.x_edges));
    result.insert("y_edges".into(), nums(&d.y_edges));
    if let Some(l) = t.row_labels() {
        result.insert("row_labels".into(), json!(l));
    }
    if let Some(l) = t.col_labels() {
        result.insert("col_labels".into(), json!(l));
    }
    result.insert("table".into(), table_json(t));
    let mut csv = String::new();
    for row in t.to_rows() {
        let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(csv, "{}", line.join(","));
    }
    Ok(Outcome { config: cfg, key: "result", payload: Value::Object(result), csv, warnings: d.warnings })
}

fn verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let seed = require_seed(&a.common, "verify-conjecture")?;
    if a.trials < 1 {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    let mut cfg = config("verify-conjecture", &a.common);
    cfg.insert("dims".into(), json!(a.dims.map(|(i, j)| format!("{i}x{j}"))));
    cfg.insert("trials".into(), json!(a.trials));
    cfg.insert("tolerance".into(), num(IDENTITY_TOL));
    let shapes: Vec<(usize, usize)> = match a.dims {
        Some(d) => vec![d],
        None => (2..=6).flat_map(|i| (2..=6).map(move |j| (i, j))).collect(),
    };
    let mut results = Vec::new();
    let mut csv = String::from("dims,trials,max_gap,pass\n");
    for (k, &(i, j)) in shapes.iter().enumerate() {
        let gap = sim::verify_t2_chi2_identity((i, j), a.trials, seed.wrapping_add(k as u64))?;
        let pass = gap <= IDENTITY_TOL;
        results.push(json!({ "dims": format!("{i}x{j}"), "trials": a.trials, "max_gap": num(gap), "pass": pass }));
        let _ = writeln!(csv, "{i}x{j},{},{},{pass}", a.trials, cell(gap));
    }
    Ok(Outcome { config: cfg, key: "results", payload: Value::Array(results), csv, warnings: Vec::new() })
}

fn curve(a: &CurveArgs) -> CliResult<Outcome> {
    if a.points < 2 {
        return Err(CliError::Usage("--points must be >= 2".into()));
    }
    let mut cfg = config("curve", &a.common);
    cfg.insert("points".into(), json!(a.points));
    cfg.insert("surface".into(), json!(a.surface));
    let grid: Vec<f64> = (0..a.points).map(|k| 0.5 * k as f64 / (a.points - 1) as f64).collect();
    let c = sim::mi_curve_2x2(&grid)?;
    let mut results = Map::new();
    results.insert(
        "curve".into(),
        Value::Array(c.iter().map(|(p, mi)| json!({ "p11": num(*p), "mi": num(*mi) })).collect()),
    );
    let mut csv = String::from("p11,mi\n");
    for (p, mi) in &c {
        let _ = writeln!(csv, "{},{}", cell(*p), cell(*mi));
    }
    if let Some(res) = a.surface {
        if res < 1 {
            return Err(CliError::Usage("--surface must be >= 1".into()));
        }
        let s = sim::mi_surface_2x2(res)?;
        results.insert(
            "surface".into(),
            Value::Array(
                s.iter()
                    .map(|v| json!({ "p11": num(v[0]), "p21": num(v[1]), "p12": num(v[2]), "mi": num(v[3]) }))
                    .collect(),
            ),
        );
        csv.push_str("\np11,p21,p12,mi\n");
        for v in &s {
            let _ = writeln!(csv, "{},{},{},{}", cell(v[0]), cell(v[1]), cell(v[2]), cell(v[3]));
        }
    }
    Ok(Outcome { config: cfg, key: "results", payload: Value::Object(results), csv, warnings: Vec::new() })
}
