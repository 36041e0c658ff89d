use std::path::PathBuf;

use serde_json::{json, Value};

use ckzeta::analysis::{beta_integral_check_with, exponent_fit, limit_study};
use ckzeta::coefficients::{
    ck_mobius, ck_sweep, qk, CoefficientCache, CoefficientRecord, Method, SweepParams, FLOAT_MAX_N,
};
use ckzeta::config::{self, LabConfig};
use ckzeta::mobius::{mertens, mertens_growth_report, MertensTable};
use ckzeta::mp::{MpComplex, MpReal};
use ckzeta::series::{inv_zeta_pochhammer, CoefficientSet};
use ckzeta::verify::run_suites;
use ckzeta::{Error, Result};

use crate::output::{format_f64, metadata, render, Rendered, Report};
use crate::{Cli, Command, SourceArg};

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Ck(_) => "ck",
        Command::Sweep(_) => "sweep",
        Command::Invzeta(_) => "invzeta",
        Command::Mertens(_) => "mertens",
        Command::Qk(_) => "qk",
        Command::Fit(_) => "fit",
        Command::Limit(_) => "limit",
        Command::Verify(_) => "verify",
        Command::Beta(_) => "beta",
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    cache_path: Option<PathBuf>,
    cache: Option<CoefficientCache>,
}

impl Ctx<'_> {
    fn prec(&self) -> u32 {
        self.cli.global.precision
    }

    fn params(&self, n_cutoff: Option<u64>) -> SweepParams {
        SweepParams {
            target_precision: self.prec(),
            n_cutoff,
            segment_size: self.cli.global.segment_size,
        }
    }

    fn coefficients(
        &mut self,
        lo: u64,
        hi: u64,
        method: Method,
        n_cutoff: Option<u64>,
    ) -> Result<Vec<CoefficientRecord>> {
        if self.cache.is_none() {
            if let Some(p) = &self.cache_path {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                self.cache = Some(CoefficientCache::open(p)?);
            }
        }
        let params = self.params(n_cutoff);
        ck_sweep(lo..=hi, method, &params, self.cache.as_mut())
    }
}

fn resolve_cache(cli: &Cli) -> Option<PathBuf> {
    let g = &cli.global;
    if g.no_cache {
        return None;
    }
    g.cache
        .clone()
        .or_else(|| g.cache_dir.as_ref().map(|d| d.join("coefficients.jsonl")))
}

fn setup(cli: &Cli) -> Result<()> {
    if let Some(path) = &cli.global.config {
        let text = std::fs::read_to_string(path)?;
        let cfg: LabConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config::install(cfg)?;
    }
    if cli.global.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.jobs)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Rendered> {
    setup(cli)?;
    let mut ctx = Ctx {
        cli,
        cache_path: resolve_cache(cli),
        cache: None,
    };
    let report = match &cli.command {
        Command::Ck(a) => {
            let method = Method::from(a.method);
            let rec = match (method, a.n_cutoff) {
                (Method::Mobius, Some(n)) if !(2..=FLOAT_MAX_N).contains(&n) => ck_mobius(a.k, n, ctx.prec())?,
                _ => ctx.coefficients(a.k, a.k, method, a.n_cutoff)?.remove(0),
            };
            records_report(std::slice::from_ref(&rec), false)
        }
        Command::Sweep(a) => {
            if a.k_min > a.k_max {
                return Err(Error::Usage(format!("--k-min {} exceeds --k-max {}", a.k_min, a.k_max)));
            }
            let recs = ctx.coefficients(a.k_min, a.k_max, a.method.into(), a.n_cutoff)?;
            records_report(&recs, true)
        }
        Command::Invzeta(a) => invzeta(&mut ctx, a)?,
        Command::Mertens(a) => mertens_cmd(&ctx, a)?,
        Command::Qk(a) => {
            let q = qk(a.k, a.n_cutoff, ctx.prec())?;
            let scaled = q.value.mul(&MpReal::from_u64(a.k, 64).sqrt());
            let (v, r) = q.value.to_decimal_strings();
            let row = vec![
                a.k.to_string(),
                v,
                r,
                q.main_term.to_decimal_strings().0,
                q.integral_term.to_decimal_strings().0,
                a.n_cutoff.to_string(),
            ];
            let mut result = serde_json::to_value(&q).expect("json");
            result["sqrt_k_times_value"] = serde_json::to_value(&scaled).expect("json");
            Report {
                result,
                header: &["k", "value", "radius", "main_term", "integral_term", "truncation_n"],
                rows: vec![row],
                failed: false,
            }
        }
        Command::Fit(a) => {
            let recs = ctx.coefficients(a.k_min, a.k_max, a.method.into(), a.n_cutoff)?;
            let fit = exponent_fit(&recs, a.k_min, a.k_max)?;
            let rows = fit
                .points
                .iter()
                .map(|p| {
                    vec![
                        p.k.to_string(),
                        format_f64(p.log_k),
                        format_f64(p.log_abs_c),
                        format_f64(p.leverage),
                        p.high_leverage.to_string(),
                    ]
                })
                .collect();
            Report {
                result: serde_json::to_value(&fit).expect("json"),
                header: &["k", "log_k", "log_abs_c", "leverage", "high_leverage"],
                rows,
                failed: false,
            }
        }
        Command::Limit(a) => {
            if a.k_max < 4 {
                return Err(Error::Usage("--k-max must be at least 4".into()));
            }
            let recs = ctx.coefficients(2, a.k_max, a.method.into(), a.n_cutoff)?;
            let study = limit_study(&recs)?;
            let rows = study
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.k.to_string(),
                        r.c_k.to_decimal_strings().0,
                        r.scaled.to_decimal_strings().0,
                    ]
                })
                .collect();
            Report {
                result: serde_json::to_value(&study).expect("json"),
                header: &["k", "c_k", "scaled"],
                rows,
                failed: false,
            }
        }
        Command::Verify(a) => {
            let suites = run_suites(a.quick);
            for s in &suites {
                eprintln!("{} {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail);
            }
            let failed = suites.iter().any(|s| !s.passed);
            let rows = suites
                .iter()
                .map(|s| vec![s.name.to_string(), s.passed.to_string(), s.detail.clone()])
                .collect();
            Report {
                result: json!({ "passed": !failed, "suites": suites }),
                header: &["suite", "passed", "detail"],
                rows,
                failed,
            }
        }
        Command::Beta(a) => {
            let c = beta_integral_check_with(a.lambda, a.k, ctx.prec(), a.order, None)?;
            let row = vec![
                format_f64(a.lambda),
                a.k.to_string(),
                c.integral.to_decimal_strings().0,
                c.displayed.to_decimal_strings().0,
                c.half.to_decimal_strings().0,
                format_f64(c.residual_displayed),
                format_f64(c.residual_half),
                serde_json::to_value(c.better)
                    .expect("json")
                    .as_str()
                    .unwrap_or("")
                    .to_string(),
            ];
            Report {
                result: serde_json::to_value(&c).expect("json"),
                header: &[
                    "lambda",
                    "k",
                    "integral",
                    "displayed",
                    "half",
                    "residual_displayed",
                    "residual_half",
                    "better",
                ],
                rows: vec![row],
                failed: false,
            }
        }
    };
    let meta = metadata(cli, ctx.cache_path.as_deref());
    Ok(render(cli.global.format, meta, report))
}

fn record_value(r: &CoefficientRecord) -> Value {
    let mut v = serde_json::to_value(r).expect("json");
    if let Some(o) = v.as_object_mut() {
        o.remove("wall_time_ms");
    }
    v
}

fn records_report(recs: &[CoefficientRecord], many: bool) -> Report {
    let rows = recs
        .iter()
        .map(|r| {
            let (v, rad) = r.value.to_decimal_strings();
            vec![
                r.k.to_string(),
                r.method.to_string(),
                v,
                rad,
                r.error_bound.to_decimal_string(),
                r.precision_bits.to_string(),
                r.working_bits.to_string(),
                r.n_cutoff.map(|n| n.to_string()).unwrap_or_default(),
                serde_json::to_value(r.kernel)
                    .expect("json")
                    .as_str()
                    .unwrap_or("")
                    .to_string(),
            ]
        })
        .collect();
    let values: Vec<Value> = recs.iter().map(record_value).collect();
    Report {
        result: if many {
            Value::Array(values)
        } else {
            values.into_iter().next().unwrap_or(Value::Null)
        },
        header: &[
            "k",
            "method",
            "value",
            "radius",
            "error_bound",
            "precision_bits",
            "working_bits",
            "n_cutoff",
            "kernel",
        ],
        rows,
        failed: false,
    }
}

fn invzeta(ctx: &mut Ctx, a: &crate::InvzetaArgs) -> Result<Report> {
    if !a.s.is_finite() || !a.t.is_finite() {
        return Err(Error::Usage("s must be finite".into()));
    }
    let prec = ctx.prec();
    let mut recs = match a.source {
        SourceArg::Binomial => ctx.coefficients(0, a.k_max, Method::Binomial, None)?,
        SourceArg::Mobius => ctx.coefficients(0, a.k_max, Method::Mobius, Some(a.n_cutoff))?,
        SourceArg::Hybrid => {
            let top = a.binomial_max_k.min(a.k_max);
            ctx.coefficients(0, top, Method::Binomial, None)?
        }
    };
    if a.source == SourceArg::Hybrid && a.k_max > a.binomial_max_k {
        recs.extend(ctx.coefficients(a.binomial_max_k + 1, a.k_max, Method::Mobius, Some(a.n_cutoff))?);
    }
    let set = CoefficientSet::from_records(&recs);
    let s = MpComplex::from_f64(a.s, a.t, prec.max(64));
    let r = inv_zeta_pochhammer(&s, a.k_max, &set, prec)?;
    // s = 2m with K ≥ m − 1: every later P_k(m) vanishes.
    let exact_truncation = a.t == 0.0
        && a.s >= 2.0
        && a.s.fract() == 0.0
        && (a.s as u64).is_multiple_of(2)
        && a.k_max + 1 >= a.s as u64 / 2;
    let mut result = serde_json::to_value(&r).expect("json");
    result["exact_truncation"] = json!(exact_truncation);
    if let Some(e) = r.error() {
        result["error"] = json!(e.to_decimal_string());
    }
    result["c_0"] = serde_json::to_value(&set.get(0).expect("k = 0 present").value).expect("json");
    let re_s = r.partial_sum.re.to_decimal_strings().0;
    let im_s = r.partial_sum.im.to_decimal_strings().0;
    let radius = r.partial_sum.radius().to_decimal_string();
    let (ref_re, ref_im) = match &r.reference {
        Some(z) => (z.re.to_decimal_strings().0, z.im.to_decimal_strings().0),
        None => (String::new(), String::new()),
    };
    let region = serde_json::to_value(r.region)
        .expect("json")
        .as_str()
        .unwrap_or("")
        .to_string();
    Ok(Report {
        result,
        header: &[
            "K",
            "partial_sum_re",
            "partial_sum_im",
            "radius",
            "term_tail_estimate",
            "reference_re",
            "reference_im",
            "region",
        ],
        rows: vec![vec![
            a.k_max.to_string(),
            re_s,
            im_s,
            radius,
            format_f64(r.term_tail_estimate),
            ref_re,
            ref_im,
            region,
        ]],
        failed: false,
    })
}

fn mertens_cmd(ctx: &Ctx, a: &crate::MertensArgs) -> Result<Report> {
    let table = match &a.load {
        Some(p) => {
            let t = MertensTable::read_checkpoint(p)?;
            if t.x_max < a.x_max {
                return Err(Error::Usage(format!(
                    "checkpoint {} covers x ≤ {}, requested --x-max {}",
                    p.display(),
                    t.x_max,
                    a.x_max
                )));
            }
            t
        }
        None => mertens(a.x_max, ctx.cli.global.segment_size, a.checkpoint_every)?,
    };
    if let Some(p) = &a.save {
        table.write_checkpoint(p)?;
    }
    let mut points: Vec<u64> = a.at.clone();
    if !points.contains(&a.x_max) {
        points.push(a.x_max);
    }
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for &x in &points {
        if x == 0 || x > a.x_max {
            return Err(Error::Usage(format!("--at {x} is outside [1, {}]", a.x_max)));
        }
        let m = table.query(x)?;
        values.push(json!({ "x": x, "M": m }));
        rows.push(vec![x.to_string(), m.to_string()]);
    }
    let growth_min = a.growth_min.min(a.x_max);
    let growth = mertens_growth_report(&table, growth_min.max(1))?;
    let m_max = table.query(a.x_max)?;
    Ok(Report {
        result: json!({
            "x_max": a.x_max,
            "M": m_max,
            "values": values,
            "growth": growth,
        }),
        header: &["x", "M"],
        rows,
        failed: false,
    })
}
