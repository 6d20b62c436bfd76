use std::fs;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use roytw::greatest_root::{beta_exact_pvalue, beta_exact_quantile, smallest_root_critical_value, PValue, Probability};
use roytw::mc_oracle::{compare_tw_vs_mc, default_workers, sample_smallest_root, Comparison};
use roytw::tw::generate::{generate, render};
use roytw::tw::TwGrid;
use roytw::{
    cca, cca_null_test, cca_sequential_test, cov_equality_test, independence_test, manova_one_way, mlm_test,
    quantile_approx, sample_greatest_root, smallest_root_pvalue, DataMatrix, Error, GreatestRootParams,
    LinearHypothesis, SimConfig, TestOutcome, TracyWidom,
};

use crate::cli::{
    CompareArgs, GridRegenArgs, PvalueArgs, QuantileArgs, SimArgs, SimulateArgs, TestArgs, TestKind, TwArgs,
};
use crate::data::{read_matrix, Table};
use crate::output::{
    finite, params_csv, params_json, params_text, probability_views, pvalue_views, sci, sig4, Report, PARAM_HEADERS,
};

type Eval = fn(&TracyWidom, f64) -> roytw::Result<f64>;

const F_BOUND_LABEL: &str = "lower bound, anti-conservative";

pub fn tw(args: &TwArgs) -> Result<Report> {
    let dist = TracyWidom::new(args.order());
    let q = &args.query;
    let (name, inputs, eval): (&str, &[f64], Eval) = if let Some(v) = &q.cdf {
        ("cdf", v, TracyWidom::cdf)
    } else if let Some(v) = &q.sf {
        ("sf", v, TracyWidom::sf)
    } else if let Some(v) = &q.pdf {
        ("pdf", v, TracyWidom::pdf)
    } else if let Some(v) = &q.quantile {
        ("quantile", v, TracyWidom::quantile)
    } else {
        bail!("one of --cdf, --sf, --pdf or --quantile is required");
    };
    let mut results = Vec::new();
    let mut text = Vec::new();
    let mut csv = vec![vec!["input".to_owned(), "value".to_owned()]];
    for &x in inputs {
        let v = eval(&dist, x)?;
        results.push(json!({ "input": x, "value": v }));
        text.push(format!("F{} {name}({x}) = {}", args.order, sig4(v)));
        csv.push(vec![sci(x), sci(v)]);
    }
    Ok(Report {
        json: json!({ "order": args.order, "function": name, "results": results }),
        text,
        csv,
    })
}

pub fn quantile(args: &QuantileArgs) -> Result<Report> {
    let g = args.params.resolve()?;
    // with a single variable the smallest root is the largest one
    let exact_applies = if args.smallest {
        g.p() == 1.0
    } else {
        g.p().min(g.n()) == 1.0
    };
    let mut rows = Vec::new();
    let mut text = vec![params_text(&g)];
    let mut header = vec!["alpha".to_owned(), "theta_tw".to_owned()];
    if exact_applies {
        header.push("theta_exact".into());
    }
    let mut csv = vec![header];
    for &alpha in &args.alpha {
        let theta = if args.smallest {
            smallest_root_critical_value(&g, alpha)?
        } else {
            quantile_approx(&g, alpha)?
        };
        let exact = if exact_applies {
            Some(beta_exact_quantile(&g, alpha)?)
        } else {
            None
        };
        let mut row = json!({ "alpha": alpha, "theta_tw": theta });
        let mut line = format!("alpha {alpha}: theta_tw = {}", sig4(theta));
        let mut cells = vec![sci(alpha), sci(theta)];
        if let Some(e) = exact {
            row["theta_exact"] = e.into();
            line.push_str(&format!(", theta_exact = {}", sig4(e)));
            cells.push(sci(e));
        }
        rows.push(row);
        text.push(line);
        csv.push(cells);
    }
    Ok(Report {
        json: json!({ "params": params_json(&g), "root": root_name(args.smallest), "quantiles": rows }),
        text,
        csv,
    })
}

fn root_name(smallest: bool) -> &'static str {
    if smallest {
        "smallest"
    } else {
        "largest"
    }
}

pub fn pvalue(args: &PvalueArgs) -> Result<Report> {
    let g = args.params.resolve()?;
    if args.smallest {
        return smallest_pvalue(args.theta, &g, &args.alpha);
    }
    let out = TestOutcome::evaluate(args.theta, vec![args.theta], g, &args.alpha)?;
    outcome_report("pvalue", &out, &args.alpha)
}

fn smallest_pvalue(theta: f64, g: &GreatestRootParams, levels: &[f64]) -> Result<Report> {
    let p = as_pvalue(smallest_root_pvalue(theta, g))?;
    let (pj, lj, pt, pc, lc) = pvalue_views(&p);
    let mut crit = Vec::new();
    let mut text = vec![
        format!("smallest root {}", sig4(theta)),
        params_text(g),
        format!("p (Tracy-Widom, lower tail) = {pt}"),
    ];
    let mut header: Vec<String> = ["statistic", "p_tw", "log10_p_tw"].map(String::from).to_vec();
    let mut cells = vec![sci(theta), pc, lc];
    for &alpha in levels {
        let c = smallest_root_critical_value(g, alpha)?;
        crit.push(json!({ "alpha": alpha, "theta": c }));
        text.push(format!("lower critical value at {alpha}: {}", sig4(c)));
        header.push(format!("theta_{alpha}"));
        cells.push(sci(c));
    }
    Ok(Report {
        json: json!({
            "root": "smallest",
            "statistic": theta,
            "params": params_json(g),
            "p_tw": { "value": pj, "log10": lj },
            "critical_values": crit,
        }),
        text,
        csv: vec![header, cells],
    })
}

fn as_pvalue(p: roytw::Result<Probability>) -> Result<PValue> {
    match p {
        Ok(p) => Ok(PValue::Estimate(p)),
        Err(Error::TailLimit { bound }) => Ok(PValue::BelowTailLimit { bound }),
        Err(e) => Err(e.into()),
    }
}

fn outcome_report(name: &str, out: &TestOutcome, levels: &[f64]) -> Result<Report> {
    let g = &out.params;
    let (tw_j, tw_lj, tw_t, tw_c, tw_lc) = pvalue_views(&out.p_tw);
    let (f_j, f_lj, f_t, f_c, f_lc) = probability_views(&out.p_f_bound);
    let exact = if out.statistic > 0.0 && out.statistic < 1.0 {
        beta_exact_pvalue(out.statistic, g).ok()
    } else {
        None
    };

    let mut crit = Vec::new();
    let mut header: Vec<String> = ["test", "statistic"].map(String::from).to_vec();
    header.extend(PARAM_HEADERS.map(String::from));
    header.extend(["p_tw", "log10_p_tw", "p_f_bound", "log10_p_f_bound", "conservative"].map(String::from));
    let mut cells = vec![name.to_owned(), sci(out.statistic)];
    cells.extend(params_csv(g));
    cells.extend([tw_c, tw_lc, f_c, f_lc, out.conservative.to_string()]);

    let mut text = vec![
        format!("{name}: largest root {}", sig4(out.statistic)),
        format!("null {g}"),
        params_text(g),
        format!("p (Tracy-Widom) = {tw_t}"),
        format!("p (F bound) = {f_t} ({F_BOUND_LABEL})"),
    ];
    if let Some(e) = &exact {
        text.push(format!("p (exact Beta) = {}", sig4(e.value)));
    }
    if out.conservative {
        text.push("the null law is a stochastic upper bound: the p-value is conservative".into());
    }
    for &alpha in levels {
        let c = quantile_approx(g, alpha)?;
        crit.push(json!({ "alpha": alpha, "theta": c }));
        text.push(format!("critical value at {alpha}: {}", sig4(c)));
        header.push(format!("theta_{alpha}"));
        cells.push(sci(c));
    }
    if out.roots.len() > 1 {
        text.push(format!(
            "roots: {}",
            out.roots.iter().map(|&r| sig4(r)).collect::<Vec<_>>().join(", ")
        ));
    }

    let mut json = json!({
        "test": name,
        "statistic": out.statistic,
        "roots": out.roots.iter().map(|&r| finite(r)).collect::<Vec<_>>(),
        "params": params_json(g),
        "p_tw": { "value": tw_j, "log10": tw_lj },
        "p_f_bound": { "value": f_j, "log10": f_lj, "label": F_BOUND_LABEL },
        "conservative": out.conservative,
        "critical_values": crit,
    });
    if let Some(e) = exact {
        json["p_exact"] = json!({ "value": finite(e.value), "log10": finite(e.log10()) });
    }
    Ok(Report {
        json,
        text,
        csv: vec![header, cells],
    })
}

pub fn test(args: &TestArgs) -> Result<Report> {
    let (name, out) = match &args.kind {
        TestKind::Independence { data, split } => {
            let values = Table::read(data)?.numeric(None)?;
            let p = values.ncols();
            if *split == 0 || *split >= p {
                bail!("--split {split} must leave columns on both sides of the {p} variables");
            }
            (
                "independence",
                independence_test(&DataMatrix::new(values)?, *split, p - split)?,
            )
        }
        TestKind::Cca { data, split, s } => {
            let values = DataMatrix::new(Table::read(data)?.numeric(None)?)?;
            let total = values.ncols();
            if *split == 0 || *split >= total {
                bail!("--split {split} must leave columns on both sides of the {total} variables");
            }
            let (q, p, n) = (*split, total - split, values.nrows());
            let r_sq = cca(&values.columns(0, q)?, &values.columns(q, p)?)?;
            let out = if *s == 0 {
                TestOutcome {
                    roots: r_sq.clone(),
                    ..cca_null_test(r_sq[0], p, q, n)?
                }
            } else {
                cca_sequential_test(&r_sq, *s, p, q, n)?
            };
            ("cca", out)
        }
        TestKind::Manova { data, group } => {
            let table = Table::read(data)?;
            let g = table.column_index(group)?;
            let values = DataMatrix::new(table.numeric(Some(g))?)?.with_groups(table.column(g))?;
            ("manova", manova_one_way(&values)?)
        }
        TestKind::Cov { data, data2 } => {
            let (s1, n1) = sample_covariance(&read_matrix(data)?)?;
            let (s2, n2) = sample_covariance(&read_matrix(data2)?)?;
            ("cov", cov_equality_test(&s1, n1, &s2, n2)?)
        }
        TestKind::Mlm {
            data,
            design,
            contrast,
            transform,
        } => {
            let y = DataMatrix::new(read_matrix(data)?)?;
            let x = read_matrix(design)?;
            let mut hyp = LinearHypothesis::new(read_matrix(contrast)?)?;
            if let Some(m) = transform {
                hyp = hyp.with_transform(read_matrix(m)?)?;
            }
            ("mlm", mlm_test(&y, &x, &hyp)?)
        }
    };
    outcome_report(name, &out, &args.alpha)
}

/// Unbiased covariance and its degrees of freedom.
fn sample_covariance(x: &nalgebra::DMatrix<f64>) -> Result<(nalgebra::DMatrix<f64>, f64)> {
    let n = x.nrows();
    if n < 2 {
        bail!("a covariance estimate needs at least two rows, got {n}");
    }
    let mut c = x.clone();
    for mut col in c.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    let df = (n - 1) as f64;
    Ok((c.tr_mul(&c) / df, df))
}

fn sim_config(g: GreatestRootParams, sim: &SimArgs) -> Result<SimConfig> {
    let workers = sim.workers.unwrap_or_else(default_workers);
    Ok(SimConfig::new(g, sim.reps, sim.seed)?.with_workers(workers))
}

pub fn simulate(args: &SimulateArgs) -> Result<Report> {
    let g = args.params.resolve()?;
    let cfg = sim_config(g, &args.sim)?;
    let emp = if args.smallest {
        sample_smallest_root(&cfg)?
    } else {
        sample_greatest_root(&cfg)?
    };
    let mut rows = Vec::new();
    let mut text = vec![
        format!(
            "{} root, {} replications, seed {}",
            root_name(args.smallest),
            cfg.reps,
            cfg.seed
        ),
        params_text(&g),
        format!("mean = {}", sig4(emp.mean())),
    ];
    let mut csv = vec![["alpha", "theta_mc", "mc_se"].map(String::from).to_vec()];
    for &alpha in &args.alpha {
        let (q, se) = (emp.quantile(alpha)?, emp.quantile_se(alpha)?);
        rows.push(json!({ "alpha": alpha, "theta_mc": q, "mc_se": se }));
        text.push(format!("alpha {alpha}: theta_mc = {} (se {})", sig4(q), sig4(se)));
        csv.push(vec![sci(alpha), sci(q), sci(se)]);
    }
    Ok(Report {
        json: json!({
            "params": params_json(&g),
            "root": root_name(args.smallest),
            "reps": cfg.reps,
            "seed": cfg.seed,
            "mean": emp.mean(),
            "quantiles": rows,
        }),
        text,
        csv,
    })
}

pub fn compare(args: &CompareArgs) -> Result<Report> {
    let g = args.params.resolve()?;
    let cfg = sim_config(g, &args.sim)?;
    let cmp: Comparison = compare_tw_vs_mc(&cfg, &args.alpha)?;
    let mut rows = Vec::new();
    let mut text = vec![format!("{} replications, seed {}", cfg.reps, cfg.seed), params_text(&g)];
    let mut csv = vec![Comparison::CSV_HEADER.split(',').map(String::from).collect::<Vec<_>>()];
    for r in &cmp.rows {
        rows.push(json!({
            "alpha": r.alpha,
            "theta_tw": r.theta_tw,
            "theta_mc": r.theta_mc,
            "rel_err": r.rel_err,
            "mc_se": r.mc_se,
        }));
        text.push(format!(
            "alpha {}: theta_tw = {}, theta_mc = {} (se {}), r = {} (se {})",
            r.alpha,
            sig4(r.theta_tw),
            sig4(r.theta_mc),
            sig4(r.mc_se),
            sig4(r.rel_err),
            sig4(r.rel_err_se())
        ));
        csv.push([r.alpha, r.theta_tw, r.theta_mc, r.rel_err, r.mc_se].map(sci).to_vec());
    }
    Ok(Report {
        json: json!({ "params": params_json(&g), "reps": cmp.reps, "seed": cfg.seed, "rows": rows }),
        text,
        csv,
    })
}

pub fn grid_regen(args: &GridRegenArgs) -> Result<Report> {
    let rows = generate();
    let fresh = TwGrid::from_rows(rows.clone())?;
    let diffs = TwGrid::embedded()
        .max_abs_diff(&fresh)
        .context("regenerated table has different abscissae from the built-in one")?;
    let names = ["q", "dq", "u", "log_f1", "log_sf1", "log_f2", "log_sf2"];
    let worst = diffs.iter().copied().fold(0.0_f64, f64::max);
    if let Some(path) = &args.write {
        fs::write(path, render(&rows)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if worst.is_nan() || worst > args.tolerance {
        bail!(
            "regenerated table differs from the built-in one by {worst:e} (tolerance {:e})",
            args.tolerance
        );
    }
    let mut diff_json = serde_json::Map::new();
    let mut text = vec![format!("{} rows regenerated", rows.len())];
    for (name, d) in names.iter().zip(diffs) {
        diff_json.insert((*name).into(), d.into());
        text.push(format!("max |diff| {name} = {d:e}"));
    }
    if let Some(path) = &args.write {
        text.push(format!("written to {}", path.display()));
    }
    let mut csv = vec![vec!["column".to_owned(), "max_abs_diff".to_owned()]];
    csv.extend(names.iter().zip(diffs).map(|(n, d)| vec![(*n).to_owned(), sci(d)]));
    Ok(Report {
        json: json!({
            "rows": rows.len(),
            "max_abs_diff": Value::Object(diff_json),
            "tolerance": args.tolerance,
            "written": args.write.as_ref().map(|p| p.display().to_string()),
        }),
        text,
        csv,
    })
}
