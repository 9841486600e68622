use std::io::Write;
use std::path::Path;

use hmf_core::analysis::taylor::{builtin, log_radii, BUILTINS};
use hmf_core::analysis::{
    coefficient_counting, counting_spectrum, default_h_grid, pointwise_scan, taylor_remainder_slope, ExponentMode,
    LeaderMode,
};
use hmf_core::carnot::{hom_dim, parse_spec, validate_spec};
use hmf_core::lattice::{approx_rate, rate_construction};
use hmf_core::synthesis::{
    besov_saturating_field, monofractal_round, parse_field, write_field, BesovParams, CoefficientField, FieldFile, Rule,
};
use hmf_core::{ExecPolicy, GPoint};

use crate::out::{io_fail, num, sink};
use crate::{
    CountingArgs, ExponentArgs, Fail, LeaderArg, ModeArg, Outcome, RateArgs, SpectrumArgs, SynthArgs, SynthKind, TaylorArgs,
};

fn read_text(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_field(path: &Path) -> Result<FieldFile, Fail> {
    parse_field(&read_text(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn read_points(path: &Path) -> Result<Vec<GPoint>, Fail> {
    let mut pts = vec![];
    for (i, raw) in read_text(path)?.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: Vec<f64> = body.split_whitespace().filter_map(|t| t.parse().ok()).collect();
        if v.len() != 3 || body.split_whitespace().count() != 3 || v.iter().any(|x| !x.is_finite()) {
            return Err(Fail::Usage(format!("{}:{}: expected `p q r`", path.display(), i + 1)));
        }
        pts.push(GPoint::new(v[0], v[1], v[2]));
    }
    Ok(pts)
}

/// β of the outermost saturating rule, 0 otherwise.
fn field_beta(field: &CoefficientField) -> f64 {
    match field.rule() {
        Rule::BesovSaturating { beta, .. } => *beta,
        _ => 0.0,
    }
}

pub fn synth(a: &SynthArgs) -> Outcome {
    let (field, params) = match a.kind {
        SynthKind::Zero => (CoefficientField::zero(), None),
        SynthKind::BesovSaturating => {
            let s = a.s.ok_or_else(|| Fail::Usage("besov-saturating needs --s".into()))?;
            let params = BesovParams::new(s, a.p, a.q)?;
            (besov_saturating_field(params), Some(params))
        }
        SynthKind::MonofractalRound => {
            let base = a.base.as_ref().ok_or_else(|| Fail::Usage("monofractal-round needs --base".into()))?;
            let s = a.s.ok_or_else(|| Fail::Usage("monofractal-round needs --s".into()))?;
            let n = a.n.ok_or_else(|| Fail::Usage("monofractal-round needs --N".into()))?;
            let ff = read_field(base)?;
            (monofractal_round(&ff.field, s, n)?, ff.params)
        }
    };
    let mut w = sink(a.out.as_deref())?;
    w.write_all(write_field(&field, params.as_ref()).as_bytes()).map_err(io_fail)?;
    w.flush().map_err(io_fail)?;
    Ok(true)
}

pub fn exponent(a: &ExponentArgs) -> Outcome {
    let ff = read_field(&a.field)?;
    let mut meta = vec![format!("# field {}", a.field.display())];
    let points = if let Some(p) = &a.points {
        meta.push(format!("# points {}", p.display()));
        read_points(p)?
    } else if !a.rate.is_empty() {
        let mut pts = vec![];
        for &xi in &a.rate {
            let c = rate_construction(xi, a.depth)?;
            let ex: Vec<String> = c.exponents.iter().map(|e| e.to_string()).collect();
            meta.push(format!("# rate xi={xi} depth={} exponents={}", a.depth, ex.join(" ")));
            pts.push(c.point);
        }
        pts
    } else {
        return Err(Fail::Usage("give --points or --rate".into()));
    };
    let mode = match a.mode {
        ModeArg::Raw => ExponentMode::Raw,
        ModeArg::Fit => ExponentMode::Fit { beta: a.beta.unwrap_or_else(|| field_beta(&ff.field)) },
    };
    let leader_mode = match a.leaders {
        LeaderArg::Exact => LeaderMode::Exact,
        LeaderArg::Windowed => LeaderMode::Windowed { delta: a.delta },
    };
    meta.push(format!("# window {} {} mode {mode:?} leaders {leader_mode:?}", a.jmin, a.jmax));
    let est = pointwise_scan(&ff.field, &points, (a.jmin, a.jmax), mode, leader_mode, ExecPolicy::Parallel);
    let mut rows = Vec::with_capacity(points.len());
    for (x, e) in points.iter().zip(est) {
        let e = e?;
        rows.push(format!("{},{},{},{},{}", num(x.p), num(x.q), num(x.r), num(e.value), num(e.residual)));
    }
    let mut w = sink(a.out.as_deref())?;
    for m in meta {
        writeln!(w, "{m}").map_err(io_fail)?;
    }
    writeln!(w, "x_p,x_q,x_r,h_hat,residual").map_err(io_fail)?;
    for r in rows {
        writeln!(w, "{r}").map_err(io_fail)?;
    }
    w.flush().map_err(io_fail)?;
    Ok(true)
}

pub fn spectrum(a: &SpectrumArgs) -> Outcome {
    let ff = read_field(&a.field)?;
    let o = &a.params;
    let params = match (ff.params, o.s) {
        (Some(p), _) => BesovParams::new(o.s.unwrap_or(p.s), o.p.unwrap_or(p.p), o.q.unwrap_or(p.q))?,
        (None, Some(s)) => BesovParams::new(s, o.p.unwrap_or(2.0), o.q.unwrap_or(2.0))?,
        (None, None) => return Err(Fail::Usage("field file has no params; pass --s [--p --q]".into())),
    };
    let grid = if a.h.is_empty() { default_h_grid(&params, a.n) } else { a.h.clone() };
    if grid.is_empty() {
        return Err(Fail::Usage("empty h grid".into()));
    }
    let beta = a.beta.unwrap_or_else(|| field_beta(&ff.field));
    let est = counting_spectrum(&ff.field, &params, (a.jmin, a.jmax), &grid, a.c0, beta)?;
    let mut w = sink(a.out.as_deref())?;
    let (s, p, q) = (params.s, params.p, params.q);
    writeln!(w, "# field {} params {s} {p} {q} window {} {} c0 {} beta {beta}", a.field.display(), a.jmin, a.jmax, a.c0)
        .map_err(io_fail)?;
    writeln!(w, "h,d_hat,bound").map_err(io_fail)?;
    for i in 0..est.h.len() {
        writeln!(w, "{},{},{}", num(est.h[i]), num(est.d_hat[i]), num(est.bound[i])).map_err(io_fail)?;
    }
    if ff.field.conforming() {
        writeln!(w, "# max_deviation {}", num(est.max_deviation())).map_err(io_fail)?;
    } else {
        writeln!(w, "# max_deviation n/a (nonconforming field)").map_err(io_fail)?;
    }
    w.flush().map_err(io_fail)?;
    if let Some(path) = &a.plot_script {
        let data = a.out.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "spectrum.csv".into());
        let script = format!(
            "set datafile separator ','\nset key top left\nset xlabel 'h'\nset ylabel 'd(h)'\n\
             plot '{data}' every ::1 using 1:2 with linespoints title 'estimate', \
             '' every ::1 using 1:3 with lines title 'bound'\n"
        );
        std::fs::write(path, script).map_err(|e| Fail::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(true)
}

pub fn counting(a: &CountingArgs) -> Outcome {
    let ff = read_field(&a.field)?;
    let mut rows = vec![];
    for &j in &a.j {
        for &h in &a.h {
            rows.push(format!("{j},{},{}", num(h), coefficient_counting(&ff.field, j, h, a.c0)?));
        }
    }
    let mut w = sink(a.out.as_deref())?;
    writeln!(w, "# field {} c0 {}", a.field.display(), a.c0).map_err(io_fail)?;
    writeln!(w, "j,h,count").map_err(io_fail)?;
    for r in rows {
        writeln!(w, "{r}").map_err(io_fail)?;
    }
    w.flush().map_err(io_fail)?;
    Ok(true)
}

pub fn rate(a: &RateArgs) -> Outcome {
    let (x, meta) = match (&a.point, a.xi) {
        (Some(v), _) => (GPoint::new(v[0], v[1], v[2]), format!("# point {} {} {}", v[0], v[1], v[2])),
        (None, Some(xi)) => {
            let c = rate_construction(xi, a.depth)?;
            let ex: Vec<String> = c.exponents.iter().map(|e| e.to_string()).collect();
            (c.point, format!("# rate xi={xi} depth={} exponents={}", a.depth, ex.join(" ")))
        }
        (None, None) => return Err(Fail::Usage("give --point or --xi".into())),
    };
    if a.jmin > a.jmax {
        return Err(Fail::Usage(format!("empty scale range {}..{}", a.jmin, a.jmax)));
    }
    let scales: Vec<i64> = (a.jmin..=a.jmax).collect();
    let r = approx_rate(&x, &scales, a.window)?;
    let mut w = sink(a.out.as_deref())?;
    writeln!(w, "{meta}").map_err(io_fail)?;
    writeln!(w, "j,m_j,rate").map_err(io_fail)?;
    for s in &r.per_scale {
        writeln!(w, "{},{},{}", s.j, num(s.min_dist), num(s.rate)).map_err(io_fail)?;
    }
    writeln!(w, "# xi_hat {}", num(r.xi_hat)).map_err(io_fail)?;
    w.flush().map_err(io_fail)?;
    Ok(true)
}

pub fn taylor(a: &TaylorArgs) -> Outcome {
    let Some(f) = builtin(&a.function) else {
        let names: Vec<&str> = BUILTINS.iter().map(|b| b.0).collect();
        return Err(Fail::Usage(format!("unknown function `{}`; known: {}", a.function, names.join(", "))));
    };
    let x0 = a.x0.map(|v| GPoint::new(v[0], v[1], v[2])).unwrap_or(GPoint::IDENTITY);
    let n = a.radii[2];
    if !(n >= 3.0 && n.fract() == 0.0) {
        return Err(Fail::Usage(format!("radius count must be an integer >= 3, got {n}")));
    }
    let radii = log_radii(a.radii[0], a.radii[1], n as usize);
    let fit = taylor_remainder_slope(&f, &x0, a.order, &radii)?;
    let table = hmf_core::analysis::derivative_table(&f, &x0, a.order)?;
    let poly = hmf_core::analysis::taylor_poly(&table, a.order)?;
    println!("# {} at ({}, {}, {}), order {}", a.function, x0.p, x0.q, x0.r, a.order);
    println!("monomial,coefficient");
    for (&(i, j, k), &c) in &poly.coeffs {
        println!("p^{i}q^{j}r^{k},{}", num(c));
    }
    println!("radius,remainder");
    for (r, m) in &fit.samples {
        println!("{},{}", num(*r), num(*m));
    }
    let need = a.order as f64 + 1.0 - 0.1;
    let ok = fit.vanishing || fit.slope >= need;
    if fit.vanishing {
        println!("# remainder vanishes: PASS");
    } else {
        println!("# slope {} (need >= {need}): {}", num(fit.slope), if ok { "PASS" } else { "FAIL" });
    }
    Ok(ok)
}

pub fn carnot_check(path: &Path) -> Outcome {
    let spec = parse_spec(&read_text(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    let rep = validate_spec(&spec);
    println!("layers {:?}", spec.layer_dims());
    println!("step {}", spec.step());
    println!("Q_G {}", hom_dim(&spec));
    if rep.is_valid() {
        println!("valid");
    } else {
        for f in &rep.failures {
            println!("invalid: {f}");
        }
    }
    Ok(rep.is_valid())
}
