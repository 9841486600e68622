//! Oracle suites behind `hmf verify`.

use std::collections::BTreeSet;

use rand::Rng;

use hmf_core::analysis::{counting_spectrum, default_h_grid, lemma_counting_check};
use hmf_core::carnot::{bch_mul, hom_dim, parse_spec, validate_spec, volume_scaling_exponent, CPoint, StratificationSpec};
use hmf_core::group::{self, GAMMA1_CAP};
use hmf_core::lattice::index::{enumerate_l0, parity_scan_irreducible};
use hmf_core::lattice::neighbors::{ball_overlap_offsets, ball_overlap_oracle, brute_force_neighbors, diameter_oracle};
use hmf_core::lattice::{count_irreducible, cube_diameter, locate, neighborhood, PRINTED_XI, XI};
use hmf_core::par::chunk_rng;
use hmf_core::synthesis::besov::{besov_coefficient_brute, saturating_a_bound, saturating_a_closed};
use hmf_core::synthesis::{besov_saturating_field, besov_seq_norm, BesovParams};
use hmf_core::{ExecPolicy, GPoint};

use crate::out::{print_table, row, Row, Status};
use crate::{Fail, Outcome, Suite, VerifyArgs};

const POLICY: ExecPolicy = ExecPolicy::Parallel;
const RANDOM_CASES: usize = 10_000;

pub fn run(a: &VerifyArgs, seed: u64) -> Outcome {
    if a.samples < 1000 {
        return Err(Fail::Usage(format!("--samples must be at least 1000, got {}", a.samples)));
    }
    let extra = match &a.spec {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Fail::Usage(format!("cannot read {}: {e}", p.display())))?;
            Some(parse_spec(&text).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };
    let suites: &[Suite] = match a.suite {
        Suite::All => &[Suite::Lattice, Suite::Group, Suite::Carnot, Suite::Besov],
        ref s => std::slice::from_ref(s),
    };
    let mut ok = true;
    for s in suites {
        let rows = match s {
            Suite::Lattice => lattice(seed),
            Suite::Group => group_suite(a.samples, seed),
            Suite::Carnot => carnot(extra.as_ref(), a.samples, seed),
            Suite::Besov => besov()?,
            Suite::All => unreachable!(),
        };
        print_table(&format!("{s:?}").to_lowercase(), &rows);
        ok &= rows.iter().all(|r| r.status != Status::Fail);
    }
    println!("{}", if ok { "all checks passed" } else { "some checks FAILED" });
    Ok(ok)
}

fn set(v: &[[i64; 3]]) -> BTreeSet<[i64; 3]> {
    v.iter().copied().collect()
}

fn lattice(seed: u64) -> Vec<Row> {
    let mut rows = vec![];
    let brute = brute_force_neighbors();
    let same = set(&brute) == set(&XI);
    rows.push(row("neighbors", format!("{}+self", brute.len() - 1), "34+self", Status::of(brute.len() == 35 && same)));
    let printed = set(&PRINTED_XI);
    let flipped: BTreeSet<[i64; 3]> = brute.iter().map(|k| [k[0], k[1], -k[2]]).collect();
    let note = if printed == set(&brute) {
        "identical"
    } else if printed == flipped {
        "k_r negated"
    } else {
        "differs"
    };
    rows.push(row("printed table vs scan", note, "identical", Status::Note));

    let overlap = ball_overlap_oracle(POLICY);
    rows.push(row(
        "overlap",
        overlap.len(),
        43,
        Status::of(overlap.len() == 43 && set(&overlap) == set(&ball_overlap_offsets())),
    ));

    let d = diameter_oracle(200_000, seed, POLICY);
    rows.push(row("diameter", format!("{d:.6}"), format!("{:.6}", cube_diameter(0)), Status::of((d - cube_diameter(0)).abs() <= 1e-3)));

    let n3 = enumerate_l0(3, POLICY);
    rows.push(row("#L0(3)", n3, 4096, Status::of(n3 == 4096)));
    for big_j in 1..=3 {
        let c = parity_scan_irreducible(big_j, POLICY);
        let e = count_irreducible(big_j).unwrap();
        rows.push(row(format!("irreducible(J={big_j})"), c, e, Status::of(c as u128 == e)));
    }

    // every point lies in exactly one cube of its neighbourhood
    let mut rng = chunk_rng(seed, 7);
    let mut bad = 0;
    for _ in 0..RANDOM_CASES {
        let x = GPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let j = rng.random_range(0..=10);
        let hits = neighborhood(&locate(&x, j)).iter().filter(|c| c.contains(&x)).count();
        if hits != 1 {
            bad += 1;
        }
    }
    rows.push(row("partition", format!("{bad} bad"), "0 bad", Status::of(bad == 0)));
    rows
}

fn random_point(rng: &mut impl Rng) -> GPoint {
    GPoint::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn group_suite(samples: u64, seed: u64) -> Vec<Row> {
    let mut rows = vec![];
    let v = group::mc_unit_ball_volume(samples, seed, POLICY);
    let exact = group::constants().ball_volume_unit;
    let rel = (v - exact).abs() / exact;
    rows.push(row("unit ball volume", format!("{v:.5}"), format!("{exact:.5} ±0.5%"), Status::of(rel <= 0.005)));

    let mut rng = chunk_rng(seed, 11);
    let (mut hom, mut inv, mut assoc, mut ident): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..RANDOM_CASES {
        let (x, y, z) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
        let lambda = rng.random_range(0.01..100.0);
        let dx = x.dilate(lambda).unwrap();
        hom = hom.max((dx.norm() - lambda * x.norm()).abs() / (lambda * x.norm()).max(1e-300));
        inv = inv.max(((z * x).dist(&(z * y)) - x.dist(&y)).abs());
        assoc = assoc.max(((x * y) * z).max_abs_diff(&(x * (y * z))));
        ident = ident.max((x * x.inv()).norm());
    }
    rows.push(row("homogeneity residual", format!("{hom:.1e}"), "<= 1e-12", Status::of(hom <= 1e-12)));
    rows.push(row("left invariance residual", format!("{inv:.1e}"), "<= 1e-12", Status::of(inv <= 1e-12)));
    rows.push(row("associativity residual", format!("{assoc:.1e}"), "<= 1e-12", Status::of(assoc <= 1e-12)));
    rows.push(row("inverse residual", format!("{ident:.1e}"), "0", Status::of(ident == 0.0)));

    let g = group::quasi_triangle_constant(samples.min(1_000_000), seed, POLICY).unwrap();
    rows.push(row("quasi-triangle sample", format!("{g:.4}"), format!("[1, {GAMMA1_CAP}]"), Status::of((1.0..=GAMMA1_CAP).contains(&g))));
    rows
}

fn carnot(extra: Option<&StratificationSpec>, samples: u64, seed: u64) -> Vec<Row> {
    let mut rows = vec![];
    let h = StratificationSpec::heisenberg();
    let mut rng = chunk_rng(seed, 13);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_CASES {
        let (x, y) = (random_point(&mut rng), random_point(&mut rng));
        let z = bch_mul(&h, &CPoint(vec![x.p, x.q, x.r]), &CPoint(vec![y.p, y.q, y.r])).unwrap();
        let g = x * y;
        worst = worst.max(z.max_abs_diff(&CPoint(vec![g.p, g.q, g.r])));
    }
    rows.push(row("BCH vs group law", format!("{worst:.1e}"), "<= 1e-12", Status::of(worst <= 1e-12)));

    let vs = samples.min(1_000_000);
    let mut named = vec![
        ("heisenberg".to_string(), h, 4),
        ("engel".to_string(), StratificationSpec::engel(), 7),
        ("abelian(3)".to_string(), StratificationSpec::abelian(3).unwrap(), 3),
    ];
    if let Some(s) = extra {
        let valid = validate_spec(s);
        rows.push(row(
            "spec file valid",
            if valid.is_valid() { "yes".to_string() } else { valid.failures.join("; ") },
            "yes",
            Status::of(valid.is_valid()),
        ));
        named.push(("spec file".to_string(), s.clone(), hom_dim(s)));
    }
    for (name, spec, q) in &named {
        let d = hom_dim(spec);
        rows.push(row(format!("Q_G {name}"), d, q, Status::of(d == *q)));
    }
    for (name, spec, q) in &named {
        let e = volume_scaling_exponent(spec, vs, seed, POLICY);
        rows.push(row(format!("volume scaling {name}"), format!("{e:.4}"), format!("{q} ±0.05"), Status::of((e - *q as f64).abs() <= 0.05)));
    }
    rows
}

fn besov() -> Result<Vec<Row>, Fail> {
    let mut rows = vec![];
    let params = BesovParams::new(2.0, 2.0, 2.0)?;
    let f = besov_saturating_field(params);
    let norm = besov_seq_norm(&f, &params)?;
    let mut worst = f64::NEG_INFINITY;
    let mut agree = true;
    for &(j, a) in norm.a.iter().filter(|(j, _)| (1..=14).contains(j)) {
        worst = worst.max(a / saturating_a_bound(&params, j));
        agree &= ((a - saturating_a_closed(&params, j)) / a).abs() <= 1e-12;
    }
    rows.push(row("max a_j / bound, j<=14", format!("{worst:.6}"), "<= 1", Status::of(worst <= 1.0)));
    rows.push(row("a_j closed form", if agree { "agrees" } else { "differs" }, "agrees", Status::of(agree)));
    let mut rel: f64 = 0.0;
    for j in 1..=5 {
        let b = besov_coefficient_brute(&f, &params, j, POLICY)?;
        rel = rel.max((b - saturating_a_closed(&params, j)).abs() / b);
    }
    rows.push(row("a_j brute, j<=5", format!("{rel:.1e}"), "<= 1e-12", Status::of(rel <= 1e-12)));

    let grid = default_h_grid(&params, 8);
    let s = counting_spectrum(&f, &params, (1, 14), &grid, 1.0, params.beta())?;
    let dev = s.max_deviation();
    rows.push(row("spectrum deviation", format!("{dev:.4}"), "<= 0.15", Status::of(dev <= 0.15)));
    let v = lemma_counting_check(&f, &params, (1, 14), &grid, 1.0)?;
    rows.push(row("counting inequality", format!("{} violations", v.len()), "0 violations", Status::of(v.is_empty())));
    Ok(rows)
}
