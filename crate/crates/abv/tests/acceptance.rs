//! Acceptance suite: one PASS/FAIL line per criterion. Every comparison is
//! exact (integers, rationals, ids); the tolerance column says so.

use std::collections::BTreeMap;
use std::time::Instant;

use abv::cases::{build_space, CASES};
use abv::tables::available_tables;
use abv_core::cycles::{find_table, verify_table};
use abv_core::flag_orbits::{census_dims, census_matches, induce_bundle, k_orbits, OrbitPoset, OrbitRecord};
use abv_core::geom_params::{
    aj_parameter, arthur_to_langlands, build_levi_space, aj_factor, phi_classes, principal_unipotent,
    GeometricParameterSpace,
};
use abv_core::inner_class::{enumerate_strong_real_forms, strong_real_forms, InnerClass, INNER_CLASS_NAMES};
use abv_core::lie_core::Catalog;
use abv_core::model::Elem;
use abv_core::packets::{
    abv_packet, essentially_unipotent_packet, induction_checks, l_packet, stable_character, tempered_verify,
    unipotent_packet, verify_abv_equals_aj,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const TOL: &str = "exact";

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn space(g: &str, ic: &str, z: &str, lam: &str) -> GeometricParameterSpace {
    build_space(&Catalog::builtin(), g, ic, z, Some(lam)).unwrap_or_else(|e| panic!("{g} {ic} {lam}: {e}"))
}

/// Every (inner class, strong real form) the geometry backend supports.
fn catalog_forms() -> Vec<(String, InnerClass, abv_core::inner_class::StrongRealForm)> {
    let mut names: Vec<String> = Catalog::builtin().groups.iter().map(|e| e.name.clone()).collect();
    names.extend(["torus(1)".to_string(), "torus(2)".to_string()]);
    let mut out = Vec::new();
    for g in names {
        let d = Catalog::builtin().build(&g).unwrap();
        for icn in INNER_CLASS_NAMES.iter().filter(|n| **n != "compact") {
            let Ok(ic) = InnerClass::named(&d, icn) else { continue };
            let Ok(forms) = strong_real_forms(&ic) else { continue };
            for f in forms {
                out.push((format!("{g}/{icn}/{}", f.label), ic.clone(), f));
            }
        }
    }
    out
}

fn dims(p: &OrbitPoset) -> Vec<usize> {
    let mut d: Vec<usize> = p.orbits().iter().map(|o| o.dim).collect();
    d.sort_unstable();
    d
}

// 1 -------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let quasi_split = |g: &str, ic: &str| {
        let d = Catalog::builtin().build(g).unwrap();
        let ic = InnerClass::named(&d, ic).unwrap();
        let f = strong_real_forms(&ic).unwrap().into_iter().find(|f| f.quasi_split).unwrap();
        (ic, f)
    };
    let (ic, f) = quasi_split("SL2", "split");
    let p = k_orbits(&ic, &f).map_err(|e| e.to_string())?;
    ensure(dims(&p) == [0, 0, 1], || format!("SL2 split dims {:?}", dims(&p)))?;
    ensure(census_dims(&ic, &f).unwrap() == dims(&p), || "SL2 brute-force dims differ".into())?;

    let d = Catalog::builtin().build("SL2xSL2").unwrap();
    let icc = InnerClass::named(&d, "complex").unwrap();
    for f in strong_real_forms(&icc).unwrap() {
        let p = k_orbits(&icc, &f).unwrap();
        ensure(dims(&p) == [1, 2], || format!("SL2xSL2 diagonal {} dims {:?}", f.label, dims(&p)))?;
        ensure(census_dims(&icc, &f).unwrap() == dims(&p), || "diagonal brute-force dims differ".into())?;
    }
    for ic in ["split", "equal-rank"] {
        let d = Catalog::builtin().build("torus(1)").unwrap();
        let ic = InnerClass::named(&d, ic).unwrap();
        for f in strong_real_forms(&ic).unwrap() {
            ensure(k_orbits(&ic, &f).unwrap().len() == 1, || "torus has more than one orbit".into())?;
        }
    }
    let forms = catalog_forms();
    let mut n = 0;
    for (name, ic, f) in &forms {
        let p = match k_orbits(ic, f) {
            Ok(p) => p,
            Err(_) => continue,
        };
        n += 1;
        ensure(p.is_graded(), || format!("{name} not graded"))?;
        ensure(census_matches(ic, f).unwrap(), || format!("{name}: brute force disagrees"))?;
        ensure(census_dims(ic, f).unwrap() == dims(&p), || format!("{name}: brute-force dims differ"))?;
    }
    Ok(format!("SL2 split 3 orbits (0,0,1), diagonal 2 orbits (1,2), torus 1; {n} catalog posets graded and matched"))
}

// 2 -------------------------------------------------------------------------

/// Independent check of `induce_bundle`: dimensions shift, the bijection is
/// a bijection, order is preserved and reflected, and shifting back recovers
/// the base.
fn round_trip(base: &OrbitPoset, shift: usize) -> Result<(), String> {
    let b = induce_bundle(base, shift);
    let n = base.len();
    ensure(b.result_poset.len() == n && b.bijection.len() == n, || "size changed".into())?;
    let mut map = Vec::new();
    for o in base.orbits() {
        let img = b.image(&o.id).ok_or("orbit without image")?;
        let j = b.result_poset.index(img).ok_or("image not in result")?;
        ensure(b.result_poset.orbit(j).dim == o.dim + shift, || format!("dim of {} not shifted", o.id))?;
        map.push(j);
    }
    for i in 0..n {
        for k in 0..n {
            ensure(base.le(i, k) == b.result_poset.le(map[i], map[k]), || "order not preserved".into())?;
        }
    }
    ensure(base.is_isomorphism(&b.result_poset, &map), || "is_isomorphism rejects".into())?;
    let back = induce_bundle(&b.result_poset, 0);
    ensure(back.result_poset == b.result_poset, || "zero shift is not the identity".into())?;
    Ok(())
}

/// Up to three components, each closed off by a unique top orbit.
fn random_poset() -> impl Strategy<Value = OrbitPoset> {
    (1usize..9)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(0usize..4, n),
                proptest::collection::vec(0usize..3, n),
                proptest::collection::vec(any::<bool>(), n * n),
            )
        })
        .prop_map(|(dims, comp, bits)| {
            let n = dims.len();
            let mut orbits: Vec<OrbitRecord> =
                dims.iter().enumerate().map(|(i, &d)| OrbitRecord { id: format!("o{i}"), dim: d, attrs: BTreeMap::new() }).collect();
            let mut rel: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| comp[i] == comp[j] && dims[i] < dims[j] && bits[i * n + j])
                .collect();
            for c in 0..3 {
                let members: Vec<usize> = (0..n).filter(|&i| comp[i] == c).collect();
                if let Some(top) = members.iter().map(|&i| dims[i]).max() {
                    let t = orbits.len();
                    orbits.push(OrbitRecord { id: format!("top{c}"), dim: top + 1, attrs: BTreeMap::new() });
                    rel.extend(members.iter().map(|&i| (i, t)));
                }
            }
            OrbitPoset::new(orbits, &rel).unwrap()
        })
}

fn criterion_2() -> Outcome {
    let mut n_cat = 0;
    for (name, ic, f) in catalog_forms() {
        let Ok(p) = k_orbits(&ic, &f) else { continue };
        for s in 0..3 {
            round_trip(&p, s).map_err(|e| format!("{name} shift {s}: {e}"))?;
        }
        n_cat += 1;
    }
    for c in CASES {
        for b in &c.space().unwrap().blocks {
            round_trip(&b.poset, 1).map_err(|e| format!("{:?} {}: {e}", c, b.id))?;
            n_cat += 1;
        }
    }
    let cases = 256;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&(random_poset(), 0usize..5), |(p, s)| {
            round_trip(&p, s).map_err(TestCaseError::fail)?;
            Ok(())
        })
        .map_err(|e| format!("random posets: {e}"))?;
    Ok(format!("{n_cat} catalog posets, {cases} random posets"))
}

// 3, 4 ----------------------------------------------------------------------

/// (group, inner class, mu, levi)
const AJ_CASES: &[(&str, &str, &str, &[usize])] = &[
    ("SL2", "equal-rank", "1", &[]),
    ("SL2", "equal-rank", "1", &[0]),
    ("SL2", "equal-rank", "3", &[]),
    ("PGL2", "equal-rank", "1/2", &[]),
    ("PGL2", "equal-rank", "1/2", &[0]),
    ("SL2xSL2", "equal-rank", "1,1", &[]),
    ("SL2xSL2", "equal-rank", "1,1", &[0]),
    ("SL2xSL2", "equal-rank", "1,1", &[1]),
    ("SL2xSL2", "equal-rank", "1,1", &[0, 1]),
    ("SL2xPGL2", "equal-rank", "1,1/2", &[]),
    ("SL2xPGL2", "equal-rank", "1,1/2", &[0]),
    ("SL2xPGL2", "equal-rank", "1,1/2", &[1]),
    ("PGL2xPGL2", "equal-rank", "1/2,1/2", &[0]),
    ("SL2xGL1", "equal-rank", "1,0", &[]),
    ("SL2xGL1", "split", "1,0", &[]),
    ("SL2xGL1", "equal-rank", "1,0", &[0]),
];

struct InductionTally {
    checks: usize,
    exact: usize,
    contention: usize,
    failures: Vec<String>,
}

fn induction_tally() -> InductionTally {
    let mut t = InductionTally { checks: 0, exact: 0, contention: 0, failures: Vec::new() };
    for (g, ic, mu, levi) in AJ_CASES {
        let x = space(g, ic, "1", mu);
        let tabs = available_tables(&x);
        let psi = aj_parameter(&x, levi.to_vec(), &x.lambda).unwrap();
        match induction_checks(&psi, &x, &tabs) {
            Err(e) => t.failures.push(format!("{g} L={levi:?}: {e}")),
            Ok(v) => {
                for c in v {
                    t.checks += 1;
                    if c.primary_matches && c.support_within && c.equal && c.guard {
                        t.exact += 1;
                    } else {
                        t.failures.push(format!("{g} L={levi:?} {} -> {}: {} vs {}", c.source, c.target, c.resolved, c.direct));
                    }
                    if c.contention {
                        t.contention += 1;
                    } else {
                        t.failures.push(format!("{g} L={levi:?} {}: contention", c.source));
                    }
                }
            }
        }
    }
    t
}

fn criterion_3(t: &InductionTally) -> Outcome {
    ensure(t.checks > 0 && t.exact == t.checks, || format!("{}/{} exact; {:?}", t.exact, t.checks, t.failures))?;
    Ok(format!("{} Levi parameters over {} (G, L) pairs, pushforward == direct cycle", t.checks, AJ_CASES.len()))
}

fn criterion_4(t: &InductionTally) -> Outcome {
    ensure(t.checks > 0 && t.contention == t.checks, || format!("{}/{} pass; {:?}", t.contention, t.checks, t.failures))?;
    Ok(format!("{} resolved pushforwards", t.checks))
}

// 5 -------------------------------------------------------------------------

fn criterion_5() -> Outcome {
    let mut n = 0;
    for c in CASES {
        let x = c.space().unwrap();
        let tabs = available_tables(&x);
        for phi in phi_classes(&x).unwrap().iter().filter(|p| p.is_tempered()) {
            let r = tempered_verify(phi, &x, &tabs).map_err(|e| format!("{c:?}: {e}"))?;
            ensure(r.passes, || format!("{c:?} {}:{}: micro {:?} vs L {:?}", r.orbit.block, r.orbit.orbit, r.micro, r.l))?;
            n += 1;
        }
    }
    ensure(n > 0, || "no tempered parameters".into())?;
    Ok(format!("{n} tempered parameters: S_phi open, micro-packet == L-packet"))
}

// 6 -------------------------------------------------------------------------

fn criterion_6() -> Outcome {
    let x = space("SL2", "equal-rank", "1", "1");
    let tabs = available_tables(&x);
    let psi = principal_unipotent(&x).unwrap();
    let abv = abv_packet(&psi, &x, &tabs).map_err(|e| e.to_string())?;
    let n_forms = enumerate_strong_real_forms(&x.ic.group, &x.ic.inv).unwrap().len();
    ensure(abv.len() == n_forms, || format!("packet {} vs {n_forms} strong real forms", abv.len()))?;
    let t = find_table(&tabs, &abv.block).unwrap();
    for m in &abv.members {
        let chi = t.entry(&m.id, &abv.anchor);
        ensure(chi == Some(1), || format!("chi^mic of {} at S_psi is {chi:?}", m.id))?;
    }
    let u = unipotent_packet(&psi, &x, Some(&tabs)).map_err(|e| e.to_string())?;
    ensure(u.packet.same_members(&abv), || "unipotent packet differs from ABV".into())?;

    // Twists: by -I in the center of the dual SL2, and by a central character of SL2 x GL1.
    let mut twisted = Vec::new();
    let xp = space("PGL2", "equal-rank", "1", "1/2");
    let mut psi_p = principal_unipotent(&xp).unwrap();
    psi_p.restriction.y = vec![Elem::M(abv_core::arith::Mat2::identity().neg())];
    let xg = space("SL2xGL1", "equal-rank", "1", "1,1");
    let psi_g = aj_parameter(&xg, vec![0], &xg.lambda).unwrap();
    for (name, psi, x) in [("PGL2 by -I", psi_p, xp), ("SL2xGL1 by lambda_a=(0,1)", psi_g, xg)] {
        let tabs = available_tables(&x);
        let e = essentially_unipotent_packet(&psi, &x, &tabs).map_err(|e| format!("{name}: {e}"))?;
        ensure(e.tables_match, || format!("{name}: tables differ across the twist"))?;
        ensure(e.matches_abv, || format!("{name}: twisted packet is not the ABV packet"))?;
        ensure(e.packet.len() == e.unipotent.packet.len(), || format!("{name}: size changed"))?;
        ensure(e.labels.len() == e.packet.len() && e.labels.values().all(|l| l.starts_with("chi(")), || format!("{name}: labels"))?;
        twisted.push(format!("{name} ({} members)", e.packet.len()));
    }
    Ok(format!("|ABV| = {n_forms} = #strong real forms, chi^mic = 1; twists {}", twisted.join(", ")))
}

// 7 -------------------------------------------------------------------------

fn criterion_7(log: &mut Vec<String>) -> Outcome {
    let mut done = Vec::new();
    let mut check = |label: &str, g: &str, mu: &str, levi: &[usize], log: &mut Vec<String>| -> Result<Vec<String>, String> {
        let x = space(g, "equal-rank", "1", mu);
        let tabs = available_tables(&x);
        let psi = aj_parameter(&x, levi.to_vec(), &x.lambda).unwrap();
        let c = verify_abv_equals_aj(&psi, &x, &tabs).map_err(|e| format!("{label}: {e}"))?;
        let r = &c.aj.report;
        log.push(format!("{label}: AJ1 {} | AJ2 {} | AJ3 regular mu = {}", r.aj1_witness, r.aj2_witness, r.mu.fmt_coords()));
        let zs = |v: &[Elem]| v.iter().map(|e| format!("{e:?}")).collect::<Vec<_>>().join(";");
        log.push(format!("{label}: z product {} | z matrix {}", zs(&c.aj.z_product), zs(&c.aj.z_matrix)));
        ensure(c.aj.z_consistent, || format!("{label}: z product != z matrix"))?;
        ensure(c.equal, || format!("{label}: AJ {:?} vs ABV {:?}", c.aj.packet.ids(), c.abv.ids()))?;
        done.push(format!("{label} ({})", c.abv.len()));
        Ok(c.abv.ids())
    };
    let ids = check("(i) SL2, L=T", "SL2", "1", &[], log)?;
    let x = space("SL2", "equal-rank", "1", "1");
    let phi = arthur_to_langlands(&aj_parameter(&x, vec![], &x.lambda).unwrap(), &x).unwrap();
    ensure(phi.is_tempered() && l_packet(&phi, &x).unwrap().ids() == ids, || "(i) not the tempered L-packet".into())?;

    for (g, mu) in [("SL2", "1"), ("PGL2", "1/2"), ("SL2xSL2", "1,1"), ("SL2xGL1", "1,1")] {
        let label = format!("(ii) {g}, L=G");
        let x = space(g, "equal-rank", "1", mu);
        let levi: Vec<usize> = (0..x.ic.group.simple.len()).collect();
        let ids = check(&label, g, mu, &levi, log)?;
        let psi = aj_parameter(&x, levi, &x.lambda).unwrap();
        let e = essentially_unipotent_packet(&psi, &x, &available_tables(&x)).map_err(|e| e.to_string())?;
        ensure(e.packet.ids() == ids, || format!("{label}: not the essentially-unipotent packet"))?;
    }
    check("(iii) SL2xSL2, L=SL2xT", "SL2xSL2", "1,1", &[0], log)?;
    check("(iii') SL2xSL2, L=TxSL2", "SL2xSL2", "1,1", &[1], log)?;
    Ok(done.join(", "))
}

// 8 -------------------------------------------------------------------------

fn criterion_8() -> Outcome {
    let mut spaces: Vec<GeometricParameterSpace> = CASES.iter().map(|c| c.space().unwrap()).collect();
    for (g, ic, mu, levi) in AJ_CASES {
        let x = space(g, ic, "1", mu);
        let psi = aj_parameter(&x, levi.to_vec(), &x.lambda).unwrap();
        let aj = aj_factor(&psi, &x).unwrap();
        spaces.push(build_levi_space(&aj, &x).unwrap());
    }
    let mut rows = 0;
    for x in &spaces {
        for t in available_tables(x) {
            let b = x.block(&t.block).unwrap();
            t.check_invariants(&b.poset).map_err(|e| format!("{} {}: {e}", x.group, t.block))?;
            ensure(verify_table(x, &t).unwrap(), || format!("{} {}: stalk formula disagrees", x.group, t.block))?;
            rows += t.rows.len();
        }
    }
    let mut members = 0;
    for (g, ic, mu, levi) in AJ_CASES {
        let x = space(g, ic, "1", mu);
        let tabs = available_tables(&x);
        let psi = aj_parameter(&x, levi.to_vec(), &x.lambda).unwrap();
        let sc = stable_character(&psi, &x, &tabs).map_err(|e| e.to_string())?;
        let abv = abv_packet(&psi, &x, &tabs).unwrap();
        ensure(sc.coeffs.len() == abv.len(), || "support is not the packet".into())?;
        for m in &abv.members {
            let c = sc.coeffs[&m.id];
            ensure(c != 0, || format!("{} has coefficient 0", m.id))?;
            if m.orbit == sc.anchor {
                ensure(c.signum() == m.kottwitz_sign as i64, || format!("{}: coefficient {c}, e = {}", m.id, m.kottwitz_sign))?;
            }
            members += 1;
        }
    }
    Ok(format!("{rows} table rows over {} spaces; {members} stable-character coefficients", spaces.len()))
}

// 9 -------------------------------------------------------------------------

fn cli_suite() -> Vec<(String, i32, Vec<u8>)> {
    let mut cmds: Vec<Vec<String>> = Vec::new();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    for c in CASES {
        let base = ["--group", c.group, "--inner-class", c.inner_class, "--z", c.z, "--lambda", c.lambda];
        // With z = -1 the PGL2 space has no tempered parameters (exit 4 by design).
        let tails: &[&[&str]] = if c.z == "1" { &[&["space"], &["cc"], &["packet", "tempered"]] } else { &[&["space"], &["cc"]] };
        for tail in tails {
            cmds.push(s(&[&base[..], *tail].concat()));
        }
    }
    cmds.push(s(&["orbits", "--group", "SL2xSL2", "--inner-class", "complex"]));
    cmds.push(s(&["packet", "unipotent"]));
    cmds.push(s(&["packet", "aj", "--levi", "all"]));
    cmds.push(s(&["packet", "aj", "--group", "SL2xSL2", "--levi", "0"]));
    cmds.push(s(&["induce", "--levi", "", "--param", "y[1]:pt:tau[1]"]));
    cmds.into_iter()
        .map(|args| {
            let mut out = Vec::new();
            let mut err = Vec::new();
            let code = abv::cli::run(std::iter::once("abv".to_string()).chain(args.iter().cloned()), &mut out, &mut err);
            (args.join(" "), code, out)
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let a = cli_suite();
    let b = cli_suite();
    let mut bytes = 0;
    for (x, y) in a.iter().zip(&b) {
        ensure(x.1 == 0, || format!("`{}` exited {}", x.0, x.1))?;
        ensure(x == y, || format!("`{}` differs between runs", x.0))?;
        serde_json::from_slice::<serde_json::Value>(&x.2).map_err(|e| format!("`{}`: {e}", x.0))?;
        bytes += x.2.len();
    }
    Ok(format!("{} commands, {bytes} bytes of JSON identical across two runs", a.len()))
}

#[test]
fn acceptance() {
    let mut log = Vec::new();
    let clock = Instant::now();
    let timed = |f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let r = f();
        (r, t.elapsed().as_secs_f64())
    };
    let tally = induction_tally();
    let results: Vec<(u32, &str, (Outcome, f64))> = vec![
        (1, "orbit counts, brute force, gradedness", timed(&mut criterion_1)),
        (2, "induce_bundle round trip", timed(&mut criterion_2)),
        (3, "induction commutes with cc", timed(&mut || criterion_3(&tally))),
        (4, "support_check_contention", timed(&mut || criterion_4(&tally))),
        (5, "tempered_verify", timed(&mut criterion_5)),
        (6, "principal unipotent packet and twists", timed(&mut criterion_6)),
        (7, "ABV == AJ", timed(&mut || criterion_7(&mut log))),
        (8, "table invariants, stable characters", timed(&mut criterion_8)),
        (9, "deterministic JSON", timed(&mut criterion_9)),
    ];
    for l in &log {
        println!("    {l}");
    }
    let mut failed = Vec::new();
    for (n, name, (r, secs)) in &results {
        match r {
            Ok(detail) => println!("criterion {n} [{TOL}] PASS {name}: {detail} ({secs:.1}s)"),
            Err(why) => {
                println!("criterion {n} [{TOL}] FAIL {name}: {why} ({secs:.1}s)");
                failed.push(*n);
            }
        }
    }
    println!("total {:.1}s", clock.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
