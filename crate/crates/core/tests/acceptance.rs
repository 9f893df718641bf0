//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use lattower::autgroup::{
    brute_force_automorphisms, complemented_elements, factor_atoms, factor_atoms_by_slot,
    verify_product_formula, DEFAULT_MAX_LATTICE,
};
use lattower::gf2::Subspace;
use lattower::group_spec::{ChainPosition, SlotClass, TowerGroupSpec};
use lattower::lattice::{AdmissibleTriple, Family, Lattice};
use lattower::perm_oracle::{
    concrete_lattice, differential_validate, lemma_lattices, ConcreteGroup, DEFAULT_MAX_ORDER,
};
use lattower::tower::{run_tower, verify_step_against_lattice, StepStatus, TowerNode};

type Check = fn() -> Result<String, String>;

fn spec(s: &str) -> TowerGroupSpec {
    TowerGroupSpec::parse(s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// All multisets of `degrees` with at most `max_len` entries, including the empty one.
fn multisets(degrees: &[u32], max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for m in &frontier {
            let last = m.last().copied().unwrap_or(0);
            for &d in degrees.iter().filter(|&&d| d >= last) {
                let mut n = m.clone();
                n.push(d);
                next.push(n);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn census_of_s3_cubed() -> Result<String, String> {
    let l = Lattice::enumerate(&spec("S3^3")).map_err(|e| e.to_string())?;
    let c = l.census();
    ensure(
        (c.total, c.sub_products, c.sign_parity, c.mixed) == (38, 27, 4, 7),
        || format!("got {c}"),
    )?;
    Ok(c.to_string())
}

fn oracle_agreement() -> Result<String, String> {
    let mut parts = Vec::new();
    for s in ["S3^2", "S3^3", "S3*S4", "S4^2", "S3^2*S4"] {
        let r = differential_validate(&spec(s), DEFAULT_MAX_ORDER, 8).map_err(|e| e.to_string())?;
        ensure(
            r.is_ok() && r.profiles_bijective && r.membership_agrees,
            || format!("{s}: {r:?}"),
        )?;
        parts.push(format!(
            "{}: {} subgroups, {} pairs",
            r.spec, r.concrete_count, r.pairs_checked
        ));
    }
    Ok(parts.join("; "))
}

fn product_formula() -> Result<String, String> {
    let mut parts = Vec::new();
    for (s, expected) in [
        ("S3^2", 2),
        ("S3^3", 6),
        ("S4^2", 2),
        ("S3*S4", 1),
        ("S4^2*S3^2", 4),
        ("S5^2*S3^2", 24),
    ] {
        let r =
            verify_product_formula(&spec(s), 8, DEFAULT_MAX_LATTICE).map_err(|e| e.to_string())?;
        ensure(r.matches && r.brute_force_order == expected, || {
            format!("{s}: {r:?}")
        })?;
        parts.push(format!("{}={}", r.spec, r.brute_force_order));
    }
    Ok(parts.join(", "))
}

fn lemma_lattice_automorphisms() -> Result<String, String> {
    let count = |l: &lattower::poset::AbstractLattice| {
        brute_force_automorphisms(l, DEFAULT_MAX_LATTICE)
            .unwrap()
            .len()
    };
    for n in 3..=6u32 {
        let l = Lattice::enumerate(&TowerGroupSpec::from_degrees(&[n]).unwrap())
            .unwrap()
            .to_abstract();
        let concrete = ConcreteGroup::new(&[n], DEFAULT_MAX_ORDER).map_err(|e| e.to_string())?;
        let c = concrete_lattice(&concrete.all_normal_subgroups());
        ensure(
            count(&l) == 1 && count(&c) == 1 && l.len() == c.len(),
            || format!("S{n}"),
        )?;
    }
    let lemmas = lemma_lattices();
    let expected = [
        ("C2", 1),
        ("C2^2", 6),
        ("C2*S3", 2),
        ("C2*S4", 2),
        ("C2*S5", 2),
    ];
    for (name, autos) in expected {
        let got = count(&lemmas[name]);
        ensure(got == autos, || {
            format!("{name}: {got} automorphisms, expected {autos}")
        })?;
    }
    Ok("S3..S6 chains 1, C2 1, C2^2 6, C2*S3/S4/S5 2".into())
}

fn tower_termination() -> Result<String, String> {
    let specs = multisets(&[3, 4, 5, 6, 7], 6);
    let mut longest = 0;
    let mut pairs = BTreeSet::new();
    for degrees in &specs {
        let g = TowerGroupSpec::from_degrees(degrees).map_err(|e| e.to_string())?;
        let run = run_tower(TowerNode::Start(g.clone())).map_err(|e| e.to_string())?;
        ensure(run.steps() <= 3 && run.last().is_trivial(), || {
            format!("{g}: {}", run.format_line())
        })?;
        ensure(
            run.nodes
                .get(1)
                .is_none_or(|n| *n == TowerNode::pair(g.a4() as u32, g.b() as u32)),
            || format!("{g}: first step is not (a4, B)"),
        )?;
        longest = longest.max(run.steps());
        for n in run.nodes.iter().skip(1) {
            if let TowerNode::Pair { a, b } = n {
                pairs.insert((*a, *b));
            }
        }
    }
    for &(a, b) in &pairs {
        let r = verify_step_against_lattice(
            &TowerNode::pair(a, b),
            8,
            DEFAULT_MAX_ORDER,
            DEFAULT_MAX_LATTICE,
        );
        ensure(r.status == StepStatus::Match, || {
            format!("step from ({a},{b}): {r:?}")
        })?;
    }
    let run = run_tower(TowerNode::Start(spec("S4^2*S3^2"))).map_err(|e| e.to_string())?;
    let expected = vec![
        TowerNode::Start(spec("S4^2*S3^2")),
        TowerNode::pair(2, 2),
        TowerNode::pair(0, 3),
        TowerNode::pair(0, 0),
    ];
    ensure(run.nodes == expected && !run.nodes[2].is_trivial(), || {
        run.format_line()
    })?;
    Ok(format!(
        "{} specs, longest {longest} steps, {} pair steps cross-checked; {}",
        specs.len(),
        pairs.len(),
        run.format_line()
    ))
}

fn property_suites() -> Result<String, String> {
    use ChainPosition::*;
    let mut checked = 0usize;

    for degrees in multisets(&[3, 4, 5], 3) {
        let l = Lattice::enumerate(&TowerGroupSpec::from_degrees(&degrees).unwrap()).unwrap();
        let n = l.len();
        for x in 0..n {
            for z in (0..n).filter(|&z| l.leq(x, z).unwrap()) {
                for y in 0..n {
                    let left = l.join(x, l.meet(y, z).unwrap()).unwrap();
                    let right = l.meet(l.join(x, y).unwrap(), z).unwrap();
                    ensure(left == right, || {
                        format!("modular law fails in {}", l.spec())
                    })?;
                    checked += 1;
                }
            }
        }
    }

    for degrees in multisets(&[3, 4, 5], 5) {
        let g = TowerGroupSpec::from_degrees(&degrees).unwrap();
        let l = Lattice::enumerate(&g).unwrap();
        let n = l.len();
        for e in l.elements() {
            ensure(
                e.profile.to_triple(&g).unwrap() == e.triple && e.triple.to_profile() == e.profile,
                || format!("round trip fails in {g}"),
            )?;
        }
        for i in 0..n {
            for j in 0..n {
                ensure(
                    l.leq(i, j).unwrap() == l.leq_by_triples(i, j).unwrap(),
                    || format!("leq implementations disagree in {g} at ({i},{j})"),
                )?;
                checked += 1;
            }
        }
        let parity: Vec<usize> = (0..n)
            .filter(|&i| matches!(l.elements()[i].family, Family::SignParity { .. }))
            .collect();
        let t = g.slot_count() as u32;
        ensure(
            parity.len() == (1usize << t) - t as usize - 1 || t == 0,
            || format!("parity count in {g}"),
        )?;
        let order = g.group_order().unwrap();
        for &a in &parity {
            ensure(l.elements()[a].order * 2 == order, || {
                format!("D_I index in {g}")
            })?;
            for &b in parity.iter().filter(|&&b| b != a) {
                ensure(!l.leq(a, b).unwrap(), || {
                    format!("D_I not an antichain in {g}")
                })?;
                ensure(l.join(a, b).unwrap() == l.top(), || {
                    format!("D_I join in {g}")
                })?;
                ensure(
                    l.elements()[l.meet(a, b).unwrap()].order * 4 == order,
                    || format!("D_I meet in {g}"),
                )?;
            }
        }
    }

    let g = spec("S3^3");
    let l = Lattice::enumerate(&g).unwrap();
    let mut orders = BTreeSet::new();
    for (i, e) in l.elements().iter().enumerate() {
        if e.family == Family::Mixed {
            orders.insert(e.order);
            ensure(l.decompose_mixed(i).is_ok(), || "decomposition".into())?;
        }
    }
    ensure(orders == BTreeSet::from([18, 54]), || {
        format!("mixed orders {orders:?}")
    })?;
    let all_same = Subspace::from_bit_strings(3, &["111".to_string()]).unwrap();
    let e = AdmissibleTriple::new(&g, &[0, 1, 2], &BTreeMap::new(), all_same).unwrap();
    ensure(
        e.family() == Family::Mixed && e.order(&g).unwrap() == 54,
        || "E".into(),
    )?;
    let meet = l
        .meet(
            l.sign_parity(&[0, 1]).unwrap(),
            l.sign_parity(&[1, 2]).unwrap(),
        )
        .unwrap();
    ensure(l.elements()[meet].triple == e, || {
        "E is not D12 ∧ D23".into()
    })?;
    let type1 = l
        .meet(
            l.sign_parity(&[0, 1]).unwrap(),
            l.sub_product(&[Full, Full, Triv]).unwrap(),
        )
        .unwrap();
    ensure(l.elements()[type1].order == 18, || "type-1 order".into())?;

    Ok(format!(
        "{checked} modular/leq checks, orders 18/54, index 2 and 4"
    ))
}

fn complemented_elements_are_full_sub_products() -> Result<String, String> {
    let mut lattices = 0;
    for degrees in multisets(&[3, 4, 5], 4) {
        let g = TowerGroupSpec::from_degrees(&degrees).unwrap();
        let l = Lattice::enumerate(&g).unwrap();
        let a = l.to_abstract();
        let t = g.slot_count();
        let full: BTreeSet<usize> = (0..1u32 << t)
            .map(|mask| {
                let pos: Vec<ChainPosition> = (0..t)
                    .map(|s| {
                        if mask >> s & 1 == 1 {
                            ChainPosition::Full
                        } else {
                            ChainPosition::Triv
                        }
                    })
                    .collect();
                l.sub_product(&pos).unwrap()
            })
            .collect();
        let comp: BTreeSet<usize> = complemented_elements(&a).into_iter().collect();
        ensure(comp == full, || {
            format!("{g}: {} complemented, expected {}", comp.len(), full.len())
        })?;
        ensure(factor_atoms(&a).len() == t, || format!("{g}: factor atoms"))?;
        if t > 0 {
            let atoms = factor_atoms_by_slot(&l, &a).map_err(|e| e.to_string())?;
            for (s, &x) in atoms.iter().enumerate() {
                let want = if g.slots()[s].class == SlotClass::A {
                    3
                } else {
                    2
                };
                ensure(a.height(x) == want, || {
                    format!("{g}: slot {s} interval length")
                })?;
            }
        }
        lattices += 1;
    }
    Ok(format!("{lattices} lattices with T <= 4"))
}

fn main() {
    let criteria: [(&str, Duration, Check); 7] = [
        (
            "census of N(S3^3)",
            Duration::from_secs(1),
            census_of_s3_cubed,
        ),
        (
            "oracle agreement",
            Duration::from_secs(60),
            oracle_agreement,
        ),
        ("product formula", Duration::from_secs(60), product_formula),
        (
            "lemma lattices",
            Duration::from_secs(5),
            lemma_lattice_automorphisms,
        ),
        (
            "tower termination and sharpness",
            Duration::from_secs(5),
            tower_termination,
        ),
        ("property suites", Duration::from_secs(120), property_suites),
        (
            "complemented elements",
            Duration::from_secs(30),
            complemented_elements_are_full_sub_products,
        ),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= *limit {
                Ok(msg)
            } else {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(msg) => println!("PASS criterion {}: {name} [{elapsed:.2?}] {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {}: {name} [{elapsed:.2?}] {msg}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
