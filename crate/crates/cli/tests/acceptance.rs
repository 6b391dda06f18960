//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see them.

use std::collections::HashSet;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use deltagroup_core::algebra::dw::{build_dw, check_dw_condition, flat_labels, MultiplicativeCocycle};
use deltagroup_core::algebra::sixj::{build_sixj, check_sixj_identity, SixJData};
use deltagroup_core::algebra::{
    delta_to_strong, derive_mtilde, int, verify_orthogonal, verify_strong, verify_three_algebra,
    StrongThreeAlgebra, DEFAULT_MAX_DIM,
};
use deltagroup_core::cohomology::Cohomology;
use deltagroup_core::delta::{are_isomorphic, build_t_g_0, build_t_g_a_alpha, build_trivial_base, check_d1};
use deltagroup_core::evaluator::{coherence_check, LabeledTriangulation, Triangulation};
use deltagroup_core::{Cochain, FiniteGroup, GModule, Transposition};

const LIMIT_1: Duration = Duration::from_secs(120);
const LIMIT_2: Duration = Duration::from_secs(300);
const LIMIT_3: Duration = Duration::from_secs(300);
const LIMIT_4: Duration = Duration::from_secs(120);
const LIMIT_5: Duration = Duration::from_secs(300);
const LIMIT_6: Duration = Duration::from_secs(300);
const LIMIT_7: Duration = Duration::from_secs(600);
const LIMIT_8: Duration = Duration::from_secs(300);
const MAX_SPACE: u64 = 1 << 16;

fn verdict(n: usize, title: &str, ok: bool, detail: &str, start: Instant, limit: Duration) {
    let t = start.elapsed();
    let ok = ok && t <= limit;
    println!(
        "{} criterion {n} ({title}): {detail} [{:.1}s, limit {}s]",
        if ok { "PASS" } else { "FAIL" },
        t.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn grp(g: FiniteGroup) -> Arc<FiniteGroup> {
    Arc::new(g)
}

/// Z/2 and Z/3 acting trivially, plus Z/3 through the sign character when
/// the group has one.
fn small_modules(g: &Arc<FiniteGroup>) -> Vec<(String, Arc<GModule>)> {
    let mut out = vec![
        ("Z/2".to_string(), Arc::new(GModule::trivial(g.clone(), 2, 1).unwrap())),
        ("Z/3".to_string(), Arc::new(GModule::trivial(g.clone(), 3, 1).unwrap())),
    ];
    if let Some(chi) = g.characters_to_z2().get(1) {
        out.push(("Z/3 sign".to_string(), Arc::new(GModule::sign(g.clone(), 3, chi).unwrap())));
    }
    out
}

#[test]
fn criterion_1_sigma_action() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0usize;
    let mut bad = Vec::new();
    let act = |s: &Cochain, i: usize| s.transposition_action(Transposition::new(i, s.degree()).unwrap()).unwrap();
    for (gname, g) in [
        ("Z/2", FiniteGroup::cyclic(2).unwrap()),
        ("Z/3", FiniteGroup::cyclic(3).unwrap()),
        ("S3", FiniteGroup::symmetric(3).unwrap()),
    ] {
        let g = grp(g);
        for (aname, a) in small_modules(&g) {
            for n in 1..=4 {
                for _ in 0..200 {
                    let s = Cochain::random(a.clone(), n, &mut rng).unwrap();
                    let mut ok = true;
                    for i in 1..=n {
                        ok &= act(&act(&s, i), i) == s;
                        if i < n {
                            ok &= act(&act(&act(&s, i), i + 1), i) == act(&act(&act(&s, i + 1), i), i + 1);
                        }
                        for j in i + 2..=n {
                            ok &= act(&act(&s, i), j) == act(&act(&s, j), i);
                        }
                    }
                    let sym = s.symmetrize();
                    ok &= sym.is_symmetric() && sym.differential().is_symmetric();
                    checked += 1;
                    if !ok {
                        bad.push(format!("{gname}/{aname}/n={n}"));
                    }
                }
            }
        }
    }
    verdict(
        1,
        "Σ-action relations",
        bad.is_empty(),
        &format!("{checked} random cochains, {} violations {:?}", bad.len(), bad.first()),
        start,
        LIMIT_1,
    );
}

struct Counts {
    h: u128,
    hs: u128,
}

/// |Z|/|B| and |ZS|/|BS| by listing every cochain.
fn brute_force(a: &Arc<GModule>, n: usize) -> Counts {
    let size = Cochain::space_size(a, n).unwrap();
    let (mut z, mut zs) = (0u128, 0u128);
    for i in 0..size {
        let c = Cochain::from_index(a.clone(), n, i).unwrap();
        if c.is_cocycle() {
            z += 1;
            if c.is_symmetric() {
                zs += 1;
            }
        }
    }
    let (mut b, mut bs) = (HashSet::new(), HashSet::new());
    if n == 0 {
        b.insert(Vec::new());
        bs.insert(Vec::new());
    } else {
        for i in 0..Cochain::space_size(a, n - 1).unwrap() {
            let phi = Cochain::from_index(a.clone(), n - 1, i).unwrap();
            let d = phi.differential().values().to_vec();
            if phi.is_symmetric() {
                bs.insert(d.clone());
            }
            b.insert(d);
        }
    }
    Counts {
        h: z / b.len() as u128,
        hs: zs / bs.len() as u128,
    }
}

#[test]
fn criterion_2_cohomology_oracle() {
    let start = Instant::now();
    let groups = [
        ("1", FiniteGroup::trivial()),
        ("Z/2", FiniteGroup::cyclic(2).unwrap()),
        ("Z/3", FiniteGroup::cyclic(3).unwrap()),
        ("Z/4", FiniteGroup::cyclic(4).unwrap()),
        ("V4", FiniteGroup::klein_four()),
        ("Z/6", FiniteGroup::cyclic(6).unwrap()),
        ("S3", FiniteGroup::symmetric(3).unwrap()),
    ];
    let mut cases = 0;
    let mut bad = Vec::new();
    for (gname, g) in groups {
        let g = grp(g);
        let mut mods = small_modules(&g);
        mods.push(("Z/4".into(), Arc::new(GModule::trivial(g.clone(), 4, 1).unwrap())));
        for (aname, a) in mods {
            let coh = Cohomology::new(a.clone());
            for n in 0..=4 {
                match Cochain::space_size(&a, n) {
                    Some(s) if s <= MAX_SPACE => {}
                    _ => continue,
                }
                let o = brute_force(&a, n);
                let h = coh.cohomology_group(n).unwrap().order().unwrap();
                let hs = coh.symmetric_cohomology_group(n).unwrap().order().unwrap();
                cases += 1;
                if (h, hs) != (o.h, o.hs) {
                    bad.push(format!("{gname}/{aname}/n={n}: snf ({h},{hs}) brute ({},{})", o.h, o.hs));
                }
            }
        }
    }

    // values checked against the brute force above and frozen here
    let z2 = grp(FiniteGroup::cyclic(2).unwrap());
    let coh = Cohomology::new(Arc::new(GModule::trivial(z2, 2, 1).unwrap()));
    let named = [
        ("HS^1(Z/2,Z/2)", coh.symmetric_cohomology_group(1).unwrap().invariant_factors().to_vec(), vec![2u64]),
        ("HS^2(Z/2,Z/2)", coh.symmetric_cohomology_group(2).unwrap().invariant_factors().to_vec(), vec![]),
        ("H^2(Z/2,Z/2)", coh.cohomology_group(2).unwrap().invariant_factors().to_vec(), vec![2]),
    ];
    for (name, got, want) in &named {
        if got != want {
            bad.push(format!("{name} = {got:?}, expected {want:?}"));
        }
    }
    // HS^0 = A^G
    let s3 = grp(FiniteGroup::symmetric(3).unwrap());
    for (aname, a) in small_modules(&s3) {
        let fixed = (0..a.modulus())
            .filter(|&x| s3.elements().all(|g| a.act(g, &[x]) == vec![x]))
            .count() as u128;
        let hs0 = Cohomology::new(a).symmetric_cohomology_group(0).unwrap().order().unwrap();
        if hs0 != fixed {
            bad.push(format!("HS^0(S3,{aname}) = {hs0}, A^G has {fixed}"));
        }
    }
    verdict(
        2,
        "cohomology oracle",
        bad.is_empty(),
        &format!("{cases} (G,A,n) cases with |C^n| ≤ 2^16 plus named values; mismatches {bad:?}"),
        start,
        LIMIT_2,
    );
}

#[test]
fn criterion_3_injectivity() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut data = Vec::new();
    let mut cases = 0;
    for (gname, g) in FiniteGroup::small_groups(6).unwrap() {
        let g = grp(g);
        for (aname, a) in small_modules(&g) {
            let coh = Cohomology::new(a);
            for n in 1..=2 {
                cases += 1;
                let k = coh.natural_map_kernel(n).unwrap();
                if !k.is_trivial() {
                    bad.push(format!("{gname}/{aname}/n={n}: {:?}", k.invariant_factors()));
                }
            }
            let k3 = coh.natural_map_kernel(3).unwrap();
            if !k3.is_trivial() {
                data.push(format!("{gname}/{aname}: {:?}", k3.invariant_factors()));
            }
        }
    }
    println!("  degree 3 kernels that are nontrivial: {data:?}");
    verdict(
        3,
        "HS^n -> H^n injective for n = 1, 2",
        bad.is_empty(),
        &format!("{cases} cases, nontrivial kernels {bad:?}"),
        start,
        LIMIT_3,
    );
}

fn z2z2() -> Arc<GModule> {
    Arc::new(GModule::trivial(grp(FiniteGroup::cyclic(2).unwrap()), 2, 1).unwrap())
}

#[test]
fn criterion_4_twisted_delta_groups() {
    let start = Instant::now();
    let a = z2z2();
    let mut exceptions = Vec::new();
    let mut valid = 0;
    for i in 0..256 {
        let alpha = Cochain::from_index(a.clone(), 3, i).unwrap();
        let axioms = build_t_g_a_alpha(&alpha).unwrap().verify().all_pass();
        let predicted = alpha.is_cocycle() && check_d1(&alpha).unwrap();
        valid += usize::from(axioms);
        if axioms != predicted {
            exceptions.push(i);
        }
    }
    verdict(
        4,
        "Δ-group axioms ⇔ cocycle and (d1)",
        exceptions.is_empty(),
        &format!("256 cochains, {valid} valid, exceptions {exceptions:?}"),
        start,
        LIMIT_4,
    );
}

#[test]
fn criterion_5_isomorphism_procedures() {
    let start = Instant::now();
    let a = z2z2();
    let coh = Cohomology::new(a.clone());
    let valid: Vec<Cochain> = (0..256)
        .map(|i| Cochain::from_index(a.clone(), 3, i).unwrap())
        .filter(|c| c.is_cocycle() && check_d1(c).unwrap())
        .collect();
    let mut errors = Vec::new();
    let mut iso = 0;
    for x in &valid {
        for y in &valid {
            // an error here means the two procedures disagree
            match are_isomorphic(&coh, x, y) {
                Ok(d) => iso += usize::from(d.isomorphic),
                Err(e) => errors.push(e.to_string()),
            }
        }
    }
    let pairs = valid.len() * valid.len();
    verdict(
        5,
        "isomorphism procedures agree",
        errors.is_empty() && pairs > 0,
        &format!("{pairs} pairs, {iso} isomorphic, disagreements {errors:?}"),
        start,
        LIMIT_5,
    );
}

fn equivalent(s: &StrongThreeAlgebra) -> (bool, bool) {
    let strong = verify_strong(s, DEFAULT_MAX_DIM).unwrap().all_pass();
    let three = verify_three_algebra(&derive_mtilde(s), DEFAULT_MAX_DIM).unwrap().all_pass();
    (strong, three)
}

#[test]
fn criterion_6_strong_vs_three_algebra() {
    let start = Instant::now();
    let trivial = grp(FiniteGroup::trivial());
    let z2 = grp(FiniteGroup::cyclic(2).unwrap());
    let z2z2 = Arc::new(GModule::trivial(z2.clone(), 2, 1).unwrap());
    let base: Vec<(&str, StrongThreeAlgebra)> = vec![
        ("T(1,Z/2)", delta_to_strong(&build_trivial_base(Arc::new(GModule::trivial(trivial.clone(), 2, 1).unwrap())).unwrap()).unwrap()),
        ("T(1,Z/4)", delta_to_strong(&build_trivial_base(Arc::new(GModule::trivial(trivial, 4, 1).unwrap())).unwrap()).unwrap()),
        ("T(Z/2,0)", delta_to_strong(&build_t_g_0(z2.clone()).unwrap()).unwrap()),
        ("T(Z/3,0)", delta_to_strong(&build_t_g_0(grp(FiniteGroup::cyclic(3).unwrap())).unwrap()).unwrap()),
        ("T(Z/2,Z/2,0)", delta_to_strong(&build_t_g_a_alpha(&Cochain::zero(z2z2, 3).unwrap()).unwrap()).unwrap()),
        ("DW(Z/2,1)", build_dw(&MultiplicativeCocycle::constant(z2, int(1)).unwrap())),
    ];
    let mut mismatches = Vec::new();
    let mut all_pass = 0;
    for (name, s) in &base {
        let (a, b) = equivalent(s);
        all_pass += usize::from(a && b);
        if a != b {
            mismatches.push(name.to_string());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mutations = 24;
    let mut still_strong = 0;
    for k in 0..mutations {
        let (name, s) = &base[k % base.len()];
        let mut s = s.clone();
        let d = s.dim();
        let c = int([-2, -1, 1, 2][rng.gen_range(0..4)]);
        let what = if k % 4 == 3 {
            let (i, o) = (rng.gen_range(0..d), rng.gen_range(0..d));
            s.add_p(i, o, c).unwrap();
            format!("P[{i}->{o}]")
        } else {
            let x = [rng.gen_range(0..d), rng.gen_range(0..d), rng.gen_range(0..d)];
            let o = rng.gen_range(0..d);
            s.add_m(x, o, c).unwrap();
            format!("m{x:?}->{o}")
        };
        let (a, b) = equivalent(&s);
        still_strong += usize::from(a);
        if a != b {
            mismatches.push(format!("{name} + {what}"));
        }
    }
    verdict(
        6,
        "strong ⇔ 3-algebra via m̃",
        mismatches.is_empty() && all_pass == base.len(),
        &format!(
            "{} constructed algebras all pass both, {mutations} mutations ({still_strong} still strong), mismatches {mismatches:?}",
            base.len()
        ),
        start,
        LIMIT_6,
    );
}

#[test]
fn criterion_7_iff_claims() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut sixj_cases = 0;
    for w in [-2i64, -1, 1, 2] {
        for f in -2i64..=2 {
            let d = SixJData::constant(1, int(f), vec![int(w)]).unwrap();
            let three = verify_three_algebra(&derive_mtilde(&build_sixj(&d).unwrap()), DEFAULT_MAX_DIM).unwrap();
            sixj_cases += 1;
            if check_sixj_identity(&d) != three.all_pass() {
                bad.push(format!("6j singleton w={w} f={f}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut holds = 0;
    for t in 0..10 {
        let w = vec![int(rng.gen_range(1..=2)), int(rng.gen_range(1..=2))];
        let d = SixJData::random(2, w, 1, &mut rng).unwrap();
        let id = check_sixj_identity(&d);
        let three = verify_three_algebra(&derive_mtilde(&build_sixj(&d).unwrap()), DEFAULT_MAX_DIM).unwrap();
        holds += usize::from(id);
        sixj_cases += 1;
        if id != three.all_pass() {
            bad.push(format!("6j random #{t}"));
        }
    }
    let half = SixJData::constant(2, int(1) / int(2), vec![int(1), int(1)]).unwrap();
    let three = verify_three_algebra(&derive_mtilde(&build_sixj(&half).unwrap()), DEFAULT_MAX_DIM).unwrap();
    sixj_cases += 1;
    if !(check_sixj_identity(&half) && three.all_pass()) {
        bad.push("6j |I|=2 f=1/2".into());
    }

    let z2 = grp(FiniteGroup::cyclic(2).unwrap());
    let mut off_cocycle = Vec::new();
    let mut cocycles = 0;
    for mask in 0..256u64 {
        let alpha = MultiplicativeCocycle::from_sign_mask(z2.clone(), mask).unwrap();
        let strong = verify_strong(&build_dw(&alpha), DEFAULT_MAX_DIM).unwrap().all_pass();
        let cond = check_dw_condition(&alpha);
        if alpha.is_cocycle() {
            cocycles += 1;
            if strong != cond {
                bad.push(format!("DW cocycle mask {mask}"));
            }
        } else if strong != cond {
            off_cocycle.push(mask);
        }
    }
    println!(
        "  finding: among the 248 sign-valued α that are not 3-cocycles, the DW condition and the strong axioms disagree at masks {off_cocycle:?} (condition holds, m-m-u fails)"
    );
    verdict(
        7,
        "6j identity and DW condition iff claims",
        bad.is_empty(),
        &format!(
            "{sixj_cases} 6j data ({holds} random satisfy the identity); DW iff on {cocycles} cocycle α; {} non-cocycle discrepancies reported; failures {bad:?}",
            off_cocycle.len()
        ),
        start,
        LIMIT_7,
    );
}

#[test]
fn criterion_8_coherence() {
    let start = Instant::now();
    let z2 = grp(FiniteGroup::cyclic(2).unwrap());
    let dw = derive_mtilde(&build_dw(&MultiplicativeCocycle::constant(z2.clone(), int(1)).unwrap()));
    let sixj = derive_mtilde(&build_sixj(&SixJData::constant(1, int(1), vec![int(1)]).unwrap()).unwrap());
    let orthogonal = verify_orthogonal(&dw).all_pass() && verify_orthogonal(&sixj).all_pass();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = Vec::new();
    let mut nonzero = 0;
    let mut runs = 0;
    for i in 0..50 {
        let t = Triangulation::random(rng.gen_range(0..=3), rng.gen_range(0..=3), &mut rng);
        assert!(t.cell_count() <= 8);
        let phi: Vec<usize> = (0..t.vertex_count()).map(|_| rng.gen_range(0..2)).collect();
        let flat = LabeledTriangulation::new(t.clone(), flat_labels(&z2, t.cells(), &phi)).unwrap();
        let plain = LabeledTriangulation::new(t.clone(), vec![0; t.cell_count()]).unwrap();
        for (name, lt, alg) in [("DW", &flat, &dw), ("6j", &plain, &sixj)] {
            let rep = coherence_check(lt, alg, 10, 100 * i);
            runs += rep.results.len();
            if !rep.passed() {
                bad.push(format!("{name} #{i}"));
            } else if matches!(&rep.results[0], Ok(st) if !st.is_zero()) {
                nonzero += 1;
            }
        }
    }
    verdict(
        8,
        "evaluation coherence",
        orthogonal && bad.is_empty(),
        &format!("orthogonal {orthogonal}; 2 algebras x 50 triangulations x 10 seeds = {runs} runs, {nonzero}/100 nonzero, incoherent {bad:?}"),
        start,
        LIMIT_8,
    );
}

fn scratch_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("deltagroup-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(dir: &PathBuf, args: &[&str]) -> (Vec<u8>, Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_deltagroup"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    (out.stdout, out.stderr, out.status.code())
}

#[test]
fn criterion_9_determinism() {
    let start = Instant::now();
    let dir = scratch_dir();
    let setup: &[&[&str]] = &[
        &["generate", "dw", "--group", "cyclic:2", "--output", "dw.json"],
        &["generate", "triangulation", "--subdivisions", "3", "--flips", "2", "--seed", "9", "--group", "cyclic:2", "--output", "tri.json"],
        &["generate", "T_G_0", "--group", "symmetric:3", "--output", "tg0.json"],
    ];
    for a in setup {
        assert_eq!(run(&dir, a).2, Some(0), "{a:?}");
    }
    let invocations: &[&[&str]] = &[
        &["cohomology", "--group", "symmetric:3", "--module", "sign:3", "--degree", "2", "--symmetric"],
        &["classify", "--group", "cyclic:2", "--module", "trivial:2"],
        &["verify-delta", "--input", "tg0.json"],
        &["verify-algebra", "--input", "dw.json"],
        &["generate", "dw", "--group", "cyclic:2", "--alpha-mask", "64"],
        &["generate", "sixj", "--size", "2", "--seed", "3", "--weights", "1,2"],
        &["generate", "triangulation", "--subdivisions", "3", "--seed", "5", "--dim", "4"],
        &["generate", "T_G_A_alpha", "--group", "cyclic:2", "--module", "trivial:2"],
        &["evaluate", "--input", "tri.json", "--input", "dw.json", "--seed", "4"],
        &["evaluate", "--input", "tri.json", "--input", "dw.json", "--seed", "4", "--trials", "6", "--jobs", "3"],
    ];
    let mut differ = Vec::new();
    for a in invocations {
        let first = run(&dir, a);
        let second = run(&dir, a);
        if first != second || first.0.is_empty() {
            differ.push(a.join(" "));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    verdict(
        9,
        "CLI determinism",
        differ.is_empty(),
        &format!("{} invocations run twice, differing {differ:?}", invocations.len()),
        start,
        Duration::from_secs(300),
    );
}
