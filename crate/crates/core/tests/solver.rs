use diffseq::solver::{compute_f_with, feasible_with, Feasibility, SolveOptions};
use diffseq::{
    compute_f, feasible, longest_mono_diffseq, Coloring, GapSet, SearchBudget, SolveStatus,
};

fn set(spec: &str) -> GapSet {
    GapSet::parse(spec).unwrap()
}

fn f(s: &GapSet, k: usize, r: usize) -> u64 {
    let res = compute_f(s, k, r, 500, SearchBudget::unlimited()).unwrap();
    assert_eq!(res.status, SolveStatus::Exact, "f({s}, {k}; {r})");
    res.value.unwrap()
}

/// Lex-least 2-coloring of [1, n] with no monochromatic k-term chain, by enumeration.
fn lex_least_avoiding(s: &GapSet, k: usize, n: usize) -> Option<Coloring> {
    (0u32..1 << n).find_map(|bits| {
        // most significant bit is position 1, so counting up is lex order
        let colors: Vec<u8> = (0..n).map(|i| (bits >> (n - 1 - i) & 1) as u8).collect();
        let c = Coloring::new(colors, 2).unwrap();
        (longest_mono_diffseq(&c, s).0 < k).then_some(c)
    })
}

#[test]
fn feasibility_matches_enumeration() {
    for spec in [
        "powers(2)",
        "fibonacci",
        "primes",
        "s_m(3)",
        "odds_plus_two",
        "explicit(1,2)",
    ] {
        let s = set(spec);
        for k in 2..=4 {
            for n in 1..=12 {
                let got = feasible(&s, k, 2, n, SearchBudget::unlimited())
                    .unwrap()
                    .result;
                match (lex_least_avoiding(&s, k, n), got) {
                    (Some(want), Feasibility::Coloring(c)) => {
                        assert_eq!(c, want, "{spec} k={k} n={n}")
                    }
                    (None, Feasibility::Infeasible) => {}
                    (want, got) => {
                        panic!("{spec} k={k} n={n}: enumeration {want:?}, search {got:?}")
                    }
                }
            }
        }
    }
}

#[test]
fn monotone_in_k_and_r() {
    for spec in ["powers(2)", "primes", "odds_plus_two", "s_m(5)"] {
        let s = set(spec);
        let values: Vec<u64> = (2..=6).map(|k| f(&s, k, 2)).collect();
        assert!(
            values.windows(2).all(|w| w[0] <= w[1]),
            "{spec}: {values:?}"
        );
    }
    let s = set("odds_plus_two");
    for k in 2..=4 {
        assert!(f(&s, k, 2) <= f(&s, k, 3));
    }
}

#[test]
fn larger_gap_set_gives_smaller_value() {
    // odds_plus_two ⊆ s_m(4)
    let (small, large) = (set("odds_plus_two"), set("s_m(4)"));
    for k in 2..=8 {
        assert!(f(&large, k, 2) <= f(&small, k, 2), "k = {k}");
    }
    let (small, large) = (set("powers(2)"), set("union(powers(2), primes)"));
    for k in 2..=6 {
        assert!(f(&large, k, 2) <= f(&small, k, 2), "k = {k}");
    }
}

#[test]
fn scaling_law() {
    for (spec, k) in [
        ("fibonacci", 4),
        ("primes", 4),
        ("s_m(5)", 5),
        ("powers(2)", 4),
    ] {
        let base = set(spec);
        let m = f(&base, k, 2);
        for j in [2u64, 3] {
            let scaled = GapSet::scaled(j, base.clone()).unwrap();
            let opts = SolveOptions {
                seed_bounds: false,
                ..Default::default()
            };
            let res = compute_f_with(&scaled, k, 2, 500, &opts).unwrap();
            assert_eq!(res.value, Some(j * (m - 1) + 1), "{spec} k={k} j={j}");
        }
    }
}

#[test]
fn seeding_does_not_change_results() {
    for (spec, k) in [
        ("powers(2)", 7),
        ("s_m(6)", 8),
        ("odds_plus_two", 9),
        ("residues(12; 1,2,5,7,10,11)", 5),
    ] {
        let s = set(spec);
        let seeded = compute_f_with(&s, k, 2, 500, &SolveOptions::default()).unwrap();
        let plain = compute_f_with(
            &s,
            k,
            2,
            500,
            &SolveOptions {
                seed_bounds: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(
            (seeded.value, &seeded.certificate),
            (plain.value, &plain.certificate),
            "{spec} k={k}"
        );
    }
}

#[test]
fn workers_do_not_change_results() {
    for (spec, k, r) in [
        ("powers(2)", 7, 2),
        ("primes+3", 5, 2),
        ("odds_plus_two", 3, 3),
    ] {
        let s = set(spec);
        let run = |workers| {
            let res = compute_f_with(
                &s,
                k,
                r,
                500,
                &SolveOptions {
                    workers,
                    ..Default::default()
                },
            )
            .unwrap();
            (res.status, res.value, res.certificate, res.nodes)
        };
        let one = run(1);
        for workers in [2, 4, 7] {
            assert_eq!(run(workers), one, "{spec} k={k} r={r} workers={workers}");
        }
        let n = one.1.unwrap() as usize - 1;
        let seq = feasible_with(&s, k, r, n, &SolveOptions::default()).unwrap();
        let par = feasible_with(
            &s,
            k,
            r,
            n,
            &SolveOptions {
                workers: 4,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }
}

#[test]
fn budget_exhaustion_reports_progress() {
    let res = compute_f(&set("powers(2)"), 8, 2, 500, SearchBudget::nodes(2_000)).unwrap();
    match res.status {
        SolveStatus::Timeout(n) => {
            assert_eq!(res.value, None);
            let cert = res.certificate.expect("largest feasible coloring");
            assert_eq!(cert.n() as u64, n);
            assert!(longest_mono_diffseq(&cert, &set("powers(2)")).0 < 8);
        }
        other => panic!("expected a timeout, got {other}"),
    }
}

#[test]
fn no_value_below_the_search_limit() {
    let res = compute_f(&set("explicit(1)"), 3, 2, 40, SearchBudget::unlimited()).unwrap();
    assert_eq!(res.status, SolveStatus::NotFoundUpTo(40));
    assert_eq!(res.value, None);
}
