//! Extended randomized cross-validation sweep (not part of the test suite).

use layercross::brute::{brute_decide, brute_min, solve3_exact, BruteConfig, Solve3Outcome};
use layercross::graph::{count_crossings, Instance};
use layercross::kernel2::{kernelize2, Kernel2Outcome};
use layercross::kernel3::{kernelize3, Kernel3Outcome, KernelMode};
use layercross::sample;
use layercross::subexp2::{solve2, Solve2Config, Solve2Outcome, Solve2Stats};
use rand::Rng;

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x517e55);
    let rounds: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(400);
    let mut rng = sample::rng(seed);
    let bcfg = BruteConfig::default();
    let mut stats = Solve2Stats::default();

    let mut solved2 = 0;
    for i in 0..rounds {
        // The forced-recursion rounds stay on the smaller envelope the
        // separator enumeration is sized for.
        let force_recursion = i % 7 == 0;
        let per_layer = if force_recursion { 4 } else { 5 };
        let extra = rng.gen_range(0..5);
        let base = if i % 2 == 0 {
            sample::random_graph(&mut rng, 2, per_layer, 0.45)
        } else {
            sample::connected_graph(&mut rng, 2, per_layer, extra)
        };
        let g = if i % 5 == 0 {
            sample::with_random_multiplicities(&mut rng, &base, 3)
        } else {
            base
        };
        let k = rng.gen_range(0..=if force_recursion { 4 } else { 5 });
        let inst = Instance::new(g, k);
        let (min, _) = brute_min(&inst.graph, None, None, &bcfg).unwrap();
        let cfg = if force_recursion {
            Solve2Config {
                base_c: 1,
                ..Default::default()
            }
        } else {
            Solve2Config::default()
        };
        match solve2(&inst, &cfg, &mut stats).unwrap() {
            Solve2Outcome::Yes { min: got, drawing } => {
                assert!(min <= k, "round {i}: yes but oracle min {min} > {k}");
                assert_eq!(got, min, "round {i}: wrong minimum");
                assert_eq!(
                    count_crossings(&inst.graph, &drawing).unwrap().total,
                    min,
                    "round {i}: witness recount"
                );
            }
            Solve2Outcome::No => assert!(min > k, "round {i}: no but min {min} <= {k}"),
        }
        solved2 += 1;
    }
    println!("solve2 sweep: {solved2} instances ok ({stats:?})");

    let mut k2 = 0;
    for i in 0..rounds {
        let extra = rng.gen_range(0..4);
        let g = sample::connected_graph(&mut rng, 2, 6, extra);
        if g.n() > 12 {
            continue;
        }
        let inst = Instance::new(g, rng.gen_range(0..=3));
        let before = brute_decide(&inst, None, &bcfg).unwrap().is_some();
        let after = match kernelize2(&inst).unwrap() {
            Kernel2Outcome::DecidedYes { .. } => true,
            Kernel2Outcome::DecidedNo => false,
            Kernel2Outcome::Kernelized { instance, .. } => {
                brute_decide(&instance, None, &bcfg).unwrap().is_some()
            }
        };
        assert_eq!(before, after, "round {i}: 2-layer kernel decision drift");
        k2 += 1;
    }
    println!("kernel2 sweep: {k2} instances ok");

    let mut k3 = 0;
    let mut s3 = 0;
    for i in 0..rounds {
        let p = rng.gen_range(0.2..0.6);
        let extra = rng.gen_range(0..5);
        let g = if i % 2 == 0 {
            sample::random_graph(&mut rng, 3, 4, p)
        } else {
            sample::connected_graph(&mut rng, 3, 4, extra)
        };
        if g.n() > 12 {
            continue;
        }
        let inst = Instance::new(g, rng.gen_range(0..=2));
        let want = brute_decide(&inst, None, &bcfg).unwrap().is_some();
        for mode in [KernelMode::Scheduled, KernelMode::Fixpoint] {
            let got = match kernelize3(&inst, mode).unwrap() {
                Kernel3Outcome::DecidedYes { .. } => true,
                Kernel3Outcome::DecidedNo => false,
                Kernel3Outcome::Kernelized { instance, .. } => {
                    brute_decide(&instance, None, &bcfg).unwrap().is_some()
                }
            };
            assert_eq!(want, got, "round {i}: {mode:?} kernel decision drift");
        }
        k3 += 1;
        match solve3_exact(&inst, 50_000_000).unwrap() {
            Solve3Outcome::Yes { .. } => assert!(want, "round {i}: solve3 false yes"),
            Solve3Outcome::No => assert!(!want, "round {i}: solve3 false no"),
        }
        s3 += 1;
    }
    println!("kernel3 sweep: {k3} ok; solve3 sweep: {s3} ok");
}
