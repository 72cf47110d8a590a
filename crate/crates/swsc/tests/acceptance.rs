//! Acceptance criteria: one PASS/FAIL line per criterion with its pinned tolerance and
//! time limit. Exits nonzero if any criterion fails.

use std::time::Instant;

use swsc::regions::{rs_gap_demo, GapConfig};
use swsc::simulator::{simulate, theory_point, BlockSchedule, SimConfig, BLER_TARGET};
use swsc::verify::{run_suite, Suite};

struct Outcome {
    passed: bool,
    detail: String,
}

fn suite(s: Suite) -> Outcome {
    let r = run_suite(s).expect("suite runs");
    let worst: Vec<String> = r.checks.iter().map(|c| format!("{} {:.3e}<={:.0e}", c.name, c.max_residual, c.tolerance)).collect();
    Outcome { passed: r.passed(), detail: worst.join("; ") }
}

fn union_suites() -> Outcome {
    let a = suite(Suite::Thm2);
    let b = suite(Suite::Prop2);
    Outcome { passed: a.passed && b.passed, detail: format!("{}; {}", a.detail, b.detail) }
}

fn gap_demo() -> Outcome {
    let r = rs_gap_demo(&GapConfig::default()).expect("gap demo runs");
    // Positive after rounding to three decimals.
    let passed = r.strong_not_very_strong && (r.margin * 1000.0).round() > 0.0;
    Outcome {
        passed,
        detail: format!(
            "SNR {} dB INR {} dB, SND corner R1 {:.4}, best rate-splitting R1 {:.4} (s={}, t={}), margin {:.3}",
            r.snr_db,
            r.inr_db,
            r.snd_r1,
            r.best.r1,
            r.best.x_split.layers(),
            r.best.w_split.layers(),
            r.margin
        ),
    }
}

fn theory_curve() -> Outcome {
    let mut ok = true;
    let mut ratios = Vec::new();
    for inr in [6.0, 7.0, 8.0, 9.0, 10.0] {
        let p = theory_point(8.0, inr, "4pam_natural", "bpsk").expect("theory point");
        ok &= p.ian_gaussian <= p.swcm && p.ian_marginal <= p.swcm && p.swcm <= p.snd + 1e-12;
        ratios.push(p.swcm / p.ian_gaussian);
    }
    ok &= ratios.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Outcome { passed: ok, detail: format!("SWCM/IAN ratios at INR 6..10 dB: {}", shown.join(", ")) }
}

fn simulated_gain() -> Outcome {
    let base = SimConfig { n: 1024, b: 12, trials: 100, snr_db: 8.0, inr_db: 8.0, ..Default::default() };
    let mut tried = Vec::new();
    for r in [0.3, 0.35, 0.4, 0.45, 0.5] {
        let res = simulate(&SimConfig { rates: [r, r], ..base.clone() }).expect("simulation runs");
        let s = [res.swsc.streams[0].bler, res.swsc.streams[1].bler];
        let i = [res.ian.streams[0].bler, res.ian.streams[1].bler];
        tried.push(format!("{r}: swsc {:.2}/{:.2} ian {:.2}/{:.2}", s[0], s[1], i[0], i[1]));
        if s.iter().all(|&b| b < BLER_TARGET) && i.iter().any(|&b| b > 0.5) {
            return Outcome { passed: true, detail: format!("rate {}", tried.last().unwrap()) };
        }
    }
    Outcome { passed: false, detail: tried.join("; ") }
}

fn determinism() -> Outcome {
    let cfg = SimConfig { n: 256, b: 6, trials: 6, snr_db: 6.0, inr_db: 7.0, master_seed: 42, ..Default::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let r = simulate(&cfg).unwrap();
            serde_json::to_string(&(r.swsc, r.ian)).unwrap()
        })
    };
    let same = run(1) == run(4);
    let t1 = BlockSchedule::new(2, 4).unwrap().table(1, "X");
    let t2 = BlockSchedule::new(3, 5).unwrap().table(1, "X");
    let tables = t1 == "block\t1\t2\t3\t4\nX1\t1\tm1(1)\tm1(2)\tm1(3)\nX2\tm1(1)\tm1(2)\tm1(3)\t1\n"
        && t2
            == "block\t1\t2\t3\t4\t5\nX1\t1\t1\tm1(1)\tm1(2)\tm1(3)\nX2\t1\tm1(1)\tm1(2)\tm1(3)\t1\nX3\tm1(1)\tm1(2)\tm1(3)\t1\t1\n";
    Outcome { passed: same && tables, detail: format!("byte-identical across thread counts: {same}; schedule tables match: {tables}") }
}

fn main() {
    let criteria: Vec<(u32, &str, f64, fn() -> Outcome)> = vec![
        (1, "erasure-split interpolation identity", 5.0, || suite(Suite::Lemma1)),
        (2, "SND decomposition on a 200x200 grid", 10.0, || suite(Suite::Eq5)),
        (3, "Fourier-Motzkin closed form", 2.0, || suite(Suite::Fm)),
        (4, "SWSC unions reach SND and SD1 n SD2", 300.0, union_suites),
        (5, "layered MAC corners and HK coverage", 600.0, || suite(Suite::Thm3)),
        (6, "rate splitting falls short of SND", 600.0, gap_demo),
        (7, "IAN <= SWCM <= SND with growing ratio", 60.0, theory_curve),
        (8, "simulated SWSC beats IAN at 8/8 dB", 300.0, simulated_gain),
        (9, "seeded determinism and schedule tables", 60.0, determinism),
    ];
    let mut all = true;
    for (n, name, limit, f) in criteria {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let passed = o.passed && secs < limit;
        all &= passed;
        println!(
            "criterion {n} {}: {name}: {} ({secs:.2} s, limit {limit} s)",
            if passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
