//! Runs every acceptance criterion and the diagnostics, printing one line
//! per criterion. Red criteria are reported, not asserted: the expected
//! status of each line is pinned below so a change in either direction is
//! caught.

use std::thread;

use ellgenus::suite::{full_suite, Criterion, CriterionOutcome};

fn run_parallel(criteria: &[Criterion]) -> Vec<CriterionOutcome> {
    let jobs: Vec<(usize, usize)> =
        criteria.iter().enumerate().flat_map(|(c, crit)| (0..crit.tasks.len()).map(move |t| (c, t))).collect();
    let workers = thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<Option<_>> = (0..jobs.len()).map(|_| None).collect();
    let slots = std::sync::Mutex::new(&mut results);
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                let Some(&(c, t)) = jobs.get(i) else { break };
                let r = criteria[c].run_task(t);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    let mut it = results.into_iter().map(|r| r.expect("every task ran"));
    criteria.iter().map(|c| c.finish(it.by_ref().take(c.tasks.len()).collect())).collect()
}

fn main() {
    let criteria = full_suite();
    let outcomes = run_parallel(&criteria);
    for o in &outcomes {
        println!("{}", o.summary_line());
        for r in o.reports.iter().filter(|r| !r.passed() || r.note.is_some()) {
            println!("    {}", r.summary_line());
        }
    }
    let got: Vec<(&str, bool)> = outcomes.iter().map(|o| (o.id.as_str(), o.passed())).collect();
    if got != EXPECTED {
        eprintln!("acceptance outcome changed: expected {EXPECTED:?}, got {got:?}");
        std::process::exit(1);
    }
    println!("acceptance outcome matches the pinned statuses");
}

/// Pinned outcome per line. The red acceptance criteria fail on the S-law
/// weight (7, 8, 10) and on a genuine counterexample to the first vanishing
/// clause (9); S1, S2, S5 and S6 fail on the closed forms as stated; S7 on
/// the same weight mismatch as 7 and 8.
const EXPECTED: [(&str, bool); 18] = [
    ("1", true),
    ("2", true),
    ("3", true),
    ("4", true),
    ("5", true),
    ("6", true),
    ("7", false),
    ("8", false),
    ("9", false),
    ("10", false),
    ("11", true),
    ("S1", false),
    ("S2", false),
    ("S3", true),
    ("S4", true),
    ("S5", false),
    ("S6", false),
    ("S7", false),
];
