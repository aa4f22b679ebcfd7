//! Minimal runner for numbered acceptance criteria: each criterion records
//! named checks and prints one PASS/FAIL line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

#[derive(Debug, Default)]
pub struct Checks {
    items: Vec<(String, bool)>,
}

impl Checks {
    pub fn check(&mut self, name: impl Into<String>, ok: bool) -> bool {
        let name = name.into();
        println!("    [{}] {name}", if ok { "ok" } else { "FAIL" });
        self.items.push((name, ok));
        ok
    }

    pub fn passed(&self) -> bool {
        !self.items.is_empty() && self.items.iter().all(|(_, ok)| *ok)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.items.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect()
    }
}

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub limit: Duration,
    pub run: fn(&mut Checks),
}

/// Runs every criterion, printing its checks and a summary line. Returns the
/// number of failed criteria.
pub fn run_all(criteria: &[Criterion]) -> usize {
    let mut failed = 0;
    let mut lines = Vec::new();
    for c in criteria {
        println!("criterion {}: {}", c.id, c.title);
        let mut checks = Checks::default();
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| (c.run)(&mut checks)));
        let elapsed = start.elapsed();
        if let Err(e) = outcome {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            checks.check(format!("ran without panic ({msg})"), false);
        }
        checks.check(format!("runtime {:.1} s < {} s", elapsed.as_secs_f64(), c.limit.as_secs()), elapsed < c.limit);
        let line = if checks.passed() {
            format!("criterion {}: PASS ({:.1} s) {}", c.id, elapsed.as_secs_f64(), c.title)
        } else {
            failed += 1;
            format!(
                "criterion {}: FAIL ({:.1} s) {} -- failed: {}",
                c.id,
                elapsed.as_secs_f64(),
                c.title,
                checks.failed().join("; ")
            )
        };
        println!("{line}\n");
        lines.push(line);
    }
    println!("acceptance summary");
    for l in &lines {
        println!("{l}");
    }
    failed
}
