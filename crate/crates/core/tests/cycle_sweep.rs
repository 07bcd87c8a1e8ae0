use coinwalk::{plan_cycle, run_transfer, Complex64};

fn payload() -> [Complex64; 2] {
    [Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.768_114_574_786_860_8)]
}

#[test]
fn every_cycle_method_reaches_every_target() {
    for d in 3..=10usize {
        for method in 1..=4u8 {
            if method >= 3 && d % 2 == 1 {
                assert!(plan_cycle(d, 1, method).is_err());
                continue;
            }
            for x in 1..d as i64 {
                let plan = plan_cycle(d, x, method).unwrap_or_else(|e| panic!("d={d} x={x} method={method}: {e}"));
                let report = run_transfer(&plan, &payload()).unwrap();
                assert!(report.passed(), "d={d} x={x} method={method}: {}", report.fidelity);
                if let Some(rec) = &plan.certification {
                    assert!(rec.passed);
                    assert_eq!(rec.attempts.last().map(|a| a.passed), Some(true));
                }
            }
        }
    }
}

#[test]
fn split_method_step_counts() {
    for d in [4usize, 6, 8, 10] {
        for x in (2..d as i64).step_by(2) {
            assert_eq!(plan_cycle(d, x, 3).unwrap().step_count(), d);
        }
        for x in (1..d as i64).step_by(2) {
            let plan = plan_cycle(d, x, 3).unwrap();
            let attempts = &plan.certification.as_ref().unwrap().attempts;
            assert!(!attempts[0].passed, "tabulated schedule d={d} x={x}");
            if 2 * x as usize == d {
                // Antipodal target: both branches meet after d + 1 steps with a coin-1 flip.
                assert_eq!(plan.step_count(), d + 1);
                assert_eq!(attempts.len(), 2);
            } else {
                assert_eq!(plan.step_count(), d - 1, "d={d} x={x}");
                assert_eq!(attempts.len(), 3);
                assert!(!attempts[1].passed);
            }
        }
    }
}
