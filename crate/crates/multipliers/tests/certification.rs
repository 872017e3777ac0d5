//! Behavior of the adaptive certification scans at modest depth.

use multipliers::{
    certify_linear_inequalities, certify_nonlinear_dropped_m3, certify_nonlinear_inequalities,
    merge_reports,
};

#[test]
fn linear_scan_passes_and_mirrors_in_k() {
    let rep = certify_linear_inequalities(1.0, &[1, -1, 2], (-50.0, 50.0), 8);
    assert!(rep.pass);
    assert_eq!(rep.family, "linear");
    assert_eq!(rep.variant, "full");
    assert_eq!(rep.rows.len(), 6);
    for s in &rep.inequalities {
        assert!(s.min_margin >= 0.0, "{} dipped to {}", s.name, s.min_margin);
    }
    // The margins are invariant under (k, xi) -> (-k, -xi), and the scan grid
    // is mirror symmetric, so opposite k rows must land on the same minimum.
    for name in ["mprime_dissipation", "mprime_dissipation_stretching"] {
        let m = |k: i64| {
            rep.rows
                .iter()
                .find(|r| r.inequality == name && r.k == k)
                .unwrap()
                .min_margin
        };
        let (a, b) = (m(1), m(-1));
        assert!(
            (a - b).abs() <= 1e-12 * a.abs().max(1.0),
            "{name}: {a} vs {b}"
        );
    }
}

#[test]
fn nonlinear_scan_passes_and_detects_identically_zero_branch() {
    let rep = certify_nonlinear_inequalities(0.5, &[1, 2, 3], (-50.0, 50.0), 8);
    assert!(rep.pass);
    assert_eq!(rep.rows.len(), 15);
    // The middle-window transport margin is identically zero by construction,
    // so essentially every sample there snaps.
    for r in rep.rows.iter().filter(|r| r.inequality == "m2_transport_middle") {
        assert!(r.snapped_samples > 100, "only {} snapped", r.snapped_samples);
        assert_eq!(r.min_margin, 0.0);
    }
    // The far-window damping margin touches zero exactly at the window edge
    // and is positive inside.
    for r in rep.rows.iter().filter(|r| r.inequality == "m2_damping_far") {
        assert!(r.snapped_samples >= 1);
        assert!(r.min_margin >= 0.0);
    }
    let meas = rep.measured.expect("nonlinear scans measure the constants");
    assert!(meas.m_min >= 1.0 - 1e-12);
    assert!(meas.m_nu4_max > 0.0 && meas.m_nu4_max < 3000.0);
    assert!(meas.phik_slope_knu3_max < 3500.0);
}

#[test]
fn deeper_refinement_never_raises_the_minimum() {
    let shallow = certify_nonlinear_inequalities(0.5, &[1, 2], (-50.0, 50.0), 4);
    let deep = certify_nonlinear_inequalities(0.5, &[1, 2], (-50.0, 50.0), 10);
    assert!(shallow.pass && deep.pass);
    for (s, d) in shallow.inequalities.iter().zip(deep.inequalities.iter()) {
        assert_eq!(s.name, d.name);
        assert!(
            d.min_margin <= s.min_margin + 1e-12 * s.min_margin.abs().max(1.0),
            "{}: deep {} vs shallow {}",
            s.name,
            d.min_margin,
            s.min_margin
        );
        assert!(d.cells >= s.cells);
    }
}

#[test]
fn k_zero_is_skipped_with_a_note() {
    let rep = certify_linear_inequalities(0.5, &[0, 1], (-50.0, 50.0), 6);
    assert!(rep.rows.iter().all(|r| r.k != 0));
    assert!(rep.notes.iter().any(|n| n.contains("k = 0")));
    assert!(rep.pass);
}

#[test]
fn requested_interval_is_widened_to_cover_the_root() {
    // nu = 0.05, k = 8 puts the root at 24, so coverage needs [-240, 240].
    let rep = certify_nonlinear_inequalities(0.05, &[8], (-1.0, 1.0), 6);
    let row = &rep.rows[0];
    assert!(row.xi_lo <= -240.0 && row.xi_hi >= 240.0);
    assert!(rep.notes.iter().any(|n| n.contains("widened")));
}

#[test]
fn dropped_arctan_part_control_is_measured_not_assumed() {
    let full = certify_nonlinear_inequalities(1.0, &[1, 2], (-50.0, 50.0), 8);
    let control = certify_nonlinear_dropped_m3(1.0, &[1, 2], (-50.0, 50.0), 8);
    assert_eq!(control.variant, "drop_m3");
    // Removing the arctan part removes its positive drift contribution, so
    // the corrupted minima can only sit at or below the full ones.
    for (f, c) in full.inequalities.iter().zip(control.inequalities.iter()) {
        assert_eq!(f.name, c.name);
        if f.name.starts_with("m_dissipation") {
            assert!(
                c.min_margin <= f.min_margin + 1e-9,
                "{}: control {} vs full {}",
                f.name,
                c.min_margin,
                f.min_margin
            );
        }
    }
}

#[test]
fn merged_reports_recompute_summaries_over_the_union() {
    let a = certify_linear_inequalities(1.0, &[1], (-50.0, 50.0), 6);
    let b = certify_linear_inequalities(0.5, &[1, 2], (-50.0, 50.0), 6);
    let m = merge_reports(&[a.clone(), b.clone()]).unwrap();
    assert_eq!(m.nu_list, vec![1.0, 0.5]);
    assert_eq!(m.rows.len(), a.rows.len() + b.rows.len());
    for s in &m.inequalities {
        let best = m
            .rows
            .iter()
            .filter(|r| r.inequality == s.name)
            .map(|r| r.min_margin)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(s.min_margin, best);
    }
    assert!(m.pass);
    // Mixed families refuse to merge.
    let nl = certify_nonlinear_inequalities(1.0, &[1], (-50.0, 50.0), 6);
    assert!(merge_reports(&[a, nl]).is_err());
}

#[test]
fn reports_round_trip_through_json() {
    let rep = certify_nonlinear_inequalities(0.5, &[1], (-50.0, 50.0), 5);
    let text = serde_json::to_string(&rep).unwrap();
    let back: multipliers::CertificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(rep, back);
    assert!(text.contains("\"schema_version\":1"));
}
