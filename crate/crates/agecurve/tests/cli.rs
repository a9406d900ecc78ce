//! End-to-end CLI checks: file formats round-trip through the subcommands,
//! the records-ingestion path works, and exit codes follow the documented
//! scheme (0 ok, 1 usage, 2 data, 3 numerical).

use std::path::Path;
use std::process::{Command, Output};

fn agecurve(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agecurve"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn agecurve")
}

fn assert_ok(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn simulate_estimate_evaluate_pipeline() {
    let work = tempfile::tempdir().unwrap();
    let root = work.path();
    std::fs::write(root.join("config.toml"), "[simulation]\nn_players = 120\n").unwrap();

    assert_ok(
        &agecurve(
            &["simulate", "--seed", "3", "--config", "config.toml", "--out", "sim"],
            root,
        ),
        "simulate",
    );
    for file in ["panel.csv", "truth_curve.csv", "truth_players.csv"] {
        assert!(root.join("sim").join(file).exists(), "missing {file}");
    }

    assert_ok(
        &agecurve(
            &["mask", "--panel", "sim/panel.csv", "--seed", "4", "--out", "sim"],
            root,
        ),
        "mask",
    );

    assert_ok(
        &agecurve(
            &[
                "estimate",
                "--panel",
                "sim/masked_panel.csv",
                "--spec",
                "delta-plus,spline:obs:fixed,spline:trunc:fixed",
                "--seed",
                "5",
                "--out",
                "est",
            ],
            root,
        ),
        "estimate",
    );
    let curves = std::fs::read_to_string(root.join("est/curves.csv")).unwrap();
    assert!(curves.lines().next().unwrap().starts_with("spec,age,g_hat"));
    // 3 specs x 23 ages + header.
    assert_eq!(curves.lines().count(), 3 * 23 + 1);

    assert_ok(
        &agecurve(
            &[
                "evaluate",
                "--curves",
                "est/curves.csv",
                "--truth",
                "sim/truth_curve.csv",
                "--out",
                "eval",
            ],
            root,
        ),
        "evaluate",
    );
    let rmse = std::fs::read_to_string(root.join("eval/rmse.csv")).unwrap();
    assert_eq!(rmse.lines().count(), 3 * 23 + 1);
    let sbd = std::fs::read_to_string(root.join("eval/sbd.csv")).unwrap();
    assert_eq!(sbd.lines().count(), 3 + 1);

    assert_ok(
        &agecurve(
            &["summary", "--panel", "sim/masked_panel.csv", "--out", "sum"],
            root,
        ),
        "summary",
    );
    let fractions = std::fs::read_to_string(root.join("sum/observed_fraction.csv")).unwrap();
    assert_eq!(fractions.lines().next().unwrap(), "age,observed,fraction");
    assert_eq!(fractions.lines().count(), 23 + 1);
}

#[test]
fn records_ingestion_path() {
    let work = tempfile::tempdir().unwrap();
    let root = work.path();
    let mut csv = String::from(
        "player_id,birth_date,season_start_year,position,games_played,goals,assists\n",
    );
    for p in 0..10 {
        let birth = 1980 + (p % 3);
        for season in 2004..2014 {
            csv.push_str(&format!(
                "p{p},{birth}-05-10,{season},F,60,{},{}\n",
                10 + (p * 3 + season % 7) % 25,
                5 + (p + season % 11) % 30
            ));
        }
    }
    std::fs::write(root.join("records.csv"), csv).unwrap();

    let out = agecurve(
        &[
            "summary",
            "--records",
            "records.csv",
            "--grid",
            "18:40",
            "--positions",
            "F",
            "--min-birth-date",
            "1970-01-01",
            "--seasons",
            "2004:2013",
            "--out",
            "sum",
        ],
        root,
    );
    assert_ok(&out, "summary over records");
    assert!(root.join("sum/observed_fraction.csv").exists());

    let out = agecurve(
        &[
            "estimate",
            "--records",
            "records.csv",
            "--spec",
            "spline:obs:fixed",
            "--out",
            "est",
        ],
        root,
    );
    assert_ok(&out, "estimate over records");
}

#[test]
fn exit_codes_follow_the_documented_scheme() {
    let work = tempfile::tempdir().unwrap();
    let root = work.path();

    // Usage: unknown subcommand.
    let out = agecurve(&["frobnicate"], root);
    assert_eq!(out.status.code(), Some(1));

    // Usage: unknown spec name.
    std::fs::write(root.join("config.toml"), "[simulation]\nn_players = 60\n").unwrap();
    agecurve(&["simulate", "--seed", "1", "--config", "config.toml", "--out", "sim"], root);
    let out = agecurve(
        &["estimate", "--panel", "sim/panel.csv", "--spec", "spline:banana:fixed", "--out", "e"],
        root,
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));

    // Usage: imputing spec without a seed.
    let out = agecurve(
        &["estimate", "--panel", "sim/panel.csv", "--spec", "spline:trunc:fixed", "--out", "e"],
        root,
    );
    assert_eq!(out.status.code(), Some(1));

    // Data: missing input file.
    let out = agecurve(&["summary", "--panel", "nope.csv", "--out", "s"], root);
    assert_eq!(out.status.code(), Some(2));

    // Numerical: delta method on a panel with an empty age pair.
    std::fs::write(
        root.join("tiny.csv"),
        "player_id,age,value,observed\na,20,1.0,1\na,21,2.0,1\nb,22,0.5,1\nb,20,,0\na,22,,0\nb,21,,0\n",
    )
    .unwrap();
    let out = agecurve(
        &["estimate", "--panel", "tiny.csv", "--spec", "delta-plus", "--out", "e2"],
        root,
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
