//! End-to-end CLI tests driving the real binary.

use std::fs;
use std::path::{Path, PathBuf};

use assert_cmd::Command;
use predicates::prelude::*;

fn bin() -> Command {
    Command::cargo_bin("stakescope").unwrap()
}

fn write(path: &Path, content: &str) {
    fs::write(path, content).unwrap();
}

/// Expands the Bitcoin fixture into a block stream file.
fn bitcoin_blocks_csv(dir: &Path) -> PathBuf {
    let mut output = Command::cargo_bin("stakescope").unwrap();
    let result = output
        .args(["fixture", "show", "bitcoin-fig2", "--format", "json"])
        .assert()
        .success();
    let report: serde_json::Value = serde_json::from_slice(&result.get_output().stdout).unwrap();

    let mut csv = String::from("height,generator,timestamp\n");
    let mut height = 0u64;
    for entry in report["entries"].as_array().unwrap() {
        let generator = entry[0].as_str().unwrap();
        let count = entry[1].as_f64().unwrap() as u64;
        for _ in 0..count {
            csv.push_str(&format!("{height},{generator},\n"));
            height += 1;
        }
    }
    let path = dir.join("bitcoin-blocks.csv");
    write(&path, &csv);
    path
}

const PROXY_SNAPSHOT: &str = r#"{
  "format_version": 1,
  "block_height": 500,
  "accounts": [
    { "id": "alice", "pure_vests": 100.0, "proxy": "bob" },
    { "id": "bob", "pure_vests": 100.0, "votes": ["w1"] },
    { "id": "w1", "pure_vests": 0.0, "witness": true }
  ]
}"#;

#[test]
fn count_heads_with_top_pool() {
    let dir = tempfile::tempdir().unwrap();
    let blocks = bitcoin_blocks_csv(dir.path());
    bin()
        .args(["count", blocks.to_str().unwrap(), "--top", "5"])
        .assert()
        .success()
        .stdout(predicate::str::contains("pool-01"))
        .stdout(predicate::str::contains("848"))
        .stdout(predicate::str::contains("18.8%"))
        .stdout(predicate::str::contains("total: 4499 blocks"));
}

#[test]
fn count_empty_stream_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write(&path, "height,generator,timestamp\n");
    bin()
        .args(["count", path.to_str().unwrap()])
        .assert()
        .success()
        .stdout(predicate::str::contains("total: 0 blocks"));
}

#[test]
fn count_missing_file_fails() {
    bin()
        .args(["count", "does-not-exist.csv"])
        .assert()
        .failure()
        .stderr(predicate::str::contains("does-not-exist.csv"));
}

#[test]
fn count_duplicate_height_fails_with_height() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.csv");
    write(&path, "height,generator,timestamp\n7,a,\n7,b,\n");
    bin()
        .args(["count", path.to_str().unwrap()])
        .assert()
        .failure()
        .stderr(predicate::str::contains("duplicate block height 7"));
}

#[test]
fn power_resolves_proxy_weight() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snapshot.json");
    write(&path, PROXY_SNAPSHOT);
    bin()
        .args(["power", path.to_str().unwrap()])
        .assert()
        .success()
        .stdout(predicate::str::contains("bob"))
        .stdout(predicate::str::contains("200"));
}

#[test]
fn power_without_voters_warns_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snapshot.json");
    write(
        &path,
        r#"{ "block_height": 1, "accounts": [ { "id": "idle", "pure_vests": 9.0 } ] }"#,
    );
    bin()
        .args(["power", path.to_str().unwrap()])
        .assert()
        .success()
        .stderr(predicate::str::contains("warning"));
}

#[test]
fn power_surfaces_validation_failures_with_account_ids() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snapshot.json");
    write(
        &path,
        r#"{ "block_height": 1, "accounts": [ { "id": "alice", "pure_vests": 1.0, "proxy": "ghost" } ] }"#,
    );
    bin()
        .args(["power", path.to_str().unwrap()])
        .assert()
        .failure()
        .stderr(predicate::str::contains("alice"))
        .stderr(predicate::str::contains("ghost"));
}

/// A snapshot with 25 witness candidates and one voter per candidate.
fn election_snapshot_json() -> String {
    let mut accounts = Vec::new();
    for i in 0..25 {
        accounts.push(format!(
            r#"{{ "id": "w{i:02}", "pure_vests": 0.0, "witness": true }}"#
        ));
    }
    for i in 0..25 {
        accounts.push(format!(
            r#"{{ "id": "v{i:02}", "pure_vests": {}, "votes": ["w{i:02}"] }}"#,
            1000.0 * (25 - i) as f64
        ));
    }
    format!(
        r#"{{ "block_height": 9, "accounts": [ {} ] }}"#,
        accounts.join(", ")
    )
}

#[test]
fn power_elect_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snapshot.json");
    write(&path, &election_snapshot_json());
    let run = |seed: &str| {
        let result = bin()
            .args([
                "power",
                path.to_str().unwrap(),
                "--basis",
                "witness",
                "--elect",
                "--seed",
                seed,
                "--format",
                "json",
            ])
            .assert()
            .success();
        result.get_output().stdout.clone()
    };
    let first = run("7");
    let second = run("7");
    assert_eq!(first, second);
    let report: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["schedule"]["top20"].as_array().unwrap().len(), 20);
    let seat = report["schedule"]["random_seat"].as_str().unwrap();
    assert!(["w20", "w21", "w22", "w23", "w24"].contains(&seat));
}

#[test]
fn allocate_toy_case_is_proportional() {
    let dir = tempfile::tempdir().unwrap();
    let snapshot_path = dir.path().join("snapshot.json");
    write(
        &snapshot_path,
        r#"{
          "block_height": 1,
          "accounts": [
            { "id": "a", "pure_vests": 600.0, "votes": ["w"] },
            { "id": "b", "pure_vests": 300.0, "votes": ["w"] },
            { "id": "c", "pure_vests": 100.0, "votes": ["w"] },
            { "id": "w", "pure_vests": 0.0, "witness": true }
          ]
        }"#,
    );
    let blocks_path = dir.path().join("blocks.csv");
    let mut csv = String::from("height,generator,timestamp\n");
    for h in 0..100 {
        csv.push_str(&format!("{h},w,\n"));
    }
    write(&blocks_path, &csv);

    let result = bin()
        .args([
            "allocate",
            snapshot_path.to_str().unwrap(),
            blocks_path.to_str().unwrap(),
            "--format",
            "json",
        ])
        .assert()
        .success();
    let report: serde_json::Value = serde_json::from_slice(&result.get_output().stdout).unwrap();
    let rows = report["rows"].as_array().unwrap();
    let share = |account: &str| -> f64 {
        rows.iter().find(|r| r["account"] == account).unwrap()["blocks"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(share("a"), 60.0);
    assert_eq!(share("b"), 30.0);
    assert_eq!(share("c"), 10.0);
}

/// Rebuilds the published stake table as a snapshot file and checks the
/// overall re-allocation shares end to end. The share of blocks is scale
/// free, so a small block file exercises the same arithmetic.
#[test]
fn allocate_reproduces_study_shares() {
    use stakescope::{load_fixture, save_snapshot, Account, ConversionRates, LedgerSnapshot};

    let net_fixture = load_fixture("steem-fig5").unwrap();
    let votes_fixture = load_fixture("steem-fig6").unwrap();
    let power_fixture = load_fixture("steem-fig7").unwrap();

    let mut snapshot = LedgerSnapshot::new(25_563_499, ConversionRates::default());
    for w in 0..30 {
        snapshot.insert(Account::new(format!("w{w:02}")).as_witness());
    }
    for ((id, net), (_, votes)) in net_fixture.entries().iter().zip(votes_fixture.entries()) {
        snapshot.insert(
            Account::new(id.clone())
                .with_vests(*net)
                .with_votes((0..*votes as usize).map(|w| format!("w{w:02}"))),
        );
    }
    // Everyone else who voted, folded into one account with the same
    // total accumulated weight.
    let rest_power = power_fixture.total_overall.unwrap() - power_fixture.total();
    snapshot.insert(
        Account::new("rest-of-network")
            .with_vests(rest_power / 30.0)
            .with_votes((0..30).map(|w| format!("w{w:02}"))),
    );

    let dir = tempfile::tempdir().unwrap();
    let snapshot_path = dir.path().join("snapshot.json");
    save_snapshot(&snapshot, &snapshot_path).unwrap();
    let blocks_path = dir.path().join("blocks.csv");
    let mut csv = String::from("height,generator,timestamp\n");
    for h in 0..10_000 {
        csv.push_str(&format!("{h},w00,\n"));
    }
    write(&blocks_path, &csv);

    let result = bin()
        .args([
            "allocate",
            snapshot_path.to_str().unwrap(),
            blocks_path.to_str().unwrap(),
            "--format",
            "json",
        ])
        .assert()
        .success();
    let report: serde_json::Value = serde_json::from_slice(&result.get_output().stdout).unwrap();
    let share = |account: &str| -> f64 {
        report["rows"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["account"] == account)
            .unwrap()["overall_share"]
            .as_f64()
            .unwrap()
    };
    assert!((share("stakeholder-01") - 0.200).abs() <= 0.005);
    assert!((share("stakeholder-03") - 0.101).abs() <= 0.005);
}

#[test]
fn allocate_zero_powers_fails_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let snapshot_path = dir.path().join("snapshot.json");
    write(
        &snapshot_path,
        r#"{
          "block_height": 1,
          "accounts": [
            { "id": "idle", "pure_vests": 5.0 },
            { "id": "w", "pure_vests": 0.0, "witness": true }
          ]
        }"#,
    );
    let blocks_path = dir.path().join("blocks.csv");
    write(&blocks_path, "height,generator,timestamp\n1,w,\n");
    bin()
        .args([
            "allocate",
            snapshot_path.to_str().unwrap(),
            blocks_path.to_str().unwrap(),
        ])
        .assert()
        .failure()
        .stderr(predicate::str::contains("stakeholder powers are zero"));
}

#[test]
fn entropy_uniform_series_is_two_bits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("uniform.csv");
    write(&path, "id,value\na,10\nb,10\nc,10\nd,10\n");
    bin()
        .args(["entropy", "--series", path.to_str().unwrap(), "--r", "4"])
        .assert()
        .success()
        .stdout(predicate::str::contains("2.0000"));
}

#[test]
fn entropy_rank_out_of_range_names_the_series() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.csv");
    write(&path, "id,value\na,10\nb,5\n");
    bin()
        .args(["entropy", "--series", path.to_str().unwrap(), "--r", "3"])
        .assert()
        .failure()
        .stderr(predicate::str::contains("short"));
}

#[test]
fn entropy_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    write(&path, "id,value\na,9\nb,4\nc,1\n");
    let result = bin()
        .args([
            "entropy",
            "--series",
            path.to_str().unwrap(),
            "--r",
            "1,2,3",
            "--format",
            "json",
        ])
        .assert()
        .success();
    let stdout = result.get_output().stdout.clone();
    let report: serde_json::Value = serde_json::from_slice(&stdout).unwrap();
    let rows = report["series"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["top_r_share"], serde_json::json!(1.0));
    // Round-trip oracle: serializing the parsed report and parsing it
    // again must reproduce the exact same numbers.
    let reserialized = serde_json::to_vec(&report).unwrap();
    let reparsed: serde_json::Value = serde_json::from_slice(&reserialized).unwrap();
    assert_eq!(report, reparsed);
}

#[test]
fn entropy_fixture_report_matches_golden_file() {
    let result = bin()
        .args([
            "entropy",
            "--series",
            "fixture:bitcoin-fig2",
            "--series",
            "fixture:steem-fig3",
            "--series",
            "fixture:steem-fig9",
            "--r",
            "10,20,30",
            "--format",
            "json",
        ])
        .assert()
        .success();
    let golden = include_bytes!("golden/entropy_fixtures.json");
    assert_eq!(result.get_output().stdout, golden, "golden file drifted");
}

#[test]
fn unknown_fixture_lists_alternatives() {
    bin()
        .args(["entropy", "--series", "fixture:nope"])
        .assert()
        .failure()
        .stderr(predicate::str::contains("bitcoin-fig2"));
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.toml");
    write(&config_path, "format = \"json\"\nr = [2]\n");
    let series_path = dir.path().join("series.csv");
    write(&series_path, "id,value\na,8\nb,8\n");

    // Config file supplies format and r.
    let result = bin()
        .args([
            "entropy",
            "--series",
            series_path.to_str().unwrap(),
            "--config",
            config_path.to_str().unwrap(),
        ])
        .assert()
        .success();
    let report: serde_json::Value = serde_json::from_slice(&result.get_output().stdout).unwrap();
    assert_eq!(report["r_values"], serde_json::json!([2]));

    // An explicit flag overrides the config file.
    bin()
        .args([
            "entropy",
            "--series",
            series_path.to_str().unwrap(),
            "--config",
            config_path.to_str().unwrap(),
            "--r",
            "1",
            "--format",
            "table",
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("entropy_bits"));
}

#[test]
fn fixture_show_prints_quoted_aggregates() {
    bin()
        .args(["fixture", "show", "steem-fig5"])
        .assert()
        .success()
        .stdout(predicate::str::contains("stakeholder-01"))
        .stdout(predicate::str::contains("1.5800e10"))
        .stdout(predicate::str::contains("quoted rank_1 = 15800000000"));
}
