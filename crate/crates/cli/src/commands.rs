//! The subcommand implementations: load inputs, run the pipeline, render.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::Serialize;

use stakescope::{
    compare, count_block_stream, effective_votes, elect, largest_remainder_round, load_blocks,
    load_fixture, load_snapshot, rank, reallocate, resolve_net_vests, stakeholder_power,
    witness_power, Distribution, EntropyReport, Fixture, LedgerSnapshot, NormalizedSeries,
    PowerBasis, PowerTable,
};

use crate::config::{OutputFormat, RunConfig};
use crate::output::{blocks, percent, print_csv, print_json, print_table, vests, Align};

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct CountReport {
    total_blocks: u64,
    generators: usize,
    rows: Vec<CountRow>,
}

#[derive(Debug, Serialize)]
struct CountRow {
    rank: usize,
    generator: String,
    blocks: u64,
    share: f64,
}

pub fn cmd_count(out: &mut impl Write, blocks_path: &Path, config: &RunConfig) -> Result<()> {
    let counts = count_block_stream(load_blocks(blocks_path)?)?;
    let total = counts.total;
    let rows: Vec<CountRow> = counts
        .ranked()
        .into_iter()
        .enumerate()
        .take(config.top.unwrap_or(usize::MAX))
        .map(|(i, (generator, count))| CountRow {
            rank: i + 1,
            generator: generator.to_string(),
            blocks: count,
            share: if total > 0 {
                count as f64 / total as f64
            } else {
                0.0
            },
        })
        .collect();
    let report = CountReport {
        total_blocks: total,
        generators: counts.counts.len(),
        rows,
    };

    match config.format {
        OutputFormat::Json => print_json(out, &report)?,
        OutputFormat::Csv => print_csv(
            out,
            &["rank", "generator", "blocks", "share"],
            &report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.rank.to_string(),
                        r.generator.clone(),
                        r.blocks.to_string(),
                        format!("{:.6}", r.share),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.rank.to_string(),
                        r.generator.clone(),
                        r.blocks.to_string(),
                        percent(r.share),
                    ]
                })
                .collect();
            print_table(
                out,
                &["rank", "generator", "blocks", "share"],
                &[Align::Right, Align::Left, Align::Right, Align::Right],
                &rows,
            )?;
            writeln!(
                out,
                "total: {} blocks from {} generators",
                report.total_blocks, report.generators
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// power
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct PowerReport {
    basis: &'static str,
    proxy_depth: usize,
    unresolved_vests: f64,
    rows: Vec<PowerRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<ScheduleReport>,
}

#[derive(Debug, Serialize)]
struct PowerRow {
    rank: usize,
    account: String,
    net_vests: f64,
    votes: usize,
    accumulated_vests: f64,
}

#[derive(Debug, Serialize)]
struct ScheduleReport {
    top20: Vec<String>,
    random_seat: String,
    seed: u64,
}

fn vote_tallies(snapshot: &LedgerSnapshot, basis: PowerBasis) -> BTreeMap<String, usize> {
    match basis {
        PowerBasis::Stakeholder => snapshot
            .accounts
            .values()
            .map(|a| (a.id.clone(), a.witness_votes.len()))
            .collect(),
        PowerBasis::Witness => {
            let mut received: BTreeMap<String, usize> = BTreeMap::new();
            for votes in effective_votes(snapshot).values() {
                for witness in votes {
                    *received.entry(witness.clone()).or_insert(0) += 1;
                }
            }
            received
        }
    }
}

pub fn cmd_power(
    out: &mut impl Write,
    snapshot_path: &Path,
    run_elect: bool,
    config: &RunConfig,
) -> Result<()> {
    let snapshot = load_snapshot(snapshot_path)?;
    let net = resolve_net_vests(&snapshot, config.proxy_depth)?;
    let power: PowerTable = match config.basis {
        PowerBasis::Stakeholder => stakeholder_power(&snapshot, &net),
        PowerBasis::Witness => witness_power(&snapshot, &net),
    };
    let tallies = vote_tallies(&snapshot, config.basis);
    let rows: Vec<PowerRow> = rank(&power)
        .into_iter()
        .enumerate()
        .take(config.top.unwrap_or(usize::MAX))
        .map(|(i, (account, accumulated))| PowerRow {
            rank: i + 1,
            net_vests: net.net(&account),
            votes: tallies.get(&account).copied().unwrap_or(0),
            account,
            accumulated_vests: accumulated,
        })
        .collect();
    if rows.is_empty() {
        eprintln!(
            "warning: no {} entries in this snapshot",
            basis_name(config.basis)
        );
    }

    let schedule = if run_elect {
        let schedule = elect(&snapshot, &net, config.seed)?;
        Some(ScheduleReport {
            top20: schedule.top20,
            random_seat: schedule.random_seat,
            seed: schedule.seed,
        })
    } else {
        None
    };

    let report = PowerReport {
        basis: basis_name(config.basis),
        proxy_depth: config.proxy_depth,
        unresolved_vests: net.unresolved_vests,
        rows,
        schedule,
    };

    match config.format {
        OutputFormat::Json => print_json(out, &report)?,
        OutputFormat::Csv => print_csv(
            out,
            &["rank", "account", "net_vests", "votes", "accumulated_vests"],
            &report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.rank.to_string(),
                        r.account.clone(),
                        format!("{}", r.net_vests),
                        r.votes.to_string(),
                        format!("{}", r.accumulated_vests),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.rank.to_string(),
                        r.account.clone(),
                        vests(r.net_vests),
                        r.votes.to_string(),
                        vests(r.accumulated_vests),
                    ]
                })
                .collect();
            print_table(
                out,
                &["rank", "account", "net_vests", "votes", "accumulated_vests"],
                &[
                    Align::Right,
                    Align::Left,
                    Align::Right,
                    Align::Right,
                    Align::Right,
                ],
                &rows,
            )?;
            if report.unresolved_vests > 0.0 {
                writeln!(out, "unresolved stake: {}", vests(report.unresolved_vests))?;
            }
            if let Some(schedule) = &report.schedule {
                writeln!(
                    out,
                    "witness schedule (seed {}): top20 = {}; random seat = {}",
                    schedule.seed,
                    schedule.top20.join(", "),
                    schedule.random_seat
                )?;
            }
        }
    }
    Ok(())
}

fn basis_name(basis: PowerBasis) -> &'static str {
    match basis {
        PowerBasis::Stakeholder => "stakeholder",
        PowerBasis::Witness => "witness",
    }
}

// ---------------------------------------------------------------------------
// allocate
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct AllocateReport {
    mode: String,
    proxy_depth: usize,
    total_blocks: f64,
    allocated: f64,
    unallocated: f64,
    unattributed: f64,
    rows: Vec<AllocateRow>,
}

#[derive(Debug, Serialize)]
struct AllocateRow {
    rank: usize,
    account: String,
    blocks: f64,
    blocks_rounded: u64,
    overall_share: f64,
}

pub fn cmd_allocate(
    out: &mut impl Write,
    snapshot_path: &Path,
    blocks_path: &Path,
    config: &RunConfig,
) -> Result<()> {
    let snapshot = load_snapshot(snapshot_path)?;
    let counts = count_block_stream(load_blocks(blocks_path)?)?;
    let net = resolve_net_vests(&snapshot, config.proxy_depth)?;
    let stakeholder = stakeholder_power(&snapshot, &net);
    let witness = witness_power(&snapshot, &net);
    let votes = effective_votes(&snapshot);
    let allocation = reallocate(&counts, &stakeholder, &witness, &net, &votes, config.mode)?;

    let ranked: Vec<(String, f64)> = allocation
        .ranked()
        .into_iter()
        .map(|(id, share)| (id.to_string(), share))
        .collect();
    let rounded = largest_remainder_round(&ranked, allocation.allocated().round() as u64);
    let total = allocation.total.max(1.0);
    let rows: Vec<AllocateRow> = ranked
        .iter()
        .zip(&rounded)
        .enumerate()
        .take(config.top.unwrap_or(usize::MAX))
        .map(|(i, ((account, share), (_, whole)))| AllocateRow {
            rank: i + 1,
            account: account.clone(),
            blocks: *share,
            blocks_rounded: *whole,
            overall_share: share / total,
        })
        .collect();

    let report = AllocateReport {
        mode: allocation.mode.to_string(),
        proxy_depth: config.proxy_depth,
        total_blocks: allocation.total,
        allocated: allocation.allocated(),
        unallocated: allocation.unallocated,
        unattributed: allocation.unattributed,
        rows,
    };

    match config.format {
        OutputFormat::Json => print_json(out, &report)?,
        OutputFormat::Csv => print_csv(
            out,
            &[
                "rank",
                "account",
                "blocks",
                "blocks_rounded",
                "overall_share",
            ],
            &report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.rank.to_string(),
                        r.account.clone(),
                        format!("{}", r.blocks),
                        r.blocks_rounded.to_string(),
                        format!("{:.6}", r.overall_share),
                    ]
                })
                .collect::<Vec<_>>(),
        )?,
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.rank.to_string(),
                        r.account.clone(),
                        r.blocks_rounded.to_string(),
                        percent(r.overall_share),
                    ]
                })
                .collect();
            print_table(
                out,
                &["rank", "account", "blocks", "overall_share"],
                &[Align::Right, Align::Left, Align::Right, Align::Right],
                &rows,
            )?;
            writeln!(
                out,
                "allocated {} of {} blocks ({} unallocated, {} unattributed), mode {}",
                blocks(report.allocated),
                blocks(report.total_blocks),
                blocks(report.unallocated),
                blocks(report.unattributed),
                report.mode
            )?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// entropy
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct EntropyCliReport {
    r_values: Vec<usize>,
    series: Vec<EntropyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    overlay: Option<Vec<NormalizedSeries>>,
}

/// Loads one `--series` argument: either `fixture:NAME` or a CSV file
/// with an `id,value` header.
fn load_series(spec: &str) -> Result<Distribution> {
    if let Some(name) = spec.strip_prefix("fixture:") {
        return Ok(load_fixture(name)?.distribution());
    }
    let path = Path::new(spec);
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(spec)
        .to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening series {spec}"))?;
    let headers = reader.headers()?.clone();
    let expected = ["id", "value"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(anyhow!(
            "{spec}: expected header `id,value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let value: f64 = record
            .get(1)
            .unwrap_or_default()
            .trim()
            .parse()
            .with_context(|| format!("{spec}: row {}: bad value", i + 2))?;
        entries.push((record.get(0).unwrap_or_default().to_string(), value));
    }
    Ok(Distribution::new(label, entries)?)
}

pub fn cmd_entropy(out: &mut impl Write, series: &[String], config: &RunConfig) -> Result<()> {
    let dists = series
        .iter()
        .map(|s| load_series(s))
        .collect::<Result<Vec<_>>>()?;
    let comparison = compare(&dists, &config.r_values)?;
    let report = EntropyCliReport {
        r_values: config.r_values.clone(),
        overlay: (dists.len() >= 2).then_some(comparison.series),
        series: comparison.reports,
    };

    match config.format {
        OutputFormat::Json => print_json(out, &report)?,
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            for series in &report.series {
                for row in &series.rows {
                    rows.push(vec![
                        series.label.clone(),
                        row.r.to_string(),
                        format!("{:.6}", row.entropy_bits),
                        format!("{:.6}", row.top_r_share),
                    ]);
                }
            }
            print_csv(out, &["series", "r", "entropy_bits", "top_r_share"], &rows)?;
            // Plot-ready overlay as a second section: rank per row, one
            // normalized column per series.
            if let Some(overlay) = &report.overlay {
                writeln!(out)?;
                let mut headers = vec!["rank".to_string()];
                headers.extend(overlay.iter().map(|s| s.label.clone()));
                let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
                let max_len = overlay.iter().map(|s| s.values.len()).max().unwrap_or(0);
                let rows: Vec<Vec<String>> = (0..max_len)
                    .map(|i| {
                        let mut row = vec![(i + 1).to_string()];
                        for series in overlay {
                            row.push(
                                series
                                    .values
                                    .get(i)
                                    .map(|v| format!("{v:.6}"))
                                    .unwrap_or_default(),
                            );
                        }
                        row
                    })
                    .collect();
                print_csv(out, &header_refs, &rows)?;
            }
        }
        OutputFormat::Table => {
            let rows: Vec<Vec<String>> = report
                .series
                .iter()
                .flat_map(|series| {
                    series.rows.iter().map(|row| {
                        vec![
                            series.label.clone(),
                            row.r.to_string(),
                            format!("{:.4}", row.entropy_bits),
                            percent(row.top_r_share),
                        ]
                    })
                })
                .collect();
            print_table(
                out,
                &["series", "r", "entropy_bits", "top_r_share"],
                &[Align::Left, Align::Right, Align::Right, Align::Right],
                &rows,
            )?;
            if let Some(overlay) = &report.overlay {
                writeln!(out)?;
                let max_len = overlay.iter().map(|s| s.values.len()).max().unwrap_or(0);
                let mut headers = vec!["rank".to_string()];
                headers.extend(overlay.iter().map(|s| s.label.clone()));
                let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
                let aligns: Vec<Align> = headers.iter().map(|_| Align::Right).collect();
                let rows: Vec<Vec<String>> = (0..max_len)
                    .map(|i| {
                        let mut row = vec![(i + 1).to_string()];
                        for series in overlay {
                            row.push(
                                series
                                    .values
                                    .get(i)
                                    .map(|v| format!("{v:.4}"))
                                    .unwrap_or_default(),
                            );
                        }
                        row
                    })
                    .collect();
                print_table(out, &header_refs, &aligns, &rows)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// fixture
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct FixtureListReport {
    fixtures: Vec<FixtureSummary>,
}

#[derive(Debug, Serialize)]
struct FixtureSummary {
    name: String,
    figure: String,
    unit: String,
    entries: usize,
    description: String,
}

pub fn cmd_fixture_list(out: &mut impl Write, config: &RunConfig) -> Result<()> {
    let fixtures: Vec<FixtureSummary> = stakescope::fixture_names()
        .iter()
        .map(|name| {
            let fixture = load_fixture(name).expect("built-in fixture loads");
            FixtureSummary {
                name: fixture.name.to_string(),
                figure: fixture.figure.to_string(),
                unit: fixture.unit.to_string(),
                entries: fixture.entries().len(),
                description: fixture.description.to_string(),
            }
        })
        .collect();
    let report = FixtureListReport { fixtures };

    let rows: Vec<Vec<String>> = report
        .fixtures
        .iter()
        .map(|f| {
            vec![
                f.name.clone(),
                f.unit.clone(),
                f.entries.to_string(),
                f.description.clone(),
            ]
        })
        .collect();
    match config.format {
        OutputFormat::Json => print_json(out, &report)?,
        OutputFormat::Csv => print_csv(out, &["name", "unit", "entries", "description"], &rows)?,
        OutputFormat::Table => print_table(
            out,
            &["name", "unit", "entries", "description"],
            &[Align::Left, Align::Left, Align::Right, Align::Left],
            &rows,
        )?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct FixtureShowReport {
    name: String,
    figure: String,
    description: String,
    unit: String,
    total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    total_overall: Option<f64>,
    quoted: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimated_ranks: Option<[usize; 2]>,
    entries: Vec<(String, f64)>,
}

pub fn cmd_fixture_show(out: &mut impl Write, name: &str, config: &RunConfig) -> Result<()> {
    let fixture: Fixture = load_fixture(name)?;
    let report = FixtureShowReport {
        name: fixture.name.to_string(),
        figure: fixture.figure.to_string(),
        description: fixture.description.to_string(),
        unit: fixture.unit.to_string(),
        total: fixture.total(),
        total_overall: fixture.total_overall,
        quoted: fixture
            .quoted
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
        estimated_ranks: fixture
            .estimated_ranks
            .clone()
            .map(|r| [*r.start(), *r.end()]),
        entries: fixture.entries().to_vec(),
    };

    match config.format {
        OutputFormat::Json => print_json(out, &report)?,
        OutputFormat::Csv => print_csv(
            out,
            &["id", "value"],
            &report
                .entries
                .iter()
                .map(|(id, v)| vec![id.clone(), format!("{v}")])
                .collect::<Vec<_>>(),
        )?,
        OutputFormat::Table => {
            writeln!(
                out,
                "{} ({}): {}",
                report.name, report.figure, report.description
            )?;
            let rows: Vec<Vec<String>> = report
                .entries
                .iter()
                .map(|(id, v)| vec![id.clone(), vests(*v)])
                .collect();
            print_table(
                out,
                &["id", &format!("value ({})", report.unit)],
                &[Align::Left, Align::Right],
                &rows,
            )?;
            for (key, value) in &report.quoted {
                writeln!(out, "quoted {key} = {value}")?;
            }
            if let Some([from, to]) = report.estimated_ranks {
                writeln!(
                    out,
                    "ranks {from}-{to} are estimated fill, not quoted values"
                )?;
            }
        }
    }
    Ok(())
}
