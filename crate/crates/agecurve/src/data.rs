//! Player-season record ingestion and panel construction from real data.
//!
//! Records arrive as CSV rows (player_id, birth_date, season_start_year,
//! position, games_played, goals, assists). Performance is points per game,
//! standardized to mean 0 / sd 1 within each season across the included
//! records, then placed on the integer age grid.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::AgeGrid;
use crate::panel::PerformancePanel;

/// Calendar date without any timezone machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimpleDate {
    pub year: i32,
    pub month: u32,
    pub day: u32,
}

impl SimpleDate {
    pub fn new(year: i32, month: u32, day: u32) -> Result<Self> {
        if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
            return Err(Error::InvalidParameter(format!(
                "invalid date {year:04}-{month:02}-{day:02}"
            )));
        }
        Ok(SimpleDate { year, month, day })
    }

    /// Parse ISO 8601 `YYYY-MM-DD`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split('-').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParameter(format!("invalid date '{s}'")));
        }
        let year = parts[0]
            .parse::<i32>()
            .map_err(|_| Error::InvalidParameter(format!("invalid date '{s}'")))?;
        let month = parts[1]
            .parse::<u32>()
            .map_err(|_| Error::InvalidParameter(format!("invalid date '{s}'")))?;
        let day = parts[2]
            .parse::<u32>()
            .map_err(|_| Error::InvalidParameter(format!("invalid date '{s}'")))?;
        SimpleDate::new(year, month, day)
    }
}

impl std::fmt::Display for SimpleDate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// One player-season row.
#[derive(Debug, Clone)]
pub struct PlayerSeasonRecord {
    pub player_id: String,
    pub birth_date: SimpleDate,
    pub season_start_year: i32,
    pub position: String,
    pub games_played: u32,
    pub goals: u32,
    pub assists: u32,
}

impl PlayerSeasonRecord {
    pub fn points_per_game(&self) -> f64 {
        (self.goals + self.assists) as f64 / self.games_played as f64
    }

    /// Integer age in completed years at the cutoff date within the season.
    /// Cutoff months July-December fall in the season's start year, the rest
    /// in the following year.
    pub fn age_at(&self, cutoff: (u32, u32)) -> i32 {
        let (month, day) = cutoff;
        let ref_year = if month >= 7 {
            self.season_start_year
        } else {
            self.season_start_year + 1
        };
        let mut age = ref_year - self.birth_date.year;
        if (month, day) < (self.birth_date.month, self.birth_date.day) {
            age -= 1;
        }
        age
    }
}

/// Loaded records plus ingestion bookkeeping.
#[derive(Debug)]
pub struct RecordSet {
    pub records: Vec<PlayerSeasonRecord>,
    /// Rows dropped because games_played was zero (rate undefined).
    pub skipped_zero_games: usize,
}

const EXPECTED_COLUMNS: [&str; 7] = [
    "player_id",
    "birth_date",
    "season_start_year",
    "position",
    "games_played",
    "goals",
    "assists",
];

/// Load player-season records from CSV. The header row must contain the
/// documented columns. Rows with games_played = 0 are skipped and counted;
/// duplicate (player_id, season_start_year) keys are an error naming both
/// lines.
pub fn load_records(path: &Path) -> Result<RecordSet> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut columns = HashMap::new();
    for (idx, name) in headers.iter().enumerate() {
        columns.insert(name.to_string(), idx);
    }
    let mut col = [0usize; 7];
    for (slot, name) in EXPECTED_COLUMNS.iter().enumerate() {
        col[slot] = *columns.get(*name).ok_or_else(|| Error::ParseError {
            line: 1,
            message: format!("missing column '{name}'"),
        })?;
    }

    let mut records = Vec::new();
    let mut skipped_zero_games = 0usize;
    let mut seen: HashMap<(String, i32), usize> = HashMap::new();

    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |slot: usize| -> Result<&str> {
            row.get(col[slot]).ok_or(Error::ParseError {
                line,
                message: format!("missing field '{}'", EXPECTED_COLUMNS[slot]),
            })
        };
        let parse_u32 = |slot: usize, raw: &str| -> Result<u32> {
            raw.parse::<u32>().map_err(|_| Error::ParseError {
                line,
                message: format!("invalid {} '{raw}'", EXPECTED_COLUMNS[slot]),
            })
        };

        let player_id = field(0)?.to_string();
        if player_id.is_empty() {
            return Err(Error::ParseError { line, message: "empty player_id".into() });
        }
        let birth_date = SimpleDate::parse(field(1)?).map_err(|e| Error::ParseError {
            line,
            message: e.to_string(),
        })?;
        let season_start_year =
            field(2)?.parse::<i32>().map_err(|_| Error::ParseError {
                line,
                message: format!("invalid season_start_year '{}'", field(2).unwrap_or("")),
            })?;
        let position = field(3)?.to_string();
        let games_played = parse_u32(4, field(4)?)?;
        let goals = parse_u32(5, field(5)?)?;
        let assists = parse_u32(6, field(6)?)?;

        if let Some(&first_line) = seen.get(&(player_id.clone(), season_start_year)) {
            return Err(Error::DuplicateRecord {
                player: player_id,
                season: season_start_year,
                first_line,
                second_line: line,
            });
        }
        seen.insert((player_id.clone(), season_start_year), line);

        if games_played == 0 {
            skipped_zero_games += 1;
            continue;
        }
        records.push(PlayerSeasonRecord {
            player_id,
            birth_date,
            season_start_year,
            position,
            games_played,
            goals,
            assists,
        });
    }
    Ok(RecordSet { records, skipped_zero_games })
}

/// Record filters applied before standardization.
#[derive(Debug, Clone)]
pub struct PanelFilters {
    /// Keep only these positions (exact match). `None` keeps all.
    pub positions: Option<Vec<String>>,
    /// Keep players born on or after this date.
    pub min_birth_date: Option<SimpleDate>,
    /// Keep seasons with start year inside this inclusive range.
    pub season_range: Option<(i32, i32)>,
    /// (month, day) reference date for integer ages; defaults to January 31
    /// (mid-season).
    pub age_cutoff: (u32, u32),
}

impl Default for PanelFilters {
    fn default() -> Self {
        PanelFilters {
            positions: None,
            min_birth_date: None,
            season_range: None,
            age_cutoff: (1, 31),
        }
    }
}

/// Build a performance panel from records: filter, compute points per game,
/// z-score within each season (sample sd, denominator n-1), place on the
/// grid. Records whose age at the cutoff falls off the grid are dropped.
pub fn build_panel(
    records: &[PlayerSeasonRecord],
    grid: AgeGrid,
    filters: &PanelFilters,
) -> Result<PerformancePanel> {
    let kept: Vec<&PlayerSeasonRecord> = records
        .iter()
        .filter(|r| {
            if let Some(positions) = &filters.positions {
                if !positions.iter().any(|p| p == &r.position) {
                    return false;
                }
            }
            if let Some(min) = &filters.min_birth_date {
                if r.birth_date < *min {
                    return false;
                }
            }
            if let Some((lo, hi)) = filters.season_range {
                if r.season_start_year < lo || r.season_start_year > hi {
                    return false;
                }
            }
            true
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyInput("records after filtering"));
    }

    // Within-season standardization across the included records.
    let mut by_season: HashMap<i32, Vec<usize>> = HashMap::new();
    for (idx, r) in kept.iter().enumerate() {
        by_season.entry(r.season_start_year).or_default().push(idx);
    }
    let mut z_scores = vec![0.0; kept.len()];
    let mut seasons: Vec<i32> = by_season.keys().cloned().collect();
    seasons.sort_unstable();
    for season in seasons {
        let idxs = &by_season[&season];
        if idxs.len() < 2 {
            return Err(Error::CannotStandardize { season, count: idxs.len() });
        }
        let ppg: Vec<f64> = idxs.iter().map(|&i| kept[i].points_per_game()).collect();
        let n = ppg.len() as f64;
        let mean = ppg.iter().sum::<f64>() / n;
        let var = ppg.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        if var <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "season {season} has zero points-per-game variance; cannot standardize"
            )));
        }
        let sd = var.sqrt();
        for (&i, v) in idxs.iter().zip(ppg.iter()) {
            z_scores[i] = (v - mean) / sd;
        }
    }

    // Player order: lexicographic by id, for reproducible panels.
    let mut player_ids: Vec<String> = kept.iter().map(|r| r.player_id.clone()).collect();
    player_ids.sort_unstable();
    player_ids.dedup();
    let index_of: HashMap<&str, usize> = player_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let k = grid.len();
    let mut values = vec![f64::NAN; player_ids.len() * k];
    let mut mask = vec![false; player_ids.len() * k];
    for (idx, r) in kept.iter().enumerate() {
        let age = r.age_at(filters.age_cutoff);
        let Some(age_idx) = grid.index_of(age) else { continue };
        let player = index_of[r.player_id.as_str()];
        let cell = player * k + age_idx;
        if mask[cell] {
            return Err(Error::InvalidParameter(format!(
                "player {} has two records mapping to age {age}",
                r.player_id
            )));
        }
        values[cell] = z_scores[idx];
        mask[cell] = true;
    }
    PerformancePanel::new(grid, player_ids, values, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    const HEADER: &str = "player_id,birth_date,season_start_year,position,games_played,goals,assists\n";

    #[test]
    fn happy_path_three_rows() {
        let f = write_csv(&format!(
            "{HEADER}a,1990-03-14,2010,F,80,20,30\nb,1991-07-01,2010,F,70,10,15\nc,1990-01-02,2011,F,60,5,10\n"
        ));
        let set = load_records(f.path()).unwrap();
        assert_eq!(set.records.len(), 3);
        assert_eq!(set.skipped_zero_games, 0);
        assert!((set.records[0].points_per_game() - 50.0 / 80.0).abs() < 1e-12);
    }

    #[test]
    fn zero_games_skipped_with_count() {
        let f = write_csv(&format!(
            "{HEADER}a,1990-03-14,2010,F,0,0,0\nb,1991-07-01,2010,F,70,10,15\n"
        ));
        let set = load_records(f.path()).unwrap();
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.skipped_zero_games, 1);
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let f = write_csv(&format!(
            "{HEADER}a,1990-03-14,2010,F,80,20,30\nb,1991-07-01,2010,F,70,10,15\na,1990-03-14,2010,F,60,5,10\n"
        ));
        match load_records(f.path()) {
            Err(Error::DuplicateRecord { player, season, first_line, second_line }) => {
                assert_eq!(player, "a");
                assert_eq!(season, 2010);
                assert_eq!(first_line, 2);
                assert_eq!(second_line, 4);
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let f = write_csv(&format!(
            "{HEADER}a,1990-03-14,2010,F,80,20,30\nb,not-a-date,2010,F,70,10,15\n"
        ));
        match load_records(f.path()) {
            Err(Error::ParseError { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn standardization_hand_example() {
        // Two players in one season with PPG 1.0 and 0.0: z = +-1/sqrt(2).
        let records = vec![
            PlayerSeasonRecord {
                player_id: "a".into(),
                birth_date: SimpleDate::new(1990, 5, 1).unwrap(),
                season_start_year: 2014,
                position: "F".into(),
                games_played: 10,
                goals: 10,
                assists: 0,
            },
            PlayerSeasonRecord {
                player_id: "b".into(),
                birth_date: SimpleDate::new(1991, 5, 1).unwrap(),
                season_start_year: 2014,
                position: "F".into(),
                games_played: 10,
                goals: 0,
                assists: 0,
            },
        ];
        let grid = AgeGrid::new(18, 40).unwrap();
        let panel = build_panel(&records, grid, &PanelFilters::default()).unwrap();
        // Age at 2015-01-31: a born 1990-05-01 -> 24; b -> 23.
        let a_val = panel.observed(0, grid.index_of(24).unwrap()).unwrap();
        let b_val = panel.observed(1, grid.index_of(23).unwrap()).unwrap();
        let expected = 1.0 / 2.0_f64.sqrt();
        assert!((a_val - expected).abs() < 1e-12, "a {a_val}");
        assert!((b_val + expected).abs() < 1e-12, "b {b_val}");
    }

    #[test]
    fn mask_has_gaps_for_missing_seasons() {
        let mk = |season: i32, goals: u32| PlayerSeasonRecord {
            player_id: "a".into(),
            birth_date: SimpleDate::new(1990, 5, 1).unwrap(),
            season_start_year: season,
            position: "F".into(),
            games_played: 10,
            goals,
            assists: 0,
        };
        let other = |season: i32, goals: u32| PlayerSeasonRecord {
            player_id: "b".into(),
            birth_date: SimpleDate::new(1990, 5, 1).unwrap(),
            season_start_year: season,
            position: "F".into(),
            games_played: 10,
            goals,
            assists: 5,
        };
        let third = |season: i32, goals: u32| PlayerSeasonRecord {
            player_id: "c".into(),
            birth_date: SimpleDate::new(1992, 5, 1).unwrap(),
            season_start_year: season,
            position: "F".into(),
            games_played: 10,
            goals,
            assists: 1,
        };
        // Player a at ages 22 and 24 only (seasons 2012, 2014); every season
        // keeps at least two records so standardization is defined.
        let records = vec![
            mk(2012, 3),
            mk(2014, 8),
            other(2012, 6),
            other(2013, 2),
            other(2014, 1),
            third(2013, 9),
        ];
        let grid = AgeGrid::new(18, 40).unwrap();
        let panel = build_panel(&records, grid, &PanelFilters::default()).unwrap();
        assert!(panel.is_observed(0, grid.index_of(22).unwrap()));
        assert!(!panel.is_observed(0, grid.index_of(23).unwrap()));
        assert!(panel.is_observed(0, grid.index_of(24).unwrap()));
    }

    #[test]
    fn birth_date_filter_excludes_older_players() {
        let mk = |id: &str, birth_year: i32, goals: u32| PlayerSeasonRecord {
            player_id: id.into(),
            birth_date: SimpleDate::new(birth_year, 6, 15).unwrap(),
            season_start_year: 2000,
            position: "F".into(),
            games_played: 10,
            goals,
            assists: 5,
        };
        let records = vec![mk("young1", 1975, 8), mk("young2", 1972, 2), mk("old", 1969, 5)];
        let filters = PanelFilters {
            min_birth_date: Some(SimpleDate::new(1970, 1, 1).unwrap()),
            ..PanelFilters::default()
        };
        let grid = AgeGrid::new(18, 40).unwrap();
        let panel = build_panel(&records, grid, &filters).unwrap();
        assert_eq!(panel.n_players(), 2);
        assert!(!panel.player_ids().contains(&"old".to_string()));
    }

    #[test]
    fn single_record_season_cannot_standardize() {
        let records = vec![PlayerSeasonRecord {
            player_id: "a".into(),
            birth_date: SimpleDate::new(1990, 5, 1).unwrap(),
            season_start_year: 2010,
            position: "F".into(),
            games_played: 10,
            goals: 1,
            assists: 1,
        }];
        let grid = AgeGrid::new(18, 40).unwrap();
        match build_panel(&records, grid, &PanelFilters::default()) {
            Err(Error::CannotStandardize { season: 2010, count: 1 }) => {}
            other => panic!("expected CannotStandardize, got {other:?}"),
        }
    }

    #[test]
    fn age_cutoff_rules() {
        let r = PlayerSeasonRecord {
            player_id: "a".into(),
            birth_date: SimpleDate::new(1990, 2, 10).unwrap(),
            season_start_year: 2015,
            position: "F".into(),
            games_played: 1,
            goals: 0,
            assists: 0,
        };
        // Jan 31, 2016: birthday (Feb 10) not yet reached -> 25.
        assert_eq!(r.age_at((1, 31)), 25);
        // Oct 1, 2015: within the start year, birthday passed -> 25.
        assert_eq!(r.age_at((10, 1)), 25);
        // Mar 1, 2016: birthday passed -> 26.
        assert_eq!(r.age_at((3, 1)), 26);
    }
}
