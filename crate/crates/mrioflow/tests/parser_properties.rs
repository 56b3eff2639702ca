//! Parser properties: write-then-reparse round trips and sum
//! preservation against an independent line scan, across tables with
//! negative cells and zero rows.

use std::io::Write;

use proptest::prelude::*;

use mrioflow::ingest::{parse_mrio, write_mrio, MrioFileSpec};

const REGIONS: [&str; 2] = ["US", "CN"];
const SECTORS: [&str; 3] = ["Alpha", "Beta", "Gamma"];

#[derive(Debug, Clone)]
struct TableCase {
    n_regions: usize,
    n_sectors: usize,
    cells: Vec<f64>,
}

fn table_case() -> impl Strategy<Value = TableCase> {
    (1usize..=2, 1usize..=3)
        .prop_flat_map(|(nr, ns)| {
            let dim = nr * ns;
            let cell = prop_oneof![
                3 => (-64_000i64..64_000).prop_map(|v| v as f64 / 64.0),
                1 => Just(0.0),
                1 => any::<i32>().prop_map(|v| v as f64 * 0.125),
            ];
            (
                Just(nr),
                Just(ns),
                proptest::collection::vec(cell, dim * dim),
            )
        })
        .prop_map(|(n_regions, n_sectors, cells)| TableCase { n_regions, n_sectors, cells })
}

fn render_file(case: &TableCase) -> String {
    let dim = case.n_regions * case.n_sectors;
    let mut text = String::from("region\tsector");
    for region in &REGIONS[..case.n_regions] {
        for _ in 0..case.n_sectors {
            text.push('\t');
            text.push_str(region);
        }
    }
    text.push_str("\nregion\tsector");
    for _ in 0..case.n_regions {
        for sector in &SECTORS[..case.n_sectors] {
            text.push('\t');
            text.push_str(sector);
        }
    }
    text.push('\n');
    for (r, region) in REGIONS[..case.n_regions].iter().enumerate() {
        for (s, sector) in SECTORS[..case.n_sectors].iter().enumerate() {
            let row = r * case.n_sectors + s;
            text.push_str(region);
            text.push('\t');
            text.push_str(sector);
            for col in 0..dim {
                text.push('\t');
                text.push_str(&format!("{}", case.cells[row * dim + col]));
            }
            text.push('\n');
        }
    }
    text
}

/// Independent oracle: total of the file computed directly from its
/// text, cell by cell.
fn line_scan_total(text: &str) -> f64 {
    text.lines()
        .skip(2)
        .flat_map(|line| line.split('\t').skip(2))
        .map(|cell| cell.parse::<f64>().unwrap())
        .sum()
}

proptest! {
    #[test]
    fn round_trip_preserves_everything(case in table_case()) {
        let text = render_file(&case);
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();

        let table = parse_mrio(&MrioFileSpec::new(file.path(), 2020)).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_mrio(&table, out.path(), '\t').unwrap();
        let again = parse_mrio(&MrioFileSpec::new(out.path(), 2020)).unwrap();

        prop_assert!(table.index().same_ordering(again.index()));
        prop_assert_eq!(table.year(), again.year());
        let a: Vec<(usize, usize, u64)> =
            table.cells().entries().map(|(r, c, v)| (r, c, v.to_bits())).collect();
        let b: Vec<(usize, usize, u64)> =
            again.cells().entries().map(|(r, c, v)| (r, c, v.to_bits())).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn parsed_total_matches_independent_line_scan(case in table_case()) {
        let text = render_file(&case);
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();
        let table = parse_mrio(&MrioFileSpec::new(file.path(), 2020)).unwrap();

        let parsed = table.cells().total();
        let scanned = line_scan_total(&text);
        let scale = parsed.abs().max(scanned.abs()).max(1.0);
        prop_assert!((parsed - scanned).abs() <= 1e-9 * scale, "{parsed} vs {scanned}");

        let negatives = case.cells.iter().filter(|&&v| v < 0.0).count();
        prop_assert_eq!(table.meta().negative_cells, negatives);
    }
}
