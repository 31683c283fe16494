use std::fs;

use locstat::harness::{
    emit_report, read_json, run_command, Command, ExperimentConfig, Format, Report, Run, CSV_HEADER,
};

fn small(trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        sides: vec![256, 512],
        trials,
        ..Default::default()
    }
}

#[test]
fn empty_report_writes_headers_only() {
    let c = small(1);
    let run = Run {
        report: Report::new(Command::Poisson, &c),
        samples: Vec::new(),
    };
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_report(&run, &[Format::Csv, Format::Json, Format::Svg], dir.path()).unwrap();
    assert_eq!(paths.len(), 2);
    let csv = fs::read_to_string(&paths[0]).unwrap();
    assert_eq!(csv.trim_end(), CSV_HEADER.join(","));
    assert_eq!(read_json(&paths[1]).unwrap(), run.report);
}

#[test]
fn json_round_trips() {
    for cmd in [Command::Independence, Command::Decorrelate, Command::Dos, Command::Wegner] {
        let run = run_command(cmd, &small(30), None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_report(&run, &[Format::Json], dir.path()).unwrap();
        assert_eq!(read_json(&paths[0]).unwrap(), run.report, "{cmd}");
    }
}

#[test]
fn csv_has_one_row_per_trial() {
    let c = small(25);
    let run = run_command(Command::Decorrelate, &c, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_report(&run, &[Format::Csv], dir.path()).unwrap();
    let mut rd = csv::Reader::from_path(&paths[0]).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), c.trials * c.sides.len());
    for row in &rows {
        let list: Vec<Vec<u32>> = serde_json::from_str(&row[12]).unwrap();
        let n_l: usize = row[4].parse().unwrap();
        assert_eq!(list.len(), n_l);
        let zeta: u32 = row[10].parse().unwrap();
        assert_eq!(list.iter().map(|p| p[0]).sum::<u32>(), zeta);
        assert_eq!(&row[13], "0");
    }
}

#[test]
fn reruns_and_thread_counts_are_byte_identical() {
    let c = small(40);
    let mut blobs = Vec::new();
    for threads in [Some(1), Some(3), None] {
        let run = run_command(Command::Poisson, &c, threads).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_report(&run, &[Format::Csv, Format::Json, Format::Svg], dir.path()).unwrap();
        blobs.push(paths.iter().map(|p| fs::read(p).unwrap()).collect::<Vec<_>>());
    }
    assert!(blobs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn figures_cover_each_kind() {
    let mut c = small(60);
    c.green.separations = vec![2, 4, 6, 8, 10];
    let dir = tempfile::tempdir().unwrap();
    let mut names = Vec::new();
    for cmd in [Command::Poisson, Command::Independence, Command::Green] {
        let run = run_command(cmd, &c, None).unwrap();
        for p in emit_report(&run, &[Format::Svg], dir.path()).unwrap() {
            let text = fs::read_to_string(&p).unwrap();
            assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
            names.push(p.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    for stem in ["count_histogram", "gap_ecdf", "cf_gap", "moments"] {
        assert!(names.iter().any(|n| n.contains(stem)), "{stem} missing from {names:?}");
    }
}

#[test]
fn unwritable_directory_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let run = run_command(Command::Dos, &small(2), None).unwrap();
    let err = emit_report(&run, &[Format::Json], &blocker.join("sub")).unwrap_err();
    assert!(err.to_string().contains("file"), "{err}");
}
