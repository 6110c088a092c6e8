use std::fs;

use nfs_eraser::io::{manifest_path, parse_config, resolve, write_outputs, Command, Manifest, ParamMap, CSV_COLUMNS};

fn params(pairs: &[(&str, &str)]) -> ParamMap {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[test]
fn manifest_round_trip_for_every_command() {
    let cases = [
        (Command::Single, params(&[("target.xi", "3"), ("grid.end", "1")])),
        (Command::Scheme1, params(&[("grid.end", "1")])),
        (Command::Scheme2, params(&[("scheme2.mode", "storage"), ("storage.cycles", "2")])),
        (Command::Scheme2, params(&[("scheme2.phi", "3pi/4"), ("input.auto_alpha", "true")])),
    ];
    for (cmd, given) in cases {
        let dir = tempfile::tempdir().unwrap();
        let run = resolve(cmd, &given).unwrap();
        let result = run.run().unwrap();
        let written = write_outputs(dir.path(), &run, &result).unwrap();
        let read = Manifest::read(&manifest_path(dir.path(), cmd)).unwrap();
        assert_eq!(read, written);
        let again = read.to_run().unwrap();
        assert_eq!(again.config, run.config);
        assert_eq!(again.grid, run.grid);

        // rerunning reproduces every file byte for byte
        let dir2 = tempfile::tempdir().unwrap();
        write_outputs(dir2.path(), &again, &again.run().unwrap()).unwrap();
        for name in read.outputs.iter().cloned().chain([Manifest::file_name(cmd)]) {
            assert_eq!(fs::read(dir.path().join(&name)).unwrap(), fs::read(dir2.path().join(&name)).unwrap(), "{name}");
        }
        for name in &read.outputs {
            let text = fs::read_to_string(dir.path().join(name)).unwrap();
            let mut lines = text.lines();
            assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
            assert_eq!(lines.count(), run.grid.samples);
        }
    }
}

#[test]
fn edited_manifest_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let run = resolve(Command::Single, &params(&[("grid.end", "0.5")])).unwrap();
    let mut m = write_outputs(dir.path(), &run, &run.run().unwrap()).unwrap();
    m.params.insert("target.xi".into(), "2".into());
    assert!(m.to_run().is_err());
}

#[test]
fn config_file_layers() {
    let file = parse_config("[target]\nxi = 2.5\nomega2 = \"9pi\"\n[grid]\nend = 1\n").unwrap();
    assert_eq!(file["target.omega2"], "9pi");
    let run = resolve(Command::Single, &file).unwrap();
    assert_eq!(run.params["target.xi"], "2.5");
    assert_eq!(run.params["grid.step"], "0.001");
}
