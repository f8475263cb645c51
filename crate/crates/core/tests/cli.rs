use wavekit::cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    invoke_with_stdin(args, None)
}

fn invoke_with_stdin(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wavekit").chain(args.iter().copied());
    let code = match stdin {
        None => run(argv, &mut out, &mut err),
        Some(text) => {
            // `-` reads standard input; go through a temp file instead so the
            // test does not depend on the process's stdin.
            let path = std::env::temp_dir().join(format!("wavekit-cli-{}.txt", std::process::id()));
            std::fs::write(&path, text).unwrap();
            let path = path.to_string_lossy().into_owned();
            let argv: Vec<&str> = argv.map(|a| if a == "-" { path.as_str() } else { a }).collect();
            run(argv, &mut out, &mut err)
        }
    };
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn reference_report_matches_golden() {
    let (code, out, err) = invoke(&["paper-report"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, include_str!("golden/reference_report.txt"));
    let (code, alias, _) = invoke(&["reference-report"]);
    assert_eq!(code, 0);
    assert_eq!(alias, out);
}

#[test]
fn report_json_parses() {
    let (code, out, _) = invoke(&["paper-report", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rounds"], 48);
}

#[test]
fn encrypt_known_vector() {
    let (code, out, err) = invoke(&[
        "encrypt", "--master", "0x0123456789ABCDEF", "--rounds", "48", "--pt", "0x0000000000000000",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("0xD0161EDF78E08EDC"), "{out}");

    let (code, out, _) = invoke(&[
        "decrypt", "--master", "0x0123456789ABCDEF", "--rounds", "48", "--ct", "0xD0161EDF78E08EDC",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("0x0000000000000000"), "{out}");
}

#[test]
fn bundled_kats_verify() {
    let (code, out, err) = invoke(&["kat-verify"]);
    assert_eq!(code, 0, "{out}{err}");
}

#[test]
fn generated_kats_round_trip() {
    let (code, generated, err) = invoke(&["kat-gen", "--count", "5", "--rounds", "12", "--seed", "7"]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<_> = generated.lines().filter(|l| l.starts_with("master=")).collect();
    assert_eq!(lines.len(), 5);
    let (code, _, err) = invoke_with_stdin(&["kat-verify", "-"], Some(&generated));
    assert_eq!(code, 0, "{err}");

    // flip the last hex digit of the first ciphertext
    let line = lines[0];
    let last = line.chars().last().unwrap();
    let flipped = if last == '0' { '1' } else { '0' };
    let broken = generated.replacen(line, &format!("{}{flipped}", &line[..line.len() - 1]), 1);
    let (code, out, _) = invoke_with_stdin(&["kat-verify", "-"], Some(&broken));
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("mismatch at vector 1"), "{out}");

    let (code, _, _) = invoke_with_stdin(&["kat-verify", "-"], Some("master=0x1 rounds=3 pt=zz ct=0x0\n"));
    assert_eq!(code, 2);
}

#[test]
fn json_outputs_parse() {
    for args in [
        &["trail-bound", "--rounds", "3", "--json"][..],
        &["trail-bound", "--rounds", "4", "--model", "refined", "--json"],
        &["wave-certify", "--json"],
        &["group-check", "--toy", "2,2,3", "--seed", "1", "--json"],
        &["reduce-verify", "--seed", "3", "--trials", "20", "--json"],
        &["encrypt", "--master", "0x1", "--pt", "0x2", "--json"],
    ] {
        let (code, out, err) = invoke(args);
        assert!(code == 0 || code == 1, "{args:?}: {err}");
        serde_json::from_str::<serde_json::Value>(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
    }
}

#[test]
fn trail_bound_reports_pattern() {
    let (code, out, _) = invoke(&["trail-bound", "--rounds", "48", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["min_active_sboxes"], 32);
    assert_eq!(v["data_complexity_log2"], "66");
}

#[test]
fn sbox_analyze_reads_a_file() {
    let path = std::env::temp_dir().join(format!("wavekit-sbox-{}.txt", std::process::id()));
    std::fs::write(&path, wavekit::instance::SBOX_FILE).unwrap();
    let (code, out, err) = invoke(&["sbox-analyze", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("missing sums: 0x11"), "{out}");
    std::fs::write(&path, "not an sbox").unwrap();
    let (code, _, err) = invoke(&["sbox-analyze", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn exit_codes() {
    assert_eq!(invoke(&["no-such-command"]).0, 2);
    assert_eq!(invoke(&["kat-gen"]).0, 2, "kat-gen needs a seed");
    assert_eq!(invoke(&["encrypt", "--pt", "0x0"]).0, 2, "no key given");
    assert_eq!(invoke(&["trail-bound", "--model", "fine"]).0, 2);
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("paper-report"));
}
