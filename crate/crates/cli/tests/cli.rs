use std::process::{Command, Output};

fn radiocast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radiocast"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_with_trace() {
    let o = radiocast(&[
        "simulate",
        "--protocol",
        "rlnc",
        "--adversary",
        "random-connected",
        "--n",
        "8",
        "--s",
        "2",
        "--seed",
        "3",
        "--trace",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.contains("completed: true"));
    assert!(text.contains("round,transmitters,edges,receptions"));
}

#[test]
fn sweep_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &config,
        "protocol = \"rlnc\"\nadversary = \"random-connected\"\ntrials = 5\nseed = 1\n[grid]\nn = [8, 12]\ns = [2, 4]\n",
    )
    .unwrap();
    let o = radiocast(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 20);

    // Identical spec, identical bytes.
    let again = dir.path().join("again.csv");
    radiocast(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&again).unwrap(), text.as_bytes());

    let o = radiocast(&["fit", csv.to_str().unwrap(), "--model", "1 + n*s"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("R^2"));
}

#[test]
fn flags_override_config_lists() {
    let o = radiocast(&[
        "sweep",
        "--protocol",
        "rlnc",
        "--adversary",
        "static",
        "--n",
        "6,7",
        "--s",
        "1",
        "--trials",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 4);
}

#[test]
fn config_errors_exit_2() {
    let o = radiocast(&["sweep", "--protocol", "gossip"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("algorithm1, algorithm2, rlnc"));
    assert_eq!(
        radiocast(&["simulate", "--T", "soon"]).status.code(),
        Some(2)
    );
    assert_eq!(
        radiocast(&["validate", "--check", "vibes"]).status.code(),
        Some(2)
    );
}

#[test]
fn validate_passes_and_detects_faults() {
    let o = radiocast(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 5);
    let o = radiocast(&[
        "validate",
        "--check",
        "reception",
        "--inject",
        "reception-off-by-one",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL reception"));
    let o = radiocast(&["validate", "--check", "audit", "--inject", "tau-violation"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("probe"));
}

#[test]
fn hitgame_players() {
    let o = radiocast(&[
        "hitgame", "--n", "10", "--s", "2", "--trials", "2", "--seed", "5",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.starts_with("trial,seed,outcome,rounds,guesses,replay_match"));
    assert_eq!(text.matches(",won,").count(), 2);
    let o = radiocast(&["hitgame", "--player", "uniform", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0));
}
