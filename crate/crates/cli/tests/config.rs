use std::io::Write;

use chabauty_cli::config::{load_config, parse_pi, OutputMode, RunConfig};
use chabauty_cli::Cli;
use clap::Parser;

fn file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn empty_file_gives_defaults() {
    let f = file("");
    assert_eq!(load_config(f.path()).unwrap(), RunConfig::default());
    let f = file("# only a comment\n\n");
    assert_eq!(load_config(f.path()).unwrap(), RunConfig::default());
}

#[test]
fn values_are_read() {
    let f = file("r=4\nrmax = 5 # trailing\nspec=preset t3-alt\npi={2,3}\nmode=json\nroot=b\n");
    let cfg = load_config(f.path()).unwrap();
    assert_eq!(cfg.r, 4);
    assert_eq!(cfg.rmax, 5);
    assert_eq!(cfg.spec.as_deref(), Some("preset t3-alt"));
    assert_eq!(cfg.pi, [2, 3].into());
    assert_eq!(cfg.mode, OutputMode::Json);
    assert_eq!(cfg.root.as_deref(), Some("b"));
}

#[test]
fn flags_override_the_file() {
    let f = file("r=2\nk=2\n");
    let path = f.path().to_str().unwrap();
    let cli = Cli::try_parse_from(["chabauty", "profile", "--config", path, "--r", "3"]).unwrap();
    let cfg = cli.resolve().unwrap();
    assert_eq!(cfg.r, 3);
    assert_eq!(cfg.k, 2);
}

#[test]
fn unknown_mode() {
    let f = file("mode=yaml\n");
    let err = load_config(f.path()).unwrap_err();
    assert!(err.contains("unknown output mode"), "{err}");
}

#[test]
fn errors_name_the_line() {
    let f = file("r=2\n\nfrobnicate=1\n");
    let err = load_config(f.path()).unwrap_err();
    assert!(err.contains("line 3") && err.contains("frobnicate"), "{err}");
    let f = file("r=2\nr\n");
    assert!(load_config(f.path()).unwrap_err().contains("line 2"));
    let f = file("r=-1\n");
    assert!(load_config(f.path()).unwrap_err().contains("line 1"));
}

#[test]
fn prime_sets() {
    assert_eq!(parse_pi("2,3,5").unwrap(), [2, 3, 5].into());
    assert_eq!(parse_pi("{7}").unwrap(), [7].into());
    assert!(parse_pi("4").is_err());
    assert!(parse_pi("1").is_err());
}
