mod common;

use common::{fixture_dir, synth};

/// The committed fixture files are exactly what the generator produces.
/// Run with `SOE_REGENERATE_FIXTURES=1` to rewrite them.
#[test]
fn committed_fixtures_match_generator() {
    let dir = fixture_dir();
    if std::env::var_os("SOE_REGENERATE_FIXTURES").is_some() {
        std::fs::create_dir_all(&dir).unwrap();
        synth::write_fixtures(&dir);
    }
    let fresh = tempfile::tempdir().unwrap();
    synth::write_fixtures(fresh.path());

    let mut names: Vec<_> = std::fs::read_dir(fresh.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 2 * synth::fixture_specs().len());
    for name in names {
        let want = std::fs::read(fresh.path().join(&name)).unwrap();
        let have = std::fs::read(dir.join(&name))
            .unwrap_or_else(|e| panic!("{}: {e}", name.to_string_lossy()));
        assert!(
            want == have,
            "{} differs from the generator",
            name.to_string_lossy()
        );
    }
}

#[test]
fn fixtures_parse_back_to_generated_histories() {
    for b in synth::fixtures() {
        let id = &b.history.battery_id;
        let dir = fixture_dir();
        let parsed = soe_analytics::cycledata::read_history(
            &dir.join(format!("{id}.csv")),
            &dir.join(format!("{id}.toml")),
        )
        .unwrap();
        assert_eq!(parsed.cycles.len(), b.history.cycles.len(), "{id}");
        assert_eq!(parsed.segments, b.history.segments, "{id}");
        for (p, g) in parsed.cycles.iter().zip(&b.history.cycles) {
            assert_eq!(p.charge, g.charge);
            assert_eq!(p.discharge, g.discharge);
            assert_eq!(p.conditions, g.conditions);
        }
    }
}
