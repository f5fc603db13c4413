use narrative_core::config::RunConfig;
use narrative_core::embedding::{hashed_embedding, EmbeddingError};
use narrative_core::interchange::{save_corpus, ExtractionTuple, PhraseTable};
use narrative_core::pipeline::{run_pipeline, Manifest, Stage, StageError, MANIFEST_FILE};
use narrative_core::synth::{demo_framework, generate_synthetic_corpus};
use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

fn corpus(dir: &Path, posts: usize) -> (PathBuf, Vec<ExtractionTuple>) {
    let tuples = generate_synthetic_corpus(&demo_framework(), posts, 7).unwrap();
    let path = dir.join("corpus.jsonl");
    save_corpus(&path, &tuples).unwrap();
    (path, tuples)
}

fn write_sidecar(path: &Path, tuples: &[ExtractionTuple], skip: Option<&str>) -> Vec<String> {
    let phrases = PhraseTable::from_tuples(tuples);
    let mut f = std::fs::File::create(path).unwrap();
    writeln!(f, "{{\"schema_version\":\"1\",\"dim\":64}}").unwrap();
    let mut skipped = Vec::new();
    for p in phrases.iter().map(|e| &e.phrase) {
        if skip.is_some_and(|w| p.text.contains(w)) {
            skipped.push(p.id.clone());
            continue;
        }
        let v = hashed_embedding(&p.text, 64);
        let row = serde_json::json!({"phrase_id": p.id, "text": p.text, "vector": v.values()});
        writeln!(f, "{row}").unwrap();
    }
    skipped
}

fn files(dir: &Path) -> BTreeSet<String> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect()
}

#[test]
fn stopping_at_supernodes_writes_only_early_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = corpus(dir.path(), 150);
    let cfg = RunConfig {
        input: Some(input),
        ..RunConfig::default()
    };
    let out = dir.path().join("out");
    run_pipeline(&cfg, &out, Stage::Supernodes).unwrap();
    let expected: BTreeSet<String> = [
        "ingest.json",
        "ranking.tsv",
        "ranking.json",
        "supernodes.json",
        "supernodes.tsv",
        MANIFEST_FILE,
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(files(&out), expected);
    let m = Manifest::load(&out.join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.last_stage, "supernodes");
    assert_eq!(m.artifacts.len(), 5);
}

#[test]
fn sidecar_run_covers_every_phrase() {
    let dir = tempfile::tempdir().unwrap();
    let (input, tuples) = corpus(dir.path(), 200);
    let sidecar = dir.path().join("emb.jsonl");
    write_sidecar(&sidecar, &tuples, None);
    let cfg = RunConfig {
        input: Some(input),
        embeddings: Some(sidecar),
        ..RunConfig::default()
    };
    let out = run_pipeline(&cfg, &dir.path().join("out"), Stage::Communities).unwrap();
    let net = out.network.unwrap();
    assert!(!net.nodes.is_empty());
    assert!(!net.edges.is_empty());
    assert!(out.communities.is_some());
}

#[test]
fn missing_sidecar_rows_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let (input, tuples) = corpus(dir.path(), 200);
    let sidecar = dir.path().join("emb.jsonl");
    let skipped = write_sidecar(
        &sidecar,
        &tuples,
        Some(demo_framework().actants[0].name.as_str()),
    );
    let cfg = RunConfig {
        input: Some(input),
        embeddings: Some(sidecar),
        ..RunConfig::default()
    };
    let err = run_pipeline(&cfg, &dir.path().join("out"), Stage::Subnodes).unwrap_err();
    assert_eq!(err.stage, Stage::Subnodes);
    assert_eq!(err.exit_code(), 3);
    let StageError::Embedding(EmbeddingError::Missing(ids)) = &err.source else {
        panic!("unexpected error {err}");
    };
    // only phrases that survive ranking need vectors
    assert!(ids.iter().all(|id| skipped.contains(id)));
    assert!(!ids.is_empty());
    // earlier stages left their artifacts behind
    assert!(dir.path().join("out/supernodes.json").exists());
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (input, _) = corpus(dir.path(), 300);
    let mut cfg = RunConfig {
        input: Some(input),
        ..RunConfig::default()
    };
    cfg.consensus.t_max = 20;
    let a = run_pipeline(&cfg, &dir.path().join("a"), Stage::Evaluate).unwrap();
    let b = run_pipeline(&cfg, &dir.path().join("b"), Stage::Evaluate).unwrap();
    assert_eq!(a.artifacts, b.artifacts);
    assert_eq!(
        std::fs::read(dir.path().join("a").join(MANIFEST_FILE)).unwrap(),
        std::fs::read(dir.path().join("b").join(MANIFEST_FILE)).unwrap()
    );
    // replaying the recorded configuration reproduces the run
    let m = Manifest::load(&dir.path().join("a").join(MANIFEST_FILE)).unwrap();
    let c = run_pipeline(
        &m.run_config().unwrap(),
        &dir.path().join("c"),
        Stage::Evaluate,
    )
    .unwrap();
    assert_eq!(a.artifacts, c.artifacts);
}
