use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use relkit_core::datamodel::{
    write_labels_file, DatasetManifest, DissociationCondition, EmbeddingMatrix, Label, LabelRow, PredictionFile,
    PredictionRecord, Split, PROBABILITY_THRESHOLD,
};
use relkit_core::metrics::pixel_equality_predictions;
use relkit_core::raster::{fnv1a64, read_png_rgb};
use relkit_core::rng::derive_stream;

fn relkit(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relkit"))
        .arg("--root")
        .arg(root)
        .args(args)
        .env_remove("RELKIT_SEED")
        .output()
        .expect("spawn relkit")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(root: &Path, name: &str, json: &str) {
    std::fs::write(root.join(name), json).unwrap();
}

const MINI: &str = r#"{
  "dataset_id": "mini",
  "root_seed": 11,
  "object_count": 16,
  "split_sizes": {"train": 10, "val": 3, "test": 3},
  "stimuli_per_split": 64
}"#;

fn generate_mini(root: &Path, out: &str, extra: &[&str]) -> Output {
    write_config(root, "mini.json", MINI);
    let mut args = vec!["generate", "--config", "mini.json", "--out", out];
    args.extend_from_slice(extra);
    relkit(root, &args)
}

fn tree_digest(dir: &Path) -> BTreeMap<PathBuf, u64> {
    fn walk(base: &Path, dir: &Path, acc: &mut BTreeMap<PathBuf, u64>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(base, &path, acc);
            } else {
                acc.insert(path.strip_prefix(base).unwrap().to_path_buf(), fnv1a64(&std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut acc = BTreeMap::new();
    walk(dir, dir, &mut acc);
    acc
}

fn manifest(dir: &Path) -> DatasetManifest {
    DatasetManifest::read(&dir.join("manifest.jsonl")).unwrap()
}

#[test]
fn generate_then_validate() {
    let tmp = tempfile::tempdir().unwrap();
    let out = generate_mini(tmp.path(), "ds", &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let ds = tmp.path().join("ds");
    for f in ["manifest.jsonl", "run.json", "objects/index.json", "splits/train.jsonl", "splits/val.jsonl", "splits/test.jsonl"] {
        assert!(ds.join(f).is_file(), "missing {f}");
    }
    assert!(ds.join("images/train").is_dir());
    let run: serde_json::Value = serde_json::from_slice(&std::fs::read(ds.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["command"], "generate");
    assert_eq!(run["params"]["config"]["root_seed"], 11);
    assert_eq!(run["params"]["config"]["object_count"], 16);
    assert_eq!(manifest(&ds).label_counts(Split::Train), (32, 32));

    let v = relkit(tmp.path(), &["validate", "ds"]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
    assert!(stdout(&v).starts_with("ok: 192 records"));
    assert!(ds.join("validation/run.json").is_file());
}

#[test]
fn rerun_is_byte_identical_for_any_job_count() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&generate_mini(tmp.path(), "a", &[])), 0);
    assert_eq!(code(&generate_mini(tmp.path(), "b", &["--jobs", "1"])), 0);
    let (a, b) = (tree_digest(&tmp.path().join("a")), tree_digest(&tmp.path().join("b")));
    assert!(a.len() > 200);
    assert_eq!(a, b);
}

#[test]
fn seed_environment_variable_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "mini.json", MINI);
    let out = Command::new(env!("CARGO_BIN_EXE_relkit"))
        .args(["--root", tmp.path().to_str().unwrap(), "generate", "--config", "mini.json", "--out", "s"])
        .env("RELKIT_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let m = manifest(&tmp.path().join("s"));
    assert_eq!(m.root_seed, 99);
    assert_eq!(m.config.root_seed, 99);

    assert_eq!(code(&generate_mini(tmp.path(), "t", &["--seed", "99"])), 0);
    assert_eq!(tree_digest(&tmp.path().join("s")), tree_digest(&tmp.path().join("t")));
}

#[test]
fn tampered_image_is_a_checksum_violation() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&generate_mini(tmp.path(), "ds", &[])), 0);
    let ds = tmp.path().join("ds");
    let rec = &manifest(&ds).records[5];
    let path = ds.join(&rec.image_path);
    let mut img = read_png_rgb(&path).unwrap();
    let p = img.get_pixel_mut(0, 0);
    p.0[0] ^= 1;
    img.save(&path).unwrap();

    let v = relkit(tmp.path(), &["validate", "ds"]);
    assert_eq!(code(&v), 3);
    assert!(stdout(&v).contains("checksum: 1"), "{}", stdout(&v));
    let report = std::fs::read_to_string(ds.join("validation/violations.csv")).unwrap();
    assert!(report.lines().nth(1).unwrap().starts_with(".,checksum,"));
}

#[test]
fn deleted_record_line_is_a_balance_violation() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&generate_mini(tmp.path(), "ds", &[])), 0);
    let path = tmp.path().join("ds/manifest.jsonl");
    let text = std::fs::read_to_string(&path).unwrap();
    let kept: Vec<&str> = text.lines().enumerate().filter(|(i, _)| *i != 3).map(|(_, l)| l).collect();
    std::fs::write(&path, kept.join("\n") + "\n").unwrap();

    let v = relkit(tmp.path(), &["validate", "ds"]);
    assert_eq!(code(&v), 3);
    assert!(stdout(&v).contains("balance"), "{}", stdout(&v));
}

#[test]
fn exit_codes_for_bad_input() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "bad.json", r#"{"object_count": 3}"#);
    assert_eq!(code(&relkit(tmp.path(), &["generate", "--config", "bad.json", "--out", "x"])), 1);
    write_config(tmp.path(), "typo.json", r#"{"objects": 3}"#);
    assert_eq!(code(&relkit(tmp.path(), &["generate", "--config", "typo.json", "--out", "x"])), 1);
    assert_eq!(code(&relkit(tmp.path(), &["generate", "--config", "missing.json", "--out", "x"])), 2);
    assert_eq!(code(&relkit(tmp.path(), &["validate", "nowhere"])), 2);
    assert_eq!(code(&relkit(tmp.path(), &["generate", "--bogus"])), 1);
    assert_eq!(code(&relkit(tmp.path(), &["--help"])), 0);
}

#[test]
fn variant_flag_selects_masked_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&generate_mini(tmp.path(), "m", &["--variant", "masked"])), 0);
    let m = manifest(&tmp.path().join("m"));
    assert!(m.records.iter().all(|r| r.variant.to_string() == "masked"));
    assert_eq!(code(&relkit(tmp.path(), &["validate", "m"])), 0);
    assert_eq!(code(&generate_mini(tmp.path(), "z", &["--variant", "wobbly"])), 1);
}

fn perfect_or_flipped(m: &DatasetManifest, correct: usize, model: &str, seed: i64) -> PredictionFile {
    let records = m
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let truth = r.label.unwrap();
            let said = if i < correct { truth } else { truth.flip() };
            let score = if said == Label::Same { 0.9 } else { 0.1 };
            PredictionRecord::from_score(&r.stimulus_id, score, PROBABILITY_THRESHOLD, model, seed)
        })
        .collect();
    PredictionFile::new(PROBABILITY_THRESHOLD, records).unwrap()
}

#[test]
fn eval_matrix_has_off_diagonal_averages() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    assert_eq!(code(&generate_mini(root, "a", &[])), 0);
    assert_eq!(code(&generate_mini(root, "b", &["--seed", "5"])), 0);
    let test_of = |d: &str| manifest(&root.join(d)).restricted_to(Split::Test);
    let (ma, mb) = (test_of("a"), test_of("b"));
    assert_eq!(ma.records.len(), 64);
    // correct counts out of 64: a→a 64, a→b 48, b→a 32, b→b 64
    let write = |name: &str, m: &DatasetManifest, correct: usize| {
        let mut f = perfect_or_flipped(m, correct, name, 0);
        f.records.extend(perfect_or_flipped(m, correct, name, 1).records);
        f.write(&root.join(name)).unwrap();
    };
    write("aa.csv", &ma, 64);
    write("ab.csv", &mb, 48);
    write("ba.csv", &ma, 32);
    write("bb.csv", &mb, 64);

    let out = relkit(
        root,
        &[
            "eval", "--manifest", "a=a", "--manifest", "b=b/manifest.jsonl", "--pred", "a:a=aa.csv", "--pred", "a:b=ab.csv",
            "--pred", "b:a=ba.csv", "--pred", "b:b=bb.csv", "--matrix", "--out", "rep",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let matrix = std::fs::read_to_string(root.join("rep/matrix.csv")).unwrap();
    assert_eq!(matrix, "train,a,b,Avg.\na,100.0,75.0,75.0\nb,50.0,100.0,50.0\nAvg.,50.0,75.0,\n");
    let cells = std::fs::read_to_string(root.join("rep/cells.csv")).unwrap();
    assert_eq!(cells.lines().count(), 1 + 8);
    assert!(cells.contains("\na,b,0,64,0.7500,"));
    assert!(root.join("rep/run.json").is_file());

    let single = relkit(root, &["eval", "--manifest", "a=a", "--pred", "a=aa.csv", "--out", "one", "--format", "md"]);
    assert_eq!(code(&single), 0);
    assert!(std::fs::read_to_string(root.join("one/cells.md")).unwrap().contains("1.0000"));

    let mut short = perfect_or_flipped(&ma, 64, "short", 0);
    short.records.truncate(10);
    short.write(&root.join("short.csv")).unwrap();
    let missing = relkit(root, &["eval", "--manifest", "a=a", "--pred", "a=short.csv", "--out", "bad"]);
    assert_eq!(code(&missing), 1);
}

#[test]
fn eval_dissociation_with_pixel_equality_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    write_config(
        root,
        "dis.json",
        r#"{"dataset_id":"dis","source":{"kind":"factorized","catalog":{"shapes":4,"textures":4,"colors":4}},
            "variant":"dissociation","dissociation":{"unique_objects":8,"stimuli":16}}"#,
    );
    let out = relkit(root, &["generate", "--config", "dis.json", "--out", "dis"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&relkit(root, &["validate", "dis"])), 0);

    let mut records = Vec::new();
    for cond in DissociationCondition::all() {
        let dir = root.join("dis").join(cond.name());
        let m = manifest(&dir);
        let f = pixel_equality_predictions(&m, |r| read_png_rgb(&dir.join(&r.image_path)), "oracle").unwrap();
        records.extend(f.records);
    }
    PredictionFile::new(PROBABILITY_THRESHOLD, records).unwrap().write(&root.join("oracle.csv")).unwrap();

    let out = relkit(root, &["eval", "--dissociation", "dis", "--pred", "oracle=oracle.csv", "--out", "rep"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(root.join("rep/proportions.csv")).unwrap();
    assert_eq!(
        table,
        "model,acc.,none,S,T,TS,C,CS,CT,CTS\noracle,,0.00,0.00,0.00,0.00,0.00,0.00,0.00,1.00\n"
    );
}

fn separable(n: usize, seed: u64, shift: f32) -> (EmbeddingMatrix, Vec<LabelRow>) {
    let mut s = derive_stream(seed, 0);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let same = i % 2 == 0;
        let c = if same { 1.0 } else { -1.0 };
        rows.push(vec![c + 0.3 * s.standard_normal() as f32 + shift, 0.5 * s.standard_normal() as f32, 1.0]);
        labels.push(LabelRow {
            stimulus_id: format!("s{i:04}"),
            label: if same { Label::Same } else { Label::Different },
        });
    }
    let ids = labels.iter().map(|l| l.stimulus_id.clone()).collect();
    (EmbeddingMatrix::from_rows(ids, &rows).unwrap(), labels)
}

#[test]
fn analyze_pairwise_probe_and_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let (train, train_labels) = separable(200, 1, 0.0);
    let (test, test_labels) = separable(100, 2, 0.0);
    let (far, _) = separable(50, 3, 40.0);
    train.write(&root.join("train.emb")).unwrap();
    test.write(&root.join("test.emb")).unwrap();
    far.write(&root.join("far.emb")).unwrap();
    write_labels_file(&root.join("train.csv"), &train_labels).unwrap();
    write_labels_file(&root.join("test.csv"), &test_labels).unwrap();

    let out = relkit(
        root,
        &[
            "analyze", "--emb", "train=train.emb", "--emb", "test=test.emb", "--emb", "far=far.emb", "--pairwise", "--probe",
            "--labels", "train=train.csv", "--labels", "test=test.csv", "--threshold", "--reference", "train.emb", "--out",
            "an",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let an = root.join("an");

    let pairwise = std::fs::read_to_string(an.join("pairwise.csv")).unwrap();
    assert!(pairwise.contains("\ntrain,19900,"));
    assert!(pairwise.contains("\nfar,1225,"));
    let hist = std::fs::read_to_string(an.join("histograms/test.csv")).unwrap();
    assert_eq!(hist.lines().count(), 1 + 200);
    let total: u64 = hist.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 4950);

    let probe = std::fs::read_to_string(an.join("probe.csv")).unwrap();
    assert!(probe.contains("train,train,200,1.0000,1.0000"), "{probe}");
    assert!(probe.contains("train,test,100,"), "{probe}");
    let preds = PredictionFile::read(&an.join("predictions/test.csv")).unwrap();
    assert_eq!(preds.records.len(), 100);
    let losses = std::fs::read_to_string(an.join("probe_losses.csv")).unwrap();
    assert_eq!(losses.lines().count(), 1 + 501);

    let threshold = std::fs::read_to_string(an.join("threshold.csv")).unwrap();
    assert!(threshold.contains("far,") && threshold.lines().any(|l| l.starts_with("far,") && l.ends_with(",expected_fail")));
    assert!(threshold.lines().any(|l| l.starts_with("train,") && l.ends_with(",expected_ok")));

    assert_eq!(code(&relkit(root, &["analyze", "--emb", "x=train.emb", "--out", "none"])), 1);
    assert_eq!(code(&relkit(root, &["analyze", "--emb", "x=nope.emb", "--pairwise", "--out", "none"])), 2);
}

#[test]
fn sweep_writes_one_dataset_per_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    write_config(
        root,
        "base.json",
        r#"{"dataset_id":"sw","object_count":8,"split_sizes":{"train":4,"val":2,"test":2},"stimuli_per_split":8}"#,
    );
    let out = relkit(root, &["sweep", "--config", "base.json", "--objects", "2,4", "--stimuli", "4,8", "--out", "sw"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for cell in ["u2-s4", "u2-s8", "u4-s4", "u4-s8"] {
        assert_eq!(code(&relkit(root, &["validate", &format!("sw/{cell}")])), 0, "{cell}");
    }
    assert_eq!(manifest(&root.join("sw/u4-s8")).label_counts(Split::Train), (4, 4));
    assert_eq!(std::fs::read_to_string(root.join("sw/sweep.csv")).unwrap().lines().count(), 5);
    assert!(root.join("sw/run.json").is_file());
}
