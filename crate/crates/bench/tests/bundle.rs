use riodbg_bench::{generate_instance, load_dataset, read_bundle, write_bundle, BundleError, InstanceSpec};

#[test]
fn bundles_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut written = Vec::new();
    for seed in [4, 2] {
        let mut inst = generate_instance(&InstanceSpec::desk(seed), seed).unwrap();
        let path = dir.path().join(&inst.id);
        write_bundle(&path, &inst).unwrap();
        let back = read_bundle(&path).unwrap();
        assert_eq!(back, inst);
        inst.id = back.id;
        written.push(inst);
    }
    let loaded = load_dataset(dir.path()).unwrap();
    let ids: Vec<&str> = loaded.iter().map(|i| i.id.as_str()).collect();
    assert_eq!(ids, ["inst-2", "inst-4"]);
}

#[test]
fn tampered_merge_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_instance(&InstanceSpec::small(), 1).unwrap();
    write_bundle(dir.path(), &inst).unwrap();
    let tsv = std::fs::read_to_string(dir.path().join("alignment.tsv")).unwrap();
    std::fs::write(dir.path().join("alignment.tsv"), tsv.replacen("<-", "->", 1)).unwrap();
    assert!(matches!(read_bundle(dir.path()), Err(BundleError::Mismatch { .. })));
}

#[test]
fn missing_files_are_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(read_bundle(dir.path()), Err(BundleError::Io { .. })));
}
