use std::path::Path;
use std::process::Command;

fn header() -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/dualris.h");
    std::fs::read_to_string(path).expect("header generated by build script")
}

#[test]
fn declares_the_api() {
    let h = header();
    assert!(h.starts_with("#ifndef DUALRIS_H"));
    for needle in [
        "typedef struct DrisEnv DrisEnv;",
        "DRIS_STATUS_OK = 0,",
        "DRIS_STATUS_BUFFER_TOO_SMALL = 8,",
        "enum DrisStatus dris_env_new(const char *config_json, struct DrisEnv **out);",
        "void dris_env_free(struct DrisEnv *env);",
        "size_t dris_env_obs_len(const struct DrisEnv *env);",
        "enum DrisStatus dris_env_reset(struct DrisEnv *env, uint64_t seed, double *obs_out, size_t obs_cap);",
        "size_t dris_last_error_message(char *buf, size_t cap);",
    ] {
        assert!(h.contains(needle), "missing `{needle}`");
    }
}

#[test]
fn compiles_as_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"dualris.h\"\nint main(void) { DrisEnv *e = 0; DrisStepOut o; (void)o; \
         return dris_env_new(0, &e) == DRIS_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("dualris-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
