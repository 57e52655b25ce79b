use std::process::Command;

fn main() {
    let commit = Command::new("git")
        .args(["rev-parse", "--short=12", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into());
    let features = if std::env::var_os("CARGO_FEATURE_PARALLEL").is_some() { "parallel" } else { "sequential" };
    println!("cargo:rustc-env=TABOO_GIT_COMMIT={commit}");
    println!("cargo:rustc-env=TABOO_TARGET={}", std::env::var("TARGET").unwrap_or_default());
    println!("cargo:rustc-env=TABOO_PROFILE={}", std::env::var("PROFILE").unwrap_or_default());
    println!("cargo:rustc-env=TABOO_FEATURES={features}");
    println!("cargo:rerun-if-changed=build.rs");
    println!("cargo:rerun-if-changed=../../.git/HEAD");
}
