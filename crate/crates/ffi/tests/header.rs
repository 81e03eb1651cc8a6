use std::path::Path;
use std::process::Command;

const PROGRAM: &str = r#"
#include "qstfidlab.h"

int main(void) {
    double re_im[4] = {1.0, 0.0, 0.0, 0.0};
    QstPureState *psi = NULL;
    QstDensityMatrix *rho = NULL;
    QstEstimate est;
    double f = 0.0;
    char *label = NULL;
    double lambda[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
    if (qst_state_new(re_im, 2, &psi) != QST_STATUS_OK) return 1;
    qst_state_to_density(psi, &rho);
    qst_fidelity(psi, rho, &f);
    qst_reduction_factor(QST_REDUCTION_R4B, 0.8, &f);
    qst_mc_fidelity_haar(1, 0.5, 0.0, 100, 1, &est);
    qst_classify_canonical(lambda, 0.0, 1e-9, &label);
    qst_string_free(label);
    qst_density_free(rho);
    qst_state_free(psi);
    return qst_last_error()[0] == '\0' ? 0 : 2;
}
"#;

#[test]
fn header_compiles_as_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("qstfidlab.h").exists(), "build script writes the header");
    let dir = tempfile::tempdir().unwrap();
    let source = dir.path().join("use_header.c");
    std::fs::write(&source, PROGRAM).unwrap();
    let status = match Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&source)
        .status()
    {
        Ok(s) => s,
        Err(_) => {
            eprintln!("no C compiler on PATH, skipping");
            return;
        }
    };
    assert!(status.success());
}
