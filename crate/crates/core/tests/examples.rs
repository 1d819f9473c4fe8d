#[allow(dead_code)]
#[path = "../examples/series_expansion.rs"]
mod series_expansion;
#[allow(dead_code)]
#[path = "../examples/lefschetz_index.rs"]
mod lefschetz_index;
#[allow(dead_code)]
#[path = "../examples/circle_supertrace.rs"]
mod circle_supertrace;
#[allow(dead_code)]
#[path = "../examples/localization.rs"]
mod localization;
#[allow(dead_code)]
#[path = "../examples/mehler_kernel.rs"]
mod mehler_kernel;
#[allow(dead_code)]
#[path = "../examples/jlo_torus.rs"]
mod jlo_torus;

#[test]
fn series_expansion_runs() {
    series_expansion::run_example().unwrap();
}

#[test]
fn lefschetz_index_runs() {
    lefschetz_index::run_example().unwrap();
}

#[test]
fn circle_supertrace_runs() {
    circle_supertrace::run_example().unwrap();
}

#[test]
fn localization_runs() {
    localization::run_example().unwrap();
}

#[test]
fn mehler_kernel_runs() {
    mehler_kernel::run_example().unwrap();
}

#[test]
fn jlo_torus_runs() {
    jlo_torus::run_example().unwrap();
}
