use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use psl_polytopes_ffi::*;

fn last_error() -> String {
    let p = psl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn group_handle_lifecycle() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(psl_group_new(19, false, &mut g), PslStatus::Ok);
        assert_eq!(psl_group_order(g), 3420);
        let mut x = u32::MAX;
        assert_eq!(psl_group_mul(g, 0, 5, &mut x), PslStatus::Ok);
        assert_eq!(x, 5);
        assert_eq!(psl_group_element_order(g, 0, &mut x), PslStatus::Ok);
        assert_eq!(x, 1);
        assert_eq!(psl_group_mul(g, 3420, 0, &mut x), PslStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        psl_group_free(g);
        assert_eq!(psl_group_order(ptr::null()), 0);
        psl_group_free(ptr::null_mut());
    }
}

#[test]
fn pgl_handle() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(psl_group_new(11, true, &mut g), PslStatus::Ok);
        assert_eq!(psl_group_order(g), 1320);
        let mut list = ptr::null_mut();
        assert_eq!(psl_search(g, 4, &mut list), PslStatus::InvalidArgument);
        assert!(list.is_null());
        psl_group_free(g);
    }
}

#[test]
fn errors_are_reported() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(psl_group_new(12, false, &mut g), PslStatus::InvalidArgument);
        assert!(last_error().contains("12"));
        assert_eq!(psl_group_new(11, false, ptr::null_mut()), PslStatus::NullPointer);
        let mut x = 0;
        assert_eq!(psl_group_mul(ptr::null(), 0, 0, &mut x), PslStatus::NullPointer);
    }
}

#[test]
fn search_nineteen() {
    let mut g = ptr::null_mut();
    let mut list = ptr::null_mut();
    unsafe {
        assert_eq!(psl_group_new(19, false, &mut g), PslStatus::Ok);
        assert_eq!(psl_search(g, 4, &mut list), PslStatus::Ok);
        assert_eq!(psl_class_list_len(list), 1);
        let mut info = PslClassInfo::default();
        assert_eq!(psl_class_list_get(list, 0, &mut info), PslStatus::Ok);
        assert_eq!(info.schlafli, [5, 3, 5, 0]);
        assert_eq!(info.petrie, [5, 5, 0]);
        assert_eq!(info.f_vector, [57, 171, 171, 57, 0]);
        assert!(info.self_dual);
        assert_eq!(psl_class_list_get(list, 1, &mut info), PslStatus::OutOfRange);
        let mut json = ptr::null_mut();
        assert_eq!(psl_class_list_json(list, &mut json), PslStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        assert!(text.contains("\"f_vector\":[57,171,171,57]"));
        psl_string_free(json);
        psl_class_list_free(list);
        psl_group_free(g);
    }
}

#[test]
fn presentations() {
    let text = CString::new("gens 2; r0^2, r1^2, (r0 r1)^3").unwrap();
    let mut p = ptr::null_mut();
    let mut order = 0;
    unsafe {
        assert_eq!(psl_presentation_parse(text.as_ptr(), &mut p), PslStatus::Ok);
        assert_eq!(psl_group_order_of_presentation(p, 1000, &mut order), PslStatus::Ok);
        assert_eq!(order, 6);
        psl_presentation_free(p);

        let bad = CString::new("gens 2; r0^2,\n r5").unwrap();
        assert_eq!(psl_presentation_parse(bad.as_ptr(), &mut p), PslStatus::ParseError);
        assert!(last_error().contains("r5"));

        // Beyond reach at the default cap.
        let big = CString::new("gens 4; r0^2, r1^2, r2^2, r3^2, (r0 r1)^5, (r1 r2)^3, (r2 r3)^5, (r0 r2)^2, (r0 r3)^2, (r1 r3)^2, (r1 r2 r3)^5").unwrap();
        assert_eq!(psl_presentation_parse(big.as_ptr(), &mut p), PslStatus::Ok);
        assert_eq!(
            psl_group_order_of_presentation(p, 1_000_000, &mut order),
            PslStatus::OverLimit
        );
        psl_presentation_free(p);

        assert_eq!(
            psl_presentation_amalgam(3, 5, 5, 3, 5, 5, &mut p),
            PslStatus::InvalidArgument
        );
    }
}

#[test]
fn census_through_the_boundary() {
    let mut csv = ptr::null_mut();
    let mut ok = false;
    unsafe {
        assert_eq!(psl_census_csv(11, &mut csv, &mut ok), PslStatus::Ok);
        assert!(ok);
        let text = CStr::from_ptr(csv).to_str().unwrap();
        assert!(text.starts_with("q,family,"));
        assert!(text.contains("11,9,,22,22,2,2,true"));
        psl_string_free(csv);
    }
    assert!(unsafe { CStr::from_ptr(psl_version()) }
        .to_str()
        .unwrap()
        .starts_with("0."));
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn staticlib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libpsl_polytopes_ffi.a");
    lib.exists().then_some(lib)
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(manifest_dir().join("include/psl_polytopes.h")).unwrap();
    for name in [
        "psl_group_new",
        "psl_group_free",
        "psl_search",
        "psl_class_list_get",
        "psl_presentation_parse",
        "psl_group_order_of_presentation",
        "psl_census_csv",
        "psl_last_error_message",
        "PSL_STATUS_OVER_LIMIT",
        "typedef struct PslGroup PslGroup;",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

fn compile_c(out: &Path, link: Option<&Path>) -> std::process::Output {
    let mut cmd = Command::new("cc");
    cmd.arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(manifest_dir().join("tests/c/smoke.c"));
    match link {
        Some(lib) => {
            cmd.arg(lib).args(["-lpthread", "-ldl", "-lm", "-o"]).arg(out);
        }
        None => {
            cmd.arg("-fsyntax-only");
        }
    }
    cmd.output().expect("cc runs")
}

#[test]
fn c_program_compiles_and_runs() {
    if !have_cc() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let dir = std::env::temp_dir().join(format!("psl-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let exe = dir.join("smoke");
    let syntax = compile_c(&exe, None);
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));
    let Some(lib) = staticlib() else {
        eprintln!("static library not found next to the test binary; header checked only");
        return;
    };
    let built = compile_c(&exe, Some(&lib));
    assert!(built.status.success(), "{}", String::from_utf8_lossy(&built.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
    let _ = std::fs::remove_dir_all(&dir);
}
