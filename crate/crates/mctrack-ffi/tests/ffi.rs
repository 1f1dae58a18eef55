//! Exercises the C entry points the way a foreign caller would: opaque
//! config handle, C strings, status codes, and the per-thread error message.

use mctrack_ffi::*;
use std::ffi::CString;
use std::path::Path;

fn c(path: &Path) -> CString {
    CString::new(path.to_str().unwrap()).unwrap()
}

#[test]
fn synth_track_evaluate_through_the_c_abi() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    unsafe {
        let config = mct_config_new();
        assert_eq!(mct_config_set_seed(config, 42), MctStatus::Ok);
        assert_eq!(mct_config_set_eta(config, 1500), MctStatus::Ok);

        let tracklets = c(&d.join("t.txt"));
        let topology = c(&d.join("topo.json"));
        let gt = c(&d.join("gt.txt"));
        assert_eq!(
            mct_synth(
                config,
                3,
                4,
                0.3,
                0.25,
                tracklets.as_ptr(),
                topology.as_ptr(),
                gt.as_ptr(),
            ),
            MctStatus::Ok
        );

        let trajectories = c(&d.join("traj.txt"));
        let hypotheses = c(&d.join("hyp.txt"));
        assert_eq!(
            mct_track(
                config,
                tracklets.as_ptr(),
                topology.as_ptr(),
                trajectories.as_ptr(),
                hypotheses.as_ptr(),
            ),
            MctStatus::Ok
        );
        assert!(d.join("traj.txt").exists());

        let report = c(&d.join("report.txt"));
        let mut mcta = 0.0f64;
        assert_eq!(
            mct_evaluate(
                config,
                gt.as_ptr(),
                hypotheses.as_ptr(),
                0,
                report.as_ptr(),
                &mut mcta,
            ),
            MctStatus::Ok
        );
        assert!(mcta > 0.0 && mcta <= 1.0, "mcta = {mcta}");
        let text = std::fs::read_to_string(d.join("report.txt")).unwrap();
        assert!(text.contains("mme_s 0\n"), "{text}");

        mct_config_free(config);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let config = mct_config_new();
        let missing = CString::new("/nonexistent/input.txt").unwrap();
        let topo = CString::new("/nonexistent/topo.json").unwrap();
        let out = CString::new("/tmp/never.txt").unwrap();
        let status = mct_track(
            config,
            missing.as_ptr(),
            topo.as_ptr(),
            out.as_ptr(),
            std::ptr::null(),
        );
        assert_eq!(status, MctStatus::Io);

        let needed = mct_last_error_message(std::ptr::null_mut(), 0);
        assert!(needed > 0);
        let mut buf = vec![0 as std::ffi::c_char; needed + 1];
        let copied = mct_last_error_message(buf.as_mut_ptr(), buf.len());
        assert_eq!(copied, needed);
        let message = std::ffi::CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert!(!message.is_empty());

        mct_config_free(config);
    }
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        assert_eq!(
            mct_track(
                std::ptr::null(),
                std::ptr::null(),
                std::ptr::null(),
                std::ptr::null(),
                std::ptr::null(),
            ),
            MctStatus::NullArgument
        );
        let config = mct_config_new();
        assert_eq!(
            mct_config_set_eta(std::ptr::null_mut(), 1),
            MctStatus::NullArgument
        );
        mct_config_free(config);
        mct_config_free(std::ptr::null_mut()); // tolerated
    }
}

#[test]
fn generated_header_covers_the_surface() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mctrack.h");
    let text = std::fs::read_to_string(header).expect("header generated at build time");
    for symbol in [
        "mct_config_new",
        "mct_config_free",
        "mct_config_set_eta",
        "mct_track",
        "mct_evaluate",
        "mct_synth",
        "mct_last_error_message",
        "MctStatus",
        "MctConfig",
    ] {
        assert!(text.contains(symbol), "header missing {symbol}");
    }
}
