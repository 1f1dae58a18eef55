//! C ABI for the mctrack pipeline.
//!
//! The surface is file-based: callers prepare input files, invoke one of the
//! three entry points, and read the output files back. Configuration lives
//! behind an opaque handle with one setter per field. All functions return a
//! status code; the last failure's message is retrievable per thread.

use mctrack::evaluate::{evaluate, MatchMode};
use mctrack::io::{
    expand_hypotheses, read_annotations, read_topology, read_tracklets, render_report,
    write_annotations, write_topology, write_tracklets, write_trajectories, IoError, RunConfig,
};
use mctrack::pipeline::{track, PipelineError};
use mctrack::synth::{synth_scenario, SynthConfig};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::path::PathBuf;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MctStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Validate = 5,
    Pipeline = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: MctStatus, message: impl Into<String>) -> MctStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
    status
}

fn io_status(e: &IoError) -> MctStatus {
    match e {
        IoError::Io(_) => MctStatus::Io,
        IoError::Json(_) | IoError::Parse { .. } => MctStatus::Parse,
        IoError::Model(_) | IoError::Appearance(_) => MctStatus::Validate,
    }
}

fn pipeline_status(e: &PipelineError) -> MctStatus {
    match e {
        PipelineError::Model(_) => MctStatus::Validate,
        _ => MctStatus::Pipeline,
    }
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len` bytes). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn mct_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let message = e.borrow();
        let bytes = message.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Opaque run configuration.
pub struct MctConfig {
    inner: RunConfig,
}

/// Allocate a configuration with default values. Free with `mct_config_free`.
#[no_mangle]
pub extern "C" fn mct_config_new() -> *mut MctConfig {
    Box::into_raw(Box::new(MctConfig {
        inner: RunConfig::default(),
    }))
}

/// # Safety
/// `config` must come from `mct_config_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mct_config_free(config: *mut MctConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

unsafe fn with_config(
    config: *mut MctConfig,
    set: impl FnOnce(&mut RunConfig),
) -> MctStatus {
    match config.as_mut() {
        Some(c) => {
            set(&mut c.inner);
            MctStatus::Ok
        }
        None => fail(MctStatus::NullArgument, "null config"),
    }
}

/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_eta(config: *mut MctConfig, value: i64) -> MctStatus {
    with_config(config, |c| c.eta = value)
}

/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_epsilon(config: *mut MctConfig, value: f64) -> MctStatus {
    with_config(config, |c| c.epsilon = value)
}

/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_k1(config: *mut MctConfig, value: f64) -> MctStatus {
    with_config(config, |c| c.k1 = value)
}

/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_k2(config: *mut MctConfig, value: f64) -> MctStatus {
    with_config(config, |c| c.k2 = value)
}

/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_lambda(config: *mut MctConfig, value: f64) -> MctStatus {
    with_config(config, |c| c.lambda = value)
}

/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_gamma(config: *mut MctConfig, value: u64) -> MctStatus {
    with_config(config, |c| c.gamma = value as usize)
}

/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_iou_threshold(
    config: *mut MctConfig,
    value: f64,
) -> MctStatus {
    with_config(config, |c| c.iou_threshold = value)
}

/// Nonzero enables the same-camera similarity compensation.
///
/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_equalize(config: *mut MctConfig, value: i32) -> MctStatus {
    with_config(config, |c| c.equalize = value != 0)
}

/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_p_min(config: *mut MctConfig, value: f64) -> MctStatus {
    with_config(config, |c| c.p_min = value)
}

/// # Safety
/// `config` must be a live handle from `mct_config_new`.
#[no_mangle]
pub unsafe extern "C" fn mct_config_set_seed(config: *mut MctConfig, value: u64) -> MctStatus {
    with_config(config, |c| c.seed = value)
}

unsafe fn path_arg(ptr: *const c_char, name: &str) -> Result<PathBuf, MctStatus> {
    if ptr.is_null() {
        return Err(fail(MctStatus::NullArgument, format!("null {name}")));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => Err(fail(
            MctStatus::InvalidUtf8,
            format!("{name} is not valid UTF-8"),
        )),
    }
}

unsafe fn config_arg<'a>(ptr: *const MctConfig) -> Result<&'a RunConfig, MctStatus> {
    match ptr.as_ref() {
        Some(c) => Ok(&c.inner),
        None => Err(fail(MctStatus::NullArgument, "null config")),
    }
}

/// Associate tracklets into global trajectories. `out_hypotheses` may be null
/// to skip the per-frame expansion file.
///
/// # Safety
/// All non-null pointers must be valid NUL-terminated strings; `config` must
/// be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mct_track(
    config: *const MctConfig,
    tracklets_path: *const c_char,
    topology_path: *const c_char,
    out_trajectories: *const c_char,
    out_hypotheses: *const c_char,
) -> MctStatus {
    let run = || -> Result<MctStatus, MctStatus> {
        let config = config_arg(config)?;
        let tracklets_path = path_arg(tracklets_path, "tracklets path")?;
        let topology_path = path_arg(topology_path, "topology path")?;
        let out_path = path_arg(out_trajectories, "output trajectory path")?;
        let tracklets = read_tracklets(&tracklets_path)
            .map_err(|e| fail(io_status(&e), e.to_string()))?;
        let topology =
            read_topology(&topology_path).map_err(|e| fail(io_status(&e), e.to_string()))?;
        let out = track(tracklets, topology, config)
            .map_err(|e| fail(pipeline_status(&e), e.to_string()))?;
        write_trajectories(&out.result, &out.tracklets, &out_path)
            .map_err(|e| fail(io_status(&e), e.to_string()))?;
        if !out_hypotheses.is_null() {
            let hyp_path = path_arg(out_hypotheses, "output hypothesis path")?;
            write_annotations(&expand_hypotheses(&out.result, &out.tracklets), &hyp_path)
                .map_err(|e| fail(io_status(&e), e.to_string()))?;
        }
        Ok(MctStatus::Ok)
    };
    run().unwrap_or_else(|status| status)
}

/// Score a hypothesis file against ground truth; writes the report file and,
/// when `mcta_out` is non-null, stores the MCTA value there.
///
/// # Safety
/// Pointer arguments as in `mct_track`; `mcta_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn mct_evaluate(
    config: *const MctConfig,
    gt_path: *const c_char,
    hyp_path: *const c_char,
    identity_match: i32,
    out_report: *const c_char,
    mcta_out: *mut f64,
) -> MctStatus {
    let run = || -> Result<MctStatus, MctStatus> {
        let config = config_arg(config)?;
        let gt_path = path_arg(gt_path, "ground truth path")?;
        let hyp_path = path_arg(hyp_path, "hypothesis path")?;
        let report_path = path_arg(out_report, "report path")?;
        let gt = read_annotations(&gt_path).map_err(|e| fail(io_status(&e), e.to_string()))?;
        let hyp = read_annotations(&hyp_path).map_err(|e| fail(io_status(&e), e.to_string()))?;
        let mode = if identity_match != 0 {
            MatchMode::Identity
        } else {
            MatchMode::Iou(config.iou_threshold)
        };
        let report = evaluate(&gt, &hyp, mode, config.eta);
        std::fs::write(&report_path, render_report(&report, None))
            .map_err(|e| fail(MctStatus::Io, e.to_string()))?;
        if !mcta_out.is_null() {
            *mcta_out = report.mcta;
        }
        Ok(MctStatus::Ok)
    };
    run().unwrap_or_else(|status| status)
}

/// Generate a deterministic synthetic scenario from the configured seed.
///
/// # Safety
/// Pointer arguments as in `mct_track`.
#[no_mangle]
pub unsafe extern "C" fn mct_synth(
    config: *const MctConfig,
    n_cameras: u32,
    n_targets: u32,
    fragmentation: f64,
    appearance_shift: f64,
    out_tracklets: *const c_char,
    out_topology: *const c_char,
    out_gt: *const c_char,
) -> MctStatus {
    let run = || -> Result<MctStatus, MctStatus> {
        let config = config_arg(config)?;
        let tracklets_path = path_arg(out_tracklets, "tracklet output path")?;
        let topology_path = path_arg(out_topology, "topology output path")?;
        let gt_path = path_arg(out_gt, "ground truth output path")?;
        let scenario = synth_scenario(&SynthConfig {
            seed: config.seed,
            n_cameras,
            n_targets,
            fragmentation,
            appearance_shift,
        });
        write_tracklets(&scenario.tracklets, &tracklets_path)
            .map_err(|e| fail(io_status(&e), e.to_string()))?;
        write_topology(&scenario.topology, &topology_path)
            .map_err(|e| fail(io_status(&e), e.to_string()))?;
        write_annotations(&scenario.ground_truth, &gt_path)
            .map_err(|e| fail(io_status(&e), e.to_string()))?;
        Ok(MctStatus::Ok)
    };
    run().unwrap_or_else(|status| status)
}
