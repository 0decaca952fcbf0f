//! C interface to `entqfi`.
//!
//! Every fallible function returns an [`EntqfiStatus`]. Each call clears the
//! calling thread's error message and a failing call sets it; read it with
//! [`entqfi_last_error_message`]. States are opaque [`EntqfiState`] handles
//! created by the `entqfi_state_*` constructors and released with
//! [`entqfi_state_free`]. Matrices cross the boundary as separate real and
//! imaginary arrays in row-major order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use entqfi::experiment::{run_experiment, write_outputs, ExperimentConfig};
use entqfi::locc::{optimize_with_steps, GridStep};
use entqfi::measures::{concurrence, is_separable, negativity, ree, ReeSolverConfig};
use entqfi::ordering::OrderingTolerances;
use entqfi::qcore::{ComplexMatrix, DensityMatrix, C64};
use entqfi::qfi::max_mean_qfi;
use entqfi::randgen::{derive_stream, ensemble_state};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntqfiStatus {
    Ok = 0,
    NullPointer = 1,
    /// A parameter is out of range or a configuration is inconsistent.
    InvalidArgument = 2,
    /// The matrix is not a valid density matrix.
    InvalidState = 3,
    /// An eigensolver failed to converge.
    Numerical = 4,
    Io = 5,
    /// A bug inside the library; the message has details.
    Panic = 6,
}

/// A two-qubit density matrix.
pub struct EntqfiState {
    rho: DensityMatrix,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EntqfiLoccOptimum {
    pub max_value: f64,
    /// `(α_A, β_A, γ_A, α_B, β_B, γ_B)`.
    pub max_angles: [f64; 6],
    pub min_value: f64,
    pub min_angles: [f64; 6],
    pub raw_value: f64,
    pub step_used: f64,
    pub refined: bool,
    pub evaluations: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntqfiExperimentConfig {
    pub count: usize,
    pub master_seed: u64,
    pub grid_divisor: usize,
    pub refine_divisor: usize,
    pub eps_concurrence: f64,
    pub eps_negativity: f64,
    pub eps_ree: f64,
    pub eps_mqfi: f64,
    pub ree_components: usize,
    pub ree_multistarts: usize,
    pub ree_max_sweeps: usize,
    pub ree_threshold: f64,
    pub witness_limit: usize,
}

impl From<&ExperimentConfig> for EntqfiExperimentConfig {
    fn from(c: &ExperimentConfig) -> Self {
        Self {
            count: c.count,
            master_seed: c.master_seed,
            grid_divisor: c.grid_divisor,
            refine_divisor: c.refine_divisor,
            eps_concurrence: c.tolerances.concurrence,
            eps_negativity: c.tolerances.negativity,
            eps_ree: c.tolerances.ree,
            eps_mqfi: c.tolerances.mqfi,
            ree_components: c.ree.components,
            ree_multistarts: c.ree.multistarts,
            ree_max_sweeps: c.ree.max_sweeps,
            ree_threshold: c.ree.threshold,
            witness_limit: c.witness_limit,
        }
    }
}

impl EntqfiExperimentConfig {
    fn to_config(self, out_dir: PathBuf) -> ExperimentConfig {
        ExperimentConfig {
            count: self.count,
            master_seed: self.master_seed,
            grid_divisor: self.grid_divisor,
            refine_divisor: self.refine_divisor,
            tolerances: OrderingTolerances {
                concurrence: self.eps_concurrence,
                negativity: self.eps_negativity,
                ree: self.eps_ree,
                mqfi: self.eps_mqfi,
            },
            ree: ReeSolverConfig {
                components: self.ree_components,
                multistarts: self.ree_multistarts,
                max_sweeps: self.ree_max_sweeps,
                threshold: self.ree_threshold,
                ..ReeSolverConfig::default()
            },
            witness_limit: self.witness_limit,
            out_dir,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(EntqfiStatus, String);

impl From<entqfi::Error> for Failure {
    fn from(e: entqfi::Error) -> Self {
        use entqfi::Error as E;
        let status = match &e {
            E::InvalidMatrix(_) | E::InvalidState(_) => EntqfiStatus::InvalidState,
            E::NotUnitary { .. } | E::Config(_) => EntqfiStatus::InvalidArgument,
            E::EigenNonConvergence { .. } => EntqfiStatus::Numerical,
            E::Io { .. } | E::Csv { .. } => EntqfiStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EntqfiStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(EntqfiStatus::InvalidArgument, msg.into())
}

/// Runs `f`, records any failure or panic, and returns its status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EntqfiStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EntqfiStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            EntqfiStatus::Panic
        }
    }
}

unsafe fn state_ref<'a>(state: *const EntqfiState) -> Result<&'a DensityMatrix, Failure> {
    state.as_ref().map(|s| &s.rho).ok_or_else(|| null("state"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Reads `n` complex numbers; a null `im` means all imaginary parts are zero.
unsafe fn read_complex(re: *const f64, im: *const f64, n: usize) -> Result<Vec<C64>, Failure> {
    if re.is_null() {
        return Err(null("re"));
    }
    let re = std::slice::from_raw_parts(re, n);
    let out = if im.is_null() {
        re.iter().map(|&r| C64::new(r, 0.0)).collect()
    } else {
        let im = std::slice::from_raw_parts(im, n);
        re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect()
    };
    Ok(out)
}

unsafe fn emit_state(out: *mut *mut EntqfiState, rho: DensityMatrix) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(EntqfiState { rho })));
    Ok(())
}

/// Message describing the last failure on this thread, or null if the most
/// recent call succeeded. Valid until the next call into this library on
/// the same thread.
#[no_mangle]
pub extern "C" fn entqfi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn entqfi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a state from a 4×4 matrix.
///
/// # Safety
/// `re` must point to 16 doubles; `im` must be null or point to 16 doubles;
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn entqfi_state_new(
    re: *const f64,
    im: *const f64,
    out: *mut *mut EntqfiState,
) -> EntqfiStatus {
    guard(|| {
        let data = read_complex(re, im, 16)?;
        let rho = DensityMatrix::new(ComplexMatrix::new(4, 4, data)?)?;
        emit_state(out, rho)
    })
}

/// Builds the projector onto a pure state with 4 amplitudes.
///
/// # Safety
/// `re` must point to 4 doubles; `im` must be null or point to 4 doubles;
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn entqfi_state_pure(
    re: *const f64,
    im: *const f64,
    out: *mut *mut EntqfiState,
) -> EntqfiStatus {
    guard(|| {
        let psi = read_complex(re, im, 4)?;
        emit_state(out, DensityMatrix::pure(&psi)?)
    })
}

/// State `index` of the random ensemble with `seed`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn entqfi_state_random(
    seed: u64,
    index: usize,
    out: *mut *mut EntqfiState,
) -> EntqfiStatus {
    guard(|| emit_state(out, ensemble_state(seed, index).0))
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entqfi_state_free(state: *mut EntqfiState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Copies the matrix out in row-major order.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must each have room for 16
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn entqfi_state_matrix(
    state: *const EntqfiState,
    re: *mut f64,
    im: *mut f64,
) -> EntqfiStatus {
    guard(|| {
        let rho = state_ref(state)?;
        if re.is_null() || im.is_null() {
            return Err(null("output array"));
        }
        for (k, z) in rho.matrix().entries().iter().enumerate() {
            re.add(k).write(z.re);
            im.add(k).write(z.im);
        }
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn entqfi_concurrence(
    state: *const EntqfiState,
    out: *mut f64,
) -> EntqfiStatus {
    guard(|| write_out(out, concurrence(state_ref(state)?), "out"))
}

/// # Safety
/// `state` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn entqfi_negativity(
    state: *const EntqfiState,
    out: *mut f64,
) -> EntqfiStatus {
    guard(|| write_out(out, negativity(state_ref(state)?), "out"))
}

/// Positive-partial-transpose test, exact for two qubits.
///
/// # Safety
/// `state` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn entqfi_is_separable(
    state: *const EntqfiState,
    out: *mut bool,
) -> EntqfiStatus {
    guard(|| write_out(out, is_separable(state_ref(state)?), "out"))
}

/// Relative entropy of entanglement in bits, with the default solver
/// settings and random starts drawn from `seed`.
///
/// # Safety
/// `state` must be a live handle, `out_value` valid for a write, and
/// `out_converged` null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn entqfi_ree(
    state: *const EntqfiState,
    seed: u64,
    out_value: *mut f64,
    out_converged: *mut bool,
) -> EntqfiStatus {
    guard(|| {
        let rho = state_ref(state)?;
        if out_value.is_null() {
            return Err(null("out_value"));
        }
        let sol = ree(
            rho,
            &ReeSolverConfig::default(),
            &mut derive_stream(seed, 0),
        );
        out_value.write(sol.value);
        if !out_converged.is_null() {
            out_converged.write(sol.converged);
        }
        Ok(())
    })
}

/// Mean QFI per particle maximized over spin directions, and the maximizing
/// direction.
///
/// # Safety
/// `state` must be a live handle, `out_value` valid for a write, and
/// `out_direction` null or valid for 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn entqfi_max_mean_qfi(
    state: *const EntqfiState,
    out_value: *mut f64,
    out_direction: *mut f64,
) -> EntqfiStatus {
    guard(|| {
        let res = max_mean_qfi(state_ref(state)?);
        write_out(out_value, res.mean_qfi, "out_value")?;
        if !out_direction.is_null() {
            for (k, x) in res.optimal_direction.as_array().into_iter().enumerate() {
                out_direction.add(k).write(x);
            }
        }
        Ok(())
    })
}

/// Grid search over local rotations with spacing `2π/grid_divisor`, repeated
/// at `2π/refine_divisor` when the first pass leaves either extreme at the
/// raw value.
///
/// # Safety
/// `state` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn entqfi_locc_optimize(
    state: *const EntqfiState,
    grid_divisor: usize,
    refine_divisor: usize,
    out: *mut EntqfiLoccOptimum,
) -> EntqfiStatus {
    guard(|| {
        let rho = state_ref(state)?;
        if refine_divisor <= grid_divisor {
            return Err(invalid(format!(
                "refine divisor {refine_divisor} must exceed grid divisor {grid_divisor}"
            )));
        }
        let opt = optimize_with_steps(
            rho,
            GridStep::from_divisor(grid_divisor)?,
            GridStep::from_divisor(refine_divisor)?,
        );
        let result = EntqfiLoccOptimum {
            max_value: opt.max_value,
            max_angles: opt.max_angles.as_array(),
            min_value: opt.min_value,
            min_angles: opt.min_angles.as_array(),
            raw_value: opt.raw_value,
            step_used: opt.step_used,
            refined: opt.refined,
            evaluations: opt.evaluations,
        };
        write_out(out, result, "out")
    })
}

/// The default experiment settings.
#[no_mangle]
pub extern "C" fn entqfi_experiment_config_default() -> EntqfiExperimentConfig {
    EntqfiExperimentConfig::from(&ExperimentConfig::default())
}

/// Runs the full experiment and writes all result files into `out_dir`.
///
/// # Safety
/// `config` must point to a config and `out_dir` to a NUL-terminated UTF-8
/// path.
#[no_mangle]
pub unsafe extern "C" fn entqfi_run_experiment(
    config: *const EntqfiExperimentConfig,
    out_dir: *const c_char,
) -> EntqfiStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        if out_dir.is_null() {
            return Err(null("out_dir"));
        }
        let dir = CStr::from_ptr(out_dir)
            .to_str()
            .map_err(|_| invalid("out_dir is not valid UTF-8"))?;
        let cfg = cfg.to_config(PathBuf::from(dir));
        let result = run_experiment(&cfg)?;
        write_outputs(&result, &cfg.out_dir)?;
        Ok(())
    })
}
