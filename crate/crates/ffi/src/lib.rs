//! C ABI for manifold-gp.
//!
//! Conventions:
//!
//! - Objects are opaque handles created by `mgp_*_new`/`load`/`parse`/`run`
//!   functions and released with the matching `mgp_*_free`. Passing NULL to a
//!   free function is a no-op.
//! - Fallible functions return an [`MgpStatus`] and write results through out
//!   pointers. On failure [`mgp_last_error`] describes the problem; the message
//!   is per thread and valid until the next failing call on that thread.
//! - Strings returned to the caller are released with [`mgp_string_free`].
//! - Panics never cross the boundary; they are reported as
//!   [`MgpStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use manifold_gp::complexity::individual_complexity;
use manifold_gp::config::RunConfig;
use manifold_gp::dataset::{Dataset, DatasetOptions};
use manifold_gp::evolution::{self, FrontEntry};
use manifold_gp::{manifold_cost, Error, Individual, Matrix};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MgpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidData = 5,
    Config = 6,
    OutOfRange = 7,
    BufferTooSmall = 8,
    Runtime = 9,
    Panic = 10,
}

/// A normalised dataset with its neighbour ordering.
pub struct MgpDataset(Dataset);

/// A multi-tree individual.
pub struct MgpIndividual(Individual);

/// The outcome of an evolutionary run: the archive, ascending complexity.
pub struct MgpRun {
    front: Vec<FrontEntry>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(error: &Error) -> MgpStatus {
    match error {
        Error::Io { .. } | Error::Csv { .. } => MgpStatus::Io,
        Error::Parse { .. } => MgpStatus::Parse,
        Error::FeatureOutOfRange { .. } => MgpStatus::OutOfRange,
        Error::Config(_) | Error::InvalidArgument(_) | Error::UnassignedOperator(_) => MgpStatus::Config,
        Error::BadCell { .. }
        | Error::NonFinite { .. }
        | Error::DuplicateColumn(_)
        | Error::MissingLabelColumn(_)
        | Error::TooSmall { .. }
        | Error::MissingLabels
        | Error::LengthMismatch(..) => MgpStatus::InvalidData,
        #[allow(unreachable_patterns)]
        _ => MgpStatus::Runtime,
    }
}

struct Fail(MgpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> MgpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MgpStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_owned());
            set_error(format!("panic: {message}"));
            MgpStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(MgpStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(MgpStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message for the most recent failure on this thread; empty if none. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn mgp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn mgp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mgp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Datasets

/// Loads a CSV file. `label_col` may be NULL for unlabelled data;
/// `max_neighbours` of 0 keeps the full neighbour ordering.
///
/// # Safety
/// `path` and a non-NULL `label_col` must be NUL-terminated strings; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mgp_dataset_load(
    path: *const c_char,
    label_col: *const c_char,
    max_neighbours: usize,
    out: *mut *mut MgpDataset,
) -> MgpStatus {
    guard(|| {
        let path = PathBuf::from(as_str(path, "path")?);
        let label = if label_col.is_null() {
            None
        } else {
            Some(as_str(label_col, "label_col")?)
        };
        let opts = DatasetOptions {
            max_neighbours: (max_neighbours > 0).then_some(max_neighbours),
        };
        let ds = Dataset::load_csv(path, label, &opts)?;
        write_out(out, Box::into_raw(Box::new(MgpDataset(ds))))
    })
}

/// Builds an unlabelled dataset from a row-major `rows x cols` array.
///
/// # Safety
/// `values` must point to `rows * cols` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mgp_dataset_from_array(
    values: *const f64,
    rows: usize,
    cols: usize,
    out: *mut *mut MgpDataset,
) -> MgpStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail(MgpStatus::InvalidData, "rows * cols overflows".into()))?;
        let data = std::slice::from_raw_parts(values, len).to_vec();
        let raw = Matrix::from_vec(rows, cols, data);
        let names = (0..cols).map(|j| format!("f{j}")).collect();
        let ds = Dataset::new(raw, names, None, &DatasetOptions::default())?;
        write_out(out, Box::into_raw(Box::new(MgpDataset(ds))))
    })
}

/// # Safety
/// `ds` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mgp_dataset_free(ds: *mut MgpDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of instances, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mgp_dataset_n_instances(ds: *const MgpDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.n_instances())
}

/// Number of features, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mgp_dataset_n_features(ds: *const MgpDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.n_features())
}

// ---------------------------------------------------------------------------
// Individuals

/// Parses one s-expression per line, e.g. `"(add f0 f1)\n(sigmoid f2)"`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mgp_individual_parse(text: *const c_char, out: *mut *mut MgpIndividual) -> MgpStatus {
    guard(|| {
        let ind = Individual::parse(as_str(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(MgpIndividual(ind))))
    })
}

/// # Safety
/// `ind` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mgp_individual_free(ind: *mut MgpIndividual) {
    if !ind.is_null() {
        drop(Box::from_raw(ind));
    }
}

/// Number of trees (embedding dimensions), or 0 for NULL.
///
/// # Safety
/// `ind` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mgp_individual_n_trees(ind: *const MgpIndividual) -> usize {
    ind.as_ref().map_or(0, |i| i.0.trees.len())
}

/// The trees as newline-separated s-expressions; free with
/// [`mgp_string_free`]. Returns NULL for a NULL handle.
///
/// # Safety
/// `ind` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mgp_individual_to_sexpr(ind: *const MgpIndividual) -> *mut c_char {
    match ind.as_ref() {
        Some(i) => CString::new(i.0.to_sexprs()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// Structural complexity under the default cost model.
///
/// # Safety
/// `ind` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mgp_individual_complexity(ind: *const MgpIndividual, out: *mut f64) -> MgpStatus {
    guard(|| {
        let ind = as_ref(ind, "individual")?;
        let value = individual_complexity(&ind.0, &Default::default())?;
        write_out(out, value)
    })
}

fn checked<'a>(ind: &'a MgpIndividual, ds: &MgpDataset) -> Result<&'a Individual, Fail> {
    ind.0.check_features(ds.0.n_features())?;
    Ok(&ind.0)
}

/// Neighbourhood-preservation cost of the individual on the dataset.
///
/// # Safety
/// `ind` and `ds` must be live handles and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mgp_individual_cost(
    ind: *const MgpIndividual,
    ds: *const MgpDataset,
    out: *mut f64,
) -> MgpStatus {
    guard(|| {
        let ds = as_ref(ds, "dataset")?;
        let ind = checked(as_ref(ind, "individual")?, ds)?;
        write_out(out, manifold_cost::cost(ind, &ds.0))
    })
}

/// Writes the embedding row-major into `buf` (`n_instances * n_trees`
/// doubles). Fails with `BufferTooSmall` when `len` is short.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mgp_individual_embed(
    ind: *const MgpIndividual,
    ds: *const MgpDataset,
    buf: *mut f64,
    len: usize,
) -> MgpStatus {
    guard(|| {
        let ds = as_ref(ds, "dataset")?;
        let ind = checked(as_ref(ind, "individual")?, ds)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let emb = ind.embed(&ds.0);
        let values = emb.as_slice();
        if len < values.len() {
            return Err(Fail(
                MgpStatus::BufferTooSmall,
                format!("buffer holds {len} values, embedding needs {}", values.len()),
            ));
        }
        std::slice::from_raw_parts_mut(buf, values.len()).copy_from_slice(values);
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Runs

/// Evolves embeddings for `ds`. `config_toml` may be NULL for defaults or hold
/// dotted keys such as `evo.generations = 50`; `data.*` and `run.out` keys
/// are accepted but unused.
///
/// # Safety
/// `ds` must be a live handle, `config_toml` NULL or NUL-terminated, and
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mgp_run(
    ds: *const MgpDataset,
    config_toml: *const c_char,
    out: *mut *mut MgpRun,
) -> MgpStatus {
    guard(|| {
        let ds = as_ref(ds, "dataset")?;
        let mut config = RunConfig::default();
        if !config_toml.is_null() {
            config.apply_toml(as_str(config_toml, "config_toml")?)?;
        }
        config.validate()?;
        let result = evolution::run(&ds.0, &config.evo, &config.cost)?;
        let front = result.archive.sorted().into_iter().cloned().collect();
        write_out(out, Box::into_raw(Box::new(MgpRun { front })))
    })
}

/// # Safety
/// `run` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mgp_run_free(run: *mut MgpRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of front entries, or 0 for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mgp_run_front_len(run: *const MgpRun) -> usize {
    run.as_ref().map_or(0, |r| r.front.len())
}

unsafe fn entry<'a>(run: *const MgpRun, index: usize) -> Result<&'a FrontEntry, Fail> {
    let run = as_ref(run, "run")?;
    run.front.get(index).ok_or_else(|| {
        Fail(
            MgpStatus::OutOfRange,
            format!("front index {index} out of range ({} entries)", run.front.len()),
        )
    })
}

/// Objectives of front entry `index` (entries ascend in complexity).
///
/// # Safety
/// `run` must be a live handle; `cost` and `complexity` valid.
#[no_mangle]
pub unsafe extern "C" fn mgp_run_front_objectives(
    run: *const MgpRun,
    index: usize,
    cost: *mut f64,
    complexity: *mut f64,
) -> MgpStatus {
    guard(|| {
        let e = entry(run, index)?;
        if cost.is_null() || complexity.is_null() {
            return Err(null("output pointer"));
        }
        cost.write(e.cost());
        complexity.write(e.complexity());
        Ok(())
    })
}

/// Copies front entry `index` into a new individual handle.
///
/// # Safety
/// `run` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mgp_run_front_individual(
    run: *const MgpRun,
    index: usize,
    out: *mut *mut MgpIndividual,
) -> MgpStatus {
    guard(|| {
        let e = entry(run, index)?;
        write_out(out, Box::into_raw(Box::new(MgpIndividual(e.individual.clone()))))
    })
}
