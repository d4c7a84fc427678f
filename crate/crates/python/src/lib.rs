use std::fs::File;
use std::io::BufReader;

use cclm::analysis;
use cclm::report::{self, ReportConfig, Sequence};
use cclm::synth::{self, Ar1Params};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn err(e: cclm::Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn method(name: &str) -> PyResult<cclm::DerivationMethod> {
    name.parse().map_err(err)
}

fn mode(name: &str) -> PyResult<cclm::PredictionMode> {
    name.parse().map_err(err)
}

fn component(name: &str) -> PyResult<cclm::ChromaComponent> {
    match name.to_ascii_lowercase().as_str() {
        "cb" | "u" => Ok(cclm::ChromaComponent::Cb),
        "cr" | "v" => Ok(cclm::ChromaComponent::Cr),
        _ => Err(PyValueError::new_err(format!(
            "unknown chroma component {name:?}"
        ))),
    }
}

fn refset(
    mode_name: &str,
    above: Vec<(u16, u16)>,
    left: Vec<(u16, u16)>,
) -> PyResult<cclm::RefSet> {
    Ok(cclm::RefSet::from_pairs(mode(mode_name)?, &above, &left))
}

type PairLists = (Vec<(u16, u16)>, Vec<(u16, u16)>);

fn split(refs: &cclm::RefSet) -> PairLists {
    let f = |v: &[cclm::RefPair]| v.iter().map(|p| (p.luma, p.chroma)).collect();
    (f(&refs.above), f(&refs.left))
}

/// Chroma = alpha * luma + beta, real and fixed point.
#[pyclass(name = "LinearModel", module = "cclm_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLinearModel(cclm::LinearModel);

#[pymethods]
impl PyLinearModel {
    #[new]
    fn new(alpha: f64, beta: f64) -> Self {
        Self(cclm::LinearModel::from_params(alpha, beta))
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha_f
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta_f
    }

    #[getter]
    fn alpha_fx(&self) -> i64 {
        self.0.alpha_fx
    }

    #[getter]
    fn alpha_shift(&self) -> u32 {
        self.0.alpha_shift
    }

    #[getter]
    fn beta_fx(&self) -> i64 {
        self.0.beta_fx
    }

    fn predict_fixed(&self, s: i64) -> i64 {
        self.0.predict_fixed(s)
    }

    fn predict_float(&self, s: f64) -> f64 {
        self.0.predict_float(s)
    }

    fn __repr__(&self) -> String {
        format!(
            "LinearModel(alpha={}, beta={}, alpha_fx={}, beta_fx={})",
            self.0.alpha_f, self.0.beta_f, self.0.alpha_fx, self.0.beta_fx
        )
    }
}

/// Operation counts: mult, add, shift, cmp, downsample.
#[pyclass(
    name = "OpCounts",
    module = "cclm_py",
    frozen,
    get_all,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyOpCounts {
    mult: u64,
    add: u64,
    shift: u64,
    cmp: u64,
    downsample: u64,
}

impl From<cclm::OpCounts> for PyOpCounts {
    fn from(c: cclm::OpCounts) -> Self {
        Self {
            mult: c.mult,
            add: c.add,
            shift: c.shift,
            cmp: c.cmp,
            downsample: c.downsample,
        }
    }
}

#[pymethods]
impl PyOpCounts {
    fn as_tuple(&self) -> (u64, u64, u64, u64, u64) {
        (self.mult, self.add, self.shift, self.cmp, self.downsample)
    }

    fn __repr__(&self) -> String {
        format!(
            "OpCounts(mult={}, add={}, shift={}, cmp={}, downsample={})",
            self.mult, self.add, self.shift, self.cmp, self.downsample
        )
    }
}

/// A 4:2:0 frame.
#[pyclass(name = "Frame", module = "cclm_py", frozen, skip_from_py_object)]
struct PyFrame(cclm::Frame);

#[pymethods]
impl PyFrame {
    #[new]
    fn new(
        width: usize,
        height: usize,
        bit_depth: u8,
        y: Vec<u16>,
        cb: Vec<u16>,
        cr: Vec<u16>,
    ) -> PyResult<Self> {
        let plane = |w, h, d| cclm::Plane::new(w, h, bit_depth, d).map_err(err);
        let frame = cclm::Frame::new(
            plane(width, height, y)?,
            plane(width / 2, height / 2, cb)?,
            plane(width / 2, height / 2, cr)?,
        )
        .map_err(err)?;
        Ok(Self(frame))
    }

    /// Raw frame `index` of a planar file.
    #[staticmethod]
    #[pyo3(signature = (path, width, height, bit_depth=8, index=0))]
    fn read(
        path: &str,
        width: usize,
        height: usize,
        bit_depth: u8,
        index: usize,
    ) -> PyResult<Self> {
        let file = File::open(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        let len = file.metadata()?.len();
        let count = cclm::YuvSpec::frames_in(width, height, bit_depth, len).max(1);
        let spec = cclm::YuvSpec::new(width, height, bit_depth, count).map_err(err)?;
        let frame = cclm::read_frame(&mut BufReader::new(file), &spec, index).map_err(err)?;
        Ok(Self(frame))
    }

    #[staticmethod]
    #[pyo3(signature = (width, height, bit_depth=8))]
    fn exact_linear(width: usize, height: usize, bit_depth: u8) -> PyResult<Self> {
        Ok(Self(
            synth::exact_linear(width, height, bit_depth).map_err(err)?,
        ))
    }

    #[staticmethod]
    #[pyo3(signature = (width, height, bit_depth=8, rho_x=0.9, rho_y=0.9, seed=0))]
    fn ar1(
        width: usize,
        height: usize,
        bit_depth: u8,
        rho_x: f64,
        rho_y: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let params = Ar1Params {
            rho_x,
            rho_y,
            ..Ar1Params::default()
        };
        Ok(Self(
            synth::ar1(width, height, bit_depth, params, seed).map_err(err)?,
        ))
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.luma().width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.luma().height()
    }

    #[getter]
    fn bit_depth(&self) -> u8 {
        self.0.bit_depth()
    }

    /// Samples of "y", "cb" or "cr" in raster order.
    fn plane(&self, name: &str) -> PyResult<Vec<u16>> {
        let p = match name {
            "y" => self.0.luma(),
            other => self.0.chroma(component(other)?),
        };
        Ok(p.data().to_vec())
    }

    fn to_bytes(&self) -> PyResult<Vec<u8>> {
        let mut out = Vec::new();
        cclm::write_frame(&self.0, &mut out).map_err(err)?;
        Ok(out)
    }

    /// Above and left (luma, chroma) reference pairs of a chroma block.
    #[pyo3(signature = (x, y, w, h, mode="LM", component="cb"))]
    fn references(
        &self,
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        mode: &str,
        component: &str,
    ) -> PyResult<PairLists> {
        let geom = cclm::BlockGeom::within(&self.0, x, y, w, h).map_err(err)?;
        let refs = cclm::extract_refset(
            &self.0,
            &geom,
            self::mode(mode)?,
            self::component(component)?,
        )
        .map_err(err)?;
        Ok(split(&refs))
    }
}

/// Derive a model from reference pairs; the sub-sampled method picks its
/// positions from the lists as a codec would.
#[pyfunction]
#[pyo3(signature = (method, above, left=Vec::new(), mode="LM"))]
fn derive(
    method: &str,
    above: Vec<(u16, u16)>,
    left: Vec<(u16, u16)>,
    mode: &str,
) -> PyResult<PyLinearModel> {
    let refs = refset(mode, above, left)?;
    let (model, _) = cclm::derive_or_fallback(self::method(method)?, &refs).map_err(err)?;
    Ok(PyLinearModel(model))
}

#[pyfunction]
fn static_counts(method: &str, m: u64) -> PyResult<PyOpCounts> {
    Ok(cclm::static_counts(self::method(method)?, m)
        .map_err(err)?
        .into())
}

#[pyfunction]
#[pyo3(signature = (method, above, left=Vec::new(), mode="LM"))]
fn measured_counts(
    method: &str,
    above: Vec<(u16, u16)>,
    left: Vec<(u16, u16)>,
    mode: &str,
) -> PyResult<PyOpCounts> {
    let refs = refset(mode, above, left)?;
    Ok(cclm::measured_counts(self::method(method)?, &refs)
        .map_err(err)?
        .into())
}

#[pyfunction]
fn reduction(base: u64, reduced: u64) -> PyResult<i64> {
    cclm::reduction(base, reduced).map_err(err)
}

/// Positions as ("above" | "left", index).
#[pyfunction]
fn subsample_positions(
    mode: &str,
    w_ref: usize,
    h_ref: usize,
) -> PyResult<Vec<(&'static str, usize)>> {
    let v = cclm::select_subsample_positions(self::mode(mode)?, w_ref, h_ref).map_err(err)?;
    Ok(v.iter()
        .map(|p| {
            let side = match p.side {
                cclm::Side::Above => "above",
                cclm::Side::Left => "left",
            };
            (side, p.index)
        })
        .collect())
}

#[pyfunction]
fn predict_cclm(
    model: &PyLinearModel,
    frame: &PyFrame,
    x: usize,
    y: usize,
    w: usize,
    h: usize,
) -> PyResult<Vec<u16>> {
    let geom = cclm::BlockGeom::new(x, y, w, h).map_err(err)?;
    Ok(cclm::predict_cclm(&model.0, frame.0.luma(), &geom)
        .map_err(err)?
        .data)
}

#[pyfunction]
fn predict_tscpm(
    model: &PyLinearModel,
    frame: &PyFrame,
    x: usize,
    y: usize,
    w: usize,
    h: usize,
) -> PyResult<Vec<u16>> {
    let geom = cclm::BlockGeom::new(x, y, w, h).map_err(err)?;
    Ok(cclm::predict_tscpm(&model.0, frame.0.luma(), &geom)
        .map_err(err)?
        .data)
}

/// (rho, sigma_l, sigma_c, mu_l, mu_c, n)
#[pyfunction]
fn correlation(l: Vec<f64>, c: Vec<f64>) -> PyResult<(f64, f64, f64, f64, f64, usize)> {
    let s = analysis::correlation(&l, &c).map_err(err)?;
    Ok((s.rho, s.sigma_l, s.sigma_c, s.mu_l, s.mu_c, s.n))
}

/// Sub-sampled pair lists at ratio exponent `s`.
#[pyfunction]
fn subsample_refs(above: Vec<(u16, u16)>, left: Vec<(u16, u16)>, s: u32) -> PyResult<PairLists> {
    let refs = refset("LM", above, left)?;
    let kept = analysis::subsample_refs(&refs.to_vec(), s).map_err(err)?;
    let pick = |side| {
        kept.iter()
            .filter(|p| p.pos.side == side)
            .map(|p| (p.luma, p.chroma))
            .collect()
    };
    Ok((pick(cclm::Side::Above), pick(cclm::Side::Left)))
}

#[pyfunction]
fn delta_rho(above: Vec<(u16, u16)>, left: Vec<(u16, u16)>, s: u32) -> PyResult<f64> {
    analysis::delta_rho(&refset("LM", above, left)?.to_vec(), s).map_err(err)
}

#[pyfunction]
fn pixel_correlation(rho_x: f64, rho_y: f64, i: i64, j: i64, p: i64, q: i64) -> f64 {
    analysis::pixel_correlation(rho_x, rho_y, i, j, p, q)
}

#[pyfunction]
fn pred_error_variance(rho_x: f64, rho_y: f64, i: u32, dx: i64) -> f64 {
    analysis::pred_error_variance(rho_x, rho_y, i, dx)
}

#[pyfunction]
fn position_gain(rho_x: f64, n: u32, t: u32) -> PyResult<f64> {
    if t >= n {
        return Err(PyValueError::new_err(format!(
            "position {t} outside row of {n}"
        )));
    }
    Ok(analysis::position_gain(rho_x, n, t))
}

#[pyfunction]
fn row_total_variance(rho_x: f64, rho_y: f64, i: u32, n: u32, t: u32) -> PyResult<f64> {
    position_gain(rho_x, n, t)?;
    Ok(analysis::row_total_variance(rho_x, rho_y, i, n, t))
}

#[pyfunction]
fn optimal_position(n: u32) -> f64 {
    analysis::optimal_position(n)
}

/// Deviation of `method` from least squares over all pairs, as a dict.
#[pyfunction]
#[pyo3(signature = (method, above, left=Vec::new(), mode="LM"))]
fn sensitivity<'py>(
    py: Python<'py>,
    method: &str,
    above: Vec<(u16, u16)>,
    left: Vec<(u16, u16)>,
    mode: &str,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let method = self::method(method)?;
    let refs = refset(mode, above, left)?;
    let population = refs.to_vec();
    let selected = match method {
        cclm::DerivationMethod::Subsampled4 => refs.subsampled().map_err(err)?,
        _ => population.clone(),
    };
    let r = analysis::sensitivity(&selected, &population, method).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("alpha_lsr", r.alpha_lsr)?;
    d.set_item("beta_lsr", r.beta_lsr)?;
    d.set_item("alpha_hat", r.alpha_hat)?;
    d.set_item("beta_hat", r.beta_hat)?;
    d.set_item("delta_alpha_sq", r.delta_alpha_sq)?;
    d.set_item("sigma_l_sq", r.sigma_l_sq)?;
    d.set_item("delta_e_pred", r.delta_e_pred)?;
    d.set_item("delta_e_meas", r.delta_e_meas)?;
    Ok(d)
}

#[pyfunction]
fn residual_energy(residuals: Vec<f64>) -> f64 {
    analysis::residual_energy(&residuals)
}

#[pyfunction]
fn delta_residual_energy(e_anchor: f64, e_proposed: f64) -> PyResult<f64> {
    analysis::delta_residual_energy(e_anchor, e_proposed).map_err(err)
}

/// CSV text of the per-block derivation report over `frames`.
#[pyfunction]
#[pyo3(signature = (frames, name="sequence", block_sizes=vec![4, 8, 16, 32]))]
fn derive_report(
    frames: Vec<PyRef<'_, PyFrame>>,
    name: &str,
    block_sizes: Vec<usize>,
) -> PyResult<String> {
    let seq = Sequence {
        name: name.to_string(),
        frames: frames.iter().map(|f| f.0.clone()).collect(),
    };
    let cfg = ReportConfig {
        block_sizes,
        ..ReportConfig::default()
    };
    let bytes = report::derive_report(&seq, &cfg)
        .and_then(|t| t.to_bytes())
        .map_err(err)?;
    String::from_utf8(bytes).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn cclm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLinearModel>()?;
    m.add_class::<PyOpCounts>()?;
    m.add_class::<PyFrame>()?;
    m.add_function(wrap_pyfunction!(derive, m)?)?;
    m.add_function(wrap_pyfunction!(static_counts, m)?)?;
    m.add_function(wrap_pyfunction!(measured_counts, m)?)?;
    m.add_function(wrap_pyfunction!(reduction, m)?)?;
    m.add_function(wrap_pyfunction!(subsample_positions, m)?)?;
    m.add_function(wrap_pyfunction!(predict_cclm, m)?)?;
    m.add_function(wrap_pyfunction!(predict_tscpm, m)?)?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(subsample_refs, m)?)?;
    m.add_function(wrap_pyfunction!(delta_rho, m)?)?;
    m.add_function(wrap_pyfunction!(pixel_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(pred_error_variance, m)?)?;
    m.add_function(wrap_pyfunction!(position_gain, m)?)?;
    m.add_function(wrap_pyfunction!(row_total_variance, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_position, m)?)?;
    m.add_function(wrap_pyfunction!(sensitivity, m)?)?;
    m.add_function(wrap_pyfunction!(residual_energy, m)?)?;
    m.add_function(wrap_pyfunction!(delta_residual_energy, m)?)?;
    m.add_function(wrap_pyfunction!(derive_report, m)?)?;
    Ok(())
}
