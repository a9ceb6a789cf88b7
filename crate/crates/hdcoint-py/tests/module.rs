//! Imports the extension module into an embedded interpreter and drives it
//! from Python source, the same way a user script would.

use hdcoint_py::hdcoint_py as pymodule;
use pyo3::ffi::c_str;
use pyo3::prelude::*;

#[test]
fn module_imports_and_runs_a_python_session() {
    pyo3::append_to_inittab!(pymodule);
    Python::initialize();
    Python::attach(|py| {
        let code = c_str!(
            r#"
import json
import hdcoint_py as hc

# Simulation, accessors, and both spectra.
p = hc.Panel.random_walk(6, 1, 80, seed=1)
assert (p.n, p.t_len, p.presample_len) == (6, 80, 1)
spec = hc.modified_spectrum(p, 1)
assert len(spec) == 6
assert all(a >= b for a, b in zip(spec, spec[1:]))
assert all(0.0 <= v <= 1.0 for v in spec)
classical = hc.johansen_spectrum(p, 1, det=["constant"])
assert len(classical) == 6

# Rank test against the bundled table, with a Monte Carlo p-value.
rep = hc.modified_lr_test(p, 1)
assert rep["decision"] in ("reject", "fail_to_reject")
assert rep["p_value"] is not None
assert (rep["n"], rep["t"], rep["k"]) == (6, 80, 1)

# Config-driven simulation reuses the CLI JSON schema.
cfg = json.dumps({
    "n": 5, "t": 60, "k": 2,
    "gammas": [{"single_entry": {"row": 0, "col": 0, "scale": 0.8}}],
})
q = hc.Panel.simulate(cfg, seed=4)
assert (q.n, q.t_len, q.presample_len) == (5, 60, 2)

# Closed forms and error surface.
w = hc.wachter_params(2.0, 8.0)
assert abs(w["lambda_plus"] - 0.5) < 1e-12
assert abs(w["lambda_minus"] - 0.02) < 1e-12
try:
    hc.modified_spectrum(hc.Panel.random_walk(5, 1, 8, seed=0), 1)
    raise AssertionError("short sample must raise")
except ValueError as e:
    assert "sample too short" in str(e)
"#
        );
        py.run(code, None, None).unwrap();
    });
}
