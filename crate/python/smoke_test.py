#!/usr/bin/env python3
"""Smoke test for the hdcoint_py extension module.

Loads the cargo-built cdylib directly (no wheel install needed): builds
`crates/hdcoint-py` in release mode if necessary, copies the shared library
next to a temp directory under the import name `hdcoint_py`, and exercises
the main operations end to end. Exits non-zero on the first failure.

Usage: python3 python/smoke_test.py
"""

import json
import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def locate_cdylib() -> Path:
    names = ("libhdcoint_py.so", "libhdcoint_py.dylib", "hdcoint_py.dll")
    for profile in ("release", "debug"):
        for name in names:
            p = REPO / "target" / profile / name
            if p.exists():
                return p
    print("cdylib not found; building crates/hdcoint-py (release) ...")
    subprocess.run(
        ["cargo", "build", "--release", "-p", "hdcoint-py"], cwd=REPO, check=True
    )
    return locate_cdylib()


def import_module():
    src = locate_cdylib()
    tmp = Path(tempfile.mkdtemp(prefix="hdcoint-py-"))
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy2(src, tmp / f"hdcoint_py{suffix}")
    sys.path.insert(0, str(tmp))
    import hdcoint_py

    return hdcoint_py


def check(label: str, ok: bool, detail: str = ""):
    status = "ok" if ok else "FAIL"
    print(f"  {label:<44} {status}  {detail}".rstrip())
    if not ok:
        sys.exit(1)


def main():
    hc = import_module()
    print(f"hdcoint_py {hc.__version__} loaded from {hc.__file__}")

    # Panel construction and accessors.
    panel = hc.Panel.random_walk(8, 2, 120, seed=3)
    check("random-walk panel shape", panel.n == 8 and panel.t_len == 120 and panel.presample_len == 2, repr(panel))
    rows = panel.values()
    check("values() row layout", len(rows) == 8 and len(rows[0]) == 120)
    rebuilt = hc.Panel(rows, panel.initial())
    check("explicit-rows round trip", rebuilt.t_len == 120)

    # Both spectra: descending, inside [0, 1].
    classical = hc.johansen_spectrum(panel, 2, det=["constant"])
    modified = hc.modified_spectrum(panel, 2)
    for nameval in (("classical", classical), ("modified", modified)):
        name, vals = nameval
        sorted_ok = all(a >= b for a, b in zip(vals, vals[1:]))
        range_ok = all(0.0 <= v <= 1.0 for v in vals)
        check(f"{name} spectrum is a sorted spectrum", len(vals) == 8 and sorted_ok and range_ok,
              f"top={vals[0]:.4f}")

    # Closed-form constants.
    w = hc.wachter_params(2.0, 8.0)
    check("support edges at shape (2, 8)",
          abs(w["lambda_plus"] - 0.5) < 1e-12 and abs(w["lambda_minus"] - 0.02) < 1e-12,
          f"[{w['lambda_minus']:.3f}, {w['lambda_plus']:.3f}]")
    c = hc.test_constants(100, 1000, 2)
    check("centering constant c1 = ln(1/2)", abs(c["c1"] - math.log(0.5)) < 1e-12, f"c1={c['c1']:.6f}")
    lim = hc.limit_statistics(0.0, 1.0, 10.0, 2)
    check("full-bulk mean limit 2/(tau+2-k)", abs(lim["pb_limit"] - 0.2) < 1e-6, f"pb={lim['pb_limit']:.8f}")
    mid = 0.5 * (w["lambda_minus"] + w["lambda_plus"])
    check("density positive inside the bulk",
          hc.wachter_pdf(mid, 2.0, 8.0) > 0.0 and hc.wachter_pdf(0.9, 2.0, 8.0) == 0.0)

    # Misspecified lag order rejects; the true order does not (strong
    # short-run dependence in one coordinate).
    cfg = json.dumps({
        "n": 15, "t": 150, "k": 2,
        "gammas": [{"single_entry": {"row": 0, "col": 0, "scale": 0.9}}],
        "drift": 1.0,
    })
    var2 = hc.Panel.simulate(cfg, seed=5)
    under = hc.modified_lr_test(var2, 1, r=1, alpha=0.95)
    true_k = hc.modified_lr_test(var2, 2, r=1, alpha=0.95)
    check("k=1 on a VAR(2) panel rejects", under["decision"] == "reject",
          f"rescaled={under['rescaled']:.2f} > q={under['quantile']:.2f}")
    check("k=2 on a VAR(2) panel fails to reject", true_k["decision"] == "fail_to_reject",
          f"rescaled={true_k['rescaled']:.2f}, p={true_k['p_value']:.3f}")
    check("report carries provenance", true_k["n"] == 15 and true_k["t"] == 150 and true_k["k"] == 2,
          true_k["table_id"])

    # Reference ensembles: projector model vs matrix-Beta law at the matched
    # exponents (top eigenvalue, two-sample KS on 300 draws each).
    reps = 300
    proj = [hc.projector_model_spectrum(2, 2, 10, seed=2 * i)[0] for i in range(reps)]
    jac = [hc.sample_jacobi_spectrum(2, 1.0, 2.5, seed=2 * i + 1)[0] for i in range(reps)]
    ks = hc.ks_distance_two_sample(proj, jac)
    check("projector model matches matrix-Beta law", ks < 0.15, f"KS={ks:.3f}")

    # Edge-limit sampler and desk-scale critical values.
    eigs = hc.goe_top_eigs(2000, 3, seed=1)
    check("edge sampler returns descending triple", len(eigs) == 3 and eigs[0] > eigs[1] > eigs[2])
    cells = hc.airy_sum_quantiles(1, [0.95], 2000, 1000, seed=7)
    check("desk-scale 95% cell near the bundled value", abs(cells[0]["quantile"] - 0.97) < 0.45,
          f"q={cells[0]['quantile']:.3f}")

    # Error surface: too-short samples raise ValueError with the size rule.
    try:
        hc.modified_spectrum(hc.Panel.random_walk(5, 1, 8, seed=0), 1)
        check("short-sample error raised", False)
    except ValueError as e:
        check("short-sample error raised", "sample too short" in str(e), str(e))

    print("smoke test passed")


if __name__ == "__main__":
    main()
