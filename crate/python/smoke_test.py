#!/usr/bin/env python3
"""Smoke test for the zernike_pde Python extension.

Build the extension first:

    cargo build --release -p zernike-pde-py

then run this script from anywhere inside the repository:

    python3 python/smoke_test.py

The script locates the built cdylib, exposes it under the importable name
zernike_pde, and exercises the main types and operations end to end.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path


def load_module():
    repo = Path(__file__).resolve().parent.parent
    candidates = [
        repo / "target" / "release" / "libzernike_pde_py.so",
        repo / "target" / "debug" / "libzernike_pde_py.so",
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit(
            "extension not built; run `cargo build --release -p zernike-pde-py` first"
        )
    staging = Path(tempfile.mkdtemp(prefix="zernike_pde_py_"))
    shutil.copy2(lib, staging / "zernike_pde.so")
    sys.path.insert(0, str(staging))
    import zernike_pde

    return zernike_pde


def approx(a, b, tol=1e-12):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    zp = load_module()

    # Radial polynomials and their evaluation.
    assert zp.radial_polynomial(0, 0) == [1.0]
    assert zp.radial_polynomial(2, 0) == [-1.0, 0.0, 2.0]
    assert zp.radial_polynomial(3, 1) == [0.0, -2.0, 0.0, 3.0]
    approx(zp.eval_radial(3, 3, 0.5), 0.125)
    approx(zp.eval_radial(2, 0, 1.0), 1.0)
    try:
        zp.eval_radial(2, 0, 1.5)
        sys.exit("expected a ValueError for r outside the disk")
    except ValueError:
        pass

    # Trigonometric vector.
    assert zp.trig_vector(0.0, 2) == [1.0, 1.0, 0.0, 1.0, 0.0]

    # Lagrange projection of the first super-degree power at n_max = 3.
    p4 = zp.lagrange_project(4, 3)
    approx(p4[1], 2.0 / 9.0)
    approx(p4[2], -11.0 / 9.0)
    approx(p4[3], 2.0)

    # Operational matrix dump: the plain radial integration matrix.
    e_rr0 = zp.operational_matrix("E_rr0", 3, r0=0.0, projection="truncate")
    approx(e_rr0[0][1], 1.0)
    approx(e_rr0[1][3], 0.5)
    approx(e_rr0[4][3], -1.0)

    # Expansion of a pure basis element.
    u = zp.expand_function(lambda r, phi: r * math.cos(phi), 3, 3)
    approx(u[1][1], 1.0, 1e-10)
    total = sum(abs(v) for row in u for v in row)
    approx(total, 1.0, 1e-9)

    # First-order worked example: the least squares solve reproduces the
    # known coefficient matrix under truncation.
    report = zp.solve_fopde_example(3, 3, method="l2", projection="truncate")
    coeffs = report.coefficients()
    approx(coeffs[0][0], 1.0, 1e-6)
    approx(coeffs[1][1], 0.2, 1e-6)
    approx(coeffs[1][4], -0.4, 1e-6)
    approx(coeffs[0][3], 0.25, 1e-6)
    approx(coeffs[3][3], 0.25, 1e-6)
    assert report.method == "l2"
    assert report.residual_norm < 1e-9

    # Discontinuous Laplace example, basis-pursuit solve: error against the
    # closed-form solution (rim excluded) at a modest order.
    report = zp.solve_laplace_example(5, 5, method="l1")
    err = report.mse(zp.laplace_example_exact, exclude_rim=True)
    assert err < 5e-3, f"laplace example mse {err}"
    mid = report.evaluate(0.5, math.pi / 2.0)
    exact = zp.laplace_example_exact(0.5, math.pi / 2.0)
    assert abs(mid - exact) < 0.05, f"{mid} vs {exact}"

    # Explicit boundary vectors: u = r sin(phi).
    report = zp.solve_laplace(
        g=[0, 0, 1, 0, 0, 0, 0],
        h=[0, 0, 1, 0, 0, 0, 0],
        p=[0, 0, 0, 0, 0, 0],
        q=[0, 1, 0, 0, 0, 0],
        m_max=3,
        n_max=3,
        method="l1",
    )
    approx(report.evaluate(0.7, 1.1), 0.7 * math.sin(1.1), 1e-5)

    print("smoke test passed")


if __name__ == "__main__":
    main()
