"""Smoke test for the pyxyzcorr extension module.

Uses an installed module if present (e.g. after `maturin develop`), otherwise
loads the shared library from target/{release,debug} after `cargo build -p xyzcorr-py`.
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load():
    try:
        import pyxyzcorr

        return pyxyzcorr
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libpyxyzcorr.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("pyxyzcorr", str(lib))
            spec = importlib.util.spec_from_file_location("pyxyzcorr", lib, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("pyxyzcorr not found; run `cargo build --release -p xyzcorr-py` first")


def main():
    x = load()

    f2 = x.f_in_z(2)
    assert (f2.num, f2.den) == (["27", "1"], ["25", "1"]), f2
    assert x.correlations(1, "0") == ("2/3", "2/3", "-1/3")
    assert x.f_value(2, "1/3") == x.f_zeta(2)(1 / 3)

    gs = x.ground_state(5, 0.4)
    assert abs(gs.energy + 3.95) < 1e-10
    (cx, cy, cz), spread = gs.correlations()
    assert spread < 1e-9
    fx, fy, fz = gs.infer_f(0.4)
    exact = x.f_value(2, "2/5")
    assert max(abs(fx - exact), abs(fy - exact), abs(fz - exact)) < 1e-7

    assert abs(x.theta(1, 0j, 1j)) < 1e-15
    suite = x.identity_suite(1j, seed=7)
    assert suite["passed"], [e for e in suite["entries"] if not e["passed"]]
    assert x.baxter_f_infinity(1j)["diff"] < 1e-9
    assert x.transfer_check(3, 1j)["eigen_residual"] < 1e-8

    q = x.solve_q(1, 1j)
    assert q.nullspace_gap >= 1e6
    assert q.ddt()["residual"] < 1e-7
    zeta = x.modular_values(1j)["zeta"][0]
    assert abs(q.f_from_q() - x.f_value(1, zeta)) < 1e-6

    for row in x.pvi_verify(2):
        assert row["fpqp_residual"] == "0/1" and row["factorization"]

    try:
        x.ground_state(4, 0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("even chain length accepted")

    assert math.isclose(x.f_infinity(0.0), 9 / 8)
    print("pyxyzcorr smoke test passed")


if __name__ == "__main__":
    main()
