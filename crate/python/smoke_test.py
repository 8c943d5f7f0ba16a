"""Smoke test for the exact_wkb_py extension module.

Build first:
    cargo build --release -p exact-wkb-py --features extension-module
then run this script; it loads target/release/libexact_wkb_py.so when the
module is not already importable.
"""

import importlib.machinery
import importlib.util
import pathlib
import sys


def load():
    try:
        import exact_wkb_py

        return exact_wkb_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("libexact_wkb_py.so", "libexact_wkb_py.dylib", "exact_wkb_py.dll"):
        lib = root / "target" / "release" / name
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("exact_wkb_py", str(lib))
            spec = importlib.util.spec_from_loader("exact_wkb_py", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("exact_wkb_py not built; see the docstring")


def main():
    ew = load()
    names = ew.problem_names()
    assert "airy" in names and "mathieu" in names, names

    airy = ew.Problem.builtin("airy")
    assert airy.is_rational
    coeffs = airy.formal_coefficients(3, "+")
    assert coeffs[1].startswith("(1/4)/(x) "), coeffs
    plus_ray, minus_ray = airy.trace(1.0, 0.0)
    assert (plus_ray, minus_ray) == ("complete_generic", "hit_turning_point"), (plus_ray, minus_ray)

    hbar = 0.1
    plus = ew.ExactSolution(airy, 1.0, "+", 0.0)
    minus = ew.ExactSolution(airy, 1.0, "-", 0.5)
    s_plus = plus.s(1.5, hbar)
    assert abs(s_plus - 1.5**0.5) < 0.05, s_plus
    w = ew.wronskian(plus, minus, 1.5, hbar)
    assert abs(w - 2 * 1.5**0.5) < 0.05, w

    try:
        from scipy.special import airy as airy_fn
    except ImportError:
        airy_fn = None
    if airy_fn is not None:
        scale = hbar ** (-2.0 / 3.0)
        expected = airy_fn(scale * 1.5)[0] / airy_fn(scale * 1.0)[0]
        got = plus.psi(1.5, hbar)
        assert abs(got - expected) < 1e-6 * abs(expected), (got, expected)

    try:
        ew.Problem.builtin("nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown problem accepted")

    print("exact_wkb_py", ew.__version__, "smoke test ok")


if __name__ == "__main__":
    main()
