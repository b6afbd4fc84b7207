"""Floating-point cross-check: simultaneous diagonalization of the Gaudin Hamiltonians."""
from __future__ import annotations

import random
import time
from fractions import Fraction

import numpy as np

from .report import CheckResult, Report

MAX_DIM = 4096
RETRIES = 3


def _sorted_spectrum(vals, digits: int = 9) -> list[list[float]]:
    pairs = sorted((round(float(v.real), digits) + 0.0, round(float(v.imag), digits) + 0.0) for v in vals)
    return [list(p) for p in pairs]


def _multiplets(vals, tol: float = 1e-6) -> list[int]:
    """Sizes of clusters of (numerically) equal joint eigenvalues."""
    vals = sorted(vals, key=lambda v: (v.real, v.imag))
    sizes = []
    prev = None
    for v in vals:
        if prev is not None and abs(v - prev) < tol:
            sizes[-1] += 1
        else:
            sizes.append(1)
        prev = v
    return sorted(sizes, reverse=True)


def simultaneous_residual(mats: list[np.ndarray], coeffs: list[Fraction]):
    """Diagonalize sum c_k H_k and return (residual, eigenvector matrix, condition number)."""
    M = sum(float(c) * H for c, H in zip(coeffs, mats))
    _, V = np.linalg.eig(M)
    cond = np.linalg.cond(V)
    Vinv = np.linalg.inv(V)
    worst = 0.0
    for H in mats:
        D = Vinv @ H @ V
        off = D - np.diag(np.diag(D))
        worst = max(worst, float(np.abs(off).max()) if off.size else 0.0)
    return worst, V, cond


def spectra_check(hams, tol: float = 1e-8, seed: int = 0) -> tuple[list[CheckResult], dict]:
    if not hams:
        return [CheckResult("simultaneous diagonalization", True, info="no operators")], {}
    dim = hams[0].layout.size
    if dim > MAX_DIM:
        return [CheckResult("dimension cap", False, f"dimension {dim} exceeds {MAX_DIM}")], {}
    t0 = time.perf_counter()
    mats = [H.to_dense() for H in hams]
    rng = random.Random(seed)
    attempts = []
    for attempt in range(RETRIES):
        coeffs = [Fraction(rng.randint(1, 997), rng.randint(1, 97)) for _ in mats]
        res, V, cond = simultaneous_residual(mats, coeffs)
        attempts.append((res, cond, coeffs))
        if res < tol and np.isfinite(cond):
            break
    res, cond, coeffs = attempts[-1]
    dt = (time.perf_counter() - t0) * 1000
    Vinv = np.linalg.inv(V)
    spectra = {}
    joint = []
    for k, H in enumerate(mats):
        d = np.diag(Vinv @ H @ V)
        spectra[f"H{k + 1}"] = _sorted_spectrum(d)
        joint.append(d)
    joint_keys = [complex(sum(j[i] * (17.0 ** (k + 1)) for k, j in enumerate(joint))) for i in range(dim)]
    info = (
        f"dimension {dim}, attempts {len(attempts)}, coefficients "
        + ", ".join(str(c) for c in coeffs)
        + f", residual {res:.3e}, eigenvector condition {cond:.3e}"
    )
    ok = res < tol
    w = None if ok else f"off-diagonal residual {res:.3e} >= {tol:g} after {len(attempts)} attempts"
    checks = [CheckResult("simultaneous diagonalization", ok, w, info, dt)]
    extra = {"spectra": spectra, "multiplets": _multiplets(joint_keys), "residual": res}
    return checks, extra


def run_spectra(spec, tol: float = 1e-8, seed: int = 0) -> Report:
    from .gaudin import hamiltonians

    if not hasattr(spec, "z"):
        raise ValueError("the spectra command applies to Gaudin models only")
    t0 = time.perf_counter()
    hams = hamiltonians(spec)
    build = CheckResult("build Hamiltonians", True, time_ms=(time.perf_counter() - t0) * 1000)
    checks, extra = spectra_check(hams, tol, seed)
    rep = Report(spec.echo(), [build] + checks)
    if extra:
        rep.notes.append("multiplet sizes: " + ", ".join(map(str, extra["multiplets"])))
        for k, vals in extra["spectra"].items():
            rep.notes.append(f"{k} spectrum: " + " ".join(f"{a:+.9f}{b:+.9f}i" for a, b in vals))
    return rep
