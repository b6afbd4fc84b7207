"""Verification suites per model kind, assembled into a Report in a fixed order."""
from __future__ import annotations

import dataclasses

from . import gaudin
from .report import CheckResult, Report, timed


def gaudin_checks(spec, all_pairs: bool = True) -> list:
    hams = gaudin.hamiltonians(spec)
    out = timed("commuting", gaudin.verify_commuting, hams, "H", all_pairs)
    out += timed("symmetry", gaudin.symmetry_suite, spec)
    if isinstance(spec, gaudin.InnerModelSpec):
        out += timed("residue", gaudin.residue_identity_inner, spec)
    else:
        out += timed("residue", gaudin.residue_identity_outer, spec)
    out += timed("centrality", gaudin.centrality_checks, spec)
    out += timed("exchange", gaudin.exchange_relation_checks, spec)
    out += timed("abelian", gaudin.abelian_identity_checks, spec)
    out += timed("independence", gaudin.independence_check, spec)
    return out


def _fixture_checks(spec) -> list:
    from . import fixtures

    out = []
    if spec.n == 3 and spec.L == 2:
        def calibration():
            cal = fixtures.calibrated_hbar()
            return CheckResult("hbar calibration", True, info=f"hbar = {fixtures.render_hbar(cal.value)} ({cal.source})")

        out += timed("fixtures", calibration)
        for name in ("I1", "I2", "I3"):
            out += timed("fixtures", fixtures.compare_golden, name)
    if spec.n == 3 and spec.L == 2 and spec.N == 3 and tuple(spec.multiplicities) == (1, 1, 1):
        out += timed("fixtures", fixtures.compare_golden, f"Itilde3_eps{spec.eps:+d}")
    return out


def dunkl_checks(spec, all_pairs: bool = True, seed: int = 0) -> tuple[list, list]:
    from . import dunkl

    alg = dunkl.Algebra(spec)
    out = timed("commutativity", dunkl.verify_dunkl_commutativity, alg, all_pairs)
    out += timed("evaluator", dunkl.verify_commutativity_evaluator, alg, 20, seed)
    out += _fixture_checks(spec)
    out += timed("projectors", dunkl.verify_projector_identities, alg)
    out += timed("tilde", dunkl.verify_tilde_vanishing, alg)
    out += timed("quasi-parity", dunkl.verify_quasi_parity_evaluator, alg, 5, seed)
    notes = ["hbar is kept symbolic in every check that does not compare against a fixture"]
    if any(c.name.startswith("fixtures/") for c in out):
        notes.append("fixture comparisons fix hbar by the calibration recorded above")
    notes += [
        "Lambda_P carries the 1/L! normalization so that it is idempotent",
        "independence of the projected charges beyond the vanishing pattern is not tested",
    ]
    if spec.n >= 3:
        bad = [c.name for c in out if c.name.startswith("projectors/[B^") and not c.passed]
        if bad:
            diag = dunkl.twist_diagnostic(alg)
            ok = all(c.passed for c in diag)
            notes.append(
                "with the mirrored grading phase tau^(+jp) the commutator [B^(p),Lambda_Q] vanishes for "
                + ("every p checked" if ok else "p = " + ", ".join(str(i) for i, c in enumerate(diag) if c.passed))
            )
    return out, notes


def run_verify(spec, all_pairs: bool = True, truncation: int | None = None, seed: int = 0) -> Report:
    if getattr(spec, "truncation", None) is not None and truncation is not None:
        spec = dataclasses.replace(spec, truncation=truncation)
    if hasattr(spec, "z"):
        return Report(spec.echo(), gaudin_checks(spec, all_pairs))
    checks, notes = dunkl_checks(spec, all_pairs, seed)
    echo = dict(spec.echo())
    echo["seed"] = seed
    return Report(echo, checks, notes)
