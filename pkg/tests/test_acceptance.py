"""Acceptance gate: one test per headline guarantee, at the shipped tolerances.

Every test runs the corresponding registered suite exactly as the CLI
would (default grids, default tolerances) and asserts the advertised
outcome: equality packs vanish, curved-space bounds hold with the right
sign, witness geometries visibly break the bounds without being counted
as passes, and reruns are byte-identical.  Run with -v for one line per
guarantee.
"""

import numpy as np
import pytest

from harnacklab.cli import main
from harnacklab.config import parse_config_text
from harnacklab.suites import emit_report, run_suite


def _cfg(name):
    return parse_config_text("[experiment]\nname = %s\n" % name)


def _result(name):
    res = run_suite(_cfg(name))
    return {c.slug: c for c in res.checks}, res


@pytest.fixture(scope="module")
def flat():
    return _result("flat_sanity")


@pytest.fixture(scope="module")
def sphere():
    return _result("sphere_full")


@pytest.fixture(scope="module")
def hyperbolic():
    return _result("hyperbolic_witness")


@pytest.fixture(scope="module")
def collapse():
    return _result("cylinder_collapse")


@pytest.fixture(scope="module")
def kahler():
    return _result("kahler_lyh")


@pytest.fixture(scope="module")
def bezout():
    return _result("subvariety_bezout")


def _holds(check, tolerance):
    """The advertised tolerance is in force and the check clears it."""
    assert check.tolerance == tolerance, check.slug
    assert check.verdict == "holds", "%s: worst %g vs tolerance %g" % (
        check.slug,
        check.worst,
        check.tolerance,
    )


def test_criterion_1_flat_equality_pack(flat):
    checks, _ = flat
    _holds(checks["reduced-distance-flat"], 1e-6)
    _holds(checks["reduced-volume-global-one"], 1e-4)
    _holds(checks["reduced-volume-sector-constant"], 1e-10)
    _holds(checks["reduced-identity-residuals"], 1e-6)
    _holds(checks["transplant-flat-identity"], 1e-6)
    _holds(checks["kernel-bound-flat-equality"], 1e-6)
    _holds(checks["entropy-flat-zero"], 5e-3)
    _holds(checks["lyh-static-flat-zero"], 2e-6)


def test_criterion_2_sphere_monotone_pack(sphere):
    checks, _ = sphere
    _holds(checks["kernel-oracle-sphere"], 1e-3)
    _holds(checks["kernel-bound-sphere"], 1e-5)
    assert checks["kernel-bound-sphere"].worst >= 0.0  # genuinely one-sided
    _holds(checks["reduced-identity-sphere"], 1e-4)
    _holds(checks["laplacian-slack-sphere"], 1e-4)
    _holds(checks["kernel-weight-derivative"], 1e-6)
    _holds(checks["reduced-volume-monotone"], 1e-5)
    _holds(checks["reduced-volume-sector-monotone"], 1e-5)
    _holds(checks["entropy-w-monotone"], 1e-4)


def test_criterion_3_hyperbolic_witnesses_never_pass(hyperbolic):
    checks, res = hyperbolic
    for slug in (
        "kernel-bound-hyperbolic-witness",
        "transplant-hyperbolic-witness",
        "sector-volume-growth-witness",
    ):
        c = checks[slug]
        assert c.verdict == "hypothesis-not-met", slug
        assert c.verdict != "holds"
        assert -c.worst >= 1e-3, "%s: witness magnitude %g" % (slug, -c.worst)
    assert res.exit_code == 0  # expected failure of an unasserted bound


def test_criterion_4_conjugate_and_cut_structure(sphere):
    checks, _ = sphere
    _holds(checks["conjugate-fold-location"], 1e-6)
    _holds(checks["cut-locus-threshold"], 1e-6)
    _holds(checks["jacobian-matches-differences"], 1e-5)


def test_criterion_5_cylinder_collapse_ladder(collapse):
    checks, res = collapse
    _holds(checks["collapse-kappa-decreasing"], 1e-12)
    _holds(checks["collapse-volume-decreasing"], 1e-12)
    c = checks["collapse-single-constant"]
    assert c.verdict == "holds"
    assert c.worst > 0  # the constant 50 clears the ladder with room
    assert "empirical C = 0.0246" in c.detail
    ladder = res.tables["collapse_ladder"]
    eps = [row[0] for row in ladder.rows]
    assert eps == [1.0, 0.3, 0.1]


def test_criterion_6_kahler_lyh_bound(kahler):
    checks, _ = kahler
    _holds(checks["kahler-mass-conservation"], 1e-6)
    _holds(checks["constant-data-homothety"], 1e-8)
    _holds(checks["lyh-static-flat-zero"], 2e-6)
    low = checks["lyh-near-delta-lower"]
    assert low.verdict == "holds"  # min margin >= -C h^2; here it is positive
    assert low.worst > 0.2
    _holds(checks["lyh-violation-shrinks"], 1e-12)


def test_criterion_7_subvariety_pack(bezout):
    checks, _ = bezout
    _holds(checks["line-kernel-equality"], 1e-6)
    _holds(checks["monomial-kernel-dominated"], 1e-9)
    gap = checks["unit-time-positive-gap"]
    assert gap.verdict == "holds" and gap.worst > 0.05  # strictly below 1/pi
    _holds(checks["small-time-flat-limit"], 0.02)
    _holds(checks["density-limit-degree-1"], 0.02)
    _holds(checks["density-limit-degree-2"], 0.02)
    _holds(checks["density-limit-degree-3"], 0.02)
    inc = checks["exp-density-increasing"]
    assert inc.verdict == "holds" and inc.worst > 0  # strictly increasing
    assert checks["exp-density-divergence"].verdict == "holds"
    assert checks["two-scale-gate"].verdict == "holds"
    _holds(checks["line-two-scale-quotient"], 1e-9)


def test_criterion_8_cross_oracle_consistency(flat, sphere, tmp_path):
    flat_checks, flat_res = flat
    sphere_checks, sphere_res = sphere
    _holds(sphere_checks["reduced-volume-route-gap"], 1e-4)
    assert flat_res.tables["entropy"].meta["quad_gap"] <= 1e-8
    assert sphere_res.tables["entropy"].meta["quad_gap"] <= 1e-8

    # identical config must reproduce every output file byte for byte
    cfg = _cfg("cylinder_collapse")
    a, b = tmp_path / "a", tmp_path / "b"
    files_a = emit_report(run_suite(cfg), cfg, a)
    files_b = emit_report(run_suite(cfg), cfg, b)
    assert [p.name for p in files_a] == [p.name for p in files_b]
    for pa, pb in zip(files_a, files_b):
        assert pa.read_bytes() == pb.read_bytes(), pa.name


def test_runner_front_door_agrees_with_the_gate(tmp_path, capsys):
    """The CLI exit codes match what the suites report directly."""
    p = tmp_path / "ok.cfg"
    p.write_text("[experiment]\nname = flat_sanity\nout = %s\n" % (tmp_path / "out"))
    assert main(["run", str(p)]) == 0
    bad = tmp_path / "bad.cfg"
    bad.write_text("[experiment]\nname = flat_sanity\nname = twice\n")
    assert main(["run", str(bad)]) == 2
    capsys.readouterr()
