import json
import os
import pathlib

import pytest

import kmd

ROOT = pathlib.Path(os.environ.get("KMD_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


def test_field_arithmetic():
    F = kmd.field(1, ["t"])
    t = kmd.var(F, 1)
    assert str(t * t + t) == str(kmd.wp(t))
    assert (t / t).is_one()
    K = kmd.extension(F, "alpha", "t^2")
    a = kmd.alpha(K)
    assert kmd.wp(a) == kmd.lift(t * t, K)
    assert str(kmd.trace(a)) == "1"


def test_hyperbolic_plane_has_chain():
    F = kmd.field(1, ["t"])
    t = kmd.elem(F, "t")
    q = kmd.pair(t, kmd.elem(F, "0"))
    r = kmd.witt_trivial(q)
    assert r["verdict"] == "yes"
    assert len(r["chain"]) == 1


def test_anisotropic_pair_is_witt_nontrivial():
    F = kmd.field(1, ["t"])
    q = kmd.unit_pair(kmd.elem(F, "t^-1"))
    assert kmd.witt_trivial(q)["verdict"] == "no"
    assert kmd.arf(q) == kmd.elem(F, "1/t")


def test_forms_compose():
    F = kmd.field(1, ["t"])
    t = kmd.elem(F, "t")
    one = kmd.elem(F, "1")
    q = kmd.unit_pair(t)
    s = q + t * q
    assert s.dim == 4
    assert kmd.witt_equal(kmd.pfister([t], t), s)["verdict"] == "yes"
    assert kmd.witt_trivial(q + q)["verdict"] == "yes"
    assert kmd.hyperbolic(F, 2).dim == 4
    assert kmd.scale(one, q).dim == 2


def test_transfer_and_residue():
    F = kmd.field(1, ["x", "t"])
    K = kmd.extension(F, "alpha", "x^2")
    q = kmd.unit_pair(kmd.elem(K, "alpha*t"))
    assert kmd.transfer(q).dim == 4
    assert kmd.transfer(q).field == F
    d = kmd.elem(F, "t^2 + t + x")
    r = kmd.residue(kmd.scale(kmd.elem(F, "t"), kmd.unit_pair(d)), "t", kind="Delta")
    assert str(r) == "[1, x]"


def test_cohomology_classes():
    F = kmd.field(1, ["t"])
    t = kmd.elem(F, "t")
    c = kmd.symbol_class(F, [(t * t + t, [t])])
    assert kmd.zero_test(c)["verdict"] == "yes"
    assert kmd.zero_test(kmd.clifford(kmd.pfister([t], kmd.elem(F, "t^-1"))))["verdict"] == "yes"
    e = kmd.clifford(kmd.pfister([t], kmd.elem(F, "1")))
    assert e.degree == 1
    assert kmd.zero_test(e)["verdict"] == "no"
    assert kmd.zero_test(kmd.e_map(kmd.hyperbolic(F), 1))["verdict"] == "yes"


def test_descent_of_a_biquaternion_algebra():
    F = kmd.field(1, ["t"])
    K = kmd.extension(F, "alpha", "t^2")
    B = kmd.biquat(kmd.quat(kmd.elem(K, "t"), kmd.elem(K, "t + 1")),
                   kmd.quat(kmd.elem(K, "1"), kmd.elem(K, "t")))
    assert kmd.albert_form(B).dim == 6
    assert kmd.cor_zero(B)["verdict"] == "yes"
    r = kmd.delta_decide(B)
    assert r["verdict"] == "descends"
    assert r["certificate_verified"]
    assert r["phi0"] is not None


def test_unsupported_place_raises():
    F = kmd.field(1, ["x", "t"])
    q = kmd.unit_pair(kmd.elem(F, "t"))
    with pytest.raises(kmd.Unsupported):
        kmd.residue(q, kmd.elem(F, "x*t^2 + t + 1"))
    with pytest.raises(kmd.KmdError):
        kmd.elem(F, "y")


def test_script_run_and_verify():
    text = (ROOT / "scenarios" / "descended.kmd").read_text()
    report, errors = kmd.run_script(text, seed=3)
    assert errors == 0
    doc = json.loads(report)
    assert doc["seed"] == 3
    assert doc["statements"][-1]["result"]["verdict"] == "descends"
    checked, failures = kmd.verify_report(report)
    assert failures == 0
    assert json.loads(checked)["mode"] == "verify"
