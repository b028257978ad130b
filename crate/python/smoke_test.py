#!/usr/bin/env python3
"""Smoke test for the soq_py extension module.

Builds (or reuses) the cdylib, imports it, and exercises the main entry
points: square classes, Hilbert symbols, representability with exact
witnesses, embedding decisions, generator synthesis with certificate
verification, conjugacy summaries, and the finite-field oracle.

Usage: python3 python/smoke_test.py [--no-build]
"""

import json
import shutil
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_extension():
    subprocess.run(
        ["cargo", "build", "-p", "soq-py", "--release"],
        cwd=REPO,
        check=True,
    )


def import_module():
    lib = REPO / "target" / "release" / "libsoq_py.so"
    if not lib.exists():
        sys.exit(f"missing {lib}; run cargo build -p soq-py --release first")
    stage = Path(tempfile.mkdtemp(prefix="soq_py_"))
    shutil.copy(lib, stage / "soq_py.so")
    sys.path.insert(0, str(stage))
    import soq_py

    return soq_py


def main():
    if "--no-build" not in sys.argv:
        build_extension()
    soq = import_module()

    # field layer
    q = soq.Field("Q")
    assert q.characteristic == 0
    assert q.reduce_square_class("18") == "2"
    assert q.reduce_square_class("4/9") == "1"
    assert q.is_square("49/4") and not q.is_square("5")
    f7 = soq.Field("F7")
    assert f7.characteristic == 7
    assert f7.reduce_square_class("3") == "3"  # least nonresidue mod 7
    assert soq.legendre_symbol(2, 7) == 1
    assert soq.legendre_symbol(7, 7) == 0

    # Hilbert symbols
    assert soq.hilbert_symbol("-1", "-1", "oo") == -1
    assert soq.hilbert_symbol("-1", "-1", "2") == -1
    assert soq.hilbert_symbol("1", "-7", "3") == 1

    # forms: isotropy, representability, exact witnesses
    unit = soq.TernaryForm("Q", "1,1,1")
    assert not unit.is_isotropic()
    assert unit.represents("3") and not unit.represents("7")
    v = unit.representation_vector("3")
    assert sum(Fraction(x) ** 2 for x in v) == 3
    lorentz = soq.TernaryForm("Q", "-1,-1,1")
    assert lorentz.is_isotropic()
    w = lorentz.isotropy_vector()
    assert -Fraction(w[0]) ** 2 - Fraction(w[1]) ** 2 + Fraction(w[2]) ** 2 == 0
    assert any(Fraction(x) != 0 for x in w)
    scaled = soq.TernaryForm("Q", "1,4,9")
    assert unit.isometric(scaled)
    p = unit.explicit_isometry(scaled)
    # check P^T Q' P = Q exactly, in Fractions
    qp = [Fraction(1), Fraction(4), Fraction(9)]
    pm = [[Fraction(x) for x in row] for row in p]
    for i in range(3):
        for j in range(3):
            got = sum(pm[k][i] * qp[k] * pm[k][j] for k in range(3))
            assert got == (1 if i == j else 0), (i, j, got)

    # cyclotomic data
    assert soq.alpha_beta(4, "Q") == ("0", "-1", "2")
    assert soq.alpha_beta(5, "Q") is None
    alpha, beta, half = soq.alpha_beta(5, "F11")
    assert alpha == "7"

    # embedding decisions
    ok, trace = soq.embeds("S4", "Q", "1,1,1")
    assert ok, trace
    ok, trace = soq.embeds("A5", "Q", "1,1,1")
    assert not ok and any("sqrt(5)" in t for t in trace)
    ok, _ = soq.embeds("C4", "Q", "-1,-1,1")
    assert ok

    # synthesis and certificate round trip
    cert = soq.synthesize("D8", "Q", "1,1,1")
    passed, detail = soq.verify_certificate(cert)
    assert passed, detail
    tampered = json.loads(cert)
    tampered["generators"][0][1][1] = "17"
    passed, detail = soq.verify_certificate(json.dumps(tampered))
    assert not passed

    # conjugacy
    summary = json.loads(soq.conjugacy_summary("C2", "F7", "1,1,1"))
    assert summary["mode"]["count"] == "2"
    assert soq.dihedral_same_class("5", "10", 4, "Q", "1,1,1")
    assert not soq.dihedral_same_class("7", "1", 3, "Q", "1,1,1")

    # oracle
    census = json.loads(soq.oracle_census(3, "1,1,1"))
    assert census["group_order"] == "24"
    report = json.loads(soq.oracle_cross_check(5, "1,1,1"))
    assert report["all_pass"], [c for c in report["checks"] if not c["pass"]]

    print("smoke test: OK")


if __name__ == "__main__":
    main()
