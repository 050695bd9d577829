#!/usr/bin/env python3
"""Smoke test for the tetrafractal_py extension module.

Builds are produced by cargo (`cargo build -p tetrafractal-py`); this
script locates the shared library under target/, imports it, and runs a
quick end-to-end pass over every exposed operation. Pass --full to also
run the ten-point verification suite (takes about a minute).

Usage: python3 python/smoke_test.py [--full]
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / profile / "libtetrafractal_py.so"
        for profile in ("release", "debug")
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit(
            "libtetrafractal_py.so not found; run `cargo build -p tetrafractal-py`"
        )
    newest = max(built, key=lambda p: p.stat().st_mtime)
    stage = Path(tempfile.mkdtemp(prefix="tetrafractal_py_"))
    shutil.copy2(newest, stage / "tetrafractal_py.so")
    sys.path.insert(0, str(stage))
    import tetrafractal_py

    return tetrafractal_py


def check(label, condition):
    if not condition:
        sys.exit(f"FAIL: {label}")
    print(f"  ok: {label}")


def expect_value_error(label, fn):
    try:
        fn()
    except ValueError:
        print(f"  ok: {label} raises ValueError")
        return
    sys.exit(f"FAIL: {label} did not raise")


def main():
    tf = load_module()
    print(f"loaded tetrafractal_py {tf.__version__}")

    dims = tf.dimensions(edge=0.24455)
    check("dimensions x = 2d", abs(dims["x"] - 2 * dims["d"]) < 1e-15)
    check("dimensions x value", abs(dims["x"] - 0.14119100833032297) < 1e-12)

    asm = tf.generate_assembly(depth=2)
    check("assembly has 16 cells", len(asm["module_poses"]) == 16)
    check("assembly spins balance", sum(r["spin"] for r in asm["rotors"]) == 0)
    check(
        "disk area ratio is pi/(3 sqrt 3))",
        abs(asm["disks"]["area_ratio"] - tf.DISK_AREA_RATIO) < 1e-12,
    )
    check("disks do not overlap", not asm["disks"]["overlap_found"])

    inert = tf.assembly_inertia(3)
    check("inertia recursion matches closed form", inert["recursion_error"] < 1e-12)
    check("level-3 mass is 64 cells", abs(inert["mass"] - 64 * 0.74) < 1e-12)

    w0 = tf.hover_speed()
    check("hover speed", abs(w0 - 426.01056324931665) < 1e-9)
    heavy = tf.Params(mass=2 * 0.74)
    check(
        "hover speed scales with sqrt(mass)",
        abs(heavy.hover_speed() - w0 * math.sqrt(2)) < 1e-9,
    )
    check("params dict round trip", heavy.to_dict()["mass"] == 2 * 0.74)

    model = tf.linearize()
    check("A is 12x12", len(model["a"]) == 12 and len(model["a"][0]) == 12)
    check("B is 12x4", len(model["b"]) == 12 and len(model["b"][0]) == 4)
    check("gravity tilt coupling", model["a"][6][4] == tf.GRAVITY)

    maps = tf.assembly_maps(level=1)
    check("level-1 maps span 16 rotors", maps["rotor_count"] == 16)
    check("maps trim equals hover speed", abs(maps["trim_speed"] - w0) < 1e-9)

    grow = tf.growth(max_level=3)
    check(
        "force authority grows 4x per level",
        all(abs(g - 4) < 1e-9 for g in grow["force_ratios"]),
    )

    truss = tf.truss_scenario("top", depth=2, payload=10.0)
    check("truss has 96 members", len(truss["members"]) == 96)
    check("truss equilibrium", truss["summary"]["equilibrium_residual"] < 1e-8)
    check("no member buckles", not truss["summary"]["any_buckled"])

    faults = tf.search_min_failures(max_cardinality=5)
    check("minimum fatal fault count is 5", faults["min_failures"] == 5)
    check("fault witness", faults["witness"] == [0, 3, 4, 9, 12])
    sweep = tf.margin_sweep([1.2, 4.5])
    check(
        "margin sweep staircase",
        [row["min_failures"] for row in sweep] == [1, 5],
    )

    census = tf.classify_configs()
    check("256 configurations", census["total"] == 256)
    check("32 torque balanced", census["torque_balanced"] == 32)
    check("28 hover capable", census["hover_capable"] == 28)

    eigs = tf.closed_loop_eigenvalues()
    check("closed rate loop is stable", all(re < 0 for re, _ in eigs))
    check("stock gains", tuple(tf.stock_gains()["kp"]) == (6.0, 6.0, 4.0))

    trial = tf.hover_trial(perturbation={"p": 0.5}, duration=4.0)
    check("hover trial settles", trial["settled_at"] is not None)
    check("hover trial settles fast", trial["settled_at"] < 5.0)
    check("hover trial stays level", not trial["diverged"])

    expect_value_error("negative mass", lambda: tf.Params(mass=-1.0))
    expect_value_error("unknown parameter", lambda: tf.Params(massse=1.0))
    expect_value_error(
        "perturbation outside envelope",
        lambda: tf.hover_trial(perturbation={"phi": 0.5}),
    )
    expect_value_error("unknown scenario", lambda: tf.truss_scenario("bogus"))

    if "--full" in sys.argv[1:]:
        report = tf.run_verification()
        for row in report["results"]:
            mark = "PASS" if row["passed"] else "FAIL"
            print(f"  [{mark}] {row['id']:2}. {row['name']}")
        check("verification suite", report["all_passed"])

    print("PASS")


if __name__ == "__main__":
    main()
