#!/usr/bin/env python3
"""Smoke test for the weylquant Python extension.

Builds nothing itself: run `cargo build -p weylquant-py --release` first.
The script locates the compiled cdylib, imports it under the proper module
name, and replays a handful of frozen results.
"""

import json
import pathlib
import shutil
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_module():
    names = ["libweylquant_py.so", "libweylquant_py.dylib", "weylquant_py.dll"]
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "extension not found; run `cargo build -p weylquant-py --release` first"
        )
    staging = pathlib.Path(tempfile.mkdtemp(prefix="weylquant_py_"))
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy2(built, staging / f"weylquant_py{suffix}")
    sys.path.insert(0, str(staging))
    import weylquant_py

    return weylquant_py


def main():
    wq = load_module()

    pair = wq.Pair("A2", [[4, -2]])
    assert pair.rank == 2
    assert pair.weyl_order() == 6
    assert pair.weyl_k_order() == 2
    assert pair.rho_k() == [2, -1]

    # The ten-dimensional representation branches into four subgroup
    # characters, each with multiplicity one.
    branch = pair.branch([0, 6])
    assert branch == {
        (6, -6): 1,
        (4, -2): 1,
        (2, 2): 1,
        (0, 6): 1,
    }, branch

    # Characters from the formula and from the recursion agree.
    assert pair.character([2, 2]) == pair.freudenthal([2, 2])
    assert sum(pair.character([0, 6]).values()) == 10

    # Branching by signed partition counts, for a regular highest weight.
    assert pair.kostant_branching([2, 2], [2, 2]) == 1

    # The alternating multiplet for the trivial representation.
    multiplet = pair.gkrs([0, 0])
    assert len(multiplet) == 3
    assert (1, [0, 3]) in [(s, list(w)) for s, w in multiplet]

    # Quantisation of the singular coadjoint orbit.
    fixture = wq.Fixture.coadjoint(pair, [0, 6])
    assert fixture.num_points == 3
    assert fixture.num_orbits == 2
    assert fixture.multiplicity([0, 6]) == 1
    assert fixture.multiplicity([0, 0]) == 0
    spectrum = fixture.spectrum(8)
    assert spectrum == branch, spectrum

    report = json.loads(fixture.character_report())
    assert len(report["k_decomposition"]) == 4
    assert sum(c for _, c in report["character"]) == 10

    # The same fixture from JSON text.
    fixture2 = wq.Fixture.from_json(
        json.dumps(
            {
                "format": 1,
                "group": {"type": "A2", "k_simple_roots": [[4, -2]]},
                "points": [
                    {"id": "nu", "mu": [0, 6], "tangent_weights": [[2, 2], [-2, 4]]},
                    {"id": "wp", "mu": [6, -6], "tangent_weights": [[4, -2], [2, -4]]},
                    {"id": "wm", "mu": [-6, 0], "tangent_weights": [[-4, 2], [-2, -2]]},
                ],
            }
        )
    )
    assert fixture2.localization_character() == fixture.localization_character()

    # Comparison table against the regular-points-only formula.
    table = fixture.gp_table(8)
    assert any(delta != 0 for _, _, _, delta in table)

    # Errors surface as Python exceptions.
    try:
        pair.character([-2, 0])
    except ValueError:
        pass
    else:
        raise AssertionError("non-dominant weight must raise")

    print("smoke test passed")


if __name__ == "__main__":
    main()
