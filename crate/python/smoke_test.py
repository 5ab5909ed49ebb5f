#!/usr/bin/env python3
"""Smoke test for the ewasim_py extension module.

Builds are not triggered here; compile the module first with

    cargo build --release -p ewasim-py

then run this script. It locates the cdylib under target/, loads it under
the importable name, and exercises the main surface: system construction,
the closed-form dressing, a preset run, a decay-rate sweep, and the linear
algebra primitives.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def locate_built_lib() -> Path:
    for profile in ("release", "debug"):
        p = ROOT / "target" / profile / "libewasim_py.so"
        if p.exists():
            return p
    sys.exit(
        "libewasim_py.so not found; build it first:\n"
        "    cargo build --release -p ewasim-py"
    )


def approx(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main() -> None:
    lib = locate_built_lib()
    staging = Path(tempfile.mkdtemp(prefix="ewasim-py-"))
    shutil.copy2(lib, staging / "ewasim_py.so")
    sys.path.insert(0, str(staging))
    import ewasim_py as ew

    # Reference three-level system: Gamma_3 = 5, g = 0.5, c_31 = c_32 = 0.5.
    sys3 = ew.BlockSystem(
        [0.0],
        [5.0],
        [[0.0 + 0j, 0.5 + 0j], [0.5 + 0j, 1.0 + 0j]],
        [[0.5 + 0j, 0.5 + 0j]],
    )
    assert sys3.validate() == []
    assert sys3.dim_a == 1 and sys3.dim_b == 2

    h = sys3.full_hamiltonian()
    assert approx(h[0][0], -5j) and approx(h[1][2], 0.5)

    # Closed-form dressing entries.
    db = sys3.db_ewa()
    assert approx(db[0][0], 0.05)
    assert approx(db[0][1], 0.25 / (5 - 1j))

    # The dressing matches its defining window integrals at Gamma*dt = 30.
    _, db_num = sys3.d_blocks_numeric(6.0, 2000)
    worst = max(
        abs(db_num[i][j] - db[i][j]) for i in range(2) for j in range(2)
    )
    assert worst < 1e-6 * max(abs(db[i][j]) for i in range(2) for j in range(2))

    # Closed-form bound at long times: (0.5 + 0.5) / 5.
    psi0 = [0j, 0j, 1 + 0j]
    assert approx(sys3.psi_a_bound(psi0, 1e6), 0.2)

    # Preset run: high fidelity in the strong-decay regime.
    sc = ew.Scenario.preset("fig2a")
    res = sc.run()
    assert len(res.times) == 401
    assert res.min_f_ewa() >= 0.99
    assert all(f == 0 for f in res.flags)
    assert all(n <= 1 + 1e-9 for n in res.norm_full)

    # Zeno sweep: the normalized fidelity floor rises with the decay rate.
    rows = ew.Scenario.preset("fig4").gamma_sweep([2.0, 5.0, 10.0, 100.0])
    mins = [r.min_f_zn for r in rows]
    assert all(b >= a for a, b in zip(mins, mins[1:]))
    assert mins[-1] >= 0.99
    # ... and the dressing magnitude falls roughly like 1/Gamma.
    ratio = rows[0].max_db_entry / rows[-1].max_db_entry
    assert 40 < ratio < 60

    # Master-equation cross-check.
    assert sys3.equivalence_distance(psi0, 2.0, 10) <= 1e-6

    # Linear algebra primitives.
    ident = ew.expm([[0j, 0j], [0j, 0j]])
    assert approx(ident[0][0], 1) and approx(ident[0][1], 0)
    rot = ew.expm([[0j, -1j * math.pi], [-1j * math.pi, 0j]])
    assert approx(rot[0][0], -1, 1e-12)
    vals, _ = ew.eig([[0j, 0.7 + 0j], [0.7 + 0j, 0j]])
    assert approx(sorted(v.real for v in vals)[0], -0.7, 1e-9)

    # Scenario JSON round trip.
    again = ew.Scenario.from_json(sc.to_json())
    assert again.label == sc.label
    assert again.sweep_values == sc.sweep_values

    print("smoke test passed:", ew.__version__, "presets:", ew.preset_names())


if __name__ == "__main__":
    main()
