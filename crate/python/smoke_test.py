"""Smoke test for the spinwitness_py extension module.

Build and install first:
    cd crates/python && maturin build --release -o dist && pip install dist/*.whl
"""

import json
import math

import spinwitness_py as sw


def close(a, b, tol=1e-6):
    return abs(a - b) <= tol


def main():
    jx, jy, jz = sw.spin_matrices(1)
    assert close(jz[0][0].real, 0.5) and close(jx[0][1].real, 0.5)

    d3 = sw.DotWitness([1, 1, 1])
    assert close(d3.max_violation(), 2 * math.sqrt(3))
    spec = d3.spectrum()
    assert close(sum(spec), 0.0, 1e-9)

    c4 = sw.CrossWitness([1, 1, 1, 1])
    assert close(c4.max_violation(), 2 * math.sqrt(6))

    ghz = sw.QuantumState.ghz(3)
    r = d3.optimize_frames(ghz, restarts=16, seed=1)
    assert close(r.value, 1.5 * math.sqrt(3), 1e-3), r

    psi4 = sw.QuantumState.psi4()
    d4 = sw.DotWitness([1, 1, 1, 1], ordering=[0, 3, 2, 1])
    assert close(d4.expectation(psi4), 4 * math.sqrt(3), 1e-9)

    mk = sw.optimize_mk(sw.QuantumState.ghz(2), restarts=8)
    assert close(mk.value, math.sqrt(2), 1e-3)

    prod = sw.QuantumState.random_product([1, 2], 7)
    assert abs(sw.DotWitness([1, 2]).expectation(prod)) <= 1 + 1e-10

    dur = sw.QuantumState.dur(4)
    assert dur.min_partial_transpose_eigenvalue([0]) >= -1e-10
    assert dur.min_partial_transpose_eigenvalue([0, 1]) < -1e-6

    again = sw.QuantumState.from_text(psi4.to_text())
    assert again.amplitudes() == psi4.amplitudes()

    ratios = sw.ratio_curve(4, "cross")
    assert [n for n, _ in ratios] == [2, 3, 4]
    assert close(ratios[1][1], math.sqrt(2))

    report = json.loads(sw.run_command("table1", sites=3))
    assert report["all_targets_met"], report

    try:
        sw.DotWitness([1, 1], ordering=[0, 0])
    except ValueError:
        pass
    else:
        raise AssertionError("invalid ordering accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
