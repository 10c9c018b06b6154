"""Smoke test for the `lzs` extension module.

Build and install first, e.g. `maturin develop --release -m crates/python/Cargo.toml`.
"""

import math

import lzs


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    close(lzs.bessel_j(2, 10.0), 0.2546303136851206, 1e-14)
    close(lzs.assoc_laguerre(3, 0, 1.0), -2.0 / 3.0, 1e-14)
    close(lzs.displaced_fock_overlap(0, 0, 0.2), math.exp(-0.02), 1e-15)

    q = lzs.QubitSpec(0.4, 2.0)
    close(lzs.rabi_freq_semiclassical(q, 10.0, 2), 0.4 * 0.2546303136851206, 1e-14)
    rows = lzs.comparison_grid(lzs.QubitSpec(1.0, 0.0), 0.1, 0, [10, 100, 1000])
    assert [r[0] for r in rows] == [10, 100, 1000]
    assert all(abs(r[1] - r[2]) < 0.05 for r in rows)
    offset, _ = lzs.fit_amplitude_shift(lzs.QubitSpec(1.0, 0.0), 0.1, 0, list(range(200, 1001, 10)))
    close(offset, 0.4967, 0.01)

    # bare flopping at the gap frequency
    grid = lzs.TimeGrid(0.0, 10.0, 101)
    tr = lzs.propagate_semiclassical(lzs.QubitSpec(1.0, 0.0), lzs.SemiclassicalDrive(0.0), lzs.QubitState.down(), grid)
    for t, p in zip(tr.times, tr.p_down):
        close(p, math.cos(t / 2) ** 2, 1e-10)

    # quantum picture, round trip of the spectral propagator
    c = lzs.CavityCoupling(0.25, 60)
    psi = lzs.JointState.coherent(lzs.QubitState.down(), 2.0, 60)
    prop = lzs.SpectralPropagator(q, c)
    back = prop.evolve(prop.evolve(psi, 12.5), -12.5)
    assert max(abs(a - b) for a, b in zip(psi.amplitudes(), back.amplitudes())) < 1e-10
    trace = prop.population_trace(psi, lzs.TimeGrid(0.0, 50.0, 500))
    assert len(trace) == 500 and abs(trace.p_down[0] - 1.0) < 1e-12

    try:
        lzs.propagate_quantum(q, lzs.CavityCoupling(0.1, 20), lzs.JointState.fock(lzs.QubitState.down(), 20, 20), grid)
    except lzs.NumericalError:
        pass
    else:
        raise AssertionError("expected a truncation leak")

    out = lzs.run_command("rabi-freq", [("gap", "1"), ("coupling", "0.1"), ("k", "0"), ("n", "0:100:50")])
    assert out["header"] == ["n", "omega_s", "omega_q", "a_eff"]
    assert len(out["rows"]) == 3 and out["metadata"]["command"] == "rabi-freq"
    try:
        lzs.run_command("rabi-freq", [("n", "")])
    except ValueError as e:
        assert "missing `gap`" in str(e)
    else:
        raise AssertionError("expected a configuration error")

    print("lzs", lzs.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
