"""Acceptance suite: one test class per criterion, each at its stated tolerance.

The terminal summary prints one PASS/FAIL line per criterion (see conftest).
"""
import json
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gravwitness.circuit import CircuitBuilder, composed_unitary, decompose_diag4
from gravwitness.cli import main
from gravwitness.engine import (
    PauliString,
    basis_state,
    evolve,
    expectation,
    fidelity_up_to_global_phase,
    init_zero,
    marginal_probabilities,
)
from gravwitness.errors import QasmParseError
from gravwitness.experiment import (
    ExperimentSpec,
    find_witness_interval,
    run_witness,
    sweep,
)
from gravwitness.noise import NoiseModel, apply_readout_error, builtin_ibmqx4_table, uniform_table
from gravwitness.qasm import emit_qasm, parse_qasm

PI = math.pi
GEOMETRY = "m1_kg = {m}\nm2_kg = {m}\nd_um = 450\ndelta_x_um = 250\n"
REFERENCE_WINDOW = (2.9113, 4.2647)


def closed_form(a, b):
    return abs(math.cos(b) - math.cos(a) + math.cos(b - a) - 1) / 2


def random_circuit(rng, n):
    b = CircuitBuilder(n)
    for _ in range(int(rng.integers(1, 30))):
        kind = int(rng.integers(0, 6 if n > 1 else 5))
        q = int(rng.integers(n))
        if kind == 5:
            b.cx(q, int(rng.choice([i for i in range(n) if i != q])))
        elif kind == 4:
            b.rz(float(rng.uniform(-2 * PI, 2 * PI)), q)
        else:
            getattr(b, ("h", "x", "s", "sdg")[kind])(q)
    b.measure(*range(n))
    return b.build()


@pytest.mark.criterion(1, "circuit W equals closed form on 1000 random (a, b), < 5 s")
class TestCriterion1:
    def test_closed_form(self, rng):
        pairs = rng.uniform(-2 * PI, 2 * PI, size=(1000, 2))
        start = time.perf_counter()
        worst = max(abs(run_witness(ExperimentSpec(a=a, b=b)).w - closed_form(a, b)) for a, b in pairs)
        elapsed = time.perf_counter() - start
        assert worst <= 1e-10
        assert elapsed < 5


@pytest.mark.criterion(2, "Diag4 decomposition equals the diagonal unitary; W agrees")
class TestCriterion2:
    def test_unitary(self, rng):
        for phi, a, b in rng.uniform(-2 * PI, 2 * PI, size=(100, 3)):
            phases = (phi, phi + a, phi + b, phi)
            ref = CircuitBuilder(2)
            ref.diag4(phases, 0, 1)
            u = composed_unitary(ref.build())
            v = composed_unitary(decompose_diag4(*phases))
            # |tr(U^dag V)| / dim = 1 exactly when V = e^{i g} U
            assert abs(np.trace(u.conj().T @ v)) / 4 == pytest.approx(1, abs=1e-10)
            overlap = np.trace(u.conj().T @ v) / 4
            np.testing.assert_allclose(v, overlap * u, atol=1e-10)

    def test_witness(self, rng):
        for phi, a, b in rng.uniform(-2 * PI, 2 * PI, size=(100, 3)):
            diag = run_witness(ExperimentSpec(a=a, b=b, phi=phi)).w
            gates = run_witness(ExperimentSpec(a=a, b=b, phi=phi, decomposed=True)).w
            assert abs(diag - gates) <= 1e-10


@pytest.mark.criterion(3, "a=0, b=pi gives W=2 exactly and within 3 stderr at 8192 shots")
class TestCriterion3:
    def test_exact(self):
        r = run_witness(ExperimentSpec(a=0, b=PI))
        assert abs(r.e_xz + 1) <= 1e-10
        assert abs(r.e_yy + 1) <= 1e-10
        assert abs(r.w - 2) <= 1e-10

    def test_shots(self):
        hits = 0
        for seed in range(100):
            r = run_witness(ExperimentSpec(a=0, b=PI, shots=8192, seed=seed))
            hits += abs(r.w - 2) <= 3 * r.stderr
        assert hits >= 99


@pytest.mark.criterion(4, "noiseless interval (pi/2, 3pi/2) contains the reference window; noisy is a strict sub-interval")
class TestCriterion4:
    def test_brackets(self):
        start = time.perf_counter()
        (lo, hi), = find_witness_interval(ExperimentSpec(), 0, 2 * PI, tol=1e-6)
        (nlo, nhi), = find_witness_interval(ExperimentSpec(noise=NoiseModel(builtin_ibmqx4_table())), 0, 2 * PI)
        elapsed = time.perf_counter() - start
        assert abs(lo - PI / 2) <= 1e-6 and abs(hi - 3 * PI / 2) <= 1e-6
        assert lo < REFERENCE_WINDOW[0] and REFERENCE_WINDOW[1] < hi
        assert PI / 2 < nlo < nhi < 3 * PI / 2
        assert elapsed < 10


@pytest.mark.criterion(5, "interval tau bounds scale as 1/(m1 m2); discrepancy note present")
class TestCriterion5:
    def interval(self, capsys, tmp_path, mass):
        cfg = tmp_path / f"m{mass}.cfg"
        cfg.write_text(GEOMETRY.format(m=mass))
        assert main(["interval", str(cfg), "--report", "tau"]) == 0
        return json.loads(capsys.readouterr().out)

    def test_ratio(self, capsys, tmp_path):
        light = self.interval(capsys, tmp_path, "1e-14")
        heavy = self.interval(capsys, tmp_path, "1e-12")
        assert len(light["intervals"]) == len(heavy["intervals"]) == 1
        for key in ("tau_low_s", "tau_high_s"):
            assert heavy["intervals"][0][key] / light["intervals"][0][key] == pytest.approx(1e-4, rel=1e-9)
        assert "46.7439" in light["tau_note"]
        factor = float(light["tau_note"].split("is ")[1].split("x")[0])
        assert factor == pytest.approx(2.02, abs=0.01)


@pytest.mark.criterion(6, "zero-rate noise is a no-op; depolarizing never raises W; readout scales <Z> by 1-2r")
class TestCriterion6:
    def test_zero_rate(self, rng):
        zero = NoiseModel(uniform_table(4, 0.0, 0.0))
        for a, b in rng.uniform(-2 * PI, 2 * PI, size=(50, 2)):
            for decomposed in (False, True):
                clean = run_witness(ExperimentSpec(a=a, b=b, decomposed=decomposed))
                noisy = run_witness(ExperimentSpec(a=a, b=b, decomposed=decomposed, noise=zero))
                assert abs(clean.w - noisy.w) <= 1e-10

    @pytest.mark.parametrize("p", [1e-3, 0.01, 0.05, 0.2])
    def test_depolarizing_monotone(self, p):
        clean = sweep(ExperimentSpec(), 0, 2 * PI, 0.02)
        noisy = sweep(ExperimentSpec(noise=NoiseModel(uniform_table(4, p), readout=False)), 0, 2 * PI, 0.02)
        assert max(n.w - c.w for n, c in zip(noisy, clean)) <= 1e-9

    @pytest.mark.parametrize("r", [0.0, 0.013, 0.25, 0.5, 0.9])
    def test_readout_scaling(self, r):
        table = uniform_table(1, 0.0, r)
        for bits, z in (("0", 1.0), ("1", -1.0)):
            state = basis_state(bits).to_mixed()
            assert expectation(state, PauliString("Z", (0,))) == z
            probs = apply_readout_error(marginal_probabilities(state, [0]), [0], table)
            assert probs[0] - probs[1] == pytest.approx(z * (1 - 2 * r), abs=1e-15)


@pytest.mark.criterion(7, "QASM round trip on 50 random circuits; byte-deterministic emit; structured fuzz errors")
class TestCriterion7:
    def test_round_trip(self, rng):
        for _ in range(50):
            c = random_circuit(rng, int(rng.integers(1, 6)))
            text = emit_qasm(c)
            back = parse_qasm(text)
            assert emit_qasm(c) == text and emit_qasm(back) == text
            f = fidelity_up_to_global_phase(evolve(init_zero(c.num_qubits), c),
                                            evolve(init_zero(c.num_qubits), back))
            assert f == pytest.approx(1, abs=1e-10)

    @settings(max_examples=500, deadline=None)
    @given(st.one_of(st.text(), st.binary()))
    def test_fuzz(self, data):
        try:
            parse_qasm(data)
        except QasmParseError as exc:
            assert exc.message


@pytest.mark.criterion(8, "shots-mode commands replay byte-identically from their manifests")
class TestCriterion8:
    @pytest.mark.parametrize("args", [
        ["run", "--shots", "8192", "--seed", "1", "--noise", "builtin"],
        ["sweep", "--shots", "2048", "--seed", "17", "--step", "0.1"],
    ])
    def test_replay(self, capsys, tmp_path, args):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(GEOMETRY.format(m="1e-14") + "tau_s = 12\n")
        first, second = tmp_path / "a", tmp_path / "b"
        first.mkdir()
        second.mkdir()
        out = first / "result.out"
        assert main([args[0], str(cfg), *args[1:], "--out", str(out)]) == 0
        assert main(["replay", str(out) + ".manifest.json", "--out-dir", str(second)]) == 0
        capsys.readouterr()
        assert (second / "result.out").read_bytes() == out.read_bytes()


@pytest.mark.criterion(9, "exact 315-point sweep < 1 s; 8192-shot 201-point sweep < 60 s")
class TestCriterion9:
    def test_exact_sweep(self):
        run_witness(ExperimentSpec(a=0.1, b=0.2))  # warm caches
        start = time.perf_counter()
        rows = sweep(ExperimentSpec(), 0, 2 * PI, 0.02)
        elapsed = time.perf_counter() - start
        assert len(rows) == 315
        assert elapsed < 1

    def test_shots_sweep(self):
        start = time.perf_counter()
        rows = sweep(ExperimentSpec(shots=8192, seed=0), 0, 2 * PI, 2 * PI / 200)
        elapsed = time.perf_counter() - start
        assert len(rows) == 201
        assert elapsed < 60
