import math
import warnings

import numpy as np
import pytest

from gravwitness.engine import MixedState, PauliString, PureState, apply_kraus, basis_state, expectation
from gravwitness.errors import ConfigError
from gravwitness.noise import (
    CalibrationTable,
    QubitCalibration,
    apply_damping,
    apply_depolarizing,
    apply_readout_error,
    builtin_ibmqx4_table,
    depolarizing_kraus,
    flip_readout,
    load_calibration_csv,
    uniform_table,
)

from conftest import PAULIS, random_density

PLUS = PureState(np.array([1, 1]) / math.sqrt(2)).to_mixed()


class TestBuiltinTable:
    def test_values(self):
        t = builtin_ibmqx4_table()
        assert len(t) == 4
        assert t[0].readout_error == 0.048
        assert t[3].gate_error == 3.44e-3
        assert t[1].t2_us == 64.60
        assert [(c.t1_us, c.t2_us, c.gate_error, c.readout_error) for c in t.qubits] == [
            (50.81, 14.70, 0.86e-3, 4.80e-2),
            (50.00, 64.60, 1.46e-3, 5.30e-2),
            (47.90, 45.00, 1.29e-3, 9.80e-2),
            (37.40, 15.10, 3.44e-3, 5.70e-2),
        ]

    def test_missing_entry(self):
        with pytest.raises(ConfigError):
            builtin_ibmqx4_table()[4]

    def test_rate_bounds(self):
        with pytest.raises(ConfigError):
            QubitCalibration(10, 10, 1.5, 0)


class TestDepolarizing:
    def test_zero_rate_identity(self, rng):
        rho = MixedState(random_density(rng, 2))
        out = apply_depolarizing(rho, [0, 1], uniform_table(2, 0.0))
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-12)

    @pytest.mark.parametrize("p", [0.01, 0.2, 0.75])
    def test_sigma_x_shrinks(self, p):
        out = apply_depolarizing(PLUS, [0], uniform_table(1, p))
        assert expectation(out, PauliString("X", (0,))) == pytest.approx(1 - 4 * p / 3, abs=1e-12)

    def test_matches_kraus_sum(self, rng):
        rho = random_density(rng, 3)
        p = 0.137
        oracle = (1 - p) * rho
        for name in "XYZ":
            full = np.kron(np.kron(np.eye(2), PAULIS[name]), np.eye(2))  # acts on q1
            oracle = oracle + p / 3 * full @ rho @ full
        out = apply_depolarizing(MixedState(rho), [1], uniform_table(3, p))
        np.testing.assert_allclose(out.matrix, oracle, atol=1e-12)
        via_engine = apply_kraus(MixedState(rho), depolarizing_kraus(p), [1])
        np.testing.assert_allclose(via_engine.matrix, oracle, atol=1e-12)

    def test_purity_monotone(self, rng):
        rho = MixedState(random_density(rng, 2, rank=1))
        table = builtin_ibmqx4_table()
        last = rho.purity()
        for _ in range(30):
            rho = apply_depolarizing(rho, [0, 1], table)
            assert rho.purity() <= last + 1e-12
            last = rho.purity()


class TestChannelsCPTP:
    def test_random_states(self, rng):
        table = CalibrationTable(builtin_ibmqx4_table().qubits, 60.0, 5000.0)
        for _ in range(20):
            rho = MixedState(random_density(rng, 4, rank=int(rng.integers(1, 5))))
            for out in (apply_depolarizing(rho, [0, 3], table), apply_damping(rho, [1, 2], table)):
                assert abs(np.trace(out.matrix).real - 1) < 1e-10
                np.testing.assert_allclose(out.matrix, out.matrix.conj().T, atol=1e-12)
                assert np.linalg.eigvalsh(out.matrix).min() >= -1e-8


class TestDamping:
    def test_zero_duration(self, rng):
        rho = MixedState(random_density(rng, 1))
        out = apply_damping(rho, [0], uniform_table(1), dt_ns=0.0)
        np.testing.assert_allclose(out.matrix, rho.matrix)

    def test_t1_population(self):
        table = uniform_table(1, t1_us=40.0, t2_us=30.0)
        out = apply_damping(basis_state("1").to_mixed(), [0], table, dt_ns=40_000.0)
        assert out.matrix[1, 1].real == pytest.approx(math.exp(-1), abs=1e-6)

    def test_t2_coherence(self):
        table = uniform_table(1, t1_us=40.0, t2_us=30.0)
        out = apply_damping(PLUS, [0], table, dt_ns=30_000.0)
        assert abs(expectation(out, PauliString("X", (0,)))) == pytest.approx(math.exp(-1), abs=1e-6)

    def test_clamps_t2(self):
        table = uniform_table(1, t1_us=10.0, t2_us=50.0)
        with pytest.warns(UserWarning, match="clamping"):
            out = apply_damping(PLUS, [0], table, dt_ns=20_000.0)
        # effective T2 = 20 us
        assert expectation(out, PauliString("X", (0,))) == pytest.approx(math.exp(-1), abs=1e-6)

    def test_table_not_clamped(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            apply_damping(MixedState(np.eye(16) / 16), [0, 1, 2, 3], builtin_ibmqx4_table())


class TestReadout:
    def test_zero_rate(self):
        p = np.array([0.1, 0.2, 0.3, 0.4])
        np.testing.assert_allclose(apply_readout_error(p, [0, 1], uniform_table(2)), p)

    def test_full_flip(self):
        table = CalibrationTable((QubitCalibration(1, 1, 0, 1.0), QubitCalibration(1, 1, 0, 0.0)))
        p = np.array([0.1, 0.2, 0.3, 0.4])  # index bit 0 = qubit 0
        np.testing.assert_allclose(apply_readout_error(p, [0, 1], table), [0.2, 0.1, 0.4, 0.3])

    def test_z_scaling(self):
        out = apply_readout_error(np.array([1.0, 0.0]), [0], builtin_ibmqx4_table())
        assert out[0] - out[1] == pytest.approx(0.904, abs=1e-15)

    def test_stochastic_flips(self, rng):
        table = builtin_ibmqx4_table()
        idx = flip_readout(np.zeros(200_000, dtype=int), [2], table, rng)
        assert abs(idx.mean() - 0.098) < 3 * math.sqrt(0.098 * 0.902 / 200_000)


class TestCalibrationCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "cal.csv"
        rows = builtin_ibmqx4_table().to_rows()
        path.write_text("qubit,t1_us,t2_us,gate_error,readout_error\n" + "".join(
            f"{r['qubit']},{r['t1_us']},{r['t2_us']},{r['gate_error']},{r['readout_error']}\n" for r in rows))
        assert load_calibration_csv(path).qubits == builtin_ibmqx4_table().qubits

    def test_bad_header(self, tmp_path):
        path = tmp_path / "cal.csv"
        path.write_text("q,t1,t2\n0,1,1\n")
        with pytest.raises(ConfigError):
            load_calibration_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_calibration_csv(tmp_path / "nope.csv")

    def test_malformed_value(self, tmp_path):
        path = tmp_path / "cal.csv"
        path.write_text("qubit,t1_us,t2_us,gate_error,readout_error\n0,abc,1,0,0\n")
        with pytest.raises(ConfigError):
            load_calibration_csv(path)
