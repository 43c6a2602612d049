import math

import numpy as np
import pytest

from bgpc.checkers import CheckReport, check_subspace, check_jointsparse_dft, build_G
from bgpc.conditions import necessary_N
from bgpc.errors import DimensionError, EnumerationGuardError, ParameterError, PreconditionError, RankError
from bgpc.indexsets import IndexSet
from bgpc.instances import counterexample, random_jointsparse, random_subspace
from bgpc.matcore import dft, orthonormal_complement
from bgpc.transgroup import DftShiftScale, Scaling, Witness, apply_transform


class TestBuildG:
    def test_single_block(self):
        rng = np.random.default_rng(0)
        W = rng.standard_normal((3, 5))
        Y = rng.standard_normal((5, 1))
        assert np.allclose(build_G(W, Y), W @ np.diag(Y[:, 0]))

    def test_true_inverse_gain_in_null_space(self):
        inst = random_subspace(10, 3, 3, 1)
        W = orthonormal_complement(inst.A).conj().T
        assert np.abs(build_G(W, inst.Y) @ (1 / inst.lam0)).max() < 1e-9

    def test_matches_vec(self):
        rng = np.random.default_rng(2)
        A = rng.standard_normal((6, 2))
        Y = rng.standard_normal((6, 2))
        W = orthonormal_complement(A).conj().T
        x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        direct = (W @ np.diag(x) @ Y).flatten(order="F")
        assert np.abs(build_G(W, Y) @ x - direct).max() < 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            build_G(np.ones((2, 4)), np.ones((5, 1)))


class TestSubspaceChecker:
    def test_generic_identifiable(self):
        inst = random_subspace(10, 3, 3, 0)
        rep = check_subspace(inst.A, inst.Y)
        assert rep.identifiable and rep.g_ranks["A"] == 9
        # independent check: null space of G is exactly one-dimensional
        W = orthonormal_complement(inst.A).conj().T
        s = np.linalg.svd(build_G(W, inst.Y), compute_uv=False)
        assert s[-1] < 1e-10 * s[0] < s[-2]

    def test_dft_counterexample(self):
        ce = counterexample("subspace_f8")
        assert not check_subspace(ce.instance.A, ce.instance.Y).identifiable

    def test_below_necessary_bound(self):
        inst = random_subspace(10, 8, 2, 0)
        rep = check_subspace(inst.A, inst.Y)
        assert not rep.identifiable and rep.g_ranks["A"] <= 8
        assert rep.reason

    def test_zero_row(self):
        inst = random_subspace(10, 3, 3, 0)
        Y = inst.Y.copy()
        Y[2] = 0
        with pytest.raises(PreconditionError):
            check_subspace(inst.A, Y)

    def test_rank_deficient_basis(self):
        with pytest.raises(RankError):
            check_subspace(np.ones((6, 2)), np.ones((6, 2)))

    @pytest.mark.parametrize("seed", range(5))
    def test_scale_and_transform_invariance(self, seed):
        inst = random_subspace(8, 3, 2 + seed % 2, seed)
        base = check_subspace(inst.A, inst.Y).identifiable
        assert check_subspace(inst.A, (2 - 3j) * inst.Y).identifiable == base
        lam1, X1 = apply_transform(Scaling(), Witness(sigma=-0.3), inst.pair)
        assert check_subspace(inst.A, lam1[:, None] * (inst.A @ X1)).identifiable == base


class TestJointSparseChecker:
    def test_contiguous_identifiable(self):
        J = IndexSet.of(range(1, 6), 10)
        inst = random_jointsparse(10, 5, 5, J, 0)
        assert check_jointsparse_dft(inst.Y, J, 5).identifiable

    def test_periodic(self):
        J = IndexSet.of([1, 2, 6, 7], 10)
        inst = random_jointsparse(10, 4, 4, J, 0)
        rep = check_jointsparse_dft(inst.Y, J, 4)
        assert not rep.identifiable and rep.failing_support is not None

    def test_rank3_counterexample(self):
        ce = counterexample("jointsparse_rank3_7")
        rep = check_jointsparse_dft(ce.instance.Y, ce.instance.support, 4)
        assert not rep.identifiable
        assert "not a shift" in rep.reason

    def test_degenerate_counterexample(self):
        ce = counterexample("jointsparse_degenerate7")
        assert not check_jointsparse_dft(ce.instance.Y, ce.instance.support, 4).identifiable

    def test_diagnose_records_every_support(self):
        J = IndexSet.of([1, 2, 3], 7)
        inst = random_jointsparse(7, 3, 3, J, 0)
        rep = check_jointsparse_dft(inst.Y, J, 3, diagnose=True)
        assert len(rep.g_ranks) == math.comb(7, 3)
        assert rep.g_ranks[str(J)] == 6

    def test_short_circuit_keeps_failing_rank(self):
        inst = random_jointsparse(10, 7, 2, "uniform", 0)
        rep = check_jointsparse_dft(inst.Y, inst.support, 7)
        assert not rep.identifiable
        assert str(rep.failing_support) in rep.g_ranks

    def test_size_mismatch(self):
        inst = random_jointsparse(7, 3, 3, "uniform", 0)
        with pytest.raises(ParameterError):
            check_jointsparse_dft(inst.Y, inst.support, 4)

    def test_guard(self):
        inst = random_jointsparse(7, 3, 3, "uniform", 0)
        with pytest.raises(EnumerationGuardError):
            check_jointsparse_dft(inst.Y, inst.support, 3, guard=10)

    def test_zero_row(self):
        inst = random_jointsparse(7, 3, 3, "uniform", 0)
        Y = inst.Y.copy()
        Y[0] = 0
        with pytest.raises(PreconditionError):
            check_jointsparse_dft(Y, inst.support, 3)

    @pytest.mark.parametrize("seed", range(4))
    def test_shift_invariance(self, seed):
        inst = random_jointsparse(8, 3, 3, "uniform", seed)
        base = check_jointsparse_dft(inst.Y, inst.support, 3).identifiable
        lam1, X1 = apply_transform(DftShiftScale(), Witness(sigma=1.5, shift=3), inst.pair)
        Y1 = lam1[:, None] * (dft(8) @ X1)
        J1 = inst.support.shift(3)
        assert check_jointsparse_dft(Y1, J1, 3).identifiable == base
        assert check_jointsparse_dft(4j * inst.Y, inst.support, 3).identifiable == base

    @pytest.mark.parametrize("seed", range(6))
    def test_necessity(self, seed):
        n, s = 9, 6
        N = necessary_N(n, s) - 1
        inst = random_jointsparse(n, s, N, "uniform", seed)
        assert not check_jointsparse_dft(inst.Y, inst.support, s).identifiable


def test_report_serializes():
    rep = CheckReport(False, {"{1,2}": 3}, IndexSet.of([1, 2], 4), "why")
    assert rep.to_dict() == {"identifiable": False, "reason": "why", "g_ranks": {"{1,2}": 3},
                             "failing_support": [1, 2]}
