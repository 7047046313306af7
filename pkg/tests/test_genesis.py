from fractions import Fraction

import pytest

from rbline.core import ANCHOR, REGULAR, validate_instance
from rbline.genesis import (
    SeparationParams,
    build_instance,
    build_phase,
    instance_from_params,
    scale_packets,
    theorem1_params,
)


def regulars(arrivals):
    return [r for r in arrivals if r.kind == REGULAR]


def anchor_groups(arrivals):
    return {r.anchor_id for r in arrivals if r.kind == ANCHOR}


class TestBuildPhase:
    def test_ell4_layout(self):
        ph = build_phase(4)
        assert len(ph) == 95
        assert len(anchor_groups(ph)) == 16
        assert sum(1 for r in ph if r.kind == ANCHOR) == 16 * 5
        regs = regulars(ph)
        assert len(regs) == 15
        assert [(r.site, r.step) for r in regs if r.rank == 3] == [(16, 0)]
        assert sorted((r.site, r.step) for r in regs if r.rank == 2) == [(8, 0), (16, 8)]

    def test_ell1_expansion(self):
        ph = build_phase(1)
        assert len(ph) == 5
        assert [(r.site, r.step, r.kind) for r in ph] == [
            (0, 0, ANCHOR),
            (0, 0, ANCHOR),
            (2, 0, REGULAR),
            (1, 1, ANCHOR),
            (1, 1, ANCHOR),
        ]

    def test_ell2_regular_set(self):
        regs = regulars(build_phase(2))
        assert sorted((r.site, r.step, r.rank) for r in regs) == [(2, 0, 0), (4, 0, 1), (4, 2, 0)]

    @pytest.mark.parametrize("ell", range(1, 7))
    def test_counts(self, ell):
        ph = build_phase(ell)
        regs = regulars(ph)
        assert len(regs) == 2 ** ell - 1
        for rank in range(ell):
            assert sum(1 for r in regs if r.rank == rank) == 2 ** (ell - 1 - rank)
        groups = anchor_groups(ph)
        assert len(groups) == 2 ** ell
        for g in groups:
            members = [r for r in ph if r.anchor_id == g]
            assert len(members) == ell + 1
            assert sorted(r.member for r in members) == list(range(ell + 1))
            assert len({(r.site, r.step) for r in members}) == 1

    @pytest.mark.parametrize("ell", range(1, 7))
    def test_regulars_sit_at_block_corners(self, ell):
        # rank i at the top-left corner: site = step + 2**(i+1), 2**(i+1) | step
        for r in regulars(build_phase(ell)):
            side = 2 ** (r.rank + 1)
            assert r.site == r.step + side
            assert r.step % side == 0

    def test_ids_dense_and_steps_monotone(self):
        ph = build_phase(3)
        assert [r.id for r in ph] == list(range(len(ph)))
        assert all(a.step <= b.step for a, b in zip(ph, ph[1:]))

    def test_invalid_ell(self):
        with pytest.raises(ValueError):
            build_phase(0)


class TestBuildInstance:
    def test_mirrored_second_phase(self):
        inst = build_instance(2, 2, 1, 5)
        assert len(inst.arrivals) == 30
        second = [r for r in inst.arrivals if r.step >= 4]
        anchors = {(r.anchor_id, r.site, r.step) for r in second if r.kind == ANCHOR and r.member == 0}
        assert anchors == {(4 + j, 4 - j, 4 + j) for j in range(4)}
        assert [(r.site, r.step) for r in second if r.kind == REGULAR and r.rank == 1] == [(0, 4)]

    def test_mirroring_is_an_involution(self):
        inst = build_instance(3, 2, 1)
        span = 2 ** 3
        phase0 = {(r.site, r.step, r.kind, r.rank) for r in inst.arrivals if r.step < span}
        phase1 = {
            (span - r.site, r.step - span, r.kind, r.rank)
            for r in inst.arrivals
            if r.step >= span
        }
        assert phase0 == phase1

    def test_extra_sites_do_not_change_arrivals(self):
        small = build_instance(2, 1, 1, 5)
        large = build_instance(2, 1, 1, 9)
        assert large.arrivals == small.arrivals
        assert large.n_sites == 9

    def test_shared_boundary_site_has_one_anchor(self):
        inst = build_instance(2, 2, 1)
        per_site = {}
        for r in inst.arrivals:
            if r.kind == ANCHOR:
                per_site.setdefault(r.site, set()).add(r.anchor_id)
        assert len(per_site[4]) == 1
        assert len(per_site[0]) == 1
        assert all(len(per_site[s]) == 2 for s in (1, 2, 3))

    def test_n_sites_too_small(self):
        with pytest.raises(ValueError):
            build_instance(2, 1, 1, 4)

    @pytest.mark.parametrize("ell,phases,beta", [(1, 1, 1), (2, 2, 1), (1, 1, 3), (2, 1, 2), (3, 2, 1)])
    def test_validates(self, ell, phases, beta):
        assert validate_instance(build_instance(ell, phases, beta)).ok

    def test_beta_scaling_count(self):
        inst = build_instance(1, 1, 3, 3)
        assert len(inst.arrivals) == 15
        assert inst.meta.beta == 3


class TestScalePackets:
    def test_identity(self):
        base = build_instance(2, 1, 1)
        assert scale_packets(base, 1) is base

    def test_doubling(self):
        base = build_instance(2, 1, 1)
        scaled = scale_packets(base, 2)
        assert len(scaled.arrivals) == 30
        assert len({r.packet_id for r in scaled.arrivals}) == 15
        for r in scaled.arrivals:
            assert r.site == base.arrivals[r.packet_id].site
            assert r.step == base.arrivals[r.packet_id].step

    def test_single_request_packet(self):
        from conftest import make_instance

        scaled = scale_packets(make_instance([3]), 4)
        assert [r.site for r in scaled.arrivals] == [3, 3, 3, 3]
        assert {r.packet_id for r in scaled.arrivals} == {0}

    def test_rejects_double_scaling(self):
        scaled = scale_packets(build_instance(1, 1, 1), 2)
        with pytest.raises(ValueError):
            scale_packets(scaled, 2)

    def test_rejects_bad_beta(self):
        with pytest.raises(ValueError):
            scale_packets(build_instance(1, 1, 1), 0)


class TestTheorem1Params:
    def test_small_k_uses_k_directly(self):
        params = theorem1_params(3, 17, Fraction(1, 2))
        assert params == SeparationParams(ell=3, beta=1, epsilon=Fraction(1, 2), degenerate=False)

    def test_packet_case(self):
        params = theorem1_params(8, 17, Fraction(1, 2))
        assert (params.ell, params.beta, params.epsilon) == (1, 8, Fraction(1, 4))

    def test_packet_case_large(self):
        params = theorem1_params(100, 2 ** 20 + 1, Fraction(2, 5))
        assert (params.ell, params.beta, params.epsilon) == (2, 50, Fraction(1, 5))

    def test_degenerate(self):
        assert theorem1_params(4, 17, Fraction(1, 2)).degenerate

    @pytest.mark.parametrize("k", [8, 13, 40, 100, 1000])
    @pytest.mark.parametrize("n", [17, 257, 2 ** 12 + 1, 2 ** 20 + 1])
    @pytest.mark.parametrize("delta", [Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(4, 5)])
    def test_invariants(self, k, n, delta):
        params = theorem1_params(k, n, delta)
        if params.degenerate:
            assert Fraction(k) * delta < 4
            return
        m = (n - 1).bit_length() - 1
        assert params.beta * params.ell <= k
        lhs = (1 - params.epsilon) * params.beta * params.ell
        rhs = (1 - delta) * k
        if k < m:
            assert lhs == rhs  # direct case: equality by construction
        else:
            assert lhs > rhs

    def test_instance_from_params(self):
        params = theorem1_params(8, 17, Fraction(1, 2))
        inst = instance_from_params(params, 17)
        assert inst.n_sites == 17
        assert inst.meta.epsilon == Fraction(1, 4)
        assert inst.meta.beta == 8
        assert validate_instance(inst).ok

    def test_instance_from_degenerate_params_fails(self):
        with pytest.raises(ValueError):
            instance_from_params(theorem1_params(4, 17, Fraction(1, 2)), 17)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            theorem1_params(0, 17, Fraction(1, 2))
        with pytest.raises(ValueError):
            theorem1_params(3, 2, Fraction(1, 2))
        with pytest.raises(ValueError):
            theorem1_params(3, 17, Fraction(3, 2))
