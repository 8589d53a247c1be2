from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rvvprobe.core import (
    EVENT_ORDER,
    EventCounts,
    EventKind,
    Policy,
    VectorConfig,
    VtypeState,
    attribute_events,
    classify,
    compute_vlmax,
    resolve_vl,
)
from rvvprobe.errors import ConfigError, UnsupportedInstructionError

SEWS = st.sampled_from((8, 16, 32, 64))
LMULS = st.sampled_from((1, 2, 4, 8))
VLENS = st.sampled_from((128, 256, 512, 1024, 2048))


class TestVectorConfig:
    def test_valid_range(self):
        assert VectorConfig(128).vlenb == 16
        assert VectorConfig(16384).vlenb == 2048

    @pytest.mark.parametrize("bad", [0, 64, 100, 192, 32768, 255])
    def test_rejects_bad_vlen(self, bad):
        with pytest.raises(ConfigError):
            VectorConfig(bad)

    def test_rejects_bad_clock(self):
        with pytest.raises(ConfigError):
            VectorConfig(256, clock_hz=0)


class TestVlmax:
    def test_e8_m1_vlen256(self, cfg):
        assert compute_vlmax(cfg, 8, 1) == 32

    def test_e64_m8_vlen256(self, cfg):
        assert compute_vlmax(cfg, 64, 8) == 32

    def test_fractional_lmul(self):
        assert compute_vlmax(VectorConfig(128), 32, Fraction(1, 2)) == 2

    def test_rejects_zero_element_config(self, cfg):
        with pytest.raises(ConfigError):
            compute_vlmax(cfg, 64, Fraction(1, 8))

    @given(vlen=VLENS, sew=SEWS, lmul=LMULS)
    def test_doubles_when_sew_halves(self, vlen, sew, lmul):
        cfg = VectorConfig(vlen)
        if sew > 8:
            assert compute_vlmax(cfg, sew // 2, lmul) == 2 * compute_vlmax(cfg, sew, lmul)

    @given(vlen=VLENS, sew=SEWS, lmul=st.sampled_from((1, 2, 4)))
    def test_doubles_when_lmul_doubles(self, vlen, sew, lmul):
        cfg = VectorConfig(vlen)
        assert compute_vlmax(cfg, sew, 2 * lmul) == 2 * compute_vlmax(cfg, sew, lmul)


class TestResolveVl:
    def test_clamps(self):
        assert resolve_vl(100, 32) == 32

    def test_short_request_kept(self):
        assert resolve_vl(7, 32) == 7

    def test_zero(self):
        assert resolve_vl(0, 32) == 0

    @given(avl=st.integers(0, 10_000), bump=st.integers(0, 100), vlmax=st.integers(1, 512))
    def test_monotone_and_bounded(self, avl, bump, vlmax):
        assert resolve_vl(avl, vlmax) <= resolve_vl(avl + bump, vlmax) <= vlmax


class TestVtypeState:
    def test_field_domains(self):
        state = VtypeState(32, 2, Policy.AGNOSTIC, Policy.UNDISTURBED, vl=8)
        assert state.lmul == Fraction(2)

    def test_rejects_bad_sew(self):
        with pytest.raises(ConfigError):
            VtypeState(12, 1)

    def test_rejects_vl_above_vlmax(self, cfg):
        state = VtypeState(8, 1, vl=33)
        with pytest.raises(ConfigError):
            state.validate_for(cfg)

    def test_rejects_elementless_combination(self):
        state = VtypeState(64, Fraction(1, 8))
        with pytest.raises(ConfigError):
            state.validate_for(VectorConfig(256))


class TestAttribution:
    def test_vector_load(self):
        counts = attribute_events(classify("vle32.v"))
        assert counts.as_dict() == {
            "retired": 1, "vec": 1, "vec_ld": 1, "vec_st": 0,
            "fp": 0, "fp_ld": 0, "fp_st": 0,
        }

    def test_scalar_fp_load(self):
        counts = attribute_events(classify("flw"))
        assert counts.retired == 1 and counts.fp == 1 and counts.fp_ld == 1
        assert counts.vec == 0

    def test_vector_fp_arith_does_not_touch_fp_event(self):
        counts = attribute_events(classify("vfadd.vv"))
        assert counts.retired == 1 and counts.vec == 1
        assert counts.fp == 0

    def test_integer_vector_mac_never_touches_fp(self):
        counts = attribute_events(classify("vmacc.vv"))
        assert counts.fp == 0 and counts.fp_ld == 0 and counts.fp_st == 0

    def test_vector_config_counts_as_vector(self):
        counts = attribute_events(classify("vsetvli"))
        assert counts.vec == 1 and counts.retired == 1

    def test_scalar_int_and_control_retire_only(self):
        for m in ("lw", "sw", "addi", "bnez", "ret"):
            counts = attribute_events(classify(m))
            assert counts.retired == 1
            assert sum(counts.as_dict().values()) == 1

    def test_unknown_mnemonic_rejected(self):
        with pytest.raises(UnsupportedInstructionError):
            classify("vluxei32.v")

    def test_at_most_one_ldst_event(self):
        from rvvprobe.core import TAXONOMY

        ldst = (EventKind.VEC_LD, EventKind.VEC_ST, EventKind.FP_LD, EventKind.FP_ST)
        for mnemonic in TAXONOMY:
            counts = attribute_events(classify(mnemonic))
            assert sum(counts.get(k) for k in ldst) <= 1
            assert counts.retired == 1


class TestEventCounts:
    def test_closed_set_of_seven(self):
        assert len(EVENT_ORDER) == 7
        assert len(EventKind) == 7

    def test_rejects_negative(self):
        with pytest.raises(ConfigError):
            EventCounts(retired=-1)

    def test_rejects_out_of_u64(self):
        with pytest.raises(ConfigError):
            EventCounts(vec=2**64)

    def test_add_and_scale(self):
        a = EventCounts(retired=2, vec=1)
        assert (a + a).retired == 4
        assert a.scaled(3).vec == 3

    def test_wire_round_trip(self):
        a = EventCounts(retired=5, fp_ld=2)
        assert EventCounts.from_dict(a.as_dict()) == a

    def test_from_dict_rejects_unknown_key(self):
        with pytest.raises(ConfigError):
            EventCounts.from_dict({"bogus": 1})
