import pytest

from rvvprobe.core import VectorConfig
from rvvprobe.errors import (
    AsmSyntaxError,
    KernelShapeError,
    UnsupportedInstructionError,
)
from rvvprobe.kernelgen import KernelSpec, generate_kernel
from rvvprobe.refmodel import parse_kernel, predict_counts

MINIMAL = """
entry:
    li t0, 3
    beqz a0, done
loop:
    addi t1, t1, 1
    addi a0, a0, -1
    bnez a0, loop
done:
    ret
"""


def gen(cfg, **kw):
    base = dict(name="k", target_inst="vfadd.vv", sew_bits=32, lmul=1,
                pattern="arith", unroll=32)
    base.update(kw)
    return parse_kernel(generate_kernel(KernelSpec(**base), cfg).text)


class TestParsing:
    def test_sections(self, cfg):
        kernel = gen(cfg, unroll=128)
        assert len(kernel.loop_body) == 128 + 2  # targets + addi + bnez
        assert kernel.epilogue[-1].mnemonic == "ret"
        assert kernel.trip_reg == "x10"  # argument register a0

    def test_minimal_hand_written_loop(self):
        kernel = parse_kernel(MINIMAL)
        assert [i.mnemonic for i in kernel.loop_body] == ["addi", "addi", "bnez"]
        assert kernel.vtype_at_loop_entry is None

    def test_vtype_at_loop_entry(self, cfg):
        kernel = gen(cfg)
        vt = kernel.vtype_at_loop_entry
        assert (vt.sew_bits, int(vt.lmul)) == (32, 1)
        resolved = vt.resolve(VectorConfig(256))
        assert resolved.vl == 8

    def test_tail_vtype_resolves_requested_vl(self, cfg):
        kernel = gen(cfg, name="t", target_inst="vle8.v", sew_bits=8,
                     pattern="tail-vl-load", active_elems=7, unroll=32)
        assert kernel.vtype_at_loop_entry.avl == 7
        assert kernel.vtype_at_loop_entry.resolve(cfg).vl == 7

    def test_unsupported_instruction(self):
        with pytest.raises(UnsupportedInstructionError, match="vluxei32.v"):
            parse_kernel("f:\n    vluxei32.v v1, (a0), v2\n    ret\n")

    def test_empty_text(self):
        with pytest.raises(AsmSyntaxError):
            parse_kernel("")

    def test_no_loop(self):
        with pytest.raises(KernelShapeError, match="no loop"):
            parse_kernel("f:\n    li t0, 1\n    ret\n")

    def test_two_back_edges_rejected(self):
        text = """
a:
    addi t0, t0, -1
    bnez t0, a
b:
    addi t1, t1, -1
    bnez t1, b
    ret
"""
        with pytest.raises(KernelShapeError, match="irreducible"):
            parse_kernel(text)

    def test_branch_into_loop_rejected(self):
        text = """
    beqz a0, inside
loop:
    addi t0, t0, 1
inside:
    addi a0, a0, -1
    bnez a0, loop
    ret
"""
        with pytest.raises(KernelShapeError):
            parse_kernel(text)

    def test_syntax_error_carries_line(self):
        with pytest.raises(AsmSyntaxError) as err:
            parse_kernel("f:\n    lw t0, badoperand\n    ret\n")
        assert err.value.line == 2

    def test_undefined_label(self):
        with pytest.raises(AsmSyntaxError, match="undefined label"):
            parse_kernel("f:\n    bnez a0, nowhere\n    ret\n")

    def test_duplicate_label(self):
        with pytest.raises(AsmSyntaxError, match="duplicate"):
            parse_kernel("a:\na:\n    ret\n")


class TestPrediction:
    def test_single_trip_equals_flat_sum(self, cfg):
        kernel = gen(cfg)
        ref = predict_counts(kernel, 1)
        flat = predict_counts(kernel, 0)
        body = predict_counts(kernel, 2).counts.as_dict()
        once = ref.counts.as_dict()
        for key, value in once.items():
            assert body[key] - value == value - flat.counts.as_dict()[key]

    def test_linearity(self, cfg):
        kernel = gen(cfg, unroll=64)
        n1 = predict_counts(kernel, 1000).counts.as_dict()
        n2 = predict_counts(kernel, 2000).counts.as_dict()
        n3 = predict_counts(kernel, 3000).counts.as_dict()
        for key in n1:
            assert n2[key] - n1[key] == n3[key] - n2[key]

    def test_default_scale_counts(self, cfg):
        kernel = gen(cfg, unroll=128)
        ref = predict_counts(kernel, 10**8)
        assert ref.target_inst_count == 128 * 10**8
        assert ref.counts.vec >= 128 * 10**8
        assert ref.counts.fp == 0

    def test_scalar_fp_load_kernel(self, cfg):
        kernel = gen(cfg, name="flw", target_inst="flw", pattern="scalar-ref",
                     unroll=128)
        ref = predict_counts(kernel, 10**8)
        assert ref.counts.fp_ld == 128 * 10**8
        assert ref.counts.fp == 128 * 10**8
        assert ref.counts.vec == 0

    def test_retired_overhead_bound(self, cfg):
        kernel = gen(cfg, unroll=128)
        ref = predict_counts(kernel, 10**8)
        prologue = len(kernel.prologue)
        bound = 1 + (4 + prologue) / 128
        assert ref.counts.retired / ref.target_inst_count <= bound

    def test_reference_counts_containment(self, cfg):
        for spec_kw in (
            dict(name="a", target_inst="vle32.v", pattern="unit-load"),
            dict(name="b", target_inst="vse32.v", pattern="unit-store"),
            dict(name="c", target_inst="fsw", pattern="scalar-ref"),
        ):
            kernel = gen(cfg, **spec_kw)
            c = predict_counts(kernel, 50).counts
            assert c.vec_ld + c.vec_st <= c.vec
            assert c.fp_ld + c.fp_st <= c.fp
            for v in (c.vec, c.vec_ld, c.vec_st, c.fp, c.fp_ld, c.fp_st):
                assert v <= c.retired

    def test_la_counts_as_two(self):
        text = """
f:
    la t0, somewhere
    beqz a0, out
somewhere:
    addi a0, a0, -1
    bnez a0, somewhere
out:
    ret
"""
        kernel = parse_kernel(text)
        # zero trips: la (expands to 2) + beqz + ret
        assert predict_counts(kernel, 0).counts.retired == 4
