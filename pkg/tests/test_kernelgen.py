import pytest

from rvvprobe.errors import ConfigError
from rvvprobe.kernelgen import (
    COMPARE_UNROLL,
    KernelSpec,
    SUITE_KINDS,
    buffer_size,
    generate_kernel,
    generate_suite,
    rotation_pool,
)
from rvvprobe.refmodel import min_target_defuse_distance, parse_kernel, predict_counts


def _spec(**kw):
    base = dict(name="vfadd_e32_m1_arith", target_inst="vfadd.vv", sew_bits=32,
                lmul=1, pattern="arith")
    base.update(kw)
    return KernelSpec(**base)


def all_suite_specs(cfg, lmuls=(1, 2, 4, 8)):
    specs = []
    for lmul in lmuls:
        specs += generate_suite("memory", cfg, lmul=lmul)
    specs += generate_suite("stride-compare", cfg)
    specs += [s for s in generate_suite("tail-compare", cfg) if s.active_elems in (1, 17, 32)]
    specs += generate_suite("arith", cfg)
    specs += generate_suite("scalar-baseline", cfg)
    return specs


class TestSpecValidation:
    def test_fractional_lmul_rejected_by_generator(self):
        with pytest.raises(ConfigError):
            _spec(lmul="1/2")

    def test_unroll_must_match_rotation(self, cfg):
        with pytest.raises(ConfigError, match="rotation"):
            generate_kernel(_spec(unroll=33), cfg)

    def test_masked_needs_even_unroll(self):
        with pytest.raises(ConfigError):
            _spec(name="m1", target_inst="vle8.v", sew_bits=8,
                  pattern="masked-unit-load", stride_elems=2, unroll=47)

    def test_masked_models_stride_two_only(self):
        with pytest.raises(ConfigError):
            _spec(name="m2", target_inst="vle8.v", sew_bits=8,
                  pattern="masked-unit-load", stride_elems=3, unroll=48)

    def test_pattern_instruction_compat(self, cfg):
        with pytest.raises(ConfigError):
            generate_kernel(_spec(name="bad", target_inst="vse32.v",
                                  pattern="unit-load", unroll=32), cfg)

    def test_strided_requires_strided_mnemonic(self, cfg):
        with pytest.raises(ConfigError):
            generate_kernel(
                _spec(name="bad2", target_inst="vle32.v", pattern="strided-load",
                      stride_elems=2, unroll=32), cfg)

    def test_tail_needs_active_elems(self):
        with pytest.raises(ConfigError):
            _spec(name="t", target_inst="vle8.v", sew_bits=8, pattern="tail-vl-load")

    def test_active_elems_above_vlmax(self, cfg):
        spec = _spec(name="t2", target_inst="vle8.v", sew_bits=8,
                     pattern="tail-vl-load", active_elems=33, unroll=32)
        with pytest.raises(ConfigError):
            generate_kernel(spec, cfg)

    def test_fp16_vector_only(self, cfg):
        spec = KernelSpec(name="vfadd_e16", target_inst="vfadd.vv", sew_bits=16,
                          lmul=1, pattern="arith", unroll=32)
        generate_kernel(spec, cfg)  # zvfh vector fp16 is supported
        with pytest.raises(ConfigError):
            generate_kernel(KernelSpec(name="vfadd_e8", target_inst="vfadd.vv",
                                       sew_bits=8, lmul=1, pattern="arith",
                                       unroll=32), cfg)


class TestRotation:
    def test_pool_spans_all_groups(self):
        assert len(rotation_pool(_spec(lmul=1, unroll=32))) == 32
        assert len(rotation_pool(_spec(lmul=8, unroll=4))) == 4

    def test_masked_pool_starts_at_v8(self):
        spec = _spec(name="m", target_inst="vle8.v", sew_bits=8,
                     pattern="masked-unit-load", stride_elems=2, unroll=48)
        pool = rotation_pool(spec)
        assert pool[0] == "v8" and "v0" not in pool and len(pool) == 24

    def test_arith_destinations_cycle_all_registers(self, cfg):
        mod = generate_kernel(_spec(unroll=128), cfg)
        kernel = parse_kernel(mod.text)
        dests = [ins.operands[0] for ins in kernel.loop_body
                 if ins.mnemonic == "vfadd.vv"]
        assert dests[:32] == [f"v{i}" for i in range(32)]
        assert len(dests) == 128 and dests[32:64] == dests[:32]

    @pytest.mark.parametrize("lmul", [1, 2, 4, 8])
    def test_defuse_distance_at_least_two(self, cfg, lmul):
        spec = _spec(name=f"vfadd_m{lmul}", lmul=lmul, unroll=128)
        kernel = parse_kernel(generate_kernel(spec, cfg).text)
        dist = min_target_defuse_distance(kernel, lmul)
        assert dist is None or dist >= 2


class TestGeneration:
    def test_deterministic(self, cfg):
        for suite in SUITE_KINDS:
            for spec in generate_suite(suite, cfg)[:3]:
                once = generate_kernel(spec, cfg).text
                again = generate_kernel(spec, cfg).text
                assert once == again

    def test_instruction_budget_exact(self, cfg):
        for spec in all_suite_specs(cfg, lmuls=(1, 8)):
            kernel = parse_kernel(generate_kernel(spec, cfg).text)
            ref = predict_counts(kernel, spec.iterations)
            assert ref.target_inst_count == spec.iterations * spec.unroll, spec.name

    def test_loop_control_overhead(self, cfg):
        for spec in all_suite_specs(cfg, lmuls=(1,)):
            kernel = parse_kernel(generate_kernel(spec, cfg).text)
            control = [i for i in kernel.loop_body if i.mnemonic != spec.target_inst]
            assert len(control) <= 4, spec.name
            ref = predict_counts(kernel, spec.iterations)
            assert ref.counts.retired <= 1.04 * ref.target_inst_count, spec.name

    def test_metadata_echo_round_trips(self, cfg):
        spec = _spec(unroll=32)
        mod = generate_kernel(spec, cfg)
        kernel = parse_kernel(mod.text)
        assert kernel.metadata["target_inst"] == "vfadd.vv"
        assert KernelSpec.from_dict(kernel.metadata) == spec

    def test_scalar_reference_uses_constant_stride_offsets(self, cfg):
        spec = KernelSpec(name="lw_s2", target_inst="lw", sew_bits=32, lmul=1,
                          pattern="scalar-ref", stride_elems=2, unroll=16)
        text = generate_kernel(spec, cfg).text
        # stride 2 over 32-bit elements: byte offsets 0, 8, 16, ...
        assert "lw t0, 0(a1)" in text
        assert "lw t1, 8(a1)" in text
        assert "lw t2, 16(a1)" in text

    def test_buffer_defaults_to_l1_resident(self, cfg):
        assert buffer_size(_spec(unroll=32), cfg) == 16 * 1024

    def test_buffer_grows_for_wide_strides(self, cfg):
        spec = KernelSpec(name="big", target_inst="vlse64.v", sew_bits=64, lmul=8,
                          pattern="strided-load", stride_elems=512, unroll=4)
        assert buffer_size(spec, cfg) > 16 * 1024

    def test_write_emits_sidecar(self, cfg, tmp_path):
        mod = generate_kernel(_spec(unroll=32), cfg)
        asm, meta = mod.write(tmp_path)
        assert open(asm).read() == mod.text
        import json

        assert json.load(open(meta))["name"] == "vfadd_e32_m1_arith"


class TestSuites:
    def test_memory_suite(self, cfg):
        specs = generate_suite("memory", cfg)
        assert len(specs) == 8
        assert {s.target_inst for s in specs} == {
            f"{root}{sew}.v" for root in ("vle", "vse") for sew in (8, 16, 32, 64)
        }

    def test_arith_suite_contents(self, cfg):
        specs = generate_suite("arith", cfg)
        vec_fp = [s for s in specs if s.target_inst.startswith("vf")]
        vec_int = [s for s in specs if s.target_inst.startswith("v")
                   and not s.target_inst.startswith("vf")]
        scalar_fp = [s for s in specs if s.target_inst in ("fadd.s", "fmul.s", "fmadd.s")]
        assert len(vec_fp) == 12  # 4 instructions x FP16/32/64
        assert len(vec_int) == 16  # 4 instructions x 8/16/32/64-bit
        assert len(scalar_fp) == 3

    def test_stride_compare_triples(self, cfg):
        specs = generate_suite("stride-compare", cfg)
        assert len(specs) == 12
        by_sew = {}
        for s in specs:
            by_sew.setdefault(s.sew_bits, []).append(s.pattern)
        for sew, patterns in by_sew.items():
            assert sorted(patterns) == ["masked-unit-load", "scalar-ref", "strided-load"]
        e8 = {s.pattern: s for s in specs if s.sew_bits == 8}
        assert e8["strided-load"].target_inst == "vlse8.v"
        assert e8["scalar-ref"].target_inst == "lb"
        # gather parity: two masked loads stand in for one strided load
        assert e8["masked-unit-load"].unroll == 2 * e8["strided-load"].unroll

    def test_tail_compare_pairs(self, cfg):
        specs = generate_suite("tail-compare", cfg)
        assert len(specs) == 64  # both variants for every active count 1..32
        actives = sorted({s.active_elems for s in specs})
        assert actives == list(range(1, 33))
        assert all(s.unroll == COMPARE_UNROLL for s in specs)

    def test_unknown_suite(self, cfg):
        with pytest.raises(ConfigError):
            generate_suite("bogus", cfg)

    def test_every_suite_member_generates(self, cfg):
        for spec in all_suite_specs(cfg):
            generate_kernel(spec, cfg)
