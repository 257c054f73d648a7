import pytest
from pydantic import ValidationError

from syssynth.catalog import dump_instance, validate_instance
from syssynth.gen import PRESETS, GenSpec, generate, mission_variants

from ._utils import instance


def test_empty_spec():
    inst = generate(GenSpec())
    assert (inst.devices, inst.tasks, inst.modules) == ([], [], [])
    assert validate_instance(inst) == []


def test_same_seed_same_instance():
    spec = GenSpec(seed=42, devices=5, tasks=8, modules=4)
    assert dump_instance(generate(spec)) == dump_instance(generate(spec))
    other = GenSpec(seed=43, devices=5, tasks=8, modules=4)
    assert dump_instance(generate(spec)) != dump_instance(generate(other))


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_presets(preset):
    spec = PRESETS[preset]
    inst = generate(spec)
    assert (len(inst.devices), len(inst.tasks), len(inst.modules)) == spec.shape
    assert validate_instance(inst) == []
    assert all(m.size > 0 for m in inst.modules)


def test_search_rescue_shape():
    assert PRESETS["search_rescue"].shape == (19, 25, 29)
    assert PRESETS["underwater"].shape == (18, 36, 12)


def test_geometric_module_sizes():
    spec = GenSpec(
        seed=7, devices=10, tasks=10, modules=5, module_size_distribution="geometric"
    )
    inst = generate(spec)
    assert validate_instance(inst) == []
    sizes = [m.size for m in inst.modules]
    assert sum(sizes) == 20
    assert min(sizes) >= 1


def test_too_many_modules():
    with pytest.raises(ValidationError):
        GenSpec(devices=1, tasks=1, modules=3)
    with pytest.raises(ValidationError):
        GenSpec(devices=1)


def test_full_tightness_requires_everything():
    inst = generate(GenSpec(seed=1, devices=3, tasks=3, modules=2, tightness=1))
    for q, required in inst.mission.requirements.items():
        assert required == sum(m.capability.get(q, 0) for m in inst.modules)


def test_mission_variants():
    inst = instance("context_gating")
    variants = mission_variants(inst)
    assert [(v.functions_label, v.context_label) for v in variants] == [
        ("localization", "outdoor=0"),
        ("localization", "outdoor=1"),
    ]
    assert variants[1].instance.mission.context["outdoor"] == 1
    assert inst.mission.context["outdoor"] == 0


def test_mission_variants_drop_unchosen_requirements():
    inst = generate(GenSpec(seed=3, devices=3, tasks=3, modules=2, context_dims=1))
    variants = mission_variants(inst, functions=["q0", "q1"])
    assert len(variants) == 3 * 2
    q0_only = variants[0].instance.mission.requirements
    assert q0_only["q1"] == 0
    assert q0_only["q0"] > 0
