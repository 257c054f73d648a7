import io
import json

import pytest

from syssynth.catalog import (
    InstanceParseError,
    ProblemInstance,
    ShapeError,
    UnknownReferenceError,
    ViolationCode,
    dump_instance,
    load_instance,
    read_instance,
    validate_instance,
)

from ._utils import CATALOGS, INSTANCES, instance


def _document(**fields) -> dict:
    return {
        "dims": {"resources": ["cpu"], "function_dims": ["nav"]},
        "devices": [{"id": "imu", "resources": {"cpu": 1}}, {"id": "pc1"}],
        "tasks": [{"id": "slam", "consumption": {"pc1": {"cpu": 1}}}],
        "modules": [
            {"id": "sense", "devices": ["imu"]},
            {"id": "compute", "devices": ["pc1"], "tasks": ["slam"]},
        ],
        **fields,
    }


def test_load_minimal_instance():
    inst = instance("minimal")
    assert (len(inst.devices), len(inst.tasks), len(inst.modules)) == (1, 0, 1)
    assert inst.mission.requirements == {}
    assert validate_instance(inst) == []


def test_unknown_device_is_named():
    with pytest.raises(UnknownReferenceError) as e:
        load_instance((INSTANCES / "unknown_device.json").read_bytes())
    assert e.value.reference == "pc9"
    assert "pc9" in str(e.value)


def test_malformed_document():
    with pytest.raises(InstanceParseError):
        load_instance('{"devices": [')
    with pytest.raises(InstanceParseError):
        load_instance("[1, 2, 3]")
    with pytest.raises(InstanceParseError):
        load_instance(json.dumps({"devices": [{"id": "d", "colour": "red"}]}))


def test_undeclared_dimension_is_a_shape_error():
    document = _document()
    document["devices"][0]["resources"]["gpu"] = 2
    with pytest.raises(ShapeError):
        load_instance(io.StringIO(json.dumps(document)))


def test_module_overlap():
    document = _document()
    document["modules"][1]["devices"].append("imu")
    violations = validate_instance(ProblemInstance.parse_obj(document))
    assert [(v.code, v.element) for v in violations] == [
        (ViolationCode.MODULE_OVERLAP, "imu")
    ]


def test_unpartitioned_task():
    document = _document()
    document["tasks"].append({"id": "logger", "consumption": {"pc1": {}}})
    violations = validate_instance(ProblemInstance.parse_obj(document))
    assert [(v.code, v.element) for v in violations] == [
        (ViolationCode.UNPARTITIONED_ELEMENT, "logger")
    ]


def test_reserved_and_duplicate_identifiers():
    document = _document()
    document["dims"]["transports"] = [{"id": "loopback"}]
    document["devices"].append({"id": "pc1"})
    codes = {v.code for v in validate_instance(ProblemInstance.parse_obj(document))}
    assert ViolationCode.RESERVED_TRANSPORT in codes
    assert ViolationCode.DUPLICATE_ID in codes


def test_empty_module():
    document = _document()
    document["modules"].append({"id": "nothing"})
    violations = validate_instance(ProblemInstance.parse_obj(document))
    assert [(v.code, v.element) for v in violations] == [
        (ViolationCode.EMPTY_MODULE, "nothing")
    ]


def test_document_order_is_kept():
    inst = ProblemInstance.parse_obj(_document())
    assert [d.id for d in inst.devices] == ["imu", "pc1"]
    assert [m.id for m in inst.modules] == ["sense", "compute"]


def test_shipped_catalog():
    inst = read_instance(CATALOGS / "underwater_vehicle.json")
    assert (len(inst.devices), len(inst.tasks), len(inst.modules)) == (18, 36, 12)
    assert validate_instance(inst) == []


def test_dump_then_load_keeps_the_instance():
    inst = read_instance(CATALOGS / "underwater_vehicle.json")
    assert load_instance(dump_instance(inst)) == inst


def test_dump_keeps_every_digit():
    digits = "0.12345678901234567891"
    document = _document(weights=[1, 1, 0.1])
    document["devices"][1]["cost"] = "COST"
    inst = load_instance(json.dumps(document).replace('"COST"', digits))
    assert str(inst.devices[1].cost) == digits

    dumped = dump_instance(inst)
    assert digits in dumped
    again = load_instance(dumped)
    assert again == inst
    assert str(again.devices[1].cost) == digits
    assert json.loads(dumped)["weights"] == [1, 1, 0.1]
