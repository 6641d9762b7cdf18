import json

import pytest

from treeconf.automorphisms import TreeAutomorphism, in_rigid_stabilizer
from treeconf.registry import RegistryError, builtin_names, entry_for, entry_from_json, load_entry, load_group


def test_builtins():
    assert builtin_names() == ["adding_machine", "basilica", "grigorchuk", "gupta_sidki_3"]
    for name in builtin_names():
        entry = load_entry(name)
        assert entry.level_transitive
        assert entry_for(entry.group) is entry


def test_rist_hints_lie_in_rist(grig):
    entry = load_entry("grigorchuk")
    for v in [(0,), (1,), (0, 1), (1, 1, 0)]:
        hints = entry.rist_hints(v)
        assert len(hints) == 3
        for h in hints:
            assert in_rigid_stabilizer(h, v) and not h.is_trivial
        for name, h in zip(sorted(entry.rist_lifts.base), hints):
            assert grig.evaluate(entry.hint_word(name, v)) == h


def test_lift_words_are_checked():
    data = json.loads(_builtin_text("grigorchuk"))
    data["rist_lifts"]["lifts"]["0"]["k1"] = "k2"
    with pytest.raises(RegistryError, match="rist lift"):
        entry_from_json(data, check_transitivity=False)


def _builtin_text(name):
    from importlib import resources

    return (resources.files("treeconf") / "groups" / f"{name}.json").read_text()


@pytest.mark.parametrize(
    "patch, message",
    [
        ({"involutions": ["a"], "generators": {"a": {"perm": [1, 0], "sections": ["e", "a"]}}}, "relation"),
        ({"generators": {"a": {"perm": [1, 1], "sections": ["e", "e"]}}}, "permutation"),
        ({"generators": {"a": {"perm": [1, 0], "sections": ["e", "z"]}}}, "unknown state"),
        ({"generators": {"e": {"perm": [1, 0], "sections": ["e", "e"]}}}, "reserved"),
        ({"generators": {"a": {"perm": [1, 0], "sections": ["e", "e"]}}, "infinite_order": ["a"]}, "finite order"),
        ({"generators": {"a": {"perm": [0, 1], "sections": ["e", "e"]}}, "level_transitive": True}, "transitive"),
    ],
)
def test_bad_registry_files(patch, message):
    data = {"name": "bad", "tree": {"degrees": [2], "repeat": True}}
    data.update(patch)
    with pytest.raises(RegistryError, match=message):
        entry_from_json(data)


def test_unknown_group():
    with pytest.raises(RegistryError, match="unknown group"):
        load_group("lamplighter")


def test_load_from_path(tmp_path):
    path = tmp_path / "odometer3.json"
    path.write_text(json.dumps({"tree": {"degrees": [3], "repeat": True},
                                "generators": {"a": {"perm": [1, 2, 0], "sections": ["e", "e", "a"]}},
                                "infinite_order": ["a"], "level_transitive": True}))
    G = load_group(str(path))
    assert G.name == "odometer3"
    assert G.labels == ("a", "a^-1")
    assert isinstance(G.element("a a^-1"), TreeAutomorphism) and G.element("a a^-1").is_trivial
