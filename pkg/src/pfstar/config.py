"""Sectioned key-value run configuration.

Format:

    [group]
    kind = free
    rank = 2

    [subgroup]
    kind = kernel-of-hom
    target = free:1
    images = a, 1

    [element f]
    terms = a:1, A:1, b:1, B:1

    [params]
    radius = 12
    p_grid = 1, 1.5, 2

Diagnostics carry line numbers. Words use a..z for generators, A..Z for
inverses, 1 for the identity; finite-group elements are table indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import WordParseError
from .groups import FreeGroup, GroupDescriptor, load_table_csv, parse_word
from .groupring import GroupRingElement
from .rationals import parse_coefficient
from .subgroups import (
    CosetTableSubgroup,
    FreeGeneratedSubgroup,
    HomKernelSubgroup,
    SubgroupDescriptor,
    TrivialSubgroup,
)


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        where = f" at line {line}" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line


DEFAULT_PARAMS = {
    "radius": 12,
    "max_power": 12,
    "p_grid": (1.0, 1.5, 2.0),
    "margin": 2,
    "seed": 0,
    "budget_vertices": 5_000_000,
    "budget_terms": 10_000_000,
    "tol": 1e-6,
    "band": 1e-3,
    "iterations": 200,
    "generating_set": None,  # words; None = symmetrized standard generators
}

_INT_PARAMS = {"radius", "max_power", "margin", "seed", "budget_vertices",
               "budget_terms", "iterations"}
_FLOAT_PARAMS = {"tol", "band"}

_GROUP_KEYS = {"kind", "rank", "table"}
_SUBGROUP_KEYS = {"kind", "generators", "target", "images", "table"}


@dataclass
class RunConfig:
    group_spec: dict
    subgroup_spec: dict
    element_specs: dict            # name -> terms string
    params: dict
    group: GroupDescriptor = None
    subgroup: SubgroupDescriptor = None
    elements: dict = field(default_factory=dict)

    def __eq__(self, other):
        return (
            isinstance(other, RunConfig)
            and self.group_spec == other.group_spec
            and self.subgroup_spec == other.subgroup_spec
            and self.element_specs == other.element_specs
            and self.params == other.params
        )


def _split_sections(text):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("unterminated section header", lineno)
            current = {"name": line[1:-1].strip(), "line": lineno, "entries": []}
            sections.append(current)
            continue
        if current is None:
            raise ConfigError(f"key-value pair outside any section: {line!r}", lineno)
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = line.split("=", 1)
        current["entries"].append((key.strip(), value.strip(), lineno))
    return sections


def _entries_to_dict(section, allowed):
    out = {}
    for key, value, lineno in section["entries"]:
        if key not in allowed:
            raise ConfigError(
                f"unknown key {key!r} in [{section['name']}]", lineno)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        out[key] = (value, lineno)
    return out


def _build_group(spec, base_dir):
    kind = spec.get("kind", ("", None))[0]
    if kind == "free":
        if "rank" not in spec:
            raise ConfigError("free group needs rank", spec["kind"][1])
        rank_str, lineno = spec["rank"]
        try:
            rank = int(rank_str)
        except ValueError:
            raise ConfigError(f"bad rank {rank_str!r}", lineno) from None
        return FreeGroup(rank)
    if kind == "finite":
        if "table" not in spec:
            raise ConfigError("finite group needs table = <path>", spec["kind"][1])
        path_str, lineno = spec["table"]
        path = (base_dir / path_str) if base_dir else Path(path_str)
        if not path.exists():
            raise ConfigError(f"table file not found: {path}", lineno)
        return load_table_csv(path.read_text())
    raise ConfigError(f"unknown group kind {kind!r}",
                      spec.get("kind", (None, None))[1])


def _parse_words(value, group, lineno):
    words = []
    for token in value.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            words.append(parse_word(token, group))
        except WordParseError as err:
            raise ConfigError(f"bad word {token!r}: {err}", lineno) from None
    return words


def _build_subgroup(spec, group, base_dir):
    kind = spec.get("kind", ("", None))[0]
    if kind == "trivial":
        return TrivialSubgroup(group)
    if kind == "free-generated":
        value, lineno = spec.get("generators", ("", spec["kind"][1]))
        return FreeGeneratedSubgroup(_parse_words(value, group, lineno), ambient=group)
    if kind == "kernel-of-hom":
        if "target" not in spec or "images" not in spec:
            raise ConfigError("kernel-of-hom needs target and images", spec["kind"][1])
        target_str, tline = spec["target"]
        if target_str.startswith("free:"):
            target = FreeGroup(int(target_str.split(":", 1)[1]))
        elif target_str.startswith("finite:"):
            path = target_str.split(":", 1)[1]
            full = (base_dir / path) if base_dir else Path(path)
            if not full.exists():
                raise ConfigError(f"target table not found: {full}", tline)
            target = load_table_csv(full.read_text())
        else:
            raise ConfigError(f"target must be free:N or finite:PATH, got {target_str!r}", tline)
        value, lineno = spec["images"]
        images = _parse_words(value, target, lineno)
        return HomKernelSubgroup(group, target, images)
    if kind == "coset-table":
        if "table" not in spec:
            raise ConfigError("coset-table needs table = <path>", spec["kind"][1])
        path_str, lineno = spec["table"]
        path = (base_dir / path_str) if base_dir else Path(path_str)
        if not path.exists():
            raise ConfigError(f"coset table file not found: {path}", lineno)
        rows = []
        for ln in path.read_text().splitlines():
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            rows.append([int(tok) for tok in ln.replace(",", " ").split()])
        generators = None
        if "generators" in spec:
            generators = _parse_words(spec["generators"][0], group, spec["generators"][1])
        return CosetTableSubgroup(group, rows, generators=generators)
    raise ConfigError(f"unknown subgroup kind {kind!r}",
                      spec.get("kind", (None, None))[1])


def parse_element_terms(value, group, lineno=None):
    element = GroupRingElement(group)
    for chunk in value.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise ConfigError(f"term {chunk!r} needs the form word:coefficient", lineno)
        word_str, coeff_str = chunk.rsplit(":", 1)
        try:
            element_term = parse_word(word_str.strip(), group)
        except WordParseError as err:
            raise ConfigError(f"bad word in term {chunk!r}: {err}", lineno) from None
        try:
            coeff = parse_coefficient(coeff_str)
        except ValueError as err:
            raise ConfigError(f"bad coefficient in term {chunk!r}: {err}", lineno) from None
        element = element + GroupRingElement.delta(element_term, coeff)
    return element


def _parse_params(spec_entries):
    params = dict(DEFAULT_PARAMS)
    for key, (value, lineno) in spec_entries.items():
        if key == "p_grid":
            grid = []
            for token in value.split(","):
                token = token.strip()
                if not token:
                    continue
                try:
                    p = float(token)
                except ValueError:
                    raise ConfigError(f"bad p value {token!r}", lineno) from None
                if not 1.0 <= p <= 2.0:
                    raise ConfigError(f"p out of range [1,2]: {p}", lineno)
                grid.append(p)
            if not grid:
                raise ConfigError("empty p_grid", lineno)
            params["p_grid"] = tuple(grid)
        elif key == "generating_set":
            params["generating_set"] = value
        elif key in _INT_PARAMS:
            try:
                params[key] = int(value)
            except ValueError:
                raise ConfigError(f"expected integer for {key}, got {value!r}", lineno) from None
        elif key in _FLOAT_PARAMS:
            try:
                params[key] = float(value)
            except ValueError:
                raise ConfigError(f"expected number for {key}, got {value!r}", lineno) from None
        else:
            raise ConfigError(f"unknown key {key!r} in [params]", lineno)
    return params


def parse_config(text: str, base_dir=None) -> RunConfig:
    """Parse and validate; returns a RunConfig with built objects."""
    base_dir = Path(base_dir) if base_dir is not None else None
    sections = _split_sections(text)
    group_spec = subgroup_spec = None
    group_line = 0
    element_sections = []
    params_entries = {}
    for section in sections:
        name = section["name"]
        if name == "group":
            group_spec = _entries_to_dict(section, _GROUP_KEYS)
            group_line = section["line"]
        elif name == "subgroup":
            subgroup_spec = _entries_to_dict(section, _SUBGROUP_KEYS)
        elif name.startswith("element"):
            parts = name.split(None, 1)
            label = parts[1].strip() if len(parts) > 1 else f"element{len(element_sections)}"
            element_sections.append((label, _entries_to_dict(section, {"terms"}), section["line"]))
        elif name == "params":
            params_entries = _entries_to_dict(section, set(DEFAULT_PARAMS))
        else:
            raise ConfigError(f"unknown section [{name}]", section["line"])
    if group_spec is None:
        raise ConfigError("missing [group] section", group_line or 1)
    if subgroup_spec is None:
        raise ConfigError("missing [subgroup] section", group_line or 1)

    group = _build_group(group_spec, base_dir)
    subgroup = _build_subgroup(subgroup_spec, group, base_dir)
    params = _parse_params(params_entries)

    elements = {}
    element_specs = {}
    for label, entries, line in element_sections:
        if "terms" not in entries:
            raise ConfigError(f"[element {label}] needs terms = ...", line)
        value, lineno = entries["terms"]
        elements[label] = parse_element_terms(value, group, lineno)
        element_specs[label] = value

    config = RunConfig(
        group_spec={k: v[0] for k, v in group_spec.items()},
        subgroup_spec={k: v[0] for k, v in subgroup_spec.items()},
        element_specs=element_specs,
        params=params,
        group=group,
        subgroup=subgroup,
        elements=elements,
    )
    return config


def emit_config(config: RunConfig) -> str:
    """Render back to the sectioned text form; parse(emit(c)) == c."""
    lines = ["[group]"]
    for key in sorted(config.group_spec):
        lines.append(f"{key} = {config.group_spec[key]}")
    lines.append("")
    lines.append("[subgroup]")
    for key in sorted(config.subgroup_spec):
        lines.append(f"{key} = {config.subgroup_spec[key]}")
    for label, terms in config.element_specs.items():
        lines.append("")
        lines.append(f"[element {label}]")
        lines.append(f"terms = {terms}")
    lines.append("")
    lines.append("[params]")
    for key in sorted(config.params):
        value = config.params[key]
        if value is None:
            continue
        if key == "p_grid":
            value = ", ".join(_format_p(p) for p in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def _format_p(p):
    return str(int(p)) if float(p).is_integer() else repr(float(p))


def generating_set_elements(config: RunConfig):
    """Symmetric generating set for Kesten indices: configured words, or the
    symmetrized default generators of the group."""
    from .schreier import default_generators

    if config.params.get("generating_set"):
        words = []
        for token in config.params["generating_set"].split(","):
            token = token.strip()
            if token:
                words.append(parse_word(token, config.group))
    else:
        words = default_generators(config.group, config.subgroup)
    out = {}
    for w in words:
        out[w.key] = w
        out[w.inverse().key] = w.inverse()
    return [out[k] for k in out]