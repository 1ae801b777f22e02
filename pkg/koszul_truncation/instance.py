"""Instance files and engine parameters.

An instance file is a single YAML (or JSON) mapping::

    ring: {variables: [x, y], prime: 32003}
    module: {relations: [x^2, x*y]}
    q: {generators: [x, y]}
    a:
      - {monomial: y, c: 1}
    params: {n: 4, k_max: 8}
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

import yaml

from koszul_truncation.builders import WeightedSystem, max_weights
from koszul_truncation.errors import EngineError, InstanceError
from koszul_truncation.fp_linalg import DEFAULT_PRIME, PrimeField
from koszul_truncation.monomials import (
    CyclicModule,
    Monomial,
    MonomialIdeal,
    NegPowerConvention,
    format_monomial,
    ideal_sum,
    is_m_primary,
    minimalize,
    parse_ideal,
    parse_monomial,
    variable_names,
)


_ALIASES = {"E": "max_degree", "w": "window", "p": "prime"}


def _check_prime(value: Any, field: str) -> None:
    try:
        PrimeField(int(value))
    except (TypeError, ValueError) as e:
        raise InstanceError(str(e), field) from None


def _canonical_key(key: str) -> str:
    return _ALIASES.get(key, key).replace("-", "_")


@dataclass(frozen=True)
class EngineParams:
    """Tunable parameters; ``None`` for max_degree and homology_window means derive them."""

    n: int = 0
    n_span: int = 8
    max_degree: int | None = None
    homology_window: int | None = None
    window: int = 2
    k_max: int = 8
    l_max: int = 6
    prime: int = DEFAULT_PRIME
    convention: NegPowerConvention = NegPowerConvention.UNIT
    seed: int = 1
    scan_cap: int = 40

    @classmethod
    def from_dict(cls, data: dict | None) -> EngineParams:
        """Create from a ``params`` block; unknown keys are rejected, missing keys default."""
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        values: dict[str, Any] = {}
        for key, value in data.items():
            name = _canonical_key(key)
            if name not in known:
                raise InstanceError(f"Unknown parameter {key!r}", f"params.{key}")
            values[name] = value
        try:
            if "convention" in values:
                values["convention"] = NegPowerConvention(values["convention"])
            for name, value in values.items():
                if name != "convention" and value is not None:
                    values[name] = int(value)
        except (TypeError, ValueError) as e:
            raise InstanceError(str(e), "params") from None
        if values.get("prime") is not None:
            _check_prime(values["prime"], "params.prime")
        return cls(**values)

    def merged(self, **overrides: Any) -> EngineParams:
        """Copy with every non-None override applied (CLI flags win over file params)."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if "convention" in changes:
            changes["convention"] = NegPowerConvention(changes["convention"])
        if "prime" in changes:
            _check_prime(changes["prime"], "prime")
        return replace(self, **changes)

    def overlay(self, data: dict | None) -> EngineParams:
        """Copy with the keys present in a ``params`` block replaced."""
        parsed = EngineParams.from_dict(data)
        keys = {_canonical_key(k) for k in (data or {})}
        return replace(self, **{k: getattr(parsed, k) for k in keys})

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "E": self.max_degree,
            "w": self.window,
            "k_max": self.k_max,
            "p": self.prime,
            "convention": self.convention.value,
        }


@dataclass
class InstanceFile:
    """A parsed and validated instance."""

    names: tuple[str, ...]
    module: CyclicModule
    q: MonomialIdeal
    elements: tuple[Monomial, ...]
    weights: tuple[int, ...]
    params: EngineParams
    source: str = "<inline>"

    @property
    def nvars(self) -> int:
        return len(self.names)

    @property
    def system(self) -> WeightedSystem:
        return WeightedSystem(self.elements, self.weights, self.q)

    @classmethod
    def from_dict(cls, data: dict, source: str = "<inline>") -> InstanceFile:
        """Validate a mapping into an instance.

        Raises:
            InstanceError: With the dotted path of the first offending field
        """
        if not isinstance(data, dict):
            raise InstanceError("Instance must be a mapping", source)

        ring = data.get("ring") or {}
        names = _parse_names(ring)
        nvars = len(names)
        prime = ring.get("prime")

        params = EngineParams.from_dict(data.get("params"))
        if prime is not None:
            _check_prime(prime, "ring.prime")
            params = params.merged(prime=int(prime))

        module_block = data.get("module") or {}
        relations = _field_ideal(
            module_block.get("relations", []), nvars, names, "module.relations"
        )
        q_block = data.get("q", [])
        q_gens = q_block.get("generators", []) if isinstance(q_block, dict) else q_block
        q = _field_ideal(q_gens, nvars, names, "q.generators")

        elements, weights = [], []
        for i, item in enumerate(data.get("a") or []):
            path = f"a[{i}]"
            if not isinstance(item, dict) or "monomial" not in item:
                raise InstanceError("Expected a mapping with 'monomial' and 'c'", path)
            elements.append(_field_monomial(item["monomial"], nvars, names, f"{path}.monomial"))
            try:
                weights.append(int(item.get("c", 1)))
            except (TypeError, ValueError):
                raise InstanceError(
                    f"Weight {item.get('c')!r} is not an integer", f"{path}.c"
                ) from None

        instance = cls(
            names, CyclicModule(relations), q, tuple(elements), tuple(weights), params, source
        )
        if elements:
            try:
                instance.system  # noqa: B018
            except EngineError as e:
                raise InstanceError(str(e), "a") from None
        return instance

    def summary(self) -> dict:
        """Shape of the instance for ``validate``."""
        out: dict[str, Any] = {
            "d": self.nvars,
            "t": len(self.elements),
            "c": list(self.weights),
            "q": str(self.q),
            "I": str(self.module.relations),
            "dim_M": self.module.dimension,
        }
        if self.elements:
            ideal = minimalize(self.elements, self.nvars)
            out["a"] = [format_monomial(a, self.names) for a in self.elements]
            out["sop"] = (
                len(self.elements) == self.module.dimension
                and is_m_primary(ideal_sum(ideal, self.module.relations))
            )
            out["max_weights"] = list(max_weights(self.elements, self.q))
        return out


def _parse_names(ring: dict) -> tuple[str, ...]:
    variables = ring.get("variables")
    if variables is None:
        nvars = ring.get("nvars")
        if nvars is None:
            raise InstanceError("Give either 'variables' or 'nvars'", "ring")
        try:
            return variable_names(int(nvars))
        except (TypeError, ValueError):
            raise InstanceError(f"{nvars!r} is not an integer", "ring.nvars") from None
    if isinstance(variables, int):
        return variable_names(variables)
    names = tuple(str(v) for v in variables)
    if not names or len(set(names)) != len(names):
        raise InstanceError("Variable names must be nonempty and distinct", "ring.variables")
    return names


def _field_monomial(text: Any, nvars: int, names: tuple[str, ...], path: str) -> Monomial:
    try:
        return parse_monomial(str(text), nvars, names)
    except InstanceError as e:
        raise InstanceError(str(e), path) from None


def _field_ideal(value: Any, nvars: int, names: tuple[str, ...], path: str) -> MonomialIdeal:
    if isinstance(value, str):
        try:
            return parse_ideal(value, nvars, names)
        except InstanceError as e:
            raise InstanceError(str(e), path) from None
    if not isinstance(value, list):
        raise InstanceError("Expected a list of monomials", path)
    return minimalize(
        (_field_monomial(item, nvars, names, f"{path}[{i}]") for i, item in enumerate(value)),
        nvars,
    )


def load_instance(path: Path) -> InstanceFile:
    """Read and validate an instance file.

    Raises:
        InstanceError: If the file is unreadable, not YAML/JSON, or invalid
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise InstanceError(str(e), str(path)) from None
    except yaml.YAMLError as e:
        raise InstanceError(f"Not valid YAML/JSON: {e}", str(path)) from None
    return InstanceFile.from_dict(data, str(path))
