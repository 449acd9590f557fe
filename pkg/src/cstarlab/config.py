"""Experiment configuration: a flat ``key = value`` text file.

Lines starting with ``#`` are comments.  Tolerances are given as
``tol.<check_name> = <value>``; every other key must be a field of
:class:`ExperimentConfig`.  Values are parsed by the field's type.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

SUITES = (
    "algebra-laws",
    "semigroup-laws",
    "nonconvexity",
    "tilde-formula",
    "commutator-lemma",
    "representation-fields",
    "cone-bundle",
)

# check name -> default tolerance; lower-bound checks are marked by the suite itself
DEFAULT_TOLERANCES: dict[str, dict[str, float]] = {
    "algebra-laws": {
        "cstar_identity": 1e-8,
        "involution_antihomomorphism": 1e-8,
        "involution_antilinear": 1e-12,
        "norm_vs_power_iteration": 1e-8,
        "commutator_jacobi": 1e-12,
        "ad_derivation": 1e-12,
        "exp_unitary": 1e-10,
        "log_exp_roundtrip": 1e-10,
    },
    "semigroup-laws": {
        "identity_at_zero": 1e-9,
        "semigroup_law": 1e-9,
        "multiplicativity": 1e-9,
        "star_preservation": 1e-9,
        "norm_non_increase": 1e-9,
        "field_commutes_with_semigroup": 1e-9,
        "cone_rescaling": 1e-10,
        "derivative_order": 1.9,
        "noncommuting_control": 1e-3,
        "grid_semigroup_law": 1e-4,
        "grid_endomorphism": 1e-4,
    },
    "nonconvexity": {
        "pullback_endomorphism": 1e-4,
        "pullback_semigroup_law": 1e-3,
        "branch_endpoint": 1e-4,
        "midpoint_violation": 0.5,
        "control_violation": 1e-4,
        "substitution": 1e-6,
        "flow_y_coordinate": 1e-6,
    },
    "tilde-formula": {
        "tilde_formula": 1e-6,
        "tilde_order": 1.9,
        "reversed_control": 1e-3,
        "commuting_case": 1e-10,
        "splitting": 1e-6,
        "splitting_endpoints": 1e-12,
        "tilde_unitarity": 1e-8,
        "constant_integrand": 1e-8,
    },
    "commutator-lemma": {
        "commutator_lemma": 1e-6,
        "commutator_order": 1.9,
        "commutator_corollary": 1e-6,
        "commuting_case": 1e-12,
    },
    "representation-fields": {
        "product_rule": 1e-12,
        "translation_reality": 1e-12,
        "bilinearity": 1e-12,
        "reality_hermitian_X": 1e-12,
        "reality_nonhermitian_X_control": 0.1,
        "sufficiency": 1e-12,
    },
    "cone-bundle": {
        "pauli_det_identity": 1e-12,
        "cone_closure": 1e-12,
        "spinor_phase_invariance": 1e-14,
        "interchange": 1e-9,
        "two_path_fiber": 1e-9,
        "straight_path_fiber": 1e-12,
        "holonomy_order": 2.8,
        "bundle_semigroup": 1e-9,
        "direction_scaling": 1e-10,
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    suite: str
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    n_samples: int | None = None
    n_trials: int | None = None
    max_dim: int | None = None
    grid_min: float | None = None
    grid_max: float | None = None
    grid_h: float | None = None
    flow_step: float | None = None
    t: float | None = None
    n_steps: int | None = None
    n_quad: int | None = None
    path_file: str | None = None
    out_dir: str | None = None
    parallel: bool = False

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        known = DEFAULT_TOLERANCES[self.suite]
        for name, value in self.tolerances.items():
            if name not in known:
                raise ConfigError(f"unknown tolerance {name!r} for suite {self.suite}")
            if not value > 0:
                raise ConfigError(f"tolerance {name} must be > 0")
        for name in ("n_samples", "n_trials", "max_dim", "n_steps", "n_quad"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"{name} must be >= 1")
        for name in ("grid_h", "flow_step", "t"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ConfigError(f"{name} must be > 0")

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[self.suite][name])

    def get(self, name: str, default):
        v = getattr(self, name)
        return default if v is None else v


_TYPES = {
    "seed": int,
    "n_samples": int,
    "n_trials": int,
    "max_dim": int,
    "grid_min": float,
    "grid_max": float,
    "grid_h": float,
    "flow_step": float,
    "t": float,
    "n_steps": int,
    "n_quad": int,
    "path_file": str,
    "out_dir": str,
    "parallel": lambda s: {"true": True, "false": False, "1": True, "0": False}[s.lower()],
}


def parse_config_text(text: str, suite: str) -> ExperimentConfig:
    values: dict = {}
    tols: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key.startswith("tol."):
                tols[key[4:]] = float(value)
            elif key == "suite":
                if value != suite:
                    raise ConfigError(f"line {lineno}: config is for suite {value!r}, not {suite!r}")
            elif key in _TYPES:
                values[key] = _TYPES[key](value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except (KeyError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return ExperimentConfig(suite=suite, tolerances=tols, **values)


def load_config(path, suite: str) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(), suite)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {k: v for k, v in dataclasses.asdict(cfg).items() if v is not None}
