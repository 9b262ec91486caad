"""JSON (de)serialization of rule settings, model specs and experiment specs.

Model spec examples::

    {"kind": "exponential", "terms": [{"C": 1, "xi": 0.5, "a": 0, "theta": 0}], "L_max": 1024}
    {"kind": "polynomial", "terms": [{"C": 1, "d": 2, "a": 0.3927, "theta": 0}]}
    {"kind": "arma", "ar": [0.9], "ma": []}
    {"kind": "arma", "pole": {"r": 0.9, "a": 0.7853981633974483}}
    {"kind": "cutoff", "ma": [1.0]}
    {"kind": "white"}
"""
from __future__ import annotations

import json
from pathlib import Path

from .bandwidth import RuleConfig
from .errors import InvalidConfig
from .montecarlo import ExperimentConfig
from .synthetic import AcfModel, Term, ar2_from_pole

RULE_KEYS = ("c_thresh", "k_n", "c_break", "max_m")
MODEL_KEYS = {"kind", "terms", "k0", "head", "ar", "ma", "sigma2", "pole", "L_max"}
EXPERIMENT_KEYS = {"model", "n_values", "replicates", "seed_base", "rule", "law", "L_max", "workers"}


def load_json(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidConfig(f"{path}: top level must be a JSON object")
    return data


def rule_from_dict(d: dict | None) -> RuleConfig:
    d = dict(d or {})
    unknown = set(d) - set(RULE_KEYS)
    if unknown:
        raise InvalidConfig(f"unknown rule keys: {sorted(unknown)}")
    return RuleConfig(**d)


def rule_to_dict(rule: RuleConfig) -> dict:
    return {k: getattr(rule, k) for k in RULE_KEYS}


def _term(kind: str, t: dict) -> Term:
    try:
        if kind == "polynomial":
            return Term(C=float(t["C"]), d=t["d"], a=float(t.get("a", 0.0)), theta=float(t.get("theta", 0.0)))
        return Term(C=float(t["C"]), xi=float(t["xi"]), a=float(t.get("a", 0.0)), theta=float(t.get("theta", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidConfig(f"bad {kind} term {t!r}: {exc}") from exc


def model_from_dict(d: dict) -> AcfModel:
    unknown = set(d) - MODEL_KEYS
    if unknown:
        raise InvalidConfig(f"unknown model keys: {sorted(unknown)}")
    kind = d.get("kind")
    if kind == "white":
        return AcfModel.cutoff((), d.get("sigma2", 1.0))
    if kind in ("polynomial", "exponential"):
        terms = tuple(_term(kind, t) for t in d.get("terms", ()))
        return AcfModel(kind, terms, k0=int(d.get("k0", 0)), head=tuple(d.get("head", ())))
    if kind == "cutoff":
        return AcfModel.cutoff(d.get("ma", ()), d.get("sigma2", 1.0))
    if kind == "arma":
        ar = d.get("ar", ())
        if "pole" in d:
            ar = ar2_from_pole(float(d["pole"]["r"]), float(d["pole"]["a"]))
        return AcfModel.arma(ar, d.get("ma", ()), d.get("sigma2", 1.0))
    raise InvalidConfig(f"unknown model kind {kind!r}")


def model_to_dict(model: AcfModel) -> dict:
    out: dict = {"kind": model.kind}
    if model.kind in ("polynomial", "exponential"):
        out["terms"] = [
            {k: v for k, v in vars(t).items() if v is not None} for t in model.terms
        ]
        out["k0"] = model.k0
        if model.head:
            out["head"] = list(model.head)
    else:
        out["ar"] = list(model.ar)
        out["ma"] = list(model.ma)
        out["sigma2"] = model.sigma2
    return out


def experiment_from_dict(d: dict) -> ExperimentConfig:
    unknown = set(d) - EXPERIMENT_KEYS
    if unknown:
        raise InvalidConfig(f"unknown experiment keys: {sorted(unknown)}")
    for key in ("model", "n_values", "replicates"):
        if key not in d:
            raise InvalidConfig(f"experiment spec is missing {key!r}")
    model_d = dict(d["model"])
    L_max = d.get("L_max", model_d.pop("L_max", None))
    return ExperimentConfig(
        model=model_from_dict(model_d),
        n_values=tuple(d["n_values"]),
        replicates=d["replicates"],
        seed_base=int(d.get("seed_base", 0)),
        rule=rule_from_dict(d.get("rule")),
        law=d.get("law", "exponential_rate"),
        L_max=L_max,
        workers=int(d.get("workers", 1)),
    )
