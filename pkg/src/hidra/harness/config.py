"""Run-configuration format: flat ``key = value`` lines in ``[run]`` sections.

A ``#`` starts a comment. Each ``[run]`` section expands to the Cartesian
product of its comma-separated values (commas inside parentheses do not
split, so ``noise = thresholded_additive(1.0, 3.5)`` is one value while
``d = 20,200`` is a grid of two).

Keys::

    algorithm   simple | ma | lmma                              (required)
    problem     sphere | ellipsoid(K) | rosenbrock | pointmass  (required)
    d           search-space dimension                          (required)
    budget      max fitness evaluations                         (required)
    noise       none | multiplicative(C) | additive(EPS)
                | thresholded_additive(EPS, THRESHOLD)          [none]
    uh          true | false: adaptive re-evaluation            [false]
    runs        independent repetitions                         [5]
    seed        base seed; run i uses seed + i                  [1]
    sigma0      initial step size            [0.3; 0.1 for pointmass]
    init_box    (LOW, HIGH) initial-mean box                    [(-1, 1)]
    log_every   generations between trace rows                  [10]
    restarts    true | false: double population after a stop    [false]
    lambda      population size override            [4 + floor(3 ln d)]
    hidden      (H1, H2, ...) policy hidden layers      [(30, 30, 10)]
    sigma_floor stop threshold on the step size                 [1e-20]
    target_fitness  stop when best fitness reaches this         [off]
    max_gens    stop after this many generations                [off]
    name        cell label used in output file names            [auto]

The environment variable ``HIDRA_SEED`` overrides the config seed; an
explicit ``seed_override`` argument (the CLI ``--seed`` flag) overrides both.
"""
from __future__ import annotations

import dataclasses
import math
import os
import re
from dataclasses import dataclass, field

from ..benchmarks import NoiseModel
from ..control import ACTION_SIZE, OBSERVATION_SIZE, param_count
from ..errors import ConfigError

ALGORITHMS = ("simple", "ma", "lmma")
PROBLEMS = ("sphere", "ellipsoid", "rosenbrock", "pointmass")

_KNOWN_KEYS = (
    "algorithm", "problem", "d", "budget", "noise", "uh", "runs", "seed",
    "sigma0", "init_box", "log_every", "restarts", "lambda", "hidden",
    "sigma_floor", "stagnation_gens", "target_fitness", "max_gens", "name",
)
_REQUIRED_KEYS = ("algorithm", "problem", "d", "budget")


@dataclass(frozen=True)
class RunSpec:
    """One fully resolved cell of the experiment matrix."""

    algorithm: str
    problem: str
    d: int
    budget: int
    k: float = 1.0
    noise: NoiseModel = field(default_factory=NoiseModel)
    uh: bool = False
    runs: int = 5
    seed: int = 1
    sigma0: float | None = None
    init_box: tuple[float, float] = (-1.0, 1.0)
    log_every: int = 10
    restarts: bool = False
    lam: int | None = None
    hidden: tuple[int, ...] = (30, 30, 10)
    sigma_floor: float = 1e-20
    stagnation_gens: int | None = None  # None: scale-aware default
    target_fitness: float | None = None
    max_gens: int | None = None
    label: str | None = None

    @property
    def effective_lambda(self) -> int:
        if self.lam is not None:
            return self.lam
        return 4 + int(math.floor(3.0 * math.log(self.d)))

    @property
    def effective_sigma0(self) -> float:
        if self.sigma0 is not None:
            return self.sigma0
        return 0.1 if self.problem == "pointmass" else 0.3

    def cell_name(self) -> str:
        if self.label is not None:
            return _sanitize(self.label)
        algo = self.algorithm + ("-uh" if self.uh else "")
        if self.problem == "ellipsoid":
            prob = f"elli{self.k:g}"
        else:
            prob = self.problem
        n = self.noise
        noise_tag = {
            "none": "clean",
            "multiplicative": f"mul{n.c:g}",
            "additive": f"add{n.epsilon:g}",
            "thresholded_additive": f"thr{n.epsilon:g}-{n.threshold:g}",
        }[n.kind]
        return _sanitize(f"{algo}_{prob}_d{self.d}_{noise_tag}_b{self.budget}_s{self.seed}")


def _sanitize(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "-", name)


def split_top_level(value: str) -> list[str]:
    """Split on commas that are not nested inside parentheses."""
    parts: list[str] = []
    depth = 0
    cur: list[str] = []
    for ch in value:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced ')'")
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ValueError("unbalanced '('")
    parts.append("".join(cur).strip())
    return parts


def _parse_int(token: str, key: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ConfigError(f"key {key!r} expects an integer, got {token!r}", line) from None


def _parse_float(token: str, key: str, line: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ConfigError(f"key {key!r} expects a number, got {token!r}", line) from None


def _parse_bool(token: str, key: str, line: int) -> bool:
    t = token.lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"key {key!r} expects true/false, got {token!r}", line)


_CALL_RE = re.compile(r"^([a-z_]+)\s*\(\s*(.*?)\s*\)$")


def _parse_call(token: str):
    """Split ``name(arg1, arg2)`` into (name, [args]); bare names get []."""
    m = _CALL_RE.match(token)
    if m is None:
        return token, []
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2) else []
    return m.group(1), args


def _parse_problem(token: str, line: int) -> tuple[str, float]:
    name, args = _parse_call(token)
    if name not in PROBLEMS:
        raise ConfigError(f"unknown problem {token!r}", line)
    if name == "ellipsoid":
        if len(args) != 1:
            raise ConfigError("ellipsoid takes exactly one argument: ellipsoid(K)", line)
        k = _parse_float(args[0], "problem", line)
        if k < 1:
            raise ConfigError(f"condition number must be >= 1, got {k}", line)
        return name, k
    if args:
        raise ConfigError(f"problem {name!r} takes no arguments", line)
    return name, 1.0


def _parse_noise(token: str, line: int) -> NoiseModel:
    name, args = _parse_call(token)
    try:
        if name == "none" and not args:
            return NoiseModel.none()
        if name == "multiplicative" and len(args) == 1:
            return NoiseModel.multiplicative(_parse_float(args[0], "noise", line))
        if name == "additive" and len(args) == 1:
            return NoiseModel.additive(_parse_float(args[0], "noise", line))
        if name == "thresholded_additive" and len(args) == 2:
            return NoiseModel.thresholded_additive(
                _parse_float(args[0], "noise", line),
                _parse_float(args[1], "noise", line),
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), line) from None
    raise ConfigError(f"malformed noise model {token!r}", line)


def _parse_pair(token: str, key: str, line: int) -> tuple[float, float]:
    if not (token.startswith("(") and token.endswith(")")):
        raise ConfigError(f"key {key!r} expects a pair like (-1, 1), got {token!r}", line)
    inner = token[1:-1]
    parts = [p.strip() for p in inner.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"key {key!r} expects exactly two numbers, got {token!r}", line)
    lo = _parse_float(parts[0], key, line)
    hi = _parse_float(parts[1], key, line)
    if not lo < hi:
        raise ConfigError(f"key {key!r} needs low < high, got {token!r}", line)
    return lo, hi


def _parse_hidden(token: str, line: int) -> tuple[int, ...]:
    if not (token.startswith("(") and token.endswith(")")):
        raise ConfigError(f"key 'hidden' expects a tuple like (30, 30, 10), got {token!r}", line)
    parts = [p.strip() for p in token[1:-1].split(",") if p.strip()]
    if not parts:
        raise ConfigError("key 'hidden' needs at least one layer size", line)
    return tuple(_parse_int(p, "hidden", line) for p in parts)


def _build_spec(values: dict[str, tuple[str, int]], section_line: int) -> RunSpec:
    for key in _REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"required key {key!r}", section_line)

    kwargs: dict = {}
    problem_token, problem_line = values["problem"]
    kwargs["problem"], kwargs["k"] = _parse_problem(problem_token, problem_line)

    token, line = values["algorithm"]
    if token not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {token!r}", line)
    kwargs["algorithm"] = token

    kwargs["d"] = _parse_int(values["d"][0], "d", values["d"][1])
    kwargs["budget"] = _parse_int(values["budget"][0], "budget", values["budget"][1])

    if "noise" in values:
        kwargs["noise"] = _parse_noise(*values["noise"])
    if "uh" in values:
        kwargs["uh"] = _parse_bool(values["uh"][0], "uh", values["uh"][1])
    if "restarts" in values:
        kwargs["restarts"] = _parse_bool(values["restarts"][0], "restarts", values["restarts"][1])
    if "runs" in values:
        kwargs["runs"] = _parse_int(values["runs"][0], "runs", values["runs"][1])
    if "seed" in values:
        kwargs["seed"] = _parse_int(values["seed"][0], "seed", values["seed"][1])
    if "sigma0" in values:
        kwargs["sigma0"] = _parse_float(values["sigma0"][0], "sigma0", values["sigma0"][1])
    if "init_box" in values:
        kwargs["init_box"] = _parse_pair(values["init_box"][0], "init_box", values["init_box"][1])
    if "log_every" in values:
        kwargs["log_every"] = _parse_int(values["log_every"][0], "log_every", values["log_every"][1])
    if "lambda" in values:
        kwargs["lam"] = _parse_int(values["lambda"][0], "lambda", values["lambda"][1])
    if "hidden" in values:
        kwargs["hidden"] = _parse_hidden(values["hidden"][0], values["hidden"][1])
    if "sigma_floor" in values:
        kwargs["sigma_floor"] = _parse_float(values["sigma_floor"][0], "sigma_floor", values["sigma_floor"][1])
    if "stagnation_gens" in values:
        kwargs["stagnation_gens"] = _parse_int(values["stagnation_gens"][0], "stagnation_gens", values["stagnation_gens"][1])
    if "target_fitness" in values:
        kwargs["target_fitness"] = _parse_float(values["target_fitness"][0], "target_fitness", values["target_fitness"][1])
    if "max_gens" in values:
        kwargs["max_gens"] = _parse_int(values["max_gens"][0], "max_gens", values["max_gens"][1])
    if "name" in values:
        kwargs["label"] = values["name"][0]

    spec = RunSpec(**kwargs)
    _validate_spec(spec, values, section_line)
    return spec


def _validate_spec(spec: RunSpec, values: dict, section_line: int) -> None:
    line_of = lambda key: values[key][1] if key in values else section_line
    if spec.d < 1:
        raise ConfigError("d must be >= 1", line_of("d"))
    if spec.runs < 1:
        raise ConfigError("runs must be >= 1", line_of("runs"))
    if spec.log_every < 1:
        raise ConfigError("log_every must be >= 1", line_of("log_every"))
    if spec.lam is not None and spec.lam < 4:
        raise ConfigError("lambda must be >= 4", line_of("lambda"))
    if spec.budget < spec.effective_lambda:
        raise ConfigError(
            f"budget {spec.budget} is below one population ({spec.effective_lambda})",
            line_of("budget"),
        )
    if spec.problem == "rosenbrock" and spec.d < 2:
        raise ConfigError("rosenbrock needs d >= 2", line_of("d"))
    if spec.problem == "pointmass":
        layers = (OBSERVATION_SIZE, *spec.hidden, ACTION_SIZE)
        expected = param_count(layers)
        if spec.d != expected:
            raise ConfigError(
                f"pointmass with hidden layers {spec.hidden} has {expected} parameters; "
                f"set d = {expected}",
                line_of("d"),
            )


def parse_config(text: str, seed_override: int | None = None) -> list[RunSpec]:
    """Parse and grid-expand a configuration file into RunSpecs."""
    sections: list[tuple[int, dict[str, tuple[str, int]]]] = []
    current: dict[str, tuple[str, int]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[run]":
            current = {}
            sections.append((lineno, current))
            continue
        if line.startswith("["):
            raise ConfigError(f"unknown section header {line!r}", lineno)
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if current is None:
            raise ConfigError(f"key {key!r} appears outside a [run] section", lineno)
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in current:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        if not value:
            raise ConfigError(f"empty value for key {key!r}", lineno)
        current[key] = (value, lineno)
    if not sections:
        raise ConfigError("no [run] section found")

    if seed_override is None and "HIDRA_SEED" in os.environ:
        try:
            seed_override = int(os.environ["HIDRA_SEED"])
        except ValueError:
            raise ConfigError(
                f"HIDRA_SEED must be an integer, got {os.environ['HIDRA_SEED']!r}"
            ) from None

    specs: list[RunSpec] = []
    for section_line, section in sections:
        specs.extend(_expand_section(section, section_line, seed_override))
    return specs


def _expand_section(section: dict[str, tuple[str, int]], section_line: int,
                    seed_override: int | None) -> list[RunSpec]:
    keys = list(section.keys())
    choices: list[list[str]] = []
    for key in keys:
        value, line = section[key]
        try:
            tokens = split_top_level(value)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: {exc}", line) from None
        tokens = [t for t in tokens if t]
        if not tokens:
            raise ConfigError(f"key {key!r} expands to nothing", line)
        choices.append(tokens)

    specs = []
    indices = [0] * len(keys)
    while True:
        values = {
            key: (choices[i][indices[i]], section[key][1]) for i, key in enumerate(keys)
        }
        spec = _build_spec(values, section_line)
        if seed_override is not None:
            spec = dataclasses.replace(spec, seed=seed_override)
        specs.append(spec)
        # odometer increment over the grid
        pos = len(keys) - 1
        while pos >= 0:
            indices[pos] += 1
            if indices[pos] < len(choices[pos]):
                break
            indices[pos] = 0
            pos -= 1
        if pos < 0:
            break
    if not specs:
        raise ConfigError("empty expansion", section_line)
    return specs
