"""Module to load the simulation and training settings from a csv file.

A config file has one setting per row under a ``key,value`` header. Any other
columns (``unit``, ``note``, ...) are documentation and are ignored, as are
rows whose key starts with ``#``. Every key, its default, type and SI unit is
listed in SCHEMA; keys missing from a file take their default, which may
depend on the ``profile`` key:

 * full: 15 users, 50 slots, 1e5 training steps
 * desk: 5 users, 20 slots, 5e4 training steps
"""

import contextlib
import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterator, NamedTuple, Tuple

import numpy

import uavmec
from uavmec.agent import AgentConfig
from uavmec.channel import RadioParams
from uavmec.costs import ComputeParams, FlightParams
from uavmec.environment import Region, TaskRanges, WorldConfig, place_users
from uavmec.exceptions import ConfigException
from uavmec.robustness import ChanceSpec, JitterModel
from uavmec.units import db_to_linear, dbm_to_watts
from uavmec.utils import make_rng

SNAPSHOT_FILENAME = "config_snapshot.csv"
AUTO = "auto"
# Task size sweep values are given in Mbits.
MBIT = 1e6


class Setting(NamedTuple):
    default: Any
    kind: str
    unit: str
    description: str


SCHEMA: Dict[str, Setting] = {
    "profile": Setting("full", "str", "", "default profile, full or desk"),
    "seed": Setting(0, "int", "", "run seed"),
    "n_users": Setting(15, "int", "", "number of ground users K"),
    "layout_seed": Setting(7, "int", "", "seed of the user placement"),
    "x_min": Setting(0.0, "float", "m", "flight area lower x"),
    "x_max": Setting(500.0, "float", "m", "flight area upper x"),
    "y_min": Setting(0.0, "float", "m", "flight area lower y"),
    "y_max": Setting(500.0, "float", "m", "flight area upper y"),
    "h_min": Setting(100.0, "float", "m", "minimum altitude"),
    "h_max": Setting(200.0, "float", "m", "maximum altitude"),
    "v_max": Setting(20.0, "float", "m/s", "maximum flight speed"),
    "slot_len": Setting(1.5, "float", "s", "slot duration, also the task deadline"),
    "n_slots": Setting(50, "int", "", "slots per episode N"),
    "start_x": Setting(0.0, "float", "m", "UAV start x"),
    "start_y": Setting(0.0, "float", "m", "UAV start y"),
    "start_h": Setting(150.0, "float", "m", "UAV start altitude"),
    "bs_x": Setting(500.0, "float", "m", "base station x"),
    "bs_y": Setting(500.0, "float", "m", "base station y"),
    "bs_h": Setting(0.0, "float", "m", "base station height"),
    "beta0_db": Setting(-50.0, "float", "dB", "channel power gain at 1 m"),
    "path_loss_exponent": Setting(2.2, "float", "", "path-loss exponent"),
    "total_bandwidth": Setting(30e6, "float", "Hz", "bandwidth shared by all users"),
    "noise_psd_dbm_hz": Setting(-174.0, "float", "dBm/Hz", "noise power density"),
    "p_user": Setting(0.1, "float", "W", "user transmit power"),
    "p_uav": Setting(0.5, "float", "W", "UAV transmit power per relayed task"),
    "logistic_c1": Setting(0.2, "float", "", "fading approximation floor"),
    "logistic_c2": Setting(0.8, "float", "", "fading approximation span"),
    "logistic_b1": Setting(-4.3221, "float", "", "fading approximation offset"),
    "logistic_b2": Setting(6.075, "float", "", "fading approximation growth rate"),
    "f_user": Setting(1.5e9, "float", "Hz", "user CPU frequency"),
    "f_uav_max": Setting(30e9, "float", "Hz", "UAV CPU frequency"),
    "f_bs": Setting(15e9, "float", "Hz", "BS CPU frequency per user"),
    "tau_user": Setting(1e-29, "float", "", "user effective capacitance"),
    "tau_uav": Setting(1e-29, "float", "", "UAV effective capacitance"),
    "epsilon_comp": Setting(2.0, "float", "", "compression algorithm constant"),
    "gamma_min": Setting(0.5, "float", "", "minimum compression ratio"),
    "p0": Setting(79.86, "float", "W", "blade profile power"),
    "p1": Setting(88.63, "float", "W", "hover induced power"),
    "p2": Setting(10.0, "float", "W.s/m", "vertical power coefficient"),
    "u_tip": Setting(120.0, "float", "m/s", "rotor blade tip speed"),
    "v0": Setting(4.03, "float", "m/s", "mean rotor induced speed in hover"),
    "d0": Setting(0.6, "float", "", "fuselage drag ratio"),
    "rho_air": Setting(1.225, "float", "kg/m^3", "air density"),
    "s_solidity": Setting(0.05, "float", "", "rotor solidity"),
    "disc_area": Setting(0.503, "float", "m^2", "rotor disc area"),
    "e_uav_max": Setting(20000.0, "float", "J", "UAV energy budget"),
    "data_min": Setting(1e6, "float", "bit", "smallest task size"),
    "data_max": Setting(2.5e6, "float", "bit", "largest task size"),
    "density_min": Setting(700.0, "float", "cycles/bit", "lowest task density"),
    "density_max": Setting(1000.0, "float", "cycles/bit", "highest task density"),
    "jitter_sigma": Setting(1.0, "float", "m", "UAV jitter standard deviation"),
    "rho_trj": Setting(0.1, "float", "", "tolerated speed violation probability"),
    "hidden": Setting((128, 128), "ints", "", "hidden layer widths"),
    "ensemble_size": Setting(10, "int", "", "number of critics X"),
    "subset_size": Setting(2, "int", "", "critics in the target minimum Y"),
    "utd_ratio": Setting(20, "int", "", "critic updates per environment step G"),
    "discount": Setting(0.9, "float", "", "discount factor"),
    "batch_size": Setting(256, "int", "", "mini-batch size"),
    "replay_capacity": Setting(20000, "int", "", "replay buffer capacity"),
    "lr_actor": Setting(1e-4, "float", "", "actor learning rate"),
    "lr_critic": Setting(1e-3, "float", "", "critic learning rate"),
    "lr_entropy": Setting(3e-4, "float", "", "entropy weight learning rate"),
    "tau": Setting(0.995, "float", "", "weight of the old target in soft updates"),
    "entropy_target": Setting(
        AUTO, "float_or_auto", "", "target entropy, auto = -(3K+3)"
    ),
    "initial_entropy_weight": Setting(0.01, "float", "", "initial entropy weight"),
    "warmup_steps": Setting(1000, "int", "", "uniform random steps before learning"),
    "log_std_min": Setting(-20.0, "float", "", "lower clamp of the policy log std"),
    "log_std_max": Setting(2.0, "float", "", "upper clamp of the policy log std"),
    "adam_beta1": Setting(0.9, "float", "", "Adam first moment decay"),
    "adam_beta2": Setting(0.999, "float", "", "Adam second moment decay"),
    "adam_eps": Setting(1e-8, "float", "", "Adam numerical epsilon"),
    "reward_scale": Setting(1.0, "float", "", "factor on rewards stored for learning"),
    "total_steps": Setting(100000, "int", "", "training environment steps"),
    "eval_episodes": Setting(20, "int", "", "evaluation episodes per run"),
    "scheme": Setting(uavmec.PROPOSED, "str", "", "scheme trained or evaluated"),
    "out_dir": Setting("runs", "str", "", "output directory"),
    "sigma_sweep": Setting((0.5, 1.0, 2.0, 3.0), "floats", "m", "jitter sweep values"),
    "users_sweep": Setting((5, 10, 15, 20), "ints", "", "user count sweep values"),
    "task_size_sweep": Setting(
        ((1.0, 1.25), (1.25, 1.5), (1.5, 1.75), (1.75, 2.0)),
        "ranges",
        "Mbit",
        "task size range sweep values",
    ),
    "sweep_schemes": Setting(uavmec.SCHEMES, "strs", "", "schemes compared in sweeps"),
}

PROFILES: Dict[str, Dict[str, Any]] = {
    "full": {},
    "desk": {
        "n_users": 5,
        "n_slots": 20,
        "total_steps": 50000,
        "users_sweep": (3, 5, 7),
    },
}


@contextlib.contextmanager
def csv_loader(csv_file: Path) -> Iterator[csv.DictReader]:
    with open(csv_file, newline="") as f:
        csv_reader = csv.DictReader(f)
        yield csv_reader


def _parse_int(text):
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise
        return int(value)


def _parse_range(text):
    lower, sep, upper = text.partition("-")
    if not sep:
        raise ValueError(f"expected 'lower-upper', got {text!r}")
    return (float(lower), float(upper))


def parse_value(key, text):
    """Convert the text of a setting to its schema type.

    Args:
        key (str): The setting name.
        text (str): The text found in the file.

    Returns:
        The typed value.

    Raises:
        ConfigException: if the key is unknown or the text does not parse.

    >>> parse_value("hidden", "64, 64")
    (64, 64)
    """
    if key not in SCHEMA:
        raise ConfigException(f"Unknown config key {key}.")
    kind = SCHEMA[key].kind
    text = text.strip()
    items = [item.strip() for item in text.split(",") if item.strip()]
    try:
        if kind == "float":
            return float(text)
        elif kind == "int":
            return _parse_int(text)
        elif kind == "str":
            return text
        elif kind == "float_or_auto":
            return AUTO if text == AUTO else float(text)
        elif kind == "floats":
            return tuple(float(item) for item in items)
        elif kind == "ints":
            return tuple(_parse_int(item) for item in items)
        elif kind == "ranges":
            return tuple(_parse_range(item) for item in items)
        else:
            return tuple(items)
    except ValueError as exc:
        raise ConfigException(f"Bad value {text!r} for config key {key}: {exc}.")


def format_value(key, value):
    """Write a typed value back as text that parse_value reads unchanged.

    >>> format_value("task_size_sweep", ((1.0, 1.5),))
    '1.0-1.5'
    """
    kind = SCHEMA[key].kind
    if kind in ("float", "float_or_auto") and value != AUTO:
        return repr(float(value))
    elif kind == "floats":
        return ",".join(repr(float(item)) for item in value)
    elif kind == "ints":
        return ",".join(str(int(item)) for item in value)
    elif kind == "ranges":
        return ",".join(f"{float(lo)!r}-{float(hi)!r}" for lo, hi in value)
    elif kind == "strs":
        return ",".join(value)
    return str(value)


def _coerce(key, value):
    """Convert a value given in code (or as text) to its schema type."""
    if isinstance(value, str):
        return parse_value(key, value)
    if key not in SCHEMA:
        raise ConfigException(f"Unknown config key {key}.")
    return parse_value(key, format_value(key, value))


@dataclass(frozen=True)
class RunConfig:
    """Settings of a command run rather than of the world or the learner."""

    seed: int = 0
    user_count: int = 15
    total_steps: int = 100000
    eval_episodes: int = 20
    sigma_sweep: Tuple[float, ...] = (0.5, 1.0, 2.0, 3.0)
    users_sweep: Tuple[int, ...] = (5, 10, 15, 20)
    task_size_sweep: Tuple[Tuple[float, float], ...] = ((1.0, 1.25),)
    sweep_schemes: Tuple[str, ...] = uavmec.SCHEMES
    scheme: str = uavmec.PROPOSED
    out_dir: str = "runs"

    def __post_init__(self):
        if self.user_count < 1:
            raise ConfigException(f"Need at least one user, got {self.user_count}.")
        if self.total_steps < 1:
            raise ConfigException(
                f"total_steps must be at least 1, got {self.total_steps}."
            )
        if self.eval_episodes < 1:
            raise ConfigException(
                f"eval_episodes must be at least 1, got {self.eval_episodes}."
            )
        for scheme in (self.scheme,) + tuple(self.sweep_schemes):
            if scheme not in uavmec.SCHEMES:
                raise ConfigException(
                    f"Unknown scheme {scheme}; expected one of {uavmec.SCHEMES}."
                )


class Config:
    """A complete, typed set of settings.

    **Attributes:**

    Attributes:
        profile (str): The profile the defaults were taken from.

    .. Private Attributes:
           _values (dict): Every schema key mapped to its typed value.
    """

    def __init__(self, values):
        """
        Args:
            values (dict): Typed values for every key in SCHEMA.

        Raises:
            ConfigException: if a key is missing or unknown.

        **Methods:**
        """
        missing = set(SCHEMA) - set(values)
        unknown = set(values) - set(SCHEMA)
        if missing or unknown:
            raise ConfigException(
                f"Config keys missing: {sorted(missing)}, unknown: {sorted(unknown)}."
            )
        self._values = dict(values)
        self.profile = self._values["profile"]

    def __getitem__(self, key):
        try:
            return self._values[key]
        except KeyError:
            raise ConfigException(f"Unknown config key {key}.")

    def get(self, key):
        return self[key]

    def items(self):
        return [(key, self._values[key]) for key in SCHEMA]

    def override(self, **changes):
        """Return a copy with some settings changed.

        Raises:
            ConfigException: if a key is unknown or a value does not parse.
        """
        values = dict(self._values)
        for key, value in changes.items():
            values[key] = _coerce(key, value)
        return Config(values)

    def _fields_of(self, params_class):
        return {name: self._values[name] for name in params_class.__dataclass_fields__}

    def world(self):
        """Build the simulated world, placing users from ``layout_seed``.

        Returns:
            WorldConfig: the world described by these settings.
        """
        v = self._values
        region = Region(
            x_min=v["x_min"],
            x_max=v["x_max"],
            y_min=v["y_min"],
            y_max=v["y_max"],
            h_min=v["h_min"],
            h_max=v["h_max"],
            v_max=v["v_max"],
            slot_len=v["slot_len"],
            n_slots=v["n_slots"],
        )
        radio = RadioParams(
            beta0=db_to_linear(v["beta0_db"]),
            alpha=v["path_loss_exponent"],
            total_bandwidth=v["total_bandwidth"],
            noise_psd=dbm_to_watts(v["noise_psd_dbm_hz"]),
            p_user=v["p_user"],
            p_uav=v["p_uav"],
            c1=v["logistic_c1"],
            c2=v["logistic_c2"],
            b1=v["logistic_b1"],
            b2=v["logistic_b2"],
        )
        compute = ComputeParams(**self._fields_of(ComputeParams))
        flight = FlightParams(**self._fields_of(FlightParams))
        tasks = TaskRanges(**self._fields_of(TaskRanges))
        if v["n_users"] < 1:
            raise ConfigException(f"Need at least one user, got {v['n_users']}.")
        users = place_users(v["n_users"], region, make_rng(v["layout_seed"], "layout"))
        return WorldConfig(
            user_positions=users,
            radio=radio,
            compute=compute,
            flight=flight,
            region=region,
            tasks=tasks,
            jitter=JitterModel(v["jitter_sigma"]),
            chance=ChanceSpec(v["rho_trj"]),
            start_pos=numpy.array([v["start_x"], v["start_y"], v["start_h"]]),
            bs_pos=numpy.array([v["bs_x"], v["bs_y"], v["bs_h"]]),
        )

    def agent(self):
        """Build the learner settings, resolving an ``auto`` entropy target."""
        v = self._values
        entropy_target = v["entropy_target"]
        if entropy_target == AUTO:
            entropy_target = -float(3 * v["n_users"] + 3)
        names = set(AgentConfig.__dataclass_fields__) - {"entropy_target"}
        fields = {name: v[name] for name in names}
        return AgentConfig(entropy_target=entropy_target, **fields)

    def run(self):
        v = self._values
        return RunConfig(
            seed=v["seed"],
            user_count=v["n_users"],
            total_steps=v["total_steps"],
            eval_episodes=v["eval_episodes"],
            sigma_sweep=v["sigma_sweep"],
            users_sweep=v["users_sweep"],
            task_size_sweep=v["task_size_sweep"],
            sweep_schemes=v["sweep_schemes"],
            scheme=v["scheme"],
            out_dir=v["out_dir"],
        )

    def validate(self):
        """Build every typed view once so that bad values fail early.

        Raises:
            ConfigException: naming the offending setting.
        """
        self.world()
        self.agent()
        self.run()
        return self

    def snapshot(self, directory):
        """Write every setting with its effective value and unit.

        Args:
            directory (str or Path): The output directory.

        Returns:
            Path: the snapshot file, loadable with `load`.
        """
        path = Path(directory) / SNAPSHOT_FILENAME
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["key", "value", "unit"])
            for key, value in self.items():
                writer.writerow([key, format_value(key, value), SCHEMA[key].unit])
        logging.info(f"Wrote {path}.")
        return path


def default_config(profile="full", **overrides):
    """Return the defaults of a profile, with optional overrides.

    Raises:
        ConfigException: if the profile or an override is not valid.

    >>> default_config("desk")["n_users"]
    5
    """
    if profile not in PROFILES:
        raise ConfigException(
            f"Unknown profile {profile}; expected one of {list(PROFILES)}."
        )
    values = {key: setting.default for key, setting in SCHEMA.items()}
    values.update(PROFILES[profile])
    values["profile"] = profile
    return Config(values).override(**overrides)


def load(filepath):
    """Load the settings in a config file.

    Args:
        filepath (str or Path): The csv file to load.

    Returns:
        Config: the validated settings.

    Raises:
        ConfigException: if the file is missing or malformed, a key is unknown
                         or repeated, or a value is not valid.
    """
    filepath = Path(filepath)
    if not filepath.is_file():
        raise ConfigException(f"Config file {filepath} not found.")
    rows: Dict[str, str] = {}
    with csv_loader(filepath) as csv_reader:
        fields = csv_reader.fieldnames or []
        if "key" not in fields or "value" not in fields:
            raise ConfigException(
                f"{filepath} must have 'key' and 'value' columns, found {fields}."
            )
        if "unit" not in fields:
            logging.warning(f"{filepath} has no unit column; units are as documented.")
        for item in csv_reader:
            key = (item["key"] or "").strip()
            if not key or key.startswith("#"):
                continue
            if key not in SCHEMA:
                raise ConfigException(f"Unknown config key {key} in {filepath}.")
            if key in rows:
                raise ConfigException(f"Config key {key} repeated in {filepath}.")
            rows[key] = item["value"] or ""
    profile = parse_value("profile", rows.pop("profile", "full"))
    config = default_config(profile, **rows)
    return config.validate()
