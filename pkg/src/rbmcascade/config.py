"""Flat key-value run configuration (INI sections, diffable, fully defaulted).

`default_config_text()` is the complete documented key set; `print-config`
emits it verbatim.  Unknown keys or malformed values raise ConfigError,
which the CLI maps to exit code 2.
"""

from __future__ import annotations

import configparser
import io

from .errors import ContractError


class ConfigError(ContractError):
    pass


DEFAULT_CONFIG = """\
[data]
kind = mattis            ; mattis | pair
n_visible = 400
beta = 1.5
kappa = 0.5              ; pair teacher only
n_samples = 10000
mode = meanfield         ; meanfield | mcmc
mcmc_steps = 0           ; proposals between samples; 0 -> 10 * n_visible
format = csv01           ; csv01 | packed

[model]
n_hidden = 100
convention = binary01    ; binary01 | ising_pm1
hidden_kind = binary     ; binary | gaussian
weight_init_std = 1e-4   ; gaussian init, scaled by 1/sqrt(n_visible)

[train]
dataset =                ; path to dataset file (csv01 or packed)
scheme = pcd             ; pcd | cd | rdm
k = 100
learning_rate = 0.005
minibatch_size = 500
n_chains = 0             ; 0 -> minibatch_size
epochs = 1
checkpoint_count = 50
update_biases = true

[scan]
n_chains = 1000
n_sweeps = 1000
direction = cooling      ; cooling | heating
n_modes = 10

[fss]
gamma = 1.0
nu = 0.5
d_u = 4.0
wc_grid_lo = 3.5
wc_grid_hi = 6.0
wc_grid_step = 0.05

[hysteresis]
h_max = 0                ; 0 -> n_visible ** 0.75
n_loop = 50
k = 100
n_chains = 100

[relax]
n_chains = 64
max_sweeps = 4000
burn_in = 500

[theory]
kind = bg                ; bg | bb-shared | pair | free-energy
beta = 1.4
n_visible = 1000
alpha = 1.0              ; bb-shared: n_hidden / n_visible
kappa = 0.5              ; pair kinds
t_max = 30.0
dt = 0.01
u0 = 0.001               ; initial pattern projection
grid_extent = 1.5        ; free-energy: grid spans [-x, x]
grid_points = 61
"""


def default_config() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";",))
    parser.read_string(DEFAULT_CONFIG)
    return parser


def load_config(path=None) -> configparser.ConfigParser:
    """Defaults overlaid with the user file; unknown sections/keys rejected."""
    cfg = default_config()
    if path is None:
        return cfg
    user = configparser.ConfigParser(inline_comment_prefixes=(";",))
    try:
        with open(path) as fh:
            user.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    for section in user.sections():
        if not cfg.has_section(section):
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in user.items(section):
            if not cfg.has_option(section, key):
                raise ConfigError(f"unknown config key {key!r} in [{section}]")
            cfg.set(section, key, value)
    return cfg


def get_int(cfg, section, key) -> int:
    try:
        return cfg.getint(section, key)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} must be an integer") from exc


def get_float(cfg, section, key) -> float:
    try:
        return cfg.getfloat(section, key)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} must be a number") from exc


def get_bool(cfg, section, key) -> bool:
    try:
        return cfg.getboolean(section, key)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} must be a boolean") from exc


def get_choice(cfg, section, key, choices) -> str:
    value = cfg.get(section, key).strip()
    if value not in choices:
        raise ConfigError(f"[{section}] {key} must be one of {choices}, got {value!r}")
    return value


def config_echo(cfg) -> dict:
    """Plain dict snapshot of every key, for run manifests."""
    return {s: dict(cfg.items(s)) for s in cfg.sections()}
