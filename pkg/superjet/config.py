"""
Engine configuration: an optional llsd file layered under runtime overrides.

The combined view is defaults, then the file map, then whatever has been
set or updated at runtime. Keys:

``udeg_bound``     default polynomial degree bound in u for ansatz probes
``max_unknowns``   cap on the unknowns of a linear system before refusing
``oracle_points``  random points used by evaluation oracles
``random_seed``    seed for the oracle point generator
``oracle_range``   integer range (+/-) the oracle samples from
``verify_pairs``   check the bihamiltonian conditions when building a pair
"""
from __future__ import absolute_import

import copy
import logging

import llsd

log = logging.getLogger(__name__)

DEFAULTS = {
    "udeg_bound": 3,
    "max_unknowns": 600,
    "oracle_points": 8,
    "random_seed": 20240101,
    "oracle_range": 7,
    "verify_pairs": True,
}

_g_config = None


def _parse(source):
    if isinstance(source, dict):
        return source
    if isinstance(source, str):
        with open(source, "rb") as config_file:
            return llsd.parse(config_file.read())
    # file-like
    return llsd.parse(source.read())


class Config(object):
    """
    Layered engine settings.

    Values given through set or update stay in force over the file map
    until the next set/update of the same key.
    """

    def __init__(self, config_filename=None):
        """
        :param config_filename: llsd file with a map of settings, or None
           for defaults only.
        """
        self._config_filename = config_filename
        self._config_overrides = {}
        self._config_file_dict = {}
        self._combined_dict = {}
        self._load()

    def _load(self):
        if self._config_filename is not None:
            self._config_file_dict = _parse(self._config_filename)
            log.debug("loaded config from %s", self._config_filename)
        self._combine_dictionaries()

    def _combine_dictionaries(self):
        self._combined_dict = dict(DEFAULTS)
        if self._config_file_dict:
            self._combined_dict.update(self._config_file_dict)
        self._combined_dict.update(self._config_overrides)

    def __getitem__(self, key):
        return self._combined_dict[key]

    def get(self, key, default=None):
        """
        :param key: setting name
        :param default: returned when the key is unknown
        """
        try:
            return self[key]
        except KeyError:
            return default

    def __setitem__(self, key, value):
        self._config_overrides[key] = value
        self._combine_dictionaries()

    def set(self, key, newval):
        self[key] = newval

    def update(self, new_conf):
        """
        :param new_conf: a dict, an llsd filename or a file-like object
        """
        self._config_overrides.update(_parse(new_conf))
        self._combine_dictionaries()

    def as_dict(self):
        return copy.deepcopy(self._combined_dict)


def _config():
    global _g_config
    if _g_config is None:
        _g_config = Config(None)
    return _g_config


def load(config_file):
    """Replace the module config with one read from config_file."""
    global _g_config
    _g_config = Config(config_file)


def reset():
    """Drop file settings and overrides; back to DEFAULTS."""
    global _g_config
    _g_config = None


def update(new_conf):
    _config().update(new_conf)


def get(key, default=None):
    return _config().get(key, default)


def set(key, newval):
    _config().set(key, newval)


def as_dict():
    return _config().as_dict()
