""" Configuration of wavemask: the default values of the masking schedule, the loss weights,
the toy models, the training loops and the metrics.

The packaged defaults live in 'wavemask_config.txt'. A user copy is kept in the user data
folder, so defaults can be changed persistently without touching the installation. Option
names are case sensitive ('T' is not 't').
"""
from configparser import ConfigParser
import os
import shutil
from typing import Callable, Dict, List, Union
from pathlib import Path


Observer = Callable[..., None]


def _parser(path: Union[Path, str, None] = None) -> ConfigParser:
    parser = ConfigParser()
    parser.optionxform = str
    if path is not None:
        parser.read(path)
    return parser


class WavemaskConfig:
    """ Packaged defaults layered under a persistent user file.

    Reading goes through the user file, which always holds every default option. Writing
    an option saves the user file and notifies the observers of its section.
    """

    def __init__(self, default_config: Union[Path, str], user_config: Union[Path, str]):
        self.default_config = str(default_config)
        self.user_config = str(user_config)
        self.user_folder = str(Path(user_config).parent)
        self._defaults = _parser(self.default_config)
        self._observers: Dict[str, List[Observer]] = {s: [] for s in self._defaults.sections()}

        if os.path.exists(self.user_config):
            self._user = _parser(self.user_config)
        else:
            self.reset_defaults()

        # files written by another release get the current defaults; user additions stay
        default_version = self._defaults["Configuration"]["version"]
        if self._user.get("Configuration", "version", fallback=None) != default_version:
            self.restore_defaults()

    @property
    def sections(self) -> List[str]:
        return self._user.sections()

    def sources(self, section: str) -> List[str]:
        """ Options available in a section. """
        return self._user.options(section)

    def __getitem__(self, item):
        if isinstance(item, str):
            return self._user[item]
        if isinstance(item, tuple) and len(item) == 2:
            section, option = item
            return self._user[section][option]
        raise KeyError(f"Invalid config option {item}.")

    def __setitem__(self, key, value) -> None:
        if not (isinstance(key, tuple) and len(key) == 2 and key[0] in self._user):
            raise KeyError(f"Invalid config option {key}.")
        section, option = key
        self._user[section][option] = str(value)
        self._save()
        for callback in self._observers.get(section, []):
            callback(option=option, value=str(value))

    def getint(self, section: str, option: str) -> int:
        return self._user.getint(section, option)

    def getfloat(self, section: str, option: str) -> float:
        return self._user.getfloat(section, option)

    def getboolean(self, section: str, option: str) -> bool:
        return self._user.getboolean(section, option)

    def register_observer(self, section: str, callback: Observer) -> None:
        """ Calls 'callback(option=..., value=...)' whenever an option of the section is set.

        :param section: a section of the packaged defaults
        :param callback: the function to call
        :return: None
        """
        if section not in self._observers:
            raise KeyError(f"Unknown section: {section}.")
        self._observers[section].append(callback)

    def reset_defaults(self) -> None:
        """ Overwrites the user file with the packaged defaults, dropping user additions.

        :return: None
        """
        os.makedirs(self.user_folder, exist_ok=True)
        shutil.copy2(self.default_config, self.user_config)
        self._user = _parser(self.user_config)

    def restore_defaults(self) -> None:
        """ Sets every packaged option back to its default, keeping options the user added.

        :return: None
        """
        for section in self._defaults.sections():
            if not self._user.has_section(section):
                self._user.add_section(section)
            self._user[section].update(self._defaults[section])
        self._save()

    def restore_default_option(self, section: str, option: str) -> None:
        """ Sets one option back to its packaged default.

        :param section: the section of the option
        :param option: the option name
        :return: None
        """
        if not self._defaults.has_option(section, option):
            raise KeyError(
                f"There is no default value for {section} option: {option}. Available "
                f"default {section} options are: {self._defaults.options(section)}"
            )
        self[section, option] = self._defaults[section][option]

    def _save(self) -> None:
        os.makedirs(self.user_folder, exist_ok=True)
        with open(self.user_config, "w") as fp:
            self._user.write(fp)

    def version(self) -> str:
        """ The wavemask version. """
        return self["Configuration", "version"]

    def verbose(self, show: Union[bool, None] = None) -> bool:
        """ Whether the command line logs progress messages at INFO level.

        :param show: True/False to change the setting, None to only read it
        :return: the current setting
        """
        if show is not None:
            self["Configuration", "verbose"] = show
        return self.getboolean("Configuration", "verbose")

    def __repr__(self) -> str:
        lines = []
        for section in self.sections:
            lines.append(f"[{section}]")
            lines.extend(f"{option} = {value}" for option, value in self._user[section].items())
            lines.append("")
        return "\n".join(lines)
