"""Release number of hilange.

The number is exported as ``hilange.__version__``, read by setup.cfg and
reported by ``hilange --version``.
"""


class Version:
    """Release number with an optional pre release tag."""

    def __init__(self, package, major, minor, micro, pre=None):
        """Initialize.

        :param package: Distribution name
        :param major: Major release
        :param minor: Minor release
        :param micro: Patch release
        :param pre: Pre release tag, e.g. "dev1"
        """
        self.package = package
        self.major = major
        self.minor = minor
        self.micro = micro
        self.pre = pre

    def short(self):
        """Return ``major.minor.micro`` with the tag appended when set."""
        number = f"{self.major}.{self.minor}.{self.micro}"
        return f"{number}.{self.pre}" if self.pre else number

    def as_tuple(self):
        """Return (major, minor, micro)."""
        return (self.major, self.minor, self.micro)

    def __str__(self):
        """Return ``[package, version x.y.z]``."""
        return f"[{self.package}, version {self.short()}]"


version = Version("hilange", 0, 4, 0, "dev1")

__all__ = ["version"]
