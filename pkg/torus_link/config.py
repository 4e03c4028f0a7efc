import logging
from fractions import Fraction


class Config:
    """Base configuration class"""

    HEAT_TIMES = (1e-2, 1e-3, 1e-4)
    VERIFY_TOLERANCE = 1e-5
    AUTO_KMAX_THRESHOLD = 1e-16
    MAX_APEX_RETRIES = 8
    DISCONTINUITY_MARGIN = Fraction(1, 16)
    CONVERGENCE_WIDTHS = 5.0
    T2_INTEGRALITY_TOLERANCE = 1e-9
    LIFT_DENOMINATOR_BITS = 20
    LOG_LEVEL = logging.INFO

    @classmethod
    def init_app(cls, settings):
        assert 0 < cls.AUTO_KMAX_THRESHOLD < 1, "AUTO_KMAX_THRESHOLD must lie in (0, 1)"
        assert all(t > 0 for t in cls.HEAT_TIMES), "HEAT_TIMES must be positive"
        assert cls.MAX_APEX_RETRIES >= 0, "MAX_APEX_RETRIES must be nonnegative"
        settings.update(
            {key: getattr(cls, key) for key in dir(cls) if key.isupper()}
        )
        return settings


class DefaultConfig(Config):
    """Default command-line configuration"""


class TestingConfig(Config):
    """Testing configuration"""

    TESTING = True
    LOG_LEVEL = logging.WARNING


class DebugConfig(Config):
    """Debug configuration"""

    LOG_LEVEL = logging.DEBUG


config = {
    "default": DefaultConfig,
    "testing": TestingConfig,
    "debug": DebugConfig,
}
