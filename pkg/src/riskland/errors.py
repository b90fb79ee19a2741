"""Exception hierarchy. Each error carries a short category used by the CLI."""


class RisklandError(Exception):
    category = "error"


class ConfigError(RisklandError, ValueError):
    category = "config"


class DegenerateTransformError(RisklandError, ValueError):
    category = "degenerate-transform"


class ProjectionError(RisklandError, ArithmeticError):
    category = "projection"


class RiskMappingError(RisklandError, KeyError):
    category = "risk-mapping"

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class EmptyViewError(RisklandError):
    category = "empty-view"


class RenderError(RisklandError):
    category = "render"


class SceneLoadError(RisklandError):
    category = "scene-load"


class EvaluationError(RisklandError):
    category = "evaluation"


class UnsupportedSceneError(RisklandError):
    category = "unsupported-scene"


class FrameRangeError(RisklandError, IndexError):
    category = "frame-range"
