"""
异常定义
库代码只抛出这些异常，由命令行统一捕获
"""


class InfoDivError(Exception):
    """所有库异常的基类"""


class ValidationError(InfoDivError, ValueError):
    """输入不满足概率单纯形或参数约束"""


class DimensionError(InfoDivError, ValueError):
    """维度不一致"""


class ConfigError(InfoDivError):
    """参数组合不可行（例如超过内存上限）"""


class UnsupportedKernel(InfoDivError):
    """该散度没有谱核表示"""


class ConvergenceError(InfoDivError):
    """数值搜索未收敛"""


class DuplicateCoordinateError(ValidationError):
    """聚合流中同一个 (点, 坐标) 出现了两次"""


class IncompatibleArtifactError(InfoDivError):
    """两个产物（嵌入、草图）的参数头不一致，不能比较"""


class SketchMismatchError(IncompatibleArtifactError):
    """草图的种子、参数或网格摘要不一致"""


class EmbeddingMismatchError(IncompatibleArtifactError):
    """嵌入的网格或采样摘要不一致"""
