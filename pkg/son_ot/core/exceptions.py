"""son-ot 核心异常定义"""


class SonOTError(Exception):
    """son-ot 核心异常基类"""
    pass


class DimensionError(SonOTError):
    """维度不一致：代价矩阵 / 边缘分布 / 核矩阵 / 传输方案 / 向量长度"""
    pass


class ValidationError(SonOTError):
    """取值非法：负代价、非有限值、非正质量、非对称核等"""
    pass


class ConfigError(SonOTError):
    """实验配置错误（未知键、缺失字段、非法取值）"""
    pass


class DataError(SonOTError):
    """数据文件解析错误"""

    def __init__(self, message: str, line: int = None):
        self.line = line
        super().__init__(f"{message} (line {line})" if line is not None else message)


class DivergenceError(SonOTError):
    """迭代发散：出现非有限的迭代值"""

    def __init__(self, iteration: int, step: float):
        self.iteration = iteration
        self.step = step
        super().__init__(
            f"non-finite iterate at iteration {iteration}; "
            f"try a smaller step (current step={step:.6g})"
        )


class UnsupportedSizeError(SonOTError):
    """问题规模超出枚举 / 精确求解的上限"""
    pass
