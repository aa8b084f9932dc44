from abc import ABC, abstractmethod
from typing import Any


class IArtifactStorage(ABC):
    """产物存储接口：负责单个产物（矩阵 / 文档）的持久化存取"""

    @abstractmethod
    def write(self, obj: Any) -> None:
        """整体写入（覆盖）"""
        pass

    @abstractmethod
    def read(self) -> Any:
        """读取并校验"""
        pass

    @abstractmethod
    def exists(self) -> bool:
        """产物是否已存在"""
        pass

    @abstractmethod
    def clear(self) -> None:
        """删除产物（用于重新运行）"""
        pass
