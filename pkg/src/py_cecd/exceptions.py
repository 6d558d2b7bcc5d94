"""
py-cecd 异常定义

所有库内错误都继承自 CecdError，方便命令行统一映射退出码。
解释器的运行期错误不走异常，而是记录在 Trace 的 outcome 中。
"""

from typing import Optional


class CecdError(Exception):
    """py-cecd 所有错误的基类。"""


class IRSyntaxError(CecdError, ValueError):
    """文本 IR 语法错误，附带出错的行号与列号。"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f'{message} (line {line}, column {column})'
        super().__init__(message)


class UndefinedBlockError(IRSyntaxError):
    """引用了未定义的基本块。"""


class DuplicateBlockError(IRSyntaxError):
    """基本块 id 重复。"""


class MalformedProgramError(CecdError, ValueError):
    """以代码方式构造的 Program 违反了结构约束。"""


class UnknownBlockError(CecdError, KeyError):
    """访问了程序中不存在的基本块。"""

    def __str__(self) -> str:
        # KeyError 默认会给消息加引号
        return str(self.args[0]) if self.args else ''


class InvalidRegionError(CecdError, ValueError):
    """复制区域不合法：对条件操作数赋值，或包含入口块。"""


class TransformError(CecdError):
    """变换过程中的错误，例如副本 id 冲突。"""


class InstanceTooLargeError(CecdError, ValueError):
    """实例规模超过穷举搜索的上限。"""
