"""
py-cecd 全局设置

Setting 类集中管理解释器燃料、区域评估参数 k、随机验证参数等全局选项。
部分选项可以通过环境变量覆盖（仅在创建时读取一次）：

    CECD_FUEL, CECD_K, CECD_SEED, CECD_BRUTE_FORCE_LIMIT
"""

import logging
import os
from typing import Optional

logger = logging.getLogger(__name__)


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f'环境变量 {name}={raw!r} 不是整数，使用默认值 {default}')
        return default


class Setting:
    """
    Setting 类封装了 py-cecd 的全局设置选项，如解释器燃料、区域评估参数、
    随机输入范围等。这些设置会影响命令行和库函数的默认行为。
    """

    def __init__(self):
        """
        初始化 Setting 对象，读取环境变量覆盖项。
        """
        self._fuel = 10000
        self._k = 0
        self._verify_seed = 0
        self._input_low = -8
        self._input_high = 8
        self._extra_inputs = 4
        self._brute_force_limit = 20
        self._guarded_reachability = True
        self._keep_originals = False

        self.fuel = _env_int('CECD_FUEL', self._fuel)
        self.k = _env_int('CECD_K', self._k)
        self.verify_seed = _env_int('CECD_SEED', self._verify_seed)
        self.brute_force_limit = _env_int('CECD_BRUTE_FORCE_LIMIT', self._brute_force_limit)

    @property
    def fuel(self) -> int:
        """
        获取解释器默认燃料（指令与终结指令的执行步数上限）。

        Returns:
            int: 燃料值，>= 1
        """
        return self._fuel

    @fuel.setter
    def fuel(self, value: int):
        """
        设置解释器默认燃料。

        Args:
            value (int): 燃料值，必须 >= 1
        """
        if value < 1:
            raise ValueError(f'fuel must be positive, got {value}')
        self._fuel = value

    @property
    def k(self) -> int:
        """
        获取区域评估参数 k：每消除一个条件允许增长的指令数。

        Returns:
            int: k 值，>= 0
        """
        return self._k

    @k.setter
    def k(self, value: int):
        if value < 0:
            raise ValueError(f'k must be non-negative, got {value}')
        self._k = value

    @property
    def verify_seed(self) -> int:
        """
        获取随机验证所用的种子。

        Returns:
            int: 随机种子
        """
        return self._verify_seed

    @verify_seed.setter
    def verify_seed(self, value: int):
        self._verify_seed = value

    @property
    def input_low(self) -> int:
        """随机输入取值下界（含）。"""
        return self._input_low

    @input_low.setter
    def input_low(self, value: int):
        if value > self._input_high:
            raise ValueError(f'input_low {value} is greater than input_high {self._input_high}')
        self._input_low = value

    @property
    def input_high(self) -> int:
        """随机输入取值上界（含）。"""
        return self._input_high

    @input_high.setter
    def input_high(self, value: int):
        if value < self._input_low:
            raise ValueError(f'input_high {value} is less than input_low {self._input_low}')
        self._input_high = value

    @property
    def extra_inputs(self) -> int:
        """
        获取随机输入向量在 Input 指令数之外额外追加的长度。

        Returns:
            int: 额外长度，>= 0
        """
        return self._extra_inputs

    @extra_inputs.setter
    def extra_inputs(self, value: int):
        if value < 0:
            raise ValueError(f'extra_inputs must be non-negative, got {value}')
        self._extra_inputs = value

    @property
    def brute_force_limit(self) -> int:
        """
        获取穷举搜索允许的最大候选数（候选基本块或背包物品）。

        Returns:
            int: 上限值
        """
        return self._brute_force_limit

    @brute_force_limit.setter
    def brute_force_limit(self, value: int):
        if value < 1:
            raise ValueError(f'brute_force_limit must be positive, got {value}')
        self._brute_force_limit = value

    @property
    def guarded_reachability(self) -> bool:
        """
        是否使用带 ¬Expr 保护项的 R^t/R^f 方程。

        如果为 True（默认），传播项只沿不计算 e 的前驱进行；
        如果为 False，使用未加保护的原始方程，仅用于对比。

        Returns:
            bool: True 表示使用修正后的方程
        """
        return self._guarded_reachability

    @guarded_reachability.setter
    def guarded_reachability(self, value: bool):
        self._guarded_reachability = value

    @property
    def keep_originals(self) -> bool:
        """
        复制阶段是否保留区域内的原始基本块（用于逐步复现变换过程）。

        Returns:
            bool: True 表示保留
        """
        return self._keep_originals

    @keep_originals.setter
    def keep_originals(self, value: bool):
        self._keep_originals = value

    def __repr__(self) -> str:
        return (
            f'<class {self.__class__.__name__} at {hex(id(self))}, fuel:{self.fuel} k:{self.k} '
            f'seed:{self.verify_seed} inputs:[{self.input_low},{self.input_high}]+{self.extra_inputs}>'
        )


# 全局单例设置，延迟创建以便测试中修改环境变量
_G_SETTING: Optional[Setting] = None


def get_setting() -> Setting:
    """获取全局单例 Setting。"""
    global _G_SETTING
    if _G_SETTING is None:
        _G_SETTING = Setting()
    return _G_SETTING


def reset_setting() -> Setting:
    """丢弃当前单例并按默认值与环境变量重新创建。"""
    global _G_SETTING
    _G_SETTING = Setting()
    return _G_SETTING
