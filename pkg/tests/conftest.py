#!/usr/bin/env python3
"""
Pytest 配置文件

提供图例程序等公共 fixture，注册 hypothesis 配置，并在每个测试前重置全局设置。
"""

import logging
import pathlib
import sys

import pytest
from hypothesis import HealthCheck, settings

# 添加 src 目录到 Python 路径
src_dir = pathlib.Path(__file__).parent.parent / 'src'
if str(src_dir) not in sys.path:
    sys.path.insert(0, str(src_dir))

# 设置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# 随机程序的执行时间差异很大，关闭 deadline
settings.register_profile('cecd', deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('cecd')

FIXTURES = pathlib.Path(__file__).parent / 'fixtures'


@pytest.fixture(autouse=True)
def fresh_setting():
    """每个测试使用默认全局设置"""
    from py_cecd.settings import reset_setting

    yield reset_setting()
    reset_setting()


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    """测试数据目录"""
    return FIXTURES


@pytest.fixture
def figure1_text() -> str:
    return (FIXTURES / 'figure1.cecd').read_text(encoding='utf-8')


@pytest.fixture
def figure1(figure1_text):
    """11 个基本块的示例程序"""
    from py_cecd.parser import parse_program

    return parse_program(figure1_text)


@pytest.fixture
def figure4():
    """示例程序经 CECD 变换后的期望结果"""
    from py_cecd.parser import parse_program

    return parse_program((FIXTURES / 'figure4.cecd').read_text(encoding='utf-8'))


@pytest.fixture
def cond_e():
    """示例中的条件 e：x < 3"""
    from py_cecd.parser import parse_expr

    return parse_expr('x < 3')


@pytest.fixture
def useful_region():
    """示例中由有用节点组成的区域"""
    return frozenset({'bb4', 'bb5', 'bb7', 'bb8', 'bb9', 'bb10'})
