"""
Py-CECD: 通过代码复制消除条件分支（Conditional Elimination through Code Duplication）。

解析基于控制流图的小型中间表示，用任意路径数据流分析选出有效且有用的复制区域，
执行三重复制变换并清理死代码，再用内置解释器验证语义保持。

示例:
    from py_cecd import apply_cecd, parse_expr, parse_program, print_program, select_region

    program = parse_program(open("figure1.cecd").read())
    region = select_region(program, parse_expr("x < 3"))
    optimized, report = apply_cecd(program, region)
    print(print_program(optimized))
"""

__version__ = '0.1.0'

from py_cecd.analysis import (
    AnalysisResult,
    LocalProps,
    compute_locals,
    compute_reachable_copies,
    compute_region,
    solve_any_path,
    useful_oracle,
)
from py_cecd.dot import emit_dot
from py_cecd.exceptions import CecdError, InvalidRegionError, IRSyntaxError
from py_cecd.heuristic import (
    CostReport,
    EvalParams,
    ProfileData,
    best_region_by_profile,
    evaluate_region,
    select_region,
)
from py_cecd.interpreter import ExecStats, Trace, equivalent, run
from py_cecd.ir import BasicBlock, CopyKind, Program, expr_eq, operands_of, pred, succ
from py_cecd.knapsack import KnapsackInstance, build_knapsack_cfg, knapsack_brute_force
from py_cecd.parser import parse_expr, parse_program
from py_cecd.printer import print_expr, print_program
from py_cecd.settings import Setting, get_setting
from py_cecd.transform import Region, TransformReport, apply_cecd, check_valid, cleanup, duplicate, eliminate, rewire

# 公共 API
__all__ = [
    '__version__',
    # 中间表示
    'Program',
    'BasicBlock',
    'CopyKind',
    'parse_program',
    'parse_expr',
    'print_program',
    'print_expr',
    'expr_eq',
    'operands_of',
    'succ',
    'pred',
    'emit_dot',
    # 解释器
    'run',
    'equivalent',
    'Trace',
    'ExecStats',
    # 分析
    'LocalProps',
    'AnalysisResult',
    'compute_locals',
    'solve_any_path',
    'compute_region',
    'compute_reachable_copies',
    'useful_oracle',
    # 变换
    'Region',
    'TransformReport',
    'check_valid',
    'duplicate',
    'rewire',
    'eliminate',
    'cleanup',
    'apply_cecd',
    # 启发式
    'EvalParams',
    'CostReport',
    'ProfileData',
    'select_region',
    'evaluate_region',
    'best_region_by_profile',
    'KnapsackInstance',
    'build_knapsack_cfg',
    'knapsack_brute_force',
    # 异常
    'CecdError',
    'IRSyntaxError',
    'InvalidRegionError',
    # 配置
    'Setting',
    'get_setting',
]
