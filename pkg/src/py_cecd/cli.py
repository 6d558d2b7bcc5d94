"""
命令行入口

    cecd opt FILE [-k K] [--cond EXPR] [-o OUT] [--emit-dot DIR] [--stats FILE] [--verify N] ...
    cecd analyze FILE --cond EXPR
    cecd run FILE [--inputs 1,2,3] [--env x=1] [--fuel N]
    cecd knapsack-demo --items 2:3,3:4 --budget 5
    cecd dot FILE [--cond EXPR]

退出码：0 成功；1 运行时错误或背包对比失败；2 用法 / 解析错误；3 验证失败。
日志写到 stderr，stdout 只输出 IR、JSON 或执行结果。
"""

from __future__ import annotations

import logging
import pathlib
from typing import NoReturn, Optional, TextIO

import click

from py_cecd import __version__
from py_cecd.analysis import Strategy, compute_reachable_copies
from py_cecd.dot import emit_dot
from py_cecd.exceptions import CecdError, InstanceTooLargeError
from py_cecd.heuristic import EvalParams, ProfileData, best_region_by_profile
from py_cecd.interpreter import Outcome, run
from py_cecd.ir import Expr, Program
from py_cecd.knapsack import KnapsackInstance, build_knapsack_cfg, knapsack_brute_force
from py_cecd.parser import parse_expr, parse_program
from py_cecd.pipeline import optimize
from py_cecd.printer import print_expr, print_program
from py_cecd.settings import get_setting
from py_cecd.transform import Step

logger = logging.getLogger(__name__)

EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3


def _fail(ctx: click.Context, message: str, code: int = EXIT_USAGE) -> NoReturn:
    click.echo(f'error: {message}', err=True)
    ctx.exit(code)


def _load_program(ctx: click.Context, source: TextIO) -> Program:
    try:
        return parse_program(source.read())
    except CecdError as e:
        _fail(ctx, f'{source.name}: {e}')


def _load_cond(ctx: click.Context, text: str) -> Expr:
    try:
        return parse_expr(text)
    except CecdError as e:
        _fail(ctx, f'invalid --cond {text!r}: {e}')


def _parse_ints(ctx: click.Context, text: str, option: str) -> list[int]:
    try:
        return [int(chunk) for chunk in text.split(',') if chunk.strip()]
    except ValueError:
        _fail(ctx, f'{option} expects a comma separated list of integers, got {text!r}')


def _parse_env(ctx: click.Context, text: str) -> dict[str, int]:
    env = {}
    for chunk in text.split(','):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, sep, value = chunk.partition('=')
        try:
            if not sep:
                raise ValueError(chunk)
            env[name.strip()] = int(value)
        except ValueError:
            _fail(ctx, f'--env expects name=value pairs, got {chunk!r}')
    return env


@click.group()
@click.option('-v', '--verbose', is_flag=True, help='输出调试日志')
@click.option('-q', '--quiet', is_flag=True, help='只输出警告和错误')
@click.version_option(__version__, prog_name='cecd')
def main(verbose: bool, quiet: bool):
    """CECD：通过代码复制消除条件分支的实验工具。"""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')


@main.command('opt')
@click.argument('source', type=click.File('r', encoding='utf-8'))
@click.option('-k', 'k', type=click.IntRange(min=0), default=None, help='每消除一个条件允许增长的指令数')
@click.option('--cond', 'cond_text', default=None, help='只处理这一个条件表达式')
@click.option('-o', '--output', type=click.File('w', encoding='utf-8'), default=None, help='输出文件，默认 stdout')
@click.option('--emit-dot', 'dot_dir', type=click.Path(file_okay=False, path_type=pathlib.Path), default=None)
@click.option('--stats', 'stats_file', type=click.File('w', encoding='utf-8'), default=None)
@click.option('--verify', 'verify_count', type=click.IntRange(min=0), default=0, help='随机验证的输入组数')
@click.option('--seed', type=int, default=None, help='随机验证的种子')
@click.option('--fuel', type=click.IntRange(min=1), default=None)
@click.option('--keep-originals', is_flag=True, help='复制后保留原始块')
@click.option('--stop-after', type=click.Choice([step.value for step in Step]), default=None)
@click.option('--profile', 'profile_file', type=click.File('r', encoding='utf-8'), default=None, help='剖析数据 JSON')
@click.pass_context
def opt_command(
    ctx: click.Context,
    source: TextIO,
    k: Optional[int],
    cond_text: Optional[str],
    output: Optional[TextIO],
    dot_dir: Optional[pathlib.Path],
    stats_file: Optional[TextIO],
    verify_count: int,
    seed: Optional[int],
    fuel: Optional[int],
    keep_originals: bool,
    stop_after: Optional[str],
    profile_file: Optional[TextIO],
):
    """对 SOURCE 执行 CECD 优化。"""
    program = _load_program(ctx, source)
    cond = _load_cond(ctx, cond_text) if cond_text is not None else None
    profile = None
    if profile_file is not None:
        try:
            profile = ProfileData.from_json(profile_file.read())
        except ValueError as e:
            _fail(ctx, f'invalid profile: {e}')

    try:
        result = optimize(
            program,
            k=k,
            cond=cond,
            profile=profile,
            verify_count=verify_count,
            seed=seed,
            fuel=fuel,
            keep_originals=True if keep_originals else None,
            stop_after=Step(stop_after) if stop_after else None,
        )
    except InstanceTooLargeError as e:
        _fail(ctx, str(e))

    text = print_program(result.program)
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write(text)

    if dot_dir is not None:
        dot_dir.mkdir(parents=True, exist_ok=True)
        (dot_dir / 'before.dot').write_text(emit_dot(program), encoding='utf-8')
        (dot_dir / 'after.dot').write_text(emit_dot(result.program), encoding='utf-8')
    if stats_file is not None:
        stats_file.write(result.stats_json())

    if result.verification_failed:
        logger.warning('变换后的程序未通过随机验证，输出仍已写出')
        ctx.exit(EXIT_VERIFY)


@main.command('analyze')
@click.argument('source', type=click.File('r', encoding='utf-8'))
@click.option('--cond', 'cond_text', required=True, help='要分析的条件表达式')
@click.option('--strategy', type=click.Choice([strategy.value for strategy in Strategy]), default='round_robin')
@click.option('--literal-reachability', is_flag=True, help='使用不带保护项的 Rt / Rf 方程')
@click.pass_context
def analyze_command(ctx: click.Context, source: TextIO, cond_text: str, strategy: str, literal_reachability: bool):
    """输出每个基本块的 Valid / Expr / Live / Antic / D / Rt / Rf / Ru。"""
    program = _load_program(ctx, source)
    cond = _load_cond(ctx, cond_text)
    guarded = False if literal_reachability else None
    result = compute_reachable_copies(program, cond, guarded=guarded, strategy=Strategy(strategy))
    click.echo(result.to_json())


@main.command('run')
@click.argument('source', type=click.File('r', encoding='utf-8'))
@click.option('--inputs', 'inputs_text', default='', help='逗号分隔的输入，例如 1,2,3')
@click.option('--env', 'env_text', default='', help='初始变量绑定，例如 x=1,y=2')
@click.option('--fuel', type=click.IntRange(min=1), default=None)
@click.pass_context
def run_command(ctx: click.Context, source: TextIO, inputs_text: str, env_text: str, fuel: Optional[int]):
    """解释执行程序：逐行输出打印值，最后一行为执行摘要。"""
    program = _load_program(ctx, source)
    inputs = _parse_ints(ctx, inputs_text, '--inputs')
    env = _parse_env(ctx, env_text)
    trace, stats = run(program, inputs, fuel, env=env)
    for value in trace.outputs:
        click.echo(value)
    evals = ', '.join(f'{print_expr(cond)}={count}' for cond, count in stats.cond_evals.items())
    outcome = trace.outcome.value if trace.outcome is not None else ''
    if trace.error is not None:
        outcome = f'{outcome}({trace.error.value})'
    click.echo(f'# {outcome} steps={stats.steps} evals=[{evals}]')
    if trace.outcome is Outcome.RUNTIME_ERROR:
        logger.error(f'执行出错：{trace.message}')
        ctx.exit(EXIT_RUNTIME)


@main.command('knapsack-demo')
@click.option('--items', 'items_text', required=True, help='物品列表 w:v,w:v,...')
@click.option('--budget', type=click.IntRange(min=0), required=True, help='背包容量 W')
@click.pass_context
def knapsack_demo_command(ctx: click.Context, items_text: str, budget: int):
    """构造背包归约图，比较剖析选择与穷举背包的最优值。"""
    try:
        inst = KnapsackInstance.parse(items_text, budget)
    except ValueError as e:
        _fail(ctx, f'invalid instance: {e}')
    limit = get_setting().brute_force_limit
    if len(inst.items) > limit:
        _fail(ctx, f'{len(inst.items)} items exceed the brute-force limit of {limit}')

    program, profile, cond = build_knapsack_cfg(inst)
    try:
        region, objective = best_region_by_profile(program, cond, profile, EvalParams(k=inst.budget))
        optimum, chosen = knapsack_brute_force(inst)
    except InstanceTooLargeError as e:
        _fail(ctx, str(e))

    members = ', '.join(region.ordered(program)) or '-'
    items = ', '.join(str(index) for index in sorted(chosen)) or '-'
    click.echo(f'region objective: {objective} (blocks: {members})')
    click.echo(f'knapsack optimum: {optimum} (items: {items})')
    if objective == optimum:
        click.echo('PASS')
    else:
        click.echo('FAIL')
        ctx.exit(EXIT_RUNTIME)


@main.command('dot')
@click.argument('source', type=click.File('r', encoding='utf-8'))
@click.option('--cond', 'cond_text', default=None, help='按该条件的分析结果标注 D')
@click.option('-o', '--output', type=click.File('w', encoding='utf-8'), default=None)
@click.pass_context
def dot_command(ctx: click.Context, source: TextIO, cond_text: Optional[str], output: Optional[TextIO]):
    """输出 Graphviz DOT。"""
    program = _load_program(ctx, source)
    annotations = None
    if cond_text is not None:
        annotations = compute_reachable_copies(program, _load_cond(ctx, cond_text))
    text = emit_dot(program, annotations)
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write(text)


if __name__ == '__main__':
    main()
