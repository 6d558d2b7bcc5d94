"""
Graphviz DOT 输出

每个基本块一个节点（标签为 id 与指令数），分支边标注条件及 e / ¬e；
副本按 CopyKind 分组到 cluster_t / cluster_f / cluster_u 子图中。
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Optional

import graphviz

from py_cecd.ir import BasicBlock, Branch, CopyKind, Goto, Program
from py_cecd.printer import print_expr

if TYPE_CHECKING:
    from py_cecd.analysis import AnalysisResult

logger = logging.getLogger(__name__)

_CLUSTER_LABELS = {
    CopyKind.TRUE: 'true copies',
    CopyKind.FALSE: 'false copies',
    CopyKind.UNKNOWN: 'unknown copies',
}


def dot_id(block_id: str) -> str:
    """DOT 节点 id：把 '.' 替换为 '_'。"""
    return block_id.replace('.', '_')


def _node_names(p: Program) -> dict[str, str]:
    names = {block.id: dot_id(block.id) for block in p.blocks}
    if len(set(names.values())) == len(names):
        return names
    # 替换后冲突，改用原始 id，由 graphviz 加引号
    logger.warning('块 id 把 . 替换为 _ 后发生冲突，DOT 中改用带引号的原始 id')
    return {block.id: block.id for block in p.blocks}


def _add_node(
    graph: graphviz.Digraph, name: str, block: BasicBlock, annotations: Optional[AnalysisResult], entry: bool
):
    label = f'{block.id}\\n{block.size} instrs'
    attrs = {'shape': 'diamond' if isinstance(block.term, Branch) else 'box'}
    if entry:
        attrs['peripheries'] = '2'
    if annotations is not None and annotations.d.get(block.id, False):
        attrs.update(style='filled,dashed', fillcolor='lightgrey')
    graph.node(name, label=label, **attrs)


def emit_dot(p: Program, annotations: Optional[AnalysisResult] = None) -> str:
    """
    生成程序的 DOT 有向图。

    Args:
        p: 程序
        annotations: 可选的分析结果，D 中的块使用填充虚线样式

    Returns:
        `digraph cecd { ... }` 文本
    """
    graph = graphviz.Digraph('cecd')
    graph.attr('node', fontname='Helvetica')
    names = _node_names(p)

    copies: dict[CopyKind, list[BasicBlock]] = {kind: [] for kind in CopyKind}
    for block in p.blocks:
        if block.origin is None:
            _add_node(graph, names[block.id], block, annotations, block.id == p.entry)
        else:
            copies[block.origin.kind].append(block)
    for kind, blocks in copies.items():
        if not blocks:
            continue
        with graph.subgraph(name=f'cluster_{kind.value}') as sub:
            sub.attr(label=_CLUSTER_LABELS[kind], style='rounded')
            for block in blocks:
                _add_node(sub, names[block.id], block, annotations, block.id == p.entry)

    for block in p.blocks:
        term = block.term
        if isinstance(term, Goto):
            graph.edge(names[block.id], names[term.target])
        elif isinstance(term, Branch):
            cond = print_expr(term.cond)
            graph.edge(names[block.id], names[term.on_true], label=cond)
            graph.edge(names[block.id], names[term.on_false], label=f'¬({cond})', style='dashed')
    return graph.source
