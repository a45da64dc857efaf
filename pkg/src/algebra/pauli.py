"""
Pauli 串代数
以 (x_mask, z_mask) 位掩码表示 N 个单元上的 Pauli 串，相位精确追踪

约定:
    - 掩码第 (i-1) 位对应第 i 个单元（单元从 1 开始编号）
    - 两个掩码在同一位同时置位表示该单元为 Y，按 Y = iXZ 把因子 i 吸收进系数，
      因此存储的串就是 {I, X, Y, Z} 的字面张量积
    - 标签字符串从左到右依次为单元 1..N
"""
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Tuple

import numpy as np

from config.settings import settings
from src.utils.exceptions import DimensionMismatchError, ValidationError

# i 的整数次幂，下标取模 4；用查表保持相位精确
_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)

_LABEL_BITS = {'I': (0, 0), 'X': (1, 0), 'Y': (1, 1), 'Z': (0, 1)}


def _popcount(value: int) -> int:
    return bin(value).count('1')


@dataclass(frozen=True)
class PauliTerm:
    """单个带权 Pauli 串"""
    coeff: complex
    x_mask: int
    z_mask: int
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValidationError("n_cells must be positive")
        limit = 1 << self.n_cells
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValidationError(
                f"Masks ({self.x_mask}, {self.z_mask}) do not fit in {self.n_cells} cells"
            )

    @property
    def key(self) -> Tuple[int, int]:
        return (self.x_mask, self.z_mask)

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def weight(self) -> int:
        """非平凡因子个数"""
        return _popcount(self.x_mask | self.z_mask)

    def factor(self, cell: int) -> str:
        """第 cell 个单元上的单比特因子（'I'/'X'/'Y'/'Z'）"""
        bit = 1 << (cell - 1)
        has_x = bool(self.x_mask & bit)
        has_z = bool(self.z_mask & bit)
        if has_x and has_z:
            return 'Y'
        if has_x:
            return 'X'
        if has_z:
            return 'Z'
        return 'I'

    def to_label(self) -> str:
        return ''.join(self.factor(cell) for cell in range(1, self.n_cells + 1))

    def scaled(self, factor: complex) -> 'PauliTerm':
        return PauliTerm(self.coeff * factor, self.x_mask, self.z_mask, self.n_cells)

    def anticommutes_with(self, other: 'PauliTerm') -> bool:
        """由辛内积判定两个串是否反对易"""
        overlap = _popcount(self.x_mask & other.z_mask) + _popcount(self.z_mask & other.x_mask)
        return overlap % 2 == 1

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> 'PauliTerm':
        """
        由标签构造，例如 'XIZ' 表示 σˣ₁ σᶻ₃

        Args:
            label: 由 I/X/Y/Z 组成的字符串，第一个字符为单元 1
            coeff: 系数

        Returns:
            PauliTerm
        """
        x_mask = 0
        z_mask = 0
        for offset, char in enumerate(label.upper()):
            if char not in _LABEL_BITS:
                raise ValidationError(f"Invalid Pauli label character: {char}")
            x_bit, z_bit = _LABEL_BITS[char]
            x_mask |= x_bit << offset
            z_mask |= z_bit << offset
        return cls(complex(coeff), x_mask, z_mask, len(label))

    def __repr__(self) -> str:
        return f"{self.coeff:+g}*{self.to_label()}"


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """
    两个 Pauli 串的算子乘积

    字面串 L(x, z) = i^{|x&z|} X^x Z^z，且 Z^{z1} X^{x2} = (-1)^{|z1&x2|} X^{x2} Z^{z1}，
    因此 L1·L2 = i^{|x1&z1| + |x2&z2| + 2|z1&x2| - |x3&z3|} L3。

    Args:
        a: 左因子
        b: 右因子

    Returns:
        乘积对应的单个 PauliTerm

    Raises:
        DimensionMismatchError: 单元数不一致
    """
    if a.n_cells != b.n_cells:
        raise DimensionMismatchError(
            f"Cannot multiply Pauli strings on {a.n_cells} and {b.n_cells} cells"
        )
    x3 = a.x_mask ^ b.x_mask
    z3 = a.z_mask ^ b.z_mask
    exponent = (
        _popcount(a.x_mask & a.z_mask)
        + _popcount(b.x_mask & b.z_mask)
        + 2 * _popcount(a.z_mask & b.x_mask)
        - _popcount(x3 & z3)
    ) % 4
    return PauliTerm(a.coeff * b.coeff * _I_POWERS[exponent], x3, z3, a.n_cells)


class OperatorSum:
    """
    PauliTerm 的规范线性组合

    构造后不可变；系数模长低于剪枝阈值的项不会被存储。
    """

    __slots__ = ('_terms', '_n_cells')

    def __init__(self, n_cells: int, terms: Dict[Tuple[int, int], complex] = None,
                 prune: float = None):
        if n_cells < 1:
            raise ValidationError("n_cells must be positive")
        threshold = settings.PRUNE_THRESHOLD if prune is None else prune
        self._n_cells = n_cells
        self._terms: Dict[Tuple[int, int], complex] = {
            key: complex(value)
            for key, value in sorted((terms or {}).items())
            if abs(value) >= threshold
        }

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------
    @classmethod
    def zero(cls, n_cells: int) -> 'OperatorSum':
        return cls(n_cells)

    @classmethod
    def identity(cls, n_cells: int, coeff: complex = 1.0) -> 'OperatorSum':
        return cls(n_cells, {(0, 0): coeff})

    @classmethod
    def from_term(cls, term: PauliTerm) -> 'OperatorSum':
        return cls(term.n_cells, {term.key: term.coeff})

    @classmethod
    def from_terms(cls, terms: Iterable[PauliTerm], n_cells: int) -> 'OperatorSum':
        merged: Dict[Tuple[int, int], complex] = {}
        for term in terms:
            if term.n_cells != n_cells:
                raise DimensionMismatchError(
                    f"Term on {term.n_cells} cells added to a {n_cells}-cell sum"
                )
            merged[term.key] = merged.get(term.key, 0j) + term.coeff
        return cls(n_cells, merged)

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> 'OperatorSum':
        return cls.from_term(PauliTerm.from_label(label, coeff))

    # ------------------------------------------------------------------
    # 访问
    # ------------------------------------------------------------------
    @property
    def n_cells(self) -> int:
        return self._n_cells

    @property
    def coefficients(self) -> Dict[Tuple[int, int], complex]:
        """(x_mask, z_mask) -> 系数 的副本"""
        return dict(self._terms)

    def terms(self) -> Iterator[PauliTerm]:
        for (x_mask, z_mask), coeff in self._terms.items():
            yield PauliTerm(coeff, x_mask, z_mask, self._n_cells)

    def coefficient(self, x_mask: int, z_mask: int) -> complex:
        return self._terms.get((x_mask, z_mask), 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return self.terms()

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self._n_cells == other._n_cells and self._terms == other._terms

    def __hash__(self):
        return hash((self._n_cells, tuple(self._terms.items())))

    def allclose(self, other: 'OperatorSum', atol: float = 1e-12) -> bool:
        difference = self - other
        return all(abs(term.coeff) <= atol for term in difference)

    # ------------------------------------------------------------------
    # 代数运算
    # ------------------------------------------------------------------
    def _check(self, other: 'OperatorSum'):
        if self._n_cells != other._n_cells:
            raise DimensionMismatchError(
                f"Operator sums on {self._n_cells} and {other._n_cells} cells are incompatible"
            )

    def __add__(self, other: 'OperatorSum') -> 'OperatorSum':
        return combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: 'OperatorSum') -> 'OperatorSum':
        return combine([(1.0, self), (-1.0, other)])

    def __neg__(self) -> 'OperatorSum':
        return self * -1.0

    def __mul__(self, scalar: complex) -> 'OperatorSum':
        if isinstance(scalar, OperatorSum):
            return NotImplemented
        return OperatorSum(self._n_cells, {k: v * scalar for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: 'OperatorSum') -> 'OperatorSum':
        """算子乘积（逐项精确相位乘法后合并）"""
        self._check(other)
        merged: Dict[Tuple[int, int], complex] = {}
        n = self._n_cells
        for (xa, za), ca in self._terms.items():
            left = PauliTerm(ca, xa, za, n)
            for (xb, zb), cb in other._terms.items():
                product = multiply(left, PauliTerm(cb, xb, zb, n))
                merged[product.key] = merged.get(product.key, 0j) + product.coeff
        return OperatorSum(n, merged)

    def power(self, k: int) -> 'OperatorSum':
        """非负整数次幂"""
        if k < 0:
            raise ValidationError("Operator power must be non-negative")
        result = OperatorSum.identity(self._n_cells)
        for _ in range(k):
            result = result @ self
        return result

    def dagger(self) -> 'OperatorSum':
        """字面 Pauli 串自伴，故共轭转置即系数取共轭"""
        return OperatorSum(self._n_cells, {k: v.conjugate() for k, v in self._terms.items()})

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(v.imag) <= tol for v in self._terms.values())

    def commutator(self, other: 'OperatorSum') -> 'OperatorSum':
        return (self @ other) - (other @ self)

    def split_by_anticommutation(self, pivot: PauliTerm) -> Tuple['OperatorSum', 'OperatorSum']:
        """
        按与 pivot 是否反对易拆分

        Returns:
            (反对易部分, 对易部分)
        """
        anti: Dict[Tuple[int, int], complex] = {}
        comm: Dict[Tuple[int, int], complex] = {}
        for term in self.terms():
            target = anti if term.anticommutes_with(pivot) else comm
            target[term.key] = term.coeff
        return OperatorSum(self._n_cells, anti), OperatorSum(self._n_cells, comm)

    # ------------------------------------------------------------------
    # 作用于态矢量（无需构造稠密矩阵）
    # ------------------------------------------------------------------
    def apply(self, psi: np.ndarray) -> np.ndarray:
        """
        计算 O|ψ⟩

        Args:
            psi: 长度 2^N 的复向量，单元 1 为最高位；也可以是 (..., 2^N) 的一批态

        Returns:
            新的态矢量（形状与输入相同）
        """
        dim = 1 << self._n_cells
        psi = np.asarray(psi, dtype=complex)
        if psi.ndim == 0 or psi.shape[-1] != dim:
            raise DimensionMismatchError(
                f"State of shape {psi.shape} does not match {self._n_cells} cells"
            )
        basis = np.arange(dim)
        parity = _parity_table(self._n_cells)
        out = np.zeros_like(psi)
        for (x_mask, z_mask), coeff in self._terms.items():
            flip, signs, phase = _term_action(x_mask, z_mask, self._n_cells, basis, parity)
            out[..., basis ^ flip] += (coeff * phase) * signs * psi
        return out

    def expectation(self, psi: np.ndarray) -> complex:
        """⟨ψ|O|ψ⟩"""
        return complex(np.vdot(psi, self.apply(psi)))

    def __repr__(self) -> str:
        if not self._terms:
            return f"OperatorSum(n_cells={self._n_cells}, 0)"
        shown = ' '.join(repr(term) for term in list(self.terms())[:6])
        more = '' if len(self._terms) <= 6 else f' ... ({len(self._terms)} terms)'
        return f"OperatorSum(n_cells={self._n_cells}, {shown}{more})"


def combine(ops: List[Tuple[complex, OperatorSum]]) -> OperatorSum:
    """
    线性组合 Σ cₖ Oₖ 并规范化

    Args:
        ops: (标量, OperatorSum) 列表

    Returns:
        合并并剪枝后的 OperatorSum

    Raises:
        DimensionMismatchError: 单元数不一致
    """
    if not ops:
        raise ValidationError("combine requires at least one operand")
    n_cells = ops[0][1].n_cells
    merged: Dict[Tuple[int, int], complex] = {}
    for scalar, op in ops:
        if op.n_cells != n_cells:
            raise DimensionMismatchError(
                f"Cannot combine operators on {n_cells} and {op.n_cells} cells"
            )
        for key, value in op.coefficients.items():
            merged[key] = merged.get(key, 0j) + scalar * value
    return OperatorSum(n_cells, merged)


def _single_site(cell: int, n_cells: int, x_bit: int, z_bit: int, coeff: complex) -> OperatorSum:
    if not 1 <= cell <= n_cells:
        raise ValidationError(f"Cell {cell} outside 1..{n_cells}")
    bit = 1 << (cell - 1)
    return OperatorSum(n_cells, {(bit * x_bit, bit * z_bit): coeff})


def pauli_x(cell: int, n_cells: int, coeff: complex = 1.0) -> OperatorSum:
    return _single_site(cell, n_cells, 1, 0, coeff)


def pauli_y(cell: int, n_cells: int, coeff: complex = 1.0) -> OperatorSum:
    return _single_site(cell, n_cells, 1, 1, coeff)


def pauli_z(cell: int, n_cells: int, coeff: complex = 1.0) -> OperatorSum:
    return _single_site(cell, n_cells, 0, 1, coeff)


def parity_operator(n_cells: int) -> OperatorSum:
    """全局宇称 ∏ᵢ σᶻᵢ"""
    return OperatorSum(n_cells, {(0, (1 << n_cells) - 1): 1.0})


# ----------------------------------------------------------------------
# 稠密基底辅助函数（单元 1 为最高有效位）
# ----------------------------------------------------------------------
def _to_basis_bits(mask: int, n_cells: int) -> int:
    """掩码第 (i-1) 位 -> 计算基下标第 (N-i) 位"""
    out = 0
    for cell in range(n_cells):
        if mask >> cell & 1:
            out |= 1 << (n_cells - 1 - cell)
    return out


_PARITY_CACHE: Dict[int, np.ndarray] = {}


def _parity_table(n_cells: int) -> np.ndarray:
    """长度 2^N 的 popcount 奇偶表"""
    table = _PARITY_CACHE.get(n_cells)
    if table is None:
        table = np.zeros(1, dtype=np.int64)
        for _ in range(n_cells):
            table = np.concatenate([table, table ^ 1])
        _PARITY_CACHE[n_cells] = table
    return table


def _term_action(x_mask: int, z_mask: int, n_cells: int, basis: np.ndarray,
                 parity: np.ndarray):
    """
    L(x, z)|b⟩ = i^{|x&z|} (-1)^{|z&b|} |b ⊕ x⟩

    Returns:
        (翻转位, 各基矢的符号数组, 全局相位)
    """
    flip = _to_basis_bits(x_mask, n_cells)
    z_bits = _to_basis_bits(z_mask, n_cells)
    signs = 1 - 2 * parity[basis & z_bits]
    phase = _I_POWERS[_popcount(x_mask & z_mask) % 4]
    return flip, signs, phase


__all__ = [
    'PauliTerm',
    'OperatorSum',
    'multiply',
    'combine',
    'pauli_x',
    'pauli_y',
    'pauli_z',
    'parity_operator'
]
