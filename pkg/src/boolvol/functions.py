"""Boolean function families with full and O(depth) incremental evaluation.

Families
--------
dictator:m   output of the first bit, m bits total
parity:m     mod-2 sum of all bits
dap:m        1 iff bit 1 is 1 and the mod-2 sum of bits 2..m is 0
type2:m      bit 1 if bit 2 is 1, else the mod-2 sum of bits 3..m
maj:n        1 iff at least (n+1)/2 of the n bits are 1 (n odd)
itermaj3:d   majority-of-three iterated on a ternary tree of depth d;
             the 3^d leaves are the input bits
andor:d      perfect binary tree of depth d whose 2^(d+1)-1 vertices each
             carry a gate bit (1 = OR, 0 = AND); every leaf receives one
             0 in-signal and one 1 in-signal, so a leaf outputs its own
             gate bit; internal gates combine their children
bigtame:n    1+n+3^n bits; outputs bit 1 unless bits 2..n+1 are all 1,
             in which case it outputs the mod-2 sum of the last 3^n bits
perc:...:n   spherically symmetric tree with a fixed child count per
             level; each bit is an edge (open/closed) and the output is 1
             iff an open path joins the root to level n

Bit-to-vertex conventions (fixed so results are reproducible):
itermaj3 leaves are numbered left to right; andor gate bits map to
vertices in depth-first preorder (bit 0 is the root, then the whole left
subtree, then the right); perc edges are numbered breadth-first, level by
level, left to right, so the bit of the edge ending at vertex j of level
k is (number of edges above level k) + j.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch, IndexOutOfRange, InvalidSpec

MAX_ARITY = 2**31 - 1

_INLINE_PROFILE = re.compile(r"^\d+(,\d+)*$")


@dataclass(frozen=True)
class FunctionSpec:
    """Declarative description of one function-family instance.

    `param` is the family's integer parameter (bit count, majority size,
    tree depth, or selector width); `profile`/`level` apply to perc only;
    `table` holds the output bits of an imported truth table.
    """

    family: str
    param: int = 0
    profile: tuple = ()
    level: int = 0
    table: tuple = ()

    # -- constructors -------------------------------------------------
    @classmethod
    def dictator(cls, m):
        return cls("dictator", int(m))

    @classmethod
    def parity(cls, m):
        return cls("parity", int(m))

    @classmethod
    def dap(cls, m):
        return cls("dap", int(m))

    @classmethod
    def type2(cls, m):
        return cls("type2", int(m))

    @classmethod
    def majority(cls, n):
        return cls("maj", int(n))

    @classmethod
    def itermaj3(cls, depth):
        return cls("itermaj3", int(depth))

    @classmethod
    def andor(cls, depth):
        return cls("andor", int(depth))

    @classmethod
    def bigtame(cls, n):
        return cls("bigtame", int(n))

    @classmethod
    def perc(cls, profile, level):
        return cls("perc", 0, tuple(int(c) for c in profile), int(level))

    @classmethod
    def truth_table(cls, bits):
        return cls("table", 0, (), 0, tuple(int(b) for b in bits))

    def spec_string(self):
        """Canonical textual form, e.g. 'maj:9' or 'perc:2,16,7:3'."""
        if self.family == "perc":
            return "perc:%s:%d" % (",".join(str(c) for c in self.profile), self.level)
        if self.family == "table":
            return "table:<%d bits>" % len(self.table)
        return "%s:%d" % (self.family, self.param)


def parse_spec(text):
    """Parses the canonical textual form of a FunctionSpec.

    `perc:<profile>:<level>` accepts either an inline comma-separated
    child-count list or a path to a file with one integer per line.
    `table:<path>` reads a file of '0'/'1' characters (most significant
    bit first: the output for bits (b_0..b_{m-1}) sits at index
    sum b_i 2^(m-1-i)).
    """
    parts = text.strip().split(":")
    family = parts[0]
    if family == "perc":
        if len(parts) != 3:
            raise InvalidSpec("perc spec must be perc:<profile>:<level>: %r" % text)
        raw, level = parts[1], parts[2]
        if _INLINE_PROFILE.match(raw):
            profile = tuple(int(c) for c in raw.split(","))
        elif os.path.isfile(raw):
            profile = read_profile_file(raw)
        else:
            raise InvalidSpec("profile is neither an inline list nor a file: %r" % raw)
        try:
            return FunctionSpec.perc(profile, int(level))
        except ValueError:
            raise InvalidSpec("bad perc level: %r" % level) from None
    if family == "table":
        if len(parts) != 2 or not os.path.isfile(parts[1]):
            raise InvalidSpec("table spec must be table:<file>: %r" % text)
        with open(parts[1]) as fh:
            chars = "".join(fh.read().split())
        if not chars or set(chars) - {"0", "1"}:
            raise InvalidSpec("truth-table file must contain only 0/1 characters")
        return FunctionSpec.truth_table([int(c) for c in chars])
    if len(parts) != 2:
        raise InvalidSpec("spec must be <family>:<param>: %r" % text)
    ctors = {
        "dictator": FunctionSpec.dictator,
        "parity": FunctionSpec.parity,
        "dap": FunctionSpec.dap,
        "type2": FunctionSpec.type2,
        "maj": FunctionSpec.majority,
        "itermaj3": FunctionSpec.itermaj3,
        "andor": FunctionSpec.andor,
        "bigtame": FunctionSpec.bigtame,
    }
    if family not in ctors:
        raise InvalidSpec("unknown family: %r" % family)
    try:
        param = int(parts[1])
    except ValueError:
        raise InvalidSpec("bad parameter in spec: %r" % text) from None
    return ctors[family](param)


def read_profile_file(path):
    """Reads a level profile: one child count per line."""
    profile = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                try:
                    profile.append(int(line))
                except ValueError:
                    raise InvalidSpec("bad child count in %s: %r" % (path, line)) from None
    return tuple(profile)


# ---------------------------------------------------------------------------
# evaluation states
# ---------------------------------------------------------------------------

class EvaluationState:
    """Mutable per-instance cache for single-bit updates.

    `config` always mirrors the current bits, `output` the cached output,
    and `recompute_count` the cumulative number of vertex recomputations
    (at most depth+1 per update on tree families).
    """

    __slots__ = ("instance", "config", "output", "recompute_count")

    def apply_update(self, bit_index, new_value):
        """Sets one bit and incrementally refreshes the cached output.

        Returns (output_after, output_changed).
        """
        if not 0 <= bit_index < self.instance.arity:
            raise IndexOutOfRange("bit index %d outside [0, %d)" % (bit_index, self.instance.arity))
        if new_value not in (0, 1):
            raise ValueError("bit value must be 0 or 1, got %r" % (new_value,))
        return self._update(int(bit_index), int(new_value))

    def _update(self, i, v):
        old = self.config[i]
        if v == old:
            return self.output, False
        self.config[i] = v
        return self._propagate(i, v, old)


class _DictatorState(EvaluationState):
    __slots__ = ()

    def _propagate(self, i, v, old):
        self.recompute_count += 1
        if i != 0:
            return self.output, False
        self.output = v
        return v, True


class _ParityState(EvaluationState):
    __slots__ = ()

    def _propagate(self, i, v, old):
        self.recompute_count += 1
        self.output ^= 1
        return self.output, True


class _DapState(EvaluationState):
    __slots__ = ("rest_parity",)

    def _propagate(self, i, v, old):
        self.recompute_count += 1
        if i != 0:
            self.rest_parity ^= 1
        out = 1 if (self.config[0] == 1 and self.rest_parity == 0) else 0
        changed = out != self.output
        self.output = out
        return out, changed


class _Type2State(EvaluationState):
    __slots__ = ("tail_parity",)

    def _propagate(self, i, v, old):
        self.recompute_count += 1
        if i >= 2:
            self.tail_parity ^= 1
        out = self.config[0] if self.config[1] == 1 else self.tail_parity
        changed = out != self.output
        self.output = out
        return out, changed


class _MajorityState(EvaluationState):
    __slots__ = ("ones",)

    def _propagate(self, i, v, old):
        self.recompute_count += 1
        self.ones += v - old
        out = 1 if self.ones >= self.instance.threshold else 0
        changed = out != self.output
        self.output = out
        return out, changed


class _BigTameState(EvaluationState):
    __slots__ = ("sel_ones", "tail_parity")

    def _propagate(self, i, v, old):
        self.recompute_count += 1
        n = self.instance.spec.param
        if 1 <= i <= n:
            self.sel_ones += v - old
        elif i > n:
            self.tail_parity ^= 1
        out = self.tail_parity if self.sel_ones == n else self.config[0]
        changed = out != self.output
        self.output = out
        return out, changed


class _IterMaj3State(EvaluationState):
    __slots__ = ("vals",)

    def _propagate(self, i, v, old):
        vals = self.vals
        h = self.instance.leaf_base + i
        nv = v
        self.recompute_count += 1
        while vals[h] != nv:
            vals[h] = nv
            if h == 0:
                break
            h = (h - 1) // 3
            c = 3 * h
            nv = 1 if vals[c + 1] + vals[c + 2] + vals[c + 3] >= 2 else 0
            self.recompute_count += 1
        out = vals[0]
        changed = out != self.output
        self.output = out
        return out, changed


class _AndOrState(EvaluationState):
    __slots__ = ("vals", "gates")

    def _propagate(self, i, v, old):
        inst = self.instance
        vals, gates = self.vals, self.gates
        h = inst.node_of_bit[i]
        gates[h] = v
        if h >= inst.leaf_base:
            nv = v
        else:
            l, r = vals[2 * h + 1], vals[2 * h + 2]
            nv = (l | r) if v else (l & r)
        self.recompute_count += 1
        while vals[h] != nv:
            vals[h] = nv
            if h == 0:
                break
            h = (h - 1) >> 1
            l, r = vals[2 * h + 1], vals[2 * h + 2]
            nv = (l | r) if gates[h] else (l & r)
            self.recompute_count += 1
        out = vals[0]
        changed = out != self.output
        self.output = out
        return out, changed


class _PercState(EvaluationState):
    # live[k][j] = number of children of vertex j (level k) whose edge is
    # open and whose subtree reaches the bottom level; a vertex at level
    # k < n is connected iff live[k][j] > 0, bottom vertices by definition.
    __slots__ = ("live",)

    def _propagate(self, i, v, old):
        inst = self.instance
        live = self.live
        n = inst.level
        k, j = inst.edge_level_index(i)
        conn_child = 1 if k == n else (1 if live[k][j] > 0 else 0)
        self.recompute_count += 1
        delta = (v - old) * conn_child
        if delta == 0:
            return self.output, False
        lvl = k - 1
        vtx = j // inst.children[k - 1]
        while True:
            cnt = live[lvl][vtx]
            new = cnt + delta
            live[lvl][vtx] = new
            if (cnt > 0) == (new > 0) or lvl == 0:
                break
            # vertex connectivity flipped; matters above only through an
            # open parent edge
            if self.config[inst.offsets[lvl] + vtx] == 0:
                break
            delta = 1 if new > 0 else -1
            vtx //= inst.children[lvl - 1]
            lvl -= 1
            self.recompute_count += 1
        out = 1 if live[0][0] > 0 else 0
        changed = out != self.output
        self.output = out
        return out, changed


class _TableState(EvaluationState):
    __slots__ = ("index",)

    def _propagate(self, i, v, old):
        self.recompute_count += 1
        self.index += (v - old) * self.instance.bit_weight[i]
        out = self.instance.table_int[self.index]
        changed = out != self.output
        self.output = out
        return out, changed


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------

class FunctionInstance:
    """Immutable structural index for one family instance.

    Instances are safely shareable across threads/processes; all mutable
    evaluation state lives in EvaluationState objects.
    """

    def __init__(self, spec, arity, depth=0):
        if arity > MAX_ARITY:
            raise InvalidSpec("arity %d exceeds the 2^31-1 cap" % arity)
        self.spec = spec
        self.arity = arity
        self.depth = depth

    def _new_state(self, cls, config):
        st = cls.__new__(cls)
        st.instance = self
        st.config = config
        st.recompute_count = 0
        return st


class DictatorInstance(FunctionInstance):
    def evaluate_rows(self, bits):
        return bits[:, 0].copy()

    def build_state(self, config):
        st = self._new_state(_DictatorState, config)
        st.output = config[0]
        return st


class ParityInstance(FunctionInstance):
    def evaluate_rows(self, bits):
        return (bits.sum(axis=1) & 1).astype(np.uint8)

    def build_state(self, config):
        st = self._new_state(_ParityState, config)
        st.output = sum(config) & 1
        return st


class DapInstance(FunctionInstance):
    def evaluate_rows(self, bits):
        rest_even = (bits[:, 1:].sum(axis=1) & 1) == 0
        return ((bits[:, 0] == 1) & rest_even).astype(np.uint8)

    def build_state(self, config):
        st = self._new_state(_DapState, config)
        st.rest_parity = sum(config[1:]) & 1
        st.output = 1 if (config[0] == 1 and st.rest_parity == 0) else 0
        return st


class Type2Instance(FunctionInstance):
    def evaluate_rows(self, bits):
        tail = (bits[:, 2:].sum(axis=1) & 1).astype(np.uint8)
        return np.where(bits[:, 1] == 1, bits[:, 0], tail).astype(np.uint8)

    def build_state(self, config):
        st = self._new_state(_Type2State, config)
        st.tail_parity = sum(config[2:]) & 1
        st.output = config[0] if config[1] == 1 else st.tail_parity
        return st


class MajorityInstance(FunctionInstance):
    def __init__(self, spec):
        n = spec.param
        super().__init__(spec, n)
        self.threshold = (n + 1) // 2

    def evaluate_rows(self, bits):
        return (bits.sum(axis=1) >= self.threshold).astype(np.uint8)

    def build_state(self, config):
        st = self._new_state(_MajorityState, config)
        st.ones = sum(config)
        st.output = 1 if st.ones >= self.threshold else 0
        return st


class BigTameInstance(FunctionInstance):
    def __init__(self, spec):
        n = spec.param
        super().__init__(spec, 1 + n + 3**n)

    def evaluate_rows(self, bits):
        n = self.spec.param
        all_sel = bits[:, 1:n + 1].sum(axis=1) == n
        tail = (bits[:, n + 1:].sum(axis=1) & 1).astype(np.uint8)
        return np.where(all_sel, tail, bits[:, 0]).astype(np.uint8)

    def build_state(self, config):
        n = self.spec.param
        st = self._new_state(_BigTameState, config)
        st.sel_ones = sum(config[1:n + 1])
        st.tail_parity = sum(config[n + 1:]) & 1
        st.output = st.tail_parity if st.sel_ones == n else config[0]
        return st


class IterMaj3Instance(FunctionInstance):
    def __init__(self, spec):
        d = spec.param
        super().__init__(spec, 3**d, depth=d)
        self.n_nodes = (3 ** (d + 1) - 1) // 2
        self.leaf_base = (3**d - 1) // 2

    def evaluate_rows(self, bits):
        vals = bits
        for _ in range(self.depth):
            vals = (vals.reshape(vals.shape[0], -1, 3).sum(axis=2) >= 2).astype(np.uint8)
        return vals[:, 0].copy()

    def build_state(self, config):
        vals = [0] * self.leaf_base + list(config)
        for h in range(self.leaf_base - 1, -1, -1):
            c = 3 * h
            vals[h] = 1 if vals[c + 1] + vals[c + 2] + vals[c + 3] >= 2 else 0
        st = self._new_state(_IterMaj3State, config)
        st.vals = vals
        st.output = vals[0]
        return st


def _preorder_maps(n_nodes):
    node_of_bit = []
    stack = [0]
    while stack:
        h = stack.pop()
        node_of_bit.append(h)
        c = 2 * h + 1
        if c < n_nodes:
            stack.append(c + 1)
            stack.append(c)
    bit_of_node = [0] * n_nodes
    for b, h in enumerate(node_of_bit):
        bit_of_node[h] = b
    return node_of_bit, bit_of_node


class AndOrInstance(FunctionInstance):
    def __init__(self, spec):
        d = spec.param
        n_nodes = 2 ** (d + 1) - 1
        super().__init__(spec, n_nodes, depth=d)
        self.leaf_base = 2**d - 1
        self.node_of_bit, self.bit_of_node = _preorder_maps(n_nodes)
        self._heap_perm = np.array(self.bit_of_node, dtype=np.int64)

    def evaluate_rows(self, bits):
        gates = bits[:, self._heap_perm]
        vals = gates[:, self.leaf_base:].copy()
        for k in range(self.depth - 1, -1, -1):
            lo, hi = 2**k - 1, 2 ** (k + 1) - 1
            g = gates[:, lo:hi]
            pairs = vals.reshape(vals.shape[0], -1, 2)
            l, r = pairs[:, :, 0], pairs[:, :, 1]
            vals = np.where(g == 1, l | r, l & r).astype(np.uint8)
        return vals[:, 0].copy()

    def build_state(self, config):
        gates = [0] * self.arity
        for b, v in enumerate(config):
            gates[self.node_of_bit[b]] = v
        vals = gates[:]
        for h in range(self.leaf_base - 1, -1, -1):
            l, r = vals[2 * h + 1], vals[2 * h + 2]
            vals[h] = (l | r) if gates[h] else (l & r)
        st = self._new_state(_AndOrState, config)
        st.gates = gates
        st.vals = vals
        st.output = vals[0]
        return st


class TreePercInstance(FunctionInstance):
    def __init__(self, spec):
        children = spec.profile[:spec.level]
        n = spec.level
        v = [1]
        for c in children:
            v.append(v[-1] * c)
        offsets = [0, 0]  # offsets[k] = first bit of level-k edges, k >= 1
        for k in range(1, n):
            offsets.append(offsets[k] + v[k])
        arity = sum(v[1:])
        super().__init__(spec, arity, depth=n)
        self.children = children
        self.level = n
        self.vcounts = v
        self.offsets = offsets
        self._cum = np.cumsum([v[k] for k in range(1, n + 1)])

    def edge_level_index(self, i):
        k = int(np.searchsorted(self._cum, i, side="right")) + 1
        return k, i - self.offsets[k]

    def evaluate_rows(self, bits):
        n = self.level
        B = bits.shape[0]
        conn = np.ones((B, self.vcounts[n]), dtype=bool)
        for k in range(n, 0, -1):
            e = bits[:, self.offsets[k]:self.offsets[k] + self.vcounts[k]] == 1
            alive = (e & conn).reshape(B, self.vcounts[k - 1], self.children[k - 1])
            conn = alive.any(axis=2)
        return conn[:, 0].astype(np.uint8)

    def build_state(self, config):
        n = self.level
        arr = np.asarray(config, dtype=np.uint8)
        conn = np.ones(self.vcounts[n], dtype=np.uint8)
        live = [None] * n
        for k in range(n, 0, -1):
            e = arr[self.offsets[k]:self.offsets[k] + self.vcounts[k]]
            counts = (e & conn).reshape(self.vcounts[k - 1], self.children[k - 1]).sum(axis=1)
            live[k - 1] = counts.tolist()
            conn = (counts > 0).astype(np.uint8)
        st = self._new_state(_PercState, config)
        st.live = live
        st.output = 1 if live[0][0] > 0 else 0
        return st


class TableInstance(FunctionInstance):
    def __init__(self, spec):
        size = len(spec.table)
        m = size.bit_length() - 1
        super().__init__(spec, m)
        self.table_int = list(spec.table)
        self._table_arr = np.array(spec.table, dtype=np.uint8)
        self.bit_weight = [1 << (m - 1 - i) for i in range(m)]
        self._weight_arr = np.array(self.bit_weight, dtype=np.int64)

    def evaluate_rows(self, bits):
        idx = bits.astype(np.int64) @ self._weight_arr
        return self._table_arr[idx]

    def build_state(self, config):
        st = self._new_state(_TableState, config)
        st.index = sum(w for w, b in zip(self.bit_weight, config) if b)
        st.output = self.table_int[st.index]
        return st


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def _validate(spec):
    f, p = spec.family, spec.param
    if f == "maj":
        if p < 1 or p % 2 == 0:
            raise InvalidSpec("majority size must be odd and >= 1, got %d" % p)
    elif f in ("itermaj3", "andor"):
        if p < 0:
            raise InvalidSpec("depth must be >= 0, got %d" % p)
    elif f in ("dictator", "parity"):
        if p < 1:
            raise InvalidSpec("%s needs at least 1 bit" % f)
    elif f == "dap":
        if p < 2:
            raise InvalidSpec("dap needs at least 2 bits")
    elif f == "type2":
        if p < 3:
            raise InvalidSpec("type2 needs at least 3 bits")
    elif f == "bigtame":
        if p < 1:
            raise InvalidSpec("bigtame selector width must be >= 1")
        if 1 + p + 3**p > MAX_ARITY:
            raise InvalidSpec("bigtame:%d arity exceeds the 2^31-1 cap" % p)
    elif f == "perc":
        if not spec.profile:
            raise InvalidSpec("perc profile must be nonempty")
        if any(c < 1 for c in spec.profile):
            raise InvalidSpec("perc child counts must be >= 1")
        if not 1 <= spec.level <= len(spec.profile):
            raise InvalidSpec("perc level %d outside 1..%d" % (spec.level, len(spec.profile)))
    elif f == "table":
        size = len(spec.table)
        if size < 2 or size & (size - 1):
            raise InvalidSpec("truth table length must be a power of two >= 2")
    else:
        raise InvalidSpec("unknown family: %r" % f)


_CLASSES = {
    "dictator": DictatorInstance,
    "parity": ParityInstance,
    "dap": DapInstance,
    "type2": Type2Instance,
    "maj": MajorityInstance,
    "itermaj3": IterMaj3Instance,
    "andor": AndOrInstance,
    "bigtame": BigTameInstance,
    "perc": TreePercInstance,
    "table": TableInstance,
}


def make_instance(spec):
    """Builds the structural index for `spec`.

    Raises InvalidSpec for out-of-range parameters (even majority size,
    negative depth, empty profile, arity above 2^31-1).
    """
    _validate(spec)
    cls = _CLASSES[spec.family]
    if cls in (DictatorInstance, ParityInstance, DapInstance, Type2Instance):
        return cls(spec, spec.param)
    return cls(spec)


def _check_rows(instance, bits):
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 2 or bits.shape[1] != instance.arity:
        raise ArityMismatch("config rows must have length %d" % instance.arity)
    if bits.size and bits.max() > 1:
        raise ValueError("bits must be 0 or 1")
    return bits


def evaluate_batch(instance, bits):
    """Evaluates many configurations at once; bits is a (rows, arity) array."""
    return instance.evaluate_rows(_check_rows(instance, bits))


def evaluate(instance, config):
    """Full from-scratch evaluation of one configuration."""
    row = np.asarray(config, dtype=np.uint8)
    if row.ndim != 1 or row.shape[0] != instance.arity:
        raise ArityMismatch("config must have length %d" % instance.arity)
    return int(instance.evaluate_rows(_check_rows(instance, row[None, :]))[0])


def build_state(instance, config):
    """Creates an EvaluationState whose cached output equals evaluate()."""
    arr = np.asarray(config)
    if arr.ndim != 1 or arr.shape[0] != instance.arity:
        raise ArityMismatch("config must have length %d" % instance.arity)
    lst = [int(b) for b in arr]
    if any(b not in (0, 1) for b in lst):
        raise ValueError("bits must be 0 or 1")
    return instance.build_state(lst)


def apply_update(state, bit_index, new_value):
    """Single-bit update with incremental recomputation; see EvaluationState."""
    return state.apply_update(bit_index, new_value)
