# %% [markdown]
# # A desk-scale tour of the switch-count taxonomy
#
# How does the law of the switch count `C_n` behave as the function
# sequence grows?  Four regimes show up:
#
# - **volatile** — `C_n` escapes every finite window: `P(C_n <= M) -> 0`
#   for every `M`;
# - **lame** — the output freezes: `P(C_n = 0) -> 1`;
# - **tame** — the family stays tight: tails `P(C_n > M)` uniformly small;
# - **semi-volatile** — mass at zero *and* mass escaping to infinity at
#   the same time.  Type 1 additionally loses all middle mass
#   `P(1 <= C_n <= k)`; Type 2 keeps some.
#
# `classify` runs a sequence plan, extracts those trend statistics, and
# applies documented finite-`n` threshold rules.  Verdicts are labelled
# `*-consistent`: desk-scale evidence, not proofs.

# %% Setup
from boolvol.experiments import SequencePlan, classify

def show(title, plan):
    report = classify(plan)
    print("=" * 72)
    print("%s  ->  %s" % (title, report.verdict))
    for stat in ("p_zero", "middle_le_2", "tail_gt_5", "mean_C"):
        ts = report.trends[stat]
        vals = "  ".join("%.4f" % v for v in ts.values)
        print("  %-14s %s" % (stat, vals))
    for note in report.notes:
        print("  note: %s" % note)
    return report

# %% [markdown]
# ## Parity: volatile
#
# Every bit update flips the output, so the switch count is the total
# update count — Poisson with mean `n` — and all mass escapes upward.

# %%
show("parity, n = 4..32",
     SequencePlan.from_pairs([("parity:%d" % n, 0.5) for n in (4, 8, 16, 32)]))

# %% [markdown]
# ## Dictator: tame
#
# Only the first bit matters, so no matter the arity the switch count
# stays Poisson-thin: the distribution is the same for every `n`.

# %%
show("dictator, n = 4..16",
     SequencePlan.from_pairs([("dictator:%d" % n, 0.5) for n in (4, 8, 16)]))

# %% [markdown]
# ## Dictator-gated parity: semi-volatile, Type 1
#
# Output is `bit_1 AND parity(rest)`.  When bit 1 spends the horizon at
# zero the output never moves (mass at zero persists); when it is one,
# the parity factor drives the count to infinity.  The middle bands
# drain: each `P(1 <= C <= k)` heads to zero with `n`.

# %%
show("dictator-gated parity, n = 8..32",
     SequencePlan.from_pairs([("dap:%d" % n, 0.5) for n in (8, 16, 32)]))

# %% [markdown]
# ## Selector between a dictator and a parity: semi-volatile, Type 2
#
# Bit 2 selects between passing bit 1 through (a dictator, finitely many
# switches) and a parity over the rest (infinitely many).  Both branches
# keep constant probability, so mass sticks at zero, escapes to
# infinity, *and* stays in the middle bands: Type 2.

# %%
show("selector dictator/parity, n = 16..64",
     SequencePlan.from_pairs([("type2:%d" % n, 0.5) for n in (16, 32, 64)]))

# %% [markdown]
# ## Random AND/OR trees
#
# Gates on a binary tree, each AND or OR with probability 1/2, leaves
# fed the fixed in-signals.  The mean switch count grows like `n/8` yet
# `P(C = 0)` stays bounded away from zero — another Type 2 signature at
# this scale.

# %%
show("and/or tree, depth 3..7",
     SequencePlan.from_pairs([("andor:%d" % d, 0.5) for d in (3, 4, 5, 6, 7)],
                             replicas=2000))
