# %% [markdown]
# # Smart-home running example
#
# Four appliances (S, T, W, I) sampled every five minutes, 0 = off and
# 1 = on. We turn the series into interval events, cut them into 35 minute
# sequences and look for rare temporal patterns.

# %%
from pathlib import Path

from rare_temporal import MiningConfig, SymbolizationRule, mine, oracle_mine, sequence_db_from_symbolic, symbolize
from rare_temporal.io import format_ticks, read_csv_series, summary_lines

csv = Path(__file__).resolve().parent.parent / "tests" / "data" / "running_example.csv"
series = read_csv_series(csv)  # ticks are minutes
symbolic = [symbolize(s, SymbolizationRule.threshold(s.name, 0.5)) for s in series]
print(symbolic[1].symbols[:10])

# %% [markdown]
# ## Sequence database

# %%
db = sequence_db_from_symbolic(symbolic, window=35)
for seq in db:
    print(seq.id, ", ".join(f"{i.symbol}[{format_ticks(i.start)[11:]},{format_ticks(i.end)[11:]}]" for i in seq))

# %% [markdown]
# ## Mining
#
# Support between 20% and 100% of the sequences, all-confidence at least 0.3.

# %%
cfg = MiningConfig(sigma_min=0.2, sigma_max=1.0, delta=0.3)
result = mine(db, cfg)
print(len(result.hlh1), "single events,", len(result.patterns), "patterns")
print("\n".join(summary_lines(result.patterns, limit=12)))

# %%
for s in result.stats:
    print(f"level {s.level}: {s.groups_evaluated} groups evaluated, {s.patterns_stored} stored, "
          f"{s.patterns_emitted} emitted")

# %% [markdown]
# The brute-force miner agrees.

# %%
print({p.key for p in oracle_mine(db, cfg)} == result.keys())

# %% [markdown]
# One witness for "S on contains T on":

# %%
son = next(p for p in result.patterns if p.key == "SOn C TOn")
for sid, bindings in son.witness.items():
    print(sid, [(i.symbol, format_ticks(i.start)[11:], format_ticks(i.end)[11:]) for i in bindings[0]])
