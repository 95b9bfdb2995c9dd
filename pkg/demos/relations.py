# %% [markdown]
# # Interval relations
#
# Two event instances, presented earliest-start first, are related by at most
# one of Follows, Contains or Overlaps. `epsilon` is a tolerance buffer and
# `d_overlap` the shortest overlap that still counts as one.

# %%
from rare_temporal import EventInstance, RelationConfig, classify_relation

a = EventInstance("A", 0, 10)
for b in [EventInstance("B", 10, 20), EventInstance("B", 2, 8), EventInstance("B", 5, 20), EventInstance("B", 9, 20)]:
    rel = classify_relation(a, b, RelationConfig(epsilon=0, d_overlap=2))
    print(f"A[0,10] vs B[{b.start},{b.end}]:", rel.name if rel else "no relation")

# %% [markdown]
# A one-tick tolerance turns the near miss into Follows and lets a
# slightly longer B still sit inside A.

# %%
tol = RelationConfig(epsilon=1, d_overlap=3)
print(classify_relation(a, EventInstance("B", 9, 20), tol).name)
print(classify_relation(a, EventInstance("B", 2, 11), tol).name)

# %% [markdown]
# The tolerance must stay below half the overlap length, otherwise two
# relations could hold at once.

# %%
try:
    RelationConfig(epsilon=2, d_overlap=4)
except ValueError as exc:
    print("rejected:", exc)
