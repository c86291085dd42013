"""A small differential campaign: rewriting-based answers against the
unraveling oracle on random KBs and queries.

    python3 demos/fuzz_campaign.py [seed] [cases]
"""

import sys
import time
from collections import Counter

from roughel.fuzz import campaign, case
from roughel.textio import serialize_kb, serialize_query

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
n = int(sys.argv[2]) if len(sys.argv) > 2 else 200

t0 = time.perf_counter()
out = campaign(seed, n)
print(Counter(o.status for o in out), f"{time.perf_counter() - t0:.1f}s")

nonempty = [o for o in out if o.status == "ok" and o.answer and o.answer != [()]]
print(f"{len(nonempty)} cases with non-empty answer tuples; the first one:")
if nonempty:
    kb, q = case(seed, nonempty[0].index)
    print(serialize_kb(kb) + serialize_query(q), end="")
    print("answers:", nonempty[0].answer)
