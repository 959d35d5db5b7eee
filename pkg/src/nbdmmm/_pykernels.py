"""Pure-Python selection kernel, used when the compiled extension is unavailable."""


def pick_sequence(keys, ref_cols):
    """Repeatedly take the remaining row with the smallest key in the step's column.

    Args:
        keys: ``n x m`` array of selection keys (row = task, column = resource).
        ref_cols: column to consult at each step.

    Returns:
        Row indices in pick order, ``min(n, len(ref_cols))`` long. Equal keys
        resolve to the lowest row index, so callers pre-sort rows by id.
    """
    rows = keys.tolist() if hasattr(keys, "tolist") else [list(r) for r in keys]
    remaining = list(range(len(rows)))
    picked = []
    for col in list(ref_cols)[: len(rows)]:
        col = int(col)
        best_pos = 0
        best_key = rows[remaining[0]][col]
        for pos in range(1, len(remaining)):
            k = rows[remaining[pos]][col]
            if k < best_key:
                best_pos, best_key = pos, k
        picked.append(remaining.pop(best_pos))
    return picked
