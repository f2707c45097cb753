/**
 * What a tag click means. Hyperlinked tags drive the exploration: a
 * plain click on a base-level coordinate slices it away; a click on a
 * rolled-up coordinate drills back down to the child level, keeping the
 * clicked value as a filter through the hierarchy. The server does the
 * math either way; this module only composes the next query.
 */

import type { CloudQuery, FilterSpec, RollupRef, TagItem } from './types.js';

export type ClickModifier = 'PLAIN' | 'DICE_ADD';

/**
 * The query a plain click leads to.
 *
 * For every (dimension, value) the clicked tag pins down:
 *  - rolled-up dimension: drop that roll-up, display the child level,
 *    and dice the children through the hierarchy to the clicked parent;
 *  - base dimension: slice on the value, removing the dimension.
 *
 * If nothing is left to display, the remaining schema dimensions (not
 * yet sliced away or displayed) become the new display set.
 */
export function planTagClick(
  query: CloudQuery,
  tag: TagItem,
  allDims: string[],
  hierarchies: RollupRef[],
): CloudQuery | null {
  let groupDims = [...query.group_dims];
  let rollups = [...query.rollups];
  const filters: FilterSpec[] = [...query.filters];

  query.group_dims.forEach((dim, i) => {
    const value = tag.coords[i];
    const rollup = rollups.find((r) => r.parent === dim);
    if (rollup) {
      // drill-down: back to the child level, keep only the clicked branch
      rollups = rollups.filter((r) => r !== rollup);
      groupDims = groupDims.map((d) => (d === dim ? rollup.child : d));
      filters.push({ op: 'DICE', dim: rollup.child, values: [value], via: rollup.parent });
    } else {
      filters.push({ op: 'SLICE', dim, values: [value] });
      groupDims = groupDims.filter((d) => d !== dim);
    }
  });

  if (!groupDims.length) {
    const used = new Set<string>([
      ...filters.filter((f) => f.op === 'SLICE').map((f) => f.dim),
    ]);
    groupDims = allDims.filter((d) => !used.has(d));
    if (!groupDims.length) return null; // nothing left to explore
  }
  return { ...query, group_dims: groupDims, rollups, filters };
}

/** True when the clicked tag sits at a rolled-up level on any axis. */
export function isDrilldownClick(query: CloudQuery, _tag: TagItem): boolean {
  return query.group_dims.some((dim) => query.rollups.some((r) => r.parent === dim));
}
