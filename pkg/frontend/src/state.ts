/**
 * View state and navigation: the current query, a back stack of the
 * queries that led here, and the pending multi-select dice values.
 * Every applied operation pushes exactly one stack entry; back pops
 * exactly one. All transitions are pure functions so a stack replay
 * reproduces the view.
 */

import type { CloudQuery, CloudResponse, RollupRef } from './types.js';

export interface HistoryEntry {
  query: CloudQuery;
  /** Cached response so back can re-render without refetching. */
  response: CloudResponse | null;
}

export interface ViewState {
  datasetId: string | null;
  /** Hierarchies attached with the schema; needed to tell a rolled-up
   * display level apart from a base column on tag clicks. */
  hierarchies: RollupRef[];
  current: HistoryEntry | null;
  stack: HistoryEntry[];
  pendingDice: Record<string, string[]>;
}

export function initialState(): ViewState {
  return { datasetId: null, hierarchies: [], current: null, stack: [], pendingDice: {} };
}

export function withDataset(state: ViewState, datasetId: string, hierarchies: RollupRef[]): ViewState {
  return { ...initialState(), datasetId, hierarchies };
}

/** Apply a new query: the previous view goes onto the back stack. */
export function applyQuery(state: ViewState, query: CloudQuery): ViewState {
  const stack = state.current ? [...state.stack, state.current] : state.stack;
  return { ...state, stack, current: { query, response: null }, pendingDice: {} };
}

export function recordResponse(state: ViewState, query: CloudQuery, response: CloudResponse): ViewState {
  if (!state.current || state.current.query !== query) return state; // superseded
  return { ...state, current: { query, response } };
}

export function canGoBack(state: ViewState): boolean {
  return state.stack.length > 0;
}

/** Pop exactly one entry; the restored view keeps its cached response. */
export function goBack(state: ViewState): ViewState {
  if (!state.stack.length) return state;
  const stack = state.stack.slice(0, -1);
  const current = state.stack[state.stack.length - 1];
  return { ...state, stack, current, pendingDice: {} };
}

/** Accumulate coordinate values for a later dice (multi-select mode). */
export function addPendingDice(state: ViewState, dims: string[], coords: string[]): ViewState {
  const pending: Record<string, string[]> = { ...state.pendingDice };
  dims.forEach((dim, i) => {
    const seen = pending[dim] ?? [];
    if (!seen.includes(coords[i])) pending[dim] = [...seen, coords[i]];
  });
  return { ...state, pendingDice: pending };
}

/** Turn the pending selections into dice filters on the current query. */
export function confirmDice(state: ViewState): CloudQuery | null {
  if (!state.current || !Object.keys(state.pendingDice).length) return null;
  const query = state.current.query;
  const filters = [...query.filters];
  for (const [dim, values] of Object.entries(state.pendingDice)) {
    filters.push({ op: 'DICE', dim, values });
  }
  return { ...query, filters };
}
