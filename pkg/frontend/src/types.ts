/**
 * Wire types for the tagcube JSON API. The server does all aggregation
 * and layout math; the client renders what it is sent.
 */

export interface TagItem {
  term: string;
  coords: string[];
  weight: number;
  display_size: number;
}

/** Tag list elements: tag objects interleaved with token strings.
 * "GLUED" binds neighbors; unknown tokens (e.g. "PERMUTABLE") are
 * ignored for forward compatibility. */
export type HintedElement = TagItem | string;

export const GLUED = 'GLUED';

export interface CloudMetrics {
  entropy: number | null;
  relative_entropy: number | null;
  tag_count: number;
  mla_cost: number | null;
}

export interface CloudResponse {
  tags: HintedElement[];
  approximate: boolean;
  metrics: CloudMetrics;
  permalink: string;
  timing_ms: number;
}

export interface AggregatorSpec {
  kind: 'COUNT' | 'SUM' | 'AVERAGE' | 'MIN' | 'MAX';
  measure?: string | null;
}

export interface FilterSpec {
  op: 'SLICE' | 'DICE';
  dim: string;
  values: string[];
  /** Parent level name: filter children through the hierarchy. */
  via?: string | null;
}

export interface RollupRef {
  child: string;
  parent: string;
}

export interface LayoutSpec {
  kind: 'NONE' | 'NN' | 'PWMC' | 'MC';
  exchanges?: number;
  iterations?: number;
  glue_threshold?: number;
}

export interface CloudQuery {
  group_dims: string[];
  aggregator: AggregatorSpec;
  filters: FilterSpec[];
  rollups: RollupRef[];
  k: number;
  clustering_dims: string[];
  similarity?: string | null;
  layout: LayoutSpec;
  iceberg_limit?: number | null;
  seed: number;
  font_min?: number;
  font_max?: number;
}

export interface HierarchyBody {
  child: string;
  parent: string;
  mapping: Record<string, string>;
}

export interface SchemaBody {
  dimensions: string[];
  measures: string[];
  hierarchies: HierarchyBody[];
}

export interface ColumnInfo {
  name: string;
  kind: 'DIMENSION' | 'MEASURE';
}

export interface DatasetInfo {
  dataset_id: string;
  row_count: number;
  columns: ColumnInfo[];
  schema_version: number | null;
}
