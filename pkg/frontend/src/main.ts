/**
 * Application wiring: upload, schema design, pickers, the cloud itself,
 * and back navigation. One query is in flight at a time; a newer action
 * supersedes any pending request (latest wins).
 */

import { ApiClient } from './api.js';
import { planTagClick } from './interactions.js';
import { renderCloud } from './render.js';
import {
  addPendingDice,
  applyQuery,
  canGoBack,
  goBack,
  initialState,
  recordResponse,
  withDataset,
  type ViewState,
} from './state.js';
import type {
  CloudQuery,
  CloudResponse,
  ColumnInfo,
  HierarchyBody,
  SchemaBody,
  TagItem,
} from './types.js';

const DEFAULT_QUERY: Omit<CloudQuery, 'group_dims'> = {
  aggregator: { kind: 'COUNT' },
  filters: [],
  rollups: [],
  k: 150,
  clustering_dims: [],
  similarity: null,
  layout: { kind: 'NONE' },
  iceberg_limit: null,
  seed: 0,
};

function parseHierarchyCsv(text: string): Record<string, string> {
  const mapping: Record<string, string> = {};
  for (const line of text.split(/\r?\n/)) {
    if (!line.trim()) continue;
    const [child, parent] = line.split(',');
    if (child === undefined || parent === undefined) {
      throw new Error(`hierarchy rows are child,parent: ${line}`);
    }
    mapping[child.trim()] = parent.trim();
  }
  return mapping;
}

export class App {
  state: ViewState = initialState();
  columns: ColumnInfo[] = [];
  schema: SchemaBody | null = null;
  /** The most recent run; tests await this. */
  pending: Promise<void> | null = null;
  private requestSeq = 0;

  constructor(
    private doc: Document,
    private api: ApiClient,
    private cloudContainer: HTMLElement,
    private statusBox?: HTMLElement,
  ) {}

  private status(text: string): void {
    if (this.statusBox) this.statusBox.textContent = text;
  }

  async uploadCsv(text: string): Promise<string> {
    const datasetId = await this.api.uploadDataset(text);
    const infos = await this.api.listDatasets();
    const mine = infos.find((d) => d.dataset_id === datasetId);
    this.columns = mine ? mine.columns : [];
    this.state = withDataset(this.state, datasetId, []);
    this.schema = null;
    this.status(`dataset ${datasetId}: ${mine?.row_count ?? '?'} rows`);
    return datasetId;
  }

  async applySchema(body: SchemaBody): Promise<number> {
    if (!this.state.datasetId) throw new Error('upload a dataset first');
    const version = await this.api.putSchema(this.state.datasetId, body);
    this.schema = body;
    this.state = {
      ...this.state,
      hierarchies: body.hierarchies.map((h) => ({ child: h.child, parent: h.parent })),
    };
    this.status(`schema v${version}`);
    return version;
  }

  /** Issue a query; an older in-flight response is dropped unrendered. */
  run(query: CloudQuery): Promise<void> {
    if (!this.state.datasetId) throw new Error('upload a dataset first');
    const datasetId = this.state.datasetId;
    this.state = applyQuery(this.state, query);
    const seq = ++this.requestSeq;
    const task = (async () => {
      try {
        const response = await this.api.cloud(datasetId, query);
        if (seq !== this.requestSeq) return; // superseded
        this.state = recordResponse(this.state, query, response);
        this.renderCurrent(response);
      } catch (err) {
        if (seq !== this.requestSeq) return;
        this.status(`error: ${err instanceof Error ? err.message : err}`);
      }
    })();
    this.pending = task;
    return task;
  }

  private renderCurrent(response: CloudResponse): void {
    renderCloud(this.cloudContainer, response, (tag, modifier) =>
      this.handleTagClick(tag, modifier),
    );
    const link = this.doc.getElementById('permalink');
    if (link instanceof HTMLAnchorElement) {
      link.href = response.permalink;
      link.textContent = 'permalink';
    }
  }

  handleTagClick(tag: TagItem, modifier: 'PLAIN' | 'DICE_ADD'): void {
    const current = this.state.current;
    if (!current) return;
    if (modifier === 'DICE_ADD') {
      this.state = addPendingDice(this.state, current.query.group_dims, tag.coords);
      const picked = Object.entries(this.state.pendingDice)
        .map(([dim, values]) => `${dim}: ${values.join(', ')}`)
        .join(' | ');
      this.status(`selection pending - ${picked}`);
      return;
    }
    const dims = this.schema?.dimensions ?? [];
    const next = planTagClick(current.query, tag, dims, this.state.hierarchies);
    if (next) void this.run(next);
  }

  confirmDice(): void {
    const current = this.state.current;
    if (!current || !Object.keys(this.state.pendingDice).length) return;
    const filters = [...current.query.filters];
    for (const [dim, values] of Object.entries(this.state.pendingDice)) {
      filters.push({ op: 'DICE', dim, values });
    }
    void this.run({ ...current.query, filters });
  }

  back(): void {
    if (!canGoBack(this.state)) return;
    this.state = goBack(this.state);
    const entry = this.state.current;
    if (!entry) return;
    if (entry.response) {
      this.renderCurrent(entry.response);
    } else {
      // cache miss: replay the stored query
      const query = entry.query;
      this.state = { ...this.state, stack: this.state.stack };
      const seq = ++this.requestSeq;
      this.pending = (async () => {
        const response = await this.api.cloud(this.state.datasetId!, query);
        if (seq !== this.requestSeq) return;
        this.state = recordResponse(this.state, query, response);
        this.renderCurrent(response);
      })();
    }
  }
}

/* ------------------------------------------------------------------ */
/* Browser bootstrapping below; tests drive the App class directly.    */
/* ------------------------------------------------------------------ */

function multiSelectValues(select: HTMLSelectElement): string[] {
  return Array.from(select.selectedOptions).map((o) => o.value);
}

function fillSelect(select: HTMLSelectElement, names: string[], multiple = false): void {
  select.textContent = '';
  if (!multiple) {
    const none = select.ownerDocument.createElement('option');
    none.value = '';
    none.textContent = '(none)';
    select.appendChild(none);
  }
  for (const name of names) {
    const option = select.ownerDocument.createElement('option');
    option.value = name;
    option.textContent = name;
    select.appendChild(option);
  }
}

export function bootstrap(doc: Document): App {
  const api = new ApiClient('');
  const container = doc.getElementById('cloud-container') as HTMLElement;
  const status = doc.getElementById('status') as HTMLElement;
  const app = new App(doc, api, container, status);

  const byId = <T extends HTMLElement>(id: string) => doc.getElementById(id) as T;
  const fileInput = byId<HTMLInputElement>('csv-file');
  const hierarchyInput = byId<HTMLInputElement>('hierarchy-file');
  const dimsSelect = byId<HTMLSelectElement>('schema-dims');
  const measuresSelect = byId<HTMLSelectElement>('schema-measures');
  const displaySelect = byId<HTMLSelectElement>('display-dims');
  const clusteringSelect = byId<HTMLSelectElement>('clustering-dims');
  const aggSelect = byId<HTMLSelectElement>('agg-kind');
  const measureSelect = byId<HTMLSelectElement>('agg-measure');
  const similaritySelect = byId<HTMLSelectElement>('similarity');
  const layoutSelect = byId<HTMLSelectElement>('layout-kind');
  const kInput = byId<HTMLInputElement>('k-input');
  const limitInput = byId<HTMLInputElement>('iceberg-limit');
  const rollupSelect = byId<HTMLSelectElement>('rollup-level');

  let hierarchies: HierarchyBody[] = [];

  byId<HTMLButtonElement>('upload-btn').addEventListener('click', async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    await app.uploadCsv(await file.text());
    const dims = app.columns.filter((c) => c.kind === 'DIMENSION').map((c) => c.name);
    const measures = app.columns.filter((c) => c.kind === 'MEASURE').map((c) => c.name);
    fillSelect(dimsSelect, dims, true);
    fillSelect(measuresSelect, measures, true);
    Array.from(dimsSelect.options).forEach((o) => (o.selected = true));
    Array.from(measuresSelect.options).forEach((o) => (o.selected = true));
  });

  byId<HTMLButtonElement>('apply-schema-btn').addEventListener('click', async () => {
    const file = hierarchyInput.files?.[0];
    hierarchies = [];
    if (file) {
      const parentName = prompt('name for the coarser level?', 'Group') ?? 'Group';
      const child = multiSelectValues(dimsSelect)[0];
      hierarchies.push({ child, parent: parentName, mapping: parseHierarchyCsv(await file.text()) });
    }
    await app.applySchema({
      dimensions: multiSelectValues(dimsSelect),
      measures: multiSelectValues(measuresSelect),
      hierarchies,
    });
    const dims = multiSelectValues(dimsSelect);
    fillSelect(displaySelect, dims, true);
    fillSelect(clusteringSelect, dims, true);
    fillSelect(measureSelect, multiSelectValues(measuresSelect));
    fillSelect(
      rollupSelect,
      hierarchies.map((h) => `${h.child}:${h.parent}`),
    );
  });

  byId<HTMLButtonElement>('run-btn').addEventListener('click', () => {
    const rollups = rollupSelect.value
      ? [{ child: rollupSelect.value.split(':')[0], parent: rollupSelect.value.split(':')[1] }]
      : [];
    const groupDims = multiSelectValues(displaySelect).map((d) => {
      const rolled = rollups.find((r) => r.child === d);
      return rolled ? rolled.parent : d;
    });
    const clustering = multiSelectValues(clusteringSelect);
    const layoutKind = (layoutSelect.value || 'NONE') as CloudQuery['layout']['kind'];
    void app.run({
      ...DEFAULT_QUERY,
      group_dims: groupDims,
      aggregator: {
        kind: aggSelect.value as CloudQuery['aggregator']['kind'],
        measure: measureSelect.value || null,
      },
      rollups,
      k: Number(kInput.value) || 150,
      clustering_dims: layoutKind === 'NONE' ? [] : clustering,
      similarity: similaritySelect.value || null,
      layout: { kind: layoutKind, exchanges: 1000, iterations: 1000, glue_threshold: 0.8 },
      iceberg_limit: limitInput.value ? Number(limitInput.value) : null,
    });
  });

  byId<HTMLButtonElement>('back-btn').addEventListener('click', () => app.back());
  byId<HTMLButtonElement>('confirm-dice-btn').addEventListener('click', () => app.confirmDice());

  return app;
}

/** Bare-cloud embed mode: ?cloud=/clouds/{id} renders without chrome. */
export async function bootstrapEmbed(doc: Document, permalink: string): Promise<void> {
  const api = new ApiClient('');
  const container = doc.getElementById('cloud-container') as HTMLElement;
  const response = await api.storedCloud(permalink);
  renderCloud(container, response);
}

declare const window: (Window & typeof globalThis) | undefined;

if (typeof window !== 'undefined' && typeof document !== 'undefined' && document.getElementById('cloud-container')) {
  const params = new URLSearchParams(window.location.search);
  const embed = params.get('cloud');
  if (embed) {
    document.body.classList.add('embed');
    void bootstrapEmbed(document, embed);
  } else {
    bootstrap(document);
  }
}
