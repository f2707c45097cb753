/**
 * Thin typed client over the JSON API. The fetch implementation is
 * injectable so tests can stand in a fake server.
 */

import type { CloudQuery, CloudResponse, DatasetInfo, SchemaBody } from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function fail(resp: Response): Promise<never> {
  let message = `${resp.status}`;
  try {
    const body = await resp.json();
    message = body?.detail?.message ?? body?.detail?.error ?? message;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(resp.status, message);
}

export class ApiClient {
  constructor(
    private baseUrl = '',
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async uploadDataset(csv: string): Promise<string> {
    const resp = await this.fetchFn(`${this.baseUrl}/datasets`, {
      method: 'POST',
      headers: { 'Content-Type': 'text/csv' },
      body: csv,
    });
    if (!resp.ok) await fail(resp);
    return (await resp.json()).dataset_id;
  }

  async listDatasets(): Promise<DatasetInfo[]> {
    const resp = await this.fetchFn(`${this.baseUrl}/datasets`);
    if (!resp.ok) await fail(resp);
    return (await resp.json()).datasets;
  }

  async dimensionCounts(datasetId: string): Promise<Record<string, number>> {
    const resp = await this.fetchFn(`${this.baseUrl}/datasets/${datasetId}/dimensions`);
    if (!resp.ok) await fail(resp);
    return (await resp.json()).dimensions;
  }

  async putSchema(datasetId: string, body: SchemaBody): Promise<number> {
    const resp = await this.fetchFn(`${this.baseUrl}/datasets/${datasetId}/schema`, {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await fail(resp);
    return (await resp.json()).schema_version;
  }

  async cloud(datasetId: string, query: CloudQuery): Promise<CloudResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/datasets/${datasetId}/clouds`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(query),
    });
    if (!resp.ok) await fail(resp);
    return await resp.json();
  }

  async storedCloud(permalink: string): Promise<CloudResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}${permalink}`);
    if (!resp.ok) await fail(resp);
    return await resp.json();
  }
}
