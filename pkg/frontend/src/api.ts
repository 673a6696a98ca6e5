import type { AgreementReport, ItemView, Label, NextResponse, Progress, SubmittedRecord } from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly errorName: string,
    detail: string,
  ) {
    super(`${errorName}: ${detail}`);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let name = `HTTP${response.status}`;
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.error === 'string') {
      name = body.error;
      detail = body.detail ?? detail;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, name, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    public readonly annotatorId: string,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.url(path));
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  async nextItem(sessionId: string): Promise<NextResponse> {
    return this.get<NextResponse>(
      `/sessions/${encodeURIComponent(sessionId)}/next?annotator=${encodeURIComponent(this.annotatorId)}`,
    );
  }

  async submitLabel(
    sessionId: string,
    itemId: string,
    label: Label,
    guidelineAck: boolean,
  ): Promise<SubmittedRecord> {
    const response = await fetch(this.url(`/sessions/${encodeURIComponent(sessionId)}/labels`), {
      method: 'POST',
      headers: {
        'Content-Type': 'application/json',
        'X-Annotator-Id': this.annotatorId,
      },
      body: JSON.stringify({ item_id: itemId, label, guideline_ack: guidelineAck }),
    });
    if (!response.ok) throw await parseError(response);
    const body = await response.json();
    return body.record as SubmittedRecord;
  }

  async progress(sessionId: string): Promise<Progress> {
    return this.get<Progress>(`/sessions/${encodeURIComponent(sessionId)}/progress`);
  }

  async iaa(sessionId: string, space: 'four_way' | 'binary' = 'four_way'): Promise<AgreementReport> {
    return this.get<AgreementReport>(`/sessions/${encodeURIComponent(sessionId)}/iaa?space=${space}`);
  }

  async item(itemId: string): Promise<ItemView> {
    return this.get<ItemView>(`/items/${encodeURIComponent(itemId)}`);
  }
}
