// Typed client for the /v1 session API. The server is the single source of
// truth; this module only moves JSON, it never computes probabilities.

export interface PropertyIn {
  target_label: string;
  threshold: number;
  comparison?: 'le' | 'lt';
}

export interface SessionCreate {
  tra?: string;
  lab?: string;
  model_name?: string;
  property: PropertyIn;
  method?: 'global' | 'local';
}

export interface SessionOut {
  id: string;
  status: string;
  probability: number;
}

export interface VertexDto {
  id: string;
  kind: 'concrete' | 'abstract';
  node: number | null;
  covered: number[];
  labels: string[];
  in_subsystem: boolean;
}

export interface EdgeDto {
  src: string;
  dst: string;
  prob: number;
  in_subsystem: boolean;
}

export interface GaugeDto {
  probability: number;
  threshold: number;
  comparison: string;
  status: string;
}

export interface ViewDto {
  vertices: VertexDto[];
  edges: EdgeDto[];
  gauge: GaugeDto;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
  }
}

async function unwrap<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail: unknown = res.statusText;
    try {
      detail = (await res.json()).detail;
    } catch {
      // non-JSON error body; keep statusText
    }
    throw new ApiError(res.status, detail);
  }
  return res.status === 204 ? (undefined as T) : ((await res.json()) as T);
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return `${this.base}/v1${path}`;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.fetchFn(this.url(path), {
      method: 'POST',
      headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
      body: body === undefined ? undefined : JSON.stringify(body),
    }).then((res) => unwrap<T>(res));
  }

  createSession(body: SessionCreate): Promise<SessionOut> {
    return this.post('/sessions', body);
  }

  getView(sid: string): Promise<ViewDto> {
    return this.fetchFn(this.url(`/sessions/${sid}/view`)).then((res) => unwrap<ViewDto>(res));
  }

  search(sid: string): Promise<SessionOut> {
    return this.post(`/sessions/${sid}/search`);
  }

  concretize(sid: string, nodes: number[]): Promise<SessionOut> {
    return this.post(`/sessions/${sid}/concretize`, { nodes });
  }

  undo(sid: string): Promise<SessionOut> {
    return this.post(`/sessions/${sid}/undo`);
  }

  /** Raw export document; callers persist it byte-for-byte. */
  async exportReport(sid: string): Promise<string> {
    const res = await this.fetchFn(this.url(`/sessions/${sid}/report`));
    if (!res.ok) {
      throw new ApiError(res.status, res.statusText);
    }
    return res.text();
  }

  deleteSession(sid: string): Promise<void> {
    return this.fetchFn(this.url(`/sessions/${sid}`), { method: 'DELETE' }).then((res) =>
      unwrap<void>(res),
    );
  }
}
