// Client-side session state. The server owns all verification results; this
// layer only tracks what is needed to drive it: the fetched view, the user's
// selection of abstract vertices, layout positions, and the single-action
// in-flight gate.

import { ApiClient, ApiError, SessionCreate, ViewDto } from './api.js';
import { layoutView, Positions } from './layout.js';

export type UiAction =
  | { kind: 'search' }
  | { kind: 'concretize' }
  | { kind: 'undo' }
  | { kind: 'export' };

export interface UiSessionState {
  sessionId: string;
  view: ViewDto;
  selection: Set<string>;
  positions: Positions;
  inFlight: boolean;
  lastError: string | null;
  expired: boolean;
  exported: string | null;
}

function abstractIds(view: ViewDto): Set<string> {
  return new Set(view.vertices.filter((v) => v.kind === 'abstract').map((v) => v.id));
}

/** vertex id -> abstract vertex id whose covered set contains its state. */
function parentMap(oldView: ViewDto, newView: ViewDto): Map<string, string> {
  const parents = new Map<string, string>();
  const oldIds = new Set(oldView.vertices.map((v) => v.id));
  const coverIndex = new Map<number, string>();
  for (const v of oldView.vertices) {
    if (v.kind === 'abstract') {
      for (const s of v.covered) {
        coverIndex.set(s, v.id);
      }
    }
  }
  for (const v of newView.vertices) {
    if (!oldIds.has(v.id) && v.covered.length > 0) {
      const parent = coverIndex.get(v.covered[0]);
      if (parent) {
        parents.set(v.id, parent);
      }
    }
  }
  return parents;
}

export class SessionController {
  state: UiSessionState | null = null;

  constructor(private readonly api: ApiClient) {}

  async create(body: SessionCreate): Promise<UiSessionState> {
    const session = await this.api.createSession(body);
    const view = await this.api.getView(session.id);
    this.state = {
      sessionId: session.id,
      view,
      selection: new Set(),
      positions: layoutView({
        vertexIds: view.vertices.map((v) => v.id),
        edges: view.edges.map((e) => [e.src, e.dst]),
      }),
      inFlight: false,
      lastError: null,
      expired: false,
      exported: null,
    };
    return this.state;
  }

  toggleSelect(vertexId: string): void {
    const st = this.requireState();
    if (!abstractIds(st.view).has(vertexId)) {
      return; // only abstract vertices are selectable
    }
    if (st.selection.has(vertexId)) {
      st.selection.delete(vertexId);
    } else {
      st.selection.add(vertexId);
    }
  }

  /** Selected hierarchy node ids, the payload for concretize. */
  selectedNodes(): number[] {
    const st = this.requireState();
    const nodes: number[] = [];
    for (const v of st.view.vertices) {
      if (v.kind === 'abstract' && v.node !== null && st.selection.has(v.id)) {
        nodes.push(v.node);
      }
    }
    return [...new Set(nodes)].sort((a, b) => a - b);
  }

  canDispatch(action: UiAction): boolean {
    const st = this.state;
    if (!st || st.inFlight || st.expired) {
      return false;
    }
    if (action.kind === 'concretize') {
      return this.selectedNodes().length > 0;
    }
    return true;
  }

  async dispatch(action: UiAction): Promise<UiSessionState> {
    const st = this.requireState();
    if (st.inFlight) {
      throw new Error('action already in flight');
    }
    if (action.kind === 'concretize' && this.selectedNodes().length === 0) {
      throw new Error('concretize requires a selection');
    }
    st.inFlight = true;
    st.lastError = null;
    try {
      switch (action.kind) {
        case 'search':
          await this.api.search(st.sessionId);
          break;
        case 'concretize':
          await this.api.concretize(st.sessionId, this.selectedNodes());
          st.selection.clear();
          break;
        case 'undo':
          await this.api.undo(st.sessionId);
          break;
        case 'export':
          st.exported = await this.api.exportReport(st.sessionId);
          return st;
      }
      await this.refresh();
    } catch (err) {
      if (err instanceof ApiError) {
        // 409: the server refused the action (e.g. parent-first order);
        // surface the rule, keep state aligned with server truth
        st.lastError = typeof err.detail === 'string' ? err.detail : err.message;
        if (err.status === 404) {
          st.expired = true;
        }
      } else {
        throw err;
      }
    } finally {
      st.inFlight = false;
    }
    return st;
  }

  /** Refetch the view; layout positions persist by vertex id and new
   * vertices spawn near the abstract parent that covered them. */
  async refresh(): Promise<void> {
    const st = this.requireState();
    let view: ViewDto;
    try {
      view = await this.api.getView(st.sessionId);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        st.expired = true;
        return;
      }
      throw err;
    }
    st.positions = layoutView({
      vertexIds: view.vertices.map((v) => v.id),
      edges: view.edges.map((e) => [e.src, e.dst]),
      previous: st.positions,
      parentOf: parentMap(st.view, view),
    });
    st.view = view;
    const selectable = abstractIds(view);
    st.selection = new Set([...st.selection].filter((id) => selectable.has(id)));
  }

  private requireState(): UiSessionState {
    if (!this.state) {
      throw new Error('no session created');
    }
    return this.state;
  }
}
