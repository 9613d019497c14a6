// Pure SVG scene generation from a fetched view plus layout positions.
// Kept DOM-free so it can be unit-tested in node; main.ts injects the string.

import { ViewDto, VertexDto } from './api.js';
import { Positions, hashId } from './layout.js';

export const CLUSTER_THRESHOLD = 2000; // above this, draw aggregated clusters

const RADIUS = 14;

export function formatProb(p: number): string {
  if (p === 0) {
    return '0';
  }
  return p.toPrecision(4);
}

function escapeXml(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

function vertexClass(v: VertexDto): string {
  const classes = ['vertex', v.kind];
  if (v.in_subsystem) {
    classes.push('in-subsystem');
  }
  if (v.labels.length > 0) {
    classes.push('labeled');
  }
  return classes.join(' ');
}

function vertexTitle(v: VertexDto): string {
  // abstract tooltip: covered-state count is the basis for choosing what
  // to concretize
  const parts = [`${v.id}`];
  if (v.kind === 'abstract') {
    parts.push(`covers ${v.covered.length} states`);
  }
  if (v.labels.length > 0) {
    parts.push(`labels: ${v.labels.join(', ')}`);
  }
  return parts.join(' | ');
}

function renderVertex(v: VertexDto, x: number, y: number): string {
  const rings: string[] = [];
  if (v.kind === 'abstract') {
    // double ring marks an expandable abstraction
    rings.push(`<circle class="outer-ring" cx="${x}" cy="${y}" r="${RADIUS + 4}"/>`);
  }
  rings.push(`<circle class="body" cx="${x}" cy="${y}" r="${RADIUS}"/>`);
  const badge = v.labels.length
    ? `<text class="badge" x="${x}" y="${y - RADIUS - 6}">${escapeXml(v.labels.join(','))}</text>`
    : '';
  const caption = `<text class="caption" x="${x}" y="${y + 4}">${escapeXml(v.id)}</text>`;
  return (
    `<g class="${vertexClass(v)}" data-vertex="${escapeXml(v.id)}">` +
    `<title>${escapeXml(vertexTitle(v))}</title>${rings.join('')}${badge}${caption}</g>`
  );
}

function renderEdges(view: ViewDto, positions: Positions): string {
  const parts: string[] = [];
  for (const e of view.edges) {
    const a = positions.get(e.src);
    const b = positions.get(e.dst);
    if (!a || !b) {
      continue;
    }
    const cls = e.in_subsystem ? 'edge in-subsystem' : 'edge';
    if (e.src === e.dst) {
      parts.push(
        `<g class="${cls}"><circle class="loop" cx="${a.x + RADIUS}" cy="${a.y - RADIUS}" r="8"/>` +
          `<text class="edge-label" x="${a.x + RADIUS + 10}" y="${a.y - RADIUS}">${formatProb(e.prob)}</text></g>`,
      );
      continue;
    }
    const mx = (a.x + b.x) / 2;
    const my = (a.y + b.y) / 2;
    parts.push(
      `<g class="${cls}"><line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" marker-end="url(#arrow)"/>` +
        `<text class="edge-label" x="${mx}" y="${my - 4}">${formatProb(e.prob)}</text></g>`,
    );
  }
  return parts.join('');
}

export function renderGauge(view: ViewDto): string {
  const g = view.gauge;
  const cmp = g.comparison === 'lt' ? '<' : '≤';
  const critical = g.status === 'critical';
  return (
    `<div class="gauge ${critical ? 'critical' : g.status}">` +
    `subsystem ${formatProb(g.probability)} vs P${cmp}${formatProb(g.threshold)}` +
    ` [${g.status}]</div>`
  );
}

/** Aggregated fallback for very large views: one circle per bucket. */
function renderClusters(view: ViewDto, width: number, height: number): string {
  const buckets = new Map<number, { count: number; inSub: number }>();
  const bucketOf = (id: string) => hashId(id) % 64;
  for (const v of view.vertices) {
    const b = bucketOf(v.id);
    const entry = buckets.get(b) ?? { count: 0, inSub: 0 };
    entry.count += 1;
    if (v.in_subsystem) {
      entry.inSub += 1;
    }
    buckets.set(b, entry);
  }
  const parts: string[] = [];
  for (const [b, entry] of [...buckets.entries()].sort((x, y) => x[0] - y[0])) {
    const col = b % 8;
    const row = Math.floor(b / 8);
    const x = ((col + 0.5) * width) / 8;
    const y = ((row + 0.5) * height) / 8;
    const r = 10 + Math.min(30, Math.sqrt(entry.count));
    parts.push(
      `<g class="cluster${entry.inSub > 0 ? ' in-subsystem' : ''}">` +
        `<circle cx="${x}" cy="${y}" r="${r}"/>` +
        `<text x="${x}" y="${y + 4}">${entry.count}</text></g>`,
    );
  }
  return parts.join('');
}

export function renderView(
  view: ViewDto,
  positions: Positions,
  width = 800,
  height = 600,
): string {
  const defs =
    '<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="20" refY="4" orient="auto">' +
    '<path d="M0,0 L8,4 L0,8 z"/></marker></defs>';
  let body: string;
  if (view.vertices.length > CLUSTER_THRESHOLD) {
    body = renderClusters(view, width, height);
  } else {
    body =
      renderEdges(view, positions) +
      view.vertices
        .map((v) => {
          const p = positions.get(v.id);
          return p ? renderVertex(v, p.x, p.y) : '';
        })
        .join('');
  }
  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}">${defs}${body}</svg>`;
}
