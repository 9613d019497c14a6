// Deterministic force-directed layout. Positions are a pure function of the
// vertex ids (seeded from a hash, no Math.random), so the same view always
// renders the same picture and screenshots are reproducible.

export interface Point {
  x: number;
  y: number;
}

export type Positions = Map<string, Point>;

export interface LayoutInput {
  vertexIds: string[];
  edges: Array<[string, string]>;
  /** positions from the previous render; matching ids keep their spot */
  previous?: Positions;
  /** vertex id -> id of the abstract parent it was concretized out of */
  parentOf?: Map<string, string>;
  width?: number;
  height?: number;
  iterations?: number;
}

// xorshift32; good enough for jitter, stable across platforms
function makeRng(seed: number): () => number {
  let s = seed >>> 0 || 0x9e3779b9;
  return () => {
    s ^= s << 13;
    s ^= s >>> 17;
    s ^= s << 5;
    s >>>= 0;
    return s / 0x100000000;
  };
}

export function hashId(id: string): number {
  let h = 2166136261;
  for (let i = 0; i < id.length; i++) {
    h ^= id.charCodeAt(i);
    h = Math.imul(h, 16777619);
  }
  return h >>> 0;
}

const SPAWN_RADIUS = 30; // children start inside the parent's bounding circle

function seedPosition(
  id: string,
  width: number,
  height: number,
  previous: Positions,
  parentOf: Map<string, string>,
): Point {
  const kept = previous.get(id);
  if (kept) {
    return { x: kept.x, y: kept.y };
  }
  const rng = makeRng(hashId(id));
  const parent = parentOf.get(id);
  const anchor = parent ? previous.get(parent) : undefined;
  if (anchor) {
    const angle = rng() * 2 * Math.PI;
    const r = rng() * SPAWN_RADIUS;
    return { x: anchor.x + r * Math.cos(angle), y: anchor.y + r * Math.sin(angle) };
  }
  return { x: rng() * width, y: rng() * height };
}

/**
 * Spring-repulsion layout over the given graph. Vertices present in
 * `previous` keep their coordinates as the starting point, so refinement
 * steps only move the new material.
 */
export function layoutView(input: LayoutInput): Positions {
  const width = input.width ?? 800;
  const height = input.height ?? 600;
  const iterations = input.iterations ?? 60;
  const previous = input.previous ?? new Map();
  const parentOf = input.parentOf ?? new Map();
  const ids = input.vertexIds;
  const pos: Positions = new Map(
    ids.map((id) => [id, seedPosition(id, width, height, previous, parentOf)]),
  );
  const pinned = new Set(ids.filter((id) => previous.has(id)));
  const springs = input.edges.filter(([a, b]) => a !== b && pos.has(a) && pos.has(b));
  const k = Math.sqrt((width * height) / Math.max(1, ids.length));

  for (let step = 0; step < iterations; step++) {
    const cool = 0.1 * (1 - step / iterations) * k;
    const force = new Map<string, Point>(ids.map((id) => [id, { x: 0, y: 0 }]));
    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = pos.get(ids[i])!;
        const b = pos.get(ids[j])!;
        const dx = a.x - b.x || 1e-6;
        const dy = a.y - b.y || 1e-6;
        const d2 = dx * dx + dy * dy;
        const rep = (k * k) / d2;
        const fa = force.get(ids[i])!;
        const fb = force.get(ids[j])!;
        fa.x += dx * rep;
        fa.y += dy * rep;
        fb.x -= dx * rep;
        fb.y -= dy * rep;
      }
    }
    for (const [a, b] of springs) {
      const pa = pos.get(a)!;
      const pb = pos.get(b)!;
      const dx = pa.x - pb.x || 1e-6;
      const dy = pa.y - pb.y || 1e-6;
      const d = Math.sqrt(dx * dx + dy * dy);
      const att = (d * d) / k / d;
      const fa = force.get(a)!;
      const fb = force.get(b)!;
      fa.x -= dx * att;
      fa.y -= dy * att;
      fb.x += dx * att;
      fb.y += dy * att;
    }
    for (const id of ids) {
      if (pinned.has(id)) {
        continue; // stability beats aesthetics for persisted vertices
      }
      const p = pos.get(id)!;
      const f = force.get(id)!;
      const mag = Math.sqrt(f.x * f.x + f.y * f.y) || 1e-6;
      const move = Math.min(mag, cool);
      p.x += (f.x / mag) * move;
      p.y += (f.y / mag) * move;
      p.x = Math.min(width - 20, Math.max(20, p.x));
      p.y = Math.min(height - 20, Math.max(20, p.y));
    }
  }
  return pos;
}
