import { describe, expect, it } from 'vitest';

import { layoutView, Positions } from '../src/layout.js';

const ids = ['s0', 's1', 's2', 'n0:s3'];
const edges: Array<[string, string]> = [
  ['s0', 's1'],
  ['s1', 's2'],
  ['s2', 'n0:s3'],
];

describe('layoutView', () => {
  it('is deterministic for the same input', () => {
    const a = layoutView({ vertexIds: ids, edges });
    const b = layoutView({ vertexIds: ids, edges });
    expect([...a.entries()]).toEqual([...b.entries()]);
  });

  it('places every vertex inside the canvas', () => {
    const pos = layoutView({ vertexIds: ids, edges, width: 400, height: 300 });
    for (const id of ids) {
      const p = pos.get(id)!;
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThanOrEqual(400);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(300);
    }
  });

  it('keeps previous positions for persisting vertex ids', () => {
    const first = layoutView({ vertexIds: ids, edges });
    const second = layoutView({
      vertexIds: [...ids, 's9'],
      edges: [...edges, ['s2', 's9']],
      previous: first,
    });
    for (const id of ids) {
      expect(second.get(id)).toEqual(first.get(id));
    }
    expect(second.has('s9')).toBe(true);
  });

  it('spawns concretized children near their abstract parent', () => {
    const previous: Positions = new Map([['n0:s3', { x: 250, y: 250 }]]);
    const parentOf = new Map([
      ['s3', 'n0:s3'],
      ['s4', 'n0:s3'],
    ]);
    const pos = layoutView({
      vertexIds: ['s3', 's4'],
      edges: [['s3', 's4']],
      previous,
      parentOf,
      iterations: 0,
    });
    for (const id of ['s3', 's4']) {
      const p = pos.get(id)!;
      const dist = Math.hypot(p.x - 250, p.y - 250);
      expect(dist).toBeLessThanOrEqual(30);
    }
  });

  it('gives distinct seeds to distinct ids', () => {
    const pos = layoutView({ vertexIds: ['s0', 's1'], edges: [], iterations: 0 });
    expect(pos.get('s0')).not.toEqual(pos.get('s1'));
  });
});
