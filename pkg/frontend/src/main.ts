// Browser entry point: wires the controller to the DOM. All verification
// logic lives server-side; this file is plumbing only.

import { ApiClient } from './api.js';
import { SessionController } from './state.js';
import { renderGauge, renderView } from './render.js';

const api = new ApiClient(window.location.origin.replace(/:\d+$/, ':8350'));
const controller = new SessionController(api);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function redraw(): void {
  const st = controller.state;
  if (!st) {
    return;
  }
  if (st.expired) {
    el('scene').innerHTML =
      '<p class="expired">Session expired. Reload a saved export to continue.</p>';
    return;
  }
  el('scene').innerHTML = renderView(st.view, st.positions);
  el('gauge').innerHTML = renderGauge(st.view);
  el('error').textContent = st.lastError ?? '';
  for (const kind of ['search', 'concretize', 'undo', 'export'] as const) {
    (el(`btn-${kind}`) as HTMLButtonElement).disabled = !controller.canDispatch({ kind });
  }
  for (const g of el('scene').querySelectorAll<SVGGElement>('g.vertex.abstract')) {
    const id = g.dataset.vertex!;
    if (st.selection.has(id)) {
      g.classList.add('selected');
    }
    g.addEventListener('click', () => {
      controller.toggleSelect(id);
      redraw();
    });
  }
}

async function boot(): Promise<void> {
  const form = el<HTMLFormElement>('create-form');
  form.addEventListener('submit', async (ev) => {
    ev.preventDefault();
    try {
      await controller.create({
        tra: el<HTMLTextAreaElement>('tra').value,
        lab: el<HTMLTextAreaElement>('lab').value,
        property: {
          target_label: el<HTMLInputElement>('target').value,
          threshold: Number(el<HTMLInputElement>('threshold').value),
          comparison: el<HTMLSelectElement>('comparison').value as 'le' | 'lt',
        },
      });
    } catch (err) {
      el('error').textContent = String(err);
      return;
    }
    redraw();
  });
  for (const kind of ['search', 'concretize', 'undo', 'export'] as const) {
    el(`btn-${kind}`).addEventListener('click', async () => {
      if (!controller.canDispatch({ kind })) {
        return;
      }
      const st = await controller.dispatch({ kind });
      if (kind === 'export' && st.exported) {
        const blob = new Blob([st.exported], { type: 'application/json' });
        const link = document.createElement('a');
        link.href = URL.createObjectURL(blob);
        link.download = 'session.json';
        link.click();
      }
      redraw();
    });
  }
}

boot();
