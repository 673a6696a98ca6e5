import { ApiClient } from './api.js';
import { LabelFlowController } from './session.js';
import { AnnotationView } from './ui.js';

function param(name: string): string | null {
  return new URLSearchParams(window.location.search).get(name);
}

function boot(): void {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app element');

  const sessionId = param('session');
  const annotator = param('annotator');
  if (!sessionId || !annotator) {
    root.replaceChildren();
    const form = document.createElement('form');
    form.className = 'login';
    form.innerHTML = `
      <h2>Annotation session</h2>
      <label>Session id <input name="session" required value="${sessionId ?? ''}"></label>
      <label>Your annotator id <input name="annotator" required value="${annotator ?? ''}"></label>
      <button type="submit">start</button>`;
    form.addEventListener('submit', (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const query = new URLSearchParams({
        session: String(data.get('session') ?? ''),
        annotator: String(data.get('annotator') ?? ''),
      });
      window.location.search = query.toString();
    });
    root.append(form);
    return;
  }

  const api = new ApiClient('', annotator); // same origin: UI is served by the service
  const controller = new LabelFlowController(api, sessionId);
  const view = new AnnotationView(root, controller);
  view.bindKeyboard(document);
  void controller.start();
}

boot();
