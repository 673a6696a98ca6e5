import { segments, TERM_CLASS_LABELS } from './highlight.js';
import { LabelFlowController } from './session.js';
import type { FlowState } from './session.js';
import { LABEL_NAMES } from './types.js';
import type { Label } from './types.js';

const GUIDELINES = [
  'Label 1 (biased) when the sentence contains a prohibited term used outside a direct quotation or an explanation of why the term is harmful.',
  'Also label 1 when the sentence expresses stereotyping, exclusion, a power imbalance, or prejudice - implicit or explicit - directed at a specific group.',
  'Label 0 (not biased) otherwise; label 2 (unsure) to send the sentence to re-annotation; label 3 to exclude broken or out-of-scope sentences.',
];

const LABELS: Label[] = [0, 1, 2, 3];

export function labelFromKey(key: string): Label | null {
  if (key === '0' || key === '1' || key === '2' || key === '3') {
    return Number(key) as Label;
  }
  return null;
}

export class AnnotationView {
  constructor(
    private readonly root: HTMLElement,
    private readonly controller: LabelFlowController,
    private readonly doc: Document = document,
  ) {
    controller.onChange((state) => this.render(state));
  }

  /** Keyboard shortcuts go through the exact same controller calls as clicks. */
  bindKeyboard(target: { addEventListener: Document['addEventListener'] }): void {
    target.addEventListener('keydown', (event: Event) => {
      const key = (event as KeyboardEvent).key;
      const label = labelFromKey(key);
      if (label !== null) {
        this.controller.selectLabel(label);
      } else if (key === 'Enter' && this.controller.canSubmit()) {
        void this.controller.submit();
      }
    });
  }

  private el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
  ): HTMLElementTagNameMap[K] {
    const node = this.doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  }

  render(state: FlowState): void {
    this.root.replaceChildren();
    switch (state.phase) {
      case 'loading':
        this.root.append(this.el('p', 'status', 'loading…'));
        return;
      case 'error':
        this.renderError(state);
        return;
      case 'done':
        this.renderDone(state);
        return;
      case 'labeling':
        this.renderItem(state);
        return;
    }
  }

  private renderError(state: FlowState): void {
    const banner = this.el('div', 'error-banner');
    banner.append(this.el('p', undefined, state.errorMessage ?? 'request failed'));
    const retry = this.el('button', 'retry', 'retry');
    retry.addEventListener('click', () => void this.controller.retry());
    banner.append(retry);
    this.root.append(banner);
  }

  private renderDone(state: FlowState): void {
    const panel = this.el('section', 'done');
    panel.append(this.el('h2', undefined, 'Session complete'));
    panel.append(
      this.el('p', undefined, `You submitted ${state.submittedCount} labels this visit.`),
    );
    const list = this.el('ul', 'tallies');
    for (const label of LABELS) {
      const count = state.tallies[String(label)] ?? 0;
      list.append(this.el('li', undefined, `${label} (${LABEL_NAMES[label]}): ${count}`));
    }
    panel.append(list);
    if (state.progress) {
      panel.append(
        this.el(
          'p',
          'progress-summary',
          `Session total: ${state.progress.completed} of ${state.progress.assignments} assignments done.`,
        ),
      );
    }
    if (state.agreement) {
      const kappa = state.agreement.kappa;
      panel.append(
        this.el(
          'p',
          'kappa',
          kappa === null
            ? 'Agreement undefined: every rating landed in one category.'
            : `Inter-annotator agreement (Fleiss) on the overlap panel: ${kappa.toFixed(3)}`,
        ),
      );
    }
    this.root.append(panel);
  }

  private renderItem(state: FlowState): void {
    const item = state.item;
    if (!item) return;
    const card = this.el('article', 'item-card');

    if (item.suggestion !== null) {
      card.append(
        this.el(
          'div',
          'suggestion-banner',
          'Contains a prohibited term: the guidelines suggest label 1 unless it is quoted or explained. The suggestion is advisory; your judgment decides.',
        ),
      );
    }

    if (item.context_before) card.append(this.el('p', 'context', item.context_before));
    const sentence = this.el('p', 'sentence');
    for (const segment of segments(item.text, item.matches)) {
      if (segment.match) {
        const mark = this.el('mark', `term term-${segment.match.term_class}`, segment.text);
        mark.title = `${segment.match.surface} (${segment.match.category})`;
        sentence.append(mark);
        sentence.append(
          this.el('span', `badge badge-${segment.match.term_class}`,
                  TERM_CLASS_LABELS[segment.match.term_class]),
        );
      } else {
        sentence.append(this.doc.createTextNode(segment.text));
      }
    }
    card.append(sentence);
    if (item.context_after) card.append(this.el('p', 'context', item.context_after));

    const buttons = this.el('div', 'label-buttons');
    for (const label of LABELS) {
      const button = this.el('button', 'label-button', `${label} ${LABEL_NAMES[label]}`);
      button.dataset.label = String(label);
      if (state.selected === label) button.classList.add('selected');
      button.addEventListener('click', () => this.controller.selectLabel(label));
      buttons.append(button);
    }
    card.append(buttons);

    if (state.selected === 2) {
      card.append(this.el('p', 'requeue-note', 'Unsure: this sentence will be re-queued for another round.'));
    }

    const guidelines = this.el('details', 'guidelines');
    guidelines.append(this.el('summary', undefined, 'Annotation guidelines'));
    const guidelineList = this.el('ol');
    for (const line of GUIDELINES) guidelineList.append(this.el('li', undefined, line));
    guidelines.append(guidelineList);
    card.append(guidelines);

    const ackRow = this.el('label', 'ack-row');
    const ack = this.el('input') as HTMLInputElement;
    ack.type = 'checkbox';
    ack.checked = state.guidelineAcked;
    ack.disabled = state.guidelineAcked; // once per session
    ack.addEventListener('change', () => {
      if (ack.checked) this.controller.ackGuidelines();
    });
    ackRow.append(ack, this.doc.createTextNode(' I have read the guidelines'));
    card.append(ackRow);

    const submit = this.el('button', 'submit', 'submit (Enter)');
    submit.disabled = !this.controller.canSubmit();
    submit.addEventListener('click', () => void this.controller.submit());
    card.append(submit);

    this.root.append(card);
  }
}
