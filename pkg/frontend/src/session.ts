import { ApiClient, ApiError } from './api.js';
import type { AgreementReport, ItemView, Label, Progress } from './types.js';

export type FlowPhase = 'loading' | 'labeling' | 'error' | 'done';

export interface FlowState {
  phase: FlowPhase;
  item: ItemView | null;
  selected: Label | null;
  guidelineAcked: boolean;
  errorMessage: string | null;
  submittedCount: number;
  tallies: Record<string, number>;
  progress: Progress | null;
  agreement: AgreementReport | null;
}

type Listener = (state: FlowState) => void;

/**
 * Drives one annotator through a session: fetch next item, submit the chosen
 * label, auto-advance, finish on Done. Submissions are idempotent from the
 * UI's perspective: an AlreadyLabeled conflict (e.g. a retry after a network
 * failure that actually reached the server) advances silently without
 * counting the item twice.
 */
export class LabelFlowController {
  private state: FlowState = {
    phase: 'loading',
    item: null,
    selected: null,
    guidelineAcked: false,
    errorMessage: null,
    submittedCount: 0,
    tallies: { '0': 0, '1': 0, '2': 0, '3': 0 },
    progress: null,
    agreement: null,
  };
  private listeners: Listener[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly sessionId: string,
  ) {}

  get current(): FlowState {
    return this.state;
  }

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private update(patch: Partial<FlowState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Guideline acknowledgment is required once per session before submitting. */
  ackGuidelines(): void {
    this.update({ guidelineAcked: true });
  }

  /** Exactly one label is selectable; selecting replaces the previous choice. */
  selectLabel(label: Label): void {
    this.update({ selected: label });
  }

  canSubmit(): boolean {
    return (
      this.state.phase === 'labeling' &&
      this.state.item !== null &&
      this.state.selected !== null &&
      this.state.guidelineAcked
    );
  }

  async start(): Promise<void> {
    await this.advance();
  }

  private async advance(): Promise<void> {
    this.update({ phase: 'loading', item: null, selected: null, errorMessage: null });
    try {
      const next = await this.api.nextItem(this.sessionId);
      if (next.done) {
        await this.finish();
      } else {
        this.update({ phase: 'labeling', item: next.item ?? null });
      }
    } catch (error) {
      this.update({ phase: 'error', errorMessage: describe(error) });
    }
  }

  private async finish(): Promise<void> {
    let progress: Progress | null = null;
    let agreement: AgreementReport | null = null;
    try {
      progress = await this.api.progress(this.sessionId);
      if (progress.overlap_complete && progress.overlap_items > 0) {
        agreement = await this.api.iaa(this.sessionId);
      }
    } catch {
      // the done screen still renders without the optional extras
    }
    this.update({ phase: 'done', item: null, progress, agreement });
  }

  async submit(): Promise<void> {
    if (!this.canSubmit() || this.state.item === null || this.state.selected === null) return;
    const { item, selected } = this.state;
    try {
      await this.api.submitLabel(this.sessionId, item.item_id, selected, this.state.guidelineAcked);
      this.countSubmission(selected);
      await this.advance();
    } catch (error) {
      if (error instanceof ApiError && error.errorName === 'AlreadyLabeled') {
        // the server already has this annotator's label (e.g. a retry after
        // the original write landed); count it once and move on silently
        this.countSubmission(selected);
        await this.advance();
        return;
      }
      this.update({ phase: 'error', errorMessage: describe(error) });
    }
  }

  private countSubmission(label: Label): void {
    const tallies = { ...this.state.tallies };
    const key = String(label);
    tallies[key] = (tallies[key] ?? 0) + 1;
    this.update({ submittedCount: this.state.submittedCount + 1, tallies });
  }

  /** Re-enter the flow after a rendered error; safe to call repeatedly. */
  async retry(): Promise<void> {
    if (this.state.item !== null && this.state.selected !== null) {
      this.update({ phase: 'labeling', errorMessage: null });
      await this.submit();
    } else {
      await this.advance();
    }
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  if (error instanceof Error) return error.message;
  return String(error);
}
