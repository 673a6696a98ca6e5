// Wire types of the annotation service API.

export type Label = 0 | 1 | 2 | 3;

export const LABEL_NAMES: Record<Label, string> = {
  0: 'not biased',
  1: 'biased',
  2: 'unsure',
  3: 'exclude',
};

export interface TermMatch {
  surface: string;
  category: string;
  term_class: 'prohibited' | 'conditionally_biased' | 'context_sensitive';
  span: [number, number];
  matched_form: string;
  variants?: string[];
}

export interface ItemView {
  item_id: string;
  text: string;
  context_before: string;
  context_after: string;
  matches: TermMatch[];
  suggestion: number | null;
  session_id?: string;
}

export interface NextResponse {
  done: boolean;
  item?: ItemView;
}

export interface AnnotatorProgress {
  assigned: number;
  done: number;
}

export interface Progress {
  session_id: string;
  items: number;
  annotators: Record<string, AnnotatorProgress>;
  assignments: number;
  completed: number;
  label_tallies: Record<string, number>;
  overlap_items: number;
  overlap_complete: boolean;
}

export interface AgreementReport {
  kappa: number | null;
  n_items: number;
  n_raters: number;
  category_marginals: number[];
  degenerate: boolean;
  label_space: string;
  interpretation: string | null;
}

export interface SubmittedRecord {
  item_id: string;
  annotator_id: string;
  session_id: string;
  label: number;
  timestamp: string;
}
