import type { TermMatch } from './types.js';

export interface Segment {
  text: string;
  match?: TermMatch;
}

/**
 * Split the sentence into plain and highlighted segments using the
 * service-provided match spans. The service is the only matcher; no
 * client-side re-matching happens here.
 */
export function segments(text: string, matches: TermMatch[]): Segment[] {
  const ordered = [...matches].sort((a, b) => a.span[0] - b.span[0]);
  const out: Segment[] = [];
  let cursor = 0;
  for (const match of ordered) {
    const [start, end] = match.span;
    if (start < cursor || end > text.length || start >= end) continue; // defensive: bad span
    if (start > cursor) out.push({ text: text.slice(cursor, start) });
    out.push({ text: text.slice(start, end), match });
    cursor = end;
  }
  if (cursor < text.length) out.push({ text: text.slice(cursor) });
  return out;
}

export const TERM_CLASS_LABELS: Record<TermMatch['term_class'], string> = {
  prohibited: 'prohibited',
  conditionally_biased: 'conditional',
  context_sensitive: 'context',
};
