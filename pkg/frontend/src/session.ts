/**
 * Pure annotation-session state: which silence is next, which words are
 * already cut out, and whether a tap is even allowed.  The server has the
 * same monotonicity rule; the client pre-check exists so the UI never
 * sends a mark the server would 409.
 */

import type { AlignmentDoc, Mark } from "./api.js";

export const SKIP = null;

export type WordChoice = number | null;

export interface Segment {
  fromWord: number; // inclusive
  toWord: number;   // inclusive
}

export class Session {
  readonly doc: AlignmentDoc;
  readonly annotatorId: string;
  /** word_index per silence index; undefined = not yet marked. */
  private marks: (WordChoice | undefined)[];
  /** What the server still holds; survives local undo so the pre-check
   *  also respects standing later marks (they cap the word index). */
  private serverMarks: (WordChoice | undefined)[];

  constructor(doc: AlignmentDoc, annotatorId: string, existing: Mark[] = []) {
    this.doc = doc;
    this.annotatorId = annotatorId;
    this.marks = new Array(doc.silence_markers.length).fill(undefined);
    for (const mark of existing) {
      if (mark.silence_index >= 0 && mark.silence_index < this.marks.length) {
        this.marks[mark.silence_index] = mark.word_index;
      }
    }
    this.serverMarks = [...this.marks];
  }

  /** First unmarked silence; equals n_markers when the pass is done. */
  get currentSilenceIndex(): number {
    const i = this.marks.findIndex((m) => m === undefined);
    return i === -1 ? this.marks.length : i;
  }

  /** Last word already cut out (-1 before the first mark). */
  get committedWordIndex(): number {
    let committed = -1;
    for (const m of this.marks) {
      if (typeof m === "number" && m > committed) committed = m;
    }
    return committed;
  }

  /** All silences marked; only the trailing segment remains. */
  get silencesDone(): boolean {
    return this.currentSilenceIndex >= this.marks.length;
  }

  get annotatable(): boolean {
    return this.doc.silence_markers.length > 0;
  }

  /** Playback resume point: the marker before the first unmarked silence. */
  get resumePosition(): number {
    const current = this.currentSilenceIndex;
    if (current === 0) return 0;
    return this.doc.silence_markers[current - 1] ?? 0;
  }

  /** Client-side mirror of the server's monotonicity rule. */
  canMark(wordIndex: WordChoice): boolean {
    if (this.silencesDone) return false;
    if (wordIndex === SKIP) return true;
    if (wordIndex < 0 || wordIndex >= this.doc.words.length) return false;
    if (wordIndex < this.committedWordIndex + 1) return false;
    // standing later server marks (possible after undo) cap the choice
    const current = this.currentSilenceIndex;
    for (let s = current + 1; s < this.serverMarks.length; s++) {
      const standing = this.serverMarks[s];
      if (typeof standing === "number" && wordIndex > standing) return false;
    }
    return true;
  }

  /** Words that would highlight and cut out for this tap. */
  pendingSegment(wordIndex: number): Segment {
    return { fromWord: this.committedWordIndex + 1, toWord: wordIndex };
  }

  markFor(wordIndex: WordChoice): Mark {
    return {
      doc_id: this.doc.id,
      annotator_id: this.annotatorId,
      silence_index: this.currentSilenceIndex,
      word_index: wordIndex,
    };
  }

  /** Record a server-acked mark and advance the loop. */
  apply(mark: Mark): void {
    this.marks[mark.silence_index] = mark.word_index;
    this.serverMarks[mark.silence_index] = mark.word_index;
  }

  /** Silence index to rewind to for undo, or null at the start. */
  undoTarget(): number | null {
    const current = this.currentSilenceIndex;
    return current > 0 ? current - 1 : null;
  }

  /** Forget the mark at a silence (after the server ack of the re-mark). */
  clearFrom(silenceIndex: number): void {
    for (let i = silenceIndex; i < this.marks.length; i++) {
      this.marks[i] = undefined;
    }
  }

  snapshotMarks(): (WordChoice | undefined)[] {
    return [...this.marks];
  }
}
