/**
 * Controller for one annotation session: wires the session state machine,
 * the auto-pausing player, the offline queue and the view.  Constructed
 * with injected dependencies so the scripted tests can drive it with a
 * fake media element and a mocked API.
 */

import type { AlignmentDoc, Mark } from "./api.js";
import { MarkerPlayer, type MediaLike } from "./player.js";
import { MarkQueue, type SubmitOutcome } from "./queue.js";
import { SKIP, Session, type WordChoice } from "./session.js";
import { AnnotatorView } from "./ui.js";

/** The slice of the HTTP client the controller needs (tests fake this). */
export interface AlignClient {
  getDocument(docId: string): Promise<AlignmentDoc>;
  getMarks(docId: string, annotator: string): Promise<Mark[]>;
  submitMark(mark: Mark): Promise<Mark>;
}

export interface AppOptions {
  api: AlignClient;
  media: MediaLike;
  root: HTMLElement;
  docId: string;
  annotatorId: string;
  tickMs?: number;
}

export class AnnotatorApp {
  session!: Session;
  player!: MarkerPlayer;
  view!: AnnotatorView;
  queue: MarkQueue;
  private doc!: AlignmentDoc;
  private opts: AppOptions;

  constructor(opts: AppOptions) {
    this.opts = opts;
    this.queue = new MarkQueue((mark) => opts.api.submitMark(mark));
  }

  async load(): Promise<void> {
    const { api, media, root, docId, annotatorId, tickMs } = this.opts;
    this.doc = await api.getDocument(docId);
    const existing = await api.getMarks(docId, annotatorId);
    this.session = new Session(this.doc, annotatorId, existing);
    this.player = new MarkerPlayer(media, this.doc.silence_markers, tickMs);
    this.view = new AnnotatorView(root, {
      onWordTap: (i) => void this.tapWord(i),
      onPlay: () => void this.playNext(),
      onReplay: () => void this.replay(),
      onSkip: () => void this.skipSilence(),
      onUndo: () => void this.undo(),
    });
    if (!this.session.annotatable) {
      this.view.showBanner("This document has no silence markers and cannot be annotated.");
    }
    this.view.renderWords(this.doc, this.session.committedWordIndex);
    this.player.seek(this.session.resumePosition);
    this.refreshStatus();
    if (typeof window !== "undefined") {
      window.addEventListener("online", () => void this.flushQueue());
    }
  }

  /** Play from the current position and auto-pause at the next silence. */
  async playNext(): Promise<void> {
    if (this.session.silencesDone) {
      // trailing segment: play to the end of the clip
      await this.player.playUntil(this.doc.silence_markers.length);
      this.refreshStatus();
      return;
    }
    await this.player.playUntil(this.session.currentSilenceIndex);
    this.refreshStatus();
  }

  async replay(): Promise<void> {
    const target = this.session.currentSilenceIndex;
    await this.player.replay(this.session.resumePosition, target);
    this.refreshStatus();
  }

  async tapWord(index: number): Promise<void> {
    if (!this.session.canMark(index)) {
      this.view.rejectTap(index);
      this.view.setStatus("That word is already cut out; pick a later one.");
      return;
    }
    await this.commit(index);
  }

  async skipSilence(): Promise<void> {
    if (this.session.silencesDone) return;
    await this.commit(SKIP);
  }

  private async commit(choice: WordChoice): Promise<void> {
    const mark = this.session.markFor(choice);
    const outcome = await this.queue.submit(mark);
    this.afterSubmit(mark, outcome, choice);
  }

  private afterSubmit(mark: Mark, outcome: SubmitOutcome, choice: WordChoice): void {
    if (outcome.status === "rejected") {
      if (typeof choice === "number") this.view.rejectTap(choice);
      this.view.setStatus(`Mark refused: ${outcome.detail ?? "conflict"}`);
      return;
    }
    if (outcome.status === "queued") {
      this.view.showBanner("Offline: marks are queued and will sync when you reconnect.");
    }
    // optimistic for queued marks, authoritative for acked ones
    if (typeof choice === "number") {
      const segment = this.session.pendingSegment(choice);
      this.view.cutOut(segment.fromWord, segment.toWord);
    }
    this.session.apply(mark);
    this.refreshStatus();
    void this.playNext();
  }

  /** Step one silence back: rewind and re-open that mark (upsert on resubmit). */
  async undo(): Promise<void> {
    const target = this.session.undoTarget();
    if (target === null) return;
    this.session.clearFrom(target);
    this.view.renderWords(this.doc, this.session.committedWordIndex);
    this.player.pause();
    this.player.seek(this.session.resumePosition);
    this.refreshStatus();
  }

  /** Re-sync queued marks after connectivity returns. */
  async flushQueue(): Promise<void> {
    const { rejected } = await this.queue.flush();
    if (this.queue.pendingMarks.length === 0) {
      this.view.hideBanner();
      if (rejected.length === 0) {
        this.view.setStatus("Synced.");
      } else {
        await this.reconcile();
        this.view.setStatus(`Synced; ${rejected.length} mark(s) refused by the server.`);
      }
    }
  }

  /** Reload server truth (e.g. after refused queued marks). */
  async reconcile(): Promise<void> {
    const existing = await this.opts.api.getMarks(this.opts.docId, this.opts.annotatorId);
    this.session = new Session(this.doc, this.opts.annotatorId, existing);
    this.view.renderWords(this.doc, this.session.committedWordIndex);
    this.player.seek(this.session.resumePosition);
    this.refreshStatus();
  }

  private refreshStatus(): void {
    const total = this.doc.silence_markers.length;
    const done = Math.min(this.session.currentSilenceIndex, total);
    const queued = this.queue.pendingMarks.length;
    let text = `Silence ${done} / ${total}`;
    if (this.session.silencesDone) text = `All ${total} silences marked`;
    if (queued > 0) text += ` (${queued} queued)`;
    this.view.setStatus(text);
  }
}
