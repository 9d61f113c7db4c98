/**
 * Submission pipeline with an offline queue.  Network failures park the
 * mark locally (in submission order); a later flush replays them in
 * order.  Server rejections (4xx) are NOT queued: they mean the mark is
 * wrong, not that the network is down.
 */

import { ApiRejection, type Mark } from "./api.js";

export type SubmitFn = (mark: Mark) => Promise<Mark>;

export interface SubmitOutcome {
  status: "acked" | "queued" | "rejected";
  mark: Mark;
  detail?: string;
}

export class MarkQueue {
  private pending: Mark[] = [];

  constructor(private submitFn: SubmitFn) {}

  get pendingMarks(): readonly Mark[] {
    return this.pending;
  }

  /** Submit now; queue on network failure. */
  async submit(mark: Mark): Promise<SubmitOutcome> {
    if (this.pending.length > 0) {
      // keep strict submission order: new marks line up behind the queue
      this.pending.push(mark);
      return { status: "queued", mark };
    }
    try {
      const acked = await this.submitFn(mark);
      return { status: "acked", mark: acked };
    } catch (err) {
      if (err instanceof ApiRejection) {
        return { status: "rejected", mark, detail: err.message };
      }
      this.pending.push(mark);
      return { status: "queued", mark };
    }
  }

  /**
   * Replay queued marks in order.  Stops (and keeps the remainder) on the
   * first network failure; a server rejection drops that mark and
   * continues, reporting it.
   */
  async flush(): Promise<{ acked: Mark[]; rejected: SubmitOutcome[] }> {
    const acked: Mark[] = [];
    const rejected: SubmitOutcome[] = [];
    while (this.pending.length > 0) {
      const mark = this.pending[0]!;
      try {
        acked.push(await this.submitFn(mark));
        this.pending.shift();
      } catch (err) {
        if (err instanceof ApiRejection) {
          rejected.push({ status: "rejected", mark, detail: err.message });
          this.pending.shift();
          continue;
        }
        break; // still offline; try again on the next flush
      }
    }
    return { acked, rejected };
  }
}
