/**
 * Auto-pausing playback: play from the current position and stop at the
 * next silence marker.  jsdom and unit tests inject a fake media element,
 * so only the small surface below is required.
 */

export interface MediaLike {
  currentTime: number;
  duration: number;
  paused: boolean;
  ended: boolean;
  play(): Promise<void> | void;
  pause(): void;
  addEventListener(type: string, listener: () => void): void;
  removeEventListener(type: string, listener: () => void): void;
}

export interface PauseResult {
  /** Marker index we stopped at, or null when playback ran to clip end. */
  markerIndex: number | null;
  position: number;
}

export const DEFAULT_TICK_MS = 40;

export class MarkerPlayer {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private media: MediaLike,
    private markers: number[],
    private tickMs: number = DEFAULT_TICK_MS,
  ) {}

  get position(): number {
    return this.media.currentTime;
  }

  seek(seconds: number): void {
    this.media.currentTime = seconds;
  }

  /**
   * Play until silence_markers[markerIndex]; resolves once paused there
   * (within one watch tick).  A markerIndex past the last marker plays to
   * the clip end for the trailing segment.
   */
  playUntil(markerIndex: number): Promise<PauseResult> {
    this.cancel();
    const target = this.markers[markerIndex];
    return new Promise((resolve) => {
      let settled = false;
      const finish = (result: PauseResult) => {
        if (settled) return;
        settled = true;
        this.cancel();
        this.media.removeEventListener("timeupdate", check);
        this.media.removeEventListener("ended", onEnded);
        resolve(result);
      };
      const check = () => {
        if (settled) return;
        if (target !== undefined && this.media.currentTime >= target) {
          this.media.pause();
          // snap back so the pause lands on the marker, not one tick past
          this.media.currentTime = target;
          finish({ markerIndex, position: target });
        } else if (this.media.ended) {
          onEnded();
        }
      };
      const onEnded = () => {
        this.media.pause();
        finish({ markerIndex: null, position: this.media.currentTime });
      };
      this.media.addEventListener("timeupdate", check);
      this.media.addEventListener("ended", onEnded);
      // poll as well: timeupdate cadence varies wildly across engines
      this.timer = setInterval(check, this.tickMs);
      void this.media.play();
    });
  }

  /** Re-play the span the annotator is currently deciding on. */
  replay(fromSeconds: number, toMarkerIndex: number): Promise<PauseResult> {
    this.media.currentTime = fromSeconds;
    return this.playUntil(toMarkerIndex);
  }

  cancel(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  pause(): void {
    this.cancel();
    this.media.pause();
  }
}
