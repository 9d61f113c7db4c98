/** DOM rendering for the word grid, status line and controls. */

import type { AlignmentDoc } from "./api.js";

export interface ViewHandlers {
  onWordTap(index: number): void;
  onPlay(): void;
  onReplay(): void;
  onSkip(): void;
  onUndo(): void;
}

export class AnnotatorView {
  readonly grid: HTMLElement;
  readonly status: HTMLElement;
  readonly banner: HTMLElement;
  readonly playBtn: HTMLButtonElement;
  readonly replayBtn: HTMLButtonElement;
  readonly skipBtn: HTMLButtonElement;
  readonly undoBtn: HTMLButtonElement;
  private words: HTMLElement[] = [];

  constructor(private root: HTMLElement, handlers: ViewHandlers) {
    root.innerHTML = `
      <div class="toolbar">
        <button class="play">Play</button>
        <button class="replay">Replay</button>
        <button class="skip">Skip silence</button>
        <button class="undo">Undo</button>
        <span class="status"></span>
      </div>
      <div class="banner" hidden></div>
      <div class="word-grid"></div>
    `;
    this.grid = root.querySelector(".word-grid")!;
    this.status = root.querySelector(".status")!;
    this.banner = root.querySelector(".banner")!;
    this.playBtn = root.querySelector(".play")!;
    this.replayBtn = root.querySelector(".replay")!;
    this.skipBtn = root.querySelector(".skip")!;
    this.undoBtn = root.querySelector(".undo")!;

    this.playBtn.addEventListener("click", () => handlers.onPlay());
    this.replayBtn.addEventListener("click", () => handlers.onReplay());
    this.skipBtn.addEventListener("click", () => handlers.onSkip());
    this.undoBtn.addEventListener("click", () => handlers.onUndo());
    this.grid.addEventListener("click", (event) => {
      const target = (event.target as HTMLElement).closest(".word");
      if (target instanceof HTMLElement && target.dataset.index) {
        handlers.onWordTap(Number(target.dataset.index));
      }
    });
  }

  renderWords(doc: AlignmentDoc, committedWordIndex: number): void {
    this.grid.textContent = "";
    this.words = doc.words.map((word, i) => {
      const el = document.createElement("span");
      el.className = "word";
      el.dataset.index = String(i);
      el.textContent = word;
      if (i <= committedWordIndex) el.classList.add("cut");
      this.grid.appendChild(el);
      return el;
    });
  }

  /** Momentary highlight of the tapped span, then strike it through. */
  cutOut(fromWord: number, toWord: number): void {
    for (let i = fromWord; i <= toWord; i++) {
      const el = this.words[i];
      if (!el) continue;
      el.classList.add("highlight");
      el.classList.add("cut");
    }
    setTimeout(() => {
      for (let i = fromWord; i <= toWord; i++) {
        this.words[i]?.classList.remove("highlight");
      }
    }, 400);
  }

  restoreWords(fromWord: number): void {
    for (let i = Math.max(0, fromWord); i < this.words.length; i++) {
      this.words[i]?.classList.remove("cut", "highlight");
    }
  }

  wordElement(index: number): HTMLElement | undefined {
    return this.words[index];
  }

  /** Brief shake on an illegal tap. */
  rejectTap(index: number): void {
    const el = this.words[index];
    if (!el) return;
    el.classList.add("rejected");
    setTimeout(() => el.classList.remove("rejected"), 500);
  }

  setStatus(text: string): void {
    this.status.textContent = text;
  }

  showBanner(text: string): void {
    this.banner.textContent = text;
    this.banner.hidden = false;
  }

  hideBanner(): void {
    this.banner.hidden = true;
  }
}
