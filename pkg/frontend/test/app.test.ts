// Scripted walkthrough of the annotation loop against a faked server and
// media element: the UI-facing release criteria live here.
//
// waitFor conditions key on observable UI/session state (not the server's
// raw submission counter) so asserts never race the app's microtasks.

import { beforeEach, describe, expect, it, vi } from "vitest";

import { AnnotatorApp } from "../src/app.js";
import { FakeAlignServer, FakeAudio, fixtureDoc } from "./fakes.js";

const TICK = 0.025;

function setup(overrides: Parameters<typeof fixtureDoc>[0] = {}) {
  const server = new FakeAlignServer();
  server.addDocument(fixtureDoc(overrides));
  const audio = new FakeAudio(12.0);
  const root = document.createElement("main");
  document.body.appendChild(root);
  const app = new AnnotatorApp({
    api: server,
    media: audio,
    root,
    docId: "d1",
    annotatorId: "ann1",
  });
  return { server, audio, root, app };
}

function tap(root: HTMLElement, wordIndex: number): void {
  const el = root.querySelector(`.word[data-index="${wordIndex}"]`)!;
  el.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

function cutCount(root: HTMLElement): number {
  return root.querySelectorAll(".word.cut").length;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("annotation loop", () => {
  it("loads a fresh document with the full text visible and player at 0", async () => {
    const { audio, root, app } = setup();
    await app.load();
    expect(root.querySelectorAll(".word")).toHaveLength(10);
    expect(cutCount(root)).toBe(0);
    expect(audio.currentTime).toBe(0);
  });

  it("auto-pauses at each marker within one media tick", async () => {
    const { audio, app } = setup();
    await app.load();

    const first = app.playNext();
    audio.advance(5.0);
    await first;
    expect(audio.paused).toBe(true);
    expect(audio.pausedAt! - 3.2).toBeGreaterThanOrEqual(0);
    expect(audio.pausedAt! - 3.2).toBeLessThanOrEqual(TICK + 1e-9);
    expect(audio.currentTime).toBe(3.2);

    app.session.apply(app.session.markFor(4));
    const second = app.playNext();
    audio.advance(6.0);
    await second;
    expect(Math.abs(audio.pausedAt! - 7.9)).toBeLessThanOrEqual(TICK + 1e-9);
  });

  it("tapping word 4 then word 9 produces server marks (0,4) and (1,9)", async () => {
    const { server, audio, root, app } = setup();
    await app.load();

    const toFirst = app.playNext();
    audio.advance(4.0);
    await toFirst;

    tap(root, 4);
    await vi.waitFor(() => expect(cutCount(root)).toBe(5));
    expect(server.submissions).toHaveLength(1);
    expect(server.submissions[0]).toMatchObject({ silence_index: 0, word_index: 4 });

    audio.advance(6.0); // the ack auto-plays toward the next silence
    await vi.waitFor(() => expect(audio.paused).toBe(true));
    expect(audio.currentTime).toBe(7.9);

    tap(root, 9);
    await vi.waitFor(() => expect(cutCount(root)).toBe(10));
    expect(server.submissions).toHaveLength(2);
    expect(server.submissions[1]).toMatchObject({ silence_index: 1, word_index: 9 });
  });

  it("tapping a pre-committed word is rejected client-side", async () => {
    const { server, root, app } = setup();
    await app.load();
    tap(root, 4);
    await vi.waitFor(() => expect(cutCount(root)).toBe(5));

    tap(root, 2); // inside the cut-out prefix
    await vi.waitFor(() =>
      expect(root.querySelector('.word[data-index="2"]')!.classList.contains("rejected"))
        .toBe(true));
    expect(server.submissions).toHaveLength(1); // nothing new was sent
    expect(app.session.currentSilenceIndex).toBe(1);
  });

  it("skip advances the silence without cutting words", async () => {
    const { server, root, app } = setup();
    await app.load();
    (root.querySelector(".skip") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(app.session.currentSilenceIndex).toBe(1));
    expect(server.submissions).toHaveLength(1);
    expect(server.submissions[0]).toMatchObject({ silence_index: 0, word_index: null });
    expect(cutCount(root)).toBe(0);
  });

  it("an offline-queued mark flushes on reconnect", async () => {
    const { server, root, app } = setup();
    await app.load();

    server.offline = true;
    tap(root, 4);
    await vi.waitFor(() => expect(app.queue.pendingMarks).toHaveLength(1));
    expect(server.submissions).toHaveLength(0);
    await vi.waitFor(() =>
      expect((root.querySelector(".banner") as HTMLElement).hidden).toBe(false));
    // optimistic UI: the loop already advanced
    await vi.waitFor(() => expect(app.session.currentSilenceIndex).toBe(1));

    server.offline = false;
    window.dispatchEvent(new Event("online"));
    await vi.waitFor(() => expect(server.submissions).toHaveLength(1));
    expect(server.submissions[0]).toMatchObject({ silence_index: 0, word_index: 4 });
    expect(app.queue.pendingMarks).toHaveLength(0);
    await vi.waitFor(() =>
      expect((root.querySelector(".banner") as HTMLElement).hidden).toBe(true));
  });

  it("queued marks flush in submission order", async () => {
    const { server, root, app } = setup();
    await app.load();
    server.offline = true;
    tap(root, 4);
    await vi.waitFor(() => expect(app.queue.pendingMarks).toHaveLength(1));
    tap(root, 9);
    await vi.waitFor(() => expect(app.queue.pendingMarks).toHaveLength(2));

    server.offline = false;
    window.dispatchEvent(new Event("online"));
    await vi.waitFor(() => expect(server.submissions).toHaveLength(2));
    expect(server.submissions.map((m) => [m.silence_index, m.word_index])).toEqual(
      [[0, 4], [1, 9]],
    );
  });

  it("resumes a half-annotated document cut out at the last marker", async () => {
    const { server, audio, root, app } = setup();
    await server.submitMark(
      { doc_id: "d1", annotator_id: "ann1", silence_index: 0, word_index: 4 });
    await app.load();
    expect(cutCount(root)).toBe(5);
    expect(audio.currentTime).toBe(3.2);
    expect(app.session.currentSilenceIndex).toBe(1);
  });

  it("undo rewinds one marker and allows re-marking", async () => {
    const { server, audio, root, app } = setup();
    await app.load();
    tap(root, 4);
    await vi.waitFor(() => expect(cutCount(root)).toBe(5));

    (root.querySelector(".undo") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(cutCount(root)).toBe(0));
    expect(app.session.currentSilenceIndex).toBe(0);
    expect(audio.currentTime).toBe(0);

    tap(root, 5); // upsert replaces the old mark
    await vi.waitFor(() => expect(cutCount(root)).toBe(6));
    expect(server.submissions).toHaveLength(2);
    expect(server.submissions[1]).toMatchObject({ silence_index: 0, word_index: 5 });
  });

  it("flags documents without markers as un-annotatable", async () => {
    const { root, app } = setup({ silence_markers: [] });
    await app.load();
    const banner = root.querySelector(".banner") as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toMatch(/cannot be annotated/);
  });
});
