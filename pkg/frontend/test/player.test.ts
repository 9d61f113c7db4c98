import { describe, expect, it } from "vitest";

import { MarkerPlayer } from "../src/player.js";
import { FakeAudio } from "./fakes.js";

const MARKERS = [3.2, 7.9];
const TICK = 0.025;

describe("MarkerPlayer", () => {
  it("auto-pauses at the marker within one media tick", async () => {
    const audio = new FakeAudio(12.0);
    const player = new MarkerPlayer(audio, MARKERS);
    const pausing = player.playUntil(0);
    audio.advance(4.0);
    const result = await pausing;
    expect(audio.paused).toBe(true);
    expect(result.markerIndex).toBe(0);
    expect(audio.pausedAt! - 3.2).toBeGreaterThanOrEqual(0);
    expect(audio.pausedAt! - 3.2).toBeLessThanOrEqual(TICK + 1e-9);
    expect(audio.currentTime).toBe(3.2); // snapped onto the marker
    player.cancel();
  });

  it("pauses at the second marker from the first", async () => {
    const audio = new FakeAudio(12.0);
    audio.currentTime = 3.2;
    const player = new MarkerPlayer(audio, MARKERS);
    const pausing = player.playUntil(1);
    audio.advance(6.0);
    const result = await pausing;
    expect(result.position).toBe(7.9);
    expect(Math.abs(audio.pausedAt! - 7.9)).toBeLessThanOrEqual(TICK + 1e-9);
    player.cancel();
  });

  it("past the last marker it plays to the clip end", async () => {
    const audio = new FakeAudio(12.0);
    audio.currentTime = 7.9;
    const player = new MarkerPlayer(audio, MARKERS);
    const pausing = player.playUntil(MARKERS.length);
    audio.advance(10.0);
    const result = await pausing;
    expect(result.markerIndex).toBeNull();
    expect(audio.ended).toBe(true);
    player.cancel();
  });

  it("replay rewinds then pauses at the same marker", async () => {
    const audio = new FakeAudio(12.0);
    audio.currentTime = 3.2;
    const player = new MarkerPlayer(audio, MARKERS);
    const pausing = player.replay(0, 0);
    expect(audio.currentTime).toBe(0);
    audio.advance(4.0);
    const result = await pausing;
    expect(result.position).toBe(3.2);
    player.cancel();
  });
});
