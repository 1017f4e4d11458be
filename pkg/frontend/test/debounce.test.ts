import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { debounce } from "../src/debounce.js";

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("collapses a burst into one trailing call with the last arguments", () => {
    const calls: number[] = [];
    const fn = debounce((t: number) => calls.push(t), 150);
    fn(0.1);
    vi.advanceTimersByTime(50);
    fn(0.3);
    vi.advanceTimersByTime(50);
    fn(0.5);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual([0.5]);
  });

  it("fires again for a later separate burst", () => {
    const calls: number[] = [];
    const fn = debounce((t: number) => calls.push(t), 150);
    fn(0.2);
    vi.advanceTimersByTime(200);
    fn(0.9);
    vi.advanceTimersByTime(200);
    expect(calls).toEqual([0.2, 0.9]);
  });

  it("cancel drops the pending call", () => {
    const calls: number[] = [];
    const fn = debounce((t: number) => calls.push(t), 150);
    fn(0.7);
    fn.cancel();
    vi.advanceTimersByTime(1000);
    expect(calls).toEqual([]);
  });
});
