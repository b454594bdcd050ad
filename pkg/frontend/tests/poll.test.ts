import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { pollJob } from "../src/poll.js";
import type { JobDto } from "../src/types.js";
import { goldenPpcaJob } from "./helpers.js";

function jobInState(state: JobDto["state"]): JobDto {
  const job = goldenPpcaJob();
  job.state = state;
  if (state !== "done") {
    job.result = null;
    job.progress = state === "queued" ? 0 : 0.5;
    job.partial_curve = state === "queued" ? [] : job.partial_curve.slice(0, 3);
  }
  return job;
}

describe("pollJob", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("polls until the job reaches a terminal state, then stops", async () => {
    const sequence = [jobInState("queued"), jobInState("running"), jobInState("done")];
    let calls = 0;
    const api = {
      getJob: async () => {
        const job = sequence[Math.min(calls, sequence.length - 1)];
        calls += 1;
        return job;
      },
    };
    const seen: string[] = [];
    const handle = pollJob(api, "j1", (job) => seen.push(job.state), () => undefined, 1000);

    await vi.advanceTimersByTimeAsync(0); // the immediate first tick
    await vi.advanceTimersByTimeAsync(1000);
    await vi.advanceTimersByTimeAsync(1000);
    expect(seen).toEqual(["queued", "running", "done"]);
    expect(handle.active).toBe(false);

    // no further fetches after the terminal state
    await vi.advanceTimersByTimeAsync(5000);
    expect(calls).toBe(3);
  });

  it("stops on a failed job too", async () => {
    const api = { getJob: async () => jobInState("failed") };
    const spy = vi.spyOn(api, "getJob");
    const handle = pollJob(api, "j2", () => undefined, () => undefined, 1000);
    await vi.advanceTimersByTimeAsync(0);
    expect(handle.active).toBe(false);
    await vi.advanceTimersByTimeAsync(4000);
    expect(spy).toHaveBeenCalledTimes(1);
  });

  it("stops and reports when the fetch itself fails", async () => {
    const api = {
      getJob: async () => {
        throw new Error("network down");
      },
    };
    const errors: unknown[] = [];
    const handle = pollJob(api, "j3", () => undefined, (e) => errors.push(e), 1000);
    await vi.advanceTimersByTimeAsync(0);
    expect(handle.active).toBe(false);
    expect(errors).toHaveLength(1);
  });

  it("caller can cancel early", async () => {
    const api = { getJob: async () => jobInState("running") };
    const spy = vi.spyOn(api, "getJob");
    const handle = pollJob(api, "j4", () => undefined, () => undefined, 1000);
    await vi.advanceTimersByTimeAsync(0);
    handle.stop();
    await vi.advanceTimersByTimeAsync(5000);
    expect(spy).toHaveBeenCalledTimes(1);
    expect(handle.active).toBe(false);
  });
});
