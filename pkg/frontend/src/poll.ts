// Job polling: one interval per job, stopped as soon as a terminal state
// arrives (or the caller cancels).

import type { JobDto } from "./types.js";
import { isTerminal } from "./types.js";

export interface JobFetcher {
  getJob(id: string): Promise<JobDto>;
}

export interface PollHandle {
  stop(): void;
  readonly active: boolean;
}

export function pollJob(
  api: JobFetcher,
  jobId: string,
  onUpdate: (job: JobDto) => void,
  onError: (error: unknown) => void = () => undefined,
  intervalMs = 1000,
): PollHandle {
  let active = true;
  let timer: ReturnType<typeof setInterval> | null = null;

  const stop = () => {
    active = false;
    if (timer !== null) {
      clearInterval(timer);
      timer = null;
    }
  };

  const tick = async () => {
    if (!active) return;
    try {
      const job = await api.getJob(jobId);
      if (!active) return;
      onUpdate(job);
      if (isTerminal(job.state)) stop();
    } catch (error) {
      stop();
      onError(error);
    }
  };

  timer = setInterval(() => {
    void tick();
  }, intervalMs);
  void tick();

  return {
    stop,
    get active() {
      return active;
    },
  };
}
