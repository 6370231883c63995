/** Polling helper for long-running mesh jobs. */

import type { SessionClient } from "./client.js";
import { ServiceError, type MeshJobResult } from "./types.js";

export interface PollOptions {
  intervalMs?: number;
  timeoutMs?: number;
}

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

/**
 * Poll a mesh job until it completes.  Resolves with the finished result,
 * rejects with a ServiceError when the job fails or the timeout elapses.
 */
export async function pollUntilDone(
  client: SessionClient,
  sessionId: string,
  jobId: string,
  { intervalMs = 100, timeoutMs = 30_000 }: PollOptions = {},
): Promise<MeshJobResult> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const result = await client.pollMeshJob(sessionId, jobId);
    if (result.status === "done") {
      return result;
    }
    if (result.status === "error") {
      throw new ServiceError(
        result.error ?? "MeshingError",
        result.message ?? "mesh job failed",
      );
    }
    if (Date.now() >= deadline) {
      throw new ServiceError("TimeoutError", `job ${jobId} did not finish`);
    }
    await sleep(intervalMs);
  }
}
