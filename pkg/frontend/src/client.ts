/**
 * Thin typed client over the session service's HTTP surface.  The
 * transport is injectable so tests (and non-browser hosts) can supply
 * their own; `fetchTransport` adapts the global fetch.
 */

import {
  DocumentSchema,
  GraspEval,
  GraspEvalSchema,
  LogRecord,
  LogRecordSchema,
  MeshJobResult,
  MeshJobResultSchema,
  ProjectDocument,
  ServiceError,
  ServiceErrorSchema,
} from "./types.js";

export interface TransportResponse {
  status: number;
  body: unknown;
}

export type Transport = (
  method: "GET" | "POST",
  path: string,
  body?: unknown,
) => Promise<TransportResponse>;

export function fetchTransport(baseUrl: string): Transport {
  return async (method, path, body) => {
    const res = await fetch(baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return { status: res.status, body: await res.json() };
  };
}

async function expectOk(
  promise: Promise<TransportResponse>,
): Promise<unknown> {
  const res = await promise;
  if (res.status < 200 || res.status >= 300) {
    const parsed = ServiceErrorSchema.safeParse(res.body);
    if (parsed.success) {
      throw new ServiceError(parsed.data.error, parsed.data.message);
    }
    throw new ServiceError("HttpError", `service returned ${res.status}`);
  }
  return res.body;
}

export class SessionClient {
  constructor(private readonly transport: Transport) {}

  async createSession(document?: ProjectDocument): Promise<string> {
    const body = document === undefined ? {} : { document };
    const data = (await expectOk(
      this.transport("POST", "/sessions", body),
    )) as { session_id: string };
    return data.session_id;
  }

  async getDocument(sessionId: string): Promise<ProjectDocument> {
    const data = (await expectOk(
      this.transport("GET", `/sessions/${sessionId}/document`),
    )) as { document: unknown };
    return DocumentSchema.parse(data.document);
  }

  async getLog(sessionId: string): Promise<LogRecord[]> {
    const data = (await expectOk(
      this.transport("GET", `/sessions/${sessionId}/log`),
    )) as { records: unknown[] };
    return data.records.map((r) => LogRecordSchema.parse(r));
  }

  /** Run one named edit; resolves to the authoritative document. */
  async runOp(
    sessionId: string,
    op: string,
    params: Record<string, unknown>,
  ): Promise<ProjectDocument> {
    const data = (await expectOk(
      this.transport("POST", `/sessions/${sessionId}/ops/${op}`, params),
    )) as { document: unknown };
    return DocumentSchema.parse(data.document);
  }

  async startMeshJob(
    sessionId: string,
    assembly: string,
    kind = "final",
    samplesPerSegment = 8,
  ): Promise<string> {
    const data = (await expectOk(
      this.transport("POST", `/sessions/${sessionId}/mesh-jobs`, {
        assembly,
        kind,
        samples_per_segment: samplesPerSegment,
      }),
    )) as { job_id: string };
    return data.job_id;
  }

  async pollMeshJob(
    sessionId: string,
    jobId: string,
  ): Promise<MeshJobResult> {
    const data = await expectOk(
      this.transport("GET", `/sessions/${sessionId}/mesh-jobs/${jobId}`),
    );
    return MeshJobResultSchema.parse(data);
  }

  async graspEval(
    sessionId: string,
    assembly: string,
    grasp: string,
    directionSamples = 1024,
  ): Promise<GraspEval> {
    const data = await expectOk(
      this.transport("POST", `/sessions/${sessionId}/grasp-eval`, {
        assembly,
        grasp,
        direction_samples: directionSamples,
      }),
    );
    return GraspEvalSchema.parse(data);
  }

  async save(sessionId: string, path: string): Promise<void> {
    await expectOk(
      this.transport("POST", `/sessions/${sessionId}/save`, { path }),
    );
  }
}
