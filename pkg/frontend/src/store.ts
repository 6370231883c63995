/**
 * Client-side session state.  The UI holds no authoritative state: every
 * edit is sent to the service (queued in order, one in flight at a time)
 * and the local document is replaced by the service's response.  A few
 * cheap edits are additionally previewed optimistically so dragging feels
 * immediate; a service rejection snaps the preview back.
 */

import type { SessionClient } from "./client.js";
import { ServiceError, type ProjectDocument } from "./types.js";

type Patcher = (
  doc: ProjectDocument,
  params: Record<string, unknown>,
) => ProjectDocument;

function clone(doc: ProjectDocument): ProjectDocument {
  return structuredClone(doc);
}

/** Optimistic previews for latency-sensitive edits. */
const PREVIEWS: Record<string, Patcher> = {
  move_handle: (doc, params) => {
    const next = clone(doc);
    const asm = next.assemblies[params.assembly as string];
    const part = asm?.parts[(params.part as number) ?? 0];
    const slice = part?.slices[params.slice_index as number];
    if (!slice) {
      return next;
    }
    const ring =
      (params.kind ?? "external") === "external"
        ? slice.external_handles
        : slice.hole_handles;
    const idx = params.handle_index as number;
    if (ring && idx >= 0 && idx < ring.length) {
      ring[idx] = [...(params.new_position as number[])];
    }
    return next;
  },
  set_flags: (doc, params) => {
    const next = clone(doc);
    const name = params.name as string;
    const old = next.flags[name] ?? { visible: true, locked: false };
    next.flags[name] = {
      visible: (params.visible as boolean | undefined) ?? old.visible,
      locked: (params.locked as boolean | undefined) ?? old.locked,
    };
    return next;
  },
};

export interface EditFailure {
  op: string;
  error: string;
  message: string;
}

export class SessionStore {
  /** Local render state: last authoritative document + pending previews. */
  private local: ProjectDocument;
  /** Last document confirmed by the service. */
  private confirmed: ProjectDocument;
  private queue: Promise<void> = Promise.resolve();
  private pending = 0;
  readonly failures: EditFailure[] = [];

  constructor(
    private readonly client: SessionClient,
    private readonly sessionId: string,
    initial: ProjectDocument,
  ) {
    this.local = clone(initial);
    this.confirmed = clone(initial);
  }

  get document(): ProjectDocument {
    return this.local;
  }

  get pendingEdits(): number {
    return this.pending;
  }

  /**
   * Queue one edit.  The optimistic preview (when one exists for the op)
   * is applied immediately; the authoritative response replaces the local
   * document in order.  Rejections snap the document back to the last
   * confirmed state and are recorded in `failures`.
   */
  edit(op: string, params: Record<string, unknown>): Promise<void> {
    const preview = PREVIEWS[op];
    if (preview) {
      this.local = preview(this.local, params);
    }
    this.pending += 1;
    this.queue = this.queue.then(async () => {
      try {
        const doc = await this.client.runOp(this.sessionId, op, params);
        this.confirmed = doc;
        this.local = doc;
      } catch (e) {
        if (e instanceof ServiceError) {
          // Snap back: discard this preview (and any stacked on top).
          this.local = clone(this.confirmed);
          this.failures.push({
            op,
            error: e.errorType,
            message: e.message,
          });
        } else {
          throw e;
        }
      } finally {
        this.pending -= 1;
      }
    });
    return this.queue;
  }

  /** Resolve once every queued edit has been confirmed or rejected. */
  flush(): Promise<void> {
    return this.queue;
  }

  /** Re-fetch the authoritative document and adopt it. */
  async reconcile(): Promise<ProjectDocument> {
    await this.flush();
    const doc = await this.client.getDocument(this.sessionId);
    this.confirmed = doc;
    this.local = doc;
    return doc;
  }
}
