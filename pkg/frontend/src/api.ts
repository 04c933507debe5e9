// HTTP client for the control service; all panel mutations go through here.

import { parseTraceCsv } from "./trace.js";
import type { ControlRequest, LabState, Sample, ScanRequest } from "./types.js";

export class ApiError extends Error {
  constructor(public readonly status: number, detail: string) {
    super(detail);
  }
}

export interface LabApi {
  getState(): Promise<LabState>;
  postControls(cmd: ControlRequest): Promise<LabState>;
  startScan(req: ScanRequest): Promise<void>;
  stopScan(): Promise<void>;
  fetchTrace(): Promise<{ samples: Sample[]; metadata: Record<string, unknown> }>;
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (body.detail !== undefined) detail = JSON.stringify(body.detail);
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(response.status, detail);
}

export class HttpApi implements LabApi {
  constructor(private readonly base = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  getState(): Promise<LabState> {
    return this.json<LabState>("/api/state");
  }

  postControls(cmd: ControlRequest): Promise<LabState> {
    return this.json<LabState>("/api/controls", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(cmd),
    });
  }

  async startScan(req: ScanRequest): Promise<void> {
    await this.json("/api/scan", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  async stopScan(): Promise<void> {
    await this.json("/api/scan/stop", { method: "POST" });
  }

  async fetchTrace(): Promise<{ samples: Sample[]; metadata: Record<string, unknown> }> {
    const response = await fetch(this.base + "/api/trace");
    if (response.status === 404) return { samples: [], metadata: {} };
    await raiseForStatus(response);
    return parseTraceCsv(await response.text());
  }
}
