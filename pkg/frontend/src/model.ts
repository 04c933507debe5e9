// Panel state machine, kept free of DOM so it is directly testable.
// The displayed mixing angle is always the service-reported value; the
// panel never derives it from the rotation locally.

import { ApiError, type LabApi } from "./api.js";
import { SampleBuffer } from "./buffer.js";
import type { BeamlineChain, LabState, ScanRequest, Sample } from "./types.js";
import { DEFAULT_CHAIN } from "./types.js";

export type ConnectionMode = "stream" | "polling" | "offline";

export class PanelModel {
  state: LabState | null = null;
  mode: ConnectionMode = "offline";
  notice: string | null = null;
  chain: BeamlineChain = DEFAULT_CHAIN;
  readonly buffer: SampleBuffer;
  onChange: (() => void) | null = null;

  constructor(private readonly api: LabApi, capacity = 2000) {
    this.buffer = new SampleBuffer(capacity);
  }

  private changed(): void {
    this.onChange?.();
  }

  /** Service-reported mixing angle; null while unreachable. */
  get displayedThetaDeg(): number | null {
    return this.state ? this.state.theta_deg : null;
  }

  get reachable(): boolean {
    return this.state !== null && this.mode !== "offline";
  }

  async refreshState(): Promise<void> {
    try {
      this.state = await this.api.getState();
      if (this.mode === "offline") this.mode = "polling";
    } catch {
      this.state = null;
      this.mode = "offline";
    }
    this.changed();
  }

  /** Rebuild the plot from the recorded trace (reload / reconnect path). */
  async loadTrace(): Promise<number> {
    const { samples, metadata } = await this.api.fetchTrace();
    const chain = metadata["beamline"] as BeamlineChain | undefined;
    if (chain) this.chain = chain;
    const added = this.buffer.pushMany(samples);
    this.changed();
    return added;
  }

  async setRotation(deg: number): Promise<void> {
    await this.command({ table_rotation_deg: deg });
  }

  async setPosition(mm: number): Promise<void> {
    await this.command({ position_mm: mm });
  }

  async setLaser(name: string): Promise<void> {
    await this.command({ laser: name });
  }

  private async command(cmd: Record<string, number | string>): Promise<void> {
    try {
      this.state = await this.api.postControls(cmd);
      this.notice = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // scan owns the manipulator; surface the refusal, keep the panel live
        this.notice = "rejected: a scan owns the manipulator";
      } else if (err instanceof ApiError) {
        this.notice = `rejected: ${err.message}`;
      } else {
        this.mode = "offline";
        this.notice = "service unreachable";
      }
    }
    this.changed();
  }

  async startScan(req: ScanRequest): Promise<void> {
    try {
      this.buffer.clear();
      await this.api.startScan(req);
      this.notice = null;
    } catch (err) {
      this.notice = err instanceof ApiError ? `scan rejected: ${err.message}` : "service unreachable";
    }
    await this.refreshState();
  }

  async stopScan(): Promise<void> {
    try {
      await this.api.stopScan();
    } catch {
      this.notice = "service unreachable";
    }
    await this.refreshState();
  }

  onStreamOpen(): void {
    this.mode = "stream";
    this.notice = null;
    this.changed();
  }

  onStreamSample(sample: Sample): void {
    this.buffer.push(sample);
    this.changed();
  }

  /** Stream dropped: fall back to 1 Hz polling until it reconnects. */
  onStreamError(): void {
    if (this.mode === "stream") this.mode = "polling";
    this.changed();
  }
}

/** Detector sum normalized by the recorded chain; ~1 for a lossless rig. */
export function unitaritySum(sample: Sample, chain: BeamlineChain): number {
  const survive = (sample.i1 - chain.dark1) / (chain.gain1 * chain.splitter_ratio);
  const appear = (sample.i2 - chain.dark2) / (chain.gain2 * (1 - chain.splitter_ratio));
  return survive + appear;
}
